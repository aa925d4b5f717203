"""Block-Huffman compressors.

``build_codebook`` produces a canonical Huffman code over *every* block of
``Sigma^l`` (blocks absent from the table take part with weight zero), so the
code is complete and the tree machine built from it is total and
information-lossless without an escape mechanism.
"""
from __future__ import annotations

import csv
import heapq
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from .alphabet import Alphabet, SymbolString, prefix_truncate
from .blockstats import FrequencyTable, block_freq_table, decode_block, render_block
from .errors import BlockTooLarge, EmptySupport, InvalidArgument
from .fsc import CERT_PREFIX_CODE, Fsc

MAX_CODEBOOK_SPACE = 1 << 16


def huffman_lengths(weights: Mapping[int, int | Fraction]) -> dict[int, int]:
    """Huffman codeword lengths with deterministic tie-breaking.

    The two lightest subtrees are merged first; equal weights are ordered by
    the smallest block code each subtree contains.  A lone symbol gets length 1.
    """
    if not weights:
        raise EmptySupport("no symbols to code")
    if len(weights) == 1:
        return {next(iter(weights)): 1}
    parent: dict[int, int] = {}
    heap = [(w, key, key) for key, w in weights.items()]
    heapq.heapify(heap)
    next_id = -1
    while len(heap) > 1:
        w1, m1, n1 = heapq.heappop(heap)
        w2, m2, n2 = heapq.heappop(heap)
        parent[n1] = parent[n2] = next_id
        heapq.heappush(heap, (w1 + w2, min(m1, m2), next_id))
        next_id -= 1
    root = heap[0][2]
    depth: dict[int, int] = {root: 0}

    def depth_of(node: int) -> int:
        path = []
        while node not in depth:
            path.append(node)
            node = parent[node]
        d = depth[node]
        for p in reversed(path):
            d += 1
            depth[p] = d
        return d

    return {key: depth_of(key) for key in weights}


def canonical_codewords(lengths: Mapping[int, int],
                        weights: Mapping[int, int | Fraction] | None = None) -> dict[int, str]:
    """Canonical code: codewords assigned in (length, -weight, block) order.

    Ordering equal lengths by decreasing weight gives the most frequent block
    the all-zeros codeword, so a lone observed block is coded as "0".
    """
    w = weights or {}
    order = sorted(lengths, key=lambda c: (lengths[c], -w.get(c, 0), c))
    out: dict[int, str] = {}
    code = 0
    prev = None
    for c in order:
        ln = lengths[c]
        if prev is not None:
            code = (code + 1) << (ln - prev)
        out[c] = format(code, f"0{ln}b")
        prev = ln
    return out


@dataclass(frozen=True)
class HuffmanCodebook:
    ell: int
    k: int
    entries: Mapping[int, str]
    counts: Mapping[int, int]

    @property
    def space(self) -> int:
        return self.k ** self.ell

    def codeword(self, x) -> str:
        from .blockstats import encode_block

        key = x if isinstance(x, (int, np.integer)) else encode_block(x, self.k)
        return self.entries[int(key)]

    def lengths(self) -> dict[int, int]:
        return {c: len(w) for c, w in self.entries.items()}

    def is_prefix_free(self) -> bool:
        words = sorted(self.entries.values())
        # after sorting, a prefix sits directly before some word it prefixes
        return all(not b.startswith(a) for a, b in zip(words, words[1:]))

    def is_complete(self) -> bool:
        return len(self.entries) == self.space

    def certifiable(self) -> bool:
        return (self.is_complete() and all(self.entries.values())
                and self.is_prefix_free())

    def expected_length(self) -> Fraction:
        total = sum(self.counts.values())
        if total == 0:
            raise EmptySupport("codebook has no training counts")
        bits = sum(v * len(self.entries[c]) for c, v in self.counts.items())
        return Fraction(bits, total)

    def encoded_bits(self, table: FrequencyTable) -> int:
        return sum(v * len(self.entries[c]) for c, v in table.counts.items())

    def decode(self, bits: str) -> list[int]:
        """Split a concatenation of codewords back into block codes."""
        inverse = {w: c for c, w in self.entries.items()}
        out = []
        cur = ""
        for b in bits:
            cur += b
            if cur in inverse:
                out.append(inverse[cur])
                cur = ""
        if cur:
            raise InvalidArgument("trailing bits do not form a codeword")
        return out

    def to_rows(self):
        return [(render_block(c, self.k, self.ell), self.entries[c], self.counts.get(c, 0))
                for c in sorted(self.entries)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["block", "codeword", "count"])
        wr.writerows(self.to_rows())
        return buf.getvalue()


def build_codebook(t: FrequencyTable) -> HuffmanCodebook:
    """Canonical Huffman code for the block distribution ``t``.

    Every block of ``Sigma^l`` receives a codeword; unseen blocks carry weight
    zero and are merged first, so they only lengthen codewords of the least
    frequent seen blocks.  The expected length stays within one bit of H(t).
    """
    if t.total == 0 or not t.support():
        raise EmptySupport("frequency table has no positive counts")
    if t.space > MAX_CODEBOOK_SPACE:
        raise BlockTooLarge(f"{t.k}^{t.ell} blocks exceed the codebook limit {MAX_CODEBOOK_SPACE}")
    weights = {c: t.counts.get(c, 0) for c in range(t.space)}
    entries = canonical_codewords(huffman_lengths(weights), weights)
    return HuffmanCodebook(t.ell, t.k, entries, dict(t.items()))


def tree_state_count(k: int, ell: int) -> int:
    """States of the k-ary block tree of depth ``ell``: (k^l - 1)/(k - 1)."""
    return (k ** ell - 1) // (k - 1)


def huffman_ilfsc(book: HuffmanCodebook, alphabet: Alphabet | int | None = None,
                  provenance: str | None = None) -> Fsc:
    """The tree machine that emits a block's codeword on the block's last symbol.

    States are the proper prefixes of a block in breadth-first order (root 0).
    Blocks missing from ``book`` emit nothing; such machines carry no
    certificate and are generally lossy.
    """
    k = book.k if alphabet is None else (alphabet.k if isinstance(alphabet, Alphabet) else alphabet)
    if k != book.k:
        raise InvalidArgument("alphabet size differs from the codebook's")
    if not book.entries:
        raise EmptySupport("empty codebook")
    ell = book.ell
    s = tree_state_count(k, ell)
    offsets = [tree_state_count(k, d) for d in range(ell)]
    delta = np.zeros((s, k), dtype=np.int64)
    outputs = [[""] * k for _ in range(s)]
    for d in range(ell):
        for p in range(k ** d):
            q = offsets[d] + p
            for a in range(k):
                child = p * k + a
                if d + 1 < ell:
                    delta[q, a] = offsets[d + 1] + child
                else:
                    delta[q, a] = 0
                    outputs[q][a] = book.entries.get(child, "")
    cert = CERT_PREFIX_CODE if book.certifiable() else None
    return Fsc(delta, tuple(tuple(r) for r in outputs), 0, cert,
               provenance or f"huffman(l={ell})")


def build_for_string(u: SymbolString, ell: int, provenance: str | None = None) -> Fsc:
    """``C_F(l, u)``: Huffman tree machine trained on the aligned blocks of ``u_l``."""
    if ell < 1 or ell > len(u):
        raise BlockTooLarge(f"block length {ell} not in 1..{len(u)}")
    book = build_codebook(block_freq_table(prefix_truncate(u, ell), ell))
    return huffman_ilfsc(book, u.k, provenance)


def codebook_for_string(u: SymbolString, ell: int) -> HuffmanCodebook:
    if ell < 1 or ell > len(u):
        raise BlockTooLarge(f"block length {ell} not in 1..{len(u)}")
    return build_codebook(block_freq_table(prefix_truncate(u, ell), ell))


def decode_string(book: HuffmanCodebook, bits: str) -> SymbolString:
    """Inverse of running the tree machine on a block-aligned string."""
    symbols: list[int] = []
    for c in book.decode(bits):
        symbols.extend(decode_block(c, book.k, book.ell))
    return SymbolString(Alphabet(book.k), np.array(symbols, dtype=np.int64))
