"""Aligned block frequency tables and Shannon information measures.

Blocks of length ``l`` over a k-symbol alphabet are keyed by their base-k
integer code, first symbol most significant, so numeric order on codes is
lexicographic order on blocks.  Counts are exact integers; frequencies are
exposed as Fractions and only the logarithms are evaluated in floating point.
"""
from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .alphabet import NORMALIZATION_TOL, PairedString, ProbMeasure, SymbolString
from .errors import (
    AbsoluteContinuityViolation, InvalidArgument, LengthMismatch,
    NotMultiple, NotNormalized,
)

_INT64_SAFE = 1 << 62
_BINCOUNT_MAX = 1 << 22


# ---------------------------------------------------------------------------
# block encoding


def block_codes(u: SymbolString, ell: int) -> np.ndarray:
    """Codes of the ``len(u) // ell`` aligned blocks of ``u``.

    Returns int64 codes when ``k**ell`` fits, otherwise an object array of
    Python ints.
    """
    if ell < 1:
        raise InvalidArgument("block length must be >= 1")
    m = len(u) // ell
    rows = u.data[: m * ell].reshape(m, ell)
    if u.k ** ell < _INT64_SAFE:
        codes = np.zeros(m, dtype=np.int64)
        for j in range(ell):
            codes = codes * u.k + rows[:, j]
        return codes
    out = np.empty(m, dtype=object)
    for i in range(m):
        c = 0
        for a in rows[i]:
            c = c * u.k + int(a)
        out[i] = c
    return out


def encode_block(x, k: int) -> int:
    """Code of a single block given as a SymbolString, digit string or sequence."""
    if isinstance(x, SymbolString):
        seq = x.tolist()
    elif isinstance(x, str):
        seq = [int(c) for c in x]
    else:
        seq = [int(a) for a in x]
    c = 0
    for a in seq:
        if not 0 <= a < k:
            raise InvalidArgument(f"symbol {a} outside alphabet of size {k}")
        c = c * k + a
    return c


def decode_block(code: int, k: int, ell: int) -> tuple[int, ...]:
    out = []
    for _ in range(ell):
        code, d = divmod(int(code), k)
        out.append(d)
    return tuple(reversed(out))


def render_block(code: int, k: int, ell: int) -> str:
    digits = decode_block(code, k, ell)
    if k <= 10:
        return "".join(str(d) for d in digits)
    return ".".join(str(d) for d in digits)


def _count_codes(codes: np.ndarray, space: int) -> dict[int, int]:
    if codes.size == 0:
        return {}
    if codes.dtype != object and space <= _BINCOUNT_MAX:
        bc = np.bincount(codes, minlength=0)
        nz = np.flatnonzero(bc)
        return {int(c): int(bc[c]) for c in nz}
    if codes.dtype != object:
        vals, cnt = np.unique(codes, return_counts=True)
        return {int(v): int(c) for v, c in zip(vals, cnt)}
    return dict(Counter(int(c) for c in codes))


# ---------------------------------------------------------------------------
# tables


@dataclass(frozen=True)
class FrequencyTable:
    """Aligned ``ell``-block counts of a string whose length is a multiple of ``ell``."""

    ell: int
    k: int
    counts: Mapping[int, int]
    total: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.total:
            raise InvalidArgument("counts do not sum to total")

    def count(self, x) -> int:
        return self.counts.get(self._key(x), 0)

    def frequency(self, x) -> Fraction:
        if self.total == 0:
            return Fraction(0)
        return Fraction(self.count(x), self.total)

    def _key(self, x) -> int:
        return x if isinstance(x, (int, np.integer)) else encode_block(x, self.k)

    @property
    def space(self) -> int:
        return self.k ** self.ell

    def support(self) -> list[int]:
        return sorted(c for c, v in self.counts.items() if v > 0)

    def items(self):
        """(code, count) pairs of the support in block order."""
        return [(c, self.counts[c]) for c in self.support()]

    def distribution(self) -> dict[int, Fraction]:
        return {c: Fraction(v, self.total) for c, v in self.items()}

    def merge(self, other: "FrequencyTable") -> "FrequencyTable":
        """Add the counts of two chunk tables (chunks must be block-aligned)."""
        if (self.ell, self.k) != (other.ell, other.k):
            raise InvalidArgument("can only merge tables with the same (ell, k)")
        merged = Counter(self.counts)
        merged.update(other.counts)
        return FrequencyTable(self.ell, self.k, dict(merged), self.total + other.total)

    def entropy(self) -> float:
        return shannon_entropy(self)

    def to_rows(self):
        return [
            (render_block(c, self.k, self.ell), v, Fraction(v, self.total))
            for c, v in self.items()
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["block", "count", "frequency"])
        for block, count, freq in self.to_rows():
            wr.writerow([block, count, f"{float(freq):.17g}"])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "k": self.k,
            "total": self.total,
            "entropy_bits": self.entropy(),
            "blocks": [
                {"block": b, "count": c, "frequency": str(f)} for b, c, f in self.to_rows()
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


@dataclass(frozen=True)
class JointFrequencyTable:
    """Counts of aligned block pairs ``(x, y)`` in the pairing ``(u, w)``."""

    ell: int
    k: int
    counts: Mapping[tuple[int, int], int]
    total: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.total:
            raise InvalidArgument("counts do not sum to total")

    def count(self, x, y) -> int:
        kx = x if isinstance(x, (int, np.integer)) else encode_block(x, self.k)
        ky = y if isinstance(y, (int, np.integer)) else encode_block(y, self.k)
        return self.counts.get((int(kx), int(ky)), 0)

    def frequency(self, x, y) -> Fraction:
        if self.total == 0:
            return Fraction(0)
        return Fraction(self.count(x, y), self.total)

    def items(self):
        return sorted((key, v) for key, v in self.counts.items() if v > 0)

    def distribution(self) -> dict[tuple[int, int], Fraction]:
        return {key: Fraction(v, self.total) for key, v in self.items()}

    def swapped(self) -> "JointFrequencyTable":
        return JointFrequencyTable(
            self.ell, self.k, {(y, x): v for (x, y), v in self.counts.items()}, self.total
        )

    def entropy(self) -> float:
        return shannon_entropy(self)

    def to_rows(self):
        return [
            (render_block(x, self.k, self.ell), render_block(y, self.k, self.ell), v,
             Fraction(v, self.total))
            for (x, y), v in self.items()
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["block_u", "block_w", "count", "frequency"])
        for bu, bw, count, freq in self.to_rows():
            wr.writerow([bu, bw, count, f"{float(freq):.17g}"])
        return buf.getvalue()

    def to_dict(self) -> dict:
        first, second = marginals(self)
        return {
            "ell": self.ell,
            "k": self.k,
            "total": self.total,
            "joint_entropy_bits": self.entropy(),
            "entropy_u_bits": first.entropy(),
            "entropy_w_bits": second.entropy(),
            "mutual_information_bits": mutual_information(self),
            "pairs": [
                {"block_u": a, "block_w": b, "count": c, "frequency": str(f)}
                for a, b, c, f in self.to_rows()
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# operations


def _require_multiple(n: int, ell: int) -> None:
    if ell < 1:
        raise InvalidArgument("block length must be >= 1")
    if n % ell:
        raise NotMultiple(f"length {n} is not a multiple of block length {ell}")


def block_count(x, u: SymbolString, ell: int) -> int:
    """Number of aligned blocks of ``u`` equal to ``x``."""
    _require_multiple(len(u), ell)
    key = encode_block(x, u.k)
    codes = block_codes(u, ell)
    return int(np.count_nonzero(codes == key))


def block_freq_table(u: SymbolString, ell: int) -> FrequencyTable:
    _require_multiple(len(u), ell)
    if len(u) < ell:
        raise NotMultiple("string shorter than one block")
    codes = block_codes(u, ell)
    return FrequencyTable(ell, u.k, _count_codes(codes, u.k ** ell), len(codes))


def joint_block_freq_table(u: SymbolString, w: SymbolString, ell: int) -> JointFrequencyTable:
    if len(u) != len(w):
        raise LengthMismatch(f"lengths {len(u)} and {len(w)} differ")
    if u.k != w.k:
        raise InvalidArgument("strings must share an alphabet")
    _require_multiple(len(u), ell)
    if len(u) < ell:
        raise NotMultiple("string shorter than one block")
    cu = block_codes(u, ell)
    cw = block_codes(w, ell)
    space = u.k ** ell
    if cu.dtype != object and space * space < _INT64_SAFE:
        joint = _count_codes(cu * space + cw, space * space)
        counts = {divmod(c, space): v for c, v in joint.items()}
    else:
        counts = dict(Counter(zip((int(a) for a in cu), (int(b) for b in cw))))
    return JointFrequencyTable(ell, u.k, counts, len(cu))


def paired_block_freq_table(p: PairedString, ell: int) -> FrequencyTable:
    """Block table of the paired string itself (alphabet ``k*k``)."""
    return block_freq_table(p, ell)


def joint_key_for_pair_block(code: int, k: int, ell: int) -> tuple[int, int]:
    """Map a block code of a PairedString to the (x, y) block codes of u and w."""
    x = y = 0
    for p in decode_block(code, k * k, ell):
        a, b = divmod(p, k)
        x = x * k + a
        y = y * k + b
    return x, y


def marginals(j: JointFrequencyTable) -> tuple[FrequencyTable, FrequencyTable]:
    first: Counter = Counter()
    second: Counter = Counter()
    for (x, y), v in j.counts.items():
        first[x] += v
        second[y] += v
    return (
        FrequencyTable(j.ell, j.k, dict(first), j.total),
        FrequencyTable(j.ell, j.k, dict(second), j.total),
    )


def _entropy_from_counts(counts: Iterable[int]) -> float:
    c = sorted(int(v) for v in counts if v > 0)
    if not c:
        raise NotNormalized("empty distribution")
    total = sum(c)
    log_total = math.log2(total)
    h = 0.0
    for v in c:
        h += (v / total) * (log_total - math.log2(v))
    return h


def _entropy_from_weights(weights: Sequence) -> float:
    s = sum(weights)
    if abs(float(s) - 1.0) > NORMALIZATION_TOL or any(p < 0 for p in weights):
        raise NotNormalized(f"weights sum to {float(s)!r}")
    h = 0.0
    for p in sorted(weights):
        if p > 0:
            if isinstance(p, Fraction):
                h += float(p) * (math.log2(p.denominator) - math.log2(p.numerator))
            else:
                h -= float(p) * math.log2(float(p))
    return h


def shannon_entropy(d) -> float:
    """Shannon entropy in bits, with ``0 log(1/0) = 0``.

    Accepts a FrequencyTable, JointFrequencyTable, ProbMeasure or a plain
    sequence of weights.  Tables are evaluated from their exact counts in a
    fixed (sorted) order, so tables with the same multiset of counts give
    bit-identical results.
    """
    if isinstance(d, (FrequencyTable, JointFrequencyTable)):
        if d.total == 0:
            raise NotNormalized("empty table")
        return _entropy_from_counts(d.counts.values())
    if isinstance(d, ProbMeasure):
        return _entropy_from_weights(d.weights)
    if isinstance(d, Mapping):
        return _entropy_from_weights(list(d.values()))
    return _entropy_from_weights(list(d))


def mutual_information(j) -> float:
    """``H(first marginal) + H(second marginal) - H(joint)`` in bits (raw, may be -1e-16)."""
    if isinstance(j, JointFrequencyTable):
        first, second = marginals(j)
        return shannon_entropy(first) + shannon_entropy(second) - shannon_entropy(j)
    if isinstance(j, ProbMeasure):
        a1, a2 = j.marginals()
        return shannon_entropy(a1) + shannon_entropy(a2) - shannon_entropy(j)
    raise InvalidArgument("mutual_information needs a joint table or a joint measure")


def kl_divergence(alpha: ProbMeasure, beta: ProbMeasure) -> float:
    """``sum alpha(a) log(alpha(a) / beta(a))`` in bits."""
    if alpha.size != beta.size:
        raise InvalidArgument("measures must share a domain")
    d = 0.0
    for a, (p, q) in enumerate(zip(alpha.weights, beta.weights)):
        if p == 0:
            continue
        if q == 0:
            raise AbsoluteContinuityViolation(f"alpha({a}) > 0 but beta({a}) = 0")
        if isinstance(p, Fraction) and isinstance(q, Fraction):
            ratio = p / q
            d += float(p) * (math.log2(ratio.numerator) - math.log2(ratio.denominator))
        else:
            d += float(p) * math.log2(float(p) / float(q))
    return d


def self_information(w: SymbolString, beta: ProbMeasure) -> float:
    """``sum_i log(1/beta(w[i]))`` in bits."""
    if beta.size < w.k and len(w) and int(w.data.max()) >= beta.size:
        raise InvalidArgument("measure does not cover the alphabet")
    counts = np.bincount(w.data.astype(np.int64), minlength=beta.size)
    total = 0.0
    for a in np.flatnonzero(counts):
        p = beta.weights[a]
        if p == 0:
            raise AbsoluteContinuityViolation(f"symbol {a} occurs but has measure 0")
        if isinstance(p, Fraction):
            info = math.log2(p.denominator) - math.log2(p.numerator)
        else:
            info = -math.log2(float(p))
        total += int(counts[a]) * info
    return total


def table_as_measure(t: FrequencyTable) -> ProbMeasure:
    """Dense ProbMeasure over all ``k**ell`` blocks (small tables only)."""
    if t.space > _BINCOUNT_MAX:
        raise InvalidArgument("table too large to densify")
    return ProbMeasure(tuple(Fraction(t.counts.get(c, 0), t.total) for c in range(t.space)))
