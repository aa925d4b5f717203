"""Alphabets, symbol strings, paired strings, ingestion and generators.

Symbols are dense integer indices ``0..k-1``.  A pair of equal-length
strings over a k-symbol alphabet is stored as a single string over the
product alphabet of size ``k*k`` with pair code ``a*k + b`` (first
coordinate major).

The i.i.d. generator is pinned to numpy's PCG64 bit generator: ``n`` uniform
doubles are drawn with ``Generator.random`` and mapped through the cumulative
weights with a right-sided ``searchsorted``.  Same ``(measure, n, seed)``
gives the same string.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BlockTooLarge, EmptyPattern, InvalidArgument, LengthMismatch,
    NotNormalized, NotProductAlphabet, OutOfAlphabet,
)

NORMALIZATION_TOL = 1e-12


def _dtype_for(k: int):
    if k <= 1 << 8:
        return np.uint8
    if k <= 1 << 16:
        return np.uint16
    if k <= 1 << 32:
        return np.uint32
    return np.uint64


@dataclass(frozen=True)
class Alphabet:
    k: int
    symbol_names: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.k < 2:
            raise InvalidArgument(f"alphabet size must be >= 2, got {self.k}")
        if self.symbol_names is not None and len(self.symbol_names) != self.k:
            raise InvalidArgument("symbol_names must have one entry per symbol")

    def product(self) -> "Alphabet":
        return Alphabet(self.k * self.k)

    def glyph(self, a: int) -> str:
        if self.symbol_names is not None:
            return self.symbol_names[a]
        if self.k <= 10:
            return str(a)
        return f"<{a}>"

    @property
    def bits_per_symbol(self) -> int:
        """Width of a fixed-length binary code for one symbol."""
        return (self.k - 1).bit_length()


@dataclass(frozen=True, eq=False)
class SymbolString:
    """A finite string over ``alphabet``; ``data`` is a read-only array."""

    alphabet: Alphabet
    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 1:
            raise InvalidArgument("symbol data must be one-dimensional")
        if arr.size and (arr.min() < 0 or arr.max() >= self.alphabet.k):
            bad = int(np.flatnonzero((arr < 0) | (arr >= self.alphabet.k))[0])
            raise OutOfAlphabet(bad, int(arr[bad]))
        arr = arr.astype(_dtype_for(self.alphabet.k), copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_digits(cls, text: str, k: int) -> "SymbolString":
        return cls(Alphabet(k), np.array([int(c) for c in text], dtype=np.int64))

    @classmethod
    def from_list(cls, symbols: Iterable[int], k: int) -> "SymbolString":
        return cls(Alphabet(k), np.array(list(symbols), dtype=np.int64))

    @property
    def k(self) -> int:
        return self.alphabet.k

    def __len__(self) -> int:
        return int(self.data.shape[0])

    def __getitem__(self, item):
        if isinstance(item, slice):
            return type(self)(self.alphabet, self.data[item])
        return int(self.data[item])

    def __iter__(self):
        return (int(a) for a in self.data)

    def __eq__(self, other):
        if not isinstance(other, SymbolString):
            return NotImplemented
        return self.alphabet.k == other.alphabet.k and np.array_equal(self.data, other.data)

    def __hash__(self):
        return hash((self.alphabet.k, self.data.tobytes()))

    def __add__(self, other: "SymbolString") -> "SymbolString":
        if other.alphabet.k != self.alphabet.k:
            raise InvalidArgument("cannot concatenate strings over different alphabets")
        return type(self)(self.alphabet, np.concatenate([self.data, other.data]))

    def __repr__(self):
        body = self.to_text() if len(self) <= 40 else self[:40].to_text() + "..."
        return f"SymbolString(k={self.k}, n={len(self)}, {body!r})"

    def to_text(self) -> str:
        return "".join(self.alphabet.glyph(int(a)) for a in self.data)

    def tolist(self) -> list[int]:
        return [int(a) for a in self.data]


@dataclass(frozen=True, eq=False)
class PairedString(SymbolString):
    """The string ``(u,w)`` over the product alphabet, codes ``a*k + b``."""

    base: Alphabet = field(default=None)

    def __post_init__(self):
        if self.base is None:
            root = int(round(self.alphabet.k ** 0.5))
            if root * root != self.alphabet.k:
                raise NotProductAlphabet(f"alphabet size {self.alphabet.k} is not a perfect square")
            object.__setattr__(self, "base", Alphabet(root))
        if self.base.k * self.base.k != self.alphabet.k:
            raise NotProductAlphabet("product alphabet must have size k*k")
        super().__post_init__()

    def __getitem__(self, item):
        if isinstance(item, slice):
            return PairedString(self.alphabet, self.data[item], self.base)
        return int(self.data[item])

    def unzip(self) -> tuple[SymbolString, SymbolString]:
        k = self.base.k
        d = self.data.astype(np.int64)
        return SymbolString(self.base, d // k), SymbolString(self.base, d % k)


def pair(u: SymbolString, w: SymbolString, policy: str = "strict") -> PairedString:
    """Zip two strings symbol-wise into a string over the product alphabet."""
    if u.k != w.k:
        raise InvalidArgument("paired strings must share an alphabet")
    if policy not in ("strict", "truncate"):
        raise InvalidArgument(f"unknown pairing policy {policy!r}")
    n = len(u)
    if len(u) != len(w):
        if policy == "strict":
            raise LengthMismatch(f"cannot pair strings of lengths {len(u)} and {len(w)}")
        n = min(len(u), len(w))
    k = u.k
    codes = u.data[:n].astype(np.int64) * k + w.data[:n].astype(np.int64)
    return PairedString(u.alphabet.product(), codes, Alphabet(k))


def unzip(p: PairedString) -> tuple[SymbolString, SymbolString]:
    return p.unzip()


def prefix_truncate(u: SymbolString, r: int) -> SymbolString:
    """``u`` cut down to the largest multiple of ``r`` not exceeding ``|u|``."""
    if r < 1 or r > len(u):
        raise BlockTooLarge(f"block length {r} invalid for a string of length {len(u)}")
    return u[: (len(u) // r) * r]


def parse_symbols(raw: bytes, alphabet: Alphabet | int, mode: str = "digits") -> SymbolString:
    """Decode file content into a SymbolString.

    ``digits``: one ASCII digit per symbol; ASCII whitespace is skipped so
    that files ending in a newline load cleanly.
    ``raw-bytes``: one byte per symbol, requires ``k <= 256``.
    ``bit-packed``: eight symbols per byte, most significant bit first,
    requires ``k == 2``.
    """
    if isinstance(alphabet, int):
        alphabet = Alphabet(alphabet)
    k = alphabet.k
    buf = np.frombuffer(bytes(raw), dtype=np.uint8)
    if mode == "digits":
        if k > 10:
            raise InvalidArgument("digit mode requires k <= 10")
        keep = ~np.isin(buf, np.frombuffer(b" \t\r\n", dtype=np.uint8))
        positions = np.flatnonzero(keep)
        vals = buf[keep].astype(np.int64) - ord("0")
        bad = np.flatnonzero((vals < 0) | (vals >= k))
        if bad.size:
            raise OutOfAlphabet(int(positions[bad[0]]))
        return SymbolString(alphabet, vals)
    if mode == "raw-bytes":
        if k > 256:
            raise InvalidArgument("raw-bytes mode requires k <= 256")
        bad = np.flatnonzero(buf >= k)
        if bad.size:
            raise OutOfAlphabet(int(bad[0]), int(buf[bad[0]]))
        return SymbolString(alphabet, buf)
    if mode == "bit-packed":
        if k != 2:
            raise InvalidArgument("bit-packed mode requires k == 2")
        return SymbolString(alphabet, np.unpackbits(buf))
    raise InvalidArgument(f"unknown parse mode {mode!r}")


def format_symbols(u: SymbolString, mode: str = "digits") -> bytes:
    """Inverse of :func:`parse_symbols` (bit-packed pads the last byte with zeros)."""
    if mode == "digits":
        if u.k > 10:
            raise InvalidArgument("digit mode requires k <= 10")
        return (u.data.astype(np.uint8) + ord("0")).tobytes()
    if mode == "raw-bytes":
        if u.k > 256:
            raise InvalidArgument("raw-bytes mode requires k <= 256")
        return u.data.astype(np.uint8).tobytes()
    if mode == "bit-packed":
        if u.k != 2:
            raise InvalidArgument("bit-packed mode requires k == 2")
        return np.packbits(u.data.astype(np.uint8)).tobytes()
    raise InvalidArgument(f"unknown format mode {mode!r}")


# ---------------------------------------------------------------------------
# probability measures


@dataclass(frozen=True)
class ProbMeasure:
    """A probability vector over ``0..m-1``.

    Weights may be Fractions (exact) or floats.
    """

    weights: tuple

    def __post_init__(self):
        w = tuple(self.weights)
        if not w:
            raise InvalidArgument("a measure needs at least one outcome")
        if any(x < 0 for x in w):
            raise NotNormalized("negative weight")
        total = sum(w)
        if abs(float(total) - 1.0) > NORMALIZATION_TOL:
            raise NotNormalized(f"weights sum to {float(total)!r}")
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def positive(self) -> bool:
        return all(x > 0 for x in self.weights)

    def __getitem__(self, a: int):
        return self.weights[a]

    def as_array(self) -> np.ndarray:
        return np.array([float(x) for x in self.weights])

    @classmethod
    def uniform(cls, m: int) -> "ProbMeasure":
        return cls(tuple(Fraction(1, m) for _ in range(m)))

    @classmethod
    def point_mass(cls, m: int, a: int) -> "ProbMeasure":
        return cls(tuple(Fraction(int(i == a)) for i in range(m)))

    @classmethod
    def parse(cls, text: str) -> "ProbMeasure":
        """Parse ``"0.75,0.25"`` or ``"3/4,1/4"``."""
        parts = [p.strip() for p in text.split(",") if p.strip()]
        try:
            return cls(tuple(Fraction(p) for p in parts))
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidArgument(f"cannot parse measure {text!r}") from exc

    def product(self, other: "ProbMeasure") -> "ProbMeasure":
        """``(a,b) -> self[a]*other[b]`` laid out with pair code ``a*m + b``."""
        if other.size != self.size:
            raise InvalidArgument("product measure needs equal-size factors")
        return ProbMeasure(tuple(x * y for x in self.weights for y in other.weights))

    def marginals(self) -> tuple["ProbMeasure", "ProbMeasure"]:
        m = int(round(self.size ** 0.5))
        if m * m != self.size:
            raise NotProductAlphabet("marginals need a measure on a product alphabet")
        first = tuple(sum(self.weights[a * m + b] for b in range(m)) for a in range(m))
        second = tuple(sum(self.weights[a * m + b] for a in range(m)) for b in range(m))
        return ProbMeasure(first), ProbMeasure(second)


# ---------------------------------------------------------------------------
# generators


def _digits(value: int, k: int) -> list[int]:
    out = []
    while value:
        value, d = divmod(value, k)
        out.append(d)
    return out[::-1]


def gen_champernowne(k: int, n: int) -> SymbolString:
    """First ``n`` symbols of the base-k numerals of 1, 2, 3, ... concatenated."""
    if k < 2 or n < 0:
        raise InvalidArgument("champernowne needs k >= 2 and n >= 0")
    out: list[int] = []
    i = 1
    while len(out) < n:
        out.extend(_digits(i, k))
        i += 1
    return SymbolString(Alphabet(k), np.array(out[:n], dtype=np.int64))


def gen_iid(measure: ProbMeasure, n: int, seed: int) -> SymbolString:
    """``n`` i.i.d. draws from ``measure`` using PCG64 seeded with ``seed``."""
    if n < 0:
        raise InvalidArgument("length must be non-negative")
    rng = np.random.Generator(np.random.PCG64(seed))
    cum = np.cumsum(measure.as_array())
    cum[-1] = 1.0
    draws = rng.random(n)
    data = np.searchsorted(cum, draws, side="right")
    return SymbolString(Alphabet(max(measure.size, 2)), data)


def gen_periodic(pattern: SymbolString | Sequence[int], n: int, k: int | None = None) -> SymbolString:
    if not isinstance(pattern, SymbolString):
        pattern = SymbolString(Alphabet(k if k is not None else max(2, max(pattern, default=0) + 1)),
                               np.array(list(pattern), dtype=np.int64))
    if len(pattern) == 0:
        raise EmptyPattern("periodic pattern must be non-empty")
    if n < 0:
        raise InvalidArgument("length must be non-negative")
    return SymbolString(pattern.alphabet, np.resize(pattern.data, n))
