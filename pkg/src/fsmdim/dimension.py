"""Finite-prefix estimators for block entropy and mutual-information rates.

Each grid point is an exact aligned-block table of a prefix ``u|n_l`` with
``n_l = floor(n/l)*l``.  liminf/limsup over n are replaced by min/max over
the last ``tail_fraction`` of the n grid.  The limit in l is taken over the
block lengths whose tables are adequately covered by the data (l <= l*).
For aligned block entropy that limit equals the infimum over l, because the
rate at a multiple of l never exceeds the rate at l by more than end
effects.  Entropy estimates therefore report the minimum over l <= l*, and
the mutual estimate combines the three entropy infima as H(u)+H(w)-H(u,w).
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .alphabet import ProbMeasure, SymbolString
from .blockstats import _entropy_from_counts, block_codes, kl_divergence, self_information
from .errors import (
    AbsoluteContinuityViolation, EmptyInput, GridExceedsPrefix, InvalidArgument, LengthMismatch,
)

DEFAULT_ELL_MAX = 6
DEFAULT_TAIL_FRACTION = 0.25
DEFAULT_COVERAGE = 25
_DENSE_LIMIT = 1 << 22


def default_n_grid(length: int, start_exp: int = 10) -> list[int]:
    """Powers of two from ``2**start_exp`` below ``length``, then ``length`` itself."""
    if length < 1:
        raise EmptyInput("cannot build a grid for an empty prefix")
    grid = []
    n = 1 << start_exp
    while n < length:
        grid.append(n)
        n <<= 1
    grid.append(length)
    return grid


def _validate_grid(length: int, ells, ns) -> tuple[list[int], list[int]]:
    ns = sorted({int(n) for n in ns})
    ells = sorted({int(e) for e in ells})
    if not ns or not ells:
        raise InvalidArgument("empty grid")
    if ells[0] < 1:
        raise InvalidArgument("block lengths must be >= 1")
    if ns[-1] > length:
        raise GridExceedsPrefix(f"grid point {ns[-1]} exceeds prefix length {length}")
    if ns[0] < ells[-1]:
        raise InvalidArgument(f"grid point {ns[0]} is shorter than block length {ells[-1]}")
    return ells, ns


def _counts(codes: np.ndarray, space: int) -> list[int]:
    if codes.dtype != object and space <= _DENSE_LIMIT:
        c = np.bincount(codes, minlength=space)
        return c[c > 0].tolist()
    _, c = np.unique(codes, return_counts=True)
    return c.tolist()


def _joint_counts(cu: np.ndarray, cw: np.ndarray, space: int):
    """Nonzero joint counts plus the two marginal count lists derived from them."""
    if cu.dtype != object and space * space <= _DENSE_LIMIT:
        j = np.bincount(cu * space + cw, minlength=space * space).reshape(space, space)
        return j[j > 0].tolist(), [int(v) for v in j.sum(axis=1) if v], [int(v) for v in j.sum(axis=0) if v]
    keys, c = np.unique(np.stack([cu.astype(np.int64), cw.astype(np.int64)]), axis=1, return_counts=True)
    m1: dict[int, int] = {}
    m2: dict[int, int] = {}
    for (a, b), v in zip(keys.T.tolist(), c.tolist()):
        m1[a] = m1.get(a, 0) + v
        m2[b] = m2.get(b, 0) + v
    return c.tolist(), list(m1.values()), list(m2.values())


def _norm(h: float, ell: int, k: int) -> float:
    return h / (ell * math.log2(k))


@dataclass
class RateGrid:
    kind: str  # entropy | joint-entropy | mutual-information
    k: int
    ells: list[int]
    ns: list[int]
    values: np.ndarray

    def value(self, ell: int, n: int) -> float:
        return float(self.values[self.ells.index(ell), self.ns.index(n)])

    def row(self, ell: int) -> np.ndarray:
        return self.values[self.ells.index(ell)]

    def to_rows(self):
        return [(ell, n, float(self.values[i, j]))
                for i, ell in enumerate(self.ells) for j, n in enumerate(self.ns)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["ell", "n", "value"])
        for ell, n, v in self.to_rows():
            wr.writerow([ell, n, repr(v)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"kind": self.kind, "k": self.k, "ells": self.ells, "ns": self.ns,
                "values": [[float(v) for v in row] for row in self.values]}


def entropy_rate_curve(u: SymbolString, ell_grid, n_grid) -> RateGrid:
    """``H(pi_{u|n_l}^(l)) / (l log k)`` at every (l, n)."""
    ells, ns = _validate_grid(len(u), ell_grid, n_grid)
    k = u.k
    vals = np.zeros((len(ells), len(ns)))
    for i, ell in enumerate(ells):
        codes = block_codes(u[: (ns[-1] // ell) * ell], ell)
        for j, n in enumerate(ns):
            vals[i, j] = _norm(_entropy_from_counts(_counts(codes[: n // ell], k ** ell)), ell, k)
    return RateGrid("entropy", k, ells, ns, vals)


def _pair_grids(u: SymbolString, w: SymbolString, ell_grid, n_grid):
    if len(u) != len(w):
        raise LengthMismatch(f"lengths {len(u)} and {len(w)} differ")
    if u.k != w.k:
        raise InvalidArgument("strings must share an alphabet")
    ells, ns = _validate_grid(len(u), ell_grid, n_grid)
    k = u.k
    h1 = np.zeros((len(ells), len(ns)))
    h2 = np.zeros_like(h1)
    hj = np.zeros_like(h1)
    for i, ell in enumerate(ells):
        top = (ns[-1] // ell) * ell
        cu = block_codes(u[:top], ell)
        cw = block_codes(w[:top], ell)
        for j, n in enumerate(ns):
            m = n // ell
            joint, m1, m2 = _joint_counts(cu[:m], cw[:m], k ** ell)
            hj[i, j] = _entropy_from_counts(joint)
            h1[i, j] = _entropy_from_counts(m1)
            h2[i, j] = _entropy_from_counts(m2)
    return k, ells, ns, h1, h2, hj


def joint_entropy_rate_curve(u: SymbolString, w: SymbolString, ell_grid, n_grid) -> RateGrid:
    """Joint block entropy normalized by ``l log k`` (range [0, 2])."""
    k, ells, ns, _, _, hj = _pair_grids(u, w, ell_grid, n_grid)
    scale = np.array([ell * math.log2(k) for ell in ells])[:, None]
    return RateGrid("joint-entropy", k, ells, ns, hj / scale)


def mutual_info_rate_curve(u: SymbolString, w: SymbolString, ell_grid, n_grid) -> RateGrid:
    """``(H1 + H2 - H) / (l log k)`` from one joint table per point."""
    k, ells, ns, h1, h2, hj = _pair_grids(u, w, ell_grid, n_grid)
    scale = np.array([ell * math.log2(k) for ell in ells])[:, None]
    return RateGrid("mutual-information", k, ells, ns, (h1 + h2 - hj) / scale)


def pair_rate_curves(u: SymbolString, w: SymbolString, ell_grid, n_grid) -> dict[str, RateGrid]:
    """Entropy curves of u and w, the joint curve and the mutual curve in one pass."""
    k, ells, ns, h1, h2, hj = _pair_grids(u, w, ell_grid, n_grid)
    scale = np.array([ell * math.log2(k) for ell in ells])[:, None]
    return {
        "u": RateGrid("entropy", k, ells, ns, h1 / scale),
        "w": RateGrid("entropy", k, ells, ns, h2 / scale),
        "joint": RateGrid("joint-entropy", k, ells, ns, hj / scale),
        "mutual": RateGrid("mutual-information", k, ells, ns, (h1 + h2 - hj) / scale),
    }


# ---------------------------------------------------------------------------
# estimates


def coverage_ell(n_max: int, k: int, ell_max: int, coverage: int = DEFAULT_COVERAGE) -> int | None:
    """Largest l <= ell_max with ``floor(n_max/l) >= coverage * (k*k)**l``."""
    best = None
    for ell in range(1, ell_max + 1):
        if n_max // ell >= coverage * (k * k) ** ell:
            best = ell
    return best


@dataclass
class DimensionEstimate:
    kind: str
    grid: RateGrid
    per_ell: list[dict]
    ell_star: int
    lower: float
    upper: float
    params: dict
    warning: str | None = None
    extras: dict = field(default_factory=dict)

    def tail(self, ell: int) -> dict:
        return self.per_ell[self.grid.ells.index(ell)]

    def to_dict(self) -> dict:
        est = {"lower": self.lower, "upper": self.upper, "ell_star": self.ell_star}
        if self.kind == "mutual-information":
            est["lower"] = max(0.0, self.lower)
            est["upper"] = max(0.0, self.upper)
            est["lower_raw"] = self.lower
            est["upper_raw"] = self.upper
        if self.kind == "joint-entropy":
            est["range"] = [0.0, 2.0]
        d = {"kind": self.kind, "params": self.params, "estimate": est,
             "per_ell": self.per_ell, "grid": self.grid.to_dict(), "warning": self.warning}
        if self.extras:
            d.update(self.extras)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _summarize(grid: RateGrid, tail_fraction: float, ell_max: int, coverage: int,
               params: dict) -> DimensionEstimate:
    if not 0 < tail_fraction <= 1:
        raise InvalidArgument("tail_fraction must lie in (0, 1]")
    width = max(1, math.ceil(tail_fraction * len(grid.ns)))
    per_ell = []
    for i, ell in enumerate(grid.ells):
        tail = grid.values[i, -width:]
        per_ell.append({"ell": ell, "tail_lower": float(tail.min()), "tail_upper": float(tail.max()),
                        "tail_ns": grid.ns[-width:]})
    star = coverage_ell(grid.ns[-1], grid.k, min(ell_max, grid.ells[-1]), coverage)
    warning = None
    if star is None:
        star = grid.ells[0]
        warning = (f"no block length meets the coverage threshold at n={grid.ns[-1]}; "
                   f"reporting l={star}")
    elif ell_max > star:
        warning = (f"ell_max={ell_max} exceeds the coverage threshold; "
                   f"estimate uses ell*={star}")
    usable = [p for p in per_ell if p["ell"] <= star]
    params = dict(params, tail_fraction=tail_fraction, tail_width=width, coverage=coverage,
                  coverage_rule="floor(n_max/l) >= coverage * (k^2)^l",
                  final_rule="min over l <= ell_star")
    return DimensionEstimate(grid.kind, grid, per_ell, star,
                             min(p["tail_lower"] for p in usable),
                             min(p["tail_upper"] for p in usable), params, warning)


def _grid_params(length: int, ell_max: int, n_grid) -> tuple[list[int], list[int]]:
    if ell_max < 1:
        raise InvalidArgument("ell_max must be >= 1")
    ns = default_n_grid(length) if n_grid is None else sorted({int(n) for n in n_grid})
    if ns and ns[-1] > length:
        raise GridExceedsPrefix(f"grid point {ns[-1]} exceeds prefix length {length}")
    ells = list(range(1, min(ell_max, ns[0]) + 1))
    return ells, ns


def estimate_dim(u: SymbolString, ell_max: int = DEFAULT_ELL_MAX, n_grid=None,
                 tail_fraction: float = DEFAULT_TAIL_FRACTION,
                 coverage: int = DEFAULT_COVERAGE) -> DimensionEstimate:
    """Tail-window lower/upper block entropy rates (finite-state dimension surrogates)."""
    ells, ns = _grid_params(len(u), ell_max, n_grid)
    grid = entropy_rate_curve(u, ells, ns)
    return _summarize(grid, tail_fraction, ell_max, coverage,
                      {"ell_max": ell_max, "n_grid": ns, "k": u.k, "n": len(u)})


def estimate_joint_dim(u: SymbolString, w: SymbolString, ell_max: int = DEFAULT_ELL_MAX,
                       n_grid=None, tail_fraction: float = DEFAULT_TAIL_FRACTION,
                       coverage: int = DEFAULT_COVERAGE) -> DimensionEstimate:
    """Joint dimension surrogate, range [0, 2]."""
    if len(u) != len(w):
        raise LengthMismatch(f"lengths {len(u)} and {len(w)} differ")
    ells, ns = _grid_params(len(u), ell_max, n_grid)
    grid = joint_entropy_rate_curve(u, w, ells, ns)
    return _summarize(grid, tail_fraction, ell_max, coverage,
                      {"ell_max": ell_max, "n_grid": ns, "k": u.k, "n": len(u)})


def estimate_mdim(u: SymbolString, w: SymbolString, ell_max: int = DEFAULT_ELL_MAX,
                  n_grid=None, tail_fraction: float = DEFAULT_TAIL_FRACTION,
                  coverage: int = DEFAULT_COVERAGE, budgets=None,
                  cross_check: bool = True) -> DimensionEstimate:
    """Tail-window lower/upper block mutual-information rates.

    With ``cross_check`` the report also compares the rate at block length r'
    against the catalog mutual ratio for each (r, t) in ``budgets``
    (default ``(k^2, k^2)`` and ``(k^4, k^4)``).
    """
    from .ratios import RatioCache, mi_cross_check

    if len(u) != len(w):
        raise LengthMismatch(f"lengths {len(u)} and {len(w)} differ")
    ells, ns = _grid_params(len(u), ell_max, n_grid)
    curves = pair_rate_curves(u, w, ells, ns)
    base = {"ell_max": ell_max, "n_grid": ns, "k": u.k, "n": len(u)}
    parts = {key: _summarize(curves[key], tail_fraction, ell_max, coverage, base)
             for key in ("u", "w", "joint")}
    est = _summarize(curves["mutual"], tail_fraction, ell_max, coverage, base)
    # differences of minima need not be ordered, so report the sorted bracket
    lo = parts["u"].lower + parts["w"].lower - parts["joint"].lower
    hi = parts["u"].upper + parts["w"].upper - parts["joint"].upper
    est.lower, est.upper = min(lo, hi), max(lo, hi)
    est.params["final_rule"] = "H(u) + H(w) - H(u,w), each the min over l <= ell_star"
    est.extras["components"] = {key: {"lower": e.lower, "upper": e.upper}
                                for key, e in parts.items()}
    at_star = est.tail(est.ell_star)
    est.extras["at_ell_star"] = {"lower": at_star["tail_lower"], "upper": at_star["tail_upper"]}
    if cross_check:
        k = u.k
        budgets = budgets or [(k * k, k * k), (k ** 4, k ** 4)]
        top = ns[-1]
        uu, ww = u[:top], w[:top]
        cache = RatioCache(uu, ww, max(max(b) for b in budgets))
        est.extras["cross_check"] = [mi_cross_check(uu, ww, r, t, cache) for r, t in budgets]
    return est


@dataclass
class BetaDimEstimate:
    lower: float
    upper: float
    ns: list[int]
    values: list[float]
    params: dict

    def to_dict(self) -> dict:
        return {"estimate": {"lower": self.lower, "upper": self.upper},
                "ns": self.ns, "values": self.values, "params": self.params}


def estimate_beta_dim(u: SymbolString, beta: ProbMeasure, r: int = 16, n_grid=None,
                      tail_fraction: float = DEFAULT_TAIL_FRACTION) -> BetaDimEstimate:
    """Tail-window min/max of the catalog beta-compression ratio over prefixes."""
    from .ratios import single_catalog

    if beta.size != u.k:
        raise InvalidArgument("measure must be defined on the string's alphabet")
    if not beta.positive:
        raise AbsoluteContinuityViolation("beta must be positive")
    ns = default_n_grid(len(u)) if n_grid is None else sorted({int(n) for n in n_grid})
    if ns[-1] > len(u):
        raise GridExceedsPrefix(f"grid point {ns[-1]} exceeds prefix length {len(u)}")
    values = []
    for n in ns:
        prefix = u[:n]
        bits = min(m.bits for m in single_catalog(prefix, r))
        values.append(bits / self_information(prefix, beta))
    width = max(1, math.ceil(tail_fraction * len(ns)))
    tail = values[-width:]
    return BetaDimEstimate(min(tail), max(tail), ns, values,
                           {"r": r, "tail_fraction": tail_fraction, "tail_width": width})


def product_block_measure(alpha: ProbMeasure, ell: int) -> np.ndarray:
    """``alpha^{(x) l}`` as a dense vector indexed by block code."""
    p = alpha.as_array()
    out = np.ones(1)
    for _ in range(ell):
        out = np.outer(out, p).ravel()
    return out


def normality_test(u: SymbolString, alpha: ProbMeasure, ell_max: int, n: int | None = None) -> dict:
    """Per-l distance between the block frequencies of ``u|n`` and ``alpha^{(x) l}``."""
    n = len(u) if n is None else n
    if n > len(u):
        raise GridExceedsPrefix(f"n={n} exceeds prefix length {len(u)}")
    if alpha.size != u.k:
        raise InvalidArgument("measure must be defined on the string's alphabet")
    if ell_max < 1 or ell_max > n:
        raise InvalidArgument("ell_max must lie in 1..n")
    rows = []
    for ell in range(1, ell_max + 1):
        space = u.k ** ell
        if space > _DENSE_LIMIT:
            raise InvalidArgument(f"block space {space} too large for a dense comparison")
        codes = block_codes(u[: (n // ell) * ell], ell)
        counts = np.bincount(codes, minlength=space)
        pi = counts / counts.sum()
        ref = product_block_measure(alpha, ell)
        seen = counts > 0
        if np.any(ref[seen] == 0):
            raise AbsoluteContinuityViolation("a block occurs that has measure zero")
        kl = float(np.sum(pi[seen] * (np.log2(pi[seen]) - np.log2(ref[seen]))))
        rows.append({"ell": ell, "blocks": int(counts.sum()),
                     "max_deviation": float(np.max(np.abs(pi - ref))),
                     "kl_divergence": max(kl, 0.0)})
    return {"n": n, "k": u.k, "alpha": [float(a) for a in alpha.as_array()], "per_ell": rows}


def self_information_rate(u: SymbolString, beta: ProbMeasure) -> float:
    """``l_beta(u) / n``."""
    if len(u) == 0:
        raise EmptyInput("rate of the empty string is undefined")
    return self_information(u, beta) / len(u)


def divergence_prediction(alpha: ProbMeasure, beta: ProbMeasure) -> float:
    """``H(alpha) + D(alpha || beta)``, the limit of ``l_beta(S|n)/n`` for S with frequency alpha."""
    from .blockstats import shannon_entropy

    return shannon_entropy(alpha) + kl_divergence(alpha, beta)
