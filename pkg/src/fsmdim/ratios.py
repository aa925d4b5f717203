"""Compression ratios, catalog surrogates for the r-state ratios, and slack terms.

The true r-state ratio is a minimum over every r-state ILFSC and cannot be
computed.  ``catalog_rho`` reports the minimum over a fixed family of
certified machines (an upper bound) next to the Kraft-based entropy lower
bound that every r-state ILFSC obeys.  Output lengths are kept as integers
and divided once.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

from .alphabet import ProbMeasure, SymbolString, pair, prefix_truncate
from .blockstats import (
    block_freq_table, joint_block_freq_table, mutual_information, self_information,
    shannon_entropy,
)
from .errors import (
    BudgetTooSmall, EmptyInput, InvalidArgument, LengthMismatch, ZeroSelfInformation,
)
from .fsc import Fsc, identity_fsc, output_length, relabel_swap
from .huffman import build_for_string, tree_state_count

# ---------------------------------------------------------------------------
# slack functions


def log_floor(r: int, k: int) -> int:
    """``floor(log_k r)`` in exact integer arithmetic."""
    if r < 1 or k < 2:
        raise InvalidArgument("log_floor needs r >= 1 and k >= 2")
    e, p = 0, k
    while p <= r:
        e += 1
        p *= k
    return e


def f_slack(s: int, k: int, r: int) -> float:
    """``f_s^k(r) = log(s^2 (1 + log((s^2 + k^r)/s^2))) / (r log k)``."""
    if s < 1 or k < 2 or r < 1:
        raise InvalidArgument("f needs s >= 1, k >= 2, r >= 1")
    s2 = s * s
    inner = 1.0 + (math.log2(s2 + k ** r) - math.log2(s2))
    return (math.log2(s2) + math.log2(inner)) / (r * math.log2(k))


def slack(name: str, a: int, k: int, m: int) -> float:
    """Evaluate one of the named slack terms.

    ``a`` is the state argument (s for f, r for g/j/e, t for h/i/q/p) and
    ``m`` the block-length argument (r for f, t' for g/j/e, r' for h/i/q/p).
    """
    if m < 1:
        raise InvalidArgument("block-length argument must be >= 1")
    if name == "f":
        return f_slack(a, k, m)
    if name in ("g", "j"):
        return f_slack(a, k * k, m) + 1.0 / m
    if name in ("h", "q"):
        return 2.0 * f_slack(a, k, m) + 2.0 / m
    if name == "i":
        return f_slack(a, k, m) + 2.0 / m
    if name == "p":
        return 2.0 / m + f_slack(a, k * k, m)
    if name == "e":
        return 4.0 / m + 2.0 * f_slack(a, k, m) + f_slack(a, k * k, m)
    raise InvalidArgument(f"unknown slack function {name!r}")


@dataclass(frozen=True)
class SlackParams:
    """All slack terms for budgets (r, t) over a k-symbol alphabet."""

    r: int
    t: int
    k: int
    r_prime: int = field(init=False)
    t_prime: int = field(init=False)
    values: dict = field(init=False)

    def __post_init__(self):
        rp, tp = log_floor(self.r, self.k), log_floor(self.t, self.k)
        if rp < 1 or tp < 1:
            raise BudgetTooSmall(f"budgets must be >= k={self.k}")
        object.__setattr__(self, "r_prime", rp)
        object.__setattr__(self, "t_prime", tp)
        r, t, k = self.r, self.t, self.k
        object.__setattr__(self, "values", {
            "g": slack("g", r, k, tp),
            "h": slack("h", t, k, rp),
            "i": slack("i", t, k, rp),
            "j": slack("j", r, k, tp),
            "q": slack("q", t, k, rp),
            "p": slack("p", t, k, rp),
            "e": slack("e", r, k, tp),
        })

    def __getitem__(self, name: str) -> float:
        return self.values[name]

    def to_dict(self) -> dict:
        return {"r": self.r, "t": self.t, "k": self.k, "r_prime": self.r_prime,
                "t_prime": self.t_prime, **self.values}


# ---------------------------------------------------------------------------
# per-machine ratios


def output_bits(C: Fsc, u: SymbolString) -> int:
    return output_length(C, u)


def rho_c(C: Fsc, u: SymbolString) -> float:
    """``|C(u)| / (n log k)`` where k is the alphabet size of ``u``."""
    if len(u) == 0:
        raise EmptyInput("compression ratio of the empty string is undefined")
    return output_length(C, u) / (len(u) * math.log2(u.k))


def rho_c_joint(C: Fsc, u: SymbolString, w: SymbolString) -> float:
    """``|C((u,w))| / (n log k)``, i.e. twice the ratio of the paired string."""
    if len(u) != len(w):
        raise LengthMismatch(f"lengths {len(u)} and {len(w)} differ")
    if len(u) == 0:
        raise EmptyInput("joint compression ratio of empty strings is undefined")
    return output_length(C, pair(u, w)) / (len(u) * math.log2(u.k))


def rho_beta(C: Fsc, u: SymbolString, beta: ProbMeasure) -> float:
    """``|C(u)| / l_beta(u)``."""
    info = self_information(u, beta)
    if info <= 0:
        raise ZeroSelfInformation("self-information of the input is zero")
    return output_length(C, u) / info


# ---------------------------------------------------------------------------
# catalogs


@dataclass(frozen=True)
class CatalogMember:
    machine: Fsc
    states: int
    provenance: str
    bits: int


def single_catalog(u: SymbolString, r: int) -> list[CatalogMember]:
    """Identity plus ``C_F(l, u)`` for every l whose tree fits in ``r`` states."""
    k = u.k
    if r < k:
        raise BudgetTooSmall(f"state budget {r} is below the alphabet size {k}")
    if len(u) == 0:
        raise EmptyInput("cannot build a catalog for the empty string")
    members = []
    ident = identity_fsc(k)
    members.append(CatalogMember(ident, 1, "identity", output_length(ident, u)))
    ell = 1
    while ell <= len(u) and tree_state_count(k, ell) <= r:
        C = build_for_string(u, ell)
        members.append(CatalogMember(C, C.n_states, C.provenance, output_length(C, u)))
        ell += 1
    return members


def joint_catalog(u: SymbolString, w: SymbolString, r: int) -> list[CatalogMember]:
    """Pair identity, pair-block Huffman machines trained on (u,w), and the
    relabelled machines trained on (w,u), so the catalog is swap-closed."""
    if len(u) != len(w):
        raise LengthMismatch(f"lengths {len(u)} and {len(w)} differ")
    k = u.k
    m = k * k
    if r < m:
        raise BudgetTooSmall(f"state budget {r} is below the pair alphabet size {m}")
    if len(u) == 0:
        raise EmptyInput("cannot build a catalog for empty strings")
    p = pair(u, w)
    q = pair(w, u)
    members = []
    ident = identity_fsc(m)
    members.append(CatalogMember(ident, 1, "pair-identity", output_length(ident, p)))
    ell = 1
    while ell <= len(u) and tree_state_count(m, ell) <= r:
        C = build_for_string(p, ell, f"pair-huffman(l={ell})")
        members.append(CatalogMember(C, C.n_states, C.provenance, output_length(C, p)))
        D = relabel_swap(build_for_string(q, ell, f"pair-huffman(l={ell})"))
        members.append(CatalogMember(D, D.n_states, D.provenance, output_length(D, p)))
        ell += 1
    return members


def entropy_lower_bound(u: SymbolString, r: int) -> float:
    """``max_{l <= r'} H(pi_{u_l}^(l))/(l log k) - 1/floor(n/l) - f_r^k(l)``."""
    k, n = u.k, len(u)
    rp = min(log_floor(r, k), n)
    best = -math.inf
    for ell in range(1, rp + 1):
        h = shannon_entropy(block_freq_table(prefix_truncate(u, ell), ell))
        best = max(best, h / (ell * math.log2(k)) - 1.0 / (n // ell) - f_slack(r, k, ell))
    return best


def joint_entropy_lower_bound(u: SymbolString, w: SymbolString, r: int) -> float:
    k, n = u.k, len(u)
    rp = min(log_floor(r, k), n)
    best = -math.inf
    for ell in range(1, rp + 1):
        j = joint_block_freq_table(prefix_truncate(u, ell), prefix_truncate(w, ell), ell)
        h = shannon_entropy(j)
        best = max(best, h / (ell * math.log2(k)) - 1.0 / (n // ell) - f_slack(r, k * k, ell))
    return best


@dataclass
class RatioReport:
    kind: str
    r: int
    n: int
    k: int
    members: list[dict]
    upper: float
    best: str
    lower: float
    slack: dict

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _report(kind: str, r: int, n: int, k: int, members: list[CatalogMember], lower: float,
            slack_terms: dict) -> RatioReport:
    denom = n * math.log2(k)
    rows = [{"member": m.provenance, "states": m.states, "bits": m.bits, "ratio": m.bits / denom}
            for m in members]
    best = min(members, key=lambda m: (m.bits, m.states))
    return RatioReport(kind, r, n, k, rows, best.bits / denom, best.provenance, lower, slack_terms)


def catalog_rho(u: SymbolString, r: int, members: list[CatalogMember] | None = None) -> RatioReport:
    """``rho~_r(u)``: the catalog minimum, with the entropy lower bound."""
    if members is None:
        members = single_catalog(u, r)
    else:
        members = [m for m in members if m.states <= r]
    rp = log_floor(r, u.k)
    terms = {"r_prime": rp, "f_r_k(r')": f_slack(r, u.k, rp) if rp else None}
    return _report("single", r, len(u), u.k, members, entropy_lower_bound(u, r), terms)


def catalog_rho_joint(u: SymbolString, w: SymbolString, r: int,
                      members: list[CatalogMember] | None = None) -> RatioReport:
    """``rho~_r(u, w)`` normalized by ``n log k`` (range [0, 2])."""
    if members is None:
        members = joint_catalog(u, w, r)
    else:
        members = [m for m in members if m.states <= r]
    rp = log_floor(r, u.k)
    terms = {"r_prime": rp, "f_r_k2(r')": f_slack(r, u.k * u.k, rp) if rp else None}
    return _report("joint", r, len(u), u.k, members, joint_entropy_lower_bound(u, w, r), terms)


def catalog_bits(members: list[CatalogMember], r: int) -> int:
    return min(m.bits for m in members if m.states <= r)


# ---------------------------------------------------------------------------
# mutual compression ratio


@dataclass
class MutualRatioReport:
    r: int
    t: int
    n: int
    k: int
    value: float
    rho_t_u: float
    rho_t_w: float
    rho_r_uw: float
    swapped_value: float
    reverse_value: float
    slack: dict
    items: dict

    def to_dict(self) -> dict:
        return asdict(self)


class RatioCache:
    """Catalogs for one pair (u, w), built once at the largest budget needed."""

    def __init__(self, u: SymbolString, w: SymbolString, max_budget: int):
        if len(u) != len(w):
            raise LengthMismatch(f"lengths {len(u)} and {len(w)} differ")
        self.u, self.w = u, w
        self.n, self.k = len(u), u.k
        self.denom = self.n * math.log2(self.k)
        self.single_u = single_catalog(u, max_budget)
        self.single_w = self.single_u if w is u else single_catalog(w, max_budget)
        self.joint_uw = joint_catalog(u, w, max_budget)
        self.joint_wu = joint_catalog(w, u, max_budget)

    def rho(self, which: str, budget: int) -> float:
        members = {"u": self.single_u, "w": self.single_w}[which]
        return catalog_bits(members, budget) / self.denom

    def rho_joint(self, budget: int, swapped: bool = False) -> float:
        return catalog_bits(self.joint_wu if swapped else self.joint_uw, budget) / self.denom

    def mutual(self, r: int, t: int, swapped: bool = False) -> float:
        a, b = ("w", "u") if swapped else ("u", "w")
        return self.rho(a, t) + self.rho(b, t) - self.rho_joint(r, swapped)


def mcr_items(cache: RatioCache, r: int, t: int) -> dict:
    """Each mutual-ratio statement as {lhs, rhs, holds, margin}."""
    sp = SlackParams(r, t, cache.k)
    n, rp, tp = cache.n, sp.r_prime, sp.t_prime
    val = cache.mutual(r, t)
    rt_u, rt_w = cache.rho("u", t), cache.rho("w", t)
    items = {}

    def item(name, lhs, rhs, exact=False):
        margin = rhs - lhs
        items[name] = {"lhs": lhs, "rhs": rhs, "margin": margin,
                       "holds": (lhs == rhs) if exact else margin >= -1e-9}

    item("1", val, min(rt_u, rt_w) + 1.0 / (n // tp) + sp["g"])
    item("2", 0.0, val + 2.0 / (n // rp) + sp["h"])
    if cache.u == cache.w:
        item("3", rt_u, val + 1.0 / (n // rp) + sp["i"])
        item("4", val, rt_u + 1.0 / (n // tp) + sp["j"])
    item("5", val, cache.mutual(r, t, swapped=True), exact=True)
    item("6", val, cache.mutual(t, r) + 3.0 / (n // tp) + sp["e"])
    return items


def mutual_ratio(u: SymbolString, w: SymbolString, r: int, t: int,
                 cache: RatioCache | None = None) -> MutualRatioReport:
    """``rho~_{r,t}(u:w) = rho~_t(u) + rho~_t(w) - rho~_r(u,w)`` with slack annotations."""
    if len(u) != len(w):
        raise LengthMismatch(f"lengths {len(u)} and {len(w)} differ")
    if cache is None:
        cache = RatioCache(u, w, max(r, t))
    sp = SlackParams(r, t, u.k)
    if len(u) < max(sp.r_prime, sp.t_prime):
        raise InvalidArgument("strings shorter than the block lengths r', t'")
    return MutualRatioReport(
        r, t, len(u), u.k,
        cache.mutual(r, t), cache.rho("u", t), cache.rho("w", t), cache.rho_joint(r),
        cache.mutual(r, t, swapped=True), cache.mutual(t, r),
        sp.to_dict(), mcr_items(cache, r, t),
    )


def block_mutual_rate(u: SymbolString, w: SymbolString, ell: int) -> float:
    """``I(pi_{u_l}; pi_{w_l}) / (l log k)`` on the truncated prefixes."""
    j = joint_block_freq_table(prefix_truncate(u, ell), prefix_truncate(w, ell), ell)
    return mutual_information(j) / (ell * math.log2(u.k))


def mi_cross_check(u: SymbolString, w: SymbolString, r: int, t: int,
                   cache: RatioCache | None = None) -> dict:
    """Both mutual-information versus mutual-ratio bounds at block length r'."""
    if cache is None:
        cache = RatioCache(u, w, max(r, t))
    sp = SlackParams(r, t, u.k)
    n, rp = len(u), sp.r_prime
    mi = block_mutual_rate(u, w, rp)
    rho_rt = cache.mutual(r, t)
    rho_tr = cache.mutual(t, r)
    up = {"lhs": mi - rho_rt, "rhs": 2.0 / (n // rp) + sp["q"]}
    down = {"lhs": rho_tr - mi, "rhs": 1.0 / (n // rp) + sp["p"]}
    for d in (up, down):
        d["margin"] = d["rhs"] - d["lhs"]
        d["holds"] = d["margin"] >= -1e-9
    return {"r": r, "t": t, "r_prime": rp, "I_rate": mi, "rho_rt": rho_rt, "rho_tr": rho_tr,
            "mitomc": up, "mctomi": down}
