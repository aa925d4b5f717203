"""Named, seeded inequality checks and brute-force oracles.

Each check draws its own random stream from ``(seed, crc32(name))`` so a check
gives the same report whether it runs alone or inside ``all``.  Checks
labelled ``asymptotic-surrogate`` test limit statements through tail-window
statistics of finite prefixes; ``exact`` checks test finite-n statements.
"""
from __future__ import annotations

import json
import math
import zlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .alphabet import (
    Alphabet, ProbMeasure, SymbolString, gen_champernowne, gen_iid, pair, prefix_truncate,
)
from .blockstats import (
    block_freq_table, joint_block_freq_table, marginals, mutual_information, shannon_entropy,
    kl_divergence, self_information,
)
from .dimension import _summarize, coverage_ell, default_n_grid, pair_rate_curves
from .errors import InstanceTooLarge, InvalidArgument, UnknownCheck
from .fsc import (
    Fsc, check_il, epsilon_fsc, final_state, identity_fsc, kraft_audit,
    min_lengths_for_blocks, output_length, relabel_swap, replay_witness, run,
)
from .huffman import (
    HuffmanCodebook, build_codebook, build_for_string, huffman_ilfsc,
)
from .ratios import (
    RatioCache, SlackParams, f_slack, joint_catalog, log_floor, mi_cross_check, single_catalog,
)

SCHEMA_VERSION = 1
TOL = 1e-9


# ---------------------------------------------------------------------------
# result bookkeeping


@dataclass
class CheckResult:
    check: str
    label: str
    trials: int
    assertions: int = 0
    failures: int = 0
    worst_margin: float | None = None
    witness: dict | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        d = {"check": self.check, "label": self.label, "trials": self.trials,
             "assertions": self.assertions, "failures": self.failures,
             "worst_margin": self.worst_margin, "passed": self.passed}
        if self.witness is not None:
            d["witness"] = self.witness
        return d


class Recorder:
    """Collects inequality outcomes; keeps the first failing witness."""

    def __init__(self, result: CheckResult):
        self.result = result

    def leq(self, lhs: float, rhs: float, witness: Callable[[], dict] | dict | None = None,
            tol: float = TOL) -> bool:
        return self._record(float(rhs) - float(lhs), float(rhs) - float(lhs) >= -tol, lhs, rhs, witness)

    def equal(self, lhs, rhs, witness=None) -> bool:
        ok = lhs == rhs
        margin = 0.0 if ok else -abs(float(lhs) - float(rhs)) if _numeric(lhs, rhs) else -1.0
        return self._record(margin, ok, lhs, rhs, witness)

    def near(self, value: float, target: float, tol: float, witness=None) -> bool:
        margin = tol - abs(value - target)
        return self._record(margin, margin >= 0, value, target, witness)

    def truth(self, ok: bool, witness=None) -> bool:
        return self._record(0.0 if ok else -1.0, ok, ok, True, witness)

    def _record(self, margin, ok, lhs, rhs, witness) -> bool:
        r = self.result
        r.assertions += 1
        if r.worst_margin is None or margin < r.worst_margin:
            r.worst_margin = margin
        if not ok:
            r.failures += 1
            if r.witness is None:
                w = witness() if callable(witness) else (witness or {})
                r.witness = dict(w, lhs=_jsonable(lhs), rhs=_jsonable(rhs), margin=margin)
        return ok


def _numeric(*xs) -> bool:
    return all(isinstance(x, (int, float, Fraction, np.floating, np.integer)) for x in xs)


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, (int, float, str, bool)) or x is None:
        return x
    return repr(x)


def _describe(u: SymbolString) -> str:
    text = u.to_text() if u.k <= 10 else ",".join(map(str, u.tolist()))
    return text if len(text) <= 80 else text[:80] + f"...(n={len(u)})"


# ---------------------------------------------------------------------------
# input generators


def sample_string(rng: np.random.Generator, k: int, n: int) -> SymbolString:
    """A string drawn from a mix of uniform, skewed, periodic, sticky and normal sources."""
    kind = int(rng.integers(5))
    if kind == 0:
        data = rng.integers(0, k, size=n)
    elif kind == 1:
        p = rng.dirichlet(np.ones(k) * 0.7)
        data = np.minimum(np.searchsorted(np.cumsum(p), rng.random(n), side="right"), k - 1)
    elif kind == 2:
        pat = rng.integers(0, k, size=int(rng.integers(1, 5)))
        data = np.resize(pat, n)
    elif kind == 3:
        fresh = rng.integers(0, k, size=n)
        jump = rng.random(n) < 0.2
        jump[0] = True
        idx = np.maximum.accumulate(np.where(jump, np.arange(n), 0))
        data = fresh[idx]
    else:
        off = int(rng.integers(0, 512))
        data = gen_champernowne(k, off + n).data[off:]
    return SymbolString(Alphabet(k), np.asarray(data, dtype=np.int64))


def sample_pair(rng: np.random.Generator, k: int, n: int) -> tuple[SymbolString, SymbolString]:
    u = sample_string(rng, k, n)
    kind = int(rng.integers(5))
    if kind == 0:
        w = sample_string(rng, k, n)
    elif kind == 1:
        w = u
    elif kind == 2:
        w = SymbolString(u.alphabet, (u.data.astype(np.int64) + 1) % k)
    elif kind == 3:
        noise = rng.integers(0, k, size=n)
        keep = rng.random(n) < 0.7
        w = SymbolString(u.alphabet, np.where(keep, u.data, noise))
    else:
        w = SymbolString(u.alphabet, np.roll(u.data, 1))
    return u, w


def random_measure(rng: np.random.Generator, k: int, floor: float = 0.1) -> ProbMeasure:
    """A positive measure with every weight at least ``floor``."""
    p = rng.dirichlet(np.ones(k))
    p = floor + (1 - k * floor) * p
    p = p / p.sum()
    return ProbMeasure(tuple(float(x) for x in p))


def catalog_fixture_machines(k: int, seed: int = 0, n: int = 720) -> list[tuple[str, Fsc, int]]:
    """Identity, Huffman l=1..3, pair identity and pair Huffman l=1..2 over k symbols.

    Trained on skewed i.i.d. strings so the codebooks have varied lengths.
    Returns (name, machine, block length) triples.
    """
    rng = np.random.default_rng([seed, k])
    skew = ProbMeasure(tuple(float(x) for x in np.linspace(1, 3, k) / np.linspace(1, 3, k).sum()))
    u = gen_iid(skew, n, int(rng.integers(2**32)))
    w = gen_iid(skew, n, int(rng.integers(2**32)))
    out = [("identity", identity_fsc(k), 1)]
    for ell in (1, 2, 3):
        out.append((f"huffman(l={ell})", build_for_string(u, ell), ell))
    out.append(("pair-identity", identity_fsc(k * k), 1))
    p = pair(u, w)
    for ell in (1, 2):
        out.append((f"pair-huffman(l={ell})", build_for_string(p, ell), ell))
    return out


# ---------------------------------------------------------------------------
# brute-force oracles


def _oracle_entropy(weights) -> float:
    w = [Fraction(x) for x in weights]
    total = sum(w)
    if total <= 0 or any(x < 0 for x in w):
        raise InvalidArgument("weights must be non-negative with positive total")
    return math.fsum(-float(x / total) * math.log2(float(x / total)) for x in w if x > 0)


def _oracle_mutual(matrix) -> float:
    rows = [[Fraction(x) for x in row] for row in matrix]
    total = sum(sum(r) for r in rows)
    p = [[x / total for x in r] for r in rows]
    p1 = [sum(r) for r in p]
    p2 = [sum(r[j] for r in p) for j in range(len(p[0]))]
    terms = []
    for i, r in enumerate(p):
        for j, x in enumerate(r):
            if x > 0:
                ratio = x / (p1[i] * p2[j])
                terms.append(float(x) * (math.log2(ratio.numerator) - math.log2(ratio.denominator)))
    return math.fsum(terms)


def _oracle_huffman(weights) -> dict:
    w = sorted((Fraction(x) for x in weights), reverse=True)
    m = len(w)
    if m == 0:
        raise InvalidArgument("no weights")
    if m > 16:
        raise InstanceTooLarge("code enumeration is limited to 16 symbols")
    total = sum(w)
    w = [x / total for x in w]
    if m == 1:
        return {"expected_length": Fraction(1), "lengths": [1]}
    max_len = m - 1
    best = [None, None]

    # nondecreasing lengths (heaviest symbol shortest) with Kraft sum <= 1
    def dfs(i, prev, kraft, cost, lengths):
        if best[0] is not None and cost >= best[0]:
            return
        if i == m:
            best[0], best[1] = cost, list(lengths)
            return
        for ln in range(prev, max_len + 1):
            nk = kraft + Fraction(1, 1 << ln)
            # the remaining symbols need at least 2^-max_len each
            if nk + Fraction(m - i - 1, 1 << max_len) > 1:
                continue
            lengths.append(ln)
            dfs(i + 1, ln, nk, cost + w[i] * ln, lengths)
            lengths.pop()

    dfs(0, 1, Fraction(0), Fraction(0), [])
    return {"expected_length": best[0], "lengths": best[1]}


def _oracle_il_collision(C: Fsc, max_len: int, limit: int = 5_000_000):
    """First collision among non-empty inputs of length <= max_len, visiting
    inputs in lexicographic (depth-first) order; None if there is none."""
    if max_len > 12:
        raise InstanceTooLarge("collision enumeration is limited to inputs of length 12")
    m = C.alphabet_size
    total = sum(m ** i for i in range(1, max_len + 1))
    if total > limit:
        raise InstanceTooLarge(f"{total} inputs exceed the enumeration limit {limit}")
    seen: dict[tuple[str, int], tuple[int, ...]] = {}
    delta = C.delta.tolist()
    outs = C.outputs
    stack = [((), "", C.start)]
    while stack:
        word, out, q = stack.pop()
        if word:
            key = (out, q)
            if key in seen:
                return seen[key], word
            seen[key] = word
        if len(word) < max_len:
            for a in reversed(range(m)):
                stack.append((word + (a,), out + outs[q][a], delta[q][a]))
    return None


def brute_force_oracle(kind: str, instance):
    """Independent reference computations for small instances.

    kinds: ``entropy`` (weights), ``mutual`` (joint weight matrix),
    ``huffman-optimal`` (weights, at most 16), ``il-collision`` ((Fsc, max_len)).
    """
    if kind == "entropy":
        return _oracle_entropy(instance)
    if kind == "mutual":
        return _oracle_mutual(instance)
    if kind == "huffman-optimal":
        return _oracle_huffman(instance)
    if kind == "il-collision":
        machine, max_len = instance
        return _oracle_il_collision(machine, max_len)
    raise InvalidArgument(f"unknown oracle kind {kind!r}")


# ---------------------------------------------------------------------------
# checks

CHECKS: dict[str, tuple[Callable, str]] = {}


def _check(name: str, label: str = "exact"):
    def deco(fn):
        CHECKS[name] = (fn, label)
        return fn
    return deco


def _identity_instance(rng):
    k = int(rng.choice([2, 3]))
    ell = int(rng.choice([1, 2, 4]))
    n = ell * int(rng.integers(1, 257))
    u, w = sample_pair(rng, k, n)
    return k, ell, u, w


def _identity_witness(u, w, ell):
    return lambda: {"u": _describe(u), "w": _describe(w), "ell": ell}


@_check("shac.1")
def _shac1(rec, rng, trials):
    for _ in range(trials):
        k, ell, u, w = _identity_instance(rng)
        hj = shannon_entropy(joint_block_freq_table(u, w, ell))
        rec.leq(hj, shannon_entropy(block_freq_table(u, ell)) + shannon_entropy(block_freq_table(w, ell)),
                _identity_witness(u, w, ell), tol=1e-12)


@_check("shac.2")
def _shac2(rec, rng, trials):
    for _ in range(trials):
        k, ell, u, w = _identity_instance(rng)
        hj = shannon_entropy(joint_block_freq_table(u, w, ell))
        hu = shannon_entropy(block_freq_table(u, ell))
        hw = shannon_entropy(block_freq_table(w, ell))
        rec.leq(max(hu, hw), hj, _identity_witness(u, w, ell), tol=1e-12)


@_check("shac.3")
def _shac3(rec, rng, trials):
    for _ in range(trials):
        k, ell, u, _ = _identity_instance(rng)
        rec.equal(shannon_entropy(joint_block_freq_table(u, u, ell)),
                  shannon_entropy(block_freq_table(u, ell)), _identity_witness(u, u, ell))


@_check("shac.4")
def _shac4(rec, rng, trials):
    for _ in range(trials):
        k, ell, u, w = _identity_instance(rng)
        rec.equal(shannon_entropy(joint_block_freq_table(u, w, ell)),
                  shannon_entropy(joint_block_freq_table(w, u, ell)), _identity_witness(u, w, ell))


@_check("pmi.1")
def _pmi1(rec, rng, trials):
    for _ in range(trials):
        k, ell, u, w = _identity_instance(rng)
        rec.leq(0.0, mutual_information(joint_block_freq_table(u, w, ell)),
                _identity_witness(u, w, ell), tol=1e-12)


@_check("pmi.2")
def _pmi2(rec, rng, trials):
    for _ in range(trials):
        k, ell, u, w = _identity_instance(rng)
        mi = mutual_information(joint_block_freq_table(u, w, ell))
        bound = min(shannon_entropy(block_freq_table(u, ell)), shannon_entropy(block_freq_table(w, ell)))
        rec.leq(mi, bound, _identity_witness(u, w, ell), tol=1e-12)


@_check("pmi.3")
def _pmi3(rec, rng, trials):
    for _ in range(trials):
        k, ell, u, _ = _identity_instance(rng)
        rec.equal(mutual_information(joint_block_freq_table(u, u, ell)),
                  shannon_entropy(block_freq_table(u, ell)), _identity_witness(u, u, ell))


@_check("pmi.4")
def _pmi4(rec, rng, trials):
    for _ in range(trials):
        k, ell, u, w = _identity_instance(rng)
        rec.equal(mutual_information(joint_block_freq_table(u, w, ell)),
                  mutual_information(joint_block_freq_table(w, u, ell)), _identity_witness(u, w, ell))


@_check("pmi.diagonal")
def _pmi_diag(rec, rng, trials):
    for _ in range(trials):
        k, ell, u, _ = _identity_instance(rng)
        j = joint_block_freq_table(u, u, ell)
        h = shannon_entropy(block_freq_table(u, ell))
        rec.equal(shannon_entropy(j), h, _identity_witness(u, u, ell))
        rec.equal(mutual_information(j), h, _identity_witness(u, u, ell))


@_check("marginals")
def _marginals(rec, rng, trials):
    for _ in range(trials):
        k, ell, u, w = _identity_instance(rng)
        first, second = marginals(joint_block_freq_table(u, w, ell))
        rec.equal(first.counts, block_freq_table(u, ell).counts, _identity_witness(u, w, ell))
        rec.equal(second.counts, block_freq_table(w, ell).counts, _identity_witness(u, w, ell))


@_check("kraft")
def _kraft(rec, rng, trials):
    for trial in range(trials):
        k = int(rng.choice([2, 3]))
        machines = catalog_fixture_machines(k, int(rng.integers(2**31)), n=120)
        name, C, _ = machines[int(rng.integers(len(machines)))]
        r = int(rng.integers(1, 11))
        rep = kraft_audit(C, r)
        rec.leq(float(rep.lhs), rep.rhs,
                lambda: {"machine": name, "k": k, "r": r, "lhs_exact": str(rep.lhs)})


def _member_pool(rng, k, n, budget, pair_mode=False):
    """Catalog machines trained on the instance plus machines trained elsewhere."""
    if pair_mode:
        u, w = sample_pair(rng, k, n)
        a, b = sample_pair(rng, k, n)
        pool = joint_catalog(u, w, budget) + joint_catalog(a, b, budget)
        return (u, w), pool
    u = sample_string(rng, k, n)
    pool = single_catalog(u, budget) + single_catalog(sample_string(rng, k, n), budget)
    return u, pool


@_check("low")
def _low(rec, rng, trials):
    for _ in range(trials):
        k = int(rng.choice([2, 3]))
        ell = int(rng.choice([1, 2]))
        n = ell * int(rng.integers(1, 200))
        u, pool = _member_pool(rng, k, n, 16 if k == 2 else 13)
        table = block_freq_table(u, ell)
        for m in pool:
            L = min_lengths_for_blocks(m.machine, ell)
            bound = sum(c * int(L[x]) for x, c in table.counts.items())
            rec.leq(bound, output_length(m.machine, u),
                    lambda: {"u": _describe(u), "ell": ell, "machine": m.provenance})


@_check("low2")
def _low2(rec, rng, trials):
    for _ in range(trials):
        k = int(rng.choice([2, 3]))
        ell = int(rng.choice([1, 2]))
        n = ell * int(rng.integers(1, 120))
        (u, w), pool = _member_pool(rng, k, n, 16 if k == 2 else 81, pair_mode=True)
        p = pair(u, w)
        table = block_freq_table(p, ell)
        for m in pool:
            L = min_lengths_for_blocks(m.machine, ell)
            bound = sum(c * int(L[x]) for x, c in table.counts.items())
            rec.leq(bound, output_length(m.machine, p),
                    lambda: {"u": _describe(u), "w": _describe(w), "ell": ell, "machine": m.provenance})


@_check("hc")
def _hc(rec, rng, trials):
    for _ in range(trials):
        k = int(rng.choice([2, 3]))
        n = int(rng.integers(8, 2000))
        u, pool = _member_pool(rng, k, n, 16 if k == 2 else 13)
        lk = math.log2(k)
        for ell in range(1, 5):
            h = shannon_entropy(block_freq_table(prefix_truncate(u, ell), ell)) / (ell * lk)
            for m in pool:
                rho = output_length(m.machine, u) / (n * lk)
                rec.leq(h - rho, 1.0 / (n // ell) + f_slack(m.states, k, ell),
                        lambda: {"u": _describe(u), "ell": ell, "machine": m.provenance})


@_check("hc2")
def _hc2(rec, rng, trials):
    for _ in range(trials):
        k = int(rng.choice([2, 3]))
        n = int(rng.integers(8, 1500))
        (u, w), pool = _member_pool(rng, k, n, 16 if k == 2 else 81, pair_mode=True)
        p = pair(u, w)
        lk = math.log2(k)
        for ell in range(1, 4):
            j = joint_block_freq_table(prefix_truncate(u, ell), prefix_truncate(w, ell), ell)
            h = shannon_entropy(j) / (ell * lk)
            for m in pool:
                rho = output_length(m.machine, p) / (n * lk)
                rec.leq(h - rho, 1.0 / (n // ell) + f_slack(m.states, k * k, ell),
                        lambda: {"u": _describe(u), "w": _describe(w), "ell": ell,
                                 "machine": m.provenance})


def obs1_assert(rec: Recorder, C: Fsc, full: SymbolString, cut: SymbolString, n: int, r: int,
                k: int, witness) -> None:
    """Truncation bound on one machine.

    The printed bound ``rho(u_r) <= rho(u) + 1/floor(n/r)`` is derived under
    ``|C(u_r)| <= n log k``; it is asserted there.  The scaled bound
    ``rho(u_r) <= rho(u) (1 + 1/floor(n/r))`` holds for every machine and is
    asserted always.
    """
    lk = math.log2(k)
    bits_cut, bits_full = output_length(C, cut), output_length(C, full)
    lhs = bits_cut / (len(cut) * lk)
    rho = bits_full / (n * lk)
    if bits_cut <= n * lk:
        rec.leq(lhs, rho + 1.0 / (n // r), witness)
    rec.leq(lhs, rho * (1.0 + 1.0 / (n // r)), witness)


@_check("obs1")
def _obs1(rec, rng, trials):
    for _ in range(trials):
        k = int(rng.choice([2, 3]))
        n = int(rng.integers(2, 1500))
        r = int(rng.integers(1, n + 1))
        u, pool = _member_pool(rng, k, n, 16 if k == 2 else 13)
        ur = prefix_truncate(u, r)
        for m in pool:
            obs1_assert(rec, m.machine, u, ur, n, r, k,
                        lambda: {"u": _describe(u), "r": r, "machine": m.provenance})
        (a, b), jpool = _member_pool(rng, k, n, 16 if k == 2 else 81, pair_mode=True)
        p, pr = pair(a, b), pair(prefix_truncate(a, r), prefix_truncate(b, r))
        for m in jpool:
            obs1_assert(rec, m.machine, p, pr, n, r, k,
                        lambda: {"u": _describe(a), "w": _describe(b), "r": r, "machine": m.provenance})


def random_machine(rng: np.random.Generator, states: int, m: int, max_out: int = 3) -> Fsc:
    """A random total machine (not necessarily lossless)."""
    delta = rng.integers(0, states, size=(states, m))
    outs = tuple(
        tuple("".join(rng.choice(["0", "1"], size=int(rng.integers(0, max_out + 1)))) for _ in range(m))
        for _ in range(states)
    )
    return Fsc(delta, outs, 0, None, "random")


@_check("obs2")
def _obs2(rec, rng, trials):
    for _ in range(trials):
        k = int(rng.choice([2, 3]))
        n = int(rng.integers(0, 60))
        C = random_machine(rng, int(rng.integers(1, 6)), k * k)
        D = relabel_swap(C)
        u, w = sample_pair(rng, k, max(n, 1))
        ok = (run(C, pair(u, w)) == run(D, pair(w, u))
              and final_state(C, pair(u, w)) == final_state(D, pair(w, u))
              and D.n_states == C.n_states and relabel_swap(D) == C)
        rec.truth(ok, lambda: {"u": _describe(u), "w": _describe(w), "machine": C.to_dict()})


@_check("huff")
def _huff(rec, rng, trials):
    for _ in range(trials):
        k = int(rng.choice([2, 3]))
        ell = int(rng.choice([1, 2, 3]))
        n = ell * int(rng.integers(1, 700))
        u = sample_string(rng, k, n)
        C = build_for_string(u, ell)
        h = shannon_entropy(block_freq_table(u, ell))
        lk = math.log2(k)
        rec.leq(output_length(C, u) / (n * lk), h / (ell * lk) + 1.0 / ell,
                lambda: {"u": _describe(u), "ell": ell})


@_check("huffc")
def _huffc(rec, rng, trials):
    for _ in range(trials):
        k = int(rng.choice([2, 3]))
        r = int(rng.integers(k, 41))
        rp = log_floor(r, k)
        n = int(rng.integers(rp, 2000))
        u = sample_string(rng, k, n)
        lk = math.log2(k)
        best = min(m.bits for m in single_catalog(u, r)) / (n * lk)
        h = shannon_entropy(block_freq_table(prefix_truncate(u, rp), rp))
        rec.leq(best, h / (rp * lk) + 1.0 / rp, lambda: {"u": _describe(u), "r": r})


def _budgets(rng, k):
    r = int(rng.choice([k * k, k ** 3, k ** 4] if k == 2 else [k * k, k ** 3]))
    t = int(rng.choice([k, k * k, k ** 3, k ** 4] if k == 2 else [k, k * k, k ** 3]))
    return r, t


def _pair_cache(rng, k=None, n=None):
    k = k or int(rng.choice([2, 3]))
    n = n or int(rng.integers(64, 2049))
    u, w = sample_pair(rng, k, n)
    return k, n, u, w


@_check("maxin")
def _maxin(rec, rng, trials):
    for _ in range(trials):
        k, n, u, w = _pair_cache(rng)
        r, t = _budgets(rng, k)
        cache = RatioCache(u, w, max(r, t))
        sp = SlackParams(r, t, k)
        lhs = max(cache.rho("u", t), cache.rho("w", t))
        rec.leq(lhs, cache.rho_joint(r) + 1.0 / (n // sp.t_prime) + sp["g"],
                lambda: {"u": _describe(u), "w": _describe(w), "r": r, "t": t})


@_check("1to2")
def _one_to_two(rec, rng, trials):
    for _ in range(trials):
        k, n, u, w = _pair_cache(rng)
        r, t = _budgets(rng, k)
        cache = RatioCache(u, w, max(r, t))
        sp = SlackParams(r, t, k)
        rec.leq(cache.rho_joint(r), cache.rho("u", t) + cache.rho("w", t) + 2.0 / (n // sp.r_prime) + sp["h"],
                lambda: {"u": _describe(u), "w": _describe(w), "r": r, "t": t})


@_check("eq")
def _eq(rec, rng, trials):
    for _ in range(trials):
        k = int(rng.choice([2, 3]))
        n = int(rng.integers(64, 2049))
        u = sample_string(rng, k, n)
        r, t = _budgets(rng, k)
        cache = RatioCache(u, u, max(r, t))
        sp = SlackParams(r, t, k)
        wit = lambda: {"u": _describe(u), "r": r, "t": t}
        rec.leq(cache.rho_joint(r), cache.rho("u", t) + 1.0 / (n // sp.r_prime) + sp["i"], wit)
        rec.leq(cache.rho("u", t), cache.rho_joint(r) + 1.0 / (n // sp.t_prime) + sp["j"], wit)


@_check("inter")
def _inter(rec, rng, trials):
    for _ in range(trials):
        k, n, u, w = _pair_cache(rng)
        r = int(rng.choice([k * k, k ** 3]))
        cache = RatioCache(u, w, r)
        rec.equal(cache.rho_joint(r), cache.rho_joint(r, swapped=True),
                  lambda: {"u": _describe(u), "w": _describe(w), "r": r})


MCR_BUDGETS = [(4, 4), (16, 4), (4, 16), (16, 16)]
MCR_NS = [1 << 10, 1 << 12, 1 << 14]


def mcr_trial(rec: Recorder, u: SymbolString, w: SymbolString, items=("1", "2", "3", "4", "5", "6"),
              budgets=MCR_BUDGETS) -> None:
    """Assert the selected mutual-ratio statements on (u, w) and, for 3-4, on (u, u)."""
    from .ratios import mcr_items

    big = max(max(b) for b in budgets)
    cache = RatioCache(u, w, big)
    diag = RatioCache(u, u, big) if any(i in items for i in ("3", "4")) else None
    for r, t in budgets:
        wit = lambda: {"u": _describe(u), "w": _describe(w), "r": r, "t": t}
        res = mcr_items(cache, r, t)
        if diag is not None:
            dres = mcr_items(diag, r, t)
            res = dict(res, **{i: dres[i] for i in ("3", "4")})
        for i in items:
            it = res[i]
            if i == "5":
                rec.equal(it["lhs"], it["rhs"], wit)
            else:
                rec.leq(it["lhs"], it["rhs"], wit)


def _mcr_check(items):
    def fn(rec, rng, trials):
        for _ in range(trials):
            n = int(rng.choice(MCR_NS[:2]))
            u, w = sample_pair(rng, 2, n)
            mcr_trial(rec, u, w, items)
    return fn


for _i in "123456":
    _check(f"mcr.{_i}")(_mcr_check((_i,)))
_check("mcr.all")(_mcr_check(tuple("123456")))


def _mi_check(which):
    def fn(rec, rng, trials):
        for _ in range(trials):
            n = int(rng.choice([1 << 10, 1 << 12]))
            u, w = sample_pair(rng, 2, n)
            cache = RatioCache(u, w, 16)
            for r, t in [(4, 4), (16, 16), (16, 4), (4, 16)]:
                d = mi_cross_check(u, w, r, t, cache)[which]
                rec.leq(d["lhs"], d["rhs"], lambda: {"u": _describe(u), "w": _describe(w), "r": r, "t": t})
    return fn


_check("mitomc")(_mi_check("mitomc"))
_check("mctomi")(_mi_check("mctomi"))


@_check("interchange", "asymptotic-surrogate")
def _interchange(rec, rng, trials):
    from .ratios import mcr_items

    for _ in range(trials):
        n = int(rng.choice([1 << 10, 1 << 12]))
        u, w = sample_pair(rng, 2, n)
        cache = RatioCache(u, w, 16)
        for r, t in MCR_BUDGETS:
            it = mcr_items(cache, r, t)["6"]
            rec.leq(it["lhs"], it["rhs"], lambda: {"u": _describe(u), "w": _describe(w), "r": r, "t": t})


def _sequence_pair(rng, n):
    """Pairs of long sequences: independent, identical, relabelled, noisy, shifted."""
    k = int(rng.choice([2, 3]))
    kind = int(rng.integers(4))
    if kind == 0:
        u = gen_iid(random_measure(rng, k), n, int(rng.integers(2**63)))
    elif kind == 1:
        u = gen_champernowne(k, n)
    else:
        u = sample_string(rng, k, n)
    rel = int(rng.integers(4))
    if rel == 0:
        w = gen_iid(random_measure(rng, k), n, int(rng.integers(2**63)))
    elif rel == 1:
        w = u
    elif rel == 2:
        w = SymbolString(u.alphabet, np.roll(u.data, int(rng.integers(1, 4))))
    else:
        keep = rng.random(n) < 0.6
        w = SymbolString(u.alphabet, np.where(keep, u.data, rng.integers(0, k, size=n)))
    return u, w


def _tail_stats(curves, width):
    lo = {key: g.values[:, -width:].min(axis=1) for key, g in curves.items()}
    hi = {key: g.values[:, -width:].max(axis=1) for key, g in curves.items()}
    return lo, hi


def _bmur_items(rec, lo, hi, idx, wit, swapped_mutual=None):
    Hu, Hw, Hj, I = (lo[x][idx] for x in ("u", "w", "joint", "mutual"))
    Hu_, Hw_, Hj_, I_ = (hi[x][idx] for x in ("u", "w", "joint", "mutual"))
    rec.leq(0.0, I, wit)
    rec.leq(0.0, I_, wit)
    rec.leq(Hu + Hw - Hj_, I, wit)
    rec.leq(I, Hu_ + Hw_ - Hj_, wit)
    rec.leq(Hu + Hw - Hj, I_, wit)
    rec.leq(I_, Hu_ + Hw_ - Hj, wit)
    rec.leq(I, min(Hu, Hw), wit)
    rec.leq(I_, min(Hu_, Hw_), wit)
    rec.leq(I, I_, wit)
    if swapped_mutual is not None:
        rec.equal(I, swapped_mutual[0][idx], wit)
        rec.equal(I_, swapped_mutual[1][idx], wit)


@_check("bmur", "asymptotic-surrogate")
def _bmur(rec, rng, trials):
    for _ in range(trials):
        n = 1 << 14
        u, w = _sequence_pair(rng, n)
        ns = default_n_grid(n)
        width = max(1, math.ceil(0.25 * len(ns)))
        curves = pair_rate_curves(u, w, [1, 2, 3], ns)
        swapped = pair_rate_curves(w, u, [1, 2, 3], ns)["mutual"].values[:, -width:]
        diag = pair_rate_curves(u, u, [1, 2, 3], ns)
        lo, hi = _tail_stats(curves, width)
        dlo, dhi = _tail_stats(diag, width)
        for idx in range(3):
            wit = lambda: {"u": _describe(u), "w": _describe(w), "ell": idx + 1}
            _bmur_items(rec, lo, hi, idx, wit, (swapped.min(axis=1), swapped.max(axis=1)))
            rec.equal(dlo["mutual"][idx], dlo["u"][idx], wit)
            rec.equal(dhi["mutual"][idx], dhi["u"][idx], wit)


@_check("mirp", "asymptotic-surrogate")
def _mirp(rec, rng, trials):
    for _ in range(trials):
        n = 1 << 14
        u, w = _sequence_pair(rng, n)
        ns = default_n_grid(n)
        width = max(1, math.ceil(0.25 * len(ns)))
        star = coverage_ell(n, u.k, 6) or 1
        ells = list(range(1, star + 1))
        curves = pair_rate_curves(u, w, ells, ns)
        lo, hi = _tail_stats(curves, width)
        sw = pair_rate_curves(w, u, ells, ns)["mutual"].values[:, -width:]
        wit = lambda: {"u": _describe(u), "w": _describe(w), "ell_star": star}
        _bmur_items(rec, lo, hi, star - 1, wit, (sw.min(axis=1), sw.max(axis=1)))
        rec.leq(hi["mutual"][star - 1], 1.0, wit)
        d = pair_rate_curves(u, u, ells, ns)
        est_dim = _summarize(d["u"], 0.25, star, 25, {})
        est_mdim = _summarize(d["mutual"], 0.25, star, 25, {})
        rec.equal((est_mdim.lower, est_mdim.upper), (est_dim.lower, est_dim.upper), wit)


CHECKS["md"] = (CHECKS["mirp"][0], "asymptotic-surrogate")


@_check("product-lemma", "asymptotic-surrogate")
def _product(rec, rng, trials):
    for _ in range(trials):
        k = int(rng.choice([2, 3]))
        n = 1 << 16
        a1, a2 = random_measure(rng, k), random_measure(rng, k)
        s = gen_iid(a1, n, int(rng.integers(2**63)))
        t = gen_iid(a2, n, int(rng.integers(2**63)))
        val = self_information(pair(s, t), a1.product(a2)) / n
        rec.near(val, shannon_entropy(a1) + shannon_entropy(a2), 0.05,
                 lambda: {"alpha1": a1.weights, "alpha2": a2.weights, "n": n})


@_check("fdl", "asymptotic-surrogate")
def _fdl(rec, rng, trials):
    for _ in range(trials):
        k = int(rng.choice([2, 3]))
        n = 1 << 16
        alpha, beta = random_measure(rng, k), random_measure(rng, k)
        s = gen_iid(alpha, n, int(rng.integers(2**63)))
        val = self_information(s, beta) / n
        rec.near(val, shannon_entropy(alpha) + kl_divergence(alpha, beta), 0.05,
                 lambda: {"alpha": alpha.weights, "beta": beta.weights, "n": n})


@_check("norm", "asymptotic-surrogate")
def _norm(rec, rng, trials):
    for _ in range(trials):
        k = int(rng.choice([2, 3]))
        n = 1 << 16
        alpha = random_measure(rng, k)
        s = gen_iid(alpha, n, int(rng.integers(2**63)))
        rate = shannon_entropy(block_freq_table(s, 1)) / math.log2(k)
        rec.near(rate, shannon_entropy(alpha) / math.log2(k), 0.01,
                 lambda: {"alpha": alpha.weights, "n": n})


@_check("il")
def _il(rec, rng, trials):
    for trial in range(trials):
        k = int(rng.choice([2, 3]))
        machines = catalog_fixture_machines(k, int(rng.integers(2**31)), n=120)
        name, C, ell = machines[int(rng.integers(len(machines)))]
        verdict = check_il(C, use_certificate=False)
        rec.truth(verdict.status == "verified", lambda: {"machine": name, "k": k, "verdict": verdict.to_dict()})
        if C.alphabet_size ** (3 * ell) <= 20_000:
            rec.truth(brute_force_oracle("il-collision", (C, 3 * ell)) is None,
                      lambda: {"machine": name, "k": k, "oracle": "collision found"})
        # a random machine: the checker must agree with exhaustive search
        R = random_machine(rng, int(rng.integers(1, 4)), k, max_out=2)
        v = check_il(R)
        if v.status == "collision":
            rec.truth(replay_witness(R, v), lambda: {"machine": R.to_dict(), "verdict": v.to_dict()})
        elif v.status == "verified":
            rec.truth(brute_force_oracle("il-collision", (R, 6 if k == 2 else 5)) is None,
                      lambda: {"machine": R.to_dict(), "verdict": v.to_dict()})
    eps = epsilon_fsc(2)
    v = check_il(eps)
    rec.truth(v.status == "collision" and replay_witness(eps, v), {"machine": "epsilon"})
    bad = huffman_ilfsc(HuffmanCodebook(1, 2, {0: "0", 1: "00"}, {}), 2)
    v = check_il(bad)
    rec.truth(v.status == "collision" and replay_witness(bad, v), {"machine": "non-prefix-free"})


# ---------------------------------------------------------------------------
# suite


GROUPS = {
    "all": None,
    "mcr": [f"mcr.{i}" for i in "123456"],
    "shac": [f"shac.{i}" for i in "1234"],
    "pmi": [f"pmi.{i}" for i in "1234"] + ["pmi.diagonal"],
}


def expand_selection(selection) -> list[str]:
    if isinstance(selection, str):
        selection = [selection]
    out: list[str] = []
    for name in selection:
        if name == "all":
            names = [n for n in CHECKS if n not in ("md", "mcr.all")]
        elif name in GROUPS:
            names = GROUPS[name]
        elif name in CHECKS:
            names = [name]
        else:
            raise UnknownCheck(f"unknown check {name!r}; known: {', '.join(sorted(CHECKS))}")
        for n in names:
            if n not in out:
                out.append(n)
    return out


def run_check(name: str, trials: int = 20, seed: int = 0) -> CheckResult:
    if name not in CHECKS:
        raise UnknownCheck(f"unknown check {name!r}")
    if trials < 1:
        raise InvalidArgument("trials must be >= 1")
    fn, label = CHECKS[name]
    result = CheckResult(name, label, trials)
    rng = np.random.default_rng([seed, zlib.crc32(name.encode())])
    fn(Recorder(result), rng, trials)
    return result


def run_suite(selection=("all",), trials: int = 20, seed: int = 0) -> dict:
    names = expand_selection(selection)
    results = [run_check(n, trials, seed) for n in names]
    return {
        "schema_version": SCHEMA_VERSION,
        "seed": seed,
        "trials": trials,
        "selection": list(selection) if not isinstance(selection, str) else [selection],
        "passed": all(r.passed for r in results),
        "failures": sum(r.failures for r in results),
        "checks": [r.to_dict() for r in results],
    }


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, default=_jsonable)


def compare_golden(report: dict, golden: dict) -> list[str]:
    """Differences between a fresh report and a stored one (empty when identical)."""
    diffs = []
    a = json.loads(report_json(report))
    for key in ("schema_version", "seed", "trials", "passed", "failures"):
        if a.get(key) != golden.get(key):
            diffs.append(f"{key}: {golden.get(key)!r} -> {a.get(key)!r}")
    mine = {c["check"]: c for c in a["checks"]}
    theirs = {c["check"]: c for c in golden.get("checks", [])}
    for name in sorted(set(mine) | set(theirs)):
        if mine.get(name) != theirs.get(name):
            diffs.append(f"check {name} differs")
    return diffs
