"""Deterministic finite-state compressors.

A compressor ``C = (Q, delta, nu, q0)`` reads symbols ``0..m-1`` and emits a
(possibly empty) bit string on every transition.  It is information-lossless
(an ILFSC) when ``u -> (C(u), delta*(q0, u))`` is one-to-one.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from numba import njit

from .alphabet import SymbolString
from .errors import (
    BudgetExceeded, InvalidArgument, MachineFormatError, NotProductAlphabet,
    StateOutOfRange, SymbolOutOfRange,
)

CERT_PREFIX_CODE = "prefix-code-by-construction"
CERT_FIXED_WIDTH = "fixed-width-by-construction"
DEFAULT_KRAFT_BUDGET = 1 << 20
DEFAULT_IL_BUDGET = 200_000


@dataclass(frozen=True, eq=False)
class Fsc:
    delta: np.ndarray
    outputs: tuple[tuple[str, ...], ...]
    start: int = 0
    certificate: str | None = None
    provenance: str = ""
    out_len: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        delta = np.array(self.delta, dtype=np.int64)
        if delta.ndim != 2 or delta.shape[0] < 1 or delta.shape[1] < 1:
            raise InvalidArgument("transition table must be a non-empty states x symbols array")
        s, m = delta.shape
        if delta.min() < 0 or delta.max() >= s:
            raise InvalidArgument("transition table points outside the state set")
        outs = tuple(tuple(str(o) for o in row) for row in self.outputs)
        if len(outs) != s or any(len(row) != m for row in outs):
            raise InvalidArgument("output table shape must match the transition table")
        for row in outs:
            for o in row:
                if o.strip("01"):
                    raise InvalidArgument(f"output {o!r} is not a bit string")
        if not 0 <= self.start < s:
            raise StateOutOfRange(f"start state {self.start} not in 0..{s - 1}")
        delta.setflags(write=False)
        lens = np.array([[len(o) for o in row] for row in outs], dtype=np.int64)
        lens.setflags(write=False)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "outputs", outs)
        object.__setattr__(self, "out_len", lens)

    @property
    def n_states(self) -> int:
        return int(self.delta.shape[0])

    @property
    def alphabet_size(self) -> int:
        return int(self.delta.shape[1])

    @property
    def max_output_len(self) -> int:
        return int(self.out_len.max())

    def __eq__(self, other):
        if not isinstance(other, Fsc):
            return NotImplemented
        return (self.start == other.start and np.array_equal(self.delta, other.delta)
                and self.outputs == other.outputs)

    def __hash__(self):
        return hash((self.start, self.delta.tobytes(), self.outputs))

    def with_start(self, q: int) -> "Fsc":
        """The machine ``C_q``: identical to this one but started at ``q``."""
        if not 0 <= q < self.n_states:
            raise StateOutOfRange(f"state {q} not in 0..{self.n_states - 1}")
        return Fsc(self.delta, self.outputs, q, self.certificate, self.provenance)

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        transitions = [
            {"from": q, "symbol": a, "to": int(self.delta[q, a]), "output_bits": self.outputs[q][a]}
            for q in range(self.n_states) for a in range(self.alphabet_size)
        ]
        d = {
            "states": self.n_states,
            "alphabet_size": self.alphabet_size,
            "start": self.start,
            "transitions": transitions,
        }
        if self.certificate:
            d["certificate"] = self.certificate
        if self.provenance:
            d["provenance"] = self.provenance
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "Fsc":
        try:
            s = int(d["states"])
            m = int(d["alphabet_size"])
            start = int(d.get("start", 0))
            delta = np.full((s, m), -1, dtype=np.int64)
            outs = [[None] * m for _ in range(s)]
            for t in d["transitions"]:
                q, a = int(t["from"]), int(t["symbol"])
                if not (0 <= q < s and 0 <= a < m):
                    raise MachineFormatError(f"transition {t} outside the declared ranges")
                if delta[q, a] != -1:
                    raise MachineFormatError(f"duplicate transition for state {q}, symbol {a}")
                delta[q, a] = int(t["to"])
                outs[q][a] = str(t.get("output_bits", ""))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, MachineFormatError):
                raise
            raise MachineFormatError(f"malformed machine description: {exc}") from exc
        if (delta < 0).any():
            raise MachineFormatError("transition table is not total")
        try:
            return cls(delta, tuple(tuple(r) for r in outs), start,
                       d.get("certificate"), d.get("provenance", ""))
        except InvalidArgument as exc:
            raise MachineFormatError(str(exc)) from exc

    @classmethod
    def from_json(cls, text: str) -> "Fsc":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise MachineFormatError(f"not valid JSON: {exc}") from exc


# ---------------------------------------------------------------------------
# constructors


def fixed_width_code(a: int, width: int) -> str:
    return format(a, f"0{width}b") if width else ""


def identity_fsc(m: int) -> Fsc:
    """One state; each symbol is written as a fixed-width binary numeral."""
    if m < 2:
        raise InvalidArgument("identity machine needs at least two symbols")
    width = (m - 1).bit_length()
    return Fsc(np.zeros((1, m), dtype=np.int64),
               (tuple(fixed_width_code(a, width) for a in range(m)),),
               0, CERT_FIXED_WIDTH, "identity")


def epsilon_fsc(m: int, states: int = 1) -> Fsc:
    """A lossy machine that never writes anything (cycles through its states)."""
    delta = np.array([[(q + 1) % states] * m for q in range(states)], dtype=np.int64)
    return Fsc(delta, tuple(("",) * m for _ in range(states)), 0, None, "epsilon")


# ---------------------------------------------------------------------------
# execution


@njit(cache=True)
def _walk(delta, out_len, q, data):
    total = 0
    for i in range(data.shape[0]):
        a = data[i]
        total += out_len[q, a]
        q = delta[q, a]
    return total, q


def _as_symbols(C: Fsc, u) -> np.ndarray:
    data = u.data if isinstance(u, SymbolString) else np.asarray(u)
    data = np.ascontiguousarray(data, dtype=np.int64)
    if data.size and (data.min() < 0 or data.max() >= C.alphabet_size):
        bad = int(np.flatnonzero((data < 0) | (data >= C.alphabet_size))[0])
        raise SymbolOutOfRange(f"symbol {int(data[bad])} at position {bad} "
                               f"outside machine alphabet of size {C.alphabet_size}")
    return data


def _check_state(C: Fsc, q: int) -> None:
    if not 0 <= q < C.n_states:
        raise StateOutOfRange(f"state {q} not in 0..{C.n_states - 1}")


def run_from(C: Fsc, q: int, u) -> str:
    _check_state(C, q)
    data = _as_symbols(C, u)
    parts = []
    outs = C.outputs
    delta = C.delta
    for a in data.tolist():
        parts.append(outs[q][a])
        q = int(delta[q, a])
    return "".join(parts)


def run(C: Fsc, u) -> str:
    """The output ``C(u)`` as a string of '0'/'1' characters."""
    return run_from(C, C.start, u)


def output_length(C: Fsc, u, start: int | None = None) -> int:
    """``|C_q(u)|`` without materializing the output."""
    q = C.start if start is None else start
    _check_state(C, q)
    total, _ = _walk(C.delta, C.out_len, q, _as_symbols(C, u))
    return int(total)


def final_state(C: Fsc, u, start: int | None = None) -> int:
    q = C.start if start is None else start
    _check_state(C, q)
    _, q = _walk(C.delta, C.out_len, q, _as_symbols(C, u))
    return int(q)


def min_output_len(C: Fsc, w) -> int:
    """``L_C(w)``: the shortest output on ``w`` over every choice of start state."""
    data = _as_symbols(C, w)
    return min(int(_walk(C.delta, C.out_len, q, data)[0]) for q in range(C.n_states))


def _all_min_lengths(C: Fsc, r: int) -> np.ndarray:
    """``L_C(w)`` for every ``w`` in ``Sigma^r``, indexed by the base-m code of w."""
    m = C.alphabet_size
    best = None
    for q in range(C.n_states):
        states = np.array([q], dtype=np.int64)
        lens = np.zeros(1, dtype=np.int64)
        for _ in range(r):
            lens = (lens[:, None] + C.out_len[states]).reshape(-1)
            states = C.delta[states].reshape(-1)
        best = lens if best is None else np.minimum(best, lens)
    return best


def min_lengths_for_blocks(C: Fsc, ell: int) -> np.ndarray:
    """``L_C(x)`` for every block ``x`` of length ``ell`` (indexed by block code)."""
    return _all_min_lengths(C, ell)


@dataclass(frozen=True)
class KraftReport:
    r: int
    lhs: Fraction
    rhs: float
    holds: bool
    n_states: int
    alphabet_size: int
    method: str

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "lhs": str(self.lhs),
            "lhs_float": float(self.lhs),
            "rhs": self.rhs,
            "holds": self.holds,
            "states": self.n_states,
            "alphabet_size": self.alphabet_size,
            "method": self.method,
        }


def kraft_rhs(s: int, m: int, r: int) -> float:
    """``s^2 (1 + log((s^2 + m^r) / s^2))``."""
    import math

    s2 = s * s
    return s2 * (1.0 + math.log2(s2 + m ** r) - math.log2(s2))


def _kraft_sum_enumerate(C: Fsc, r: int) -> Fraction:
    lengths = _all_min_lengths(C, r)
    vals, cnt = np.unique(lengths, return_counts=True)
    return sum((Fraction(int(c), 1 << int(v)) for v, c in zip(vals, cnt)), Fraction(0))


def _kraft_sum_dp(C: Fsc, r: int, budget: int) -> Fraction:
    s = C.n_states
    delta = C.delta.tolist()
    lens = C.out_len.tolist()
    configs: dict[tuple, Fraction] = {(tuple(range(s)), (0,) * s): Fraction(1)}
    for _ in range(r):
        nxt: dict[tuple, Fraction] = {}
        for (states, offs), weight in configs.items():
            for a in range(C.alphabet_size):
                new_states = tuple(delta[q][a] for q in states)
                new_lens = [o + lens[q][a] for q, o in zip(states, offs)]
                low = min(new_lens)
                key = (new_states, tuple(x - low for x in new_lens))
                nxt[key] = nxt.get(key, Fraction(0)) + weight / (1 << low)
        if len(nxt) > budget:
            raise BudgetExceeded(f"Kraft audit needs more than {budget} configurations")
        configs = nxt
    return sum(configs.values(), Fraction(0))


def kraft_audit(C: Fsc, r: int, budget: int = DEFAULT_KRAFT_BUDGET,
                method: str = "auto") -> KraftReport:
    """Check ``sum_{w in Sigma^r} 2^-L_C(w) <= s^2 (1 + log((s^2 + m^r)/s^2))``.

    The left side is an exact dyadic rational.  ``method="enumerate"`` walks all
    ``m**r`` words (refused beyond ``budget``); ``method="dp"`` aggregates words
    by the tuple of current states and relative output lengths over all start
    states, which is exact and handles word spaces far beyond the budget.
    ``"auto"`` enumerates when ``m**r <= budget`` and falls back to the DP.
    """
    if r < 1:
        raise InvalidArgument("word length must be >= 1")
    m = C.alphabet_size
    if method == "auto":
        method = "enumerate" if m ** r <= budget else "dp"
    if method == "enumerate":
        if m ** r > budget:
            raise BudgetExceeded(f"{m}^{r} words exceed the enumeration budget {budget}")
        lhs = _kraft_sum_enumerate(C, r)
    elif method == "dp":
        lhs = _kraft_sum_dp(C, r, budget)
    else:
        raise InvalidArgument(f"unknown Kraft audit method {method!r}")
    rhs = kraft_rhs(C.n_states, m, r)
    return KraftReport(r, lhs, rhs, float(lhs) <= rhs, C.n_states, m, method)


# ---------------------------------------------------------------------------
# information-losslessness


@dataclass(frozen=True)
class IlVerdict:
    status: str  # "verified" | "collision" | "inconclusive"
    u: tuple[int, ...] | None = None
    w: tuple[int, ...] | None = None
    output: str | None = None
    state: int | None = None
    explored: int = 0
    reason: str = ""

    def to_dict(self) -> dict:
        d = {"status": self.status, "explored": self.explored, "reason": self.reason}
        if self.status == "collision":
            d["witness"] = {"u": list(self.u), "w": list(self.w),
                            "output": self.output, "state": self.state}
        return d


def _reachable(C: Fsc) -> list[tuple[int, tuple[int, ...]]]:
    """Reachable states with their shortlex-least access words, in BFS order."""
    seen = {C.start: ()}
    order = [(C.start, ())]
    queue = deque([C.start])
    while queue:
        q = queue.popleft()
        for a in range(C.alphabet_size):
            p = int(C.delta[q, a])
            if p not in seen:
                seen[p] = seen[q] + (a,)
                order.append((p, seen[p]))
                queue.append(p)
    return order


def _epsilon_cycle(C: Fsc, q: int) -> tuple[int, ...] | None:
    """Shortlex-least non-empty word leading from q back to q with empty output."""
    parent: dict[int, tuple[int, int] | None] = {}
    queue = deque()
    for a in range(C.alphabet_size):
        if C.out_len[q, a] == 0:
            p = int(C.delta[q, a])
            if p == q:
                return (a,)
            if p not in parent:
                parent[p] = (-1, a)
                queue.append(p)
    while queue:
        x = queue.popleft()
        for a in range(C.alphabet_size):
            if C.out_len[x, a] != 0:
                continue
            p = int(C.delta[x, a])
            if p == q:
                path = [a]
                node = x
                while node != -1:
                    prev, sym = parent[node]
                    path.append(sym)
                    node = prev
                return tuple(reversed(path))
            if p not in parent:
                parent[p] = (x, a)
                queue.append(p)
    return None


def _advance(lead: int, lag: str, side: int, out: str):
    """Update (lead, lag) after ``side`` emits ``out``; None on a mismatch."""
    if lead == 0:
        return (side, out) if out else (0, "")
    if lead == side:
        return lead, lag + out
    if lag.startswith(out):
        rest = lag[len(out):]
        return (lead, rest) if rest else (0, "")
    if out.startswith(lag):
        rest = out[len(lag):]
        return (side, rest) if rest else (0, "")
    return None


def check_il(C: Fsc, budget: int = DEFAULT_IL_BUDGET, use_certificate: bool = True,
             lag_cap: int | None = None) -> IlVerdict:
    """Search for two distinct inputs with equal output and equal end state.

    Two kinds of collision are looked for.  Prefix collisions need an
    empty-output cycle ``v`` on a state reached by ``x``; the reported witness
    is ``(xv, xvv)`` so that both inputs are non-empty.  Diverging collisions
    ``(x a ..., x b ...)`` are found by a breadth-first search over
    configurations ``(p1, p2, leader, lag)`` where ``lag`` is the output one
    run has produced beyond the other; the run that is behind is always the
    one extended.  Lags longer than ``lag_cap`` (default
    ``s^2 * (1 + max output length)``) are pruned, and any pruning makes the
    verdict "inconclusive" rather than "verified".
    """
    if budget < 1:
        raise InvalidArgument("budget must be >= 1")
    if use_certificate and C.certificate in (CERT_PREFIX_CODE, CERT_FIXED_WIDTH):
        return IlVerdict("verified", reason=f"certificate: {C.certificate}")
    s = C.n_states
    if lag_cap is None:
        lag_cap = s * s * (1 + C.max_output_len)
    reach = _reachable(C)

    for q, x in reach:
        v = _epsilon_cycle(C, q)
        if v is not None:
            return _collision(C, x + v, x + v + v, 0)

    explored = 0
    truncated = False
    m = C.alphabet_size
    parent: dict[tuple, tuple] = {}
    queue: deque = deque()
    for q, x in reach:
        for a in range(m):
            for b in range(a + 1, m):
                step = _advance(0, "", 1, C.outputs[q][a])
                if step is None:
                    continue
                step = _advance(step[0], step[1], 2, C.outputs[q][b])
                if step is None:
                    continue
                lead, lag = step
                if len(lag) > lag_cap:
                    truncated = True
                    continue
                key = (int(C.delta[q, a]), int(C.delta[q, b]), lead, lag)
                if key in parent:
                    continue
                parent[key] = ("root", x, a, b)
                queue.append(key)

    while queue:
        key = queue.popleft()
        explored += 1
        p1, p2, lead, lag = key
        if lead == 0 and p1 == p2:
            u, w = _trace(parent, key)
            return _collision(C, u, w, explored)
        if explored > budget:
            return IlVerdict("inconclusive", explored=explored, reason="node budget exhausted")
        sides = (1, 2) if lead == 0 else ((2,) if lead == 1 else (1,))
        for side in sides:
            p = p1 if side == 1 else p2
            for c in range(m):
                step = _advance(lead, lag, side, C.outputs[p][c])
                if step is None:
                    continue
                nlead, nlag = step
                if len(nlag) > lag_cap:
                    truncated = True
                    continue
                np1 = int(C.delta[p1, c]) if side == 1 else p1
                np2 = int(C.delta[p2, c]) if side == 2 else p2
                nkey = (np1, np2, nlead, nlag)
                if nkey not in parent:
                    parent[nkey] = ("step", key, side, c)
                    queue.append(nkey)
    if truncated:
        return IlVerdict("inconclusive", explored=explored, reason="lag cap reached")
    return IlVerdict("verified", explored=explored, reason="configuration space exhausted")


def _trace(parent: dict, key: tuple) -> tuple[tuple[int, ...], tuple[int, ...]]:
    tail1: list[int] = []
    tail2: list[int] = []
    while True:
        rec = parent[key]
        if rec[0] == "root":
            _, x, a, b = rec
            return x + (a,) + tuple(reversed(tail1)), x + (b,) + tuple(reversed(tail2))
        _, prev, side, c = rec
        (tail1 if side == 1 else tail2).append(c)
        key = prev


def _collision(C: Fsc, u: Sequence[int], w: Sequence[int], explored: int) -> IlVerdict:
    out = run(C, list(u))
    return IlVerdict("collision", tuple(u), tuple(w), out, final_state(C, list(u)),
                     explored, "witness found")


def replay_witness(C: Fsc, verdict: IlVerdict) -> bool:
    """True when a collision verdict's witness really is a collision."""
    if verdict.status != "collision":
        return False
    u, w = list(verdict.u), list(verdict.w)
    return (u != w and run(C, u) == run(C, w) == verdict.output
            and final_state(C, u) == final_state(C, w) == verdict.state)


# ---------------------------------------------------------------------------
# relabeling


def relabel_swap(C: Fsc) -> Fsc:
    """Exchange the coordinates of every pair-symbol ``(a, b) -> (b, a)``."""
    m = C.alphabet_size
    k = int(round(m ** 0.5))
    if k * k != m:
        raise NotProductAlphabet(f"machine alphabet size {m} is not a perfect square")
    perm = np.array([(c % k) * k + c // k for c in range(m)], dtype=np.int64)
    delta = C.delta[:, perm]
    outputs = tuple(tuple(row[perm[c]] for c in range(m)) for row in C.outputs)
    prov = C.provenance[5:-1] if C.provenance.startswith("swap(") else f"swap({C.provenance})"
    return Fsc(delta, outputs, C.start, C.certificate, prov)
