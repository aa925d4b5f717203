import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from fsmdim.alphabet import Alphabet, SymbolString
from fsmdim.fsc import Fsc

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


def S(text: str, k: int = 2) -> SymbolString:
    return SymbolString.from_digits(text, k)


@st.composite
def strings(draw, k=None, min_len=0, max_len=64, multiple_of=1):
    k = draw(st.sampled_from([2, 3])) if k is None else k
    n = draw(st.integers(min_len, max_len)) // multiple_of * multiple_of
    data = draw(st.lists(st.integers(0, k - 1), min_size=n, max_size=n))
    return SymbolString(Alphabet(k), np.array(data, dtype=np.int64))


@st.composite
def string_pairs(draw, k=None, min_len=1, max_len=64, multiple_of=1):
    u = draw(strings(k=k, min_len=min_len, max_len=max_len, multiple_of=multiple_of))
    data = draw(st.lists(st.integers(0, u.k - 1), min_size=len(u), max_size=len(u)))
    return u, SymbolString(u.alphabet, np.array(data, dtype=np.int64))


@st.composite
def machines(draw, m=2, max_states=4, max_out=3):
    s = draw(st.integers(1, max_states))
    delta = [[draw(st.integers(0, s - 1)) for _ in range(m)] for _ in range(s)]
    outs = [[draw(st.text("01", max_size=max_out)) for _ in range(m)] for _ in range(s)]
    return Fsc(np.array(delta), tuple(tuple(r) for r in outs))


# Fixture machine with two states toggled by every symbol; only state 1 emits.
TOGGLE = Fsc(np.array([[1, 1], [0, 0]]), (("", ""), ("1", "1")), 0, None, "toggle")


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
