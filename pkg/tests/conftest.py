import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from doublepeak.core import CostParams, normalize

PARAM_CHOICES = [Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3)]


def rationals(lo=-20, hi=20, max_den=12):
    return st.builds(
        lambda num, den: Fraction(num, den),
        st.integers(lo * max_den, hi * max_den),
        st.integers(1, max_den),
    ).filter(lambda q: lo <= q <= hi)


positive = st.builds(Fraction, st.integers(1, 40), st.integers(1, 8))
symmetric_params = st.builds(CostParams.symmetric, positive, positive)
any_params = st.builds(CostParams, positive, positive, positive)


@st.composite
def instances(draw, params=symmetric_params, max_n=6):
    p = draw(params)
    locs = draw(st.lists(rationals(-10, 10), min_size=1, max_size=max_n))
    return normalize(locs, p)


def random_symmetric_instance(rng: random.Random, max_n: int, span: int = 10, max_den: int = 12):
    n = rng.randint(1, max_n)
    params = CostParams.symmetric(rng.choice(PARAM_CHOICES), rng.choice(PARAM_CHOICES))
    locs = []
    for _ in range(n):
        den = rng.randint(1, max_den)
        locs.append(Fraction(rng.randint(-span * den, span * den), den))
    return normalize(locs, params)


def fixed_battery(size: int = 100, max_n: int = 4, seed: int = 20240601):
    """The fixed random battery used by the strategyproofness and axiom checks."""
    rng = random.Random(seed)
    return [random_symmetric_instance(rng, max_n, span=5, max_den=4) for _ in range(size)]


# -- acceptance summary -------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    def record(number, ok, detail=""):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
