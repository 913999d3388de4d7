import random
import sys

import pytest
from hypothesis import HealthCheck, settings
from gmpy2 import mpq

from tnnstable import MultiaffinePoly, RationalMatrix

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def P(n, items):
    """Shorthand: P(4, {(1, 2): 1, (3, 4): 1})."""
    return MultiaffinePoly.from_sets(n, items)


def M(rows):
    return RationalMatrix([[mpq(x) if not isinstance(x, str) else x for x in r] for r in rows])


def rand_matrix(rng: random.Random, rows, cols, lo=-4, hi=4, den=3):
    return RationalMatrix([[mpq(rng.randint(lo, hi), rng.randint(1, den)) for _ in range(cols)]
                           for _ in range(rows)])


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for num in sorted(lines):
            terminalreporter.write_line(lines[num])
