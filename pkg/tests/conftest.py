import random
import sys

import pytest
from hypothesis import HealthCheck, settings

from iwalog.group_structures import build_group
from iwalog.padic_core import ArithmeticContext
from iwalog.twisted_algebra import TwistedRing, TwistedRingElement, is_unit

settings.register_profile(
    "iwalog", deadline=None, max_examples=25, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("iwalog")


def random_element(rng, R):
    sp = R.sp
    return TwistedRingElement(R, [[rng.randrange(sp.mod) for _ in range(sp.size)] for _ in range(R.n)])


def random_unit(rng, R):
    while True:
        x = random_element(rng, R)
        if is_unit(x):
            return x


def setup(name, p, f=1, **kw):
    ctx = ArithmeticContext(p=p, f=f, **kw)
    G = build_group(name, p, ctx.e, f)
    return G, ctx, TwistedRing.get(G, ctx)


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
