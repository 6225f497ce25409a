import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20160708)


def random_series(rng, order, bound=0.2, size=None, real=False):
    shape = (order,) if size is None else (order, size)
    mag = rng.uniform(0, bound, shape)
    if real:
        return mag * rng.choice([-1.0, 1.0], shape)
    return mag * np.exp(2j * np.pi * rng.uniform(size=shape))


ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split()[0][1:])):
        ok, detail = ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
