import mpmath as mp
import pytest


def mp_cycle(norm, k, dps=40):
    """Independent high-precision oracle: fixed point and 2-cycle via mpmath root finding."""
    with mp.workdps(dps):
        lam = mp.mpf(norm)
        f = lambda x: (1 + x * lam) ** (-k)
        xi = mp.findroot(lambda x: x * (1 + x * lam) ** k - 1, (mp.mpf(0), mp.mpf(1)), solver="anderson")
        g = lambda x: f(f(x)) - x
        xs = [xi * i / 4096 for i in range(1, 4096)]
        for a, b in zip(xs, xs[1:]):
            if g(a) * g(b) < 0:
                alpha = mp.findroot(g, (a, b), solver="anderson")
                return float(xi), (float(alpha), float(f(alpha)))
        return float(xi), None


@pytest.fixture(scope="session")
def oracle():
    return mp_cycle


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one acceptance line, then assert it."""

    def record(number, title, ok, detail):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} -- {detail}")
        assert ok, f"criterion {number} ({title}) failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
