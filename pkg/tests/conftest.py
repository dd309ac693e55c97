import mpmath
import pytest
from hypothesis import HealthCheck, settings

from heegner.cli import ingest_curves

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def curves():
    return ingest_curves()


@pytest.fixture(scope="session")
def e37(curves):
    return curves["37a1"]


@pytest.fixture(autouse=True)
def _reset_mp():
    # modules must not depend on the ambient mpmath precision
    mpmath.mp.prec = 53
    yield
    mpmath.mp.prec = 53


@pytest.fixture
def verdict(request):
    """Record a one-line PASS/FAIL verdict for the terminal summary."""
    log = request.config.__dict__.setdefault("_acceptance", [])

    def record(n, ok, detail):
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        log.append(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "_acceptance", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
