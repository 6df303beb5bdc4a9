import pytest
from hypothesis import HealthCheck, settings

from qbundle.rewrite import load_presentation

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def s3():
    return load_presentation("s3")


@pytest.fixture(scope="session")
def sphere():
    return load_presentation("sphere")


@pytest.fixture(scope="session")
def disc():
    return load_presentation("disc")


# acceptance gate: one line per criterion in the terminal summary
GATE: dict[int, tuple[str, str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not GATE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(GATE):
        status, title, detail = GATE[n]
        terminalreporter.write_line(f"criterion {n}: {status:8} {title} ({detail})")
