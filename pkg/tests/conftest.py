import pytest

from capa_isac.config import SystemConfig
from capa_isac.fading import build_channel_model


@pytest.fixture(scope="session")
def cfg():
    return SystemConfig()


@pytest.fixture(scope="session")
def model(cfg):
    return build_channel_model(cfg)


@pytest.fixture(scope="session")
def dist(model):
    return model.distribution()


@pytest.fixture(scope="session")
def small_cfg():
    """One-wavelength aperture: two effective modes."""
    c = SystemConfig()
    return c.replace(tx_length=c.wavelength)


@pytest.fixture(scope="session")
def small_model(small_cfg):
    return build_channel_model(small_cfg)


_ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(n, passed, detail)."""
    def record(n, passed, detail):
        line = f"criterion {n}: {'PASS' if passed else 'FAIL'}  {detail}"
        _ACCEPTANCE[n] = line
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[n])
