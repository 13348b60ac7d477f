import pytest
from hypothesis import HealthCheck, settings

from gen2phy import params as lp
from gen2phy.reader_modem import ModulationConfig

settings.register_profile(
    "default", max_examples=50, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def dl_params():
    return lp.downlink_default()


@pytest.fixture
def scaled_cfg():
    return ModulationConfig.scaled()


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line for an acceptance criterion."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(number, ok, detail):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append((number, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if not lines:
        return
    seen = {n for n, _ in lines}
    lines = lines + [(n, f"criterion {n:2d}: FAIL  did not run to completion")
                     for n in range(1, 11) if n not in seen]
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(lines):
        terminalreporter.write_line(line)
