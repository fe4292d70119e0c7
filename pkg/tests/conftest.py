import pytest

from ammab import InstanceConfig


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the captured ACCEPTANCE pass/fail lines as a closing report."""
    lines = []
    for status in ("passed", "failed"):
        for rep in terminalreporter.stats.get(status, []):
            if getattr(rep, "when", None) != "call":
                continue
            for ln in rep.capstdout.splitlines():
                if ln.startswith("ACCEPTANCE "):
                    lines.append(ln)
    if lines:
        terminalreporter.write_sep("=", "acceptance report")
        for ln in lines:
            terminalreporter.write_line(ln)


@pytest.fixture(scope="session")
def left_instance():
    # dense regime: all arms keep players at the optimum
    return InstanceConfig(K=2, M=30, p=0.01, T=10000, mu=(0.8, 0.5))


@pytest.fixture(scope="session")
def right_instance():
    # sparse regime: the optimum abandons the bad arm
    return InstanceConfig(K=2, M=3, p=0.1, T=10000, mu=(0.99, 0.01))
