from collections import OrderedDict

import pytest
from hypothesis import settings

settings.register_profile("suite", database=None, deadline=None)
settings.load_profile("suite")

_outcomes: "OrderedDict[str, list[bool]]" = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion covered by the test")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    name = marker.args[0]
    _outcomes.setdefault(name, [])
    if call.when == "call" or (call.when == "setup" and call.excinfo is not None):
        _outcomes[name].append(call.excinfo is None)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for name, results in _outcomes.items():
        status = "PASS" if results and all(results) else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")


@pytest.fixture(scope="session")
def builtins():
    from chernlab.catalog import build_builtin

    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = build_builtin(name)
        return cache[name]

    return get
