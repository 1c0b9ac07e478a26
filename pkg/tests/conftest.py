import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

# criterion number -> (passed, detail), filled by tests/test_acceptance.py
ACCEPTANCE = {}
CRITERIA = range(1, 10)
_STATE = {"collected": False}


@pytest.fixture
def record():
    def _record(number, passed, detail):
        ACCEPTANCE[number] = (bool(passed), detail)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'} ({detail})")
        return passed

    return _record


def pytest_collection_modifyitems(items):
    _STATE["collected"] = any("test_acceptance" in item.nodeid for item in items)


def pytest_terminal_summary(terminalreporter):
    if not _STATE["collected"]:
        return
    terminalreporter.section("acceptance criteria")
    for number in CRITERIA:
        passed, detail = ACCEPTANCE.get(number, (False, "not run or errored"))
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'} ({detail})")
