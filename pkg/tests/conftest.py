import pytest

from optomech_router.model import derive_constants, paper_preset

# criterion number -> (description, passed); filled by test_acceptance.py
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def preset1():
    raw, drive = paper_preset(1)
    return derive_constants(raw), drive


@pytest.fixture(scope="session")
def preset2():
    raw, drive = paper_preset(2)
    return derive_constants(raw), drive


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(k.split(".")[0]), k)):
        desc, ok = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {desc}")
