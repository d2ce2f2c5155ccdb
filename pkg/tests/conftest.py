import pytest

from awi.species import load_catalog

_CRITERIA = pytest.StashKey[dict]()


@pytest.fixture(scope="session")
def catalog():
    return load_catalog()


@pytest.fixture(scope="session")
def bath_template(catalog):
    """He buffer at 550 K; pressure is set per call."""
    return catalog.bath("He", 1.0, 550.0)


@pytest.fixture
def record_criterion(request):
    """Record one acceptance line: record_criterion(number, title, passed, detail)."""
    store = request.config.stash.setdefault(_CRITERIA, {})

    def record(number, title, passed, detail=""):
        store[number] = (title, bool(passed), detail)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(_CRITERIA, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(store):
        title, passed, detail = store[number]
        tag = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{tag}] criterion {number}: {title} | {detail}")
    n_pass = sum(v[1] for v in store.values())
    terminalreporter.write_line(f"{n_pass}/{len(store)} acceptance criteria pass")
