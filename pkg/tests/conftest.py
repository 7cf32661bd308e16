import pytest

from sternsig.rng import SeededRng
from sternsig.stern import Stern, SternParams


@pytest.fixture
def rng(request):
    # one deterministic stream per test, keyed by its node id
    return SeededRng(request.node.nodeid.encode())


@pytest.fixture
def toy():
    """(n, k, w) = (8, 4, 2) with the default hash commitment."""
    return Stern(SternParams(8, 4, 2), commit_len=16)


@pytest.fixture
def toy_keys(toy, rng):
    pk, sk = toy.keygen(rng)
    return toy, pk, sk


ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def criterion(request):
    """Record one pass/fail line for an acceptance criterion."""
    def record(number, summary):
        ACCEPTANCE[number] = summary
    yield record
    num = request.node.get_closest_marker("criterion").args[0]
    rep = getattr(request.node, "rep_call", None)
    status = "PASS" if rep is not None and rep.passed else "FAIL"
    line = f"[{status}] criterion {num}: {ACCEPTANCE.get(num, request.node.name)}"
    ACCEPTANCE[num] = line
    print("\n" + line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for num in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[num])
