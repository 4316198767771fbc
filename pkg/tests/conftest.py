import pytest

from iwgraphs.corpus import load_corpus
from iwgraphs.verifier import rotationless_power, verify_representative
from iwgraphs.whitehead import enumerate_catalog

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def catalog5():
    return enumerate_catalog(5)


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()


@pytest.fixture(scope="session")
def corpus_reports(corpus):
    """label -> (entry, rotationless power map, report) at default bounds."""
    out = {}
    for e in corpus:
        _, h = rotationless_power(e.map)
        out[e.label] = (e, h, verify_representative(e.map))
    return out
