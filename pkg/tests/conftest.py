import numpy as np
import pytest

from hexbands import Params, make_builtin

GRAPHENE = Params(1.0, 0.0, 0.0)
GAP_CASES = [Params(1.0, 0.0, 3.0), Params(1.0, 0.5, 0.0), Params(1.0, 0.5, 1.0)]


@pytest.fixture
def zero():
    return make_builtin("zero")


@pytest.fixture
def cosine():
    return make_builtin("cosine", 2.0)


@pytest.fixture
def sym_table(tmp_path):
    """Even tabulated potential written to disk."""
    x = np.linspace(0, 1, 41)
    q = 3 * (x - 0.5) ** 2 - 0.25
    path = tmp_path / "q.txt"
    np.savetxt(path, np.column_stack([x, q]), header="x q")
    return path


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
