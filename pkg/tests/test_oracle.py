import numpy as np
import pytest

from conftest import GRAPHENE
from hexbands.dispersion import Quasimomentum
from hexbands.errors import ParameterError, RangeError, SymmetryError
from hexbands.oracle import assemble, bloch_eigs_fd, compare_dispersion, load_dump
from hexbands.potential import from_samples
from hexbands.spectrum import solve_bloch_levels
from hexbands.transfer import Params

PI2 = np.pi**2


def test_system_shape_and_dump(tmp_path, zero):
    sys_ = assemble(zero, Params(1.0, 0.5, 1.0), Quasimomentum(1.0, -1.0), 25)
    assert sys_.A.shape == (sys_.dim, sys_.dim) == (77, 77)
    # mass enters only the two vertex rows of B
    assert sys_.B[-1, -1] == 1.0 and sys_.B[-2, -2] == 1.0
    path = tmp_path / "sys.txt"
    sys_.dump(path)
    A, B, n = load_dump(path)
    assert n == 25
    assert np.array_equal(A, sys_.A) and np.array_equal(B, sys_.B)


def test_graphene_gamma_multiplicities(zero):
    ev = bloch_eigs_fd(zero, GRAPHENE, Quasimomentum(0.0, 0.0), 200, 4)
    assert ev == pytest.approx([0.0, PI2, PI2, PI2], abs=2e-3)


def test_pencil_and_reduced_agree(zero):
    params = Params(1.0, 0.5, 1.0)
    q = Quasimomentum(1.0, -1.0)
    r = bloch_eigs_fd(zero, params, q, 60, 5)
    p = bloch_eigs_fd(zero, params, q, 60, 5, method="pencil")
    assert r == pytest.approx(p, rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("params", [GRAPHENE, Params(1.0, 0.5, 1.0), Params(2.0, 0.2, 3.0)])
def test_fd_matches_analytic(zero, params):
    q = Quasimomentum(0.4, 2.0)
    assert compare_dispersion(zero, params, q, 200, 5) < 1e-3


def test_fd_matches_analytic_cosine(cosine):
    params = Params(1.0, 0.3, 0.5)
    q = Quasimomentum(-1.2, 0.3)
    exact = [s.lam for s in solve_bloch_levels(cosine, params, q, (-5.0, 60.0))][:4]
    fd = bloch_eigs_fd(cosine, params, q, 200, 4)
    assert np.max(np.abs(np.subtract(fd, exact)) / (1 + np.abs(exact))) < 1e-3


def test_second_order_convergence(zero):
    params = Params(1.0, 0.5, 1.0)
    q = Quasimomentum(1.0, -1.0)
    e1 = compare_dispersion(zero, params, q, 100, 4)
    e2 = compare_dispersion(zero, params, q, 200, 4)
    assert e1 / e2 > 3


def test_errors(zero):
    x = np.linspace(0, 1, 11)
    with pytest.raises(SymmetryError):
        assemble(from_samples(x, x), GRAPHENE, Quasimomentum(0, 0), 40)
    with pytest.raises(ParameterError):
        assemble(zero, GRAPHENE, Quasimomentum(0, 0), 10)
    with pytest.raises(ParameterError):
        bloch_eigs_fd(zero, GRAPHENE, Quasimomentum(0, 0), 40, 2, method="lu")
    with pytest.raises(RangeError):
        compare_dispersion(zero, GRAPHENE, Quasimomentum(0, 0), 40, 5, lambda_range=(0.0, 5.0))
    assert compare_dispersion(zero, GRAPHENE, Quasimomentum(0, 0), 40, 0) == 0.0
