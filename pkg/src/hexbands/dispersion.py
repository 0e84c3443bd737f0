"""Brillouin-zone factor |S|, the scalars D0/D1/D2 and the discriminant Delta.

The Bloch variety is Delta(lam)^2 = |S(theta)|^2 / 9 with

    D1 = c(1) + ak c'(1),   D2 = s(1) + ak s'(1),   D0 = D2 + ak D1,
    Delta = D1 - (m/3)(lam/a) D0,

where ak = a * kappa^-1. Delta is entire in lam, so nothing here divides by D0
except ``psi_boundary``/``bloch_matrix``, which exist to cross-check the
ratio form of the dispersion relation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularityError
from .potential import Potential, require_symmetric
from .transfer import DEFAULT_STEPS, MonodromyMatrix, Params, PsiBoundary, monodromy

DIRAC_MOMENTA = ((2 * np.pi / 3, -2 * np.pi / 3), (-2 * np.pi / 3, 2 * np.pi / 3))
_THETA_SLACK = 1e-12


@dataclass(frozen=True)
class Quasimomentum:
    theta1: float
    theta2: float

    def __post_init__(self):
        for t in (self.theta1, self.theta2):
            if not (np.isfinite(t) and abs(t) <= np.pi + _THETA_SLACK):
                raise DomainError(f"quasimomentum component {t!r} outside [-pi, pi]")

    def conjugate(self) -> "Quasimomentum":
        return Quasimomentum(-self.theta1, -self.theta2)


def s_squared(theta1, theta2):
    """|S|^2 = 1 + 8 cos((t1 - t2)/2) cos(t1/2) cos(t2/2)."""
    t1 = np.asarray(theta1, dtype=float)
    t2 = np.asarray(theta2, dtype=float)
    return 1.0 + 8.0 * np.cos(0.5 * (t1 - t2)) * np.cos(0.5 * t1) * np.cos(0.5 * t2)


def s_abs(theta1, theta2):
    """Vectorized |1 + exp(-i t1) + exp(-i t2)| via the real product identity."""
    out = np.sqrt(np.clip(s_squared(theta1, theta2), 0.0, 9.0))
    return float(out) if out.ndim == 0 else out


def s_complex(theta1, theta2):
    """S(t1, t2) = 1 + exp(-i t1) + exp(-i t2) by direct complex summation."""
    return 1.0 + np.exp(-1j * np.asarray(theta1)) + np.exp(-1j * np.asarray(theta2))


def s_magnitude(q: Quasimomentum) -> float:
    return s_abs(q.theta1, q.theta2)


@dataclass(frozen=True)
class DValues:
    d0: object
    d1: object
    d2: object
    lam: object


def d_values(M: MonodromyMatrix, params: Params) -> DValues:
    ak = params.ak
    d1 = M.c1 + ak * M.cp1
    d2 = M.s1 + ak * M.sp1
    d0 = d2 + ak * d1
    return DValues(d0, d1, d2, M.lam)


@dataclass(frozen=True)
class DeltaEval:
    lam: object
    t1: object
    t2: object
    delta: object


def delta_from_d(d: DValues, params: Params) -> DeltaEval:
    t1 = d.d1
    t2 = (np.asarray(d.lam) / params.a) * d.d0
    if np.ndim(t2) == 0:
        t2 = float(t2)
    return DeltaEval(d.lam, t1, t2, t1 - (params.mass / 3.0) * t2)


def delta_eval(p: Potential, params: Params, lam, steps: int = DEFAULT_STEPS) -> DeltaEval:
    require_symmetric(p)
    return delta_from_d(d_values(monodromy(p, lam, params.a, steps), params), params)


def bloch_matrix(pb: PsiBoundary, params: Params, q: Quasimomentum, lam: float):
    """The 2x2 coefficient matrix acting on (omega0, omega1) and its determinant."""
    if not pb.valid:
        raise SingularityError(f"lam = {lam!r} is (numerically) in Sigma_0; psi_2 is undefined")
    S = complex(s_complex(q.theta1, q.theta2))
    diag = 3.0 * pb.psi2p1 - lam * params.mass / params.a
    mat = np.array(
        [[diag, -S * pb.psi2p0], [-np.conj(S) * pb.psi2p0, diag]],
        dtype=complex,
    )
    det = mat[0, 0] * mat[1, 1] - mat[0, 1] * mat[1, 0]
    return mat, det


def dispersion_residual(p: Potential, params: Params, lam, q: Quasimomentum, steps: int = DEFAULT_STEPS):
    """Delta(lam)^2 - |S(q)|^2 / 9; zero on the Bloch variety."""
    d = delta_eval(p, params, lam, steps).delta
    return d * d - s_magnitude(q) ** 2 / 9.0
