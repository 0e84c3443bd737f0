"""Fundamental solutions and the period (monodromy) map on one edge.

c and s solve -a u'' + q u = lam u on [0, 1] with (c, c')(0) = (1, 0) and
(s, s')(0) = (0, 1). The monodromy entries are their values and slopes at
x = 1. Every function here accepts scalar or array ``lam``; array input gives
array-valued entries of the same shape.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .potential import Potential, evaluate, require_symmetric

DEFAULT_STEPS = 512
MIN_STEPS = 16
SERIES_MU = 1e-4
# |D0| below this (times max(1, |D1|)) marks lam as numerically in Sigma_0
SINGULAR_D0 = 1e-9

# 3-stage Gauss-Legendre collocation (order 6)
_R15 = np.sqrt(15.0)
_GL_C = np.array([0.5 - _R15 / 10, 0.5, 0.5 + _R15 / 10])
_GL_A = np.array(
    [
        [5 / 36, 2 / 9 - _R15 / 15, 5 / 36 - _R15 / 30],
        [5 / 36 + _R15 / 24, 2 / 9, 5 / 36 - _R15 / 24],
        [5 / 36 + _R15 / 30, 2 / 9 + _R15 / 15, 5 / 36],
    ]
)
_GL_B = np.array([5 / 18, 4 / 9, 5 / 18])


@dataclass(frozen=True)
class Params:
    """Vertex model: stiffness ``a``, semi-rigidity ``kappa_inv``, vertex ``mass``."""

    a: float = 1.0
    kappa_inv: float = 0.0
    mass: float = 0.0

    def __post_init__(self):
        for name in ("a", "kappa_inv", "mass"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise ParameterError(f"{name} must be finite")
        if not self.a > 0:
            raise ParameterError("a must be positive")
        if self.kappa_inv < 0:
            raise ParameterError("kappa_inv must be non-negative")
        if self.mass < 0:
            raise ParameterError("mass must be non-negative")

    @property
    def ak(self) -> float:
        """a * kappa^-1, the combination that appears in every vertex formula."""
        return self.a * self.kappa_inv

    @property
    def is_graphene(self) -> bool:
        return self.kappa_inv == 0 and self.mass == 0


@dataclass(frozen=True)
class MonodromyMatrix:
    c1: object
    s1: object
    cp1: object
    sp1: object
    lam: object

    @property
    def det(self):
        return self.c1 * self.sp1 - self.s1 * self.cp1

    @property
    def half_trace(self):
        return 0.5 * (self.c1 + self.sp1)

    def as_array(self) -> np.ndarray:
        """Entries as ``[[c1, s1], [cp1, sp1]]`` (scalar lam only)."""
        return np.array([[self.c1, self.s1], [self.cp1, self.sp1]], dtype=float)


def _unwrap(x, scalar):
    return float(x) if scalar else x


def cos_sqrt(z):
    """cos(sqrt(z)) continued to z < 0 as cosh(sqrt(-z))."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = np.abs(z) < SERIES_MU**2
    pos = (z > 0) & ~small
    neg = (z < 0) & ~small
    out[pos] = np.cos(np.sqrt(z[pos]))
    out[neg] = np.cosh(np.sqrt(-z[neg]))
    zs = z[small]
    out[small] = 1 - zs / 2 + zs**2 / 24 - zs**3 / 720 + zs**4 / 40320
    return out


def sinc_sqrt(z):
    """sin(mu)/mu with mu = sqrt(z); sinh(nu)/nu for z = -nu^2 < 0."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = np.abs(z) < SERIES_MU**2
    pos = (z > 0) & ~small
    neg = (z < 0) & ~small
    mu = np.sqrt(z[pos])
    out[pos] = np.sin(mu) / mu
    nu = np.sqrt(-z[neg])
    out[neg] = np.sinh(nu) / nu
    zs = z[small]
    out[small] = 1 - zs / 6 + zs**2 / 120 - zs**3 / 5040 + zs**4 / 362880
    return out


def monodromy_free(lam, a: float) -> MonodromyMatrix:
    """Closed-form monodromy for q = 0: (cos mu, sin mu/mu, -mu sin mu, cos mu)."""
    if not a > 0:
        raise ParameterError("a must be positive")
    scalar = np.ndim(lam) == 0
    lam_arr = np.asarray(lam, dtype=float)
    z = lam_arr / a
    c = cos_sqrt(z)
    sn = sinc_sqrt(z)
    # -mu sin(mu) = -z * sinc; continues to +nu sinh(nu) for z < 0
    cp = -z * sn
    u = lambda v: _unwrap(v, scalar)  # noqa: E731
    return MonodromyMatrix(u(c), u(sn), u(cp), u(c.copy()), u(lam_arr))


def _stage_weights(p: Potential, steps: int, nodes: np.ndarray) -> np.ndarray:
    """q at x_k + c_i h for every step k and stage node c_i, shape (steps, len(nodes))."""
    h = 1.0 / steps
    x = (np.arange(steps)[:, None] + nodes[None, :]) * h
    return evaluate(p, np.clip(x, 0.0, 1.0))


def _solve3(m, r):
    """Cramer's rule for a batch of 3x3 systems; m[i][j] and r[i] are arrays."""
    c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1]
    c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2]
    c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0]
    det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02
    c10 = m[0][2] * m[2][1] - m[0][1] * m[2][2]
    c11 = m[0][0] * m[2][2] - m[0][2] * m[2][0]
    c12 = m[0][1] * m[2][0] - m[0][0] * m[2][1]
    c20 = m[0][1] * m[1][2] - m[0][2] * m[1][1]
    c21 = m[0][2] * m[1][0] - m[0][0] * m[1][2]
    c22 = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    x0 = (c00 * r[0] + c10 * r[1] + c20 * r[2]) / det
    x1 = (c01 * r[0] + c11 * r[1] + c21 * r[2]) / det
    x2 = (c02 * r[0] + c12 * r[1] + c22 * r[2]) / det
    return x0, x1, x2


# elements per (steps x lam) block; bounds the temporaries in _propagate_gauss
_BLOCK = 1 << 15


def _gauss_step_maps(q_stage, lam, a, steps):
    """Per-step transfer maps, shape (steps, n, 2, 2), for a block of lam values.

    Stage slopes of (y, p): Ky = p + h A Kp, Kp = W (y + h A Ky), W = diag(w).
    Eliminating Ky leaves (I - h^2 W A^2) Kp = W (y + h c p) with c = A 1.
    """
    h = 1.0 / steps
    A2 = _GL_A @ _GL_A
    w = [(q_stage[:, i, None] - lam[None, :]) / a for i in range(3)]
    m = [[(1.0 if i == j else 0.0) - h * h * A2[i, j] * w[i] for j in range(3)] for i in range(3)]
    kp_y = _solve3(m, w)  # column for unit value
    kp_p = _solve3(m, [h * _GL_C[i] * w[i] for i in range(3)])  # column for unit slope
    ky_y = [h * sum(_GL_A[i, j] * kp_y[j] for j in range(3)) for i in range(3)]
    ky_p = [1.0 + h * sum(_GL_A[i, j] * kp_p[j] for j in range(3)) for i in range(3)]
    F = np.empty(w[0].shape + (2, 2))
    F[..., 0, 0] = 1.0 + h * sum(_GL_B[i] * ky_y[i] for i in range(3))
    F[..., 0, 1] = h * sum(_GL_B[i] * ky_p[i] for i in range(3))
    F[..., 1, 0] = h * sum(_GL_B[i] * kp_y[i] for i in range(3))
    F[..., 1, 1] = 1.0 + h * sum(_GL_B[i] * kp_p[i] for i in range(3))
    return F


def _chain(F):
    """F[-1] @ ... @ F[0] by pairwise reduction along axis 0."""
    while F.shape[0] > 1:
        if F.shape[0] % 2:
            F = np.concatenate([F, np.broadcast_to(np.eye(2), (1,) + F.shape[1:])])
        L, R = F[1::2], F[0::2]
        out = np.empty_like(R)
        # explicit 2x2 products; np.matmul is slow on tiny trailing axes
        for i in range(2):
            for j in range(2):
                out[..., i, j] = L[..., i, 0] * R[..., 0, j] + L[..., i, 1] * R[..., 1, j]
        F = out
    return F[0]


def _propagate_gauss(q_stage, lam, a, steps):
    q_stage = np.asarray(q_stage, dtype=float)
    if lam.size < steps:
        # few lam values: vectorize over steps and reduce the product as a tree
        out = np.empty((lam.size, 2, 2))
        block = max(1, _BLOCK // steps)
        for i in range(0, lam.size, block):
            out[i : i + block] = _chain(_gauss_step_maps(q_stage, lam[i : i + block], a, steps))
        return out
    # many lam values: march step by step, building the maps a chunk at a time
    y0, y1 = np.ones_like(lam), np.zeros_like(lam)  # row 0 of Y (values)
    p0, p1 = np.zeros_like(lam), np.ones_like(lam)  # row 1 of Y (slopes)
    chunk = max(1, _BLOCK // lam.size)
    for k0 in range(0, steps, chunk):
        F = _gauss_step_maps(q_stage[k0 : k0 + chunk], lam, a, steps)
        for f in F:
            y0, y1, p0, p1 = (
                f[:, 0, 0] * y0 + f[:, 0, 1] * p0,
                f[:, 0, 0] * y1 + f[:, 0, 1] * p1,
                f[:, 1, 0] * y0 + f[:, 1, 1] * p0,
                f[:, 1, 0] * y1 + f[:, 1, 1] * p1,
            )
    return np.stack([np.stack([y0, y1], -1), np.stack([p0, p1], -1)], -2)


def _propagate_rk4(q_stage, lam, a, steps):
    h = 1.0 / steps
    n = lam.size
    Y = np.broadcast_to(np.eye(2), (n, 2, 2)).copy()

    def f(w, Y):
        # Y' = [[0, 1], [w, 0]] Y
        out = np.empty_like(Y)
        out[:, 0, :] = Y[:, 1, :]
        out[:, 1, :] = w[:, None] * Y[:, 0, :]
        return out

    for k in range(steps):
        w0, wm, w1 = ((q_stage[k][j] - lam) / a for j in range(3))
        k1 = f(w0, Y)
        k2 = f(wm, Y + 0.5 * h * k1)
        k3 = f(wm, Y + 0.5 * h * k2)
        k4 = f(w1, Y + h * k3)
        Y = Y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return Y


INTEGRATORS = {
    "gauss": (_propagate_gauss, _GL_C, 6),
    "rk4": (_propagate_rk4, np.array([0.0, 0.5, 1.0]), 4),
}


def monodromy_numeric(
    p: Potential, lam, a: float, steps: int = DEFAULT_STEPS, method: str = "gauss"
) -> MonodromyMatrix:
    """Integrate u'' = (q - lam)/a u across [0, 1] with ``steps`` uniform steps.

    ``method`` is ``"gauss"`` (3-stage Gauss-Legendre, order 6, preserves the
    Wronskian) or ``"rk4"`` (classical Runge-Kutta, order 4).
    """
    if not a > 0:
        raise ParameterError("a must be positive")
    if not isinstance(steps, (int, np.integer)) or steps < MIN_STEPS:
        raise ParameterError(f"steps must be an integer >= {MIN_STEPS}")
    if method not in INTEGRATORS:
        raise ParameterError(f"unknown integrator {method!r}")
    require_symmetric(p)
    propagate, nodes, _ = INTEGRATORS[method]
    scalar = np.ndim(lam) == 0
    lam_arr = np.asarray(lam, dtype=float)
    flat = lam_arr.reshape(-1)
    Y = propagate(_stage_weights(p, steps, nodes), flat, a, steps)
    shape = lam_arr.shape

    def entry(r, c):
        return _unwrap(Y[:, r, c].reshape(shape), scalar)

    return MonodromyMatrix(entry(0, 0), entry(0, 1), entry(1, 0), entry(1, 1), _unwrap(lam_arr, scalar))


def integrator_order(method: str) -> int:
    return INTEGRATORS[method][2]


def monodromy(p: Potential, lam, a: float, steps: int = DEFAULT_STEPS) -> MonodromyMatrix:
    """Closed form for the zero potential, numeric integration otherwise."""
    if p.is_zero:
        return monodromy_free(lam, a)
    return monodromy_numeric(p, lam, a, steps)


@dataclass(frozen=True)
class PsiBoundary:
    """Boundary slopes of psi_2 and the coefficients of psi_k = A_k s + B_k c."""

    psi2p0: float
    psi2p1: float
    a1: float
    a2: float
    b1: float
    b2: float
    valid: bool


def psi_boundary(M: MonodromyMatrix, params: Params) -> PsiBoundary:
    from .dispersion import d_values

    d = d_values(M, params)
    d0, d1 = float(d.d0), float(d.d1)
    if abs(d0) < SINGULAR_D0 * max(1.0, abs(d1)):
        nan = float("nan")
        return PsiBoundary(nan, nan, nan, nan, nan, nan, False)
    a1 = -d1 / d0
    a2 = 1.0 / d0
    return PsiBoundary(
        psi2p0=a2,
        psi2p1=d1 / d0,
        a1=a1,
        a2=a2,
        b1=1.0 + params.ak * a1,
        b2=params.ak * a2,
        valid=True,
    )
