"""Finite-difference discretization of the Bloch operator on the fundamental domain.

The fundamental domain has three unit edges e1, e2, e3 joining vertex v1
(x = 0 on every edge) to vertex v2 (x = 1). Each edge carries ``n`` uniform
nodes including both endpoints, and the two vertex values omega0, omega1 are
extra unknowns, so the system has 3n + 2 unknowns, ordered edge-major and
then omega0, omega1.

Rows:

* interior node of an edge: central second difference for -a u'' + q u;
* endpoint node at v1:  u_e(0) - ak u_e'(0) - omega0 = 0;
* endpoint node at v2:  (u_e(1) + ak u_e'(1)) phi_e - omega1 = 0, with the
  Floquet phases phi = (1, exp(i theta1), exp(i theta2));
* net force at v1:  -a sum_e u_e'(0) = lam m omega0;
* net force at v2:   a sum_e phi_e u_e'(1) = lam m omega1.

Endpoint slopes use three-point one-sided stencils so the scheme stays
second order. The vertex mass enters linearly in lam, so the problem is the
generalized pencil A x = lam B x with B singular on the constraint rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np
import scipy.linalg

from .dispersion import Quasimomentum
from .errors import NumericalError, ParameterError, RangeError
from .potential import Potential, evaluate, require_symmetric
from .spectrum import solve_bloch_levels
from .transfer import Params

MIN_NODES = 20
IMAG_TOL = 1e-6
EIG_CAP = 1e12
# lam grid for the reference levels; only the lowest few are needed
REF_GRID = 4000


@dataclass(frozen=True)
class FdBlochSystem:
    n: int
    A: np.ndarray
    B: np.ndarray
    theta: Quasimomentum
    params: Params

    @property
    def dim(self) -> int:
        return 3 * self.n + 2

    def dump(self, path) -> None:
        """Write ``dim n`` then A and B row-major, one ``re im`` pair per line."""
        with open(path, "w") as fh:
            fh.write(f"{self.dim} {self.n}\n")
            for M in (self.A, self.B):
                for z in M.ravel():
                    fh.write(f"{float(z.real)!r} {float(z.imag)!r}\n")


def load_dump(path):
    """Inverse of ``FdBlochSystem.dump``; returns (A, B, n)."""
    lines = Path(path).read_text().splitlines()
    dim, n = (int(v) for v in lines[0].split())
    vals = np.array([complex(float(r), float(i)) for r, i in (ln.split() for ln in lines[1:])])
    if vals.size != 2 * dim * dim:
        raise ValueError(f"{path}: expected {2 * dim * dim} entries, found {vals.size}")
    return vals[: dim * dim].reshape(dim, dim), vals[dim * dim :].reshape(dim, dim), n


def assemble(p: Potential, params: Params, q: Quasimomentum, n: int) -> FdBlochSystem:
    if not isinstance(n, (int, np.integer)) or n < MIN_NODES:
        raise ParameterError(f"n must be an integer >= {MIN_NODES}")
    require_symmetric(p)
    a, ak, m = params.a, params.ak, params.mass
    h = 1.0 / (n - 1)
    dim = 3 * n + 2
    w0, w1 = 3 * n, 3 * n + 1
    A = np.zeros((dim, dim), dtype=complex)
    B = np.zeros((dim, dim), dtype=complex)
    x = np.linspace(0.0, 1.0, n)
    qx = evaluate(p, x)
    phases = (1.0, np.exp(1j * q.theta1), np.exp(1j * q.theta2))
    # one-sided slopes: u'(0) ~ (-3u0 + 4u1 - u2)/2h, u'(1) ~ (3u_{n-1} - 4u_{n-2} + u_{n-3})/2h
    left = np.array([-3.0, 4.0, -1.0]) / (2 * h)
    right = np.array([1.0, -4.0, 3.0]) / (2 * h)

    for e in range(3):
        base = e * n
        for j in range(1, n - 1):
            r = base + j
            A[r, r - 1] = -a / h**2
            A[r, r] = 2 * a / h**2 + qx[j]
            A[r, r + 1] = -a / h**2
            B[r, r] = 1.0

        r0 = base
        A[r0, base] += 1.0
        A[r0, base : base + 3] -= ak * left
        A[r0, w0] = -1.0

        r1 = base + n - 1
        A[r1, base + n - 1] += phases[e]
        A[r1, base + n - 3 : base + n] += ak * phases[e] * right
        A[r1, w1] = -1.0

        A[w0, base : base + 3] += -a * left
        A[w1, base + n - 3 : base + n] += a * phases[e] * right

    B[w0, w0] = m
    B[w1, w1] = m
    return FdBlochSystem(n, A, B, q, params)


def _solve_failed(system, exc):
    path = Path(f"fd_bloch_failure_n{system.n}.txt").resolve()
    system.dump(path)
    return NumericalError(f"eigen-solver failed: {exc}", dump_path=str(path))


def _pencil_eigs(system: FdBlochSystem):
    """All finite eigenvalues of A x = lam B x by QZ."""
    try:
        alpha, beta = scipy.linalg.eig(system.A, system.B, right=False, homogeneous_eigvals=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise _solve_failed(system, exc) from exc
    finite = np.abs(beta) > 1e-14 * np.abs(alpha)
    return alpha[finite] / beta[finite]


def _reduced_eigs(system: FdBlochSystem):
    """Same spectrum with the constraint rows eliminated exactly.

    Unknowns whose B-row is zero are solved for in terms of the rest (a Schur
    complement), leaving a standard eigenproblem of size ~3n.
    """
    A, B = system.A, system.B
    bdiag = np.diag(B).real
    dyn = np.nonzero(bdiag != 0)[0]
    con = np.nonzero(bdiag == 0)[0]
    try:
        coupling = scipy.linalg.solve(A[np.ix_(con, con)], A[np.ix_(con, dyn)])
        reduced = A[np.ix_(dyn, dyn)] - A[np.ix_(dyn, con)] @ coupling
        reduced /= bdiag[dyn][:, None]
        return scipy.linalg.eigvals(reduced, overwrite_a=True, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise _solve_failed(system, exc) from exc


def bloch_eigs_fd(
    p: Potential, params: Params, q: Quasimomentum, n: int, k: int, method: str = "reduced"
) -> List[float]:
    """Lowest ``k`` real eigenvalues of the discretized Bloch operator.

    ``method="pencil"`` runs QZ on the full (A, B) pencil; ``"reduced"``
    (default, several times faster) eliminates the constraint rows first.
    """
    system = assemble(p, params, q, n)
    if method == "pencil":
        lam = _pencil_eigs(system)
    elif method == "reduced":
        lam = _reduced_eigs(system)
    else:
        raise ParameterError(f"unknown method {method!r}")
    keep = (np.abs(lam.imag) <= IMAG_TOL * (1 + np.abs(lam.real))) & (np.abs(lam) <= EIG_CAP)
    return sorted(lam.real[keep].tolist())[:k]


def _analytic_levels(p, params, q, k, lambda_range):
    if lambda_range is not None:
        levels = [s.lam for s in solve_bloch_levels(p, params, q, lambda_range, grid_n=REF_GRID)]
        if len(levels) < k:
            raise RangeError(f"only {len(levels)} analytic levels in {tuple(lambda_range)}, need {k}")
        return levels[:k]
    # the quadratic form gives lam >= min(0, min q)
    lo = min(0.0, p.minimum()) - 1.0
    hi = 50.0 * params.a
    while hi < 1e6:
        levels = [s.lam for s in solve_bloch_levels(p, params, q, (lo, hi), grid_n=REF_GRID)]
        # keep a margin so the k-th level is not split across the window edge
        if len(levels) > k:
            return levels[:k]
        hi *= 2
    raise RangeError(f"could not bracket {k} analytic levels below lam = {hi}")


def compare_dispersion(
    p: Potential,
    params: Params,
    q: Quasimomentum,
    n: int,
    k: int,
    lambda_range: Optional[tuple] = None,
) -> float:
    """Max over the k lowest levels of |lam_fd - lam_exact| / (1 + |lam_exact|)."""
    if k <= 0:
        return 0.0
    exact = _analytic_levels(p, params, q, k, lambda_range)
    fd = bloch_eigs_fd(p, params, q, n, k)
    if len(fd) < k:
        raise RangeError(f"finite-difference solve returned only {len(fd)} levels")
    return float(max(abs(f - e) / (1 + abs(e)) for f, e in zip(fd, exact)))
