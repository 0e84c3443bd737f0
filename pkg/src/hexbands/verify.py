"""Invariant checks run by ``hexbands verify``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from .dispersion import Quasimomentum, d_values
from .oracle import compare_dispersion
from .potential import Potential, make_builtin
from .spectrum import DeltaFunction, sigma0_roots
from .transfer import DEFAULT_STEPS, Params, monodromy, monodromy_free, monodromy_numeric

CHECK_LAMBDAS = (-10.0, 0.0, 1.0, np.pi**2, 50.0, 200.0)
ORACLE_THETAS = ((0.0, 0.0), (2 * np.pi / 3, -2 * np.pi / 3), (1.0, -1.0))


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tol: float

    @property
    def ok(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.tol)


def run_checks(p: Potential, params: Params, steps: int = DEFAULT_STEPS, oracle_n: int = 200) -> List[Check]:
    lams = np.array(CHECK_LAMBDAS)
    a = params.a
    # a non-trivial potential so the numeric path is exercised even for q = 0
    probe = p if not p.is_zero else make_builtin("cosine", 1.0)
    checks = []

    Mf = monodromy_free(lams, a)
    checks.append(Check("wronskian_free", float(np.max(np.abs(Mf.det - 1))), 1e-10))
    Mn = monodromy_numeric(probe, lams, a, steps)
    checks.append(Check("wronskian_numeric", float(np.max(np.abs(Mn.det - 1))), 1e-10))
    checks.append(Check("monodromy_symmetry", float(np.max(np.abs(Mn.c1 - Mn.sp1))), 1e-8))

    Mz = monodromy_numeric(make_builtin("zero"), lams, a, steps)
    diff = max(float(np.max(np.abs(getattr(Mz, f) - getattr(Mf, f)))) for f in ("c1", "s1", "cp1", "sp1"))
    checks.append(Check("numeric_vs_closed_form", diff, 1e-8))

    # D1^2 = 1 + c'(1) D0 (= 1 - mu sin(mu) D0 for q = 0), from det M = 1 and c1 = sp1
    grid = np.linspace(0.0, 200.0, 10_000)
    M = monodromy(p, grid, a, steps)
    d = d_values(M, params)
    scale = np.maximum(1.0, d.d1**2 + np.abs(M.cp1 * d.d0))
    resid = np.abs(d.d1**2 - M.cp1 * d.d0 - 1)
    checks.append(Check("d1d0_identity", float(np.max(resid / scale)), 1e-11))

    fn = DeltaFunction(p, params, steps)
    roots = sigma0_roots(p, params, (0.0, 200.0), steps=steps)
    edge = max((abs(abs(float(fn.delta(r))) - 1) for r in roots), default=0.0)
    checks.append(Check("sigma0_on_band_edges", edge, 1e-8))

    for t1, t2 in ORACLE_THETAS:
        err = compare_dispersion(p, params, Quasimomentum(t1, t2), oracle_n, 4)
        checks.append(Check(f"oracle_theta=({t1:+.3f},{t2:+.3f})", err, 5e-3))
    return checks
