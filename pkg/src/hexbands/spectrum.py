"""Bands, gaps, flat-band eigenvalues, Dirac energies and Bloch levels.

Everything is read off the discriminant Delta on a uniform lam grid:

* bands are the maximal intervals where -1 <= Delta <= 1, split at points
  where Delta touches +-1 tangentially;
* Sigma_0 (flat bands, eigenvalues of infinite multiplicity) is the zero set
  of D0;
* Dirac energies are the zeros of Delta; the cones sit at the two momenta
  +-(2 pi/3, -2 pi/3) where |S| vanishes;
* the Bloch levels at a fixed quasimomentum solve Delta = +-|S|/3, plus one
  flat level at every point of Sigma_0.

Roots are bracketed on the grid and refined by bisection. Tangential roots
(e.g. Delta = cos(sqrt(lam)) at lam = n^2 pi^2) never change sign, so grid
points where Delta - level has a local minimum in absolute value are also
checked: the extremum is located by bisecting the sign of a centred
difference, and the value there decides between a double root, a pair of
nearby simple roots, or a near miss.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .dispersion import (
    DIRAC_MOMENTA,
    DValues,
    Quasimomentum,
    d_values,
    delta_from_d,
    s_magnitude,
)
from .errors import ClassificationError, ParameterError
from .potential import Potential, require_symmetric
from .transfer import DEFAULT_STEPS, Params, cos_sqrt, monodromy, sinc_sqrt

GAP_MIN = 1e-7
# |Delta| may exceed 1 by this much at a touching point without opening a gap
TOUCH_TOL = 1e-9
EDGE_TOL = 1e-8
MIN_GRID = 100
DEFAULT_RANGE = (-10.0, 400.0)
DEFAULT_GRID = 20000
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Band:
    lo: float
    hi: float


@dataclass(frozen=True)
class Gap:
    lo: float
    hi: float
    width: float


@dataclass(frozen=True)
class SurfaceSample:
    theta1: float
    theta2: float
    branch_sign: int
    lam: float
    level_index: int
    flat: bool = False


@dataclass
class SpectrumReport:
    bands: List[Band]
    gaps: List[Gap]
    sigma0: List[float]
    dirac: List[float]
    scan_range: Tuple[float, float]
    params: Params
    edge_classes: Optional[List[Tuple[float, List[int]]]] = None
    touchings: List[float] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    notes: Dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["scan_range"] = list(self.scan_range)
        out["dirac_momenta"] = [list(m) for m in DIRAC_MOMENTA]
        return out


class DeltaFunction:
    """Vectorized D-values and Delta for one (potential, params) pair."""

    def __init__(self, p: Potential, params: Params, steps: int = DEFAULT_STEPS):
        require_symmetric(p)
        self.p = p
        self.params = params
        self.steps = steps

    def dvals(self, lam) -> DValues:
        return d_values(monodromy(self.p, lam, self.params.a, self.steps), self.params)

    def delta(self, lam):
        return delta_from_d(self.dvals(lam), self.params).delta

    def d0(self, lam):
        return self.dvals(lam).d0


# --- root machinery -------------------------------------------------------


def _bisect(f, lo, hi, max_iter=200):
    """Vectorized bisection; f(lo) and f(hi) must have opposite signs."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    if lo.size == 0:
        return lo
    flo = np.sign(f(lo))
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if np.all(hi - lo <= 4 * _EPS * np.maximum(1.0, np.abs(mid))):
            break
        fm = np.sign(f(mid))
        same = fm == flo
        hit = fm == 0
        lo = np.where(same | hit, mid, lo)
        hi = np.where(same & ~hit, hi, mid)
    return 0.5 * (lo + hi)


def _extremum(f, lo, hi, delta, max_iter=100):
    """Vectorized location of an interior extremum of f on [lo, hi].

    Bisects on the sign of f(x + delta) - f(x - delta), so f only needs to be
    unimodal on the bracket.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    if lo.size == 0:
        return lo
    delta = np.broadcast_to(np.asarray(delta, dtype=float), lo.shape)

    def slope(x):
        return np.sign(f(x + delta) - f(x - delta))

    s_lo = slope(lo)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if np.all(hi - lo <= 4 * _EPS * np.maximum(1.0, np.abs(mid))):
            break
        sm = slope(mid)
        same = sm == s_lo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def _level_roots(f, lams, vals, level, touch_tol=TOUCH_TOL):
    """Roots of f - level in [lams[0], lams[-1]] with multiplicity 1 or 2.

    ``vals`` is f on the uniform grid ``lams``. Returns a list of
    ``(root, multiplicity)`` sorted by root.
    """
    g = np.asarray(vals, dtype=float) - level
    n = g.size
    s = np.sign(g)
    out: List[Tuple[float, int]] = []

    def shifted(x):
        return f(x) - level

    for i in np.nonzero(s == 0)[0]:
        left = s[i - 1] if i > 0 else 0.0
        right = s[i + 1] if i < n - 1 else 0.0
        out.append((float(lams[i]), 2 if (left == right and left != 0) else 1))

    idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
    for r in _bisect(shifted, lams[idx], lams[idx + 1]):
        out.append((float(r), 1))

    if n >= 3:
        ag = np.abs(g)
        d2 = np.abs(g[2:] - 2 * g[1:-1] + g[:-2])
        mid = slice(1, -1)
        cand = (
            (s[:-2] == s[mid])
            & (s[2:] == s[mid])
            & (s[mid] != 0)
            & (ag[mid] <= ag[:-2])
            & (ag[mid] <= ag[2:])
            & (ag[mid] <= 2 * d2 + 64 * _EPS * np.maximum(1.0, np.abs(vals[mid])))
        )
        ci = np.nonzero(cand)[0] + 1
        if ci.size:
            step = lams[1] - lams[0]
            x_star = _extremum(shifted, lams[ci - 1], lams[ci + 1], 1e-2 * step)
            v_star = shifted(x_star)
            flipped = np.sign(v_star) != s[ci]
            touch = np.abs(v_star) <= touch_tol
            for x, v, t in zip(x_star[touch], v_star[touch], ci[touch]):
                out.append((float(x), 2))
            two = flipped & ~touch
            if np.any(two):
                left = _bisect(shifted, lams[ci[two] - 1], x_star[two])
                right = _bisect(shifted, x_star[two], lams[ci[two] + 1])
                out.extend((float(r), 1) for r in np.concatenate([left, right]))
    out.sort()
    return out


def _grid(lambda_range, grid_n):
    lo, hi = (float(v) for v in lambda_range)
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise ParameterError("lambda range must be finite")
    if lo > hi:
        raise ParameterError("lambda range must satisfy lmin <= lmax")
    if not isinstance(grid_n, (int, np.integer)) or grid_n < MIN_GRID:
        raise ParameterError(f"grid_n must be an integer >= {MIN_GRID}")
    return lo, hi, np.linspace(lo, hi, grid_n + 1)


def _resolution_warnings(vals, levels):
    notes = []
    jumps = np.abs(np.diff(vals))
    if np.any(jumps > 0.5):
        notes.append(
            f"grid may be too coarse: Delta changes by up to {jumps.max():.3g} between grid points"
        )
    lo_lv, hi_lv = min(levels), max(levels)
    both = ((vals[:-1] > hi_lv) & (vals[1:] < lo_lv)) | ((vals[:-1] < lo_lv) & (vals[1:] > hi_lv))
    if np.any(both):
        notes.append("a whole band fits inside one grid cell; refine grid_n")
    return notes


def _dedupe(xs, tol=1e-12):
    out = []
    for x in sorted(xs):
        if out and abs(x - out[-1]) <= tol * max(1.0, abs(x)):
            continue
        out.append(x)
    return out


def _excursion(fn: DeltaFunction, lo, hi):
    """Location and value of max |Delta| on a short gap interval [lo, hi]."""
    mid = 0.5 * (lo + hi)
    sign = 1.0 if fn.delta(mid) > 0 else -1.0
    width = hi - lo
    x = float(_extremum(lambda z: fn.delta(z), [lo], [hi], max(width * 1e-3, 1e-12))[0])
    return x, sign * fn.delta(x) - 1.0


# --- public operations ----------------------------------------------------


def scan_bands(
    p: Potential,
    params: Params,
    lambda_range: Sequence[float] = DEFAULT_RANGE,
    grid_n: int = DEFAULT_GRID,
    steps: int = DEFAULT_STEPS,
) -> SpectrumReport:
    """Band/gap structure of the absolutely continuous spectrum in a lam window."""
    fn = DeltaFunction(p, params, steps)
    lo, hi, lams = _grid(lambda_range, grid_n)
    report = SpectrumReport([], [], [], [], (lo, hi), params)
    if lo == hi:
        return report
    vals = np.asarray(fn.delta(lams))
    report.warnings.extend(_resolution_warnings(vals, (-1.0, 1.0)))

    roots = _level_roots(fn.delta, lams, vals, 1.0) + _level_roots(fn.delta, lams, vals, -1.0)
    simple = _dedupe(r for r, m in roots if m == 1 and lo < r < hi)
    touch = [r for r, m in roots if m == 2 and lo < r < hi]

    cuts = [lo] + simple + [hi]
    segs = [(a, b) for a, b in zip(cuts[:-1], cuts[1:]) if b > a]
    if not segs:
        return report
    mids = np.array([0.5 * (a + b) for a, b in segs])
    inside = np.abs(np.asarray(fn.delta(mids), dtype=float)) <= 1.0

    in_band = []
    gaps = []
    for k, (a, b) in enumerate(segs):
        if inside[k]:
            in_band.append([a, b])
            continue
        if 0 < k < len(segs) - 1 and inside[k - 1] and inside[k + 1]:
            x, exc = _excursion(fn, a, b)
            if b - a <= GAP_MIN or exc <= TOUCH_TOL:
                touch.append(x)
                continue
            gaps.append(Gap(a, b, b - a))

    bands = []
    touch = sorted(touch)
    for a, b in in_band:
        inner = [t for t in touch if a < t < b]
        pts = [a] + inner + [b]
        bands.extend(Band(x, y) for x, y in zip(pts[:-1], pts[1:]))
    report.bands = bands
    report.gaps = gaps
    report.touchings = touch
    return report


def _roots_of(fn_values, lambda_range, grid_n, level=0.0):
    lo, hi, lams = _grid(lambda_range, grid_n)
    if lo == hi:
        return []
    vals = np.asarray(fn_values(lams))
    return _dedupe(r for r, _ in _level_roots(fn_values, lams, vals, level))


def sigma0_roots(
    p: Potential,
    params: Params,
    lambda_range: Sequence[float] = DEFAULT_RANGE,
    grid_n: int = DEFAULT_GRID,
    steps: int = DEFAULT_STEPS,
) -> List[float]:
    """Zeros of D0: the flat-band eigenvalues of infinite multiplicity."""
    fn = DeltaFunction(p, params, steps)
    return _roots_of(fn.d0, lambda_range, grid_n)


def dirac_roots(
    p: Potential,
    params: Params,
    lambda_range: Sequence[float] = DEFAULT_RANGE,
    grid_n: int = DEFAULT_GRID,
    steps: int = DEFAULT_STEPS,
) -> List[float]:
    """Zeros of Delta; each is a conical point at both momenta in DIRAC_MOMENTA."""
    fn = DeltaFunction(p, params, steps)
    return _roots_of(fn.delta, lambda_range, grid_n)


def dirac_points(roots: Sequence[float]) -> List[Tuple[float, float, float]]:
    """Expand Dirac energies into (lam, theta1, theta2) triples."""
    return [(lam, t1, t2) for lam in roots for t1, t2 in DIRAC_MOMENTA]


class _LevelSolver:
    """Shared lam grid, Delta values and Sigma_0 for repeated per-theta solves."""

    def __init__(self, p, params, lambda_range, grid_n, steps):
        self.fn = DeltaFunction(p, params, steps)
        self.lo, self.hi, self.lams = _grid(lambda_range, grid_n)
        if self.lo == self.hi:
            self.vals = np.array([])
            self.sigma0 = []
        else:
            self.vals = np.asarray(self.fn.delta(self.lams))
            d0 = np.asarray(self.fn.d0(self.lams))
            self.sigma0 = _dedupe(r for r, _ in _level_roots(self.fn.d0, self.lams, d0, 0.0))

    def levels(self, q: Quasimomentum, max_levels=None) -> List[SurfaceSample]:
        if self.lo == self.hi:
            return []
        target = s_magnitude(q) / 3.0
        raw = []
        for sign in (1, -1):
            for r, mult in _level_roots(self.fn.delta, self.lams, self.vals, sign * target):
                raw.extend([(r, 0, -sign)] * mult)
        raw.extend((r, 1, -1) for r in self.sigma0)
        raw.sort()
        if max_levels is not None:
            raw = raw[:max_levels]
        return [
            SurfaceSample(q.theta1, q.theta2, -neg_sign, lam, j, bool(flat))
            for j, (lam, flat, neg_sign) in enumerate(raw)
        ]


def solve_bloch_levels(
    p: Potential,
    params: Params,
    q: Quasimomentum,
    lambda_range: Sequence[float] = DEFAULT_RANGE,
    max_levels: Optional[int] = None,
    grid_n: int = DEFAULT_GRID,
    steps: int = DEFAULT_STEPS,
) -> List[SurfaceSample]:
    """Eigenvalues of the Bloch operator at ``q`` in ascending order.

    Tangential roots of Delta = +-|S|/3 are double eigenvalues and appear
    twice; flat levels from Sigma_0 carry ``flat=True`` and branch_sign +1.
    """
    return _LevelSolver(p, params, lambda_range, grid_n, steps).levels(q, max_levels)


def surface_grid(
    p: Potential,
    params: Params,
    theta_grid_n: int,
    lambda_range: Sequence[float] = DEFAULT_RANGE,
    max_levels: Optional[int] = None,
    grid_n: int = DEFAULT_GRID,
    steps: int = DEFAULT_STEPS,
    workers: int = 1,
) -> List[SurfaceSample]:
    """Bloch levels on a uniform theta_grid_n x theta_grid_n grid over [-pi, pi]^2.

    Output order is theta1-major, then theta2, then level index, whatever
    the number of workers.
    """
    if not isinstance(theta_grid_n, (int, np.integer)) or theta_grid_n < 3:
        raise ParameterError("theta_grid_n must be an integer >= 3")
    solver = _LevelSolver(p, params, lambda_range, grid_n, steps)
    ts = np.linspace(-np.pi, np.pi, theta_grid_n)
    nodes = [Quasimomentum(float(t1), float(t2)) for t1 in ts for t2 in ts]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_node = list(pool.map(lambda q: solver.levels(q, max_levels), nodes))
    else:
        per_node = [solver.levels(q, max_levels) for q in nodes]
    return [s for chunk in per_node for s in chunk]


# --- free operator: band-edge classification ------------------------------


def free_edge_residuals(params: Params, lam: float) -> Dict[int, float]:
    """Residual of each of the six band-endpoint identities for q = 0.

    Case 3 is tested in the form m a kappa^-1 mu^2 = 3 with sin(mu)/mu = 0,
    which is what |Delta| = 1 reduces to at mu = n pi.
    """
    z = lam / params.a
    sinc = float(sinc_sqrt(z))
    cosm = float(cos_sqrt(z))
    ak, m = params.ak, params.mass
    d1 = cosm - ak * z * sinc
    d0 = 2 * ak * cosm + (1 - ak * ak * z) * sinc
    inf = math.inf
    return {
        1: abs(lam),
        2: abs(sinc) if m * params.kappa_inv == 0 else inf,
        3: max(abs(sinc), abs(m * ak * z - 3.0)) if m * ak > 0 else inf,
        4: abs(d0),
        5: abs(m / 3 * (d1 - 1) + sinc),
        6: abs(m / 3 * (d1 + 1) + sinc),
    }


def free_delta(params: Params, lam):
    """Closed-form Delta for q = 0."""
    z = np.asarray(lam, dtype=float) / params.a
    sinc, cosm = sinc_sqrt(z), cos_sqrt(z)
    ak, m = params.ak, params.mass
    d1 = cosm - ak * z * sinc
    d0 = 2 * ak * cosm + (1 - ak * ak * z) * sinc
    out = d1 - (m / 3) * z * d0
    return float(out) if out.ndim == 0 else out


def classify_free_edges(params: Params, edge_lambda: float, tol: float = EDGE_TOL) -> frozenset:
    """Which of the six endpoint identities hold at a band edge of the free operator."""
    delta = free_delta(params, edge_lambda)
    if abs(abs(delta) - 1.0) > tol:
        raise ClassificationError(
            f"lam = {edge_lambda!r} is not a band edge: |Delta| = {abs(delta)!r}"
        )
    res = free_edge_residuals(params, edge_lambda)
    return frozenset(k for k, v in res.items() if v <= tol)


# --- combined report ------------------------------------------------------


def _is_edge(fn: DeltaFunction, lam: float, tol=EDGE_TOL) -> bool:
    return abs(abs(float(fn.delta(lam))) - 1.0) <= tol


def full_report(
    p: Potential,
    params: Params,
    lambda_range: Sequence[float] = DEFAULT_RANGE,
    grid_n: int = DEFAULT_GRID,
    steps: int = DEFAULT_STEPS,
) -> SpectrumReport:
    """scan_bands plus Sigma_0, Dirac energies and (q = 0) edge classification."""
    report = scan_bands(p, params, lambda_range, grid_n, steps)
    lo, hi = report.scan_range
    if lo == hi:
        return report
    fn = DeltaFunction(p, params, steps)
    report.sigma0 = sigma0_roots(p, params, lambda_range, grid_n, steps)
    report.dirac = dirac_roots(p, params, lambda_range, grid_n, steps)
    report.notes["sigma0"] = "eigenvalues of infinite multiplicity (flat bands, loop states)"
    report.notes["sigma0_on_band_edge"] = [_is_edge(fn, r, 1e-8) for r in report.sigma0]
    if p.is_zero:
        edges = _dedupe(x for b in report.bands for x in (b.lo, b.hi))
        report.edge_classes = [
            (x, sorted(classify_free_edges(params, x))) for x in edges if _is_edge(fn, x)
        ]
    return report


def genuine_edges(report: SpectrumReport, p: Potential, tol: float = EDGE_TOL) -> List[float]:
    """Band endpoints where |Delta| = 1 (drops cut-offs at the scan window)."""
    fn = DeltaFunction(p, report.params)
    edges = _dedupe(x for b in report.bands for x in (b.lo, b.hi))
    return [x for x in edges if _is_edge(fn, x, tol)]
