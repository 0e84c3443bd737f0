"""Symmetric edge potentials q on the unit edge [0, 1].

The same potential sits on every edge of the hexagonal lattice. All of the
discriminant machinery downstream assumes q(x) = q(1 - x), so the check for
that lives here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import make_interp_spline

from .errors import DomainError, ParameterError, SymmetryError

KINDS = ("zero", "cosine", "tabulated")
PROBE_POINTS = 1001
# default tolerance used when spectral objects are built from a potential
SYMMETRY_TOL = 1e-8


@dataclass(frozen=True)
class Potential:
    """Real potential on [0, 1].

    ``kind`` is one of ``zero``, ``cosine`` (amplitude * cos(2 pi x)) or
    ``tabulated`` (spline through ``samples`` of the given order).
    """

    kind: str
    amplitude: float = 0.0
    samples: Tuple[Tuple[float, float], ...] = ()
    interpolation_order: int = 3
    _spline: Optional[object] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown potential kind {self.kind!r}")
        if self.kind == "tabulated":
            xs = np.array([s[0] for s in self.samples], dtype=float)
            qs = np.array([s[1] for s in self.samples], dtype=float)
            _validate_samples(xs, qs, self.interpolation_order)
            spline = make_interp_spline(xs, qs, k=self.interpolation_order)
            object.__setattr__(self, "_spline", spline)

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero" or (self.kind == "cosine" and self.amplitude == 0.0)

    def __call__(self, x):
        return evaluate(self, x)

    def minimum(self) -> float:
        """Minimum of q over the probe grid."""
        return float(np.min(evaluate(self, np.linspace(0.0, 1.0, PROBE_POINTS))))

    def describe(self) -> str:
        if self.kind == "zero":
            return "zero"
        if self.kind == "cosine":
            return f"cosine:{self.amplitude!r}"
        return f"tabulated[{len(self.samples)} samples, order {self.interpolation_order}]"


def _validate_samples(xs, qs, order):
    if xs.ndim != 1 or xs.size != qs.size:
        raise ParameterError("samples must be (x, q) pairs")
    if not isinstance(order, (int, np.integer)) or order < 1:
        raise ParameterError("interpolation_order must be a positive integer")
    if xs.size <= order:
        raise ParameterError(f"need more than {order} samples for order {order}")
    if xs[0] != 0.0 or xs[-1] != 1.0:
        raise ParameterError("tabulated x must start at 0 and end at 1")
    if np.any(np.diff(xs) <= 0):
        raise ParameterError("tabulated x must be strictly increasing")
    if not np.all(np.isfinite(qs)):
        raise ParameterError("tabulated values must be finite reals")


def make_builtin(name: str, amplitude: float = 0.0) -> Potential:
    if name == "zero":
        return Potential("zero")
    if name == "cosine":
        return Potential("cosine", amplitude=float(amplitude))
    raise ParameterError(f"unknown builtin potential {name!r}; expected 'zero' or 'cosine'")


def from_samples(xs: Sequence[float], qs: Sequence[float], order: int = 3) -> Potential:
    samples = tuple((float(x), float(q)) for x, q in zip(xs, qs))
    return Potential("tabulated", samples=samples, interpolation_order=order)


def load_tabulated(path, order: int = 3) -> Potential:
    """Read a two-column ``x value`` text file (``#`` comments allowed)."""
    data = np.loadtxt(Path(path), comments="#", ndmin=2)
    if data.shape[1] != 2:
        raise ParameterError(f"{path}: expected two whitespace-separated columns")
    return from_samples(data[:, 0], data[:, 1], order=order)


def evaluate(p: Potential, x):
    """q(x) for scalar or array x in [0, 1]."""
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError("potential is defined on [0, 1] only")
    if p.kind == "zero":
        out = np.zeros_like(arr)
    elif p.kind == "cosine":
        out = p.amplitude * np.cos(2.0 * np.pi * arr)
    else:
        out = np.asarray(p._spline(arr), dtype=float)
    return float(out) if np.ndim(x) == 0 else out


@dataclass(frozen=True)
class SymmetryReport:
    symmetric: bool
    max_asymmetry: float
    at_x: float

    def __bool__(self):
        return self.symmetric


def check_symmetry(p: Potential, tol: float) -> SymmetryReport:
    """Compare q(x) against q(1 - x) on a fixed uniform probe grid."""
    if not tol > 0:
        raise ParameterError("tol must be positive")
    xs = np.linspace(0.0, 1.0, PROBE_POINTS)
    diff = np.abs(evaluate(p, xs) - evaluate(p, 1.0 - xs))
    i = int(np.argmax(diff))
    worst = float(diff[i])
    return SymmetryReport(worst <= tol, worst, float(xs[i]))


def require_symmetric(p: Potential, tol: float = SYMMETRY_TOL) -> None:
    rep = check_symmetry(p, tol)
    if not rep.symmetric:
        raise SymmetryError(
            f"potential {p.describe()} is not symmetric: |q(x) - q(1-x)| = "
            f"{rep.max_asymmetry:.3g} at x = {rep.at_x:.6g}"
        )


def parse_potential(spec: str) -> Potential:
    """Parse the CLI form ``zero``, ``cosine:<amp>`` or ``file:<path>``."""
    if spec == "zero":
        return make_builtin("zero")
    kind, sep, arg = spec.partition(":")
    if not sep:
        raise ParameterError(f"bad potential spec {spec!r}")
    if kind == "cosine":
        try:
            amp = float(arg)
        except ValueError:
            raise ParameterError(f"bad cosine amplitude {arg!r}") from None
        return make_builtin("cosine", amp)
    if kind == "file":
        return load_tabulated(arg)
    raise ParameterError(f"bad potential spec {spec!r}")
