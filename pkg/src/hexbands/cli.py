"""Command-line front end.

    hexbands bands       --a 1 --kappa-inv 0 --mass 0 --potential zero --lmin 0 --lmax 100
    hexbands surface     --theta-grid 21 --levels 6
    hexbands dirac | eigenvalues | delta
    hexbands smap        --grid 201
    hexbands verify

Exit codes: 0 success, 2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence

import numpy as np

from . import spectrum
from .dispersion import DIRAC_MOMENTA, Quasimomentum, delta_eval, s_abs
from .errors import (
    ClassificationError,
    DomainError,
    NumericalError,
    ParameterError,
    RangeError,
    SingularityError,
    SymmetryError,
)
from .potential import Potential, make_builtin, parse_potential
from .transfer import DEFAULT_STEPS, Params

COMMANDS = ("bands", "surface", "dirac", "eigenvalues", "smap", "verify", "delta")
INPUT_ERRORS = (ParameterError, DomainError, SymmetryError, RangeError, ClassificationError, OSError)
NUMERIC_ERRORS = (NumericalError, SingularityError, np.linalg.LinAlgError)


@dataclass
class RunConfig:
    command: str
    params: Params
    potential: str = "zero"
    lambda_range: tuple = spectrum.DEFAULT_RANGE
    grid_n: Optional[int] = None
    theta_grid_n: int = 21
    levels: int = 6
    output_path: Optional[str] = None
    format: str = "csv"
    steps: int = DEFAULT_STEPS

    def out_path(self) -> str:
        return self.output_path or f"hexbands_{self.command}.{self.format}"


def fmt(x) -> str:
    """Shortest round-trip repr of a float (at most 17 significant digits)."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _meta(cfg: RunConfig, pot: Potential) -> List[str]:
    p = cfg.params
    return [
        f"hexbands {cfg.command}",
        f"params: a={fmt(p.a)} kappa_inv={fmt(p.kappa_inv)} mass={fmt(p.mass)}",
        f"potential: {pot.describe()}",
        f"lambda_range: {fmt(cfg.lambda_range[0])} {fmt(cfg.lambda_range[1])}",
    ]


def write_csv(path, meta: Sequence[str], header: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        for line in meta:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else fmt(v) for v in row])


def read_csv(path):
    """Parse a file written by ``write_csv``: (meta lines, header, rows of str)."""
    meta, body = [], []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                meta.append(line[1:].strip())
            else:
                body.append(line)
    rows = list(csv.reader(body))
    return meta, rows[0], rows[1:]


def write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, default=_json_default)
        fh.write("\n")


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


# --- sub-commands ---------------------------------------------------------


def _grid(cfg, default=spectrum.DEFAULT_GRID):
    return cfg.grid_n if cfg.grid_n is not None else default


def cmd_bands(cfg: RunConfig, pot: Potential) -> str:
    rep = spectrum.full_report(pot, cfg.params, cfg.lambda_range, _grid(cfg), cfg.steps)
    path = cfg.out_path()
    if cfg.format == "json":
        write_json(path, rep.to_dict())
    else:
        rows = [("band", b.lo, b.hi, b.hi - b.lo) for b in rep.bands]
        rows += [("gap", g.lo, g.hi, g.width) for g in rep.gaps]
        rows += [("touching", t, t, 0.0) for t in rep.touchings]
        rows.sort(key=lambda r: (r[1], r[2]))
        meta = _meta(cfg, pot) + [f"warning: {w}" for w in rep.warnings]
        write_csv(path, meta, ["kind", "lo", "hi", "width"], rows)
    return f"{len(rep.bands)} bands, {len(rep.gaps)} gaps, {len(rep.touchings)} touchings -> {path}"


def cmd_surface(cfg: RunConfig, pot: Potential) -> str:
    samples = spectrum.surface_grid(
        pot, cfg.params, cfg.theta_grid_n, cfg.lambda_range, cfg.levels, _grid(cfg), cfg.steps
    )
    path = cfg.out_path()
    if cfg.format == "json":
        write_json(path, [asdict(s) for s in samples])
    else:
        rows = [(s.theta1, s.theta2, s.level_index, s.branch_sign, s.flat, s.lam) for s in samples]
        write_csv(
            path,
            _meta(cfg, pot) + [f"theta_grid: {cfg.theta_grid_n}", f"levels: {cfg.levels}"],
            ["theta1", "theta2", "level_index", "branch_sign", "flat", "lambda"],
            rows,
        )
    return f"{len(samples)} surface samples on a {cfg.theta_grid_n}x{cfg.theta_grid_n} grid -> {path}"


def cmd_dirac(cfg: RunConfig, pot: Potential) -> str:
    roots = spectrum.dirac_roots(pot, cfg.params, cfg.lambda_range, _grid(cfg), cfg.steps)
    path = cfg.out_path()
    if cfg.format == "json":
        write_json(path, {"dirac": roots, "dirac_momenta": [list(m) for m in DIRAC_MOMENTA]})
    else:
        deltas = delta_eval(pot, cfg.params, np.array(roots), cfg.steps).delta if roots else []
        rows = [
            (lam, t1, t2, d)
            for lam, d in zip(roots, deltas)
            for t1, t2 in DIRAC_MOMENTA
        ]
        write_csv(path, _meta(cfg, pot), ["lambda", "theta1", "theta2", "delta"], rows)
    return f"{len(roots)} Dirac energies -> {path}"


def cmd_eigenvalues(cfg: RunConfig, pot: Potential) -> str:
    roots = spectrum.sigma0_roots(pot, cfg.params, cfg.lambda_range, _grid(cfg), cfg.steps)
    fn = spectrum.DeltaFunction(pot, cfg.params, cfg.steps)
    rows = []
    for lam in roots:
        d = fn.dvals(lam)
        delta = float(fn.delta(lam))
        on_edge = abs(abs(delta) - 1.0) <= spectrum.EDGE_TOL
        cases = ""
        if pot.is_zero and on_edge:
            cases = ";".join(str(c) for c in sorted(spectrum.classify_free_edges(cfg.params, lam)))
        rows.append((lam, float(d.d0), delta, on_edge, cases))
    path = cfg.out_path()
    if cfg.format == "json":
        write_json(
            path,
            {
                "sigma0": roots,
                "d0": [r[1] for r in rows],
                "delta": [r[2] for r in rows],
                "on_band_edge": [r[3] for r in rows],
                "edge_classes": [r[4] for r in rows],
            },
        )
    else:
        write_csv(path, _meta(cfg, pot), ["lambda", "d0", "delta", "on_band_edge", "cases"], rows)
    return f"{len(roots)} flat-band eigenvalues -> {path}"


def cmd_smap(cfg: RunConfig, pot: Potential) -> str:
    n = _grid(cfg, default=201)
    if n < 3:
        raise ParameterError("smap grid must be >= 3")
    ts = np.linspace(-np.pi, np.pi, n)
    T1, T2 = np.meshgrid(ts, ts, indexing="ij")
    S = s_abs(T1, T2)
    path = cfg.out_path()
    if cfg.format == "json":
        write_json(path, {"theta": ts, "s_abs": S})
    else:
        meta = [
            "hexbands smap",
            f"theta = linspace(-pi, pi, {n}) on both axes",
            "rows: theta1 (first column), columns: theta2 (header)",
        ]
        header = ["theta1\\theta2"] + [fmt(t) for t in ts]
        rows = [[fmt(t1)] + [fmt(v) for v in S[i]] for i, t1 in enumerate(ts)]
        write_csv(path, meta, header, rows)
    return f"|S| on a {n}x{n} grid, max {S.max():.6g}, min {S.min():.3g} -> {path}"


def emit_delta_curve(cfg: RunConfig, pot: Potential) -> str:
    """Write (lambda, T1, T2, Delta, inside_band) on a uniform lam grid."""
    lo, hi = cfg.lambda_range
    n = _grid(cfg, default=4000)
    lams = np.linspace(lo, hi, n + 1)
    ev = delta_eval(pot, cfg.params, lams, cfg.steps)
    inside = np.abs(ev.delta) <= 1.0
    path = cfg.out_path()
    if cfg.format == "json":
        write_json(path, {"lambda": lams, "t1": ev.t1, "t2": ev.t2, "delta": ev.delta, "inside_band": inside})
    else:
        rows = zip(lams, ev.t1, ev.t2, ev.delta, inside)
        write_csv(path, _meta(cfg, pot), ["lambda", "t1", "t2", "delta", "inside_band"], rows)
    return f"Delta curve with {n + 1} points ({int(inside.sum())} inside bands) -> {path}"


def cmd_verify(cfg: RunConfig, pot: Potential) -> str:
    from .verify import run_checks

    checks = run_checks(pot, cfg.params, steps=cfg.steps)
    width = max(len(c.name) for c in checks)
    lines = [f"{'check':<{width}}  {'value':>12}  {'tol':>9}  result"]
    for c in checks:
        lines.append(f"{c.name:<{width}}  {c.value:12.3e}  {c.tol:9.1e}  {'PASS' if c.ok else 'FAIL'}")
    table = "\n".join(lines)
    print(table)
    if cfg.output_path:
        if cfg.format == "json":
            write_json(cfg.output_path, [asdict(c) for c in checks])
        else:
            write_csv(cfg.output_path, ["hexbands verify"], ["check", "value", "tol", "ok"],
                      [(c.name, c.value, c.tol, c.ok) for c in checks])
    failed = [c.name for c in checks if not c.ok]
    if failed:
        raise NumericalError("verification failed: " + ", ".join(failed))
    return f"{len(checks)} checks passed"


HANDLERS = {
    "bands": cmd_bands,
    "surface": cmd_surface,
    "dirac": cmd_dirac,
    "eigenvalues": cmd_eigenvalues,
    "smap": cmd_smap,
    "verify": cmd_verify,
    "delta": emit_delta_curve,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--a", type=float, default=1.0, help="stiffness a > 0")
    common.add_argument("--kappa-inv", type=float, default=0.0, help="semi-rigidity kappa^-1 >= 0")
    common.add_argument("--mass", type=float, default=0.0, help="vertex mass m >= 0")
    common.add_argument("--potential", default="zero", help="zero | cosine:<amp> | file:<path>")
    common.add_argument("--lmin", type=float, default=spectrum.DEFAULT_RANGE[0])
    common.add_argument("--lmax", type=float, default=spectrum.DEFAULT_RANGE[1])
    common.add_argument("--grid", type=int, default=None, help="lambda grid size (theta grid for smap)")
    common.add_argument("--theta-grid", type=int, default=21)
    common.add_argument("--levels", type=int, default=6)
    common.add_argument("--steps", type=int, default=DEFAULT_STEPS, help="integration steps per edge")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None)

    parser = argparse.ArgumentParser(prog="hexbands", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    if ns.lmin > ns.lmax:
        raise ParameterError("--lmin must not exceed --lmax")
    if ns.levels < 0:
        raise ParameterError("--levels must be non-negative")
    return RunConfig(
        command=ns.command,
        params=Params(ns.a, ns.kappa_inv, ns.mass),
        potential=ns.potential,
        lambda_range=(ns.lmin, ns.lmax),
        grid_n=ns.grid,
        theta_grid_n=ns.theta_grid,
        levels=ns.levels,
        output_path=ns.out,
        format=ns.format,
        steps=ns.steps,
    )


def run(argv=None) -> int:
    try:
        cfg = parse_config(argv)
        pot = parse_potential(cfg.potential)
        t0 = time.perf_counter()
        summary = HANDLERS[cfg.command](cfg, pot)
    except SystemExit as exc:  # argparse usage errors
        return 0 if exc.code in (0, None) else 2
    except INPUT_ERRORS as exc:
        print(f"hexbands: error: {exc}", file=sys.stderr)
        return 2
    except NUMERIC_ERRORS as exc:
        print(f"hexbands: numerical failure: {exc}", file=sys.stderr)
        return 3
    print(f"{cfg.command}: {summary} ({time.perf_counter() - t0:.2f}s)")
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
