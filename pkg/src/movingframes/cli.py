"""
Command-line front end.

Subcommands ``invariants``, ``frames``, ``match`` and ``surface`` take an
object either from ``--builtin NAME`` or from ``--input job.json``.  A job
file holds one JSON object with the fields of :class:`JobSpec`, e.g.::

    {"geometry": "euclidean", "kind": "curve",
     "expression": ["2*cos(t)", "sin(t)"], "domain": [0, 6.283185307179586],
     "periodic": true, "grid": [128]}

Exit codes: 0 success, 1 parse or I/O error, 2 genericity violation,
3 not congruent.  Every error message starts with ``error:``.
"""

import argparse
import json
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import affine, builtins, conformal_curves, conformal_surfaces, euclidean, signature
from .curves import AnalyticCurve, EUCLIDEAN_DENSITY, ReparamTable, SampledCurve
from .errors import DensityVanishes, ExprSyntaxError, GenericityError, MovingFrameError
from .groups import Geometry, random_group_element
from .surfaces import AnalyticSurface, SampledSurface

EXIT_OK, EXIT_INPUT, EXIT_GENERICITY, EXIT_NOT_CONGRUENT = 0, 1, 2, 3
MIN_GRID = 16
DEFAULT_GRID = {"curve": (128,), "surface": (64, 64)}


class InputError(Exception):
    """Malformed job description or unreadable file."""


@dataclass
class JobSpec:
    """One object and what to compute on it.

    Exactly one of ``builtin``, ``expression`` and ``samples`` names the
    source.  ``samples`` is a CSV of points (curves) or a ``.npy`` array of
    shape ``(N, M, dim)`` (surfaces).  ``seed`` moves the object by a random
    group element of ``geometry`` before anything is computed.
    """

    geometry: str = None
    kind: str = None
    builtin: str = None
    expression: list = None
    samples: str = None
    variables: list = None
    domain: list = None
    periodic: object = None
    grid: list = None
    out: str = None
    seed: int = None

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise InputError("job file must hold a JSON object")
        names = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise InputError(f"unknown job fields: {', '.join(unknown)}")
        return cls(**data)

    def resolved(self):
        """Fill defaults and check the field combination."""
        sources = [x for x in (self.builtin, self.expression, self.samples) if x is not None]
        if len(sources) != 1:
            raise InputError("exactly one of builtin, expression, samples is required")
        kind = self.kind
        if kind is None:
            kind = "surface" if self.builtin and builtins.is_surface(self.builtin) else "curve"
        if kind not in ("curve", "surface"):
            raise InputError(f"kind must be 'curve' or 'surface', not {kind!r}")
        geometry = self.geometry or ("conformal" if kind == "surface" else "euclidean")
        try:
            geometry = Geometry.parse(geometry)
        except ValueError:
            raise InputError(f"unknown geometry {self.geometry!r}") from None
        grid = tuple(self.grid) if self.grid is not None else DEFAULT_GRID[kind]
        if kind == "surface" and len(grid) == 1:
            grid = grid * 2
        if any(int(g) != g or g < MIN_GRID for g in grid):
            raise InputError(f"grid sizes must be integers >= {MIN_GRID}")
        return JobSpec(geometry.value, kind, self.builtin, self.expression, self.samples,
                       self.variables, self.domain, self.periodic,
                       [int(g) for g in grid], self.out, self.seed)


def _load_samples(path, kind):
    try:
        if kind == "surface":
            return np.load(path)
        return np.loadtxt(path, delimiter=",", ndmin=2)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read samples from {path}: {exc}") from None


def build_object(job):
    """Curve or surface provider described by a resolved job."""
    if job.builtin is not None:
        if job.kind == "surface":
            obj = builtins.surface(job.builtin)
        else:
            obj = builtins.curve(job.builtin)
    elif job.expression is not None:
        if job.domain is None:
            raise InputError("expression sources need a domain")
        if job.kind == "surface":
            obj = AnalyticSurface(job.expression, tuple(job.variables or ("u", "v")),
                                  job.domain, tuple(job.periodic or (False, False)))
        else:
            obj = AnalyticCurve(job.expression, (job.variables or ["t"])[0], job.domain,
                                bool(job.periodic))
    else:
        if job.domain is None:
            raise InputError("sample sources need a domain")
        values = _load_samples(job.samples, job.kind)
        try:
            if job.kind == "surface":
                obj = SampledSurface(values, job.domain, tuple(job.periodic or (False, False)))
            else:
                obj = SampledCurve(values, job.domain, bool(job.periodic))
        except ValueError as exc:
            raise InputError(str(exc)) from None
    if job.seed is not None:
        g = random_group_element(job.geometry, int(job.seed))
        if job.kind == "surface":
            obj = conformal_surfaces.moebius_image_surface(obj, g)
        else:
            obj = signature.transform_curve(obj, g)
    return obj


# -- computations -----------------------------------------------------------------------

_DENSITY = {
    Geometry.EUCLIDEAN2: EUCLIDEAN_DENSITY,
    Geometry.EQUIAFFINE2: affine.AFFINE_DENSITY,
    Geometry.MOEBIUS3: conformal_curves.CONFORMAL_DENSITY,
}


def curve_invariants(c, geometry, n):
    """Header and rows ``t, s, invariant(s)`` at ``n`` parameter samples."""
    geometry = Geometry.parse(geometry)
    t = c.sample_parameters(n)
    if geometry is Geometry.MOEBIUS3:
        inv = conformal_curves.conformal_kappa_tau(c, t=t)
        return ["t", "s", "kappa", "tau"], np.column_stack([t, inv.s, inv.kappa, inv.tau])
    if geometry is Geometry.EQUIAFFINE2:
        bad = affine.detect_inflections(c)
        if bad:
            raise GenericityError("curve is inflectional", bad)
        values, name = affine.affine_curvature(c, t), "affine_kappa"
    else:
        values, name = euclidean.curvature_along(c, t), "kappa"
    s = ReparamTable(c, _DENSITY[geometry]).s_of_t(t)
    return ["t", "s", name], np.column_stack([t, s, values])


def curve_frames(c, geometry, n):
    """Header and rows of frame fields at ``n`` parameter samples."""
    geometry = Geometry.parse(geometry)
    t = c.sample_parameters(n)
    if geometry is Geometry.MOEBIUS3:
        fr = conformal_curves.conformal_adapted_frame(c, t)
        pts = c.points(t)
        head = ["t"] + [f"x{i}" for i in range(pts.shape[1])]
        head += [f"e{k}_{i}" for k in range(5) for i in range(5)] + ["residual"]
        comps = np.swapaxes(fr.matrix, -1, -2).reshape(t.size, 25)
        return head, np.column_stack([t, pts, comps, fr.residual])
    if geometry is Geometry.EQUIAFFINE2:
        fr = affine.affine_frame_lift(c, t)
        extra, extra_head = [fr.det], ["det"]
    else:
        fr = euclidean.euclidean_frame_lift(c, t)
        extra, extra_head = [], []
    head = ["t", "x", "y", "e1_x", "e1_y", "e2_x", "e2_y"] + extra_head
    return head, np.column_stack([t, fr.basepoint, fr.e1, fr.e2, *extra])


def surface_report(S, grid):
    """Header, rows ``u, v, density, area_element, umbilic`` and the report."""
    rep = conformal_surfaces.willmore_density_and_energy(S, tuple(grid))
    rows = np.column_stack([rep.U.ravel(), rep.V.ravel(), rep.density.ravel(),
                            rep.area_element.ravel(), rep.umbilic.ravel().astype(float)])
    return ["u", "v", "density", "area_element", "umbilic"], rows, rep


def surface_frames(S, grid):
    U, V = S.grid(*grid)
    fr = conformal_surfaces.surface_frame_f1(S, U, V)
    comps = np.swapaxes(fr.matrix, -1, -2).reshape(-1, 25)
    res = conformal_surfaces.frame_residual(fr.matrix).ravel()
    head = ["u", "v"] + [f"e{k}_{i}" for k in range(5) for i in range(5)] + ["residual"]
    return head, np.column_stack([U.ravel(), V.ravel(), comps, res])


# -- output -------------------------------------------------------------------------------


def write_csv(path, header, rows):
    """CSV with a header row, 17 significant digits and LF line endings."""
    try:
        with open(path, "w", newline="\n", encoding="ascii") as fh:
            np.savetxt(fh, rows, fmt="%.17g", delimiter=",", header=",".join(header),
                       comments="", newline="\n")
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from None


def print_table(header, rows, out=None):
    out = out or sys.stdout
    width = 16
    out.write("".join(h.rjust(width) for h in header) + "\n")
    for row in rows:
        out.write("".join(f"{x:{width}.8g}" for x in row) + "\n")


# -- argument handling --------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"error: {message}\n")


def _grid(text):
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be N or N,M, got {text!r}") from None


def make_parser():
    parser = _Parser(prog="movingframes", description="Moving-frame invariants of curves "
                     "and surfaces.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "invariants": "invariants of a curve along invariant arclength",
        "frames": "adapted frames along a curve (or first-order frames on a surface)",
        "match": "congruence test of two curves",
        "surface": "Willmore density and energy of a surface in S^3",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("--geometry", help="euclidean, equiaffine or conformal")
        p.add_argument("--input", action="append", default=[], metavar="JSON",
                       help="job file (repeat for match)")
        p.add_argument("--builtin", action="append", default=[], metavar="NAME",
                       help="builtin object such as 'ellipse(2,1)' (repeat for match)")
        p.add_argument("--grid", type=_grid, help="samples N, or N,M for surfaces")
        p.add_argument("--out", help="CSV output path")
        p.add_argument("--seed", type=int,
                       help="move the (last) object by a random group element")
    return parser


def _read_job(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return JobSpec.from_dict(data)


def jobs_from_args(args, count):
    """Build ``count`` resolved jobs; command-line flags override job fields."""
    jobs = [_read_job(p) for p in args.input] + [JobSpec(builtin=b) for b in args.builtin]
    if len(jobs) != count:
        raise InputError(f"{args.command} needs {count} object(s), got {len(jobs)}")
    for job in jobs:
        if args.geometry is not None:
            job.geometry = args.geometry
        if args.grid is not None:
            job.grid = args.grid
        if args.out is not None:
            job.out = args.out
        if args.command == "surface":
            job.kind = job.kind or "surface"
    if args.seed is not None:
        jobs[-1].seed = args.seed
    return [job.resolved() for job in jobs]


def _emit(job, header, rows, show_table=True):
    if job.out:
        write_csv(job.out, header, rows)
    if show_table:
        print_table(header, rows)


def run(args):
    if args.command == "match":
        a, b = jobs_from_args(args, 2)
        if a.geometry != b.geometry:
            raise InputError("both objects of a match need the same geometry")
        n = args.grid[0] if args.grid else signature.N_SAMPLES
        sig_a = signature.build_signature(build_object(a), a.geometry, n)
        sig_b = signature.build_signature(build_object(b), b.geometry, n)
        res = signature.match(sig_a, sig_b)
        print("CONGRUENT" if res.congruent else "NOT-CONGRUENT")
        print(f"shift = {res.shift:.10g}")
        print(f"residual = {res.residual:.6g} (threshold {res.threshold:.6g})")
        return EXIT_OK if res.congruent else EXIT_NOT_CONGRUENT

    (job,) = jobs_from_args(args, 1)
    obj = build_object(job)
    if args.command == "surface" or job.kind == "surface":
        if job.kind != "surface":
            raise InputError(f"{args.command} of a curve: use a surface object")
        if job.geometry != Geometry.MOEBIUS3.value:
            raise InputError("surfaces are only supported in conformal geometry")
        if args.command == "frames":
            _emit(job, *surface_frames(obj, job.grid), show_table=False)
            return EXIT_OK
        if args.command != "surface":
            raise InputError(f"{args.command} is not available for surfaces")
        header, rows, rep = surface_report(obj, job.grid)
        _emit(job, header, rows, show_table=False)
        n, m = job.grid
        print(f"grid = {n}x{m}")
        print(f"umbilic samples = {int(rep.umbilic.sum())}")
        if rep.gauss_area is not None:
            print(f"Gauss image area = {rep.gauss_area:.10g}")
        print(f"W = {rep.energy:.10g}")
        return EXIT_OK
    if args.command == "invariants":
        _emit(job, *curve_invariants(obj, job.geometry, job.grid[0]))
    else:
        _emit(job, *curve_frames(obj, job.geometry, job.grid[0]), show_table=job.out is None)
    return EXIT_OK


def _fail(code, message):
    print(f"error: {message}", file=sys.stderr)
    return code


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        return run(args)
    except ExprSyntaxError as exc:
        code = _fail(EXIT_INPUT, f"syntax: {exc}")
        print(exc.caret(), file=sys.stderr)
        return code
    except InputError as exc:
        return _fail(EXIT_INPUT, str(exc))
    except GenericityError as exc:
        where = f" at parameters {_format_where(exc.parameters)}" if exc.parameters else ""
        return _fail(EXIT_GENERICITY, f"{type(exc).__name__}: {exc}{where}")
    except DensityVanishes as exc:
        where = f" on t in {exc.interval}" if exc.interval else ""
        return _fail(EXIT_GENERICITY, f"DensityVanishes: {exc.args[0]}{where}")
    except MovingFrameError as exc:
        return _fail(EXIT_INPUT, f"{type(exc).__name__}: {exc}")
    except (TypeError, ValueError) as exc:
        return _fail(EXIT_INPUT, f"invalid job: {exc}")


def _format_where(params):
    items = []
    for p in list(params)[:8]:
        if isinstance(p, (tuple, list)):
            items.append("[" + ", ".join(f"{x:.6g}" for x in p) + "]")
        else:
            items.append(f"{float(p):.6g}")
    more = ", ..." if len(params) > 8 else ""
    return ", ".join(items) + more


if __name__ == "__main__":
    sys.exit(main())
