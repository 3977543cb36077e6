"""Command-line entry point: ``knotspec <subcommand> ...``.

Every subcommand prints (or writes with ``--out``) one JSON document.
Errors go to stderr as ``{"error": {"code": ..., "message": ...}}`` and
set the exit status: 1 bad input, 2 computational refusal (cap, budget,
sampling), 3 internal assertion.

Curves are named by a file path, a bundled name (``3_1``, ``conway`` ...)
or a generator spec such as ``torus_knot:p=2,q=3,n=32`` or
``planar_ngon:n=16``.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig
from .curves import (
    BUNDLED,
    OpenCurve,
    PolyCurve,
    _base,
    format_curve,
    genericity_check,
    jittered,
    load_curve,
    make_curve,
    open_at,
    sample_neighborhood,
    save_curve,
    tube_radius,
)
from .diagrams import KnotoidDiagram, closure, diagrammatic_height, simplify
from .errors import InputError, KnotspecError
from .invariants import bracket, fingerprint, jones_normalized, jones_t
from .secants import count_upper_bound, quadrisecants, summary
from .spectrum import Spectrum, compare, f_gradient, f_measure, knot_jones, knot_spectrum, knotoid_spectrum

# ------------------------------------------------------------------ helpers


def _curve(spec: str):
    path = Path(spec)
    if path.exists():
        return load_curve(path)
    if spec in BUNDLED:
        return make_curve("bundled", name=spec)
    kind, _, rest = spec.partition(":")
    if not rest:
        raise InputError(f"{spec!r} is neither a file, a bundled curve ({', '.join(BUNDLED)}) nor kind:params")
    params = {}
    for item in rest.split(","):
        key, eq, val = item.partition("=")
        if not eq:
            raise InputError(f"bad generator parameter {item!r} (want key=value)")
        params[key.strip()] = val.strip()
    return make_curve(kind, **params)


def _closed(spec: str) -> PolyCurve:
    c = _curve(spec)
    if isinstance(c, OpenCurve):
        raise InputError("this subcommand needs a closed curve")
    return c


def _open(spec: str, at: int | None):
    c = _curve(spec)
    if isinstance(c, OpenCurve):
        if at is not None:
            raise InputError("--open-at applies to closed curves only")
        return c
    if at is None:
        raise InputError("closed curve given; choose a base vertex with --open-at")
    return open_at(c, at)


def _config(args) -> RunConfig:
    kw = {"seed": args.seed, "workers": args.workers}
    for name, attr in (
        ("dirs", "directions"),
        ("samples", "samples_per_base"),
        ("h_frac", "h_frac"),
        ("cap", "cap"),
        ("budget", "budget"),
        ("degeneracy_tol", "degeneracy_tol"),
        ("scheme", "scheme"),
    ):
        val = getattr(args, name, None)
        if val is not None:
            kw[attr] = val
    if getattr(args, "strict", False):
        kw["knot_type_policy"] = "strict"
    if getattr(args, "out", None) is not None:
        kw["output"] = str(args.out)
    return RunConfig(**kw)


def _bases(text: str):
    if text == "all":
        return "all"
    try:
        return [int(b) for b in text.split(",") if b.strip()]
    except ValueError:
        raise InputError(f"--bases wants 'all' or a comma list of vertex indices, got {text!r}") from None


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _spectrum_out(s: Spectrum, args) -> None:
    if args.view == "pkspec":
        s = s.pkspec()
    _emit(s.dumps(), args.out)
    if args.csv is not None:
        args.csv.write_text(s.to_csv())


# ------------------------------------------------------------- subcommands


def cmd_spectrum_open(args) -> None:
    l = _open(args.curve, args.open_at)
    _spectrum_out(knotoid_spectrum(l, config=_config(args)), args)


def cmd_spectrum_knot(args) -> None:
    K = _closed(args.curve)
    h = args.h
    if h is None and args.h_frac is None:
        args.h_frac = 0.05
    s = knot_spectrum(K, h=h, bases=_bases(args.bases), config=_config(args))
    _spectrum_out(s, args)


def _diagram(args) -> KnotoidDiagram:
    return KnotoidDiagram.from_code(args.code)


def cmd_jones(args) -> None:
    if (args.code is None) == (args.curve is None):
        raise InputError("give exactly one of --code and --curve")
    if args.curve is not None:
        K = _closed(args.curve)
        j = knot_jones(K, args.cap)
        _emit(_dump({"curve": K.label, "jones": str(j), "jones_t": {str(e): c for e, c in j.to_t().items()}}), args.out)
        return
    d = _diagram(args)
    out = {
        "code": d.code,
        "bracket": str(bracket(d, args.cap)),
        "jones": str(jones_normalized(d, args.cap)),
        "jones_t": {str(e): c for e, c in jones_t(d, args.cap).items()},
        "writhe": d.writhe(),
    }
    _emit(_dump(out), args.out)


def cmd_height(args) -> None:
    d = _diagram(args)
    res = simplify(d, args.budget)
    fp = fingerprint(d, args.cap, args.budget)
    out = {
        "code": d.code,
        "diagrammatic_height": diagrammatic_height(d),
        "height_bound": res.height_bound,
        "simplified": res.diagram.code,
        "moves": res.moves,
        "budget_exhausted": res.exhausted,
        "knot_type": res.height_bound == 0,
        "fingerprint": fp.key,
        "note": "height_bound is an upper bound on the knotoid height",
    }
    _emit(_dump(out), args.out)


def cmd_closure(args) -> None:
    d = _diagram(args)
    res = closure(d, args.kind)
    out = {"code": d.code, "kind": args.kind, "closure": res.code, "arc_crossings": res.arc_crossings}
    if args.kind != "virtual":
        out["jones"] = str(jones_normalized(res.diagram, args.cap))
    _emit(_dump(out), args.out)


def cmd_quadrisecants(args) -> None:
    K = _closed(args.curve)
    qs = quadrisecants(K, args.tol)
    out = {
        "schema": "knotspec.quadrisecants/1",
        "curve": K.label,
        "n_vertices": K.n_vertices,
        "tol": args.tol,
        "summary": summary(qs),
        "count_upper_bound": float(count_upper_bound(K.n_edges)),
        "quadrisecants": [q.to_json() for q in qs],
    }
    if args.genericity:
        out["genericity"] = genericity_check(K, args.tol).to_json()
    _emit(_dump(out), args.out)


def cmd_fmeasure(args) -> None:
    l = _open(args.curve, args.open_at)
    res = f_measure(l, config=_config(args), at=args.at)
    _emit(_dump({"curve": l.label, "config": _config(args).provenance(), **res.to_json()}), args.out)


def cmd_fgradient(args) -> None:
    K = _closed(args.curve)
    if args.vector is not None:
        v = np.loadtxt(args.vector, dtype=float).reshape(-1)
    else:
        rng = np.random.default_rng(_config(args).seed_for("fgradient/vector"))
        V = rng.normal(size=(K.n_vertices, 3))
        v = (V / np.linalg.norm(V, axis=1).max()).reshape(-1)
    res = f_gradient(K, args.open_at, v, eps=args.eps, config=_config(args))
    out = {"curve": K.label, "base": args.open_at, "config": _config(args).provenance(), **res.to_json()}
    _emit(_dump(out), args.out)


def cmd_compare(args) -> None:
    a = Spectrum.loads(Path(args.a).read_text())
    b = Spectrum.loads(Path(args.b).read_text())
    if args.view == "pkspec":
        a, b = a.pkspec(), b.pkspec()
    _emit(compare(a, b).dumps(), args.out)


def cmd_neighborhood_sample(args) -> None:
    K = _closed(args.curve)
    cfg = _config(args)
    h = args.h if args.h is not None else (args.h_frac or 0.05) * tube_radius(K)
    samples = sample_neighborhood(K, args.open_at, h, args.n, cfg.seed_for("neighborhood"))
    args.out_dir.mkdir(parents=True, exist_ok=True)
    index = []
    for i, s in enumerate(samples):
        name = f"{K.label or 'curve'}_x{args.open_at}_{i:04d}.txt"
        save_curve(s, args.out_dir / name, f"neighborhood sample {i} of {K.label} at vertex {args.open_at}, h={h!r}")
        index.append(name)
    _emit(_dump({"curve": K.label, "base": args.open_at, "h": h, "seed": cfg.seed, "files": index}), None)


def cmd_gen_curve(args) -> None:
    c = _curve(args.spec)
    if args.jitter:
        c = jittered(_base(c), args.jitter, args.seed)
    if args.open_at is not None:
        if isinstance(c, OpenCurve) or not c.closed:
            raise InputError("--open-at needs a closed curve")
        c = open_at(c, args.open_at)
    text = format_curve(c, f"generated from {args.spec}")
    _emit(text, args.out)


# ------------------------------------------------------------------ parser


def _common(p: argparse.ArgumentParser, run: bool = True) -> None:
    p.add_argument("--out", type=Path, help="write the result here instead of stdout")
    p.add_argument("--cap", type=int, default=24, help="bracket crossing cap (default 24)")
    p.add_argument("--budget", type=int, default=500, help="simplification move budget (default 500)")
    if run:
        p.add_argument("--seed", type=int, default=0, help="top-level seed (default 0)")
        p.add_argument("--workers", type=int, default=1, help="worker processes; never changes output")
        p.add_argument("--dirs", type=int, help="projection directions per curve (default 500)")
        p.add_argument("--scheme", choices=("uniform", "fibonacci"), help="direction scheme")
        p.add_argument("--degeneracy-tol", type=float, help="relative degeneracy tolerance (default 1e-9)")


class _Parser(argparse.ArgumentParser):
    """Usage errors become InputError so they share the JSON envelope and exit status 1."""

    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="knotspec", description="Knotoid spectra of open curves and knot neighborhoods.")
    ap.add_argument("--version", action="version", version=f"knotspec {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("spectrum-open", help="knotoid spectrum of an open curve")
    p.add_argument("--curve", required=True)
    p.add_argument("--open-at", type=int, help="base vertex when --curve is closed")
    p.add_argument("--view", choices=("kspec", "pkspec"), default="kspec")
    p.add_argument("--csv", type=Path, help="also write a CSV table")
    p.add_argument("--strict", action="store_true", help="fail on a second knot-type class")
    _common(p)
    p.set_defaults(func=cmd_spectrum_open)

    p = sub.add_parser("spectrum-knot", help="spectrum of a knot's open-curve neighborhood")
    p.add_argument("--curve", required=True)
    p.add_argument("--bases", default="all", help="'all' or comma list of base vertices")
    p.add_argument("--samples", type=int, help="neighborhood samples per base (default 50)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--h-frac", type=float, help="neighborhood radius as a fraction of the tube radius (default 0.05)")
    g.add_argument("--h", type=float, help="absolute neighborhood radius")
    p.add_argument("--view", choices=("kspec", "pkspec"), default="kspec")
    p.add_argument("--csv", type=Path)
    p.add_argument("--strict", action="store_true", help="fail on a foreign knot-type class")
    _common(p)
    p.set_defaults(func=cmd_spectrum_knot)

    p = sub.add_parser("jones", help="normalized Jones of a diagram code or a closed curve")
    p.add_argument("--code")
    p.add_argument("--curve")
    _common(p, run=False)
    p.set_defaults(func=cmd_jones)

    p = sub.add_parser("height", help="diagrammatic height and simplified height bound")
    p.add_argument("--code", required=True)
    _common(p, run=False)
    p.set_defaults(func=cmd_height)

    p = sub.add_parser("closure", help="over/under/virtual closure of a knotoid code")
    p.add_argument("--code", required=True)
    p.add_argument("--kind", choices=("under", "over", "virtual"), default="under")
    _common(p, run=False)
    p.set_defaults(func=cmd_closure)

    p = sub.add_parser("quadrisecants", help="all quadrisecant lines of a closed polygon")
    p.add_argument("--curve", required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--genericity", action="store_true", help="include the genericity diagnostics")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_quadrisecants)

    p = sub.add_parser("fmeasure", help="f-measure (average Jones) of an open curve")
    p.add_argument("--curve", required=True)
    p.add_argument("--open-at", type=int)
    p.add_argument("--at", type=complex, help="also evaluate at this value of A")
    _common(p)
    p.set_defaults(func=cmd_fmeasure)

    p = sub.add_parser("fgradient", help="directional derivative of the f-measure at a knot")
    p.add_argument("--curve", required=True)
    p.add_argument("--open-at", type=int, default=0)
    p.add_argument("--vector", type=Path, help="text file with 3n perturbation entries (default: seeded random)")
    p.add_argument("--eps", type=float, help="step size (default 1e-3 x diameter)")
    _common(p)
    p.set_defaults(func=cmd_fgradient)

    p = sub.add_parser("compare", help="compare two spectrum JSON files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--view", choices=("kspec", "pkspec"), default="kspec")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("neighborhood-sample", help="write random open curves from a knot's neighborhood")
    p.add_argument("--curve", required=True)
    p.add_argument("--open-at", type=int, default=0)
    p.add_argument("--n", type=int, default=10)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--h-frac", type=float)
    g.add_argument("--h", type=float)
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_neighborhood_sample, workers=1)

    p = sub.add_parser("gen-curve", help="write a generated or bundled curve as a coordinate file")
    p.add_argument("spec", help="bundled name, file, or kind:params (torus_knot:p=2,q=3,n=32)")
    p.add_argument("--jitter", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--open-at", type=int)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_gen_curve)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            args.func(args)
    except KnotspecError as exc:
        err = {"error": {"code": exc.code, "message": str(exc)}}
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        return exc.exit_status
    except OSError as exc:
        err = {"error": {"code": "io_error", "message": str(exc)}}
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
