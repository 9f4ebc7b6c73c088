"""Command-line front end.

Every subcommand evaluates one operation over a grid of inputs and writes a
table (CSV or JSON).  Grids are given either as comma lists (``0.1,0.5,2``)
or as ``start:stop:count`` linspaces.  A JSON config file with sections
``model``, ``numerics`` and ``output`` supplies defaults; flags override it.

Exit codes: 0 success, 1 verification failures (``verify`` only),
2 invalid arguments, 3 domain error, 4 convergence failure.  Errors print
one line ``error:<kind>:<message>`` on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from fractions import Fraction
from typing import Callable, Dict, List, Sequence

import numpy as np

from . import __version__
from .errors import ConvergenceError, DomainError
from .kernel_core import ModelParams, normalize_parity

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_USAGE, EXIT_DOMAIN, EXIT_CONVERGENCE = 0, 1, 2, 3, 4

NUMERIC_DEFAULTS = {
    "tol": 1e-12,
    "lam_cap": 60,
    "nmax": 200,
    "order": 24,
    "qmc_budget": 2**14,
    "contour_r": 1.0,
    "contour_W": 128.0,
    "circle_nodes": 32,
    "panel_nodes": 12,
    "oracle_m": 400,
    "workers": 1,
}
OUTPUT_DEFAULTS = {"format": "csv", "path": None, "precision": 15}


class UsageError(Exception):
    """Raised for malformed command-line input (exit code 2)."""


# ---------------------------------------------------------------------------
# argument helpers


def parse_grid(text) -> List[float]:
    """'a,b,c' or 'start:stop:count' -> list of floats (complex if any entry needs it)."""
    if text is None:
        return []
    if isinstance(text, (int, float, complex)):
        return [text]
    if isinstance(text, (list, tuple)):
        return [v for item in text for v in parse_grid(item)]
    text = str(text).strip()
    try:
        if ":" in text:
            a, b, n = text.split(":")
            n = int(n)
            if n < 1:
                raise UsageError(f"grid count must be positive in {text!r}")
            return [float(v) for v in np.linspace(float(a), float(b), n)]
        out = []
        for tok in text.split(","):
            tok = tok.strip()
            if not tok:
                continue
            try:
                out.append(float(tok))
            except ValueError:
                out.append(complex(tok.replace("i", "j")))
        return out
    except ValueError as exc:
        raise UsageError(f"cannot parse grid {text!r}: {exc}") from None


def _load_config(path):
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    unknown = set(cfg) - {"model", "numerics", "output"}
    if unknown:
        raise UsageError(f"unknown config sections {sorted(unknown)}")
    return cfg


def _settings(args):
    """Merge defaults, config file and flags into (params, numerics, output)."""
    cfg = _load_config(args.config)
    model = dict(cfg.get("model", {}))
    numerics = dict(NUMERIC_DEFAULTS)
    for k, v in cfg.get("numerics", {}).items():
        if k not in NUMERIC_DEFAULTS:
            raise UsageError(f"unknown numerics key {k!r}")
        numerics[k] = v
    output = dict(OUTPUT_DEFAULTS)
    for k, v in cfg.get("output", {}).items():
        if k not in OUTPUT_DEFAULTS:
            raise UsageError(f"unknown output key {k!r}")
        output[k] = v
    if args.g is not None:
        model["g"] = args.g
    if args.delta is not None:
        model["delta"] = args.delta
    for key in NUMERIC_DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            numerics[key] = val
    if args.format is not None:
        output["format"] = args.format
    if args.out is not None:
        output["path"] = args.out
    if args.precision is not None:
        output["precision"] = args.precision
    if output["format"] not in ("csv", "json"):
        raise UsageError("format must be csv or json")
    g = model.get("g", 0.7)
    delta = model.get("delta", 0.4)
    if numerics["tol"] <= 0:
        raise UsageError("tol must be positive")
    if numerics["workers"] < 1:
        raise UsageError("workers must be at least 1")
    params = ModelParams(float(g), float(delta))
    return params, numerics, output


def _scheme(numerics):
    from .numerics.quadrature import DEFAULT_SCHEME

    return replace(DEFAULT_SCHEME, order=int(numerics["order"]), qmc_points=int(numerics["qmc_budget"]))


def _contour(numerics):
    from .partition_zeta import HankelContour

    return HankelContour(r=float(numerics["contour_r"]), W=float(numerics["contour_W"]),
                         circle_nodes=int(numerics["circle_nodes"]), panel_nodes=int(numerics["panel_nodes"]))


def _parity(text, allow_full=True):
    par = normalize_parity(text)
    if par == "full" and not allow_full:
        raise UsageError("this command needs --parity plus or minus")
    return par


# ---------------------------------------------------------------------------
# evaluation fan-out


def _run_points(fn: Callable, points: Sequence, workers: int):
    """Evaluate ``fn`` at every point; results come back in input order."""
    if workers <= 1 or len(points) <= 1:
        return [fn(pt) for pt in points]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, points))


class _Task:
    """Picklable wrapper so grid points can go to worker processes."""

    def __init__(self, name, **kw):
        self.name = name
        self.kw = kw

    def __call__(self, point):
        return _TASKS[self.name](point, **self.kw)


def _kernel_task(point, p, tol, parity, scheme, rotated):
    from .heat_propagator import heat_kernel, heat_kernel_parity, propagator, propagator_parity

    x, y, t = point
    if parity == "full":
        km = propagator(x, y, t, p, tol, scheme) if rotated else heat_kernel(x, y, t, p, tol, scheme)
        ent = np.asarray(km.entries, dtype=complex)
        err = km.error_estimate
        return [ent[0, 0], ent[0, 1], ent[1, 0], ent[1, 1]], [err] * 4
    fn = propagator_parity if rotated else heat_kernel_parity
    val, err = fn(x, y, t, parity, p, tol, scheme, return_error=True)
    return [complex(val)], [err]


def _partition_task(beta, p, tol, parity, scheme):
    from .partition_zeta import partition_parity

    val, err = partition_parity(beta, parity, p, tol, scheme, return_error=True)
    return [val], [err]


def _zeta_task(point, p, parity, method, scheme, contour):
    from .partition_zeta import zeta_contour, zeta_mellin

    s, tau = point
    if method == "mellin":
        val, err = zeta_mellin(s, tau, p, None, parity, scheme, contour, return_error=True)
    else:
        val, err = zeta_contour(s, tau, p, contour, parity, scheme, tol=None, return_error=True)
    return [complex(val)], [err]


def _det_task(tau, p, parity, scheme, contour):
    from .partition_zeta import log_spectral_determinant

    logd, err = log_spectral_determinant(tau, p, parity, contour, scheme, return_error=True)
    logd = complex(logd)
    return [logd, complex(np.exp(logd))], [err, abs(np.exp(logd)) * err]


def _gfunc_task(x, p, parity, kind, tol, nmax):
    from . import gfunction as G

    if kind == "G":
        return [G.g_function(x, parity, p, tol, nmax)], [tol]
    return [G.complete_g(x, parity, p, tol, nmax)], [tol]


_TASKS = {
    "kernel": _kernel_task,
    "partition": _partition_task,
    "zeta": _zeta_task,
    "det": _det_task,
    "gfunc": _gfunc_task,
}


# ---------------------------------------------------------------------------
# output


def _fmt(v, precision):
    if isinstance(v, str):
        return v
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return "nan"
    return f"{float(v):.{precision}g}"


def _jsonable(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        return {"re": v.real, "im": v.imag}
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


class Table:
    """Rows of input coordinates, complex outputs split into re/im, then error estimates."""

    def __init__(self, inputs: Sequence[str], outputs: Sequence[str], complex_out: bool = True):
        self.inputs = list(inputs)
        self.outputs = list(outputs)
        self.complex_out = complex_out
        self.rows: List[tuple] = []

    def add(self, coords, values, errors):
        self.rows.append((list(coords), list(values), list(errors)))

    def header(self):
        cols = list(self.inputs)
        for name in self.outputs:
            cols += [f"{name}_re", f"{name}_im"] if self.complex_out else [name]
        cols += [f"{name}_err" for name in self.outputs]
        return cols

    def csv_text(self, precision):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header())
        for coords, values, errors in self.rows:
            cells = [_fmt(c, precision) for c in coords]
            for v in values:
                if self.complex_out:
                    v = complex(v)
                    cells += [_fmt(v.real, precision), _fmt(v.imag, precision)]
                else:
                    cells.append(_fmt(v, precision) if not isinstance(v, str) else v)
            cells += [_fmt(e, precision) for e in errors]
            w.writerow(cells)
        return buf.getvalue()

    def records(self):
        out, errs = [], []
        for coords, values, errors in self.rows:
            rec = dict(zip(self.inputs, (_jsonable(c) for c in coords)))
            rec.update({k: _jsonable(v) for k, v in zip(self.outputs, values)})
            out.append(rec)
            errs.append(dict(zip(self.outputs, (_jsonable(e) for e in errors))))
        return out, errs


def _emit(args, command, params, numerics, output, table: Table, started: float, extra=None):
    results, errors = table.records()
    envelope = {
        "command": command,
        "params": {"g": params.g, "delta": params.delta, **(extra or {})},
        "numerics": numerics,
        "results": results,
        "error_estimates": errors,
        "runtime_ms": None if args.deterministic else round(1000 * (time.perf_counter() - started), 3),
        "version": __version__,
    }
    if output["format"] == "json":
        text = json.dumps(envelope, indent=2, sort_keys=True) + "\n"
    else:
        text = table.csv_text(int(output["precision"]))
    path = output["path"]
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        if output["format"] == "csv":
            with open(path + ".meta.json", "w", encoding="utf-8") as fh:
                meta = dict(envelope)
                meta.pop("results")
                meta.pop("error_estimates")
                json.dump(meta, fh, indent=2, sort_keys=True)
                fh.write("\n")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_kernel(args, rotated=False):
    p, numerics, output = _settings(args)
    par = _parity(args.parity)
    times = parse_grid(args.t)
    xs, ys = parse_grid(args.x), parse_grid(args.y)
    if not (times and xs and ys):
        raise UsageError("need --t, --x and --y")
    points = [(x, y, t) for t in times for x in xs for y in ys]
    task = _Task("kernel", p=p, tol=numerics["tol"], parity=par, scheme=_scheme(numerics), rotated=rotated)
    res = _run_points(task, points, numerics["workers"])
    outs = ["k_uu", "k_ud", "k_du", "k_dd"] if par == "full" else [f"k_{'plus' if par == '+' else 'minus'}"]
    table = Table(["x", "y", "t"], outs)
    for pt, (vals, errs) in zip(points, res):
        table.add(pt, vals, errs)
    return table, {"parity": par}


def cmd_propagator(args):
    return cmd_kernel(args, rotated=True)


def cmd_evolve(args):
    from .heat_propagator import evolve_state

    p, numerics, output = _settings(args)
    par = _parity(args.parity)
    times = parse_grid(args.t)
    if not times:
        raise UsageError("need --t")

    def packet(y):
        amp = np.exp(-((y - args.x0) ** 2) / (2 * args.sigma**2) + 1j * args.p0 * y)
        return amp if par != "full" else np.stack([amp, np.zeros_like(amp)])

    table = Table(["t"], ["norm", "norm_drift"], complex_out=False)
    for t in times:
        st = evolve_state(packet, t, p, args.L, args.n, par, numerics["tol"], drift_threshold=None)
        table.add([t], [st.norm, st.norm_drift], [st.norm_drift, st.norm_drift])
    return table, {"parity": par, "L": args.L, "n": args.n, "x0": args.x0, "p0": args.p0, "sigma": args.sigma}


def cmd_partition(args):
    p, numerics, output = _settings(args)
    par = _parity(args.parity)
    betas = parse_grid(args.beta)
    if not betas:
        raise UsageError("need --beta")
    task = _Task("partition", p=p, tol=numerics["tol"], parity=par, scheme=_scheme(numerics))
    res = _run_points(task, betas, numerics["workers"])
    table = Table(["beta"], ["Z"], complex_out=False)
    for b, (vals, errs) in zip(betas, res):
        table.add([b], vals, errs)
    return table, {"parity": par}


def cmd_zeta(args):
    p, numerics, output = _settings(args)
    par = _parity(args.parity)
    ss, taus = parse_grid(args.s), parse_grid(args.tau)
    if not (ss and taus):
        raise UsageError("need --s and --tau")
    points = [(s, tau) for tau in taus for s in ss]
    task = _Task("zeta", p=p, parity=par, method=args.method, scheme=_scheme(numerics), contour=_contour(numerics))
    res = _run_points(task, points, numerics["workers"])
    table = Table(["s", "tau"], ["zeta"])
    for (s, tau), (vals, errs) in zip(points, res):
        table.add([str(s) if isinstance(s, complex) else s, tau], vals, errs)
    return table, {"parity": par, "method": args.method}


def cmd_det(args):
    p, numerics, output = _settings(args)
    par = _parity(args.parity)
    taus = parse_grid(args.tau)
    if not taus:
        raise UsageError("need --tau")
    task = _Task("det", p=p, parity=par, scheme=_scheme(numerics), contour=_contour(numerics))
    res = _run_points(task, taus, numerics["workers"])
    table = Table(["tau"], ["log_det", "det"])
    for tau, (vals, errs) in zip(taus, res):
        table.add([tau], vals, errs)
    return table, {"parity": par}


def cmd_rb(args):
    from .partition_zeta import rb_polynomial

    p, numerics, output = _settings(args)
    par = _parity(args.parity)
    if args.k < 0:
        raise UsageError("--k must be nonnegative")
    rb = rb_polynomial(args.k, par, kmax=max(args.kmax, args.k) if args.kmax else 10)
    table = Table(["tau_pow", "g2_pow", "D_pow"], ["coefficient"], complex_out=False)
    for e, c in rb.poly.terms.items():
        table.add(list(e), [f"{c.numerator}/{c.denominator}"], [0])
    extra = {"k": args.k, "parity": par, "ring": rb.poly.ring,
             "D_means": "Delta^2" if rb.poly.ring == "full" else "Delta", "polynomial": str(rb),
             "value_at_params": None}
    if args.tau is not None:
        extra["value_at_params"] = float(rb(args.tau, p.g, p.delta))
        extra["tau"] = args.tau
    return table, extra


def cmd_gfunc(args):
    from . import gfunction as G

    p, numerics, output = _settings(args)
    par = _parity(args.parity, allow_full=False)
    if args.kind in ("G", "complete"):
        xs = parse_grid(args.x)
        if not xs:
            raise UsageError("need --x")
        task = _Task("gfunc", p=p, parity=par, kind=args.kind, tol=1e-16, nmax=int(numerics["nmax"]))
        res = _run_points(task, xs, numerics["workers"])
        table = Table(["x"], [args.kind], complex_out=False)
        for x, (vals, errs) in zip(xs, res):
            table.add([x], vals, errs)
        return table, {"parity": par, "kind": args.kind}
    if args.N is None:
        raise UsageError(f"--kind {args.kind} needs --N")
    fn = {"exceptional": lambda N: G.g_exceptional(N, par, p),
          "residue": lambda N: G.residue_at(N, par, p),
          "constraint": lambda N: G.constraint_K(N, p)}[args.kind]
    table = Table(["N"], [args.kind], complex_out=False)
    for N in args.N:
        table.add([N], [fn(N)], [float("nan")])
    return table, {"parity": par, "kind": args.kind}


def cmd_eigs(args):
    from .gfunction import find_eigenvalues

    p, numerics, output = _settings(args)
    par = _parity(args.parity, allow_full=False)
    lo, hi = args.window
    recs = find_eigenvalues(par, (lo + p.g**2, hi + p.g**2), p, grid_step=args.step)
    oracle = None
    if args.compare_oracle:
        from .fock_oracle import parity_matrix, spectrum

        oracle = spectrum(parity_matrix(int(numerics["oracle_m"]), par, p)).values
    table = Table(["index", "classification"], ["lambda"] + (["oracle"] if oracle is not None else []),
                  complex_out=False)
    for i, r in enumerate(recs):
        vals = [r.value]
        errs = [r.residual]
        if oracle is not None:
            j = int(np.argmin(np.abs(oracle - r.value)))
            vals.append(float(oracle[j]))
            errs.append(abs(float(oracle[j]) - r.value))
        table.add([i, r.classification], vals, errs)
    return table, {"parity": par, "window": [lo, hi]}


def cmd_verify(args):
    from .verify import CRITERIA, format_results, run_suite

    if args.suite == "all":
        ids = list(CRITERIA)
    else:
        ids = [c.strip() for c in args.suite.split(",") if c.strip()]
        bad = [c for c in ids if c not in CRITERIA]
        if bad:
            raise UsageError(f"unknown criteria {bad}; choose from {sorted(CRITERIA)}")
    results = run_suite(ids, stream=sys.stdout)
    sys.stdout.write(format_results(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY_FAILED


# ---------------------------------------------------------------------------
# parser


def _common(parser: argparse.ArgumentParser):
    parser.add_argument("--g", type=float, help="coupling g (default 0.7)")
    parser.add_argument("--delta", type=float, help="level splitting Delta (default 0.4)")
    parser.add_argument("--tol", type=float, help="series tolerance")
    parser.add_argument("--order", type=int, help="Gauss order per simplex axis")
    parser.add_argument("--qmc-budget", dest="qmc_budget", type=int, help="QMC points for high simplex dimensions")
    parser.add_argument("--nmax", type=int, help="G-series cap")
    parser.add_argument("--contour-r", dest="contour_r", type=float, help="Hankel circle radius (< pi)")
    parser.add_argument("--contour-W", dest="contour_W", type=float, help="ray truncation")
    parser.add_argument("--circle-nodes", dest="circle_nodes", type=int)
    parser.add_argument("--panel-nodes", dest="panel_nodes", type=int)
    parser.add_argument("--oracle-m", dest="oracle_m", type=int, help="Fock truncation for oracle comparisons")
    parser.add_argument("--workers", type=int, help="processes for grid evaluation (default 1)")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--out", help="write output here instead of stdout")
    parser.add_argument("--precision", type=int, help="significant digits in CSV")
    parser.add_argument("--config", help="JSON config file with model/numerics/output sections")
    parser.add_argument("--deterministic", action="store_true",
                        help="omit the runtime from the JSON envelope so reruns are byte-identical")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qrabi", description="Quantum Rabi model: kernels, partition functions, "
                                 "spectral zeta, determinants, Rabi-Bernoulli polynomials and G-functions.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    par_help = "plus, minus or full"

    for name, helptext in (("kernel", "heat kernel K(x, y, t)"), ("propagator", "propagator U(x, y, t)")):
        sp = sub.add_parser(name, help=helptext)
        _common(sp)
        sp.add_argument("--t", required=True, help="time grid")
        sp.add_argument("--x", required=True, help="x grid")
        sp.add_argument("--y", required=True, help="y grid")
        sp.add_argument("--parity", default="full", help=par_help)

    sp = sub.add_parser("evolve", help="evolve a Gaussian wavepacket and report its norm")
    _common(sp)
    sp.add_argument("--t", required=True)
    sp.add_argument("--parity", default="full", help=par_help)
    sp.add_argument("--L", type=float, default=10.0)
    sp.add_argument("--n", type=int, default=801)
    sp.add_argument("--x0", type=float, default=0.5)
    sp.add_argument("--p0", type=float, default=0.0)
    sp.add_argument("--sigma", type=float, default=1.0)

    sp = sub.add_parser("partition", help="partition function Z(beta)")
    _common(sp)
    sp.add_argument("--beta", required=True)
    sp.add_argument("--parity", default="full", help=par_help)

    sp = sub.add_parser("zeta", help="spectral zeta function")
    _common(sp)
    sp.add_argument("--s", required=True, help="s grid (complex entries like 2+1j allowed)")
    sp.add_argument("--tau", required=True)
    sp.add_argument("--method", choices=("contour", "mellin"), default="contour")
    sp.add_argument("--parity", default="full", help=par_help)

    sp = sub.add_parser("det", help="zeta-regularized determinant prod (lambda_j + tau)")
    _common(sp)
    sp.add_argument("--tau", required=True)
    sp.add_argument("--parity", default="full", help=par_help)

    sp = sub.add_parser("rb", help="exact Rabi-Bernoulli polynomial")
    _common(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--kmax", type=int, default=None, help="truncation order of the expansion")
    sp.add_argument("--tau", type=float, help="also evaluate at this tau and the model parameters")
    sp.add_argument("--parity", default="full", help=par_help)

    sp = sub.add_parser("gfunc", help="G-functions, residues and constraint values")
    _common(sp)
    sp.add_argument("--kind", choices=("G", "complete", "exceptional", "residue", "constraint"), default="complete")
    sp.add_argument("--x", help="x grid (kinds G and complete)")
    sp.add_argument("--N", type=int, nargs="+", help="levels (kinds exceptional, residue, constraint)")
    sp.add_argument("--parity", default="plus", help="plus or minus")

    sp = sub.add_parser("eigs", help="eigenvalues from zeros of the complete G-function")
    _common(sp)
    sp.add_argument("--parity", default="plus", help="plus or minus")
    sp.add_argument("--window", type=float, nargs=2, default=(-2.0, 10.0), metavar=("LO", "HI"),
                    help="eigenvalue window")
    sp.add_argument("--step", type=float, default=0.01, help="scan step in x")
    sp.add_argument("--compare-oracle", action="store_true", help="pair each eigenvalue with the Fock oracle")

    sp = sub.add_parser("verify", help="run the acceptance criteria and print a PASS/FAIL table")
    sp.add_argument("--suite", default="all", help="'all' or a comma list of criterion ids")
    return ap


COMMANDS: Dict[str, Callable] = {
    "kernel": cmd_kernel,
    "propagator": cmd_propagator,
    "evolve": cmd_evolve,
    "partition": cmd_partition,
    "zeta": cmd_zeta,
    "det": cmd_det,
    "rb": cmd_rb,
    "gfunc": cmd_gfunc,
    "eigs": cmd_eigs,
}


def _fail(kind: str, msg: str, code: int) -> int:
    sys.stderr.write(f"error:{kind}:{' '.join(str(msg).split())}\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed its message
        return EXIT_USAGE if exc.code else EXIT_OK
    started = time.perf_counter()
    try:
        if args.command == "verify":
            return cmd_verify(args)
        table, extra = COMMANDS[args.command](args)
        params, numerics, output = _settings(args)
        _emit(args, args.command, params, numerics, output, table, started, extra)
        return EXIT_OK
    except UsageError as exc:
        return _fail("usage", exc, EXIT_USAGE)
    except DomainError as exc:
        return _fail("domain", exc, EXIT_DOMAIN)
    except ConvergenceError as exc:
        return _fail("convergence", exc, EXIT_CONVERGENCE)


if __name__ == "__main__":
    sys.exit(main())
