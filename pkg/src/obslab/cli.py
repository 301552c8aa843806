"""Command-line front end.

Every command reads and writes flat files so outputs can be piped into
other commands.  Exit codes: 0 success, 1 invalid input, 2 numerical
failure; failures also print a JSON error object on stderr.
"""

import argparse
from concurrent.futures import ThreadPoolExecutor
import json
import os
import sys

import numpy as np

from . import phase_statistics as stats
from .errors import InvalidInput, NumericalFailure, PhaseMatrixError
from .extremality import certify, convex_split, find_witness
from .fock_core import coherent_tail, suggested_truncation
from .phase_observable import (
    RANK_TOL,
    canonical,
    find_violations,
    kolmogorov_decompose,
    random_phase_matrix,
    validate,
)
from .phase_space import DiagonalState, et_phase_matrix
from .quadrature import (
    MomentumGrid,
    ProbabilityMeasureSpec,
    convolution_kernel,
    covariance_check,
    invariance_check,
    quadrature_extremality,
    sharp_kernel,
)
from .serialization import (
    certificate_to_dict,
    dumps,
    family_to_dict,
    kernel_from_dict,
    kernel_to_dict,
    load_matrix,
    matrix_to_csv,
    matrix_to_dict,
    read_json,
    save_matrix,
)

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2


def _threads():
    raw = os.environ.get("OBSLAB_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise InvalidInput(f"OBSLAB_THREADS must be an integer, got {raw!r}") from None
    return max(n, 1)


def _emit(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _emit_json(obj, out=None):
    _emit(dumps(obj) + "\n", out)


def _phase_matrix(path, tol=None):
    return validate(load_matrix(path), tol)


def cmd_validate(args):
    C = load_matrix(args.matrix)
    found = find_violations(C, args.herm_tol)
    if found:
        _emit_json({"valid": False, "verdict": "invalid", "violations": [v.as_dict() for v in found]})
        raise PhaseMatrixError(found)
    r = kolmogorov_decompose(validate(C, args.herm_tol), args.tol).r
    _emit_json({"valid": True, "verdict": f"valid, rank {r}", "d": int(C.shape[0]), "rank": r})


def cmd_decompose(args):
    C = _phase_matrix(args.matrix)
    fam = kolmogorov_decompose(C, args.tol)
    _emit_json(family_to_dict(fam, C.C), args.output)


def cmd_rank(args):
    fam = kolmogorov_decompose(_phase_matrix(args.matrix), args.tol)
    _emit_json({"d": fam.d, "rank": fam.r, "tol": fam.tol})


def cmd_extreme(args):
    C = _phase_matrix(args.matrix)
    _emit_json(certificate_to_dict(certify(C, args.tol)), args.output)


def cmd_split(args):
    C = _phase_matrix(args.matrix)
    fam = kolmogorov_decompose(C, args.tol)
    if args.witness:
        w = read_json(args.witness)
        w = w.get("witness", w)
        A = np.asarray(w["re"], dtype=float) + 1j * np.asarray(w["im"], dtype=float)
    else:
        A = find_witness(fam, args.tol)
        if A is None:
            raise InvalidInput("matrix is extreme in the truncated model; no split exists")
    plus, minus, eps = convex_split(C, fam, A, args.epsilon)
    if args.plus:
        save_matrix(args.plus, plus.C)
    if args.minus:
        save_matrix(args.minus, minus.C)
    _emit_json({
        "epsilon": eps,
        "weight": 0.5,
        "average_error": float(np.max(np.abs((plus.C + minus.C) / 2 - C.C))),
        "plus": matrix_to_dict(plus.C),
        "minus": matrix_to_dict(minus.C),
    }, args.output)


def cmd_density(args):
    z = complex(args.z_re, args.z_im)
    if args.matrix:
        C = _phase_matrix(args.matrix)
    else:
        C = canonical(args.d or suggested_truncation(z))
    dens = stats.phase_density(C, z, args.grid)
    header = {"z_re": z.real, "z_im": z.imag, "d": C.d, "grid": args.grid,
              "tail_bound": dens.tail_bound, "mass": dens.mass()}
    lines = ["# " + json.dumps(header, separators=(",", ":")), "theta,g"]
    lines += [f"{t:.17g},{g:.17g}" for t, g in zip(dens.theta, dens.values)]
    _emit("\n".join(lines) + "\n", args.output)


def cmd_et(args):
    raw = args.weights
    weights = read_json(raw) if os.path.exists(raw) else json.loads(raw)
    C = et_phase_matrix(DiagonalState(tuple(weights)), args.d, args.cutoff, args.nodes)
    if args.output and args.output.endswith(".csv"):
        _emit(matrix_to_csv(C.C), args.output)
    else:
        _emit_json(matrix_to_dict(C.C), args.output)


def _load_kernel(path):
    return kernel_from_dict(read_json(path))


def cmd_quad_kernel(args):
    grid = MomentumGrid(args.p0, args.h, args.n) if args.p0 is not None else MomentumGrid.centered(args.n, args.h)
    if args.family == "sharp":
        phases = json.loads(args.phases) if args.phases else None
        kernel = sharp_kernel(grid, args.theta, phases)
    else:
        params = {
            "point": {"at": args.at},
            "gaussian": {"mean": args.mean, "sigma": args.sigma},
            "uniform": {"a": args.a, "b": args.b},
        }[args.family]
        kernel = convolution_kernel(ProbabilityMeasureSpec(args.family, params), grid, args.theta)
    _emit_json(kernel_to_dict(kernel), args.output)


def cmd_quad_cov(args):
    dev = covariance_check(_load_kernel(args.kernel), args.a, args.b, args.q)
    _emit_json({"a": args.a, "b": args.b, "q": args.q, "max_deviation": dev, "ok": dev < 1e-12})


def cmd_quad_inv(args):
    _emit_json({"invariant": invariance_check(_load_kernel(args.kernel))})


def cmd_quad_extreme(args):
    cert = quadrature_extremality(_load_kernel(args.kernel), args.tol)
    _emit_json(certificate_to_dict(cert), args.output)


def build_report(uncertainty_amplitudes=(3, 5, 7), width_amplitudes=(1, 2, 4, 8),
                 peak_amplitudes=(0.5, 1, 2), samples=100, seed=0, grid=stats.DEFAULT_GRID,
                 threads=1):
    """Canonical-phase property table as a plain dict."""
    rng = np.random.default_rng(seed)

    def uncertainty_row(a):
        rep = stats.uncertainty_product(a, grid=grid)
        dens = stats.phase_density(canonical(rep.d), a, grid)
        partial = 1.0 - coherent_tail(a, rep.d)
        return {"amplitude": a, "d": rep.d, "phase_deviation": rep.phase_deviation,
                "number_deviation": rep.number_deviation, "product": rep.product,
                "normalization_error": abs(dens.mass() - partial)}

    with ThreadPoolExecutor(max_workers=threads) as pool:
        rows = list(pool.map(uncertainty_row, uncertainty_amplitudes))
        widths = list(pool.map(lambda a: stats.delta_limit_widths([a], grid=grid)[0], width_amplitudes))

    worst, failures = -np.inf, 0
    for _ in range(samples):
        d = int(rng.integers(1, 17))
        C = random_phase_matrix(d, int(rng.integers(1, d + 1)), rng)
        for a in peak_amplitudes:
            g, g_can, ok = stats.peak_dominance(C, a)
            worst = max(worst, g - g_can)
            failures += not ok
    products = [r["product"] for r in rows]
    return {
        "peak_dominance": {"samples": samples, "amplitudes": list(peak_amplitudes),
                           "failures": failures, "max_excess": worst},
        "uncertainty": rows,
        "uncertainty_decreasing": bool(np.all(np.diff(products) < 0)),
        "delta_widths": [{"amplitude": a, "fwhm": w} for a, w in zip(width_amplitudes, widths)],
        "widths_decreasing": bool(np.all(np.diff(widths) < 0)),
        "max_normalization_error": max(r["normalization_error"] for r in rows),
    }


def cmd_report(args):
    report = build_report(seed=args.seed, samples=args.samples, grid=args.grid, threads=_threads())
    _emit_json(report, args.output)


def _floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


def build_parser():
    p = argparse.ArgumentParser(prog="obslab", description="Covariant phase and quadrature observables at finite truncation.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_, matrix=True, output=True, tol=True):
        sp = sub.add_parser(name, help=help_)
        if matrix:
            sp.add_argument("matrix", help="phase matrix file (.json or .csv)")
        if output:
            sp.add_argument("-o", "--output", help="output file (default stdout)")
        if tol:
            sp.add_argument("--tol", type=float, default=RANK_TOL, help="relative rank tolerance (default %(default)g)")
        sp.set_defaults(func=func)
        return sp

    v = add("validate", cmd_validate, "check phase-matrix invariants", output=False)
    v.add_argument("--herm-tol", type=float, default=None, help="Hermitian/diagonal tolerance (default 1e-12)")
    add("decompose", cmd_decompose, "minimal Kolmogorov decomposition")
    add("rank", cmd_rank, "rank of the phase matrix", output=False)
    add("extreme", cmd_extreme, "extremality certificate")
    s = add("split", cmd_split, "explicit convex split of a non-extreme matrix")
    s.add_argument("--witness", help="certificate or witness JSON; found automatically if omitted")
    s.add_argument("--epsilon", type=float, default=None, help="split size (default 1/(2||A||))")
    s.add_argument("--plus", help="write C+ to this file")
    s.add_argument("--minus", help="write C- to this file")

    dn = add("density", cmd_density, "coherent-state phase density as CSV", matrix=False, tol=False)
    dn.add_argument("--matrix", help="phase matrix file (default: canonical phase)")
    dn.add_argument("--z-re", type=float, required=True)
    dn.add_argument("--z-im", type=float, default=0.0)
    dn.add_argument("--d", type=int, default=None, help="truncation for the canonical default (default ceil(|z|^2+10|z|+20))")
    dn.add_argument("--grid", type=int, default=stats.DEFAULT_GRID, help="number of theta points (default %(default)s)")

    et = add("et", cmd_et, "phase matrix of a phase-space observable E_T", matrix=False, tol=False)
    et.add_argument("--weights", required=True, help="JSON list of diagonal weights, or a file holding one")
    et.add_argument("--d", type=int, required=True)
    et.add_argument("--cutoff", type=float, default=None, help="radial cutoff (default sqrt(2(d+k))+6)")
    et.add_argument("--nodes", type=int, default=None, help="Gauss-Legendre nodes (default 4(d+k))")

    q = sub.add_parser("quad", help="fuzzy rotated quadrature kernels")
    qs = q.add_subparsers(dest="quad_command", required=True)
    k = qs.add_parser("kernel", help="build a kernel")
    k.add_argument("--family", choices=["sharp", "point", "gaussian", "uniform"], default="sharp")
    k.add_argument("--n", type=int, default=8)
    k.add_argument("--h", type=float, default=1.0)
    k.add_argument("--p0", type=float, default=None, help="first grid point (default: grid centred on 0)")
    k.add_argument("--theta", type=float, default=0.0)
    k.add_argument("--phases", help="JSON list of phases for a rank-1 sharp kernel")
    k.add_argument("--at", type=float, default=0.0)
    k.add_argument("--mean", type=float, default=0.0)
    k.add_argument("--sigma", type=float, default=1.0)
    k.add_argument("--a", type=float, default=-1.0)
    k.add_argument("--b", type=float, default=1.0)
    k.add_argument("-o", "--output")
    k.set_defaults(func=cmd_quad_kernel)
    c = qs.add_parser("check-cov", help="covariance under momentum translations")
    c.add_argument("kernel")
    c.add_argument("--a", type=float, required=True)
    c.add_argument("--b", type=float, required=True)
    c.add_argument("--q", type=float, required=True)
    c.set_defaults(func=cmd_quad_cov)
    i = qs.add_parser("check-inv", help="invariance (Toeplitz) check")
    i.add_argument("kernel")
    i.set_defaults(func=cmd_quad_inv)
    e = qs.add_parser("extreme", help="extremality certificate of a kernel")
    e.add_argument("kernel")
    e.add_argument("--tol", type=float, default=RANK_TOL)
    e.add_argument("-o", "--output")
    e.set_defaults(func=cmd_quad_extreme)

    r = add("report", cmd_report, "canonical-phase property suite", matrix=False, tol=False)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--samples", type=int, default=100)
    r.add_argument("--grid", type=int, default=stats.DEFAULT_GRID)
    return p


def _fail(exc, code):
    err = {"error": getattr(exc, "code", type(exc).__name__), "message": str(exc)}
    if isinstance(exc, PhaseMatrixError):
        err["violations"] = [v.as_dict() for v in exc.violations]
    sys.stderr.write(json.dumps(err) + "\n")
    return code


def run(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except InvalidInput as exc:
        return _fail(exc, EXIT_INPUT)
    except NumericalFailure as exc:
        return _fail(exc, EXIT_NUMERIC)
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
