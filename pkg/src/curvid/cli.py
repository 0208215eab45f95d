"""Command-line front end: ``curvid {verify,invariants,gauss-bonnet,harmonic,jet}``.

Exit codes: 0 every check passed, 1 a check failed, 2 usage or capability error.
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, coefficients, harmonic, identities, jets, models, pfaffian
from .invariants import einstein_residual, scalar_invariants, two_tensor_invariants, isotropy_residual
from .report import DiagnosticsReport, RunConfig, THREADS_ENV
from .tensor_core import TensorError, curvature_symmetry_residuals, load_tensor

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

IDENTITY_DEFAULTS = {
    "dim6": (6, 1e-10),
    "dim5-scalar": (5, 1e-10),
    "dim5": (5, 1e-10),
    "einstein4": (4, 1e-9),
    "einstein5": (5, 1e-9),
    "einstein6": (6, 1e-9),
    "kernel7": (7, 1e-8),
}


class UsageError(Exception):
    pass


def _parse_params(pairs: list[str] | None) -> dict[str, float]:
    out = {}
    for item in pairs or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError(f"--param expects key=value, got {item!r}")
        try:
            out[key.strip()] = float(value)
        except ValueError as exc:
            raise UsageError(f"--param {key}: not a number: {value!r}") from exc
    return out


def _config(args) -> RunConfig:
    try:
        return RunConfig(
            tolerance=args.tolerance,
            samples=getattr(args, "samples", 1),
            seed=args.seed,
            threads=args.threads,
            output=args.output,
            format=args.format,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _resolve_space(args):
    """(label, R, spec or None) from --space/--param or --input."""
    if args.input:
        try:
            R = load_tensor(args.input, project=args.project)
        except (OSError, TensorError) as exc:
            raise UsageError(str(exc)) from exc
        if R.ndim != 4:
            raise UsageError(f"{args.input}: expected a rank-4 curvature tensor, got rank {R.ndim}")
        return args.input, R, None
    if not args.space:
        raise UsageError("give --space NAME or --input FILE")
    try:
        spec = models.lookup_space(args.space, _parse_params(args.param))
        R = spec.curvature()
    except (KeyError, TensorError, ValueError) as exc:
        raise UsageError(f"space {args.space!r}: {exc}") from exc
    return args.space, R, spec


def _map_ordered(fn, items, threads: int):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# -- verify -----------------------------------------------------------------------------------


def _sample_tensor(identity: str, dim: int, seed: int, terms: int | None) -> np.ndarray:
    k = terms if terms is not None else 1 + seed % 5
    R = models.random_act(dim, seed, k)
    if identity.startswith("einstein"):
        R = models.make_einstein(R)
    return R


def cmd_verify(args, config: RunConfig, report: DiagnosticsReport) -> None:
    identity = args.identity
    default_dim, default_tol = IDENTITY_DEFAULTS[identity]
    dim = args.dim or default_dim
    if identity in ("dim5", "dim5-scalar") and dim not in (4, 5):
        raise UsageError(f"{identity} holds in dimension 4 or 5")
    if args.dim and identity not in ("dim5", "dim5-scalar") and args.dim != default_dim:
        raise UsageError(f"{identity} is fixed to dimension {default_dim}")
    tol = config.tolerance_or(default_tol)
    seeds = [config.seed + k for k in range(config.samples)]
    report.info["identity"] = identity
    report.info["dimension"] = dim

    if identity == "kernel7":
        if args.corrupt_term is not None:
            raise UsageError("--corrupt-term applies to coefficient tables, not kernel7")
        if config.samples < 2:
            raise UsageError("kernel7 needs --samples >= 2")
        samples = [_sample_tensor(identity, 7, s, args.terms) for s in seeds]
        fit = identities.kernel_coefficient_7d(samples)
        report.info["lambda"] = fit["lambda"]
        report.check("kernel7.scatter", fit["scatter"], tol, fit["scatter"] <= tol)
        return

    table_name = identity
    rows = coefficients.TABLES[table_name]
    scale = None
    if args.corrupt_term is not None:
        if not 0 <= args.corrupt_term < len(rows):
            raise UsageError(f"--corrupt-term must be in 0..{len(rows) - 1}")
        scale = {args.corrupt_term: 1.01}
        report.info["corrupted_term"] = rows[args.corrupt_term][0]

    def run(seed):
        R = args.tensor if args.tensor is not None else _sample_tensor(identity, dim, seed, args.terms)
        if identity.startswith("einstein"):
            dev = einstein_residual(R)
            if dev > identities.EINSTEIN_TOLERANCE:
                raise UsageError(f"input is not Einstein (Ricci deviation {dev:.3e})")
        return identities.evaluate_table(table_name, R, scale=scale)

    results = _map_ordered(run, seeds if args.tensor is None else [config.seed], config.resolved_threads())
    worst = 0.0
    for seed, res in zip(seeds, results):
        err = res.relative_error
        worst = max(worst, err)
        report.check(f"{identity}[seed={seed}]", err, tol, err <= tol, term_mass=res.term_mass)
    report.info["worst_relative_error"] = worst


# -- invariants ----------------------------------------------------------------------------------


def cmd_invariants(args, config: RunConfig, report: DiagnosticsReport) -> None:
    label, R, spec = _resolve_space(args)
    tol = config.tolerance_or(1e-10)
    report.info["space"] = label
    report.info["dimension"] = R.shape[0]
    if spec is not None:
        report.info["model"] = spec.to_document()
    for key, value in scalar_invariants(R).as_dict().items():
        report.info[f"scalar.{key}"] = value
    for key, value in two_tensor_invariants(R).as_dict().items():
        report.info[f"two_tensor.{key}.trace"] = float(np.trace(value))
        report.info[f"two_tensor.{key}.anisotropy"] = isotropy_residual(value)
    report.info["einstein_residual"] = einstein_residual(R)
    report.info["super_einstein_residual"] = harmonic.super_einstein_residual(R)
    for name, value in curvature_symmetry_residuals(R).items():
        report.check(f"symmetry.{name}", value, tol, value <= tol)


# -- gauss-bonnet ---------------------------------------------------------------------------------


def cmd_gauss_bonnet(args, config: RunConfig, report: DiagnosticsReport) -> None:
    label, R, spec = _resolve_space(args)
    m = R.shape[0]
    volume = args.volume if args.volume is not None else (spec.volume if spec else None)
    if volume is None:
        raise UsageError(f"{label}: no registered volume (pass --volume)")
    if m % 2 or m not in (2, 4, 6):
        raise UsageError(f"{label}: Euler characteristic supported in dimension 2, 4, 6 (got {m})")
    tol = config.tolerance_or(1e-7)
    E = pfaffian.euler_form(R, m, backend=args.backend)
    chi = pfaffian.euler_characteristic_homogeneous(R, volume, backend=args.backend)
    report.info["space"] = label
    report.info["dimension"] = m
    report.info["volume"] = volume
    report.info["E_mm"] = E
    if m == 6:
        report.info["bracket"] = pfaffian.gauss_bonnet_bracket(R)
    report.info["chi"] = chi
    expected = args.expect if args.expect is not None else (spec.euler_characteristic if spec else None)
    if expected is None:
        report.check("chi.integral", chi, tol, abs(chi - round(chi)) <= tol)
    else:
        report.check("chi", chi, tol, abs(chi - expected) <= tol, expected=expected)


# -- harmonic -----------------------------------------------------------------------------------------


def cmd_harmonic(args, config: RunConfig, report: DiagnosticsReport) -> None:
    label, R, spec = _resolve_space(args)
    m = R.shape[0]
    tol = config.tolerance_or(harmonic.DEFAULT_TOLERANCE)
    nabla = None
    if args.nabla:
        try:
            nabla = load_tensor(args.nabla, project=args.project)
        except (OSError, TensorError) as exc:
            raise UsageError(str(exc)) from exc
        if nabla.shape != (m,) * 5:
            raise UsageError(f"{args.nabla}: expected a rank-5 tensor of dimension {m}")
    elif spec is not None and spec.locally_symmetric:
        nabla = np.zeros((m,) * 5)
        report.info["nabla_R"] = "zero (locally symmetric model)"
    if args.order == 3 and nabla is None:
        raise UsageError("order 3 needs nabla R: pass --nabla FILE (the model is not locally symmetric)")

    led = harmonic.ledger_residuals(R, nabla if args.order == 3 else None, tol, probes=args.probes, seed=config.seed)
    report.info["space"] = label
    report.info["dimension"] = m
    report.info["Lambda1"] = led.Lambda1
    report.info["Lambda2"] = led.Lambda2
    report.info["Lambda2_fit"] = led.Lambda2_fit
    if led.Lambda3 is not None:
        report.info["Lambda3"] = led.Lambda3
    report.info["order_attained"] = led.order
    report.info["paths_agree"] = led.paths_agree
    report.info["super_einstein_residual"] = harmonic.super_einstein_residual(R)
    stein = harmonic.k_stein(R, args.order, probes=args.probes, seed=config.seed)
    report.info["k_stein_deviations"] = stein["deviations"]
    ineq = harmonic.harmonic_inequalities(R, None, None, tol)
    report.info["lichnerowicz_margin"] = ineq["lichnerowicz_margin"]

    residuals = [led.H1_residual, led.H2_residual, led.H3_residual]
    for k in range(1, args.order + 1):
        r = residuals[k - 1]
        report.check(f"H{k}", r, tol, r <= tol)
    if spec is not None and spec.name == "nikolayevsky" and spec.parameters.get("mu", 0.0) == 0.0 and args.order == 3:
        routes = harmonic.nikolayevsky_lambda3(spec.parameters.get("nu", 1.0))
        report.info["Lambda3_route_A"] = routes["Lambda3_route_A"]
        report.info["Lambda3_route_B"] = routes["Lambda3_route_B"]
        report.info["Lambda3_route_mismatch"] = routes["mismatch"]
    report.check("probe_paths_agree", led.paths_agree, None, led.paths_agree)


# -- jet ---------------------------------------------------------------------------------------------------


def _chart(args) -> jets.ChartMetric:
    p = _parse_params(args.param)
    center = None
    if args.center:
        try:
            center = [float(v) for v in args.center.split(",")]
        except ValueError as exc:
            raise UsageError(f"--center: {exc}") from exc
    name = args.chart.replace("-", "_")
    try:
        if name == "sphere":
            return jets.sphere_chart(int(p.get("m", 6)), p.get("kappa", 1.0), center)
        if name == "flat":
            return jets.flat_chart(int(p.get("m", 6)), center)
        if name == "perturbed_flat":
            return jets.perturbed_flat_chart(
                int(p.get("m", 6)), int(p.get("seed", 0)), p.get("eps", 1e-2), int(p.get("poly_degree", 3)), center
            )
        if name == "product":
            m1, m2 = int(p.get("m1", 2)), int(p.get("m2", 4))
            return jets.product_chart(jets.sphere_chart(m1, p.get("kappa1", 1.0)), jets.sphere_chart(m2, p.get("kappa2", 1.0)))
    except (TensorError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    raise UsageError(f"unknown chart {args.chart!r}")


def cmd_jet(args, config: RunConfig, report: DiagnosticsReport) -> None:
    chart = _chart(args)
    try:
        cj = jets.curvature_jet(chart, args.degree)
    except TensorError as exc:
        raise UsageError(str(exc)) from exc
    report.info["chart"] = chart.name
    report.info["degree"] = args.degree
    for key, value in scalar_invariants(cj.R).as_dict().items():
        report.info[f"scalar.{key}"] = value
    if cj.nabla_R is not None:
        report.info["nabla_R_norm2"] = float(np.sum(cj.nabla_R**2))
    tol = config.tolerance_or(1e-7)
    cj.require(2)
    ricci_id = cj.ricci_identity_residual()
    report.check("ricci_identity", ricci_id, 1e-9, ricci_id <= 1e-9)
    lich = jets.verify_lichnerowicz_formula(cj)
    report.check("second_order_RR_identity", lich.relative_error, tol, lich.relative_error <= tol)


# -- parser -------------------------------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, samples: bool = False) -> None:
    p.add_argument("--seed", type=int, default=0, help="base seed (PCG64)")
    p.add_argument("--tolerance", type=float, default=None, help="pass threshold (relative)")
    p.add_argument("--format", choices=("human", "structured"), default="human")
    p.add_argument("--output", default=None, help="write the report here instead of stdout")
    p.add_argument("--threads", type=int, default=None, help=f"worker threads (default: ${THREADS_ENV} or CPU count)")
    if samples:
        p.add_argument("--samples", type=int, default=1)


def _space_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--space", help="named space (s2..s6, s2xs4, s3xs3, cp3, ...) or family")
    p.add_argument("--param", action="append", metavar="KEY=VALUE", help="family parameter (repeatable)")
    p.add_argument("--input", help="curvature tensor file")
    p.add_argument("--project", action="store_true", help="project file input onto the curvature symmetries")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="curvid", description="Curvature identity and harmonic-space checks.")
    parser.add_argument("--version", action="version", version=f"curvid {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="random-tensor campaign for a curvature identity")
    p.add_argument("--identity", choices=sorted(IDENTITY_DEFAULTS), required=True)
    p.add_argument("--terms", type=int, default=None, help="Kulkarni-Nomizu terms per sample (default: cycle 1..5)")
    p.add_argument("--dim", type=int, default=None, help="dimension for dim5 / dim5-scalar (4 or 5)")
    p.add_argument("--input", default=None, help="check one tensor file instead of random samples")
    p.add_argument("--project", action="store_true")
    p.add_argument("--corrupt-term", type=int, default=None, help=argparse.SUPPRESS)
    _common(p, samples=True)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("invariants", help="curvature invariants of a model or tensor file")
    _space_args(p)
    _common(p)
    p.set_defaults(handler=cmd_invariants)

    p = sub.add_parser("gauss-bonnet", help="Euler form, bracket and Euler characteristic")
    _space_args(p)
    p.add_argument("--volume", type=float, default=None)
    p.add_argument("--expect", type=int, default=None, help="expected Euler characteristic")
    p.add_argument("--backend", choices=("cython", "python"), default=None)
    _common(p)
    p.set_defaults(handler=cmd_gauss_bonnet)

    p = sub.add_parser("harmonic", help="Ledger conditions up to a given order")
    _space_args(p)
    p.add_argument("--nabla", help="nabla R tensor file (rank 5)")
    p.add_argument("--order", type=int, choices=(1, 2, 3), default=2)
    p.add_argument("--probes", type=int, default=64)
    _common(p)
    p.set_defaults(handler=cmd_harmonic)

    p = sub.add_parser("jet", help="exact curvature of a coordinate chart via Taylor jets")
    p.add_argument("--chart", choices=("sphere", "flat", "perturbed-flat", "product"), default="sphere")
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.add_argument("--center", default=None, help="comma-separated chart center")
    p.add_argument("--degree", type=int, default=4)
    _common(p)
    p.set_defaults(handler=cmd_jet)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        config = _config(args)
        if args.command == "verify":
            args.tensor = None
            if args.input:
                try:
                    args.tensor = load_tensor(args.input, project=args.project)
                except (OSError, TensorError) as exc:
                    raise UsageError(str(exc)) from exc
                if args.samples != 1:
                    raise UsageError("--input checks a single tensor; drop --samples")
        echo = {k: v for k, v in sorted(vars(args).items()) if k not in ("handler", "tensor", "output", "threads", "format")}
        report = DiagnosticsReport(args.command, echo)
        args.handler(args, config, report)
    except (UsageError, jets.CapabilityError, identities.PreconditionError) as exc:
        print(f"curvid {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report.wall_time = time.perf_counter() - start
    text = report.render(config.format)
    if config.output:
        with open(config.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
