"""Command-line interface.

Subcommands: classify, scan (parameter sweep), roots, verify,
dump-matrices.  Exit codes: 0 ok, 2 inadmissible input, 3 internal
disagreement.  LOPLAB_THREADS caps sweep parallelism.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

try:
    import tomllib  # py >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from . import __version__
from .classify import (
    DisagreementError,
    Stability,
    StabilityVerdict,
    classify_closed_form,
    classify_full,
    sweep,
    sweep_spec_from_dict,
    write_csv,
    write_jsonl,
)
from .dispersion import (
    dispersion_residual,
    full_dispersion_roots,
    hersh_candidates,
    lambda_plus,
)
from .lopatinski import (
    boundary_root_scan,
    build_determinant,
    closed_form_determinant,
    count_zeros_rectangle,
    find_boundary_roots,
    reduced_residual,
    residual_scales,
    scan_interior_roots,
)
from .params import (
    NonHyperbolicPoint,
    ShockParameters,
    check_lax,
    deformation_determinant_mismatch,
    derive,
)
from .system import assemble_system, boundary_kernel, boundary_residual

EXIT_OK = 0
EXIT_INADMISSIBLE = 2
EXIT_DISAGREEMENT = 3


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="TOML file with mach/ratio and an [f] table")
    parser.add_argument("--mach", type=float, help="downstream Mach number M")
    parser.add_argument("--ratio", type=float, help="density ratio R")
    for name in ("f11", "f12", "f21", "f22"):
        parser.add_argument(f"--{name}", type=float, help=f"deformation entry {name}")
    parser.add_argument("--mach-upstream", type=float, help="upstream Mach number (advisory check)")
    parser.add_argument(
        "--expect-detf",
        type=float,
        help="strict mode: flag det(F) differing from this declared value",
    )


def _params_from_args(args: argparse.Namespace) -> ShockParameters:
    data: dict = {}
    if args.config is not None:
        with open(args.config, "rb") as fh:
            data.update(tomllib.load(fh))
    overrides = {
        "mach": args.mach,
        "ratio": args.ratio,
        "f11": args.f11,
        "f12": args.f12,
        "f21": args.f21,
        "f22": args.f22,
        "mach_upstream": args.mach_upstream,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    return ShockParameters.from_dict(data)


def _emit(payload: dict) -> None:
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _lax_payload(params: ShockParameters) -> dict:
    report = check_lax(params)
    return {
        "downstream_pass": report.downstream_pass,
        "upstream_pass": report.upstream_pass,
        "lower_margin": report.lower_margin,
        "upper_margin": report.upper_margin,
        "upstream_bound": report.upstream_bound,
        "upstream_margin": report.upstream_margin,
    }


def _cmd_classify(args: argparse.Namespace) -> int:
    params = _params_from_args(args)
    payload: dict = {
        "input": {
            "mach": params.mach,
            "ratio": params.ratio,
            "f": [[params.f11, params.f12], [params.f21, params.f22]],
            "mach_upstream": params.mach_upstream,
        },
        "lax": _lax_payload(params),
    }
    if args.expect_detf is not None:
        mismatch = deformation_determinant_mismatch(params, args.expect_detf)
        payload["detf_mismatch"] = mismatch
    try:
        d = derive(params)
    except NonHyperbolicPoint as exc:
        payload.update(verdict=Stability.INADMISSIBLE.value, reason=str(exc))
        _emit(payload)
        return EXIT_INADMISSIBLE
    payload["derived"] = {
        "M1": d.m1, "M2": d.m2, "Mstar": d.mstar, "beta": d.beta,
        "ell0": d.ell0, "sigma": d.sigma, "detF": d.detf,
        "K": d.k, "K1": d.k1, "K2": d.k2, "K3": d.k3,
    }
    try:
        if args.fast:
            closed = classify_closed_form(d)
            if check_lax(params).admissible and closed.verdict is not Stability.INADMISSIBLE:
                verdict = closed
            else:
                verdict = StabilityVerdict(
                    verdict=Stability.INADMISSIBLE,
                    margin=closed.margin,
                    condition_quartic=closed.condition_quartic,
                    condition_threshold=closed.condition_threshold,
                )
        else:
            verdict = classify_full(params)
            if verdict.verdict is not Stability.INADMISSIBLE:
                payload["boundary_roots"] = [
                    {"xi": r.s.imag, "delta": r.lam.imag} for r in find_boundary_roots(d)
                ]
    except DisagreementError as exc:
        payload.update(verdict=Stability.VIOLENT.value, error=str(exc))
        _emit(payload)
        return EXIT_DISAGREEMENT
    payload.update(
        verdict=verdict.verdict.value,
        margin=verdict.margin,
        condition_quartic=verdict.condition_quartic,
        condition_threshold=verdict.condition_threshold,
        delta_branch_roots=verdict.delta_branch_roots,
        agreement=verdict.agreement,
    )
    _emit(payload)
    if verdict.verdict is Stability.INADMISSIBLE:
        return EXIT_INADMISSIBLE
    return EXIT_OK


def _cmd_scan(args: argparse.Namespace) -> int:
    with open(args.spec, "rb") as fh:
        spec = sweep_spec_from_dict(tomllib.load(fh))
    rows = sweep(spec)
    if args.out is None:
        write_csv(rows, sys.stdout)
        return EXIT_OK
    suffix = args.out.suffix.lower()
    with open(args.out, "w", encoding="utf-8") as fh:
        if suffix == ".jsonl":
            write_jsonl(rows, fh)
        elif suffix == ".csv":
            write_csv(rows, fh)
        else:
            raise SystemExit(f"unsupported output extension {suffix!r} (use .csv or .jsonl)")
    return EXIT_OK


def _cmd_roots(args: argparse.Namespace) -> int:
    params = _params_from_args(args)
    try:
        d = derive(params)
    except NonHyperbolicPoint as exc:
        _emit({"error": str(exc)})
        return EXIT_INADMISSIBLE
    s = complex(args.eta, args.xi)
    roots = full_dispersion_roots(d, None, s, args.omega)
    lam = lambda_plus(d, s, args.omega)
    entries = []
    for root in roots:
        res = dispersion_residual(d, None, s, args.omega, root)
        entries.append(
            {
                "re": root.real,
                "im": root.imag,
                "acoustic_factor_residual": abs(complex(res)),
                "is_decaying": bool(root.real > 0),
            }
        )
    _emit(
        {
            "s": {"eta": args.eta, "xi": args.xi},
            "omega": args.omega,
            "roots": entries,
            "lambda_plus": {
                "re": lam.real,
                "im": lam.imag,
                "residual": abs(complex(dispersion_residual(d, None, s, args.omega, lam))),
            },
        }
    )
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    params = _params_from_args(args)
    try:
        d = derive(params)
    except NonHyperbolicPoint as exc:
        _emit({"error": str(exc)})
        return EXIT_INADMISSIBLE
    if not check_lax(params).admissible:
        _emit({"error": "point is not Lax-admissible", "lax": _lax_payload(params)})
        return EXIT_INADMISSIBLE
    rng = np.random.default_rng(args.seed)
    mats = assemble_system(d)

    kernel_max = 0.0
    det_max = 0.0
    chain_max = 0.0
    for _ in range(args.trials):
        s = complex(rng.uniform(0.01, 2.0), rng.uniform(-4.0, 4.0))
        omega = rng.uniform(-3.0, 3.0)
        kern = boundary_kernel(d, None, s, omega)
        kernel_max = max(kernel_max, boundary_residual(mats, kern, s, omega))
        lam = lambda_plus(d, s, omega)
        generic = build_determinant(mats, kern, s, omega, lam).det
        closed = closed_form_determinant(d, None, s, omega, lam)
        scale = max(abs(generic), abs(closed), 1e-300)
        det_max = max(det_max, abs(generic - closed) / scale)
        # Reduction chain: generic det against the scalar root condition.
        omega_r = -omega if d.ell0 < 0 else omega
        res_disp, res_det = reduced_residual(d, s, omega_r, lam)
        scale_disp, _ = residual_scales(d, s, omega_r, lam)
        pref = d.beta**2 * (s + lam) ** 3 * (omega**2 - lam**2) / (2 * d.mach**2)
        chain_max = max(
            chain_max,
            abs(generic - pref * res_det) / scale,
            abs(res_disp) / scale_disp,
        )

    constructed = find_boundary_roots(d)
    scanned = boundary_root_scan(d)
    if constructed:
        roots_match = len(constructed) == len(scanned) and all(
            min(abs(c.s - s.s) for s in scanned) <= 1e-6 * (1 + abs(c.s))
            for c in constructed
        )
    else:
        roots_match = len(scanned) == 0

    interior = scan_interior_roots(d)

    winding = None
    if args.winding:
        def residual_at_decaying(s):
            cp, cm = hersh_candidates(d, s, 1.0)
            lam = np.where(cp.real >= cm.real, cp, cm)
            return reduced_residual(d, s, 1.0, lam)[1]

        winding = count_zeros_rectangle(residual_at_decaying, (0.05, 8.0), (-8.0, 8.0))

    checks = {
        "kernel_residual": {"max": kernel_max, "tol": 1e-12, "pass": kernel_max <= 1e-12},
        "determinant_equivalence": {"max_rel": det_max, "tol": 1e-10, "pass": det_max <= 1e-10},
        "reduction_chain": {"max_rel": chain_max, "tol": 1e-10, "pass": chain_max <= 1e-10},
        "boundary_roots": {
            "constructed": len(constructed),
            "scanned": len(scanned),
            "pass": bool(roots_match),
        },
        "interior_scan": {"roots": len(interior), "pass": len(interior) == 0},
    }
    if winding is not None:
        checks["winding"] = {"zeros": winding, "pass": winding == 0}
    ok = all(entry["pass"] for entry in checks.values())
    _emit({"trials": args.trials, "checks": checks, "pass": ok})
    return EXIT_OK if ok else EXIT_DISAGREEMENT


def _cmd_dump_matrices(args: argparse.Namespace) -> int:
    params = _params_from_args(args)
    try:
        d = derive(params)
    except NonHyperbolicPoint as exc:
        _emit({"error": str(exc)})
        return EXIT_INADMISSIBLE
    mats = assemble_system(d)
    named = [
        ("A0", mats.a0), ("A1", mats.a1), ("A2", mats.a2),
        ("B0", mats.b0), ("B2", mats.b2), ("B3", mats.b3),
    ]
    if args.format == "json":
        _emit({name: [[float(v) for v in row] for row in mat] for name, mat in named})
        return EXIT_OK
    for name, mat in named:
        sys.stdout.write(f"{name} ({mat.shape[0]}x{mat.shape[1]}):\n")
        for row in mat:
            sys.stdout.write("  " + " ".join(repr(float(v)) for v in row) + "\n")
        sys.stdout.write("\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loplab",
        description="Uniform vs weak stability of rectilinear shocks in 2D elastodynamics",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify a single parameter point")
    _add_param_flags(p)
    p.add_argument("--fast", action="store_true", help="closed form only, skip the numerical path")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("scan", help="run a parameter sweep from a TOML spec")
    p.add_argument("--spec", type=Path, required=True, help="sweep spec TOML")
    p.add_argument("--out", type=Path, help="output file (.csv or .jsonl; default stdout CSV)")
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("roots", help="print all dispersion roots at a frequency point")
    _add_param_flags(p)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--xi", type=float, required=True)
    p.add_argument("--omega", type=float, default=1.0)
    p.set_defaults(func=_cmd_roots)

    p = sub.add_parser("verify", help="cross-check every route at one parameter point")
    _add_param_flags(p)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--winding", action="store_true", help="also run the winding-number check")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("dump-matrices", help="print the assembled system matrices")
    _add_param_flags(p)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=_cmd_dump_matrices)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DisagreementError as exc:
        print(f"internal disagreement: {exc}", file=sys.stderr)
        return EXIT_DISAGREEMENT
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INADMISSIBLE


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
