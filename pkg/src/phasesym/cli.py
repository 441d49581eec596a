"""Command-line front end.

Commands: check (certify a generator on a region), reduce (push a time
generator to the phase plane), lift (integrate a phase generator's time
component along a characteristic), flow (trajectory CSV), transform (flow a
trajectory by a finite symmetry), models (list built-ins).

Exit codes: 0 success or certified, 1 failed check, 2 usage or load error,
3 numeric domain error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from contextlib import nullcontext

import numpy as np

from . import __version__
from .expr import (
    Constant,
    DomainError,
    ParseError,
    diff,
    parse,
    simplify,
    substitute,
    to_string,
    variables_of,
)
from .expr import eval as _eval
from .flow import (
    Trajectory,
    exp_map_time,
    integrate_system,
    solution_preservation_check,
)
from .jets import PhaseGenerator, TimeGenerator
from .lifting import (
    LiftSpec,
    assemble_lift,
    check_lift_consistency,
    lift_characteristic,
)
from .modelfile import ModelFileError, resolve_model
from .models import MODEL_NAMES, NamedModel, get_model, lift_xi
from .reduction import DEFAULT_JET_SEED, pushforward, sample_jets, verify_commutation
from .verify import ResidualReport, SampleRegion, is_symmetry_phase, is_symmetry_time

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class CliError(Exception):
    """Bad invocation or unloadable input; maps to exit code 2."""


# ---------------------------------------------------------------------------
# Argument value parsing


def _parse_span(text: str, flag: str) -> tuple[float, float]:
    left, sep, right = text.partition(":")
    if not sep:
        raise CliError(f"{flag} must look like 'a:b'")
    try:
        return float(left), float(right)
    except ValueError:
        raise CliError(f"{flag} bounds must be numbers, got {text!r}") from None


def _parse_point(text: str, flag: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise CliError(f"{flag} must look like 'u0,v0'")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise CliError(f"{flag} coordinates must be numbers, got {text!r}") from None


def _parse_exclusion(text: str):
    expr_text, sep, thr_text = text.rpartition(":")
    if not sep:
        raise CliError("--exclude must look like 'expression:threshold'")
    try:
        threshold = float(thr_text)
    except ValueError:
        raise CliError(f"--exclude threshold {thr_text!r} is not a number") from None
    return parse(expr_text.strip(), frozenset({"u", "v"})), threshold


_PHASE_MARKERS = ("du", "dv")
_TIME_MARKERS = ("dt", "du", "dv")


def _parse_inline_generator(text: str, domain: str):
    """Read 'expr*du + expr*dv' (phase) or with an extra 'expr*dt' (time).

    The string is parsed as one expression over the state variables plus the
    basis markers du, dv, dt; coefficients are extracted by differentiating
    with respect to each marker, which also rejects nonlinear marker use.
    """
    markers = _TIME_MARKERS if domain == "time" else _PHASE_MARKERS
    state = {"t", "u", "v"} if domain == "time" else {"u", "v"}
    tree = parse(text, frozenset(state | set(markers)))
    coeffs = {m: simplify(diff(tree, m)) for m in markers}
    leftover = simplify(substitute(tree, {m: Constant(0.0) for m in markers}))
    if leftover != Constant(0.0):
        raise CliError(
            f"generator must be a linear combination of {', '.join(markers)}"
        )
    for marker, coeff in coeffs.items():
        if variables_of(coeff) & set(markers):
            raise CliError(f"coefficient of {marker} may not contain basis markers")
    if domain == "time":
        return TimeGenerator(coeffs["dt"], coeffs["du"], coeffs["dv"])
    return PhaseGenerator(coeffs["du"], coeffs["dv"])


def _inline_or_complain(model: NamedModel, text: str, domain: str, known):
    try:
        return _parse_inline_generator(text, domain)
    except ParseError as exc:
        names = ", ".join(sorted(known)) or "none"
        raise CliError(
            f"{text!r} is not a catalog generator of {model.name} "
            f"(known: {names}) and does not parse inline: {exc}"
        ) from exc


def _resolve_phase_generator(model: NamedModel, text: str):
    """(generator, catalog name or None) from a name or inline expression."""
    if text in model.generators:
        return model.generators[text], text
    return _inline_or_complain(model, text, "phase", model.generators), None


def _resolve_time_generator(model: NamedModel, text: str, free):
    """(generator, catalog name or None); named lifts are assembled."""
    if text in model.time_generators:
        return model.time_generators[text], text
    if text in model.lifts:
        lift = model.lifts[text]
        return assemble_lift(model.generators[lift.generator], lift_xi(lift, free)), text
    if text in model.generators:
        raise CliError(
            f"{text!r} is a phase generator; use the phase domain or name a lift"
        )
    known = set(model.time_generators) | set(model.lifts)
    return _inline_or_complain(model, text, "time", known), None


def _parse_free(args) -> "Constant | None":
    if getattr(args, "F", None) is None:
        return None
    return parse(args.F, frozenset({"c"}))


def _pick_region(args, model: NamedModel, name: str | None) -> SampleRegion:
    """Region flags replace the model's region wholesale when given."""
    if args.u_range is None and args.v_range is None:
        return model.region_for(name) if name else model.default_region
    if args.u_range is None or args.v_range is None:
        raise CliError("--u-range and --v-range must be given together")
    exclusions = tuple(_parse_exclusion(e) for e in args.exclude or ())
    return SampleRegion(
        _parse_span(args.u_range, "--u-range"),
        _parse_span(args.v_range, "--v-range"),
        args.grid,
        exclusions,
    )


# ---------------------------------------------------------------------------
# Output


def _region_payload(region: SampleRegion) -> dict:
    return {
        "u_range": list(region.u_range),
        "v_range": list(region.v_range),
        "grid": region.n_points,
        "exclusions": [[to_string(e), thr] for e, thr in region.exclusions],
    }


def _report_payload(report: ResidualReport) -> dict:
    return {
        "max_abs_residual": report.max_abs_residual,
        "argmax_point": list(report.argmax_point),
        "n_evaluated": report.n_evaluated,
        "per_component": report.per_component,
    }


def _payload(command: str, model: NamedModel, **extra) -> dict:
    return {"version": __version__, "command": command, "model": model.name, **extra}


def _emit_json(payload: dict, out: str | None, stream=None):
    text = json.dumps(payload, indent=2)
    if out is not None:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text, file=stream or sys.stdout)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_csv(out: str | None, header, rows):
    ctx = open(out, "w", newline="") if out is not None else nullcontext(sys.stdout)
    with ctx as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def _read_trajectory_csv(path: str) -> Trajectory:
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["t", "u", "v"]:
            raise CliError(f"{path}: expected header t,u,v, got {header}")
        try:
            rows = [(float(a), float(b), float(c)) for a, b, c in reader]
        except ValueError as exc:
            raise CliError(f"{path}: non-numeric value ({exc})") from None
    if not rows:
        raise CliError(f"{path}: no samples")
    cols = np.asarray(rows, dtype=float)
    t = cols[:, 0]
    h = float(t[1] - t[0]) if t.size > 1 else 1.0
    try:
        return Trajectory(t, cols[:, 1], cols[:, 2], h)
    except ValueError as exc:
        raise CliError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Commands


def _cmd_models(args) -> int:
    for name in MODEL_NAMES:
        model = get_model(name)
        print(name)
        print(f"  phase generators: {', '.join(sorted(model.generators))}")
        if model.lifts:
            print(f"  lifts: {', '.join(sorted(model.lifts))}")
    return EXIT_OK


def _cmd_check(args) -> int:
    model = resolve_model(args.model)
    tol = args.tol if args.tol is not None else 1e-8
    if args.domain == "phase":
        generator, name = _resolve_phase_generator(model, args.generator)
        region = _pick_region(args, model, name)
        certified, report = is_symmetry_phase(model.system, generator, region, tol)
    else:
        generator, name = _resolve_time_generator(model, args.generator, None)
        region = _pick_region(args, model, name)
        certified, report = is_symmetry_time(model.system, generator, region, tol)
    payload = _payload(
        "check",
        model,
        generator=args.generator,
        domain=args.domain,
        tol=tol,
        region=_region_payload(region),
        certified=certified,
        **_report_payload(report),
    )
    _emit_json(payload, args.out)
    return EXIT_OK if certified else EXIT_CHECK_FAILED


def _cmd_reduce(args) -> int:
    model = resolve_model(args.model)
    x, _ = _resolve_time_generator(model, args.generator, None)
    jets = sample_jets(args.jets, seed=args.seed)
    report = verify_commutation(x, model.system, jets)
    y = pushforward(x)
    payload = _payload(
        "reduce",
        model,
        generator=args.generator,
        zeta_u=to_string(y.zeta_u),
        zeta_v=to_string(y.zeta_v),
        seed=args.seed,
        n_jets=args.jets,
        commutation=_report_payload(report),
    )
    _emit_json(payload, args.out)
    return EXIT_OK


def _cmd_lift(args) -> int:
    model = resolve_model(args.model)
    y, name = _resolve_phase_generator(model, args.generator)
    free = _parse_free(args)
    catalog = model.lifts.get(name) if name else None
    if args.c is not None:
        c_expr = parse(args.c, frozenset({"u", "v"}))
    else:
        c_expr = catalog.c_expr if catalog else None
    guards = catalog.guards if catalog else ()
    spec = LiftSpec(y, free=free, c_expr=c_expr, guards=guards)

    tol = args.tol if args.tol is not None else 1e-9
    region = _pick_region(args, model, name)
    consistent, consistency = check_lift_consistency(model.system, y, region, tol)
    if not consistent:
        payload = _payload(
            "lift",
            model,
            generator=args.generator,
            tol=tol,
            region=_region_payload(region),
            consistent=False,
            obstruction=_report_payload(consistency),
        )
        _emit_json(payload, None, stream=sys.stderr)
        return EXIT_CHECK_FAILED

    if args.initial is None:
        raise CliError("lift needs --initial u0,v0")
    initial = _parse_point(args.initial, "--initial")
    xi_closed = lift_xi(catalog, free) if catalog else None
    if args.xi0 is not None:
        xi0 = args.xi0
    elif catalog is not None:
        bindings = {"t": 0.0, "u": initial[0], "v": initial[1]}
        xi0 = _eval(catalog.xi_closed, bindings)
    else:
        xi0 = 0.0
    result = lift_characteristic(
        model.system,
        spec,
        initial,
        xi0,
        _parse_span(args.t_span, "--t-span"),
        args.h,
        xi_closed=xi_closed,
    )
    _write_csv(
        args.out,
        ["t", "u", "v", "xi"],
        zip(result.t, result.u, result.v, result.xi),
    )
    payload = _payload(
        "lift",
        model,
        generator=args.generator,
        tol=tol,
        region=_region_payload(region),
        consistent=True,
        xi0=xi0,
        h=args.h,
        consistency=_report_payload(consistency),
        residual=_report_payload(result.residual_report),
    )
    _emit_json(payload, None, stream=sys.stderr)
    return EXIT_OK


def _cmd_flow(args) -> int:
    model = resolve_model(args.model)
    if args.initial is None:
        raise CliError("flow needs --initial u0,v0")
    trajectory = integrate_system(
        model.system,
        _parse_point(args.initial, "--initial"),
        _parse_span(args.t_span, "--t-span"),
        args.h,
    )
    _write_csv(
        args.out, ["t", "u", "v"], zip(trajectory.t, trajectory.u, trajectory.v)
    )
    return EXIT_OK


def _cmd_transform(args) -> int:
    model = resolve_model(args.model)
    x, _ = _resolve_time_generator(model, args.generator, _parse_free(args))
    if args.input is not None:
        base = _read_trajectory_csv(args.input)
    elif args.initial is not None:
        base = integrate_system(
            model.system,
            _parse_point(args.initial, "--initial"),
            _parse_span(args.t_span, "--t-span"),
            args.h,
        )
    else:
        raise CliError("transform needs --input CSV or --initial u0,v0")
    transformed = exp_map_time(x, base, args.epsilon, args.h_eps)
    _write_csv(
        args.out,
        ["t_hat", "u_hat", "v_hat", "epsilon", "source_t"],
        zip(
            transformed.t_hat,
            transformed.u_hat,
            transformed.v_hat,
            np.full(len(transformed), transformed.epsilon),
            base.t,
        ),
    )
    preservation = solution_preservation_check(model.system, transformed)
    payload = _payload(
        "transform",
        model,
        generator=args.generator,
        epsilon=args.epsilon,
        h_eps=args.h_eps,
        preservation=_report_payload(preservation),
    )
    _emit_json(payload, None, stream=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser assembly


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phasesym",
        description="Symmetries of 2D autonomous ODE systems: certify, "
        "reduce, lift, and transform.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write primary output to this file")

    region = argparse.ArgumentParser(add_help=False)
    region.add_argument("--u-range", help="override region: 'a:b'")
    region.add_argument("--v-range", help="override region: 'a:b'")
    region.add_argument("--grid", type=int, default=41, help="grid points per axis")
    region.add_argument(
        "--exclude",
        action="append",
        help="region exclusion 'expression:threshold' (repeatable)",
    )
    region.add_argument("--tol", type=float, help="certification tolerance")

    p = sub.add_parser(
        "models", parents=[common], help="list built-in models"
    )
    p.set_defaults(func=_cmd_models)

    p = sub.add_parser(
        "check",
        parents=[common, region],
        help="certify a generator as a symmetry on a region",
    )
    p.add_argument("model", help="built-in model name or model file path")
    p.add_argument("generator", help="catalog name or inline 'expr*du + expr*dv'")
    p.add_argument(
        "--domain", choices=("phase", "time"), default="phase",
        help="which symmetry condition to check",
    )
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser(
        "reduce",
        parents=[common],
        help="push a time-domain generator to the phase plane",
    )
    p.add_argument("model")
    p.add_argument(
        "generator", help="catalog name or inline 'expr*dt + expr*du + expr*dv'"
    )
    p.add_argument("--seed", type=int, default=DEFAULT_JET_SEED)
    p.add_argument("--jets", type=int, default=100, help="sample jet count")
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser(
        "lift",
        parents=[common, region],
        help="integrate a phase generator's time component along a characteristic",
    )
    p.add_argument("model")
    p.add_argument("generator")
    p.add_argument("--F", help="free function of the constant of motion, in 'c'")
    p.add_argument("--c", help="constant of motion expression over u, v")
    p.add_argument("--initial", help="characteristic start 'u0,v0'")
    p.add_argument("--xi0", type=float, help="initial time component value")
    p.add_argument("--t-span", default="0:1", help="integration span 'a:b'")
    p.add_argument("--h", type=float, default=1e-3, help="integration step")
    p.set_defaults(func=_cmd_lift)

    p = sub.add_parser(
        "flow", parents=[common], help="integrate a trajectory, emit t,u,v CSV"
    )
    p.add_argument("model")
    p.add_argument("--initial", help="start point 'u0,v0'")
    p.add_argument("--t-span", default="0:1")
    p.add_argument("--h", type=float, default=1e-3)
    p.set_defaults(func=_cmd_flow)

    p = sub.add_parser(
        "transform",
        parents=[common],
        help="flow a trajectory by a finite symmetry transformation",
    )
    p.add_argument("model")
    p.add_argument("generator", help="time-domain generator, lift name, or inline")
    p.add_argument("--F", help="free function for a named lift, in 'c'")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--h-eps", type=float, default=1e-3)
    p.add_argument("--input", help="trajectory CSV from the flow command")
    p.add_argument("--initial", help="integrate a fresh base trajectory instead")
    p.add_argument("--t-span", default="0:1")
    p.add_argument("--h", type=float, default=1e-3)
    p.set_defaults(func=_cmd_transform)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ModelFileError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"numeric domain error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
