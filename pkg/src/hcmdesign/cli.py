"""Command-line front end.

Exit codes: 0 success, 2 invalid input (bad flags, geometry, catalog),
3 numeric failure (non-convergence, degenerate mode shape).
"""
import argparse
import json
import sys

from . import __version__
from .catalog import load_catalog, serialize_catalog
from .drive import SERVO_CAP_MODES, estimate_speed, evaluate_design
from .errors import HcmError, NumericError, ValidationError
from .model import Calibrated, DirectLoad, EndShortening, EulerStrip, Explicit, Geometry
from .search import (
    GEOMETRY_PARAMS,
    OBJECTIVES,
    DesignContext,
    Grid,
    SearchConfig,
    SweepSpec,
    rows_to_csv,
    search,
    sweep,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERIC = 3

UNITS = {
    "length": "mm",
    "force": "N",
    "torque": "mm*N",
    "energy": "mm*N",
    "time": "s",
    "frequency": "Hz",
    "speed": "BL/s",
    "mass": "g",
    "A1": "mm^-1/2",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _float(text):
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _assignment(text):
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    return name.strip(), value.strip()


def _parse_geometry(text):
    parts = text.split(",")
    if len(parts) != 5:
        raise ValidationError(f"--geometry needs 5 values l,D,t,h,r, got {text!r}", field="geometry")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise ValidationError(f"--geometry values must be numbers, got {text!r}", field="geometry") from None
    return Geometry(*values)


def _add_model_flags(p):
    p.add_argument("--catalog", help="catalog file (default: built-in)")
    p.add_argument("--closure", choices=("end-shortening", "calibrated", "explicit"), default=None,
                   help="how A1 is fixed (default end-shortening, or calibrated with --u-target)")
    p.add_argument("--kappa", type=_float, default=1.0, help="end-shortening factor")
    p.add_argument("--u-target", type=_float, help="tip displacement for the calibrated closure (mm)")
    p.add_argument("--a1", type=_float, help="amplitude for the explicit closure (mm^-1/2)")
    p.add_argument("--pcr", choices=("euler", "direct"), default="euler", help="critical-load model")
    p.add_argument("--pcr-value", type=_float, help="critical load for --pcr direct (N)")
    p.add_argument("--servo-cap", choices=SERVO_CAP_MODES, default="reference",
                   help="servo frequency cap: catalog value or computed from speed and horn")
    p.add_argument("--alpha-min", type=_float, default=1.0, help="minimum design factor")
    p.add_argument("-o", "--output", help="output file (default: standard output)")


def _add_design_flags(p):
    p.add_argument("--preset", help="prototype preset name")
    p.add_argument("--geometry", help="l,D,t,h,r in mm (r = L2/L1)")
    p.add_argument("--material")
    p.add_argument("--servo")


def build_parser():
    parser = _Parser(prog="hcmdesign", description="Servo-driven hair-clip-mechanism design tools.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="evaluate one design and print a JSON report")
    _add_design_flags(p)
    _add_model_flags(p)
    p.add_argument("--speed-at", type=_float, default=10.0, help="extra frequency for the speed band (Hz)")

    p = sub.add_parser("sweep", help="vary one or two geometry parameters, CSV output")
    _add_design_flags(p)
    _add_model_flags(p)
    p.add_argument("--vary", action="append", type=_assignment, default=[], metavar="NAME=MIN:MAX:STEP")
    p.add_argument("--fixed", action="append", type=_assignment, default=[], metavar="NAME=VALUE")
    p.add_argument("--fix-shape", action="store_true", help="hold A1 at its base-geometry value")
    p.add_argument("--columns", help="comma-separated evaluation columns to keep")

    p = sub.add_parser("search", help="exhaustive catalog search, ranked JSON output")
    _add_model_flags(p)
    p.add_argument("--preset", help="use this preset's geometry for grids not given")
    p.add_argument("--grid", action="append", type=_assignment, default=[], metavar="NAME=MIN:MAX:STEP")
    p.add_argument("--continuous-t", action="store_true", help="take t from --grid t=... instead of the catalog")
    p.add_argument("--material", action="append", dest="materials", help="restrict to material (repeatable)")
    p.add_argument("--servo", action="append", dest="servos", help="restrict to servo (repeatable)")
    p.add_argument("--target-freq", type=_float, default=0.0, help="minimum design frequency (Hz)")
    p.add_argument("--objective", choices=sorted(OBJECTIVES), default="frequency")
    p.add_argument("--limit", type=int, help="keep only the best N designs")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("catalog", help="print or validate catalogs")
    csub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    c = csub.add_parser("list", help="print the canonical catalog document")
    c.add_argument("path", nargs="?", help="catalog file (default: built-in)")
    c.add_argument("-o", "--output")
    c = csub.add_parser("validate", help="check a catalog file")
    c.add_argument("path")
    return parser


def _closure(args):
    kind = args.closure
    if kind is None:
        kind = "calibrated" if args.u_target is not None else "explicit" if args.a1 is not None else "end-shortening"
    if kind == "calibrated":
        if args.u_target is None:
            raise ValidationError("--closure calibrated needs --u-target", field="u_target")
        return Calibrated(args.u_target)
    if kind == "explicit":
        if args.a1 is None:
            raise ValidationError("--closure explicit needs --a1", field="A1")
        return Explicit(args.a1)
    return EndShortening(args.kappa)


def _pcr(args):
    if args.pcr == "direct":
        if args.pcr_value is None:
            raise ValidationError("--pcr direct needs --pcr-value", field="P_cr")
        return DirectLoad(args.pcr_value)
    return EulerStrip()


def _design(args, cat):
    """(geometry, material, servo, preset or None) from --preset/--geometry flags."""
    preset = None
    if args.geometry is not None:
        geometry = _parse_geometry(args.geometry)
        if args.preset is not None:
            preset = cat.preset(args.preset)
    elif args.preset is not None:
        preset = cat.preset(args.preset)
        geometry = preset.geometry
    else:
        raise ValidationError("give --preset or --geometry", field="geometry")
    material = args.material or (preset.material if preset else None)
    servo = args.servo or (preset.servo if preset else None)
    if material is None or servo is None:
        raise ValidationError("--geometry needs --material and --servo", field="material")
    return geometry, cat.material(material), cat.servo(servo), preset


def _dump_json(doc):
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False, allow_nan=False) + "\n"


def _emit(text, path, stdout):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _eval_command(args, stdout):
    cat = load_catalog(args.catalog)
    geometry, material, servo, preset = _design(args, cat)
    closure, pcr = _closure(args), _pcr(args)
    e = evaluate_design(geometry, material, servo, closure=closure, pcr=pcr,
                        servo_cap=args.servo_cap, alpha_min=args.alpha_min)
    report = e.as_dict()
    report["speed_band"] = e.speed_band.as_list()
    report[f"speed_band_at_{args.speed_at:g}Hz"] = estimate_speed(args.speed_at).as_list()
    report["extrapolated"] = geometry.t not in material.thicknesses
    report["units"] = UNITS
    report["preset"] = preset.name if preset else None
    if preset is not None:
        refs = {"note": "reference, not asserted"}
        if preset.T_act_ref is not None:
            refs["T_act_ref"] = preset.T_act_ref
            refs["alpha_ref"] = servo.T_servo / preset.T_act_ref
        if preset.u_tip_ref is not None:
            refs["u_tip_ref"] = preset.u_tip_ref
        report["references"] = refs
    _emit(_dump_json(report), args.output, stdout)


def _sweep_command(args, stdout):
    cat = load_catalog(args.catalog)
    if args.preset is None and args.geometry is None:
        args.preset = "carbonfish"
    geometry, material, servo, _ = _design(args, cat)
    if not args.vary:
        raise ValidationError("sweep needs at least one --vary", field="vary")
    vary = {}
    for name, text in args.vary:
        if name in vary:
            raise ValidationError(f"parameter {name!r} varied twice", field=name)
        vary[name] = Grid.parse(text)
    fixed = {}
    for name, text in args.fixed:
        try:
            fixed[name] = float(text)
        except ValueError:
            raise ValidationError(f"--fixed {name} needs a number, got {text!r}", field=name) from None
    columns = [c.strip() for c in args.columns.split(",")] if args.columns else None
    spec = SweepSpec(vary=vary, fixed=fixed, fix_shape=args.fix_shape, columns=columns)
    base = DesignContext(geometry, material, servo, closure=_closure(args), pcr=_pcr(args),
                         servo_cap=args.servo_cap, alpha_min=args.alpha_min)
    rows = sweep(spec, base)
    _emit(rows_to_csv(rows, spec.header()), args.output, stdout)


def _search_command(args, stdout):
    cat = load_catalog(args.catalog)
    grids = {}
    if args.preset is not None:
        g = cat.preset(args.preset).geometry
        grids = {name: [getattr(g, name)] for name in ("l", "D", "h", "r")}
    for name, text in args.grid:
        if name not in GEOMETRY_PARAMS:
            raise ValidationError(f"unknown grid parameter {name!r}", field=name)
        grids[name] = Grid.parse(text)
    cfg = SearchConfig(
        grids=grids,
        materials=args.materials,
        servos=args.servos,
        closure=_closure(args),
        pcr=_pcr(args),
        servo_cap=args.servo_cap,
        alpha_min=args.alpha_min,
        f_target=args.target_freq,
        objective=args.objective,
        continuous_t=args.continuous_t,
        n_jobs=args.jobs,
    )
    results = search(cfg, cat)
    if args.limit is not None:
        results = results[: max(args.limit, 0)]
    out = []
    for rank, e in enumerate(results, 1):
        doc = e.as_dict()
        doc["rank"] = rank
        doc["extrapolated"] = e.t not in cat.material(e.material).thicknesses
        out.append(doc)
    _emit(_dump_json(out), args.output, stdout)


def _catalog_command(args, stdout):
    if args.action == "list":
        _emit(serialize_catalog(load_catalog(args.path)), args.output, stdout)
    else:
        cat = load_catalog(args.path)
        stdout.write(
            f"ok: {len(cat.materials)} materials, {len(cat.servos)} servos, {len(cat.presets)} presets\n"
        )


COMMANDS = {
    "eval": _eval_command,
    "sweep": _sweep_command,
    "search": _search_command,
    "catalog": _catalog_command,
}


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.command](args, stdout)
    except ValidationError as exc:
        where = f" [{exc.field}]" if getattr(exc, "field", None) else ""
        stderr.write(f"error{where}: {exc}\n")
        return EXIT_INVALID
    except NumericError as exc:
        stderr.write(f"numeric failure: {exc}\n")
        return EXIT_NUMERIC
    except HcmError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except OSError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
