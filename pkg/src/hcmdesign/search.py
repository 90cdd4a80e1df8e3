"""Design-space sweeps and exhaustive catalog search."""
import csv
import io
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from decimal import Decimal
from typing import Mapping, Optional, Sequence, Union

from . import model
from .catalog import Catalog
from .drive import ALPHA_MIN, DesignEvaluation, MaterialSpec, ServoSpec, evaluate_design
from .errors import HcmError, ValidationError
from .model import Closure, Explicit, Geometry, PcrModel

GEOMETRY_PARAMS = ("l", "D", "t", "h", "r")
EVALUATION_FIELDS = tuple(f.name for f in fields(DesignEvaluation))


@dataclass(frozen=True)
class Grid:
    """Inclusive arithmetic grid ``start, start + step, ..., <= stop``.

    Points are generated in decimal arithmetic from the shortest
    representations of the bounds, so 0.25:1.0:0.25 yields exactly
    0.25, 0.5, 0.75, 1.0.
    """

    start: float
    stop: float
    step: float

    def __post_init__(self):
        for name in ("start", "stop", "step"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"grid {name} must be finite", field=name)
        if self.step <= 0:
            raise ValidationError(f"grid step must be > 0, got {self.step!r}", field="step")
        if self.start > self.stop:
            raise ValidationError(f"grid start {self.start!r} exceeds stop {self.stop!r}", field="start")

    def values(self):
        start, stop, step = (Decimal(repr(float(x))) for x in (self.start, self.stop, self.step))
        count = int((stop - start) / step) + 1
        return tuple(float(start + i * step) for i in range(count))

    @classmethod
    def parse(cls, text: str) -> "Grid":
        """``"min:max:step"`` or a single value."""
        parts = text.split(":")
        try:
            if len(parts) == 1:
                v = float(parts[0])
                return cls(v, v, 1.0)
            if len(parts) == 3:
                return cls(*(float(p) for p in parts))
        except ValueError:
            pass
        raise ValidationError(f"grid must be 'min:max:step' or a number, got {text!r}", field="grid")


GridLike = Union[Grid, Sequence[float]]


def grid_values(grid: GridLike, name: str = "grid"):
    values = grid.values() if isinstance(grid, Grid) else tuple(float(v) for v in grid)
    if not values:
        raise ValidationError(f"grid for {name} is empty", field=name)
    return values


def is_feasible(e: DesignEvaluation, alpha_min: float = ALPHA_MIN, f_target: float = 0.0) -> bool:
    return e.alpha >= alpha_min and e.f_design >= f_target


# -- sweeps --------------------------------------------------------------------


@dataclass(frozen=True)
class DesignContext:
    """Everything held fixed while a sweep varies geometry."""

    geometry: Geometry
    material: MaterialSpec
    servo: ServoSpec
    closure: Optional[Closure] = None
    pcr: Optional[PcrModel] = None
    servo_cap: str = "reference"
    alpha_min: float = ALPHA_MIN


@dataclass(frozen=True)
class SweepSpec:
    """One or two varied geometry parameters.

    With ``fix_shape`` the amplitude A1 is resolved once on the base geometry
    and reused at every point, which isolates the explicit dependence of the
    chain on the varied parameter.
    """

    vary: Mapping[str, GridLike]
    fixed: Mapping[str, float] = field(default_factory=dict)
    fix_shape: bool = False
    columns: Optional[Sequence[str]] = None

    def __post_init__(self):
        names = list(self.vary)
        if not 1 <= len(names) <= 2:
            raise ValidationError(f"a sweep varies one or two parameters, got {len(names)}", field="vary")
        for name in names + list(self.fixed):
            if name not in GEOMETRY_PARAMS:
                raise ValidationError(f"unknown geometry parameter {name!r}", field=name)
        overlap = sorted(set(names) & set(self.fixed))
        if overlap:
            raise ValidationError(f"parameter {overlap[0]!r} is both varied and fixed", field=overlap[0])
        for name in names:
            grid_values(self.vary[name], name)
        if self.columns is not None:
            unknown = [c for c in self.columns if c not in self.header(all_columns=True)]
            if unknown:
                raise ValidationError(f"unknown output column {unknown[0]!r}", field="columns")

    def header(self, all_columns=False):
        varied = list(self.vary)
        full = varied + [f for f in EVALUATION_FIELDS if f not in varied] + ["extrapolated", "error"]
        if all_columns or self.columns is None:
            return full
        return varied + [c for c in self.columns if c not in varied]


def _sweep_point(spec, base, values, shape):
    overrides = dict(spec.fixed)
    overrides.update(zip(spec.vary, values))
    row = dict(zip(spec.vary, values))
    try:
        g = base.geometry.replace(**overrides)
        e = evaluate_design(
            g,
            base.material,
            base.servo,
            closure=base.closure,
            pcr=base.pcr,
            servo_cap=base.servo_cap,
            alpha_min=base.alpha_min,
            shape=shape,
        )
    except HcmError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    for name in EVALUATION_FIELDS:
        row.setdefault(name, getattr(e, name))
    if shape is not None:
        row["closure"] = "fixed_shape"
    row["extrapolated"] = g.t not in base.material.thicknesses
    row["error"] = ""
    return row


def sweep(spec: SweepSpec, base: DesignContext):
    """Evaluate every point of the sweep grid, in lexicographic grid order.

    Each row is a dict keyed by ``spec.header(all_columns=True)``. Points that
    fail validation or evaluation yield a row with only the varied values and
    an ``error`` message.
    """
    shape = None
    if spec.fix_shape:
        base_geometry = base.geometry.replace(**dict(spec.fixed))
        shape = model.resolve_mode_shape(base_geometry, base.closure)
    grids = [grid_values(spec.vary[name], name) for name in spec.vary]
    return [_sweep_point(spec, base, values, shape) for values in itertools.product(*grids)]


def _render(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows, header) -> str:
    """CSV text with LF line endings and shortest round-trip number rendering."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_render(row.get(col)) for col in header])
    return buf.getvalue()


# -- search --------------------------------------------------------------------


def _input_key(e):
    return (e.l, e.D, e.t, e.h, e.r, e.material, e.servo)


OBJECTIVES = {
    "frequency": lambda e: (-e.f_design, -e.alpha, e.moving_mass, _input_key(e)),
    "alpha": lambda e: (-e.alpha, -e.f_design, e.moving_mass, _input_key(e)),
    "mass": lambda e: (e.moving_mass, -e.f_design, -e.alpha, _input_key(e)),
}


@dataclass(frozen=True)
class SearchConfig:
    """Exhaustive search settings.

    ``grids`` must cover l, D, h and r. Thickness comes from each material's
    catalog list unless ``continuous_t`` is set, in which case ``grids['t']``
    is used for every material.
    """

    grids: Mapping[str, GridLike]
    materials: Optional[Sequence[str]] = None
    servos: Optional[Sequence[str]] = None
    closure: Optional[Closure] = None
    pcr: Optional[PcrModel] = None
    servo_cap: str = "reference"
    alpha_min: float = ALPHA_MIN
    f_target: float = 0.0
    objective: str = "frequency"
    continuous_t: bool = False
    n_jobs: int = 1

    def __post_init__(self):
        required = ("l", "D", "h", "r") + (("t",) if self.continuous_t else ())
        for name in self.grids:
            if name not in GEOMETRY_PARAMS:
                raise ValidationError(f"unknown grid parameter {name!r}", field=name)
        for name in required:
            if name not in self.grids:
                raise ValidationError(f"missing grid for {name!r}", field=name)
            grid_values(self.grids[name], name)
        if not self.continuous_t and "t" in self.grids:
            raise ValidationError("a thickness grid requires continuous_t", field="t")
        if not math.isfinite(self.alpha_min) or self.alpha_min <= 0:
            raise ValidationError(f"alpha_min must be > 0, got {self.alpha_min!r}", field="alpha_min")
        if not math.isfinite(self.f_target) or self.f_target < 0:
            raise ValidationError(f"f_target must be >= 0, got {self.f_target!r}", field="f_target")
        if self.objective not in OBJECTIVES:
            raise ValidationError(f"objective must be one of {sorted(OBJECTIVES)}", field="objective")
        if self.n_jobs < 1:
            raise ValidationError("n_jobs must be >= 1", field="n_jobs")


def _selected(mapping, names, kind, lookup):
    if names is None:
        return list(mapping.values())
    return [lookup(n) for n in sorted(set(names))]


def candidates(cfg: SearchConfig, cat: Catalog):
    """Every (geometry, material, servo) combination the search evaluates.

    Combinations whose geometry violates an invariant (D >= l) are dropped.
    """
    materials = _selected(cat.materials, cfg.materials, "material", cat.material)
    servos = _selected(cat.servos, cfg.servos, "servo", cat.servo)
    ls, Ds, hs, rs = (grid_values(cfg.grids[p], p) for p in ("l", "D", "h", "r"))
    out = []
    for mat in materials:
        ts = grid_values(cfg.grids["t"], "t") if cfg.continuous_t else mat.thicknesses
        for l, D, t, h, r in itertools.product(ls, Ds, ts, hs, rs):
            try:
                g = Geometry(l, D, t, h, r)
            except ValidationError:
                continue
            for s in servos:
                out.append((g, mat, s))
    return out


def search(cfg: SearchConfig, cat: Catalog):
    """Feasible designs over the full grid, best first by ``cfg.objective``."""

    def evaluate(combo):
        g, mat, s = combo
        try:
            return evaluate_design(
                g, mat, s, closure=cfg.closure, pcr=cfg.pcr, servo_cap=cfg.servo_cap, alpha_min=cfg.alpha_min
            )
        except HcmError:
            return None

    combos = candidates(cfg, cat)
    if cfg.n_jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.n_jobs) as pool:
            evaluations = list(pool.map(evaluate, combos))
    else:
        evaluations = [evaluate(c) for c in combos]
    feasible = [e for e in evaluations if e is not None and is_feasible(e, cfg.alpha_min, cfg.f_target)]
    return sorted(feasible, key=OBJECTIVES[cfg.objective])
