"""Design tools for servo-driven hair-clip-mechanism (HCM) compliant robots."""

__version__ = "0.1.0"

from .catalog import Catalog, Preset, builtin_catalog, load_catalog, parse_catalog, serialize_catalog
from .drive import (
    DesignEvaluation,
    ServoSpec,
    SpeedBand,
    design_factor,
    design_frequency,
    estimate_speed,
    evaluate_design,
    servo_frequency_cap,
)
from .errors import (
    CatalogError,
    ConvergenceError,
    DegenerateShapeError,
    DomainError,
    HcmError,
    NoSignChangeError,
    NumericError,
    ValidationError,
)
from .model import (
    Calibrated,
    DirectLoad,
    EndShortening,
    EulerStrip,
    Explicit,
    Geometry,
    HcmDerived,
    MaterialSpec,
    ModeShape,
    resolve_mode_shape,
)
from .search import DesignContext, Grid, SearchConfig, SweepSpec, is_feasible, search, sweep
