"""Servo coupling: frequency caps, design factor, design frequency, speed."""
import math
from dataclasses import asdict, dataclass
from decimal import Decimal
from typing import Optional

from . import model
from .errors import DegenerateShapeError, ValidationError
from .model import Closure, Geometry, HcmDerived, MaterialSpec, ModeShape, PcrModel

#: Body lengths per beat observed across HCM swimmers.
BPB_LO = 0.34
BPB_HI = 0.54
#: Default minimum design factor.
ALPHA_MIN = 1.0

SERVO_CAP_MODES = ("reference", "computed")


@dataclass(frozen=True)
class ServoSpec:
    """Servo catalog entry.

    Units: ``T_servo`` mm*N (stall), ``speed`` rad/s, ``weight`` g,
    ``L_horn`` mm, ``f_ref`` Hz (the catalog's own frequency cap).
    """

    name: str
    T_servo: float
    speed: float
    weight: float
    L_horn: float
    f_ref: float

    def __post_init__(self):
        for attr in ("T_servo", "speed", "weight", "L_horn", "f_ref"):
            model._check_positive(attr, getattr(self, attr), f"servos.{self.name}")


@dataclass(frozen=True)
class SpeedBand:
    lo: float
    hi: float
    bpb_lo: float = BPB_LO
    bpb_hi: float = BPB_HI

    def __post_init__(self):
        if not 0 <= self.lo <= self.hi:
            raise ValidationError(f"speed band must satisfy 0 <= lo <= hi, got [{self.lo}, {self.hi}]")

    def as_list(self):
        return [self.lo, self.hi]


@dataclass(frozen=True)
class DesignEvaluation:
    """Every quantity of one geometry/material/servo evaluation.

    Field order is the column order of sweep CSVs and JSON reports.
    """

    l: float
    D: float
    t: float
    h: float
    r: float
    material: str
    servo: str
    L1: float
    L2: float
    A1: float
    closure: str
    pcr_model: str
    P_cr: float
    U_barr: float
    T_act: float
    T_act_literal: float
    u_L1: float
    u_tip: float
    t_star: float
    f_m_hcm: float
    T_servo: float
    alpha: float
    servo_cap: str
    f_m_servo: float
    f_design: float
    limiting: str
    speed_lo: float
    speed_hi: float
    moving_mass: float
    alpha_min: float
    feasible: bool

    @property
    def geometry(self) -> Geometry:
        return Geometry(self.l, self.D, self.t, self.h, self.r)

    @property
    def derived(self) -> HcmDerived:
        return HcmDerived(
            P_cr=self.P_cr,
            U_barr=self.U_barr,
            T_act=self.T_act,
            u_L1=self.u_L1,
            u_tip=self.u_tip,
            t_star=self.t_star,
            f_m_hcm=self.f_m_hcm,
        )

    @property
    def speed_band(self) -> SpeedBand:
        return SpeedBand(self.speed_lo, self.speed_hi)

    def as_dict(self):
        return asdict(self)


def servo_frequency_cap(s: ServoSpec, u_L1: float, mode: str = "computed") -> float:
    """Highest undulation frequency the servo can drive (Hz).

    ``computed``: horn-tip linear speed over the stroke travel per period,
    speed * L_horn / (4 u(L1)). ``reference``: the catalog value ``f_ref``.
    """
    if mode == "reference":
        return s.f_ref
    if mode != "computed":
        raise ValidationError(f"servo cap mode must be one of {SERVO_CAP_MODES}, got {mode!r}", field="servo_cap")
    if u_L1 <= 0:
        raise DegenerateShapeError(f"actuation-point displacement u(L1)={u_L1!r}; A1 or L1 is zero")
    return s.speed * s.L_horn / (4.0 * u_L1)


def design_factor(T_servo: float, T_act: float) -> float:
    return T_servo / T_act


def design_frequency(f_hcm: float, f_servo: float):
    """(min of the two caps, limiting side); a tie is reported as ``"servo"``."""
    if f_servo <= f_hcm:
        return f_servo, "servo"
    return f_hcm, "hcm"


def _decimal(x):
    return Decimal(repr(float(x)))


def estimate_speed(f: float, band: Optional[SpeedBand] = None) -> SpeedBand:
    """Swimming speed band (BL/s) at undulation frequency ``f``.

    Two beats per undulation period. Products are formed in decimal on the
    shortest representations of the inputs, so 10 Hz gives exactly 6.8 and 10.8.
    """
    if not math.isfinite(f) or f < 0:
        raise ValidationError(f"frequency must be finite and >= 0, got {f!r}", field="f")
    bpb_lo = band.bpb_lo if band is not None else BPB_LO
    bpb_hi = band.bpb_hi if band is not None else BPB_HI
    two_f = 2 * _decimal(f)
    return SpeedBand(
        lo=float(two_f * _decimal(bpb_lo)),
        hi=float(two_f * _decimal(bpb_hi)),
        bpb_lo=bpb_lo,
        bpb_hi=bpb_hi,
    )


def moving_mass(g: Geometry, mat: MaterialSpec, s: ServoSpec) -> float:
    """Ribbon mass t*h*2l*rho_s plus servo weight, in grams."""
    return g.t * g.h * 2.0 * g.l * mat.rho_s * 1e6 + s.weight


def evaluate_design(
    g: Geometry,
    mat: MaterialSpec,
    s: ServoSpec,
    closure: Optional[Closure] = None,
    pcr: Optional[PcrModel] = None,
    servo_cap: str = "reference",
    alpha_min: float = ALPHA_MIN,
    shape: Optional[ModeShape] = None,
) -> DesignEvaluation:
    """Full evaluation of one design.

    A design factor below ``alpha_min`` marks the result infeasible rather
    than raising.
    """
    if servo_cap not in SERVO_CAP_MODES:
        raise ValidationError(f"servo cap mode must be one of {SERVO_CAP_MODES}, got {servo_cap!r}", field="servo_cap")
    if shape is None:
        shape = model.resolve_mode_shape(g, closure)
    hcm = model.evaluate_hcm(g, mat, s.L_horn, pcr=pcr, shape=shape)
    L1, L2 = model.section_split(g)
    alpha = design_factor(s.T_servo, hcm.T_act)
    f_m_servo = servo_frequency_cap(s, hcm.u_L1, servo_cap)
    f_design, limiting = design_frequency(hcm.f_m_hcm, f_m_servo)
    speed = estimate_speed(f_design)
    return DesignEvaluation(
        l=g.l,
        D=g.D,
        t=g.t,
        h=g.h,
        r=g.r,
        material=mat.name,
        servo=s.name,
        L1=L1,
        L2=L2,
        A1=shape.A1,
        closure=shape.closure,
        pcr_model=(pcr or model.EulerStrip()).tag,
        P_cr=hcm.P_cr,
        U_barr=hcm.U_barr,
        T_act=hcm.T_act,
        T_act_literal=model.actuation_torque_literal(hcm.U_barr, s.L_horn, hcm.u_L1),
        u_L1=hcm.u_L1,
        u_tip=hcm.u_tip,
        t_star=hcm.t_star,
        f_m_hcm=hcm.f_m_hcm,
        T_servo=s.T_servo,
        alpha=alpha,
        servo_cap=servo_cap,
        f_m_servo=f_m_servo,
        f_design=f_design,
        limiting=limiting,
        speed_lo=speed.lo,
        speed_hi=speed.hi,
        moving_mass=moving_mass(g, mat, s),
        alpha_min=alpha_min,
        feasible=alpha >= alpha_min,
    )
