"""Mechanics of the hair-clip mechanism (HCM) ribbon.

Units throughout are mm, tonne, s, so stress is MPa, force N, energy and
torque mm*N, and E/rho_s comes out in mm^2/s^2.

The buckled ribbon's torsion angle is

    phi(z) = sqrt(l - z) * A1 * J_{1/4}(BETA * ((l - z) / l)^2)

and its lateral displacement is u(z) = integral of phi from 0 to z. With
s = (l - z) / l this becomes u(z) = A1 * l^(3/2) * G((l - z) / l), where
G(s0) = integral over [s0, 1] of sqrt(s) * J_{1/4}(BETA * s^2) ds depends only
on the dimensionless position, which is what makes it cacheable.
"""
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Union

from . import numerics
from .errors import DegenerateShapeError, DomainError, ValidationError

#: Shape constant of the first buckling mode.
BETA = 2.7809
#: Bessel order of the mode shape.
ORDER = 0.25


def _check_positive(name, value, owner=None):
    label = f"{owner}.{name}" if owner else name
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{label} must be a number, got {value!r}", field=label)
    if not math.isfinite(value) or value <= 0:
        raise ValidationError(f"{label} must be finite and > 0, got {value!r}", field=label)


@dataclass(frozen=True)
class Geometry:
    """Ribbon dimensions.

    Attributes:
        l: Half-ribbon length L1 + L2 (mm).
        D: Prestressing displacement (mm), strictly less than ``l``.
        t: Sheet thickness (mm).
        h: Ribbon width (mm).
        r: Section ratio L2 / L1.
    """

    l: float
    D: float
    t: float
    h: float
    r: float

    def __post_init__(self):
        for name in ("l", "D", "t", "h", "r"):
            _check_positive(name, getattr(self, name), "geometry")
        if self.D >= self.l:
            raise ValidationError(
                f"prestress displacement D={self.D!r} must be less than half length l={self.l!r}",
                field="geometry.D",
            )

    @property
    def L1(self) -> float:
        return section_split(self)[0]

    @property
    def L2(self) -> float:
        return section_split(self)[1]

    def as_tuple(self):
        return (self.l, self.D, self.t, self.h, self.r)

    def replace(self, **changes) -> "Geometry":
        values = dict(zip(("l", "D", "t", "h", "r"), self.as_tuple()))
        values.update(changes)
        return Geometry(**values)


@dataclass(frozen=True)
class MaterialSpec:
    """Sheet material.

    ``specific_modulus`` carries a tabulated E/rho_s (mm^2/s^2) when the source
    table prints one; it takes precedence over the ratio of the two columns,
    which disagree by a few percent for some tabulated materials.
    """

    name: str
    E: float
    rho_s: float
    thicknesses: tuple = ()
    specific_modulus: Optional[float] = None

    def __post_init__(self):
        owner = f"materials.{self.name}"
        _check_positive("E", self.E, owner)
        _check_positive("rho_s", self.rho_s, owner)
        object.__setattr__(self, "thicknesses", tuple(self.thicknesses))
        for t in self.thicknesses:
            _check_positive("thicknesses", t, owner)
        if self.specific_modulus is not None:
            _check_positive("specific_modulus", self.specific_modulus, owner)
        if not math.isfinite(self.E / self.rho_s):
            raise ValidationError(f"{owner}: E/rho_s is not finite", field=f"{owner}.E")

    @property
    def E_over_rho(self) -> float:
        if self.specific_modulus is not None:
            return self.specific_modulus
        return self.E / self.rho_s


# -- A1 closures ---------------------------------------------------------------


@dataclass(frozen=True)
class Explicit:
    """Use the given amplitude coefficient A1 (mm^-1/2) as is."""

    A1: float
    tag = "explicit"

    def __post_init__(self):
        if not math.isfinite(self.A1) or self.A1 < 0:
            raise ValidationError(f"explicit A1 must be finite and >= 0, got {self.A1!r}", field="A1")


@dataclass(frozen=True)
class Calibrated:
    """Choose A1 so that the tip displacement u(l) equals ``u_target`` (mm)."""

    u_target: float
    tag = "calibrated"

    def __post_init__(self):
        _check_positive("u_target", self.u_target)


@dataclass(frozen=True)
class EndShortening:
    """Choose A1 from the small-rotation shortening identity D = kappa/2 * int phi^2 dz."""

    kappa: float = 1.0
    tag = "end_shortening"

    def __post_init__(self):
        _check_positive("kappa", self.kappa)


Closure = Union[Explicit, Calibrated, EndShortening]


@dataclass(frozen=True)
class ModeShape:
    A1: float
    geometry: Geometry
    closure: str = "explicit"
    beta: float = field(default=BETA, init=False)


# -- critical-load models ------------------------------------------------------


@dataclass(frozen=True)
class DirectLoad:
    """A user-supplied critical load (N)."""

    P_cr: float
    tag = "direct"

    def __post_init__(self):
        _check_positive("P_cr", self.P_cr)


@dataclass(frozen=True)
class EulerStrip:
    """Euler load pi^2 E I / l^2 of a rectangular strip, I = h t^3 / 12."""

    tag = "euler_strip"


PcrModel = Union[DirectLoad, EulerStrip]


@dataclass(frozen=True)
class HcmDerived:
    P_cr: float
    U_barr: float
    T_act: float
    u_L1: float
    u_tip: float
    t_star: float
    f_m_hcm: float


# -- shape integrals -----------------------------------------------------------


def _profile(s):
    return math.sqrt(s) * numerics.bessel_j(ORDER, BETA * s * s)


@lru_cache(maxsize=8192)
def profile_integral(s0: float) -> float:
    """G(s0): integral of sqrt(s) J_{1/4}(BETA s^2) over [s0, 1]."""
    if not 0.0 <= s0 <= 1.0:
        raise DomainError(f"s0 must lie in [0, 1], got {s0!r}")
    return numerics.integrate(_profile, s0, 1.0)


@lru_cache(maxsize=1)
def squared_profile_integral() -> float:
    """Integral of s J_{1/4}(BETA s^2)^2 over [0, 1]."""
    return numerics.integrate(lambda s: s * numerics.bessel_j(ORDER, BETA * s * s) ** 2, 0.0, 1.0)


# -- operations ----------------------------------------------------------------


def section_split(g: Geometry):
    """Core and outer section lengths (L1, L2) with L1 + L2 = l."""
    # the longer section comes from the ratio and the shorter one as l minus it;
    # that subtraction is exact (Sterbenz), so L1 + L2 == l holds in floating point
    if g.r >= 1.0:
        L2 = g.l * g.r / (1.0 + g.r)
        return g.l - L2, L2
    L1 = g.l / (1.0 + g.r)
    return L1, g.l - L1


def resolve_mode_shape(g: Geometry, closure: Optional[Closure] = None) -> ModeShape:
    """Fix the amplitude coefficient A1 for ``g`` using ``closure``.

    Defaults to ``EndShortening(kappa=1)``.
    """
    if closure is None:
        closure = EndShortening()
    if isinstance(closure, Explicit):
        A1 = closure.A1
    elif isinstance(closure, Calibrated):
        A1 = closure.u_target / (g.l ** 1.5 * profile_integral(0.0))
    elif isinstance(closure, EndShortening):
        A1 = math.sqrt(2.0 * g.D / (closure.kappa * g.l ** 2 * squared_profile_integral()))
    else:
        raise ValidationError(f"unknown closure {closure!r}", field="closure")
    return ModeShape(A1=A1, geometry=g, closure=closure.tag)


def _check_position(m, z):
    if not math.isfinite(z) or not 0.0 <= z <= m.geometry.l:
        raise DomainError(f"z={z!r} outside [0, {m.geometry.l!r}]", field="z")


def torsion_angle(m: ModeShape, z: float) -> float:
    _check_position(m, z)
    l = m.geometry.l
    s = (l - z) / l
    return math.sqrt(l - z) * m.A1 * numerics.bessel_j(ORDER, m.beta * s * s)


def lateral_displacement(m: ModeShape, z: float) -> float:
    """u(z), the integral of the torsion angle from 0 to ``z`` (mm)."""
    _check_position(m, z)
    if m.A1 == 0.0 or z == 0.0:
        return 0.0
    l = m.geometry.l
    return m.A1 * l ** 1.5 * profile_integral((l - z) / l)


def critical_load(g: Geometry, mat: MaterialSpec, model: Optional[PcrModel] = None) -> float:
    """Critical load P_cr (N). Defaults to the Euler strip model."""
    if model is None or isinstance(model, EulerStrip):
        second_moment = g.h * g.t ** 3 / 12.0
        return math.pi ** 2 * mat.E * second_moment / g.l ** 2
    if isinstance(model, DirectLoad):
        return model.P_cr
    raise ValidationError(f"unknown critical-load model {model!r}", field="pcr")


def energy_barrier(P_cr: float, D: float) -> float:
    return 3.0 * P_cr * D


def actuation_torque(U_barr: float, L_horn: float, u_L1: float) -> float:
    """Torque (mm*N) a servo with horn ``L_horn`` needs to snap the ribbon."""
    if u_L1 <= 0.0:
        raise DegenerateShapeError(
            f"actuation-point displacement u(L1)={u_L1!r}; A1 or L1 is zero"
        )
    return U_barr * L_horn / u_L1


def actuation_torque_literal(U_barr: float, L_horn: float, u_L1: float) -> float:
    """Same as :func:`actuation_torque`, written as 2 U L_horn / (2 u(L1))."""
    if u_L1 <= 0.0:
        raise DegenerateShapeError(
            f"actuation-point displacement u(L1)={u_L1!r}; A1 or L1 is zero"
        )
    return 2.0 * U_barr * L_horn / (2.0 * u_L1)


def snap_timescale(g: Geometry, mat: MaterialSpec) -> float:
    """Snap-through timescale t* = (2l)^2 / (t sqrt(E/rho_s)) in seconds."""
    return (2.0 * g.l) ** 2 / (g.t * math.sqrt(mat.E_over_rho))


def hcm_frequency_cap(t_star: float) -> float:
    if t_star <= 0:
        raise ValidationError(f"t_star must be > 0, got {t_star!r}", field="t_star")
    return 1.0 / (2.0 * t_star)


def evaluate_hcm(
    g: Geometry,
    mat: MaterialSpec,
    L_horn: float,
    closure: Optional[Closure] = None,
    pcr: Optional[PcrModel] = None,
    shape: Optional[ModeShape] = None,
) -> HcmDerived:
    """Run the ribbon side of the chain for one geometry.

    ``shape`` overrides ``closure`` when given; its A1 is reused with ``g``.
    """
    if shape is None:
        shape = resolve_mode_shape(g, closure)
    elif shape.geometry != g:
        shape = ModeShape(A1=shape.A1, geometry=g, closure=shape.closure)
    L1, _ = section_split(g)
    u_L1 = lateral_displacement(shape, L1)
    u_tip = lateral_displacement(shape, g.l)
    P_cr = critical_load(g, mat, pcr)
    U_barr = energy_barrier(P_cr, g.D)
    T_act = actuation_torque(U_barr, L_horn, u_L1)
    t_star = snap_timescale(g, mat)
    return HcmDerived(
        P_cr=P_cr,
        U_barr=U_barr,
        T_act=T_act,
        u_L1=u_L1,
        u_tip=u_tip,
        t_star=t_star,
        f_m_hcm=hcm_frequency_cap(t_star),
    )
