"""Material/servo catalogs, prototype presets and their JSON file format.

A catalog document is a JSON object with exactly three sections::

    {
      "materials": {"<name>": {"E": MPa, "rho_s": t/mm^3, "thicknesses": [mm, ...],
                               "specific_modulus": mm^2/s^2 (optional)}},
      "servos":    {"<name>": {"T_servo": mm*N, "speed": rad/s, "weight": g,
                               "L_horn": mm, "f_ref": Hz}},
      "presets":   {"<name>": {"material": name, "servo": name,
                               "l": mm, "D": mm, "t": mm, "h": mm, "r": 1,
                               "T_act_ref": mm*N (optional), "u_tip_ref": mm (optional)}}
    }

Units are fixed by the format. The canonical rendering sorts entries by name,
writes fields in the order above, omits absent optional fields and prints every
number as the shortest decimal that round-trips.
"""
import json
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Optional

from .drive import ServoSpec
from .errors import CatalogError, ValidationError
from .model import Geometry, MaterialSpec

MATERIAL_FIELDS = ("E", "rho_s", "thicknesses", "specific_modulus")
SERVO_FIELDS = ("T_servo", "speed", "weight", "L_horn", "f_ref")
PRESET_FIELDS = ("material", "servo", "l", "D", "t", "h", "r", "T_act_ref", "u_tip_ref")
SECTIONS = ("materials", "servos", "presets")


@dataclass(frozen=True)
class Preset:
    """A named prototype with the reference values reported for it."""

    name: str
    geometry: Geometry
    material: str
    servo: str
    T_act_ref: Optional[float] = None
    u_tip_ref: Optional[float] = None


@dataclass(frozen=True)
class Catalog:
    materials: Mapping[str, MaterialSpec] = field(default_factory=dict)
    servos: Mapping[str, ServoSpec] = field(default_factory=dict)
    presets: Mapping[str, Preset] = field(default_factory=dict)

    def __post_init__(self):
        for section in SECTIONS:
            entries = dict(getattr(self, section))
            for key, entry in entries.items():
                if entry.name != key:
                    raise CatalogError(f"{section}.{key}: entry is named {entry.name!r}", field=f"{section}.{key}")
            object.__setattr__(self, section, MappingProxyType(dict(sorted(entries.items()))))
        for name, preset in self.presets.items():
            if preset.material not in self.materials:
                raise CatalogError(
                    f"preset {name!r} references unknown material {preset.material!r}",
                    field=f"presets.{name}.material",
                )
            if preset.servo not in self.servos:
                raise CatalogError(
                    f"preset {name!r} references unknown servo {preset.servo!r}",
                    field=f"presets.{name}.servo",
                )

    def material(self, name: str) -> MaterialSpec:
        return _lookup(self.materials, "material", name)

    def servo(self, name: str) -> ServoSpec:
        return _lookup(self.servos, "servo", name)

    def preset(self, name: str) -> Preset:
        return _lookup(self.presets, "preset", name)


def _lookup(mapping, kind, name):
    try:
        return mapping[name]
    except KeyError:
        known = ", ".join(mapping) or "none"
        raise ValidationError(f"unknown {kind} {name!r} (known: {known})", field=kind) from None


def builtin_catalog() -> Catalog:
    """Typical sheet materials, common hobby servos and the three prototypes."""
    materials = [
        MaterialSpec("PETG", E=1.7e3, rho_s=1.25e-9, thicknesses=(0.381, 0.762), specific_modulus=1.42e12),
        MaterialSpec("CFRP", E=64e3, rho_s=1.6e-9, thicknesses=(0.5, 0.79), specific_modulus=40e12),
        MaterialSpec("steel", E=200e3, rho_s=7.8e-9, thicknesses=(0.15, 0.5), specific_modulus=25e12),
    ]
    servos = [
        ServoSpec("MG90S", T_servo=245, speed=10.5, weight=14, L_horn=10, f_ref=4.5),
        ServoSpec("B24CLM", T_servo=588, speed=12.3, weight=22, L_horn=20, f_ref=6.15),
        ServoSpec("A66BHLW", T_servo=3234, speed=15.4, weight=66, L_horn=25, f_ref=13.6),
        ServoSpec("A06CLS", T_servo=294, speed=20.1, weight=7, L_horn=13, f_ref=17.0),
        ServoSpec("DS3230MG", T_servo=3381, speed=6.16, weight=58, L_horn=25, f_ref=3.08),
        ServoSpec("SG92R", T_servo=245, speed=10.5, weight=9, L_horn=10, f_ref=4.5),
        ServoSpec("ZOSKAY", T_servo=3430, speed=9.5, weight=60, L_horn=25, f_ref=4.76),
    ]
    presets = [
        # servo for the pink fish is not documented; MG90S is a placeholder
        Preset("pink", Geometry(87.5, 17.1, 0.381, 15, 6), "PETG", "MG90S", T_act_ref=28.3),
        Preset("coral", Geometry(87, 11.8, 0.762, 15, 1.9), "PETG", "MG90S", T_act_ref=188.7),
        Preset("carbonfish", Geometry(137, 10, 0.5, 10, 2.1), "CFRP", "A66BHLW", T_act_ref=1177, u_tip_ref=36),
    ]
    return _normalized(
        Catalog(
            materials={m.name: m for m in materials},
            servos={s.name: s for s in servos},
            presets={p.name: p for p in presets},
        )
    )


def _normalized(c: Catalog) -> Catalog:
    # integers written in source become floats so built-in and parsed catalogs compare equal
    return parse_catalog(serialize_catalog(c))


# -- serialization -------------------------------------------------------------


def _number(x):
    return float(x)


def _material_doc(m):
    doc = {"E": _number(m.E), "rho_s": _number(m.rho_s), "thicknesses": [_number(t) for t in m.thicknesses]}
    if m.specific_modulus is not None:
        doc["specific_modulus"] = _number(m.specific_modulus)
    return doc


def _servo_doc(s):
    return {f: _number(getattr(s, f)) for f in SERVO_FIELDS}


def _preset_doc(p):
    doc = {"material": p.material, "servo": p.servo}
    doc.update(zip(("l", "D", "t", "h", "r"), map(_number, p.geometry.as_tuple())))
    for opt in ("T_act_ref", "u_tip_ref"):
        if getattr(p, opt) is not None:
            doc[opt] = _number(getattr(p, opt))
    return doc


def catalog_to_dict(c: Catalog) -> dict:
    return {
        "materials": {k: _material_doc(v) for k, v in sorted(c.materials.items())},
        "servos": {k: _servo_doc(v) for k, v in sorted(c.servos.items())},
        "presets": {k: _preset_doc(v) for k, v in sorted(c.presets.items())},
    }


def serialize_catalog(c: Catalog) -> str:
    """Canonical document text (UTF-8, LF, trailing newline)."""
    return json.dumps(catalog_to_dict(c), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


# -- parsing -------------------------------------------------------------------


def _reject_constant(name):
    raise ValueError(f"non-finite number {name} is not allowed")


def _read_number(entry, key, where, required=True):
    path = f"{where}.{key}"
    if key not in entry:
        if required:
            raise CatalogError(f"missing field {path}", field=path)
        return None
    value = entry[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise CatalogError(f"{path} must be a decimal number, got {value!r}", field=path)
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise CatalogError(f"{path} must be > 0, got {value!r}", field=path)
    return value


def _read_name(entry, key, where):
    path = f"{where}.{key}"
    value = entry.get(key)
    if not isinstance(value, str) or not value:
        raise CatalogError(f"{path} must be a non-empty string, got {value!r}", field=path)
    return value


def _check_fields(entry, allowed, where):
    if not isinstance(entry, dict):
        raise CatalogError(f"{where} must be an object", field=where)
    unknown = sorted(set(entry) - set(allowed))
    if unknown:
        raise CatalogError(f"unknown field {where}.{unknown[0]}", field=f"{where}.{unknown[0]}")


def _rewrap(exc, where):
    # model-level failures carry a short field name; report the document path
    leaf = exc.field.split(".")[-1] if exc.field else None
    return CatalogError(str(exc), field=f"{where}.{leaf}" if leaf else where)


def catalog_from_dict(doc) -> Catalog:
    """Validate an already-decoded catalog document."""
    if not isinstance(doc, dict):
        raise CatalogError("catalog document must be a JSON object")
    unknown = sorted(set(doc) - set(SECTIONS))
    if unknown:
        raise CatalogError(f"unknown section {unknown[0]!r}", field=unknown[0])
    for section in SECTIONS:
        if section not in doc:
            raise CatalogError(f"missing section {section!r}", field=section)
        if not isinstance(doc[section], dict):
            raise CatalogError(f"section {section!r} must be an object", field=section)

    materials = {}
    for name, entry in doc["materials"].items():
        where = f"materials.{name}"
        _check_fields(entry, MATERIAL_FIELDS, where)
        thicknesses = entry.get("thicknesses")
        if not isinstance(thicknesses, list):
            raise CatalogError(f"{where}.thicknesses must be a list", field=f"{where}.thicknesses")
        ts = tuple(_read_number({"thicknesses": t}, "thicknesses", where) for t in thicknesses)
        try:
            materials[name] = MaterialSpec(
                name,
                E=_read_number(entry, "E", where),
                rho_s=_read_number(entry, "rho_s", where),
                thicknesses=ts,
                specific_modulus=_read_number(entry, "specific_modulus", where, required=False),
            )
        except CatalogError:
            raise
        except ValidationError as exc:
            raise _rewrap(exc, where) from exc

    servos = {}
    for name, entry in doc["servos"].items():
        where = f"servos.{name}"
        _check_fields(entry, SERVO_FIELDS, where)
        servos[name] = ServoSpec(name, *(_read_number(entry, f, where) for f in SERVO_FIELDS))

    presets = {}
    for name, entry in doc["presets"].items():
        where = f"presets.{name}"
        _check_fields(entry, PRESET_FIELDS, where)
        dims = [_read_number(entry, f, where) for f in ("l", "D", "t", "h", "r")]
        try:
            geometry = Geometry(*dims)
        except ValidationError as exc:
            raise _rewrap(exc, where) from exc
        presets[name] = Preset(
            name,
            geometry,
            material=_read_name(entry, "material", where),
            servo=_read_name(entry, "servo", where),
            T_act_ref=_read_number(entry, "T_act_ref", where, required=False),
            u_tip_ref=_read_number(entry, "u_tip_ref", where, required=False),
        )

    return Catalog(materials=materials, servos=servos, presets=presets)


def parse_catalog(text: str) -> Catalog:
    """Parse and fully validate a catalog document.

    Raises:
        CatalogError: syntax errors (with ``line``/``column``), unknown or
            missing fields, non-positive numbers, dangling preset references.
    """
    try:
        doc = json.loads(text, parse_constant=_reject_constant, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as exc:
        raise CatalogError(
            f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            line=exc.lineno,
            column=exc.colno,
        ) from exc
    except ValueError as exc:
        raise CatalogError(str(exc)) from exc
    return catalog_from_dict(doc)


def _no_duplicates(pairs):
    out = {}
    for key, value in pairs:
        if key in out:
            raise ValueError(f"duplicate key {key!r}")
        out[key] = value
    return out


def load_catalog(path=None) -> Catalog:
    """Read a catalog file, or return the built-in catalog when ``path`` is None."""
    if path is None:
        return builtin_catalog()
    with open(path, encoding="utf-8") as fh:
        return parse_catalog(fh.read())
