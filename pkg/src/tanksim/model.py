"""Domain types for the tank-liquid system and similitude scaling.

All types are immutable after construction and safe to share across
concurrent analyses.  Specs are read from TOML files with sections
[geometry], [shell], [liquid], [scale]; two case-study files are
bundled (``slender``, ``broad``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from importlib import resources
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

ANCHORED = "anchored"
UNANCHORED = "unanchored"


@dataclass(frozen=True)
class TankGeometry:
    radius: float               # R, m
    fill_height: float          # H, m
    total_height: float         # m
    shell_thickness: float      # s, m
    bottom_thickness: float     # m
    anchorage: str = ANCHORED

    @property
    def slenderness(self) -> float:
        """gamma = H / R."""
        return self.fill_height / self.radius

    @property
    def freeboard(self) -> float:
        """Distance from still liquid surface to tank top."""
        return self.total_height - self.fill_height


@dataclass(frozen=True)
class ShellMaterial:
    density: float              # kg/m^3
    elastic_modulus: float      # E, Pa
    poisson_ratio: float        # nu
    yield_stress: float = math.inf  # Pa; only the uplift plastic-limit check reads it


@dataclass(frozen=True)
class Liquid:
    density: float              # rho, kg/m^3
    bulk_modulus: float         # K, Pa

    @property
    def sound_speed(self) -> float:
        """c = sqrt(K / rho), m/s."""
        return math.sqrt(self.bulk_modulus / self.density)


# Water model used by both bundled case studies.
WATER = Liquid(density=998.21, bulk_modulus=2.15e9)


@dataclass(frozen=True)
class ScaleModel:
    """Froude similitude at unchanged gravity: t ~ sqrt(L), a ~ 1."""

    length_ratio: float         # lambda_L, model / prototype

    @property
    def time_ratio(self) -> float:
        return math.sqrt(self.length_ratio)

    @property
    def acceleration_ratio(self) -> float:
        return 1.0

    @property
    def displacement_ratio(self) -> float:
        return self.length_ratio


@dataclass(frozen=True)
class TankSpec:
    geometry: TankGeometry
    shell: ShellMaterial
    liquid: Liquid
    empty_mass: float           # kg
    gravity: float = 9.81       # m/s^2; a field so similitude tests can perturb it
    scale: ScaleModel | None = None
    name: str = ""


def liquid_mass(spec: TankSpec) -> float:
    """Contained liquid mass rho * pi * R^2 * H, kg."""
    g = spec.geometry
    return spec.liquid.density * math.pi * g.radius ** 2 * g.fill_height


def total_mass(spec: TankSpec) -> float:
    return spec.empty_mass + liquid_mass(spec)


def validate(spec: TankSpec) -> list[str]:
    """Collect invariant violations; empty list when the spec is valid."""
    v = []
    g = spec.geometry
    if not g.radius > 0:
        v.append(f"radius must be > 0, got {g.radius}")
    if not g.shell_thickness > 0:
        v.append(f"shell_thickness must be > 0, got {g.shell_thickness}")
    if not g.bottom_thickness > 0:
        v.append(f"bottom_thickness must be > 0, got {g.bottom_thickness}")
    if not g.fill_height > 0:
        v.append(f"fill_height must be > 0, got {g.fill_height}")
    elif g.fill_height > g.total_height:
        v.append(
            f"fill_height {g.fill_height} exceeds total_height {g.total_height}"
        )
    if g.anchorage not in (ANCHORED, UNANCHORED):
        v.append(f"anchorage must be anchored|unanchored, got {g.anchorage!r}")
    if g.radius > 0 and g.fill_height > 0 and not math.isfinite(g.slenderness):
        v.append("slenderness H/R is not finite")

    s = spec.shell
    if not s.density > 0:
        v.append(f"shell density must be > 0, got {s.density}")
    if not s.elastic_modulus > 0:
        v.append(f"elastic_modulus must be > 0, got {s.elastic_modulus}")
    if not 0 <= s.poisson_ratio < 0.5:
        v.append(f"poisson_ratio must lie in [0, 0.5), got {s.poisson_ratio}")

    liq = spec.liquid
    if not liq.density > 0:
        v.append(f"liquid density must be > 0, got {liq.density}")
    if not liq.bulk_modulus > 0:
        v.append(f"bulk_modulus must be > 0, got {liq.bulk_modulus}")

    if not spec.empty_mass >= 0:
        v.append(f"empty_mass must be >= 0, got {spec.empty_mass}")
    if not spec.gravity > 0:
        v.append(f"gravity must be > 0, got {spec.gravity}")
    if spec.scale is not None and not 0 < spec.scale.length_ratio <= 1:
        v.append(f"length_ratio must lie in (0, 1], got {spec.scale.length_ratio}")
    return v


def require_valid(spec: TankSpec) -> None:
    violations = validate(spec)
    if violations:
        raise ValueError("invalid tank spec: " + "; ".join(violations))


# -- serialization ----------------------------------------------------------

def spec_to_dict(spec: TankSpec) -> dict:
    d = {
        "name": spec.name,
        "geometry": asdict(spec.geometry),
        "shell": asdict(spec.shell),
        "liquid": asdict(spec.liquid),
        "masses": {"empty_mass": spec.empty_mass},
        "gravity": spec.gravity,
    }
    if spec.scale is not None:
        d["scale"] = asdict(spec.scale)
    return d


def spec_from_dict(d: dict) -> TankSpec:
    scale = None
    if "scale" in d:
        scale = ScaleModel(length_ratio=float(d["scale"]["length_ratio"]))
    shell = dict(d["shell"])
    shell.setdefault("yield_stress", math.inf)
    return TankSpec(
        geometry=TankGeometry(**{k: (v if k == "anchorage" else float(v))
                                 for k, v in d["geometry"].items()}),
        shell=ShellMaterial(**{k: float(v) for k, v in shell.items()}),
        liquid=Liquid(**{k: float(v) for k, v in d["liquid"].items()}),
        empty_mass=float(d["masses"]["empty_mass"]),
        gravity=float(d.get("gravity", 9.81)),
        scale=scale,
        name=str(d.get("name", "")),
    )


def _toml_value(v) -> str:
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return repr(v)  # repr round-trips doubles exactly
    return repr(v)


def spec_to_toml(spec: TankSpec) -> str:
    d = spec_to_dict(spec)
    lines = [f"name = {_toml_value(d['name'])}",
             f"gravity = {_toml_value(d['gravity'])}", ""]
    for section in ("geometry", "shell", "liquid", "masses", "scale"):
        if section not in d:
            continue
        lines.append(f"[{section}]")
        for k, v in d[section].items():
            lines.append(f"{k} = {_toml_value(v)}")
        lines.append("")
    return "\n".join(lines)


def load_spec(path: str | Path) -> TankSpec:
    with open(path, "rb") as fh:
        return spec_from_dict(tomllib.load(fh))


def bundled_spec(name: str) -> TankSpec:
    """Load one of the bundled case-study specs: 'slender' or 'broad'."""
    ref = resources.files("tanksim.data").joinpath(f"{name}.toml")
    try:
        raw = ref.read_bytes()
    except FileNotFoundError:
        raise KeyError(f"no bundled spec named {name!r} (use 'slender' or 'broad')")
    return spec_from_dict(tomllib.loads(raw.decode()))
