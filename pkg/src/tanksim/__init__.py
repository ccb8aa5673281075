"""Seismic analysis of cylindrical liquid-storage tanks.

Reduced-order spring-mass models, a meridional FE sloshing eigensolver,
a flexible-wall added-mass beam model, and a bottom-plate uplift solver,
driven by ingested and similitude-scaled ground-motion records.
"""

from tanksim.model import (
    TankGeometry,
    ShellMaterial,
    Liquid,
    ScaleModel,
    TankSpec,
    load_spec,
    bundled_spec,
)

__version__ = "0.1.0"

__all__ = [
    "TankGeometry",
    "ShellMaterial",
    "Liquid",
    "ScaleModel",
    "TankSpec",
    "load_spec",
    "bundled_spec",
]
