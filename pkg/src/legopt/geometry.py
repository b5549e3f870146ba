"""Hollow rectangular leg segments: dimensions, mass properties, stiffness.

Each segment is a uniform straight rod whose cross-section is a hollow
rectangle of outer height ``h``, outer width ``w`` and constant wall
thickness ``t``. Wall thicknesses are not design variables; they are
calibrated once from known segment masses and then held fixed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import CalibrationInfeasibleError, InvalidDimsError

SEGMENT_NAMES = ("coxa", "femur", "tibia")

# Genome ordering: lengths, then widths, then heights (coxa, femur, tibia).
GENOME_FIELDS = ("l1", "l2", "l3", "w1", "w2", "w3", "h1", "h2", "h3")

INERTIA_FACTORS = {"com": 1.0 / 12.0, "joint": 1.0 / 3.0, "none": 0.0}


@dataclass(frozen=True)
class SegmentDims:
    """Outer dimensions and wall thickness of one segment, in meters."""

    l: float
    w: float
    h: float
    t: float

    def validate(self, allow_degenerate: bool = False) -> None:
        """Raise :class:`InvalidDimsError` if the dimensions are not physical.

        ``allow_degenerate`` admits ``l == 0`` (a massless placeholder link),
        which is only useful for probing singular configurations.
        """
        vals = (self.l, self.w, self.h, self.t)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidDimsError(f"non-finite dimension in {self}")
        if self.l < 0 or (self.l == 0 and not allow_degenerate):
            raise InvalidDimsError(f"length must be positive, got l={self.l}")
        if self.w <= 0 or self.h <= 0:
            raise InvalidDimsError(f"w and h must be positive, got w={self.w}, h={self.h}")
        if not 0 < self.t <= min(self.w, self.h) / 2:
            raise InvalidDimsError(
                f"wall thickness must lie in (0, min(w, h)/2], got t={self.t} "
                f"for w={self.w}, h={self.h}"
            )


@dataclass(frozen=True)
class LegGeometry:
    coxa: SegmentDims
    femur: SegmentDims
    tibia: SegmentDims

    @property
    def segments(self) -> tuple[SegmentDims, SegmentDims, SegmentDims]:
        return (self.coxa, self.femur, self.tibia)

    @property
    def lengths(self) -> np.ndarray:
        return np.array([s.l for s in self.segments])

    @property
    def thicknesses(self) -> np.ndarray:
        return np.array([s.t for s in self.segments])

    def validate(self, allow_degenerate: bool = False) -> None:
        for name, seg in zip(SEGMENT_NAMES, self.segments):
            try:
                seg.validate(allow_degenerate)
            except InvalidDimsError as exc:
                raise InvalidDimsError(f"{name}: {exc}") from None

    def genome(self) -> np.ndarray:
        """The nine design variables ``(l1, l2, l3, w1, w2, w3, h1, h2, h3)``."""
        segs = self.segments
        return np.array(
            [s.l for s in segs] + [s.w for s in segs] + [s.h for s in segs], dtype=float
        )

    @classmethod
    def from_genome(cls, genome, thicknesses) -> "LegGeometry":
        g = np.asarray(genome, dtype=float)
        if g.shape != (9,):
            raise InvalidDimsError(f"genome must have 9 entries, got shape {g.shape}")
        t = np.asarray(thicknesses, dtype=float)
        segs = [
            SegmentDims(l=float(g[i]), w=float(g[3 + i]), h=float(g[6 + i]), t=float(t[i]))
            for i in range(3)
        ]
        return cls(*segs)


@dataclass(frozen=True)
class MaterialParams:
    """Material and environment constants (SI units).

    Defaults are 6061 aluminium with standard gravity. ``base_height`` only
    shifts potential energy by a constant and never changes torques.
    """

    density: float = 2770.0
    elastic_modulus: float = 68.9e9
    gravity: float = 9.8066
    base_height: float = 0.0

    def __post_init__(self):
        if not (self.density > 0 and self.elastic_modulus > 0 and self.gravity > 0):
            raise InvalidDimsError(
                "density, elastic_modulus and gravity must be positive"
            )
        if not self.base_height >= 0:
            raise InvalidDimsError("base_height must be non-negative")


@dataclass(frozen=True)
class SegmentProperties:
    m: float
    a: float
    I: float
    EIz: float


def cross_section_area(d: SegmentDims) -> float:
    """Area of the hollow rectangle, ``h*w - (h - 2t)(w - 2t)``."""
    d.validate(allow_degenerate=True)
    return d.h * d.w - (d.h - 2 * d.t) * (d.w - 2 * d.t)


def bending_stiffness(d: SegmentDims, elastic_modulus: float) -> float:
    """Bending stiffness ``E * [h w^3 - (h - 2t)(w - 2t)^3] / 12``."""
    d.validate(allow_degenerate=True)
    inner = (d.h - 2 * d.t) * (d.w - 2 * d.t) ** 3
    return elastic_modulus * (d.h * d.w**3 - inner) / 12.0


def segment_properties(
    d: SegmentDims, mat: MaterialParams, inertia: str = "com"
) -> SegmentProperties:
    """Mass, center-of-mass offset, inertia and bending stiffness of a segment.

    ``inertia`` selects the rod inertia model: ``"com"`` (``m l^2 / 12`` about
    the center of mass, the default), ``"joint"`` (``m l^2 / 3`` about the
    proximal joint) or ``"none"`` (point masses).
    """
    try:
        factor = INERTIA_FACTORS[inertia]
    except KeyError:
        raise ValueError(f"unknown inertia model {inertia!r}") from None
    m = mat.density * d.l * cross_section_area(d)
    return SegmentProperties(
        m=m,
        a=d.l / 2.0,
        I=factor * m * d.l**2,
        EIz=bending_stiffness(d, mat.elastic_modulus),
    )


def calibrate_wall_thickness(
    l: float, h: float, w: float, target_mass: float, density: float
) -> float:
    """Wall thickness giving ``target_mass`` for a hollow section.

    Solves ``density * l * [h w - (h - 2t)(w - 2t)] = target_mass``, i.e.
    ``4 t^2 - 2 (h + w) t + target_mass / (density l) = 0``, and returns the
    smaller root. The larger root always exceeds ``min(w, h) / 2``.
    """
    if not (l > 0 and h > 0 and w > 0 and density > 0):
        raise InvalidDimsError("l, h, w and density must be positive")
    if not target_mass > 0:
        raise CalibrationInfeasibleError(f"target mass must be positive, got {target_mass}")
    solid_mass = density * l * h * w
    if target_mass > solid_mass:
        raise CalibrationInfeasibleError(
            f"target mass {target_mass} kg exceeds the solid-section mass {solid_mass} kg"
        )
    area = target_mass / (density * l)
    b = h + w
    disc = b * b - 4.0 * area
    if disc < 0:  # cannot happen when area <= h*w, kept for rounding safety
        raise CalibrationInfeasibleError("no real wall thickness reproduces the target mass")
    # Stable small root of 4t^2 - 2bt + area = 0.
    t = 2.0 * area / (2.0 * (b + math.sqrt(disc)))
    if not 0 < t <= min(w, h) / 2 * (1 + 1e-12):
        raise CalibrationInfeasibleError(f"calibrated thickness {t} outside (0, min(w,h)/2]")
    return min(t, min(w, h) / 2)


@dataclass(frozen=True)
class SegmentSpec:
    """Segment dimensions with either an explicit wall thickness or a mass to calibrate from."""

    l: float
    w: float
    h: float
    t: float | None = None
    mass: float | None = None

    def resolve(self, density: float) -> SegmentDims:
        if self.t is not None:
            return SegmentDims(self.l, self.w, self.h, self.t)
        if self.mass is None:
            raise InvalidDimsError("segment needs either a wall thickness t or a mass")
        t = calibrate_wall_thickness(self.l, self.h, self.w, self.mass, density)
        return SegmentDims(self.l, self.w, self.h, t)


# Initial leg: lengths, outer h x w and masses of the starting design.
INITIAL_SEGMENTS = {
    "coxa": SegmentSpec(l=0.140, w=0.121, h=0.179, mass=6.06),
    "femur": SegmentSpec(l=0.460, w=0.183, h=0.158, mass=20.09),
    "tibia": SegmentSpec(l=0.460, w=0.117, h=0.144, mass=14.22),
}

# Optimized leg reported alongside the initial one (no wall thickness given).
REFERENCE_OPTIMIZED_SEGMENTS = {
    "coxa": dict(l=0.127, w=0.115, h=0.173, mass=5.20),
    "femur": dict(l=0.428, w=0.169, h=0.151, mass=17.17),
    "tibia": dict(l=0.446, w=0.113, h=0.130, mass=11.61),
}


def initial_geometry(mat: MaterialParams | None = None) -> LegGeometry:
    """Initial leg with wall thicknesses calibrated from the segment masses."""
    mat = mat or MaterialParams()
    return LegGeometry(*(INITIAL_SEGMENTS[n].resolve(mat.density) for n in SEGMENT_NAMES))


def reference_optimized_geometry(mat: MaterialParams | None = None) -> LegGeometry:
    """Reference optimized dimensions carrying the initial leg's wall thicknesses."""
    base = initial_geometry(mat)
    segs = []
    for name, seg in zip(SEGMENT_NAMES, base.segments):
        ref = REFERENCE_OPTIMIZED_SEGMENTS[name]
        segs.append(replace(seg, l=ref["l"], w=ref["w"], h=ref["h"]))
    return LegGeometry(*segs)


@dataclass(frozen=True)
class LegProperties:
    """Per-segment properties of a whole leg, as arrays ordered coxa, femur, tibia."""

    lengths: np.ndarray
    masses: np.ndarray
    com_offsets: np.ndarray
    inertias: np.ndarray
    stiffness: np.ndarray = field(repr=False)


def leg_properties(
    geom: LegGeometry, mat: MaterialParams, inertia: str = "com", allow_degenerate: bool = False
) -> LegProperties:
    geom.validate(allow_degenerate)
    props = [segment_properties(s, mat, inertia) for s in geom.segments]
    return LegProperties(
        lengths=geom.lengths,
        masses=np.array([p.m for p in props]),
        com_offsets=np.array([p.a for p in props]),
        inertias=np.array([p.I for p in props]),
        stiffness=np.array([p.EIz for p in props]),
    )
