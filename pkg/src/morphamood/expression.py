"""Polar expression map and field-wise bilinear interpolation.

Nine key expressions sit on a unit disk: a neutral center, four
low-intensity expressions on an inner ring (radius 0.5) and four
high-intensity expressions on an outer ring (radius 1.0), with the two
rings angle-aligned. The disk decomposes into four triangle fields
(center plus two adjacent inner vertices) and four quad fields (two
inner plus two outer vertices). A cursor (r, phi) is resolved to its
enclosing field and the facial feature vector and valence/arousal score
are blended bilinearly from that field's vertices:

* the angular ratio is taken along the field's outer edge,
* both edges are interpolated at that ratio,
* the two edge points are blended by the rescaled radius, which runs
  0 -> 1 across each ring band (2r inside the inner ring, 2(r - 0.5)
  outside it).

For triangle fields the degenerate inner edge contributes the center's
vectors constantly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import Any, Callable, Final, Mapping, Sequence

from .scales import VAScore, check_va_range

EXPRESSION_NAMES: Final = (
    "neutral",
    "calm",
    "relaxed",
    "happy",
    "excited",
    "irritated",
    "tense",
    "sad",
    "bored",
)

RING_CENTER: Final = "center"
RING_INNER: Final = "inner"
RING_OUTER: Final = "outer"

INNER_RING_RADIUS: Final = 0.5
OUTER_RING_RADIUS: Final = 1.0

RING_SIZE: Final = 4
RING_STEP_DEG: Final = 360.0 / RING_SIZE

# tolerance for angle alignment / equidistance checks, in degrees
ANGLE_TOL: Final = 1e-9

DEFAULT_MAP_RESOURCE: Final = "data/default_map.json"


class MapConfigError(ValueError):
    """A map configuration document violates a structural invariant."""


class SchemaError(MapConfigError):
    """Malformed schema block or feature components inconsistent with it."""


class DuplicateNameError(MapConfigError):
    """The same expression name appears more than once."""


class MissingExpressionError(MapConfigError):
    """An expression name outside, or absent from, the canonical nine."""


class RingLayoutError(MapConfigError):
    """Wrong ring population or inner/outer ring angles not pairwise aligned."""


class AngleSpacingError(MapConfigError):
    """Ring angles not strictly increasing and equidistant."""


class ComponentRangeError(MapConfigError):
    """A feature or VA component lies outside its declared closed range."""


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered facial parameter names with closed per-component ranges."""

    names: tuple[str, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.names:
            raise SchemaError("schema declares no parameters")
        if len(self.names) != len(set(self.names)):
            raise SchemaError("schema parameter names are not unique")
        if not (len(self.names) == len(self.lower) == len(self.upper)):
            raise SchemaError("schema names and ranges differ in length")
        for name, lo, hi in zip(self.names, self.lower, self.upper):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise SchemaError(f"invalid range for parameter {name!r}: [{lo!r}, {hi!r}]")

    def range_of(self, name: str) -> tuple[float, float]:
        i = self.names.index(name)
        return self.lower[i], self.upper[i]

    def vector(self, components: Mapping[str, float], *, owner: str = "feature vector") -> "FeatureVector":
        """Build a validated FeatureVector from a name -> value mapping."""
        missing = [n for n in self.names if n not in components]
        if missing:
            raise SchemaError(f"{owner}: missing components {missing}")
        unknown = [n for n in components if n not in self.names]
        if unknown:
            raise SchemaError(f"{owner}: unknown components {unknown}")
        values = []
        for name, lo, hi in zip(self.names, self.lower, self.upper):
            v = float(components[name])
            if not (lo <= v <= hi):  # also rejects NaN
                raise ComponentRangeError(f"{owner}: component {name!r}={v!r} outside [{lo}, {hi}]")
            values.append(v)
        return FeatureVector(self, tuple(values))


@dataclass(frozen=True)
class FeatureVector:
    """Facial parameter values in the order fixed by a schema.

    Two vectors are comparable (and blendable) only under the same schema.
    """

    schema: FeatureSchema
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.values) != len(self.schema.names):
            raise SchemaError(
                f"feature vector has {len(self.values)} values for "
                f"{len(self.schema.names)} schema parameters"
            )

    def __getitem__(self, name: str) -> float:
        return self.values[self.schema.names.index(name)]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.schema.names, self.values))


def lerp_features(a: FeatureVector, b: FeatureVector, t: float) -> FeatureVector:
    """Component-wise (1-t)*a + t*b; both vectors must share a schema."""
    if a.schema != b.schema:
        raise SchemaError("feature vectors from different schemas are not blendable")
    return FeatureVector(a.schema, tuple((1.0 - t) * x + t * y for x, y in zip(a.values, b.values)))


@dataclass(frozen=True)
class Cursor:
    """Polar cursor on the unit disk: r clamped to [0, 1], phi wrapped to [0, 360)."""

    r: float
    phi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.r) and math.isfinite(self.phi)):
            raise ValueError(f"cursor components must be finite, got ({self.r!r}, {self.phi!r})")
        object.__setattr__(self, "r", min(max(float(self.r), 0.0), 1.0))
        phi = float(self.phi) % 360.0
        if phi == 360.0:  # float modulo of a tiny negative can round up to the modulus
            phi = 0.0
        object.__setattr__(self, "phi", phi)

    def as_dict(self) -> dict[str, float]:
        return {"r": self.r, "phi": self.phi}


def clamp_cursor(x: float, y: float) -> Cursor:
    """Map planar coordinates to a cursor, clamping outside points to the rim.

    Angles are degrees counter-clockwise from the positive x axis; the
    origin maps to (r=0, phi=0).
    """
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"planar coordinates must be finite, got ({x!r}, {y!r})")
    r = math.hypot(x, y)
    if r == 0.0:
        return Cursor(0.0, 0.0)
    return Cursor(min(r, 1.0), math.degrees(math.atan2(y, x)))


def radius_rescale(r: float) -> float:
    """Band-local radial weight: 2r inside the inner ring, 2(r-0.5) outside."""
    if not (0.0 <= r <= 1.0):  # also rejects NaN
        raise ValueError(f"radius {r!r} outside [0, 1]")
    return 2.0 * r if r <= INNER_RING_RADIUS else 2.0 * (r - INNER_RING_RADIUS)


@dataclass(frozen=True)
class KeyExpression:
    """A named vertex of the map: ring position plus its feature and VA anchors."""

    name: str
    ring: str
    angle_deg: float
    fv: FeatureVector
    va: VAScore

    @property
    def radius(self) -> float:
        if self.ring == RING_CENTER:
            return 0.0
        return INNER_RING_RADIUS if self.ring == RING_INNER else OUTER_RING_RADIUS


FIELD_TRIANGLE: Final = "triangle"
FIELD_QUAD: Final = "quad"


@dataclass(frozen=True)
class Field:
    """One sector-band cell of the disk partition.

    ``inner_edge`` is the low-radius vertex pair (e_a, e_b) and
    ``outer_edge`` the high-radius pair (e_d, e_c), each ordered
    (span start, span end). Triangle fields carry the center as both
    inner-edge vertices. The angular span is half-open: [phi_start,
    phi_start + span_deg). The inner band owns the r = 0.5 ring.
    """

    kind: str
    inner_edge: tuple[KeyExpression, KeyExpression]
    outer_edge: tuple[KeyExpression, KeyExpression]
    phi_start: float
    span_deg: float
    r_lo: float
    r_hi: float

    def angular_offset(self, phi: float) -> float:
        return (phi - self.phi_start) % 360.0

    def contains(self, cursor: Cursor) -> bool:
        if self.r_lo == 0.0:
            in_band = cursor.r <= self.r_hi
        else:
            in_band = self.r_lo < cursor.r <= self.r_hi
        return in_band and self.angular_offset(cursor.phi) < self.span_deg

    def theta(self, phi: float) -> float:
        """Angular ratio along the outer edge, 0 at span start, 1 at span end."""
        return self.angular_offset(phi) / self.span_deg


@dataclass(frozen=True)
class PolarMap:
    """Validated key expressions plus the derived field decomposition.

    ``inner`` and ``outer`` are ring order (ascending angle, pairwise
    aligned); ``fields`` holds the four triangle fields followed by the
    four quad fields, both in ring order.
    """

    schema: FeatureSchema
    center: KeyExpression
    inner: tuple[KeyExpression, ...]
    outer: tuple[KeyExpression, ...]
    fields: tuple[Field, ...]

    def expressions(self) -> tuple[KeyExpression, ...]:
        return (self.center, *self.inner, *self.outer)

    def expression(self, name: str) -> KeyExpression:
        for e in self.expressions():
            if e.name == name:
                return e
        raise KeyError(name)


def _build_fields(center: KeyExpression, inner: Sequence[KeyExpression],
                  outer: Sequence[KeyExpression]) -> tuple[Field, ...]:
    triangles = []
    quads = []
    for i, (ia, oa) in enumerate(zip(inner, outer)):
        ib = inner[(i + 1) % len(inner)]
        ob = outer[(i + 1) % len(outer)]
        start = ia.angle_deg
        span = (ib.angle_deg - ia.angle_deg) % 360.0
        triangles.append(Field(FIELD_TRIANGLE, (center, center), (ia, ib),
                               start, span, 0.0, INNER_RING_RADIUS))
        quads.append(Field(FIELD_QUAD, (ia, ib), (oa, ob),
                           start, span, INNER_RING_RADIUS, OUTER_RING_RADIUS))
    return (*triangles, *quads)


def build_map(schema: FeatureSchema, expressions: Sequence[KeyExpression]) -> PolarMap:
    """Validate a full expression set and derive the field decomposition."""
    names = [e.name for e in expressions]
    seen: set[str] = set()
    for n in names:
        if n in seen:
            raise DuplicateNameError(f"duplicate expression name {n!r}")
        seen.add(n)
    unknown = [n for n in names if n not in EXPRESSION_NAMES]
    if unknown:
        raise MissingExpressionError(f"unknown expression names {unknown}")
    missing = [n for n in EXPRESSION_NAMES if n not in seen]
    if missing:
        raise MissingExpressionError(f"missing expressions {missing}")

    for e in expressions:
        if e.ring not in (RING_CENTER, RING_INNER, RING_OUTER):
            raise RingLayoutError(f"expression {e.name!r} has unknown ring {e.ring!r}")
        if not math.isfinite(e.angle_deg):
            raise AngleSpacingError(f"expression {e.name!r} has non-finite angle")
        if e.fv.schema != schema:
            raise SchemaError(f"expression {e.name!r} does not use the map schema")

    centers = [e for e in expressions if e.ring == RING_CENTER]
    inner = [e for e in expressions if e.ring == RING_INNER]
    outer = [e for e in expressions if e.ring == RING_OUTER]
    if len(centers) != 1 or centers[0].name != "neutral":
        raise RingLayoutError("exactly one center expression is required and it must be 'neutral'")
    if len(inner) != RING_SIZE or len(outer) != RING_SIZE:
        raise RingLayoutError(
            f"rings must hold {RING_SIZE} expressions each, got "
            f"{len(inner)} inner / {len(outer)} outer"
        )

    def ring_sorted(ring: list[KeyExpression], label: str) -> list[KeyExpression]:
        ordered = sorted(ring, key=lambda e: e.angle_deg % 360.0)
        angles = [e.angle_deg % 360.0 for e in ordered]
        for a, b, ea, eb in zip(angles, angles[1:], ordered, ordered[1:]):
            if b - a <= ANGLE_TOL:
                raise AngleSpacingError(
                    f"{label} ring angles not strictly increasing at "
                    f"{ea.name!r}/{eb.name!r}"
                )
        for i, (a, e) in enumerate(zip(angles, ordered)):
            expected = angles[0] + i * RING_STEP_DEG
            if abs(a - expected) > ANGLE_TOL:
                raise AngleSpacingError(
                    f"{label} ring angles not equidistant: {e.name!r} at {a} "
                    f"expected {expected}"
                )
        return ordered

    inner_sorted = ring_sorted(inner, "inner")
    outer_sorted = ring_sorted(outer, "outer")
    for ie, oe in zip(inner_sorted, outer_sorted):
        if abs(ie.angle_deg % 360.0 - oe.angle_deg % 360.0) > ANGLE_TOL:
            raise RingLayoutError(
                f"ring angles misaligned: inner {ie.name!r} at {ie.angle_deg} vs "
                f"outer {oe.name!r} at {oe.angle_deg}"
            )

    return PolarMap(
        schema=schema,
        center=centers[0],
        inner=tuple(inner_sorted),
        outer=tuple(outer_sorted),
        fields=_build_fields(centers[0], inner_sorted, outer_sorted),
    )


def locate_field(pmap: PolarMap, cursor: Cursor) -> Field:
    """Resolve a cursor to its enclosing field.

    The inner band owns r = 0.5; a cursor exactly on a span's start angle
    resolves to that span.
    """
    band = pmap.fields[:RING_SIZE] if cursor.r <= INNER_RING_RADIUS else pmap.fields[RING_SIZE:]
    for field in band:
        if field.angular_offset(cursor.phi) < field.span_deg:
            return field
    raise AssertionError(f"no field contains phi={cursor.phi!r}")  # spans tile the circle


def blend_in_field(field: Field, cursor: Cursor,
                   values_of: Callable[[KeyExpression], Sequence[float]]) -> tuple[float, ...]:
    """Bilinear blend of per-vertex value tuples for a cursor inside a field.

    Exposed separately from :func:`locate_field` so a point on a shared
    boundary can be evaluated through either adjacent field. The radial
    weight is band-local (0 at the field's inner edge, 1 at its outer
    edge); for a cursor located inside the field it equals
    :func:`radius_rescale` of the cursor radius.
    """
    th = field.theta(cursor.phi)
    w = (cursor.r - field.r_lo) / (field.r_hi - field.r_lo)
    e_a, e_b = field.inner_edge
    e_d, e_c = field.outer_edge
    if field.kind == FIELD_TRIANGLE:
        lo = tuple(values_of(e_a))  # degenerate edge: the center, independent of theta
    else:
        lo = tuple((1.0 - th) * x + th * y for x, y in zip(values_of(e_a), values_of(e_b)))
    hi = tuple((1.0 - th) * x + th * y for x, y in zip(values_of(e_d), values_of(e_c)))
    return tuple((1.0 - w) * x + w * y for x, y in zip(lo, hi))


def interpolate_expression(pmap: PolarMap, cursor: Cursor, field: Field | None = None) -> FeatureVector:
    """Feature vector for a cursor, blended from its field's vertices."""
    if field is None:
        field = locate_field(pmap, cursor)
    values = blend_in_field(field, cursor, lambda e: e.fv.values)
    return FeatureVector(pmap.schema, values)


def interpolate_va(pmap: PolarMap, cursor: Cursor, field: Field | None = None) -> VAScore:
    """Valence/arousal score for a cursor, same scheme as the feature blend."""
    if field is None:
        field = locate_field(pmap, cursor)
    valence, arousal = blend_in_field(field, cursor, lambda e: (e.va.valence, e.va.arousal))
    return VAScore(valence, arousal)


# ---------------------------------------------------------------------------
# configuration documents


def _require(condition: bool, exc: type[MapConfigError], message: str) -> None:
    if not condition:
        raise exc(message)


def parse_schema(entries: Any) -> FeatureSchema:
    _require(isinstance(entries, list) and entries, SchemaError,
             "'schema' must be a non-empty list of parameter entries")
    names, lower, upper = [], [], []
    for entry in entries:
        _require(isinstance(entry, Mapping), SchemaError, f"schema entry {entry!r} is not an object")
        _require(set(entry) == {"name", "min", "max"}, SchemaError,
                 f"schema entry {entry!r} must have exactly name/min/max")
        names.append(str(entry["name"]))
        lower.append(float(entry["min"]))
        upper.append(float(entry["max"]))
    return FeatureSchema(tuple(names), tuple(lower), tuple(upper))


def load_map(document: str | Mapping[str, Any]) -> PolarMap:
    """Parse and validate a map configuration (JSON text or parsed object)."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise MapConfigError(f"map document is not valid JSON: {exc}") from exc
    _require(isinstance(document, Mapping), MapConfigError, "map document must be a JSON object")
    _require("schema" in document, SchemaError, "map document lacks a 'schema' block")
    _require("expressions" in document, MissingExpressionError,
             "map document lacks an 'expressions' block")
    schema = parse_schema(document["schema"])

    entries = document["expressions"]
    _require(isinstance(entries, list), MapConfigError, "'expressions' must be a list")
    expressions = []
    for entry in entries:
        _require(isinstance(entry, Mapping), MapConfigError,
                 f"expression entry {entry!r} is not an object")
        keys = {"name", "ring", "angle_deg", "fv", "valence", "arousal"}
        _require(set(entry) == keys, MapConfigError,
                 f"expression entry {entry.get('name', entry)!r} must have exactly {sorted(keys)}")
        name = str(entry["name"])
        fv = schema.vector(entry["fv"], owner=f"expression {name!r}")
        valence, arousal = float(entry["valence"]), float(entry["arousal"])
        try:
            check_va_range(valence, arousal)
        except ValueError as exc:
            raise ComponentRangeError(f"expression {name!r}: {exc}") from exc
        expressions.append(KeyExpression(
            name=name,
            ring=str(entry["ring"]),
            angle_deg=float(entry["angle_deg"]),
            fv=fv,
            va=VAScore(valence, arousal),
        ))
    return build_map(schema, expressions)


def load_map_file(path: str) -> PolarMap:
    with open(path, "r", encoding="utf-8") as fh:
        return load_map(fh.read())


def map_to_document(pmap: PolarMap) -> dict[str, Any]:
    schema = [
        {"name": n, "min": lo, "max": hi}
        for n, lo, hi in zip(pmap.schema.names, pmap.schema.lower, pmap.schema.upper)
    ]
    expressions = [
        {
            "name": e.name,
            "ring": e.ring,
            "angle_deg": e.angle_deg,
            "fv": e.fv.as_dict(),
            "valence": e.va.valence,
            "arousal": e.va.arousal,
        }
        for e in pmap.expressions()
    ]
    return {"schema": schema, "expressions": expressions}


def serialize_map(pmap: PolarMap) -> str:
    """Serialize so that load_map(serialize_map(m)) reproduces every number bit-exactly."""
    return json.dumps(map_to_document(pmap), indent=2) + "\n"


def load_default_map() -> PolarMap:
    """The map shipped with the package (see data/default_map.json)."""
    text = resources.files(__package__).joinpath(DEFAULT_MAP_RESOURCE).read_text(encoding="utf-8")
    return load_map(text)
