"""Exact planar geometry for nested convex polygons.

Points live in Q(sqrt 2)^2 (plain ``Fraction`` coordinates are fine too).
The module builds the two faces of the polytope P that carry the points
r_1..r_6, constructs supporting polygons, and runs the threshold
checks, the type-2/3 exclusions and the type-1 uniqueness checks.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .exactnum import SQRT2, Number, format_entry, sign
from .paperdata import FACETS, constants

__all__ = [
    "Point2",
    "ConvexPolygon",
    "SupportResult",
    "GeometryError",
    "StartNotOnBoundary",
    "InnerNotInside",
    "TangencyDegenerate",
    "PoleError",
    "orient",
    "orient_value",
    "face_polygon",
    "inner_triangle",
    "supporting_polygon",
    "is_supporting_segment",
    "lemma41_threshold_check",
    "lemma42_threshold_check",
    "closed_form_41",
    "closed_form_42",
    "ThresholdResult",
    "HalfPlane",
    "feasible_point",
    "farkas_certificate",
    "containment_constraints",
    "exclude_types_2_3",
    "verify_type1_uniqueness",
    "THRESHOLD",
]

THRESHOLD = 2 - SQRT2


class GeometryError(ValueError):
    pass


class StartNotOnBoundary(GeometryError):
    pass


class InnerNotInside(GeometryError):
    pass


class TangencyDegenerate(GeometryError):
    pass


class PoleError(ZeroDivisionError):
    """A denominator of the elimination vanishes at the requested parameter."""


class Point2(NamedTuple):
    x: Number
    y: Number

    def __add__(self, other):  # type: ignore[override]
        return Point2(self.x + other.x, self.y + other.y)

    def __sub__(self, other):
        return Point2(self.x - other.x, self.y - other.y)

    def scaled(self, s: Number) -> Point2:
        return Point2(self.x * s, self.y * s)

    def format(self) -> str:
        return f"({format_entry(self.x)}, {format_entry(self.y)})"


def orient_value(p1: Point2, p2: Point2, p3: Point2) -> Number:
    """The determinant | x_i y_i 1 | over the three points."""
    return (p2.x - p1.x) * (p3.y - p1.y) - (p2.y - p1.y) * (p3.x - p1.x)


def orient(p1: Point2, p2: Point2, p3: Point2) -> int:
    """+1 counter-clockwise, -1 clockwise, 0 collinear."""
    return sign(orient_value(p1, p2, p3))


def _on_segment(a: Point2, b: Point2, p: Point2) -> bool:
    if orient(a, b, p) != 0:
        return False
    return (sign((p.x - a.x) * (p.x - b.x)) <= 0) and (sign((p.y - a.y) * (p.y - b.y)) <= 0)


def _sq_dist(a: Point2, b: Point2) -> Number:
    d = b - a
    return d.x * d.x + d.y * d.y


class ConvexPolygon:
    """Strictly convex polygon with counter-clockwise vertices."""

    __slots__ = ("vertices",)

    def __init__(self, vertices: Iterable[Sequence[Number]]) -> None:
        verts = tuple(Point2(*v) for v in vertices)
        if len(verts) < 3:
            raise GeometryError("a polygon needs at least three vertices")
        n = len(verts)
        for i in range(n):
            if orient(verts[i], verts[(i + 1) % n], verts[(i + 2) % n]) <= 0:
                raise GeometryError("vertices must be strictly convex and counter-clockwise")
        self.vertices = verts

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def edges(self) -> list[tuple[Point2, Point2]]:
        n = len(self.vertices)
        return [(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]

    def contains(self, p: Point2) -> bool:
        return all(orient(a, b, p) >= 0 for a, b in self.edges())

    def strictly_contains(self, p: Point2) -> bool:
        return all(orient(a, b, p) > 0 for a, b in self.edges())

    def on_boundary(self, p: Point2) -> bool:
        return self.contains(p) and any(_on_segment(a, b, p) for a, b in self.edges())

    def contains_polygon(self, other: Iterable[Point2]) -> bool:
        return all(self.contains(Point2(*p)) for p in other)

    def __repr__(self) -> str:
        return "ConvexPolygon([" + ", ".join(v.format() for v in self.vertices) + "])"


def _ccw_sort(points: list[Point2]) -> list[Point2]:
    n = len(points)
    cx = sum((p.x for p in points), Fraction(0)) / n
    cy = sum((p.y for p in points), Fraction(0)) / n
    c = Point2(cx, cy)

    def half(p: Point2) -> int:
        dy, dx = sign(p.y - c.y), sign(p.x - c.x)
        return 0 if (dy > 0 or (dy == 0 and dx > 0)) else 1

    def cmp(p: Point2, q: Point2) -> int:
        hp, hq = half(p), half(q)
        if hp != hq:
            return hp - hq
        return -orient(c, p, q)

    return sorted(points, key=functools.cmp_to_key(cmp))


_PLANES = {"xy": (0, 1), "xz": (0, 2)}


def _plane_halfplanes(plane: str) -> list[tuple[Fraction, Fraction, Fraction]]:
    i, j = _PLANES[plane]
    out = []
    for _, coeffs in FACETS:
        a, b, off = coeffs[i], coeffs[j], coeffs[3]
        if a == 0 and b == 0:
            continue
        out.append((a, b, off))
    return out


@functools.lru_cache(maxsize=None)
def face_polygon(plane: str) -> ConvexPolygon:
    """Face of P in the plane ``xy`` (z = 0) or ``xz`` (y = 0).

    Vertices come from pairwise intersections of the facet lines that
    satisfy every half-plane.
    """
    hps = _plane_halfplanes(plane)
    pts: list[Point2] = []
    for (a1, b1, o1), (a2, b2, o2) in itertools.combinations(hps, 2):
        det = a1 * b2 - a2 * b1
        if det == 0:
            continue
        x = (-o1 * b2 + o2 * b1) / det
        y = (-a1 * o2 + a2 * o1) / det
        if all(a * x + b * y + o >= 0 for a, b, o in hps):
            p = Point2(x, y)
            if p not in pts:
                pts.append(p)
    pts = _ccw_sort(pts)
    changed = True
    while changed and len(pts) > 3:
        changed = False
        for k in range(len(pts)):
            if orient(pts[k - 1], pts[k], pts[(k + 1) % len(pts)]) == 0:
                del pts[k]
                changed = True
                break
    return ConvexPolygon(pts)


def inner_triangle(plane: str) -> ConvexPolygon:
    """Triangle r_1 r_2 r_3 (``xy``) or r_4 r_5 r_6 (``xz``), counter-clockwise."""
    i, j = _PLANES[plane]
    rs = constants().r[:3] if plane == "xy" else constants().r[3:]
    pts = [Point2(p[i], p[j]) for p in rs]
    if orient(*pts) < 0:
        pts.reverse()
    return ConvexPolygon(pts)


@dataclass(frozen=True)
class SupportResult:
    vertices: tuple[Point2, ...]
    closed: bool

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    def as_polygon(self) -> ConvexPolygon:
        return ConvexPolygon(self.vertices)


def _tangent_vertex(v: Point2, inner: ConvexPolygon) -> Point2:
    if inner.contains(v):
        raise TangencyDegenerate(f"point {v.format()} lies in or on the inner polygon")
    candidates = [t for t in inner if all(orient(v, t, w) >= 0 for w in inner)]
    if not candidates:
        raise TangencyDegenerate(f"no supporting direction from {v.format()}")
    best = candidates[0]
    for t in candidates[1:]:
        if sign(_sq_dist(v, t) - _sq_dist(v, best)) > 0:
            best = t
    return best


def _ray_exit(v: Point2, t: Point2, outer: ConvexPolygon) -> Point2:
    best: Number | None = None
    for a, b in outer.edges():
        g0 = orient_value(a, b, v)
        g1 = orient_value(a, b, t) - g0
        if sign(g1) < 0:
            s = -g0 / g1
            if best is None or sign(s - best) < 0:
                best = s
    if best is None or sign(best - 1) < 0:
        raise InnerNotInside("ray through the tangent vertex leaves the outer polygon early")
    return v + (t - v).scaled(best)


def is_supporting_segment(u: Point2, v: Point2, inner: ConvexPolygon, outer: ConvexPolygon) -> bool:
    """Endpoints on the outer boundary, inner weakly left and touching."""
    if not (outer.on_boundary(u) and outer.on_boundary(v)):
        return False
    sides = [orient(u, v, w) for w in inner]
    return all(s >= 0 for s in sides) and any(s == 0 for s in sides)


def supporting_polygon(inner: ConvexPolygon, outer: ConvexPolygon, start: Sequence[Number]) -> SupportResult:
    """Chain supporting segments from ``start`` until the closing edge
    keeps ``inner`` on its left, or the vertex budget runs out."""
    start = Point2(*start)
    if not outer.on_boundary(start):
        raise StartNotOnBoundary(f"{start.format()} is not on the outer boundary")
    if not outer.contains_polygon(inner):
        raise InnerNotInside("inner polygon is not contained in the outer polygon")
    budget = len(outer) + len(inner) + 3
    verts = [start]
    while len(verts) < budget:
        cur = verts[-1]
        t = _tangent_vertex(cur, inner)
        nxt = _ray_exit(cur, t, outer)
        verts.append(nxt)
        if len(verts) >= 3 and all(orient(nxt, start, w) >= 0 for w in inner):
            return SupportResult(tuple(verts), True)
    return SupportResult(tuple(verts), False)


# Threshold checks


def _solve_affine(fn, what: str) -> Number:
    """Root of an affine function of one variable, given as a callable."""
    f0 = fn(Fraction(0))
    slope = fn(Fraction(1)) - f0
    if slope == 0:
        raise PoleError(f"{what} is undetermined (vanishing coefficient)")
    return -f0 / slope


def closed_form_41(u: Number) -> Number:
    den = 22 * (8 * u - 5)
    if den == 0:
        raise PoleError("8u - 5 = 0")
    return (u * u - 4 * u + 2) * 15 / den


def closed_form_42(u: Number) -> Number:
    den = 21 * (2 * u - 7)
    if den == 0:
        raise PoleError("2u - 7 = 0")
    return (u * u - 4 * u + 2) * (-10) / den


@dataclass(frozen=True)
class ThresholdResult:
    u: Number
    verdict: str  # "three_vertices" | "more_than_three"
    vertex_count: int
    closed: bool
    v: Number | None
    w: Number | None
    determinant: Number | None
    closed_form: Number | None
    parametrization_valid: bool
    algebraic_verdict: str | None
    vertices: tuple[Point2, ...] = field(default=())

    @property
    def consistent(self) -> bool:
        """Construction and elimination agree wherever the latter applies."""
        return self.algebraic_verdict is None or self.algebraic_verdict == self.verdict


def _in_unit(x: Number) -> bool:
    return sign(x) >= 0 and sign(x - 1) <= 0


def _lemma_points_41(u, v=None, w=None):
    q1 = Point2(u, Fraction(0))
    q3 = None if v is None else Point2(Fraction(1), v / 2)
    q2 = None if w is None else Point2(1 - w, Fraction(1, 2) + w / 2)
    return q1, q3, q2


def eliminate_41(u: Number) -> tuple[Number, Number, Number]:
    """Solve the two collinearity conditions for (v, w) and evaluate the
    orientation determinant of (q_2, q_1, r_3)."""
    r1, r2, r3 = (Point2(p[0], p[1]) for p in constants().r[:3])
    q1 = Point2(u, Fraction(0))
    try:
        v = _solve_affine(lambda t: orient_value(q1, Point2(Fraction(1), t / 2), r1), "v")
        q3 = Point2(Fraction(1), v / 2)
        w = _solve_affine(lambda t: orient_value(q3, Point2(1 - t, Fraction(1, 2) + t / 2), r2), "w")
    except ZeroDivisionError as exc:
        raise PoleError(str(exc)) from exc
    q2 = Point2(1 - w, Fraction(1, 2) + w / 2)
    return v, w, orient_value(q2, q1, r3)


def eliminate_42(u: Number) -> tuple[Number, Number, Number]:
    r4, r5, r6 = (Point2(p[0], p[2]) for p in constants().r[3:])
    q1 = Point2(u, Fraction(0))

    def q5(t):
        return Point2((9 - 9 * t) / 4, (7 + 9 * t) / 14)

    def q4(t):
        return Point2(Fraction(0), (8 - 8 * t) / 7)

    try:
        v = _solve_affine(lambda t: orient_value(q1, q5(t), r4), "v")
        w = _solve_affine(lambda t: orient_value(q5(v), q4(t), r5), "w")
    except ZeroDivisionError as exc:
        raise PoleError(str(exc)) from exc
    return v, w, orient_value(q4(w), q1, r6)


def _threshold_check(u: Number, plane: str, eliminate, closed_form) -> ThresholdResult:
    if not (sign(u) >= 0 and sign(u - 1) <= 0):
        raise ValueError("u must lie in [0, 1]")
    res = supporting_polygon(inner_triangle(plane), face_polygon(plane), (u, Fraction(0)))
    verdict = "three_vertices" if res.closed and res.vertex_count <= 3 else "more_than_three"
    try:
        v, w, det = eliminate(u)
        cf = closed_form(u)
    except PoleError:
        v = w = det = cf = None
    valid = v is not None and _in_unit(v) and _in_unit(w)
    alg = None
    if valid:
        alg = "three_vertices" if sign(det) >= 0 else "more_than_three"
    return ThresholdResult(u, verdict, res.vertex_count, res.closed, v, w, det, cf, valid, alg, res.vertices)


def lemma41_threshold_check(u: Number) -> ThresholdResult:
    """Face z = 0: three vertices forces u >= 2 - sqrt 2."""
    return _threshold_check(u, "xy", eliminate_41, closed_form_41)


def lemma42_threshold_check(u: Number) -> ThresholdResult:
    """Face y = 0: three vertices forces u <= 2 - sqrt 2."""
    return _threshold_check(u, "xz", eliminate_42, closed_form_42)


# Exact 2D feasibility for the type-2/3 exclusions


class HalfPlane(NamedTuple):
    """``a*x + b*y + c >= 0``"""

    a: Number
    b: Number
    c: Number
    label: str = ""

    def value(self, p: Point2) -> Number:
        return self.a * p.x + self.b * p.y + self.c


def feasible_point(hps: Sequence[HalfPlane]) -> Point2 | None:
    """A vertex of the intersection, or None when it is empty.

    Only valid for bounded intersections, which is the case whenever the
    face constraints are included.
    """
    for h1, h2 in itertools.combinations(hps, 2):
        det = h1.a * h2.b - h2.a * h1.b
        if det == 0:
            continue
        x = (-h1.c * h2.b + h2.c * h1.b) / det
        y = (-h1.a * h2.c + h2.a * h1.c) / det
        p = Point2(x, y)
        if all(sign(h.value(p)) >= 0 for h in hps):
            return p
    return None


@dataclass(frozen=True)
class FarkasCertificate:
    """Nonnegative multipliers whose combination reads ``0 >= positive``."""

    indices: tuple[int, ...]
    multipliers: tuple[Number, ...]
    labels: tuple[str, ...]

    def check(self, hps: Sequence[HalfPlane]) -> bool:
        sa = sum((m * hps[i].a for i, m in zip(self.indices, self.multipliers)), Fraction(0))
        sb = sum((m * hps[i].b for i, m in zip(self.indices, self.multipliers)), Fraction(0))
        sc = sum((m * hps[i].c for i, m in zip(self.indices, self.multipliers)), Fraction(0))
        return (all(sign(m) >= 0 for m in self.multipliers) and sa == 0 and sb == 0 and sign(sc) < 0)


def farkas_certificate(hps: Sequence[HalfPlane]) -> FarkasCertificate | None:
    """Search subsets of at most three half-planes for an infeasibility proof.

    By Helly's theorem in the plane, an empty intersection always has such
    a subset.
    """
    for k in (2, 3):
        for idx in itertools.combinations(range(len(hps)), k):
            hs = [hps[i] for i in idx]
            if k == 2:
                h1, h2 = hs
                if h1.a * h2.b - h2.a * h1.b != 0:
                    continue
                # parallel normals: need h2 = -lambda * h1
                if h1.a != 0:
                    lam = -h2.a / h1.a
                else:
                    lam = -h2.b / h1.b
                mult = (lam, Fraction(1))
            else:
                h1, h2, h3 = hs
                # null vector of the 2x3 matrix of normals (cross product)
                mult = (
                    h2.a * h3.b - h3.a * h2.b,
                    h3.a * h1.b - h1.a * h3.b,
                    h1.a * h2.b - h2.a * h1.b,
                )
                if all(sign(m) <= 0 for m in mult):
                    mult = tuple(-m for m in mult)
            cert = FarkasCertificate(idx, tuple(mult), tuple(hps[i].label for i in idx))
            if any(m != 0 for m in mult) and cert.check(hps):
                return cert
    return None


def face_halfplanes(plane: str) -> list[HalfPlane]:
    i, j = _PLANES[plane]
    out = []
    for name, coeffs in FACETS:
        a, b, off = coeffs[i], coeffs[j], coeffs[3]
        if a == 0 and b == 0:
            continue
        out.append(HalfPlane(a, b, off, f"face: {name}"))
    return out


def containment_constraints(base1: Point2, base2: Point2, r: Point2, label: str) -> list[HalfPlane]:
    """Linear conditions on q for triangle (base1, base2, q) to contain r.

    With base1 -> base2 along the x-axis and r above it, the triangle is
    counter-clockwise and contains r iff r is left of base2->q and q->base1.
    The apex must also be at least as high as r, which rules out the
    degenerate apexes on the base line.
    """
    out = [HalfPlane(Fraction(0), Fraction(1), -r.y, f"{label} below apex")]
    # orient(base2, q, r) >= 0
    a = r.y - base2.y
    b = -(r.x - base2.x)
    c = -(a * base2.x + b * base2.y)
    out.append(HalfPlane(a, b, c, f"{label} left of base2->q"))
    # orient(q, base1, r) = orient(base1, r, q) >= 0
    a = -(r.y - base1.y)
    b = r.x - base1.x
    c = -(a * base1.x + b * base1.y)
    out.append(HalfPlane(a, b, c, f"{label} left of q->base1"))
    return out


@dataclass
class ExclusionInstance:
    name: str
    plane: str
    required: tuple[str, ...]
    feasible: bool
    witness: Point2 | None
    certificate: FarkasCertificate | None
    constraints: list[HalfPlane]

    @property
    def certificate_valid(self) -> bool:
        return self.certificate is not None and self.certificate.check(self.constraints)


def _exclusion_instance(name: str, plane: str, required: Sequence[int]) -> ExclusionInstance:
    i, j = _PLANES[plane]
    base1, base2 = Point2(Fraction(0), Fraction(0)), Point2(Fraction(1), Fraction(0))
    hps = face_halfplanes(plane)
    for idx in required:
        p = constants().r[idx - 1]
        hps.extend(containment_constraints(base1, base2, Point2(p[i], p[j]), f"r{idx}"))
    wit = feasible_point(hps)
    cert = None if wit is not None else farkas_certificate(hps)
    return ExclusionInstance(name, plane, tuple(f"r{k}" for k in required), wit is not None, wit, cert, hps)


@dataclass
class ExclusionReport:
    instances: list[ExclusionInstance]

    @property
    def passed(self) -> bool:
        return all((not inst.feasible) and inst.certificate_valid for inst in self.instances)


def exclude_types_2_3() -> ExclusionReport:
    """No apex q in the face makes the triangle (0,0),(1,0),q contain the
    two given r-points: r_2, r_3 on face z = 0 and r_4, r_6 on face y = 0."""
    return ExclusionReport([
        _exclusion_instance("type 2 (face z=0)", "xy", (2, 3)),
        _exclusion_instance("type 3 (face y=0)", "xz", (4, 6)),
    ])


def sanity_instance_r1() -> ExclusionInstance:
    """Only r_1 required: must be feasible."""
    return _exclusion_instance("r1 only (face z=0)", "xy", (1,))


# Type-1 uniqueness


@dataclass
class UniquenessReport:
    triangle_xy: tuple[Point2, ...]
    triangle_xz: tuple[Point2, ...]
    triangle_xy_ok: bool
    triangle_xz_ok: bool
    samples_checked: int
    samples_failing_nesting: int
    counterexamples: list[tuple[Point2, Point2]]

    @property
    def passed(self) -> bool:
        return self.triangle_xy_ok and self.triangle_xz_ok and not self.counterexamples


def nesting_witness(tri: Sequence[Point2], inner: ConvexPolygon) -> tuple[Point2, Point2, Point2] | None:
    """A point of ``inner`` strictly right of a directed triangle edge, or None."""
    n = len(tri)
    for k in range(n):
        a, b = tri[k], tri[(k + 1) % n]
        for p in inner:
            if orient(a, b, p) < 0:
                return (a, b, p)
    return None


def qstar_2d(plane: str) -> dict[int, Point2]:
    i, j = _PLANES[plane]
    return {k + 1: Point2(p[i], p[j]) for k, p in enumerate(constants().qstar)}


def _edge_points(a: Point2, b: Point2, steps: int) -> list[Point2]:
    return [a + (b - a).scaled(Fraction(k, steps)) for k in range(steps + 1)]


def verify_type1_uniqueness(steps: int = 16) -> UniquenessReport:
    """Supporting triangles from q_1^* are exactly the q^* triangles, and
    no sampled rational replacement of the two other vertices nests."""
    q_xy, q_xz = qstar_2d("xy"), qstar_2d("xz")
    start = q_xy[1]
    s_xy = supporting_polygon(inner_triangle("xy"), face_polygon("xy"), start)
    s_xz = supporting_polygon(inner_triangle("xz"), face_polygon("xz"), start)
    ok_xy = s_xy.closed and s_xy.vertices == (q_xy[1], q_xy[3], q_xy[2])
    ok_xz = s_xz.closed and s_xz.vertices == (q_xz[1], q_xz[5], q_xz[4])

    checked = failing = 0
    bad: list[tuple[Point2, Point2]] = []
    for plane, first_edge, second_edge in (
        ("xy", ((1, 0), (1, Fraction(1, 2))), ((1, Fraction(1, 2)), (0, 1))),
        ("xz", ((Fraction(9, 4), Fraction(1, 2)), (0, Fraction(8, 7))), ((0, Fraction(8, 7)), (0, 0))),
    ):
        inner = inner_triangle(plane)
        e1 = [Point2(Fraction(x), Fraction(y)) for x, y in first_edge]
        e2 = [Point2(Fraction(x), Fraction(y)) for x, y in second_edge]
        for a in _edge_points(e1[0], e1[1], steps):
            for b in _edge_points(e2[0], e2[1], steps):
                checked += 1
                if nesting_witness((start, a, b), inner) is not None:
                    failing += 1
                else:
                    bad.append((a, b))
    return UniquenessReport(s_xy.vertices, s_xz.vertices, ok_xy, ok_xz, checked, failing, bad)
