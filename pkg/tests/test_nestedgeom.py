import random
from fractions import Fraction

import pytest
import sympy as sp
from _oracles import as_sympy, elimination_41, elimination_42, nested_triangle_exists

from nnrank.exactnum import SQRT2, sign
from nnrank.nestedgeom import (
    THRESHOLD,
    ConvexPolygon,
    InnerNotInside,
    PoleError,
    Point2,
    StartNotOnBoundary,
    TangencyDegenerate,
    closed_form_41,
    closed_form_42,
    eliminate_41,
    eliminate_42,
    exclude_types_2_3,
    face_polygon,
    inner_triangle,
    lemma41_threshold_check,
    lemma42_threshold_check,
    nesting_witness,
    orient,
    qstar_2d,
    sanity_instance_r1,
    supporting_polygon,
    verify_type1_uniqueness,
)

F = Fraction
P = Point2


def test_orient_examples():
    assert orient(P(0, 0), P(1, 0), P(0, 1)) == 1
    assert orient(P(0, 0), P(1, 1), P(2, 2)) == 0
    assert orient(P(0, 1), P(1, 0), P(0, 0)) == -1


def test_orient_q2_q1_r3_vanishes_at_threshold():
    q = qstar_2d("xy")
    r3 = P(F(3, 11), F(17, 22))
    assert orient(q[2], q[1], r3) == 0


def test_supporting_triangle_xy_at_threshold():
    res = supporting_polygon(inner_triangle("xy"), face_polygon("xy"), (THRESHOLD, 0))
    assert res.closed
    assert res.vertices == (
        P(2 - SQRT2, 0),
        P(1, (3 + SQRT2) / 14),
        P((3 - SQRT2) / 7, (11 + SQRT2) / 14),
    )


def test_supporting_triangle_xz_at_threshold():
    q = qstar_2d("xz")
    res = supporting_polygon(inner_triangle("xz"), face_polygon("xz"), (THRESHOLD, 0))
    assert res.closed and res.vertices == (q[1], q[5], q[4])


@pytest.mark.parametrize("plane, u", [("xy", F(1, 8)), ("xz", F(7, 8))])
def test_quadrilaterals(plane, u):
    res = supporting_polygon(inner_triangle(plane), face_polygon(plane), (u, 0))
    assert res.closed and res.vertex_count == 4


def test_supporting_polygon_errors():
    inner, outer = inner_triangle("xy"), face_polygon("xy")
    with pytest.raises(StartNotOnBoundary):
        supporting_polygon(inner, outer, (F(1, 2), F(1, 2)))
    big = ConvexPolygon([P(0, 0), P(5, 0), P(0, 5)])
    with pytest.raises(InnerNotInside):
        supporting_polygon(big, outer, (0, 0))
    # start on the inner boundary: no supporting direction
    tri = ConvexPolygon([P(0, 0), P(1, 0), P(0, 1)])
    with pytest.raises(TangencyDegenerate):
        supporting_polygon(tri, tri, (0, 0))


def test_supporting_polygon_is_nested():
    inner, outer = inner_triangle("xy"), face_polygon("xy")
    for k in range(0, 65, 4):
        res = supporting_polygon(inner, outer, (F(k, 64), 0))
        assert res.closed
        poly = res.as_polygon()
        assert all(outer.on_boundary(v) for v in res.vertices)
        assert poly.contains_polygon(inner)


@pytest.mark.parametrize(
    "check, u, verdict",
    [
        (lemma41_threshold_check, THRESHOLD, "three_vertices"),
        (lemma41_threshold_check, F(1, 8), "more_than_three"),
        (lemma42_threshold_check, THRESHOLD, "three_vertices"),
        (lemma42_threshold_check, F(7, 8), "more_than_three"),
    ],
)
def test_threshold_examples(check, u, verdict):
    res = check(u)
    assert res.verdict == verdict
    assert res.consistent


def test_threshold_closed_forms_vanish():
    assert closed_form_41(THRESHOLD) == 0
    assert closed_form_42(THRESHOLD) == 0
    assert eliminate_41(THRESHOLD)[2] == 0
    assert eliminate_42(THRESHOLD)[2] == 0


def test_poles():
    with pytest.raises(PoleError):
        eliminate_41(F(3, 4))
    with pytest.raises(PoleError):
        closed_form_41(F(5, 8))
    with pytest.raises(PoleError):
        closed_form_42(F(7, 2))


def test_elimination_matches_symbolic_oracle():
    u = sp.Symbol("u")
    rng = random.Random(3)
    points = set()
    while len(points) < 20:
        x = F(rng.randint(-40, 40), rng.randint(1, 13))
        if x not in (F(3, 4), F(5, 8), F(15, 4), F(7, 2)):
            points.add(x)
    for (v41, w41, d41), (v42, w42, d42) in [(elimination_41(), elimination_42())]:
        for x in points:
            sx = as_sympy(x)
            v, w, det = eliminate_41(x)
            assert (as_sympy(v), as_sympy(w), as_sympy(det)) == (v41.subs(u, sx), w41.subs(u, sx), d41.subs(u, sx))
            assert det == closed_form_41(x)
            v, w, det = eliminate_42(x)
            assert (as_sympy(v), as_sympy(w), as_sympy(det)) == (v42.subs(u, sx), w42.subs(u, sx), d42.subs(u, sx))
            assert det == closed_form_42(x)


def test_grid_implication_and_consistency():
    # three vertices on face z=0 forces u >= 2 - sqrt2; on face y=0, u <= 2 - sqrt2
    for k in range(65):
        u = F(k, 64)
        a, b = lemma41_threshold_check(u), lemma42_threshold_check(u)
        assert a.consistent and b.consistent
        if a.verdict == "three_vertices":
            assert sign(u - THRESHOLD) >= 0
        if b.verdict == "three_vertices":
            assert sign(u - THRESHOLD) <= 0


def test_grid_three_vertex_ranges_frozen():
    xy = [k for k in range(65) if lemma41_threshold_check(F(k, 64)).verdict == "three_vertices"]
    xz = [k for k in range(65) if lemma42_threshold_check(F(k, 64)).verdict == "three_vertices"]
    assert xy == list(range(38, 57))
    assert xz == list(range(0, 38))


@pytest.mark.parametrize("u, exists", [(F(5, 8), True), (F(7, 8), True)])
def test_brute_force_oracle_finds_triangle(u, exists):
    outer = [tuple(p) for p in face_polygon("xy")]
    inner = [tuple(p) for p in inner_triangle("xy")]
    assert nested_triangle_exists((u, F(0)), outer, inner) is exists
    assert lemma41_threshold_check(u).verdict == "three_vertices"


@pytest.mark.parametrize("u", [F(1, 2), F(57, 64), F(1)])
def test_brute_force_oracle_agrees_on_quadrilaterals(u):
    outer = [tuple(p) for p in face_polygon("xy")]
    inner = [tuple(p) for p in inner_triangle("xy")]
    assert not nested_triangle_exists((u, F(0)), outer, inner)
    assert lemma41_threshold_check(u).verdict == "more_than_three"


def test_u_one_by_hand():
    res = supporting_polygon(inner_triangle("xy"), face_polygon("xy"), (1, 0))
    # tangent through r2 to (2/3, 2/3), then through r3 to (0, 11/13)
    assert res.vertices[:3] == (P(1, 0), P(F(2, 3), F(2, 3)), P(0, F(11, 13)))
    # closing edge back to (1, 0) leaves r1 on its right (-9/104)
    assert orient(P(0, F(11, 13)), P(1, 0), P(F(3, 4), F(1, 8))) < 0
    assert res.vertex_count == 4


def test_exclusion_instances_infeasible():
    rep = exclude_types_2_3()
    assert rep.passed
    for inst in rep.instances:
        assert not inst.feasible
        assert inst.certificate_valid
        assert len(inst.certificate.indices) <= 3


def test_sanity_instance_is_feasible():
    inst = sanity_instance_r1()
    assert inst.feasible
    w = inst.witness
    assert nesting_witness((P(0, 0), P(1, 0), w), ConvexPolygon([P(F(3, 4), F(1, 8)), P(0, 0), P(1, 0)])) is None


def test_type1_uniqueness():
    rep = verify_type1_uniqueness(steps=8)
    assert rep.passed
    assert rep.samples_failing_nesting == rep.samples_checked


def test_perturbed_q2_gives_orientation_witness():
    q = qstar_2d("xy")
    q2 = q[2] + P(F(-1, 100), F(1, 200))
    wit = nesting_witness((q[1], q[3], q2), inner_triangle("xy"))
    assert wit is not None
    a, b, r = wit
    assert orient(a, b, r) < 0
