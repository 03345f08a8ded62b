"""Unit tests for exact torus geometry: segment sets, preimages, metrics."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fupcon.exact_arith import Moduli
from fupcon.torus import (
    SegmentSet,
    SolenoidPoint,
    TorusPoint,
    TorusSegment,
    apply_f,
    apply_f_set,
    arc_dist,
    base_point,
    components,
    equal_as_point_sets,
    f_preimages,
    intersect,
    preimage_set,
    preimage_sheets,
    read_segment_set_csv,
    segment_intersections,
    solenoid_distance,
    solenoid_tail_bound,
    torus_dist,
    write_segment_set_csv,
)

M23 = Moduli.of(2, 3)

Fr = Fraction


def seg(a, b):
    return TorusSegment(tuple(Fr(x) for x in a), tuple(Fr(x) for x in b))


def sset(*segments):
    return SegmentSet.from_segments(segments)


DIAGONAL = sset(seg((0, 0), (1, 1)))


def test_point_normalization_and_base():
    p = TorusPoint((Fr(5, 4), Fr(-1, 3)))
    assert p.coords == (Fr(1, 4), Fr(2, 3))
    assert base_point(2).coords == (Fr(0), Fr(0))


def test_apply_f_frozen():
    p = TorusPoint((Fr(1, 4), Fr(1, 9)))
    assert apply_f(p, M23).coords == (Fr(1, 2), Fr(1, 3))


def test_preimages_of_base():
    pre = f_preimages(base_point(2), M23)
    assert len(pre) == 6
    assert pre == sorted(pre)
    coords = {q.coords for q in pre}
    assert coords == {
        (Fr(a, 2), Fr(b, 3)) for a in range(2) for b in range(3)
    }
    for q in pre:
        assert apply_f(q, M23) == base_point(2)


def test_segment_rejects_degenerate():
    with pytest.raises(ValueError):
        seg((0, 0), (0, 0))


def test_canonical_form_ignores_orientation_translation_splitting():
    whole = DIAGONAL
    reversed_ = sset(seg((1, 1), (0, 0)))
    translated = sset(seg((3, 2), (4, 3)))
    split = sset(seg((0, 0), (Fr(1, 3), Fr(1, 3))), seg((Fr(1, 3), Fr(1, 3)), (1, 1)))
    for other in (reversed_, translated, split):
        assert whole == other
    assert whole.total_arc_length() == split.total_arc_length()


def test_covers_and_point_membership():
    half = sset(seg((0, 0), (Fr(1, 2), Fr(1, 2))))
    assert DIAGONAL.covers(half)
    assert not half.covers(DIAGONAL)
    assert DIAGONAL.contains_point(TorusPoint((Fr(1, 5), Fr(1, 5))))
    assert not DIAGONAL.contains_point(TorusPoint((Fr(1, 5), Fr(2, 5))))
    assert equal_as_point_sets(DIAGONAL, DIAGONAL)


def test_two_half_turns_cover_a_full_geodesic():
    two_halves = sset(
        seg((0, 0), (1, Fr(1, 2))),
        seg((1, Fr(1, 2)), (2, 1)),
    )
    closed = sset(seg((0, 0), (2, 1)))
    assert two_halves == closed
    assert closed.arcs[0].is_full


def test_cross_intersection_frozen():
    a = seg((0, 0), (1, 1))
    b = seg((0, 1), (1, 0))
    hits = segment_intersections(a, b)
    assert not hits.arcs
    assert set(hits.points) == {
        (Fr(0), Fr(0)),
        (Fr(1, 2), Fr(1, 2)),
    }


def test_parallel_overlap_intersection():
    a = sset(seg((0, 0), (Fr(2, 3), Fr(2, 3))))
    b = sset(seg((Fr(1, 3), Fr(1, 3)), (1, 1)))
    overlap = intersect(a, b)
    # b closes up at (1,1) = (0,0), which sits inside a: the meet is the
    # shared sub-arc plus that isolated touch point
    expected = SegmentSet.from_segments(
        [seg((Fr(1, 3), Fr(1, 3)), (Fr(2, 3), Fr(2, 3)))],
        points=[(Fr(0), Fr(0))],
    )
    assert overlap == expected


def test_disjoint_parallels_do_not_intersect():
    a = sset(seg((0, 0), (1, 1)))
    b = sset(seg((0, Fr(1, 2)), (1, Fr(3, 2))))
    assert intersect(a, b).is_empty
    assert not a.covers(b)


def test_components_counts():
    pre_diag = preimage_set(DIAGONAL, M23)
    assert len(components(pre_diag)) == 1  # a single (3,2)-geodesic

    loop23 = sset(seg((0, 0), (2, 3)))
    pre23 = preimage_set(loop23, M23)
    assert len(components(pre23)) == 6


def test_preimage_sheet_count_and_inverse():
    for base in (DIAGONAL, sset(seg((0, 0), (2, 3)))):
        sheets = preimage_sheets(base, M23)
        assert len(sheets) == M23.product() * len(base.segments)
        assert apply_f_set(preimage_set(base, M23), M23) == base


def test_preimage_contains_all_base_preimages():
    pre = preimage_set(DIAGONAL, M23)
    for q in f_preimages(base_point(2), M23):
        assert pre.contains_point(q)


@settings(max_examples=60)
@given(
    st.lists(
        st.tuples(
            st.fractions(min_value=-2, max_value=2, max_denominator=12),
            st.fractions(min_value=-2, max_value=2, max_denominator=12),
            st.integers(min_value=-3, max_value=3),
            st.integers(min_value=-3, max_value=3),
        ),
        min_size=1,
        max_size=4,
    )
)
def test_apply_f_inverts_preimage_for_random_sets(raw):
    segments = []
    for x, y, dx, dy in raw:
        if dx == 0 and dy == 0:
            continue
        segments.append(seg((x, y), (x + dx, y + dy)))
    if not segments:
        return
    s = SegmentSet.from_segments(segments)
    assert apply_f_set(preimage_set(s, M23), M23) == s


def test_csv_roundtrip(tmp_path):
    s = SegmentSet.from_segments(
        [seg((0, 0), (1, 1)), seg((Fr(1, 2), 0), (Fr(1, 2), Fr(1, 3)))],
        points=[(Fr(1, 7), Fr(2, 7))],
    )
    path = tmp_path / "set.csv"
    write_segment_set_csv(s, path)
    back = read_segment_set_csv(path)
    assert back == s
    assert equal_as_point_sets(back, s)


def test_arc_dist_basic():
    assert arc_dist(Fr(0), Fr(3, 4)) == Fr(1, 4)
    assert arc_dist(Fr(1, 3), Fr(2, 3)) == Fr(1, 3)
    assert arc_dist(Fr(1, 5), Fr(1, 5)) == 0


@given(
    st.fractions(min_value=0, max_value=1, max_denominator=60),
    st.fractions(min_value=0, max_value=1, max_denominator=60),
)
def test_arc_dist_symmetric_and_bounded(a, b):
    d = arc_dist(a, b)
    assert d == arc_dist(b, a)
    assert 0 <= d <= Fr(1, 2)


def test_torus_dist_is_max_over_coordinates():
    p = TorusPoint((Fr(0), Fr(0)))
    q = TorusPoint((Fr(1, 4), Fr(5, 6)))
    assert torus_dist(p, q) == Fr(1, 4)


def _coherent(levels):
    return SolenoidPoint(M23, tuple(TorusPoint(v) for v in levels))


def test_solenoid_point_requires_coherence():
    good = _coherent([(Fr(1, 2), Fr(1, 3)), (Fr(1, 4), Fr(1, 9))])
    assert len(good.levels) == 2
    with pytest.raises(ValueError):
        _coherent([(Fr(1, 2), Fr(1, 3)), (Fr(1, 4), Fr(2, 9))])


def test_solenoid_distance_and_tail():
    x = _coherent([(Fr(0), Fr(0)), (Fr(0), Fr(0))])
    y = _coherent([(Fr(1, 2), Fr(1, 3)), (Fr(1, 4), Fr(1, 9))])
    d = solenoid_distance(x, y)
    assert d == Fr(1, 2) * Fr(1, 2) + Fr(1, 4) * Fr(1, 4)
    assert solenoid_distance(x, y) == solenoid_distance(y, x)
    assert solenoid_distance(x, x) == 0
    assert solenoid_tail_bound(2) == Fr(1, 8)


@settings(max_examples=40)
@given(
    st.lists(st.integers(min_value=0, max_value=5), min_size=3, max_size=3),
    st.lists(st.integers(min_value=0, max_value=5), min_size=3, max_size=3),
    st.lists(st.integers(min_value=0, max_value=5), min_size=3, max_size=3),
)
def test_solenoid_triangle_inequality(ka, kb, kc):
    def tower_point(ks):
        # walk preimages of the base point chosen by the indices in ks
        levels = [base_point(2)]
        for k in ks:
            pre = f_preimages(levels[-1], M23)
            levels.append(pre[k % len(pre)])
        return SolenoidPoint(M23, tuple(levels))

    a, b, c = tower_point(ka), tower_point(kb), tower_point(kc)
    assert solenoid_distance(a, c) <= solenoid_distance(a, b) + solenoid_distance(b, c)
