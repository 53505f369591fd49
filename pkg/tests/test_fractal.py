import json
import math
from fractions import Fraction

import pytest

from zetadeform import fractal as fr
from zetadeform.compositions import ones

LOG_PHI = math.log((1 + math.sqrt(5)) / 2) / math.log(2)


def test_moran_e2_is_golden():
    s = fr.moran_solve(fr.E2_FAMILY)
    assert s.width <= Fraction(1, 10**15)
    assert abs(float(s.mid) - LOG_PHI) < 1e-12
    t = 2 ** float(s.mid)
    assert abs(t * t - t - 1) < 1e-12


@pytest.mark.parametrize("m", [3, 4, 5])
def test_moran_cantor(m):
    s = fr.moran_solve(fr.cantor_family(m), Fraction(1, 10**12))
    assert abs(float(s.mid) - math.log(2) / math.log(m)) < 1e-11


def test_moran_rejects_overlap():
    family = fr.FiniteFamily(((Fraction(2, 3), 0), (Fraction(2, 3), Fraction(1, 3))))
    with pytest.raises(ValueError):
        fr.moran_solve(family)


def test_family_invariants():
    with pytest.raises(ValueError):
        fr.FiniteFamily(((Fraction(1, 2), 0),))
    with pytest.raises(ValueError):
        fr.FiniteFamily(((Fraction(3, 2), 0), (Fraction(1, 2), 0)))
    with pytest.raises(ValueError):
        fr.GeometricFamily(1, 2)
    with pytest.raises(ValueError):
        fr.E2_FAMILY.apply(1, Fraction(0))


def test_cantor_points():
    assert fr.cantor_points(3, 1) == [0, Fraction(2, 3)]
    assert fr.cantor_points(3, 2) == [0, Fraction(2, 9), Fraction(2, 3), Fraction(8, 9)]
    assert fr.cantor_points(4, 1) == [0, Fraction(3, 4)]
    with pytest.raises(ValueError):
        fr.cantor_points(2, 3)
    with pytest.raises(ValueError):
        fr.cantor_points(3, 40)


def test_cantor_nesting():
    for d in range(1, 7):
        coarse = fr.cantor_points(3, d)
        fine = fr.cantor_points(3, d + 1)
        assert set(coarse) <= set(fine)
        assert all(0 <= p <= 1 for p in fine)
        for p in fine:
            assert min(abs(p - q) for q in coarse) <= Fraction(1, 3**d)


def test_e2_points():
    assert fr.e2_points(2) == [Fraction(1, 4)]
    pts = fr.e2_points(4)
    assert pts == [Fraction(1, 16), Fraction(1, 8), Fraction(1, 4), Fraction(5, 16)]
    big = fr.e2_points(14)
    assert all(0 < p < Fraction(1, 3) for p in big)
    assert big == sorted(set(big))


def test_e2_maps_are_disjoint_and_invariant():
    d = 12
    base = set(fr.e2_points(d))
    images = {}
    for k in range(2, d - 1):
        image = {fr.E2_FAMILY.apply(k, p) for p in fr.e2_points(d - k)} | {Fraction(1, 2**k)}
        assert image <= base
        images[k] = image
    ks = sorted(images)
    for a, b in zip(ks, ks[1:]):
        assert images[a].isdisjoint(images[b])
        # the image intervals do not even interleave
        assert max(images[b]) < min(images[a])


def test_box_count_estimates():
    cantor = fr.box_count_dim(fr.cantor_points(3, 12), [Fraction(1, 3**k) for k in range(4, 11)])
    assert abs(cantor.value - math.log(2) / math.log(3)) < 0.05
    assert cantor.stderr >= 0
    e2 = fr.box_count_dim(fr.e2_points(20), [Fraction(1, 2**k) for k in range(6, 15)])
    assert abs(e2.value - LOG_PHI) < 0.05
    grid = [Fraction(j, 4096) for j in range(4096)]
    line = fr.box_count_dim(grid, [Fraction(1, 2**k) for k in range(2, 10)])
    assert abs(line.value - 1) < 1e-9


def test_box_count_half_open_boxes():
    assert fr.box_count([Fraction(0), Fraction(1, 2)], Fraction(1, 2)) == 2
    assert fr.box_count([Fraction(1, 4), Fraction(1, 2) - Fraction(1, 10**9)], Fraction(1, 4)) == 1


def test_box_count_errors():
    with pytest.raises(ValueError):
        fr.box_count_dim([Fraction(1, 2)], [Fraction(1, 2)])
    with pytest.raises(ValueError):
        fr.box_count_dim([], [Fraction(1, 2), Fraction(1, 4)])
    with pytest.raises(ValueError):
        fr.box_count_dim([Fraction(1, 2)], [Fraction(1, 2), Fraction(1, 4)])


def test_dim_estimate_json():
    est = fr.DimEstimate(0.5, 0.01, (0.001, 0.1))
    assert json.loads(est.to_json()) == {"value": 0.5, "stderr": 0.01, "eps_range": [0.001, 0.1]}


def test_cantor_image_points():
    assert fr.cantor_image_point(1, ones((1,))) == Fraction(2, 3) + Fraction(1, 3)
    assert fr.cantor_image_point(1, ones((2,))) == Fraction(2, 9) + Fraction(1, 9)
    # distinct sequences give distinct points
    from zetadeform.deform_map import tail_specs_upto
    specs = tail_specs_upto(4)
    assert len({fr.cantor_image_point(1, t) for t in specs}) == len(specs)


def test_hn_image_sample_bounds():
    rep = fr.hn_image_sample(1, 20, max_weight=2)
    assert rep.samples
    assert 0 < rep.min_ratio <= rep.max_ratio < math.inf
    assert rep.lower_bound <= rep.normalized_lo
    assert rep.normalized_hi <= rep.upper_bound
    assert all(s.cantor_gap > 0 and s.h_gap.lo > 0 for s in rep.samples)
