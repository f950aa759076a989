import math

import numpy as np
import pytest

from epdyn._errors import DomainError
from epdyn.spectrum import (
    Shooter, WedgeProblem, complex_pair_count, eigenvalues, matrix_ep_demo, outer_radius, polish,
    shoot, track,
)

# Oracle: Chebyshev collocation of H = p^2/2 + z^2/2 - i g z^5 with Dirichlet ends.
# Problem One on the real line [-8, 8]; problem Two on the hyperbola
# z = s - i tan(3pi/14) sqrt(1 + s^2), s in [-10, 10].  N = 300..500, converged to ~1e-11.
ONE = {
    0.5: [0.6853543279651, 2.4457725000865, 4.8123953471962, 7.6127672097679,
          10.7693703127996, 14.2337057479075],
    0.1: [0.5440388745739, 1.8019817213512, 3.3720959607366, 5.2043240670512,
          7.2542344575377, 9.4934900413643],
    0.01: [0.5013009473845, 1.5152206057002, 2.5707155328912, 3.6953344551227,
           4.9002154562244, 6.1852903795029],
}
TWO_002 = [0.58632798505 - 0.368870340825j, 0.58632798505 + 0.368870340825j,
           1.04817749403, 2.74016079189]
TWO_0004 = [0.50003633077, 1.42203410667, 1.91687961521 - 1.10643834341j,
            1.91687961521 + 1.10643834341j, 2.02140451438 - 2.68369212080j,
            2.02140451438 + 2.68369212080j, 2.1424542356]
TWO_006 = [0.20381441081, 1.05657218578, 2.98392177206]


def _key(E):
    return (round(E.real, 6), E.imag)


def test_rays_inside_sectors():
    for p in WedgeProblem:
        for th, (lo, hi) in zip(p.rays, p.sectors):
            assert lo < th < hi
            assert hi - lo == pytest.approx(2 * math.pi / 7)
    assert WedgeProblem.parse("two") is WedgeProblem.Two
    with pytest.raises(DomainError):
        WedgeProblem.parse("Three")


def test_ray_outside_wedge_rejected():
    with pytest.raises(DomainError, match="wedge"):
        Shooter(0.1, "One", R_outer=3.0, rays=(0.7, 13 * math.pi / 14))


def test_problem_two_small_g_refused():
    with pytest.raises(DomainError, match="refuses"):
        Shooter(5e-4, "Two")


def test_outer_radius_grows_as_g_shrinks():
    assert outer_radius(0.01, "One") > outer_radius(0.5, "One")


def test_matrix_demo():
    pair, ep = matrix_ep_demo(0.25)
    assert pair == pytest.approx((0.5, 1.5)) and not ep
    pair, ep = matrix_ep_demo(-0.25)
    assert pair == pytest.approx((1 - 0.5j, 1 + 0.5j)) and not ep
    pair, ep = matrix_ep_demo(0.0)
    assert pair[0] == pair[1] and ep


def test_harmonic_limit():
    recs = eigenvalues(0.0, "One", 6)
    for n, r in enumerate(recs):
        assert abs(r.E - (n + 0.5)) < 1e-6


@pytest.mark.parametrize("g", sorted(ONE))
def test_problem_one_against_collocation(g):
    recs = eigenvalues(g, "One", 6)
    got = [r.E for r in recs]
    assert np.max(np.abs(np.imag(got))) <= 1e-7
    assert np.allclose(np.real(got), ONE[g], rtol=1e-8, atol=0)
    assert all(r.residual < 1e-8 for r in recs)


@pytest.mark.parametrize("g,ref", [(0.02, TWO_002), (0.004, TWO_0004), (0.06, TWO_006)])
def test_problem_two_against_collocation(g, ref):
    got = sorted((r.E for r in eigenvalues(g, "Two", len(ref))), key=_key)
    assert np.allclose(got, sorted(ref, key=_key), rtol=0, atol=1e-7)


def test_conjugate_pairs_and_counts():
    assert complex_pair_count(0.06, "Two")[0] == 0
    assert complex_pair_count(0.02, "Two")[0] == 1
    assert complex_pair_count(0.004, "Two")[0] == 2


def test_mismatch_is_analytic():
    sh = Shooter(0.1, "One", E_max=5.0)
    E, h = 1.3 + 0.4j, 1e-4
    fx = (sh(E + h) - sh(E - h)) / (2 * h)
    fy = (sh(E + 1j * h) - sh(E - 1j * h)) / (2 * h)
    assert abs(fy - 1j * fx) <= 1e-6 * abs(fx)


def test_eigenvalue_independent_of_radius_and_ray():
    base = polish(Shooter(0.1, "One", E_max=5.0), 1.8)[0]
    big = polish(Shooter(0.1, "One", R_outer=1.5 * outer_radius(0.1, "One", 5.0)), 1.8)[0]
    rot = polish(Shooter(0.1, "One", E_max=5.0,
                         rays=(math.pi / 14 + math.pi / 28, 13 * math.pi / 14 - math.pi / 28)), 1.8)[0]
    assert abs(big - base) < 1e-9 and abs(rot - base) < 1e-9


def test_shoot_vanishes_at_eigenvalue():
    E = ONE[0.5][0]
    assert abs(shoot(0.5, E)) < 1e-9 * abs(shoot(0.5, E + 0.3))


def test_track_levels_ordered():
    rows = track([0.1, 0.3, 0.5], "One", count=3)
    for row in rows:
        assert all(r is not None for r in row)
        assert [r.real for r in row] == sorted(r.real for r in row)
    assert rows[-1][0] == pytest.approx(ONE[0.5][0], abs=1e-8)
    with pytest.raises(DomainError):
        track([0.3, 0.1])
