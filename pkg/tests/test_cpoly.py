import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epdyn._errors import DomainError
from epdyn.cpoly import (
    G2Params, PolynomialC, ProblemSpec, classical_exceptional_point, coalesced_turning_point,
    discriminant, discriminant_zero, flat_roots, g2_coalescence, g2_vacua, g_star_formula,
    imaginary_axis_count, resultant, roots, turning_points,
)

cplx = st.complex_numbers(min_magnitude=0.1, max_magnitude=3.0, allow_nan=False, allow_infinity=False)


def test_quadratic_roots():
    rs = flat_roots(PolynomialC([2, -3, 1]))
    assert sorted(r.real for r in rs) == pytest.approx([1, 2], abs=1e-14)


def test_double_root_is_clustered():
    p = PolynomialC.from_roots([1j, 1j, -2.0])
    rm = roots(p)
    assert sorted(m for _, m in rm) == [1, 2]
    dbl = [r for r, m in rm if m == 2][0]
    assert abs(dbl - 1j) < 1e-10


def test_zero_polynomial_rejected():
    with pytest.raises(DomainError, match="degenerate"):
        roots(PolynomialC([0, 0, 0]))


@settings(max_examples=40, deadline=None)
@given(st.lists(cplx, min_size=2, max_size=6))
def test_roots_reconstruct_polynomial(rs):
    # well-separated roots only; clustering is tested separately
    if min(abs(a - b) for i, a in enumerate(rs) for b in rs[i + 1:]) < 1e-2:
        return
    p = PolynomialC.from_roots(rs)
    got = flat_roots(p)
    for r in rs:
        assert min(abs(r - g) for g in got) < 1e-9 * max(1, abs(r))


@settings(max_examples=30, deadline=None)
@given(st.lists(cplx, min_size=2, max_size=5))
def test_discriminant_matches_root_product(rs):
    p = PolynomialC.from_roots(rs)
    n = len(rs)
    prod = 1
    for i in range(n):
        for j in range(i + 1, n):
            prod *= (rs[i] - rs[j]) ** 2
    d = discriminant(p)
    assert abs(d - prod) <= 1e-8 * max(1.0, abs(prod))


def test_resultant_common_root_vanishes():
    p = PolynomialC.from_roots([1, 2])
    q = PolynomialC.from_roots([2, 5])
    assert abs(resultant(p, q)) < 1e-12


def test_pure_quintic_turning_points_form_a_pentagon():
    tps = turning_points(ProblemSpec.pure_quintic(1.0))
    assert len(tps) == 5 and tps.symmetric
    angles = sorted(math.degrees(math.atan2(p.imag, p.real)) % 360 for p in tps.points)
    assert angles == pytest.approx([18, 90, 162, 234, 306], abs=1e-9)
    assert all(abs(abs(p) - 1) < 1e-12 for p in tps.points)


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3).filter(lambda e: abs(e) > 0.05), st.floats(0.005, 1.0))
def test_turning_points_mirror_symmetric(E, g):
    tps = turning_points(ProblemSpec("quintic", E=E, g=g))
    if min(tps.multiplicity) == 1 and len(tps) == 5:
        assert tps.symmetric


def test_classical_ep_closed_form_and_discriminant():
    g = classical_exceptional_point(-1.0)
    assert g == pytest.approx(0.2 * 0.3 ** 1.5, rel=1e-12)
    assert g == pytest.approx(0.0328633534503, rel=1e-11)
    assert discriminant_zero(-1.0) == pytest.approx(g, rel=1e-10)


@pytest.mark.parametrize("E", [-0.25, -1.0, -4.0])
def test_classical_ep_scaling(E):
    assert classical_exceptional_point(E) == pytest.approx(g_star_formula(-1) * abs(E) ** -1.5, rel=1e-10)


def test_coalesced_point():
    z = coalesced_turning_point(-1.0)
    assert abs(z - 1j * math.sqrt(10 / 3)) < 1e-14
    tps = turning_points(ProblemSpec("quintic", E=-1.0, g=g_star_formula(-1.0)))
    assert max(tps.multiplicity) == 2


def test_classical_ep_needs_negative_energy():
    with pytest.raises(DomainError):
        classical_exceptional_point(1.0)


@pytest.mark.parametrize("g,count", [(0.03, 3), (0.06, 1), (g_star_formula(-1.0), 2)])
def test_imaginary_axis_count(g, count):
    assert imaginary_axis_count(-1.0, g) == count
    # oracle: numpy's companion-matrix roots of g y^5 - y^2/2 + 1
    if abs(g - g_star_formula(-1.0)) > 1e-6:
        ys = np.roots([g, 0, 0, -0.5, 0, 1.0])
        assert sum(abs(y.imag) < 1e-9 for y in ys) == count
        assert len(turning_points(ProblemSpec("quintic", E=-1.0, g=g)).on_imaginary_axis()) == count


def test_g2_coalescence():
    l2 = g2_coalescence(1.0, 1.0)
    assert l2 == pytest.approx(2 / (3 * math.sqrt(3)), rel=1e-9)
    assert len(g2_vacua(G2Params(1.0, 0.5, 1.0))) == 6
