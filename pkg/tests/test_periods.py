import math

import pytest

from epdyn._errors import DomainError
from epdyn.cpoly import ProblemSpec, g_star_formula, turning_points
from epdyn.periods import (
    INF, Cycle, closed_form_cubic_T1, closed_form_quintic, cycle_integral, monodromy_continue,
    quintic_periods_numeric,
)

# independent tanh-sinh quadratures (mpmath, 30 digits) along straight chords
CUBIC_T1 = 3.43463068450882168509943018261
QUINTIC_T1 = 3.37252791837285742402320549904
QUINTIC_T2 = 2.08433688156235685613841383506
QUINTIC_ESCAPE = 0.644095518405250279479258497983


def test_cubic_closed_form():
    assert closed_form_cubic_T1(1.0) == pytest.approx(CUBIC_T1, rel=1e-14)


def test_cubic_quadrature():
    spec = ProblemSpec.pure_cubic(1.0)
    pts = list(turning_points(spec).points)
    lower = sorted(range(3), key=lambda k: pts[k].imag)[:2]
    assert cycle_integral(spec, Cycle(*lower), points=pts) == pytest.approx(CUBIC_T1, rel=1e-12)


def test_quintic_closed_form_values():
    pd = closed_form_quintic(1.0)
    assert pd.T1 == pytest.approx(QUINTIC_T1, rel=1e-14)
    assert pd.T2 == pytest.approx(QUINTIC_T2, rel=1e-14)
    assert pd.T3 == pytest.approx(2 * QUINTIC_ESCAPE, rel=1e-13)
    assert pd.Tt1 == pytest.approx(pd.Tt2 + pd.Tt3, rel=1e-14)


@pytest.mark.parametrize("E", [0.5, 1.0, 2.0, 1024.0])
def test_quintic_numeric_matches_closed_form(E):
    num = quintic_periods_numeric(E).as_dict()
    cf = closed_form_quintic(E).as_dict()
    for k in cf:
        assert num[k] == pytest.approx(cf[k], rel=1e-9), k


def test_energy_scaling():
    assert closed_form_quintic(32.0).T1 == pytest.approx(QUINTIC_T1 * 32 ** -0.3, rel=1e-14)


def test_ray_to_infinity():
    spec = ProblemSpec.pure_quintic(1.0)
    pts = list(turning_points(spec).points)
    top = max(range(5), key=lambda k: pts[k].imag)
    assert cycle_integral(spec, Cycle(top, INF), points=pts) == pytest.approx(2 * QUINTIC_ESCAPE, rel=1e-11)


def test_orientation_flag():
    spec = ProblemSpec.pure_quintic(1.0)
    a = cycle_integral(spec, Cycle(0, 1))
    b = cycle_integral(spec, Cycle(0, 1, orientation=-1))
    assert a == pytest.approx(-b, rel=1e-14)


def test_pinched_cycle():
    spec = ProblemSpec("quintic", E=-1.0, g=g_star_formula(-1.0))
    with pytest.raises(DomainError, match="pinched"):
        cycle_integral(spec, Cycle(0, 1))


def test_monodromy_T1():
    spec = ProblemSpec.pure_quintic(1.0)
    num = quintic_periods_numeric(1.0)
    cf = closed_form_quintic(1.0)
    T = monodromy_continue(spec, Cycle(*num.cycles["T1"]), 1)
    assert T == pytest.approx((1j * cf.Tt2 - cf.T2) / 2, rel=1e-9)


def test_zero_turns_is_identity():
    spec = ProblemSpec.pure_quintic(1.0)
    assert monodromy_continue(spec, Cycle(0, 1), 0) == cycle_integral(spec, Cycle(0, 1))


def test_same_point_cycle_rejected():
    with pytest.raises(DomainError):
        Cycle(1, 1)
