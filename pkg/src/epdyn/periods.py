"""Periods of complex classical motion on the Riemann surface of sqrt(2(E - V)).

A period attached to a pair of branch points a, b is T = 2 * int_a^b dz / sqrt(2(E - V)).
The integral is taken along a quadratic Bezier path from a to b (a straight
chord unless a third branch point sits close to it) and the substitution
u = sin^2(theta) removes both inverse square-root endpoint singularities:
with E - V = c (z - a)(z - b) Q(z) the integrand becomes smooth in theta and
only sqrt(c Q(z) A B) remains, whose sign is followed by continuity.

Closed forms
------------
cubic, V = i z^3:      T1 = 5 sqrt(pi/6) Gamma(4/3)/Gamma(11/6) E^(-1/6)
pure quintic, -i z^5:  T1, T2 = (7/5) sqrt(2 pi) cos(pi/10), cos(3 pi/10) * K E^(-3/10)
                       with K = Gamma(6/5)/Gamma(17/10), T3 = T1 - T2, and the
                       imaginary periods Tt1, Tt2, Tt3 listed in
                       :func:`closed_form_quintic`.

Cycle identification for the pure quintic at E > 0 (turning points on the
pentagon e^{i(pi/10 + 2 pi k/5)}), established numerically by
:func:`quintic_period_table`:

* T1: chord joining the two upper off-axis points (arg pi/10 and 9 pi/10);
* T2: chord joining the two lower points (arg -3 pi/10 and -7 pi/10);
* T3: twice the ray from z = i E^(1/5) to i infinity;
* Tt2 = 2 |Im T(lower point, top point)|;
* Tt3 = 2 |Im T(lower point, upper off-axis point on the same side)|;
* Tt1 = Tt2 + Tt3.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.special import gamma

from ._errors import ConvergenceError, DomainError
from .cpoly import PolynomialC, ProblemSpec, flat_roots, min_root_separation, roots

INF = "inf"

_K5 = gamma(6 / 5) / gamma(17 / 10)
_C5 = 7 / 5 * math.sqrt(2 * math.pi) * _K5
_C3 = 5 * math.sqrt(math.pi / 6) * gamma(4 / 3) / gamma(11 / 6)


# --- closed forms ------------------------------------------------------------


@dataclass
class PeriodData:
    E: complex
    g: float
    T1: float
    T2: Optional[float] = None
    T3: Optional[float] = None
    Tt1: Optional[float] = None
    Tt2: Optional[float] = None
    Tt3: Optional[float] = None
    cycles: dict = field(default_factory=dict)

    def as_dict(self):
        keys = ("T1", "T2", "T3", "Tt1", "Tt2", "Tt3")
        return {k: getattr(self, k) for k in keys if getattr(self, k) is not None}


def _positive(E):
    E = complex(E)
    if E.imag != 0 or E.real <= 0:
        raise DomainError("closed-form periods are derived for real positive energy")
    return E.real


def closed_form_cubic_T1(E: float) -> float:
    return _C3 * _positive(E) ** (-1 / 6)


def cubic_lattice_closed_form(E: float):
    """(T1, T2, iTt) for V = i z^3: T2 = T1 e^{i pi/3}, iTt = 2 T2 - T1 = i sqrt(3) T1."""
    T1 = closed_form_cubic_T1(E)
    T2 = T1 * complex(math.cos(math.pi / 3), math.sin(math.pi / 3))
    return T1, T2, 2 * T2 - T1


def closed_form_quintic(E: float) -> PeriodData:
    s = _positive(E) ** (-0.3) * _C5
    s1, s3 = math.sin(math.pi / 10), math.sin(3 * math.pi / 10)
    T1 = s * math.cos(math.pi / 10)
    T2 = s * math.cos(3 * math.pi / 10)
    return PeriodData(
        E=E, g=1.0, T1=T1, T2=T2, T3=T1 - T2,
        Tt1=s * (1 + 2 * s3 + s1),
        Tt2=s * (1 + s3),
        Tt3=s * (s3 + s1),
    )


# --- quadrature --------------------------------------------------------------


@dataclass(frozen=True)
class Cycle:
    """Branch-point pair (indices into a turning-point list) or (i, INF).

    ``direction`` fixes the homotopy class of a ray to infinity; by default the
    ray leaves radially.  ``orientation`` multiplies the canonical value.
    """

    a: int
    b: Union[int, str]
    orientation: int = 1
    direction: Optional[complex] = None

    def __post_init__(self):
        if self.a == self.b:
            raise DomainError("cycle needs two distinct branch points")


_GL_ORDER = 20


def _gl_panels(n_panels, lo, hi):
    x, w = np.polynomial.legendre.leggauss(_GL_ORDER)
    edges = np.linspace(lo, hi, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _track_sqrt(w2, start=None):
    """Square root of w2 (ordered along a path) continued by minimal jumps."""
    w = np.sqrt(w2.astype(complex))
    if start is not None and abs(w[0] - start) > abs(w[0] + start):
        w[0] = -w[0]
    for i in range(1, w.size):
        if abs(w[i] - w[i - 1]) > abs(w[i] + w[i - 1]):
            w[i] = -w[i]
    # ambiguity of each sign choice: near 1 means the branch is not resolved
    amb = np.abs(np.diff(w)) / np.maximum(np.abs(w[1:] + w[:-1]), 1e-300)
    return w, float(amb.max()) if amb.size else 0.0


class BranchTrackingError(ConvergenceError):
    pass


def _bezier_integrand(lead, others, a, b, m, theta):
    u = np.sin(theta) ** 2
    A = 2 * (1 - u) * (m - a) + u * (b - a)
    B = (1 - u) * (a - b) + 2 * u * (m - b)
    z = (1 - u) ** 2 * a + 2 * u * (1 - u) * m + u * u * b
    dz = 2 * (1 - u) * (m - a) + 2 * u * (b - m)
    Q = lead * np.ones_like(z)
    for r in others:
        Q = Q * (z - r)
    return z, 2 * dz, Q * A * B


def _ray_integrand(lead, others, a, d, theta):
    s = np.cos(theta)
    u = np.sin(theta) ** 2
    z = a + d * u / (s * s)
    # dz/sqrt(P) = 2 d / (cos^2 sqrt(Q d)) dtheta; Q ~ cos^(-2k) is scaled out
    Q = lead * np.ones_like(z)
    for r in others:
        Q = Q * ((z - r) * s * s)
    k = len(others)
    return z, 2 * d * s ** (k - 2), Q * d


def path_integral(P: PolynomialC, a: complex, b, *, control: Optional[complex] = None,
                  direction: Optional[complex] = None, rtol: float = 1e-12,
                  max_panels: int = 4096, start_sqrt=None):
    """int_a^b dz / sqrt(P(z)) for simple roots a (and b) of P.

    ``b`` is a root or INF.  Returns (value, error estimate, sqrt at theta=0).
    """
    rr = [r for r in flat_roots(P)]
    lead = P.coeffs[P.degree]

    def pop(lst, x):
        k = int(np.argmin([abs(y - x) for y in lst]))
        if abs(lst[k] - x) > 1e-6 * max(1.0, abs(x)):
            raise DomainError(f"{x} is not a branch point")
        return lst[:k] + lst[k + 1 :]

    others = pop(rr, a)
    if b == INF:
        d = direction if direction is not None else (a / abs(a) if a != 0 else 1.0)
        d = complex(d) / abs(d)

        def f(theta):
            return _ray_integrand(lead, others, a, d, theta)
    else:
        others = pop(others, b)
        m = control if control is not None else 0.5 * (a + b)

        def f(theta):
            return _bezier_integrand(lead, others, a, b, m, theta)

    n = 8
    prev = None
    while True:
        theta, wts = _gl_panels(n, 0.0, math.pi / 2)
        z, num, w2 = f(theta)
        root, jump = _track_sqrt(w2, start_sqrt)
        val = np.sum(wts * num / root)
        if prev is not None and jump < 0.5:
            err = abs(val - prev)
            if err <= rtol * abs(val):
                return complex(val), float(err), complex(root[0])
        if n >= max_panels:
            if jump >= 0.5:
                raise BranchTrackingError(
                    "square-root branch could not be followed along the path", best=z)
            raise ConvergenceError(
                f"quadrature did not reach rtol={rtol} (last change {abs(val - prev):.2e})",
                best=complex(val))
        prev = val
        n *= 2


def _canonical(v: complex) -> complex:
    # orientation convention: Re > 0, or Im > 0 when purely imaginary
    if abs(v.real) > 1e-9 * abs(v):
        return v if v.real > 0 else -v
    return v if v.imag > 0 else -v


TUBE = 0.1


def auto_control(a, b, others, tube=TUBE):
    """Midpoint control that bends the chord away from nearby branch points."""
    if b == INF:
        return None
    m = 0.5 * (a + b)
    d = b - a
    nrm = 1j * d / abs(d)
    for r in others:
        t = ((r - a) * d.conjugate()).real / abs(d) ** 2
        if 0 < t < 1:
            off = ((r - a) * nrm.conjugate()).real
            if abs(off) < tube:
                side = -1.0 if off >= 0 else 1.0
                return m + side * 0.6 * abs(d) * nrm
    return m


def cycle_integral(spec: ProblemSpec, cycle: Cycle, *, points=None, full_output=False,
                   rtol=1e-12):
    """Period 2 int dz/sqrt(2(E-V)) attached to ``cycle``.

    ``points`` defaults to the turning points of ``spec`` in canonical order.
    Canonical orientation: Re T > 0 (Im T > 0 if T is purely imaginary),
    multiplied by ``cycle.orientation``.
    """
    P = 2 * spec.kinetic()
    rm = roots(P)
    if any(m > 1 for _, m in rm):
        raise DomainError("cycle pinched at exceptional point")
    pts = list(points) if points is not None else [r for r, _ in rm]
    if len(pts) > 1 and min_root_separation(pts) < 1e-7:
        raise DomainError("cycle pinched at exceptional point")
    a = pts[cycle.a]
    b = INF if cycle.b == INF else pts[cycle.b]
    others = [p for k, p in enumerate(pts) if k not in (cycle.a, cycle.b)]
    ctrl = auto_control(a, b, others)
    val, err, _ = path_integral(P, a, b, control=ctrl, direction=cycle.direction, rtol=rtol)
    T = cycle.orientation * _canonical(2 * val)
    if full_output:
        return T, 2 * err
    return T


def quintic_period_table(spec: ProblemSpec) -> dict:
    """All chord periods T(i, j) and the rays T(i, INF) in canonical orientation."""
    from .cpoly import turning_points

    tps = turning_points(spec)
    pts = list(tps.points)
    out = {}
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            out[(i, j)] = cycle_integral(spec, Cycle(i, j), points=pts)
        out[(i, INF)] = cycle_integral(spec, Cycle(i, INF), points=pts)
    return out


def quintic_periods_numeric(E: float) -> PeriodData:
    """Quadrature counterpart of :func:`closed_form_quintic` for V = -i z^5."""
    E = _positive(E)
    spec = ProblemSpec.pure_quintic(E)
    from .cpoly import turning_points

    pts = list(turning_points(spec).points)
    ang = [math.degrees(math.atan2(p.imag, p.real)) for p in pts]

    def idx(deg):
        return int(np.argmin([abs((x - deg + 180) % 360 - 180) for x in ang]))

    top, ur, ul, lr, ll = idx(90), idx(18), idx(162), idx(-54), idx(-126)

    def T(i, j):
        return cycle_integral(spec, Cycle(i, j), points=pts)

    T1 = T(ur, ul).real
    T2 = T(lr, ll).real
    T3 = T(top, INF).real
    Tt2 = 2 * abs(T(ll, top).imag)
    Tt3 = 2 * abs(T(ll, ul).imag)
    cyc = {"T1": (ur, ul), "T2": (lr, ll), "T3": (top, INF),
           "Tt2": (ll, top), "Tt3": (ll, ul)}
    return PeriodData(E=E, g=1.0, T1=T1, T2=T2, T3=T3, Tt1=Tt2 + Tt3, Tt2=Tt2, Tt3=Tt3,
                      cycles=cyc)


# --- monodromy ---------------------------------------------------------------


def _match(prev, new):
    """Greedy nearest-neighbour relabelling of ``new`` onto ``prev``."""
    new = list(new)
    out = []
    for p in prev:
        k = int(np.argmin([abs(q - p) for q in new]))
        out.append(new.pop(k))
    return out


def _side(a, b, r):
    return ((b - a).conjugate() * (r - a)).imag


def monodromy_continue(spec: ProblemSpec, cycle: Cycle, turns: int, *, max_step=2 * math.pi / 240,
                       return_path=False):
    """Continue the period of ``cycle`` along E(theta) = |E| e^{i theta}, theta: 0 -> -2 pi turns.

    Branch points are relabelled by continuity, the straight-chord contour is
    kept (a third branch point crossing it is reported) and the square-root
    sign of each new value is chosen closest to the previous one.
    """
    from .cpoly import turning_points

    E0 = complex(spec.E)
    pts = list(turning_points(spec).points)
    T = cycle_integral(spec, cycle, points=pts)
    if turns == 0:
        return (T, []) if return_path else T
    R, ph0 = abs(E0), math.atan2(E0.imag, E0.real)
    target = -2 * math.pi * turns
    theta = 0.0
    step = math.copysign(max_step, target)
    path = [(theta, T)]
    a_idx, b_idx = cycle.a, cycle.b
    direction = cycle.direction
    if cycle.b == INF and direction is None:
        direction = pts[a_idx] / abs(pts[a_idx])
    while abs(theta - target) > 1e-14:
        h = step if abs(target - theta) > abs(step) else target - theta
        Et = R * complex(math.cos(ph0 + theta + h), math.sin(ph0 + theta + h))
        s2 = spec.with_(E=Et)
        new = [r for r, m in roots(2 * s2.kinetic()) for _ in range(m)]
        sep = min_root_separation(new)
        if sep < 1e-6:
            raise DomainError("pinch during continuation")
        new = _match(pts, new)
        motion = max(abs(p - q) for p, q in zip(pts, new))
        if motion > 0.2 * min(sep, min_root_separation(pts)):
            step /= 2
            if abs(step) < 1e-8:
                raise ConvergenceError("branch points move too fast to track", best=theta)
            continue
        a_old, a_new = pts[a_idx], new[a_idx]
        if b_idx != INF:
            b_old, b_new = pts[b_idx], new[b_idx]
            for k in range(len(pts)):
                if k in (a_idx, b_idx):
                    continue
                if _side(a_old, b_old, pts[k]) * _side(a_new, b_new, new[k]) < 0:
                    t = (((new[k] - a_new) * (b_new - a_new).conjugate()).real
                         / abs(b_new - a_new) ** 2)
                    if 0 < t < 1:
                        raise ConvergenceError(
                            "a branch point crossed the integration chord", best=theta)
        else:
            direction = direction * (a_new / abs(a_new)) / (a_old / abs(a_old))
        P = 2 * s2.kinetic()
        val, _, _ = path_integral(P, a_new, INF if b_idx == INF else new[b_idx],
                                  direction=direction)
        cand = 2 * val
        T = cand if abs(cand - T) <= abs(cand + T) else -cand
        pts = new
        theta += h
        path.append((theta, T))
    return (T, path) if return_path else T
