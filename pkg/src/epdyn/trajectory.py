"""Complex classical trajectories of zdot^2/2 + V(z) = E.

Time may run along any ray of the complex t plane: with t = e^{i phi} s and
s real, the state (z, w = dz/dt) obeys dz/ds = e^{i phi} w,
dw/ds = -e^{i phi} V'(z).  ``axis`` is ``"real"`` (phi = 0), ``"imaginary"``
(phi = pi/2) or a float angle.  Integration uses the embedded 8(5,3)
Dormand-Prince pair from scipy with complex state.

Stem trajectories start at a turning point, where zdot = 0, via the local
series z = z_tp - V' tau^2/2 + V'' V' tau^4/24 and end at the closest
approach to the target branch point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np
from scipy.integrate import solve_ivp

from ._errors import ConvergenceError, DomainError
from .cpoly import ProblemSpec, turning_points
from .periods import INF, Cycle, cycle_integral

TOL_E = 1e-8
RTOL = 1e-12
ATOL = 1e-14
LAUNCH_DELTA = 1e-4
STEM_GAP = 1e-5
R_ESC = 1e6
ESCAPE_LADDER = (1e4, 1e5, 1e6)


def _phase(axis) -> complex:
    if axis == "real":
        return 1.0 + 0j
    if axis == "imaginary":
        return 1j
    return complex(math.cos(axis), math.sin(axis))


@dataclass
class Trajectory:
    """Sampled path; ``t`` is the real parameter along ``axis``."""

    t: np.ndarray
    z: np.ndarray
    zdot: np.ndarray
    E: complex
    axis: Union[str, float] = "real"
    energy_residual: np.ndarray = field(default=None, repr=False)
    closed: bool = False
    closure_gap: float = math.nan
    period: Optional[float] = None
    escaped: bool = False
    escape_time: Optional[float] = None
    stem: Optional[tuple] = None
    terminal_gap: float = math.nan
    sol: object = field(default=None, repr=False, compare=False)

    def __len__(self):
        return self.t.size

    @property
    def max_drift(self) -> float:
        return float(np.max(self.energy_residual)) if self.energy_residual is not None else 0.0

    def at(self, s):
        """(z, zdot) at parameter ``s`` from the dense interpolant."""
        if self.sol is None:
            raise DomainError("trajectory has no dense output")
        y = self.sol(s)
        return y[0], y[1]


def _residuals(spec, z, w):
    V = spec.potential()
    E = complex(spec.E)
    kin = 0.5 * w * w
    res = np.abs(kin + V(z) - E)
    # roundoff in the kinetic term scales with its size
    return res / np.maximum(max(abs(E), 1.0), np.abs(kin))


def _rhs(spec, phase):
    dV = spec.potential().deriv()

    def f(s, y):
        return np.array([phase * y[1], -phase * dV(y[0])])

    return f


class _Stitched:
    """Dense output over consecutive solve_ivp segments."""

    def __init__(self):
        self.parts = []

    def add(self, lo, hi, fn):
        self.parts.append((lo, hi, fn))

    def __call__(self, s):
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.empty((2, s_arr.size), dtype=complex)
        for k, x in enumerate(s_arr):
            for lo, hi, fn in self.parts:
                if lo - 1e-12 <= x <= hi + 1e-12:
                    out[:, k] = fn(x)
                    break
            else:
                raise DomainError(f"parameter {x} outside trajectory")
        return out[:, 0] if np.ndim(s) == 0 else out


def _make(spec, s, z, w, axis, sol=None, **kw):
    return Trajectory(t=np.asarray(s, float), z=np.asarray(z, complex),
                      zdot=np.asarray(w, complex), E=complex(spec.E), axis=axis,
                      energy_residual=_residuals(spec, np.asarray(z), np.asarray(w)),
                      sol=sol, **kw)


def _solve(spec, phase, s0, s1, y0, events=None, max_step=np.inf):
    sol = solve_ivp(_rhs(spec, phase), (s0, s1), np.asarray(y0, complex), method="DOP853",
                    rtol=RTOL, atol=ATOL, dense_output=True, events=events, max_step=max_step)
    if sol.status == -1:
        raise ConvergenceError(f"integration failed: {sol.message}", best=sol.y[:, -1])
    return sol


def _escape_event(R):
    def ev(s, y):
        return abs(y[0]) - R

    ev.terminal = True
    ev.direction = 1
    return ev


def _sample(sol_fn, s0, s1, n):
    s = np.linspace(s0, s1, n)
    y = sol_fn(s)
    return s, y[0], y[1]


def integrate(spec: ProblemSpec, z0: complex, zdot0: complex, t_max: float, axis="real", *,
              t0: float = 0.0, n_samples: int = 4001, escape_radius: float = R_ESC,
              check_energy: bool = True) -> Trajectory:
    """Integrate from (z0, zdot0) over parameter [t0, t0 + t_max] along ``axis``."""
    V = spec.potential()
    E = complex(spec.E)
    if check_energy and abs(0.5 * zdot0 ** 2 + V(z0) - E) > 1e-10 * max(abs(E), 1.0):
        raise DomainError("inconsistent initial data: zdot0^2/2 + V(z0) != E")
    phase = _phase(axis)
    sol = _solve(spec, phase, t0, t0 + t_max, [z0, zdot0], events=[_escape_event(escape_radius)])
    s_end = sol.t[-1]
    s, z, w = _sample(sol.sol, t0, s_end, n_samples)
    escaped = sol.status == 1
    return _make(spec, s, z, w, axis, sol=sol.sol, escaped=escaped,
                 escape_time=float(s_end) if escaped else None)


# --- launching from a turning point ----------------------------------------


def launch_state(spec: ProblemSpec, z_tp: complex, tau: complex):
    """(z, zdot) at complex time ``tau`` after sitting at turning point ``z_tp``."""
    V = spec.potential()
    v1 = V.deriv()(z_tp)
    v2 = V.deriv(2)(z_tp)
    z = z_tp - v1 * tau ** 2 / 2 + v2 * v1 * tau ** 4 / 24
    w = -v1 * tau + v2 * v1 * tau ** 3 / 6
    return z, w


def _resolve_points(spec, points):
    return list(points) if points is not None else list(turning_points(spec).points)


def period_scale(spec: ProblemSpec, points=None) -> float:
    """Largest |T| over chord cycles: a generous time scale for stem searches."""
    pts = _resolve_points(spec, points)
    best = 0.0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            try:
                best = max(best, abs(cycle_integral(spec, Cycle(i, j), points=pts)))
            except (DomainError, ConvergenceError):
                continue
    return best if best > 0 else 10.0


def _approach_event(b):
    def ev(s, y):
        return ((y[0] - b).conjugate() * y[1]).real

    ev.direction = 1
    return ev


def follow_from(spec: ProblemSpec, a_idx: int, *, points=None, t_max=None, chunk=None,
                gap=STEM_GAP, escape_radius=R_ESC, n_samples=4001, axis="real"):
    """Launch from turning point ``a_idx`` and stop at the first branch point reached.

    Returns (trajectory, target) with target an index, INF or None.
    """
    pts = _resolve_points(spec, points)
    a = pts[a_idx]
    if t_max is None:
        t_max = 3 * period_scale(spec, pts)
    chunk = chunk or max(t_max / 16, 0.5)
    phase = _phase(axis)
    d = LAUNCH_DELTA
    z0, w0 = launch_state(spec, a, phase * d)
    targets = [(k, p) for k, p in enumerate(pts) if k != a_idx]
    events = [_escape_event(escape_radius)] + [_approach_event(p) for _, p in targets]
    dense = _Stitched()
    y = np.array([z0, w0], complex)
    s = d
    hit = None
    while s < t_max and hit is None:
        s1 = min(s + chunk, t_max)
        sol = _solve(spec, phase, s, s1, y, events=events)
        dense.add(s, sol.t[-1], sol.sol)
        cands = []
        for (k, p), te in zip(targets, sol.t_events[1:]):
            for tt in te:
                g = abs(sol.sol(tt)[0] - p)
                if g <= gap and tt > 2 * d:
                    cands.append((tt, k, g))
        if cands:
            tt, k, g = min(cands)
            hit = (k, tt, g)
            s = tt
            break
        if sol.status == 1:
            hit = (INF, sol.t[-1], 0.0)
            s = sol.t[-1]
            break
        s = sol.t[-1]
        y = sol.y[:, -1]
    s_end = s
    ss = np.linspace(d, s_end, n_samples - 1)
    yy = dense(ss)
    s_all = np.concatenate([[0.0], ss])
    z_all = np.concatenate([[a], yy[0]])
    w_all = np.concatenate([[0j], yy[1]])
    if hit is None:
        tr = _make(spec, s_all, z_all, w_all, axis, sol=dense, stem=(a_idx, None))
        return tr, None
    k, tt, g = hit
    kw = dict(stem=(a_idx, k), terminal_gap=g)
    if k == INF:
        kw.update(escaped=True, escape_time=float(tt))
    else:
        kw.update(period=2 * float(tt), closed=True, closure_gap=0.0)
    tr = _make(spec, s_all, z_all, w_all, axis, sol=dense, **kw)
    return tr, k


def stem_trajectory(spec: ProblemSpec, stem: Sequence, *, points=None, t_max=None,
                    n_samples=4001) -> Trajectory:
    """Trajectory from turning point ``stem[0]`` to ``stem[1]`` (an index or INF).

    The stem retraces itself, so the returned samples cover the half-period
    a -> b and ``period`` is twice the arrival time.
    """
    pts = _resolve_points(spec, points)
    a_idx, b = stem
    if b != INF and abs(pts[a_idx] - pts[b]) < 1e-7:
        raise DomainError("stem endpoints coincide")
    if b == INF:
        return escape_orbit(spec, a_idx, points=pts)
    tr, got = follow_from(spec, a_idx, points=pts, t_max=t_max, n_samples=n_samples)
    if got != b:
        raise ConvergenceError(
            f"stem not found: launch from {a_idx} reached {got!r} instead of {b}", best=tr)
    return tr


def escape_orbit(spec: ProblemSpec, tp_index: int, *, points=None, t_max=None,
                 ladder=ESCAPE_LADDER, n_samples=4001) -> Trajectory:
    """Finite-time escape from a turning point, with the blow-up time extrapolated.

    Near the singularity |z| ~ (t_esc - t)^(-2/(n-2)) for deg V = n, so the
    time left at radius R is C R^(-(n-2)/2); two rungs of the ladder eliminate C.
    """
    pts = _resolve_points(spec, points)
    n = spec.potential().trimmed().degree
    if n < 3:
        raise DomainError("orbit bounded: potential grows too slowly to escape")
    if t_max is None:
        t_max = 3 * period_scale(spec, pts)
    a = pts[tp_index]
    z0, w0 = launch_state(spec, a, LAUNCH_DELTA)
    evs = []
    for R in ladder:
        ev = _escape_event(R)
        ev.terminal = R == ladder[-1]
        evs.append(ev)
    sol = _solve(spec, 1.0, LAUNCH_DELTA, t_max, [z0, w0], events=evs)
    if sol.status != 1:
        raise DomainError("orbit bounded: no blow-up before t_max")
    times = [float(te[0]) for te in sol.t_events]
    p = (n - 2) / 2
    t_inf = [(t2 * R2 ** p - t1 * R1 ** p) / (R2 ** p - R1 ** p)
             for (t1, R1), (t2, R2) in zip(zip(times, ladder), zip(times[1:], ladder[1:]))]
    t_esc = t_inf[-1]
    s, z, w = _sample(sol.sol, LAUNCH_DELTA, times[-1], n_samples - 1)
    s = np.concatenate([[0.0], s])
    z = np.concatenate([[a], z])
    w = np.concatenate([[0j], w])
    tr = _make(spec, s, z, w, "real", sol=sol.sol, escaped=True, escape_time=float(t_esc),
               stem=(tp_index, INF))
    tr.escape_error = abs(t_inf[-1] - t_inf[0]) if len(t_inf) > 1 else math.nan
    tr.escape_ladder = list(zip(ladder, times))
    return tr


# --- family members ---------------------------------------------------------


def _pole_detour(spec, phase, s1, y1, side=1.0):
    """Continue around a movable double/simple pole along a half circle in complex time."""
    n = spec.potential().trimmed().degree
    if n not in (3, 4):
        raise DomainError("trajectory escapes to infinity; continuation past it is branched")
    z, w = y1
    # z ~ c (t - tp)^(-2/(n-2))  =>  z/zdot = -(t - tp)(n-2)/2
    tp = s1 + (2.0 / (n - 2)) * (z / w) / phase
    tp = tp.real
    r = tp - s1
    dV = spec.potential().deriv()

    def f(phi, y):
        dtau = phase * 1j * r * complex(math.cos(phi), math.sin(phi))
        return np.array([dtau * y[1], -dtau * dV(y[0])])

    # phi from pi to 0 passes through tp + i r (side > 0) or tp - i r
    span = (math.pi, 0.0) if side > 0 else (-math.pi, 0.0)
    sol = solve_ivp(f, span, np.asarray(y1, complex), method="DOP853", rtol=RTOL, atol=ATOL)
    if sol.status != 0:
        raise ConvergenceError("pole detour failed", best=sol.y[:, -1])
    return tp + r, sol.y[:, -1], tp


def family_member(spec: ProblemSpec, stem: Trajectory, a: float, *, period=None,
                  n_samples=4001, detour_radius=1e2) -> Trajectory:
    """Shift the stem's starting turning point by imaginary time ``a``, then run one period.

    Real-time samples only; if the member runs into a movable pole (cubic and
    quartic potentials) the integration detours around it in complex time and
    the detour is listed in ``detours``.
    """
    z_tp = stem.z[0]
    period = period if period is not None else stem.period
    if period is None:
        raise DomainError("family member needs a period")
    if a < 0:
        raise DomainError("imaginary shift must be non-negative")
    d = LAUNCH_DELTA
    if a == 0:
        z0, w0 = launch_state(spec, z_tp, d)
        s_start = d
    else:
        zi, wi = launch_state(spec, z_tp, 1j * d)
        if a > d:
            sol = _solve(spec, 1j, d, a, [zi, wi], events=[_escape_event(detour_radius)])
            if sol.status == 1:
                raise DomainError("pole encountered during imaginary-time leg")
            z0, w0 = sol.y[:, -1]
        else:
            z0, w0 = launch_state(spec, z_tp, 1j * a)
        s_start = 0.0
    dense = _Stitched()
    y = np.array([z0, w0], complex)
    s = s_start
    s_stop = period
    detours = []
    while s < s_stop - 1e-14:
        sol = _solve(spec, 1.0, s, s_stop, y, events=[_escape_event(detour_radius)])
        dense.add(s, sol.t[-1], sol.sol)
        if sol.status == 1:
            s_new, y, tp = _pole_detour(spec, 1.0, sol.t[-1], sol.y[:, -1])
            detours.append((float(sol.t[-1]), float(tp), float(s_new)))
            s = s_new
            continue
        s = sol.t[-1]
        y = sol.y[:, -1]
    # real samples, skipping detour windows
    ss = np.linspace(s_start, s_stop, n_samples)
    keep = np.ones(ss.size, bool)
    for lo, _, hi in detours:
        keep &= ~((ss > lo) & (ss < hi))
    ss = ss[keep]
    yy = dense(ss)
    zz, ww = yy[0], yy[1]
    if a == 0:
        ss = np.concatenate([[0.0], ss])
        zz = np.concatenate([[z_tp], zz])
        ww = np.concatenate([[0j], ww])
    gap = abs(zz[-1] - zz[0]) if not detours else abs(dense(s_stop)[0] - (z0 if a else z_tp))
    tr = _make(spec, ss, zz, ww, "real", sol=dense, period=period, closed=gap <= 1e-5,
               closure_gap=float(gap))
    tr.detours = detours
    tr.shift = a
    return tr


def measure_period(traj: Trajectory, guess: float, window: float = 0.2) -> float:
    """Closest return of z(t) to z(t0) near ``guess``: minimizes |z(t) - z(t0)|^2."""
    from scipy.optimize import minimize_scalar

    z0 = traj.z[0]
    t0 = traj.t[0]

    def d2(t):
        return abs(traj.at(t)[0] - z0) ** 2

    lo, hi = max(t0 + 1e-9, guess * (1 - window)), min(guess * (1 + window), traj.t[-1])
    res = minimize_scalar(d2, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-13, "maxiter": 500})
    return float(res.x)


# --- polyline topology -------------------------------------------------------


def _orient(ax, ay, bx, by, cx, cy):
    """Sign of the cross product (b - a) x (c - a), exact when the float result is marginal."""
    v = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    mag = abs(bx - ax) * abs(cy - ay) + abs(by - ay) * abs(cx - ax)
    if abs(v) > 8 * np.finfo(float).eps * mag:
        return int(v > 0) - int(v < 0)
    F = Fraction
    v = (F(bx) - F(ax)) * (F(cy) - F(ay)) - (F(by) - F(ay)) * (F(cx) - F(ax))
    return int(v > 0) - int(v < 0)


def polyline_crossings(z: np.ndarray, closed: bool = False):
    """Transversal crossings of the polyline through ``z`` as (i, j, point)."""
    z = np.asarray(z, complex)
    P = z if not closed else np.concatenate([z, z[:1]])
    A, B = P[:-1], P[1:]
    n = A.size
    xmin, xmax = np.minimum(A.real, B.real), np.maximum(A.real, B.real)
    ymin, ymax = np.minimum(A.imag, B.imag), np.maximum(A.imag, B.imag)
    out = []
    order = np.argsort(xmin)
    xs = xmin[order]
    for ii, i in enumerate(order):
        # candidates whose x-interval starts before segment i ends
        hi = np.searchsorted(xs, xmax[i], side="right")
        cand = order[ii + 1 : hi]
        if cand.size == 0:
            continue
        m = (ymin[cand] <= ymax[i]) & (ymax[cand] >= ymin[i]) & (xmax[cand] >= xmin[i])
        for j in cand[m]:
            lo_, hi_ = (i, j) if i < j else (j, i)
            if hi_ - lo_ <= 1 or (closed and lo_ == 0 and hi_ == n - 1):
                continue
            a, b, c, d = A[lo_], B[lo_], A[hi_], B[hi_]
            o1 = _orient(a.real, a.imag, b.real, b.imag, c.real, c.imag)
            o2 = _orient(a.real, a.imag, b.real, b.imag, d.real, d.imag)
            o3 = _orient(c.real, c.imag, d.real, d.imag, a.real, a.imag)
            o4 = _orient(c.real, c.imag, d.real, d.imag, b.real, b.imag)
            if o1 * o2 < 0 and o3 * o4 < 0:
                r = b - a
                s = d - c
                den = (r.conjugate() * s).imag
                u = ((c - a).conjugate() * s).imag / den
                out.append((lo_, hi_, a + u * r))
    out.sort(key=lambda x: (x[0], x[1]))
    return out


def self_intersections(traj: Trajectory, refine: bool = True) -> list[complex]:
    """Crossing points of the sampled path, refined on the dense interpolant when available."""
    if len(traj) < 4:
        raise DomainError("need at least 4 samples")
    hits = polyline_crossings(traj.z, closed=False)
    pts = []
    for i, j, p in hits:
        if refine and traj.sol is not None:
            p = _refine_crossing(traj, i, j, p)
        pts.append(complex(p))
    return pts


def _refine_crossing(traj, i, j, p0):
    t = traj.t
    # initial parameters by linear interpolation inside each segment
    def frac(k):
        a, b = traj.z[k], traj.z[k + 1]
        return t[k] + (t[k + 1] - t[k]) * float(np.clip(((p0 - a) * (b - a).conjugate()).real
                                                        / max(abs(b - a) ** 2, 1e-300), 0, 1))

    s1, s2 = frac(i), frac(j)
    for _ in range(20):
        z1, w1 = traj.at(s1)
        z2, w2 = traj.at(s2)
        F = z1 - z2
        J = np.array([[w1.real, -w2.real], [w1.imag, -w2.imag]])
        try:
            ds = np.linalg.solve(J, [-F.real, -F.imag])
        except np.linalg.LinAlgError:
            break
        s1, s2 = s1 + ds[0], s2 + ds[1]
        if abs(ds).max() < 1e-14:
            break
    z1, _ = traj.at(s1)
    return z1 if abs(z1 - p0) < 1e-2 else p0


def winding_number(curve, point: complex) -> int:
    """Winding of a closed curve (Trajectory or array of points) around ``point``."""
    if isinstance(curve, Trajectory):
        if not (curve.closure_gap <= 1e-5 or abs(curve.z[-1] - curve.z[0]) <= 1e-5):
            raise DomainError("winding number needs a closed trajectory")
        z = curve.z
    else:
        z = np.asarray(curve, complex)
    d = z - point
    if np.min(np.abs(d)) < 1e-6:
        raise DomainError("point on curve")
    seg = np.concatenate([z, z[:1]])
    # distance from point to each segment, not just vertices
    a, b = seg[:-1], seg[1:]
    ab = b - a
    u = np.clip(((point - a) * ab.conjugate()).real / np.maximum(np.abs(ab) ** 2, 1e-300), 0, 1)
    if np.min(np.abs(a + u * ab - point)) < 1e-6:
        raise DomainError("point on curve")
    dd = np.concatenate([d, d[:1]])
    ang = np.angle(dd[1:] / dd[:-1])
    return int(round(ang.sum() / (2 * math.pi)))


def closed_through_infinity(traj: Trajectory, points: Sequence[complex] = (), n_side: int = 32) -> np.ndarray:
    """Stem path closed by a detour high above everything: end -> up -> across -> down -> start.

    Any closure that passes above all branch points is homotopic to this
    one, so windings about branch points measure how the stem wraps them.
    """
    z = traj.z
    a, b = z[0], z[-1]
    top = max(np.max(z.imag), max((p.imag for p in points), default=-np.inf))
    H = top + 1.0 + 0.5 * np.ptp(z.real)
    s = np.linspace(0, 1, n_side)[1:]
    up = b.real + 1j * (b.imag + (H - b.imag) * s)
    across = (b.real + (a.real - b.real) * s) + 1j * H
    down = a.real + 1j * (H + (a.imag - H) * s[:-1])
    return np.concatenate([z, up, across, down])


# --- topology classification -----------------------------------------------


def point_names(points, tol=1e-7) -> list[str]:
    """Symmetry-aware names: A0, A1.. on the imaginary axis (bottom up), L/R pairs otherwise."""
    names = [None] * len(points)
    axis = sorted([k for k, p in enumerate(points) if abs(p.real) <= tol * max(1, abs(p))],
                  key=lambda k: points[k].imag)
    for r, k in enumerate(axis):
        names[k] = f"A{r}"
    left = sorted([k for k, p in enumerate(points) if names[k] is None and p.real < 0],
                  key=lambda k: points[k].imag)
    right = sorted([k for k, p in enumerate(points) if names[k] is None and p.real > 0],
                   key=lambda k: points[k].imag)
    for r, k in enumerate(left):
        names[k] = f"L{r}"
    for r, k in enumerate(right):
        names[k] = f"R{r}"
    return names


@dataclass
class StemRecord:
    start: str
    end: str
    time: float
    crossings: int
    windings: tuple
    axis_crossings: tuple


def _axis_crossing_slots(z, axis_pts):
    """Where the path crosses the imaginary axis, as slots between on-axis branch points."""
    slots = []
    ys = sorted(p.imag for p in axis_pts)
    x = z.real
    idx = np.nonzero(np.sign(x[1:]) * np.sign(x[:-1]) < 0)[0]
    for i in idx:
        f = x[i] / (x[i] - x[i + 1])
        y = z[i].imag + f * (z[i + 1].imag - z[i].imag)
        slots.append(int(np.searchsorted(ys, y)))
    return tuple(slots)


def stem_records(spec: ProblemSpec, *, t_max=None):
    pts = list(turning_points(spec).points)
    names = point_names(pts)
    axis_pts = [p for p, nm in zip(pts, names) if nm.startswith("A")]
    if t_max is None:
        t_max = 3 * period_scale(spec, pts)
    recs = []
    seen = set()
    for i in range(len(pts)):
        tr, tgt = follow_from(spec, i, points=pts, t_max=t_max)
        if tgt is None:
            end = "none"
        elif tgt == INF:
            end = "inf"
        else:
            end = names[tgt]
        key = tuple(sorted((names[i], end)))
        if key in seen:
            continue
        seen.add(key)
        cross = len(polyline_crossings(tr.z))
        wind = ()
        if tgt not in (None, INF):
            loop = closed_through_infinity(tr, pts)
            w = []
            for k, p in enumerate(pts):
                # the closure is canonical only relative to points on the symmetry axis
                if k in (i, tgt) or not names[k].startswith("A"):
                    continue
                try:
                    wk = winding_number(loop, p)
                except DomainError:
                    wk = 0
                if wk:
                    w.append((names[k], abs(wk)))
            wind = tuple(sorted(w))
        slots = _axis_crossing_slots(tr.z, axis_pts) if tgt not in (None,) else ()
        a, b = key
        recs.append(StemRecord(a, b, float(tr.t[-1]), cross, wind, slots))
    recs.sort(key=lambda r: (r.start, r.end))
    return recs


def classify_topology(spec: ProblemSpec, *, t_max=None) -> str:
    """Discrete label of the stem pattern: endpoints, self-crossings, windings, axis slots."""
    if complex(spec.E).imag != 0:
        raise DomainError("topology classification needs real energy")
    parts = []
    for r in stem_records(spec, t_max=t_max):
        w = ",".join(f"{n}:{k}" for n, k in r.windings)
        s = ",".join(map(str, r.axis_crossings))
        parts.append(f"{r.start}-{r.end}[x{r.crossings}|w{w}|a{s}]")
    return ";".join(parts)


def locate_transition(E: float, g_lo: float, g_hi: float, *, tol: float = 1e-4, family="quintic"):
    """Bisection on the topology label between ``g_lo`` and ``g_hi``."""
    lab_lo = classify_topology(ProblemSpec(family, E=E, g=g_lo))
    lab_hi = classify_topology(ProblemSpec(family, E=E, g=g_hi))
    if lab_lo == lab_hi:
        raise DomainError("no topology change in bracket")
    lo, hi = g_lo, g_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        lab = classify_topology(ProblemSpec(family, E=E, g=mid))
        if lab == lab_lo:
            lo = mid
        elif lab == lab_hi:
            hi = mid
        else:
            # a third pattern: keep the side that still differs from lab_lo
            hi = mid
            lab_hi = lab
    return 0.5 * (lo + hi), hi - lo, (lab_lo, lab_hi)
