"""Eigenvalues of H = (p^2 + z^2)/2 - i g z^5 on two Stokes-wedge problems.

Eigenfunctions must decay in a pair of sectors placed symmetrically about
the imaginary axis.  Seven sectors of opening 2 pi/7 surround infinity; they
are centred at pi/14 + 2 pi k/7.  Problem One uses the pair adjacent to the
real axis (rays pi/14, 13 pi/14), problem Two the pair below it
(rays -3 pi/14, 17 pi/14).

Shooting: on each ray z = r e^{i theta} the equation becomes
psi'' = e^{2 i theta} 2 (V - E) psi in r.  Each ray starts at R_outer with the
subdominant WKB data and runs inward to r = 0, where the Wronskian of the
two solutions is the mismatch.  All energies of one call share one ODE
system and one E-independent normalization, so the mismatch is analytic in E.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import quad, solve_ivp

from ._errors import ConvergenceError, DomainError

TOL_EIG = 1e-9
TOL_CHARACTER = 1e-8
G_MIN_TWO = 1e-3
DECAY_EFOLDS = 35.0
RTOL = 1e-12
ATOL = 1e-300


class WedgeProblem(enum.Enum):
    One = "One"
    Two = "Two"

    @property
    def rays(self) -> tuple[float, float]:
        """(right, left) ray angles at the sector midpoints."""
        if self is WedgeProblem.One:
            return math.pi / 14, 13 * math.pi / 14
        return -3 * math.pi / 14, 17 * math.pi / 14

    @property
    def sectors(self) -> tuple[tuple[float, float], tuple[float, float]]:
        h = math.pi / 7
        return tuple((t - h, t + h) for t in self.rays)

    @classmethod
    def parse(cls, x) -> "WedgeProblem":
        if isinstance(x, cls):
            return x
        try:
            return cls(str(x).capitalize())
        except ValueError:
            raise DomainError(f"unknown wedge problem {x!r}; expected One or Two") from None


@dataclass
class EigenRecord:
    E: complex
    g: float
    problem: WedgeProblem
    residual: float
    index: int = -1


@dataclass
class ExceptionalPoint:
    kind: str
    value: complex
    labels: tuple = ()
    uncertainty: float = math.nan
    evidence: dict = field(default_factory=dict)


def _V(z, g):
    return 0.5 * z * z - 1j * g * z ** 5


def _decay_integral(g, theta, R, E=0.0):
    """Re of the WKB exponent along the ray from 0 to R."""
    e = complex(math.cos(theta), math.sin(theta))

    def k(r):
        q = e * np.sqrt(2 * (_V(r * e, g) - E) + 0j)
        return abs(q.real)

    return quad(k, 0, R, limit=200)[0]


def outer_radius(g: float, problem, E_max: float = 0.0) -> float:
    """Smallest radius (grown geometrically) giving DECAY_EFOLDS e-folds on both rays."""
    problem = WedgeProblem.parse(problem)
    R = 2.0
    while min(_decay_integral(g, th, R, E_max) for th in problem.rays) < DECAY_EFOLDS:
        R *= 1.1
    return R


class Shooter:
    """Mismatch evaluator with a frozen outer radius and normalization."""

    def __init__(self, g: float, problem, R_outer: Optional[float] = None, E_max: float = 10.0,
                 rays: Optional[Sequence[float]] = None):
        self.problem = WedgeProblem.parse(problem)
        if g < 0:
            raise DomainError("coupling must be non-negative")
        if self.problem is WedgeProblem.Two and g < G_MIN_TWO:
            raise DomainError(f"problem Two refuses g < {G_MIN_TWO}: wedge degenerates as g -> 0")
        self.g = float(g)
        self.rays = tuple(rays) if rays is not None else self.problem.rays
        for th, (lo, hi) in zip(self.rays, self.problem.sectors):
            if not lo < th < hi:
                raise DomainError("ray exits its wedge")
        self.R = float(R_outer) if R_outer else outer_radius(g, self.problem, E_max)
        # E-independent normalization keeps the Wronskian O(1) without breaking analyticity
        self.log_scale = tuple(_decay_integral(self.g, th, self.R) for th in self.rays)
        self.calls = 0

    def _ray(self, theta, E, log_scale):
        e = complex(math.cos(theta), math.sin(theta))
        g = self.g
        R = self.R
        n = E.size
        z = R * e
        k = e * np.sqrt(2 * (_V(z, g) - E) + 0j)
        k = np.where(k.real < 0, -k, k)
        # subdominant data with the first WKB correction: psi'/psi = -k - k'/(2k)
        dk = e * e * (z - 5j * g * z ** 4) / (k / e) * 1.0
        y0 = np.concatenate([np.ones(n, complex), -k - dk / (2 * k)])
        e2 = e * e

        def f(r, y):
            zz = r * e
            return np.concatenate([y[n:], e2 * 2 * (_V(zz, g) - E) * y[:n]])

        sol = solve_ivp(f, (R, 0.0), y0, method="DOP853", rtol=RTOL, atol=ATOL)
        if sol.status != 0:
            raise ConvergenceError(f"ray integration failed: {sol.message}")
        y = sol.y[:, -1] * math.exp(-log_scale)
        if not np.all(np.isfinite(y)):
            raise ConvergenceError("overflow despite normalization")
        return y[:n], y[n:] / e

    def states(self, E):
        """(psi_R, psi_R', psi_L, psi_L') at z = 0."""
        E_arr = np.atleast_1d(np.asarray(E, dtype=complex))
        pR, dR = self._ray(self.rays[0], E_arr, self.log_scale[0])
        pL, dL = self._ray(self.rays[1], E_arr, self.log_scale[1])
        self.calls += 1
        return pR, dR, pL, dL

    def __call__(self, E):
        pR, dR, pL, dL = self.states(E)
        W = pL * dR - pR * dL
        return W[0] if np.ndim(E) == 0 else W


def shoot(g: float, E, problem="One", R_outer: Optional[float] = None):
    """Normalized Wronskian mismatch; zero exactly at eigenvalues."""
    E_max = float(np.max(np.abs(np.atleast_1d(E)))) if R_outer is None else 0.0
    return Shooter(g, problem, R_outer, E_max=E_max)(E)


def _secant(f, x0, x1, tol=1e-12, maxit=60):
    """Secant iteration; converged when the step falls below ``tol`` relative.

    The mismatch carries ODE noise near 1e-12, so the last steps may wander
    at that level; the smallest step seen decides convergence.
    """
    f0, f1 = f(x0), f(x1)
    best = (math.inf, x1)
    for _ in range(maxit):
        if f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        x0, f0 = x1, f1
        x1, f1 = x2, f(x2)
        step = abs(x1 - x0) / max(1.0, abs(x1))
        if step < best[0]:
            best = (step, x1)
        if step <= tol:
            return x1, step
    if best[0] <= 1e3 * tol:
        return best[1], best[0]
    raise ConvergenceError("secant iteration did not converge", best=best[1])


def polish(shooter: Shooter, E0: complex, others: Sequence[complex] = ()) -> tuple[complex, float]:
    """Complex secant on the mismatch, deflated by previously found roots."""
    others = list(others)

    def f(E):
        w = shooter(E)
        for r in others:
            w = w / (E - r)
        return w

    h = 1e-4 * max(1.0, abs(E0))
    E, res = _secant(f, complex(E0), complex(E0) + h)
    return E, res


GRID_H = 0.04


@dataclass
class ZeroCells:
    """Argument-principle census of mismatch zeros on a grid of the upper E plane.

    Row 0 of cells is symmetric about the real axis (the strip); every
    other row lies strictly above it.
    """

    re: np.ndarray
    im: np.ndarray
    winding: np.ndarray

    def strip(self):
        return [(j, int(w)) for j, w in enumerate(self.winding[0]) if w]

    def upper(self):
        return [(i, j, int(self.winding[i, j])) for i, j in np.argwhere(self.winding[1:] != 0) + [1, 0]]

    def center(self, i, j):
        return complex(0.5 * (self.re[j] + self.re[j + 1]), 0.5 * (self.im[i] + self.im[i + 1]))


def _wrap(d):
    return (d + np.pi) % (2 * np.pi) - np.pi


def zero_cells(sh: Shooter, re_lo: float, re_hi: float, im_hi: float, h: float = GRID_H) -> ZeroCells:
    re = np.arange(re_lo, re_hi + h, h)
    im = (np.arange(-1, int(np.ceil(im_hi / h)) + 1) + 0.5) * h
    X, Y = np.meshgrid(re, im)
    W = sh((X + 1j * Y).ravel()).reshape(X.shape)
    a = np.angle(W)
    w = (_wrap(a[:-1, 1:] - a[:-1, :-1]) + _wrap(a[1:, 1:] - a[:-1, 1:])
         + _wrap(a[1:, :-1] - a[1:, 1:]) + _wrap(a[:-1, :-1] - a[1:, :-1]))
    return ZeroCells(re, im, np.rint(w / (2 * np.pi)).astype(int))


def _real_sign_changes(sh: Shooter, lo: float, hi: float, n: int = 65) -> list[float]:
    Es = np.linspace(lo, hi, n)
    m = sh(Es + 0j).real
    return [0.5 * (Es[k] + Es[k + 1]) for k in range(n - 1) if m[k] * m[k + 1] <= 0]


def _strip_cell(sh, cells, j, w):
    """Seeds and character of a strip cell holding w zeros (real or conjugate pairs)."""
    lo, hi = cells.re[j], cells.re[j + 1]
    # zeros within noise of an edge may be attributed to either neighbour
    pad = 0.25 * (hi - lo)
    n = 65
    while True:
        real = _real_sign_changes(sh, lo - pad, hi + pad, n)
        if len(real) >= w or n > 1025 or (w - len(real)) % 2:
            break
        # close real pairs hide between samples; refine before calling them complex
        n = 4 * n - 3
    c = 0.5 * (lo + hi)
    if len(real) < w and (w - len(real)) % 2:
        real.append(c)
    pairs = max(w - len(real), 0) // 2
    return [complex(x) for x in real[:w]], [complex(c, 0.25 * (hi - lo) * (k + 1)) for k in range(pairs)]


def _polish_all(sh, seeds, found):
    for s in seeds:
        try:
            E, _ = polish(sh, s, others=[x for x in found if abs(x - s) < 0.5])
        except ConvergenceError:
            continue
        found.append(E)
    return found


def _window_zeros(g, problem, lo, hi, im_hi, h):
    sh = Shooter(g, problem, E_max=math.hypot(hi, im_hi))
    cells = zero_cells(sh, lo, hi, im_hi, h)
    found: list[complex] = []
    for j, w in cells.strip():
        real, cpx = _strip_cell(sh, cells, j, w)
        _polish_all(sh, real, found)
        _polish_all(sh, cpx, found)
    for i, j, w in cells.upper():
        c = cells.center(i, j)
        _polish_all(sh, [c + 0.1 * h * k for k in range(max(w, 1))], found)
    found = [complex(E.real, abs(E.imag)) for E in found]
    found += [E.conjugate() for E in found if abs(E.imag) > TOL_CHARACTER]
    return sh, found


def eigenvalues(g: float, problem="One", count: int = 6, *, E_hi: Optional[float] = None,
                im_hi: float = 3.5, h: float = GRID_H) -> list[EigenRecord]:
    """Lowest ``count`` eigenvalues by real part.

    Zeros of the mismatch are counted cell by cell with the argument
    principle, seeded at cell centres (or real sign changes in the strip)
    and polished by an unconstrained complex secant with deflation.
    Conjugate partners of upper-half zeros are added by symmetry.  Windows
    in Re E are added until ``count`` zeros are found; each window has its
    own outer radius.
    """
    if count < 1:
        raise DomainError("count must be >= 1")
    problem = WedgeProblem.parse(problem)
    lo, hi = -0.5, E_hi or (count + 1.5)
    found: list[tuple[complex, Shooter]] = []
    while True:
        sh, new = _window_zeros(g, problem, lo, hi, im_hi, h)
        for E in new:
            if lo - h <= E.real <= hi + h and all(abs(E - x) > 1e-7 * max(1, abs(E)) for x, _ in found):
                found.append((E, sh))
        # zeros past hi may still be missing from the window census
        if len([x for x, _ in found if x.real <= hi]) >= count or hi > 400:
            break
        lo, hi = hi, hi + max(4.0, 0.5 * hi)
    found.sort(key=lambda x: (round(x[0].real, 7), x[0].imag))
    return [EigenRecord(E, float(g), problem, _residual(s_, E), k)
            for k, (E, s_) in enumerate(found[:count])]


def _dedupe(xs, tol=1e-7):
    out = []
    for x in xs:
        if all(abs(x - y) > tol * max(1, abs(x)) for y in out):
            out.append(x)
    return out


def _residual(sh: Shooter, E: complex) -> float:
    """Wronskian relative to the sizes of the two solution vectors at z = 0."""
    pR, dR, pL, dL = (x[0] for x in sh.states(np.array([E])))
    return float(abs(pL * dR - pR * dL) / ((abs(pL) + abs(dL)) * (abs(pR) + abs(dR))))


# --- tracking in g ----------------------------------------------------------


def track(g_grid: Sequence[float], problem="One", count: int = 4):
    """Eigenvalue curves over an ascending grid; entry k of each row is level k.

    Levels are matched between neighbouring g by nearest distance; a matching
    that is not one-to-one (near a coalescence) is marked ``None``.
    """
    g_grid = list(g_grid)
    if any(b <= a for a, b in zip(g_grid, g_grid[1:])):
        raise DomainError("g grid must be ascending")
    rows = []
    prev = None
    for g in g_grid:
        recs = eigenvalues(g, problem, count)
        Es = [r.E for r in recs]
        if prev is not None:
            Es = _match_levels(prev, Es)
        rows.append(Es)
        prev = [e for e in Es if e is not None] if None not in Es else Es
    return rows


def _match_levels(prev, cur):
    out = [None] * len(prev)
    used = set()
    for k, p in enumerate(prev):
        if p is None:
            continue
        d = [abs(c - p) if j not in used else math.inf for j, c in enumerate(cur)]
        j = int(np.argmin(d))
        if not math.isfinite(d[j]):
            continue
        used.add(j)
        out[k] = cur[j]
    if len(used) != len(cur):
        rest = [c for j, c in enumerate(cur) if j not in used]
        for k in range(len(out)):
            if out[k] is None and rest:
                out[k] = rest.pop(0)
    return out


# --- exceptional points -----------------------------------------------------


def complex_pair_count(g: float, problem="Two", *, E_hi: float = 4.0, im_hi: float = 3.5,
                       h: float = GRID_H, R_factor: float = 1.0,
                       ray_shift: float = 0.0) -> tuple[int, dict]:
    """Number of complex-conjugate eigenvalue pairs with real part below ``E_hi``.

    Off-strip zeros are counted by the argument principle.  A strip cell with
    w zeros holds r real roots (sign changes of the real mismatch, which is
    exactly real on the axis) and (w - r)/2 conjugate pairs; those pairs are
    polished so their |Im E| can be reported.
    """
    problem = WedgeProblem.parse(problem)
    R = outer_radius(g, problem, math.hypot(E_hi, im_hi)) * R_factor
    rays = (problem.rays[0] + ray_shift, problem.rays[1] - ray_shift)
    sh = Shooter(g, problem, R_outer=R, rays=rays)
    cells = zero_cells(sh, -0.5, E_hi, im_hi, h)
    n_upper = sum(w for _, _, w in cells.upper())
    near = []
    for j, w in cells.strip():
        if w >= 2:
            _, cpx = _strip_cell(sh, cells, j, w)
            near += _polish_all(sh, cpx, [])
    near = [E for E in near if abs(E.imag) > TOL_CHARACTER]
    return n_upper + len(near), {"near_axis_pairs": near, "R_outer": sh.R}


def pair_is_complex(g: float, problem, pair: int, **kw) -> bool:
    """Pair ``pair`` (1-based, ordered by appearance as g decreases) is complex at g."""
    n, _ = complex_pair_count(g, problem, **kw)
    return n >= pair


def find_quantum_ep(problem="Two", pair: int = 1, bracket=(0.02, 0.06), *, tol: float = 2e-4,
                    E_hi: float = 4.0, robustness: bool = False) -> ExceptionalPoint:
    """Bisection in g on the character (complex vs real) of a level pair.

    The uncertainty is the final bracket width.  With ``robustness`` the
    final bracket is re-checked with a larger outer radius and with both
    rays rotated by pi/28 inside their sectors.
    """
    problem = WedgeProblem.parse(problem)
    lo, hi = sorted(bracket)
    c_lo = pair_is_complex(lo, problem, pair, E_hi=E_hi)
    c_hi = pair_is_complex(hi, problem, pair, E_hi=E_hi)
    if c_lo == c_hi:
        raise DomainError("no character change in bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        c = pair_is_complex(mid, problem, pair, E_hi=E_hi)
        if c == c_lo:
            lo = mid
        else:
            hi = mid
    g = 0.5 * (lo + hi)
    evidence = {"bracket": (lo, hi), "problem": problem.value}
    if robustness:
        # the bracket must survive a larger outer radius and rotated rays
        checks = {}
        for name, kw in (("R_x1.5", {"R_factor": 1.5}), ("ray+pi/28", {"ray_shift": math.pi / 28}),
                         ("ray-pi/28", {"ray_shift": -math.pi / 28})):
            checks[name] = (pair_is_complex(lo, problem, pair, E_hi=E_hi, **kw) == c_lo
                            and pair_is_complex(hi, problem, pair, E_hi=E_hi, **kw) != c_lo)
        evidence["robust"] = checks
    return ExceptionalPoint("quantum", g, (f"pair{pair}",), hi - lo, evidence)


def matrix_ep_demo(alpha: float):
    """Eigenvalues 1 +- sqrt(alpha) of [[1, 1], [alpha, 1]]; alpha = 0 is the EP."""
    s = np.sqrt(complex(alpha))
    pair = (1 - s, 1 + s)
    if alpha < 0:
        pair = (complex(1, -abs(s.imag)), complex(1, abs(s.imag)))
    return pair, alpha == 0
