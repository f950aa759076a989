"""Complex polynomials, turning points and root coalescence.

Polynomials are stored with ascending coefficients, ``coeffs[k]`` multiplying
``z**k``.  Roots come from a simultaneous (Aberth) iteration with a
floating-point aware clustering pass, so a double root is reported once with
multiplicity 2 instead of as two roots a few 1e-8 apart.

The Hamiltonian families handled throughout the package are

* ``cubic``:   V(z) = omega2 z^2/2 + i g z^3
* ``quintic``: V(z) = omega2 z^2/2 - i g z^5   (omega2 = 1 by default,
  omega2 = 0 gives the pure quintic -i g z^5)
* ``general``: an explicit :class:`PolynomialC`.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from ._errors import ConvergenceError, DomainError

TOL_RES = 1e-12
TOL_CLUSTER = 1e-8
COEFF_DROP = 1e-14
MAX_ABERTH_ITER = 500

_EPS = np.finfo(float).eps


class PolynomialC:
    """Polynomial with complex coefficients in ascending order.

    Trailing coefficients smaller than ``COEFF_DROP`` times the largest one
    are treated as zero when the degree is determined.
    """

    def __init__(self, coeffs: Sequence[complex]):
        c = np.asarray(coeffs, dtype=complex).ravel()
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        self.coeffs = c

    @property
    def degree(self) -> int:
        mags = np.abs(self.coeffs)
        top = mags.max()
        if top == 0.0:
            return -1
        live = np.nonzero(mags > COEFF_DROP * top)[0]
        return int(live[-1])

    def trimmed(self) -> "PolynomialC":
        d = self.degree
        return PolynomialC(self.coeffs[: max(d, 0) + 1])

    def __call__(self, z):
        # Horner, works for scalars and arrays
        z = np.asarray(z, dtype=complex)
        acc = np.zeros_like(z)
        for a in self.coeffs[::-1]:
            acc = acc * z + a
        return acc if acc.ndim else complex(acc)

    def scale(self, z):
        """Sum of |a_k||z|^k, the natural size of p(z) for residual tests."""
        r = np.abs(np.asarray(z, dtype=complex))
        acc = np.zeros_like(r)
        for a in np.abs(self.coeffs)[::-1]:
            acc = acc * r + a
        return acc if acc.ndim else float(acc)

    def deriv(self, m: int = 1) -> "PolynomialC":
        c = self.coeffs
        for _ in range(m):
            if c.size <= 1:
                return PolynomialC([0.0])
            c = c[1:] * np.arange(1, c.size)
        return PolynomialC(c)

    def __add__(self, other):
        other = _as_poly(other)
        n = max(self.coeffs.size, other.coeffs.size)
        a = np.zeros(n, complex)
        a[: self.coeffs.size] += self.coeffs
        a[: other.coeffs.size] += other.coeffs
        return PolynomialC(a)

    __radd__ = __add__

    def __neg__(self):
        return PolynomialC(-self.coeffs)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        return PolynomialC(np.convolve(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __repr__(self):
        return f"PolynomialC({self.coeffs.tolist()!r})"

    @classmethod
    def from_roots(cls, roots: Sequence[complex], lead: complex = 1.0) -> "PolynomialC":
        c = np.array([lead], dtype=complex)
        for r in roots:
            c = np.convolve(c, [-r, 1.0])
        return cls(c)


def _as_poly(x) -> PolynomialC:
    return x if isinstance(x, PolynomialC) else PolynomialC([x])


def root_sort_key(z: complex):
    """Order by argument in (-pi, pi], then modulus."""
    z = complex(z)
    ang = math.atan2(z.imag, z.real)
    # -pi and pi are the same ray; keep them together at +pi
    if ang <= -math.pi + 1e-15:
        ang = math.pi
    return (round(ang, 12), abs(z))


def _aberth(c: np.ndarray) -> np.ndarray:
    """Raw Aberth iteration for monic-normalizable ascending coefficients."""
    n = c.size - 1
    p = PolynomialC(c)
    dp = p.deriv()
    # initial circle from the geometric-mean root radius, offset to dodge symmetry
    rad = abs(c[0] / c[-1]) ** (1.0 / n) if c[0] != 0 else 1.0
    bound = 1 + np.max(np.abs(c[:-1] / c[-1]))
    rad = min(max(rad, 1e-3), bound)
    k = np.arange(n)
    z = rad * np.exp(1j * (2 * np.pi * k / n + 0.4))
    for it in range(MAX_ABERTH_ITER):
        pz = p(z)
        dpz = dp(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dpz
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            s = inv.sum(axis=1)
            w = ratio / (1 - ratio * s)
        w = np.where(np.isfinite(w), w, 0.0)
        # exact zeros of p need no correction
        w = np.where(pz == 0, 0.0, w)
        z = z - w
        if np.all(np.abs(w) <= 4 * _EPS * np.maximum(np.abs(z), 1e-300)):
            break
        resid = np.abs(p(z)) / np.maximum(p.scale(z), 1e-300)
        if np.all(resid <= _EPS * 8) and it > 2:
            break
    resid = np.abs(p(z)) / np.maximum(p.scale(z), 1e-300)
    if not np.all(resid <= TOL_RES):
        raise ConvergenceError(
            f"Aberth iteration did not converge (max relative residual {resid.max():.2e})",
            best=z,
        )
    return z


def _cluster(p: PolynomialC, z: np.ndarray):
    """Merge numerically coincident roots.

    Two roots are merged when they are closer than ``TOL_CLUSTER`` (relative)
    or closer than the floating-point resolution of an m-fold root at their
    centroid, (m! eps_p / |p^(m)|)^(1/m).
    """
    z = list(map(complex, z))
    groups = [[w] for w in z]
    merged = True
    while merged:
        merged = False
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                ci = np.mean(groups[i])
                cj = np.mean(groups[j])
                d = abs(ci - cj)
                scale = max(1.0, abs(ci), abs(cj))
                m = len(groups[i]) + len(groups[j])
                c = (ci * len(groups[i]) + cj * len(groups[j])) / m
                pm = abs(p.deriv(m)(c))
                eps_p = _EPS * p.scale(c)
                res = (math.factorial(m) * eps_p / pm) ** (1.0 / m) if pm > 0 else 0.0
                if d <= TOL_CLUSTER * scale or d <= 4 * res:
                    groups[i] = groups[i] + groups[j]
                    del groups[j]
                    merged = True
                    break
            if merged:
                break
    out = []
    for grp in groups:
        m = len(grp)
        c = complex(np.mean(grp))
        if m > 1:
            # a multiple root is a simple root of p^(m-1): polish there
            q, dq = p.deriv(m - 1), p.deriv(m)
            for _ in range(8):
                dqc = dq(c)
                if dqc == 0:
                    break
                step = q(c) / dqc
                c -= step
                if abs(step) <= 4 * _EPS * max(abs(c), 1.0):
                    break
        out.append((c, m))
    return out


def roots(p: PolynomialC) -> list[tuple[complex, int]]:
    """All roots of ``p`` with multiplicities, sorted by argument then modulus."""
    p = _as_poly(p)
    n = p.degree
    if n < 0:
        raise DomainError("degenerate polynomial")
    if n == 0:
        return []
    c = p.coeffs[: n + 1]
    # zero roots split off exactly
    nz = 0
    while c[nz] == 0:
        nz += 1
    work = c[nz:]
    if work.size - 1 >= 1:
        z = _aberth(work)
        found = _cluster(PolynomialC(work), z)
    else:
        found = []
    if nz:
        found.append((0j, nz))
    return sorted(found, key=lambda rm: root_sort_key(rm[0]))


def flat_roots(p: PolynomialC) -> list[complex]:
    """Roots repeated according to multiplicity."""
    return [r for r, m in roots(p) for _ in range(m)]


# --- resultants -------------------------------------------------------------


def sylvester_matrix(p: PolynomialC, q: PolynomialC) -> np.ndarray:
    a = p.coeffs[: p.degree + 1][::-1]
    b = q.coeffs[: q.degree + 1][::-1]
    m, n = a.size - 1, b.size - 1
    S = np.zeros((m + n, m + n), dtype=complex)
    for i in range(n):
        S[i, i : i + m + 1] = a
    for i in range(m):
        S[n + i, i : i + n + 1] = b
    return S


def resultant(p: PolynomialC, q: PolynomialC) -> complex:
    return complex(np.linalg.det(sylvester_matrix(p, q)))


def discriminant(p: PolynomialC) -> complex:
    """(-1)^(n(n-1)/2) Res(p, p') / a_n, degrees taken after trimming."""
    p = p.trimmed()
    n = p.degree
    if n < 1:
        raise DomainError("degenerate polynomial")
    if n == 1:
        return 1.0 + 0j
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * resultant(p, p.deriv()) / p.coeffs[n]


# --- Hamiltonian families ---------------------------------------------------


@dataclass(frozen=True)
class ProblemSpec:
    family: str = "quintic"
    E: complex = 1.0
    g: float = 1.0
    omega2: float = 1.0
    poly: Optional[PolynomialC] = field(default=None, compare=False)
    wedge_problem: str = "One"

    def __post_init__(self):
        if self.family not in ("cubic", "quintic", "general"):
            raise DomainError(f"unknown family {self.family!r}")
        if self.family == "general" and self.poly is None:
            raise DomainError("general family needs an explicit potential")
        if self.omega2 < 0:
            raise DomainError("omega2 must be >= 0")
        if self.wedge_problem not in ("One", "Two"):
            raise DomainError("wedge_problem must be 'One' or 'Two'")

    @classmethod
    def pure_quintic(cls, E=1.0, g=1.0):
        return cls("quintic", E=E, g=g, omega2=0.0)

    @classmethod
    def pure_cubic(cls, E=1.0, g=1.0):
        return cls("cubic", E=E, g=g, omega2=0.0)

    def potential(self) -> PolynomialC:
        if self.family == "cubic":
            return PolynomialC([0, 0, self.omega2 / 2, 1j * self.g])
        if self.family == "quintic":
            return PolynomialC([0, 0, self.omega2 / 2, 0, 0, -1j * self.g])
        return self.poly

    def kinetic(self) -> PolynomialC:
        """E - V(z), so that zdot^2 = 2 (E - V)."""
        return complex(self.E) - self.potential()

    def with_(self, **kw) -> "ProblemSpec":
        d = dict(family=self.family, E=self.E, g=self.g, omega2=self.omega2,
                 poly=self.poly, wedge_problem=self.wedge_problem)
        d.update(kw)
        return ProblemSpec(**d)


@dataclass(frozen=True)
class TurningPointSet:
    points: tuple
    multiplicity: tuple
    symmetric: bool

    def __len__(self):
        return len(self.points)

    def flat(self) -> list[complex]:
        return [p for p, m in zip(self.points, self.multiplicity) for _ in range(m)]

    def on_imaginary_axis(self, tol=1e-9) -> list[complex]:
        return [p for p in self.points if abs(p.real) <= tol * max(1.0, abs(p))]

    def index_of(self, z: complex) -> int:
        return int(np.argmin([abs(p - z) for p in self.points]))


def mirror_symmetric(points, tol=1e-10) -> bool:
    """True if the set is invariant under z -> -conj(z)."""
    pts = list(points)
    for p in pts:
        img = -p.conjugate()
        if min(abs(img - q) for q in pts) > tol * max(1.0, abs(p)):
            return False
    return True


def turning_points(spec: ProblemSpec) -> TurningPointSet:
    p = spec.kinetic()
    if spec.potential().trimmed().degree < 1:
        raise DomainError("potential is constant")
    rm = roots(p)
    pts = tuple(r for r, _ in rm)
    mult = tuple(m for _, m in rm)
    return TurningPointSet(pts, mult, mirror_symmetric(pts))


def imaginary_axis_count(E: float, g: float) -> int:
    """Distinct real roots of g y^5 - y^2/2 - E, i.e. quintic turning points z = i y.

    Counts sign changes between consecutive critical points of the real
    quintic, so it shares nothing with the Aberth path it is used to check.
    """
    q = np.polynomial.Polynomial([-E, 0, -0.5, 0, 0, g])
    crit = sorted(r.real for r in q.deriv().roots() if abs(r.imag) < 1e-12)
    big = 10 * (1 + abs(E) / g + 1 / g) ** 0.5
    knots = [-big] + crit + [big]
    tol = 1e-12 * max(1.0, abs(E))
    vals = [0.0 if abs(q(k)) <= tol else q(k) for k in knots]
    # monotone between knots: one root per strict sign change, plus each
    # vanishing critical value (a tangency) as one distinct root
    count = sum(1 for a, b in zip(vals[:-1], vals[1:]) if a * b < 0)
    count += sum(1 for v in vals if v == 0.0)
    return count


# --- classical exceptional point -------------------------------------------


def _check_negative(E):
    E = complex(E)
    if E.imag != 0 or E.real >= 0:
        raise DomainError("no classical exceptional point for non-negative energy")
    return E.real


def g_star_formula(E: float) -> float:
    E = _check_negative(E)
    return 0.2 * (-3.0 / (10.0 * E)) ** 1.5


def discriminant_in_g(E: float, g: float) -> float:
    """Discriminant of E - V on the imaginary axis, z = i y: g y^5 - y^2/2 - E.

    A linear change of variable rescales the discriminant of E - V(z) by a
    nonzero constant, so the zero set in g is the same; the y form has real
    coefficients and a real discriminant.
    """
    p = PolynomialC([-E, 0, -0.5, 0, 0, g])
    return discriminant(p).real


def discriminant_zero(E: float) -> float:
    """Locate g where the turning-point discriminant vanishes, by log-grid scan + Brent."""
    E = _check_negative(E)
    grid = np.geomspace(1e-6, 1e3, 181) * abs(E) ** -1.5
    vals = [discriminant_in_g(E, g) for g in grid]
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0:
            return float(a)
        if fa * fb < 0:
            return brentq(lambda g: discriminant_in_g(E, g), a, b, xtol=1e-300, rtol=4 * _EPS,
                          maxiter=500)
    raise ConvergenceError("discriminant has no sign change in g")


def classical_exceptional_point(E: float, check: bool = True) -> float:
    """Coupling g* at which two quintic turning points merge, for E < 0.

    Closed form g* = (1/5)(-3/(10E))^(3/2); with ``check`` the zero of the
    discriminant in g is located independently and must agree to 1e-10.
    """
    g = g_star_formula(E)
    if check:
        gd = discriminant_zero(E)
        if abs(gd - g) > 1e-10 * g:
            raise ConvergenceError(
                f"discriminant zero {gd!r} disagrees with closed form {g!r}", best=gd)
    return g


def coalesced_turning_point(E: float) -> complex:
    """The double root i sqrt(-10E/3) reached at g = g*(E)."""
    E = _check_negative(E)
    z = 1j * math.sqrt(-10.0 * E / 3.0)
    g = g_star_formula(E)
    V = PolynomialC([0, 0, 0.5, 0, 0, -1j * g])
    scale = max(1.0, abs(E))
    if abs(V(z) - E) > 1e-10 * scale or abs(V.deriv()(z)) > 1e-10 * scale:
        raise ConvergenceError("tangency conditions not met", best=z)
    return z


# --- G2 vacuum equation -----------------------------------------------------


@dataclass(frozen=True)
class G2Params:
    m: float = 1.0
    lam: float = 0.1
    Lambda: float = 1.0

    def __post_init__(self):
        if not (self.m > 0 and self.Lambda > 0 and self.lam >= 0):
            raise DomainError("G2 parameters must be positive")

    def polynomial(self) -> PolynomialC:
        """m u^4 (1 - lam^2 u / m^2)^2 - Lambda^9, ascending in u."""
        c = self.lam ** 2 / self.m ** 2
        m = self.m
        return PolynomialC([-self.Lambda ** 9, 0, 0, 0, m, -2 * m * c, m * c * c])


def g2_vacua(params: G2Params) -> list[complex]:
    return flat_roots(params.polynomial())


def g2_coalescence(m: float = 1.0, Lambda: float = 1.0, lam2_range=(1e-3, 2.0),
                   n_scan: int = 400) -> float:
    """Scan lambda^2 for a sign change of the (real) vacuum discriminant; refine with Brent."""

    def disc(l2):
        return discriminant(G2Params(m, math.sqrt(l2), Lambda).polynomial()).real

    grid = np.linspace(*lam2_range, n_scan)
    vals = [disc(x) for x in grid]
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa * fb < 0:
            return brentq(disc, a, b, xtol=1e-14)
    raise ConvergenceError("no vacuum coalescence in the scanned range")


def min_root_separation(points) -> float:
    pts = list(points)
    return min(abs(a - b) for i, a in enumerate(pts) for b in pts[i + 1 :])

