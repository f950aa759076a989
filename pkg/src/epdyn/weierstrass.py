"""Weierstrass elliptic function and the exact solution of the complex cubic oscillator.

For V(z) = i z^3 the substitution z = 2 i y turns zdot^2/2 + i z^3 = E into

    ydot^2 = 4 y^3 - g2 y - g3,   g2 = 0, g3 = E/2,

so every trajectory is z(t) = 2 i P(t + t0; 0, E/2).  Lattices are stored
with *full* periods as generators.

Evaluation: reduce t into the fundamental cell, halve it n times until the
Laurent series is safely convergent, then undo the halvings with the
duplication formulas for P and P'.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._errors import DomainError
from .cpoly import PolynomialC, roots
from .periods import path_integral

TOL_POLE = 1e-8
LAURENT_TERMS = 16
SERIES_RADIUS = 0.3  # fraction of the shortest period


@dataclass(frozen=True)
class Invariants:
    g2: complex
    g3: complex

    @property
    def discriminant(self) -> complex:
        return complex(self.g2) ** 3 - 27 * complex(self.g3) ** 2

    @property
    def degenerate(self) -> bool:
        scale = max(abs(self.g2) ** 3, 27 * abs(self.g3) ** 2, 1e-300)
        return abs(self.discriminant) <= 1e-14 * scale or scale == 1e-300

    def cubic(self) -> PolynomialC:
        return PolynomialC([-self.g3, -self.g2, 0, 4])


def invariants_from_cubic(E: complex) -> Invariants:
    return Invariants(0.0, complex(E) / 2)


@dataclass(frozen=True)
class Lattice:
    T1: complex
    T2: complex

    def __post_init__(self):
        if abs((self.T2 / self.T1).imag) < 1e-12:
            raise DomainError("lattice generators are collinear")

    def coords(self, t: complex):
        M = np.array([[self.T1.real, self.T2.real], [self.T1.imag, self.T2.imag]])
        return np.linalg.solve(M, [t.real, t.imag])

    def reduce(self, t: complex):
        """Return (r, m, n) with t = r + m T1 + n T2 and r nearest to the origin."""
        x, y = self.coords(complex(t))
        m0, n0 = round(x), round(y)
        best = None
        for dm in (-1, 0, 1):
            for dn in (-1, 0, 1):
                m, n = m0 + dm, n0 + dn
                r = t - m * self.T1 - n * self.T2
                if best is None or abs(r) < abs(best[0]):
                    best = (r, m, n)
        return best

    @property
    def shortest(self) -> float:
        return min(abs(self.T1), abs(self.T2), abs(self.T1 - self.T2), abs(self.T1 + self.T2))


def _gauss_reduce(u: complex, v: complex):
    if abs(u) > abs(v):
        u, v = v, u
    while True:
        k = round((v * u.conjugate()).real / abs(u) ** 2)
        v = v - k * u
        if abs(v) >= abs(u):
            return u, v
        u, v = v, u


def lattice_from_invariants(inv: Invariants) -> Lattice:
    """Period lattice from quadrature of dy / sqrt(4y^3 - g2 y - g3) between roots."""
    if inv.degenerate:
        raise DomainError("degenerate invariants: g2^3 - 27 g3^2 = 0")
    P = inv.cubic()
    e = [r for r, _ in roots(P)]
    per = []
    for i in range(3):
        for j in range(i + 1, 3):
            v, _, _ = path_integral(P, e[i], e[j])
            per.append(2 * v)
    # pick two independent periods and reduce
    per.sort(key=abs)
    u = per[0]
    v = next(p for p in per[1:] if abs((p / u).imag) > 1e-8)
    u, v = _gauss_reduce(u, v)
    if complex(inv.g2) == 0:
        # equianharmonic: hexagonal lattice, generators T1 and T1 e^{i pi/3}
        six = [u * cmath.exp(1j * math.pi * k / 3) for k in range(6)]
        T1 = min(six, key=lambda w: (round(abs(cmath.phase(w)), 12), -w.real))
        return Lattice(T1, T1 * cmath.exp(1j * math.pi / 3))
    cands = [u, -u, v, -v]
    T1 = min(cands, key=lambda w: abs(cmath.phase(w)))
    T2 = v if T1 in (u, -u) else u
    if (T2 / T1).imag < 0:
        T2 = -T2
    return Lattice(T1, T2)


@lru_cache(maxsize=64)
def _laurent(g2: complex, g3: complex, n: int = LAURENT_TERMS):
    c = [0j] * (n + 2)
    c[2] = g2 / 20
    c[3] = g3 / 28
    for k in range(4, n + 2):
        c[k] = 3 / ((2 * k + 1) * (k - 3)) * sum(c[m] * c[k - m] for m in range(2, k - 1))
    return tuple(c)


def _series(t: complex, g2, g3):
    c = _laurent(complex(g2), complex(g3))
    t2 = t * t
    p = 1 / t2
    dp = -2 / (t2 * t)
    tp = 1.0 + 0j  # t^(2k-2) built incrementally
    for k in range(2, len(c)):
        tp = t2 if k == 2 else tp * t2
        p += c[k] * tp
        dp += c[k] * (2 * k - 2) * tp / t
    return p, dp


def wp(t: complex, inv: Invariants, lat: Lattice):
    """(P(t), P'(t)) for invariants ``inv`` on lattice ``lat``."""
    g2, g3 = complex(inv.g2), complex(inv.g3)
    r, _, _ = lat.reduce(complex(t))
    short = lat.shortest
    if abs(r) < TOL_POLE * short:
        raise DomainError("pole")
    n = 0
    u = r
    while abs(u) > SERIES_RADIUS * short:
        u /= 2
        n += 1
    p, dp = _series(u, g2, g3)
    for _ in range(n):
        d2 = 6 * p * p - g2 / 2
        q = d2 / (2 * dp)
        dq = (12 * p * dp * dp - d2 * d2) / (2 * dp * dp)
        p, dp = -2 * p + q * q, -dp + q * dq
    return p, dp


def ode_residual(p, dp, inv: Invariants) -> float:
    """|P'^2 - 4P^3 + g2 P + g3| relative to the size of its terms."""
    g2, g3 = complex(inv.g2), complex(inv.g3)
    res = dp * dp - 4 * p ** 3 + g2 * p + g3
    return abs(res) / max(abs(dp) ** 2, 4 * abs(p) ** 3, abs(g2 * p), abs(g3), 1e-300)


@lru_cache(maxsize=32)
def cubic_setup(E: complex):
    inv = invariants_from_cubic(E)
    return inv, lattice_from_invariants(inv)


def imaginary_period(E: float) -> float:
    """Tt with i Tt = 2 T2 - T1 for the cubic lattice."""
    _, lat = cubic_setup(complex(E))
    return abs(2 * lat.T2 - lat.T1)


def cubic_trajectory(t: float, a: float, E: float = 1.0, derivative: bool = False):
    """z(t) = 2 i P(t + i a; 0, E/2), optionally with zdot = 2 i P'."""
    inv, lat = cubic_setup(complex(E))
    p, dp = wp(complex(t, a) if isinstance(t, (int, float)) else complex(t) + 1j * a, inv, lat)
    if derivative:
        return 2j * p, 2j * dp
    return 2j * p
