"""Brute-force oracles, independent of the library's fast paths."""

from __future__ import annotations

import cmath
import functools
import itertools
import math

import numpy as np

from toric_periods.characters import frac1
from toric_periods.padic import LocalElement, LocalField


class TruncatedRing:
    """O/p^3 for a local field of degree <= 2, basis (1, theta) with theta^2 = D.

    Arithmetic is done on integer coordinate arrays; nothing from the library
    beyond the defining polynomial is used.
    """

    PREC = 3

    def __init__(self, field: LocalField):
        self.p = field.p
        self.M = field.p ** self.PREC
        self.degree = field.degree
        self.ramified = field.e == 2
        if field.degree == 1:
            self.D = 0
        elif self.ramified:
            self.D = -field.eis[0][0]
        else:
            if field.unram[1] != 0:
                raise ValueError("expected y^2 = u")
            self.D = -field.unram[0]

    def coords(self, x: LocalElement) -> tuple[int, int]:
        if x.scale < 0:
            raise ValueError("oracle handles integral elements only")
        m = self.p ** x.scale
        c = [(v * m) % self.M for v in x.coeffs] + [0]
        return c[0], c[1]

    def mul(self, a, b):
        a0, a1 = a
        b0, b1 = b
        return ((a0 * b0 + self.D * a1 * b1) % self.M, (a0 * b1 + a1 * b0) % self.M)

    def valuation(self, c0, c1):
        """Normalized valuation of arrays of coordinates, capped at 2*PREC."""
        cap = 2 * self.PREC

        def vp(x):
            v = np.full(x.shape, self.PREC, dtype=np.int64)
            y = x.copy()
            for k in range(self.PREC):
                hit = (y % self.p != 0) & (v == self.PREC)
                v[hit] = k
                y = y // self.p
            return v

        v0, v1 = vp(c0), vp(c1)
        if self.ramified:
            v = np.minimum(2 * v0, 2 * v1 + 1)
        else:
            v = np.minimum(v0, v1)
        return np.minimum(v, cap)

    def key(self, c0, c1, k):
        """Integer encoding of the class modulo pi^k."""
        if self.ramified:
            m0, m1 = self.p ** ((k + 1) // 2), self.p ** (k // 2)
        else:
            m0 = m1 = self.p ** k
        if self.degree == 1:
            return c0 % m0
        return (c0 % m0) * m1 + c1 % m1

    def all_elements(self, k: int = 3):
        """Representatives of O/pi^k (computations stay exact modulo pi^3)."""
        if self.degree == 1:
            r = np.arange(self.p ** k, dtype=np.int64)
            return r, np.zeros_like(r)
        if self.ramified:
            r0, r1 = np.arange(self.p ** ((k + 1) // 2), dtype=np.int64), np.arange(self.p ** (k // 2), dtype=np.int64)
        else:
            r0 = r1 = np.arange(self.p ** k, dtype=np.int64)
        c0, c1 = np.meshgrid(r0, r1, indexing="ij")
        return c0.ravel(), c1.ravel()

    @property
    def pi(self):
        return (0, 1) if self.ramified else (self.p, 0)

    def key_space(self, k):
        if self.ramified:
            return self.p ** ((k + 1) // 2) * self.p ** (k // 2)
        return self.p ** (k * self.degree)

    @functools.cached_property
    def square_tables(self):
        S0, S1 = self.all_elements()
        sq0, sq1 = self.mul((S0, S1), (S0, S1))
        out = {}
        for k in (1, 3):
            table = np.zeros(self.key_space(k), dtype=bool)
            table[self.key(sq0, sq1, k)] = True
            out[k] = table
        return out


@functools.lru_cache(maxsize=None)
def _ring(field: LocalField) -> TruncatedRing:
    return TruncatedRing(field)


def brute_hilbert(a: LocalElement, b: LocalElement) -> int:
    """(a, b) = 1 iff a x^2 + b y^2 represents a nonzero square or is isotropic.

    Enumerates projective (x : y) over O/pi^3; valid for a, b of valuation 0 or 1
    and odd p, where a primitive zero mod pi^3 forces isotropy and a value of
    even valuation v < 3 is a square iff it is one modulo pi^(v+1).  Points
    (x : 1) are enumerated mod pi first and lifted only where the value
    vanishes mod pi, since a unit value is decided by its residue.
    """
    R = _ring(a.field)
    A, B = R.coords(a), R.coords(b)
    squares = R.square_tables

    def represents_square(x, y) -> bool:
        ax2 = R.mul(A, R.mul(x, x))
        by2 = R.mul(B, R.mul(y, y))
        w0, w1 = (ax2[0] + by2[0]) % R.M, (ax2[1] + by2[1]) % R.M
        v = R.valuation(w0, w1)
        if np.any(v >= 3):
            return True
        for k in (0, 2):
            sel = v == k
            if np.any(sel) and squares[k + 1][R.key(w0[sel], w1[sel], k + 1)].any():
                return True
        return False

    def ones(n):
        return (np.ones(n, dtype=np.int64), np.zeros(n, dtype=np.int64))

    # chart (1 : pi t)
    t = R.all_elements(2)
    if represents_square(ones(len(t[0])), R.mul(R.pi, t)):
        return 1
    # chart (x : 1), first modulo pi
    x = R.all_elements(1)
    if represents_square(x, ones(len(x[0]))):
        return 1
    ax2 = R.mul(A, R.mul(x, x))
    w = ((ax2[0] + B[0]) % R.M, (ax2[1] + B[1]) % R.M)
    vanishing = np.nonzero(R.valuation(*w) >= 1)[0]
    t = R.all_elements(2)
    pt = R.mul(R.pi, t)
    for i in vanishing:
        lift = ((x[0][i] + pt[0]) % R.M, (x[1][i] + pt[1]) % R.M)
        if represents_square(lift, ones(len(t[0]))):
            return 1
    return -1


def _integral_elements(field: LocalField, a: int):
    """Representatives of O/pi^a as field elements."""
    e, f, p = field.e, field.f, field.p
    mods = [p ** max(0, -(-(a - i // f) // e)) for i in range(field.degree)]
    for cs in itertools.product(*[range(m) for m in mods]):
        yield field.make(0, list(cs))


def brute_tate_epsilon(chi, psi) -> complex:
    """q^{-a/2} sum over (O/pi^a)^x of chi^{-1}(x/gamma) psi(x/gamma), gamma = pi^{a + n(psi)}.

    Every unit is evaluated through the character's own discrete logarithm and
    the additive character through an explicit trace.
    """
    F = chi.field
    a = chi.conductor
    ell = psi.level
    if a == 0:
        return cmath.exp(-2j * math.pi * float(ell * chi.rotation(F.uniformizer)))
    gamma_inv = F.pi_power(ell - a)
    total = 0j
    for u in _integral_elements(F, a):
        if u.coeffs is None or u.valuation != 0:
            continue
        x = u * gamma_inv
        r = frac1(psi.rotation(x) - chi.rotation(x))
        total += cmath.exp(2j * math.pi * float(r))
    return total / math.sqrt(F.q) ** a


def legendre(x: int, p: int) -> int:
    x %= p
    if x == 0:
        return 0
    return 1 if pow(x, (p - 1) // 2, p) == 1 else -1


def classical_gauss_sum(p: int) -> complex:
    return sum(legendre(x, p) * cmath.exp(2j * math.pi * x / p) for x in range(1, p))

