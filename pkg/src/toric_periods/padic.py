"""Truncated arithmetic in finite extensions of Q_p for odd p.

A field is a two-step tower: an unramified extension U = Q_p[y]/(P(y)) of
degree f, then an Eisenstein extension U[pi]/(E(pi)) of degree e.  Elements
are stored as ``p**scale * w`` where ``w`` is an integral vector in the basis
``y**a * pi**j`` (index ``j*f + a``), known modulo pi**N (absolute precision N).

Precision loss: sums and products of integral elements are exact modulo pi**N.
Multiplying by an element of valuation v < 0 loses |v| digits of absolute
precision, which the fixed cap does not track; callers pick N with margin.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import sympy
from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_decomp

from .errors import (
    DivisionByNearZero,
    InputError,
    LevelExceedsPrecision,
    LogFailure,
    NotEisenstein,
    NotPrime,
    PrecisionExhausted,
    PrimeTwoUnsupported,
    UnknownSubfield,
)

BOTTOM = None  # valuation of an element indistinguishable from zero


def vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


# ---------------------------------------------------------------------------
# residue field


class ResidueField:
    """F_q = F_p[y]/(P(y)) with elements as coefficient tuples."""

    def __init__(self, p: int, modulus: Sequence[int]):
        self.p = p
        self.f = len(modulus) - 1
        self.q = p ** self.f
        self.modulus = tuple(c % p for c in modulus)

    def reduce(self, coeffs: Sequence[int]) -> tuple[int, ...]:
        c = [x % self.p for x in coeffs]
        f, p = self.f, self.p
        for k in range(len(c) - 1, f - 1, -1):
            t = c[k]
            if t:
                for i in range(f):
                    c[k - f + i] = (c[k - f + i] - t * self.modulus[i]) % p
            c[k] = 0
        c = c[:f] + [0] * (f - len(c))
        return tuple(c[:f])

    def mul(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        prod = [0] * (2 * self.f - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        return self.reduce(prod)

    def pow(self, a: Sequence[int], n: int) -> tuple[int, ...]:
        if n < 0:
            a = self.inv(a)
            n = -n
        result = self.one
        base = tuple(a)
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def inv(self, a: Sequence[int]) -> tuple[int, ...]:
        if not any(a):
            raise ZeroDivisionError("zero in residue field")
        return self.pow(a, self.q - 2)

    @property
    def one(self) -> tuple[int, ...]:
        return (1,) + (0,) * (self.f - 1)

    def encode(self, a: Sequence[int]) -> int:
        return sum(c * self.p ** i for i, c in enumerate(a))

    def decode(self, n: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.f):
            n, r = divmod(n, self.p)
            out.append(r)
        return tuple(out)

    def elements(self) -> Iterable[tuple[int, ...]]:
        for n in range(self.q):
            yield self.decode(n)

    def quadratic_character(self, a: Sequence[int]) -> int:
        """Legendre-type symbol a**((q-1)/2) in {+1, -1}."""
        r = self.pow(a, (self.q - 1) // 2)
        if r == self.one:
            return 1
        return -1

    @cached_property
    def generator(self) -> tuple[int, ...]:
        primes = sympy.factorint(self.q - 1)
        for n in range(1, self.q):
            g = self.decode(n)
            if all(self.pow(g, (self.q - 1) // ell) != self.one for ell in primes):
                return g
        raise AssertionError("no generator found")

    @cached_property
    def _log_table(self) -> dict[tuple[int, ...], int]:
        table = {}
        x = self.one
        for k in range(self.q - 1):
            table[x] = k
            x = self.mul(x, self.generator)
        return table

    def log(self, a: Sequence[int]) -> int:
        """Discrete log to the base ``generator``."""
        a = tuple(a)
        if self.q - 1 < 10 ** 4:
            return self._log_table[a]
        return self._bsgs(a)

    def _bsgs(self, a: tuple[int, ...]) -> int:
        n = self.q - 1
        m = math.isqrt(n) + 1
        baby = {}
        x = self.one
        for j in range(m):
            baby.setdefault(x, j)
            x = self.mul(x, self.generator)
        giant = self.pow(self.generator, -m)
        y = a
        for i in range(m + 1):
            if y in baby:
                return (i * m + baby[y]) % n
            y = self.mul(y, giant)
        raise LogFailure("residue discrete log failed")

    @cached_property
    def nonsquare(self) -> tuple[int, ...]:
        """Smallest non-square in the integer encoding order."""
        for n in range(1, self.q):
            a = self.decode(n)
            if self.quadratic_character(a) == -1:
                return a
        raise AssertionError("no non-square")


def unramified_modulus(p: int, f: int) -> tuple[int, ...]:
    """Defining polynomial of the unramified step, low degree first.

    f = 1 uses y (so y = 0), f = 2 uses y**2 - u0 with u0 the least
    non-residue, larger f the least monic irreducible in encoding order.
    """
    if f == 1:
        return (0, 1)
    if f == 2:
        u0 = next(a for a in range(2, p) if pow(a, (p - 1) // 2, p) == p - 1)
        return (-u0, 0, 1)
    y = sympy.Symbol("y")
    for n in range(p ** f):
        low = [(n // p ** i) % p for i in range(f)]
        poly = sympy.Poly(list(reversed(low + [1])), y, modulus=p)
        if poly.is_irreducible:
            return tuple(low) + (1,)
    raise AssertionError("no irreducible polynomial found")


# ---------------------------------------------------------------------------
# fields


class LocalField:
    """A two-step tower over Q_p at absolute precision N.

    ``eisenstein`` lists the coefficients of E(x) low degree first including
    the leading 1; each coefficient is an integer or a list of integers (a
    polynomial in the unramified generator y).
    """

    def __init__(self, p: int, f: int, eisenstein: Sequence, precision: int):
        if not isinstance(p, int) or p < 2 or not sympy.isprime(p):
            raise NotPrime(f"{p} is not a prime")
        if p == 2:
            raise PrimeTwoUnsupported("residue characteristic 2 is not supported")
        if f < 1:
            raise InputError("unramified degree must be positive")
        if precision < 1:
            raise InputError("precision must be positive")
        self.p = p
        self.f = f
        self.N = precision
        self.unram = unramified_modulus(p, f)
        self.residue = ResidueField(p, self.unram)
        self.q = p ** f
        coeffs = [self._ypoly(c) for c in eisenstein]
        if len(coeffs) < 2:
            raise NotEisenstein("Eisenstein polynomial needs degree at least 1")
        if coeffs[-1] != self.residue.one and coeffs[-1] != (1,) + (0,) * (f - 1):
            raise NotEisenstein("Eisenstein polynomial must be monic")
        self.e = len(coeffs) - 1
        self.eis = tuple(coeffs[:-1])
        for c in self.eis:
            if any(x % p for x in c):
                raise NotEisenstein("non-leading coefficients must be divisible by p")
        b0 = [x // p for x in self.eis[0]]
        if not any(x % p for x in self.residue.reduce(b0)):
            raise NotEisenstein("constant coefficient must have valuation exactly 1")
        self.eisenstein_input = [self._json_coeff(c) for c in coeffs]
        self.degree = self.e * self.f
        self._mod_cache: dict[int, tuple[int, ...]] = {}

    def _ypoly(self, c) -> tuple[int, ...]:
        if isinstance(c, (list, tuple)):
            c = [int(x) for x in c]
        else:
            c = [int(c)]
        if len(c) > self.f:
            c = list(self._reduce_y_exact(c))
        return tuple(c + [0] * (self.f - len(c)))

    @staticmethod
    def _json_coeff(c: tuple[int, ...]):
        if all(x == 0 for x in c[1:]):
            return str(c[0])
        return [str(x) for x in c]

    # -- exact polynomial arithmetic over Z -------------------------------

    def _reduce_y_exact(self, c: list[int]) -> list[int]:
        f = self.f
        P = self.unram
        for k in range(len(c) - 1, f - 1, -1):
            t = c[k]
            if t:
                for i in range(f):
                    c[k - f + i] -= t * P[i]
            c[k] = 0
        return c[:f] + [0] * (f - len(c))

    def _ymul(self, a: Sequence[int], b: Sequence[int]) -> list[int]:
        f = self.f
        if f == 1:
            return [a[0] * b[0]]
        prod = [0] * (2 * f - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return self._reduce_y_exact(prod)

    def _mul_w(self, w1: Sequence[int], w2: Sequence[int]) -> list[int]:
        e, f = self.e, self.f
        if e == 1:
            return self._ymul(w1, w2) if f > 1 else [w1[0] * w2[0]]
        A = [w1[j * f:(j + 1) * f] for j in range(e)]
        B = [w2[j * f:(j + 1) * f] for j in range(e)]
        prod = [[0] * f for _ in range(2 * e - 1)]
        for i in range(e):
            if not any(A[i]):
                continue
            for j in range(e):
                if not any(B[j]):
                    continue
                t = self._ymul(A[i], B[j])
                row = prod[i + j]
                for a in range(f):
                    row[a] += t[a]
        for k in range(2 * e - 2, e - 1, -1):
            c = prod[k]
            if any(c):
                for i in range(e):
                    t = self._ymul(c, self.eis[i])
                    row = prod[k - e + i]
                    for a in range(f):
                        row[a] -= t[a]
        out = []
        for j in range(e):
            out.extend(prod[j])
        return out

    # -- precision -----------------------------------------------------------

    def moduli(self, scale: int) -> tuple[int, ...]:
        """Per-coefficient moduli p**m_j for an element p**scale * w."""
        mods = self._mod_cache.get(scale)
        if mods is None:
            out = []
            for j in range(self.e):
                m = _ceil_div(self.N - self.e * scale - j, self.e)
                out.extend([self.p ** m if m > 0 else 1] * self.f)
            mods = tuple(out)
            self._mod_cache[scale] = mods
        return mods

    # -- constructors ----------------------------------------------------------

    def make(self, scale: int, coeffs: Sequence[int]) -> "LocalElement":
        return LocalElement._normalize(self, scale, list(coeffs))

    def __call__(self, value) -> "LocalElement":
        return self.element(value)

    def element(self, value) -> "LocalElement":
        """Coerce an int, Fraction, decimal string or coefficient list."""
        if isinstance(value, LocalElement):
            if value.field is not self:
                raise InputError("element belongs to a different field")
            return value
        if isinstance(value, str):
            value = Fraction(value)
        if isinstance(value, int):
            return self.make(0, [value] + [0] * (self.degree - 1))
        if isinstance(value, Fraction):
            num, den = value.numerator, value.denominator
            t = vp(den, self.p)
            unit = den // self.p ** t
            m = self.p ** (_ceil_div(self.N, self.e) + t + 2)
            return self.make(-t, [num * pow(unit, -1, m)] + [0] * (self.degree - 1))
        if isinstance(value, (list, tuple)):
            coeffs = [int(c) for c in value]
            if len(coeffs) != self.degree:
                raise InputError("coefficient vector has wrong length")
            return self.make(0, coeffs)
        raise InputError(f"cannot coerce {value!r} into the field")

    @cached_property
    def zero(self) -> "LocalElement":
        return self.make(0, [0] * self.degree)

    @cached_property
    def one(self) -> "LocalElement":
        return self.element(1)

    @cached_property
    def y(self) -> "LocalElement":
        """The unramified generator (zero when f = 1)."""
        c = [0] * self.degree
        if self.f > 1:
            c[1] = 1
        return self.make(0, c)

    @cached_property
    def uniformizer(self) -> "LocalElement":
        if self.e == 1:
            return self.make(0, [-x for x in self.eis[0]])
        c = [0] * self.degree
        c[self.f] = 1
        return self.make(0, c)

    @cached_property
    def uniformizer_inverse(self) -> "LocalElement":
        # pi**e = p * eps with eps a unit, so 1/pi = pi**(e-1) / (p * eps)
        pi = self.uniformizer
        if self.e == 1:
            return pi.inverse_unit_part()
        eps_w = [0] * self.degree
        for i, b in enumerate(self.eis):
            for a in range(self.f):
                eps_w[i * self.f + a] = -b[a]
        eps = self.make(-1, eps_w)  # = pi**e / p
        return pi ** (self.e - 1) * self.make(-1, [1] + [0] * (self.degree - 1)) * eps.inverse_unit_part()

    @cached_property
    def nonresidue(self) -> "LocalElement":
        """Canonical non-square unit u (least non-square residue, lifted)."""
        r = self.residue.nonsquare
        return self.make(0, list(r) + [0] * (self.degree - self.f))

    @cached_property
    def teichmuller_generator(self) -> "LocalElement":
        g = self.residue.generator
        z = self.make(0, list(g) + [0] * (self.degree - self.f))
        for _ in range(_ceil_div(self.N, self.e) + 1):
            z = z ** self.q
        return z

    def teichmuller(self, r: Sequence[int]) -> "LocalElement":
        z = self.make(0, list(r) + [0] * (self.degree - self.f))
        for _ in range(_ceil_div(self.N, self.e) + 1):
            z = z ** self.q
        return z

    def pi_power(self, k: int) -> "LocalElement":
        cache = self.__dict__.setdefault("_pi_powers", {})
        if k not in cache:
            base = self.uniformizer if k >= 0 else self.uniformizer_inverse
            cache[k] = base ** abs(k) if k else self.one
        return cache[k]

    def from_residue(self, r: Sequence[int]) -> "LocalElement":
        return self.make(0, list(r) + [0] * (self.degree - self.f))

    # -- traces ------------------------------------------------------------

    def _mult_matrix(self, w: Sequence[int]) -> list[list[int]]:
        """Columns are coordinates of w * basis_i (exact integers)."""
        cols = []
        for i in range(self.degree):
            b = [0] * self.degree
            b[i] = 1
            cols.append(self._mul_w(w, b))
        return [[cols[j][i] for j in range(self.degree)] for i in range(self.degree)]

    @cached_property
    def basis_traces(self) -> tuple[int, ...]:
        """tr_{M/Q_p} of each basis monomial."""
        out = []
        for i in range(self.degree):
            b = [0] * self.degree
            b[i] = 1
            m = self._mult_matrix(b)
            out.append(sum(m[k][k] for k in range(self.degree)))
        return tuple(out)

    # -- identity and serialization -----------------------------------------

    @property
    def field_id(self) -> str:
        return f"Q{self.p}[f={self.f};E={json.dumps(self.eisenstein_input, separators=(',', ':'))};N={self.N}]"

    def to_json(self) -> dict:
        return {
            "p": str(self.p),
            "f": str(self.f),
            "eisenstein": self.eisenstein_input,
            "precision": str(self.N),
        }

    def with_precision(self, N: int) -> "LocalField":
        return make_local_field(self.p, self.f, self.eisenstein_input, N)

    def __repr__(self) -> str:
        return f"LocalField({self.field_id})"

    def same_as(self, other: "LocalField") -> bool:
        return self.field_id == other.field_id


_FIELD_CACHE: dict[tuple, LocalField] = {}


def make_local_field(p: int, f: int, eis: Sequence, N: int) -> LocalField:
    """Validated (and cached) field constructor."""

    def freeze(c):
        if isinstance(c, (list, tuple)):
            return tuple(int(x) for x in c)
        return int(c)

    key = (p, f, tuple(freeze(c) for c in eis), N)
    field = _FIELD_CACHE.get(key)
    if field is None:
        field = LocalField(p, f, eis, N)
        _FIELD_CACHE[key] = field
    return field


def qp(p: int, N: int) -> LocalField:
    return make_local_field(p, 1, [-p, 1], N)


def field_from_json(obj: dict) -> LocalField:
    return make_local_field(int(obj["p"]), int(obj["f"]), obj["eisenstein"], int(obj["precision"]))


# ---------------------------------------------------------------------------
# elements


class LocalElement:
    __slots__ = ("field", "scale", "coeffs")

    def __init__(self, field: LocalField, scale: int, coeffs):
        self.field = field
        self.scale = scale
        self.coeffs = coeffs  # tuple of ints, or None for zero

    @staticmethod
    def _normalize(field: LocalField, scale: int, coeffs: list[int]) -> "LocalElement":
        p = field.p
        while True:
            if not any(coeffs):
                return LocalElement(field, 0, None)
            g = min(vp(c, p) for c in coeffs if c)
            if g:
                d = p ** g
                coeffs = [c // d for c in coeffs]
                scale += g
            mods = field.moduli(scale)
            coeffs = [c % m for c, m in zip(coeffs, mods)]
            if not any(coeffs):
                return LocalElement(field, 0, None)
            if any(c % p for c in coeffs):
                return LocalElement(field, scale, tuple(coeffs))

    # -- predicates ------------------------------------------------------------

    def is_zero(self) -> bool:
        return self.coeffs is None

    @property
    def valuation(self):
        """pi-adic valuation, or BOTTOM (None) when indistinguishable from 0."""
        if self.coeffs is None:
            return BOTTOM
        F = self.field
        best = None
        for j in range(F.e):
            block = self.coeffs[j * F.f:(j + 1) * F.f]
            nz = [c for c in block if c]
            if nz:
                v = F.e * min(vp(c, F.p) for c in nz) + j
                if best is None or v < best:
                    best = v
        return F.e * self.scale + best

    def is_unit(self) -> bool:
        return self.valuation == 0

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.field.element(other)
        if not isinstance(other, LocalElement):
            return NotImplemented
        return self.field is other.field and self.scale == other.scale and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.field.field_id, self.scale, self.coeffs))

    # -- arithmetic ------------------------------------------------------------

    def _coerce(self, other) -> "LocalElement":
        if isinstance(other, LocalElement):
            if other.field is not self.field:
                raise InputError("elements of different fields")
            return other
        return self.field.element(other)

    def __add__(self, other) -> "LocalElement":
        other = self._coerce(other)
        if self.coeffs is None:
            return other
        if other.coeffs is None:
            return self
        s = min(self.scale, other.scale)
        p = self.field.p
        m1 = p ** (self.scale - s)
        m2 = p ** (other.scale - s)
        return LocalElement._normalize(
            self.field, s, [a * m1 + b * m2 for a, b in zip(self.coeffs, other.coeffs)]
        )

    __radd__ = __add__

    def __neg__(self) -> "LocalElement":
        if self.coeffs is None:
            return self
        return LocalElement._normalize(self.field, self.scale, [-c for c in self.coeffs])

    def __sub__(self, other) -> "LocalElement":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "LocalElement":
        return self._coerce(other) - self

    def __mul__(self, other) -> "LocalElement":
        other = self._coerce(other)
        if self.coeffs is None or other.coeffs is None:
            return self.field.zero
        w = self.field._mul_w(self.coeffs, other.coeffs)
        return LocalElement._normalize(self.field, self.scale + other.scale, w)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LocalElement":
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other) -> "LocalElement":
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other) -> "LocalElement":
        return self._coerce(other) * self.inverse()

    def residue(self) -> tuple[int, ...]:
        """Image in the residue field (requires an integral element)."""
        F = self.field
        if self.coeffs is None:
            return (0,) * F.f
        if self.scale < 0:
            raise InputError("residue of a non-integral element")
        if self.scale > 0:
            return (0,) * F.f
        return tuple(c % F.p for c in self.coeffs[:F.f])

    def inverse_unit_part(self) -> "LocalElement":
        """Inverse of an element whose integral part w is a unit (scale kept)."""
        F = self.field
        w = LocalElement(F, 0, self.coeffs)
        r = w.residue()
        if not any(r):
            raise DivisionByNearZero("not a unit")
        y = F.from_residue(F.residue.inv(r))
        prec = 1
        two = F.element(2)
        while prec < F.N + 2:
            y = y * (two - w * y)
            prec *= 2
        if self.scale:
            y = y * LocalElement._normalize(F, -self.scale, [1] + [0] * (F.degree - 1))
        return y

    def inverse(self) -> "LocalElement":
        v = self.valuation
        if v is BOTTOM:
            raise DivisionByNearZero("inverse of an element indistinguishable from 0")
        F = self.field
        if v >= F.N:
            raise DivisionByNearZero("valuation reaches the precision cap")
        if v == 0:
            return self.inverse_unit_part()
        unit = self * F.pi_power(-v)
        return unit.inverse_unit_part() * F.pi_power(-v)

    def unit_part(self) -> "LocalElement":
        """x / pi**v(x)."""
        v = self.valuation
        if v is BOTTOM:
            raise PrecisionExhausted("unit part of an element indistinguishable from 0")
        return self * self.field.pi_power(-v)

    def trace_qp(self) -> Fraction:
        """tr_{M/Q_p}(x) as an exact rational (truncated p-adic number)."""
        if self.coeffs is None:
            return Fraction(0)
        t = sum(c * b for c, b in zip(self.coeffs, self.field.basis_traces))
        return Fraction(t) * Fraction(self.field.p) ** self.scale

    def rational(self) -> Fraction:
        """For an element of Q_p: the rational representative p**scale * c0."""
        if self.coeffs is None:
            return Fraction(0)
        if any(self.coeffs[1:]):
            raise UnknownSubfield("element does not lie in Q_p")
        return Fraction(self.coeffs[0]) * Fraction(self.field.p) ** self.scale

    def __repr__(self) -> str:
        if self.coeffs is None:
            return f"O(pi^{self.field.N})"
        return f"p^{self.scale}*{list(self.coeffs)}"

    def to_json(self) -> dict:
        F = self.field
        if self.coeffs is None:
            coeffs = ["0"] * F.degree
        else:
            # plain integer coordinates when integral, otherwise scaled fractions
            if self.scale >= 0:
                m = F.p ** self.scale
                coeffs = [str(c * m) for c in self.coeffs]
            else:
                coeffs = [str(Fraction(c, F.p ** -self.scale)) for c in self.coeffs]
        return {"field_id": F.field_id, "coeffs": coeffs}


def element_from_json(field: LocalField, obj: dict) -> LocalElement:
    if obj.get("field_id", field.field_id) != field.field_id:
        raise InputError("element field_id does not match the field")
    coeffs = [Fraction(c) for c in obj["coeffs"]]
    if len(coeffs) != field.degree:
        raise InputError("coefficient vector has wrong length")
    out = field.zero
    for i, c in enumerate(coeffs):
        if c:
            b = [0] * field.degree
            b[i] = 1
            out = out + field.element(c) * field.make(0, b)
    return out


def sqrt(x: LocalElement) -> LocalElement:
    """Square root by Hensel lifting; raises if x is not a square."""
    F = x.field
    v = x.valuation
    if v is BOTTOM:
        raise PrecisionExhausted("square root of an element indistinguishable from 0")
    if v % 2:
        raise InputError("odd valuation: not a square")
    u = x.unit_part()
    r = u.residue()
    root = None
    for cand in F.residue.elements():
        if F.residue.mul(cand, cand) == r:
            root = cand
            break
    if root is None:
        raise InputError("residue is not a square")
    z = F.from_residue(root)
    half = F.element(Fraction(1, 2))
    for _ in range(int(math.log2(F.N + 2)) + 3):
        z = (z + u / z) * half
    half_v = v // 2
    # pi**v = (pi**(v/2))**2 but the unit part was taken w.r.t. pi**v
    return z * F.pi_power(half_v)


# ---------------------------------------------------------------------------
# homomorphisms between fields


class FieldMap:
    """A Q_p-algebra map source -> target given by the images of y and pi."""

    def __init__(self, source: LocalField, target: LocalField, y_image: LocalElement, pi_image: LocalElement):
        self.source = source
        self.target = target
        self.y_image = y_image
        self.pi_image = pi_image
        imgs = []
        for j in range(source.e):
            for a in range(source.f):
                imgs.append((y_image ** a) * (pi_image ** j))
        self.images = imgs
        self._check()

    def _check(self) -> None:
        S, T = self.source, self.target
        tol = T.N - 2 * T.e
        val = self._eval_poly_y(S.unram, self.y_image).valuation
        if val is not BOTTOM and val < tol:
            raise InputError("y image does not satisfy the unramified polynomial")
        # Eisenstein relation pi**e + sum b_i(y) pi**i
        acc = self.pi_image ** S.e
        for i, b in enumerate(S.eis):
            acc = acc + self._eval_poly_y(b, self.y_image) * self.pi_image ** i
        val = acc.valuation
        if val is not BOTTOM and val < tol:
            raise InputError("pi image does not satisfy the Eisenstein polynomial")

    def _eval_poly_y(self, coeffs, y_img: LocalElement) -> LocalElement:
        out = self.target.zero
        for a, c in enumerate(coeffs):
            if c:
                out = out + self.target.element(c) * y_img ** a
        return out

    def __call__(self, x: LocalElement) -> LocalElement:
        T = self.target
        if x.coeffs is None:
            return T.zero
        out = T.zero
        for c, img in zip(x.coeffs, self.images):
            if c:
                out = out + img * c
        if x.scale:
            out = out * LocalElement._normalize(T, x.scale, [1] + [0] * (T.degree - 1))
        return out

    @cached_property
    def _solver(self):
        # exact rational left inverse of the coordinate matrix of the images
        T = self.target
        cols = []
        for img in self.images:
            if img.coeffs is None:
                cols.append([Fraction(0)] * T.degree)
            else:
                m = Fraction(T.p) ** img.scale
                cols.append([Fraction(c) * m for c in img.coeffs])
        M = Matrix(T.degree, len(cols), lambda i, j: sympy.Rational(cols[j][i].numerator, cols[j][i].denominator))
        return (M.T * M).inv() * M.T

    def preimage(self, x: LocalElement) -> LocalElement:
        """Element of the source mapping to x (x must lie in the image)."""
        S, T = self.source, self.target
        if x.coeffs is None:
            return S.zero
        vec = Matrix([sympy.Rational(c) for c in x.coeffs])
        sol = self._solver * vec
        out = S.zero
        for i, c in enumerate(sol):
            c = Fraction(int(c.p), int(c.q))
            if c:
                b = [0] * S.degree
                b[i] = 1
                out = out + S.element(c) * S.make(0, b)
        if x.scale:
            out = out * LocalElement._normalize(S, x.scale, [1] + [0] * (S.degree - 1))
        back = self(out) - x
        if back.valuation is not BOTTOM and back.valuation < T.N - 2 * T.e - 2:
            raise UnknownSubfield("element is not in the image of the subfield")
        return out


def identity_map(field: LocalField) -> FieldMap:
    return FieldMap(field, field, field.y, field.uniformizer)


def sign_automorphism(field: LocalField, flip_y: bool, flip_pi: bool) -> FieldMap:
    """y -> +-y, pi -> +-pi; valid for y**2 = c and pi**2 = c' towers."""
    y = -field.y if flip_y else field.y
    pi = -field.uniformizer if flip_pi else field.uniformizer
    return FieldMap(field, field, y, pi)


def qp_embedding(field: LocalField) -> FieldMap:
    base = qp(field.p, _ceil_div(field.N, field.e))
    return FieldMap(base, field, field.zero, field.element(field.p))


# ---------------------------------------------------------------------------
# norms and traces


def _det(rows: list[list], mul, add, neg, zero, one):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return add(mul(rows[0][0], rows[1][1]), neg(mul(rows[0][1], rows[1][0])))
    total = zero
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = mul(rows[0][j], _det(minor, mul, add, neg, zero, one))
        total = add(total, term if j % 2 == 0 else neg(term))
    return total


def _bareiss(M: list[list[int]]) -> int:
    n = len(M)
    A = [row[:] for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k]:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def norm_and_trace(x: LocalElement, down_to: str = "Qp") -> tuple[LocalElement, LocalElement]:
    """Norm and trace of x down to 'Qp', 'unramified' or 'self'.

    Results are returned as elements of x's field (lying in the subfield).
    """
    F = x.field
    if down_to == "self":
        return x, x
    if down_to not in ("Qp", "unramified"):
        raise UnknownSubfield(f"unknown subfield marker {down_to!r}")
    if x.coeffs is None:
        return F.zero, F.zero
    if down_to == "Qp":
        M = F._mult_matrix(x.coeffs)
        det = _bareiss(M)
        tr = sum(M[i][i] for i in range(F.degree))
        norm = F.element(det) * F.element(Fraction(F.p) ** (x.scale * F.degree))
        trace = F.element(tr) * F.element(Fraction(F.p) ** x.scale)
        return norm, trace
    # relative to U: e x e matrix with entries in Z[y]/(P)
    e, f = F.e, F.f
    rows = []
    for i in range(e):
        b = [0] * F.degree
        b[i * f] = 1
        col = F._mul_w(x.coeffs, b)
        rows.append([tuple(col[j * f:(j + 1) * f]) for j in range(e)])
    mat = [[rows[j][i] for j in range(e)] for i in range(e)]

    def mul(a, b):
        return tuple(F._ymul(a, b))

    def add(a, b):
        return tuple(s + t for s, t in zip(a, b))

    def neg(a):
        return tuple(-s for s in a)

    zero = (0,) * f
    one = (1,) + (0,) * (f - 1)
    det = _det(mat, mul, add, neg, zero, one)
    tr = zero
    for i in range(e):
        tr = add(tr, mat[i][i])
    pad = [0] * (F.degree - f)
    norm = F.make(0, list(det) + pad) * F.element(Fraction(F.p) ** (x.scale * e))
    trace = F.make(0, list(tr) + pad) * F.element(Fraction(F.p) ** x.scale)
    return norm, trace


# ---------------------------------------------------------------------------
# unit group


class UnitGroupPresentation:
    """Presentation of M^x / (1 + pi^k O).

    Generators: pi (infinite order), the Teichmuller generator zeta of order
    q - 1 (when k >= 1) and a Smith-normal-form basis eta_i of the principal
    units U_1 / U_k (when k >= 2).
    """

    log_method = "residue table/BSGS on zeta; filtration digits + Smith form on U1"

    def __init__(self, field: LocalField, level: int):
        if level < 0:
            raise InputError("level must be non-negative")
        if level > field.N - 1:
            raise LevelExceedsPrecision(f"level {level} needs precision > {level}")
        self.field = field
        self.level = level
        F = field
        k = level
        # filtration generators 1 + y^t pi^i
        self._filt = []
        for i in range(1, k):
            for t in range(F.f):
                c = [0] * F.degree
                c[t] = 1
                g = F.one + F.make(0, c) * F.pi_power(i)
                self._filt.append((i, t, g))
        self._inv_pows = {}
        for i, t, g in self._filt:
            gi = g.inverse()
            pw = [F.one]
            for _ in range(F.p - 1):
                pw.append(pw[-1] * gi)
            self._inv_pows[(i, t)] = pw
        n = len(self._filt)
        if n:
            R = []
            for r, (i, t, g) in enumerate(self._filt):
                digits = self._digits(g ** F.p)
                row = [-d for d in digits]
                row[r] += F.p
                R.append(row)
            S, U, V = smith_normal_decomp(Matrix(R))
            diag = [int(S[i, i]) for i in range(n)]
            W = V.inv()
            self._V = [[int(V[i, j]) for j in range(n)] for i in range(n)]
            keep = [i for i in range(n) if diag[i] != 1]
            self._keep = keep
            self._snf_orders = [diag[i] for i in keep]
            top = F.p ** (k - 1)
            etas = []
            for i in keep:
                el = F.one
                for r, (_, _, g) in enumerate(self._filt):
                    ex = int(W[i, r]) % top
                    if ex:
                        el = el * g ** ex
                etas.append(el)
            self._etas = etas
        else:
            self._V = []
            self._keep = []
            self._snf_orders = []
            self._etas = []
        self._zeta_inv_pows: dict[int, LocalElement] = {}

    @property
    def generator_names(self) -> list[str]:
        names = ["pi"]
        if self.level >= 1:
            names.append("zeta")
        names.extend(f"eta{i + 1}" for i in range(len(self._etas)))
        return names

    @property
    def generators(self) -> list[LocalElement]:
        gens = [self.field.uniformizer]
        if self.level >= 1:
            gens.append(self.field.teichmuller_generator)
        gens.extend(self._etas)
        return gens

    @property
    def orders(self) -> list[int]:
        """Generator orders; 0 marks the infinite-order uniformizer."""
        out = [0]
        if self.level >= 1:
            out.append(self.field.q - 1)
        out.extend(self._snf_orders)
        return out

    @property
    def unit_order(self) -> int:
        """|O^x / (1 + pi^k)|."""
        if self.level == 0:
            return 1
        return (self.field.q - 1) * math.prod(self._snf_orders)

    @property
    def filtration_generators(self) -> list[tuple[int, int, LocalElement]]:
        return list(self._filt)

    def _digits(self, x: LocalElement) -> list[int]:
        """Filtration digits of a principal unit (mod U_k)."""
        F = self.field
        out = []
        for i in range(1, self.level):
            d = (x - F.one) * F.pi_power(-i)
            if d.coeffs is None:
                r = (0,) * F.f
            elif d.valuation < 0:
                raise LogFailure("element is not in the expected filtration step")
            else:
                r = d.residue()
            for t in range(F.f):
                c = r[t]
                out.append(c)
                if c:
                    x = x * self._inv_pows[(i, t)][c]
        return out

    def _zeta_inv(self, a: int) -> LocalElement:
        z = self._zeta_inv_pows.get(a)
        if z is None:
            z = self.field.teichmuller_generator ** (self.field.q - 1 - a) if a else self.field.one
            self._zeta_inv_pows[a] = z
        return z

    def discrete_log(self, x: LocalElement) -> tuple[int, ...]:
        """Exponent vector of x with respect to ``generators``."""
        F = self.field
        if x.field is not F:
            raise InputError("element from another field")
        v = x.valuation
        if v is BOTTOM:
            raise PrecisionExhausted("discrete log of an element indistinguishable from 0")
        if v + self.level > F.N:
            raise PrecisionExhausted("element known to too few digits for this level")
        out = [v]
        if self.level == 0:
            return tuple(out)
        u = x * F.pi_power(-v)
        a = F.residue.log(u.residue())
        out.append(a)
        if self.level == 1:
            return tuple(out)
        u1 = u * self._zeta_inv(a)
        digits = self._digits(u1)
        n = len(digits)
        for col, order in zip(self._keep, self._snf_orders):
            out.append(sum(digits[r] * self._V[r][col] for r in range(n)) % order)
        return tuple(out)

    def recombine(self, vec: Sequence[int]) -> LocalElement:
        x = self.field.one
        for g, e in zip(self.generators, vec):
            if e:
                x = x * g ** e
        return x

    def unit_digits(self, x: LocalElement) -> list[int]:
        """Public access to filtration digits of a principal unit."""
        return self._digits(x)


_PRESENTATIONS: dict[tuple[str, int], UnitGroupPresentation] = {}


def unit_presentation(field: LocalField, level: int) -> UnitGroupPresentation:
    key = (field.field_id, level)
    pres = _PRESENTATIONS.get(key)
    if pres is None or pres.field is not field:
        pres = UnitGroupPresentation(field, level)
        _PRESENTATIONS[key] = pres
    return pres


# ---------------------------------------------------------------------------
# square classes and Hilbert symbols

SQUARE_CLASS_LABELS = ("1", "u", "pi", "u*pi")


def square_class(x: LocalElement) -> str:
    """Label of x in M^x/(M^x)^2 among {1, u, pi, u*pi}."""
    v = x.valuation
    if v is BOTTOM:
        raise PrecisionExhausted("square class of an element indistinguishable from 0")
    if v >= x.field.N - 1:
        raise PrecisionExhausted("too few digits to certify the square class")
    u = x.unit_part()
    chi = x.field.residue.quadratic_character(u.residue())
    odd = v % 2
    if chi == 1:
        return "pi" if odd else "1"
    return "u*pi" if odd else "u"


def square_class_representative(field: LocalField, label: str) -> LocalElement:
    if label not in SQUARE_CLASS_LABELS:
        raise InputError(f"unknown square class {label!r}")
    x = field.one
    if "u" in label:
        x = x * field.nonresidue
    if "pi" in label:
        x = x * field.uniformizer
    return x


def is_square(x: LocalElement) -> bool:
    return square_class(x) == "1"


def hilbert_symbol(a: LocalElement, b: LocalElement) -> int:
    """Tame symbol: quadratic residue character of (-1)^{v(a)v(b)} a^{v(b)} b^{-v(a)}."""
    F = a.field
    if b.field is not F:
        raise InputError("elements of different fields")
    va, vb = a.valuation, b.valuation
    if va is BOTTOM or vb is BOTTOM:
        raise PrecisionExhausted("Hilbert symbol of an element indistinguishable from 0")
    if max(va, vb) >= F.N - 1:
        raise PrecisionExhausted("too few digits for the Hilbert symbol")
    ua = a.unit_part().residue()
    ub = b.unit_part().residue()
    R = F.residue
    c = R.mul(R.pow(ua, vb), R.pow(ub, -va))
    if (va * vb) % 2:
        c = R.mul(c, R.reduce([F.p - 1]))
    return R.quadratic_character(c)


def norm_class_indicator(x: LocalElement, quad) -> int:
    """+1 iff x is a norm from the quadratic etale algebra ``quad`` over x's field."""
    if getattr(quad, "is_split", False):
        if x.valuation is BOTTOM:
            raise PrecisionExhausted("element indistinguishable from 0")
        return 1
    return hilbert_symbol(x, quad.d_in(x.field))


# ---------------------------------------------------------------------------
# rational Hilbert symbols at every place of Q


def _rational_parts(a: Fraction, p: int) -> tuple[int, Fraction]:
    a = Fraction(a)
    v = vp(a.numerator, p) - vp(a.denominator, p) if a else 0
    return v, a / Fraction(p) ** v


def rational_hilbert_symbol(a, b, place) -> int:
    """(a, b)_v for nonzero rationals a, b at a prime v or at 'inf'.

    Odd primes use the tame formula, p = 2 the classical closed form
    (-1)^{e(u)e(w) + alpha*omega(w) + beta*omega(u)}.
    """
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise InputError("Hilbert symbol of zero")
    if place in ("inf", "∞", None):
        return -1 if (a < 0 and b < 0) else 1
    p = int(place)
    if p == 2:
        alpha, u = _rational_parts(a, 2)
        beta, w = _rational_parts(b, 2)
        u_int = (u.numerator * pow(u.denominator, -1, 8)) % 8
        w_int = (w.numerator * pow(w.denominator, -1, 8)) % 8

        def eps(t):
            return ((t - 1) // 2) % 2

        def om(t):
            return ((t * t - 1) // 8) % 2

        ex = eps(u_int) * eps(w_int) + alpha * om(w_int) + beta * om(u_int)
        return -1 if ex % 2 else 1
    va, ua = _rational_parts(a, p)
    vb, ub = _rational_parts(b, p)
    c = Fraction(-1) ** (va * vb) * ua ** vb / ub ** va
    c_int = (c.numerator * pow(c.denominator, -1, p)) % p
    return 1 if pow(c_int, (p - 1) // 2, p) == 1 else -1
