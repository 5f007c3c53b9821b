"""Finite-order characters of local fields, additive characters and Tate's
local epsilon factors.

A multiplicative character is stored as rotation numbers r_i in Q/Z on the
generators of a unit-group presentation; its value at x is exp(2 pi i sum l_i r_i)
where l is the discrete log of x.  Values are only turned into floats inside
Gauss sums.
"""

from __future__ import annotations

import cmath
import math
import random
import re
from fractions import Fraction
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np
from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_decomp

from .errors import (
    ConductorUncertified,
    InputError,
    InvalidCharacter,
    LevelMismatch,
    LevelTooLow,
    NonDualInput,
    NotASign,
    PrecisionExhausted,
)
from .padic import (
    BOTTOM,
    FieldMap,
    LocalElement,
    LocalField,
    UnitGroupPresentation,
    unit_presentation,
)

SIGN_TOLERANCE = 1e-6


def frac1(x: Fraction) -> Fraction:
    """Representative of x mod 1 in [0, 1)."""
    return x - math.floor(x)


def cexp(r: Fraction) -> complex:
    return cmath.exp(2j * math.pi * float(frac1(r)))


def _lcm_all(values: Sequence[int]) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, int(v))
    return out


# ---------------------------------------------------------------------------
# multiplicative characters


class MultiplicativeCharacter:
    """A character of M^x trivial on 1 + pi^k, given on the generators of
    ``UnitGroupPresentation(M, k)``."""

    def __init__(self, pres: UnitGroupPresentation, rotations: Sequence):
        gens = pres.generators
        if len(rotations) != len(gens):
            raise InvalidCharacter("one rotation per generator is required")
        rots = []
        for r, order in zip(rotations, pres.orders):
            r = Fraction(r)
            if order and (r * order).denominator != 1:
                raise InvalidCharacter(f"rotation {r} does not respect generator order {order}")
            rots.append(frac1(r))
        self.pres = pres
        self.rotations = tuple(rots)

    @property
    def field(self) -> LocalField:
        return self.pres.field

    @property
    def level(self) -> int:
        return self.pres.level

    def rotation(self, x: LocalElement) -> Fraction:
        logs = self.pres.discrete_log(x)
        return frac1(sum((l * r for l, r in zip(logs, self.rotations)), Fraction(0)))

    def __call__(self, x: LocalElement) -> complex:
        return cexp(self.rotation(x))

    def _check_same(self, other: "MultiplicativeCharacter") -> None:
        if other.pres is not self.pres:
            raise LevelMismatch("characters live on different presentations; relevel first")

    def __mul__(self, other: "MultiplicativeCharacter") -> "MultiplicativeCharacter":
        if self.level != other.level:
            k = max(self.level, other.level)
            return relevel(self, k) * relevel(other, k)
        self._check_same(other)
        return MultiplicativeCharacter(self.pres, [a + b for a, b in zip(self.rotations, other.rotations)])

    def inverse(self) -> "MultiplicativeCharacter":
        return MultiplicativeCharacter(self.pres, [-r for r in self.rotations])

    def __truediv__(self, other: "MultiplicativeCharacter") -> "MultiplicativeCharacter":
        return self * other.inverse()

    def __pow__(self, n: int) -> "MultiplicativeCharacter":
        return MultiplicativeCharacter(self.pres, [n * r for r in self.rotations])

    def is_trivial(self) -> bool:
        return all(r == 0 for r in self.rotations)

    def same_as(self, other: "MultiplicativeCharacter") -> bool:
        if self.field is not other.field:
            return False
        k = max(self.level, other.level)
        a, b = relevel(self, k), relevel(other, k)
        return a.rotations == b.rotations

    @cached_property
    def conductor(self) -> int:
        """Least a with the character trivial on 1 + pi^a."""
        top = 0
        for i, _, g in self.pres.filtration_generators:
            if self.rotation(g) != 0:
                top = max(top, i)
        if top:
            return top + 1
        if self.level >= 1 and self.rotation(self.field.teichmuller_generator) != 0:
            return 1
        return 0

    @property
    def order(self) -> int:
        return _lcm_all([r.denominator for r in self.rotations])

    def to_json(self) -> dict:
        return {
            "domain_field": self.field.field_id,
            "level": self.level,
            "images": [
                {"generator": name, "rotation": f"{r.numerator}/{r.denominator}"}
                for name, r in zip(self.pres.generator_names, self.rotations)
            ],
        }


def character_from_function(pres: UnitGroupPresentation, fn: Callable[[LocalElement], Fraction]) -> MultiplicativeCharacter:
    """Character with rotation fn(g) on every generator g (fn must be a character trivial on U_k)."""
    return MultiplicativeCharacter(pres, [fn(g) for g in pres.generators])


def _strip_precision(field_id: str) -> str:
    return re.sub(r";N=\d+", "", field_id)


def character_from_json(field: LocalField, obj: dict) -> MultiplicativeCharacter:
    # the precision suffix may differ; the field itself must agree
    given = obj.get("domain_field", field.field_id)
    if _strip_precision(given) != _strip_precision(field.field_id):
        raise InputError("character domain does not match the field")
    pres = unit_presentation(field, int(obj["level"]))
    by_name = {img["generator"]: Fraction(img["rotation"]) for img in obj["images"]}
    missing = [n for n in pres.generator_names if n not in by_name]
    if missing:
        raise InvalidCharacter(f"missing rotations for {missing}")
    return MultiplicativeCharacter(pres, [by_name[n] for n in pres.generator_names])


def trivial_character(field: LocalField, level: int = 0) -> MultiplicativeCharacter:
    pres = unit_presentation(field, level)
    return MultiplicativeCharacter(pres, [0] * len(pres.generators))


def filtration_elements(field: LocalField, start: int, stop: int) -> list[LocalElement]:
    out = []
    for i in range(start, stop):
        for t in range(field.f):
            c = [0] * field.degree
            c[t] = 1
            out.append(field.one + field.make(0, c) * field.pi_power(i))
    return out


def relevel(chi: MultiplicativeCharacter, k: int) -> MultiplicativeCharacter:
    """The same character on the presentation at level k.

    Raising the level is always possible; lowering it requires the character
    to be trivial on 1 + pi^k, else LevelTooLow.
    """
    if k == chi.level:
        return chi
    if k < chi.level:
        for g in filtration_elements(chi.field, max(k, 1), chi.level):
            if chi.rotation(g) != 0:
                raise LevelTooLow(f"character is not trivial on 1 + pi^{k}")
        if k == 0 and chi.rotation(chi.field.teichmuller_generator) != 0:
            raise LevelTooLow("character is ramified")
    return character_from_function(unit_presentation(chi.field, k), chi.rotation)


def pullback(
    chi: MultiplicativeCharacter,
    h: Callable[[LocalElement], LocalElement],
    source: LocalField,
    level: int,
    auto_level: Optional[int] = None,
) -> MultiplicativeCharacter:
    """chi o h on ``source`` at the given level.

    ``auto_level`` is a level from which h lands in the kernel of chi for
    structural reasons; between ``level`` and it triviality is verified.
    """
    fn = lambda x: chi.rotation(h(x))  # noqa: E731
    stop = auto_level if auto_level is not None else level + source.e + 1
    for g in filtration_elements(source, max(level, 1), stop):
        if fn(g) != 0:
            raise LevelTooLow(f"pullback is not trivial on 1 + pi^{level}")
    return character_from_function(unit_presentation(source, level), fn)


def pullback_map(chi: MultiplicativeCharacter, m: FieldMap) -> MultiplicativeCharacter:
    """chi o m for a field embedding m, at the smallest automatically valid level."""
    e_rel = m.target.e // m.source.e
    level = -(-chi.level // e_rel)
    return pullback(chi, m, m.source, level, auto_level=level)


def compose_norm(
    chi: MultiplicativeCharacter,
    norm: Callable[[LocalElement], LocalElement],
    source: LocalField,
    e_rel: int,
    level: Optional[int] = None,
) -> MultiplicativeCharacter:
    """chi o N for a norm map N: source -> chi.field of ramification e_rel."""
    k = e_rel * chi.level if level is None else max(level, e_rel * chi.level)
    return character_from_function(unit_presentation(source, k), lambda x: chi.rotation(norm(x)))


def is_conjugate_dual(chi: MultiplicativeCharacter, sigma: FieldMap) -> bool:
    return all(frac1(chi.rotation(sigma(g)) + chi.rotation(g)) == 0 for g in chi.pres.generators)


def character_analysis(
    chi: MultiplicativeCharacter,
    sigma: Optional[FieldMap] = None,
    subfield_map: Optional[FieldMap] = None,
) -> dict:
    """Conductor, conjugate-duality (when sigma is given), and the restriction
    through ``subfield_map`` (when given)."""
    a = chi.conductor
    if a > chi.level:
        raise LevelTooLow("conductor exceeds the level")
    out: dict = {"conductor": a}
    out["conjugate_dual"] = None if sigma is None else is_conjugate_dual(chi, sigma)
    out["restriction"] = None if subfield_map is None else pullback_map(chi, subfield_map)
    return out


class PairCharacter:
    """A character (chi1, chi2) of M x M."""

    def __init__(self, first: MultiplicativeCharacter, second: MultiplicativeCharacter):
        if first.field is not second.field:
            raise InvalidCharacter("pair entries must live on the same field")
        k = max(first.level, second.level)
        self.first = relevel(first, k)
        self.second = relevel(second, k)

    @property
    def field(self) -> LocalField:
        return self.first.field

    @property
    def level(self) -> int:
        return self.first.level

    def rotation(self, x) -> Fraction:
        return frac1(self.first.rotation(x[0]) + self.second.rotation(x[1]))

    def __mul__(self, other: "PairCharacter") -> "PairCharacter":
        return PairCharacter(self.first * other.first, self.second * other.second)

    def inverse(self) -> "PairCharacter":
        return PairCharacter(self.first.inverse(), self.second.inverse())

    def __truediv__(self, other: "PairCharacter") -> "PairCharacter":
        return self * other.inverse()

    def __pow__(self, n: int) -> "PairCharacter":
        return PairCharacter(self.first ** n, self.second ** n)

    def same_as(self, other: "PairCharacter") -> bool:
        return self.first.same_as(other.first) and self.second.same_as(other.second)

    def is_trivial(self) -> bool:
        return self.first.is_trivial() and self.second.is_trivial()

    @property
    def conductor(self) -> int:
        return max(self.first.conductor, self.second.conductor)

    def to_json(self) -> dict:
        return {"split": [self.first.to_json(), self.second.to_json()]}


def anti_pair(phi: MultiplicativeCharacter) -> PairCharacter:
    """(a, b) -> phi(a / b)."""
    return PairCharacter(phi, phi.inverse())


# ---------------------------------------------------------------------------
# solving for characters with prescribed values


def solve_character(
    pres: UnitGroupPresentation,
    constraints: Sequence[tuple[LocalElement, Fraction]],
    rng: Optional[random.Random] = None,
) -> MultiplicativeCharacter:
    """A character on ``pres`` with chi(x_k) = exp(2 pi i c_k) for every constraint.

    The unknown rotations are r_pi = x_0 / D and r_i = x_i / m_i for the
    torsion generators; the congruences become an integer linear system that
    is solved through its Smith normal form.  Free coordinates are 0, or
    random when ``rng`` is given.
    """
    orders = pres.orders
    n = len(orders)
    logs = [pres.discrete_log(x) for x, _ in constraints]
    targets = [Fraction(c) for _, c in constraints]
    tors = [m for m in orders[1:]]
    M0 = _lcm_all(tors + [c.denominator for c in targets])
    A0 = _lcm_all([abs(l[0]) for l in logs if l[0]])
    D = M0 * A0
    if rng is not None and not logs:
        D = M0 * (pres.field.q - 1)
    Mt = D
    dens = [D] + tors
    if not constraints:
        x = [rng.randrange(d) if rng else 0 for d in dens]
        return MultiplicativeCharacter(pres, [Fraction(xi, d) for xi, d in zip(x, dens)])
    K = len(constraints)
    rows = []
    rhs = []
    for l, c in zip(logs, targets):
        row = [l[i] * (Mt // dens[i]) for i in range(n)]
        row += [0] * K
        rows.append(row)
        rhs.append(int(c * Mt))
    for k in range(K):
        rows[k][n + k] = Mt
    C = Matrix(rows)
    S, U, V = smith_normal_decomp(C)
    b = U * Matrix(rhs)
    ncols = n + K
    z = [0] * ncols
    rank = 0
    for i in range(min(K, ncols)):
        s = int(S[i, i])
        if s == 0:
            break
        rank += 1
        if int(b[i]) % s:
            raise InvalidCharacter("no character satisfies the constraints at this level")
        z[i] = int(b[i]) // s
    for i in range(rank, K):
        if int(b[i]) != 0:
            raise InvalidCharacter("no character satisfies the constraints at this level")
    for j in range(rank, ncols):
        z[j] = rng.randrange(Mt) if rng else 0
    x = V * Matrix(z)
    chi = MultiplicativeCharacter(pres, [Fraction(int(x[i]), dens[i]) for i in range(n)])
    for (elem, c) in constraints:
        if frac1(chi.rotation(elem) - c) != 0:
            raise InvalidCharacter("constraint solution failed verification")
    return chi


def random_character(pres: UnitGroupPresentation, rng: random.Random) -> MultiplicativeCharacter:
    return solve_character(pres, [], rng)


# ---------------------------------------------------------------------------
# norm-one characters


class NormOneCharacter:
    """A character alpha of L^1 for one component L_j = K (x) F_j, stored as
    alpha_L = alpha o j on L^x (trivial on F_j^x).

    Field components carry a MultiplicativeCharacter of L; split components a
    character phi of F_j with alpha_L(a, b) = phi(a / b).
    """

    def __init__(self, component, lchar):
        self.component = component
        if component.is_split:
            if not isinstance(lchar, MultiplicativeCharacter) or lchar.field is not component.field:
                raise InvalidCharacter("split component needs a character of F_j")
            self.phi = lchar
            self.lchar = anti_pair(lchar)
        else:
            if not isinstance(lchar, MultiplicativeCharacter) or lchar.field is not component.L:
                raise InvalidCharacter("field component needs a character of L_j")
            for g in unit_presentation(component.field, _source_level(lchar, component.embed_F)).generators:
                if lchar.rotation(component.embed_F(g)) != 0:
                    raise InvalidCharacter("alpha_L must be trivial on E^x")
            self.lchar = lchar

    @classmethod
    def from_character(cls, component, phi: MultiplicativeCharacter) -> "NormOneCharacter":
        """alpha with alpha_L = phi / (phi o sigma) (field) or phi(a/b) (split)."""
        if component.is_split:
            return cls(component, phi)
        conj = character_from_function(phi.pres, lambda x: phi.rotation(component.sigma(x)))
        return cls(component, phi / conj)

    @property
    def level(self) -> int:
        return self.lchar.level

    def base_change(self):
        """alpha_L = alpha o j, conjugate-dual by construction."""
        return self.lchar

    def rotation(self, z) -> Fraction:
        """alpha(z) for z in L^1, via z = x / conj(x)."""
        c = self.component
        if c.is_split:
            return self.phi.rotation(z[0])
        x = c.L.one + z
        if x.valuation is BOTTOM or x.valuation >= c.L.N // 2:
            # z is -1 up to precision: use a trace-zero element
            x = c.embed_K(c.base.sqrt_d0)
        return self.lchar.rotation(x)

    def on_K(self):
        """The K^x-character alpha_L o iota_K (trivial on F^x)."""
        c = self.component
        if c.is_split:
            if c.base.is_split:
                psi = pullback_map(self.phi, c.from_F)
                return anti_pair(psi)
            conj = character_from_function(self.phi.pres, lambda x: self.phi.rotation(c.base.conj(x)))
            return self.phi / conj
        return pullback_map(self.lchar, c.embed_K)

    def times(self, xi_L) -> "NormOneCharacter":
        """alpha twisted by a character of L^x trivial on E^x."""
        if self.component.is_split:
            return NormOneCharacter(self.component, self.phi * xi_L)
        return NormOneCharacter(self.component, self.lchar * xi_L)

    def same_as(self, other: "NormOneCharacter") -> bool:
        if self.component.is_split:
            return self.phi.same_as(other.phi)
        return self.lchar.same_as(other.lchar)

    def to_json(self) -> dict:
        if self.component.is_split:
            return {"component": self.component.label, "split_phi": self.phi.to_json()}
        return {"component": self.component.label, "alpha_L": self.lchar.to_json()}


def _source_level(chi: MultiplicativeCharacter, m: FieldMap) -> int:
    e_rel = m.target.e // m.source.e
    return -(-chi.level // e_rel)


def base_change(alpha: NormOneCharacter):
    return alpha.base_change()


# ---------------------------------------------------------------------------
# additive characters


class AdditiveCharacter:
    """psi(x) = exp(2 pi i {tr_{M/Q_p}(w x)}).

    ``level`` is the least m with psi trivial on pi^m O; Tate's exponent
    n(psi) (largest n with psi trivial on pi^{-n} O) is -level.
    """

    def __init__(self, field: LocalField, w: LocalElement):
        if w.field is not field:
            raise InputError("twisting element lives in another field")
        if w.valuation is BOTTOM:
            raise InputError("additive character must be nontrivial")
        self.field = field
        self.w = w

    def rotation(self, x: LocalElement) -> Fraction:
        return frac1((self.w * x).trace_qp())

    def __call__(self, x: LocalElement) -> complex:
        return cexp(self.rotation(x))

    @cached_property
    def level(self) -> int:
        F = self.field
        m = -self.w.valuation - 2 * F.e * F.degree - 2
        while True:
            z = self.w * F.pi_power(m)
            if all(frac1((z * _basis(F, i)).trace_qp()) == 0 for i in range(F.degree)):
                return m
            m += 1

    @property
    def n_psi(self) -> int:
        return -self.level

    def twisted(self, a: LocalElement) -> "AdditiveCharacter":
        """x -> psi(a x)."""
        return AdditiveCharacter(self.field, self.w * a)

    def to_json(self) -> dict:
        return {"field": self.field.field_id, "level": self.level}


def _basis(F: LocalField, i: int) -> LocalElement:
    c = [0] * F.degree
    c[i] = 1
    return F.make(0, c)


def standard_additive(field: LocalField) -> AdditiveCharacter:
    return AdditiveCharacter(field, field.one)


def psi_delta(K, component=None, psi_scale=1) -> AdditiveCharacter:
    """psi_delta o tr_{L_j/K} on L_j (or psi_delta on K when component is None),
    for psi(x) = e(psi_scale * x) on F."""
    if K.is_split:
        raise InputError("split K: the epsilon factor is 1 by convention")
    w = K.delta * K.from_F(K.F.element(Fraction(psi_scale)))
    if component is None:
        return AdditiveCharacter(K.K, w)
    if component.is_split:
        raise InputError("split component: the epsilon factor is 1 by convention")
    return AdditiveCharacter(component.L, component.embed_K(w))


# ---------------------------------------------------------------------------
# epsilon factors


def tate_epsilon(chi: MultiplicativeCharacter, psi: AdditiveCharacter) -> complex:
    """Tate's epsilon(1/2, chi, psi).

    Unramified: chi(pi)^{n(psi)}.  Ramified with conductor a:
    q^{-a/2} sum_{u in (O/pi^a)^x} chi^{-1}(u/gamma) psi(u/gamma), gamma = pi^{a + n(psi)}.
    The sum runs over u = zeta^i * prod (1 + y^t pi^l)^{c}, which enumerates
    (O/pi^a)^x exactly once, with coordinates propagated by integer matrices.
    """
    F = chi.field
    if psi.field is not F:
        raise InputError("characters live on different fields")
    a = chi.conductor
    if a > chi.level:
        raise ConductorUncertified("conductor exceeds the certified level")
    ell = psi.level
    if a == 0:
        return cexp(-ell * chi.rotation(F.uniformizer))
    if F.N + ell - a < 2 * F.e + 2 or a - ell >= F.N - 1:
        raise PrecisionExhausted("field precision too small for this Gauss sum")
    gamma = F.pi_power(a - ell)
    w = psi.w * F.pi_power(ell - a)
    d = F.degree
    e = F.e
    mods = np.array([F.p ** max(0, -(-(a - (i // F.f)) // e)) for i in range(d)], dtype=object)
    T = [(w * _basis(F, i)).trace_qp() for i in range(d)]
    Dpsi = _lcm_all([t.denominator for t in T])
    Tn = [int(frac1(t) * Dpsi) for t in T]

    pres = chi.pres
    zeta = F.teichmuller_generator
    r_zeta = chi.rotation(zeta)
    gens = [(g, chi.rotation(g)) for (i, t, g) in pres.filtration_generators if i < a]
    Dchi = _lcm_all([r_zeta.denominator] + [r.denominator for _, r in gens])

    def coords(x: LocalElement) -> list[int]:
        if x.coeffs is None:
            return [0] * d
        m = F.p ** x.scale
        return [(c * m) % int(md) for c, md in zip(x.coeffs, mods)]

    big = int(max(mods)) ** 2 * d >= 2 ** 62 or int(max(mods)) * Dpsi * d >= 2 ** 62
    dtype = object if big else np.int64
    modv = np.array([int(m) for m in mods], dtype=dtype)
    vecs = []
    rots = []
    z = F.one
    for i in range(F.q - 1):
        vecs.append(coords(z))
        rots.append(int(r_zeta * i * Dchi) % Dchi)
        z = z * zeta
    V = np.array(vecs, dtype=dtype)
    R = np.array(rots, dtype=dtype)
    for g, rg in gens:
        M = np.array(
            [[int(v) % int(mods[i]) for v in row] for i, row in enumerate(F._mult_matrix(list(g.coeffs)))],
            dtype=dtype,
        )
        step = int(rg * Dchi) % Dchi
        parts_v = [V]
        parts_r = [R]
        cur_v, cur_r = V, R
        for _ in range(F.p - 1):
            cur_v = (cur_v @ M.T) % modv
            cur_r = (cur_r + step) % Dchi
            parts_v.append(cur_v)
            parts_r.append(cur_r)
        V = np.concatenate(parts_v)
        R = np.concatenate(parts_r)
    psi_num = (V @ np.array(Tn, dtype=dtype)) % Dpsi
    angle = (np.array(psi_num, dtype=float) / Dpsi) - (np.array(R, dtype=float) / Dchi)
    total = np.exp(2j * np.pi * angle).sum()
    value = total * cexp(chi.rotation(gamma)) / math.sqrt(F.q) ** a
    return complex(value)


def archimedean_epsilon(m, s: int) -> int:
    """epsilon(1/2, (z/|z|)^m, psi_delta) on C with s = sign of Im(delta).

    Normalization: psi_R(x) = exp(-2 pi i x) at the real place, which gives
    s^m for m >= 0 and (-s)^m for m < 0; epsilon(0, .) = 1 and flipping delta
    multiplies by (-1)^m.
    """
    if s not in (1, -1):
        raise InputError("s must be +1 or -1")
    if isinstance(m, Fraction):
        if m.denominator != 1:
            raise NonDualInput("non-integral exponent: not a unitary conjugate-dual character")
        m = int(m)
    if not isinstance(m, int):
        raise NonDualInput("exponent must be an integer")
    return s ** m if m >= 0 else (-s) ** (-m)


def sign_of(value: complex, tol: float = SIGN_TOLERANCE) -> int:
    if abs(value.imag) > tol or abs(abs(value.real) - 1) > tol:
        raise NotASign(f"epsilon value {value} is not a sign")
    return 1 if value.real > 0 else -1


# ---------------------------------------------------------------------------
# characters of K^x and the epsilon sign vector


def k_character_one(K, level: int = 0):
    """The trivial character of K^x (a pair of characters of Q_p when K is split)."""
    if K.is_split:
        t = trivial_character(K.F, level)
        return PairCharacter(t, t)
    return trivial_character(K.K, level)


def on_F(K, chi) -> MultiplicativeCharacter:
    """Restriction of a K^x-character to F^x = Q_p^x."""
    if K.is_split:
        return chi.first * chi.second
    return pullback_map(chi, K.from_F)


def omega_character(K, level: int = 1) -> MultiplicativeCharacter:
    """omega_{K/F} as a character of Q_p^x."""
    pres = unit_presentation(K.F, max(level, 1))
    return character_from_function(pres, lambda g: Fraction(0 if K.omega(g) == 1 else 1, 2))


def check_splitting_character(K, chi, n: int) -> None:
    """Raise unless chi|_{F^x} = omega_{K/F}^n."""
    from .errors import SplittingCharacterInvalid

    if K.is_split:
        if not isinstance(chi, PairCharacter):
            raise SplittingCharacterInvalid("K is split: expected a pair of characters of Q_p")
        if not on_F(K, chi).is_trivial():
            raise SplittingCharacterInvalid("restriction to F^x must be trivial when K is split")
        return
    if not isinstance(chi, MultiplicativeCharacter) or chi.field is not K.K:
        raise SplittingCharacterInvalid("expected a character of K^x")
    r = on_F(K, chi)
    target = omega_character(K, r.level) ** n
    if not r.same_as(target):
        raise SplittingCharacterInvalid(f"restriction to F^x is not omega^{n}")


def k_character_from_json(K, obj: dict):
    if K.is_split:
        a, b = obj["split"]
        return PairCharacter(character_from_json(K.F, a), character_from_json(K.F, b))
    return character_from_json(K.K, obj)


def component_character(component, alpha: NormOneCharacter, chi_W) -> MultiplicativeCharacter:
    """alpha_L * chi_W^{-1} o N_{L_j/K} on a field component."""
    if component.is_split:
        raise InputError("split component")
    if component.tau is None:
        return alpha.lchar / chi_W
    norm = compose_norm(chi_W, component.norm_to_K, component.L, component.e_over_K)
    return alpha.lchar / norm


def epsilon_sign_vector(pair, alphas: Sequence[NormOneCharacter], chi_W, psi_scale=1):
    """Componentwise root numbers of alpha_L * chi_W^{-1} o N_{L/K} against
    psi_delta o tr_{L/K}, with psi(x) = e(psi_scale * x) on F.

    Returns (SignVector, raw complex values); split components give exactly 1.
    """
    from .etale import SignVector

    K = pair.K
    if len(alphas) != len(pair.components):
        raise InputError("one norm-one character per component is required")
    values = []
    for comp, alpha in zip(pair.components, alphas):
        if alpha.component.label != comp.label or alpha.component.base is not K:
            raise InputError("character attached to the wrong component")
        if comp.is_split:
            values.append(complex(1.0))
            continue
        chi = component_character(comp, alpha, chi_W)
        values.append(tate_epsilon(chi, psi_delta(K, comp, psi_scale)))
    signs = tuple(sign_of(v) for v in values)
    split = tuple(c.is_split for c in pair.components)
    return SignVector(signs, split), values
