"""Global layer over F = Q with K = Q(sqrt d) imaginary quadratic of class
number one and E = Q^n.

Hecke characters are described by their infinity type (z/|z|)^w together with
unit characters at the primes of the modulus.  Moduli are supported on primes
that are inert or ramified in K; at such primes every local datum of a
unitary Hecke character (including its value on a uniformizer) is a root of
unity, so localizations are exact MultiplicativeCharacters.
"""

from __future__ import annotations

import cmath
import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from sympy import factorint, primerange

from .characters import (
    MultiplicativeCharacter,
    NormOneCharacter,
    archimedean_epsilon,
    character_from_function,
    epsilon_sign_vector,
    frac1,
    relevel,
    solve_character,
    unit_presentation,
)
from .errors import (
    BadSetIncomplete,
    ConvergenceFailure,
    EvenPlaceRamifiedCharacter,
    InputError,
    LValueMissing,
    NotSelfDual,
    ParityObstruction,
    SearchExhausted,
    UnsupportedField,
)
from .etale import BaseQuadratic, EtaleAlgebra, EtalePair
from .padic import rational_hilbert_symbol

CLASS_NUMBER_ONE = (-3, -7, -11, -19, -43, -67, -163)
INF = "inf"
GLOBAL_PRECISION = 12
GOOD_PLACE_SAMPLE = 20


def kronecker(d: int, p: int) -> int:
    """(d / p) for a prime p, with p = 2 handled through d mod 8."""
    if p == 2:
        if d % 2 == 0:
            return 0
        return 1 if d % 8 in (1, 7) else -1
    r = d % p
    if r == 0:
        return 0
    return 1 if pow(r, (p - 1) // 2, p) == 1 else -1


def place_decomposition(p, d: int) -> str:
    """split / inert / ramified for a prime p, or 'C/R' at infinity."""
    if p in (INF, "∞"):
        return "C/R" if d < 0 else "R x R"
    k = kronecker(d, int(p))
    return {1: "split", -1: "inert", 0: "ramified"}[k]


# ---------------------------------------------------------------------------
# elements of K = Q(sqrt d): pairs (a, b) meaning a + b sqrt(d)


@dataclass(frozen=True)
class KElement:
    a: Fraction
    b: Fraction
    d: int

    def __mul__(self, other: "KElement") -> "KElement":
        return KElement(self.a * other.a + self.d * self.b * other.b, self.a * other.b + self.b * other.a, self.d)

    def conj(self) -> "KElement":
        return KElement(self.a, -self.b, self.d)

    @property
    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def complex(self) -> complex:
        return complex(float(self.a), float(self.b) * math.sqrt(-self.d))

    def arg_turns(self) -> float:
        """arg(x) / 2 pi for the embedding sqrt(d) -> i sqrt(|d|)."""
        return cmath.phase(self.complex()) / (2 * math.pi)


def k_element(d: int, a, b=0) -> KElement:
    return KElement(Fraction(a), Fraction(b), d)


def units(d: int) -> list[KElement]:
    if d == -3:
        z = k_element(d, Fraction(1, 2), Fraction(1, 2))
        out = [k_element(d, 1)]
        for _ in range(5):
            out.append(out[-1] * z)
        return out
    return [k_element(d, 1), k_element(d, -1)]


def prime_generator(d: int, p: int) -> KElement:
    """A generator of a prime of O_K above p (p itself when p is inert)."""
    kind = place_decomposition(p, d)
    if kind == "inert":
        return k_element(d, p)
    # search (x + y sqrt d) / 2 of norm p
    bound = int(2 * math.isqrt(4 * p) + 4)
    for y in range(1, bound):
        for x in range(0, bound):
            if (x - y) % 2:
                continue
            if x * x - d * y * y == 4 * p:
                return k_element(d, Fraction(x, 2), Fraction(y, 2))
    raise InputError(f"no element of norm {p}; class number one expected")


def check_setup_field(d: int) -> None:
    if d not in CLASS_NUMBER_ONE:
        raise UnsupportedField(f"d = {d} is not in the supported class-number-one list {CLASS_NUMBER_ONE}")


@dataclass
class LocalPlace:
    """K_p with the embedding of K into it (sqrt d -> root)."""

    p: int
    base: BaseQuadratic
    root: object  # LocalElement of K_p, or a Q_p element r with sqrt d -> (r, -r)

    def image(self, x: KElement):
        B = self.base
        F = B.F
        a, b = F.element(x.a), F.element(x.b)
        if B.is_split:
            r = self.root
            return (a + b * r, a - b * r)
        return B.from_F(a) + B.from_F(b) * self.root


_PLACES: dict[tuple[int, int, Fraction, int], LocalPlace] = {}


def local_place(d: int, p: int, t=1, precision: int = GLOBAL_PRECISION) -> LocalPlace:
    t = Fraction(t)
    key = (d, p, t, precision)
    pl = _PLACES.get(key)
    if pl is None:
        B = BaseQuadratic(p, d, t, precision)
        # delta = t sqrt(d), so sqrt(d) = delta / t
        tinv = B.F.element(1 / t)
        if B.is_split:
            root = B.delta[0] * tinv
        else:
            root = B.delta * B.from_F(tinv)
        pl = LocalPlace(p, B, root)
        _PLACES[key] = pl
    return pl


# ---------------------------------------------------------------------------
# Hecke characters


class GlobalHeckeCharacter:
    """A unitary Hecke character of K with class number one.

    chi_inf(z) = (z/|z|)^w; ``unit_data`` maps each prime p of the modulus
    to (k, rotations) giving the local character on O_{K_p}^x / (1 + pi^k)
    through the unit generators of its presentation.  On principal ideals
    chi((alpha)) = chi_inf(alpha)^{-1} * prod_p chi_p(alpha)^{-1}.
    """

    def __init__(self, d: int, w: int, unit_data: dict, restriction_power: Optional[int] = None):
        check_setup_field(d)
        self.d = d
        self.w = int(w)
        self.unit_data = {}
        for p, (k, rots) in sorted(unit_data.items()):
            p = int(p)
            if p == 2:
                raise EvenPlaceRamifiedCharacter("characters must be unramified at 2")
            if place_decomposition(p, d) == "split":
                raise InputError(f"modulus supported at split prime {p}: only inert or ramified primes are supported")
            pl = local_place(d, p)
            pres = unit_presentation(pl.base.K, int(k))
            rots = [Fraction(r) for r in rots]
            if len(rots) != len(pres.generators) - 1:
                raise InputError(f"expected {len(pres.generators) - 1} unit rotations at {p}")
            self.unit_data[p] = (int(k), tuple(rots))
        self._check_unit_invariance()
        self.restriction_power = restriction_power

    # -- structure ------------------------------------------------------------

    @property
    def modulus_primes(self) -> list[int]:
        return [p for p, (k, _) in self.unit_data.items() if k > 0]

    def modulus_norm(self) -> int:
        out = 1
        for p, (k, _) in self.unit_data.items():
            f = 2 if place_decomposition(p, self.d) == "inert" else 1
            out *= p ** (f * k)
        return out

    def unit_character(self, p: int) -> MultiplicativeCharacter:
        k, rots = self.unit_data[p]
        pres = unit_presentation(local_place(self.d, p).base.K, k)
        return MultiplicativeCharacter(pres, [Fraction(0)] + list(rots))

    def primitive(self) -> "GlobalHeckeCharacter":
        """The same character with each local modulus lowered to its conductor."""
        data = {}
        for p in self.unit_data:
            chi = self.unit_character(p)
            a = chi.conductor
            if a > 0:
                data[p] = (a, list(relevel(chi, a).rotations[1:]))
        return GlobalHeckeCharacter(self.d, self.w, data, self.restriction_power)

    def finite_unit_rotation(self, x: KElement) -> Fraction:
        """sum over the modulus of chi_p(x) for x prime to the modulus."""
        total = Fraction(0)
        for p in self.unit_data:
            pl = local_place(self.d, p)
            y = pl.image(x)
            if y.valuation != 0:
                raise InputError("element not prime to the modulus")
            total += self.unit_character(p).rotation(y)
        return frac1(total)

    def _check_unit_invariance(self) -> None:
        for u in units(self.d):
            r = Fraction(self.w) * Fraction(round(u.arg_turns() * 12), 12) + self.finite_unit_rotation(u)
            if frac1(r) != 0:
                raise InputError("character is not trivial on the global units")

    def ideal_rotation(self, x: KElement) -> float:
        """chi((x)) as a rotation (float, since arg(x) is transcendental in general)."""
        return (-self.w * x.arg_turns() - float(self.finite_unit_rotation(x))) % 1.0

    def ideal_rotation_exact(self, x: KElement) -> Fraction:
        """chi((x)) for x with x/|x| a root of unity (rational, p inert, sqrt d)."""
        turns = Fraction(round(x.arg_turns() * 24), 24)
        if abs(float(turns) - x.arg_turns()) > 1e-12 and abs(float(turns) - x.arg_turns() - 1) > 1e-12:
            raise InputError("argument is not a root of unity")
        return frac1(-self.w * turns - self.finite_unit_rotation(x))

    # -- algebra ---------------------------------------------------------------

    def _common(self, other: "GlobalHeckeCharacter"):
        if other.d != self.d:
            raise InputError("characters of different fields")
        primes = sorted(set(self.unit_data) | set(other.unit_data))
        out = {}
        for p in primes:
            k = max(self.unit_data.get(p, (0, ()))[0], other.unit_data.get(p, (0, ()))[0])
            a = relevel(self.unit_character(p), k) if p in self.unit_data else None
            b = relevel(other.unit_character(p), k) if p in other.unit_data else None
            out[p] = (k, a, b)
        return out

    def __mul__(self, other: "GlobalHeckeCharacter") -> "GlobalHeckeCharacter":
        data = {}
        for p, (k, a, b) in self._common(other).items():
            rots = [Fraction(0)] * (len(unit_presentation(local_place(self.d, p).base.K, k).generators) - 1)
            for c in (a, b):
                if c is not None:
                    rots = [x + y for x, y in zip(rots, c.rotations[1:])]
            data[p] = (k, rots)
        rp = None
        if self.restriction_power is not None and other.restriction_power is not None:
            rp = self.restriction_power + other.restriction_power
        return GlobalHeckeCharacter(self.d, self.w + other.w, data, rp)

    def inverse(self) -> "GlobalHeckeCharacter":
        data = {p: (k, [-r for r in rots]) for p, (k, rots) in self.unit_data.items()}
        rp = None if self.restriction_power is None else -self.restriction_power
        return GlobalHeckeCharacter(self.d, -self.w, data, rp)

    def __truediv__(self, other):
        return self * other.inverse()

    def conjugate(self) -> "GlobalHeckeCharacter":
        """chi o sigma."""
        data = {}
        for p, (k, rots) in self.unit_data.items():
            pl = local_place(self.d, p)
            chi = self.unit_character(p)
            conj = character_from_function(chi.pres, lambda x: chi.rotation(pl.base.conj(x)))
            data[p] = (k, list(conj.rotations[1:]))
        return GlobalHeckeCharacter(self.d, -self.w, data, self.restriction_power)

    def same_as(self, other: "GlobalHeckeCharacter") -> bool:
        if self.d != other.d or self.w != other.w:
            return False
        for p, (k, a, b) in self._common(other).items():
            n = len(unit_presentation(local_place(self.d, p).base.K, k).generators) - 1
            ra = a.rotations[1:] if a is not None else (Fraction(0),) * n
            rb = b.rotations[1:] if b is not None else (Fraction(0),) * n
            if tuple(ra) != tuple(rb):
                return False
        return True

    def is_conjugate_symplectic(self, sample: int = 12) -> bool:
        """Restriction to A_Q^x equals omega_{K/Q}, checked at infinity, on
        Z_p^x at the modulus, and on a sample of rational primes."""
        return self._restriction_is(1, sample)

    def is_conjugate_orthogonal(self, sample: int = 12) -> bool:
        """Restriction to A_Q^x is trivial (the base change of a norm-one character)."""
        return self._restriction_is(0, sample)

    def _restriction_is(self, power: int, sample: int) -> bool:
        if (self.w - power) % 2:
            return False
        for p in self.unit_data:
            pl = local_place(self.d, p)
            chi = self.unit_character(p)
            for g in unit_presentation(pl.base.F, max(1, self.unit_data[p][0])).generators[1:]:
                want = Fraction(0 if pl.base.omega(g) ** power == 1 else 1, 2)
                if chi.rotation(pl.base.from_F(g)) != want:
                    return False
        count = 0
        for ell in primerange(3, 10 ** 4):
            if ell in self.unit_data or (-self.d) % ell == 0:
                continue
            want = Fraction(0 if kronecker(self.d, ell) ** power == 1 else 1, 2)
            if self.ideal_rotation_exact(k_element(self.d, ell)) != want:
                return False
            count += 1
            if count >= sample:
                break
        return True

    # -- localization -------------------------------------------------------------

    def localize(self, place, t=1, precision: int = GLOBAL_PRECISION):
        """Local component at a prime (a MultiplicativeCharacter of K_p, or for
        split p a pair of uniformizer angles) or the exponent w at infinity."""
        if place in (INF, "∞"):
            return {"place": INF, "w": self.w}
        p = int(place)
        kind = place_decomposition(p, self.d)
        if p == 2:
            if kind == "split":
                return {"place": 2, "kind": kind, "angles": self._split_angles(2)}
            return {"place": 2, "kind": kind, "uniformizer_rotation": self.ideal_rotation_exact(k_element(self.d, 2))}
        pl = local_place(self.d, p, t, precision)
        if kind == "split":
            if p in self.unit_data:
                raise InputError("split primes in the modulus are not supported")
            return {"place": p, "kind": kind, "angles": self._split_angles(p)}
        K_p = pl.base.K
        pi_glob = prime_generator(self.d, p)
        if p in self.unit_data:
            k, rots = self.unit_data[p]
            unit_chi = self.unit_character(p)
            # 1 = chi(pi_glob) = chi_inf(pi) * chi_p(pi) * prod_{other q | m} chi_q(pi)
            other = Fraction(0)
            for q in self.unit_data:
                if q != p:
                    other += self.unit_character(q).rotation(local_place(self.d, q).image(pi_glob))
            turns = Fraction(round(pi_glob.arg_turns() * 24), 24)
            target = frac1(-self.w * turns - other)
            img = pl.image(pi_glob)
            u = img * K_p.pi_power(-img.valuation)
            r_pi = frac1((target - unit_chi.rotation(u)) / img.valuation)
            if img.valuation != 1:
                raise InputError("prime generator is not a local uniformizer")
            pres = unit_presentation(K_p, k)
            return MultiplicativeCharacter(pres, [r_pi] + list(rots))
        pres = unit_presentation(K_p, 0)
        img = pl.image(pi_glob)
        return MultiplicativeCharacter(pres, [self.ideal_rotation_exact(pi_glob) / img.valuation])

    def _split_angles(self, p: int) -> tuple[float, float]:
        g = prime_generator(self.d, p)
        a = self.ideal_rotation(g)
        b = self.ideal_rotation(g.conj())
        if p != 2:
            pl = local_place(self.d, p)
            if pl.image(g)[0].valuation == 0:
                a, b = b, a
        return (a, b)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "w": self.w,
            "unit_data": {
                str(p): {"level": k, "rotations": [f"{r.numerator}/{r.denominator}" for r in rots]}
                for p, (k, rots) in self.unit_data.items()
            },
        }


def hecke_from_json(obj: dict) -> GlobalHeckeCharacter:
    data = {int(p): (int(v["level"]), [Fraction(r) for r in v["rotations"]]) for p, v in obj.get("unit_data", {}).items()}
    return GlobalHeckeCharacter(int(obj["d"]), int(obj["w"]), data)


def trivial_hecke(d: int) -> GlobalHeckeCharacter:
    return GlobalHeckeCharacter(d, 0, {})


def random_hecke_character(
    d: int,
    modulus: dict,
    w: int,
    rng: random.Random,
    restriction_power: int = 1,
) -> GlobalHeckeCharacter:
    """A random Hecke character with the given modulus exponents {p: k}, infinity
    type w and restriction omega^power to A_Q^x (power 1: conjugate-symplectic,
    power 0: conjugate-orthogonal).  Unit invariance is solved at the last prime."""
    check_setup_field(d)
    if (w - restriction_power) % 2:
        raise InputError("infinity type parity does not match the restriction")
    primes = sorted(modulus)
    if not primes and len(units(d)) > 2 and w % 6:
        raise InputError("d = -3 needs a modulus for this infinity type")
    data = {}
    unit_rot = {u: Fraction(w) * Fraction(round(u.arg_turns() * 12), 12) for u in units(d)}
    for idx, p in enumerate(primes):
        k = modulus[p]
        pl = local_place(d, p)
        K_p = pl.base.K
        pres = unit_presentation(K_p, k)
        cons = [
            (pl.base.from_F(g), Fraction(0 if pl.base.omega(g) ** restriction_power == 1 else 1, 2))
            for g in unit_presentation(pl.base.F, max(1, k)).generators[1:]
        ]
        last = idx == len(primes) - 1
        if last:
            cons += [(pl.image(u), frac1(-unit_rot[u])) for u in units(d)]
        cons.append((K_p.uniformizer, Fraction(0)))
        chi = solve_character(pres, cons, rng)
        data[p] = (k, list(chi.rotations[1:]))
        if not last:
            for u in units(d):
                unit_rot[u] += chi.rotation(pl.image(u))
    return GlobalHeckeCharacter(d, w, data, restriction_power)


def is_primitive(chi: GlobalHeckeCharacter) -> bool:
    for p, (k, _) in chi.unit_data.items():
        if chi.unit_character(p).conductor != k:
            return False
    return True


# ---------------------------------------------------------------------------
# Hilbert reciprocity and the lambda search


def product_formula_check(lam: Sequence, d: int) -> bool:
    """prod_v (lambda_j, d)_v = 1 for every component, over every place."""
    for x in lam:
        x = Fraction(x)
        if x == 0:
            raise InputError("lambda entries must be nonzero")
        prod = 1
        for v in relevant_places([x, d]):
            prod *= rational_hilbert_symbol(x, d, v)
        if prod != 1:
            return False
    return True


def relevant_places(values: Sequence) -> list:
    """Primes dividing numerators or denominators of the values, 2, and infinity."""
    primes = {2}
    for v in values:
        v = Fraction(v)
        for n in (v.numerator, v.denominator):
            primes.update(factorint(abs(n)).keys())
    primes.discard(1)
    return sorted(primes) + [INF]


def _place_key(v):
    return INF if v in (INF, "∞", "inf") else int(v)


def find_lambda(targets: Sequence[dict], d: int, search_bound: int = 50, max_factors: int = 4) -> list[Fraction]:
    """Rational lambda_j with (lambda_j, d)_v equal to the requested signs at the
    listed places and +1 everywhere else."""
    out = []
    for tgt in targets:
        tgt = {_place_key(k): int(v) for k, v in tgt.items()}
        for v, s in tgt.items():
            if s not in (1, -1):
                raise InputError("targets must be +1 or -1")
        if math.prod(tgt.values()) != 1:
            raise ParityObstruction("the requested signs have product -1 over all places")
        for v, s in tgt.items():
            if s == -1 and v != INF and place_decomposition(v, d) == "split":
                raise InputError(f"d is a square at {v}: the symbol there is always +1")
        need = sorted(v for v, s in tgt.items() if s == -1 and v != INF)
        sign = -1 if tgt.get(INF, 1) == -1 else 1
        pool = [q for q in primerange(2, search_bound + 1)]
        pool = need + [q for q in pool if q not in need]
        found = None
        for extra in range(0, max_factors + 1):
            for combo in itertools.combinations([q for q in pool if q not in need], extra):
                for base in (need,):
                    lam = Fraction(sign * math.prod(base) * math.prod(combo))
                    if _lambda_matches(lam, d, tgt):
                        found = lam
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            raise SearchExhausted(f"no lambda found with primes <= {search_bound}; enlarge the bound")
        out.append(found)
    return out


def _lambda_matches(lam: Fraction, d: int, tgt: dict) -> bool:
    places = set(relevant_places([lam, d])) | set(tgt)
    for v in places:
        if rational_hilbert_symbol(lam, d, v) != tgt.get(v, 1):
            return False
    return True


# ---------------------------------------------------------------------------
# the global decision


@dataclass
class GlobalSetup:
    d: int
    n: int
    mu: GlobalHeckeCharacter
    delta_t: Fraction = Fraction(1)

    def validate(self) -> None:
        check_setup_field(self.d)
        if self.n < 1:
            raise InputError("n must be positive")
        if self.mu.d != self.d:
            raise InputError("mu lives on another field")
        if not self.mu.is_conjugate_symplectic():
            raise InputError("mu must restrict to omega_{K/Q} on A_Q^x")
        if self.delta_t == 0:
            raise InputError("delta_t must be nonzero")

    def to_json(self) -> dict:
        return {"d": self.d, "n": self.n, "mu": self.mu.to_json(), "delta_t": str(self.delta_t)}


@dataclass
class PlaceReport:
    place: object
    decomposition: str
    omega: list
    epsilon: list
    satisfied: bool

    def to_json(self) -> dict:
        return {
            "place": str(self.place),
            "decomposition": self.decomposition,
            "omega": list(self.omega),
            "epsilon": list(self.epsilon),
            "satisfied": self.satisfied,
        }


def bad_places(setup: GlobalSetup, alphas, beta, lam) -> list:
    primes = set()
    primes.update(factorint(-setup.d).keys())
    for chi in [setup.mu, beta, *alphas]:
        primes.update(chi.unit_data.keys())
    for x in list(lam) + [setup.delta_t]:
        x = Fraction(x)
        for m in (x.numerator, x.denominator):
            primes.update(factorint(abs(m)).keys())
    primes.discard(1)
    return sorted(primes) + [INF]


def place_report(setup: GlobalSetup, alphas, lam, place) -> PlaceReport:
    d, t = setup.d, Fraction(setup.delta_t)
    chis = [a / setup.mu for a in alphas]
    if place == INF:
        om = [rational_hilbert_symbol(x, d, INF) for x in lam]
        s = 1 if t > 0 else -1
        ep = [archimedean_epsilon(c.w, s) for c in chis]
        return PlaceReport(INF, "C/R", om, ep, om == ep)
    p = int(place)
    kind = place_decomposition(p, d)
    om = [rational_hilbert_symbol(x, d, p) for x in lam]
    if kind == "split":
        ep = [1] * len(lam)
    elif p == 2:
        v2 = _vp(t, 2)
        ep = []
        for c in chis:
            r = c.ideal_rotation_exact(k_element(d, 2))
            val = cmath.exp(2j * math.pi * float(frac1(v2 * r)))
            ep.append(1 if val.real > 0 else -1)
            if abs(val.imag) > 1e-9:
                raise InputError("epsilon at 2 is not a sign: character not conjugate-symplectic")
    else:
        pl = local_place(d, p, t)
        pair = EtalePair(EtaleAlgebra(p, ["1"] * len(lam), GLOBAL_PRECISION), pl.base)
        loc_alpha = []
        for comp, a in zip(pair.components, alphas):
            loc_alpha.append(NormOneCharacter(comp, a.localize(p, t)))
        mu_p = setup.mu.localize(p, t)
        sv, _ = epsilon_sign_vector(pair, loc_alpha, mu_p)
        ep = list(sv.signs)
    return PlaceReport(p, kind, om, ep, om == ep)


def _vp(x: Fraction, p: int) -> int:
    x = Fraction(x)
    v = 0
    n, m = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while m % p == 0:
        m //= p
        v -= 1
    return v


def global_compatibility(alphas, beta, setup: GlobalSetup) -> bool:
    """beta_K = prod_j alpha_{j,K} (the default splitting pair (mu, mu^n))."""
    prod = trivial_hecke(setup.d)
    for a in alphas:
        prod = prod * a
    return prod.same_as(beta)


def global_decision(
    setup: GlobalSetup,
    alphas: Sequence[GlobalHeckeCharacter],
    beta: GlobalHeckeCharacter,
    lam: Sequence,
    l_value=None,
    enable_lvalue: bool = False,
    tolerance: float = 1e-8,
    seed: int = 0,
) -> dict:
    """Non-vanishing of the global period: compatibility, the per-place root
    number equalities and the central L-value condition."""
    setup.validate()
    lam = [Fraction(x) for x in lam]
    if len(alphas) != setup.n or len(lam) != setup.n:
        raise InputError("need n characters and n lambda entries")
    for a in alphas:
        if not a.is_conjugate_orthogonal():
            raise InputError("alpha_K must be trivial on A_Q^x")
    if not beta.is_conjugate_orthogonal():
        raise InputError("beta_K must be trivial on A_Q^x")
    compat = global_compatibility(alphas, beta, setup)
    bad = bad_places(setup, alphas, beta, lam)
    reports = [place_report(setup, alphas, lam, v) for v in bad]
    rng = random.Random(seed)
    good_pool = [q for q in primerange(3, 400) if q not in bad]
    for q in sorted(rng.sample(good_pool, min(GOOD_PLACE_SAMPLE, len(good_pool)))):
        r = place_report(setup, alphas, lam, q)
        if not r.satisfied:
            raise BadSetIncomplete(f"good place {q} is not satisfied")
    local_ok = all(r.satisfied for r in reports)
    # central values, one per component
    if l_value is None:
        if not enable_lvalue:
            raise LValueMissing("supply l_value or enable the built-in evaluator")
        values = [l_value_half(a / setup.mu)["value"] for a in alphas]
    elif isinstance(l_value, (list, tuple)):
        values = [complex(v) for v in l_value]
    else:
        values = [complex(l_value)]
    l_ok = all(abs(v) > tolerance for v in values)
    verdict = compat and local_ok and l_ok
    return {
        "conditions": {"compatibility": compat, "local_root_numbers": local_ok, "central_value": l_ok},
        "l_values": [[v.real, v.imag] for v in values],
        "places": [r.to_json() for r in reports],
        "bad_set": [str(v) for v in bad],
        "lambda": [str(x) for x in lam],
        "verdict": verdict,
    }


# ---------------------------------------------------------------------------
# central L-values


def root_number(chi: GlobalHeckeCharacter, t=1) -> complex:
    """Global root number as the product of local epsilons against psi_delta."""
    t = Fraction(t)
    total = complex(archimedean_epsilon(chi.w, 1 if t > 0 else -1))
    from .characters import psi_delta, tate_epsilon

    primes = set(factorint(-chi.d).keys()) | set(chi.unit_data) | {2}
    for m in (t.numerator, t.denominator):
        primes.update(factorint(abs(m)).keys())
    primes.discard(1)
    for p in sorted(primes):
        kind = place_decomposition(p, chi.d)
        if kind == "split":
            continue
        if p == 2:
            r = chi.ideal_rotation_exact(k_element(chi.d, 2))
            total *= cmath.exp(2j * math.pi * float(frac1(_vp(t, 2) * r)))
            continue
        pl = local_place(chi.d, p, t)
        total *= tate_epsilon(chi.localize(p, t), psi_delta(pl.base))
    return total


def dirichlet_coefficients(chi: GlobalHeckeCharacter, nmax: int) -> list[complex]:
    """a_n = sum over integral ideals of norm n of chi(a), n <= nmax."""
    d = chi.d
    a = [0j] * (nmax + 1)
    nunits = len(units(d))
    ymax = int(math.isqrt(4 * nmax // (-d))) + 1
    for y in range(-ymax, ymax + 1):
        xmax = int(math.isqrt(4 * nmax - (-d) * y * y)) if 4 * nmax >= (-d) * y * y else -1
        for x in range(-xmax, xmax + 1):
            if (x - y) % 2:
                continue
            num = x * x - d * y * y
            if num == 0 or num % 4:
                continue
            n = num // 4
            if n > nmax:
                continue
            el = k_element(d, Fraction(x, 2), Fraction(y, 2))
            if any(local_place(d, p).image(el).valuation > 0 for p in chi.unit_data if chi.unit_data[p][0] > 0):
                continue
            a[n] += cmath.exp(2j * math.pi * chi.ideal_rotation(el))
    return [v / nunits for v in a]


def l_value_half(chi: GlobalHeckeCharacter, X: float = 1.0, tolerance: float = 1e-6, t=1) -> dict:
    """L(1/2, chi) through the approximate functional equation with two
    cutoff parameters X and 1.3 X, which must agree."""
    import mpmath

    if not chi.is_conjugate_symplectic():
        raise NotSelfDual("character does not restrict to omega_{K/Q}")
    chi = chi.primitive()
    W = root_number(chi, t)
    if abs(W.imag) > 1e-8:
        raise NotSelfDual("root number is not real")
    W = 1.0 if W.real > 0 else -1.0
    Q = -chi.d * chi.modulus_norm()
    c = 2 * math.pi / math.sqrt(Q)
    k = abs(chi.w) / 2
    results = []
    for Xv in (X, 1.3 * X):
        nmax = int((50 + 2 * k) * max(Xv, 1 / Xv) / c) + 2
        coeffs = dirichlet_coefficients(chi, nmax)
        total = 0j
        for n in range(1, nmax + 1):
            an = coeffs[n]
            if an == 0:
                continue
            z = c * n
            g1 = mpmath.gammainc(0.5 + k, z * Xv)
            g2 = mpmath.gammainc(0.5 + k, z / Xv)
            total += an * (float(g1) + W * float(g2)) / math.sqrt(z)
        value = total / (c ** -0.5 * math.gamma(0.5 + k))
        results.append(complex(value))
    diff = abs(results[0] - results[1])
    if diff > tolerance:
        raise ConvergenceFailure(f"cutoffs disagree by {diff:.3e}")
    return {"value": results[0], "value_alt": results[1], "root_number": int(W), "conductor": Q, "difference": diff}


def epsilon_targets(setup: GlobalSetup, alphas: Sequence[GlobalHeckeCharacter]) -> list[dict]:
    """Per component, the places where the local root number is -1."""
    lam_one = [Fraction(1)] * setup.n
    places = bad_places(setup, alphas, trivial_hecke(setup.d), lam_one)
    out = [dict() for _ in alphas]
    for v in places:
        rep = place_report(setup, alphas, lam_one, v)
        for j, e in enumerate(rep.epsilon):
            if e == -1:
                out[j][v] = -1
    return out


def lambda_from_epsilon(setup: GlobalSetup, alphas: Sequence[GlobalHeckeCharacter], search_bound: int = 50) -> list[Fraction]:
    """The lambda (up to norms) singled out by the local root numbers."""
    return find_lambda(epsilon_targets(setup, alphas), setup.d, search_bound)
