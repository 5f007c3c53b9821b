"""Local decision layer: character compatibility, the Hom-space dimension,
the theta-lift character and the sum over hermitian spaces and embeddings.

All characters of K^1 and L^1 are handled through their base change to K^x
and L^x (alpha_L = alpha o j), which turns every comparison into an exact
comparison of rotation numbers on generators.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .characters import (
    NormOneCharacter,
    PairCharacter,
    check_splitting_character,
    epsilon_sign_vector,
    random_character,
    solve_character,
    unit_presentation,
)
from .errors import DimensionMismatch, InputError, InvalidCharacter, LiftVanishes
from .etale import (
    BaseQuadratic,
    Component,
    EtaleAlgebra,
    EtalePair,
    HermitianClass,
    SignVector,
    classify_hermitian_spaces,
    embedding_classes,
    hermitian_class_of,
    label_value,
    omega_vector,
)

MAX_EXTENSION_TRIES = 4


def k1_component(K: BaseQuadratic) -> Component:
    """K^1 viewed as the norm-one group of K (x) Q_p."""
    return Component(K, "1")


def norm_one_from_base_change(component: Component, chi) -> NormOneCharacter:
    """The norm-one character whose base change is ``chi`` (a character of L^x
    trivial on E^x, or a pair (c, c^{-1}) on a split component)."""
    if component.is_split:
        if not isinstance(chi, PairCharacter) or not (chi.first * chi.second).is_trivial():
            raise InvalidCharacter("split base change must have the form (c, c^{-1})")
        return NormOneCharacter(component, chi.first)
    return NormOneCharacter(component, chi)


def _same(a, b) -> bool:
    if isinstance(a, PairCharacter) != isinstance(b, PairCharacter):
        return False
    return a.same_as(b)


def compatibility_target(alphas: Sequence[NormOneCharacter], chi_V, chi_W, n: int):
    """(chi_W^{-n} chi_V) * prod_j alpha_{j,L} o iota_j as a character of K^x."""
    out = chi_V * (chi_W ** n).inverse()
    for a in alphas:
        out = out * a.on_K()
    return out


def character_compatibility(
    alphas: Sequence[NormOneCharacter],
    beta: NormOneCharacter,
    chi_V,
    chi_W,
    n: int,
) -> bool:
    """beta = (chi_W^{-n} chi_V) o j^{-1} * alpha restricted to K^1."""
    return _same(beta.base_change(), compatibility_target(alphas, chi_V, chi_W, n))


@dataclass
class DichotomyInput:
    pair: EtalePair
    lam: tuple
    V: HermitianClass
    alphas: list
    beta: NormOneCharacter
    chi_V: object
    chi_W: object
    psi_scale: Fraction = Fraction(1)

    def validate(self) -> None:
        n = self.pair.n
        if self.V.n != n:
            raise DimensionMismatch(f"dim V = {self.V.n} but deg E = {n}")
        check_splitting_character(self.pair.K, self.chi_W, 1)
        check_splitting_character(self.pair.K, self.chi_V, n)
        if hermitian_class_of(self.pair, self.lam) != self.V:
            raise InputError("V_{E,lambda} is not isomorphic to V")
        if len(self.alphas) != len(self.pair.components):
            raise InputError("one norm-one character per component is required")


@dataclass
class DichotomyResult:
    hom_dimension: int
    compatibility: bool
    omega: SignVector
    epsilon: SignVector
    epsilon_values: list = field(default_factory=list)
    lifted_character: Optional[list] = None

    def to_json(self) -> dict:
        return {
            "hom_dimension": self.hom_dimension,
            "compatibility": self.compatibility,
            "omega": self.omega.to_json(),
            "epsilon": self.epsilon.to_json(),
            "epsilon_values": [[round(v.real, 12), round(v.imag, 12)] for v in self.epsilon_values],
            "lifted_character": None
            if self.lifted_character is None
            else [a.to_json() for a in self.lifted_character],
        }


def local_hom_dimension(inp: DichotomyInput, eps=None) -> DichotomyResult:
    """dim Hom = 1 iff compatibility holds and omega(lambda) = epsilon."""
    inp.validate()
    compat = character_compatibility(inp.alphas, inp.beta, inp.chi_V, inp.chi_W, inp.pair.n)
    om = omega_vector(inp.pair, inp.lam)
    if eps is None:
        eps = epsilon_sign_vector(inp.pair, inp.alphas, inp.chi_W, inp.psi_scale)
    ep, values = eps
    dim = 1 if compat and om.signs == ep.signs else 0
    lifted = None
    if om.signs == ep.signs:
        lifted = theta_lift_character(inp.pair, inp.alphas, inp.lam, inp.chi_V, inp.chi_W, eps=eps)
    return DichotomyResult(dim, compat, om, ep, list(values), lifted)


# ---------------------------------------------------------------------------
# theta lift


def extend_from_K(component: Component, eta, rng: Optional[random.Random] = None) -> NormOneCharacter:
    """A norm-one character xi of L_j^1 whose restriction to K^1 is eta o j^{-1}.

    ``eta`` is a K^x-character trivial on F^x; the result satisfies
    xi.on_K() == eta.
    """
    K = component.base
    if component.is_split:
        F_j = component.field
        if K.is_split:
            c = eta.first
            m = component.from_F
            base_level = c.level
            for extra in range(MAX_EXTENSION_TRIES):
                k = F_j.e * base_level + extra
                cons = [(m(g), c.rotation(g)) for g in unit_presentation(K.F, base_level).generators]
                try:
                    phi = solve_character(unit_presentation(F_j, k), cons, rng)
                except InvalidCharacter:
                    continue
                xi = NormOneCharacter(component, phi)
                if _same(xi.on_K(), eta):
                    return xi
            raise InvalidCharacter("no extension found")
        # F_j = K, L_j = K x K: need phi on K with phi / phi o conj = eta
        for extra in range(MAX_EXTENSION_TRIES):
            k = eta.level + extra
            pres = unit_presentation(K.K, max(k, 1))
            cons = []
            for g in unit_presentation(K.K, eta.level).generators:
                cons.append((g / K.conj(g), eta.rotation(g)))
            try:
                phi = solve_character(pres, cons, rng)
            except InvalidCharacter:
                continue
            xi = NormOneCharacter(component, phi)
            if _same(xi.on_K(), eta):
                return xi
        raise InvalidCharacter("no extension found")
    if component.tau is None:
        return NormOneCharacter(component, eta)
    B = component.L
    e_rel = component.e_over_K
    for extra in range(MAX_EXTENSION_TRIES):
        k = e_rel * eta.level + extra
        cons = [(component.embed_K(g), eta.rotation(g)) for g in unit_presentation(K.K, eta.level).generators]
        mF = -(-k // (B.e // component.field.e))
        cons += [(component.embed_F(g), Fraction(0)) for g in unit_presentation(component.field, mF).generators]
        try:
            xi_L = solve_character(unit_presentation(B, k), cons, rng)
        except InvalidCharacter:
            continue
        xi = NormOneCharacter(component, xi_L)
        if _same(xi.on_K(), eta):
            return xi
    raise InvalidCharacter("no extension found")


def theta_lift_character(
    pair: EtalePair,
    alphas: Sequence[NormOneCharacter],
    lam,
    chi_V,
    chi_W,
    psi_scale=1,
    eps=None,
) -> list[NormOneCharacter]:
    """The character of L^1 carried by the nonzero theta lift.

    The splitting character of V_{E,lambda} is chi_W o N_{L/K} * xi with xi
    trivial on E^x and xi|_{K^x} = chi_V chi_W^{-n}; xi sits on the first
    component.  The lift is xi o j^{-1} * alpha, equal to alpha for the
    default pair (mu, mu^n).
    """
    n = pair.n
    om = omega_vector(pair, lam)
    if eps is None:
        eps = epsilon_sign_vector(pair, alphas, chi_W, psi_scale)
    if om.signs != eps[0].signs:
        raise LiftVanishes("omega(lambda) differs from the epsilon vector")
    eta = chi_V * (chi_W ** n).inverse()
    if _is_trivial(eta):
        return list(alphas)
    xi = extend_from_K(pair.components[0], eta)
    first = alphas[0].times(xi.phi if xi.component.is_split else xi.lchar)
    return [first] + list(alphas[1:])


def _is_trivial(chi) -> bool:
    return chi.is_trivial()


def restrict_lift_to_K(lift: Sequence[NormOneCharacter]):
    out = None
    for a in lift:
        r = a.on_K()
        out = r if out is None else out * r
    return out


# ---------------------------------------------------------------------------
# sum over hermitian spaces and embeddings


def sum_check(
    pair: EtalePair,
    alphas: Sequence[NormOneCharacter],
    beta: NormOneCharacter,
    chi_V,
    chi_W,
    psi_scale=1,
) -> dict:
    """Sum of Hom dimensions over all V and all lambda-classes embedding into V."""
    eps = epsilon_sign_vector(pair, alphas, chi_W, psi_scale)
    rows = []
    total = 0
    support = None
    for V in classify_hermitian_spaces(pair.n, pair.K):
        for lam in embedding_classes(pair, V):
            inp = DichotomyInput(pair, lam, V, list(alphas), beta, chi_V, chi_W, Fraction(psi_scale))
            res = local_hom_dimension(inp, eps=eps)
            rows.append(
                {
                    "V_class": V.label,
                    "lambda_class": [x.to_json() for x in lam],
                    "omega": list(res.omega.signs),
                    "epsilon": list(res.epsilon.signs),
                    "dim": res.hom_dimension,
                }
            )
            total += res.hom_dimension
            if res.hom_dimension:
                support = {"V_class": V.label, "lambda_class": [x.to_json() for x in lam]}
    return {"total": total, "support": support, "breakdown": rows, "epsilon": list(eps[0].signs)}


# ---------------------------------------------------------------------------
# generated local instances

SHAPES = {"FxF": ("1", "1"), "unramified": ("u",), "ramified": ("p",)}


def random_splitting_character(K: BaseQuadratic, level: int, rng: random.Random, power: int = 1):
    """A random character of K^x restricting to omega_{K/F}^power on F^x."""
    if K.is_split:
        c = random_character(unit_presentation(K.F, level), rng)
        return PairCharacter(c, c.inverse())
    m = max(1, -(-level // K.K.e))
    cons = [
        (K.from_F(g), Fraction(0 if K.omega(g) ** power == 1 else 1, 2))
        for g in unit_presentation(K.F, m).generators
    ]
    return solve_character(unit_presentation(K.K, level), cons, rng)


def random_norm_one(component: Component, level: int, rng: random.Random) -> NormOneCharacter:
    M = component.field if component.is_split else component.L
    phi = random_character(unit_presentation(M, level), rng)
    return NormOneCharacter.from_character(component, phi)


@dataclass
class LocalInstance:
    pair: EtalePair
    alphas: list
    beta: NormOneCharacter
    chi_V: object
    chi_W: object
    psi_scale: Fraction
    compatible_by_construction: bool
    meta: dict

    def sum_check(self) -> dict:
        return sum_check(self.pair, self.alphas, self.beta, self.chi_V, self.chi_W, self.psi_scale)


def generate_instance(
    p: int,
    shape: Sequence[str],
    d_label: str,
    rng: random.Random,
    compatible: bool,
    max_level: int = 2,
    precision: int = 20,
) -> LocalInstance:
    """A random local instance with characters of conductor <= max_level and
    the default splitting pair (mu, mu^n)."""
    d = label_value(p, d_label) * rng.choice([1, 4, 9, 16])
    t = rng.choice([Fraction(1), Fraction(2), Fraction(p), Fraction(1, p)])
    K = BaseQuadratic(p, d, t, precision)
    pair = EtalePair(EtaleAlgebra(p, shape, precision), K)
    n = pair.n
    mu = random_splitting_character(K, rng.randint(1, max_level), rng)
    chi_W, chi_V = mu, mu ** n
    alphas = [random_norm_one(c, rng.randint(1, max_level), rng) for c in pair.components]
    k1 = k1_component(K)
    if compatible:
        beta = norm_one_from_base_change(k1, compatibility_target(alphas, chi_V, chi_W, n))
    else:
        target = compatibility_target(alphas, chi_V, chi_W, n)
        while True:
            beta = random_norm_one(k1, rng.randint(1, max_level), rng)
            if not _same(beta.base_change(), target):
                break
    psi_scale = rng.choice([Fraction(1), Fraction(1, p), Fraction(p)])
    meta = {"p": p, "shape": list(shape), "d": str(d), "t": str(t), "psi_scale": str(psi_scale)}
    return LocalInstance(pair, alphas, beta, chi_V, chi_W, psi_scale, compatible, meta)


def generate_corpus(seed: int, per_cell: int = 8, primes=(3, 5, 7), shapes=None, d_labels=("u", "p", "up")):
    """Deterministic corpus: primes x shapes x d-classes x per_cell instances,
    alternating compatible and incompatible beta."""
    shapes = shapes or list(SHAPES.values())
    out = []
    for p in primes:
        for shape in shapes:
            for dl in d_labels:
                rng = random.Random(f"{seed}:{p}:{','.join(shape)}:{dl}")
                for i in range(per_cell):
                    out.append(generate_instance(p, shape, dl, rng, compatible=(i % 2 == 0)))
    return out
