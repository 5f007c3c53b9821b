"""Etale algebras over Q_p, the twist L = K (x) E, and invariants of the
one-dimensional hermitian spaces V_{E,lambda}.

Scope: the base field is Q_p (p odd) or R.  Components of E are Q_p or one of
its three quadratic extensions, so every L_j is K, a split algebra, or the
biquadratic field B = Q_p(sqrt u, sqrt p).  Every field involved is stored as a
two-step tower in which the relevant square roots are monomials, which makes
all embeddings and Galois automorphisms sign flips.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional, Sequence

import sympy

from .errors import DimensionMismatch, InputError, PrecisionExhausted
from .padic import (
    BOTTOM,
    FieldMap,
    LocalElement,
    LocalField,
    hilbert_symbol,
    identity_map,
    make_local_field,
    norm_and_trace,
    qp,
    sign_automorphism,
    sqrt,
    square_class,
)

DEFAULT_PRECISION = 20
QUADRATIC_LABELS = ("u", "p", "up")
COMPONENT_LABELS = ("1",) + QUADRATIC_LABELS
_CLASS_TO_LABEL = {"1": "1", "u": "u", "pi": "p", "u*pi": "up"}


def least_nonresidue(p: int) -> int:
    return next(a for a in range(2, p) if pow(a, (p - 1) // 2, p) == p - 1)


def label_value(p: int, label: str) -> int:
    """The integer d0 with Q_p(sqrt d0) the field named by ``label``."""
    u = least_nonresidue(p)
    return {"1": 1, "u": u, "p": p, "up": u * p}[label]


def quadratic_field(p: int, label: str, N: int = DEFAULT_PRECISION) -> LocalField:
    """Q_p for '1', else Q_p(sqrt d0) with the root stored as y or pi.

    N counts p-adic digits, so ramified fields get pi-adic precision 2N.
    """
    if label == "1":
        return qp(p, N)
    if label == "u":
        return make_local_field(p, 2, [-p, 1], N)
    if label == "p":
        return make_local_field(p, 1, [-p, 0, 1], 2 * N)
    if label == "up":
        return make_local_field(p, 1, [-least_nonresidue(p) * p, 0, 1], 2 * N)
    raise InputError(f"unknown quadratic label {label!r}")


def biquadratic_field(p: int, N: int = DEFAULT_PRECISION) -> LocalField:
    """B = Q_{p^2}(sqrt p): sqrt u = y, sqrt p = pi, sqrt(up) = y*pi."""
    return make_local_field(p, 2, [-p, 0, 1], 2 * N)


def root_in_quadratic(field: LocalField, label: str) -> LocalElement:
    return field.y if label == "u" else field.uniformizer


def root_in_biquadratic(B: LocalField, label: str) -> LocalElement:
    return {"u": B.y, "p": B.uniformizer, "up": B.y * B.uniformizer}[label]


def conjugation_of_quadratic(field: LocalField, label: str) -> FieldMap:
    return sign_automorphism(field, label == "u", label != "u")


def biquadratic_flip(B: LocalField, label: str) -> FieldMap:
    """Automorphism of B fixing sqrt(label) and moving the other two roots.

    Fixing sqrt u flips pi, fixing sqrt p flips y, fixing sqrt(up) flips both.
    """
    return sign_automorphism(B, label != "u", label != "p")


def embed_quadratic(source: LocalField, label: str, target: LocalField, root: LocalElement) -> FieldMap:
    """Q_p(sqrt d0) -> target sending the stored root to ``root``."""
    if label == "1":
        return FieldMap(source, target, target.zero, target.element(source.p))
    if label == "u":
        return FieldMap(source, target, root, target.element(source.p))
    return FieldMap(source, target, target.zero, root)


def rational_in_qp(x: LocalElement) -> Fraction:
    """An element of a field lying in Q_p, as a truncated rational."""
    return x.rational()


# ---------------------------------------------------------------------------
# K = F(sqrt d) over F = Q_p


class BaseQuadratic:
    """K = Q_p(sqrt d) together with a trace-zero element delta = t*sqrt(d).

    ``d`` is rewritten as d0 * s**2 with d0 in {1, u, p, u*p}; the stored
    coefficient is t*s so that delta = t' * sqrt(d0) in the tower for d0.
    """

    def __init__(self, p: int, d, t=1, precision: int = DEFAULT_PRECISION):
        self.p = p
        self.N = precision
        self.F = qp(p, precision)
        d = Fraction(d)
        t = Fraction(t)
        if d == 0 or t == 0:
            raise InputError("d and t must be nonzero")
        self.d = d
        self.t = t
        dF = self.F.element(d)
        self.label = _CLASS_TO_LABEL[square_class(dF)]
        self.d0 = label_value(p, self.label)
        s = sqrt(dF / self.F.element(self.d0))
        self.t0 = self.F.element(t) * s
        self.is_split = self.label == "1"
        if self.is_split:
            self.K = None
            self.conj = None
            self.sqrt_d0 = None
        else:
            self.K = quadratic_field(p, self.label, precision)
            self.conj = conjugation_of_quadratic(self.K, self.label)
            self.sqrt_d0 = root_in_quadratic(self.K, self.label)
            self.from_F = embed_quadratic(self.F, "1", self.K, None)

    def omega(self, x: LocalElement) -> int:
        """omega_{K/F}(x) for x in Q_p."""
        if self.is_split:
            return 1
        return hilbert_symbol(x, self.F.element(self.d0))

    def d_in(self, field: LocalField) -> LocalElement:
        return field.element(self.d0)

    @property
    def delta(self):
        """delta in K, or the pair (t r, -t r) when K is split."""
        if self.is_split:
            return (self.t0, -self.t0)
        return self.from_F(self.t0) * self.sqrt_d0

    def to_json(self) -> dict:
        return {"p": str(self.p), "d": str(self.d), "delta_t": str(self.t), "label": self.label}


# ---------------------------------------------------------------------------
# quadratic etale structure over a field


@dataclass(frozen=True)
class QuadraticEtale:
    """L = M(sqrt d) as a field, or M x M when d is a square in M."""

    over: LocalField
    kind: str  # "field" or "split"
    d: LocalElement

    @property
    def is_split(self) -> bool:
        return self.kind == "split"

    def d_in(self, field: LocalField) -> LocalElement:
        if field is not self.over:
            raise InputError("quadratic structure belongs to another field")
        return self.d

    def to_json(self) -> dict:
        return {"over": self.over.field_id, "kind": self.kind, "d": self.d.to_json()}


def quad_etale_structure(Fj: LocalField, d) -> QuadraticEtale:
    """Field(d) if d stays a non-square in Fj, Split otherwise."""
    dj = Fj.element(d) if not isinstance(d, LocalElement) else d
    kind = "split" if square_class(dj) == "1" else "field"
    return QuadraticEtale(Fj, kind, dj)


# ---------------------------------------------------------------------------
# components of L = K (x) E


class Component:
    """One factor L_j = K (x) F_j with its maps.

    Field kind: elements of L_j are LocalElements of ``L``.  Split kind:
    pairs (a, b) of elements of F_j, with conjugation swapping the entries.
    When K is a field and F_j = K, the pair is (phi1(x), phi2(x)) with phi1
    the identity and phi2 the conjugation of K.  When K is split, K = Q_p^2
    maps entrywise.
    """

    def __init__(self, base: BaseQuadratic, label: str):
        if label not in COMPONENT_LABELS:
            raise InputError(f"unknown component label {label!r}")
        p, N = base.p, base.N
        self.base = base
        self.label = label
        self.field = quadratic_field(p, label, N)
        self.degree = 1 if label == "1" else 2
        self.from_F = embed_quadratic(base.F, "1", self.field, None)
        self.field_conj = None if label == "1" else conjugation_of_quadratic(self.field, label)
        self.quad = quad_etale_structure(self.field, base.d0)
        if base.is_split or label == base.label:
            self.kind = "split"
            self.L = None
        else:
            self.kind = "field"
            if label == "1":
                self.L = base.K
                self.embed_F = base.from_F
                self.embed_K = identity_map(base.K)
                self.sigma = base.conj
                self.tau = None  # L_j = K
                self.e_over_K = 1
            else:
                B = biquadratic_field(p, N)
                self.L = B
                self.embed_F = embed_quadratic(self.field, label, B, root_in_biquadratic(B, label))
                self.embed_K = embed_quadratic(base.K, base.label, B, root_in_biquadratic(B, base.label))
                self.sigma = biquadratic_flip(B, label)
                self.tau = biquadratic_flip(B, base.label)
                self.e_over_K = B.e // base.K.e
        assert (self.kind == "split") == self.quad.is_split

    @property
    def is_split(self) -> bool:
        return self.kind == "split"

    # -- arithmetic in L_j -----------------------------------------------------

    def mul(self, x, y):
        if self.is_split:
            return (x[0] * y[0], x[1] * y[1])
        return x * y

    def conj(self, x):
        if self.is_split:
            return (x[1], x[0])
        return self.sigma(x)

    def from_E(self, a: LocalElement):
        if self.is_split:
            return (a, a)
        return self.embed_F(a)

    def from_K(self, x):
        if self.is_split:
            if self.base.is_split:
                return (self.from_F(x[0]), self.from_F(x[1]))
            return (x, self.base.conj(x))
        return self.embed_K(x)

    def trace_to_K(self, x):
        if self.is_split:
            if self.base.is_split:
                ta = norm_and_trace(x[0], "Qp")[1]
                tb = norm_and_trace(x[1], "Qp")[1]
                return (self.base.F.element(ta.rational()), self.base.F.element(tb.rational()))
            return x[0] + self.base.conj(x[1])
        if self.tau is None:
            return x
        return self.embed_K.preimage(x + self.tau(x))

    def norm_to_K(self, x):
        if self.is_split:
            if self.base.is_split:
                na = norm_and_trace(x[0], "Qp")[0]
                nb = norm_and_trace(x[1], "Qp")[0]
                return (self.base.F.element(na.rational()), self.base.F.element(nb.rational()))
            return x[0] * self.base.conj(x[1])
        if self.tau is None:
            return x
        return self.embed_K.preimage(x * self.tau(x))

    def norm_to_E(self, x) -> LocalElement:
        if self.is_split:
            return x[0] * x[1]
        return self.embed_F.preimage(x * self.sigma(x))

    def random_element(self, rng: random.Random):
        def one(field: LocalField) -> LocalElement:
            while True:
                x = field.make(rng.randint(-1, 2), [rng.randrange(field.p ** 4) for _ in range(field.degree)])
                if x.valuation is not BOTTOM:
                    return x

        if self.is_split:
            return (one(self.field), one(self.field))
        return one(self.L)

    def omega(self, lam: LocalElement) -> int:
        """omega_{L_j/F_j}(lambda_j)."""
        if self.is_split:
            return 1
        return hilbert_symbol(lam, self.field.element(self.base.d0))

    def norm_class_representatives(self) -> list[LocalElement]:
        """{1} when split, else {1, r} with r the first of u, pi, u*pi that is not a norm."""
        one = self.field.one
        if self.is_split:
            return [one]
        u, pi = self.field.nonresidue, self.field.uniformizer
        for r in (u, pi, u * pi):
            if self.omega(r) == -1:
                return [one, r]
        raise AssertionError("no non-norm found")


# ---------------------------------------------------------------------------
# etale algebras


class EtaleAlgebra:
    """E = prod F_j over Q_p; components named by labels in {1, u, p, up}."""

    def __init__(self, p: int, labels: Sequence[str], precision: int = DEFAULT_PRECISION):
        if not labels:
            raise InputError("an etale algebra needs at least one component")
        self.p = p
        self.N = precision
        self.labels = tuple(labels)
        self.F = qp(p, precision)
        self.fields = [quadratic_field(p, lab, precision) for lab in self.labels]
        self.degree = sum(1 if lab == "1" else 2 for lab in self.labels)

    def norm_to_F(self, lam: Sequence[LocalElement]) -> LocalElement:
        """N_{E/F}(lambda) as an element of Q_p."""
        out = self.F.one
        for x in lam:
            if x.field.degree == 1:
                out = out * self.F.element(x.rational())
            else:
                out = out * self.F.element(norm_and_trace(x, "Qp")[0].rational())
        return out

    def basis(self) -> list[tuple[int, LocalElement]]:
        out = []
        for j, (lab, Fj) in enumerate(zip(self.labels, self.fields)):
            out.append((j, Fj.one))
            if lab != "1":
                out.append((j, root_in_quadratic(Fj, lab)))
        return out

    def to_json(self) -> dict:
        return {
            "base": {"p": str(self.p)},
            "components": [{"label": lab, "field": F.to_json()} for lab, F in zip(self.labels, self.fields)],
        }


class EtalePair:
    """E together with K: the components L_j = K (x) F_j."""

    def __init__(self, E: EtaleAlgebra, K: BaseQuadratic):
        if E.p != K.p or E.N != K.N:
            raise InputError("E and K must share the prime and precision")
        self.E = E
        self.K = K
        self.components = [Component(K, lab) for lab in E.labels]

    @property
    def n(self) -> int:
        return self.E.degree


def _fraction_det(rows: list[list[Fraction]]) -> Fraction:
    M = sympy.Matrix(rows)
    v = M.det()
    return Fraction(int(v.p), int(v.q))


def trace_gram(E: EtaleAlgebra, change: Optional[list[list[int]]] = None) -> list[list[Fraction]]:
    """Gram matrix of the trace form tr_{E/F}(e_i e_k), optionally in a changed basis."""
    basis = E.basis()
    n = len(basis)
    G = [[Fraction(0)] * n for _ in range(n)]
    for i, (ji, ei) in enumerate(basis):
        for k, (jk, ek) in enumerate(basis):
            if ji == jk:
                G[i][k] = (ei * ek).trace_qp()
    if change is not None:
        P = sympy.Matrix(change)
        Gm = P.T * sympy.Matrix(G) * P
        G = [[Fraction(int(Gm[i, k].p), int(Gm[i, k].q)) for k in range(n)] for i in range(n)]
    return G


def disc_etale(E: EtaleAlgebra, change: Optional[list[list[int]]] = None) -> tuple[str, Fraction]:
    """Square class of (-1)^{n(n-1)/2} det(tr(e_i e_k)) and the value itself."""
    G = trace_gram(E, change)
    n = E.degree
    det = _fraction_det(G) * (-1) ** (n * (n - 1) // 2)
    if det == 0:
        raise PrecisionExhausted("trace form determinant vanished")
    return square_class(E.F.element(det)), det


# ---------------------------------------------------------------------------
# hermitian classes and sign vectors


@dataclass(frozen=True)
class HermitianClass:
    n: int
    disc_sign: Optional[int] = None
    signature: Optional[tuple[int, int]] = None

    @property
    def label(self) -> str:
        if self.signature is not None:
            return f"sig{self.signature[0]},{self.signature[1]}"
        if self.disc_sign is None:
            return "split"
        return "eps+" if self.disc_sign == 1 else "eps-"

    def to_json(self) -> dict:
        out: dict = {"n": self.n}
        if self.signature is not None:
            out["signature"] = list(self.signature)
        elif self.disc_sign is not None:
            out["disc_sign"] = self.disc_sign
        return out


@dataclass(frozen=True)
class SignVector:
    signs: tuple[int, ...]
    split: tuple[bool, ...] = dc_field(default=())

    def __post_init__(self):
        if not self.split:
            object.__setattr__(self, "split", (False,) * len(self.signs))
        for s, m in zip(self.signs, self.split):
            if s not in (1, -1):
                raise InputError("sign vector entries must be +1 or -1")
            if m and s != 1:
                raise InputError("split entries of a sign vector must be +1")

    def __mul__(self, other: "SignVector") -> "SignVector":
        return SignVector(tuple(a * b for a, b in zip(self.signs, other.signs)), self.split)

    def to_json(self) -> dict:
        return {"signs": list(self.signs), "split": list(self.split)}


class ArchimedeanQuadratic:
    """K = C over R (the only archimedean case needed)."""

    is_split = False


@dataclass(frozen=True)
class ArchEtale:
    """E = R^r x C^s over R."""

    r: int
    s: int

    @property
    def degree(self) -> int:
        return self.r + 2 * self.s


def classify_hermitian_spaces(n: int, K) -> list[HermitianClass]:
    if n < 1:
        raise InputError("dimension must be positive")
    if isinstance(K, ArchimedeanQuadratic) or K == "C":
        return [HermitianClass(n, signature=(n - k, k)) for k in range(n + 1)]
    if K.is_split:
        return [HermitianClass(n)]
    return [HermitianClass(n, disc_sign=1), HermitianClass(n, disc_sign=-1)]


def disc_hermitian_lambda(pair: EtalePair, lam: Sequence[LocalElement]) -> dict:
    """Class of N_{E/F}(lambda) * disc_F(E) and its sign omega_{K/F}."""
    _check_lambda(pair, lam)
    _, dE = disc_etale(pair.E)
    value = pair.E.norm_to_F(lam) * pair.E.F.element(dE)
    sign = None if pair.K.is_split else pair.K.omega(value)
    return {"value": value, "square_class": square_class(value), "sign": sign}


def hermitian_class_of(pair: EtalePair, lam: Sequence[LocalElement]) -> HermitianClass:
    return HermitianClass(pair.n, disc_sign=disc_hermitian_lambda(pair, lam)["sign"])


def _check_lambda(pair: EtalePair, lam: Sequence[LocalElement]) -> None:
    if len(lam) != len(pair.components):
        raise DimensionMismatch("lambda needs one entry per component")
    for x, c in zip(lam, pair.components):
        if x.field is not c.field:
            raise InputError("lambda entry lives in the wrong field")
        v = x.valuation
        if v is BOTTOM or v >= x.field.N:
            raise PrecisionExhausted("lambda entry indistinguishable from 0")


def omega_vector(pair: EtalePair, lam: Sequence[LocalElement]) -> SignVector:
    _check_lambda(pair, lam)
    return SignVector(
        tuple(c.omega(x) for c, x in zip(pair.components, lam)),
        tuple(c.is_split for c in pair.components),
    )


def lambda_class_representatives(pair: EtalePair) -> list[tuple[LocalElement, ...]]:
    """Representatives of E^x / N(L^x) in a fixed order."""
    reps: list[tuple[LocalElement, ...]] = [()]
    for c in pair.components:
        reps = [r + (x,) for r in reps for x in c.norm_class_representatives()]
    return reps


def embedding_classes(pair: EtalePair, V: HermitianClass) -> list[tuple[LocalElement, ...]]:
    """lambda-classes with V_{E,lambda} isomorphic to V."""
    if V.n != pair.n:
        raise DimensionMismatch(f"dim V = {V.n} but deg E = {pair.n}")
    reps = lambda_class_representatives(pair)
    if pair.K.is_split:
        return reps
    return [lam for lam in reps if disc_hermitian_lambda(pair, lam)["sign"] == V.disc_sign]


def gram_disc_sign(pair: EtalePair, lam: Sequence[LocalElement], rng: random.Random) -> int:
    """omega_{K/F} of the discriminant of V_{E,lambda} from an explicit Gram matrix.

    Uses a random K-basis f_i = sum c_ik e_k of L and H_ik = tr_{L/K}(lambda f_i conj(f_k)).
    """
    K = pair.K
    if K.is_split:
        raise InputError("Gram oracle needs K to be a field")
    Kf = K.K
    basis = [(j, pair.components[j].from_E(e)) for j, e in pair.E.basis()]
    n = len(basis)
    # a change of basis scales det by a norm, so any invertible basis works;
    # only enough digits beyond the valuation are needed to read its class
    for _ in range(50):
        coeffs = [[Kf.make(0, [rng.randrange(-9, 10) for _ in range(Kf.degree)]) for _ in range(n)] for _ in range(n)]
        f = []
        for i in range(n):
            vec = []
            for j, c in enumerate(pair.components):
                x = None
                for k, (jk, ek) in enumerate(basis):
                    if jk == j:
                        term = c.mul(c.from_K(coeffs[i][k]), ek)
                        x = term if x is None else (
                            (x[0] + term[0], x[1] + term[1]) if c.is_split else x + term
                        )
                vec.append(x)
            f.append(vec)
        lamL = [c.from_E(_integral_by_norms(x)) for c, x in zip(pair.components, lam)]
        H = [[None] * n for _ in range(n)]
        for i in range(n):
            for k in range(n):
                acc = Kf.zero
                for j, c in enumerate(pair.components):
                    acc = acc + c.trace_to_K(c.mul(c.mul(lamL[j], f[i][j]), c.conj(f[k][j])))
                H[i][k] = acc
        det = _det_elements(H, Kf.zero)
        if det.valuation is not BOTTOM and det.valuation < Kf.N - 4 * Kf.e:
            break
    else:
        raise PrecisionExhausted("Gram determinant has too few digits; raise the precision")
    det_F = K.from_F.preimage(det)
    disc = det_F * (-1) ** (n * (n - 1) // 2)
    return K.omega(disc)


def _integral_by_norms(x: LocalElement) -> LocalElement:
    # p^2 = N(p) is a norm from every extension, and V_{E,lambda} is isometric
    # to V_{E,N(y) lambda}; clearing denominators keeps the low digits exact
    while x.valuation is not BOTTOM and x.valuation < 0:
        x = x * x.field.element(x.field.p ** 2)
    return x


def _det_elements(rows, zero):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = zero
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _det_elements(minor, zero)
        total = total + term if j % 2 == 0 else total - term
    return total


# ---------------------------------------------------------------------------
# archimedean invariants


def arch_signature(E: ArchEtale, lam_signs: Sequence[int]) -> tuple[int, int]:
    """Signature of V_{E,lambda}: a negative real lambda_j gives a (0,1) block,
    each complex component a (1,1) block."""
    if len(lam_signs) != E.r:
        raise DimensionMismatch("one sign per real component")
    neg = sum(1 for s in lam_signs if s < 0)
    return (E.r - neg + E.s, neg + E.s)


def arch_omega_vector(E: ArchEtale, lam_signs: Sequence[int]) -> SignVector:
    return SignVector(tuple(lam_signs) + (1,) * E.s, (False,) * E.r + (True,) * E.s)


def arch_embedding_classes(E: ArchEtale, V: HermitianClass) -> list[tuple[int, ...]]:
    if V.n != E.degree:
        raise DimensionMismatch(f"dim V = {V.n} but deg E = {E.degree}")
    out = []
    for mask in range(2 ** E.r):
        signs = tuple(-1 if (mask >> i) & 1 else 1 for i in range(E.r))
        if arch_signature(E, signs) == V.signature:
            out.append(signs)
    return out


# ---------------------------------------------------------------------------
# the q_F identity


def j_map(K: BaseQuadratic, x: LocalElement) -> LocalElement:
    return x / K.conj(x)


def q_delta_selftest(K: BaseQuadratic, b) -> LocalElement:
    """Evaluate (j(1+b delta) - j(1-b delta)) / (j(1+b delta) + j(1-b delta) + 2).

    The expression is evaluated with enough guard digits to absorb the
    divisions, then reduced to K's precision, where it must equal b*delta
    exactly.  ``b`` is a rational or an element of Q_p.
    """
    if K.is_split:
        raise InputError("the identity is checked in a quadratic field")
    b = b.rational() if isinstance(b, LocalElement) else Fraction(b)
    if b == 0:
        return K.K.zero
    vb = vp_fraction(b, K.p)
    vt = vp_fraction(K.t, K.p)
    guard = 4 * abs(vb + vt) + 8
    hi = BaseQuadratic(K.p, K.d, K.t, K.N + guard)
    Kh = hi.K
    bd = hi.from_F(hi.F.element(b)) * hi.delta
    plus, minus = Kh.one + bd, Kh.one - bd
    nrm = plus * minus
    if nrm.valuation is BOTTOM or nrm.valuation >= Kh.N - 2 * Kh.e * guard // 2:
        raise PrecisionExhausted("b^2 delta^2 is too close to 1")
    jp, jm = j_map(hi, plus), j_map(hi, minus)
    q_hi = (jp - jm) / (jp + jm + 2)
    q = _reduce_to(q_hi, K.K)
    if q != _reduce_to(bd, K.K):
        raise AssertionError("q_F(b) differs from b*delta")
    return q


def vp_fraction(x: Fraction, p: int) -> int:
    from .padic import vp

    return vp(x.numerator, p) - vp(x.denominator, p)


def _reduce_to(x: LocalElement, field: LocalField) -> LocalElement:
    """Same coordinates, read in a lower-precision copy of the field."""
    if x.coeffs is None:
        return field.zero
    return field.make(x.scale, list(x.coeffs))
