from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from support import ETALE_SHAPES, random_lambda, random_pair
from toric_periods.errors import DimensionMismatch, InputError
from toric_periods.etale import (
    ArchEtale,
    ArchimedeanQuadratic,
    BaseQuadratic,
    EtaleAlgebra,
    EtalePair,
    HermitianClass,
    arch_embedding_classes,
    arch_omega_vector,
    arch_signature,
    classify_hermitian_spaces,
    disc_etale,
    disc_hermitian_lambda,
    embedding_classes,
    gram_disc_sign,
    hermitian_class_of,
    label_value,
    lambda_class_representatives,
    omega_vector,
    q_delta_selftest,
)
from toric_periods.padic import hilbert_symbol

PRIMES = (3, 5, 7)


def test_base_quadratic_canonicalizes_square_factors():
    for p in PRIMES:
        u = label_value(p, "u")
        assert BaseQuadratic(p, u * 4 * p * p).label == "u"
        assert BaseQuadratic(p, Fraction(p, 9)).label == "p"
        assert BaseQuadratic(p, 4).is_split
        with pytest.raises(InputError):
            BaseQuadratic(p, 0)


@pytest.mark.theory
def test_hermitian_space_counts():
    # two classes over a quadratic field, one when split, n+1 signatures over C/R
    for p in PRIMES:
        assert len(classify_hermitian_spaces(3, BaseQuadratic(p, p))) == 2
        assert len(classify_hermitian_spaces(3, BaseQuadratic(p, 1))) == 1
    sigs = classify_hermitian_spaces(3, ArchimedeanQuadratic())
    assert [V.signature for V in sigs] == [(3, 0), (2, 1), (1, 2), (0, 3)]


def test_disc_etale_of_split_algebra_is_square():
    assert disc_etale(EtaleAlgebra(5, ("1", "1", "1")))[0] == "1"


@pytest.mark.parametrize("p", PRIMES)
def test_gram_determinant_matches_formula(p):
    rng = random.Random(p)
    for _ in range(12):
        pair = random_pair(p, rng, field_only=True)
        lam = random_lambda(pair, rng)
        assert gram_disc_sign(pair, lam, rng) == disc_hermitian_lambda(pair, lam)["sign"]


@pytest.mark.theory
@pytest.mark.parametrize("p", PRIMES)
def test_class_of_v_is_product_of_component_signs(p):
    # omega_K(N(lambda) disc E) = omega_K(disc E) * prod_j omega_{L_j/E_j}(lambda_j)
    rng = random.Random(10 + p)
    for _ in range(20):
        pair = random_pair(p, rng, field_only=True)
        lam = random_lambda(pair, rng)
        _, dE = disc_etale(pair.E)
        w = pair.K.omega(pair.E.F.element(dE))
        assert hermitian_class_of(pair, lam).disc_sign == w * math.prod(omega_vector(pair, lam).signs)


@pytest.mark.theory
@pytest.mark.parametrize("p", PRIMES)
def test_omega_is_invariant_under_norms(p):
    rng = random.Random(20 + p)
    for _ in range(15):
        pair = random_pair(p, rng, precision=40)
        lam = random_lambda(pair, rng)
        ys = [c.random_element(rng) for c in pair.components]
        moved = tuple(c.norm_to_E(y) * x for c, y, x in zip(pair.components, ys, lam))
        assert omega_vector(pair, moved) == omega_vector(pair, lam)
        assert hermitian_class_of(pair, moved) == hermitian_class_of(pair, lam)


@pytest.mark.parametrize("shape", ETALE_SHAPES)
def test_embedding_classes_partition_lambda_classes(shape):
    p = 5
    for d in (2, 5, 10, 4):
        pair = EtalePair(EtaleAlgebra(p, shape), BaseQuadratic(p, d))
        reps = lambda_class_representatives(pair)
        fields = sum(1 for c in pair.components if not c.is_split)
        assert len(reps) == 2 ** fields
        seen = []
        for V in classify_hermitian_spaces(pair.n, pair.K):
            for lam in embedding_classes(pair, V):
                assert hermitian_class_of(pair, lam) == V
                seen.append(lam)
        assert len(seen) == len(reps)
        signs = {omega_vector(pair, lam).signs for lam in seen}
        assert len(signs) == len(reps)


def test_embedding_classes_checks_dimension():
    pair = EtalePair(EtaleAlgebra(3, ("u",)), BaseQuadratic(3, 3))
    with pytest.raises(DimensionMismatch):
        embedding_classes(pair, HermitianClass(3, 1))


def test_split_base_gives_trivial_signs():
    pair = EtalePair(EtaleAlgebra(7, ("1", "u")), BaseQuadratic(7, 2))
    lam = random_lambda(pair, random.Random(0))
    assert omega_vector(pair, lam).signs == (1, 1)
    assert hermitian_class_of(pair, lam) == HermitianClass(3)


def test_component_omega_is_local_hilbert_symbol():
    p = 7
    pair = EtalePair(EtaleAlgebra(p, ("u",)), BaseQuadratic(p, p))
    c = pair.components[0]
    lam = c.field.uniformizer
    d = c.field.element(p)
    assert omega_vector(pair, (lam,)).signs == (hilbert_symbol(lam, d),)


def test_archimedean_signatures():
    E = ArchEtale(2, 1)
    assert arch_signature(E, (1, -1)) == (2, 2)
    assert arch_omega_vector(E, (1, -1)).signs == (1, -1, 1)
    V = HermitianClass(4, signature=(3, 1))
    assert arch_embedding_classes(E, V) == [(1, 1)]
    assert sorted(arch_embedding_classes(ArchEtale(2, 0), HermitianClass(2, signature=(1, 1)))) == [(-1, 1), (1, -1)]


@settings(max_examples=60, deadline=None)
@given(
    st.sampled_from(PRIMES),
    st.sampled_from(("u", "p", "up")),
    st.fractions(min_value=-1000, max_value=1000, max_denominator=50).filter(bool),
    st.sampled_from((1, 2, 3, -1, Fraction(1, 5))),
)
def test_cayley_identity(p, label, b, t):
    K = BaseQuadratic(p, label_value(p, label), t)
    # raises unless the identity holds exactly at working precision
    q = q_delta_selftest(K, b)
    diff = q - K.from_F(K.F.element(b)) * K.delta
    assert diff.is_zero() or diff.valuation >= K.K.N - 4 * K.K.e
