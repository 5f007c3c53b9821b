from __future__ import annotations

import json
import math
import random
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import primerange

from toric_periods import global_periods as gp
from toric_periods.errors import (
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
from toric_periods.padic import rational_hilbert_symbol

FIXTURES = Path(__file__).parent / "fixtures" / "global"


def test_place_decomposition():
    assert gp.place_decomposition(2, -7) == "split"
    assert gp.place_decomposition(3, -7) == "inert"
    assert gp.place_decomposition(7, -7) == "ramified"
    assert gp.place_decomposition(11, -7) == "split"
    assert gp.place_decomposition("inf", -7) == "C/R"
    assert gp.place_decomposition(2, -3) == "inert"


def test_setup_field_is_class_number_one():
    gp.check_setup_field(-163)
    with pytest.raises(UnsupportedField):
        gp.check_setup_field(-5)


@settings(max_examples=50, deadline=None)
@given(st.integers(-30, 30), st.integers(-30, 30), st.integers(-30, 30), st.integers(-30, 30))
def test_k_element_norm_is_multiplicative(a, b, c, e):
    x = gp.k_element(-7, Fraction(a, 2), Fraction(b, 2))
    y = gp.k_element(-7, Fraction(c, 2), Fraction(e, 2))
    assert (x * y).norm == x.norm * y.norm
    assert x.conj().norm == x.norm


def test_prime_generators():
    for d in gp.CLASS_NUMBER_ONE:
        for p in primerange(2, 60):
            if gp.place_decomposition(p, d) == "split":
                assert gp.prime_generator(d, p).norm == p


def test_units():
    assert len(gp.units(-3)) == 6
    assert len(gp.units(-7)) == 2


def test_hecke_character_constraints():
    with pytest.raises(EvenPlaceRamifiedCharacter):
        gp.GlobalHeckeCharacter(-3, 0, {2: (1, [Fraction(0)])})
    with pytest.raises(InputError):
        # 11 splits in Q(sqrt -7)
        gp.GlobalHeckeCharacter(-7, 0, {11: (1, [Fraction(0)])})
    with pytest.raises(InputError):
        # -1 is a unit: w odd needs a compensating finite part
        gp.GlobalHeckeCharacter(-7, 1, {})


def test_hecke_group_laws_and_types():
    rng = random.Random(4)
    mu = gp.random_hecke_character(-7, {7: 1}, 1, rng, 1)
    a = gp.random_hecke_character(-7, {7: 2}, 2, rng, 0)
    assert mu.is_conjugate_symplectic() and not mu.is_conjugate_orthogonal()
    assert a.is_conjugate_orthogonal()
    assert (a / a).same_as(gp.trivial_hecke(-7))
    assert (mu * mu).is_conjugate_orthogonal()
    x = gp.k_element(-7, 3, 1)
    r = (mu * a).ideal_rotation(x)
    assert abs(((mu.ideal_rotation(x) + a.ideal_rotation(x)) - r + 0.5) % 1 - 0.5) < 1e-12
    assert gp.hecke_from_json(mu.to_json()).same_as(mu)


def test_primitive_lowers_the_modulus():
    chi = gp.GlobalHeckeCharacter(-7, 2, {7: (2, [Fraction(0), Fraction(0)])})
    prim = chi.primitive()
    assert prim.modulus_norm() == 1
    assert gp.is_primitive(prim)
    assert not gp.is_primitive(chi)


@settings(max_examples=200, deadline=None)
@given(st.integers(-10 ** 4, 10 ** 4).filter(bool), st.integers(-10 ** 4, 10 ** 4).filter(bool))
def test_product_formula(a, b):
    places = ["inf"] + list(primerange(2, 50)) + [q for q in set(gp.relevant_places([a, b])) if q != "inf" and q > 50]
    assert math.prod(rational_hilbert_symbol(a, b, v) for v in places) == 1


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from((-3, -7, -11, -19)),
    st.lists(st.sampled_from(["inf", 3, 5, 7, 11, 13, 17, 19, 23]), min_size=0, max_size=3, unique=True),
)
def test_find_lambda_meets_targets(d, places):
    # -1 can only be asked where K_v is a field
    places = [v for v in places if gp.place_decomposition(v, d) != "split"]
    target = {str(v): -1 for v in places}
    if len(places) % 2:
        with pytest.raises(ParityObstruction):
            gp.find_lambda([target], d)
        return
    (lam,) = gp.find_lambda([target], d, search_bound=200)
    for v in ["inf"] + list(primerange(2, 60)):
        want = -1 if v in places else 1
        assert rational_hilbert_symbol(lam, d, v) == want, v


def test_find_lambda_errors(monkeypatch):
    with pytest.raises(InputError):
        gp.find_lambda([{"2": -1, "inf": -1}], -7)
    with pytest.raises(InputError):
        gp.find_lambda([{"3": -3, "inf": 1}], -7)
    monkeypatch.setattr(gp, "_lambda_matches", lambda *a: False)
    with pytest.raises(SearchExhausted):
        gp.find_lambda([{"3": -1, "inf": -1}], -7, search_bound=5, max_factors=1)


def test_root_numbers_are_signs():
    rng = random.Random(8)
    for d, modulus in ((-7, {7: 1}), (-7, {7: 2}), (-3, {3: 2}), (-11, {11: 1}), (-19, {19: 1})):
        for w in (1, -1, 3):
            try:
                chi = gp.random_hecke_character(d, modulus, w, rng, 1)
            except InputError:
                continue
            W = gp.root_number(chi.primitive())
            assert abs(abs(W) - 1) < 1e-9
            assert abs(W.imag) < 1e-9


def test_l_value_of_the_conductor_49_character():
    # the Hecke character of the CM curve of conductor 49: L(E, 1) = 0.96665585280...
    chi = gp.GlobalHeckeCharacter(-7, 1, {7: (1, [Fraction(1, 2)])})
    res = gp.l_value_half(chi)
    assert abs(res["value"] - 0.9666558528) < 1e-9
    assert res["root_number"] == 1
    assert res["difference"] < 1e-10


def test_l_value_needs_self_duality():
    chi = gp.GlobalHeckeCharacter(-7, 2, {})
    with pytest.raises(NotSelfDual):
        gp.l_value_half(chi)


def test_l_value_detects_a_wrong_functional_equation(monkeypatch):
    chi = gp.GlobalHeckeCharacter(-7, 1, {7: (1, [Fraction(1, 2)])})
    monkeypatch.setattr(gp, "root_number", lambda c, t=1: -1.0)
    with pytest.raises(ConvergenceFailure):
        gp.l_value_half(chi)


def _fixture(name):
    data = json.loads((FIXTURES / f"{name}.json").read_text())
    pl = data["payload"]
    s = pl["setup"]
    d = s["d"]
    setup = gp.GlobalSetup(d, s["n"], gp.hecke_from_json({**s["mu"], "d": d}))
    alphas = [gp.hecke_from_json({**a, "d": d}) for a in pl["alpha"]]
    beta = gp.hecke_from_json({**pl["beta"], "d": d})
    return setup, alphas, beta, pl, data["expected"]


@pytest.mark.parametrize("name", ["all_pass", "l_value_zero", "failing_place"])
def test_decision_fixtures(name):
    setup, alphas, beta, pl, expected = _fixture(name)
    lv = [complex(*v) for v in pl["l_value"]]
    out = gp.global_decision(setup, alphas, beta, [Fraction(x) for x in pl["lambda"]], l_value=lv)
    assert out["verdict"] == expected["verdict"]
    assert out["conditions"] == expected["conditions"]
    assert [p.get("satisfied") for p in out["places"]] == [p["satisfied"] for p in expected["places"]]


def test_decision_requires_an_l_value():
    setup, alphas, beta, pl, _ = _fixture("all_pass")
    lam = [Fraction(x) for x in pl["lambda"]]
    with pytest.raises(LValueMissing):
        gp.global_decision(setup, alphas, beta, lam)
    out = gp.global_decision(setup, alphas, beta, lam, enable_lvalue=True)
    assert out["verdict"] is True
    assert [round(v[0], 9) for v in out["l_values"]] == [round(v[0], 9) for v in pl["l_value"]]


def test_lambda_from_root_numbers_matches_fixture():
    setup, alphas, _, pl, _ = _fixture("all_pass")
    lam = gp.lambda_from_epsilon(setup, alphas)
    for x, y in zip(lam, pl["lambda"]):
        for v in ("inf", 2, 3, 7):
            assert rational_hilbert_symbol(x, setup.d, v) == rational_hilbert_symbol(Fraction(y), setup.d, v)


def test_incomplete_bad_set_is_detected(monkeypatch):
    setup, alphas, beta, pl, _ = _fixture("failing_place")
    lam = [Fraction(x) for x in pl["lambda"]]
    monkeypatch.setattr(gp, "bad_places", lambda *a: ["inf"])
    monkeypatch.setattr(gp, "GOOD_PLACE_SAMPLE", 500)
    with pytest.raises(BadSetIncomplete):
        gp.global_decision(setup, alphas, beta, lam, l_value=[1.0, 1.0])
