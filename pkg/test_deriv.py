import random

import pytest
from hypothesis import given, settings, strategies as st

from src import deriv
from src.config import DEFAULT_SETTINGS
from src.deriv import Derivation, DerivationType
from src.errors import (
    DerivationTypeError,
    InvalidDerivationError,
    UnknownVariableError,
    ZeroDerivationError,
)
from src.report import PASS
from src.ring import RingSpec

PROPERTY_EXAMPLES = DEFAULT_SETTINGS.property_examples


def plane(p, **kwargs):
    return RingSpec.polynomial(p, ["x", "y"], **kwargs)


def test_weighted_euler_field_is_multiplicative():
    D = Derivation(plane(5), {"x": "x", "y": "2*y"}, spot_checks=10)
    assert D.dtype is DerivationType.MULTIPLICATIVE
    assert deriv.classify(D) == "multiplicative"
    assert str(D) == "(x)*d/dx + (2*y)*d/dy"


def test_partial_is_additive():
    D = Derivation(plane(3), {"x": "1"}, spot_checks=10)
    assert D.dtype is DerivationType.ADDITIVE
    assert D.iterate(D.spec.parse("x^5"), 3) == 0


def test_translated_euler_field_is_multiplicative():
    D = Derivation(RingSpec.polynomial(3, ["x"]), {"x": "1+x"}, spot_checks=10)
    assert D.dtype is DerivationType.MULTIPLICATIVE


def test_mixed_field_is_neither():
    D = Derivation(plane(3), {"x": "x", "y": "1"}, spot_checks=10)
    assert D.dtype is DerivationType.NEITHER
    with pytest.raises(DerivationTypeError):
        D.require(DerivationType.ADDITIVE, DerivationType.MULTIPLICATIVE)


def test_zero_derivation():
    D = Derivation(plane(3), {})
    assert D.dtype is DerivationType.UNCLASSIFIED
    with pytest.raises(ZeroDerivationError):
        deriv.classify(D)
    with pytest.raises(ZeroDerivationError):
        deriv.fixed_locus(D)
    with pytest.raises(ZeroDerivationError):
        D.require(DerivationType.ADDITIVE)


def test_unknown_variable():
    with pytest.raises(UnknownVariableError):
        Derivation(plane(3), {"z": "1"})


def test_radicand_must_be_killed():
    A = RingSpec.polynomial(3, ["x"]).radical_extension("t", "x")
    with pytest.raises(InvalidDerivationError):
        Derivation(A, {"x": "1"})
    D = Derivation(A, {"t": "1"}, spot_checks=10)
    assert D.dtype is DerivationType.ADDITIVE


def test_crossing_relation_must_be_preserved():
    R = RingSpec.crossing_ring(5)
    assert Derivation(R, {"x": "x"}, spot_checks=10).dtype is DerivationType.MULTIPLICATIVE
    with pytest.raises(InvalidDerivationError):
        Derivation(R, {"x": "1"})


def test_truncation_ideal_must_be_preserved():
    R = RingSpec.polynomial(3, ["x"], truncate=4)
    with pytest.raises(InvalidDerivationError):
        Derivation(R, {"x": "1"})
    assert Derivation(R, {"x": "x"}, spot_checks=10).dtype is DerivationType.MULTIPLICATIVE


def test_quotient_rule_on_localization():
    R = RingSpec.polynomial(3, ["s"], localize="s")
    D = Derivation(R, {"s": "s"}, spot_checks=10)
    assert D.apply(R.parse("s^-1")) == R.parse("-s^-1")
    assert D.apply(R.parse("s^-2+s")) == R.parse("s-2*s^-2")


def test_scaled():
    D = Derivation(plane(5), {"x": "x", "y": "2*y"}, spot_checks=10)
    W = D.scaled(2)
    assert W.image("y") == D.spec.parse("4*y")
    assert W.dtype is DerivationType.MULTIPLICATIVE


def test_fixed_locus_shapes():
    R = plane(5)
    euler = deriv.fixed_locus(Derivation(R, {"x": "x", "y": "2*y"}, spot_checks=5))
    assert not euler.is_free and euler.divisorial.is_one()
    assert euler.method == "monomial gcd"
    assert deriv.fixed_locus(Derivation(R, {"x": "1"}, spot_checks=5)).is_free
    line = RingSpec.polynomial(5, ["x"])
    loc = deriv.fixed_locus(Derivation(line, {"x": "x^2+x"}, spot_checks=5))
    assert loc.method == "univariate gcd"
    assert loc.divisorial == line.parse("x+x^2")
    sq = deriv.fixed_locus(Derivation(line, {"x": "x^2"}, spot_checks=5))
    assert sq.divisorial == line.parse("x^2")
    scaled = deriv.fixed_locus(Derivation(line, {"x": "2*x^2+2*x"}, spot_checks=5))
    assert scaled.divisorial == line.parse("x+x^2")


FIELDS = [
    lambda: Derivation(plane(5), {"x": "1+y^2", "y": "x*y+3"}, spot_checks=0, classify=False),
    lambda: Derivation(
        RingSpec.polynomial(3, ["x", "y"]).radical_extension("t", "x"), {"y": "y", "t": "t^2"}, spot_checks=0, classify=False
    ),
    lambda: Derivation(RingSpec.crossing_ring(5, truncate=6), {"x": "x", "y": "2*y"}, spot_checks=0, classify=False),
    lambda: Derivation(plane(3, truncate=4), {"x": "x", "y": "x*y"}, spot_checks=0, classify=False),
    lambda: Derivation(RingSpec.polynomial(3, ["s", "y"], localize="s"), {"s": "s", "y": "s*y"}, spot_checks=0, classify=False),
]


@pytest.mark.parametrize("which", range(len(FIELDS)))
@given(seed=st.integers(0, 10 ** 6))
@settings(max_examples=PROPERTY_EXAMPLES, deadline=None)
def test_leibniz_rule(which, seed):
    D = FIELDS[which]()
    R = D.spec
    rng = random.Random(seed)
    a, b = R.random_element(rng), R.random_element(rng)
    assert D(a * b) == a * D(b) + b * D(a)


@pytest.mark.parametrize("which", range(len(FIELDS)))
@given(seed=st.integers(0, 10 ** 6))
@settings(max_examples=PROPERTY_EXAMPLES, deadline=None)
def test_pth_powers_are_constants(which, seed):
    D = FIELDS[which]()
    a = D.spec.random_element(random.Random(seed))
    assert D(a ** D.p) == 0


@pytest.mark.parametrize(
    "p, images, dtype",
    [
        (3, {"x": "1"}, DerivationType.ADDITIVE),
        (5, {"x": "1", "y": "x"}, DerivationType.ADDITIVE),
        (5, {"x": "x", "y": "2*y"}, DerivationType.MULTIPLICATIVE),
        (7, {"x": "3*x", "y": "y"}, DerivationType.MULTIPLICATIVE),
    ],
)
def test_type_survives_unit_scaling(p, images, dtype):
    D = Derivation(plane(p), images, spot_checks=10)
    assert D.dtype is dtype
    for lam in range(1, p):
        assert D.scaled(lam).dtype is dtype


def test_hochschild_formula():
    R = plane(5)
    rng = random.Random(3)
    D = Derivation(R, {"x": "1", "y": "y"}, spot_checks=5)
    samples = [R.random_element(rng) for _ in range(6)]
    report = deriv.hochschild_check(R.parse("x+y"), D, samples)
    assert report.passed
    assert len(report) == 6


def test_additive_coaction_is_multiplicative():
    R = plane(3)
    rng = random.Random(7)
    D = Derivation(R, {"x": "1", "y": "x"}, spot_checks=5)
    pairs = [(R.random_element(rng), R.random_element(rng)) for _ in range(5)]
    report = deriv.coaction_check(D, pairs)
    assert all(r.status == PASS for r in report)


def test_coaction_needs_additive():
    D = Derivation(plane(5), {"x": "x"}, spot_checks=5)
    with pytest.raises(DerivationTypeError):
        deriv.coaction_check(D, [])


def test_exponential_map_length():
    R = plane(5)
    D = Derivation(R, {"x": "1"}, spot_checks=5)
    coeffs = deriv.exponential_map(D, R.parse("x^2"))
    assert len(coeffs) == 5
    assert coeffs[1] == R.parse("2*x") and coeffs[2].is_one() and coeffs[3] == 0
