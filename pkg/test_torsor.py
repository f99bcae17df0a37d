import random

import pytest

from src import torsor
from src.deriv import Derivation
from src.errors import InputError, PreconditionError
from src.modp import PrimeChar
from src.report import FAIL, INFO, PASS
from src.ring import RingSpec


@pytest.fixture
def two_charts():
    return torsor.TorsorData.build(2, ["s^3+s", "s^-1+s^-3"], {(0, 1): ("s^-2", "0")})


def test_two_chart_example_is_valid(two_charts):
    report = torsor.validate(two_charts)
    assert report.passed
    assert len(report.named("c_compatibility")) == 2
    assert two_charts.a(1, 0) == two_charts.base.parse("s^2")
    assert two_charts.gamma(1, 0).is_zero()


def test_every_mutant_is_rejected(two_charts):
    sweep = torsor.mutation_sweep(two_charts, (-8, 8))
    assert len(sweep) == 51
    assert sweep.passed


def test_bad_compatibility_is_reported(two_charts):
    broken = two_charts.with_c(1, two_charts.base.parse("s^-1"))
    report = torsor.validate(broken)
    assert [r.status for r in report.named("c_compatibility")] == [FAIL, FAIL]


def test_missing_or_reversed_edges():
    with pytest.raises(InputError):
        torsor.TorsorData.build(2, ["s", "s"], {})
    with pytest.raises(InputError):
        torsor.TorsorData.build(2, ["s", "s"], {(1, 0): ("1", "0")})


def test_non_unit_transition_is_flagged():
    T = torsor.TorsorData.build(3, ["s", "s"], {(0, 1): ("1+s", "0")})
    report = torsor.validate(T)
    assert report.named("transition_unit")[0].status == FAIL
    assert len(report) == 1


def test_reverse_gamma_convention():
    T = torsor.TorsorData.build(3, ["s^3", "1+s^3"], {(0, 1): ("1", "1")})
    assert T.gamma(1, 0) == T.base.parse("-1")
    assert torsor.validate(T).passed


def test_transition_exponents(two_charts):
    report = torsor.transition_exponent_data(two_charts)
    assert report.passed
    assert report.named("normal_exponent")[0].got == -4
    assert report.named("dualizing_exponent")[0].got == 2


def test_split_gluing(two_charts):
    report = torsor.glued_derivation_check(two_charts, torsor.SPLIT)
    assert report.passed
    assert {r.got for r in report.named("chart_type")} == {"multiplicative"}


def test_section_gluing(two_charts):
    report = torsor.glued_derivation_check(two_charts, torsor.SECTION, ["1", "s^-2"])
    assert report.passed
    assert {r.got for r in report.named("chart_type")} == {"additive"}


def test_section_rule_direction_matters(two_charts):
    report = torsor.glued_derivation_check(two_charts, torsor.SECTION, ["1", "s^2"])
    assert [r.status for r in report.named("section_rule")] == [FAIL, FAIL]


def test_gluing_preconditions(two_charts):
    twisted = two_charts.with_gamma((0, 1), two_charts.base.one())
    with pytest.raises(PreconditionError):
        torsor.glued_derivation_check(twisted, torsor.SPLIT)
    with pytest.raises(InputError):
        torsor.glued_derivation_check(two_charts, torsor.SECTION, ["1"])
    with pytest.raises(InputError):
        torsor.glued_derivation_check(two_charts, "sideways")


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_local_dualizing_generator(p):
    pc = PrimeChar.of(p)
    gen = torsor.local_dualizing_generator(pc, RingSpec.polynomial(pc, ["x"]).parse("x"))
    assert list(gen.values) == [0] * (p - 1) + [p - 1]
    assert gen.certificate().passed


def test_represent_recovers_generator():
    pc = PrimeChar.of(3)
    gen = torsor.local_dualizing_generator(pc, RingSpec.polynomial(pc, ["x"]).parse("x"))
    assert gen.represent([0, 0, 2]).is_one()
    t = gen.model.var("t")
    assert gen.represent([0, 2, 0]) == t
    with pytest.raises(InputError):
        gen.represent([0, 1])


@pytest.mark.parametrize("p", [2, 3, 5])
def test_adjunction_identities(p):
    pc = PrimeChar.of(p)
    model, _ = torsor.adjunction_model(pc, "x")
    samples = torsor.random_adjunction_samples(model, random.Random(p), 6)
    report = torsor.adjunction_identity_check(pc, "x", samples)
    assert report.passed
    assert len(report.named("adjunction_power")) == 6 * p


def test_adjunction_with_nonconstant_radicand():
    pc = PrimeChar.of(3)
    samples = [("t", "x+t", "x*t"), ("t^2", "1+t", "2*x+t^2")]
    assert torsor.adjunction_identity_check(pc, "1+x^2", samples).passed


def test_adjunction_sample_arity():
    with pytest.raises(InputError):
        torsor.adjunction_identity_check(PrimeChar.of(3), "x", [("t", "t")])


def test_crossing_fixed_ideal():
    assert torsor.crossing_fixed_ideal_check(PrimeChar.of(3), "x", "y", 10).passed


def test_crossing_degenerate_sum():
    report = torsor.crossing_fixed_ideal_check(PrimeChar.of(2), "1", "1", 6)
    assert [(r.name, r.status) for r in report] == [("degenerate_sum", INFO)]


def test_crossing_unit_f_at_p2_is_reported_as_fail():
    # D = x d/dx + y(1+y) d/dy: (x, y+y^2) is strictly larger than (y^2)
    report = torsor.crossing_fixed_ideal_check(PrimeChar.of(2), "1", "1+y", 6)
    assert not report.passed
    assert [r.got for r in report.failures] == ["x", "y+y^2"]
    assert {r.name for r in report.failures} == {"fixed_power_in_product"}
    assert [(r.name, r.status) for r in report if r.name == "product_in_fixed_power"] == [
        ("product_in_fixed_power", PASS)
    ]


def test_crossing_rejects_mixed_series():
    with pytest.raises(InputError):
        torsor.crossing_fixed_ideal_check(PrimeChar.of(3), "y", "y", 6)


@pytest.fixture
def partial9():
    spec = RingSpec.polynomial(3, ["x"], truncate=9)
    return Derivation(spec, {"x": "1"}, spot_checks=5)


def test_local_torsor_algebra(partial9):
    spec = partial9.spec
    x = spec.var("x")
    algebra = torsor.build_local_torsor_algebra(
        partial9, (spec.one(), x), samples=[(x, 1 + x), (spec.parse("x^3"), spec.parse("2"))]
    )
    assert algebra.report.passed
    assert [r.got for r in algebra.report.named("psi_injective")] == [9]
    u = algebra.spec.var("u")
    assert algebra.psi(u ** 2) == spec.parse("x^2")


def test_local_torsor_algebra_preconditions(partial9):
    spec = partial9.spec
    x = spec.var("x")
    with pytest.raises(InputError):
        torsor.build_local_torsor_algebra(partial9, (x, x))
    with pytest.raises(PreconditionError):
        torsor.build_local_torsor_algebra(partial9, (spec.one(), x ** 2))
    wrong = torsor.build_local_torsor_algebra(partial9, (spec.one(), x), (spec.one(), x ** 3 + 1))
    assert wrong.report.named("lambda_on_z")[0].status == FAIL
