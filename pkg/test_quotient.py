import random

import pytest

from src import modp, quotient
from src.deriv import Derivation
from src.errors import (
    DerivationTypeError,
    InputError,
    InternalInconsistencyError,
    PreconditionError,
)
from src.report import FAIL, PASS
from src.ring import RingSpec


@pytest.fixture
def euler5():
    return Derivation(RingSpec.polynomial(5, ["x", "y"]), {"x": "x", "y": "2*y"}, spot_checks=10)


@pytest.fixture
def radical_field():
    spec = RingSpec.polynomial(3, ["x", "y"]).radical_extension("t", "x")
    return Derivation(spec, {"t": "t^2"}, spot_checks=10)


def test_invariants_of_weighted_euler_field(euler5):
    inv = quotient.invariants_basis(euler5, 5)
    assert [str(b) for b in inv.basis] == ["1", "x*y^2", "x^3*y", "x^5", "y^5"]
    assert str(inv) == "invariants deg<=5: {1, x*y^2, x^3*y, x^5, y^5}"
    assert inv.contains(euler5.spec.parse("x^5+2*y^5"))
    assert not inv.contains(euler5.spec.parse("x"))


def test_eigen_dimensions_add_up(euler5):
    assert quotient.eigen_dimension_check(euler5, 6).status == PASS
    L2 = quotient.eigen_basis(euler5, 3, 2)
    assert sorted(str(b) for b in L2.basis) == ["x^2", "y"]


def test_eigen_decomposition(euler5):
    R = euler5.spec
    parts = quotient.eigen_decompose(euler5, R.parse("x+y+1"))
    assert parts[0].is_one()
    assert parts[1] == R.parse("x")
    assert parts[2] == R.parse("y")
    assert all(x.is_zero() for x in parts[3:])
    assert quotient.eigen_project(euler5, R.parse("x*y+y"), 3) == R.parse("x*y")


def test_eigenspaces_need_multiplicative(radical_field):
    with pytest.raises(DerivationTypeError):
        quotient.eigen_basis(radical_field, 2, 1)


def test_grading_is_multiplicative(euler5):
    rng = random.Random(11)
    R = euler5.spec
    pairs = [(R.random_element(rng), R.random_element(rng)) for _ in range(4)]
    assert quotient.grading_check(euler5, pairs).passed


def test_broken_projectors_are_caught(euler5, monkeypatch):
    good = modp.projector_polys(euler5.spec.pc)
    monkeypatch.setattr(modp, "projector_polys", lambda pc: good[1:] + good[:1])
    report = quotient.eigen_decomposition_report(euler5, [euler5.spec.parse("x+y")])
    assert report.records[0].status == FAIL
    with pytest.raises(InternalInconsistencyError):
        quotient.eigen_decompose(euler5, euler5.spec.parse("x"))


def test_radical_filtration(radical_field):
    D = radical_field
    E0 = quotient.filtration_basis(D, 2, 0)
    E1 = quotient.filtration_basis(D, 2, 1)
    E2 = quotient.filtration_basis(D, 2, 2)
    assert (E0.dim, E1.dim, E2.dim) == (6, 12, 18)
    assert all(not b.involves("t") for b in E0.basis)
    assert "t^2" in [str(b) for b in E1.basis]
    assert "t" not in [str(b) for b in E1.basis]
    _, report = quotient.filtration_chain(D, 2)
    assert report.passed
    assert len(report.named("filtration_strict")) == 2
    with pytest.raises(InputError):
        quotient.filtration_basis(D, 2, 3)


def test_radical_tau_cokernel(radical_field):
    tau = quotient.mult_map_analysis(radical_field, 1, 2, 2)
    assert tau.family == "tau"
    assert [str(x) for x in tau.cokernel] == ["t", "y*t", "y^2*t"]
    assert tau.image_contains(radical_field.spec.parse("x*t"))
    assert tau.report.passed


def test_sigma_map_is_onto_in_low_degree():
    D = Derivation(RingSpec.polynomial(3, ["x", "y"]), {"x": "x", "y": "y"}, spot_checks=10)
    sigma = quotient.mult_map_analysis(D, 1, 2, 4)
    assert sigma.family == "sigma"
    assert sigma.cokernel == []
    assert sorted(str(x) for x in sigma.image) == ["x*y", "x^2", "y^2"]
    assert sigma.report.passed
    with pytest.raises(InputError):
        quotient.mult_map_analysis(D, 1, 0, 4)


def test_z_for_plain_partial():
    spec = RingSpec.polynomial(3, ["x"], truncate=9)
    D = Derivation(spec, {"x": "1"}, spot_checks=5)
    zsec = quotient.z_construct(D, spec.parse("x"))
    assert zsec.z == spec.parse("x")
    report = quotient.z_power_independence(D, zsec)
    assert report.passed
    assert [r.got for r in report] == [9, 9]


def test_z_for_unit_times_partial():
    spec = RingSpec.polynomial(3, ["x"], truncate=9)
    D = Derivation(spec, {"x": "1+x^3"}, spot_checks=5)
    zsec = quotient.z_construct(D, spec.parse("x+x^2"))
    assert D.apply(zsec.z).is_one()
    assert all(D.apply(b).is_zero() for b in zsec.coeffs_b)
    assert quotient.z_power_independence(D, zsec).passed


def test_z_needs_truncation_and_additive(euler5):
    spec = RingSpec.polynomial(3, ["x"])
    D = Derivation(spec, {"x": "1"}, spot_checks=5)
    with pytest.raises(PreconditionError):
        quotient.z_construct(D, spec.parse("x"))
    with pytest.raises(DerivationTypeError):
        quotient.z_construct(euler5, euler5.spec.parse("x"))


def test_za_is_an_eigenvector(euler5):
    R = euler5.spec
    assert quotient.za_element(euler5, R.parse("x+y")) == R.parse("4*x")
    report = quotient.za_report(euler5, R.parse("y"))
    assert report.passed
    assert report.named("za_vanishes")[0].got is True


def test_truncation_stability():
    report = quotient.truncation_stability(modp.PrimeChar.of(3), "1+x^3", 9)
    record = report.records[0]
    assert record.status == PASS
    assert record.got == ["1", "x^3", "x^6"]


@pytest.mark.parametrize(
    "images, d",
    [
        ({"x": "x", "y": "2*y"}, 8),
        ({"x": "x^2", "y": "x*y"}, 7),
    ],
)
def test_truncation_stability_in_two_variables(images, d):
    report = quotient.truncation_stability(modp.PrimeChar.of(3), images, 9)
    record = report.records[0]
    assert record.status == PASS
    assert record.params["d"] == d
    assert "1" in record.got
