"""Tests for residue arithmetic and the counting identities."""

import itertools
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from src import modp
from src.errors import DegenerateSizeError, InputError
from src.modp import PrimeChar
from src.report import FAIL, PASS, residue_text

PRIMES = [2, 3, 5, 7, 11, 13]


@pytest.mark.parametrize("bad", [0, 1, 4, 9, 37, -3])
def test_prime_char_rejects_non_primes(bad):
    with pytest.raises(InputError):
        PrimeChar.of(bad)


def test_prime_char_tables():
    pc = PrimeChar.of(7)
    assert pc.factorial(6) == 6
    assert pc.factorial(7) == 0
    assert all(k * pc.inv(k) % 7 == 1 for k in range(1, 7))
    assert pc.signed(6) == -1
    assert pc.falling(5, 2) == 20 % 7
    assert PrimeChar.of(7) is pc


@pytest.mark.parametrize("p", PRIMES)
def test_wilson(p):
    assert modp.wilson_check(PrimeChar.of(p)).status == PASS


def test_residue_alias_rendering():
    assert residue_text(4, 5, -1) == "4 (≡ -1)"
    assert residue_text(3, 5) == "3"


def test_projector_polys_small_prime():
    fs = modp.projector_polys(PrimeChar.of(3))
    assert str(fs[0]) == "1+2*x^2"
    assert [f.degree for f in fs] == [2, 2, 2]


@pytest.mark.parametrize("p", PRIMES)
def test_projector_identity_suite_passes(p):
    report = modp.projector_identity_suite(PrimeChar.of(p))
    assert report.passed
    assert len(report.named("projector_delta")) == p


@pytest.mark.parametrize("p", PRIMES)
def test_projectors_are_indicator_functions(p):
    fs = modp.projector_polys(PrimeChar.of(p))
    for k, f in enumerate(fs):
        assert [f.evaluate(j) for j in range(p)] == [int(j == k) for j in range(p)]


def test_vandermonde_degenerate_for_two():
    with pytest.raises(DegenerateSizeError):
        modp.vandermonde_det(PrimeChar.of(2))


def test_vandermonde_p3_value():
    assert modp.vandermonde_det(PrimeChar.of(3)) == 2


@pytest.mark.parametrize("p", PRIMES[1:])
def test_vandermonde_nonzero(p):
    report = modp.vandermonde_report(PrimeChar.of(p))
    assert report.named("vandermonde_unit")[0].status == PASS
    assert modp.vandermonde_det(PrimeChar.of(p)) != 0


@pytest.mark.parametrize("k", range(2, 27))
def test_weighted_binom_sum_is_one(k):
    ws = modp.weighted_binom_sum(k, PrimeChar.of(13))
    assert ws.exact == 1
    assert ws.alternating == -1
    assert ws.first_moment == 0


def test_weighted_binom_sum_k1():
    assert modp.weighted_binom_sum(1, PrimeChar.of(3)).exact == -1
    with pytest.raises(InputError):
        modp.weighted_binom_sum(0, PrimeChar.of(3))


@given(st.sampled_from(PRIMES), st.integers(0, 200), st.integers(0, 200))
def test_lucas_matches_comb(p, n, k):
    assert modp.binomial_mod(n, k, PrimeChar.of(p)) == (comb(n, k) % p if k <= n else 0)


def test_subset_count_p5_k1():
    pc = PrimeChar.of(5)
    assert [modp.subset_count(pc, nu, 1) for nu in range(1, 5)] == [1, 1, 1, 0]


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_subset_table_matches_enumeration(p):
    pc = PrimeChar.of(p)
    table = modp.subset_count_table(pc)
    for nu in range(p):
        for k in range(p):
            assert table[nu][(-k) % p] == modp.subset_count(pc, nu, k)


@given(st.sampled_from([3, 5, 7]), st.integers(0, 3), st.integers(0, 12))
@settings(max_examples=60)
def test_multiset_count_matches_enumeration(p, nu, k):
    pc = PrimeChar.of(p)
    assert modp.multiset_count(pc, nu, k) == modp.multiset_count_enumerated(pc, nu, k)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_closed_form_for_nonzero_k(p):
    pc = PrimeChar.of(p)
    for nu, k in itertools.product(range(1, p), range(1, p)):
        cf = modp.dk_closed_form(pc, nu, k)
        assert cf.closed == modp.subset_count(pc, nu, k)
        assert cf.recursion == cf.closed


@pytest.mark.parametrize("p", [3, 5, 7])
def test_closed_form_offset_at_zero(p):
    pc = PrimeChar.of(p)
    for nu in range(1, p):
        cf = modp.dk_closed_form(pc, nu, 0)
        assert modp.subset_count(pc, nu, 0) - cf.closed == (-1) ** nu
        assert cf.recursion == modp.subset_count(pc, nu, 0)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_counting_oracle_and_audit_pass(p):
    pc = PrimeChar.of(p)
    assert modp.counting_oracle_report(pc).passed
    audit = modp.dk_residue_audit(pc)
    assert audit.passed
    checked = [r for r in audit.named("dk_tilde") if r.status != "INFO"]
    assert len(checked) == p - 1


def test_dk_tilde_exact_value_p5():
    audit = modp.dk_residue_audit(PrimeChar.of(5))
    k1 = [r for r in audit.named("dk_tilde") if r.params["k"] == 1][0]
    assert k1.params["exact"] == 3
    assert k1.got == "3 (≡ -2)"


@pytest.mark.parametrize("p", PRIMES)
def test_identity_suite(p):
    report = modp.identity_suite(PrimeChar.of(p), include_counts=p >= 3)
    assert report.passed
    assert report.count(FAIL) == 0


def test_poly_gcd():
    assert modp.poly_gcd([-1, 0, 1], [-1, 1], 3) == [2, 1]
    assert modp.poly_gcd([0, 0, 1], [0, 1], 5) == [0, 1]
    assert modp.poly_gcd([], [], 5) == []
