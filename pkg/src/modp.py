"""Residue arithmetic mod a small prime and the combinatorial identities
behind the adjunction computations.

Every sum here is evaluated over the integers first and reduced mod p
afterwards, so reports can show both the exact value and its residue.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import linalg
from .errors import (
    DegenerateSizeError,
    InputError,
    InternalInconsistencyError,
    NotInvertibleError,
)
from .report import INFO, Record, Report, residue_text

logger = logging.getLogger(__name__)

MAX_PRIME = 31


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PrimeChar:
    """A validated prime 2 <= p <= 31 with factorial and inverse tables."""

    p: int
    factorials: Tuple[int, ...]
    inverses: Tuple[int, ...]

    @classmethod
    @lru_cache(maxsize=None)
    def of(cls, p: int) -> "PrimeChar":
        if not isinstance(p, int) or isinstance(p, bool):
            raise InputError(f"characteristic must be an integer, got {p!r}")
        if not 2 <= p <= MAX_PRIME or not is_prime(p):
            raise InputError(f"characteristic must be a prime in [2, {MAX_PRIME}], got {p}")
        facts = [1]
        for k in range(1, p):
            facts.append(facts[-1] * k % p)
        invs = [0] + [pow(k, p - 2, p) for k in range(1, p)]
        pc = cls(p, tuple(facts), tuple(invs))
        if facts[p - 1] != p - 1:
            raise InternalInconsistencyError(f"Wilson's theorem fails for p={p}")
        if any(k * invs[k] % p != 1 for k in range(1, p)):
            raise InternalInconsistencyError(f"inverse table broken for p={p}")
        return pc

    def residue(self, a: int) -> int:
        return a % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise NotInvertibleError(f"0 has no inverse mod {self.p}")
        return self.inverses[a]

    def signed(self, a: int) -> int:
        """Representative in (-p/2, p/2]."""
        a %= self.p
        return a - self.p if 2 * a > self.p else a

    def factorial(self, k: int) -> int:
        if 0 <= k < self.p:
            return self.factorials[k]
        return 0

    def falling(self, k: int, nu: int) -> int:
        """k(k-1)...(k-nu+1) mod p."""
        out = 1
        for i in range(nu):
            out = out * (k - i) % self.p
        return out


def wilson_check(pc: PrimeChar) -> Record:
    got = factorial(pc.p - 1) % pc.p
    return Record.check(
        "wilson", pc.p, residue_text(-1, pc.p, -1), residue_text(got, pc.p, -1 if got == pc.p - 1 else None)
    )


# -- polynomials in one variable over Z/p -----------------------------------


@dataclass(frozen=True)
class ZpPoly:
    """Dense polynomial over Z/p, lowest degree first, no trailing zeros."""

    p: int
    coeffs: Tuple[int, ...]

    @classmethod
    def make(cls, p: int, coeffs: Sequence[int]) -> "ZpPoly":
        cs = [c % p for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        if len(cs) - 1 > 2 * p:
            raise InternalInconsistencyError(f"polynomial degree {len(cs) - 1} exceeds 2p")
        return cls(p, tuple(cs))

    @classmethod
    def constant(cls, p: int, c: int) -> "ZpPoly":
        return cls.make(p, [c])

    @classmethod
    def linear(cls, p: int, root: int) -> "ZpPoly":
        """x - root."""
        return cls.make(p, [-root, 1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "ZpPoly") -> "ZpPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return ZpPoly.make(self.p, [x + y for x, y in zip(a, b)])

    def __neg__(self) -> "ZpPoly":
        return ZpPoly.make(self.p, [-c for c in self.coeffs])

    def __sub__(self, other: "ZpPoly") -> "ZpPoly":
        return self + (-other)

    def __mul__(self, other: "ZpPoly") -> "ZpPoly":
        if self.is_zero() or other.is_zero():
            return ZpPoly(self.p, ())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return ZpPoly.make(self.p, out)

    def __pow__(self, n: int) -> "ZpPoly":
        out = ZpPoly.constant(self.p, 1)
        for _ in range(n):
            out = out * self
        return out

    def derivative(self) -> "ZpPoly":
        return ZpPoly.make(self.p, [i * c for i, c in enumerate(self.coeffs)][1:])

    def evaluate(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.p
        return acc

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"{c}*{mono}")
        return "+".join(parts)


def binomial_mod(n: int, k: int, pc: PrimeChar) -> int:
    """C(n, k) mod p by Lucas' theorem."""
    if k < 0 or n < 0 or k > n:
        return 0
    p = pc.p
    out = 1
    while n or k:
        ni, ki = n % p, k % p
        if ki > ni:
            return 0
        out = out * pc.factorials[ni] * pc.inverses[pc.factorials[ki]] * pc.inverses[pc.factorials[ni - ki]] % p
        n //= p
        k //= p
    return out


def projector_polys(pc: PrimeChar) -> List[ZpPoly]:
    """[f_0, ..., f_{p-1}] with f_k = -prod_{i != k} (x - i)."""
    p = pc.p
    polys = []
    for k in range(p):
        f = ZpPoly.constant(p, -1)
        for i in range(p):
            if i != k:
                f = f * ZpPoly.linear(p, i)
        polys.append(f)
    return polys


def projector_identity_suite(pc: PrimeChar) -> Report:
    p = pc.p
    fs = projector_polys(pc)
    x = ZpPoly.make(p, [0, 1])
    report = Report(f"projector identities p={p}")

    total = ZpPoly(p, ())
    for f in fs:
        total = total + f
    report.add(Record.check("projector_sum", p, "1", str(total)))

    power_sum = ZpPoly(p, ())
    for k, f in enumerate(fs):
        shifted = ZpPoly.linear(p, k) ** (p - 2)
        power_sum = power_sum + shifted
        report.add(Record.check("projector_derivative", p, str(shifted), str(f.derivative()), k=k))
        report.add(
            Record.check("projector_vanishing", p, str(x - x ** p), str(ZpPoly.linear(p, k) * f), k=k)
        )
        values = [f.evaluate(j) for j in range(p)]
        delta = [1 if j == k else 0 for j in range(p)]
        report.add(Record.check("projector_delta", p, delta, values, k=k))
    report.add(Record.check("projector_power_sum", p, "0", str(power_sum)))
    return report


def vandermonde_det(pc: PrimeChar) -> int:
    """det [k^s]_{s,k=1..p-1}, by row reduction and by the product formula."""
    p = pc.p
    if p == 2:
        raise DegenerateSizeError("the power matrix is 1x1 for p=2")
    n = p - 1
    A = np.array([[pow(k, s, p) for k in range(1, p)] for s in range(1, p)], dtype=np.int64)
    reduced = linalg.det(A, p)
    product = factorial(n)
    for i in range(1, p):
        for j in range(i + 1, p):
            product *= j - i
    product %= p
    if reduced != product or reduced == 0:
        raise InternalInconsistencyError(
            f"power matrix determinant mismatch for p={p}: reduction {reduced}, formula {product}"
        )
    return reduced


def vandermonde_report(pc: PrimeChar) -> Report:
    p = pc.p
    report = Report(f"power matrix p={p}")
    det = vandermonde_det(pc)
    report.add(Record.flag("vandermonde_unit", p, det != 0, got=det != 0, det=det))
    bare = 1
    for i in range(1, p):
        for j in range(i + 1, p):
            bare = bare * (i - j) % p
    report.add(Record.info("vandermonde_bare_product", p, det, bare))
    return report


@dataclass(frozen=True)
class WeightedSum:
    k: int
    exact: int
    residue: int
    alternating: int
    first_moment: int


def weighted_binom_sum(k: int, pc: PrimeChar) -> WeightedSum:
    """sum_{s=1}^k (-1)^s (2s-1) C(k,s), with its two building blocks."""
    if k < 1:
        raise InputError(f"k must be at least 1, got {k}")
    alternating = sum((-1) ** s * comb(k, s) for s in range(1, k + 1))
    first_moment = sum((-1) ** s * s * comb(k, s) for s in range(1, k + 1))
    exact = 2 * first_moment - alternating
    direct = sum((-1) ** s * (2 * s - 1) * comb(k, s) for s in range(1, k + 1))
    if direct != exact:
        raise InternalInconsistencyError(f"weighted sum split disagrees for k={k}")
    if alternating != -1:
        raise InternalInconsistencyError(f"alternating binomial sum is {alternating} for k={k}")
    return WeightedSum(k, exact, exact % pc.p, alternating, first_moment)


def weighted_sum_report(pc: PrimeChar, k_max: Optional[int] = None) -> Report:
    p = pc.p
    report = Report(f"weighted sums p={p}")
    for k in range(1, (k_max or 2 * p) + 1):
        ws = weighted_binom_sum(k, pc)
        if k == 1:
            report.add(Record.info("weighted_binom_sum", p, 1, ws.exact, k=k))
            continue
        report.add(Record.check("weighted_binom_sum", p, 1, ws.exact, k=k))
        report.add(Record.check("first_moment_sum", p, 0, ws.first_moment, k=k))
    return report


# -- counting oracles --------------------------------------------------------


@lru_cache(maxsize=None)
def _strict_buckets(p: int) -> Dict[Tuple[int, int], int]:
    buckets: Dict[Tuple[int, int], int] = {}
    for nu in range(p):
        for combo in itertools.combinations(range(1, p), nu):
            key = (nu, sum(combo) % p)
            buckets[key] = buckets.get(key, 0) + 1
    return buckets


def subset_count(pc: PrimeChar, nu: int, k: int) -> int:
    """#{1 <= i_1 < ... < i_nu <= p-1 : sum = -k mod p}, by enumeration."""
    p = pc.p
    if not 0 <= nu <= p - 1:
        return 0
    return _strict_buckets(p).get((nu, (-k) % p), 0)


def subset_count_table(pc: PrimeChar, multiset: bool = False) -> List[List[int]]:
    """table[nu][r]: number of nu-element (multi)sets of 1..p-1 with sum = r mod p."""
    p = pc.p
    top = p if multiset else p - 1
    table = [[0] * p for _ in range(top + 1)]
    table[0][0] = 1
    for v in range(1, p):
        sizes = range(1, top + 1) if multiset else range(top, 0, -1)
        for nu in sizes:
            row = table[nu]
            prev = table[nu - 1]
            for r in range(p):
                row[(r + v) % p] += prev[r]
    return table


def multiset_count(pc: PrimeChar, nu: int, k: int) -> int:
    """#{1 <= i_1 <= ... <= i_nu <= p-1 : sum = -k mod p}."""
    if not 0 <= nu <= pc.p:
        return 0
    return subset_count_table(pc, multiset=True)[nu][(-k) % pc.p]


def multiset_count_enumerated(pc: PrimeChar, nu: int, k: int) -> int:
    p = pc.p
    return sum(1 for c in itertools.combinations_with_replacement(range(1, p), nu) if (sum(c) + k) % p == 0)


@dataclass(frozen=True)
class ClosedForm:
    nu: int
    k: int
    closed: int
    recursion: int


def dk_closed_form(pc: PrimeChar, nu: int, k: int = 1) -> ClosedForm:
    """Closed form (1/p) sum_{s<nu} (-1)^s C(p, nu-s) and the delta recursion."""
    p = pc.p
    if not 1 <= nu <= p - 1:
        raise InputError(f"nu must lie in 1..{p - 1}, got {nu}")
    total = sum((-1) ** s * comb(p, nu - s) for s in range(nu))
    if total % p:
        raise InternalInconsistencyError(f"closed form not integral: {total}/{p}")
    delta = 1 if k % p == 0 else 0
    for j in range(1, nu + 1):
        head = factorial(j) * comb(p, j)
        if head % p:
            raise InternalInconsistencyError(f"recursion head not integral at j={j}")
        delta = head // p - j * delta
    if delta % factorial(nu):
        raise InternalInconsistencyError(f"recursion value {delta} not divisible by {nu}!")
    return ClosedForm(nu, k % p, total // p, delta // factorial(nu))


def counting_oracle_report(pc: PrimeChar) -> Report:
    p = pc.p
    report = Report(f"counting oracle p={p}")
    table = subset_count_table(pc)
    for nu in range(1, p):
        for k in range(p):
            oracle = subset_count(pc, nu, k)
            cf = dk_closed_form(pc, nu, k)
            report.add(Record.check("subset_count_table", p, oracle, table[nu][(-k) % p], nu=nu, k=k))
            report.add(Record.check("dk_recursion", p, oracle, cf.recursion, nu=nu, k=k))
            if k:
                report.add(Record.check("dk_closed_form", p, oracle, cf.closed, nu=nu, k=k))
            else:
                report.add(Record.info("dk_closed_form", p, oracle, cf.closed, nu=nu, k=k))
                report.add(Record.check("dk_closed_form_offset", p, (-1) ** nu, oracle - cf.closed, nu=nu, k=k))
    return report


def _dk_sums(counts: Sequence[int]) -> Tuple[int, int]:
    """(d_k, d~_k) from counts[s] = d_k(s) for s = 0..p."""
    p = len(counts) - 1
    d = sum((-1) ** s * (2 * s - 1) * counts[s] for s in range(2, p + 1))
    d_tilde = sum((-1) ** (s + 1) * (2 * s - 1) * counts[s] for s in range(1, p))
    return d, d_tilde


def dk_residue_audit(pc: PrimeChar) -> Report:
    """d_k and d~_k for every k, from strict and multiset counts."""
    p = pc.p
    report = Report(f"d_k audit p={p}")
    multi = subset_count_table(pc, multiset=True)
    for k in range(p):
        strict_counts = [subset_count(pc, s, k) for s in range(p)] + [0]
        multi_counts = [multi[s][(-k) % p] for s in range(p + 1)]
        d, d_tilde = _dk_sums(strict_counts)
        md, md_tilde = _dk_sums(multi_counts)
        if k == 0:
            report.add(Record.info("dk_tilde", p, residue_text(2, p), residue_text(d_tilde, p), k=k, exact=d_tilde))
        elif p == 2:
            report.add(Record.info("dk_tilde", p, residue_text(-2, p, -2), residue_text(d_tilde, p), k=k, exact=d_tilde))
        else:
            aliased = residue_text(d_tilde, p, -2 if (d_tilde + 2) % p == 0 else None)
            report.add(Record.check("dk_tilde", p, residue_text(-2, p, -2), aliased, k=k, exact=d_tilde))
        report.add(Record.info("dk", p, 0, residue_text(d, p), k=k, exact=d, counting="strict"))
        report.add(Record.info("dk", p, 0, residue_text(md, p), k=k, exact=md, counting="multiset"))
        report.add(Record.info("dk_tilde_multiset", p, residue_text(-2, p), residue_text(md_tilde, p), k=k, exact=md_tilde))
    return report


def identity_suite(pc: PrimeChar, include_counts: bool = True) -> Report:
    """Everything this module can check for one prime."""
    p = pc.p
    report = Report(f"identities p={p}")
    report.add(wilson_check(pc))
    report.extend(projector_identity_suite(pc))
    if p >= 3:
        report.extend(vandermonde_report(pc))
    report.extend(weighted_sum_report(pc))
    if include_counts:
        report.extend(counting_oracle_report(pc))
        report.extend(dk_residue_audit(pc))
    logger.debug("identity suite p=%d: %d records", p, len(report))
    return report


# -- univariate helpers -------------------------------------------------------


def poly_divmod(a: Sequence[int], b: Sequence[int], p: int) -> Tuple[List[int], List[int]]:
    a = [c % p for c in a]
    b = [c % p for c in b]
    while b and b[-1] == 0:
        b.pop()
    if not b:
        raise NotInvertibleError("division by the zero polynomial")
    inv = pow(b[-1], p - 2, p)
    q = [0] * max(len(a) - len(b) + 1, 1)
    while True:
        while a and a[-1] == 0:
            a.pop()
        if len(a) < len(b):
            break
        shift = len(a) - len(b)
        c = a[-1] * inv % p
        q[shift] = c
        for i, bc in enumerate(b):
            a[i + shift] = (a[i + shift] - c * bc) % p
    return q, a


def poly_gcd(a: Sequence[int], b: Sequence[int], p: int) -> List[int]:
    """Monic gcd of two coefficient lists (lowest degree first)."""
    a = [c % p for c in a]
    b = [c % p for c in b]
    while b and any(b):
        _, r = poly_divmod(a, b, p)
        a, b = b, r
    while a and a[-1] == 0:
        a.pop()
    if not a:
        return []
    inv = pow(a[-1], p - 2, p)
    return [c * inv % p for c in a]
