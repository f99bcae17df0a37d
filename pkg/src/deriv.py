"""Derivations given by their values on the ring generators."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from . import modp
from .config import DEFAULT_SETTINGS
from .errors import (
    DerivationTypeError,
    InputError,
    InternalInconsistencyError,
    InvalidDerivationError,
    PreconditionError,
    UnknownVariableError,
    ZeroDerivationError,
)
from .report import Record, Report
from .ring import RingElem, RingSpec

logger = logging.getLogger(__name__)


class DerivationType(str, Enum):
    ADDITIVE = "additive"
    MULTIPLICATIVE = "multiplicative"
    NEITHER = "neither"
    UNCLASSIFIED = "unclassified"


class Derivation:
    """D on ``spec`` with D(x_i) = images[x_i]; classified at construction.

    The p-th power of a derivation is again a derivation, so the type is
    decided on the generators and spot-checked on random elements.
    """

    def __init__(
        self,
        spec: RingSpec,
        images: Mapping[str, Union[RingElem, str]],
        spot_checks: Optional[int] = None,
        seed: int = 0,
        validate: bool = True,
        classify: bool = True,
    ):
        for name in images:
            if name not in spec.vars:
                raise UnknownVariableError(name)
        imgs = []
        for v in spec.vars:
            value = images.get(v)
            if value is None:
                imgs.append(spec.zero())
            elif isinstance(value, str):
                imgs.append(spec.parse(value))
            else:
                imgs.append(spec.lift(value))
        self.spec = spec
        self.images: Tuple[RingElem, ...] = tuple(imgs)
        self.spot_checks = DEFAULT_SETTINGS.spot_checks if spot_checks is None else spot_checks
        self.seed = seed
        if validate:
            self._check_relations()
        self.dtype = self._classify() if classify else DerivationType.UNCLASSIFIED

    # -- basic protocol --------------------------------------------------------

    @property
    def p(self) -> int:
        return self.spec.p

    def image(self, name: str) -> RingElem:
        return self.images[self.spec.index(name)]

    def is_zero(self) -> bool:
        return all(img.is_zero() for img in self.images)

    def __str__(self) -> str:
        parts = [f"({img})*d/d{v}" for v, img in zip(self.spec.vars, self.images) if not img.is_zero()]
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"Derivation({self})"

    def _numerator_derivative(self, terms) -> RingElem:
        spec = self.spec
        out = spec.zero()
        for i, img in enumerate(self.images):
            if img.is_zero():
                continue
            partial = {}
            for e, c in terms.items():
                k = e[i]
                if k % spec.p:
                    partial[e[:i] + (k - 1,) + e[i + 1:]] = c * k
            if partial:
                out = out + spec.element(partial) * img
        return out

    def apply(self, a: RingElem) -> RingElem:
        if a.spec != self.spec:
            raise InputError(f"element of {a.spec.describe()} given to a derivation on {self.spec.describe()}")
        dn = self._numerator_derivative(a.terms)
        if not a.denom:
            return dn
        # D(N / s^d) = (D(N) s - d N D(s)) / s^(d+1)
        spec = self.spec
        s = spec.denominator_elem()
        ds = self._numerator_derivative(s.terms)
        numer = spec.element(a.terms)
        combo = dn * s - numer * ds * a.denom
        return spec.element(combo.terms, combo.denom + a.denom + 1)

    __call__ = apply

    def iterate(self, a: RingElem, k: int) -> RingElem:
        for _ in range(k):
            if a.is_zero():
                break
            a = self.apply(a)
        return a

    def scaled(self, w: Union[RingElem, int], spot_checks: Optional[int] = None) -> "Derivation":
        """The derivation w*D."""
        w = self.spec.const(w) if isinstance(w, int) else self.spec.lift(w)
        images = {v: w * img for v, img in zip(self.spec.vars, self.images)}
        return Derivation(self.spec, images, self.spot_checks if spot_checks is None else spot_checks, self.seed)

    # -- validity ------------------------------------------------------------------

    def _check_relations(self) -> None:
        spec = self.spec
        if spec.radical is not None:
            dc = self.apply(spec.radicand_elem())
            if not dc.is_zero():
                raise InvalidDerivationError(f"D(radicand) = {dc} must vanish for {spec.describe()}")
        if spec.crossing is not None:
            x, y = spec.crossing
            dxy = spec.var(x) * self.image(y) + spec.var(y) * self.image(x)
            if not dxy.is_zero():
                raise InvalidDerivationError(f"D({x}*{y}) = {dxy} does not lie in ({x}*{y})")
        if spec.truncate is not None and spec.denominator is None:
            self._check_truncation()

    def _check_truncation(self) -> None:
        """D must map the truncation ideal into itself."""
        spec = self.spec
        N = spec.truncate
        free = spec.without_truncation()
        lifted = Derivation(free, {v: free.element(img.terms) for v, img in zip(spec.vars, self.images)},
                            validate=False, classify=False)
        for e in free.monomial_exponents(N):
            if free.base_degree(e) != N:
                continue
            dm = lifted.apply(free.element({e: 1}))
            low = [f for f in dm.terms if free.base_degree(f) < N]
            if low:
                raise InvalidDerivationError(
                    f"D does not preserve the truncation ideal: D({free.element({e: 1})}) = {dm}"
                )

    # -- classification ----------------------------------------------------------

    def _classify(self) -> DerivationType:
        if self.is_zero():
            return DerivationType.UNCLASSIFIED
        p = self.p
        gens = self.spec.gens()
        powers = [self.iterate(g, p) for g in gens]
        if all(x.is_zero() for x in powers):
            dtype = DerivationType.ADDITIVE
        elif all(x == img for x, img in zip(powers, self.images)):
            dtype = DerivationType.MULTIPLICATIVE
        else:
            dtype = DerivationType.NEITHER
        if dtype is not DerivationType.NEITHER and self.spot_checks:
            rng = random.Random(self.seed)
            for _ in range(self.spot_checks):
                r = self.spec.random_element(rng)
                got = self.iterate(r, p)
                want = self.spec.zero() if dtype is DerivationType.ADDITIVE else self.apply(r)
                if got != want:
                    raise InternalInconsistencyError(f"D^p disagrees with its generator values on {r}")
        logger.debug("classified %s as %s", self, dtype.value)
        return dtype

    def require(self, *allowed: DerivationType) -> None:
        if self.dtype is DerivationType.UNCLASSIFIED:
            raise ZeroDerivationError("the zero derivation is not allowed here")
        if self.dtype not in allowed:
            names = "/".join(t.value for t in allowed)
            raise DerivationTypeError(f"need a {names} derivation, got {self.dtype.value}")


def classify(D: Derivation) -> DerivationType:
    if D.dtype is DerivationType.UNCLASSIFIED:
        raise ZeroDerivationError("the zero derivation has no type")
    return D.dtype


def apply(D: Derivation, a: RingElem) -> RingElem:
    return D.apply(a)


def iterate(D: Derivation, a: RingElem, k: int) -> RingElem:
    return D.iterate(a, k)


# -- fixed locus ------------------------------------------------------------------------


@dataclass
class FixedLocus:
    generators: List[RingElem]
    is_free: bool
    divisorial: Optional[RingElem]
    method: str

    def to_dict(self) -> Dict[str, object]:
        return {
            "generators": [str(g) for g in self.generators],
            "free": self.is_free,
            "divisorial": "not computed" if self.divisorial is None else str(self.divisorial),
            "method": self.method,
        }

    def __str__(self) -> str:
        gens = ", ".join(str(g) for g in self.generators)
        div = "not computed" if self.divisorial is None else str(self.divisorial)
        return f"({gens}) free={self.is_free} divisorial={div}"


def fixed_locus(D: Derivation) -> FixedLocus:
    """The ideal generated by D(A), with its divisorial part when computable."""
    if D.is_zero():
        raise ZeroDerivationError("the zero derivation has no fixed locus")
    spec = D.spec
    gens: List[RingElem] = []
    for img in D.images:
        if not img.is_zero() and img not in gens:
            gens.append(img)
    free = any(g.is_unit() for g in gens)
    if free:
        return FixedLocus(gens, True, spec.one(), "free")
    if all(g.is_monomial() and not g.denom for g in gens):
        exps = [next(iter(g.terms)) for g in gens]
        common = tuple(min(col) for col in zip(*exps))
        return FixedLocus(gens, False, spec.element({common: 1}), "monomial gcd")
    univariate = len(spec.vars) == 1 and spec.radical is None and spec.denominator is None
    if univariate and spec.truncate is not None:
        k = min(g.order() for g in gens)
        return FixedLocus(gens, False, spec.var(spec.vars[0]) ** k, "lowest order")
    if univariate:
        g = []
        for elem in gens:
            coeffs = [0] * (elem.degree() + 1)
            for (k,), c in elem.terms.items():
                coeffs[k] = c
            g = modp.poly_gcd(coeffs, g, spec.p)
        return FixedLocus(gens, False, spec.element({(k,): c for k, c in enumerate(g) if c}), "univariate gcd")
    return FixedLocus(gens, False, None, "not computed")


# -- Hochschild formula and the additive coaction -------------------------------------


def hochschild_check(w: RingElem, Dprime: Derivation, samples: Sequence[RingElem]) -> Report:
    """(wD)^p = w^p D^p + (wD)^{p-1}(w) D on every sample."""
    p = Dprime.p
    w = Dprime.spec.lift(w)
    wD = Dprime.scaled(w, spot_checks=0)
    correction = wD.iterate(w, p - 1)
    wp = w ** p
    report = Report("hochschild")
    for i, a in enumerate(samples):
        lhs = wD.iterate(a, p)
        rhs = wp * Dprime.iterate(a, p) + correction * Dprime.apply(a)
        report.add(Record.check("hochschild", p, str(rhs), str(lhs), w=str(w), sample=i))
    return report


def exponential_map(D: Derivation, a: RingElem) -> List[RingElem]:
    """Coefficients of tau^k in sum_k D^k(a)/k! tau^k, k = 0..p-1."""
    pc = D.spec.pc
    out = []
    current = a
    for k in range(D.p):
        out.append(current * pc.inv(pc.factorial(k)))
        current = D.apply(current)
    return out


def _tau_product(a: List[RingElem], b: List[RingElem]) -> List[RingElem]:
    n = len(a)
    out = []
    for k in range(n):
        acc = a[0].spec.zero()
        for i in range(k + 1):
            acc = acc + a[i] * b[k - i]
        out.append(acc)
    return out


def coaction_check(D: Derivation, pairs: Sequence[Tuple[RingElem, RingElem]]) -> Report:
    """The additive coaction a -> sum D^k(a)/k! tau^k (tau^p = 0) is multiplicative."""
    D.require(DerivationType.ADDITIVE)
    p = D.p
    report = Report("coaction")
    for i, (a, b) in enumerate(pairs):
        lhs = exponential_map(D, a * b)
        rhs = _tau_product(exponential_map(D, a), exponential_map(D, b))
        report.add(
            Record.check("coaction_hom", p, [str(x) for x in rhs], [str(x) for x in lhs], sample=i)
        )
    return report
