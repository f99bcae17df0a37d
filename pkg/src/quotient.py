"""Invariant rings, eigenspaces and the additive filtration, degree by degree.

All subspaces are computed inside the span of the normal-form monomials
of base degree <= d. Filtration steps follow E_k = ker D^(k+1), so
E_0 is the ring of invariants.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from . import linalg, modp
from .deriv import Derivation, DerivationType, fixed_locus
from .errors import (
    InputError,
    InternalInconsistencyError,
    PreconditionError,
    UnsupportedStabilityError,
    ZeroDerivationError,
)
from .report import INFO, Record, Report
from .ring import Exp, RingElem, RingSpec

logger = logging.getLogger(__name__)

INVARIANTS = "invariants"
EIGEN = "eigen"
FILTRATION = "filtration"


@dataclass
class GradedSubspace:
    spec: RingSpec
    degree_bound: int
    basis: List[RingElem]
    label: str
    k: Optional[int] = None

    @property
    def dim(self) -> int:
        return len(self.basis)

    def to_dict(self) -> Dict[str, object]:
        return {
            "label": self.label,
            "k": self.k,
            "degree_bound": self.degree_bound,
            "basis": [str(b) for b in self.basis],
        }

    def contains(self, elem: RingElem) -> bool:
        exps = _exps_for(self.spec, [elem] + self.basis, self.degree_bound)
        return _in_span(self.basis, elem, exps, self.spec.p)

    def __str__(self) -> str:
        tag = self.label if self.k is None else f"{self.label}({self.k})"
        return f"{tag} deg<={self.degree_bound}: {{{', '.join(str(b) for b in self.basis)}}}"


# -- coordinates ------------------------------------------------------------------------


def _exps_for(spec: RingSpec, elems: Sequence[RingElem], d: int) -> List[Exp]:
    seen = set(spec.monomial_exponents(min(d, spec.truncate - 1) if spec.truncate else d))
    for e in elems:
        seen.update(e.terms)
    return sorted(seen, key=spec.order_key)


def _vector(elem: RingElem, index: Dict[Exp, int], n: int) -> np.ndarray:
    if elem.denom:
        raise PreconditionError(f"{elem} has a denominator; subspaces need polynomial elements")
    v = np.zeros(n, dtype=np.int64)
    for e, c in elem.terms.items():
        if e not in index:
            raise InternalInconsistencyError(f"monomial {e} outside the coordinate window")
        v[index[e]] = c
    return v


def _matrix(elems: Sequence[RingElem], exps: Sequence[Exp]) -> np.ndarray:
    index = {e: i for i, e in enumerate(exps)}
    if not elems:
        return np.zeros((0, len(exps)), dtype=np.int64)
    return np.vstack([_vector(x, index, len(exps)) for x in elems])


def _in_span(rows: Sequence[RingElem], elem: RingElem, exps: Sequence[Exp], p: int) -> bool:
    if elem.is_zero():
        return True
    if not rows:
        return False
    return linalg.in_span(_matrix(rows, exps), _matrix([elem], exps)[0], p)


def _elem(spec: RingSpec, exps: Sequence[Exp], vec) -> RingElem:
    return spec.element({e: int(c) for e, c in zip(exps, vec) if c})


def _canonical(spec: RingSpec, exps: Sequence[Exp], vectors: np.ndarray) -> List[RingElem]:
    """Echelon basis with pivots at the highest monomials, sorted by pivot."""
    if vectors.size == 0 or vectors.shape[0] == 0:
        return []
    n = len(exps)
    R, pivots = linalg.row_reduce(vectors[:, ::-1], spec.p)
    rows = R[: len(pivots)][:, ::-1]
    order = sorted(range(len(pivots)), key=lambda r: n - 1 - pivots[r])
    return [_elem(spec, exps, rows[r]) for r in order]


def _kernel(spec: RingSpec, domain: List[Exp], images: List[RingElem]) -> List[RingElem]:
    codomain = sorted({e for img in images for e in img.terms}, key=spec.order_key)
    if not codomain:
        return [spec.element({e: 1}) for e in domain]
    M = _matrix(images, codomain).T
    null = linalg.nullspace(M, spec.p)
    return _canonical(spec, domain, null)


def _require_nonzero(D: Derivation) -> None:
    if D.is_zero():
        raise ZeroDerivationError("the zero derivation has no quotient")


# -- invariants, eigenspaces, filtration ---------------------------------------------------


def invariants_basis(D: Derivation, d: int) -> GradedSubspace:
    """Basis of {a : deg a <= d, D(a) = 0}."""
    _require_nonzero(D)
    spec = D.spec
    domain = spec.monomial_exponents(d)
    images = [D.apply(spec.element({e: 1})) for e in domain]
    basis = _kernel(spec, domain, images)
    for b in basis:
        if not D.apply(b).is_zero():
            raise InternalInconsistencyError(f"invariant basis element {b} is not killed by D")
    return GradedSubspace(spec, d, basis, INVARIANTS)


def _projector_coeffs(D: Derivation) -> List[Tuple[int, ...]]:
    return [f.coeffs for f in modp.projector_polys(D.spec.pc)]


def _components(D: Derivation, a: RingElem) -> List[RingElem]:
    p = D.p
    iterates = [a]
    for _ in range(p - 1):
        iterates.append(D.apply(iterates[-1]))
    out = []
    for coeffs in _projector_coeffs(D):
        acc = D.spec.zero()
        for j, c in enumerate(coeffs):
            if c:
                acc = acc + iterates[j] * c
        out.append(acc)
    return out


def eigen_decompose(D: Derivation, a: RingElem) -> List[RingElem]:
    """[f_0(D)(a), ..., f_{p-1}(D)(a)]; checked to be eigenvectors summing to a."""
    D.require(DerivationType.MULTIPLICATIVE)
    parts = _components(D, a)
    total = D.spec.zero()
    for k, r in enumerate(parts):
        if D.apply(r) != r * k:
            raise InternalInconsistencyError(f"projection {k} of {a} is not an eigenvector")
        total = total + r
    if total != a:
        raise InternalInconsistencyError(f"projections of {a} do not sum back")
    return parts


def eigen_project(D: Derivation, a: RingElem, k: int) -> RingElem:
    D.require(DerivationType.MULTIPLICATIVE)
    k %= D.p
    r = _components(D, a)[k]
    if D.apply(r) != r * k:
        raise InternalInconsistencyError(f"projection {k} of {a} is not an eigenvector")
    return r


def _check_stable(D: Derivation, domain: List[Exp], images: List[RingElem]) -> None:
    allowed = set(domain)
    for e, img in zip(domain, images):
        if any(f not in allowed for f in img.terms):
            raise UnsupportedStabilityError(
                f"D({D.spec.element({e: 1})}) = {img} leaves the degree window; use eigen_project"
            )


def eigen_basis(D: Derivation, d: int, k: int) -> GradedSubspace:
    """Basis of L_k = {a : D(a) = k a} in degrees <= d."""
    D.require(DerivationType.MULTIPLICATIVE)
    spec = D.spec
    k %= spec.p
    domain = spec.monomial_exponents(d)
    monos = [spec.element({e: 1}) for e in domain]
    images = [D.apply(m) for m in monos]
    _check_stable(D, domain, images)
    shifted = [img - m * k for img, m in zip(images, monos)]
    return GradedSubspace(spec, d, _kernel(spec, domain, shifted), EIGEN, k)


def eigen_dimension_check(D: Derivation, d: int) -> Record:
    dims = [eigen_basis(D, d, k).dim for k in range(D.p)]
    total = len(D.spec.monomial_exponents(d))
    return Record.check("eigen_dimension_sum", D.p, total, sum(dims), d=d, dims=dims)


def filtration_basis(D: Derivation, d: int, k: int) -> GradedSubspace:
    """Basis of E_k = ker D^(k+1) in degrees <= d."""
    D.require(DerivationType.ADDITIVE)
    spec = D.spec
    if not 0 <= k <= spec.p - 1:
        raise InputError(f"filtration index must lie in 0..{spec.p - 1}, got {k}")
    domain = spec.monomial_exponents(d)
    images = [D.iterate(spec.element({e: 1}), k + 1) for e in domain]
    return GradedSubspace(spec, d, _kernel(spec, domain, images), FILTRATION, k)


def _degree_non_increasing(D: Derivation) -> bool:
    spec = D.spec
    for v, img in zip(spec.vars, D.images):
        own = 0 if spec.radical is not None and v == spec.radical.var else 1
        if img.degree() > own:
            return False
    return True


def filtration_chain(D: Derivation, d: int) -> Tuple[List[GradedSubspace], Report]:
    spec = D.spec
    p = spec.p
    steps = [filtration_basis(D, d, k) for k in range(p)]
    report = Report("filtration chain")
    report.add(Record.check("filtration_bottom_invariants", p, [str(b) for b in invariants_basis(D, d).basis],
                            [str(b) for b in steps[0].basis], d=d))
    exps = spec.monomial_exponents(d)
    strict = _degree_non_increasing(D)
    for k in range(p - 1):
        lo, hi = steps[k], steps[k + 1]
        nested = all(_in_span(hi.basis, b, exps, p) for b in lo.basis)
        report.add(Record.flag("filtration_nested", p, nested, k=k, d=d))
        if strict:
            report.add(Record.flag("filtration_strict", p, hi.dim > lo.dim, got=f"{lo.dim}<{hi.dim}", k=k, d=d))
        else:
            report.add(Record.info("filtration_strict", p, "growth", f"{lo.dim},{hi.dim}", k=k, d=d))
    return steps, report


# -- multiplication maps --------------------------------------------------------------------


@dataclass
class MultMapAnalysis:
    family: str
    k: int
    tensor_power: int
    degree_bound: int
    source: GradedSubspace
    target: GradedSubspace
    image: List[RingElem]
    cokernel: List[RingElem]
    lower: List[RingElem] = field(default_factory=list)
    report: Report = field(default_factory=Report)

    def image_contains(self, elem: RingElem) -> bool:
        """Membership in the image plus the lower filtration step."""
        exps = _exps_for(self.source.spec, [elem] + self.image + self.lower, self.degree_bound)
        return _in_span(self.image + self.lower, elem, exps, self.source.spec.p)

    def to_dict(self) -> Dict[str, object]:
        return {
            "family": self.family,
            "k": self.k,
            "tensor_power": self.tensor_power,
            "degree_bound": self.degree_bound,
            "image": [str(x) for x in self.image],
            "cokernel": [str(x) for x in self.cokernel],
        }


def _products(source: Sequence[RingElem], m: int, d: int) -> List[RingElem]:
    current: Dict[RingElem, None] = dict.fromkeys(source)
    for _ in range(m - 1):
        nxt: Dict[RingElem, None] = {}
        for x in current:
            for y in source:
                xy = x * y
                if not xy.is_zero() and xy.degree() <= d:
                    nxt[xy] = None
        current = nxt
    return [x for x in current if not x.is_zero()]


def _spaces(D: Derivation, family: str, k: int, m: int, d: int):
    p = D.p
    if family == "sigma":
        source = eigen_basis(D, d, k)
        target = eigen_basis(D, d, k * m)
        lower: List[RingElem] = []
    else:
        top = min(k * m, p - 1)
        source = filtration_basis(D, d, k)
        target = filtration_basis(D, d, top)
        lower = filtration_basis(D, d, min(k * m - 1, p - 1)).basis if k * m >= 1 else []
    return source, target, lower


def _multipliers(D: Derivation) -> List[RingElem]:
    """g^e for each fixed-locus generator g, e <= p smallest with D(g^e) = 0."""
    out = []
    for g in fixed_locus(D).generators:
        power = g
        for _ in range(D.p):
            if D.apply(power).is_zero():
                if not power.is_zero() and not power.is_constant():
                    out.append(power)
                break
            power = power * g
    return out


def mult_map_analysis(D: Derivation, k: int, tensor_power: int, d: int) -> MultMapAnalysis:
    """Image and cokernel of the product map L_k^(x m) -> L_(km).

    Multiplicative D uses eigenspaces; additive D uses E_k, with target
    E_(km)/E_(km-1). Each cokernel class is tested for being killed
    into the image by a fixed-locus multiplier.
    """
    if tensor_power < 1:
        raise InputError("tensor power must be at least 1")
    if D.dtype is DerivationType.MULTIPLICATIVE:
        family = "sigma"
    else:
        D.require(DerivationType.ADDITIVE)
        family = "tau"
    spec = D.spec
    p = spec.p
    source, target, lower = _spaces(D, family, k, tensor_power, d)
    exps = spec.monomial_exponents(d)
    products = _products(source.basis, tensor_power, d)
    report = Report(f"{family}_{tensor_power}")
    inside = all(_in_span(target.basis, x, exps, p) for x in products)
    report.add(Record.flag("product_lands_in_target", p, inside, family=family, m=tensor_power, d=d))

    index = {e: i for i, e in enumerate(exps)}
    lower_rows = [_vector(x, index, len(exps)) for x in lower]
    prod_rows = [_vector(x, index, len(exps)) for x in products]
    image_idx = linalg.extend_independent(lower_rows, prod_rows, p)
    image = [products[i] for i in image_idx]
    tgt_rows = [_vector(x, index, len(exps)) for x in target.basis]
    coker_idx = linalg.extend_independent(lower_rows + [prod_rows[i] for i in image_idx], tgt_rows, p)
    cokernel = [target.basis[i] for i in coker_idx]
    report.add(Record.info("cokernel_dim", p, "-", len(cokernel), family=family, m=tensor_power, d=d))

    if cokernel:
        multipliers = _multipliers(D)
        bump = max((mu.degree() for mu in multipliers), default=0)
        d2 = d + bump
        if spec.truncate is not None:
            d2 = min(d2, spec.truncate - 1)
        source2, _, lower2 = _spaces(D, family, k, tensor_power, d2)
        image2 = _products(source2.basis, tensor_power, d2) + list(lower2)
        exps2 = spec.monomial_exponents(d2)
        for r in cokernel:
            killed = any(_in_span(image2, mu * r, exps2, p) for mu in multipliers if (mu * r).degree() <= d2)
            report.add(Record.flag("cokernel_supported_on_fixed_locus", p, killed, rep=str(r), d=d2))
    return MultMapAnalysis(family, k, tensor_power, d, source, target, image, cokernel, list(lower), report)


# -- the Dz = 1 construction ------------------------------------------------------------------


@dataclass
class ZSection:
    z: RingElem
    a: RingElem
    coeffs_b: List[RingElem]
    cs: List[RingElem]

    def to_dict(self) -> Dict[str, object]:
        return {
            "z": str(self.z),
            "a": str(self.a),
            "b": [str(b) for b in self.coeffs_b],
            "c": [str(c) for c in self.cs],
        }


def z_construct(D: Derivation, a: RingElem) -> ZSection:
    """z = sum b_k a^k with D(z) = 1 and every b_k invariant."""
    D.require(DerivationType.ADDITIVE)
    spec = D.spec
    pc = spec.pc
    p = spec.p
    if spec.truncate is None:
        raise PreconditionError("z_construct needs a truncated ring")
    c1 = D.apply(a).inverse()
    cs = [c1]
    for _ in range(p - 2):
        cs.append(c1 * D.apply(cs[-1]))
    powers = [spec.one()]
    for _ in range(p - 1):
        powers.append(powers[-1] * a)
    b = [spec.zero() for _ in range(p)]
    for nu in range(p - 1, 0, -1):
        acc = cs[nu - 1]
        for k in range(nu + 1, p):
            ff = pc.falling(k, nu)
            if ff and not b[k].is_zero():
                acc = acc - b[k] * powers[k - nu] * ff
        b[nu] = acc * pc.inv(pc.factorial(nu))
    z = spec.zero()
    for k in range(1, p):
        z = z + b[k] * powers[k]
    if not D.apply(z).is_one():
        raise InternalInconsistencyError(f"D(z) = {D.apply(z)} for z = {z}")
    for k, bk in enumerate(b):
        if not D.apply(bk).is_zero():
            raise InternalInconsistencyError(f"b_{k} = {bk} is not invariant")
    return ZSection(z, a, b, cs)


def z_power_independence(D: Derivation, zsec: ZSection) -> Report:
    """b z^k (b invariant, k < p) are independent and, when p | N, span everything."""
    spec = D.spec
    p = spec.p
    N = spec.truncate
    d = N - 1
    inv = invariants_basis(D, d).basis
    powers = [spec.one()]
    for _ in range(p - 1):
        powers.append(powers[-1] * zsec.z)
    products = [b * zk for b in inv for zk in powers]
    exps = spec.monomial_exponents(d)
    rank = linalg.rank(_matrix(products, exps), p) if products else 0
    report = Report("z powers")
    report.add(Record.check("z_powers_independent", p, len(products), rank, N=N))
    if N % p == 0 and spec.radical is None and len(spec.vars) == 1:
        report.add(Record.check("z_powers_span", p, len(exps), rank, N=N))
    return report


def za_element(D: Derivation, a: RingElem) -> RingElem:
    """z_a = D(a) + D^2(a) + ... + D^(p-1)(a), an eigenvector of eigenvalue 1."""
    D.require(DerivationType.MULTIPLICATIVE)
    z = D.spec.zero()
    current = a
    for _ in range(D.p - 1):
        current = D.apply(current)
        z = z + current
    if D.apply(z) != z:
        raise InternalInconsistencyError(f"D(z_a) != z_a for a = {a}")
    if z.is_zero():
        logger.info("z_a vanishes for a = %s", a)
    return z


def za_report(D: Derivation, a: RingElem) -> Report:
    z = za_element(D, a)
    report = Report("z_a")
    report.add(Record.check("za_eigenvector", D.p, str(z), str(D.apply(z)), a=str(a)))
    report.add(Record.info("za_vanishes", D.p, False, z.is_zero(), a=str(a)))
    return report


# -- checks on gradings and truncations ---------------------------------------------------------


def grading_check(D: Derivation, pairs: Sequence[Tuple[RingElem, RingElem]]) -> Report:
    """Eigen-components multiply with indices added mod p."""
    D.require(DerivationType.MULTIPLICATIVE)
    p = D.p
    report = Report("grading")
    for n, (a, b) in enumerate(pairs):
        A = _components(D, a)
        B = _components(D, b)
        AB = _components(D, a * b)
        want = []
        for k in range(p):
            acc = D.spec.zero()
            for i in range(p):
                acc = acc + A[i] * B[(k - i) % p]
            want.append(str(acc))
        report.add(Record.check("grading_hom", p, want, [str(x) for x in AB], sample=n))
    return report


def eigen_decomposition_report(D: Derivation, elems: Sequence[RingElem]) -> Report:
    """Projections are eigenvectors and sum back, recorded per element."""
    D.require(DerivationType.MULTIPLICATIVE)
    p = D.p
    report = Report("eigen decomposition")
    for a in elems:
        parts = _components(D, a)
        eig = all(D.apply(r) == r * k for k, r in enumerate(parts))
        total = D.spec.zero()
        for r in parts:
            total = total + r
        report.add(Record.flag("eigen_projection", p, eig and total == a, a=str(a)))
    return report


def truncation_stability(
    pc: modp.PrimeChar, images: Union[str, Mapping[str, str]], N: int, spot_checks: int = 0
) -> Report:
    """Invariants agree at truncation orders N and 2N in low degree.

    A bare string is h for h d/dx, compared up to degree N-1-ord(h).
    Several variables are compared up to N - max deg D(x_i), below which
    no term of D(a) is truncated in either ring.
    """
    p = pc.p
    if isinstance(images, str):
        images = {"x": images}
    names = list(images)
    lo = RingSpec.polynomial(pc, names, truncate=N)
    hi = RingSpec.polynomial(pc, names, truncate=2 * N)
    D_lo = Derivation(lo, dict(images), spot_checks=spot_checks)
    D_hi = Derivation(hi, dict(images), spot_checks=spot_checks)
    if len(names) == 1:
        d = N - 1 - max(D_lo.image(names[0]).order(), 0)
    else:
        d = min(N - max(img.degree() for img in D_lo.images), N - 1)
    d = max(d, 0)
    a = [str(b) for b in invariants_basis(D_lo, d).basis]
    b = [str(x) for x in invariants_basis(D_hi, d).basis]
    report = Report("truncation stability")
    report.add(Record.check("truncation_stability", p, b, a, N=N, d=d, field=str(D_lo)))
    return report
