"""Torsor gluing data over chart covers, and the local dualizing checks.

Transitions are stored on canonical edges (i < j) with the convention
t_j = gamma_ij + a_ij * t_i; the reversed edges are derived:
a_ji = 1/a_ij and gamma_ji = -gamma_ij/a_ij.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from itertools import permutations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from . import linalg
from .deriv import Derivation, DerivationType, exponential_map, _tau_product
from .errors import (
    InputError,
    InternalInconsistencyError,
    NotInvertibleError,
    PreconditionError,
    ZeroDerivationError,
)
from .modp import PrimeChar
from .quotient import invariants_basis
from .report import Record, Report
from .ring import RingElem, RingSpec

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]

SPLIT = "split"
SECTION = "section"


def _as_elem(spec: RingSpec, value: Union[RingElem, str, int]) -> RingElem:
    if isinstance(value, RingElem):
        return spec.lift(value)
    if isinstance(value, int):
        return spec.const(value)
    return spec.parse(value)


@dataclass
class TorsorData:
    """Chart functions c_i and canonical-edge transitions (a_ij, gamma_ij)."""

    base: RingSpec
    c: List[RingElem]
    transitions: Dict[Edge, Tuple[RingElem, RingElem]]
    radical_var: str = "t"
    _models: Dict[int, RingSpec] = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.c)
        if n == 0:
            raise InputError("a torsor needs at least one chart")
        for i in range(n):
            for j in range(i + 1, n):
                if (i, j) not in self.transitions:
                    raise InputError(f"missing transition for charts ({i}, {j})")
        for (i, j) in self.transitions:
            if not 0 <= i < j < n:
                raise InputError(f"transition ({i}, {j}) must use chart indices i < j < {n}")

    @classmethod
    def build(
        cls,
        p: int,
        c: Sequence[Union[RingElem, str]],
        transitions: Mapping[Edge, Tuple[Union[RingElem, str], Union[RingElem, str]]],
        denominator: Optional[str] = "s",
        vars: Sequence[str] = ("s",),
    ) -> "TorsorData":
        base = RingSpec.polynomial(p, vars, localize=denominator)
        cs = [_as_elem(base, x) for x in c]
        trans = {tuple(e): (_as_elem(base, a), _as_elem(base, g)) for e, (a, g) in transitions.items()}
        return cls(base, cs, trans)

    @property
    def pc(self) -> PrimeChar:
        return self.base.pc

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def n_charts(self) -> int:
        return len(self.c)

    def a(self, i: int, j: int) -> RingElem:
        if i == j:
            return self.base.one()
        if i < j:
            return self.transitions[(i, j)][0]
        return self.transitions[(j, i)][0].inverse()

    def gamma(self, i: int, j: int) -> RingElem:
        if i == j:
            return self.base.zero()
        if i < j:
            return self.transitions[(i, j)][1]
        a, g = self.transitions[(j, i)]
        return -(g * a.inverse())

    def model(self, i: int) -> RingSpec:
        """B[t]/(t^p - c_i)."""
        if i not in self._models:
            self._models[i] = self.base.radical_extension(self.radical_var, self.c[i])
        return self._models[i]

    def phi(self, i: int, j: int, elem: RingElem) -> RingElem:
        """Move an element of chart j's model to chart i's via t_j -> gamma_ij + a_ij t_i."""
        target = self.model(i)
        t_i = target.var(self.radical_var)
        image = target.lift(self.gamma(i, j)) + target.lift(self.a(i, j)) * t_i
        return elem.substitute(target, {self.radical_var: image})

    def with_c(self, i: int, value: RingElem) -> "TorsorData":
        cs = list(self.c)
        cs[i] = value
        return replace(self, c=cs)

    def with_gamma(self, edge: Edge, value: RingElem) -> "TorsorData":
        trans = dict(self.transitions)
        trans[edge] = (trans[edge][0], value)
        return replace(self, transitions=trans)

    def to_dict(self) -> Dict[str, object]:
        den = self.base.denominator_elem()
        return {
            "p": self.p,
            "denominator": None if self.base.denominator is None else str(den),
            "charts": [{"c": str(x)} for x in self.c],
            "transitions": [
                {"i": i, "j": j, "a": str(a), "gamma": str(g)} for (i, j), (a, g) in sorted(self.transitions.items())
            ],
        }


def _is_unit(x: RingElem) -> bool:
    try:
        x.inverse()
    except NotInvertibleError:
        return False
    return True


def _unit_records(T: TorsorData, report: Report) -> bool:
    ok = True
    for (i, j), (a, _) in sorted(T.transitions.items()):
        unit = _is_unit(a)
        ok &= unit
        report.add(Record.flag("transition_unit", T.p, unit, got=str(a), i=i, j=j))
    return ok


def validate(T: TorsorData, strict: bool = False) -> Report:
    """Line cocycle, matrix cocycle and c-compatibility on every triple and pair."""
    p = T.p
    report = Report("torsor validation")
    if not _unit_records(T, report):
        if strict:
            report.raise_for_status()
        return report
    n = T.n_charts
    for i, j, k in permutations(range(n), 3):
        a_ik = T.a(i, k)
        report.add(Record.check("line_cocycle", p, str(a_ik), str(T.a(i, j) * T.a(j, k)), i=i, j=j, k=k))
        g_ik = T.gamma(i, k)
        composed = T.gamma(j, k) + T.a(j, k) * T.gamma(i, j)
        report.add(Record.check("matrix_cocycle", p, str(g_ik), str(composed), i=i, j=j, k=k))
    for i, j in permutations(range(n), 2):
        want = T.gamma(i, j) ** p + T.a(i, j) ** p * T.c[i]
        report.add(Record.check("c_compatibility", p, str(T.c[j]), str(want), i=i, j=j))
    if report.failures:
        logger.warning("torsor validation: %d failing checks", len(report.failures))
    if strict:
        report.raise_for_status()
    return report


def mutation_sweep(T: TorsorData, exponents: Tuple[int, int] = (-8, 8)) -> Report:
    """Every single-coefficient change of one c_i or gamma_ij must break validation."""
    base = T.base
    p = T.p
    lo, hi = exponents
    if base.denominator is not None:
        unit = base.denominator_elem()
    else:
        unit = base.var(base.vars[0])
        lo = max(lo, 0)
    targets: List[Tuple[str, object]] = [("c", i) for i in range(T.n_charts)]
    targets += [("gamma", e) for e in sorted(T.transitions)]
    report = Report("mutation sweep")
    for kind, where in targets:
        for e in range(lo, hi + 1):
            shift = unit ** e
            for lam in range(1, p):
                if kind == "c":
                    mutant = T.with_c(where, T.c[where] + shift * lam)
                else:
                    mutant = T.with_gamma(where, T.transitions[where][1] + shift * lam)
                rejected = not validate(mutant).passed
                report.add(Record.flag("mutant_rejected", p, rejected, target=f"{kind}{where}", exponent=e, scale=lam))
    logger.info("mutation sweep: %d mutants", len(report))
    return report


# -- glued derivations ---------------------------------------------------------------------


def _chart_derivation(T: TorsorData, i: int, coeff: RingElem, spot_checks: int) -> Derivation:
    model = T.model(i)
    return Derivation(model, {T.radical_var: model.lift(coeff)}, spot_checks=spot_checks)


def glued_derivation_check(
    T: TorsorData,
    mode: str = SPLIT,
    d: Optional[Sequence[Union[RingElem, str]]] = None,
    spot_checks: int = 5,
) -> Report:
    """Chart derivations commute with the transition maps and have the expected type.

    Split mode uses D_i = t d/dt and needs every gamma to vanish; section mode
    uses D_i = d_i d/dt with the supplied chart functions d_i.
    """
    p = T.p
    n = T.n_charts
    report = Report(f"glued derivation ({mode})")
    if mode == SPLIT:
        for (i, j), (_, g) in sorted(T.transitions.items()):
            if not g.is_zero():
                raise PreconditionError(f"split gluing needs gamma_{i}{j} = 0, got {g}")
        coeffs = [None] * n
        expected = DerivationType.MULTIPLICATIVE
    elif mode == SECTION:
        if d is None or len(d) != n:
            raise InputError("section gluing needs one chart function per chart")
        coeffs = [_as_elem(T.base, x) for x in d]
        expected = DerivationType.ADDITIVE
    else:
        raise InputError(f"unknown gluing mode {mode!r}")

    derivations = []
    for i in range(n):
        model = T.model(i)
        coeff = model.var(T.radical_var) if mode == SPLIT else coeffs[i]
        D = _chart_derivation(T, i, coeff, spot_checks)
        derivations.append(D)
        report.add(Record.check("chart_type", p, expected.value, D.dtype.value, chart=i))

    for i, j in permutations(range(n), 2):
        D_i, D_j = derivations[i], derivations[j]
        for g in T.model(j).gens():
            lhs = T.phi(i, j, D_j.apply(g))
            rhs = D_i.apply(T.phi(i, j, g))
            report.add(Record.check("gluing_square", p, str(lhs), str(rhs), i=i, j=j, gen=str(g)))
        if mode == SECTION:
            want = T.a(j, i) * coeffs[j]
            report.add(Record.check("section_rule", p, str(want), str(coeffs[i]), i=i, j=j))
    return report


# -- transition exponents -------------------------------------------------------------------


def _laurent_exponent(x: RingElem) -> Optional[int]:
    """m when x = unit * s^m over a base localized at the single variable s."""
    spec = x.spec
    if len(spec.vars) != 1 or not x.is_monomial():
        return None
    (e,), _ = next(iter(x.terms.items()))
    if spec.denominator is None:
        return e
    (alpha,), _ = spec.denominator[0]
    return e - alpha * x.denom


def _coefficient_functional(model: RingSpec, var: str, x: RingElem) -> RingElem:
    """d^(p-1)/dt^(p-1) on B[t]/(t^p - c): (p-1)! times the t^(p-1) coefficient."""
    p = model.p
    top = x.split_by(var).get(p - 1, model.zero())
    return top * model.pc.factorial(p - 1)


def _cocycle_records(T: TorsorData, power: int, name: str, report: Report) -> None:
    p = T.p
    n = T.n_charts
    lifted = {(i, j): T.a(i, j) ** power for i in range(n) for j in range(n)}
    for i, j, k in permutations(range(n), 3):
        report.add(Record.check(name, p, str(lifted[(i, k)]), str(lifted[(i, j)] * lifted[(j, k)]), i=i, j=j, k=k))
    for i, j in permutations(range(n), 2):
        report.add(Record.check(f"{name}_inverse", p, "1", str(lifted[(i, j)] * lifted[(j, i)]), i=i, j=j))
        report.add(Record.info(f"{name}_value", p, "-", str(lifted[(i, j)]), i=i, j=j))


def transition_exponent_data(T: TorsorData) -> Report:
    """Normal-bundle (a^p) and dualizing (a^(1-p)) cocycles, with exponent bookkeeping."""
    p = T.p
    report = Report("transition exponents")
    pre = validate(T)
    report.add(Record.flag("input_valid", p, pre.passed))
    if not pre.passed:
        return report
    _cocycle_records(T, p, "normal_cocycle", report)
    _cocycle_records(T, 1 - p, "dualizing_cocycle", report)
    for (i, j), (a, _) in sorted(T.transitions.items()):
        m = _laurent_exponent(a)
        if m is None:
            continue
        report.add(Record.check("normal_exponent", p, p * m, _laurent_exponent(a ** p), i=i, j=j))
        report.add(Record.check("dualizing_exponent", p, (1 - p) * m, _laurent_exponent(a ** (1 - p)), i=i, j=j))
    var = T.radical_var
    for i, j in permutations(range(T.n_charts), 2):
        mi, mj = T.model(i), T.model(j)
        t_j = mj.var(var)
        scale = mi.lift(T.a(i, j) ** (p - 1))
        for k in range(p):
            x = t_j ** k
            lhs = _coefficient_functional(mi, var, T.phi(i, j, x))
            rhs = scale * mi.lift(_coefficient_functional(mj, var, x))
            report.add(Record.check("dualizing_transport", p, str(rhs), str(lhs), i=i, j=j, k=k))
    return report


# -- the local dualizing generator -------------------------------------------------------------


@dataclass
class DualizingGenerator:
    """g = d^(p-1)/dt^(p-1) on A = B[t]/(t^p - c), stored by its values on 1..t^(p-1)."""

    model: RingSpec
    var: str
    values: Tuple[int, ...]

    @property
    def p(self) -> int:
        return self.model.p

    def apply(self, x: RingElem) -> RingElem:
        return _coefficient_functional(self.model, self.var, self.model.lift(x))

    def matrix(self) -> np.ndarray:
        """M[i][j] = g(t^(i+j)), the functionals t^i g on the basis t^j."""
        p = self.p
        t = self.model.var(self.var)
        M = np.zeros((p, p), dtype=np.int64)
        for i in range(p):
            for j in range(p):
                v = self.apply(t ** (i + j))
                if not v.is_constant():
                    raise InternalInconsistencyError(f"g(t^{i + j}) = {v} is not a constant")
                M[i, j] = v.constant_term()
        return M

    def certificate(self) -> Report:
        p = self.p
        det = linalg.det(self.matrix(), p)
        report = Report("dualizing generator")
        report.add(Record.check("dualizing_values", p, [0] * (p - 1) + [p - 1], list(self.values)))
        report.add(Record.flag("dualizing_certificate_unit", p, det != 0, got=det))
        return report

    def represent(self, values: Sequence[Union[RingElem, str, int]]) -> RingElem:
        """The a in A with g(a t^j) = values[j], so the functional equals a.g."""
        p = self.p
        if len(values) != p:
            raise InputError(f"a functional on B[t]/(t^p - c) takes {p} values")
        base = self.model.base_spec()
        vals = [_as_elem(base, v) for v in values]
        inv = linalg.inverse(self.matrix(), p)
        if inv is None:
            raise InternalInconsistencyError("dualizing certificate is singular")
        t = self.model.var(self.var)
        out = self.model.zero()
        for m in range(p):
            coeff = base.zero()
            for j in range(p):
                if inv[j, m]:
                    coeff = coeff + vals[j] * int(inv[j, m])
            out = out + self.model.lift(coeff) * t ** m
        for j in range(p):
            if self.apply(out * t ** j) != self.model.lift(vals[j]):
                raise InternalInconsistencyError(f"represented functional disagrees on t^{j}")
        return out


def local_dualizing_generator(pc: PrimeChar, c: RingElem, var: str = "t") -> DualizingGenerator:
    if c.spec.p != pc.p:
        raise InputError("c lives in a ring of another characteristic")
    model = c.spec.radical_extension(var, c)
    t = model.var(var)
    values = tuple(
        v.constant_term()
        for v in (_coefficient_functional(model, var, t ** j) for j in range(pc.p))
    )
    gen = DualizingGenerator(model, var, values)
    gen.certificate().raise_for_status()
    return gen


# -- adjunction identities ---------------------------------------------------------------------


def adjunction_model(pc: PrimeChar, c: Union[RingElem, str], var: str = "t") -> Tuple[RingSpec, Derivation]:
    """A = F_p[x]/(x^(p+1))[t]/(t^p - c) with D = d/dt."""
    base = RingSpec.polynomial(pc, ["x"], truncate=pc.p + 1)
    c = _as_elem(base, c)
    model = base.radical_extension(var, c)
    return model, Derivation(model, {var: "1"}, spot_checks=0)


def _subset_products(elems: Sequence[RingElem]) -> List[RingElem]:
    n = len(elems)
    out = [elems[0].spec.one()] * (1 << n)
    for mask in range(1, 1 << n):
        low = (mask & -mask).bit_length() - 1
        out[mask] = out[mask & (mask - 1)] * elems[low]
    return out


def claim_product_rhs(D: Derivation, var: str, elems: Sequence[RingElem]) -> RingElem:
    """-2 sum_i a_i prod_{j != i} D a_j + sum over proper subsets T of (-1)^|T| (2|T|-1) a_T g(a_rest)."""
    spec = D.spec
    p = spec.p
    n = len(elems)
    full = (1 << n) - 1
    prods = _subset_products(elems)
    derivs = [D.apply(a) for a in elems]
    total = spec.zero()
    dprods = _subset_products(derivs)
    for i in range(n):
        total = total - elems[i] * dprods[full ^ (1 << i)] * 2
    for mask in range(1, full):
        k = bin(mask).count("1")
        if k > p - 1:
            continue
        coeff = (-1) ** k * (2 * k - 1)
        if coeff % p == 0:
            continue
        g_rest = _coefficient_functional(spec, var, prods[full ^ mask])
        if g_rest.is_zero():
            continue
        total = total + prods[mask] * g_rest * coeff
    return total


def leibniz_oracle(D: Derivation, elems: Sequence[RingElem]) -> RingElem:
    """D^(p-1)(a_1...a_n) from the multinomial expansion, as (p-1)! [tau^(p-1)] prod exp(tau D)(a_i)."""
    pc = D.spec.pc
    acc = exponential_map(D, elems[0])
    for a in elems[1:]:
        acc = _tau_product(acc, exponential_map(D, a))
    return acc[-1] * pc.factorial(pc.p - 1)


def claim_power_rhs(D: Derivation, var: str, a: RingElem) -> RingElem:
    """-(a^(p-1) g(1) + sum_k a^(p-1-k) g(a^k))."""
    spec = D.spec
    p = spec.p
    powers = [spec.one()]
    for _ in range(p - 1):
        powers.append(powers[-1] * a)
    total = spec.zero()
    for k in range(p):
        total = total + powers[p - 1 - k] * _coefficient_functional(spec, var, powers[k])
    return -total


def adjunction_identity_check(
    pc: PrimeChar,
    c: Union[RingElem, str],
    samples: Iterable[Sequence[Union[RingElem, str]]],
    var: str = "t",
) -> Report:
    """Product and power identities for D = d/dt, g = d^(p-1)/dt^(p-1), a_0 = 1."""
    model, D = adjunction_model(pc, c, var)
    p = pc.p
    report = Report("adjunction identities")
    for n, tup in enumerate(samples):
        elems = [_as_elem(model, x) for x in tup]
        if len(elems) != p:
            raise InputError(f"product samples need {p} factors, got {len(elems)}")
        prod = model.one()
        for a in elems:
            prod = prod * a
        lhs = D.iterate(prod, p - 1)
        report.add(Record.check("adjunction_product", p, str(lhs), str(claim_product_rhs(D, var, elems)), sample=n))
        report.add(Record.check("adjunction_leibniz_oracle", p, str(lhs), str(leibniz_oracle(D, elems)), sample=n))
        for m, a in enumerate(elems):
            left = D.apply(a) ** (p - 1)
            report.add(Record.check("adjunction_power", p, str(left), str(claim_power_rhs(D, var, a)), sample=n, factor=m))
    return report


def random_adjunction_samples(model: RingSpec, rng, count: int) -> List[Tuple[RingElem, ...]]:
    p = model.p
    return [tuple(model.random_element(rng, max_terms=2, max_degree=1) for _ in range(p)) for _ in range(count)]


# -- the crossing identity ---------------------------------------------------------------------


def _ideal_span(gens: Sequence[RingElem], d: int) -> List[RingElem]:
    spec = gens[0].spec if gens else None
    out = []
    for g in gens:
        for m in spec.monomial_basis(d):
            gm = g * m
            if not gm.is_zero():
                out.append(gm)
    return out


def _in_ideal(elem: RingElem, span: Sequence[RingElem], exps) -> bool:
    if elem.is_zero():
        return True
    if not span:
        return False
    index = {e: i for i, e in enumerate(exps)}
    rows = np.zeros((len(span), len(exps)), dtype=np.int64)
    for r, x in enumerate(span):
        for e, c in x.terms.items():
            rows[r, index[e]] = c
    v = np.zeros(len(exps), dtype=np.int64)
    for e, c in elem.terms.items():
        v[index[e]] = c
    return linalg.in_span(rows, v, elem.spec.p)


def crossing_fixed_ideal_check(
    pc: PrimeChar, f: Union[RingElem, str], g: Union[RingElem, str], order: int, pair: Tuple[str, str] = ("x", "y")
) -> Report:
    """I_fix^(p-1) = J (xy, f^(p-1) + g^(p-1)) with J = (xy, x^(p-1), y^(p-1)), up to the given order."""
    p = pc.p
    x_name, y_name = pair
    spec = RingSpec.crossing_ring(pc, pair, truncate=order)
    f = _as_elem(spec, f)
    g = _as_elem(spec, g)
    if f.involves(y_name) or g.involves(x_name):
        raise InputError(f"f must be a series in {x_name} and g a series in {y_name}")
    x, y = spec.var(x_name), spec.var(y_name)
    D = Derivation(spec, {x_name: x * f, y_name: y * g}, spot_checks=0)
    if D.is_zero():
        raise ZeroDerivationError("f = g = 0 gives the zero derivation")
    report = Report("crossing fixed ideal")
    h = f ** (p - 1) + g ** (p - 1)
    xy = x * y
    if h.is_zero():
        report.add(Record.info("degenerate_sum", p, "nonzero", "0", f=str(f), g=str(g)))
        return report
    fixed = [img for img in D.images if not img.is_zero()]
    lhs = [z for z in _powers_of_ideal(fixed, p - 1) if not z.is_zero()]
    J = [xy, x ** (p - 1), y ** (p - 1)]
    rhs = [z for z in (a * b for a in J for b in (xy, h)) if not z.is_zero()]
    d = order - 1
    exps = spec.monomial_exponents(d)
    lhs_span = _ideal_span(lhs, d)
    rhs_span = _ideal_span(rhs, d)
    for gen in lhs:
        report.add(Record.flag("fixed_power_in_product", p, _in_ideal(gen, rhs_span, exps), got=str(gen), f=str(f), g=str(g)))
    for gen in rhs:
        report.add(Record.flag("product_in_fixed_power", p, _in_ideal(gen, lhs_span, exps), got=str(gen), f=str(f), g=str(g)))
    return report


def _powers_of_ideal(gens: Sequence[RingElem], k: int) -> List[RingElem]:
    """Generators of (gens)^k: all products of k generators."""
    current = [gens[0].spec.one()]
    for _ in range(k):
        nxt: Dict[RingElem, None] = {}
        for a in current:
            for b in gens:
                nxt[a * b] = None
        current = list(nxt)
    return current


# -- local torsor algebra ---------------------------------------------------------------------


@dataclass
class LocalTorsorAlgebra:
    """B[u]/(u^p - z^p) with the evaluation u -> z into the chart ring."""

    spec: RingSpec
    z: RingElem
    lambda_values: Tuple[RingElem, RingElem]
    report: Report

    def psi(self, elem: RingElem) -> RingElem:
        target = self.z.spec
        return elem.substitute(target, {self.spec.radical.var: self.z})

    def to_dict(self) -> Dict[str, object]:
        return {
            "ring": self.spec.describe(),
            "z": str(self.z),
            "lambda": [str(v) for v in self.lambda_values],
        }


def build_local_torsor_algebra(
    D: Derivation,
    basis: Tuple[RingElem, RingElem],
    lambda_values: Optional[Tuple[RingElem, RingElem]] = None,
    samples: Sequence[Tuple[RingElem, RingElem]] = (),
    var: str = "u",
) -> LocalTorsorAlgebra:
    """The algebra B[u]/(u^p - lambda(z)) for the rank-two basis (1, z) with Dz = 1."""
    spec = D.spec
    p = spec.p
    one, z = (spec.lift(b) for b in basis)
    if not one.is_one():
        raise InputError("the first basis element must be 1")
    if not D.apply(z).is_one():
        raise PreconditionError(f"D(z) = {D.apply(z)}, not 1")
    if lambda_values is None:
        lambda_values = (spec.one(), z ** p)
    lam1, lamz = (spec.lift(v) for v in lambda_values)
    R = spec.radical_extension(var, lamz)
    report = Report("local torsor algebra")
    report.add(Record.check("lambda_on_one", p, "1", str(lam1)))
    report.add(Record.check("lambda_on_z", p, str(z ** p), str(lamz)))
    algebra = LocalTorsorAlgebra(R, z, (lam1, lamz), report)

    N = spec.truncate
    d = N - 1
    inv = invariants_basis(D, d).basis
    u = R.var(var)
    u_powers = [R.one()]
    for _ in range(p - 1):
        u_powers.append(u_powers[-1] * u)
    images = [algebra.psi(R.lift(b) * uk) for b in inv for uk in u_powers]
    exps = spec.monomial_exponents(d)
    index = {e: i for i, e in enumerate(exps)}
    M = np.zeros((len(images), len(exps)), dtype=np.int64)
    for r, x in enumerate(images):
        for e, c in x.terms.items():
            M[r, index[e]] = c
    rank = linalg.rank(M, p) if len(images) else 0
    report.add(Record.check("psi_injective", p, len(images), rank, N=N))
    if N % p == 0 and len(spec.vars) == 1:
        report.add(Record.check("psi_surjective", p, len(exps), rank, N=N))
    for n, (b0, b1) in enumerate(samples):
        b0, b1 = spec.lift(b0), spec.lift(b1)
        frob = (b0 + b1 * z) ** p
        split = b0 ** p * lam1 + b1 ** p * lamz
        report.add(Record.check("f_splitting", p, str(frob), str(split), sample=n))
    return algebra
