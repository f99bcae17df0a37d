"""Exact arithmetic in the ring shapes used throughout insep.

A ``RingSpec`` is one of a closed family of shapes over Z/p:

* a polynomial ring on named variables,
* a radical extension B[t]/(t^p - c) of such a ring,
* the crossing ring k[x, y]/(xy),
* any of the above truncated at base degree N (the ideal m^N),
* localized at a single denominator s.

Grading: only base variables carry degree. The radical variable has
degree 0 and its exponent runs over 0..p-1, so bases and truncations are
taken in the base variables.

Localization: without truncation s must be a monomial with coefficient
1; elements are stored as numerator / s^k with s not dividing the
numerator. With truncation s must have a nonzero constant term and is
inverted as a power series, so stored denominators are always 0.
"""

from __future__ import annotations

import logging
import random
import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from .config import DEFAULT_SETTINGS
from .errors import (
    ExponentOverflowError,
    ExpressionSyntaxError,
    InputError,
    InternalInconsistencyError,
    NotInvertibleError,
    PreconditionError,
    UnknownVariableError,
)
from .modp import PrimeChar

logger = logging.getLogger(__name__)

Exp = Tuple[int, ...]
Terms = Dict[Exp, int]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Radical:
    var: str
    radicand: Tuple[Tuple[Exp, int], ...]
    radicand_denom: int = 0


@dataclass(frozen=True)
class RingSpec:
    pc: PrimeChar
    vars: Tuple[str, ...]
    radical: Optional[Radical] = None
    crossing: Optional[Tuple[str, str]] = None
    truncate: Optional[int] = None
    denominator: Optional[Tuple[Tuple[Exp, int], ...]] = None
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if len(set(self.vars)) != len(self.vars) or not self.vars:
            raise InputError(f"variables must be distinct and non-empty: {self.vars}")
        for v in self.vars:
            if not _IDENT.match(v):
                raise InputError(f"invalid variable name {v!r}")
        n = len(self.vars)
        t_index = None
        if self.radical is not None:
            if self.radical.var != self.vars[-1]:
                raise InputError("the radical variable must be the last variable")
            t_index = n - 1
            if any(e[t_index] for e, _ in self.radical.radicand):
                raise InputError("the radicand may not contain the radical variable")
            if self.truncate is not None and self.truncate < self.pc.p + 1:
                raise InputError(f"truncation order must be at least p+1 = {self.pc.p + 1} over a radical extension")
        if self.crossing is not None:
            x, y = self.crossing
            if x == y or x not in self.vars or y not in self.vars:
                raise InputError(f"bad crossing pair {self.crossing}")
            if self.radical is not None and self.radical.var in self.crossing:
                raise InputError("crossing variables must be base variables")
        if self.truncate is not None and self.truncate < 1:
            raise InputError(f"truncation order must be positive, got {self.truncate}")
        alpha = None
        if self.denominator is not None:
            terms = dict(self.denominator)
            if not terms:
                raise InputError("cannot localize at 0")
            if self.truncate is not None:
                if terms.get((0,) * n, 0) % self.pc.p == 0:
                    raise InputError("a truncated localization needs a denominator with nonzero constant term")
            else:
                if len(terms) != 1 or next(iter(terms.values())) % self.pc.p != 1:
                    raise InputError("localization without truncation needs a monic monomial denominator")
                alpha = next(iter(terms))
                if not any(alpha):
                    raise InputError("cannot localize at a constant")
                if t_index is not None and alpha[t_index]:
                    raise InputError("the denominator may not contain the radical variable")
        elif self.radical is not None and self.radical.radicand_denom:
            raise InputError("radicand with a denominator needs a localized base")
        base = tuple(i for i in range(n) if i != t_index)
        self._cache.update(
            t=t_index,
            base=base,
            cross=None if self.crossing is None else (self.vars.index(self.crossing[0]), self.vars.index(self.crossing[1])),
            alpha=alpha,
            zero=(0,) * n,
        )

    # -- construction ---------------------------------------------------------

    @classmethod
    def polynomial(
        cls,
        p: Union[int, PrimeChar],
        vars: Sequence[str],
        truncate: Optional[int] = None,
        localize: Optional[str] = None,
    ) -> "RingSpec":
        pc = p if isinstance(p, PrimeChar) else PrimeChar.of(p)
        spec = cls(pc, tuple(vars), truncate=truncate)
        if localize is not None:
            s = spec.parse(localize)
            spec = cls(pc, tuple(vars), truncate=truncate, denominator=tuple(sorted(s.terms.items())))
        return spec

    @classmethod
    def crossing_ring(
        cls, p: Union[int, PrimeChar], pair: Tuple[str, str] = ("x", "y"), truncate: Optional[int] = None
    ) -> "RingSpec":
        pc = p if isinstance(p, PrimeChar) else PrimeChar.of(p)
        return cls(pc, tuple(pair), crossing=tuple(pair), truncate=truncate)

    def radical_extension(self, var: str, radicand: Union["RingElem", str]) -> "RingSpec":
        """B[var]/(var^p - radicand) over this ring B."""
        if self.radical is not None:
            raise InputError("nested radical extensions are not supported")
        if self.crossing is not None:
            raise InputError("radical extensions of crossing rings are not supported")
        if var in self.vars:
            raise InputError(f"variable {var!r} already present")
        c = self.parse(radicand) if isinstance(radicand, str) else self.lift(radicand)
        pad = lambda e: e + (0,)
        den = None if self.denominator is None else tuple((pad(e), v) for e, v in self.denominator)
        rad = Radical(var, tuple(sorted((pad(e), v) for e, v in c.terms.items())), c.denom)
        return RingSpec(self.pc, self.vars + (var,), radical=rad, truncate=self.truncate, denominator=den)

    def base_spec(self) -> "RingSpec":
        """The coefficient ring B of a radical extension."""
        if self.radical is None:
            return self
        den = None if self.denominator is None else tuple((e[:-1], v) for e, v in self.denominator)
        return RingSpec(self.pc, self.vars[:-1], truncate=self.truncate, denominator=den)

    def without_truncation(self) -> "RingSpec":
        if self.truncate is None:
            return self
        if self.denominator is not None:
            raise PreconditionError("cannot drop the truncation of a power-series localization")
        return RingSpec(self.pc, self.vars, radical=self.radical, crossing=self.crossing)

    def with_truncation(self, n: int) -> "RingSpec":
        return RingSpec(self.pc, self.vars, self.radical, self.crossing, n, self.denominator)

    # -- shape data -------------------------------------------------------------

    @property
    def p(self) -> int:
        return self.pc.p

    @property
    def t_index(self) -> Optional[int]:
        return self._cache["t"]

    @property
    def base_indices(self) -> Tuple[int, ...]:
        return self._cache["base"]

    @property
    def base_vars(self) -> Tuple[str, ...]:
        return tuple(self.vars[i] for i in self.base_indices)

    def index(self, name: str) -> int:
        try:
            return self.vars.index(name)
        except ValueError:
            raise UnknownVariableError(name) from None

    def base_degree(self, e: Exp) -> int:
        t = self._cache["t"]
        return sum(e) - (e[t] if t is not None else 0)

    def order_key(self, e: Exp):
        t = self._cache["t"]
        return (self.base_degree(e), tuple(-e[i] for i in self._cache["base"]), e[t] if t is not None else 0)

    def describe(self) -> str:
        p = self.p
        base = f"F_{p}[{','.join(self.base_vars)}]"
        if self.crossing:
            base += f"/({self.crossing[0]}*{self.crossing[1]})"
        if self.truncate is not None:
            base += f" mod deg>={self.truncate}"
        if self.denominator is not None:
            base += f" localized at {self.denominator_elem()}"
        if self.radical:
            c = RingElem(self, dict(self.radical.radicand), self.radical.radicand_denom)
            base += f"[{self.radical.var}]/({self.radical.var}^{p}-({c}))"
        return base

    # -- elements ---------------------------------------------------------------

    def zero(self) -> "RingElem":
        return RingElem(self, {}, 0)

    def one(self) -> "RingElem":
        return self.const(1)

    def const(self, c: int) -> "RingElem":
        c %= self.p
        return RingElem(self, {self._cache["zero"]: c} if c else {}, 0)

    def var(self, name: str) -> "RingElem":
        i = self.index(name)
        e = [0] * len(self.vars)
        e[i] = 1
        return self.element({tuple(e): 1})

    def gens(self) -> List["RingElem"]:
        return [self.var(v) for v in self.vars]

    def element(self, terms: Mapping[Exp, int], denom: int = 0) -> "RingElem":
        """Normal form of a raw term map."""
        t, d = _normal_form(self, terms, denom)
        return RingElem(self, t, d)

    def monomial(self, exps: Mapping[str, int], coeff: int = 1) -> "RingElem":
        out = self.const(coeff)
        for name, k in exps.items():
            out = out * self.var(name) ** k
        return out

    def parse(self, src: str) -> "RingElem":
        return Parser(self, src).parse()

    def lift(self, elem: "RingElem") -> "RingElem":
        """Move an element of a compatible ring into this one."""
        if elem.spec == self:
            return elem if elem.spec is self else RingElem(self, dict(elem.terms), elem.denom)
        src = elem.spec
        if src.p != self.p:
            raise InputError("cannot move elements between characteristics")
        n = len(src.vars)
        if self.vars[:n] == src.vars and src.denominator == _pad_terms(self.denominator, n):
            extra = (0,) * (len(self.vars) - n)
            return self.element({e + extra: c for e, c in elem.terms.items()}, elem.denom)
        return elem.substitute(self, {v: self.var(v) for v in src.vars})

    def monomial_exponents(self, d: int) -> List[Exp]:
        """Normal-form exponents of base degree <= d, in graded order."""
        if self.truncate is not None and d >= self.truncate:
            raise PreconditionError(f"degree bound {d} must stay below the truncation order {self.truncate}")
        key = (d,)
        cached = self._cache.get(("mono",) + key)
        if cached is not None:
            return cached
        base = self._cache["base"]
        n = len(self.vars)
        out: List[Exp] = []

        def rec(pos: int, left: int, cur: List[int]):
            if pos == len(base):
                out.append(tuple(cur))
                return
            for k in range(left + 1):
                cur[base[pos]] = k
                rec(pos + 1, left - k, cur)
            cur[base[pos]] = 0

        rec(0, d, [0] * n)
        cross = self._cache["cross"]
        if cross is not None:
            out = [e for e in out if not (e[cross[0]] and e[cross[1]])]
        t = self._cache["t"]
        if t is not None:
            out = [e[:t] + (k,) + e[t + 1:] for e in out for k in range(self.p)]
        out.sort(key=self.order_key)
        self._cache[("mono",) + key] = out
        return out

    def monomial_basis(self, d: int) -> List["RingElem"]:
        return [RingElem(self, {e: 1}, 0) for e in self.monomial_exponents(d)]

    def random_element(
        self, rng: random.Random, max_terms: int = 3, max_degree: int = 2, t_power: bool = True
    ) -> "RingElem":
        if self.truncate is not None:
            max_degree = min(max_degree, self.truncate - 1)
        exps = self.monomial_exponents(max_degree)
        if not t_power and self.t_index is not None:
            exps = [e for e in exps if not e[self.t_index]]
        terms: Terms = {}
        for _ in range(rng.randint(1, max_terms)):
            e = rng.choice(exps)
            terms[e] = terms.get(e, 0) + rng.randint(1, self.p - 1)
        return self.element(terms)

    # -- cached ring data ---------------------------------------------------------

    def denominator_elem(self) -> "RingElem":
        if self.denominator is None:
            return self.one()
        return RingElem(self, dict(self.denominator), 0)

    def radicand_elem(self) -> "RingElem":
        if self.radical is None:
            raise PreconditionError("not a radical extension")
        return self.element(dict(self.radical.radicand), self.radical.radicand_denom)

    def _denominator_inverse(self) -> Terms:
        inv = self._cache.get("s_inv")
        if inv is None:
            s = RingElem(self, dict(self.denominator), 0)
            inv = _series_inverse(s).terms
            self._cache["s_inv"] = inv
        return inv


def _pad_terms(terms, n):
    if terms is None:
        return None
    return tuple((e[:n], v) for e, v in terms)


# -- normal forms -----------------------------------------------------------------


def _prune(spec: RingSpec, terms: Terms) -> Terms:
    cross = spec._cache["cross"]
    N = spec.truncate
    if cross is None and N is None:
        return terms
    out = {}
    for e, c in terms.items():
        if cross is not None and e[cross[0]] and e[cross[1]]:
            continue
        if N is not None and spec.base_degree(e) >= N:
            continue
        out[e] = c
    return out


def _mul_terms(spec: RingSpec, a: Terms, b: Terms) -> Terms:
    p = spec.p
    N = spec.truncate
    cross = spec._cache["cross"]
    out: Terms = {}
    if N is not None:
        bdeg = {e: spec.base_degree(e) for e in b}
    for e1, c1 in a.items():
        d1 = spec.base_degree(e1) if N is not None else 0
        for e2, c2 in b.items():
            if N is not None and d1 + bdeg[e2] >= N:
                continue
            e = tuple(x + y for x, y in zip(e1, e2))
            if cross is not None and e[cross[0]] and e[cross[1]]:
                continue
            out[e] = (out.get(e, 0) + c1 * c2) % p
    return {e: c for e, c in out.items() if c}


def _shift(terms: Terms, alpha: Exp, k: int) -> Terms:
    return {tuple(x + k * a for x, a in zip(e, alpha)): c for e, c in terms.items()}


def _reduce_radical(spec: RingSpec, terms: Terms, denom: int) -> Tuple[Terms, int]:
    p = spec.p
    t = spec._cache["t"]
    c_terms = dict(spec.radical.radicand)
    kc = spec.radical.radicand_denom
    alpha = spec._cache["alpha"]
    while True:
        high = {e: c for e, c in terms.items() if e[t] >= p}
        if not high:
            return terms, denom
        low = {e: c for e, c in terms.items() if e[t] < p}
        lowered = {e[:t] + (e[t] - p,) + e[t + 1:]: c for e, c in high.items()}
        reduced = _mul_terms(spec, lowered, c_terms)
        if kc:
            low = _shift(low, alpha, kc)
            denom += kc
        merged = dict(low)
        for e, c in reduced.items():
            merged[e] = (merged.get(e, 0) + c) % p
        terms = _prune(spec, {e: c for e, c in merged.items() if c})


def _cancel(spec: RingSpec, terms: Terms, denom: int) -> Tuple[Terms, int]:
    alpha = spec._cache["alpha"]
    support = [i for i, a in enumerate(alpha) if a]
    while denom > 0 and terms and all(e[i] >= alpha[i] for e in terms for i in support):
        terms = _shift(terms, alpha, -1)
        denom -= 1
    return terms, denom


def _normal_form(spec: RingSpec, raw: Mapping[Exp, int], denom: int = 0) -> Tuple[Terms, int]:
    """Canonical (terms, denominator power) for a raw term map.

    Order: coefficients mod p, power-series denominators multiplied out,
    t^p rewritten to the radicand, crossing and truncation terms
    dropped, monomial denominators cancelled.
    """
    p = spec.p
    n = len(spec.vars)
    terms: Terms = {}
    for e, c in raw.items():
        if len(e) != n:
            raise InternalInconsistencyError(f"exponent {e} does not match variables {spec.vars}")
        if any(k < 0 for k in e):
            raise InternalInconsistencyError(f"negative exponent {e} in a term map")
        c %= p
        if c:
            terms[e] = (terms.get(e, 0) + c) % p
    terms = _prune(spec, {e: c for e, c in terms.items() if c})
    if denom < 0:
        raise InternalInconsistencyError("negative denominator power")
    if spec.denominator is not None and spec.truncate is not None and denom:
        inv = spec._denominator_inverse()
        for _ in range(denom):
            terms = _mul_terms(spec, terms, inv)
        denom = 0
    if spec.radical is not None:
        terms, denom = _reduce_radical(spec, terms, denom)
    if spec.denominator is not None and spec.truncate is None:
        terms, denom = _cancel(spec, terms, denom)
    if not terms:
        denom = 0
    return terms, denom


def _series_inverse(e: "RingElem") -> "RingElem":
    spec = e.spec
    if spec.radical is not None and any(x[-1] for x in e.terms):
        # e^p = sum c^p m^p lies in the coefficient ring, so e^-1 = e^(p-1) * (e^p)^-1
        norm = e ** spec.p
        if any(x[-1] for x in norm.terms):
            raise InternalInconsistencyError(f"({e})^{spec.p} still involves {spec.radical.var}")
        return e ** (spec.p - 1) * _geometric_inverse(norm)
    return _geometric_inverse(e)


def _geometric_inverse(e: "RingElem") -> "RingElem":
    spec = e.spec
    c0 = e.terms.get(spec._cache["zero"], 0)
    if not c0:
        raise NotInvertibleError(f"{e} has zero constant term")
    inv0 = spec.pc.inv(c0)
    one = RingElem(spec, {spec._cache["zero"]: 1}, 0)
    # e = c0 * (1 - n)
    n = one - e * inv0
    limit = spec.truncate * (spec.p if spec.radical is not None else 1)
    u, power = one, one
    for _ in range(limit):
        power = power * n
        if power.is_zero():
            break
        u = u + power
    u = u * inv0
    if not (u * e).is_one():
        raise NotInvertibleError(f"{e} is not a unit at truncation order {spec.truncate}")
    return u


# -- elements -----------------------------------------------------------------------


class RingElem:
    """An element of a RingSpec in normal form: terms / s^denom."""

    __slots__ = ("spec", "terms", "denom", "_hash")

    def __init__(self, spec: RingSpec, terms: Terms, denom: int = 0):
        self.spec = spec
        self.terms = terms
        self.denom = denom
        self._hash = None

    # -- coercion helpers --
    def _coerce(self, other) -> "RingElem":
        if isinstance(other, RingElem):
            if other.spec is self.spec or other.spec == self.spec:
                return other
            raise InputError(f"mixing elements of {self.spec.describe()} and {other.spec.describe()}")
        if isinstance(other, int) and not isinstance(other, bool):
            return self.spec.const(other)
        return NotImplemented

    def _aligned(self, other: "RingElem") -> Tuple[Terms, Terms, int]:
        if self.denom == other.denom:
            return self.terms, other.terms, self.denom
        alpha = self.spec._cache["alpha"]
        if self.denom < other.denom:
            return _shift(self.terms, alpha, other.denom - self.denom), other.terms, other.denom
        return self.terms, _shift(other.terms, alpha, self.denom - other.denom), self.denom

    # -- arithmetic --
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, d = self._aligned(other)
        p = self.spec.p
        out = dict(a)
        for e, c in b.items():
            out[e] = (out.get(e, 0) + c) % p
        return self.spec.element(out, d)

    __radd__ = __add__

    def __neg__(self):
        p = self.spec.p
        return RingElem(self.spec, {e: (-c) % p for e, c in self.terms.items()}, self.denom)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return self.spec.zero()
        terms = _mul_terms(self.spec, self.terms, other.terms)
        return self.spec.element(terms, self.denom + other.denom)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.spec.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    # -- comparisons --
    def __eq__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            other = self.spec.const(other)
        if not isinstance(other, RingElem):
            return NotImplemented
        return self.spec == other.spec and self.denom == other.denom and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.spec, self.denom, frozenset(self.terms.items())))
        return self._hash

    # -- queries --
    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.denom == 0 and self.terms == {self.spec._cache["zero"]: 1}

    def is_constant(self) -> bool:
        zero = self.spec._cache["zero"]
        return self.denom == 0 and all(e == zero for e in self.terms)

    def constant_term(self) -> int:
        if self.denom:
            raise PreconditionError("constant term of a fraction is not defined")
        return self.terms.get(self.spec._cache["zero"], 0)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def degree(self) -> int:
        """Largest base degree among the numerator terms; -1 for zero."""
        if not self.terms:
            return -1
        return max(self.spec.base_degree(e) for e in self.terms)

    def order(self) -> int:
        """Smallest base degree among the numerator terms; -1 for zero."""
        if not self.terms:
            return -1
        return min(self.spec.base_degree(e) for e in self.terms)

    def coefficient(self, exps: Union[Exp, Mapping[str, int]]) -> int:
        if not isinstance(exps, tuple):
            e = [0] * len(self.spec.vars)
            for name, k in exps.items():
                e[self.spec.index(name)] = k
            exps = tuple(e)
        return self.terms.get(exps, 0)

    def sorted_terms(self) -> List[Tuple[Exp, int]]:
        return sorted(self.terms.items(), key=lambda ec: self.spec.order_key(ec[0]))

    def is_unit(self) -> bool:
        try:
            self.inverse()
        except NotInvertibleError:
            return False
        return True

    def inverse(self) -> "RingElem":
        spec = self.spec
        if self.is_zero():
            raise NotInvertibleError("0 is not invertible")
        if spec.truncate is not None:
            return _series_inverse(self)
        if self.is_constant():
            return spec.const(spec.pc.inv(self.constant_term()))
        alpha = spec._cache["alpha"]
        if alpha is not None and len(self.terms) == 1:
            (e, c), = self.terms.items()
            j = _multiple_of(e, alpha)
            if j is not None:
                inv = spec.pc.inv(c)
                if self.denom >= j:
                    return spec.element({tuple((self.denom - j) * a for a in alpha): inv}, 0)
                return spec.element({spec._cache["zero"]: inv}, j - self.denom)
        raise NotInvertibleError(f"{self} is not a unit in {spec.describe()}")

    # -- structure --
    def split_by(self, name: str) -> Dict[int, "RingElem"]:
        """Coefficients of the powers of one variable."""
        i = self.spec.index(name)
        parts: Dict[int, Terms] = {}
        for e, c in self.terms.items():
            parts.setdefault(e[i], {})[e[:i] + (0,) + e[i + 1:]] = c
        return {k: self.spec.element(v, self.denom) for k, v in sorted(parts.items())}

    def involves(self, name: str) -> bool:
        i = self.spec.index(name)
        return any(e[i] for e in self.terms)

    def divide_by_variable(self, name: str) -> "RingElem":
        """Exact division by one variable; a nonzero remainder is a bug."""
        i = self.spec.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                raise InternalInconsistencyError(f"{self} is not divisible by {name}")
            out[e[:i] + (e[i] - 1,) + e[i + 1:]] = c
        return self.spec.element(out, self.denom)

    def substitute(self, target: RingSpec, images: Mapping[str, "RingElem"]) -> "RingElem":
        """Image under the ring map sending each variable to ``images[var]``."""
        src = self.spec
        imgs = []
        for v in src.vars:
            if v in images:
                imgs.append(target.lift(images[v]) if images[v].spec != target else images[v])
            elif v in target.vars:
                imgs.append(target.var(v))
            else:
                raise UnknownVariableError(v)
        powers: List[List[RingElem]] = [[target.one()] for _ in imgs]

        def power(i: int, k: int) -> RingElem:
            table = powers[i]
            while len(table) <= k:
                table.append(table[-1] * imgs[i])
            return table[k]

        total = target.zero()
        for e, c in self.sorted_terms():
            term = target.const(c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            total = total + term
        if self.denom:
            s = RingElem(src, dict(src.denominator), 0).substitute(target, images)
            total = total * s.inverse() ** self.denom
        return total

    # -- rendering --
    def __str__(self) -> str:
        if not self.terms:
            return "0"
        spec = self.spec
        laurent = None
        if self.denom and spec.denominator is not None:
            alpha = spec._cache["alpha"]
            if alpha is not None and sum(alpha) == 1:
                laurent = alpha.index(1)
        parts = []
        for e, c in self.sorted_terms():
            if laurent is not None:
                e = e[:laurent] + (e[laurent] - self.denom,) + e[laurent + 1:]
            parts.append(_term_text(spec.vars, e, c))
        text = "+".join(parts)
        if self.denom and laurent is None:
            s = RingElem(spec, dict(spec.denominator), 0)
            return f"({text})*({s})^-{self.denom}"
        return text

    def __repr__(self) -> str:
        return f"RingElem({self})"


def _multiple_of(e: Exp, alpha: Exp) -> Optional[int]:
    j = None
    for x, a in zip(e, alpha):
        if a == 0:
            if x:
                return None
            continue
        if x % a:
            return None
        if j is None:
            j = x // a
        elif j != x // a:
            return None
    return j


def _term_text(names: Sequence[str], e: Exp, c: int) -> str:
    factors = []
    for name, k in zip(names, e):
        if k == 1:
            factors.append(name)
        elif k:
            factors.append(f"{name}^{k}")
    if not factors:
        return str(c)
    mono = "*".join(factors)
    return mono if c == 1 else f"{c}*{mono}"


def parse(src: str, spec: RingSpec) -> RingElem:
    return Parser(spec, src).parse()


def invert_unit(e: RingElem) -> RingElem:
    return e.inverse()


def monomial_basis(spec: RingSpec, d: int) -> List[RingElem]:
    return spec.monomial_basis(d)


# -- expression parser -------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


class Parser:
    """Recursive descent over

        expr   := term (('+'|'-') term)*
        term   := factor ('*' factor)*
        factor := '-' factor | atom ('^' '-'? nat)?
        atom   := nat | var | '(' expr ')'

    A leading minus binds to the whole factor, so ``-x^2`` is ``-(x^2)``.
    Negative exponents need an invertible base.
    """

    def __init__(self, spec: RingSpec, src: str, max_exponent: Optional[int] = None):
        self.spec = spec
        self.src = src
        self.max_exponent = max_exponent or DEFAULT_SETTINGS.max_exponent
        self.tokens: List[Tuple[str, str, int]] = []
        pos = 0
        while pos < len(src):
            m = _TOKEN.match(src, pos)
            if m is None or m.end() == pos:
                break
            start = m.start(m.lastindex) if m.lastindex else pos
            if m.group(1) is not None:
                self.tokens.append(("num", m.group(1), start))
            elif m.group(2) is not None:
                self.tokens.append(("var", m.group(2), start))
            elif m.group(3) is not None:
                ch = m.group(3)
                if ch not in "+-*^()":
                    raise ExpressionSyntaxError(f"unexpected character {ch!r}", src, start)
                self.tokens.append(("op", ch, start))
            pos = m.end()
        self.tokens.append(("end", "", len(src)))
        self.i = 0

    def _peek(self) -> Tuple[str, str, int]:
        return self.tokens[self.i]

    def _take(self) -> Tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def _expect(self, value: str) -> None:
        kind, text, pos = self._take()
        if text != value or kind != "op":
            raise ExpressionSyntaxError(f"expected {value!r}", self.src, pos)

    def parse(self) -> RingElem:
        if self._peek()[0] == "end":
            raise ExpressionSyntaxError("empty expression", self.src, 0)
        out = self.expr()
        kind, text, pos = self._peek()
        if kind != "end":
            raise ExpressionSyntaxError(f"unexpected {text!r}", self.src, pos)
        return out

    def expr(self) -> RingElem:
        acc = self.term()
        while self._peek()[1] in ("+", "-") and self._peek()[0] == "op":
            op = self._take()[1]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> RingElem:
        acc = self.factor()
        while self._peek()[1] == "*" and self._peek()[0] == "op":
            self._take()
            acc = acc * self.factor()
        return acc

    def factor(self) -> RingElem:
        base = self.atom()
        if self._peek()[0] == "op" and self._peek()[1] == "^":
            self._take()
            sign = 1
            if self._peek()[0] == "op" and self._peek()[1] == "-":
                self._take()
                sign = -1
            kind, text, pos = self._take()
            if kind != "num":
                raise ExpressionSyntaxError("expected an exponent", self.src, pos)
            k = int(text)
            if k > self.max_exponent:
                raise ExponentOverflowError(f"exponent {k} at position {pos} exceeds {self.max_exponent}")
            try:
                return base ** (sign * k)
            except NotInvertibleError as exc:
                raise ExpressionSyntaxError(f"negative power of a non-unit ({exc})", self.src, pos) from None
        return base

    def atom(self) -> RingElem:
        kind, text, pos = self._take()
        if kind == "op" and text == "-":
            # the exponent of the enclosing factor applies to the negated atom
            return -self.atom()
        if kind == "num":
            return self.spec.const(int(text))
        if kind == "var":
            if text not in self.spec.vars:
                raise UnknownVariableError(text, pos)
            return self.spec.var(text)
        if kind == "op" and text == "(":
            inner = self.expr()
            self._expect(")")
            return inner
        if kind == "end":
            raise ExpressionSyntaxError("unexpected end of expression", self.src, pos)
        raise ExpressionSyntaxError(f"unexpected {text!r}", self.src, pos)


def normal_form(raw: Mapping[Exp, int], spec: RingSpec, denom: int = 0) -> RingElem:
    """Element of ``spec`` denoted by a raw term map over ``spec.vars``."""
    return spec.element(raw, denom)
