"""Plane vector fields P d/dx + Q d/dy and their blowups at the origin."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .deriv import Derivation, DerivationType
from .errors import InputError, PreconditionError
from .modp import PrimeChar
from .report import Record, Report
from .ring import RingElem, RingSpec

logger = logging.getLogger(__name__)

FIXED = "fixed"
NOT_FIXED = "not fixed"

Tag = Tuple[int, int]


@dataclass(frozen=True)
class PlaneField:
    pc: PrimeChar
    P: RingElem
    Q: RingElem

    def __post_init__(self):
        if self.P.spec != self.Q.spec:
            raise InputError("P and Q must live in the same ring")
        spec = self.P.spec
        if len(spec.vars) != 2 or spec.radical or spec.crossing or spec.truncate or spec.denominator:
            raise InputError("plane fields live in a polynomial ring in two variables")

    @classmethod
    def parse(cls, p: int, P: str, Q: str, vars: Sequence[str] = ("x", "y")) -> "PlaneField":
        spec = RingSpec.polynomial(p, vars)
        return cls(spec.pc, spec.parse(P), spec.parse(Q))

    @classmethod
    def diagonal(cls, p: int, a: int, b: int, vars: Sequence[str] = ("x", "y")) -> "PlaneField":
        spec = RingSpec.polynomial(p, vars)
        x, y = spec.gens()
        return cls(spec.pc, x * a, y * b)

    @property
    def spec(self) -> RingSpec:
        return self.P.spec

    @property
    def p(self) -> int:
        return self.pc.p

    @property
    def linear_part(self) -> np.ndarray:
        """[[dP/dx, dP/dy], [dQ/dx, dQ/dy]] at the origin."""
        M = np.zeros((2, 2), dtype=np.int64)
        for r, f in enumerate((self.P, self.Q)):
            for e, c in f.terms.items():
                if sum(e) == 1:
                    M[r, e.index(1)] = c
        return M

    def derivation(self, spot_checks: int = 0) -> Derivation:
        x, y = self.spec.vars
        return Derivation(self.spec, {x: self.P, y: self.Q}, spot_checks=spot_checks)

    def origin_fixed(self) -> bool:
        return self.P.constant_term() == 0 and self.Q.constant_term() == 0

    def diagonal_pair(self) -> Optional[Tag]:
        """(a, b) when the field is exactly a x d/dx + b y d/dy."""
        x_exp, y_exp = (1, 0), (0, 1)
        if any(e != x_exp for e in self.P.terms) or any(e != y_exp for e in self.Q.terms):
            return None
        return self.P.terms.get(x_exp, 0), self.Q.terms.get(y_exp, 0)

    def to_dict(self) -> Dict[str, str]:
        return {"P": str(self.P), "Q": str(self.Q)}

    def __str__(self) -> str:
        x, y = self.spec.vars
        return f"({self.P})*d/d{x} + ({self.Q})*d/d{y}"


def _chart_spec(pc: PrimeChar) -> RingSpec:
    return RingSpec.polynomial(pc, ("u", "v"))


def lift_to_charts(V: PlaneField) -> Tuple[PlaneField, PlaneField]:
    """Lifts to the charts x = u, y = uv and x = uv, y = v of the blowup at the origin."""
    if not V.origin_fixed():
        raise PreconditionError(f"{V} does not vanish at the origin")
    x, y = V.spec.vars
    W = _chart_spec(V.pc)
    u, v = W.gens()

    sub1 = {x: u, y: u * v}
    P1, Q1 = V.P.substitute(W, sub1), V.Q.substitute(W, sub1)
    chart1 = PlaneField(V.pc, P1, (Q1 - v * P1).divide_by_variable("u"))

    sub2 = {x: u * v, y: v}
    P2, Q2 = V.P.substitute(W, sub2), V.Q.substitute(W, sub2)
    chart2 = PlaneField(V.pc, (P2 - u * Q2).divide_by_variable("v"), Q2)
    logger.debug("lifted %s to %s and %s", V, chart1, chart2)
    return chart1, chart2


def normal_form_tag(V: PlaneField) -> Optional[Tag]:
    """Diagonal (a, b) up to unit scaling and swap: first entry 1, second minimal."""
    pair = V.diagonal_pair()
    if pair is None or pair == (0, 0):
        return None
    pc = V.pc
    candidates = []
    for a, b in (pair, pair[::-1]):
        if a % pc.p:
            candidates.append((1, b * pc.inv(a) % pc.p))
    return min(candidates, key=lambda t: t[1])


def _common_monomial(V: PlaneField) -> Tuple[int, int]:
    exps = list(V.P.terms) + list(V.Q.terms)
    if not exps:
        return (0, 0)
    return min(e[0] for e in exps), min(e[1] for e in exps)


@dataclass
class FixedPoints:
    ideal: Tuple[RingElem, RingElem]
    origin_fixed: bool
    free: bool
    isolated_at_origin: bool
    divisorial: Optional[RingElem]

    def to_dict(self) -> Dict[str, object]:
        return {
            "ideal": [str(g) for g in self.ideal],
            "origin_fixed": self.origin_fixed,
            "free": self.free,
            "isolated_at_origin": self.isolated_at_origin,
            "divisorial": None if self.divisorial is None else str(self.divisorial),
        }

    def to_report(self, p: int) -> Report:
        report = Report("fixed points")
        for key, value in self.to_dict().items():
            report.add(Record.info(key, p, "-", value))
        return report


def fixed_points(V: PlaneField) -> FixedPoints:
    """The fixed ideal (P, Q), with its monomial divisorial part and isolation at the origin.

    Only the chart origin is examined; other points of the exceptional divisor are not searched.
    """
    spec = V.spec
    free = V.P.is_unit() or V.Q.is_unit()
    origin = V.origin_fixed()
    common = _common_monomial(V)
    monomial_coeffs = all(f.is_zero() or f.is_monomial() for f in (V.P, V.Q))
    divisorial = None
    if monomial_coeffs or any(common):
        divisorial = spec.monomial(dict(zip(spec.vars, common)))
    isolated = origin and not any(common) and not (V.P.is_zero() and V.Q.is_zero())
    return FixedPoints((V.P, V.Q), origin, free, isolated, divisorial)


@dataclass
class BlowupNode:
    field: PlaneField
    chart_path: List[int]
    status: str
    tag: Optional[Tag]
    cycle: bool = False
    children: List["BlowupNode"] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.chart_path)

    def to_dict(self) -> Dict[str, object]:
        return {
            "chart_path": list(self.chart_path),
            "field": self.field.to_dict(),
            "tag": None if self.tag is None else f"({self.tag[0]},{self.tag[1]})",
            "status": self.status,
            "cycle": self.cycle,
            "children": [c.to_dict() for c in self.children],
        }

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def render(self, indent: int = 0) -> List[str]:
        tag = "-" if self.tag is None else f"({self.tag[0]},{self.tag[1]})"
        path = ".".join(str(c) for c in self.chart_path) or "root"
        mark = " cycle" if self.cycle else ""
        lines = [f"{'  ' * indent}{path}: {self.field} tag={tag} {self.status}{mark}"]
        for c in self.children:
            lines.extend(c.render(indent + 1))
        return lines


@dataclass
class BlowupTree:
    root: BlowupNode
    dtype: DerivationType
    max_depth: int
    terminated: bool

    def nodes(self) -> List[BlowupNode]:
        return list(self.root.walk())

    def cycles(self) -> List[BlowupNode]:
        return [n for n in self.root.walk() if n.cycle]

    def to_dict(self) -> Dict[str, object]:
        return {
            "type": self.dtype.value,
            "max_depth": self.max_depth,
            "terminated": self.terminated,
            "root": self.root.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        head = f"type={self.dtype.value} terminated={self.terminated} cycles={len(self.cycles())}"
        return "\n".join([head] + self.root.render())


def blowup_tree(V: PlaneField, max_depth: int, spot_checks: int = 5) -> BlowupTree:
    """Blow up isolated fixed origins until none remain, a tag recurs, or max_depth is reached."""
    if max_depth < 0:
        raise InputError("max_depth must be non-negative")
    dtype = V.derivation(spot_checks).dtype
    if dtype not in (DerivationType.ADDITIVE, DerivationType.MULTIPLICATIVE):
        raise PreconditionError(f"blowup trees need an additive or multiplicative field, got {dtype.value}")
    open_leaves = 0

    def grow(field_: PlaneField, path: List[int], seen: Tuple[Tag, ...]) -> BlowupNode:
        nonlocal open_leaves
        fp = fixed_points(field_)
        tag = normal_form_tag(field_)
        node = BlowupNode(field_, path, FIXED if fp.origin_fixed else NOT_FIXED, tag)
        if tag is not None and tag in seen:
            node.cycle = True
            logger.debug("tag %s recurs at %s", tag, path)
            return node
        if not fp.isolated_at_origin:
            return node
        if len(path) >= max_depth:
            open_leaves += 1
            return node
        chart1, chart2 = lift_to_charts(field_)
        nxt = seen + ((tag,) if tag is not None else ())
        node.children = [grow(chart1, path + [1], nxt), grow(chart2, path + [2], nxt)]
        return node

    root = grow(V, [], ())
    tree = BlowupTree(root, dtype, max_depth, False)
    tree.terminated = open_leaves == 0 and not tree.cycles()
    logger.info("blowup tree: %d nodes, %d cycles", len(tree.nodes()), len(tree.cycles()))
    return tree


def lift_type_check(V: PlaneField, spot_checks: int = 5) -> Report:
    """Both chart lifts keep the type of the field."""
    p = V.p
    want = V.derivation(spot_checks).dtype
    report = Report("lift types")
    for n, chart in enumerate(lift_to_charts(V), start=1):
        got = chart.derivation(spot_checks).dtype if not (chart.P.is_zero() and chart.Q.is_zero()) else None
        report.add(Record.check("lift_type", p, want.value, None if got is None else got.value, chart=n))
    return report
