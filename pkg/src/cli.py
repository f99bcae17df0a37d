"""Command-line front end and the acceptance run."""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import pandas as pd

from . import blowup, deriv, modp, quotient, torsor
from .config import DEFAULT_SETTINGS, Settings, configure_logging
from .deriv import Derivation, DerivationType
from .descriptors import DescriptorLoader
from .errors import InputError, InsepError, PreconditionError
from .modp import PrimeChar
from .report import FAIL, INFO, PASS, Record, Report
from .ring import RingSpec

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2

SUBCOMMANDS = ("identities", "classify", "quotient", "torsor", "blowup", "adjunction", "all")


def parse_primes(text: Optional[str]) -> Optional[Tuple[int, ...]]:
    if text is None:
        return None
    try:
        primes = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise InputError(f"--primes expects a comma separated list of integers, got {text!r}") from None
    for p in primes:
        PrimeChar.of(p)
    if not primes:
        raise InputError("--primes is empty")
    return primes


def settings_from_args(args: argparse.Namespace) -> Settings:
    return DEFAULT_SETTINGS.with_overrides(
        primes=parse_primes(args.primes),
        seed=args.seed,
        samples=args.samples,
        degree_bound=args.d,
        max_depth=args.max_depth,
    )


def save_if_requested(report: Report, args: argparse.Namespace) -> None:
    if getattr(args, "save", None):
        DescriptorLoader(reports_dir=args.reports_dir).save_report(args.save, report)


def emit(report: Report, args: argparse.Namespace) -> int:
    save_if_requested(report, args)
    if args.json:
        print(report.to_json())
    else:
        for line in report.lines():
            print(line)
    return EXIT_FAIL if report.failures else EXIT_OK


# -- subcommands ------------------------------------------------------------------------


def cmd_identities(args, settings: Settings) -> int:
    report = Report("identities")
    for p in settings.primes:
        report.extend(modp.identity_suite(PrimeChar.of(p), include_counts=p >= 3))
    return emit(report, args)


def cmd_classify(args, settings: Settings) -> int:
    loader = DescriptorLoader(seed=settings.seed)
    D = loader.get_derivation(loader.load(args.input), truncate=args.truncate)
    dtype = deriv.classify(D)
    locus = deriv.fixed_locus(D)
    if args.json:
        print(json.dumps({"derivation": str(D), "type": dtype.value, "fixed_locus": locus.to_dict()}, indent=2))
    else:
        print(dtype.value)
        print(f"fixed locus: {locus}")
    return EXIT_OK


def cmd_quotient(args, settings: Settings) -> int:
    loader = DescriptorLoader(seed=settings.seed)
    D = loader.get_derivation(loader.load(args.input), truncate=args.truncate)
    d = settings.degree_bound
    spaces = [quotient.invariants_basis(D, d)]
    report = Report("quotient")
    if D.dtype is DerivationType.MULTIPLICATIVE:
        try:
            spaces += [quotient.eigen_basis(D, d, k) for k in range(D.p)]
            report.add(quotient.eigen_dimension_check(D, d))
        except PreconditionError as e:
            logger.warning("eigenspaces skipped: %s", e)
    elif D.dtype is DerivationType.ADDITIVE:
        chain, chain_report = quotient.filtration_chain(D, d)
        spaces += chain
        report.extend(chain_report)
    save_if_requested(report, args)
    if args.json:
        print(json.dumps({"subspaces": [s.to_dict() for s in spaces], "checks": [r.to_dict() for r in report]}, indent=2))
    else:
        for s in spaces:
            print(s)
        for line in report.lines():
            print(line)
    return EXIT_FAIL if report.failures else EXIT_OK


def cmd_torsor(args, settings: Settings) -> int:
    loader = DescriptorLoader(seed=settings.seed)
    T, section = loader.get_torsor(loader.load(args.input))
    report = Report("torsor")
    report.extend(torsor.validate(T))
    report.extend(torsor.transition_exponent_data(T))
    if section is not None:
        report.extend(torsor.glued_derivation_check(T, torsor.SECTION, section))
    elif all(g.is_zero() for _, g in T.transitions.values()):
        report.extend(torsor.glued_derivation_check(T, torsor.SPLIT))
    report.extend(torsor.mutation_sweep(T, settings.mutation_exponents))
    return emit(report, args)


def cmd_blowup(args, settings: Settings) -> int:
    loader = DescriptorLoader(seed=settings.seed)
    V = loader.get_plane_field(loader.load(args.input))
    tree = blowup.blowup_tree(V, settings.max_depth)
    if args.json:
        print(tree.to_json())
    else:
        print(tree.to_text())
    return EXIT_OK


def cmd_adjunction(args, settings: Settings) -> int:
    c_text = None
    if args.input:
        loader = DescriptorLoader(seed=settings.seed)
        p, c_text = loader.get_adjunction(loader.load(args.input))
        primes: Sequence[int] = (p,)
    else:
        primes = settings.primes
    report = Report("adjunction")
    for p in primes:
        report.extend(adjunction_suite(PrimeChar.of(p), settings, c_text))
    return emit(report, args)


def cmd_all(args, settings: Settings) -> int:
    summary = run_all(settings.seed, settings)
    save_if_requested(summary.report, args)
    if args.json:
        print(summary.report.to_json())
    else:
        print(summary.to_text())
    return EXIT_FAIL if summary.report.failures else EXIT_OK


COMMANDS = {
    "identities": cmd_identities,
    "classify": cmd_classify,
    "quotient": cmd_quotient,
    "torsor": cmd_torsor,
    "blowup": cmd_blowup,
    "adjunction": cmd_adjunction,
    "all": cmd_all,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=int, help="degree bound")
    common.add_argument("--truncate", type=int, help="truncation order for ring descriptors")
    common.add_argument("--primes", help="comma separated primes, e.g. 2,3,5,7")
    common.add_argument("--max-depth", dest="max_depth", type=int, help="blowup depth limit")
    common.add_argument("--samples", type=int, help="random samples per check")
    common.add_argument("--seed", type=int, help="seed for sampled checks")
    common.add_argument("--json", action="store_true", help="emit JSON instead of report lines")
    common.add_argument("--save", metavar="FILENAME", help="also write the report as JSON to this file")
    common.add_argument("--reports-dir", dest="reports_dir", default="reports", help="directory for --save")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="insep", description="Exact checks for quotients by alpha_p and mu_p actions")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("identities", parents=[common], help="modular identity suite")
    for name, what in (
        ("classify", "classify a derivation descriptor"),
        ("quotient", "invariants and eigen/filtration bases"),
        ("torsor", "validate torsor gluing data"),
        ("blowup", "blowup tree of a plane field"),
    ):
        p = sub.add_parser(name, parents=[common], help=what)
        p.add_argument("input", help="descriptor path or inline JSON")
    adj = sub.add_parser("adjunction", parents=[common], help="adjunction identities")
    adj.add_argument("input", nargs="?", help="optional {\"p\", \"c\"} descriptor")
    sub.add_parser("all", parents=[common], help="full acceptance run")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    if args.d is not None and args.d < 0:
        print("❌ --d must be non-negative", file=sys.stderr)
        return EXIT_INPUT
    if args.truncate is not None and args.truncate < 1:
        print("❌ --truncate must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        settings = settings_from_args(args)
        return COMMANDS[args.command](args, settings)
    except (InputError, PreconditionError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_INPUT
    except InsepError as e:
        print(f"❌ internal error: {e}", file=sys.stderr)
        return EXIT_FAIL


# -- acceptance run ---------------------------------------------------------------------------


def _pick(primes: Sequence[int], allowed: Sequence[int]) -> List[int]:
    return [p for p in primes if p in allowed]


def identities_suite(settings: Settings, rng: random.Random) -> Report:
    report = Report("identities")
    for p in settings.primes:
        report.extend(modp.identity_suite(PrimeChar.of(p), include_counts=False))
    return report


def counting_suite(settings: Settings, rng: random.Random) -> Report:
    report = Report("counting")
    for p in settings.primes:
        if p < 3:
            continue
        pc = PrimeChar.of(p)
        report.extend(modp.counting_oracle_report(pc))
        report.extend(modp.dk_residue_audit(pc))
    return report


def radical_example_suite(settings: Settings, rng: random.Random) -> Report:
    """t^2 d/dt on F_3[x,y][t]/(t^3 - x)."""
    report = Report("radical example")
    spec = RingSpec.polynomial(3, ["x", "y"]).radical_extension("t", "x")
    D = Derivation(spec, {"t": "t^2"}, spot_checks=settings.spot_checks, seed=settings.seed)
    report.add(Record.check("radical_example_type", 3, "additive", D.dtype.value))
    d = 2
    E1 = quotient.filtration_basis(D, d, 1)
    t_index = spec.t_index
    expected = [str(m) for m in spec.monomial_basis(d) if next(iter(m.terms))[t_index] in (0, 2)]
    report.add(Record.check("radical_example_E1", 3, sorted(expected), sorted(str(b) for b in E1.basis), d=d))
    E2 = quotient.filtration_basis(D, d, 2)
    report.add(Record.check("radical_example_E2_full", 3, len(spec.monomial_exponents(d)), E2.dim, d=d))
    tau = quotient.mult_map_analysis(D, 1, 2, d)
    report.add(Record.check("radical_example_cokernel", 3, ["t", "y*t", "y^2*t"], [str(x) for x in tau.cokernel], d=d))
    report.add(Record.flag("radical_example_xt_in_image", 3, tau.image_contains(spec.parse("x*t")), d=d))
    report.extend(tau.report)
    _, chain = quotient.filtration_chain(D, d)
    report.extend(chain)
    return report


def blowup_suite(settings: Settings, rng: random.Random) -> Report:
    report = Report("blowup")
    V = blowup.PlaneField.diagonal(5, 1, 2)
    c1, c2 = blowup.lift_to_charts(V)
    tags = sorted(str(blowup.normal_form_tag(c)) for c in (c1, c2))
    report.add(Record.check("blowup_chart_tags", 5, ["(1, 1)", "(1, 2)"], tags))
    report.extend(blowup.lift_type_check(V, settings.spot_checks))
    tree = blowup.blowup_tree(V, settings.max_depth, settings.spot_checks)
    report.add(Record.check("blowup_cycle_depths", 5, [1], [n.depth for n in tree.cycles()], max_depth=settings.max_depth))
    report.add(Record.check("blowup_terminates", 5, False, tree.terminated, max_depth=settings.max_depth))
    W = blowup.PlaneField.diagonal(2, 1, 1)
    small = blowup.blowup_tree(W, settings.max_depth, settings.spot_checks)
    report.add(Record.check("blowup_terminates", 2, True, small.terminated, max_depth=settings.max_depth))
    report.add(Record.check("blowup_depth", 2, 1, max(n.depth for n in small.nodes())))
    return report


def _random_diagonal(pc: PrimeChar, rng: random.Random, spot_checks: int) -> Derivation:
    p = pc.p
    a, b = 0, 0
    while a == 0 and b == 0:
        a, b = rng.randrange(p), rng.randrange(p)
    spec = RingSpec.polynomial(pc, ["x", "y"])
    return Derivation(spec, {"x": f"{a}*x", "y": f"{b}*y"}, spot_checks=spot_checks, seed=rng.randrange(1 << 30))


def eigen_suite(settings: Settings, rng: random.Random) -> Report:
    report = Report("eigen")
    d = 10
    for p in _pick(settings.primes, (3, 5, 7)):
        pc = PrimeChar.of(p)
        for _ in range(settings.eigen_fields):
            D = _random_diagonal(pc, rng, settings.spot_checks)
            monos = D.spec.monomial_basis(d)
            report.extend(quotient.eigen_decomposition_report(D, monos))
            report.add(quotient.eigen_dimension_check(D, d))
            pairs = [(D.spec.random_element(rng), D.spec.random_element(rng)) for _ in range(2)]
            report.extend(quotient.grading_check(D, pairs))
            report.extend(quotient.za_report(D, D.spec.random_element(rng)))
    return report


def _unit_plus_frobenius(pc: PrimeChar, rng: random.Random, N: int) -> str:
    p = pc.p
    terms = ["1"]
    for j in range(1, (N - 1) // p + 1):
        c = rng.randrange(p)
        if c:
            terms.append(f"{c}*x^{p * j}")
    return "+".join(terms)


def z_suite(settings: Settings, rng: random.Random) -> Report:
    report = Report("z construction")
    for p in _pick(settings.primes, (3, 5, 7)):
        pc = PrimeChar.of(p)
        N = settings.truncation_multiplier * p
        spec = RingSpec.polynomial(pc, ["x"], truncate=N)
        for n in range(settings.z_derivations):
            w = _unit_plus_frobenius(pc, rng, N)
            D = Derivation(spec, {"x": w}, spot_checks=settings.spot_checks, seed=n)
            a = spec.parse("x") + spec.element({(2,): rng.randrange(p), (3,): rng.randrange(p)})
            zsec = quotient.z_construct(D, a)
            report.add(Record.flag("z_construct", p, D.apply(zsec.z).is_one(), w=w, a=str(a)))
            report.extend(quotient.z_power_independence(D, zsec))
            pairs = [(spec.random_element(rng), spec.random_element(rng))]
            report.extend(deriv.coaction_check(D, pairs))
            algebra = torsor.build_local_torsor_algebra(D, (spec.one(), zsec.z), samples=pairs)
            report.extend(algebra.report)
    return report


def torsor_suite(settings: Settings, rng: random.Random) -> Report:
    report = Report("torsor")
    T = torsor.TorsorData.build(2, ["s^3+s", "s^-1+s^-3"], {(0, 1): ("s^-2", "0")})
    report.extend(torsor.validate(T))
    sweep = torsor.mutation_sweep(T, settings.mutation_exponents)
    report.add(Record.flag("mutation_count", 2, len(sweep) >= 50, got=len(sweep)))
    report.extend(sweep)
    report.extend(torsor.transition_exponent_data(T))
    report.extend(torsor.glued_derivation_check(T, torsor.SPLIT, spot_checks=settings.spot_checks))
    report.extend(torsor.glued_derivation_check(T, torsor.SECTION, ["1", "s^-2"], spot_checks=settings.spot_checks))
    return report


def adjunction_suite(pc: PrimeChar, settings: Settings, c_text: Optional[str] = None,
                     rng: Optional[random.Random] = None) -> Report:
    rng = rng or random.Random(settings.seed)
    p = pc.p
    if c_text is None:
        base = RingSpec.polynomial(pc, ["x"], truncate=p + 1)
        c_text = str(base.random_element(rng, max_terms=2))
    model, _ = torsor.adjunction_model(pc, c_text)
    samples = torsor.random_adjunction_samples(model, rng, settings.samples)
    report = Report(f"adjunction p={p}")
    report.extend(torsor.adjunction_identity_check(pc, c_text, samples))
    base = RingSpec.polynomial(pc, ["x"])
    report.extend(torsor.local_dualizing_generator(pc, base.parse("x")).certificate())
    if p == 3:
        report.extend(torsor.crossing_fixed_ideal_check(pc, "x", "y", 10))
    return report


def adjunction_sweep(settings: Settings, rng: random.Random) -> Report:
    report = Report("adjunction")
    for p in _pick(settings.primes, (2, 3, 5, 7)):
        report.extend(adjunction_suite(PrimeChar.of(p), settings, rng=rng))
    return report


def hochschild_suite(settings: Settings, rng: random.Random) -> Report:
    report = Report("hochschild")
    for p in _pick(settings.primes, (2, 3, 5)):
        pc = PrimeChar.of(p)
        spec = RingSpec.polynomial(pc, ["x"], truncate=settings.truncation_multiplier * p)
        for _ in range(settings.hochschild_pairs):
            w = spec.random_element(rng, max_degree=3)
            Dp = Derivation(spec, {"x": spec.random_element(rng, max_degree=3)}, spot_checks=0)
            samples = [spec.random_element(rng) for _ in range(settings.samples)]
            report.extend(deriv.hochschild_check(w, Dp, samples))
    return report


def stability_suite(settings: Settings, rng: random.Random) -> Report:
    report = Report("truncation stability")
    for p in _pick(settings.primes, (3, 5)):
        pc = PrimeChar.of(p)
        N = settings.truncation_multiplier * p
        spec = RingSpec.polynomial(pc, ["x"], truncate=N)
        for _ in range(settings.stability_derivations):
            h = spec.random_element(rng, max_degree=N - 1)
            report.extend(quotient.truncation_stability(pc, str(h), N))
        plane = RingSpec.polynomial(pc, ["x", "y"], truncate=N)
        kept = 0
        for _ in range(10 * settings.stability_derivations):
            if kept == settings.stability_derivations:
                break
            images = {v: str(plane.random_element(rng)) for v in plane.vars}
            try:
                checked = quotient.truncation_stability(pc, images, N)
            except PreconditionError:
                # zero, or not preserving (x, y)^N
                continue
            report.extend(checked)
            kept += 1
        logger.debug("truncation stability p=%d: %d two-variable fields", p, kept)
    return report


SUITES: List[Tuple[str, Callable[[Settings, random.Random], Report]]] = [
    ("identities", identities_suite),
    ("counting", counting_suite),
    ("radical example", radical_example_suite),
    ("blowup", blowup_suite),
    ("eigen decomposition", eigen_suite),
    ("z construction", z_suite),
    ("torsor", torsor_suite),
    ("adjunction", adjunction_sweep),
    ("hochschild", hochschild_suite),
    ("truncation stability", stability_suite),
]


@dataclass
class RunSummary:
    report: Report
    table: pd.DataFrame

    def to_text(self) -> str:
        lines = []
        for _, row in self.table.iterrows():
            mark = "✅" if row["fail"] == 0 else "❌"
            lines.append(f"{mark} {row['suite']}: {row['pass']} passed, {row['fail']} failed, {row['info']} info")
        lines.append("")
        lines.append(self.table.to_string(index=False))
        return "\n".join(lines)


def run_all(seed: int = 0, settings: Optional[Settings] = None) -> RunSummary:
    """Run every acceptance suite with the given seed."""
    settings = (settings or DEFAULT_SETTINGS).with_overrides(seed=seed)
    combined = Report("acceptance")
    rows = []
    for index, (name, suite) in enumerate(SUITES, start=1):
        logger.info("suite %d: %s", index, name)
        rng = random.Random(seed * 1000 + index)
        try:
            report = suite(settings, rng)
        except InsepError as e:
            logger.warning("suite %s aborted: %s", name, e)
            report = Report(name)
            report.add(Record.flag("suite_completed", 0, False, got=type(e).__name__, suite=name))
        combined.extend(report)
        rows.append({
            "suite": name,
            "records": len(report),
            "pass": report.count(PASS),
            "fail": report.count(FAIL),
            "info": report.count(INFO),
        })
        logger.info("suite %s: %d records, %d failures", name, len(report), report.count(FAIL))
    table = pd.DataFrame(rows, columns=["suite", "records", "pass", "fail", "info"])
    return RunSummary(combined, table)
