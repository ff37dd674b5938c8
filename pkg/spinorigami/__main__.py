import argparse
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .humphries import chain_relation
from .johnson import ConfigurationError as JohnsonConfigurationError
from .johnson import ContractionModulusError, ObstructionError
from .neighborhood import NeighborhoodError
from .origami import (
    ConnectivityError,
    CurveError,
    FormatError,
    PermutationError,
    TurningConsistencyError,
    format_origami,
    genus,
    homology_class,
    parse_curve,
    parse_origami,
    spin_modulus,
    stratum,
    turning_number,
    winding_number,
)
from .report import CommandReport, Stopwatch, make_report, render_text, to_json
from .spin import (
    ChainIndexError,
    ChainSpin,
    ModulusError,
    ParityError,
    StateSpaceError,
    all_orbits,
    arf_spin,
    chain_arf,
    count_by_arf,
    orbit,
)
from .suites import SUITES, SuiteResult, johnson_suite, oracle_suite, relations_suite
from .symplectic import DimensionError, EnumerationBoundError, RankError
from .thurstonveech import (
    OrientabilityError,
    ParameterError,
    PartitionError,
    TemplateError,
    leaf_windings,
    prototype,
)
from .words import BoundExceededError
from .words import ConfigurationError as WordsConfigurationError


ERRORS: Tuple[type, ...] = (
    DimensionError,
    RankError,
    EnumerationBoundError,
    ModulusError,
    ParityError,
    StateSpaceError,
    ChainIndexError,
    ConnectivityError,
    PermutationError,
    CurveError,
    TurningConsistencyError,
    FormatError,
    NeighborhoodError,
    OrientabilityError,
    PartitionError,
    ParameterError,
    TemplateError,
    ContractionModulusError,
    JohnsonConfigurationError,
    ObstructionError,
    WordsConfigurationError,
    BoundExceededError,
)


def _int_list(text: str) -> List[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Expected comma separated integers, got '{text}'") from None


def _read(path: str) -> str:
    with open(path, "r") as bfp:
        return bfp.read()


def cmd_count(g: int, r: int) -> Tuple[Dict[str, Any], Dict[str, bool]]:
    total, even, odd = count_by_arf(g, r)
    outputs: Dict[str, Any] = {"total": total}
    checks: Dict[str, bool] = {}
    if even is not None and odd is not None:
        outputs["even"] = even
        outputs["odd"] = odd
        checks["even + odd = total"] = even + odd == total
    return outputs, checks


def cmd_prototype(
    kappa: Sequence[int], arf: Optional[int], g: Optional[int], out: Optional[str]
) -> Tuple[Dict[str, Any], Dict[str, bool]]:
    proto = prototype(kappa, arf, g=g)
    o = proto.origami
    outputs: Dict[str, Any] = {
        "template": proto.template.name,
        "squares": o.n,
        "genus": proto.g,
        "stratum": stratum(o),
        "spin": list(proto.spin.values),
        "origami": format_origami(o),
    }
    checks = {
        "stratum": stratum(o) == sorted(kappa, reverse=True),
        "genus": g is None or proto.g == g,
        "cylinder cores admissible": all(
            turning_number(o, cyl.core) % proto.r == 0
            for cyl in proto.realization.cylinders.values()
        ),
    }
    if proto.r % 2 == 0:
        found = arf_spin(proto.spin)
        outputs["arf"] = found
        checks["arf"] = arf is None or found == arf

    modulus = 2 * proto.g - 2
    windings = leaf_windings(proto)
    outputs["leaf windings"] = windings
    checks["leaf windings"] = all(
        windings[proto.template.leaf(i).name] == i % modulus for i in proto.leaf_indices
    )

    if out is not None:
        with open(out, "w") as bfp:
            bfp.write(format_origami(o))
        print(f"Wrote {proto.template.name} origami to {out}", file=sys.stderr)
    return outputs, checks


def cmd_orbit(
    g: int, r: int, start: Optional[Sequence[int]], everything: bool
) -> Tuple[Dict[str, Any], Dict[str, bool]]:
    relation = chain_relation(g)
    outputs: Dict[str, Any] = {}
    checks: Dict[str, bool] = {}
    if everything:
        orbits = all_orbits(relation, r)
        sizes = [len(members) for members in orbits]
        outputs["orbits"] = len(orbits)
        outputs["sizes"] = sizes
        if r % 2 == 0:
            arfs = [
                chain_arf(ChainSpin(relation=relation, r=r, free=members[0])) for members in orbits
            ]
            outputs["arf"] = arfs
            checks["one orbit per arf invariant"] = sorted(arfs) == [0, 1]
        else:
            checks["single orbit"] = len(orbits) == 1
        return outputs, checks

    free = list(start) if start is not None else [0] * (2 * g)
    state = ChainSpin(relation=relation, r=r, free=free)
    members = orbit(state)
    outputs["start"] = list(state.values)
    outputs["size"] = len(members)
    if r % 2 == 0:
        outputs["arf"] = chain_arf(state)
        checks["arf constant on orbit"] = all(chain_arf(m) == outputs["arf"] for m in members)
    return outputs, checks


def cmd_verify(
    suite: str, seed: int, g: Optional[int], s: Optional[int], trials: int
) -> Tuple[Dict[str, Any], Dict[str, bool]]:
    result: SuiteResult
    if suite == "relations":
        result = relations_suite(seed)
    elif suite == "johnson":
        result = johnson_suite(g, s)
    else:
        result = oracle_suite(seed, trials)
    return result.outputs, result.checks


def cmd_winding(origami_path: str, curve_path: str) -> Tuple[Dict[str, Any], Dict[str, bool]]:
    o = parse_origami(_read(origami_path))
    c = parse_curve(_read(curve_path))
    winding = winding_number(o, c)
    outputs: Dict[str, Any] = {
        "turning": turning_number(o, c),
        "winding": winding.value,
        "modulus": winding.modulus,
        "class": list(homology_class(o, c).coords),
    }
    return outputs, {}


def cmd_stratum(origami_path: str) -> Tuple[Dict[str, Any], Dict[str, bool]]:
    o = parse_origami(_read(origami_path))
    o.check_connected()
    outputs: Dict[str, Any] = {
        "squares": o.n,
        "stratum": stratum(o),
        "genus": genus(o),
        "modulus": spin_modulus(o),
    }
    return outputs, {"zero orders sum to 2g-2": sum(stratum(o)) == 2 * genus(o) - 2}


def _dispatch(args: argparse.Namespace) -> Tuple[Dict[str, Any], Dict[str, Any], Dict[str, bool]]:
    if args.command == "count":
        inputs: Dict[str, Any] = {"g": args.g, "r": args.r}
        return (inputs,) + cmd_count(args.g, args.r)
    if args.command == "prototype":
        inputs = {"kappa": args.kappa, "arf": args.arf, "g": args.g}
        return (inputs,) + cmd_prototype(args.kappa, args.arf, args.g, args.out)
    if args.command == "orbit":
        inputs = {"g": args.g, "r": args.r, "start": args.start, "all": args.all}
        return (inputs,) + cmd_orbit(args.g, args.r, args.start, args.all)
    if args.command == "verify":
        inputs = {"suite": args.suite, "seed": args.seed}
        if args.suite == "johnson":
            inputs.update({"g": args.g, "s": args.s})
        if args.suite == "oracle":
            inputs["trials"] = args.trials
        return (inputs,) + cmd_verify(args.suite, args.seed, args.g, args.s, args.trials)
    if args.command == "winding":
        inputs = {"origami": args.origami, "curve": args.curve}
        return (inputs,) + cmd_winding(args.origami, args.curve)
    inputs = {"origami": args.origami}
    return (inputs,) + cmd_stratum(args.origami)


def main(args: argparse.Namespace) -> int:
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    stopwatch = Stopwatch()
    try:
        inputs, outputs, checks = _dispatch(args)
    except ERRORS as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"Cannot read input: {e}", file=sys.stderr)
        return 1

    inputs["seed"] = args.seed
    report: CommandReport = make_report(args.command, inputs, outputs, checks, stopwatch)
    if args.json:
        sys.stdout.write(to_json(report) + "\n")
    else:
        sys.stdout.write(render_text(report))
    if not report["passed"]:
        failed = [name for name, ok in checks.items() if not ok]
        print(f"Failed checks: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Spin structures, square-tiled surfaces and their twist relations"
    )
    parser.add_argument(
        "--json",
        action="store_true",
        help="Print the versioned JSON report instead of text",
    )
    parser.add_argument(
        "--seed",
        default=0,
        type=int,
        help="Seed for every random choice, defaults to 0",
    )
    parser.add_argument(
        "--verbose",
        action="store_true",
        help="Log search progress to stderr",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    count = commands.add_parser("count", help="Count r-spin structures by Arf invariant")
    count.add_argument("--g", required=True, type=int, help="Genus")
    count.add_argument("--r", required=True, type=int, help="Spin modulus, must divide 2g-2")

    proto = commands.add_parser("prototype", help="Build the prototype origami of a stratum")
    proto.add_argument(
        "--kappa", required=True, type=_int_list, help="Zero orders, comma separated"
    )
    proto.add_argument("--arf", default=None, type=int, help="Arf invariant when gcd is even")
    proto.add_argument("--g", default=None, type=int, help="Genus, checked against kappa")
    proto.add_argument("--out", default=None, type=str, help="Write the origami file here")

    orb = commands.add_parser("orbit", help="Twist orbits of spin structures on the Humphries curves")
    orb.add_argument("--g", required=True, type=int, help="Genus")
    orb.add_argument("--r", required=True, type=int, help="Spin modulus")
    orb.add_argument(
        "--start",
        default=None,
        type=_int_list,
        help="Values on c1, ..., c2g, defaults to all zero",
    )
    orb.add_argument("--all", action="store_true", help="Partition the whole state space")

    verify = commands.add_parser("verify", help="Run a verification suite")
    verify.add_argument("suite", choices=SUITES, help="Suite to run")
    verify.add_argument("--g", default=None, type=int, help="Johnson suite genus")
    verify.add_argument("--s", default=None, type=int, help="Johnson suite contraction modulus")
    verify.add_argument("--trials", default=500, type=int, help="Oracle suite trial count")

    winding = commands.add_parser("winding", help="Winding and class of a curve on an origami")
    winding.add_argument("origami", metavar="ORIGAMI", type=str, help="Origami file")
    winding.add_argument("curve", metavar="CURVE", type=str, help="Curve file")

    strat = commands.add_parser("stratum", help="Stratum and genus of an origami")
    strat.add_argument("origami", metavar="ORIGAMI", type=str, help="Origami file")
    return parser


def cli(argv: Optional[Sequence[str]] = None) -> None:
    args = build_parser().parse_args(argv)
    sys.exit(main(args))


if __name__ == "__main__":
    cli()
