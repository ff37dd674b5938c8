import logging
from math import gcd
from typing import Any, Dict, List, NamedTuple, Optional, Sequence

import numpy as np

from .johnson import contract, kernel_span_report, wedge_embed
from .origami import (
    CombCurve,
    CurveError,
    Cylinder,
    Origami,
    TurningConsistencyError,
    cylinder_shear,
    genus,
    homology_class,
    random_curve,
    spin_modulus,
    stratum,
    transport_curve,
    turning_number,
)
from .spin import framed
from .symplectic import (
    HomologyClass,
    QuadForm2,
    SymplecticMap,
    arf,
    arf_by_majority,
    intersection_pairing,
    quad_value,
    transvection,
)
from .thurstonveech import (
    Prototype,
    build_origami,
    d_system,
    intersection_graph,
    prototype,
)
from .words import (
    DEFAULT_D_BOUND,
    ConfigurationError,
    boundary_curves,
    chain_config,
    core_config,
    d_config,
    d_names,
    default_probes,
    gcd_procedure,
    lantern_config,
    prototype_surface,
    realization_surface,
    verify_braid,
    verify_chain_relation,
    verify_d_membership,
    verify_lantern,
    verify_sliding_word,
)


logger = logging.getLogger(__name__)


SUITES = ("relations", "johnson", "oracle")
JOHNSON_GENERA = (3, 4, 5)
ORACLE_KAPPAS = ((4,), (2, 2), (1, 1, 1, 1))


class SuiteResult(NamedTuple):
    outputs: Dict[str, Any]
    checks: Dict[str, bool]


def relations_suite(seed: int = 0, *, bound: int = DEFAULT_D_BOUND, gcd_trials: int = 100) -> SuiteResult:
    """
    Braid, chain, lantern and D relations on configurations realized on the
    genus 3 and genus 5 single-zero prototypes, the explicit sliding word,
    and the gcd procedure on random winding pairs.
    """
    rng = np.random.default_rng(seed)
    outputs: Dict[str, Any] = {}
    checks: Dict[str, bool] = {}

    proto3 = prototype([4], 1)
    surface3 = prototype_surface(proto3)
    everything = core_config(surface3, [c.name for c in proto3.system.curves])
    probes = default_probes(everything, rng)
    braids = []
    for i, a in enumerate(everything.names):
        for b in everything.names[i + 1:]:
            if everything.meets(a, b) == 1:
                verdict = verify_braid(everything[a], everything[b], probes)
                braids.append(verdict)
                checks[verdict["relation"]] = verdict["agree"]
    outputs["braid"] = braids

    chains = []
    for k in range(2, 6):
        chain, boundary = chain_config(surface3, [f"a{i}" for i in range(1, k + 1)])
        verdict = verify_chain_relation(chain, boundary, default_probes(chain, rng, extra=boundary))
        chains.append(verdict)
        checks[verdict["relation"]] = verdict["agree"]
    outputs["chain"] = chains

    d7 = realization_surface(build_origami(d_system(7)))
    lanterns = []
    for label, surface, names in (
        ("g=3", surface3, ["a1", "a2", "a3", "a4", "a5"]),
        ("D7 surface", d7, ["c1", "c2", "c3", "c4", "c5"]),
    ):
        verdict = verify_lantern(lantern_config(surface, names))
        lanterns.append(verdict)
        checks[f"lantern {label}"] = verdict["agree"]
    outputs["lantern"] = lanterns

    proto5 = prototype([8], 1)
    surface5 = prototype_surface(proto5)
    d_cases = [
        ("g=3", surface3, ["b0", "a2", "a3", "a4"]),
        ("g=3", surface3, ["b0", "a2", "a3", "a4", "a5"]),
        ("g=3", d7, d_names(7)),
        ("g=5", surface5, ["b0", "a4", "a5", "a6", "a7"]),
        ("g=5", surface5, ["b0", "a4", "a5", "a6", "a7", "a8"]),
    ]
    memberships = []
    for label, surface, names in d_cases:
        n = len(names)
        report = verify_d_membership(n, d_config(surface, names), bound)
        memberships.append(report)
        checks[f"D{n} {label}"] = report["member"]
    outputs["d"] = memberships

    sliding = verify_sliding_word(proto5)
    outputs["sliding"] = sliding
    checks["sliding right-to-left"] = sliding["readings"]["right-to-left"]["verified"]

    modulus = 2 * proto5.g - 2
    gcd_failures = 0
    for _ in range(gcd_trials):
        k1, k2 = (int(k) for k in rng.integers(modulus, size=2))
        a1 = framed("a1", HomologyClass.x(proto5.g, 1), k1, modulus)
        a2 = framed("a2", HomologyClass.x(proto5.g, 2), k2, modulus)
        _, result = gcd_procedure(a1, a2)
        if result.w != gcd(k1, k2) % modulus:
            logger.warning("gcd procedure on (%d, %d) gave winding %d", k1, k2, result.w)
            gcd_failures += 1
    outputs["gcd"] = {"trials": gcd_trials, "failures": gcd_failures}
    checks["gcd procedure"] = gcd_failures == 0

    return SuiteResult(outputs=outputs, checks=checks)


def _divisors(m: int) -> List[int]:
    return [s for s in range(1, m + 1) if m % s == 0]


def johnson_suite(g: Optional[int] = None, s: Optional[int] = None) -> SuiteResult:
    outputs: Dict[str, Any] = {}
    checks: Dict[str, bool] = {}
    genera: Sequence[int] = JOHNSON_GENERA if g is None else (g,)
    for genus_ in genera:
        moduli = _divisors(genus_ - 1) if s is None else [s]
        for s_ in moduli:
            label = f"g={genus_} s={s_}"
            embedded = all(
                contract(wedge_embed(HomologyClass.basis(genus_, i)), s_).is_zero
                for i in range(2 * genus_)
            )
            report = kernel_span_report(genus_, s_)
            outputs[label] = report
            checks[f"{label} contraction kills H"] = embedded
            checks[f"{label} span equals kernel"] = bool(report["equal"])
    return SuiteResult(outputs=outputs, checks=checks)


def _twist_linearity(protos: Sequence[Prototype], rng: np.random.Generator, trials: int) -> int:
    failures = 0
    for _ in range(trials):
        proto = protos[int(rng.integers(len(protos)))]
        o = proto.origami
        cyls = list(proto.realization.cylinders.values())
        cyl = cyls[int(rng.integers(len(cyls)))]
        e = int(rng.integers(-3, 4))
        c = random_curve(o, rng)
        try:
            image = transport_curve(o, cyl, e, c)
            sheared = cylinder_shear(o, cyl, e)
            # Cores are admissible, so twisting about one keeps every winding.
            ok = (turning_number(sheared, image) - turning_number(o, c)) % proto.r == 0
            ok = ok and full_twist_shifts_class(o, cyl, int(rng.integers(-2, 3)), c)
        except (CurveError, TurningConsistencyError) as err:
            logger.warning("Transport on %r failed: %s", o, err)
            ok = False
        failures += 0 if ok else 1
    return failures


def full_twist_shifts_class(o: Origami, cyl: Cylinder, k: int, c: CombCurve) -> bool:
    """
    Check [T^k(c)] = [c] + k<c, core>[core] for the k-th power of the twist
    about a cylinder core. Shearing by k full circumferences gives back o,
    so both classes are read in the same basis.
    """
    image = transport_curve(o, cyl, k * len(cyl.squares), c)
    core = homology_class(o, cyl.core)
    before = homology_class(o, c)
    expected = before + (k * intersection_pairing(before, core)) * core
    return homology_class(o, image) == expected


def _coherence(protos: Sequence[Prototype], rng: np.random.Generator, per_proto: int) -> int:
    failures = 0
    for proto in protos:
        graph = intersection_graph(proto.system)
        nodes = sorted(graph.nodes)
        surface = prototype_surface(proto)
        for _ in range(per_proto):
            chosen = [nodes[int(rng.integers(len(nodes)))]]
            size = int(rng.integers(1, len(nodes) + 1))
            while len(chosen) < size:
                frontier = sorted(
                    {m for c in chosen for m in graph.neighbors(c)} - set(chosen)
                )
                if not frontier:
                    break
                chosen.append(frontier[int(rng.integers(len(frontier)))])
            try:
                boundary_curves(surface, chosen)
            except ConfigurationError as e:
                logger.warning("%s", e)
                failures += 1
    return failures


def _random_origamis(rng: np.random.Generator, trials: int) -> Dict[str, int]:
    turning_failures = 0
    stratum_failures = 0
    for _ in range(trials):
        o = Origami.random(int(rng.integers(1, 9)), rng)
        if sum(stratum(o)) != 2 * genus(o) - 2:
            stratum_failures += 1
        try:
            turning_number(o, random_curve(o, rng))
        except TurningConsistencyError:
            turning_failures += 1
    return {"turning": turning_failures, "stratum": stratum_failures}


def _moved_basis(g: int, rng: np.random.Generator) -> List[HomologyClass]:
    m = SymplecticMap.identity(g)
    for _ in range(8):
        coefs = rng.integers(-1, 2, size=2 * g)
        m = m @ transvection(HomologyClass(coefs), int(rng.choice([-1, 1])))
    return m.columns()


def _arf_basis_invariance(protos: Sequence[Prototype], rng: np.random.Generator, trials: int) -> int:
    """The product formula on a moved symplectic basis matches arf(q)."""
    failures = 0
    for proto in protos:
        if proto.r % 2 != 0:
            continue
        q = proto.spin.quad_form()
        g = proto.g
        for _ in range(trials):
            moved = _moved_basis(g, rng)
            total = sum(
                quad_value(q, moved[2 * i]) * quad_value(q, moved[2 * i + 1]) for i in range(g)
            )
            if total % 2 != arf(q):
                failures += 1
    return failures


def arf_adds_over_split(q: QuadForm2, basis: Sequence[HomologyClass], pairs: int) -> bool:
    """
    Split a symplectic basis after its first `pairs` pairs into two
    orthogonal blocks, as for a surface cut along a separating curve, and
    check that the Arf invariants of the blocks add up to arf(q).
    """
    head, tail = basis[: 2 * pairs], basis[2 * pairs :]
    return (arf_by_majority(q, head) + arf_by_majority(q, tail)) % 2 == arf(q)


def _arf_additivity(protos: Sequence[Prototype], rng: np.random.Generator, trials: int) -> int:
    failures = 0
    for proto in protos:
        if proto.r % 2 != 0:
            continue
        q = proto.spin.quad_form()
        g = proto.g
        for _ in range(trials):
            moved = _moved_basis(g, rng)
            if not arf_adds_over_split(q, moved, int(rng.integers(1, g))):
                failures += 1
    return failures


def oracle_suite(seed: int = 0, trials: int = 500) -> SuiteResult:
    rng = np.random.default_rng(seed)
    protos = [prototype(list(kappa), g=3) for kappa in ORACLE_KAPPAS]
    linearity = _twist_linearity(protos, rng, trials)
    coherence = _coherence(protos, rng, 10)
    origamis = _random_origamis(rng, max(1, trials // 5))
    invariance = _arf_basis_invariance(protos, rng, 20)
    additivity = _arf_additivity(protos, rng, 20)
    outputs: Dict[str, Any] = {
        "trials": trials,
        "twist linearity failures": linearity,
        "coherence failures": coherence,
        "turning total failures": origamis["turning"],
        "stratum sum failures": origamis["stratum"],
        "arf basis invariance failures": invariance,
        "arf additivity failures": additivity,
        "moduli": [spin_modulus(p.origami) for p in protos],
    }
    checks = {
        "twist linearity": linearity == 0,
        "homological coherence": coherence == 0,
        "turning totals": origamis["turning"] == 0,
        "zero orders sum to 2g-2": origamis["stratum"] == 0,
        "arf basis invariance": invariance == 0,
        "arf additivity": additivity == 0,
    }
    return SuiteResult(outputs=outputs, checks=checks)
