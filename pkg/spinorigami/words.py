import itertools
import logging
from collections import deque
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Iterable,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
    TypedDict,
)

import numpy as np
from sympy.core.intfunc import igcdex

from .johnson import partner
from .neighborhood import euler_characteristic, neighborhood_boundary
from .origami import (
    CombCurve,
    Cylinder,
    Origami,
    homology_class,
    spin_modulus,
    transport_curve,
    turning_number,
)
from .spin import FramedCurve, SpinStructure, framed, is_primitive
from .symplectic import (
    HomologyClass,
    SymplecticMap,
    intersection_pairing,
    quad_value,
    standard_form,
    transvection,
)
from .thurstonveech import Prototype, Realization


logger = logging.getLogger(__name__)


# Largest group image the D-relation search will enumerate.
DEFAULT_D_BOUND: int = 2_000_000
DEFAULT_PROBE_COUNT: int = 20

QUOTIENT_NOTE = (
    "checked in the homology and winding quotient: disagreement refutes the "
    "relation, agreement is a necessary condition only"
)


class ConfigurationError(Exception):
    pass


class BoundExceededError(Exception):
    pass


Letter = Tuple[FramedCurve, int]


class TwistWord:
    """
    A formal product of Dehn twists. Letters are (curve, exponent) pairs
    written left to right, and the leftmost letter acts last.
    """

    def __init__(self, letters: Iterable[Letter] = ()) -> None:
        self.letters: Tuple[Letter, ...] = tuple((c, int(e)) for c, e in letters)

    @staticmethod
    def twist(c: FramedCurve, e: int = 1) -> "TwistWord":
        return TwistWord([(c, e)])

    @staticmethod
    def product(curves: Sequence[FramedCurve]) -> "TwistWord":
        return TwistWord((c, 1) for c in curves)

    def __mul__(self, other: "TwistWord") -> "TwistWord":
        return TwistWord(self.letters + other.letters)

    def inverse(self) -> "TwistWord":
        return TwistWord((c, -e) for c, e in reversed(self.letters))

    def power(self, k: int) -> "TwistWord":
        if k < 0:
            return self.inverse().power(-k)
        return TwistWord(self.letters * k)

    def normalized(self) -> "TwistWord":
        out: List[Letter] = []
        for c, e in self.letters:
            if out and out[-1][0] == c:
                merged = out.pop()[1] + e
                if merged != 0:
                    out.append((c, merged))
            elif e != 0:
                out.append((c, e))
        return TwistWord(out)

    def symplectic_map(self, g: int) -> SymplecticMap:
        out = SymplecticMap.identity(g)
        for c, e in self.letters:
            out = out @ transvection(c.h, e)
        return out

    def to_json(self) -> List[Dict[str, object]]:
        return [
            {
                "curve": c.name,
                "class": [int(x) for x in c.h.coords],
                "winding": c.w,
                "modulus": c.r,
                "exponent": e,
            }
            for c, e in self.letters
        ]

    def __len__(self) -> int:
        return len(self.letters)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TwistWord):
            return NotImplemented
        return self.letters == other.letters

    def __hash__(self) -> int:
        return hash(self.letters)

    def __repr__(self) -> str:
        return "TwistWord({})".format(
            " ".join(f"T({c.name})^{e}" for c, e in self.letters) or "1"
        )


def pushforward(w: TwistWord, d: FramedCurve) -> FramedCurve:
    """
    Image of d under the word. Each letter (c, e) adds e<h, c> copies of c
    to the class and e<h, c>w(c) to the winding, pairing taken before the
    update.
    """
    h, winding = d.h, d.w
    for c, e in reversed(w.letters):
        if c.r != d.r:
            raise ConfigurationError(f"{c} and {d} carry windings mod different moduli")
        p = intersection_pairing(h, c.h)
        h = h + c.h * (e * p)
        winding += e * p * c.w
    return FramedCurve(name=d.name, h=h, w=winding, r=d.r)


class Comparison(NamedTuple):
    agree: bool
    detail: str


def _genus_of(words: Sequence[TwistWord], probes: Sequence[FramedCurve]) -> Optional[int]:
    for w in words:
        if w.letters:
            return w.letters[0][0].h.g
    if probes:
        return probes[0].h.g
    return None


def compare_words(w1: TwistWord, w2: TwistWord, probes: Sequence[FramedCurve]) -> Comparison:
    g = _genus_of([w1, w2], probes)
    if g is None:
        return Comparison(True, "both words are empty")
    m1, m2 = w1.symplectic_map(g), w2.symplectic_map(g)
    if m1 != m2:
        i, j = (int(x) for x in np.argwhere(m1.matrix != m2.matrix)[0])
        return Comparison(
            False,
            f"symplectic maps differ at entry ({i}, {j}): {m1.matrix[i, j]} != {m2.matrix[i, j]}",
        )
    for d in probes:
        p1, p2 = pushforward(w1, d), pushforward(w2, d)
        if p1 != p2:
            return Comparison(
                False,
                "probe {} goes to {} with winding {} and to {} with winding {}".format(
                    d.name, list(p1.h.coords), p1.w, list(p2.h.coords), p2.w
                ),
            )
    return Comparison(True, f"symplectic maps and {len(probes)} probes agree")


def words_agree(w1: TwistWord, w2: TwistWord, probes: Sequence[FramedCurve]) -> bool:
    return compare_words(w1, w2, probes).agree


class Verdict(TypedDict):
    relation: str
    agree: bool
    detail: str
    note: str


def _verdict(
    relation: str, lhs: TwistWord, rhs: TwistWord, probes: Sequence[FramedCurve]
) -> Verdict:
    result = compare_words(lhs, rhs, probes)
    logger.debug("%s: %s", relation, result.detail)
    return Verdict(relation=relation, agree=result.agree, detail=result.detail, note=QUOTIENT_NOTE)


class FramedConfig:
    """
    Named framed curves together with whatever geometric intersection
    numbers are known between them. Pairs left out of the table are
    unconstrained.
    """

    def __init__(
        self,
        *,
        curves: Sequence[FramedCurve],
        intersections: Optional[Mapping[Tuple[str, str], int]] = None,
        spin: Optional[SpinStructure] = None,
    ) -> None:
        if len(curves) == 0:
            raise ConfigurationError("A configuration needs at least one curve")
        names = [c.name for c in curves]
        if len(set(names)) != len(names):
            raise ConfigurationError(f"Curve names {names} are not unique")
        self.names: List[str] = names
        self.curves: Dict[str, FramedCurve] = {c.name: c for c in curves}
        self.spin = spin

        self.__table: Dict[FrozenSet[str], int] = {}
        for (a, b), count in (intersections or {}).items():
            for name in (a, b):
                if name not in self.curves:
                    raise ConfigurationError(f"Intersection table names unknown curve {name}")
            if a == b:
                raise ConfigurationError(f"Intersection table pairs {a} with itself")
            if count not in (0, 1):
                raise ConfigurationError(
                    f"Curves {a} and {b} are declared to meet {count} times, expected 0 or 1"
                )
            self.__table[frozenset((a, b))] = count
        self.__validate()

    def __validate(self) -> None:
        first = self.curves[self.names[0]]
        for c in self.curves.values():
            if c.r != first.r or c.h.g != first.h.g:
                raise ConfigurationError(f"{c} does not live on the same surface as {first}")
        for pair, count in self.__table.items():
            a, b = sorted(pair)
            p = intersection_pairing(self.curves[a].h, self.curves[b].h)
            if abs(p) > count:
                raise ConfigurationError(
                    f"Curves {a} and {b} pair to {p} but are declared to meet {count} times"
                )
        if self.spin is None:
            return
        if (self.spin.g, self.spin.r) != (self.g, self.r):
            raise ConfigurationError(f"{self.spin} does not match curves of genus {self.g} mod {self.r}")
        if self.r % 2 == 0:
            q = self.spin.quad_form()
            for c in self.curves.values():
                if (c.w + 1 - quad_value(q, c.h)) % 2 != 0:
                    raise ConfigurationError(f"Winding of {c} has the wrong parity for its class")

    @property
    def g(self) -> int:
        return self.curves[self.names[0]].h.g

    @property
    def r(self) -> int:
        return self.curves[self.names[0]].r

    def __getitem__(self, name: str) -> FramedCurve:
        if name not in self.curves:
            raise ConfigurationError(f"Configuration has no curve named {name}")
        return self.curves[name]

    def meets(self, a: str, b: str) -> Optional[int]:
        return self.__table.get(frozenset((a, b)))

    def reference_basis(self) -> List[FramedCurve]:
        """The reference basis as framed curves, windings 0 when no structure is known."""
        values = self.spin.values if self.spin is not None else (0,) * (2 * self.g)
        return [
            framed(f"e{i + 1}", HomologyClass.basis(self.g, i), values[i], self.r)
            for i in range(2 * self.g)
        ]

    def __repr__(self) -> str:
        return "FramedConfig({})".format(self.names)


def default_probes(
    config: FramedConfig,
    rng: np.random.Generator,
    count: int = DEFAULT_PROBE_COUNT,
    extra: Sequence[FramedCurve] = (),
) -> List[FramedCurve]:
    """
    The configuration's curves, the reference basis and random small
    combinations of it. A word shifts windings by a linear function of the
    class, so random probes carry the matching linear combination of basis
    windings.
    """
    basis = config.reference_basis()
    windings = np.array([b.w for b in basis], dtype=np.int64)
    probes = list(config.curves.values()) + list(extra) + basis
    for i in range(count):
        coefs = rng.integers(-2, 3, size=2 * config.g)
        probes.append(
            framed(f"p{i + 1}", HomologyClass(coefs), int(coefs @ windings), config.r)
        )
    return probes


def _probes_for(
    config: FramedConfig,
    probes: Optional[Sequence[FramedCurve]],
    extra: Sequence[FramedCurve] = (),
) -> Sequence[FramedCurve]:
    if probes is not None:
        return probes
    return default_probes(config, np.random.default_rng(0), extra=extra)


def verify_braid(
    a: FramedCurve, b: FramedCurve, probes: Optional[Sequence[FramedCurve]] = None
) -> Verdict:
    if abs(intersection_pairing(a.h, b.h)) != 1:
        raise ConfigurationError(f"{a} and {b} must pair to +-1 for the braid relation")
    config = FramedConfig(curves=[a, b], intersections={(a.name, b.name): 1})
    lhs = TwistWord.product([a, b, a])
    rhs = TwistWord.product([b, a, b])
    return _verdict(f"braid {a.name} {b.name}", lhs, rhs, _probes_for(config, probes))


def _check_chain(chain: FramedConfig) -> None:
    names = chain.names
    for i, a in enumerate(names):
        for j in range(i + 1, len(names)):
            b = names[j]
            expected = 1 if j == i + 1 else 0
            if chain.meets(a, b) != expected:
                raise ConfigurationError(
                    f"Chain curves {a} and {b} must be declared to meet {expected} times"
                )
            if expected == 1 and abs(intersection_pairing(chain[a].h, chain[b].h)) != 1:
                raise ConfigurationError(f"Chain curves {a} and {b} do not pair to +-1")


def verify_chain_relation(
    chain: FramedConfig,
    boundary: Sequence[FramedCurve],
    probes: Optional[Sequence[FramedCurve]] = None,
) -> Verdict:
    """
    (T_a1 ... T_ak)^(2k+2) = T_d for an even chain, and
    (T_a1 ... T_ak)^(k+1) = T_d1 T_d2 for an odd one.
    """
    k = len(chain.names)
    if k < 2:
        raise ConfigurationError(f"A chain needs at least 2 curves, got {k}")
    _check_chain(chain)
    expected = 1 if k % 2 == 0 else 2
    if len(boundary) != expected:
        raise ConfigurationError(
            f"A chain of {k} curves has {expected} boundary curves, got {len(boundary)}"
        )
    total = HomologyClass.zero(chain.g)
    for d in boundary:
        total = total + d.h
        for name in chain.names:
            if intersection_pairing(d.h, chain[name].h) != 0:
                raise ConfigurationError(f"Boundary {d.name} pairs with chain curve {name}")
    if not total.is_zero:
        raise ConfigurationError("Boundary classes of a chain neighborhood must add up to zero")

    power = 2 * k + 2 if k % 2 == 0 else k + 1
    lhs = TwistWord.product([chain[name] for name in chain.names]).power(power)
    rhs = TwistWord.product(boundary)
    return _verdict(f"chain k={k}", lhs, rhs, _probes_for(chain, probes, boundary))


LANTERN_BOUNDARY = ("d1", "d2", "d3", "d4")
LANTERN_INTERIOR = ("x", "y", "z")


def verify_lantern(
    config: FramedConfig, probes: Optional[Sequence[FramedCurve]] = None
) -> Verdict:
    """T_d1 T_d2 T_d3 T_d4 = T_x T_y T_z on a sphere with four holes."""
    boundary = [config[name] for name in LANTERN_BOUNDARY]
    interior = [config[name] for name in LANTERN_INTERIOR]
    total = HomologyClass.zero(config.g)
    for i, d in enumerate(boundary):
        total = total + d.h
        for other in boundary[i + 1:] + interior:
            if intersection_pairing(d.h, other.h) != 0:
                raise ConfigurationError(f"Lantern boundary {d.name} pairs with {other.name}")
    if not total.is_zero:
        raise ConfigurationError("Lantern boundary classes must add up to zero")
    lhs = TwistWord.product(boundary)
    rhs = TwistWord.product(interior)
    return _verdict("lantern", lhs, rhs, _probes_for(config, probes))


class AffineAction:
    """
    A mapping class seen through the reduced quotient: h -> M h mod m and
    w -> w + lambda . h mod s, with s dividing m.
    """

    def __init__(
        self, *, matrix: np.ndarray, shift: np.ndarray, modulus: int, shift_modulus: int
    ) -> None:
        if modulus < 1 or shift_modulus < 1 or modulus % shift_modulus != 0:
            raise ConfigurationError(
                f"Shift modulus {shift_modulus} must divide the matrix modulus {modulus}"
            )
        self.modulus = modulus
        self.shift_modulus = shift_modulus
        self.matrix: np.ndarray = np.asarray(matrix, dtype=np.int64) % modulus
        self.shift: np.ndarray = np.asarray(shift, dtype=np.int64) % shift_modulus

    @staticmethod
    def identity(g: int, modulus: int, shift_modulus: int) -> "AffineAction":
        return AffineAction(
            matrix=np.eye(2 * g, dtype=np.int64),
            shift=np.zeros(2 * g, dtype=np.int64),
            modulus=modulus,
            shift_modulus=shift_modulus,
        )

    @staticmethod
    def of_twist(c: FramedCurve, e: int, modulus: int, shift_modulus: int) -> "AffineAction":
        if c.r % shift_modulus != 0:
            raise ConfigurationError(f"Windings mod {c.r} cannot be read mod {shift_modulus}")
        vec = np.array(c.h.coords, dtype=np.int64)
        return AffineAction(
            matrix=transvection(c.h, e).matrix,
            shift=e * c.w * (standard_form(c.h.g) @ vec),
            modulus=modulus,
            shift_modulus=shift_modulus,
        )

    @staticmethod
    def of_word(w: TwistWord, g: int, modulus: int, shift_modulus: int) -> "AffineAction":
        out = AffineAction.identity(g, modulus, shift_modulus)
        for c, e in w.letters:
            out = out @ AffineAction.of_twist(c, e, modulus, shift_modulus)
        return out

    def __matmul__(self, other: "AffineAction") -> "AffineAction":
        # self after other
        return AffineAction(
            matrix=self.matrix @ other.matrix,
            shift=other.shift + other.matrix.T @ self.shift,
            modulus=self.modulus,
            shift_modulus=self.shift_modulus,
        )

    def __call__(self, d: FramedCurve) -> Tuple[Tuple[int, ...], int]:
        vec = np.array(d.h.coords, dtype=np.int64)
        image = (self.matrix @ vec) % self.modulus
        winding = (d.w + int(self.shift @ vec)) % self.shift_modulus
        return tuple(int(x) for x in image), winding

    @property
    def key(self) -> bytes:
        return self.matrix.tobytes() + self.shift.tobytes()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AffineAction):
            return NotImplemented
        return (self.modulus, self.shift_modulus, self.key) == (
            other.modulus,
            other.shift_modulus,
            other.key,
        )

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return "AffineAction(mod {}, shift mod {})".format(self.modulus, self.shift_modulus)


def d_names(n: int) -> List[str]:
    if n < 4:
        raise ConfigurationError(f"A D configuration needs at least 4 curves, got {n}")
    return ["a", "a'"] + [f"c{i}" for i in range(1, n - 1)]


def d_boundary_names(n: int) -> List[str]:
    return ["delta0", "delta2"] if n % 2 == 1 else ["delta0", "delta1", "delta1'"]


def d_target(n: int, config: FramedConfig) -> TwistWord:
    """
    T_delta0^(n-2) T_delta2 for odd n and T_delta0^((n-2)/2) T_delta1 T_delta1'
    for even n.
    """
    boundary = [config[name] for name in d_boundary_names(n)]
    if n % 2 == 1:
        return TwistWord([(boundary[0], n - 2), (boundary[1], 1)])
    return TwistWord([(boundary[0], (n - 2) // 2), (boundary[1], 1), (boundary[2], 1)])


def _check_d_pattern(n: int, config: FramedConfig) -> None:
    names = d_names(n)
    edges = {frozenset(("a", "c1")), frozenset(("a'", "c1"))}
    edges.update(frozenset((f"c{i}", f"c{i + 1}")) for i in range(1, n - 2))
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            expected = 1 if frozenset((a, b)) in edges else 0
            if config.meets(a, b) != expected:
                raise ConfigurationError(
                    f"D curves {a} and {b} must be declared to meet {expected} times"
                )
    for name in d_boundary_names(n):
        for other in names:
            if intersection_pairing(config[name].h, config[other].h) != 0:
                raise ConfigurationError(f"Boundary {name} pairs with {other}")


class MembershipReport(TypedDict):
    relation: str
    member: bool
    windings_kept: bool
    homology_trivial: bool
    states: int
    modulus: int
    shift_modulus: int
    note: str


def verify_d_membership(
    n: int,
    config: FramedConfig,
    bound: int = DEFAULT_D_BOUND,
    *,
    modulus: int = 2,
    target: Optional[TwistWord] = None,
) -> MembershipReport:
    """
    Test whether the target word lies in the group generated by the twists
    about a, a', c1, ..., c(n-2).

    The generators have winding 0 mod r, so every element of that group
    keeps all windings mod r. The target's winding shift is therefore
    computed exactly mod r and has to vanish. When it does, a breadth-first
    closure of the generators acting on H1 mod `modulus` looks for the
    target's homology action, stopping as soon as it shows up.

    For odd n the boundary curves delta0 and delta2 are homologous up to
    sign, and the target acts on H1 mod 2 as the identity. Wrong exponents
    are then caught by the winding condition alone.
    """
    _check_d_pattern(n, config)
    r = config.r
    names = d_names(n)
    for name in names:
        if config[name].w != 0:
            raise ConfigurationError(
                f"D generator {name} has winding {config[name].w} mod {r}, expected 0"
            )
    if target is None:
        target = d_target(n, config)
    windings_kept = not AffineAction.of_word(target, config.g, r, r).shift.any()

    generators = [AffineAction.of_twist(config[name], 1, modulus, 1) for name in names]
    goal = AffineAction.of_word(target, config.g, modulus, 1).key
    start = AffineAction.identity(config.g, modulus, 1)
    homology_trivial = start.key == goal
    if not windings_kept:
        logger.debug("D%d target moves windings mod %d", n, r)
        return MembershipReport(
            relation=f"D{n}",
            member=False,
            windings_kept=False,
            homology_trivial=homology_trivial,
            states=0,
            modulus=modulus,
            shift_modulus=r,
            note=QUOTIENT_NOTE,
        )

    seen = {start.key}
    queue = deque([start])
    found = homology_trivial
    while queue and not found:
        current = queue.popleft()
        for gen in generators:
            nxt = gen @ current
            key = nxt.key
            if key in seen:
                continue
            seen.add(key)
            if len(seen) > bound:
                logger.warning("D%d closure stopped after %d states", n, bound)
                raise BoundExceededError(f"Group image of D{n} has more than {bound} elements")
            if key == goal:
                found = True
                break
            queue.append(nxt)

    logger.debug("D%d: %d states visited, target found: %s", n, len(seen), found)
    return MembershipReport(
        relation=f"D{n}",
        member=found,
        windings_kept=True,
        homology_trivial=homology_trivial,
        states=len(seen),
        modulus=modulus,
        shift_modulus=r,
        note=QUOTIENT_NOTE,
    )


def slide_word(chain: FramedConfig, from_index: int, to_index: int) -> TwistWord:
    """
    T_b T_c ... built from adjacent moves T_a T_b, each of which carries a
    chain curve a to its neighbor b up to orientation.
    """
    names = chain.names
    for index in (from_index, to_index):
        if not 0 <= index < len(names):
            raise ConfigurationError(f"Index {index} is outside a chain of {len(names)} curves")
    step = 1 if to_index > from_index else -1
    word = TwistWord()
    for i in range(from_index, to_index, step):
        a, b = chain[names[i]], chain[names[i + step]]
        if abs(intersection_pairing(a.h, b.h)) != 1:
            raise ConfigurationError(f"{a.name} and {b.name} are not neighbors in the chain")
        word = TwistWord.product([a, b]) * word
    return word


SLIDING_WORD: Tuple[Tuple[str, ...], ...] = (
    ("a5", "a4", "a3", "a2"),
    ("a6", "a5", "a4", "a3"),
    ("a7", "a6", "a5", "a4"),
    ("a0", "a5", "a6", "a7"),
)
# The curve carried onto a0 meets a1 and a7 once and misses these.
SLIDING_MEETS = ("a1", "a7")
SLIDING_MISSES = ("a0", "a2", "a5", "a6")


class SlidingReading(TypedDict):
    homology: List[int]
    winding: int
    realized: bool
    verified: bool


class SlidingReport(TypedDict):
    relation: str
    verified: bool
    readings: Dict[str, SlidingReading]
    note: str


def twist_realized(
    o: Origami, cyls: Mapping[str, Cylinder], word: TwistWord, c: CombCurve
) -> CombCurve:
    """
    Apply word to the curve c on o itself. A letter (a, e) is the shear of
    the cylinder of a by e full turns, which maps o back onto o.
    """
    for a, e in reversed(word.letters):
        if a.name not in cyls:
            raise ConfigurationError(f"No cylinder carries the twist about {a.name}")
        cyl = cyls[a.name]
        c = transport_curve(o, cyl, e * len(cyl.squares), c)
    return c


def verify_sliding_word(proto: Prototype, a0: str = "b0") -> SlidingReport:
    """
    Pull a0 back through the explicit sliding word under both readings of
    the written product and check that the result sits in the seven-curve
    chain pattern. The pullback is also carried out on the core of a0 by
    cylinder shears, and the class and winding read off that curve must
    match the algebraic ones.
    """
    available = proto.curves
    curves: Dict[str, FramedCurve] = {}
    cyls: Dict[str, Cylinder] = {}
    for i in range(8):
        label = f"a{i}"
        name = a0 if i == 0 else label
        if name not in available:
            raise ConfigurationError(f"{proto} has no curve {name} for the sliding word")
        curves[label] = available[name].renamed(label)
        cyls[label] = proto.realization.cylinders[name]

    written = [(curves[label], 1) for block in SLIDING_WORD for label in block]
    readings = {
        "right-to-left": TwistWord(written),
        "left-to-right": TwistWord(reversed(written)),
    }
    out: Dict[str, SlidingReading] = {}
    for reading, word in readings.items():
        d = pushforward(word.inverse(), curves["a0"])
        seen = proto.framed(
            "d", twist_realized(proto.origami, cyls, word.inverse(), cyls["a0"].core)
        )
        realized = seen == d
        if not realized:
            logger.warning("Sliding word read %s: sheared curve is %s, expected %s", reading, seen, d)
        ok = (
            realized
            and is_primitive(d.h)
            and pushforward(word, d) == curves["a0"]
            and all(abs(intersection_pairing(d.h, curves[c].h)) == 1 for c in SLIDING_MEETS)
            and all(intersection_pairing(d.h, curves[c].h) == 0 for c in SLIDING_MISSES)
        )
        if not ok:
            logger.warning("Sliding word read %s does not carry a chain curve to a0", reading)
        out[reading] = SlidingReading(
            homology=[int(x) for x in d.h.coords], winding=d.w, realized=realized, verified=ok
        )
    return SlidingReport(
        relation="sliding",
        verified=any(r["verified"] for r in out.values()),
        readings=out,
        note=QUOTIENT_NOTE,
    )


def gcd_procedure(a1: FramedCurve, a2: FramedCurve) -> Tuple[TwistWord, FramedCurve]:
    """
    With x k1 + y k2 = gcd(k1, k2), twist a2 x times about a curve b1 of
    winding k1 meeting it once, then y - 1 times about a curve b2 of winding
    k2 meeting the result once.
    """
    if a1.r != a2.r:
        raise ConfigurationError(f"{a1} and {a2} carry windings mod different moduli")
    r = a1.r
    k1, k2 = a1.w, a2.w
    if k1 == 0:
        return TwistWord(), a2
    if k2 == 0:
        return TwistWord(), a1
    x, y, _ = (int(v) for v in igcdex(k1, k2))
    if y == 0:
        return TwistWord(), a1 if x == 1 else a1.reversed()
    if x == 0:
        return TwistWord(), a2 if y == 1 else a2.reversed()
    if not is_primitive(a2.h):
        raise ConfigurationError(f"{a2} is not a primitive class")

    b1 = framed("b1", partner(a2.h), k1, r)
    b2 = framed("b2", partner(a2.h + b1.h * x), k2, r)
    word = TwistWord([(b2, y - 1), (b1, x)]).normalized()
    result = pushforward(word, a2).renamed("gcd")
    logger.debug("gcd(%d, %d): %r gives winding %d", k1, k2, word, result.w)
    return word, result


# Configurations realized on origamis.


class RealizedSurface(NamedTuple):
    origami: Origami
    cylinders: Dict[str, Cylinder]
    frame: Callable[[str, CombCurve], FramedCurve]
    spin: Optional[SpinStructure]


def prototype_surface(proto: Prototype) -> RealizedSurface:
    return RealizedSurface(
        origami=proto.origami,
        cylinders=proto.realization.cylinders,
        frame=proto.framed,
        spin=proto.spin,
    )


def realization_surface(realization: Realization) -> RealizedSurface:
    """Framing in the origami's own symplectic basis, no spin structure attached."""
    o = realization.origami
    r = spin_modulus(o)
    if r < 1:
        raise ConfigurationError(f"{o} is a torus, windings are not taken mod anything")

    def frame(name: str, c: CombCurve) -> FramedCurve:
        return framed(name, homology_class(o, c), turning_number(o, c), r)

    return RealizedSurface(origami=o, cylinders=realization.cylinders, frame=frame, spin=None)


def _cylinders(surface: RealizedSurface, names: Sequence[str]) -> List[Cylinder]:
    for name in names:
        if name not in surface.cylinders:
            raise ConfigurationError(f"Surface has no cylinder named {name}")
    return [surface.cylinders[name] for name in names]


def _meetings(cyls: Sequence[Cylinder], labels: Sequence[str]) -> Dict[Tuple[str, str], int]:
    out = {}
    for i, a in enumerate(cyls):
        for j in range(i + 1, len(cyls)):
            b = cyls[j]
            count = 0 if a.direction == b.direction else len(set(a.squares) & set(b.squares))
            if count <= 1:
                out[(labels[i], labels[j])] = count
    return out


def core_config(
    surface: RealizedSurface, names: Sequence[str], labels: Optional[Sequence[str]] = None
) -> FramedConfig:
    labels = list(names) if labels is None else list(labels)
    cyls = _cylinders(surface, names)
    curves = [surface.frame(label, cyl.core) for label, cyl in zip(labels, cyls)]
    return FramedConfig(curves=curves, intersections=_meetings(cyls, labels), spin=surface.spin)


def boundary_curves(
    surface: RealizedSurface, names: Sequence[str], prefix: str = "d"
) -> List[FramedCurve]:
    """
    Boundary of a regular neighborhood of the named cores, neighborhood on
    the left. Their turning numbers must add up to its Euler characteristic.
    """
    cyls = _cylinders(surface, names)
    components = neighborhood_boundary(surface.origami, cyls)
    chi = euler_characteristic(surface.origami, cyls)
    total = sum(turning_number(surface.origami, c) for c in components)
    if total != chi:
        raise ConfigurationError(
            f"Boundary of {list(names)} turns {total} times, expected chi = {chi}"
        )
    return [surface.frame(f"{prefix}{i + 1}", c) for i, c in enumerate(components)]


def _with_boundary(
    config: FramedConfig, extra: Sequence[FramedCurve]
) -> FramedConfig:
    table: Dict[Tuple[str, str], int] = {}
    for i, a in enumerate(config.names):
        for b in config.names[i + 1:]:
            count = config.meets(a, b)
            if count is not None:
                table[(a, b)] = count
    for i, d in enumerate(extra):
        for name in config.names:
            table[(d.name, name)] = 0
        for other in extra[i + 1:]:
            table[(d.name, other.name)] = 0
    return FramedConfig(
        curves=[config[name] for name in config.names] + list(extra),
        intersections=table,
        spin=config.spin,
    )


def chain_config(
    surface: RealizedSurface, names: Sequence[str]
) -> Tuple[FramedConfig, List[FramedCurve]]:
    return core_config(surface, names), boundary_curves(surface, names)


def _pants_curve(name: str, p: FramedCurve, q: FramedCurve) -> FramedCurve:
    # Third boundary of the pair of pants bounded by p and q, pants on its left.
    return framed(name, -(p.h + q.h), -1 - p.w - q.w, p.r)


def lantern_config(surface: RealizedSurface, names: Sequence[str]) -> FramedConfig:
    """
    Cutting the neighborhood of a five-curve chain along its first, third
    and fifth curves leaves two spheres with four holes. The lantern is the
    one next to the first outer boundary component: d1, d2, d3 are the cut
    curves oriented with it on their left and d4 is that outer boundary.
    The interior curves are pants boundaries around pairs of holes, framed
    by coherence.
    """
    if len(names) != 5:
        raise ConfigurationError(f"A lantern comes from a chain of 5 curves, got {len(names)}")
    chain = core_config(surface, names)
    _check_chain(chain)
    outer = boundary_curves(surface, names)
    if len(outer) != 2:
        raise ConfigurationError(f"Chain {list(names)} bounds {len(outer)} curves, expected 2")
    d4 = outer[0].renamed("d4")
    holes = [chain[names[i]] for i in (0, 2, 4)]
    for signs in itertools.product((1, -1), repeat=3):
        oriented = [c if s == 1 else c.reversed() for c, s in zip(holes, signs)]
        total = d4.h
        for c in oriented:
            total = total + c.h
        if total.is_zero:
            break
    else:
        raise ConfigurationError(
            f"Boundary of {list(names)} is not homologous to its odd-numbered curves"
        )
    d1, d2, d3 = (c.renamed(f"d{i}") for i, c in enumerate(oriented, start=1))
    boundary = [d1, d2, d3, d4]
    if (sum(d.w for d in boundary) + 2) % d4.r != 0:
        raise ConfigurationError("Lantern boundary windings do not add up to chi = -2")
    interior = [
        _pants_curve("x", d1, d2),
        _pants_curve("y", d2, d3),
        _pants_curve("z", d1, d3),
    ]
    table = {(a.name, b.name): 0 for i, a in enumerate(boundary) for b in boundary[i + 1:] + interior}
    return FramedConfig(curves=boundary + interior, intersections=table, spin=surface.spin)


def d_config(surface: RealizedSurface, names: Sequence[str]) -> FramedConfig:
    """
    The curves a, a', c1, ..., c(n-2) from the named cores in that order,
    plus the boundary of their neighborhood. delta0 is the component in the
    class of a - a' once a and a' are oriented to pair alike with c1.
    """
    n = len(names)
    labels = d_names(n)
    cores = core_config(surface, names, labels)
    a, a_prime, c1 = cores["a"], cores["a'"], cores["c1"]
    if intersection_pairing(a.h, c1.h) != intersection_pairing(a_prime.h, c1.h):
        a_prime = a_prime.reversed()
    difference = a.h - a_prime.h

    boundary = boundary_curves(surface, names, prefix="delta")
    wanted = d_boundary_names(n)
    if len(boundary) != len(wanted):
        raise ConfigurationError(
            f"D{n} neighborhood has {len(boundary)} boundary curves, expected {len(wanted)}"
        )
    matches = [i for i, d in enumerate(boundary) if d.h in (difference, -difference)]
    if not matches or (n % 2 == 1 and len(matches) != len(boundary)):
        raise ConfigurationError(f"No boundary of D{n} lies in the class of a - a'")
    first = matches[0]
    ordered = [boundary[first]] + [d for i, d in enumerate(boundary) if i != first]
    renamed = [d.renamed(label) for d, label in zip(ordered, wanted)]
    return _with_boundary(cores, renamed)
