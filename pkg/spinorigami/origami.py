import logging
import re
from enum import Enum
from functools import reduce
from math import gcd
from typing import Dict, List, NamedTuple, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np
from sympy.combinatorics import Permutation

from .spin import SpinStructure
from .symplectic import HomologyClass, intersection_pairing, symplectic_reduction


logger = logging.getLogger(__name__)


class ConnectivityError(Exception):
    pass


class PermutationError(Exception):
    pass


class CurveError(Exception):
    pass


class TurningConsistencyError(Exception):
    pass


class FormatError(Exception):
    pass


class Side(Enum):
    # Counterclockwise from the bottom edge.
    BOTTOM = 0
    RIGHT = 1
    TOP = 2
    LEFT = 3

    @property
    def opposite(self) -> "Side":
        return Side((self.value + 2) % 4)

    @property
    def letter(self) -> str:
        return self.name[0]

    @staticmethod
    def from_letter(letter: str) -> "Side":
        for side in Side:
            if side.letter == letter.upper():
                return side
        raise FormatError(f"Unknown side '{letter}', expected one of L, R, B, T")


class Direction(Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"


class Step(NamedTuple):
    square: int
    entry: Side
    exit: Side


class CombCurve:
    """
    A closed curve drawn through square interiors, one step per visit to a
    square. Steps are cyclic: the last step's exit leads into the first.
    """

    def __init__(self, steps: Sequence[Step]) -> None:
        if len(steps) == 0:
            raise CurveError("A curve needs at least one step")
        self.steps: Tuple[Step, ...] = tuple(Step(int(s[0]), s[1], s[2]) for s in steps)

    def reversed(self) -> "CombCurve":
        return CombCurve([Step(s.square, s.exit, s.entry) for s in reversed(self.steps)])

    def __len__(self) -> int:
        return len(self.steps)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CombCurve):
            return NotImplemented
        return self.steps == other.steps

    def __hash__(self) -> int:
        return hash(self.steps)

    def __repr__(self) -> str:
        return "CombCurve({})".format(format_curve(self))


def reverse_curve(c: CombCurve) -> CombCurve:
    return c.reversed()


class Cylinder:
    def __init__(self, *, direction: Direction, squares: Sequence[int]) -> None:
        self.direction = direction
        self.squares: Tuple[int, ...] = tuple(squares)

    @property
    def core(self) -> CombCurve:
        if self.direction == Direction.HORIZONTAL:
            return CombCurve([Step(q, Side.LEFT, Side.RIGHT) for q in self.squares])
        return CombCurve([Step(q, Side.BOTTOM, Side.TOP) for q in self.squares])

    def __len__(self) -> int:
        return len(self.squares)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Cylinder):
            return NotImplemented
        return self.direction == other.direction and self.squares == other.squares

    def __hash__(self) -> int:
        return hash((self.direction, self.squares))

    def __repr__(self) -> str:
        return "Cylinder({}, {})".format(self.direction.value, [q + 1 for q in self.squares])


def core_curve(cylinder: Cylinder) -> CombCurve:
    return cylinder.core


def _cycles(perm: Sequence[int]) -> List[Tuple[int, ...]]:
    seen = set()
    out = []
    for start in range(len(perm)):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        nxt = perm[start]
        while nxt != start:
            cycle.append(nxt)
            seen.add(nxt)
            nxt = perm[nxt]
        out.append(tuple(cycle))
    return out


def _invert(perm: Sequence[int]) -> Tuple[int, ...]:
    out = [0] * len(perm)
    for i, p in enumerate(perm):
        out[p] = i
    return tuple(out)


class HomologyBasis:
    """
    Pushed-off cellular cycles realizing a symplectic basis of H1 of an
    origami. Edge vectors have length 2n: H(q) is the bottom edge of q at
    index q, V(q) the left edge of q at index n + q.
    """

    def __init__(self, *, n: int, xs: Sequence[np.ndarray], ys: Sequence[np.ndarray]) -> None:
        self.n = n
        self.xs = list(xs)
        self.ys = list(ys)

    @property
    def g(self) -> int:
        return len(self.xs)

    def pair(self, dual: np.ndarray, primal: np.ndarray) -> int:
        n = self.n
        return int(dual[n:] @ primal[n:] - dual[:n] @ primal[:n])

    def coordinates(self, dual: np.ndarray) -> HomologyClass:
        coords = []
        for x, y in zip(self.xs, self.ys):
            coords.append(self.pair(dual, y))
            coords.append(-self.pair(dual, x))
        return HomologyClass(coords)


class Origami:
    """
    A square-tiled surface: sigma_h sends a square to its right neighbor and
    sigma_v to its top neighbor. Squares are numbered from 0 internally and
    from 1 in the text format.
    """

    def __init__(self, *, sigma_h: Sequence[int], sigma_v: Sequence[int]) -> None:
        n = len(sigma_h)
        if n == 0 or len(sigma_v) != n:
            raise PermutationError("sigma_h and sigma_v must be nonempty and of equal size")
        for name, perm in (("sigma_h", sigma_h), ("sigma_v", sigma_v)):
            if sorted(perm) != list(range(n)):
                raise PermutationError(f"{name} is not a permutation of {n} squares: {list(perm)}")
        self.n = n
        self.sigma_h: Tuple[int, ...] = tuple(int(p) for p in sigma_h)
        self.sigma_v: Tuple[int, ...] = tuple(int(p) for p in sigma_v)
        self.sigma_h_inv = _invert(self.sigma_h)
        self.sigma_v_inv = _invert(self.sigma_v)
        self.__homology: Optional[HomologyBasis] = None

    @staticmethod
    def random(n: int, rng: np.random.Generator) -> "Origami":
        while True:
            candidate = Origami(
                sigma_h=[int(p) for p in rng.permutation(n)],
                sigma_v=[int(p) for p in rng.permutation(n)],
            )
            if candidate.is_connected:
                return candidate

    @property
    def is_connected(self) -> bool:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        for q in range(self.n):
            graph.add_edge(q, self.sigma_h[q])
            graph.add_edge(q, self.sigma_v[q])
        return nx.is_connected(graph)

    def check_connected(self) -> None:
        if not self.is_connected:
            raise ConnectivityError(f"Origami on {self.n} squares is not connected")

    def move(self, q: int, side: Side) -> int:
        """The square entered by leaving q through the given side."""
        if side == Side.RIGHT:
            return self.sigma_h[q]
        if side == Side.LEFT:
            return self.sigma_h_inv[q]
        if side == Side.TOP:
            return self.sigma_v[q]
        return self.sigma_v_inv[q]

    def commutator(self) -> Tuple[int, ...]:
        # sigma_h o sigma_v o sigma_h^-1 o sigma_v^-1, rightmost first. Its
        # cycles are the vertices, each listed by the squares whose bottom
        # left corner sits there.
        return tuple(
            self.sigma_h[self.sigma_v[self.sigma_h_inv[self.sigma_v_inv[q]]]]
            for q in range(self.n)
        )

    def vertex_classes(self) -> List[Tuple[int, ...]]:
        return _cycles(self.commutator())

    def vertex_of(self) -> Dict[int, int]:
        """Maps each square to the index of the vertex at its bottom left corner."""
        out = {}
        for index, cycle in enumerate(self.vertex_classes()):
            for q in cycle:
                out[q] = index
        return out

    def rotate(self) -> "Origami":
        # Quarter turn counterclockwise: the old right neighbor is the new top one.
        return Origami(sigma_h=self.sigma_v_inv, sigma_v=self.sigma_h)

    def unrotate(self) -> "Origami":
        return Origami(sigma_h=self.sigma_v, sigma_v=self.sigma_h_inv)

    @property
    def homology(self) -> HomologyBasis:
        if self.__homology is None:
            self.__homology = _compute_homology_basis(self)
        return self.__homology

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Origami):
            return NotImplemented
        return self.sigma_h == other.sigma_h and self.sigma_v == other.sigma_v

    def __hash__(self) -> int:
        return hash((self.sigma_h, self.sigma_v))

    def __repr__(self) -> str:
        return "Origami(n={}, sigma_h={}, sigma_v={})".format(
            self.n, _format_cycles(self.sigma_h), _format_cycles(self.sigma_v)
        )


def stratum(o: Origami) -> List[int]:
    o.check_connected()
    return sorted((len(c) - 1 for c in o.vertex_classes() if len(c) > 1), reverse=True)


def genus(o: Origami) -> int:
    o.check_connected()
    euler = len(o.vertex_classes()) - o.n
    return (2 - euler) // 2


def cylinders(o: Origami, direction: Direction) -> List[Cylinder]:
    perm = o.sigma_h if direction == Direction.HORIZONTAL else o.sigma_v
    return [Cylinder(direction=direction, squares=c) for c in _cycles(perm)]


def cylinder_of(o: Origami, direction: Direction, square: int) -> Cylinder:
    for cyl in cylinders(o, direction):
        if square in cyl.squares:
            return cyl
    raise CurveError(f"Square {square + 1} is not on the origami")


def validate_curve(o: Origami, c: CombCurve) -> None:
    steps = c.steps
    for index, step in enumerate(steps):
        if not 0 <= step.square < o.n:
            raise CurveError(f"Step {index} visits square {step.square + 1} of {o.n}")
        if step.entry == step.exit:
            raise CurveError(f"Step {index} enters and leaves square {step.square + 1} through the same side")
        nxt = steps[(index + 1) % len(steps)]
        if o.move(step.square, step.exit) != nxt.square or nxt.entry != step.exit.opposite:
            raise CurveError(
                f"Step {index} leaves square {step.square + 1} through {step.exit.letter} but the "
                f"next step is {nxt.square + 1}:{nxt.entry.letter}"
            )


def _heading_in(entry: Side) -> int:
    # Quarter turns counterclockwise from east.
    return (entry.value + 1) % 4


def _heading_out(exit_side: Side) -> int:
    return (exit_side.value - 1) % 4


def quarter_turns(step: Step) -> int:
    delta = (_heading_out(step.exit) - _heading_in(step.entry)) % 4
    if delta == 2:
        raise CurveError(f"U-turn in square {step.square + 1}")
    return {0: 0, 1: 1, 3: -1}[delta]


def turning_number(o: Origami, c: CombCurve) -> int:
    validate_curve(o, c)
    total = sum(quarter_turns(step) for step in c.steps)
    if total % 4 != 0:
        raise TurningConsistencyError(f"Quarter turns add up to {total} on a closed curve")
    return total // 4


class Winding(NamedTuple):
    value: int
    modulus: int


def spin_modulus(o: Origami) -> int:
    """gcd of the zero orders, 0 on a torus where windings are integers."""
    return reduce(gcd, stratum(o), 0)


def winding_number(o: Origami, c: CombCurve, modulus: Optional[int] = None) -> Winding:
    r = spin_modulus(o) if modulus is None else modulus
    if modulus is not None and spin_modulus(o) % modulus != 0:
        raise CurveError(f"Windings on this origami are defined mod {spin_modulus(o)}, not mod {modulus}")
    turns = turning_number(o, c)
    if r == 0:
        return Winding(turns, 0)
    return Winding(turns % r, r)


def dual_vector(o: Origami, c: CombCurve) -> np.ndarray:
    """Signed count of crossings of each edge, rightward and upward positive."""
    n = o.n
    out = np.zeros(2 * n, dtype=np.int64)
    for step in c.steps:
        q = step.square
        if step.exit == Side.RIGHT:
            out[n + o.sigma_h[q]] += 1
        elif step.exit == Side.LEFT:
            out[n + q] -= 1
        elif step.exit == Side.TOP:
            out[o.sigma_v[q]] += 1
        else:
            out[q] -= 1
    return out


def primal_vector(o: Origami, c: CombCurve) -> np.ndarray:
    """The curve pushed onto the square edges, walking each square's boundary counterclockwise."""
    n = o.n
    out = np.zeros(2 * n, dtype=np.int64)
    for step in c.steps:
        q = step.square
        edges = {
            0: (q, 1),
            1: (n + o.sigma_h[q], 1),
            2: (o.sigma_v[q], -1),
            3: (n + q, -1),
        }
        start = (step.entry.value + 1) % 4
        for k in range((step.exit.value - start) % 4):
            index, sign = edges[(start + k) % 4]
            out[index] += sign
    return out


def _curve_from_moves(o: Origami, start: int, moves: Sequence[Side]) -> CombCurve:
    steps = []
    square = start
    for k, side in enumerate(moves):
        steps.append(Step(square, moves[k - 1].opposite, side))
        square = o.move(square, side)
    if square != start:
        raise CurveError("Moves do not close up")
    return CombCurve(steps)


def fundamental_cycles(o: Origami) -> List[CombCurve]:
    """
    One closed curve per edge of the dual graph outside a breadth-first
    spanning tree, running through the tree from the lowest common ancestor.
    """
    o.check_connected()
    parent: Dict[int, Tuple[int, Side]] = {}
    tree = set()
    order = [0]
    seen = {0}
    for q in order:
        for side, edge in (
            (Side.RIGHT, ("h", q)),
            (Side.LEFT, ("h", o.sigma_h_inv[q])),
            (Side.TOP, ("v", q)),
            (Side.BOTTOM, ("v", o.sigma_v_inv[q])),
        ):
            nxt = o.move(q, side)
            if nxt not in seen:
                seen.add(nxt)
                parent[nxt] = (q, side)
                tree.add(edge)
                order.append(nxt)

    def ancestors(q: int) -> List[int]:
        out = [q]
        while out[-1] in parent:
            out.append(parent[out[-1]][0])
        return out

    out = []
    for kind, side in (("h", Side.RIGHT), ("v", Side.TOP)):
        for u in range(o.n):
            if (kind, u) in tree:
                continue
            v = o.move(u, side)
            up_u = set(ancestors(u))
            lca = next(a for a in ancestors(v) if a in up_u)

            down: List[Side] = []
            x = u
            while x != lca:
                x, s = parent[x][0], parent[x][1]
                down.append(s)
            down.reverse()

            up: List[Side] = []
            x = v
            while x != lca:
                x, s = parent[x][0], parent[x][1]
                up.append(s.opposite)

            out.append(_curve_from_moves(o, lca, down + [side] + up))
    return out


def _compute_homology_basis(o: Origami) -> HomologyBasis:
    cycles = fundamental_cycles(o)
    duals = [dual_vector(o, c) for c in cycles]
    primals = [primal_vector(o, c) for c in cycles]
    probe = HomologyBasis(n=o.n, xs=[], ys=[])
    gram = np.array([[probe.pair(d, p) for p in primals] for d in duals], dtype=np.int64)
    pairs, _ = symplectic_reduction(np.eye(len(cycles), dtype=np.int64), gram)

    g = genus(o)
    if len(pairs) != g:
        raise TurningConsistencyError(
            f"Found {len(pairs)} symplectic pairs on a genus {g} origami"
        )
    stacked = np.array(primals, dtype=np.int64)
    xs = [x @ stacked for x, _ in pairs]
    ys = [y @ stacked for _, y in pairs]
    logger.debug("Computed H1 basis of %r from %d fundamental cycles", o, len(cycles))
    return HomologyBasis(n=o.n, xs=xs, ys=ys)


def homology_class(o: Origami, c: CombCurve) -> HomologyClass:
    validate_curve(o, c)
    return o.homology.coordinates(dual_vector(o, c))


def square_loop(o: Origami, q: int) -> CombCurve:
    """Small counterclockwise loop around the bottom left corner of q."""
    moves = [Side.LEFT, Side.BOTTOM, Side.RIGHT, Side.TOP]
    try:
        return _curve_from_moves(o, q, moves)
    except CurveError:
        raise CurveError(f"Bottom left corner of square {q + 1} is a cone point") from None


def detour(o: Origami, c: CombCurve, index: int) -> CombCurve:
    """
    Push the straight rightward crossing out of step index below the
    bottom right corner of its square. The corner must be a regular point.
    """
    steps = list(c.steps)
    if len(steps) < 2:
        raise CurveError("A single step curve has no room for a detour")
    step = steps[index]
    following = steps[(index + 1) % len(steps)]
    if step.entry != Side.LEFT or step.exit != Side.RIGHT:
        raise CurveError(f"Step {index} is not a rightward crossing")
    if following.exit == Side.BOTTOM:
        raise CurveError(f"Step {index} is followed by a downward exit")
    below = o.sigma_v_inv[step.square]
    beside = o.sigma_h[below]
    if o.sigma_v[beside] != following.square:
        raise CurveError(f"Bottom right corner of square {step.square + 1} is a cone point")
    replacement = [
        Step(step.square, Side.LEFT, Side.BOTTOM),
        Step(below, Side.TOP, Side.RIGHT),
        Step(beside, Side.LEFT, Side.TOP),
        Step(following.square, Side.BOTTOM, following.exit),
    ]
    if index + 1 < len(steps):
        return CombCurve(steps[:index] + replacement + steps[index + 2 :])
    return CombCurve(replacement[1:3] + [replacement[3]] + steps[1:index] + [replacement[0]])


def cylinder_shear(o: Origami, cyl: Cylinder, e: int) -> Origami:
    """
    Re-glue the top edges of a horizontal cylinder shifted e squares along
    it. Vertical cylinders are sheared in the quarter-turned picture.
    """
    if cyl.direction == Direction.VERTICAL:
        rotated = o.rotate()
        return cylinder_shear(
            rotated, cylinder_of(rotated, Direction.HORIZONTAL, cyl.squares[0]), e
        ).unrotate()

    length = len(cyl.squares)
    sigma_v = list(o.sigma_v)
    for i, p in enumerate(cyl.squares):
        sigma_v[p] = o.sigma_v[cyl.squares[(i + e) % length]]
    return Origami(sigma_h=o.sigma_h, sigma_v=sigma_v)


_ROTATE = {Side.RIGHT: Side.TOP, Side.TOP: Side.LEFT, Side.LEFT: Side.BOTTOM, Side.BOTTOM: Side.RIGHT}
_UNROTATE = {new: old for old, new in _ROTATE.items()}


def _relabel_sides(c: CombCurve, table: Dict[Side, Side]) -> CombCurve:
    return CombCurve([Step(s.square, table[s.entry], table[s.exit]) for s in c.steps])


def _taut_run(squares: Sequence[int], start: int, entry: Side, exit_side: Side, shift: int) -> List[Step]:
    length = len(squares)
    if shift == 0:
        return [Step(squares[start], entry, exit_side)]
    forward = shift > 0
    out_side, in_side = (Side.RIGHT, Side.LEFT) if forward else (Side.LEFT, Side.RIGHT)
    sign = 1 if forward else -1
    steps = [Step(squares[start], entry, out_side)]
    for k in range(1, abs(shift)):
        steps.append(Step(squares[(start + sign * k) % length], in_side, out_side))
    steps.append(Step(squares[(start + shift) % length], in_side, exit_side))
    return steps


def transport_curve(o: Origami, cyl: Cylinder, e: int, c: CombCurve) -> CombCurve:
    """
    The image of c on cylinder_shear(o, cyl, e). Each passage of c through
    the cylinder is replaced by the taut staircase with the same endpoints
    on the cylinder boundary, so e=0 returns c itself.
    """
    validate_curve(o, c)
    if cyl.direction == Direction.VERTICAL:
        rotated = o.rotate()
        image = transport_curve(
            rotated,
            cylinder_of(rotated, Direction.HORIZONTAL, cyl.squares[0]),
            e,
            _relabel_sides(c, _ROTATE),
        )
        return _relabel_sides(image, _UNROTATE)

    position = {q: i for i, q in enumerate(cyl.squares)}
    length = len(cyl.squares)
    steps = c.steps
    crossings = (Side.BOTTOM, Side.TOP)
    starts = [
        k for k, s in enumerate(steps) if s.square in position and s.entry in crossings
    ]
    if not starts:
        return c

    def shift_of(side: Side) -> int:
        # Only the top boundary of the cylinder moves.
        return -e if side == Side.TOP else 0

    out: List[Step] = []
    total = len(steps)
    i = 0
    while i < total:
        step = steps[(starts[0] + i) % total]
        if step.square in position and step.entry in crossings:
            run = [step]
            while run[-1].exit not in crossings:
                run.append(steps[(starts[0] + i + len(run)) % total])
            displacement = sum(
                1 if s.exit == Side.RIGHT else -1 if s.exit == Side.LEFT else 0 for s in run
            )
            entry, exit_side = run[0].entry, run[-1].exit
            start = (position[step.square] + shift_of(entry)) % length
            out.extend(
                _taut_run(
                    cyl.squares,
                    start,
                    entry,
                    exit_side,
                    displacement + shift_of(exit_side) - shift_of(entry),
                )
            )
            i += len(run)
        else:
            out.append(step)
            i += 1
    return CombCurve(out)


def random_curve(
    o: Origami, rng: np.random.Generator, *, max_length: int = 40
) -> CombCurve:
    """A closed non-backtracking random walk returning to its first square."""
    sides = list(Side)
    while True:
        first = int(rng.integers(o.n))
        first_exit = sides[int(rng.integers(4))]
        steps = [Step(first, first_exit, first_exit)]
        square, entry = o.move(first, first_exit), first_exit.opposite
        while len(steps) < max_length:
            if square == first and entry != first_exit and rng.random() < 0.5:
                steps[0] = Step(first, entry, first_exit)
                return CombCurve(steps)
            choices = [s for s in sides if s != entry]
            exit_side = choices[int(rng.integers(3))]
            steps.append(Step(square, entry, exit_side))
            square, entry = o.move(square, exit_side), exit_side.opposite


def spin_structure(
    o: Origami, basis: Sequence[CombCurve], modulus: Optional[int] = None
) -> SpinStructure:
    """
    Read the winding structure of o off a geometric symplectic basis given
    as curves x1, y1, ..., xg, yg.
    """
    r = spin_modulus(o) if modulus is None else modulus
    classes = [homology_class(o, c) for c in basis]
    g = genus(o)
    if len(classes) != 2 * g:
        raise CurveError(f"Need {2 * g} basis curves, got {len(classes)}")
    for i, u in enumerate(classes):
        for j, v in enumerate(classes):
            expected = 0
            if i % 2 == 0 and j == i + 1:
                expected = 1
            elif j % 2 == 0 and i == j + 1:
                expected = -1
            if intersection_pairing(u, v) != expected:
                raise CurveError(f"Basis curves {i} and {j} pair to {intersection_pairing(u, v)}")
    return SpinStructure(r=r, g=g, values=[turning_number(o, c) for c in basis])


# Text format.


def _format_cycles(perm: Sequence[int]) -> str:
    cycles = [c for c in _cycles(perm) if len(c) > 1]
    if not cycles:
        return "()"
    return "".join("({})".format(" ".join(str(q + 1) for q in c)) for c in cycles)


def _parse_cycles(text: str, n: int) -> Tuple[int, ...]:
    body = text.strip()
    if not re.fullmatch(r"(\(\s*[\d\s]*\))+", body):
        raise FormatError(f"Expected cycle notation like (1 2)(3), got '{text.strip()}'")
    cycles = []
    seen: Set[int] = set()
    for group in re.findall(r"\(([^)]*)\)", body):
        cycle = [int(tok) - 1 for tok in group.split()]
        for q in cycle:
            if not 0 <= q < n:
                raise PermutationError(f"Square {q + 1} out of range 1..{n}")
            if q in seen:
                raise FormatError(f"Square {q + 1} appears twice in '{body}'")
            seen.add(q)
        if cycle:
            cycles.append(cycle)
    try:
        perm = Permutation(cycles, size=n)
    except ValueError as e:
        raise PermutationError(f"'{body}' is not a permutation: {e}") from None
    return tuple(int(p) for p in perm.array_form)


def parse_origami(text: str) -> Origami:
    lines = [
        line.split("#", 1)[0].strip()
        for line in text.splitlines()
    ]
    lines = [line for line in lines if line]
    if len(lines) != 3:
        raise FormatError(f"Expected 3 lines (n, sigma_h, sigma_v), got {len(lines)}")
    try:
        n = int(lines[0])
    except ValueError:
        raise FormatError(f"First line must be the number of squares, got '{lines[0]}'") from None
    if n < 1:
        raise FormatError("An origami needs at least one square")
    return Origami(sigma_h=_parse_cycles(lines[1], n), sigma_v=_parse_cycles(lines[2], n))


def format_origami(o: Origami) -> str:
    return "{}\n{}\n{}\n".format(o.n, _format_cycles(o.sigma_h), _format_cycles(o.sigma_v))


def parse_curve(text: str) -> CombCurve:
    steps = []
    tokens = [tok for line in text.splitlines() for tok in line.split("#", 1)[0].split()]
    for token in tokens:
        match = re.fullmatch(r"\((\d+):([LRBTlrbt]):([LRBTlrbt])\)", token)
        if match is None:
            raise FormatError(f"Expected a step like (3:L:R), got '{token}'")
        steps.append(
            Step(int(match.group(1)) - 1, Side.from_letter(match.group(2)), Side.from_letter(match.group(3)))
        )
    if not steps:
        raise FormatError("Curve has no steps")
    return CombCurve(steps)


def format_curve(c: CombCurve) -> str:
    return " ".join(
        "({}:{}:{})".format(s.square + 1, s.entry.letter, s.exit.letter) for s in c.steps
    )
