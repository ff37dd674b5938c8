import itertools
import logging
from collections import deque
from functools import reduce
from math import gcd
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .symplectic import (
    DimensionError,
    HomologyClass,
    QuadForm2,
    arf,
    intersection_pairing,
    quad_form_from_values,
)


logger = logging.getLogger(__name__)


# Largest state space that orbit and count enumeration will walk.
MAX_STATES: int = 10**7


class ModulusError(Exception):
    pass


class ParityError(Exception):
    pass


class StateSpaceError(Exception):
    pass


class ChainIndexError(Exception):
    pass


def _check_modulus(g: int, r: int) -> None:
    if g < 2:
        raise DimensionError(f"Spin structures are only handled for genus >= 2, got {g}")
    if r < 1:
        raise ModulusError(f"Modulus must be a positive integer, got {r}")
    if (2 * g - 2) % r != 0:
        raise ModulusError(f"r={r} does not divide 2g-2={2 * g - 2}")


class SpinStructure:
    """
    An r-spin structure on a closed genus g surface, recorded by its values
    on the reference geometric symplectic basis x1, y1, ..., xg, yg.
    """

    def __init__(self, *, r: int, g: int, values: Sequence[int]) -> None:
        _check_modulus(g, r)
        if len(values) != 2 * g:
            raise DimensionError(f"Expected {2 * g} values for genus {g}, got {len(values)}")
        self.r = r
        self.g = g
        self.values: Tuple[int, ...] = tuple(int(v) % r for v in values)

    def quad_form(self) -> QuadForm2:
        # q = phi + 1 mod 2, only meaningful for even r.
        if self.r % 2 != 0:
            raise ParityError(f"No quadratic form for odd r={self.r}")
        return QuadForm2((v + 1) % 2 for v in self.values)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SpinStructure):
            return NotImplemented
        return (self.r, self.g, self.values) == (other.r, other.g, other.values)

    def __hash__(self) -> int:
        return hash((self.r, self.g, self.values))

    def __repr__(self) -> str:
        return "SpinStructure(r={}, g={}, values={})".format(self.r, self.g, list(self.values))


def make_spin(r: int, g: int, values: Sequence[int]) -> SpinStructure:
    return SpinStructure(r=r, g=g, values=values)


def arf_spin(phi: SpinStructure) -> int:
    if phi.r % 2 != 0:
        raise ParityError(f"Arf invariant is undefined for odd r={phi.r}")
    v = phi.values
    return sum((v[2 * i] + 1) * (v[2 * i + 1] + 1) for i in range(phi.g)) % 2


def enumerate_structures(g: int, r: int) -> Iterator[SpinStructure]:
    _check_modulus(g, r)
    for values in itertools.product(range(r), repeat=2 * g):
        yield SpinStructure(r=r, g=g, values=values)


def _closed_form_counts(g: int, r: int) -> Tuple[int, Optional[int], Optional[int]]:
    total = r ** (2 * g)
    if r % 2 != 0:
        return total, None, None
    scale = (r // 2) ** (2 * g)
    return (
        total,
        scale * 2 ** (g - 1) * (2**g + 1),
        scale * 2 ** (g - 1) * (2**g - 1),
    )


def _enumerated_odd_count(g: int, r: int) -> int:
    # Every value vector at once: digit i of the index is phi on basis vector i.
    index = np.arange(r ** (2 * g), dtype=np.int64)
    total = np.zeros_like(index)
    for i in range(g):
        vx = (index // r ** (2 * i)) % r
        vy = (index // r ** (2 * i + 1)) % r
        total += ((vx + 1) % 2) * ((vy + 1) % 2)
    return int(np.count_nonzero(total % 2))


def count_by_arf(
    g: int, r: int, *, max_states: int = MAX_STATES
) -> Tuple[int, Optional[int], Optional[int]]:
    """
    Number of r-spin structures in genus g, split by Arf invariant when r is
    even. Small cases are cross-checked against an exhaustive enumeration.
    """
    _check_modulus(g, r)
    total, even, odd = _closed_form_counts(g, r)
    if even is not None and total <= max_states:
        enumerated_odd = _enumerated_odd_count(g, r)
        if enumerated_odd != odd:
            raise StateSpaceError(
                f"Enumeration found {enumerated_odd} odd structures for g={g}, r={r}, formula says {odd}"
            )
        logger.debug("Verified g=%d r=%d counts by enumerating %d structures", g, r, total)
    return total, even, odd


class FramedCurve:
    """
    A curve seen through the quotient: its homology class and its winding
    residue mod r.
    """

    def __init__(self, *, name: str, h: HomologyClass, w: int, r: int) -> None:
        if r < 1:
            raise ModulusError(f"Modulus must be a positive integer, got {r}")
        self.name = name
        self.h = h
        self.r = r
        self.w = w % r

    def reversed(self) -> "FramedCurve":
        return FramedCurve(name=self.name, h=-self.h, w=-self.w, r=self.r)

    def renamed(self, name: str) -> "FramedCurve":
        return FramedCurve(name=name, h=self.h, w=self.w, r=self.r)

    def __eq__(self, other: object) -> bool:
        # Names are labels only.
        if not isinstance(other, FramedCurve):
            return NotImplemented
        return (self.h, self.w, self.r) == (other.h, other.w, other.r)

    def __hash__(self) -> int:
        return hash((self.h, self.w, self.r))

    def __repr__(self) -> str:
        return "FramedCurve({}, h={}, w={} mod {})".format(
            self.name, list(self.h.coords), self.w, self.r
        )


def framed(name: str, h: HomologyClass, w: int, r: int) -> FramedCurve:
    return FramedCurve(name=name, h=h, w=w, r=r)


def is_primitive(h: HomologyClass) -> bool:
    return reduce(gcd, (abs(c) for c in h.coords), 0) == 1


def is_admissible(c: FramedCurve) -> bool:
    return c.w % c.r == 0 and is_primitive(c.h)


class ChainRelation:
    """
    Homological data of the Humphries curves c0, ..., c2g as realized on a
    reference surface: their pairings, their classes, and the winding
    values of the reference structure. Because two spin structures differ
    by a homomorphism H1 -> Z/r, c0 is pinned by

        phi(c0) = K + sum(t_i * phi(c_i)),  K = ref(c0) - sum(t_i * ref(c_i))

    where [c0] = sum(t_i [c_i]) over the chain c1, ..., c2g.
    """

    def __init__(
        self,
        *,
        g: int,
        classes: Sequence[HomologyClass],
        coefficients: Sequence[int],
        reference_windings: Sequence[int],
    ) -> None:
        if len(classes) != 2 * g + 1 or len(reference_windings) != 2 * g + 1:
            raise DimensionError(f"Expected {2 * g + 1} Humphries curves for genus {g}")
        if len(coefficients) != 2 * g:
            raise DimensionError(f"Expected {2 * g} chain coefficients for c0")
        self.g = g
        self.classes: Tuple[HomologyClass, ...] = tuple(classes)
        self.coefficients: Tuple[int, ...] = tuple(coefficients)
        self.reference_windings: Tuple[int, ...] = tuple(reference_windings)

        self.pairing: Tuple[Tuple[int, ...], ...] = tuple(
            tuple(intersection_pairing(a, b) for b in self.classes) for a in self.classes
        )

    def offset(self, r: int) -> int:
        ref = self.reference_windings
        return (ref[0] - sum(t * w for t, w in zip(self.coefficients, ref[1:]))) % r

    def c0_value(self, free: Sequence[int], r: int) -> int:
        return (self.offset(r) + sum(t * v for t, v in zip(self.coefficients, free))) % r

    def __repr__(self) -> str:
        return "ChainRelation(g={}, coefficients={})".format(self.g, list(self.coefficients))


class ChainSpin:
    """
    An r-spin structure recorded by its values on the Humphries curves
    c0, ..., c2g. Only c1, ..., c2g are free, c0 follows from the relation.
    """

    def __init__(self, *, relation: ChainRelation, r: int, free: Sequence[int]) -> None:
        _check_modulus(relation.g, r)
        if len(free) != 2 * relation.g:
            raise DimensionError(f"Expected {2 * relation.g} free values, got {len(free)}")
        self.relation = relation
        self.r = r
        self.g = relation.g
        free_values = tuple(int(v) % r for v in free)
        self.values: Tuple[int, ...] = (relation.c0_value(free_values, r),) + free_values

    @property
    def free(self) -> Tuple[int, ...]:
        return self.values[1:]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChainSpin):
            return NotImplemented
        return (self.r, self.g, self.values) == (other.r, other.g, other.values)

    def __hash__(self) -> int:
        return hash((self.r, self.g, self.values))

    def __repr__(self) -> str:
        return "ChainSpin(r={}, values={})".format(self.r, list(self.values))


def _twist_values(
    values: Tuple[int, ...], j: int, e: int, r: int, pairing: Tuple[Tuple[int, ...], ...]
) -> Tuple[int, ...]:
    vj = values[j]
    if vj == 0:
        return values
    return tuple((v - e * pairing[i][j] * vj) % r for i, v in enumerate(values))


def chain_twist(state: ChainSpin, j: int, e: int) -> ChainSpin:
    if not 0 <= j <= 2 * state.g:
        raise ChainIndexError(f"Twist index {j} outside 0..{2 * state.g}")
    values = _twist_values(state.values, j, e, state.r, state.relation.pairing)
    return ChainSpin(relation=state.relation, r=state.r, free=values[1:])


def chain_arf(state: ChainSpin) -> int:
    if state.r % 2 != 0:
        raise ParityError(f"Arf invariant is undefined for odd r={state.r}")
    q = quad_form_from_values(
        state.relation.classes[1:], [(v + 1) % 2 for v in state.free]
    )
    return arf(q)


def _check_state_space(g: int, r: int, max_states: int) -> None:
    if r ** (2 * g) > max_states:
        raise StateSpaceError(f"State space r^2g = {r ** (2 * g)} exceeds bound {max_states}")


def _free_orbit(
    start: Tuple[int, ...], relation: ChainRelation, r: int
) -> List[Tuple[int, ...]]:
    pairing = relation.pairing
    size = 2 * relation.g + 1
    seen = {start}
    order = [start]
    frontier = deque([start])
    while frontier:
        free = frontier.popleft()
        values = (relation.c0_value(free, r),) + free
        for j in range(size):
            for e in (1, -1):
                image = _twist_values(values, j, e, r, pairing)[1:]
                if image not in seen:
                    seen.add(image)
                    order.append(image)
                    frontier.append(image)
    return order


def orbit(state: ChainSpin, *, max_states: int = MAX_STATES) -> FrozenSet[ChainSpin]:
    _check_state_space(state.g, state.r, max_states)
    members = _free_orbit(state.free, state.relation, state.r)
    logger.debug("Orbit of %s has %d states", state, len(members))
    return frozenset(ChainSpin(relation=state.relation, r=state.r, free=m) for m in members)


def all_orbits(
    relation: ChainRelation, r: int, *, max_states: int = MAX_STATES
) -> List[List[Tuple[int, ...]]]:
    """
    Partition all r^2g free value vectors into twist orbits. Orbits are
    listed by their smallest member, each as a list of free vectors.
    """
    g = relation.g
    _check_modulus(g, r)
    _check_state_space(g, r, max_states)
    assigned: Dict[Tuple[int, ...], int] = {}
    orbits: List[List[Tuple[int, ...]]] = []
    for free in itertools.product(range(r), repeat=2 * g):
        if free in assigned:
            continue
        members = _free_orbit(free, relation, r)
        for m in members:
            assigned[m] = len(orbits)
        orbits.append(members)
    logger.debug("g=%d r=%d splits into orbits of sizes %s", g, r, [len(o) for o in orbits])
    return orbits
