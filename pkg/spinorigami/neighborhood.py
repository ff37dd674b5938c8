import logging
from typing import Dict, List, Sequence, Set, Tuple

from .origami import CombCurve, Cylinder, Direction, Origami, Side, Step


logger = logging.getLogger(__name__)


class NeighborhoodError(Exception):
    pass


# How a boundary strand keeping the neighborhood on its left runs through a
# square, keyed by the side it enters through.
_CROSSING = {
    Side.LEFT: Side.BOTTOM,
    Side.BOTTOM: Side.RIGHT,
    Side.RIGHT: Side.TOP,
    Side.TOP: Side.LEFT,
}
_ALONG_HORIZONTAL = {Side.LEFT: Side.RIGHT, Side.RIGHT: Side.LEFT}
_ALONG_VERTICAL = {Side.BOTTOM: Side.TOP, Side.TOP: Side.BOTTOM}


def _square_sets(o: Origami, cyls: Sequence[Cylinder]) -> Tuple[Set[int], Set[int]]:
    horizontal: Set[int] = set()
    vertical: Set[int] = set()
    for cyl in cyls:
        target = horizontal if cyl.direction == Direction.HORIZONTAL else vertical
        if target & set(cyl.squares):
            raise NeighborhoodError(f"{cyl} overlaps another cylinder of the same direction")
        for q in cyl.squares:
            if not 0 <= q < o.n:
                raise NeighborhoodError(f"{cyl} is not a cylinder of {o}")
        target.update(cyl.squares)
    return horizontal, vertical


def intersection_squares(o: Origami, cyls: Sequence[Cylinder]) -> List[int]:
    horizontal, vertical = _square_sets(o, cyls)
    return sorted(horizontal & vertical)


def euler_characteristic(o: Origami, cyls: Sequence[Cylinder]) -> int:
    # The cores form a 4-valent graph on the crossing squares.
    return -len(intersection_squares(o, cyls))


def neighborhood_boundary(o: Origami, cyls: Sequence[Cylinder]) -> List[CombCurve]:
    """
    Boundary components of a regular neighborhood of the union of the given
    cylinder cores, each oriented with the neighborhood on its left. The
    component through the smallest (square, entry side) state comes first,
    and each component starts at its own smallest state.
    """
    horizontal, vertical = _square_sets(o, cyls)

    def exit_for(q: int, entry: Side) -> Side:
        if q in horizontal and q in vertical:
            return _CROSSING[entry]
        if q in horizontal:
            return _ALONG_HORIZONTAL[entry]
        return _ALONG_VERTICAL[entry]

    states: List[Tuple[int, Side]] = []
    for q in sorted(horizontal | vertical):
        if q in horizontal:
            states.extend([(q, Side.LEFT), (q, Side.RIGHT)])
        if q in vertical:
            states.extend([(q, Side.BOTTOM), (q, Side.TOP)])
    states.sort(key=lambda s: (s[0], s[1].value))

    seen: Dict[Tuple[int, Side], int] = {}
    components: List[CombCurve] = []
    for start in states:
        if start in seen:
            continue
        steps: List[Step] = []
        state = start
        while state not in seen:
            seen[state] = len(components)
            q, entry = state
            exit_side = exit_for(q, entry)
            steps.append(Step(q, entry, exit_side))
            state = (o.move(q, exit_side), exit_side.opposite)
        if state != start:
            raise NeighborhoodError(f"Boundary walk from {start} does not close up")
        components.append(CombCurve(steps))

    logger.debug(
        "Neighborhood of %d cores has %d boundary components", len(cyls), len(components)
    )
    return components
