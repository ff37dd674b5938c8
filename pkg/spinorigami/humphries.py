import logging
from functools import lru_cache
from typing import List

from .neighborhood import neighborhood_boundary
from .origami import CombCurve, homology_class, turning_number
from .spin import ChainRelation
from .symplectic import express_in_basis
from .thurstonveech import Curve, CurveSystem, ParameterError, Realization, build_origami


logger = logging.getLogger(__name__)


def humphries_curves(g: int) -> List[CombCurve]:
    """
    The Humphries curves c0, ..., c2g on the genus g reference surface:
    the chain c1..c2g is a1, ..., a(2g-1), b0 and c0 is a boundary curve of
    a neighborhood of c1, c2, c3, so it meets c4 once.
    """
    return _curves(realize(g), g)


def humphries_system(g: int) -> CurveSystem:
    """
    A staircase of 2g cylinders: a1, ..., a(2g-1) alternate horizontal and
    vertical and meet their neighbours once at s1, ..., s(2g-2), and the
    vertical b0 closes the chain through a second point on a(2g-1).
    """
    if g < 2:
        raise ParameterError(f"The Humphries curves need genus >= 2, got {g}")
    last = 2 * g - 1
    curves = [Curve(name="a1", family="h", points=["s1"])]
    for i in range(2, last):
        curves.append(
            Curve(name=f"a{i}", family="h" if i % 2 else "v", points=[f"s{i - 1}", f"s{i}"])
        )
    curves.append(Curve(name=f"a{last}", family="h", points=[f"l{last - 1}", f"s{last - 1}"]))
    curves.append(Curve(name="b0", family="v", points=[f"l{last - 1}"]))
    return CurveSystem(curves)


@lru_cache(maxsize=None)
def realize(g: int) -> Realization:
    realization = build_origami(humphries_system(g))
    logger.debug("Genus %d Humphries origami has %d squares", g, realization.origami.n)
    return realization


def _curves(realization: Realization, g: int) -> List[CombCurve]:
    cyls = realization.cylinders
    chain = [cyls[f"a{i}"].core for i in range(1, 2 * g)] + [cyls["b0"].core]
    c0 = neighborhood_boundary(realization.origami, [cyls["a1"], cyls["a2"], cyls["a3"]])[0]
    return [c0] + chain


@lru_cache(maxsize=None)
def chain_relation(g: int) -> ChainRelation:
    realization = realize(g)
    o = realization.origami
    curves = _curves(realization, g)
    classes = [homology_class(o, c) for c in curves]
    coefficients = express_in_basis(classes[1:], classes[0])
    windings = [turning_number(o, c) for c in curves]
    logger.debug("Genus %d Humphries windings %s, c0 = %s on the chain", g, windings, coefficients)
    return ChainRelation(
        g=g, classes=classes, coefficients=coefficients, reference_windings=windings
    )
