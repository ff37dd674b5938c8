import json
import logging
import os
from functools import reduce
from math import gcd
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Set, Tuple, Union

import networkx as nx
import numpy as np

from .neighborhood import neighborhood_boundary
from .origami import (
    CombCurve,
    Cylinder,
    Direction,
    Origami,
    cylinder_of,
    genus,
    homology_class,
    stratum,
    turning_number,
)
from .spin import FramedCurve, SpinStructure
from .symplectic import HomologyClass, SymplecticMap, intersection_pairing, symplectic_reduction


logger = logging.getLogger(__name__)


TEMPLATE_VERSION = 1
CASES = ("curvelabels12", "curvelabels3")


class OrientabilityError(Exception):
    def __init__(self, message: str, cycle: Sequence[str]) -> None:
        super().__init__(message)
        self.cycle = list(cycle)


class PartitionError(Exception):
    pass


class ParameterError(Exception):
    pass


class TemplateError(Exception):
    pass


class Curve:
    def __init__(
        self,
        *,
        name: str,
        family: str,
        points: Sequence[str],
        signs: Optional[Sequence[int]] = None,
    ) -> None:
        if family not in ("h", "v"):
            raise TemplateError(f"Curve {name} has family '{family}', expected 'h' or 'v'")
        if len(points) == 0:
            raise TemplateError(f"Curve {name} has no intersection points")
        if len(set(points)) != len(points):
            raise TemplateError(f"Curve {name} passes through a point twice")
        if signs is None:
            signs = [1] * len(points)
        if len(signs) != len(points) or any(s not in (1, -1) for s in signs):
            raise TemplateError(f"Curve {name} needs one sign of +1 or -1 per point")
        self.name = name
        self.family = family
        self.points: Tuple[str, ...] = tuple(points)
        self.signs: Tuple[int, ...] = tuple(signs)

    def sign_at(self, point: str) -> int:
        return self.signs[self.points.index(point)]

    def __repr__(self) -> str:
        return "Curve({}, {}, {})".format(self.name, self.family, list(self.points))


class CurveSystem:
    """
    Two transverse multicurves, given by the cyclic order of the intersection
    points along each curve. Every point lies on exactly one horizontal and
    one vertical curve.
    """

    def __init__(self, curves: Sequence[Curve]) -> None:
        self.curves: List[Curve] = list(curves)
        names = [c.name for c in self.curves]
        if len(set(names)) != len(names):
            raise TemplateError("Curve names must be unique")
        self.by_name: Dict[str, Curve] = {c.name: c for c in self.curves}

        self.horizontal_of: Dict[str, str] = {}
        self.vertical_of: Dict[str, str] = {}
        for c in self.curves:
            lookup = self.horizontal_of if c.family == "h" else self.vertical_of
            for p in c.points:
                if p in lookup:
                    raise TemplateError(
                        f"Point {p} lies on both {lookup[p]} and {c.name}, which are in the same family"
                    )
                lookup[p] = c.name
        if set(self.horizontal_of) != set(self.vertical_of):
            stray = sorted(set(self.horizontal_of) ^ set(self.vertical_of))
            raise TemplateError(f"Points {stray} are not on one curve of each family")

        met: Set[Tuple[str, str]] = set()
        for p in self.points:
            pair = (self.horizontal_of[p], self.vertical_of[p])
            if pair in met:
                raise TemplateError(f"Curves {pair[0]} and {pair[1]} meet more than once")
            met.add(pair)

    @property
    def h_curves(self) -> List[Curve]:
        return [c for c in self.curves if c.family == "h"]

    @property
    def v_curves(self) -> List[Curve]:
        return [c for c in self.curves if c.family == "v"]

    @property
    def points(self) -> List[str]:
        # Order of first appearance along the horizontal curves.
        return [p for c in self.h_curves for p in c.points]

    def sign(self, point: str) -> int:
        h = self.by_name[self.horizontal_of[point]]
        v = self.by_name[self.vertical_of[point]]
        return h.sign_at(point) * v.sign_at(point)

    def __repr__(self) -> str:
        return "CurveSystem({})".format([c.name for c in self.curves])


def intersection_graph(cs: CurveSystem) -> nx.Graph:
    graph = nx.Graph()
    for c in cs.curves:
        graph.add_node(c.name, family=c.family)
    for p in cs.points:
        graph.add_edge(cs.horizontal_of[p], cs.vertical_of[p], point=p)
    return graph


class GraphSummary(NamedTuple):
    connected: bool
    tree: bool
    arboreal: bool


def graph_summary(graph: nx.Graph) -> GraphSummary:
    connected = graph.number_of_nodes() > 0 and nx.is_connected(graph)
    tree = connected and nx.is_tree(graph)
    return GraphSummary(connected=connected, tree=tree, arboreal=tree)


def propagate_orientations(cs: CurveSystem, seed: int = 1) -> Dict[str, int]:
    """
    Orient every curve so that each intersection is positive, starting from
    the lexicographically first horizontal curve with the given sign.
    """
    graph = intersection_graph(cs)
    if not graph_summary(graph).connected:
        raise OrientabilityError("Curve system is not connected", [])
    root = min(c.name for c in cs.h_curves)
    orientation = {root: seed}
    parent: Dict[str, str] = {}
    order = [root]
    for name in order:
        for other in sorted(graph.neighbors(name)):
            wanted = cs.sign(graph.edges[name, other]["point"]) * orientation[name]
            if other not in orientation:
                orientation[other] = wanted
                parent[other] = name
                order.append(other)
            elif orientation[other] != wanted:
                cycle = _tree_cycle(parent, name, other)
                raise OrientabilityError(
                    f"Orientations cannot be made consistent around {cycle}", cycle
                )
    return orientation


def _tree_cycle(parent: Dict[str, str], a: str, b: str) -> List[str]:
    def up(x: str) -> List[str]:
        out = [x]
        while out[-1] in parent:
            out.append(parent[out[-1]])
        return out

    up_a, up_b = up(a), up(b)
    common = next(x for x in up_a if x in set(up_b))
    return up_a[: up_a.index(common) + 1] + list(reversed(up_b[: up_b.index(common)]))


class Realization(NamedTuple):
    origami: Origami
    cylinders: Dict[str, Cylinder]
    squares: Dict[str, int]
    orientation: Dict[str, int]


def build_origami(cs: CurveSystem, *, seed: int = 1) -> Realization:
    """
    One unit square per intersection point. sigma_h follows each horizontal
    curve and sigma_v each vertical curve in its propagated orientation.
    """
    orientation = propagate_orientations(cs, seed)
    squares = {p: i for i, p in enumerate(cs.points)}
    n = len(squares)
    sigma_h = list(range(n))
    sigma_v = list(range(n))
    for c in cs.curves:
        points = list(c.points) if orientation[c.name] == 1 else list(reversed(c.points))
        perm = sigma_h if c.family == "h" else sigma_v
        for here, there in zip(points, points[1:] + points[:1]):
            perm[squares[here]] = squares[there]
    o = Origami(sigma_h=sigma_h, sigma_v=sigma_v)
    o.check_connected()

    cylinders = {}
    for c in cs.curves:
        direction = Direction.HORIZONTAL if c.family == "h" else Direction.VERTICAL
        cylinders[c.name] = cylinder_of(o, direction, squares[c.points[0]])
    logger.debug("Built %r from %d curves", o, len(cs.curves))
    return Realization(origami=o, cylinders=cylinders, squares=squares, orientation=orientation)


def complement_is_disks(cs: CurveSystem, o: Origami) -> bool:
    """
    Cut every square along both cores into quarters and check that the
    quarters glue up into one disk around each vertex.
    """
    if o.n != len(cs.points):
        return False
    graph = nx.Graph()
    # Quarters 0..3 are bottom left, bottom right, top right, top left.
    for q in range(o.n):
        graph.add_nodes_from((q, k) for k in range(4))
        graph.add_edge((q, 1), (o.sigma_h[q], 0))
        graph.add_edge((q, 2), (o.sigma_h[q], 3))
        graph.add_edge((q, 3), (o.sigma_v[q], 0))
        graph.add_edge((q, 2), (o.sigma_v[q], 1))
    pieces = list(nx.connected_components(graph))
    vertices = o.vertex_classes()
    if len(pieces) != len(vertices):
        return False
    for cycle in vertices:
        piece = next(p for p in pieces if (cycle[0], 0) in p)
        if len(piece) != 4 * len(cycle) or any((q, 0) not in piece for q in cycle):
            return False
    return True


def d_system(n: int) -> CurveSystem:
    """
    The tree of n curves a, a', c1, ..., c(n-2): a chain c1, ..., c(n-2)
    with a and a' both meeting c1 once.
    """
    if n < 4:
        raise ParameterError(f"A D-tree needs at least 4 curves, got {n}")
    chain = [f"c{i}" for i in range(1, n - 1)]
    points: Dict[str, List[str]] = {name: [] for name in ["a", "a'"] + chain}
    for leaf, point in (("a", "pa"), ("a'", "pb")):
        points["c1"].append(point)
        points[leaf].append(point)
    for i in range(1, n - 2):
        point = f"p{i}"
        points[f"c{i}"].append(point)
        points[f"c{i + 1}"].append(point)

    curves = [
        Curve(name="a", family="v", points=points["a"]),
        Curve(name="a'", family="v", points=points["a'"]),
    ]
    for i, name in enumerate(chain, start=1):
        curves.append(Curve(name=name, family="h" if i % 2 == 1 else "v", points=points[name]))
    return CurveSystem(curves)


# Templates.


class Leaf(NamedTuple):
    name: str
    point: str
    orientation: int


class BoundaryRef(NamedTuple):
    curves: Tuple[str, ...]
    component: int


CurveRef = Union[str, BoundaryRef]


def templates_dir() -> str:
    override = os.environ.get("SPINORIGAMI_TEMPLATES")
    if override:
        return override
    return os.path.join(os.path.dirname(os.path.abspath(__file__)), "templates")


class Template:
    def __init__(
        self,
        *,
        name: str,
        genus: int,
        case: str,
        arf: Optional[int],
        curves: Sequence[Curve],
        leaves: Sequence[Leaf],
        basis: Sequence[Tuple[CurveRef, CurveRef]],
    ) -> None:
        if case not in CASES:
            raise TemplateError(f"Template {name} has unknown case '{case}'")
        self.name = name
        self.genus = genus
        self.case = case
        self.arf = arf
        self.curves = list(curves)
        self.leaves = list(leaves)
        self.basis = list(basis)

        rows = {p: c.name for c in self.curves if c.family == "h" for p in c.points}
        for leaf in self.leaves:
            if leaf.point not in rows:
                raise TemplateError(f"Leaf {leaf.name} sits on point {leaf.point} outside every row")
            if leaf.orientation not in (1, -1):
                raise TemplateError(f"Leaf {leaf.name} has orientation {leaf.orientation}")
        if len(self.leaves) > 2 * genus - 2:
            raise TemplateError(f"Template {name} lists more than {2 * genus - 2} leaves")

    @staticmethod
    def from_json(data: dict) -> "Template":
        try:
            if data["version"] != TEMPLATE_VERSION:
                raise TemplateError(f"Template version {data['version']} is not supported")
            curves = [
                Curve(name=c["name"], family=c["family"], points=c["points"], signs=c.get("signs"))
                for c in data["curves"]
            ]
            leaves = [Leaf(l["name"], l["point"], int(l["orientation"])) for l in data["leaves"]]

            def ref(entry: Union[str, dict]) -> CurveRef:
                if isinstance(entry, str):
                    return entry
                return BoundaryRef(tuple(entry["boundary"]), int(entry.get("component", 0)))

            basis = [(ref(x), ref(y)) for x, y in data.get("basis", [])]
            return Template(
                name=data["name"],
                genus=int(data["genus"]),
                case=data["case"],
                arf=data.get("arf"),
                curves=curves,
                leaves=leaves,
                basis=basis,
            )
        except (KeyError, TypeError, ValueError) as e:
            raise TemplateError(f"Malformed template: {e}") from None

    def leaf(self, index: int) -> Leaf:
        return self.leaves[index]

    def system(self, leaf_indices: Iterable[int]) -> CurveSystem:
        """
        The base curves plus the chosen leaves. Points of the other leaves
        are dropped from their rows.
        """
        chosen = sorted(set(leaf_indices))
        for i in chosen:
            if not 0 <= i < len(self.leaves):
                raise TemplateError(f"Template {self.name} has no leaf b{i}")
        dropped = {l.point for i, l in enumerate(self.leaves) if i not in chosen}
        curves = []
        for c in self.curves:
            kept = [(p, s) for p, s in zip(c.points, c.signs) if p not in dropped]
            if not kept:
                raise TemplateError(f"Dropping leaves empties curve {c.name}")
            curves.append(
                Curve(name=c.name, family=c.family, points=[p for p, _ in kept], signs=[s for _, s in kept])
            )
        for i in chosen:
            leaf = self.leaves[i]
            curves.append(Curve(name=leaf.name, family="v", points=[leaf.point]))
        return CurveSystem(curves)

    def __repr__(self) -> str:
        return "Template({}, g={}, case={}, arf={})".format(self.name, self.genus, self.case, self.arf)


def load_template(name: str) -> Template:
    path = os.path.join(templates_dir(), f"{name}.json")
    if not os.path.isfile(path):
        raise TemplateError(f"No template named '{name}' in {templates_dir()}")
    with open(path, "r") as bfp:
        try:
            data = json.load(bfp)
        except json.JSONDecodeError as e:
            raise TemplateError(f"Template {name} is not valid JSON: {e}") from None
    template = Template.from_json(data)
    if template.name != name:
        raise TemplateError(f"File {path} holds template '{template.name}'")
    logger.debug("Loaded %r from %s", template, path)
    return template


def available_templates() -> List[str]:
    directory = templates_dir()
    if not os.path.isdir(directory):
        return []
    return sorted(f[:-5] for f in os.listdir(directory) if f.endswith(".json"))


def template_for(g: int, case: str, arf: Optional[int] = None) -> Template:
    for name in available_templates():
        template = load_template(name)
        if template.genus == g and template.case == case:
            if arf is not None and template.arf != arf:
                raise TemplateError(f"Template {name} realizes Arf {template.arf}, not {arf}")
            return template
    raise TemplateError(f"No {case} template for genus {g}")


def select_case(g: int, kappa_gcd: int, arf: Optional[int]) -> str:
    if kappa_gcd % 2 == 1:
        return "curvelabels12"
    if arf == 1 and g % 4 in (0, 3):
        return "curvelabels12"
    if arf == 0 and g % 4 in (1, 2):
        return "curvelabels12"
    return "curvelabels3"


def leaf_indices(kappa: Sequence[int]) -> List[int]:
    """Indices i of the leaves b_i: partial sums of kappa mod 2g-2."""
    total = sum(kappa)
    out = []
    running = 0
    for k in kappa:
        running += k
        out.append(running % total)
    return sorted(set(out))


def check_partition(kappa: Sequence[int], g: Optional[int] = None) -> int:
    if len(kappa) == 0 or any(int(k) < 1 for k in kappa):
        raise PartitionError(f"Zero orders must be positive integers, got {list(kappa)}")
    total = sum(kappa)
    if total % 2 != 0:
        raise PartitionError(f"Zero orders {list(kappa)} sum to {total}, which is odd")
    implied = total // 2 + 1
    if g is not None and g != implied:
        raise PartitionError(f"Zero orders {list(kappa)} sum to {total}, not 2g-2={2 * g - 2}")
    return implied


def curve_system_for(
    kappa: Sequence[int], arf: Optional[int] = None, *, g: Optional[int] = None
) -> Tuple[CurveSystem, Template, List[int]]:
    g = check_partition(kappa, g)
    if g < 3:
        raise ParameterError(f"Curve systems are built for genus >= 3, got {g}")
    r = reduce(gcd, kappa, 0)
    if r % 2 == 0:
        if arf is None and g == 3:
            arf = 1
        if arf not in (0, 1):
            raise ParameterError(f"Even gcd {r} needs an Arf invariant of 0 or 1, got {arf}")
        if g == 3 and arf != 1:
            raise ParameterError("Genus 3 prototypes with even gcd have Arf 1")
    elif arf is not None:
        logger.warning("Ignoring arf=%s, zero orders %s have odd gcd", arf, list(kappa))
        arf = None

    case = select_case(g, r, arf)
    template = template_for(g, case, arf)
    indices = leaf_indices(kappa)
    return template.system(indices), template, indices


def _family_arf(gram: np.ndarray, values: Sequence[int]) -> int:
    """Arf of the form taking the given values on a family with this Gram matrix."""
    size = len(values)
    pairs, _ = symplectic_reduction(np.eye(size, dtype=np.int64), gram)

    def q(v: np.ndarray) -> int:
        members = [i for i in range(size) if v[i] % 2]
        total = sum(values[i] for i in members)
        for a, i in enumerate(members):
            for j in members[a + 1 :]:
                total += int(gram[i][j])
        return total % 2

    return sum(q(x) * q(y) for x, y in pairs) % 2


def arf_from_chain_base(g: int, p: int) -> int:
    """
    Arf invariant of the chain a1, ..., a(2g-1) with b0 attached to row
    a(2p+1), all of them cylinder cores.
    """
    if not 0 <= p <= g - 1:
        raise ParameterError(f"b0 row index p={p} outside 0..{g - 1}")
    size = 2 * g
    gram = np.zeros((size, size), dtype=np.int64)
    for i in range(2 * g - 2):
        gram[i][i + 1], gram[i + 1][i] = 1, -1
    gram[size - 1][2 * p], gram[2 * p][size - 1] = 1, -1
    return _family_arf(gram, [1] * size)


# Prototypes.


class Prototype:
    """
    A square-tiled surface built from a curve system, with the winding
    structure read off a geometric symplectic basis of curves on it.
    """

    def __init__(
        self,
        *,
        kappa: Sequence[int],
        template: Template,
        leaf_indices: Sequence[int],
        system: CurveSystem,
        realization: Realization,
    ) -> None:
        self.kappa = list(kappa)
        self.template = template
        self.leaf_indices = list(leaf_indices)
        self.system = system
        self.realization = realization
        self.origami = realization.origami
        self.g = genus(self.origami)
        self.r = reduce(gcd, self.kappa, 0)

        self.basis_curves = self.__basis_curves()
        self.change = SymplecticMap.from_columns(
            [homology_class(self.origami, c) for c in self.basis_curves]
        )
        if not self.change.is_symplectic():
            raise TemplateError(f"Basis curves of {template.name} are not a symplectic basis")
        self.__to_basis = self.change.inverse()
        self.spin = SpinStructure(
            r=self.r, g=self.g, values=[turning_number(self.origami, c) for c in self.basis_curves]
        )

    def curve(self, ref: CurveRef) -> CombCurve:
        if isinstance(ref, str):
            if ref not in self.realization.cylinders:
                raise TemplateError(f"Template {self.template.name} has no curve {ref}")
            return self.realization.cylinders[ref].core
        cyls = [self.realization.cylinders[name] for name in ref.curves]
        return neighborhood_boundary(self.origami, cyls)[ref.component]

    def __basis_curves(self) -> List[CombCurve]:
        out = []
        for x_ref, y_ref in self.template.basis:
            x, y = self.curve(x_ref), self.curve(y_ref)
            pairing = intersection_pairing(
                homology_class(self.origami, x), homology_class(self.origami, y)
            )
            if pairing == -1:
                x = x.reversed()
            elif pairing != 1:
                raise TemplateError(f"Basis pair {x_ref}, {y_ref} meets {pairing} times algebraically")
            out.extend([x, y])
        return out

    def coordinates(self, c: CombCurve) -> HomologyClass:
        """Class of c in the geometric basis x1, y1, ..., xg, yg."""
        return self.__to_basis(homology_class(self.origami, c))

    def framed(self, name: str, c: CombCurve) -> FramedCurve:
        return FramedCurve(
            name=name, h=self.coordinates(c), w=turning_number(self.origami, c), r=self.r
        )

    @property
    def curves(self) -> Dict[str, FramedCurve]:
        return {c.name: self.framed(c.name, self.realization.cylinders[c.name].core) for c in self.system.curves}

    def __repr__(self) -> str:
        return "Prototype(kappa={}, template={}, spin={})".format(
            self.kappa, self.template.name, self.spin
        )


def prototype(
    kappa: Sequence[int], arf: Optional[int] = None, *, g: Optional[int] = None
) -> Prototype:
    system, template, indices = curve_system_for(kappa, arf, g=g)
    realization = build_origami(system)
    proto = Prototype(
        kappa=kappa,
        template=template,
        leaf_indices=indices,
        system=system,
        realization=realization,
    )
    found = stratum(proto.origami)
    if found != sorted(kappa, reverse=True):
        raise TemplateError(f"Template {template.name} built stratum {found}, expected {list(kappa)}")
    logger.debug("Built %r", proto)
    return proto


def leaf_windings(proto: Prototype) -> Dict[str, int]:
    """
    phi(b_i) mod 2g-2 for each leaf, in its recorded orientation. Cutting
    along b0, b_i and the vertical base curves leaves a piece to the left of
    b_i; minus the zero orders it contains is the winding of b_i.
    """
    o = proto.origami
    modulus = 2 * proto.g - 2
    leaves = {i: proto.template.leaf(i) for i in proto.leaf_indices}
    leaf_names = {leaf.name for leaf in leaves.values()}
    columns = [c.name for c in proto.system.v_curves if c.name not in leaf_names]
    orders = [(cycle[0], len(cycle) - 1) for cycle in o.vertex_classes() if len(cycle) > 1]
    base = proto.template.leaf(0)

    out = {}
    for i, leaf in leaves.items():
        if i == 0:
            out[leaf.name] = 0
            continue
        cut: Set[int] = set()
        for name in columns + [base.name, leaf.name]:
            cut.update(proto.realization.cylinders[name].squares)

        graph = nx.Graph()
        for q in range(o.n):
            graph.add_nodes_from([(q, 0), (q, 1)])
            if q not in cut:
                graph.add_edge((q, 0), (q, 1))
            graph.add_edge((q, 1), (o.sigma_h[q], 0))
            graph.add_edge((q, 0), (o.sigma_v[q], 0))
            graph.add_edge((q, 1), (o.sigma_v[q], 1))
        piece = nx.node_connected_component(graph, (proto.realization.squares[leaf.point], 0))
        inside = sum(k for q, k in orders if (q, 0) in piece)
        out[leaf.name] = (-inside * leaf.orientation) % modulus
    return out
