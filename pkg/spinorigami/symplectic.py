import logging
from collections import deque
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix


logger = logging.getLogger(__name__)


# Closure over Sp(2g, F2) is only attempted up to this dimension.
MAX_SYMPLECTIC_DIM: int = 8
MAX_GROUP_ELEMENTS: int = 5_000_000


class DimensionError(Exception):
    pass


class RankError(Exception):
    pass


class EnumerationBoundError(Exception):
    pass


class HomologyClass:
    """
    An integral class in H1 of a closed genus g surface, written in the
    reference symplectic basis ordered (x1, y1, ..., xg, yg).
    """

    def __init__(self, coords: Iterable[int]) -> None:
        self.coords: Tuple[int, ...] = tuple(int(c) for c in coords)
        if len(self.coords) == 0 or len(self.coords) % 2 != 0:
            raise DimensionError(f"A homology class needs 2g > 0 coordinates, got {len(self.coords)}")

    @staticmethod
    def zero(g: int) -> "HomologyClass":
        return HomologyClass([0] * (2 * g))

    @staticmethod
    def basis(g: int, index: int) -> "HomologyClass":
        coords = [0] * (2 * g)
        coords[index] = 1
        return HomologyClass(coords)

    @staticmethod
    def x(g: int, i: int) -> "HomologyClass":
        # 1-based, matching the x_i naming.
        return HomologyClass.basis(g, 2 * (i - 1))

    @staticmethod
    def y(g: int, i: int) -> "HomologyClass":
        return HomologyClass.basis(g, 2 * (i - 1) + 1)

    @property
    def g(self) -> int:
        return len(self.coords) // 2

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def mod(self, modulus: int) -> "HomologyClass":
        return HomologyClass(c % modulus for c in self.coords)

    def bits(self) -> int:
        """Bit-packed reduction mod 2, bit i holding coordinate i."""
        out = 0
        for i, c in enumerate(self.coords):
            if c % 2:
                out |= 1 << i
        return out

    def __check(self, other: "HomologyClass") -> None:
        if len(self.coords) != len(other.coords):
            raise DimensionError(
                f"Cannot combine classes of length {len(self.coords)} and {len(other.coords)}"
            )

    def __add__(self, other: "HomologyClass") -> "HomologyClass":
        self.__check(other)
        return HomologyClass(a + b for a, b in zip(self.coords, other.coords))

    def __sub__(self, other: "HomologyClass") -> "HomologyClass":
        self.__check(other)
        return HomologyClass(a - b for a, b in zip(self.coords, other.coords))

    def __neg__(self) -> "HomologyClass":
        return HomologyClass(-a for a in self.coords)

    def __mul__(self, scale: int) -> "HomologyClass":
        return HomologyClass(scale * a for a in self.coords)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HomologyClass):
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def __repr__(self) -> str:
        return "HomologyClass({})".format(list(self.coords))


def standard_form(g: int) -> np.ndarray:
    form = np.zeros((2 * g, 2 * g), dtype=np.int64)
    for i in range(g):
        form[2 * i, 2 * i + 1] = 1
        form[2 * i + 1, 2 * i] = -1
    return form


def intersection_pairing(u: HomologyClass, v: HomologyClass) -> int:
    if len(u.coords) != len(v.coords):
        raise DimensionError(
            f"Cannot pair classes of length {len(u.coords)} and {len(v.coords)}"
        )
    total = 0
    for i in range(0, len(u.coords), 2):
        total += u.coords[i] * v.coords[i + 1] - u.coords[i + 1] * v.coords[i]
    return total


class SymplecticMap:
    """
    An integral 2g x 2g matrix acting on column vectors of reference coordinates.
    """

    def __init__(self, matrix: np.ndarray) -> None:
        matrix = np.array(matrix, dtype=np.int64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] % 2 != 0:
            raise DimensionError(f"Expected a square matrix of even size, got shape {matrix.shape}")
        matrix.setflags(write=False)
        self.matrix: np.ndarray = matrix

    @staticmethod
    def identity(g: int) -> "SymplecticMap":
        return SymplecticMap(np.eye(2 * g, dtype=np.int64))

    @staticmethod
    def from_columns(columns: Sequence[HomologyClass]) -> "SymplecticMap":
        return SymplecticMap(np.array([c.coords for c in columns], dtype=np.int64).T)

    @property
    def g(self) -> int:
        return self.matrix.shape[0] // 2

    def __call__(self, h: HomologyClass) -> HomologyClass:
        if len(h.coords) != self.matrix.shape[0]:
            raise DimensionError(
                f"Cannot apply a {self.matrix.shape[0]}-dimensional map to a class of length {len(h.coords)}"
            )
        return HomologyClass(self.matrix @ np.array(h.coords, dtype=np.int64))

    def __matmul__(self, other: "SymplecticMap") -> "SymplecticMap":
        return SymplecticMap(self.matrix @ other.matrix)

    def inverse(self) -> "SymplecticMap":
        # M^-1 = -J M^T J for symplectic M.
        form = standard_form(self.g)
        return SymplecticMap(-form @ self.matrix.T @ form)

    def mod(self, modulus: int) -> "SymplecticMap":
        return SymplecticMap(self.matrix % modulus)

    def is_symplectic(self) -> bool:
        form = standard_form(self.g)
        return bool(np.array_equal(self.matrix.T @ form @ self.matrix, form))

    def columns(self) -> List[HomologyClass]:
        return [HomologyClass(self.matrix[:, i]) for i in range(self.matrix.shape[1])]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymplecticMap):
            return NotImplemented
        return bool(np.array_equal(self.matrix, other.matrix))

    def __hash__(self) -> int:
        return hash(self.matrix.tobytes())

    def __repr__(self) -> str:
        return "SymplecticMap({})".format(self.matrix.tolist())


def transvection(c: HomologyClass, e: int) -> SymplecticMap:
    # v -> v + e<v, c>c, and <v, c> = (Jc) . v
    vec = np.array(c.coords, dtype=np.int64)
    form = standard_form(c.g)
    return SymplecticMap(np.eye(2 * c.g, dtype=np.int64) + e * np.outer(vec, form @ vec))


class QuadForm2:
    """
    A quadratic form on H1(Sigma_g; F2), stored by its values on the
    reference basis and extended by q(x + y) = q(x) + q(y) + <x, y>.
    """

    def __init__(self, basis_values: Iterable[int]) -> None:
        self.basis_values: Tuple[int, ...] = tuple(int(v) % 2 for v in basis_values)
        if len(self.basis_values) == 0 or len(self.basis_values) % 2 != 0:
            raise DimensionError(f"A quadratic form needs 2g > 0 values, got {len(self.basis_values)}")

    @staticmethod
    def from_bits(g: int, bits: int) -> "QuadForm2":
        return QuadForm2((bits >> i) & 1 for i in range(2 * g))

    @property
    def g(self) -> int:
        return len(self.basis_values) // 2

    def bits(self) -> int:
        out = 0
        for i, v in enumerate(self.basis_values):
            out |= v << i
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QuadForm2):
            return NotImplemented
        return self.basis_values == other.basis_values

    def __hash__(self) -> int:
        return hash(self.basis_values)

    def __repr__(self) -> str:
        return "QuadForm2({})".format(list(self.basis_values))


def quad_value(q: QuadForm2, h: HomologyClass) -> int:
    if len(h.coords) != len(q.basis_values):
        raise DimensionError(
            f"Cannot evaluate a genus {q.g} form on a class of length {len(h.coords)}"
        )
    return quad_value_bits(q.bits(), h.bits())


def arf(q: QuadForm2) -> int:
    values = q.basis_values
    return sum(values[2 * i] * values[2 * i + 1] for i in range(q.g)) % 2


def arf_by_majority(q: QuadForm2, block: Sequence[HomologyClass]) -> int:
    """
    Arf invariant of q restricted to the span of block, read off as the value
    q takes most often there. The span must be a symplectic subspace of
    dimension 2k, on which q takes the value 1 exactly 2^(2k-1) +- 2^(k-1) times.
    """
    if len(block) == 0 or len(block) % 2 != 0:
        raise DimensionError(f"A symplectic block needs 2k > 0 classes, got {len(block)}")
    qbits = q.bits()
    span = {0}
    for h in block:
        v = h.bits()
        span |= {w ^ v for w in span}
    k = len(block) // 2
    if len(span) != 1 << (2 * k):
        raise RankError(f"{len(block)} classes span only {len(span)} vectors mod 2")
    ones = sum(quad_value_bits(qbits, w) for w in span)
    if ones == (1 << (2 * k - 1)) + (1 << (k - 1)):
        return 1
    if ones == (1 << (2 * k - 1)) - (1 << (k - 1)):
        return 0
    raise RankError(f"The span of {len(block)} classes is not a symplectic subspace")


# Bit-packed arithmetic over F2. A vector is an int whose bit i is coordinate i,
# a matrix is the tuple of its column images.
def _even_mask(g: int) -> int:
    return int("01" * g, 2)


def swap_pairs(v: int, g: int) -> int:
    mask = _even_mask(g)
    return ((v & mask) << 1) | ((v >> 1) & mask)


def pairing_bits(u: int, v: int, g: int) -> int:
    return bin(u & swap_pairs(v, g)).count("1") % 2


def quad_value_bits(qbits: int, h: int) -> int:
    # Linear part plus one cross term <x_k, y_k> for every pair present in h.
    linear = bin(qbits & h).count("1")
    cross = bin(h & (h >> 1) & int("01" * (h.bit_length() // 2 + 1), 2)).count("1")
    return (linear + cross) % 2


def transvection_table(v: int, g: int) -> Tuple[int, ...]:
    """Lookup table of w -> w + <w, v>v over all 2^2g vectors w."""
    return tuple(w ^ v if pairing_bits(w, v, g) else w for w in range(1 << (2 * g)))


def pullback_bits(qbits: int, table: Sequence[int], g: int) -> int:
    """The form q o T on the reference basis, T given by its lookup table."""
    out = 0
    for i in range(2 * g):
        if quad_value_bits(qbits, table[1 << i]):
            out |= 1 << i
    return out


def sp_order_f2(g: int) -> int:
    order = 2 ** (g * g)
    for i in range(1, g + 1):
        order *= 4**i - 1
    return order


def stabilizer_group_f2(
    q: QuadForm2, *, max_elements: int = MAX_GROUP_ELEMENTS
) -> FrozenSet[Tuple[int, ...]]:
    """
    Close up the transvections in all vectors v with q(v) = 1 inside
    Sp(2g, F2). Each element is returned as the tuple of its bit-packed
    column images.
    """
    g = q.g
    if 2 * g > MAX_SYMPLECTIC_DIM:
        raise EnumerationBoundError(f"Refusing to enumerate Sp({2 * g}, F2), bound is {MAX_SYMPLECTIC_DIM}")

    qbits = q.bits()
    tables = [
        transvection_table(v, g)
        for v in range(1, 1 << (2 * g))
        if quad_value_bits(qbits, v) == 1
    ]
    identity = tuple(1 << i for i in range(2 * g))
    seen = {identity}
    frontier = deque([identity])
    while frontier:
        element = frontier.popleft()
        for table in tables:
            image = tuple(table[c] for c in element)
            if image not in seen:
                seen.add(image)
                frontier.append(image)
                if len(seen) > max_elements:
                    raise EnumerationBoundError(
                        f"Stabilizer closure exceeded {max_elements} elements"
                    )
    logger.debug("Stabilizer closure for %s has %d elements", q, len(seen))
    return frozenset(seen)


def fixes_form(element: Sequence[int], q: QuadForm2) -> bool:
    qbits = q.bits()
    return all(
        quad_value_bits(qbits, column) == value
        for column, value in zip(element, q.basis_values)
    )


def quad_orbits_f2(g: int) -> List[FrozenSet[QuadForm2]]:
    """Partition all 2^2g quadratic forms into orbits under Sp(2g, F2)."""
    if 2 * g > MAX_SYMPLECTIC_DIM:
        raise EnumerationBoundError(f"Refusing to enumerate forms for g={g}")

    tables = [transvection_table(v, g) for v in range(1, 1 << (2 * g))]
    assigned: Dict[int, int] = {}
    orbits: List[FrozenSet[QuadForm2]] = []
    for start in range(1 << (2 * g)):
        if start in assigned:
            continue
        members = {start}
        frontier = deque([start])
        while frontier:
            current = frontier.popleft()
            for table in tables:
                image = pullback_bits(current, table, g)
                if image not in members:
                    members.add(image)
                    frontier.append(image)
        for m in members:
            assigned[m] = len(orbits)
        orbits.append(frozenset(QuadForm2.from_bits(g, m) for m in members))
    return orbits


def orbit_size_f2(q: QuadForm2) -> int:
    return next(len(orbit) for orbit in quad_orbits_f2(q.g) if q in orbit)


def symplectic_reduction(
    vectors: Sequence[Sequence[int]], gram: np.ndarray
) -> Tuple[List[Tuple[np.ndarray, np.ndarray]], List[np.ndarray]]:
    """
    Symplectic Gram-Schmidt over Z. The vectors are coefficient vectors over a
    family whose antisymmetric pairing matrix is gram. Returns the pairs (x, y)
    with <x, y> = 1 that were split off, plus what remains, which pairs to zero
    with everything.
    """
    gram = np.array(gram, dtype=np.int64)

    def omega(u: np.ndarray, v: np.ndarray) -> int:
        return int(u @ gram @ v)

    work = [np.array(v, dtype=np.int64) for v in vectors]
    pairs: List[Tuple[np.ndarray, np.ndarray]] = []

    while True:
        best: Optional[Tuple[int, int, int]] = None
        for i in range(len(work)):
            for j in range(i + 1, len(work)):
                val = omega(work[i], work[j])
                if val != 0 and (best is None or abs(val) < abs(best[2])):
                    best = (i, j, val)
        if best is None:
            break

        i, j, m = best
        u, v = work[i], work[j]
        if abs(m) != 1:
            changed = False
            for k in range(len(work)):
                if k in (i, j):
                    continue
                a = omega(u, work[k])
                if a % m:
                    work[k] = work[k] - (a // m) * v
                    changed = True
                    break
                b = omega(v, work[k])
                if b % m:
                    work[k] = work[k] + (b // m) * u
                    changed = True
                    break
            if changed:
                continue

            # Everything pairs with u and v in multiples of m, look for a
            # third pair that does not.
            for k in range(len(work)):
                for l in range(len(work)):
                    if k in (i, j) or l in (i, j) or k == l:
                        continue
                    if omega(work[k], work[l]) % m:
                        work[i] = u + work[k]
                        changed = True
                        break
                if changed:
                    break
            if changed:
                continue
            raise RankError(f"Pairing is divisible by {abs(m)} on the whole family, not unimodular")

        x = u
        y = m * v
        rest = []
        for k, w in enumerate(work):
            if k in (i, j):
                continue
            rest.append(w - omega(w, y) * x + omega(w, x) * y)
        pairs.append((x, y))
        work = rest

    return pairs, work


def symplectic_basis_from_unimodular(
    vectors: Sequence[HomologyClass],
) -> Tuple[List[HomologyClass], SymplecticMap]:
    if len(vectors) == 0:
        raise DimensionError("Need at least one vector")
    g = vectors[0].g
    if len(vectors) != 2 * g:
        raise DimensionError(f"Need exactly {2 * g} vectors for genus {g}, got {len(vectors)}")
    for v in vectors:
        if v.g != g:
            raise DimensionError("Vectors of mixed length")

    det = DomainMatrix([[ZZ(c) for c in v.coords] for v in vectors], (2 * g, 2 * g), ZZ).det()
    if abs(int(det)) != 1:
        raise RankError(f"Input vectors have determinant {det}, expected +-1")

    gram = np.array(
        [[intersection_pairing(u, v) for v in vectors] for u in vectors], dtype=np.int64
    )
    pairs, radical = symplectic_reduction(np.eye(2 * g, dtype=np.int64), gram)
    if len(pairs) != g or any(np.any(r) for r in radical):
        raise RankError("Input vectors do not carry a unimodular symplectic pairing")

    ambient = np.array([v.coords for v in vectors], dtype=np.int64).T
    basis: List[HomologyClass] = []
    for x, y in pairs:
        basis.append(HomologyClass(ambient @ x))
        basis.append(HomologyClass(ambient @ y))
    change = SymplecticMap.from_columns(basis)
    logger.debug("Symplectic basis change %s", change)
    return basis, change


def quad_form_from_values(classes: Sequence[HomologyClass], values: Sequence[int]) -> QuadForm2:
    """
    The quadratic form taking the given values on a family of classes that
    spans H1(Sigma_g; F2). Each reference basis vector is written as a sum of
    family members and evaluated by polarization.
    """
    if len(classes) == 0 or len(classes) != len(values):
        raise DimensionError("Need one value per class and at least one class")
    g = classes[0].g
    family = [c.bits() for c in classes]

    # Echelon rows as (pivot, vector bits, which family members sum to it).
    rows: List[Tuple[int, int, int]] = []
    for index, vec in enumerate(family):
        combo = 1 << index
        for pivot, row_vec, row_combo in rows:
            if vec >> pivot & 1:
                vec ^= row_vec
                combo ^= row_combo
        if vec:
            pivot = vec.bit_length() - 1
            rows = [
                (p, rv ^ vec, rc ^ combo) if rv >> pivot & 1 else (p, rv, rc)
                for p, rv, rc in rows
            ]
            rows.append((pivot, vec, combo))
    if len(rows) != 2 * g:
        raise RankError(f"Classes span a rank {len(rows)} subspace mod 2, expected {2 * g}")

    out = []
    for k in range(2 * g):
        target, combo = 1 << k, 0
        for pivot, row_vec, row_combo in rows:
            if target >> pivot & 1:
                target ^= row_vec
                combo ^= row_combo
        members = [i for i in range(len(family)) if combo >> i & 1]
        value = sum(values[i] for i in members)
        for a, i in enumerate(members):
            for j in members[a + 1 :]:
                value += pairing_bits(family[i], family[j], g)
        out.append(value % 2)
    return QuadForm2(out)


def express_in_basis(vectors: Sequence[HomologyClass], h: HomologyClass) -> List[int]:
    """Integer coefficients a with sum(a_i * vectors[i]) == h."""
    size = len(h.coords)
    if len(vectors) != size or any(len(v.coords) != size for v in vectors):
        raise DimensionError(f"Need {size} vectors of length {size} to express {h}")
    columns = DomainMatrix(
        [[QQ(v.coords[row]) for v in vectors] for row in range(size)], (size, size), QQ
    )
    if columns.det() == 0:
        raise RankError("Vectors are linearly dependent")
    target = DomainMatrix([[QQ(c)] for c in h.coords], (size, 1), QQ)
    solution = (columns.inv() * target).to_Matrix()
    out = []
    for i in range(size):
        value = solution[i, 0]
        if value.q != 1:
            raise RankError(f"{h} is not an integral combination of the given vectors")
        out.append(int(value.p))
    return out


def iter_classes_mod(g: int, modulus: int) -> Iterator[HomologyClass]:
    """Every class with coordinates in [0, modulus)."""
    total = modulus ** (2 * g)
    for index in range(total):
        coords = []
        for _ in range(2 * g):
            coords.append(index % modulus)
            index //= modulus
        yield HomologyClass(coords)
