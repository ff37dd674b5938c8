import itertools
import logging
from collections import deque
from functools import lru_cache
from math import comb, prod
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import Matrix
from sympy.core.intfunc import igcdex
from sympy.matrices.normalforms import hermite_normal_form, invariant_factors

from .symplectic import (
    DimensionError,
    HomologyClass,
    QuadForm2,
    SymplecticMap,
    arf,
    intersection_pairing,
    quad_value,
)


logger = logging.getLogger(__name__)


# Largest genus span_equals_kernel will build lattices for.
MAX_SPAN_GENUS: int = 6

Triple = Tuple[int, int, int]


class ContractionModulusError(Exception):
    pass


class ConfigurationError(Exception):
    pass


class ObstructionError(Exception):
    pass


def _canonical(i: int, j: int, k: int) -> Tuple[int, Optional[Triple]]:
    if i == j or j == k or i == k:
        return 0, None
    sign = 1
    a = [i, j, k]
    for _ in range(2):
        for p in range(2):
            if a[p] > a[p + 1]:
                a[p], a[p + 1] = a[p + 1], a[p]
                sign = -sign
    return sign, (a[0], a[1], a[2])


@lru_cache(maxsize=None)
def _triples(g: int) -> Tuple[Triple, ...]:
    return tuple(itertools.combinations(range(2 * g), 3))  # type: ignore


@lru_cache(maxsize=None)
def _triple_index(g: int) -> Dict[Triple, int]:
    return {t: i for i, t in enumerate(_triples(g))}


def _x(i: int) -> int:
    return 2 * i


def _y(i: int) -> int:
    return 2 * i + 1


class Wedge3:
    """
    An element of the third exterior power of H in the basis of wedges of
    x1, y1, ..., xg, yg, indexed 0..2g-1. Only nonzero coefficients on
    increasing triples are stored.
    """

    def __init__(self, g: int, terms: Optional[Dict[Triple, int]] = None) -> None:
        self.g = g
        self.terms: Dict[Triple, int] = {}
        for (i, j, k), coef in (terms or {}).items():
            self.__accumulate(i, j, k, coef)

    def __accumulate(self, i: int, j: int, k: int, coef: int) -> None:
        sign, key = _canonical(i, j, k)
        if key is None or coef == 0:
            return
        for index in key:
            if not 0 <= index < 2 * self.g:
                raise DimensionError(f"Index {index} outside 0..{2 * self.g - 1}")
        value = self.terms.get(key, 0) + sign * coef
        if value == 0:
            self.terms.pop(key, None)
        else:
            self.terms[key] = value

    @staticmethod
    def basis(g: int, i: int, j: int, k: int) -> "Wedge3":
        return Wedge3(g, {(i, j, k): 1})

    @staticmethod
    def zero(g: int) -> "Wedge3":
        return Wedge3(g)

    @staticmethod
    def from_vector(g: int, vec: Sequence[int]) -> "Wedge3":
        return Wedge3(g, {t: int(c) for t, c in zip(_triples(g), vec) if int(c) != 0})

    def to_vector(self) -> np.ndarray:
        out = np.zeros(comb(2 * self.g, 3), dtype=np.int64)
        index = _triple_index(self.g)
        for t, c in self.terms.items():
            out[index[t]] = c
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def __check(self, other: "Wedge3") -> None:
        if self.g != other.g:
            raise DimensionError(f"Genus mismatch: {self.g} vs {other.g}")

    def __add__(self, other: "Wedge3") -> "Wedge3":
        self.__check(other)
        out = Wedge3(self.g, self.terms)
        for (i, j, k), c in other.terms.items():
            out.__accumulate(i, j, k, c)
        return out

    def __sub__(self, other: "Wedge3") -> "Wedge3":
        return self + (-other)

    def __neg__(self) -> "Wedge3":
        return Wedge3(self.g, {t: -c for t, c in self.terms.items()})

    def __mul__(self, scale: int) -> "Wedge3":
        return Wedge3(self.g, {t: scale * c for t, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Wedge3):
            return NotImplemented
        return self.g == other.g and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.g, tuple(sorted(self.terms.items()))))

    def __repr__(self) -> str:
        if not self.terms:
            return "Wedge3(0)"
        names = [f"{'xy'[n % 2]}{n // 2 + 1}" for n in range(2 * self.g)]
        return "Wedge3({})".format(
            " + ".join(
                "{}*{}^{}^{}".format(c, names[i], names[j], names[k])
                for (i, j, k), c in sorted(self.terms.items())
            )
        )


def wedge(u: HomologyClass, v: HomologyClass, w: HomologyClass) -> Wedge3:
    g = u.g
    if v.g != g or w.g != g:
        raise DimensionError("Classes of mixed genus")
    out = Wedge3(g)
    for i, a in enumerate(u.coords):
        if a == 0:
            continue
        for j, b in enumerate(v.coords):
            if b == 0:
                continue
            for k, c in enumerate(w.coords):
                if c == 0:
                    continue
                out = out + Wedge3(g, {(i, j, k): a * b * c})
    return out


def wedge_embed(h: HomologyClass) -> Wedge3:
    """h wedge (x1^y1 + ... + xg^yg)."""
    g = h.g
    out = Wedge3(g)
    for m, coef in enumerate(h.coords):
        if coef == 0:
            continue
        for i in range(g):
            out = out + Wedge3(g, {(m, _x(i), _y(i)): coef})
    return out


def apply_symplectic(m: SymplecticMap, t: Wedge3) -> Wedge3:
    g = t.g
    images = [m(HomologyClass.basis(g, i)) for i in range(2 * g)]
    out = Wedge3(g)
    for (i, j, k), c in t.terms.items():
        out = out + wedge(images[i], images[j], images[k]) * c
    return out


def _check_contraction_modulus(g: int, s: int) -> None:
    if s < 1 or (g - 1) % s != 0:
        raise ContractionModulusError(f"s={s} does not divide g-1={g - 1}")


def _basis_pairing(g: int, a: int, b: int) -> int:
    return intersection_pairing(HomologyClass.basis(g, a), HomologyClass.basis(g, b))


def contract_integral(t: Wedge3) -> HomologyClass:
    """C(a^b^c) = <a,b>c + <b,c>a + <c,a>b, extended linearly."""
    g = t.g
    coords = [0] * (2 * g)
    for (i, j, k), c in t.terms.items():
        coords[k] += c * _basis_pairing(g, i, j)
        coords[i] += c * _basis_pairing(g, j, k)
        coords[j] += c * _basis_pairing(g, k, i)
    return HomologyClass(coords)


def contract(t: Wedge3, s: int) -> HomologyClass:
    _check_contraction_modulus(t.g, s)
    return contract_integral(t).mod(s)


class QuotientLattice:
    """
    Reduction of wedge vectors modulo the image of wedge_embed. The image is
    put in Hermite normal form once; reducing against its pivots gives a
    canonical representative of each class.
    """

    def __init__(self, g: int) -> None:
        self.g = g
        columns = [wedge_embed(HomologyClass.basis(g, m)).to_vector() for m in range(2 * g)]
        hnf = hermite_normal_form(Matrix(np.array(columns).T.tolist()))
        self.basis = np.array(hnf.tolist(), dtype=np.int64)
        pivots = []
        for col in range(self.basis.shape[1]):
            nonzero = np.nonzero(self.basis[:, col])[0]
            pivots.append(int(nonzero[-1]))
        if len(set(pivots)) != len(pivots):
            raise ValueError("Hermite normal form is not in column echelon shape")
        self.pivots: List[Tuple[int, int]] = sorted(
            ((row, col) for col, row in enumerate(pivots)), reverse=True
        )
        logger.debug("Quotient lattice for genus %d has rank %d image", g, len(pivots))

    def reduce(self, vec: np.ndarray) -> np.ndarray:
        out = np.array(vec, dtype=np.int64)
        for row, col in self.pivots:
            d = self.basis[row, col]
            out = out - (out[row] // d) * self.basis[:, col]
        return out


@lru_cache(maxsize=None)
def quotient_lattice(g: int) -> QuotientLattice:
    return QuotientLattice(g)


class Wedge3ModH:
    def __init__(self, rep: Wedge3) -> None:
        self.g = rep.g
        self.rep = Wedge3.from_vector(rep.g, quotient_lattice(rep.g).reduce(rep.to_vector()))

    def is_zero(self) -> bool:
        return self.rep.is_zero()

    def __add__(self, other: "Wedge3ModH") -> "Wedge3ModH":
        return Wedge3ModH(self.rep + other.rep)

    def __neg__(self) -> "Wedge3ModH":
        return Wedge3ModH(-self.rep)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Wedge3ModH):
            return NotImplemented
        return self.g == other.g and self.rep == other.rep

    def __hash__(self) -> int:
        return hash(self.rep)

    def __repr__(self) -> str:
        return "Wedge3ModH({})".format(self.rep)


def _check_partial_basis(vectors: Sequence[HomologyClass]) -> None:
    for i, u in enumerate(vectors):
        for j, v in enumerate(vectors):
            expected = 0
            if i % 2 == 0 and j == i + 1:
                expected = 1
            elif j % 2 == 0 and i == j + 1:
                expected = -1
            if intersection_pairing(u, v) != expected:
                raise ConfigurationError(
                    f"Vectors {i} and {j} pair to {intersection_pairing(u, v)}, expected {expected}"
                )


def tau_bounding_pair(
    subsurface_basis: Sequence[Tuple[HomologyClass, HomologyClass]], c: HomologyClass
) -> Wedge3ModH:
    """
    Image of a bounding pair map under tau: the subsurface symplectic form
    wedged with the class of the curves.
    """
    flat = [v for pair in subsurface_basis for v in pair]
    _check_partial_basis(flat)
    for v in flat:
        if intersection_pairing(v, c) != 0:
            raise ConfigurationError(f"{c} is not orthogonal to subsurface class {v}")
    out = Wedge3(c.g)
    for alpha, beta in subsurface_basis:
        out = out + wedge(alpha, beta, c)
    return Wedge3ModH(out)


def kernel_generators(g: int, s: int) -> List[Wedge3ModH]:
    return [Wedge3ModH(t) for _, t in _kernel_generators(g, s)]


def _kernel_generators(g: int, s: int) -> List[Tuple[str, Wedge3]]:
    _check_contraction_modulus(g, s)
    out: List[Tuple[str, Wedge3]] = []
    indices = range(2 * g)
    for i in range(g):
        for z in indices:
            if z in (_x(i), _y(i)):
                continue
            out.append(("G1", Wedge3.basis(g, z, _x(i), _y(i)) * s))
    for i, j in itertools.combinations(range(g), 2):
        for z in indices:
            if z in (_x(i), _y(i), _x(j), _y(j)):
                continue
            out.append(
                ("G2", Wedge3.basis(g, z, _x(i), _y(i)) - Wedge3.basis(g, z, _x(j), _y(j)))
            )
    for triple in itertools.combinations(range(g), 3):
        for choice in itertools.product((0, 1), repeat=3):
            a, b, c = (2 * i + side for i, side in zip(triple, choice))
            out.append(("G3", Wedge3.basis(g, a, b, c)))
    return out


def kernel_span_report(g: int, s: int) -> Dict[str, int]:
    """
    Compare the lattice spanned by the generators and the image of H with
    the preimage of ker(C_s), both as full rank sublattices of the wedge
    lattice, by their indices.
    """
    _check_contraction_modulus(g, s)
    if g > MAX_SPAN_GENUS:
        raise ContractionModulusError(f"Genus {g} exceeds the span check bound {MAX_SPAN_GENUS}")
    dim = comb(2 * g, 3)
    generators = _kernel_generators(g, s)
    outside = [t for _, t in generators if not contract(t, s).is_zero]
    columns = [t.to_vector() for _, t in generators]
    columns += [wedge_embed(HomologyClass.basis(g, m)).to_vector() for m in range(2 * g)]

    generated = hermite_normal_form(Matrix(np.array(columns).T.tolist()), D=s**dim)
    generated_index = prod(int(generated[i, i]) for i in range(dim))

    contraction = Matrix(
        [
            [contract_integral(Wedge3.basis(g, *t)).coords[row] for t in _triples(g)]
            for row in range(2 * g)
        ]
    )
    factors = [int(f) for f in invariant_factors(contraction)]
    # A zero factor leaves its summand out of the image mod s.
    kernel_index = prod(s // int(np.gcd(f, s)) for f in factors)

    logger.debug(
        "g=%d s=%d: %d generators, index %d vs kernel index %d",
        g,
        s,
        len(generators),
        generated_index,
        kernel_index,
    )
    return {
        "genus": g,
        "s": s,
        "generators": len(generators),
        "outside_kernel": len(outside),
        "generated_index": generated_index,
        "kernel_index": int(kernel_index),
        "equal": int(not outside and generated_index == kernel_index),
    }


def span_equals_kernel(g: int, s: int) -> bool:
    return bool(kernel_span_report(g, s)["equal"])


# Symplectic bases with prescribed quadratic form values.


def q_vector(q: QuadForm2, basis: Sequence[HomologyClass]) -> Tuple[int, ...]:
    return tuple(quad_value(q, v) for v in basis)


def _arf_of_vector(values: Sequence[int]) -> int:
    return sum(values[2 * i] * values[2 * i + 1] for i in range(len(values) // 2)) % 2


def _project_out(
    w: HomologyClass, pairs: Sequence[Tuple[HomologyClass, HomologyClass]]
) -> HomologyClass:
    for a, b in pairs:
        w = w + b * intersection_pairing(w, a) - a * intersection_pairing(w, b)
    return w


def partner(
    v: HomologyClass, pairs: Sequence[Tuple[HomologyClass, HomologyClass]] = ()
) -> HomologyClass:
    """Some w orthogonal to the pairs with <v, w> = 1."""
    g = v.g
    candidates = [_project_out(HomologyClass.basis(g, i), pairs) for i in range(2 * g)]
    values = [intersection_pairing(v, c) for c in candidates]
    coefs = [0] * len(values)
    current = 0
    for i, value in enumerate(values):
        if value == 0:
            continue
        x, y, d = igcdex(current, value)
        coefs = [c * int(x) for c in coefs]
        coefs[i] += int(y)
        current = int(d)
    if current != 1:
        raise ConfigurationError(f"{v} is not primitive in the orthogonal complement")
    w = HomologyClass.zero(g)
    for c, cand in zip(coefs, candidates):
        w = w + cand * c
    return w


def _primitive(h: HomologyClass) -> HomologyClass:
    content = int(np.gcd.reduce(np.abs(np.array(h.coords, dtype=np.int64))))
    return HomologyClass(c // content for c in h.coords)


def _complete(
    pairs: List[Tuple[HomologyClass, HomologyClass]], g: int
) -> List[Tuple[HomologyClass, HomologyClass]]:
    out = list(pairs)
    while len(out) < g:
        for i in range(2 * g):
            v = _project_out(HomologyClass.basis(g, i), out)
            if not v.is_zero:
                # The orthogonal complement is saturated, so v stays inside it.
                v = _primitive(v)
                out.append((v, partner(v, out)))
                break
        else:
            raise ConfigurationError("Partial basis does not extend over the integers")
    return out


class _Pair:
    def __init__(self, a: HomologyClass, b: HomologyClass, locked: bool = False) -> None:
        self.a = a
        self.b = b
        self.locked = locked

    def values(self, q: QuadForm2) -> Tuple[int, int]:
        return quad_value(q, self.a), quad_value(q, self.b)


def _within_pair(pair: _Pair, q: QuadForm2, ta: int, tb: int) -> None:
    # Breadth first over a <- a + b and b <- b + a; a locked pair keeps a.
    seen = {pair.values(q)}
    frontier = deque([(pair.a, pair.b)])
    while frontier:
        a, b = frontier.popleft()
        if (quad_value(q, a), quad_value(q, b)) == (ta, tb):
            pair.a, pair.b = a, b
            return
        moves = [(a, b + a)] if pair.locked else [(a + b, b), (a, b + a)]
        for na, nb in moves:
            key = (quad_value(q, na), quad_value(q, nb))
            if key not in seen:
                seen.add(key)
                frontier.append((na, nb))
    raise ObstructionError(f"Cannot reach q-values ({ta}, {tb}) inside one symplectic pair")


def _make_first_odd(pair: _Pair, q: QuadForm2) -> None:
    qa, qb = pair.values(q)
    _within_pair(pair, q, 1, qa * qb)


def extend_symplectic_basis(
    partial: Sequence[HomologyClass], q: QuadForm2, target: Sequence[int]
) -> List[HomologyClass]:
    """
    Extend a partial symplectic basis to a full one whose q-values are the
    target vector. The complement is fixed pair by pair with transvections
    that leave the partial vectors in place; changing the Arf invariant of
    one pair borrows from the next, and the last pair is forced by the
    total Arf invariant.
    """
    g = q.g
    if len(target) != 2 * g:
        raise DimensionError(f"Target needs {2 * g} values, got {len(target)}")
    if len(partial) > 2 * g or any(v.g != g for v in partial):
        raise DimensionError(f"Partial basis does not fit genus {g}")
    target = [t % 2 for t in target]
    _check_partial_basis(partial)
    for i, v in enumerate(partial):
        if quad_value(q, v) != target[i]:
            raise ConfigurationError(
                f"Partial vector {i} has q-value {quad_value(q, v)}, target {target[i]}"
            )
    if _arf_of_vector(target) != arf(q):
        raise ObstructionError(
            f"Target q-vector has Arf {_arf_of_vector(target)} but the form has Arf {arf(q)}"
        )
    if len(partial) == 2 * g:
        return list(partial)

    k = len(partial)
    fixed = [(partial[2 * i], partial[2 * i + 1]) for i in range(k // 2)]
    pairs: List[_Pair] = []
    if k % 2 == 1:
        pairs.append(_Pair(partial[-1], partner(partial[-1], fixed), locked=True))
    rest = _complete(fixed + [(p.a, p.b) for p in pairs], g)[len(fixed) + len(pairs) :]
    pairs.extend(_Pair(a, b) for a, b in rest)

    for index, pair in enumerate(pairs):
        slot = 2 * (len(fixed) + index)
        ta, tb = target[slot], target[slot + 1]
        following = pairs[index + 1] if index + 1 < len(pairs) else None
        qa, qb = pair.values(q)

        if pair.locked and qb != tb and qa == 1:
            if following is None:
                raise ObstructionError("Last pair disagrees with the Arf invariant")
            _make_first_odd(following, q)
            pair.b = pair.b + following.a
            following.b = following.b + pair.a
        elif not pair.locked and qa * qb != ta * tb:
            if following is None:
                raise ObstructionError("Last pair disagrees with the Arf invariant")
            _within_pair(pair, q, qa * qb, 1)
            _make_first_odd(following, q)
            pair.a = pair.a + following.a
            following.b = following.b - pair.b
        _within_pair(pair, q, ta, tb)

    out = list(partial[: 2 * len(fixed)])
    for pair in pairs:
        out.extend([pair.a, pair.b])
    _check_partial_basis(out)
    logger.debug("Extended %d vectors to a basis with q-vector %s", k, q_vector(q, out))
    return out


def transporting_map(
    basis: Sequence[HomologyClass], other: Sequence[HomologyClass], q: QuadForm2
) -> SymplecticMap:
    """The symplectic map sending one basis to the other, which preserves q."""
    _check_partial_basis(basis)
    _check_partial_basis(other)
    if len(basis) != 2 * q.g or len(other) != 2 * q.g:
        raise DimensionError(f"Need two full bases for genus {q.g}")
    if q_vector(q, basis) != q_vector(q, other):
        raise ObstructionError(f"q-vectors differ: {q_vector(q, basis)} vs {q_vector(q, other)}")
    m = SymplecticMap.from_columns(other) @ SymplecticMap.from_columns(basis).inverse()
    for i in range(2 * q.g):
        e = HomologyClass.basis(q.g, i)
        if quad_value(q, m(e)) != quad_value(q, e):
            raise ObstructionError(f"Transported map moves q on basis vector {i}")
    return m


def brute_force_extension(
    partial: Sequence[HomologyClass], q: QuadForm2, target: Sequence[int], *, bound: int = 1
) -> Optional[List[HomologyClass]]:
    """Depth-first search over small coefficient vectors, genus <= 2 only."""
    g = q.g
    if g > 2:
        raise ConfigurationError(f"Brute force extension is limited to genus 2, got {g}")
    candidates = [
        HomologyClass(coords)
        for coords in itertools.product(range(-bound, bound + 1), repeat=2 * g)
        if any(coords)
    ]

    def search(current: List[HomologyClass]) -> Optional[List[HomologyClass]]:
        i = len(current)
        if i == 2 * g:
            return current
        for v in candidates:
            if quad_value(q, v) != target[i] % 2:
                continue
            ok = True
            for j, u in enumerate(current):
                expected = 1 if (j % 2 == 0 and i == j + 1) else 0
                if intersection_pairing(u, v) != expected:
                    ok = False
                    break
            if ok:
                found = search(current + [v])
                if found is not None:
                    return found
        return None

    return search(list(partial))
