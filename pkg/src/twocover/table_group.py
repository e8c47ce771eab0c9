"""Concrete finite groups as multiplication tables, and tuple machinery.

Element ids are 0..N-1 with 0 the identity.  Presentation tuples (generating
tuples annihilating every relator) drive automorphism counting: two tuples
lie in the same presentation set exactly when an automorphism maps one to the
other, so |S_P| = |Aut(G)| whenever P presents G.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .words import Presentation, Word


class GroupBudgetError(RuntimeError):
    """An operation exceeded its order budget."""


class PresentationMismatchError(ValueError):
    """The presentation does not present the given group."""


class FiniteGroup:
    """A finite group given by its full N x N multiplication table."""

    __slots__ = ("order", "table", "inverse", "generators", "_orders", "_center")

    def __init__(self, table, generators: tuple[int, ...] | None = None):
        table = np.ascontiguousarray(np.asarray(table, dtype=np.int32))
        n = table.shape[0]
        if table.shape != (n, n):
            raise ValueError("multiplication table must be square")
        rng = np.arange(n, dtype=np.int32)
        if not (np.array_equal(table[0], rng) and np.array_equal(table[:, 0], rng)):
            raise ValueError("element 0 must be the identity")
        inverse = np.argmax(table == 0, axis=1).astype(np.int32)
        if not np.all(table[rng, inverse] == 0):
            raise ValueError("some element has no inverse")
        self.order = int(n)
        self.table = table
        self.inverse = inverse
        self.generators = generators
        self._orders: np.ndarray | None = None
        self._center: frozenset[int] | None = None

    def __repr__(self) -> str:
        return f"FiniteGroup(order={self.order})"

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def conjugate(self, g: int, h: int) -> int:
        return int(self.table[self.table[self.inverse[h], g], h])

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        result, base = 0, a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def element_orders(self) -> np.ndarray:
        if self._orders is None:
            orders = np.ones(self.order, dtype=np.int64)
            for e in range(1, self.order):
                x, k = e, 1
                while x != 0:
                    x = int(self.table[x, e])
                    k += 1
                orders[e] = k
            self._orders = orders
        return self._orders

    def order_profile(self) -> tuple[tuple[int, int], ...]:
        """Sorted (element order, multiplicity) pairs; an isomorphism invariant."""
        values, counts = np.unique(self.element_orders(), return_counts=True)
        return tuple((int(v), int(c)) for v, c in zip(values, counts))

    @property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def center(self) -> frozenset[int]:
        if self._center is None:
            central = np.nonzero((self.table == self.table.T).all(axis=1))[0]
            self._center = frozenset(int(z) for z in central)
        return self._center

    def central_involutions(self) -> frozenset[int]:
        return frozenset(
            z for z in self.center() if z != 0 and self.table[z, z] == 0
        )

    def conjugacy_classes(self) -> list[tuple[int, ...]]:
        rng = np.arange(self.order)
        seen = np.zeros(self.order, dtype=bool)
        classes = []
        for g in range(self.order):
            if seen[g]:
                continue
            cls = np.unique(self.table[self.table[self.inverse, g], rng])
            seen[cls] = True
            classes.append(tuple(int(x) for x in cls))
        return classes

    def normal_subgroups(self) -> list[frozenset[int]]:
        """All normal subgroups: join-closure of the normal closures of elements.

        Every normal subgroup is generated by the conjugacy classes it
        contains, hence is a join of single-class closures.
        """
        if self.order > 512:
            raise GroupBudgetError("normal subgroup lattice limited to order <= 512")
        closures = set()
        for cls in self.conjugacy_classes():
            closures.add(subgroup_generated(self, cls))
        subs = set(closures)
        subs.add(frozenset({0}))
        frontier = set(subs)
        while frontier:
            new: set[frozenset[int]] = set()
            for a in frontier:
                for b in closures:
                    if b <= a:
                        continue
                    joined = subgroup_generated(self, tuple(a | b))
                    if joined not in subs:
                        new.add(joined)
            if len(subs) + len(new) > 4096:
                raise GroupBudgetError("normal subgroup lattice too large")
            subs |= new
            frontier = new
        return sorted(subs, key=lambda s: (len(s), sorted(s)))

    def subgroup(self, elements: Iterable[int]) -> "FiniteGroup":
        """The induced group on a subgroup's elements, reindexed from 0."""
        elems = sorted(set(int(e) for e in elements))
        if not elems or elems[0] != 0:
            raise ValueError("subgroup must contain the identity 0")
        index = {e: i for i, e in enumerate(elems)}
        k = len(elems)
        sub = np.empty((k, k), dtype=np.int32)
        for i, a in enumerate(elems):
            row = self.table[a, elems]
            try:
                sub[i] = [index[int(v)] for v in row]
            except KeyError:
                raise ValueError("element set is not closed under multiplication")
        return FiniteGroup(sub)

    def validate(self, seed: int = 0) -> None:
        """Check the group laws: exhaustively up to order 256, sampled above."""
        n = self.order
        rng = np.arange(n, dtype=np.int32)
        if not np.all(np.sort(self.table, axis=1) == rng):
            raise ValueError("rows are not permutations")
        if not np.all(np.sort(self.table, axis=0) == rng[:, None]):
            raise ValueError("columns are not permutations")
        t = self.table
        if n <= 256:
            for a in range(n):
                if not np.array_equal(t[t[a], :], t[a, t]):
                    raise ValueError(f"associativity fails at a={a}")
            return
        gen = np.random.default_rng(seed)
        remaining = 10 * n * n
        while remaining > 0:
            chunk = min(remaining, 1 << 20)
            a = gen.integers(0, n, chunk)
            b = gen.integers(0, n, chunk)
            c = gen.integers(0, n, chunk)
            if not np.array_equal(t[t[a, b], c], t[a, t[b, c]]):
                raise ValueError("associativity fails on a random sample")
            remaining -= chunk

    def to_json(self) -> dict:
        return {"order": self.order, "table": self.table.tolist()}

    @staticmethod
    def from_json(data: dict) -> "FiniteGroup":
        return FiniteGroup(np.asarray(data["table"], dtype=np.int32))


def subgroup_generated(group: FiniteGroup, seeds: Iterable[int]) -> frozenset[int]:
    """Closure of the seed set: the subgroup it generates (BFS, deterministic)."""
    seed_list = sorted(set(int(s) for s in seeds))
    visited = np.zeros(group.order, dtype=bool)
    visited[0] = True
    frontier = np.array([0], dtype=np.int32)
    if not seed_list:
        return frozenset({0})
    seed_arr = np.array(seed_list, dtype=np.int32)
    while frontier.size:
        products = group.table[np.ix_(frontier, seed_arr)].ravel()
        products = np.unique(products)
        new = products[~visited[products]]
        visited[new] = True
        frontier = new
    return frozenset(int(e) for e in np.nonzero(visited)[0])


def generates(group: FiniteGroup, seeds: Sequence[int]) -> bool:
    return len(subgroup_generated(group, seeds)) == group.order


def eval_word(group: FiniteGroup, word: Word, images: Sequence[int]) -> int:
    """Evaluate a word at the given generator images."""
    table, inverse = group.table, group.inverse
    e = 0
    for g, s in word.letters:
        c = images[g] if s > 0 else inverse[images[g]]
        e = table[e, c]
    return int(e)


def _eval_word_lastvec(group: FiniteGroup, word: Word, images: Sequence[int], last: int):
    """Vector of word values with generator `last` ranging over all elements."""
    table, inverse = group.table, group.inverse
    n = group.order
    values = np.zeros(n, dtype=np.int32)
    rng = np.arange(n, dtype=np.int32)
    for g, s in word.letters:
        if g == last:
            col = rng if s > 0 else inverse
            values = table[values, col]
        else:
            c = int(images[g]) if s > 0 else int(inverse[images[g]])
            values = table[values, c]
    return values


def presentation_tuples(
    pres: Presentation,
    group: FiniteGroup,
    *,
    first_only: bool = False,
) -> list[tuple[int, ...]]:
    """All generating n-tuples at which every relator evaluates to the identity.

    Results are in lexicographic order.  The scan fixes the first n-1
    coordinates with early relator rejection and vectorizes the last one.
    """
    n = pres.rank
    N = group.order
    stages: list[list[Word]] = [[] for _ in range(n)]
    for rel in pres.relators:
        top = max(rel.support) if rel.support else 0
        stages[top].append(rel)
    results: list[tuple[int, ...]] = []
    images = [0] * n

    def descend(k: int) -> bool:
        if k == n - 1:
            mask = np.ones(N, dtype=bool)
            for rel in stages[k]:
                mask &= _eval_word_lastvec(group, rel, images, k) == 0
                if not mask.any():
                    return False
            for last in np.nonzero(mask)[0]:
                candidate = tuple(int(v) for v in images[:k]) + (int(last),)
                if generates(group, candidate):
                    results.append(candidate)
                    if first_only:
                        return True
            return False
        for v in range(N):
            images[k] = v
            if all(eval_word(group, rel, images) == 0 for rel in stages[k]):
                if descend(k + 1):
                    return True
        return False

    descend(0)
    return results


def has_presentation_tuple(pres: Presentation, group: FiniteGroup) -> bool:
    return bool(presentation_tuples(pres, group, first_only=True))


def automorphism_count(pres: Presentation, group: FiniteGroup) -> int:
    """|Aut(G)|, counted as the number of presentation tuples."""
    tuples = presentation_tuples(pres, group)
    if not tuples:
        raise PresentationMismatchError("the presentation does not present this group")
    return len(tuples)


def bfs_factorization(group: FiniteGroup, gens: Sequence[int]):
    """Spanning tree of the Cayley graph on `gens` and their inverses.

    Returns (order, parent, letter) arrays: element `e` was reached from
    parent[e] by gens[letter[e] // 2] (inverse when letter[e] is odd).
    """
    n = group.order
    parent = np.full(n, -1, dtype=np.int64)
    letter = np.full(n, -1, dtype=np.int64)
    parent[0] = 0
    queue = [0]
    cols = []
    for g in gens:
        cols.append(int(g))
        cols.append(group.inv(g))
    qi = 0
    while qi < len(queue):
        e = queue[qi]
        qi += 1
        for ci, c in enumerate(cols):
            f = int(group.table[e, c])
            if parent[f] < 0 and f != 0:
                parent[f] = e
                letter[f] = ci
                queue.append(f)
    return queue, parent, letter


def word_in_generators(group: FiniteGroup, gens: Sequence[int], target: int) -> list[tuple[int, int]]:
    """Letters (generator index, sign) expressing target in the given generators."""
    _, parent, letter = bfs_factorization(group, gens)
    if target != 0 and parent[target] < 0:
        raise ValueError("target not in the span of the generators")
    letters: list[tuple[int, int]] = []
    e = target
    while e != 0:
        ci = int(letter[e])
        letters.append((ci // 2, 1 if ci % 2 == 0 else -1))
        e = int(parent[e])
    letters.reverse()
    return letters


def evaluate_letters(group: FiniteGroup, letters: Sequence[tuple[int, int]], images: Sequence[int]) -> int:
    e = 0
    for j, s in letters:
        c = images[j] if s > 0 else group.inv(images[j])
        e = int(group.table[e, c])
    return e


def automorphism_from_tuples(
    group: FiniteGroup, base: Sequence[int], image: Sequence[int]
) -> np.ndarray:
    """The unique automorphism mapping base_i to image_i, as a permutation.

    Built by BFS factorization over the base tuple and re-evaluation at the
    image tuple; the multiplicative law is then verified on all pairs.
    """
    n = group.order
    phi = np.full(n, -1, dtype=np.int32)
    phi[0] = 0
    cols = []
    img_cols = []
    for b, im in zip(base, image):
        cols.extend([int(b), group.inv(b)])
        img_cols.extend([int(im), group.inv(im)])
    queue = [0]
    qi = 0
    while qi < len(queue):
        e = queue[qi]
        qi += 1
        for c, ic in zip(cols, img_cols):
            f = int(group.table[e, c])
            if phi[f] < 0:
                phi[f] = group.table[phi[e], ic]
                queue.append(f)
    if np.any(phi < 0):
        raise ValueError("base tuple does not generate the group")
    # full multiplicative check, chunked to bound memory
    step = max(1, (1 << 22) // max(n, 1))
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        lhs = phi[group.table[lo:hi, :]]
        rhs = group.table[np.ix_(phi[lo:hi], phi)]
        if not np.array_equal(lhs, rhs):
            raise ValueError("tuples do not induce an automorphism")
    return phi


def is_characteristic_order2(
    group: FiniteGroup,
    z: int,
    pres: Presentation,
    tuples: list[tuple[int, ...]] | None = None,
) -> bool:
    """Whether every automorphism fixes the central involution z.

    A lone central involution is fixed automatically; otherwise automorphisms
    are enumerated through the presentation tuples of `pres` and the image of
    z is tracked through a fixed factorization.
    """
    involutions = group.central_involutions()
    if z not in involutions:
        raise ValueError("z must be a central involution")
    if len(involutions) == 1:
        return True
    if tuples is None:
        tuples = presentation_tuples(pres, group)
    if not tuples:
        raise PresentationMismatchError("the presentation does not present this group")
    base = tuples[0]
    z_letters = word_in_generators(group, base, z)
    return all(evaluate_letters(group, z_letters, t) == z for t in tuples)


def isomorphic_via_presentation(pres_of_h: Presentation, group: FiniteGroup, order_h: int) -> bool:
    """Equal-order isomorphism test: any epimorphism between equal finite orders
    is an isomorphism, so one presentation tuple suffices."""
    if order_h != group.order:
        return False
    return has_presentation_tuple(pres_of_h, group)
