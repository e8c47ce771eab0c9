"""Todd-Coxeter coset enumeration over the trivial subgroup.

Enumeration realizes a finite presentation as its regular representation;
the closed table then feeds the multiplication-table group constructor.
Both an HLT scanner (with a lookahead pass on overflow) and a Felsch-style
definer are available; outputs are standardized so both agree bit for bit.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .words import Presentation, Word, cyclically_reduce


class CosetLimitError(RuntimeError):
    """The coset budget ran out: the order is unknown at this budget."""


@dataclass(frozen=True)
class EnumLimits:
    max_cosets: int = 200_000
    strategy: str = "hlt"

    def __post_init__(self):
        if self.max_cosets < 1:
            raise ValueError("max_cosets must be positive")
        if self.strategy not in ("hlt", "felsch"):
            raise ValueError("strategy must be 'hlt' or 'felsch'")


def _word_to_cols(word: Word) -> tuple[int, ...]:
    # column 2g acts as generator g, column 2g+1 as its inverse
    return tuple(2 * g + (0 if s > 0 else 1) for g, s in word.letters)


class CosetTable:
    """A closed, standardized coset table.

    Rows are cosets (0 is the subgroup coset), columns alternate generator /
    inverse.  `tree[c]` holds the BFS edge (parent, column) that discovered
    coset c, with tree[0] = None.
    """

    def __init__(self, n_gens: int, rows: list[list[int]], tree: list[tuple[int, int] | None]):
        self.n_gens = n_gens
        self.rows = rows
        self.tree = tree

    @property
    def order(self) -> int:
        return len(self.rows)

    def column(self, col: int) -> list[int]:
        return [row[col] for row in self.rows]

    def permutation(self, gen: int) -> tuple[int, ...]:
        return tuple(self.column(2 * gen))

    def to_tsv(self, names: Sequence[str] | None = None) -> str:
        names = list(names) if names else [f"x{j + 1}" for j in range(self.n_gens)]
        header = ["coset"]
        for nm in names:
            header.extend([nm, f"{nm}^-1"])
        lines = ["\t".join(header)]
        for idx, row in enumerate(self.rows):
            lines.append("\t".join(str(v) for v in [idx, *row]))
        return "\n".join(lines) + "\n"


class _Enumerator:
    def __init__(self, pres: Presentation, limits: EnumLimits):
        self.n_gens = pres.rank
        self.ncols = 2 * pres.rank
        self.max_cosets = limits.max_cosets
        rels = []
        for rel in pres.relators:
            cols = _word_to_cols(cyclically_reduce(rel))
            if cols:
                rels.append(cols)
        self.relators = rels
        self.table: list[list[int | None]] = [[None] * self.ncols]
        self.p: list[int] = [0]
        self.live = 1
        self.deductions: list[tuple[int, int]] | None = None

    # -- union-find ---------------------------------------------------------

    def rep(self, c: int) -> int:
        p = self.p
        root = c
        while p[root] != root:
            root = p[root]
        while p[c] != root:
            p[c], c = root, p[c]
        return root

    def is_live(self, c: int) -> bool:
        return self.p[c] == c

    # -- table updates ------------------------------------------------------

    def define(self, a: int, col: int) -> int:
        if len(self.table) > 4 * self.max_cosets + 1000:
            raise CosetLimitError(f"defined more than {len(self.table)} cosets")
        b = len(self.table)
        self.table.append([None] * self.ncols)
        self.p.append(b)
        self.live += 1
        self.table[a][col] = b
        self.table[b][col ^ 1] = a
        if self.deductions is not None:
            self.deductions.append((a, col))
        return b

    def set_entry(self, a: int, col: int, b: int):
        self.table[a][col] = b
        self.table[b][col ^ 1] = a
        if self.deductions is not None:
            self.deductions.append((a, col))

    def _merge(self, a: int, b: int, queue: deque):
        a, b = self.rep(a), self.rep(b)
        if a == b:
            return
        if a > b:
            a, b = b, a
        self.p[b] = a
        self.live -= 1
        queue.append(b)

    def coincide(self, a: int, b: int):
        queue: deque[int] = deque()
        self._merge(a, b, queue)
        table = self.table
        while queue:
            dead = queue.popleft()
            row = table[dead]
            for col in range(self.ncols):
                dst = row[col]
                if dst is None:
                    continue
                table[dst][col ^ 1] = None
                mu = self.rep(dead)
                nu = self.rep(dst)
                existing = table[mu][col]
                if existing is not None:
                    self._merge(nu, existing, queue)
                else:
                    mirrored = table[nu][col ^ 1]
                    if mirrored is not None:
                        self._merge(mu, mirrored, queue)
                    else:
                        table[mu][col] = nu
                        table[nu][col ^ 1] = mu
                        if self.deductions is not None:
                            self.deductions.append((mu, col))

    # -- scanning -----------------------------------------------------------

    def scan(self, alpha: int, word: tuple[int, ...], fill: bool):
        table = self.table
        f = alpha
        i = 0
        b = alpha
        j = len(word) - 1
        while True:
            while i <= j:
                nxt = table[f][word[i]]
                if nxt is None:
                    break
                f = nxt
                i += 1
            if i > j:
                if f != b:
                    self.coincide(f, b)
                return
            while j >= i:
                nxt = table[b][word[j] ^ 1]
                if nxt is None:
                    break
                b = nxt
                j -= 1
            if j < i:
                if f != b:
                    self.coincide(f, b)
                return
            if j == i:
                self.set_entry(f, word[i], b)
                return
            if not fill:
                return
            self.define(f, word[i])

    # -- strategies ---------------------------------------------------------

    def run_hlt(self):
        table, p = self.table, self.p
        alpha = 0
        while alpha < len(table):
            if p[alpha] != alpha:
                alpha += 1
                continue
            if self.live > self.max_cosets:
                self.lookahead()
                if self.live > self.max_cosets:
                    raise CosetLimitError(
                        f"more than {self.max_cosets} live cosets; order unknown at this budget"
                    )
            for rel in self.relators:
                self.scan(alpha, rel, fill=True)
                if p[alpha] != alpha:
                    break
            if p[alpha] == alpha:
                row = table[alpha]
                for col in range(self.ncols):
                    if row[col] is None:
                        self.define(alpha, col)
            alpha += 1

    def lookahead(self):
        for a in range(len(self.table)):
            if self.p[a] != a:
                continue
            for rel in self.relators:
                self.scan(a, rel, fill=False)
                if self.p[a] != a:
                    break

    def run_felsch(self):
        self.deductions = []
        # rotations of every relator and its inverse, bucketed by leading column
        edp: list[list[tuple[int, ...]]] = [[] for _ in range(self.ncols)]
        seen: set[tuple[int, ...]] = set()
        for rel in self.relators:
            inv = tuple(c ^ 1 for c in reversed(rel))
            for base in (rel, inv):
                for k in range(len(base)):
                    rot = base[k:] + base[:k]
                    if rot not in seen:
                        seen.add(rot)
                        edp[rot[0]].append(rot)
        pointer = 0
        while True:
            while self.deductions:
                a, col = self.deductions.pop()
                a = self.rep(a)
                b = self.table[a][col]
                if b is None:
                    continue
                for rot in edp[col]:
                    self.scan(a, rot, fill=False)
                    if self.p[a] != a:
                        break
            target = None
            while pointer < len(self.table):
                if self.p[pointer] == pointer:
                    row = self.table[pointer]
                    col = next((c for c in range(self.ncols) if row[c] is None), None)
                    if col is not None:
                        target = (pointer, col)
                        break
                pointer += 1
            if target is None:
                # safety sweep: coincidences cannot reopen rows, but verify
                for a in range(len(self.table)):
                    if self.p[a] != a:
                        continue
                    row = self.table[a]
                    col = next((c for c in range(self.ncols) if row[c] is None), None)
                    if col is not None:
                        target = (a, col)
                        pointer = a
                        break
            if target is None:
                return
            if self.live >= self.max_cosets:
                raise CosetLimitError(
                    f"more than {self.max_cosets} live cosets; order unknown at this budget"
                )
            self.define(*target)

    # -- output -------------------------------------------------------------

    def standardized(self) -> CosetTable:
        start = self.rep(0)
        index = {start: 0}
        order = [start]
        tree: list[tuple[int, int] | None] = [None]
        qi = 0
        while qi < len(order):
            a = order[qi]
            qi += 1
            row = self.table[a]
            for col in range(self.ncols):
                entry = row[col]
                if entry is None:
                    raise RuntimeError("table not closed")
                d = self.rep(entry)
                if d not in index:
                    index[d] = len(order)
                    order.append(d)
                    tree.append((index[a], col))
        rows = [[index[self.rep(self.table[a][col])] for col in range(self.ncols)] for a in order]
        if len(rows) != self.live:
            raise RuntimeError("coset table not transitive")
        return CosetTable(self.n_gens, rows, tree)


def enumerate_cosets(pres: Presentation, limits: EnumLimits = EnumLimits()) -> CosetTable:
    """Run coset enumeration to closure and return the standardized table.

    Raises CosetLimitError when the budget is exhausted; that means "unknown
    at this budget", never "infinite".
    """
    enum = _Enumerator(pres, limits)
    if limits.strategy == "felsch":
        enum.run_felsch()
    else:
        enum.run_hlt()
    return enum.standardized()


def coset_count(pres: Presentation, limits: EnumLimits = EnumLimits()) -> int:
    """Order of the presented group (= number of live cosets), skipping output."""
    enum = _Enumerator(pres, limits)
    if limits.strategy == "felsch":
        enum.run_felsch()
    else:
        enum.run_hlt()
    return enum.live


def group_from_table(ct: CosetTable):
    """Regular-representation multiplication table from a closed coset table."""
    from .table_group import FiniteGroup

    n = ct.order
    mul = np.empty((n, n), dtype=np.int32)
    mul[:, 0] = np.arange(n, dtype=np.int32)
    cols = [np.asarray(ct.column(c), dtype=np.int32) for c in range(2 * ct.n_gens)]
    for b in range(1, n):
        parent, col = ct.tree[b]  # type: ignore[misc]
        mul[:, b] = cols[col][mul[:, parent]]
    gens = tuple(int(ct.rows[0][2 * j]) for j in range(ct.n_gens))
    return FiniteGroup(mul, generators=gens)


def enumerate_group(pres: Presentation, limits: EnumLimits = EnumLimits()):
    """Realize the presented group concretely, with distinguished generators."""
    return group_from_table(enumerate_cosets(pres, limits))
