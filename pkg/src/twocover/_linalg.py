"""Small GF(2) helpers on int bitmasks plus an integer Smith normal form."""

from __future__ import annotations

from typing import Iterable, Sequence


def gf2_reduce(vec: int, basis: dict[int, int]) -> int:
    """Canonical representative of vec modulo the span of a reduced basis."""
    for pivot, row in basis.items():
        if (vec >> pivot) & 1:
            vec ^= row
    return vec


def gf2_basis(vectors: Iterable[int]) -> dict[int, int]:
    """Reduced echelon basis of the span of bitmask vectors, keyed by pivot bit.

    Every basis vector owns its pivot bit exclusively, so gf2_reduce against
    the result is order-independent and canonical.
    """
    basis: dict[int, int] = {}
    for vec in vectors:
        vec = gf2_reduce(vec, basis)
        if vec == 0:
            continue
        pivot = (vec & -vec).bit_length() - 1
        for key, row in basis.items():
            if (row >> pivot) & 1:
                basis[key] = row ^ vec
        basis[pivot] = vec
    return basis


def gf2_rank(vectors: Iterable[int]) -> int:
    return len(gf2_basis(vectors))


def gf2_in_span(vec: int, basis: dict[int, int]) -> bool:
    return gf2_reduce(vec, basis) == 0


def gf2_span(basis: dict[int, int]) -> list[int]:
    """All elements of the span (2**rank of them), ascending."""
    span = [0]
    for row in basis.values():
        span.extend(v ^ row for v in span)
    return sorted(span)


def gf2_nullspace(rows: Iterable[int], n_cols: int) -> list[int]:
    """Basis of {t : parity(row & t) = 0 for every row}, one vector per free column."""
    basis = gf2_basis(rows)
    null = []
    for free in range(n_cols):
        if free in basis:
            continue
        t = 1 << free
        for pivot, row in basis.items():
            if (row >> free) & 1:
                t |= 1 << pivot
        null.append(t)
    return null


def smith_normal_form(rows: Sequence[Sequence[int]]) -> list[int]:
    """Diagonal of the Smith normal form: nonnegative, each dividing the next.

    Plain integer row/column reduction; intended for the small exponent
    matrices of presentations, not for bulk numerics.
    """
    a = [list(map(int, row)) for row in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    if any(len(row) != n for row in a):
        raise ValueError("ragged matrix")
    diag: list[int] = []
    t = 0
    while t < m and t < n:
        best = None
        pi = pj = -1
        for i in range(t, m):
            for j in range(t, n):
                v = abs(a[i][j])
                if v and (best is None or v < best):
                    best, pi, pj = v, i, j
        if best is None:
            break
        a[t], a[pi] = a[pi], a[t]
        for row in a:
            row[t], row[pj] = row[pj], row[t]
        while True:
            if a[t][t] < 0:
                a[t] = [-v for v in a[t]]
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // p
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        a[t], a[i] = a[i], a[t]
                        dirty = True
                        break
            if dirty:
                continue
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // p
                    for row in a:
                        row[j] -= q * row[t]
                    if a[t][j]:
                        for row in a:
                            row[t], row[j] = row[j], row[t]
                        dirty = True
                        break
            if dirty:
                continue
            culprit = None
            for i in range(t + 1, m):
                if any(a[i][j] % p for j in range(t + 1, n)):
                    culprit = i
                    break
            if culprit is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[culprit])]
        diag.append(a[t][t])
        t += 1
    while len(diag) < min(m, n):
        diag.append(0)
    return diag
