"""Closed-form arithmetic and double-cover theory for metacyclic groups.

M(m, n, r, s) is the group < x, y | x^m = 1, y^n = x^r, x^y = x^s >.  With
s^n = 1 (mod m) and r*s = r (mod m) it has order exactly m*n and normal form
y^p x^q with 0 <= p < n, 0 <= q < m.  Everything here is modular arithmetic;
only the deficiency-zero gcd needs exact big integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Iterator

import numpy as np

from .table_group import FiniteGroup, subgroup_generated
from .words import Presentation, SignVector, Word, parse_presentation

NormalForm = tuple[int, int]  # (p, q): the element y^p x^q


class InvalidParamsError(ValueError):
    """The parameters fail the order-mn compatibility congruences."""


@dataclass(frozen=True)
class MetaParams:
    m: int
    n: int
    r: int
    s: int

    def __post_init__(self):
        if min(self.m, self.n, self.r, self.s) < 1:
            raise ValueError("parameters must be positive")
        if self.r > self.m or self.s > self.m:
            raise ValueError("r and s must not exceed m")

    @property
    def order(self) -> int:
        return self.m * self.n

    def residuals(self) -> tuple[int, int]:
        """(s^n - 1 mod m, r(s-1) mod m); both zero exactly when valid."""
        return (pow(self.s, self.n, self.m) - 1) % self.m, (self.r * (self.s - 1)) % self.m

    @property
    def is_valid(self) -> bool:
        return self.residuals() == (0, 0)

    def require_valid(self):
        if not self.is_valid:
            a, b = self.residuals()
            raise InvalidParamsError(
                f"M({self.m},{self.n},{self.r},{self.s}) has order below m*n: "
                f"s^n-1 = {a} (mod m), r(s-1) = {b} (mod m)"
            )


def valid_params(max_order: int) -> Iterator[MetaParams]:
    """All valid (m, n, r, s) with r, s <= m and m*n <= max_order."""
    for m in range(1, max_order + 1):
        for n in range(1, max_order // m + 1):
            for s in range(1, m + 1):
                if pow(s, n, m) != 1 % m:
                    continue
                for r in range(1, m + 1):
                    if (r * (s - 1)) % m == 0:
                        yield MetaParams(m, n, r, s)


def sigma(h: int, k: int, modulus: int) -> int:
    """(1 + h + ... + h^(k-1)) mod modulus, by modular accumulation."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    total = 0
    power = 1 % modulus
    h %= modulus
    for _ in range(k):
        total = (total + power) % modulus
        power = (power * h) % modulus
    return total


def presentation(params: MetaParams) -> Presentation:
    """The three-relator presentation < x, y | x^m, y^n x^-r, y^-1 x y x^-s >."""
    return parse_presentation(
        f"gens: x, y ; rels: x^{params.m}, y^{params.n}*x^-{params.r}, y^-1*x*y*x^-{params.s}"
    )


def normalize(p: int, q: int, params: MetaParams) -> NormalForm:
    """Reduce exponents into range, folding y^n = x^r carries into the x part."""
    m, n, r = params.m, params.n, params.r
    carry, p = divmod(p, n)
    return p, (q + r * carry) % m


def multiply(a: NormalForm, b: NormalForm, params: MetaParams) -> NormalForm:
    """(y^p1 x^q1)(y^p2 x^q2): commute x past y, then fold the y carry."""
    params.require_valid()
    p1, q1 = a
    p2, q2 = b
    m = params.m
    q = (q1 * pow(params.s, p2, m) + q2) % m
    return normalize(p1 + p2, q, params)


def inverse(a: NormalForm, params: MetaParams) -> NormalForm:
    p, q = a
    m, n = params.m, params.n
    if p == 0:
        return 0, (-q) % m
    # (y^p x^q)^-1 = x^-q y^-p = y^(n-p) x^(-q s^(n-p)) with the y^n carry undone
    pinv = n - p
    qinv = (-q * pow(params.s, pinv, m) - params.r) % m
    return pinv, qinv


def power(a: NormalForm, k: int, params: MetaParams) -> NormalForm:
    """k-th power via the geometric-sum exponent rule; matches iterated multiply."""
    params.require_valid()
    if k < 0:
        return power(inverse(a, params), -k, params)
    p, q = a
    m = params.m
    sp = pow(params.s, p, m)
    return normalize(p * k, (q * sigma(sp, k, m)) % m, params)


def nf_to_id(a: NormalForm, params: MetaParams) -> int:
    p, q = a
    return p * params.m + q


def id_to_nf(e: int, params: MetaParams) -> NormalForm:
    return divmod(e, params.m)


def nf_str(a: NormalForm) -> str:
    p, q = a
    parts = []
    if p:
        parts.append("y" if p == 1 else f"y^{p}")
    if q:
        parts.append("x" if q == 1 else f"x^{q}")
    return "*".join(parts) if parts else "1"


@lru_cache(maxsize=32)
def realize(params: MetaParams) -> FiniteGroup:
    """The order-mn multiplication table on ids p*m + q, built vectorized."""
    params.require_valid()
    m, n, r, s = params.m, params.n, params.r, params.s
    N = m * n
    ids = np.arange(N, dtype=np.int64)
    P, Q = np.divmod(ids, m)
    spow = np.array([pow(s, int(p), m) for p in range(n)], dtype=np.int64)
    p1, q1 = P[:, None], Q[:, None]
    p2, q2 = P[None, :], Q[None, :]
    psum = p1 + p2
    q = (q1 * spow[p2] + q2 + r * (psum // n)) % m
    table = ((psum % n) * m + q).astype(np.int32)
    gen_x = nf_to_id(normalize(0, 1, params), params)
    gen_y = nf_to_id(normalize(1, 0, params), params)
    return FiniteGroup(table, generators=(gen_x, gen_y))


def central_involutions_closed_form(params: MetaParams) -> frozenset[NormalForm]:
    """The central involutions, by parameter parity.

    With m odd and n odd there are none.  x^(m/2) is always one for m even.
    For n even a y^(n/2) x^q candidate needs 2q + r = 0 (mod m) and
    s^(n/2) = 1 (mod m); when m and r are both even the additional
    constraint (r/2)(s-1) = 0 (mod m) applies to the two q solutions.
    """
    params.require_valid()
    m, n, r, s = params.m, params.n, params.r, params.s
    out: set[NormalForm] = set()
    if m % 2 == 0:
        out.add((0, m // 2))
    if n % 2 == 0 and pow(s, n // 2, m) == 1 % m:
        if m % 2 == 1:
            q = (m - r) // 2 if r % 2 == 1 else (-(r // 2)) % m
            out.add((n // 2, q))
        elif r % 2 == 0:
            if ((r // 2) * (s - 1)) % m == 0:
                out.add((n // 2, ((m - r) // 2) % m))
                out.add((n // 2, (-(r // 2)) % m))
    return frozenset(out)


def presentation_pair_test(
    a: NormalForm, b: NormalForm, params: MetaParams, group: FiniteGroup | None = None
) -> bool:
    """Whether (a, b) is a presentation pair: generation plus six congruences.

    The congruences say the defining relators vanish at (a, b); generation is
    always tested independently through the realized group.
    """
    params.require_valid()
    m, n, r, s = params.m, params.n, params.r, params.s
    p, q = a
    u, v = b
    if (p * m) % n or (p * r) % n or (p * (s - 1)) % n:
        return False
    sp = pow(s, p, m)
    su = pow(s, u, m)
    if (q * sigma(sp, m, m)) % m:
        return False
    prn = p * r // n
    lhs = (r * u + v * sigma(su, n, m) - q * sigma(sp, r, m)) % m
    if lhs != (r * prn) % m:
        return False
    lhs = (v * (1 - sp) + q * (su - sigma(sp, s, m))) % m
    if lhs != (prn * (s - 1)) % m:
        return False
    grp = group if group is not None else realize(params)
    seeds = (nf_to_id(a, params), nf_to_id(b, params))
    return len(subgroup_generated(grp, seeds)) == grp.order


# ---------------------------------------------------------------------------
# Sign lifts of the three-relator presentation.  J = (e1, e2, e3) attaches the
# central involution to x^m, y^n x^-r, x^y x^-s in that order.


@dataclass(frozen=True)
class CoverVerdict:
    signs: SignVector
    kind: str  # "direct-product" | "metacyclic" | "metabelian" | "collapse"
    params: MetaParams | None
    order: int
    rule: str

    @property
    def is_double_cover(self) -> bool:
        return self.kind != "collapse"


def cover_verdict(signs: SignVector, params: MetaParams) -> CoverVerdict:
    """Decide whether the sign lift doubles the group, with its closed form.

    Sign on the x-power relator: double exactly when the shifted parameters
    (2m, n, r+m*e2, s+m*e3) are again compatible.  Sign only on the y-power
    relator: always doubles, to M(m, 2n, 2r, s).  Sign on the conjugation
    relator (without the x-power sign): doubles exactly when m, n, r are all
    even, to a metabelian group of order 2mn.
    """
    params.require_valid()
    if len(signs) != 3:
        raise ValueError("three sign coordinates expected")
    m, n, r, s = params.m, params.n, params.r, params.s
    e1, e2, e3 = signs
    N = params.order
    if e1 == 1:
        r2, s2 = r + m * e2, s + m * e3
        ok = pow(s2, n, 2 * m) == 1 % (2 * m) and (r2 * (s2 - 1)) % (2 * m) == 0
        if ok:
            lifted = MetaParams(2 * m, n, r2, s2)
            return CoverVerdict(signs, "metacyclic", lifted, 2 * N, "x-power-sign")
        return CoverVerdict(signs, "collapse", None, N, "x-power-sign")
    if e3 == 1:
        if m % 2 == 0 and n % 2 == 0 and r % 2 == 0:
            return CoverVerdict(signs, "metabelian", None, 2 * N, "conjugation-sign")
        return CoverVerdict(signs, "collapse", None, N, "conjugation-sign")
    if e2 == 1:
        r2 = ((2 * r - 1) % m) + 1
        lifted = MetaParams(m, 2 * n, r2, s)
        return CoverVerdict(signs, "metacyclic", lifted, 2 * N, "y-power-sign")
    return CoverVerdict(signs, "direct-product", None, 2 * N, "identity-signs")


def _parity_row(params: MetaParams) -> int:
    """Row index 1..12 of the parity table over (m, n, r, s)."""
    m_even, n_even = params.m % 2 == 0, params.n % 2 == 0
    r_even, s_even = params.r % 2 == 0, params.s % 2 == 0
    if not m_even:
        base = 1 if not n_even else 5
        return base + 2 * int(r_even) + int(s_even)
    if not n_even:
        return 9 + int(r_even)
    return 11 + int(r_even)


def s_ratio_is_odd(params: MetaParams) -> bool:
    """Parity of (s^n - 1)/m, computed modulo 2m."""
    return pow(params.s, params.n, 2 * params.m) == (params.m + 1) % (2 * params.m)


@dataclass(frozen=True)
class DeltaBound:
    delta: int
    row: int
    survivors: tuple[SignVector, ...]


def delta_bound(params: MetaParams) -> DeltaBound:
    """Upper bound on non-isomorphic double covers, with the surviving classes.

    Rows 1-4 give 1, rows 5-11 give 2, row 12 gives 8, dropping to 4 when
    (s^n - 1)/m is odd (then no x-power-signed lift doubles).  Survivors are
    the sign classes whose lifts actually double.
    """
    params.require_valid()
    row = _parity_row(params)
    if row <= 4:
        delta = 1
    elif row <= 11:
        delta = 2
    else:
        delta = 4 if s_ratio_is_odd(params) else 8
    from .words import class_representatives  # local to avoid cycles at import

    pres = presentation(params)
    survivors = tuple(
        rep for rep in class_representatives(pres)
        if _class_is_cover(rep, pres, params)
    )
    return DeltaBound(delta=delta, row=row, survivors=survivors)


def _class_is_cover(rep: SignVector, pres: Presentation, params: MetaParams) -> bool:
    from .words import class_members

    members = class_members(pres, rep)
    verdicts = {cover_verdict(j, params).is_double_cover for j in members}
    if len(verdicts) != 1:
        raise RuntimeError(f"inconsistent verdicts inside sign class {rep}")
    return verdicts.pop()


def deficiency_zero_test(params: MetaParams) -> bool:
    """Wamsley gcd criterion; the one computation done with exact big integers."""
    params.require_valid()
    m, n, r, s = params.m, params.n, params.r, params.s
    sn = s**n
    geometric = (sn - 1) // (s - 1) if s > 1 else n
    entries = (m, r, s - 1, (sn - 1) // m, (r * (s - 1)) // m, geometric)
    g = 0
    for e in entries:
        g = gcd(g, e)
    return g == 1


_TABLE3 = {
    ("odd", "odd", "odd"): 1,
    ("odd", "odd", "even"): 2,
    ("odd", "even", "odd"): 1,
    ("odd", "even", "even"): 2,
    ("even", "odd", "odd"): 2,
    ("even", "odd", "even"): 2,
    ("even", "even", "odd"): 2,
    ("even", "even", "even"): 4,
}


def table3_delta(n_parity: str, r_parity: str, gcd_parity: str) -> int:
    """Class-count bound for the deficiency-zero family, keyed by parities of
    (n, r, gcd(m, s-1))."""
    key = (n_parity, r_parity, gcd_parity)
    if key not in _TABLE3:
        raise ValueError("parities must be 'odd' or 'even'")
    return _TABLE3[key]


def table3_r(m: int, s: int) -> int:
    """The deficiency-zero family's r = m / gcd(m, s-1)."""
    return m // gcd(m, abs(s - 1)) if s != 1 else 1
