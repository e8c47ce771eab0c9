"""Free-group words, presentation parsing, and relator sign analysis over GF(2).

Words are stored freely reduced.  Relators keep their order: the sign-lift
classes computed here depend on the relator tuple, not just on the presented
group.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from ._linalg import gf2_basis, gf2_rank, gf2_reduce, gf2_span, smith_normal_form

Letter = tuple[int, int]  # (generator index, +1 or -1)

_NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")
_PRESENTATION_RE = re.compile(
    r"^\s*gens\s*:\s*(?P<gens>[^;]*);\s*rels\s*:\s*(?P<rels>.*)$",
    re.DOTALL | re.IGNORECASE,
)


class WordSyntaxError(ValueError):
    """Raised on malformed word or presentation text; carries the offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def _free_reduce(letters: Iterable[Letter]) -> tuple[Letter, ...]:
    out: list[Letter] = []
    for gen, sign in letters:
        if out and out[-1][0] == gen and out[-1][1] == -sign:
            out.pop()
        else:
            out.append((int(gen), int(sign)))
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """A freely reduced word: tuple of (generator index, sign) letters."""

    letters: tuple[Letter, ...] = ()

    @staticmethod
    def from_letters(letters: Iterable[Letter]) -> "Word":
        return Word(_free_reduce(letters))

    def __mul__(self, other: "Word") -> "Word":
        return Word.from_letters(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple((g, -s) for g, s in reversed(self.letters)))

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else self.inverse()
        return Word.from_letters(base.letters * abs(k))

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def is_identity(self) -> bool:
        return not self.letters

    @property
    def support(self) -> frozenset[int]:
        return frozenset(g for g, _ in self.letters)


def generator(index: int) -> Word:
    return Word(((index, 1),))


def commutator(u: Word, v: Word) -> Word:
    return u.inverse() * v.inverse() * u * v


def exponent_sum(word: Word, gen: int) -> int:
    """Signed number of occurrences of the given generator."""
    return sum(s for g, s in word.letters if g == gen)


def cyclically_reduce(word: Word) -> Word:
    letters = list(word.letters)
    while len(letters) >= 2 and letters[0][0] == letters[-1][0] and letters[0][1] == -letters[-1][1]:
        letters = letters[1:-1]
    return Word(tuple(letters))


def default_names(rank: int) -> tuple[str, ...]:
    return tuple(f"x{j + 1}" for j in range(rank))


@dataclass(frozen=True)
class Presentation:
    """A rank-n presentation with an ordered relator tuple."""

    rank: int
    relators: tuple[Word, ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be at least 1")
        if not self.relators:
            raise ValueError("at least one relator required")
        names = self.names or default_names(self.rank)
        if len(names) != self.rank:
            raise ValueError("one name per generator required")
        for nm in names:
            if not _NAME_RE.match(nm):
                raise ValueError(f"bad generator name {nm!r}")
        if len(set(names)) != self.rank:
            raise ValueError("duplicate generator names")
        object.__setattr__(self, "names", tuple(names))
        object.__setattr__(self, "relators", tuple(self.relators))
        for rel in self.relators:
            for g, _ in rel.letters:
                if not 0 <= g < self.rank:
                    raise ValueError(f"relator uses generator {g} outside rank {self.rank}")

    @property
    def n_relators(self) -> int:
        return len(self.relators)

    def format(self) -> str:
        rels = ", ".join(format_word(r, self.names) for r in self.relators)
        return f"gens: {', '.join(self.names)} ; rels: {rels}"

    def __str__(self) -> str:
        return self.format()


def _alias_table(names: Sequence[str]) -> dict[str, Letter]:
    alias: dict[str, Letter] = {}
    for j, nm in enumerate(names):
        alias[nm] = (j, 1)
    for j, nm in enumerate(names):
        if len(nm) == 1 and nm.islower() and nm.upper() not in alias:
            alias[nm.upper()] = (j, -1)
    return alias


def _invert_letters(letters: list[Letter]) -> list[Letter]:
    return [(g, -s) for g, s in reversed(letters)]


class _WordParser:
    def __init__(self, text: str, alias: dict[str, Letter], offset: int = 0):
        self.text = text
        self.names = sorted(alias.items(), key=lambda kv: -len(kv[0]))
        self.pos = 0
        self.offset = offset

    def fail(self, message: str):
        raise WordSyntaxError(message, self.offset + self.pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> list[Letter]:
        seq = self.sequence(closing="")
        self.skip_ws()
        if self.pos != len(self.text):
            self.fail(f"unexpected {self.text[self.pos]!r}")
        return seq

    def sequence(self, closing: str) -> list[Letter]:
        out: list[Letter] = []
        pending_star = False
        while True:
            self.skip_ws()
            ch = self.peek()
            if ch == "" or (closing and ch == closing):
                if pending_star:
                    self.fail("'*' without right operand")
                return out
            if ch == "*":
                if not out or pending_star:
                    self.fail("'*' without left operand")
                pending_star = True
                self.pos += 1
                continue
            out.extend(self.factor())
            pending_star = False

    def factor(self) -> list[Letter]:
        atom = self.atom()
        self.skip_ws()
        if self.peek() == "^":
            self.pos += 1
            self.skip_ws()
            k = self.integer()
            if k < 0:
                atom = _invert_letters(atom)
                k = -k
            atom = atom * k
        return atom

    def atom(self) -> list[Letter]:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            seq = self.sequence(closing=")")
            if self.peek() != ")":
                self.fail("missing ')'")
            self.pos += 1
            return seq
        for nm, letter in self.names:
            if self.text.startswith(nm, self.pos):
                self.pos += len(nm)
                return [letter]
        if ch and (ch.isalnum() or ch == "_"):
            self.fail(f"unknown generator starting at {ch!r}")
        self.fail(f"expected a generator or '(', found {ch!r}" if ch else "unexpected end of word")
        raise AssertionError  # unreachable

    def integer(self) -> int:
        start = self.pos
        if self.peek() == "-":
            self.pos += 1
        if not self.peek().isdigit():
            self.fail("expected an integer exponent")
        while self.peek().isdigit():
            self.pos += 1
        return int(self.text[start:self.pos])


def parse_word(text: str, names: Sequence[str], offset: int = 0) -> Word:
    """Parse word text over the given generator names.

    `*` concatenates (and may be omitted between atoms), `^k` takes integer
    powers, parentheses group, and the uppercase of a single lowercase
    generator letter denotes its inverse.
    """
    parser = _WordParser(text, _alias_table(names), offset)
    return Word.from_letters(parser.parse())


def parse_presentation(text: str) -> Presentation:
    """Parse `gens: a, b ; rels: a^3, b^4, (a*b)^2` style presentation text."""
    m = _PRESENTATION_RE.match(text)
    if not m:
        raise WordSyntaxError("expected 'gens: ... ; rels: ...'", 0)
    names = [t.strip() for t in m.group("gens").split(",")]
    if not names or any(not _NAME_RE.match(nm) for nm in names):
        raise WordSyntaxError("bad generator list", m.start("gens"))
    if len(set(names)) != len(names):
        raise WordSyntaxError("duplicate generator names", m.start("gens"))
    rel_part = m.group("rels")
    offset = m.start("rels")
    relators = []
    chunk_start = 0
    for chunk in rel_part.split(","):
        if not chunk.strip():
            raise WordSyntaxError("empty relator", offset + chunk_start)
        relators.append(parse_word(chunk, names, offset + chunk_start))
        chunk_start += len(chunk) + 1
    return Presentation(rank=len(names), relators=tuple(relators), names=tuple(names))


def format_word(word: Word, names: Sequence[str]) -> str:
    """Inverse of parse_word: parse(format(w)) == w."""
    if word.is_identity:
        return "()"
    parts = []
    letters = word.letters
    i = 0
    while i < len(letters):
        g, s = letters[i]
        j = i
        while j < len(letters) and letters[j] == (g, s):
            j += 1
        exp = (j - i) * s
        parts.append(names[g] if exp == 1 else f"{names[g]}^{exp}")
        i = j
    return "*".join(parts)


# ---------------------------------------------------------------------------
# Sign vectors: elements of C_2^m, one coordinate per relator.  Coordinate 1
# means "this relator picks up the central involution".

SignVector = tuple[int, ...]


def signs_to_mask(signs: SignVector) -> int:
    mask = 0
    for k, bit in enumerate(signs):
        if bit not in (0, 1):
            raise ValueError("sign coordinates must be 0 or 1")
        mask |= bit << k
    return mask


def mask_to_signs(mask: int, m: int) -> SignVector:
    return tuple((mask >> k) & 1 for k in range(m))


def format_signs(signs: SignVector) -> str:
    return "(" + ",".join("i" if b else "1" for b in signs) + ")"


@dataclass(frozen=True)
class ParityMatrix:
    """Exponent-sum parities of the relators: row k, bit j <-> relator k, generator j."""

    rows: tuple[int, ...]
    n: int

    @property
    def m(self) -> int:
        return len(self.rows)

    @cached_property
    def column_masks(self) -> tuple[int, ...]:
        cols = []
        for j in range(self.n):
            mask = 0
            for k, row in enumerate(self.rows):
                mask |= ((row >> j) & 1) << k
            cols.append(mask)
        return tuple(cols)

    @cached_property
    def image_basis(self) -> dict[int, int]:
        """Reduced basis of the image of the sign map C_2^n -> C_2^m."""
        return gf2_basis(self.column_masks)

    @cached_property
    def rank(self) -> int:
        return len(self.image_basis)

    @property
    def even_relators(self) -> tuple[int, ...]:
        return tuple(k for k, row in enumerate(self.rows) if row == 0)

    @property
    def odd_relators(self) -> tuple[int, ...]:
        return tuple(k for k, row in enumerate(self.rows) if row != 0)

    def rho(self, gen_mask: int) -> int:
        """Image of a generator sign pattern: bit k = parity of row_k . I."""
        out = 0
        for k, row in enumerate(self.rows):
            out |= ((row & gen_mask).bit_count() & 1) << k
        return out


def parity_matrix(pres: Presentation) -> ParityMatrix:
    rows = []
    for rel in pres.relators:
        row = 0
        for j in range(pres.rank):
            row |= (exponent_sum(rel, j) & 1) << j
        rows.append(row)
    return ParityMatrix(rows=tuple(rows), n=pres.rank)


def simple_type_degree(pres: Presentation) -> int | None:
    """Degree d when every odd relator has a single odd column and no column repeats."""
    pm = parity_matrix(pres)
    used_columns: set[int] = set()
    degree = 0
    for row in pm.rows:
        if row == 0:
            continue
        if row & (row - 1):
            return None
        col = row.bit_length() - 1
        if col in used_columns:
            return None
        used_columns.add(col)
        degree += 1
    return degree


def rho_image_rank(pres: Presentation) -> int:
    return parity_matrix(pres).rank


def presentation_class_count(pres: Presentation) -> int:
    pm = parity_matrix(pres)
    return 1 << (pm.m - pm.rank)


def class_representative_of(pres: Presentation, signs: SignVector) -> SignVector:
    """Canonical representative of the sign class of the given vector."""
    pm = parity_matrix(pres)
    return mask_to_signs(gf2_reduce(signs_to_mask(signs), pm.image_basis), pm.m)


def class_representatives(pres: Presentation) -> list[SignVector]:
    """One canonical representative per sign class, ascending lexicographically.

    Representatives are zero on the pivot coordinates of the image basis; for
    a presentation of simple type those are exactly the odd relators, so reps
    carry signs only on even relators.
    """
    pm = parity_matrix(pres)
    free_bits = [k for k in range(pm.m) if k not in pm.image_basis]
    if len(free_bits) > 20:
        raise ValueError("too many sign classes to enumerate")
    reps = [0]
    for bit in free_bits:
        reps.extend(v | (1 << bit) for v in reps)
    return sorted(mask_to_signs(v, pm.m) for v in reps)


def class_members(pres: Presentation, signs: SignVector) -> list[SignVector]:
    """Every sign vector in the class of the given one, ascending."""
    pm = parity_matrix(pres)
    if pm.rank > 20:
        raise ValueError("sign class too large to enumerate")
    base = signs_to_mask(signs)
    return sorted(mask_to_signs(base ^ v, pm.m) for v in gf2_span(pm.image_basis))


def abelian_invariants(pres: Presentation) -> tuple[int, ...]:
    """Invariant factors (>1, then 0 per free rank) of the abelianized group."""
    matrix = [[exponent_sum(rel, j) for j in range(pres.rank)] for rel in pres.relators]
    diag = smith_normal_form(matrix)
    nonzero = [d for d in diag if d]
    free = pres.rank - len(nonzero)
    return tuple(d for d in nonzero if d > 1) + (0,) * free
