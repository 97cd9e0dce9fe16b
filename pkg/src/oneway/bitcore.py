"""Finite combinatorics of Cantor space.

Bit words, the pairing bijection, interleaving, partial assignments,
prefix-free word sets, and exact rational cylinder measures.  Everything
here is immutable and pure; measures are `fractions.Fraction` throughout,
never floats, because downstream threshold comparisons (strictly more
than half a cylinder) must be exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .errors import ConsistencyError, PrefixFreeError, SpecParseError

Word = str


def check_word(word: str) -> str:
    """Validate that every symbol of `word` is '0' or '1' and return it."""
    if not isinstance(word, str):
        raise ValueError(f"expected a bit word, got {type(word).__name__}")
    for ch in word:
        if ch not in "01":
            raise ValueError(f"bad symbol {ch!r} in bit word {word!r}")
    return word


def pair(n: int, s: int) -> int:
    """Cantor pairing ⟨n,s⟩ = (n+s)(n+s+1)/2 + s.

    Bijective on ℕ×ℕ and satisfies pair(n,s) ≥ s, the property every
    stage-bound argument downstream leans on.
    """
    if n < 0 or s < 0:
        raise ValueError("pair is defined on naturals only")
    t = n + s
    return t * (t + 1) // 2 + s


def unpair(m: int) -> tuple[int, int]:
    """Inverse of pair: unpair(pair(n,s)) = (n,s)."""
    if m < 0:
        raise ValueError("unpair is defined on naturals only")
    # largest t with t(t+1)/2 <= m, via integer sqrt of 8m+1
    t = (math.isqrt(8 * m + 1) - 1) // 2
    s = m - t * (t + 1) // 2
    return t - s, s


def interleave(a: Word, b: Word) -> Word:
    """Merge equal-length words: even positions from `a`, odd from `b`."""
    check_word(a)
    check_word(b)
    if len(a) != len(b):
        raise ValueError(f"interleave needs equal lengths, got {len(a)} and {len(b)}")
    out = []
    for x, y in zip(a, b):
        out.append(x)
        out.append(y)
    return "".join(out)


def deinterleave(c: Word) -> tuple[Word, Word]:
    """Split an even-length word back into its even and odd subsequences."""
    check_word(c)
    if len(c) % 2:
        raise ValueError(f"deinterleave needs even length, got {len(c)}")
    return c[0::2], c[1::2]


def comparable(a: Word, b: Word) -> bool:
    """Whether one word is a prefix of the other (cylinders intersect)."""
    if len(a) <= len(b):
        return b.startswith(a)
    return a.startswith(b)


@dataclass(frozen=True)
class PartialAssignment:
    """A finite map position → bit, i.e. a finite intersection of subcylinders.

    Stored as a tuple of (position, bit) pairs sorted by position.  The class
    of reals satisfying the constraints has measure exactly 2^(−|domain|).
    """

    constraints: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        seen = set()
        for pos, bit in self.constraints:
            if pos < 0:
                raise ValueError(f"negative position {pos} in assignment")
            if bit not in "01":
                raise ValueError(f"bad bit {bit!r} at position {pos}")
            if pos in seen:
                raise ValueError(f"position {pos} constrained twice")
            seen.add(pos)
        ordered = tuple(sorted(self.constraints))
        if ordered != self.constraints:
            object.__setattr__(self, "constraints", ordered)

    @classmethod
    def of_word(cls, word: Word) -> "PartialAssignment":
        check_word(word)
        return cls(tuple(enumerate(word)))

    @classmethod
    def of_dict(cls, mapping: dict[int, str]) -> "PartialAssignment":
        return cls(tuple(mapping.items()))

    def positions(self) -> tuple[int, ...]:
        return tuple(pos for pos, _ in self.constraints)

    def value_at(self, pos: int) -> Optional[str]:
        for p, bit in self.constraints:
            if p == pos:
                return bit
        return None

    def measure(self) -> Fraction:
        return Fraction(1, 2 ** len(self.constraints))

    def consistent_with(self, other: "PartialAssignment") -> bool:
        theirs = dict(other.constraints)
        return all(theirs.get(p, b) == b for p, b in self.constraints)

    def union(self, other: "PartialAssignment") -> "PartialAssignment":
        merged = dict(self.constraints)
        for p, b in other.constraints:
            if merged.setdefault(p, b) != b:
                raise ConsistencyError(f"assignments disagree at position {p}")
        return PartialAssignment(tuple(merged.items()))

    def agrees_with_word(self, word: Word) -> bool:
        """Whether some extension of `word` satisfies every constraint < |word|."""
        return all(b == word[p] for p, b in self.constraints if p < len(word))

    def filled_word(self, length: int) -> Word:
        """The length-`length` word matching the constraints, zeros elsewhere."""
        bits = ["0"] * length
        for p, b in self.constraints:
            if p >= length:
                raise ValueError(f"constraint at {p} does not fit in length {length}")
            bits[p] = b
        return "".join(bits)

    def intersect_word_measure(self, word: Word) -> Fraction:
        """Exact μ of (this class) ∩ ⟦word⟧."""
        if not self.agrees_with_word(word):
            return Fraction(0)
        outside = sum(1 for p, _ in self.constraints if p >= len(word))
        return Fraction(1, 2 ** (len(word) + outside))


def assignment_measure(a: PartialAssignment) -> Fraction:
    return a.measure()


class PrefixFreeSet:
    """A finite set of pairwise prefix-incomparable words.

    Construction canonicalizes to (length, lexicographic) order and rejects
    any comparable pair, since overlapping cylinders would break the additive
    measure computations.
    """

    def __init__(self, words: Iterable[Word]):
        members = sorted(set(check_word(w) for w in words), key=lambda w: (len(w), w))
        lex = sorted(members)
        for a, b in zip(lex, lex[1:]):
            if b.startswith(a):
                raise PrefixFreeError(f"{a!r} is a prefix of {b!r}")
        self._members: tuple[Word, ...] = tuple(members)

    def __iter__(self) -> Iterator[Word]:
        return iter(self._members)

    def __len__(self) -> int:
        return len(self._members)

    def __contains__(self, word: Word) -> bool:
        return word in self._members

    def __eq__(self, other) -> bool:
        return isinstance(other, PrefixFreeSet) and self._members == other._members

    def __hash__(self) -> int:
        return hash(self._members)

    def __repr__(self) -> str:
        return f"PrefixFreeSet({list(self._members)!r})"

    def words(self) -> tuple[Word, ...]:
        return self._members

    def measure(self) -> Fraction:
        """Exact Σ 2^(−|τ|) over members (cylinders are disjoint)."""
        return sum((Fraction(1, 2 ** len(w)) for w in self._members), Fraction(0))

    def intersect_measure(self, sigma: Word) -> Fraction:
        """Exact μ(⟦members⟧ ∩ ⟦sigma⟧).

        Two cylinders intersect iff the words are comparable, and then the
        intersection is the cylinder of the longer word.
        """
        check_word(sigma)
        total = Fraction(0)
        for w in self._members:
            if comparable(w, sigma):
                total += Fraction(1, 2 ** max(len(w), len(sigma)))
        return total


def prefix_set_from_file(path: str) -> PrefixFreeSet:
    """Load one word per line; '#' starts a comment, blank lines ignored."""
    words = []
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                try:
                    words.append(check_word(line))
                except ValueError as exc:
                    raise SpecParseError(f"{path}:{lineno}: {exc}") from exc
    except OSError as exc:
        raise SpecParseError(f"cannot read prefix set {path}: {exc}") from exc
    try:
        return PrefixFreeSet(words)
    except PrefixFreeError as exc:
        raise SpecParseError(f"{path}: not prefix-free: {exc}") from exc
