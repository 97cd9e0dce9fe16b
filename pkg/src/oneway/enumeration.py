"""Staged enumerations: finite stand-ins for c.e. sets.

A StagedEnumeration presents a set as stage → element with at most one new
element per stage and no repetitions, up to a hard horizon; queries past
the horizon are errors, never silent truncations.  StagedStringEnumeration
does the same for prefix-free word sets.  DecidedSet is a total membership
predicate, a separate capability kept distinct from enumerations because
one construction needs absolute membership answers, not stage-bounded ones.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Optional

from .bitcore import Word, check_word, comparable
from .errors import HorizonError, SpecParseError
from .streams import BitSource


def _check_stage(s: int, horizon: int) -> None:
    if s < 0:
        raise ValueError(f"stage must be a natural, got {s}")
    if s > horizon:
        raise HorizonError(f"stage {s} beyond horizon {horizon}")


class StagedEnumeration:
    """A finite schedule stage → element, injective both ways."""

    def __init__(self, schedule: Mapping[int, int], horizon: int, label: str = "enum"):
        if horizon < 0:
            raise ValueError("horizon must be a natural")
        by_stage: dict[int, int] = {}
        by_element: dict[int, int] = {}
        for s, n in sorted(schedule.items()):
            if s < 0 or n < 0:
                raise SpecParseError(f"stage and element must be naturals, got ({s}, {n})")
            if s > horizon:
                raise SpecParseError(f"stage {s} beyond horizon {horizon} in schedule")
            if n in by_element:
                raise SpecParseError(f"element {n} repeated (stages {by_element[n]} and {s})")
            by_stage[s] = n
            by_element[n] = s
        self._by_stage = by_stage
        self._by_element = by_element
        self.horizon = horizon
        self.label = label

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]],
                   horizon: Optional[int] = None,
                   label: str = "enum") -> "StagedEnumeration":
        schedule: dict[int, int] = {}
        for s, n in pairs:
            if s in schedule:
                raise SpecParseError(f"stage {s} repeated (pair ({s}, {n}))")
            if n in schedule.values():
                raise SpecParseError(f"element {n} repeated (pair ({s}, {n}))")
            schedule[s] = n
        if horizon is None:
            horizon = max(schedule, default=0)
        return cls(schedule, horizon, label)

    def new_element_at(self, s: int) -> Optional[int]:
        """The unique element entering at stage s, if any."""
        _check_stage(s, self.horizon)
        return self._by_stage.get(s)

    def member_at_stage(self, n: int, s: int) -> bool:
        """n ∈ W_s, the accumulated set at stage s."""
        _check_stage(s, self.horizon)
        entry = self._by_element.get(n)
        return entry is not None and entry <= s

    def entry_stage(self, n: int) -> Optional[int]:
        return self._by_element.get(n)

    def members_at(self, s: int) -> frozenset[int]:
        _check_stage(s, self.horizon)
        return frozenset(n for n, t in self._by_element.items() if t <= s)

    def limit_members(self) -> frozenset[int]:
        return frozenset(self._by_element)

    def max_entry_stage(self) -> int:
        return max(self._by_stage, default=0)

    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self._by_stage.items()))

    def __repr__(self) -> str:
        return f"StagedEnumeration({self.label}, {len(self._by_element)} elements, horizon={self.horizon})"


def collatz_length(n: int) -> int:
    """Number of Collatz steps from n down to 1."""
    if n < 1:
        raise ValueError("collatz trajectories start at positive integers")
    steps = 0
    while n != 1:
        n = n // 2 if n % 2 == 0 else 3 * n + 1
        steps += 1
    return steps


def collatz_toy(max_element: int, max_stage: int) -> StagedEnumeration:
    """A deterministic, irregular-looking toy halting set.

    Element n < max_element enters at its Collatz trajectory length, with
    ties pushed to the next free stage, smaller n first.  Elements forced
    past max_stage are omitted: they model non-halting at desk scale.
    """
    ranked = sorted(range(1, max_element), key=lambda n: (collatz_length(n), n))
    schedule: dict[int, int] = {}
    prev = -1
    for n in ranked:
        stage = max(collatz_length(n), prev + 1)
        if stage > max_stage:
            break
        schedule[stage] = n
        prev = stage
    return StagedEnumeration(schedule, max_stage, f"collatz:{max_element}:{max_stage}")


class StagedStringEnumeration:
    """Stage → word schedule whose accumulated set stays prefix-free.

    Empty words are rejected outright: an empty word would be a prefix of
    everything, making every membership test trivially true.
    """

    def __init__(self, schedule: Mapping[int, Word], horizon: int, label: str = "strenum"):
        if horizon < 0:
            raise ValueError("horizon must be a natural")
        ordered: list[tuple[int, Word]] = []
        for s, word in sorted(schedule.items()):
            check_word(word)
            if s < 0:
                raise SpecParseError(f"stage must be a natural, got {s}")
            if s > horizon:
                raise SpecParseError(f"stage {s} beyond horizon {horizon} in schedule")
            if word == "":
                raise SpecParseError(f"empty word at stage {s} not permitted")
            for t, earlier in ordered:
                if comparable(word, earlier):
                    raise SpecParseError(
                        f"word {word!r} at stage {s} comparable with {earlier!r} at stage {t}")
            ordered.append((s, word))
        self._ordered = tuple(ordered)
        self.horizon = horizon
        self.label = label

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, Word]],
                   horizon: Optional[int] = None,
                   label: str = "strenum") -> "StagedStringEnumeration":
        schedule: dict[int, Word] = {}
        for s, word in pairs:
            if s in schedule:
                raise SpecParseError(f"stage {s} repeated (word {word!r})")
            schedule[s] = word
        if horizon is None:
            horizon = max(schedule, default=0)
        return cls(schedule, horizon, label)

    def words_at(self, s: int) -> tuple[Word, ...]:
        """Accumulated prefix-free set U_s, in stage order."""
        _check_stage(s, self.horizon)
        return tuple(word for t, word in self._ordered if t <= s)

    def limit_words(self) -> tuple[Word, ...]:
        return tuple(word for _, word in self._ordered)

    def pairs(self) -> tuple[tuple[int, Word], ...]:
        return self._ordered

    def __repr__(self) -> str:
        return f"StagedStringEnumeration({self.label}, {len(self._ordered)} words, horizon={self.horizon})"


def column_hit(u: StagedStringEnumeration, col: BitSource, s: int) -> bool:
    """Whether some word of U_s is a prefix of the column source.

    Reads exactly the column bits needed for the comparisons, in schedule
    order, so tape-backed columns see a deterministic read sequence.
    """
    for word in u.words_at(s):
        if all(col.bit(i) == int(ch) for i, ch in enumerate(word)):
            return True
    return False


class DecidedSet:
    """Total membership predicate on naturals up to a horizon."""

    def __init__(self, members: Iterable[int], horizon: int, label: str = "decided"):
        if horizon < 0:
            raise ValueError("horizon must be a natural")
        self._members = frozenset(members)
        for n in self._members:
            if n < 0:
                raise SpecParseError(f"member must be a natural, got {n}")
            if n > horizon:
                raise SpecParseError(f"member {n} beyond horizon {horizon}")
        self.horizon = horizon
        self.label = label

    @classmethod
    def from_enumeration(cls, w: StagedEnumeration) -> "DecidedSet":
        members = w.limit_members()
        horizon = max(max(members, default=0), w.horizon)
        return cls(members, horizon, f"decided({w.label})")

    def contains(self, n: int) -> bool:
        if n < 0:
            raise ValueError(f"membership query must be a natural, got {n}")
        if n > self.horizon:
            raise HorizonError(f"membership of {n} undecided beyond horizon {self.horizon}")
        return n in self._members

    def members(self) -> frozenset[int]:
        return self._members

    def __repr__(self) -> str:
        return f"DecidedSet({self.label}, {len(self._members)} members, horizon={self.horizon})"


def _data_lines(path: str):
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if line:
                    yield lineno, line
    except OSError as exc:
        raise SpecParseError(f"cannot read {path}: {exc}") from exc


def _split_horizon(path: str, rows: list[tuple[int, list[str]]]) -> tuple[Optional[int], list[tuple[int, list[str]]]]:
    horizon = None
    data = []
    for lineno, parts in rows:
        if parts[0] == "horizon":
            if len(parts) != 2 or horizon is not None:
                raise SpecParseError(f"{path}:{lineno}: bad horizon directive")
            try:
                horizon = int(parts[1])
            except ValueError as exc:
                raise SpecParseError(f"{path}:{lineno}: bad horizon value") from exc
        else:
            data.append((lineno, parts))
    return horizon, data


def enumeration_from_file(path: str) -> StagedEnumeration:
    """Lines `s n` (stage, element); optional `horizon N`; '#' comments.

    Without a horizon directive the horizon is the largest listed stage.
    """
    rows = [(lineno, line.split()) for lineno, line in _data_lines(path)]
    horizon, data = _split_horizon(path, rows)
    pairs = []
    for lineno, parts in data:
        if len(parts) != 2:
            raise SpecParseError(f"{path}:{lineno}: expected `s n`")
        try:
            pairs.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise SpecParseError(f"{path}:{lineno}: expected integers") from exc
    try:
        return StagedEnumeration.from_pairs(pairs, horizon, label=path)
    except SpecParseError as exc:
        raise SpecParseError(f"{path}: {exc}") from exc


def string_enum_from_file(path: str) -> StagedStringEnumeration:
    """Lines `s WORD`; optional `horizon N`; '#' comments."""
    rows = [(lineno, line.split()) for lineno, line in _data_lines(path)]
    horizon, data = _split_horizon(path, rows)
    pairs = []
    for lineno, parts in data:
        if len(parts) != 2:
            raise SpecParseError(f"{path}:{lineno}: expected `s WORD`")
        try:
            stage = int(parts[0])
            word = check_word(parts[1])
        except ValueError as exc:
            raise SpecParseError(f"{path}:{lineno}: {exc}") from exc
        pairs.append((stage, word))
    try:
        return StagedStringEnumeration.from_pairs(pairs, horizon, label=path)
    except SpecParseError as exc:
        raise SpecParseError(f"{path}: {exc}") from exc


def decided_set_from_file(path: str) -> DecidedSet:
    """Lines `n` (one member per line); optional `horizon N`; '#' comments."""
    rows = [(lineno, line.split()) for lineno, line in _data_lines(path)]
    horizon, data = _split_horizon(path, rows)
    members = []
    for lineno, parts in data:
        if len(parts) != 1:
            raise SpecParseError(f"{path}:{lineno}: expected a single natural")
        try:
            members.append(int(parts[0]))
        except ValueError as exc:
            raise SpecParseError(f"{path}:{lineno}: expected an integer") from exc
    if horizon is None:
        horizon = max(members, default=0)
    try:
        return DecidedSet(members, horizon, label=path)
    except SpecParseError as exc:
        raise SpecParseError(f"{path}: {exc}") from exc
