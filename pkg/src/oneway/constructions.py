"""The function constructions: simple one-way maps, bit selections, the
one-way surjection, the partial injection, and the marker-based two-to-one
maps, each parameterized by staged enumerations.

The movable-marker recursion is shared between both two-to-one variants:

    k_0 = 0;  k_{s+1} = s+1 if stage s grants permission, else k_s
    p_s  = k_s on an update (the vacated position), else s+1
    d_s  = number of updates before stage s

Variant 1 keys permissions on the marker k_s (halting: k_s enumerated by
stage s; z-permission: z(⟨k_s,s⟩) = 1).  Variant 2 keys them on the update
counter d_s (halting: d_s enumerated; z-permission: column d_s of z has a
prefix in the word enumeration).  The halting clause is checked first and
short-circuits, so a halting stage reads nothing from z.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .bitcore import Word, check_word, pair, unpair
from .enumeration import (
    DecidedSet,
    StagedEnumeration,
    StagedStringEnumeration,
    column_hit,
)
from .errors import DivergenceError, HorizonError, InjectivityError
from .streams import BitSource, OracleTape, RealFunction, column_source, column_of


@dataclass(frozen=True)
class ConstructionHandle:
    """A shipped construction with the data it was built from.

    The descriptor is the CLI spec string; parsing and rendering live in the
    cli module, and parse(descriptor) reproduces the same handle.
    """

    family: str
    descriptor: str
    fn: RealFunction
    w: Optional[StagedEnumeration] = None
    u: Optional[StagedStringEnumeration] = None
    d: Optional[DecidedSet] = None


@dataclass(frozen=True)
class MarkerStep:
    s: int
    k: int
    d: int
    p: int
    permission: Optional[str]  # None, "halting", or "z"


@dataclass(frozen=True)
class MarkerTrace:
    """Per-stage record of the marker recursion over some number of stages.

    steps[s] carries the values before stage s acts plus the position p_s
    selected at that stage; k_final and d_final are the values after the
    last stage.
    """

    steps: tuple[MarkerStep, ...]
    k_final: int
    d_final: int

    @property
    def stages(self) -> int:
        return len(self.steps)

    def k_at(self, s: int) -> int:
        if s == len(self.steps):
            return self.k_final
        return self.steps[s].k

    def d_at(self, s: int) -> int:
        if s == len(self.steps):
            return self.d_final
        return self.steps[s].d

    def p_values(self) -> tuple[int, ...]:
        return tuple(step.p for step in self.steps)

    def used_positions(self) -> frozenset[int]:
        return frozenset(step.p for step in self.steps)

    def least_stage_with_k(self, value: int) -> Optional[int]:
        for s in range(len(self.steps) + 1):
            if self.k_at(s) == value:
                return s
        return None

    def least_stage_with_d(self, value: int) -> Optional[int]:
        for s in range(len(self.steps) + 1):
            if self.d_at(s) == value:
                return s
        return None

    def stuck_report(self) -> str:
        """Human-readable terminal state: never a claim about the limit."""
        S = len(self.steps)
        last_move = max((step.s + 1 for step in self.steps if step.permission), default=0)
        if last_move < S:
            return f"k={self.k_final} stuck through stage {S} (last update at {last_move})"
        return f"k={self.k_final} updated at the final stage {S}"

    def assert_invariants(self) -> None:
        """Check every promised trace identity, raising AssertionError with
        the failing stage on violation."""
        S = len(self.steps)
        ks = [self.k_at(s) for s in range(S + 1)]
        ds = [self.d_at(s) for s in range(S + 1)]
        ps = self.p_values()
        for s in range(S):
            assert ks[s + 1] in (ks[s], s + 1), f"k jump at stage {s}: {ks[s]}->{ks[s+1]}"
            assert ks[s + 1] >= ks[s], f"k decreased at stage {s}"
            updated = ks[s + 1] != ks[s]
            assert ds[s + 1] == ds[s] + (1 if updated else 0), f"d miscount at stage {s}"
            if self.steps[s].permission is None:
                assert not updated, f"update without permission at stage {s}"
                assert ps[s] == s + 1, f"p should be s+1 at idle stage {s}"
            else:
                assert updated, f"permission without update at stage {s}"
                assert ps[s] == ks[s], f"p should vacate k at update stage {s}"
        assert len(set(ps)) == len(ps), "p not injective"
        seen: set[int] = set()
        for s in range(S + 1):
            if s > 0:
                seen.add(ps[s - 1])
            expected = set(range(s + 1)) - {ks[s]}
            assert seen == expected, (
                f"range identity fails at stage {s}: {sorted(seen)} != {sorted(expected)}")


PermissionFn = Callable[[int, int, int], Optional[str]]


def _marker_run(stages: int, permission_at: PermissionFn) -> MarkerTrace:
    if stages < 0:
        raise ValueError("stages must be a natural")
    k = d = 0
    steps = []
    for s in range(stages):
        perm = permission_at(k, d, s)
        if perm is None:
            steps.append(MarkerStep(s, k, d, s + 1, None))
        else:
            steps.append(MarkerStep(s, k, d, k, perm))
            k = s + 1
            d += 1
    return MarkerTrace(tuple(steps), k, d)


def marker_run_v1(w: StagedEnumeration, z: BitSource, stages: int) -> MarkerTrace:
    """Marker recursion with permissions keyed on k_s."""
    if stages > w.horizon:
        raise HorizonError(f"marker run of {stages} stages beyond horizon {w.horizon}")

    def permission(k: int, d: int, s: int) -> Optional[str]:
        if w.member_at_stage(k, s):
            return "halting"
        if z.bit(pair(k, s)) == 1:
            return "z"
        return None

    return _marker_run(stages, permission)


def marker_run_v2(w: StagedEnumeration, u: StagedStringEnumeration,
                  z: BitSource, stages: int) -> MarkerTrace:
    """Marker recursion with permissions keyed on the update counter d_s."""
    if stages > w.horizon or stages > u.horizon:
        raise HorizonError(
            f"marker run of {stages} stages beyond horizons ({w.horizon}, {u.horizon})")

    def permission(k: int, d: int, s: int) -> Optional[str]:
        if w.member_at_stage(d, s):
            return "halting"
        if column_hit(u, column_of(z, d), s):
            return "z"
        return None

    return _marker_run(stages, permission)


class Injection:
    """An injective position map with collision detection on the fly.

    Every applied value is remembered; a repeat from a different argument
    raises.  The optional inverse returns None for values outside the range.
    """

    def __init__(self, name: str, fn: Callable[[int], int],
                 inverse: Optional[Callable[[int], Optional[int]]] = None):
        self.name = name
        self._fn = fn
        self._inverse = inverse
        self._seen: dict[int, int] = {}

    def apply(self, n: int) -> int:
        if n < 0:
            raise ValueError(f"{self.name} takes naturals, got {n}")
        v = self._fn(n)
        if v < 0:
            raise ValueError(f"{self.name}({n}) = {v} is not a natural")
        prior = self._seen.setdefault(v, n)
        if prior != n:
            raise InjectivityError(f"{self.name} maps {prior} and {n} both to {v}")
        return v

    @property
    def invertible(self) -> bool:
        return self._inverse is not None

    def invert(self, m: int) -> Optional[int]:
        if self._inverse is None:
            raise ValueError(f"{self.name} carries no inverse")
        return self._inverse(m)


def identity_injection() -> Injection:
    return Injection("identity", lambda n: n, lambda m: m)


def double_injection() -> Injection:
    return Injection("double", lambda n: 2 * n,
                     lambda m: m // 2 if m % 2 == 0 else None)


def shift_injection() -> Injection:
    return Injection("shift", lambda n: n + 1,
                     lambda m: m - 1 if m >= 1 else None)


def surjection_injection(w: StagedEnumeration) -> Injection:
    """p(⟨n,s⟩) = 2n when n enters w at s, else 2⟨n,s⟩+1.

    Injective because each element enters at most once: entries land on
    distinct even values, everything else on distinct odd values.
    """

    def fn(m: int) -> int:
        n, s = unpair(m)
        if w.new_element_at(s) == n:
            return 2 * n
        return 2 * m + 1

    def inverse(v: int) -> Optional[int]:
        if v % 2 == 0:
            s = w.entry_stage(v // 2)
            return None if s is None else pair(v // 2, s)
        m = v // 2
        n, s = unpair(m)
        return None if w.new_element_at(s) == n else m

    return Injection(f"surj-p({w.label})", fn, inverse)


def bit_select(p: Injection, name: Optional[str] = None) -> RealFunction:
    """Output bit n = input bit p(n)."""
    return RealFunction(name or f"bitselect({p.name})",
                        lambda tape, m: tape.read(p.apply(m)))


def preimage_witness(p: Injection, y: BitSource) -> BitSource:
    """The canonical preimage of y under bitSelect(p): y(n) at position p(n),
    zeros off the range of p."""

    def bit(m: int) -> int:
        n = p.invert(m)
        return 0 if n is None else y.bit(n)

    return BitSource(f"witness({p.name},{y.spec})", bit)


def witness_function(p: Injection, name: Optional[str] = None) -> RealFunction:
    """The witness map itself as a function on reals: x ↦ preimageWitness(p, x)."""

    def emit(tape: OracleTape, m: int) -> int:
        n = p.invert(m)
        return 0 if n is None else tape.read(n)

    return RealFunction(name or f"witness({p.name})", emit)


def simple_one_way(w: StagedEnumeration) -> RealFunction:
    """Output bit ⟨n,s⟩ = input bit n when n enters w at stage s, else 0."""

    def emit(tape: OracleTape, m: int) -> int:
        n, s = unpair(m)
        if w.new_element_at(s) == n:
            return tape.read(n)
        return 0

    return RealFunction(f"simple({w.label})", emit)


def one_way_surjection(w: StagedEnumeration) -> RealFunction:
    return bit_select(surjection_injection(w), name=f"surj({w.label})")


def partial_injection(w: StagedEnumeration, d: DecidedSet) -> RealFunction:
    """The join of the simple map with the divergence guard q.

    Output bit 2j is the simple map's bit j; output bit 2j+1 is 0 when every
    set input bit at positions ≤ j lies in the decided set, and diverges
    otherwise.  On its domain (reals whose 1-bits are all decided) the map
    is injective once the enumeration has listed every decided member.
    """
    for n in sorted(w.limit_members()):
        if n > d.horizon or not d.contains(n):
            raise ValueError(
                f"enumeration lists {n} but the decided set does not contain it")

    def emit(tape: OracleTape, m: int) -> int:
        j, odd = divmod(m, 2)
        if not odd:
            n, s = unpair(j)
            if w.new_element_at(s) == n:
                return tape.read(n)
            return 0
        for i in range(j + 1):
            if tape.read(i) == 1 and not d.contains(i):
                raise DivergenceError(m, f"input bit {i} is set but undecided")
        return 0

    return RealFunction(f"inj({w.label},{d.label})", emit)


def two_to_one_v1(w: StagedEnumeration) -> RealFunction:
    """f(x⊕z) = h(x)⊕z with h(x; s) = x(p_s) from the k-keyed marker run.

    Even output bit 2s needs the marker through stage s; permissions read z
    through the tape (input positions 2⟨k,t⟩+1), then the selected x bit is
    input position 2·p_s.  Odd output bits copy z through.
    """

    def emit(tape: OracleTape, m: int) -> int:
        if m % 2 == 1:
            return tape.read(m)
        s = m // 2
        if s + 1 > w.horizon:
            raise HorizonError(
                f"output bit {m} needs marker stage {s + 1} beyond horizon {w.horizon}")

        def permission(k: int, d: int, t: int) -> Optional[str]:
            if w.member_at_stage(k, t):
                return "halting"
            if tape.read(2 * pair(k, t) + 1) == 1:
                return "z"
            return None

        trace = _marker_run(s + 1, permission)
        return tape.read(2 * trace.steps[s].p)

    return RealFunction(f"two1({w.label})", emit)


def two_to_one_v2(w: StagedEnumeration, u: StagedStringEnumeration) -> RealFunction:
    """Same skeleton as the k-keyed map, but permissions are keyed on the
    update counter: halting on d_t entering w, z-permission when column d_t
    of z extends a word of U_t."""

    def emit(tape: OracleTape, m: int) -> int:
        if m % 2 == 1:
            return tape.read(m)
        s = m // 2
        cap = min(w.horizon, u.horizon)
        if s + 1 > cap:
            raise HorizonError(
                f"output bit {m} needs marker stage {s + 1} beyond horizon {cap}")

        def permission(k: int, d: int, t: int) -> Optional[str]:
            if w.member_at_stage(d, t):
                return "halting"
            col = BitSource(f"tape-column:{d}", lambda i, d=d: tape.read(2 * pair(d, i) + 1))
            if column_hit(u, col, t):
                return "z"
            return None

        trace = _marker_run(s + 1, permission)
        return tape.read(2 * trace.steps[s].p)

    return RealFunction(f"two2({w.label},{u.label})", emit)


def z_builder_v1(n: int, zeta: Word = "") -> BitSource:
    """The adversarial z: zeta verbatim, then bit ⟨i,s⟩ = 0 iff i = n.

    Against the k-keyed marker this grants permission at every stage where
    the marker sits below or above n, and never once it reaches n, so k
    gets stuck on n unless the enumeration itself releases it.
    """
    if n < 0:
        raise ValueError("column index must be a natural")
    check_word(zeta)

    def bit(m: int) -> int:
        if m < len(zeta):
            return int(zeta[m])
        i, _ = unpair(m)
        return 0 if i == n else 1

    return BitSource(f"zbuild:{n}:{zeta or 'e'}", bit)


def replace_column(w: BitSource, n: int, y: BitSource) -> BitSource:
    """w with column n replaced by y (bit ⟨n,i⟩ becomes y(i))."""
    if n < 0:
        raise ValueError("column index must be a natural")
    return column_source({n: y}, w)


def stage_where_counter_reaches(w: StagedEnumeration, u: StagedStringEnumeration,
                                z: BitSource, n: int) -> int:
    """Least s with d_s = n in the d-keyed marker run.

    Errors out when some counter value below n never receives permission
    within the joint horizon; the caller supplies enumerations rich enough
    to drive the counter that far.
    """
    if n < 0:
        raise ValueError("counter target must be a natural")
    cap = min(w.horizon, u.horizon)
    trace = marker_run_v2(w, u, z, cap)
    s = trace.least_stage_with_d(n)
    if s is None:
        raise HorizonError(
            f"counter reached {trace.d_final}, not {n}, within horizon {cap}")
    return s
