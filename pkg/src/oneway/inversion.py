"""Inverters and the adversaries that exploit them.

The extraction procedures turn any working inverter of the shipped one-way
maps into a decision procedure for the driving enumeration: the oracle-use
of finitely many inverter queries bounds the stage at which membership must
show up.  Reference inverters built from full knowledge of the toy set make
the reductions executable end to end; the toy stands where no computable
inverter could.

The randomized extraction dovetails candidate oracle words in (length, lex)
order, collecting minimal halting prefixes until they cover more than half
of the conditioning cylinder.  Candidate words are never enumerated one by
one - the collected set is represented symbolically by the fork tree of the
inverter's reads, one leaf per read pattern, with exact word counts and
rational measures per length class.  The crossing length class, and hence
the stage bound, is computed exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .bitcore import (
    PartialAssignment,
    PrefixFreeSet,
    Word,
    check_word,
    comparable,
    pair,
)
from .constructions import marker_run_v1, two_to_one_v1, z_builder_v1
from .enumeration import StagedEnumeration
from .errors import (
    ConsistencyError,
    DeskError,
    DivergenceError,
    MeasureThresholdError,
    NotInRangeError,
    NotSingletonError,
    UseSoundnessError,
    _BudgetExhausted,
    _ReadBeyondBarrier,
)
from .streams import (
    DEFAULT_BUDGET,
    BitSource,
    OracleTape,
    RealFunction,
    Representation,
    evaluate_bit,
    finite,
    flipped_at,
    interleaved,
    output_source,
    representation_of,
    source_agrees,
    zeros,
)


@dataclass(frozen=True)
class ExtractionVerdict:
    """Membership verdict with the certificate the argument rests on."""

    element: int
    member: bool
    use: int
    stage_bound: Optional[int]
    via: str
    evidence: object = None

    def line(self) -> str:
        sb = "-" if self.stage_bound is None else str(self.stage_bound)
        member = "true" if self.member else "false"
        return f"n={self.element} member={member} use={self.use} stagebound={sb}"


@dataclass(frozen=True)
class InverterUnderTest:
    """An inverter handed to an extraction procedure.

    `binary` marks inverters over joined inputs y⊕r (randomized extraction
    feeds those); unary inverters read y alone.
    """

    g: RealFunction
    declared_total: bool = True
    binary: bool = False


def unique_path_invert(rep: Representation, y: BitSource, n: int,
                       depth_cap: Optional[int] = None,
                       survivor_cap: int = 4096) -> Word:
    """First n bits of the unique preimage of y, by levelwise consensus.

    Breadth-first over words compatible with y; returns as soon as every
    survivor of some level shares an n-bit prefix.  Typed failures: an
    empty level means y is not in the range at that depth; no consensus by
    the depth cap (or a survivor population past `survivor_cap`) means the
    fiber is not provably a singleton at desk scale.
    """
    if depth_cap is None:
        depth_cap = rep.depth
    if depth_cap > rep.depth:
        raise ValueError(f"depth cap {depth_cap} exceeds representation depth {rep.depth}")
    level = [""]
    for depth in range(depth_cap + 1):
        survivors = [s for s in level if source_agrees(y, rep.map_word(s))]
        if not survivors:
            raise NotInRangeError(f"target not in range at depth {depth}")
        if depth >= n and len({s[:n] for s in survivors}) == 1:
            return survivors[0][:n]
        if len(survivors) > survivor_cap:
            raise NotSingletonError(
                f"{len(survivors)} surviving words at depth {depth}; "
                f"fiber not provably singleton at desk scale")
        level = [s + b for s in survivors for b in "01"]
    raise NotSingletonError(
        f"no {n}-bit consensus by depth {depth_cap}; "
        f"fiber not provably singleton at desk scale")


def reference_inverter_simple(w: StagedEnumeration) -> InverterUnderTest:
    """g(y; n) = y(⟨n,s⟩) when n enters w at s, else 0.

    Inverts the simple one-way map on its range: the output copies each
    entering element's bit back from the position that published it.
    """

    def emit(tape: OracleTape, m: int) -> int:
        s = w.entry_stage(m)
        if s is None:
            return 0
        return tape.read(pair(m, s))

    return InverterUnderTest(RealFunction(f"refinv-simple({w.label})", emit))


def reference_inverter_surjection(w: StagedEnumeration) -> InverterUnderTest:
    """Binary inverter for the one-way surjection; ignores the r half.

    Candidate bit j is y at the selection preimage of j, read at input
    position 2·(that index) because the input interleaves (y, r).
    """
    from .constructions import surjection_injection

    p = surjection_injection(w)

    def emit(tape: OracleTape, m: int) -> int:
        idx = p.invert(m)
        if idx is None:
            return 0
        return tape.read(2 * idx)

    return InverterUnderTest(RealFunction(f"refinv-surj({w.label})", emit), binary=True)


def reference_inverter_two_to_one(w: StagedEnumeration,
                                  search_stages: int = 256) -> InverterUnderTest:
    """Inverter for the k-keyed two-to-one map, built from full knowledge of w.

    Odd candidate bits copy y (the z half is public).  Even bit 2q scans the
    marker run for the stage t that selected position q and copies y(2t);
    when the scan instead shows the marker parked on q through every
    searched stage, the bit is the unread one and the witness answers 0.
    """

    def emit(tape: OracleTape, m: int) -> int:
        if m % 2 == 1:
            return tape.read(m)
        q = m // 2
        k = 0
        for t in range(search_stages):
            if w.member_at_stage(k, t) or tape.read(2 * pair(k, t) + 1) == 1:
                p_t, k = k, t + 1
            else:
                p_t = t + 1
            if p_t == q:
                return tape.read(2 * t)
        if k == q:
            return 0
        raise DivergenceError(m, f"position {q} not selected within {search_stages} stages")

    return InverterUnderTest(
        RealFunction(f"refinv-two1({w.label},{search_stages})", emit))


def _bit_use_soundness(g: RealFunction, x: BitSource, m: int,
                       trials: int = 6, seed: int = 0) -> None:
    """Spot-check that output bit m survives mutations beyond its use."""
    base_bit, use = evaluate_bit(g, x, m)
    rng = random.Random(seed)
    for _ in range(trials):
        mutated = x
        for p in {use + rng.randrange(256) for _ in range(rng.randint(1, 3))}:
            mutated = flipped_at(mutated, p)
        got, _ = evaluate_bit(g, mutated, m)
        if got != base_bit:
            raise UseSoundnessError(
                f"{g.name} bit {m} changed from {base_bit} to {got} "
                f"after mutation beyond use {use}")


def extract_simple(g: InverterUnderTest, w: StagedEnumeration, n: int,
                   validate: bool = True) -> ExtractionVerdict:
    """Decide membership of n from the inverter's behavior on the zero real.

    Let x = g(0^ω).  A set bit x(n) certifies non-membership outright: were
    n enumerated at some stage s, any preimage of 0^ω would carry 0 at
    position n.  A zero bit reduces membership to the finite question
    n ∈ W at stage u_n, the oracle-use of that single bit.
    """
    if g.binary:
        raise ValueError("extract_simple takes a unary inverter")
    y = zeros()
    bit, use = evaluate_bit(g.g, y, n)
    if validate:
        _bit_use_soundness(g.g, y, n)
        _validate_zero_inversion(g, w, n)
    if bit == 1:
        return ExtractionVerdict(n, False, use, None, "simple", "positive witness bit")
    member = w.member_at_stage(n, use)
    return ExtractionVerdict(n, member, use, use, "simple")


def _validate_zero_inversion(g: InverterUnderTest, w: StagedEnumeration,
                             n: int) -> None:
    """f(g(0^ω)) must look like 0^ω at every position the argument consults."""
    from .constructions import simple_one_way

    f = simple_one_way(w)
    x = output_source(g.g, zeros())
    fx = output_source(f, x)
    for m in range(n + 1):
        if fx.bit(m) != 0:
            raise ConsistencyError(
                f"inverter fails on the zero real: f(g(0^ω)) has 1 at bit {m}")
    s = w.entry_stage(n)
    if s is not None and fx.bit(pair(n, s)) != 0:
        raise ConsistencyError(
            f"inverter fails on the zero real: f(g(0^ω)) has 1 at bit {pair(n, s)}")


class _Fork(Exception):
    def __init__(self, position: int):
        self.position = position
        super().__init__(str(position))


@dataclass(frozen=True)
class DovetailLeaf:
    """One read pattern of the inverter: every candidate word consistent
    with `assignment` halts with the same oracle-use."""

    assignment: PartialAssignment  # constraints at positions >= |sigma|
    use: int
    length: int  # max(use, |sigma|): recorded word length for this pattern
    words: int   # number of collected words of this pattern

    def pattern(self, sigma: Word) -> Word:
        return PartialAssignment.of_word(sigma).union(self.assignment).filled_word(self.length)


@dataclass(frozen=True)
class DovetailRecord:
    """The collected prefix-free set at the crossing point, symbolically.

    Full leaves plus a count of words taken from the crossing length class
    describe W_t exactly; `materialize` expands it when small enough.
    """

    sigma: Word
    leaves: tuple[DovetailLeaf, ...]  # canonical (length, pattern) order
    k: int
    words_collected: int
    measure: Fraction
    threshold: Fraction

    def assert_prefix_free(self) -> None:
        """Exact structural check: distinct leaves conflict on a shared
        position, so no collected word extends another."""
        for i, a in enumerate(self.leaves):
            for b in self.leaves[i + 1:]:
                if a.assignment.consistent_with(b.assignment):
                    raise ConsistencyError(
                        f"leaves {a} and {b} do not conflict; collection not prefix-free")

    def materialize(self, cap: int = 4096) -> PrefixFreeSet:
        """The literal W_t, when it fits under `cap` words."""
        if self.words_collected > cap:
            raise ValueError(f"W_t holds {self.words_collected} words, over cap {cap}")
        base = PartialAssignment.of_word(self.sigma)
        remaining = self.words_collected
        collected: list[Word] = []
        for ell in sorted({leaf.length for leaf in self.leaves}):
            class_words: list[Word] = []
            for leaf in self.leaves:
                if leaf.length != ell:
                    continue
                fixed = base.union(leaf.assignment)
                free = [p for p in range(ell) if fixed.value_at(p) is None]
                for mask in range(2 ** len(free)):
                    extra = {p: str((mask >> i) & 1) for i, p in enumerate(free)}
                    class_words.append(
                        fixed.union(PartialAssignment.of_dict(extra)).filled_word(ell))
            class_words.sort()
            take = min(remaining, len(class_words))
            collected.extend(class_words[:take])
            remaining -= take
            if remaining == 0:
                break
        return PrefixFreeSet(collected)


def _dovetail_leaves(g: RealFunction, sigma: Word, bit_index: int,
                     node_budget: int, run_budget: int) -> list[DovetailLeaf]:
    """Fork tree of g's computation of one output bit over ⟦sigma⟧.

    Reads below |sigma| are answered by sigma; the first unassigned read at
    or beyond |sigma| splits the cylinder in two.  Paths that diverge are
    dropped (their candidate words never halt, so they are never collected).
    """
    leaves: list[DovetailLeaf] = []
    nodes = 0

    def explore(assign: dict[int, str]) -> None:
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise MeasureThresholdError(
                f"dovetail fork tree exceeded {node_budget} nodes; "
                f"inverter reads do not settle over ⟦{sigma or 'ε'}⟧")

        def bit_at(i: int) -> int:
            if i < len(sigma):
                return int(sigma[i])
            if i in assign:
                return int(assign[i])
            raise _Fork(i)

        tape = OracleTape(BitSource("dovetail-candidate", bit_at), budget=run_budget)
        try:
            g.emit(tape, bit_index)
        except _Fork as fork:
            for b in "01":
                explore({**assign, fork.position: b})
            return
        except (DivergenceError, _BudgetExhausted):
            return
        length = max(tape.use, len(sigma))
        pattern = PartialAssignment.of_dict(assign)
        leaves.append(DovetailLeaf(
            assignment=pattern,
            use=tape.use,
            length=length,
            words=2 ** (length - len(sigma) - len(pattern.constraints))))

    explore({})
    return leaves


def extract_randomized(g: InverterUnderTest, f: RealFunction, sigma: Word,
                       w: StagedEnumeration, n: int,
                       validate: bool = True,
                       node_budget: int = 100000,
                       run_budget: int = DEFAULT_BUDGET) -> ExtractionVerdict:
    """Decide membership of n from a total inverter over the cylinder ⟦sigma⟧.

    Dovetail the inverter's bit 2n over all words compatible with sigma in
    (length, lex) order, collecting minimal halting prefixes (a halt with
    use below |sigma| is recorded at length |sigma|).  Words arrive in
    non-decreasing length, so the first collection whose measure inside
    ⟦sigma⟧ strictly exceeds half of μ(⟦sigma⟧) is crossed inside a single
    length class k, and membership reduces to n ∈ W at stage k.
    """
    check_word(sigma)
    if not g.binary:
        raise ValueError("extract_randomized takes a binary inverter over y⊕r")
    if validate:
        yr = interleaved(finite(sigma), zeros())
        depth = max(len(sigma), n) + 1
        x = output_source(g.g, yr, budget=run_budget)
        fx = output_source(f, x, budget=run_budget)
        for m in range(depth):
            if fx.bit(m) != yr.bit(2 * m):
                raise ConsistencyError(
                    f"inverter fails over ⟦{sigma or 'ε'}⟧: f(g(y,r)) differs "
                    f"from y at bit {m}")
    leaves = _dovetail_leaves(g.g, sigma, 2 * n, node_budget, run_budget)
    leaves.sort(key=lambda leaf: (leaf.length, leaf.pattern(sigma)))
    threshold = Fraction(1, 2 ** (len(sigma) + 1))
    collected = Fraction(0)
    words_collected = 0
    crossing = None
    for ell in sorted({leaf.length for leaf in leaves}):
        group = [leaf for leaf in leaves if leaf.length == ell]
        group_measure = sum(
            (Fraction(1, 2 ** (len(sigma) + len(leaf.assignment.constraints)))
             for leaf in group), Fraction(0))
        if collected + group_measure > threshold:
            word_measure = Fraction(1, 2 ** ell)
            need = (threshold - collected) // word_measure + 1
            collected += need * word_measure
            words_collected += need
            crossing = ell
            break
        collected += group_measure
        words_collected += sum(leaf.words for leaf in group)
    if crossing is None:
        raise MeasureThresholdError(
            f"halting prefixes cover only {collected} of ⟦{sigma or 'ε'}⟧, "
            f"never exceeding {threshold}")
    record = DovetailRecord(sigma, tuple(leaves), crossing, words_collected,
                            collected, threshold)
    record.assert_prefix_free()
    member = w.member_at_stage(n, crossing)
    use = max((leaf.use for leaf in leaves if leaf.length <= crossing), default=0)
    return ExtractionVerdict(n, member, use, crossing, "randomized", record)


def extract_two_to_one(g: InverterUnderTest, w: StagedEnumeration, n: int,
                       upsilon: Word = "", zeta: Word = "",
                       validate: bool = True) -> ExtractionVerdict:
    """Decide membership of n from an inverter of the k-keyed two-to-one map.

    Build the adversarial z that parks the marker on n (after the verbatim
    prefix zeta), feed the inverter y = υ0^ω ⊕ z, and take u = the use of
    candidate bit 2n.  The marker reaches n exactly at stage n, so with
    s that stage, membership reduces to n ∈ W at stage max(u, s): a later
    enumeration would move the marker and flip the bit the inverter already
    committed to.
    """
    check_word(upsilon)
    check_word(zeta)
    if g.binary:
        raise ValueError("extract_two_to_one takes a unary inverter")
    if zeta and n <= len(zeta):
        # the verbatim prefix may overwrite column n below |zeta|; past it
        # the built z is pure formula and any n works
        raise ValueError(f"need n > |zeta| = {len(zeta)}, got n = {n}")
    z = z_builder_v1(n, zeta)
    y = interleaved(finite(upsilon), z)
    if validate:
        _bit_use_soundness(g.g, y, 2 * n)
        outcome = inverts_at_finite_stage(two_to_one_v1(w), g, y, 2 * n + 2)
        if outcome.state == "refuted":
            raise ConsistencyError(
                f"inverter fails on the constructed input: f(g(y)) differs "
                f"from y at bit {outcome.index}")
        if outcome.state == "diverged":
            raise DivergenceError(outcome.index, "inverter validation diverged")
    _, use = evaluate_bit(g.g, y, 2 * n)
    trace = marker_run_v1(w, z, n)
    s = trace.least_stage_with_k(n)
    if s is None:
        raise ConsistencyError(
            f"marker never reached {n} against its own adversarial z")
    bound = max(use, s)
    member = w.member_at_stage(n, bound)
    return ExtractionVerdict(n, member, use, bound, "two1", trace)


@dataclass(frozen=True)
class FiberCount:
    """branches: surviving words counted at read resolution (positions the
    map never reads do not multiply); surviving: the plain count."""

    branches: int
    surviving: int


def fiber_branch_count(f: RealFunction, y_prefix: Word, depth: int,
                       probe_len: Optional[int] = None,
                       budget: int = 1000000) -> FiberCount:
    """Count depth-`depth` input words still consistent with the target.

    The plain survivor count treats every unconstrained position as a
    branching point, which inflates genuinely two-element fibers with bits
    the function has not read yet.  `branches` therefore counts at read
    resolution: survivors whose deep probe succeeds are grouped by their
    bits on the positions the probe run actually read, and each position
    below `depth` that the run never reads contributes one free factor of
    two.

    How tight the count is depends on how much of the target the caller
    supplies.  Every bit of `y_prefix` is a check the continuation must
    pass, so a prefix that extends through the outputs publishing each
    selection the run makes below `depth` pins the deep branches down to
    the true fiber; a bare `depth`-bit prefix leaves later selections free
    to wander.  Reads at or past `probe_len` (default: comfortably past
    both the supplied prefix and the pairing positions consulted near
    `depth`) truncate, so deeper behaviour neither constrains nor helps.
    """
    check_word(y_prefix)
    if depth < 0:
        raise ValueError("depth must be a natural")
    if probe_len is None:
        probe_len = max(2 * pair(depth + 2, depth + 2) + 4,
                        2 * len(y_prefix) + 2)
    probe_len = max(probe_len, depth)
    rep = representation_of(f, depth, out_cap=max(len(y_prefix), 1))

    def compatible(word: Word) -> bool:
        return comparable(rep.map_word(word), y_prefix)

    level = [""]
    for _ in range(depth):
        level = [s + b for s in level if compatible(s) for b in "01"]
    survivors = [s for s in level if compatible(s)]
    if not survivors:
        return FiberCount(0, 0)

    reads_budget = [budget]
    witness_reads: Optional[tuple[int, ...]] = None
    classes: set[tuple[str, ...]] = set()
    extendable = 0
    for word in survivors:
        reads = _probe_extension(f, word, y_prefix, probe_len, reads_budget)
        if reads is None:
            continue
        extendable += 1
        if witness_reads is None:
            witness_reads = reads
        inside = [p for p in witness_reads if p < depth]
        classes.add(tuple(word[p] for p in sorted(inside)))
    if extendable == 0:
        return FiberCount(0, len(survivors))
    free = depth - len([p for p in witness_reads if p < depth])
    return FiberCount(len(classes) * 2 ** free, len(survivors))


def _probe_extension(f: RealFunction, word: Word, y_prefix: Word,
                     probe_len: int, budget: list[int]) -> Optional[tuple[int, ...]]:
    """Read positions of one successful deep continuation of `word`, if any.

    Simulates f on word + symbolic continuation: unread positions beyond
    |word| fork on demand, each output bit is matched against y_prefix, and
    a mismatch backtracks.  A fork at a position that itself indexes a
    checked output bit is validated immediately, so a wrong guess dies
    before the sweep reaches it.  A read past `probe_len` or a divergence
    truncates that bit's run, which still counts as success (the shorter
    output stays compatible) but contributes no reads.  Positions the
    computation never reads stay unassigned.
    """
    n_out = len(y_prefix)

    def probe_source(assign: dict[int, str]) -> BitSource:
        def bit_at(i: int) -> int:
            if i >= probe_len:
                raise _ReadBeyondBarrier(i)
            if i < len(word):
                return int(word[i])
            if i in assign:
                return int(assign[i])
            raise _Fork(i)
        return BitSource("fiber-probe", bit_at)

    # Depth-first over fork guesses, stack instead of recursion: deep sweeps
    # fork once per fresh position and would otherwise nest thousands deep.
    alternatives: list[tuple[tuple[int, ...], dict[int, str], frozenset[int]]] = []
    pending: tuple[int, ...] = tuple(range(n_out))
    assign: dict[int, str] = {}
    reads: frozenset[int] = frozenset()
    idx = 0
    while True:
        if idx == len(pending):
            return tuple(sorted(reads))
        j = pending[idx]
        if budget[0] <= 0:
            raise DeskError("fiber probe budget exhausted")
        budget[0] -= 1
        tape = OracleTape(probe_source(assign))
        failed = False
        try:
            b = f.emit(tape, j)
        except _Fork as fork:
            # Retry j first: its own check kills a wrong guess at once.
            # Validating the forked position next still pins it before the
            # tail sweep, without burying j's check under nested forks.
            rest = pending[idx:idx + 1]
            if fork.position < n_out:
                rest = rest + (fork.position,)
            rest = rest + pending[idx + 1:]
            alternatives.append((rest, {**assign, fork.position: "1"}, reads))
            pending, assign, idx = rest, {**assign, fork.position: "0"}, 0
            continue
        except (_ReadBeyondBarrier, _BudgetExhausted, DivergenceError):
            idx += 1
            continue
        else:
            if b != int(y_prefix[j]):
                failed = True
            else:
                reads = reads | frozenset(tape.positions_read())
                idx += 1
        if failed:
            if not alternatives:
                return None
            pending, assign, reads = alternatives.pop()
            idx = 0


@dataclass(frozen=True)
class FiniteStageOutcome:
    state: str  # "consistent" | "refuted" | "diverged"
    index: Optional[int] = None

    def __str__(self) -> str:
        if self.index is None:
            return self.state
        return f"{self.state} at bit {self.index}"


def inverts_at_finite_stage(f: RealFunction, g: InverterUnderTest,
                            y: BitSource, n: int,
                            budget: int = DEFAULT_BUDGET) -> FiniteStageOutcome:
    """Does f(g(y)) agree with y on the first n bits, within budget?

    Consistent runs may still hide failures past n; refutation is final and
    monotone in n (the same first disagreement refutes every deeper check).
    """
    x = output_source(g.g, y, budget=budget)
    fx = output_source(f, x, budget=budget)
    for m in range(n):
        try:
            b = fx.bit(m)
        except DivergenceError as exc:
            return FiniteStageOutcome("diverged", exc.bit_index)
        if b != y.bit(m):
            return FiniteStageOutcome("refuted", m)
    return FiniteStageOutcome("consistent")
