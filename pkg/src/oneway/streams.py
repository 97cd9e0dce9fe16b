"""Infinite bit sources, oracle tapes with use accounting, representations,
and preimage trees.

A BitSource is a total deterministic map position → bit.  An OracleTape
wraps a source and records exactly how much of it a computation reads; the
oracle-use of an evaluation is (max position read) + 1.  A RealFunction
emits output bits one at a time through a tape, so use accounting and read
barriers apply to every construction uniformly.

Partiality is desk-scale: every output bit gets a step budget (one step per
tape read, default 10^6) and budget exhaustion surfaces as a divergence
error, never nontermination.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .bitcore import Word, check_word, pair, unpair
from .errors import (
    DivergenceError,
    HorizonError,
    SpecParseError,
    _BudgetExhausted,
    _ReadBeyondBarrier,
)

DEFAULT_BUDGET = 10**6


@dataclass(frozen=True)
class BitSource:
    """A total map from positions to bits, with a printable descriptor."""

    spec: str
    _bit: Callable[[int], int]

    def bit(self, i: int) -> int:
        if i < 0:
            raise ValueError(f"source position must be a natural, got {i}")
        b = self._bit(i)
        if b not in (0, 1):
            raise ValueError(f"source {self.spec} produced non-bit {b!r} at {i}")
        return b

    def prefix(self, n: int) -> Word:
        return "".join(str(self.bit(i)) for i in range(n))

    def __repr__(self) -> str:
        return f"BitSource({self.spec})"


def zeros() -> BitSource:
    return BitSource("zeros", lambda i: 0)


def ones() -> BitSource:
    return BitSource("ones", lambda i: 1)


def periodic(word: Word) -> BitSource:
    check_word(word)
    if not word:
        raise ValueError("periodic source needs a nonempty word")
    return BitSource(f"periodic:{word}", lambda i: int(word[i % len(word)]))


def finite(word: Word) -> BitSource:
    """`word` followed by zeros (an eventually-zero real)."""
    check_word(word)
    return BitSource(f"finite:{word}", lambda i: int(word[i]) if i < len(word) else 0)


def flipped_at(base: BitSource, position: int) -> BitSource:
    if position < 0:
        raise ValueError("flip position must be a natural")
    return BitSource(
        f"flip:{position}:{base.spec}",
        lambda i: base.bit(i) ^ 1 if i == position else base.bit(i),
    )


def interleaved(even: BitSource, odd: BitSource) -> BitSource:
    """The join: bit 2n from `even`, bit 2n+1 from `odd`."""
    return BitSource(
        f"interleave({even.spec},{odd.spec})",
        lambda i: even.bit(i // 2) if i % 2 == 0 else odd.bit(i // 2),
    )


def column_source(assignments: dict[int, BitSource], default: BitSource) -> BitSource:
    """Bit at pair(c,i) comes from assignments[c] at i, or from `default` at
    the absolute position when column c is not assigned."""
    cols = dict(assignments)

    def bit(m: int) -> int:
        c, i = unpair(m)
        src = cols.get(c)
        return src.bit(i) if src is not None else default.bit(m)

    inner = ",".join(f"{c}:{s.spec}" for c, s in sorted(cols.items()))
    return BitSource(f"columns({inner};default={default.spec})", bit)


def column_of(w: BitSource, n: int) -> BitSource:
    """Column n of w: the source i ↦ w(pair(n,i))."""
    return BitSource(f"column:{n}:{w.spec}", lambda i: w.bit(pair(n, i)))


def random_source(seed: int) -> BitSource:
    rng = random.Random(seed)
    cache: list[int] = []

    def bit(i: int) -> int:
        while len(cache) <= i:
            cache.append(rng.getrandbits(1))
        return cache[i]

    return BitSource(f"random:{seed}", bit)


def columns_from_file(path: str) -> BitSource:
    """Column file: lines `COL WORD`; column COL carries WORD then zeros;
    unlisted columns are all zero.  '#' comments and blank lines ignored."""
    assignments: dict[int, BitSource] = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) != 2:
                    raise SpecParseError(f"{path}:{lineno}: expected `COL WORD`")
                try:
                    col = int(parts[0])
                    word = check_word(parts[1])
                except ValueError as exc:
                    raise SpecParseError(f"{path}:{lineno}: {exc}") from exc
                if col < 0:
                    raise SpecParseError(f"{path}:{lineno}: negative column {col}")
                if col in assignments:
                    raise SpecParseError(f"{path}:{lineno}: column {col} listed twice")
                assignments[col] = finite(word)
    except OSError as exc:
        raise SpecParseError(f"cannot read column file {path}: {exc}") from exc
    return column_source(assignments, zeros())


class OracleTape:
    """Read head over a BitSource with use accounting.

    One tape per evaluation; never share across concurrent evaluations.
    `use` is (max position read) + 1, monotone over the tape's lifetime.
    An optional barrier turns reads at positions ≥ barrier into the internal
    barrier exception, which is how representations truncate their output.
    """

    def __init__(self, source: BitSource, barrier: Optional[int] = None,
                 budget: int = DEFAULT_BUDGET):
        self.source = source
        self.barrier = barrier
        self.use = 0
        self._budget_limit = budget
        self._budget_left = budget
        self._read_order: list[int] = []
        self._read_set: set[int] = set()

    def reset_budget(self) -> None:
        self._budget_left = self._budget_limit

    def read(self, i: int) -> int:
        if i < 0:
            raise ValueError(f"tape position must be a natural, got {i}")
        if self.barrier is not None and i >= self.barrier:
            raise _ReadBeyondBarrier(i)
        if self._budget_left <= 0:
            raise _BudgetExhausted()
        self._budget_left -= 1
        b = self.source.bit(i)
        if i + 1 > self.use:
            self.use = i + 1
        if i not in self._read_set:
            self._read_set.add(i)
            self._read_order.append(i)
        return b

    def read_mark(self) -> int:
        """Number of distinct positions read so far (for rollback bookkeeping)."""
        return len(self._read_order)

    def rollback_reads(self, mark: int) -> None:
        """Forget positions first read after `mark` (use stays monotone)."""
        for pos in self._read_order[mark:]:
            self._read_set.discard(pos)
        del self._read_order[mark:]

    def positions_read(self) -> tuple[int, ...]:
        return tuple(sorted(self._read_set))


@dataclass(frozen=True)
class RealFunction:
    """A function on Cantor space presented as a bit emitter.

    `emit(tape, m)` produces output bit m, reading the input only through
    the tape.  Determinism and use-soundness (output depends only on the
    prefix actually read) are the contract; useSoundnessCheck spot-checks
    the latter.
    """

    name: str
    emit: Callable[[OracleTape, int], int]

    def __repr__(self) -> str:
        return f"RealFunction({self.name})"


@dataclass(frozen=True)
class EvalResult:
    output: Word
    use: int

    def __iter__(self):
        return iter((self.output, self.use))


def evaluate(f: RealFunction, x: BitSource, n: int,
             budget: int = DEFAULT_BUDGET) -> EvalResult:
    """First n output bits of f on x, plus the exact oracle-use.

    One tape serves all n bits, so `use` covers the whole prefix
    computation; the step budget is per output bit.
    """
    tape = OracleTape(x, budget=budget)
    bits = []
    for m in range(n):
        tape.reset_budget()
        try:
            bits.append(str(f.emit(tape, m)))
        except _BudgetExhausted:
            raise DivergenceError(m, "step budget exhausted") from None
    return EvalResult("".join(bits), tape.use)


def evaluate_bit(f: RealFunction, x: BitSource, m: int,
                 budget: int = DEFAULT_BUDGET) -> tuple[int, int]:
    """Output bit m on a fresh tape: (bit, oracle-use of that bit alone)."""
    tape = OracleTape(x, budget=budget)
    try:
        b = f.emit(tape, m)
    except _BudgetExhausted:
        raise DivergenceError(m, "step budget exhausted") from None
    return b, tape.use


def identity_function() -> RealFunction:
    return RealFunction("identity", lambda tape, m: tape.read(m))


def constant_function(source: BitSource, name: Optional[str] = None) -> RealFunction:
    return RealFunction(name or f"const({source.spec})",
                        lambda tape, m: source.bit(m))


def interleave_outputs(f: RealFunction, g: RealFunction) -> RealFunction:
    """Output join f(x)⊕g(x): even output bits from f, odd from g, one input."""

    def emit(tape: OracleTape, m: int) -> int:
        return f.emit(tape, m // 2) if m % 2 == 0 else g.emit(tape, m // 2)

    return RealFunction(f"join({f.name},{g.name})", emit)


def output_source(f: RealFunction, x: BitSource,
                  budget: int = DEFAULT_BUDGET) -> BitSource:
    """f(x) as a lazy memoized BitSource (divergence surfaces on access)."""
    tape = OracleTape(x, budget=budget)
    cache: dict[int, int] = {}

    def bit(i: int) -> int:
        if i not in cache:
            tape.reset_budget()
            try:
                cache[i] = f.emit(tape, i)
            except _BudgetExhausted:
                raise DivergenceError(i, "step budget exhausted") from None
        return cache[i]

    return BitSource(f"{f.name}({x.spec})", bit)


class Representation:
    """Finite-depth view of the monotone word map of a RealFunction.

    map_word(σ) is the longest output computable from the prefix σ alone,
    obtained by running the emitter against a read barrier at |σ|.  Any
    failure to produce the next bit (barrier, budget, genuine divergence,
    horizon overrun) truncates the output; monotone by construction.
    """

    def __init__(self, f: RealFunction, depth: int, out_cap: int,
                 budget: int = DEFAULT_BUDGET):
        if depth < 0 or out_cap < 0:
            raise ValueError("depth and out_cap must be naturals")
        self.f = f
        self.depth = depth
        self.out_cap = out_cap
        self.budget = budget
        self._memo: dict[Word, tuple[Word, tuple[int, ...]]] = {}

    def _run(self, sigma: Word) -> tuple[Word, tuple[int, ...]]:
        check_word(sigma)
        if len(sigma) > self.depth:
            raise ValueError(f"word of length {len(sigma)} exceeds depth {self.depth}")
        hit = self._memo.get(sigma)
        if hit is not None:
            return hit
        tape = OracleTape(finite(sigma), barrier=len(sigma), budget=self.budget)
        bits = []
        for j in range(self.out_cap):
            tape.reset_budget()
            mark = tape.read_mark()
            try:
                bits.append(str(self.f.emit(tape, j)))
            except (_ReadBeyondBarrier, _BudgetExhausted, DivergenceError,
                    HorizonError):
                # drop the aborted bit's reads so positions_read() covers
                # exactly the emitted output
                tape.rollback_reads(mark)
                break
        result = ("".join(bits), tape.positions_read())
        self._memo[sigma] = result
        return result

    def map_word(self, sigma: Word) -> Word:
        return self._run(sigma)[0]

    def map_with_reads(self, sigma: Word) -> tuple[Word, tuple[int, ...]]:
        """(map_word(σ), sorted positions read by the emitted bits)."""
        return self._run(sigma)


def representation_of(f: RealFunction, depth: int,
                      out_cap: Optional[int] = None,
                      budget: int = DEFAULT_BUDGET) -> Representation:
    if out_cap is None:
        out_cap = max(2 * depth + 8, 48)
    return Representation(f, depth, out_cap, budget)


def source_agrees(y: BitSource, word: Word) -> bool:
    return all(y.bit(i) == int(ch) for i, ch in enumerate(word))


def preimage_tree(rep: Representation, y: BitSource, depth: int) -> list[Word]:
    """All words σ, |σ| ≤ depth, whose image under rep is a prefix of y.

    Downward closed, so the search prunes: once map_word(σ) disagrees with
    y, monotonicity kills every extension of σ.  Sorted (length, lex).
    """
    if depth > rep.depth:
        raise ValueError(f"tree depth {depth} exceeds representation depth {rep.depth}")
    out: list[Word] = []
    level = [""]
    for _ in range(depth + 1):
        keep = [s for s in level if source_agrees(y, rep.map_word(s))]
        out.extend(keep)
        level = [s + b for s in keep for b in "01"]
    return sorted(out, key=lambda w: (len(w), w))


@dataclass(frozen=True)
class UseSoundnessReport:
    function: str
    bits: int
    use: int
    trials: int
    violations: tuple[tuple[tuple[int, ...], Word, Word], ...]

    @property
    def passed(self) -> bool:
        return not self.violations


def use_soundness_check(f: RealFunction, x: BitSource, n: int,
                        trials: int, seed: int = 0) -> UseSoundnessReport:
    """Mutate positions beyond the reported use; the output must not move.

    Each trial flips 1 to 3 positions in [use, use + 256) and re-evaluates
    the same n bits.  Violations carry the flipped positions and both
    outputs as a witness.
    """
    base = evaluate(f, x, n)
    rng = random.Random(seed)
    violations = []
    for _ in range(trials):
        count = rng.randint(1, 3)
        positions = tuple(sorted({base.use + rng.randrange(256) for _ in range(count)}))
        mutated = x
        for p in positions:
            mutated = flipped_at(mutated, p)
        got = evaluate(f, mutated, n)
        if got.output != base.output:
            violations.append((positions, base.output, got.output))
    return UseSoundnessReport(f.name, n, base.use, trials, tuple(violations))
