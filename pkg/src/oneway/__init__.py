"""One-way functions on Cantor space, checkable at desk scale.

Exact cylinder measures, finite-prefix stream transducers with oracle-use
accounting, staged enumerations standing in for the halting set, the marker
constructions built on them, and the extraction adversaries that turn any
working inverter into a membership decision procedure.
"""

from .bitcore import (
    PartialAssignment,
    PrefixFreeSet,
    Word,
    assignment_measure,
    check_word,
    comparable,
    deinterleave,
    interleave,
    pair,
    prefix_set_from_file,
    unpair,
)
from .constructions import (
    ConstructionHandle,
    Injection,
    MarkerStep,
    MarkerTrace,
    bit_select,
    double_injection,
    identity_injection,
    marker_run_v1,
    marker_run_v2,
    one_way_surjection,
    partial_injection,
    preimage_witness,
    replace_column,
    shift_injection,
    simple_one_way,
    stage_where_counter_reaches,
    surjection_injection,
    two_to_one_v1,
    two_to_one_v2,
    witness_function,
    z_builder_v1,
)
from .enumeration import (
    DecidedSet,
    StagedEnumeration,
    StagedStringEnumeration,
    collatz_length,
    collatz_toy,
    column_hit,
    decided_set_from_file,
    enumeration_from_file,
    string_enum_from_file,
)
from .errors import (
    ConsistencyError,
    DeskError,
    DivergenceError,
    HorizonError,
    InjectivityError,
    MeasureThresholdError,
    NotInRangeError,
    NotSingletonError,
    PrefixFreeError,
    SpecParseError,
    UseSoundnessError,
)
from .inversion import (
    DovetailLeaf,
    DovetailRecord,
    ExtractionVerdict,
    FiberCount,
    FiniteStageOutcome,
    InverterUnderTest,
    extract_randomized,
    extract_simple,
    extract_two_to_one,
    fiber_branch_count,
    inverts_at_finite_stage,
    reference_inverter_simple,
    reference_inverter_surjection,
    reference_inverter_two_to_one,
    unique_path_invert,
)
from .streams import (
    DEFAULT_BUDGET,
    BitSource,
    EvalResult,
    OracleTape,
    RealFunction,
    Representation,
    UseSoundnessReport,
    column_of,
    column_source,
    columns_from_file,
    constant_function,
    evaluate,
    evaluate_bit,
    finite,
    flipped_at,
    identity_function,
    interleave_outputs,
    interleaved,
    ones,
    output_source,
    periodic,
    preimage_tree,
    random_source,
    representation_of,
    source_agrees,
    use_soundness_check,
    zeros,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_BUDGET",
    "BitSource",
    "ConsistencyError",
    "ConstructionHandle",
    "DecidedSet",
    "DeskError",
    "DivergenceError",
    "DovetailLeaf",
    "DovetailRecord",
    "EvalResult",
    "ExtractionVerdict",
    "FiberCount",
    "FiniteStageOutcome",
    "HorizonError",
    "Injection",
    "InjectivityError",
    "InverterUnderTest",
    "MarkerStep",
    "MarkerTrace",
    "MeasureThresholdError",
    "NotInRangeError",
    "NotSingletonError",
    "OracleTape",
    "PartialAssignment",
    "PrefixFreeError",
    "PrefixFreeSet",
    "RealFunction",
    "Representation",
    "SpecParseError",
    "StagedEnumeration",
    "StagedStringEnumeration",
    "UseSoundnessError",
    "UseSoundnessReport",
    "Word",
    "assignment_measure",
    "bit_select",
    "check_word",
    "collatz_length",
    "collatz_toy",
    "column_hit",
    "column_of",
    "column_source",
    "columns_from_file",
    "comparable",
    "constant_function",
    "decided_set_from_file",
    "deinterleave",
    "double_injection",
    "enumeration_from_file",
    "evaluate",
    "evaluate_bit",
    "extract_randomized",
    "extract_simple",
    "extract_two_to_one",
    "fiber_branch_count",
    "finite",
    "flipped_at",
    "identity_function",
    "identity_injection",
    "interleave",
    "interleave_outputs",
    "interleaved",
    "inverts_at_finite_stage",
    "marker_run_v1",
    "marker_run_v2",
    "one_way_surjection",
    "ones",
    "output_source",
    "pair",
    "partial_injection",
    "periodic",
    "preimage_tree",
    "preimage_witness",
    "prefix_set_from_file",
    "random_source",
    "reference_inverter_simple",
    "reference_inverter_surjection",
    "reference_inverter_two_to_one",
    "replace_column",
    "representation_of",
    "shift_injection",
    "simple_one_way",
    "source_agrees",
    "stage_where_counter_reaches",
    "string_enum_from_file",
    "surjection_injection",
    "two_to_one_v1",
    "two_to_one_v2",
    "unique_path_invert",
    "unpair",
    "use_soundness_check",
    "witness_function",
    "z_builder_v1",
    "zeros",
]
