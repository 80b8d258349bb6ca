"""Exact-integer engine and toolkit for semantic numeration systems."""

from .model import (
    CAO,
    CAOValidationError,
    CardinalAbstractEntity,
    EntityName,
    Family,
    Form,
    Kind,
    Multicardinal,
    Multinumber,
    OperatorKind,
    OperatorSpec,
    RADIX_EXCESS_FACT,
    RADIX_EXCESS_VALUE,
    RADIX_MULTIPLICITY,
    new_cao,
)
from .operators import OperatorEffect, common_carry, eval_operator, is_allowed, partial_carry, remainder
from .engine import (
    RunResult,
    SequentialDeclared,
    SequentialPermuted,
    Status,
    Synchronous,
    confluence_check,
    multicardinal_of,
    reset,
    run,
    step,
)
from .topology import classify_entities, classify_sns, check_weights, derive_weights, detect_cycles
from .dsl import parse, serialize
from .classic import ChainSpec, decode, encode, make_chain, make_fan_in, make_fan_out, make_mixed, oracle_digits
from .scenarios import load_scenario

__version__ = "0.1.0"
