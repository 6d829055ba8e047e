"""Exact scalars, rule-based sequences, the expression DSL and limit probing."""
from .dsl import DSLSyntaxError, UnknownBuiltinError, parse_expr, pretty, sequence_from_expr
from .probe import (
    DEFAULT, Outcome, ProbeConfig, Verdict, conjunction, limit_equals, limit_probe, sup_probe,
)
from .sequence import (
    ONE, ZERO, Cumulative, EvaluationError, Rational, Sequence, WeightError, Weights,
    constant, delta, e, enumerate_, geometric, harmonic, nabla, render, shift, to_rational,
    unit, zero,
)

__all__ = [
    "DSLSyntaxError", "UnknownBuiltinError", "parse_expr", "pretty", "sequence_from_expr",
    "DEFAULT", "Outcome", "ProbeConfig", "Verdict", "conjunction", "limit_equals", "limit_probe", "sup_probe",
    "ONE", "ZERO", "Cumulative", "EvaluationError", "Rational", "Sequence", "WeightError", "Weights",
    "constant", "delta", "e", "enumerate_", "geometric", "harmonic", "nabla", "render", "shift",
    "to_rational", "unit", "zero",
]
