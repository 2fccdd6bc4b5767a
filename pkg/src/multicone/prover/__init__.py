"""Shannon-type inequality prover over joint-entropy vectors."""

from .expr import EntropyVector, ExpressionSyntaxError, H, I, UnknownVariable, parse_expression, to_text, zero
from .lemmas import LEMMAS, UnknownLemma, column11_chain, cutset_instances, verify_chain, verify_cutsets, verify_lemma
from .shannon import (
    ConstraintSet,
    ProofCertificate,
    TooManyVariables,
    Unproven,
    Witness,
    elemental_count,
    elemental_inequalities,
    find_gf2_witness,
    functional,
    independent,
    prove,
)

__all__ = [
    "ConstraintSet",
    "EntropyVector",
    "ExpressionSyntaxError",
    "H",
    "I",
    "LEMMAS",
    "ProofCertificate",
    "TooManyVariables",
    "UnknownLemma",
    "UnknownVariable",
    "Unproven",
    "Witness",
    "column11_chain",
    "cutset_instances",
    "elemental_count",
    "elemental_inequalities",
    "find_gf2_witness",
    "functional",
    "independent",
    "parse_expression",
    "prove",
    "to_text",
    "verify_chain",
    "verify_cutsets",
    "verify_lemma",
    "zero",
]
