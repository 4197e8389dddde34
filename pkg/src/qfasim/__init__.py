"""Simulation, conversion and equivalence checking for quantum finite automata."""

from .classical import (
    AcceptanceMode,
    Decision,
    Gfa,
    ModeKind,
    Pfa,
    classify_word,
    dfa_as_pfa,
    gfa_value,
    lift,
    pfa_accept_prob,
)
from .equivalence import EquivalenceVerdict, gfa_equiv, qfa_equiv, qfa_to_gfa
from .errors import (
    AlphabetError,
    DimensionError,
    NonTerminationError,
    ParseError,
    QfaError,
    ValidationError,
    WellformednessError,
)
from .oneway import (
    GeneralQfa,
    Kwqfa,
    Mcqfa,
    build_modp_2state,
    build_modp_logstate,
    build_neq_nqfa,
    general_qfa_accept,
    kwqfa_accept,
    kwqfa_run,
    mcqfa_accept,
    pfa_to_qfa,
    restart_accept_prob,
)
from .quantum import (
    BasisPartition,
    DensityMatrix,
    StateVector,
    Superoperator,
    apply_superoperator,
    partial_measure,
    validate_kraus,
    validate_unitary,
)

__version__ = "0.1.0"
