"""Two-way quantum automata: classical-head 2QCFA and quantum-head KWQFA."""

from .classical_head import (
    ANY,
    LoopProfile,
    Measure,
    MonteCarloStats,
    Rule,
    Tqcfa,
    Unitary,
    build_eq_tqcfa,
    build_pal_tqcfa,
    eq_accept_per_iter,
    eq_quantum_phase_reject,
    loop_semantics,
    pal_accept_per_iter,
    pal_quantum_phase_reject,
    tqcfa_exact_accept,
    tqcfa_monte_carlo,
)
from .quantum_head import (
    TwoWayKwqfa,
    TwoWayRun,
    WellformednessReport,
    build_eq_15kwqfa,
    check_wellformed,
    global_operator,
    twoway_kwqfa_run,
)
