import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from qfasim.errors import NonTerminationError, QfaError, ValidationError, WellformednessError
from qfasim.quantum import BasisPartition
from qfasim.twoway import (
    Measure,
    Rule,
    Tqcfa,
    TwoWayKwqfa,
    Unitary,
    build_eq_15kwqfa,
    build_eq_tqcfa,
    build_pal_tqcfa,
    check_wellformed,
    eq_quantum_phase_reject,
    loop_semantics,
    pal_quantum_phase_reject,
    tqcfa_exact_accept,
    tqcfa_monte_carlo,
    twoway_kwqfa_run,
)
from qfasim.twoway.classical_head import trial_seed


# loop analysis ---------------------------------------------------------------------


def test_loop_semantics_examples():
    assert loop_semantics(0, 0.1) == (1, 10)
    r = 0.3
    acc, _ = loop_semantics(r, r)
    assert acc == pytest.approx((1 - r) / (2 - r))
    assert acc < 0.5
    assert loop_semantics(1, 0.5) == (0, 1)
    with pytest.raises(NonTerminationError):
        loop_semantics(0, 0)


def test_loop_semantics_monotone():
    grid = [i / 10 for i in range(11)]
    for r in grid:
        vals = [loop_semantics(r, a)[0] for a in grid[1:]]
        assert all(x <= y + 1e-15 for x, y in zip(vals, vals[1:]))
    for a in grid[1:]:
        vals = [loop_semantics(r, a)[0] for r in grid]
        assert all(x >= y - 1e-15 for x, y in zip(vals, vals[1:]))


# quantum phases ----------------------------------------------------------------------


def test_eq_phase_examples():
    assert eq_quantum_phase_reject("ab") == 0
    assert eq_quantum_phase_reject("a") == pytest.approx(math.sin(math.sqrt(2) * math.pi) ** 2, abs=1e-15)
    assert eq_quantum_phase_reject("a") == pytest.approx(0.9291, abs=1e-4)
    for n in range(1, 11):
        for t in itertools.product("ab", repeat=n):
            w = "".join(t)
            r = eq_quantum_phase_reject(w)
            assert (r == 0) == (w.count("a") == w.count("b"))


def test_pal_phase_examples():
    assert pal_quantum_phase_reject("aba") == 0
    assert pal_quantum_phase_reject("") == 0
    assert pal_quantum_phase_reject("ab") >= Fraction(1, 625)
    assert isinstance(pal_quantum_phase_reject("ab"), Fraction)


def test_exact_profiles():
    assert tqcfa_exact_accept("EQ", "ab", 2).accept_prob == 1
    assert tqcfa_exact_accept("PAL", "aba", 2).accept_prob == 1
    prof = tqcfa_exact_accept("EQ", "a", 2)
    r, a = math.sin(math.sqrt(2) * math.pi) ** 2, 2 ** -2 / 4
    assert prof.accept_prob == pytest.approx((1 - r) * a / (r + (1 - r) * a))
    with pytest.raises(ValueError):
        tqcfa_exact_accept("MAJ", "ab", 2)


def test_pal_reject_bound_on_nonpalindromes():
    k = 2
    for n in range(1, 7):
        for t in itertools.product("ab", repeat=n):
            w = "".join(t)
            if w != w[::-1]:
                assert tqcfa_exact_accept("PAL", w, k).reject_prob >= 16 * k / (16 * k + 25)


def test_builders_require_k_above_one():
    with pytest.raises(ValueError):
        build_eq_tqcfa(1)
    with pytest.raises(ValueError):
        build_pal_tqcfa(0)


# Monte Carlo ----------------------------------------------------------------------------


def test_member_always_accepts():
    st = tqcfa_monte_carlo(build_eq_tqcfa(2), "ba", 200, seed=1)
    assert st.accepts == 200 and st.capped == 0


def test_pal_nonmember_frequency():
    m = build_pal_tqcfa(2)
    st = tqcfa_monte_carlo(m, "ab", 600, seed=2)
    assert st.within_sigma(tqcfa_exact_accept("PAL", "ab", 2).accept_prob)


def test_seeded_runs_reproducible():
    m = build_eq_tqcfa(2)
    a = tqcfa_monte_carlo(m, "aab", 300, seed=9)
    b = tqcfa_monte_carlo(m, "aab", 300, seed=9)
    assert a == b
    assert trial_seed(9, 3) == trial_seed(9, 3) != trial_seed(9, 4)


def _always_reject():
    return Tqcfa(("s", "acc", "rej"), ("q1",), ("a",),
                 {("s", "*"): Rule(Unitary(np.eye(1, dtype=complex)), ("rej", 0))}, "s", "acc", "rej")


def test_always_reject_machine():
    st = tqcfa_monte_carlo(_always_reject(), "aa", 50)
    assert st.accept_freq == 0 and st.rejects == 50


def test_step_cap_flags_trials():
    loop = Tqcfa(("s", "acc", "rej"), ("q1",), ("a",),
                 {("s", "*"): Rule(Unitary(np.eye(1, dtype=complex)), ("s", 0))}, "s", "acc", "rej")
    st = tqcfa_monte_carlo(loop, "a", 5, max_steps=100)
    assert st.capped == 5 and st.accepts == st.rejects == 0


def test_tqcfa_validation():
    ident = Unitary(np.eye(1, dtype=complex))
    with pytest.raises(ValidationError):
        Tqcfa(("s", "acc"), ("q1",), ("a",), {}, "s", "acc", "acc")
    with pytest.raises(ValidationError):
        Tqcfa(("s", "acc", "rej"), ("q1",), ("a",), {("s", "¢"): Rule(ident, ("s", -1))}, "s", "acc", "rej")
    with pytest.raises(ValidationError):
        Tqcfa(("s", "acc", "rej"), ("q1",), ("a",),
              {("s", "a"): Rule(Unitary(np.array([[2.0]])), ("s", 1))}, "s", "acc", "rej")
    part = BasisPartition(((0,), (1,)), ("x", "y"), 2)
    with pytest.raises(ValidationError):
        Tqcfa(("s", "acc", "rej"), ("q1", "q2"), ("a",),
              {("s", "a"): Rule(Measure(part), {"x": ("acc", 0)})}, "s", "acc", "rej")


def test_wildcard_cannot_leave_tape():
    m = Tqcfa(("s", "acc", "rej"), ("q1",), ("a",),
              {("s", "*"): Rule(Unitary(np.eye(1, dtype=complex)), ("s", -1))}, "s", "acc", "rej")
    with pytest.raises(QfaError):
        m.rule("s", "¢")


def test_eq_mean_steps_grow_polynomially():
    m = build_eq_tqcfa(2)
    means = [tqcfa_monte_carlo(m, "ab" * k, 60, seed=k).mean_steps for k in range(1, 5)]
    assert all(x < y for x, y in zip(means, means[1:]))
    # expected time is polynomial: at most a constant times |w|^4
    assert all(mean <= 200 * (2 * k) ** 4 for k, mean in enumerate(means, start=1))


# quantum head ------------------------------------------------------------------------


def test_eq15_examples():
    m = build_eq_15kwqfa()
    for w, acc in (("ab", 1.0), ("ba", 1.0), ("a", 0.5), ("aab", 0.5)):
        run = twoway_kwqfa_run(m, w)
        assert run.p_acc == pytest.approx(acc, abs=1e-12)
        assert run.p_rej == pytest.approx(1 - acc, abs=1e-12)
        assert run.residual <= 1e-12


def test_eq15_terminates_quickly():
    m = build_eq_15kwqfa()
    for n in range(7):
        for t in itertools.product("ab", repeat=n):
            run = twoway_kwqfa_run(m, "".join(t))
            assert run.steps <= 2 * (n + 2)
            assert run.residual == 0


def test_eq15_wellformed():
    rep = check_wellformed(build_eq_15kwqfa(), range(1, 7))
    assert rep.ok and rep.words_checked == sum(2 ** n for n in range(1, 7))


def test_enter_reject_at_left_end():
    m = TwoWayKwqfa(("q", "r"), ("a",), {(0, "¢"): ((1, 0, 1.0),)}, frozenset(), frozenset({1}))
    run = twoway_kwqfa_run(m, "aa")
    assert (run.p_acc, run.p_rej, run.residual, run.steps) == (0, 1, 0, 1)


def test_identity_machine_wellformed():
    trans = {(0, s): ((0, 0, 1.0),) for s in ("¢", "a", "$")}
    m = TwoWayKwqfa(("q",), ("a",), trans, frozenset(), frozenset())
    assert check_wellformed(m, [1, 2, 3]).ok
    run = twoway_kwqfa_run(m, "a", max_steps=7)
    assert run.residual == pytest.approx(1) and run.steps == 7


def test_nonunit_row_reported():
    trans = {(0, s): ((0, 1, 0.9),) for s in ("¢", "a")}
    trans[(0, "$")] = ((1, 0, 1.0),)
    m = TwoWayKwqfa(("q", "acc"), ("a",), trans, frozenset({1}), frozenset())
    rep = check_wellformed(m, [1])
    assert not rep.ok
    assert rep.violation.first == "(q, 0)"
    assert "expected 1" in str(rep.violation)
    with pytest.raises(WellformednessError):
        twoway_kwqfa_run(m, "a")


def test_off_tape_move_reported():
    trans = {(0, "¢"): ((0, 1, 1.0),), (0, "a"): ((0, 1, 1.0),), (0, "$"): ((0, 1, 1.0),)}
    rep = check_wellformed(TwoWayKwqfa(("q",), ("a",), trans, frozenset(), frozenset()), [1])
    assert not rep.ok and rep.violation.second == "off-tape"


def test_one_and_half_forbids_left_moves():
    with pytest.raises(ValidationError):
        TwoWayKwqfa(("q",), ("a",), {(0, "a"): ((0, -1, 1.0),)}, frozenset(), frozenset(), one_and_half=True)


def test_two_way_left_moves_supported():
    # bounce once off the right end-marker, then accept back at the left one
    trans = {
        (0, "¢"): ((0, 1, 1.0),), (0, "a"): ((0, 1, 1.0),), (0, "$"): ((1, -1, 1.0),),
        (1, "a"): ((1, -1, 1.0),), (1, "¢"): ((2, 0, 1.0),),
    }
    m = TwoWayKwqfa(("go", "back", "acc"), ("a",), trans, frozenset({2}), frozenset())
    run = twoway_kwqfa_run(m, "aa")
    assert run.p_acc == 1 and run.steps == 7
