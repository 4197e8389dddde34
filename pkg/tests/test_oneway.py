import math
from fractions import Fraction

import numpy as np
import pytest

from qfasim import numeric as nm
from qfasim.classical import Pfa, dfa_as_pfa, pfa_accept_prob
from qfasim.errors import AlphabetError, NonTerminationError, ValidationError
from qfasim.oneway import (
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
    mcqfa_as_general,
    mcqfa_as_kwqfa,
    modp_multiblock_prob,
    pfa_to_qfa,
    restart_accept_prob,
)
from qfasim.quantum import Superoperator, complete_unitary, validate_kraus


def test_mod5_examples():
    m = build_modp_2state(5)
    assert mcqfa_accept(m, "a" * 5) == pytest.approx(1, abs=1e-12)
    assert mcqfa_accept(m, "a") == pytest.approx(math.cos(2 * math.pi / 5) ** 2, abs=1e-12)
    assert mcqfa_accept(build_modp_2state(5, 2), "a") == pytest.approx(0.6545084971874737, abs=1e-12)
    assert mcqfa_accept(build_modp_2state(3), "") == 1


@pytest.mark.parametrize("p,k", [(4, 1), (5, 0), (5, 5), (1, 1)])
def test_modp_rejects_bad_parameters(p, k):
    with pytest.raises(ValueError):
        build_modp_2state(p, k)


def test_identity_machine_accepts_empty():
    m = Mcqfa(("q1", "q2"), ("a",), {"a": np.eye(2)}, {0})
    assert mcqfa_accept(m, "") == 1
    with pytest.raises(AlphabetError):
        mcqfa_accept(m, "b")


def test_nonunitary_rejected_with_symbol():
    with pytest.raises(ValidationError) as err:
        Mcqfa(("q1", "q2"), ("a",), {"a": [[1, 0], [0, 0.5]]}, {0})
    assert "U['a']" in str(err.value)


def test_logstate_members_and_bound():
    m = build_modp_logstate(31, 0.25, seed=7)
    d = math.ceil(2 * math.log2(2 * 31 / 0.25))
    assert m.n == 2 * d
    for j in (0, 31, 62):
        assert mcqfa_accept(m, "a" * j) == pytest.approx(1, abs=1e-12)
    worst = max(mcqfa_accept(m, "a" * j) for j in range(1, 31))
    assert worst <= 0.25
    assert worst == pytest.approx(m.info["worst_nonmember"], abs=1e-12)


def test_multiblock_matches_closed_form():
    m = build_modp_logstate(7, 0.5, seed=3)
    ks = m.info["ks"]
    for j in range(15):
        assert mcqfa_accept(m, "a" * j) == pytest.approx(modp_multiblock_prob(7, ks, j), abs=1e-12)


def test_logstate_requires_prime():
    with pytest.raises(ValueError):
        build_modp_logstate(9, 0.25)


def test_neq_examples():
    m = build_neq_nqfa()
    assert mcqfa_accept(m, "ab") == pytest.approx(0, abs=1e-24)
    assert mcqfa_accept(m, "aabb") == pytest.approx(0, abs=1e-24)
    assert mcqfa_accept(m, "a") == pytest.approx(math.sin(math.sqrt(2) * math.pi) ** 2, abs=1e-12)


def _three_state(col):
    u = complete_unitary({0: np.asarray(col, dtype=complex)}, 3)
    return Kwqfa(("q", "acc", "rej"), ("a",), {"¢": u, "a": np.eye(3)}, {1}, {2})


def test_kwqfa_direct_accept_and_never_accept():
    m = _three_state([0, 1, 0])
    assert kwqfa_accept(m, "aa") == (1, 0)
    m = Kwqfa(("q", "r"), ("a",), {"a": [[0, 1], [1, 0]]}, set(), {1})
    for w in ("", "a", "aaa"):
        assert kwqfa_accept(m, w) == (0, 1)


def test_restart_examples():
    m = _three_state([math.sqrt(0.96), 0.1, math.sqrt(0.03)])
    assert restart_accept_prob(m, "a") == pytest.approx(0.25, abs=1e-12)
    sym = _three_state([math.sqrt(0.5), 0.5, 0.5])
    assert restart_accept_prob(sym, "") == pytest.approx(0.5, abs=1e-12)
    assert restart_accept_prob(_three_state([0, 1, 0]), "a") == 1
    with pytest.raises(NonTerminationError):
        restart_accept_prob(_three_state([1, 0, 0]), "a")


def test_kwqfa_ledger_conserves():
    m = _three_state([math.sqrt(0.5), 0.5, 0.5])
    run = kwqfa_run(m, "aa", restart=True, keep_history=True)
    for h in run.history:
        assert h.total() == pytest.approx(1, abs=1e-12)


def test_mcqfa_as_kwqfa_matches():
    m = build_modp_2state(7, 3)
    k = mcqfa_as_kwqfa(m)
    for j in range(10):
        acc, rej = kwqfa_accept(k, "a" * j)
        assert acc == pytest.approx(mcqfa_accept(m, "a" * j), abs=1e-12)
        assert acc + rej == pytest.approx(1, abs=1e-12)


def test_general_identity_channels():
    for acc, expected in (({0}, 1), ({1}, 0)):
        m = GeneralQfa(("q1", "q2"), ("a",), {"a": Superoperator.identity(2)}, acc)
        assert general_qfa_accept(m, "aaa") == expected


def test_general_rejects_incomplete_channel():
    with pytest.raises(ValidationError):
        GeneralQfa(("q1", "q2"), ("a",), {"a": Superoperator((np.diag([1, 0.5]),))}, {0})


def test_pfa_to_qfa_permutation_exhaustive(words):
    m = dfa_as_pfa(["x", "y", "z"], ["a", "b"],
                   {"a": {"x": "y", "y": "z", "z": "x"}, "b": {"x": "x", "y": "z", "z": "y"}}, "x", ["z"])
    q = pfa_to_qfa(m)
    assert q.exact
    for w in words("ab", 6):
        assert general_qfa_accept(q, w) == pfa_accept_prob(m, w)


def test_pfa_to_qfa_identity():
    m = Pfa(("p", "q"), ("a",), {"a": nm.eye(2, exact=True, real=True)}, {0})
    q = pfa_to_qfa(m)
    for ch in q.channels.values():
        assert validate_kraus(ch, tol=0)
    assert general_qfa_accept(q, "aaaa") == 1


def test_pfa_to_qfa_random_float():
    rng = np.random.default_rng(11)
    mats = {}
    for s in "ab":
        a = rng.random((3, 3))
        mats[s] = a / a.sum(axis=0)
    p = Pfa(("x", "y", "z"), ("a", "b"), mats, {1, 2})
    q = pfa_to_qfa(p)
    for _ in range(200):
        w = "".join(rng.choice(list("ab"), size=int(rng.integers(0, 10))))
        assert abs(general_qfa_accept(q, w) - pfa_accept_prob(p, w)) <= 1e-12


def test_mcqfa_as_general_exact():
    m = build_modp_2state(5).to_exact()
    g = mcqfa_as_general(m)
    assert g.exact
    assert isinstance(general_qfa_accept(g, "aa"), Fraction)
