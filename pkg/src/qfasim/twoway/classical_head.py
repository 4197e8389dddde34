"""Two-way automata with a classical head and a finite quantum register (2QCFA)."""

from __future__ import annotations

import math
import random
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .. import numeric as nm
from ..classical import END_MARKERS, LEFT_END, RIGHT_END, check_alphabet, tape
from ..errors import NonTerminationError, QfaError, ValidationError
from ..numeric import DEFAULT_TOL
from ..oneway import rotation
from ..quantum import BasisPartition, unitarity_defect

ANY = "*"
MOVES = (-1, 0, 1)
EQ_ANGLE = math.sqrt(2) * math.pi


@dataclass(frozen=True)
class Unitary:
    matrix: np.ndarray


@dataclass(frozen=True)
class Measure:
    partition: BasisPartition


@dataclass(frozen=True)
class Rule:
    """One step: a quantum action followed by a classical move.

    For a :class:`Unitary` action ``next`` is ``(state, move)``; for a
    :class:`Measure` it maps each block label to ``(state, move)``.
    """

    action: Unitary | Measure
    next: tuple | Mapping


@dataclass(frozen=True)
class Tqcfa:
    """2QCFA.  Rules are keyed by ``(classical state, symbol)``; the symbol
    ``"*"`` is a fallback for symbols without their own rule.
    """

    classical_states: tuple
    quantum_states: tuple
    alphabet: tuple
    rules: Mapping[tuple, Rule]
    start: str
    accept: str
    reject: str
    tol: float = DEFAULT_TOL
    info: Mapping = field(default_factory=dict, compare=False)

    def __post_init__(self):
        alphabet = check_alphabet(self.alphabet)
        states = tuple(self.classical_states)
        known = set(states)
        for s in (self.start, self.accept, self.reject):
            if s not in known:
                raise ValidationError(f"unknown classical state {s!r}")
        if self.accept == self.reject:
            raise ValidationError("accepting and rejecting states must differ")
        dim = len(self.quantum_states)
        symbols = set(alphabet) | set(END_MARKERS) | {ANY}
        for (s, sym), rule in self.rules.items():
            where = f"delta({s!r}, {sym!r})"
            if s not in known:
                raise ValidationError(f"unknown classical state {s!r}", where=where)
            if s in (self.accept, self.reject):
                raise ValidationError("halting states take no transitions", where=where)
            if sym not in symbols:
                raise ValidationError(f"unknown symbol {sym!r}", where=where)
            if isinstance(rule.action, Unitary):
                u = rule.action.matrix
                if u.shape != (dim, dim):
                    raise ValidationError(f"unitary has shape {u.shape}, expected ({dim}, {dim})", where=where)
                defect = unitarity_defect(u)
                if defect > self.tol:
                    raise ValidationError("quantum action is not unitary", where=where, defect=defect)
                targets = [rule.next]
            elif isinstance(rule.action, Measure):
                part = rule.action.partition
                if part.dim != dim:
                    raise ValidationError("measurement partition has the wrong dimension", where=where)
                if set(rule.next) != set(part.labels):
                    raise ValidationError("classical transition must cover every outcome", where=where)
                targets = [rule.next[label] for label in part.labels]
            else:
                raise ValidationError("unknown quantum action", where=where)
            for target, move in targets:
                if target not in known:
                    raise ValidationError(f"unknown target state {target!r}", where=where)
                if move not in MOVES:
                    raise ValidationError(f"head move {move!r} not in -1/0/+1", where=where)
                if (sym == LEFT_END and move == -1) or (sym == RIGHT_END and move == 1):
                    raise ValidationError("head would leave the tape", where=where)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "classical_states", states)
        object.__setattr__(self, "quantum_states", tuple(self.quantum_states))
        object.__setattr__(self, "rules", dict(self.rules))

    def rule(self, state: str, symbol: str) -> Rule:
        r = self.rules.get((state, symbol)) or self.rules.get((state, ANY))
        if r is None:
            raise QfaError(f"no transition for state {state!r} on {symbol!r}")
        if symbol in END_MARKERS:
            # a wildcard rule may not carry the head off the tape
            moves = [r.next[1]] if isinstance(r.action, Unitary) else [m for _, m in r.next.values()]
            if (symbol == LEFT_END and -1 in moves) or (symbol == RIGHT_END and 1 in moves):
                raise QfaError(f"rule for {state!r} on {symbol!r} moves off the tape")
        return r


# ---------------------------------------------------------------------------
# loop analysis


@dataclass(frozen=True)
class LoopProfile:
    """Per-iteration quantum reject ``r`` and classical accept ``a`` of a two-part loop."""

    reject_per_iter: float
    accept_per_iter: float
    accept_prob: float
    expected_iterations: float

    @property
    def reject_prob(self) -> float:
        return 1 - self.accept_prob


def loop_semantics(r, a) -> tuple:
    """Overall accept probability and expected iterations of the repeat loop.

    Each iteration rejects with probability ``r``; otherwise it accepts with
    probability ``a``; otherwise it starts over.
    """
    if not (0 <= r <= 1 and 0 <= a <= 1):
        raise ValueError(f"probabilities out of range: r={r!r}, a={a!r}")
    halt = r + (1 - r) * a
    if halt == 0:
        raise NonTerminationError("loop never halts (r = a = 0)")
    return (1 - r) * a / halt, 1 / halt


def _counts(word: str) -> int:
    for ch in word:
        if ch not in "ab":
            raise ValueError(f"word over {{a, b}} expected, got {word!r}")
    return word.count("a") - word.count("b")


def eq_quantum_phase_reject(word: str, theta: float = EQ_ANGLE) -> float:
    """Probability that the end-of-pass measurement finds ``q_2``: ``sin^2(theta (|w|_a - |w|_b))``.

    Exactly 0 on balanced words.
    """
    return math.sin(theta * _counts(word)) ** 2


PAL_UA = nm.real_matrix([["4/5", "3/5", 0], ["-3/5", "4/5", 0], [0, 0, 1]], exact=True)
PAL_UB = nm.real_matrix([["4/5", 0, "3/5"], [0, 1, 0], ["-3/5", 0, "4/5"]], exact=True)


def pal_phase_state(word: str) -> np.ndarray:
    """Exact register state after the two passes (second pass applies inverses)."""
    _counts(word)
    mats = {"a": PAL_UA, "b": PAL_UB}
    v = nm.real_vector([1, 0, 0], exact=True)
    for ch in word:
        v = nm.matmul(mats[ch], v)
    for ch in word:
        # rotations: inverse is the transpose
        v = nm.matmul(mats[ch].T, v)
    return v


def pal_quantum_phase_reject(word: str) -> Fraction:
    """``1 - |<q_1|psi>|^2``, computed in exact rational arithmetic."""
    v = pal_phase_state(word)
    return 1 - v[0] * v[0]


def eq_accept_per_iter(n: int, k: int) -> Fraction:
    """Two gambler's-ruin walks (each ``1/(n+1)``) then ``k`` fair coins."""
    return Fraction(1, (n + 1) ** 2 * 2 ** k)


def pal_accept_per_iter(n: int, k: int) -> Fraction:
    return Fraction(1, 2 ** (4 * k * n))


def tqcfa_exact_accept(family: str, word: str, k: int) -> LoopProfile:
    if family == "EQ":
        r = eq_quantum_phase_reject(word)
        a = float(eq_accept_per_iter(len(word), k))
    elif family == "PAL":
        r = pal_quantum_phase_reject(word)
        a = pal_accept_per_iter(len(word), k)
    else:
        raise ValueError(f"unknown 2QCFA family {family!r} (expected 'EQ' or 'PAL')")
    acc, iters = loop_semantics(r, a)
    return LoopProfile(float(r), float(a), float(acc), float(iters))


# ---------------------------------------------------------------------------
# named machines


def _u(m) -> Unitary:
    return Unitary(np.asarray(nm.to_float(m), dtype=complex))


def _measure(labels, dim) -> Measure:
    return Measure(BasisPartition(tuple((i,) for i in range(dim)), tuple(labels), dim))


def _sweep_left(rules, state, then, dim):
    """Move left to ``¢`` with identity actions, then hand over to ``then``."""
    ident = _u(np.eye(dim))
    rules[(state, ANY)] = Rule(ident, (state, -1))
    rules[(state, LEFT_END)] = Rule(ident, then)


def _reset_and_start(rules, dim, first_state):
    """At ``¢``: measure the register, rotate the outcome back to ``q_1``, start the pass."""
    labels = [f"q{i + 1}" for i in range(dim)]
    nxt = {labels[0]: (first_state, 1)}
    for i in range(1, dim):
        perm = np.eye(dim)
        perm[[0, i]] = perm[[i, 0]]
        rules[(f"fix{i + 1}", ANY)] = Rule(_u(perm), (first_state, 1))
        nxt[labels[i]] = (f"fix{i + 1}", 0)
    rules[("reset", ANY)] = Rule(_measure(labels, dim), nxt)
    return [f"fix{i + 1}" for i in range(1, dim)]


HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def build_eq_tqcfa(k: int = 2, theta: float = EQ_ANGLE) -> Tqcfa:
    """2QCFA for ``{w in {a,b}* : |w|_a = |w|_b}``.

    Quantum pass: rotate by ``+theta`` on ``a`` and ``-theta`` on ``b``,
    measure at ``$`` and reject on ``q_2``.  Classical part: two
    gambler's-ruin walks from ``¢`` that must reach ``$``, then ``k`` fair
    coins that must all land on ``q_1``; coins are Hadamard-then-measure on
    the register.  Per-iteration accept probability is ``2^-k / (|w|+1)^2``.
    """
    if not isinstance(k, int) or k < 2:
        raise ValueError(f"k must be an integer > 1, got {k!r}")
    dim = 2
    rules: dict = {}
    fixes = _reset_and_start(rules, dim, "phase")
    coin = _u(HADAMARD)
    ident = _u(np.eye(dim))
    flip = _measure(("heads", "tails"), dim)
    rules[("phase", "a")] = Rule(_u(rotation(theta)), ("phase", 1))
    rules[("phase", "b")] = Rule(_u(rotation(-theta)), ("phase", 1))
    rules[("phase", RIGHT_END)] = Rule(_measure(("q1", "q2"), dim), {"q1": ("back1", -1), "q2": ("rej", 0)})
    _sweep_left(rules, "back1", ("walk1", 1), dim)
    for i, done in ((1, ("back2", -1)), (2, ("coin1", 0))):
        w = f"walk{i}"
        rules[(w, ANY)] = Rule(coin, (f"{w}m", 0))
        rules[(w, RIGHT_END)] = Rule(ident, done)
        rules[(w, LEFT_END)] = Rule(ident, ("reset", 0))
        rules[(f"{w}m", ANY)] = Rule(flip, {"heads": (w, -1), "tails": (w, 1)})
    _sweep_left(rules, "back2", ("walk2", 1), dim)
    for i in range(1, k + 1):
        win = ("acc", 0) if i == k else (f"coin{i + 1}", 0)
        rules[(f"coin{i}", ANY)] = Rule(coin, (f"coin{i}m", 0))
        rules[(f"coin{i}m", ANY)] = Rule(flip, {"heads": win, "tails": ("backfail", 0)})
    _sweep_left(rules, "backfail", ("reset", 0), dim)
    states = ["reset", *fixes, "phase", "back1", "walk1", "walk1m", "back2", "walk2", "walk2m",
              *[f"coin{i}{m}" for i in range(1, k + 1) for m in ("", "m")], "backfail", "acc", "rej"]
    return Tqcfa(tuple(states), ("q1", "q2"), ("a", "b"), rules, "reset", "acc", "rej",
                 info={"family": "EQ", "k": k, "theta": theta})


def build_pal_tqcfa(k: int = 2) -> Tqcfa:
    """2QCFA for palindromes over ``{a, b}``.

    Quantum pass: ``U_a``/``U_b`` left to right, sweep back, then the
    inverses left to right; measure at ``$`` and reject unless ``q_1``.
    Classical part: ``4k`` left-to-right sweeps flipping one fair coin per
    input symbol; all ``4k|w|`` coins must land on ``q_1``.
    """
    if not isinstance(k, int) or k < 2:
        raise ValueError(f"k must be an integer > 1, got {k!r}")
    dim = 3
    rules: dict = {}
    fixes = _reset_and_start(rules, dim, "pass1")
    ident = _u(np.eye(dim))
    coin_u = np.eye(dim, dtype=complex)
    coin_u[:2, :2] = HADAMARD
    coin = _u(coin_u)
    flip = Measure(BasisPartition(((0,), (1, 2)), ("heads", "tails"), dim))
    ua, ub = nm.to_float(PAL_UA), nm.to_float(PAL_UB)
    rules[("pass1", "a")] = Rule(_u(ua), ("pass1", 1))
    rules[("pass1", "b")] = Rule(_u(ub), ("pass1", 1))
    rules[("pass1", RIGHT_END)] = Rule(ident, ("rewind", -1))
    _sweep_left(rules, "rewind", ("pass2", 1), dim)
    rules[("pass2", "a")] = Rule(_u(ua.T), ("pass2", 1))
    rules[("pass2", "b")] = Rule(_u(ub.T), ("pass2", 1))
    rules[("pass2", RIGHT_END)] = Rule(_measure(("q1", "q2", "q3"), dim),
                                       {"q1": ("sweep1l", 0), "q2": ("rej", 0), "q3": ("rej", 0)})
    sweeps = 4 * k
    states = ["reset", *fixes, "pass1", "rewind", "pass2"]
    for i in range(1, sweeps + 1):
        s = f"sweep{i}"
        _sweep_left(rules, f"{s}l", (s, 1), dim)
        rules[(s, ANY)] = Rule(coin, (f"{s}m", 0))
        rules[(s, RIGHT_END)] = Rule(ident, ("acc", 0) if i == sweeps else (f"sweep{i + 1}l", 0))
        rules[(f"{s}m", ANY)] = Rule(flip, {"heads": (s, 1), "tails": ("backfail", 0)})
        states += [f"{s}l", s, f"{s}m"]
    _sweep_left(rules, "backfail", ("reset", 0), dim)
    states += ["backfail", "acc", "rej"]
    return Tqcfa(tuple(states), ("q1", "q2", "q3"), ("a", "b"), rules, "reset", "acc", "rej",
                 info={"family": "PAL", "k": k})


# ---------------------------------------------------------------------------
# Monte Carlo execution


@dataclass(frozen=True)
class MonteCarloStats:
    trials: int
    accepts: int
    rejects: int
    capped: int
    steps: tuple

    @property
    def accept_freq(self) -> float:
        return self.accepts / self.trials

    @property
    def mean_steps(self) -> float:
        return statistics.fmean(self.steps)

    @property
    def std_steps(self) -> float:
        return statistics.pstdev(self.steps) if len(self.steps) > 1 else 0.0

    def within_sigma(self, p: float, n_sigma: float = 5.0) -> bool:
        """Accept frequency within ``n_sigma`` binomial standard deviations of ``p``."""
        sigma = math.sqrt(max(p * (1 - p), 0.0) / self.trials)
        # a zero-variance target still allows no deviation beyond float noise
        return abs(self.accept_freq - p) <= n_sigma * sigma + 1e-12


def trial_seed(seed: int, trial: int) -> int:
    """Counter-based per-trial seed: independent of execution order."""
    return int(np.random.SeedSequence([seed, trial]).generate_state(1, dtype=np.uint64)[0])


class _Compiled:
    """Rules flattened to Python lists for the per-step hot loop."""

    def __init__(self, m: Tqcfa, tape_syms: tuple):
        self.dim = len(m.quantum_states)
        self.table: dict = {}
        for s in m.classical_states:
            if s in (m.accept, m.reject):
                continue
            for sym in set(tape_syms):
                try:
                    r = m.rule(s, sym)
                except QfaError:
                    continue
                if isinstance(r.action, Unitary):
                    mat = [[complex(x) for x in row] for row in r.action.matrix]
                    self.table[(s, sym)] = (True, mat, r.next)
                else:
                    part = r.action.partition
                    blocks = [(part.blocks[i], r.next[lab]) for i, lab in enumerate(part.labels)]
                    self.table[(s, sym)] = (False, blocks, None)


def _run_trial(m: Tqcfa, comp: _Compiled, tp: tuple, rng: random.Random, max_steps: int):
    dim = comp.dim
    psi = [0j] * dim
    psi[0] = 1 + 0j
    state, pos, steps = m.start, 0, 0
    table = comp.table
    while steps < max_steps:
        entry = table.get((state, tp[pos]))
        if entry is None:
            raise QfaError(f"no transition for state {state!r} on {tp[pos]!r}")
        is_unitary, data, nxt = entry
        if is_unitary:
            psi = [sum(row[j] * psi[j] for j in range(dim)) for row in data]
            state, move = nxt
        else:
            u = rng.random()
            acc = 0.0
            chosen = None
            for block, target in data:
                p = sum(abs(psi[i]) ** 2 for i in block)
                acc += p
                if u < acc and p > 0:
                    chosen = (block, target, p)
                    break
            if chosen is None:
                # float round-off left u above the cumulative sum; take the last nonempty block
                for block, target in reversed(data):
                    p = sum(abs(psi[i]) ** 2 for i in block)
                    if p > 0:
                        chosen = (block, target, p)
                        break
            block, (state, move), p = chosen
            norm = math.sqrt(p)
            psi = [psi[i] / norm if i in block else 0j for i in range(dim)]
        pos += move
        steps += 1
        if state == m.accept:
            return True, steps
        if state == m.reject:
            return False, steps
    return None, steps


def tqcfa_monte_carlo(m: Tqcfa, word: str, trials: int, seed: int = 0,
                      max_steps: int = 10_000_000) -> MonteCarloStats:
    """Sample ``trials`` independent runs.

    Trial ``t`` uses its own generator seeded from ``(seed, t)``, so results
    do not depend on the order in which trials execute.  Runs that hit
    ``max_steps`` are counted in ``capped`` and excluded from both tallies.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    tp = tape(word, m.alphabet)
    comp = _Compiled(m, tp)
    accepts = rejects = capped = 0
    steps = []
    for t in range(trials):
        rng = random.Random(trial_seed(seed, t))
        outcome, n = _run_trial(m, comp, tp, rng, max_steps)
        steps.append(n)
        if outcome is None:
            capped += 1
        elif outcome:
            accepts += 1
        else:
            rejects += 1
    return MonteCarloStats(trials, accepts, rejects, capped, tuple(steps))
