"""Two-way and 1.5-way Kondacs-Watrous automata simulated on the configuration space."""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ..classical import END_MARKERS, LEFT_END, RIGHT_END, check_alphabet, tape
from ..errors import ValidationError, WellformednessError
from ..numeric import DEFAULT_TOL
from ..quantum import complete_unitary

LEDGER_TOL = 1e-10
HALT_TOL = 1e-12


@dataclass(frozen=True)
class TwoWayKwqfa:
    """Quantum-head automaton given by local transitions.

    ``transitions[(q, symbol)]`` is a tuple of ``(target, move, amplitude)``
    with state indices and ``move`` in ``{-1, 0, +1}``; pairs without an
    entry map to nothing.  Setting ``one_and_half`` forbids left moves.
    """

    states: tuple
    alphabet: tuple
    transitions: Mapping[tuple, tuple]
    accepting: frozenset
    rejecting: frozenset
    one_and_half: bool = False

    def __post_init__(self):
        alphabet = check_alphabet(self.alphabet)
        n = len(self.states)
        symbols = set(alphabet) | set(END_MARKERS)
        acc, rej = frozenset(self.accepting), frozenset(self.rejecting)
        if acc & rej:
            raise ValidationError(f"states {sorted(acc & rej)} are both accepting and rejecting")
        if not (acc | rej) <= set(range(n)):
            raise ValidationError("halting state index out of range")
        table = {}
        for (q, sym), moves in self.transitions.items():
            where = f"delta({q!r}, {sym!r})"
            if not 0 <= q < n:
                raise ValidationError(f"state index {q} out of range", where=where)
            if sym not in symbols:
                raise ValidationError(f"unknown symbol {sym!r}", where=where)
            clean = []
            for target, move, amp in moves:
                if not 0 <= target < n:
                    raise ValidationError(f"target index {target} out of range", where=where)
                allowed = (0, 1) if self.one_and_half else (-1, 0, 1)
                if move not in allowed:
                    raise ValidationError(f"move {move} not allowed", where=where)
                amp = complex(amp)
                if amp != 0:
                    clean.append((int(target), int(move), amp))
            table[(q, sym)] = tuple(clean)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "transitions", table)
        object.__setattr__(self, "accepting", acc)
        object.__setattr__(self, "rejecting", rej)

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def halting(self) -> frozenset:
        return self.accepting | self.rejecting

    def config_name(self, index: int, length: int) -> str:
        pos, q = divmod(index, self.n)
        return f"({self.states[q]}, {pos})"


def global_operator(m: TwoWayKwqfa, word: Sequence[str]) -> tuple[np.ndarray, dict]:
    """Dense operator on configurations ``|q, pos>`` (index ``pos * |Q| + q``).

    Also returns the amplitudes that would carry the head off the tape,
    keyed by source configuration index.
    """
    tp = tape(word, m.alphabet)
    n, length = m.n, len(tp)
    u = np.zeros((n * length, n * length), dtype=complex)
    leaks: dict = {}
    for pos, sym in enumerate(tp):
        for q in range(n):
            src = pos * n + q
            for target, move, amp in m.transitions.get((q, sym), ()):
                dest = pos + move
                if not 0 <= dest < length:
                    leaks[src] = leaks.get(src, 0.0) + abs(amp) ** 2
                    continue
                u[dest * n + target, src] += amp
    return u, leaks


def _halting_mask(m: TwoWayKwqfa, length: int):
    acc = np.zeros(m.n * length, dtype=bool)
    rej = np.zeros(m.n * length, dtype=bool)
    for pos in range(length):
        for q in m.accepting:
            acc[pos * m.n + q] = True
        for q in m.rejecting:
            rej[pos * m.n + q] = True
    return acc, rej


@dataclass(frozen=True)
class TwoWayRun:
    p_acc: float
    p_rej: float
    residual: float
    steps: int
    max_ledger_drift: float
    history: tuple = ()


def twoway_kwqfa_run(m: TwoWayKwqfa, word: Sequence[str], max_steps: int | None = None,
                     tol: float = LEDGER_TOL, keep_history: bool = False) -> TwoWayRun:
    """Evolve the configuration superposition, measuring halting mass after every step.

    Stops once the live mass drops below ``1e-12`` or after ``max_steps``
    (default ``10 |w~| |Q|``).  Raises :class:`WellformednessError` when a
    step changes the total mass by more than ``tol``.
    """
    u, _ = global_operator(m, word)
    length = len(word) + 2
    if max_steps is None:
        max_steps = 10 * length * m.n
    acc, rej = _halting_mask(m, length)
    live = np.zeros(m.n * length, dtype=complex)
    live[0] = 1.0
    p_acc = p_rej = 0.0
    drift = 0.0
    history = []
    steps = 0
    residual = 1.0
    while residual >= HALT_TOL and steps < max_steps:
        before = residual
        v = u @ live
        after = float(np.vdot(v, v).real)
        if abs(after - before) > tol:
            raise WellformednessError(
                f"step {steps + 1} changed the live mass from {before:.6g} to {after:.6g}")
        p_acc += float(np.sum(np.abs(v[acc]) ** 2))
        p_rej += float(np.sum(np.abs(v[rej]) ** 2))
        v[acc | rej] = 0.0
        live = v
        residual = float(np.vdot(live, live).real)
        steps += 1
        drift = max(drift, abs(p_acc + p_rej + residual - 1.0))
        if keep_history:
            history.append((p_acc, p_rej, residual))
    return TwoWayRun(p_acc, p_rej, residual, steps, drift, tuple(history))


@dataclass(frozen=True)
class Violation:
    word: str
    first: str
    second: str
    inner_product: complex
    expected: float

    def __str__(self):
        return (f"on {self.word!r}: <U{self.first}|U{self.second}> = {self.inner_product:.6g}, "
                f"expected {self.expected:g}")


@dataclass(frozen=True)
class WellformednessReport:
    ok: bool
    words_checked: int
    lengths: tuple
    violation: Violation | None = None

    def __bool__(self):
        return self.ok


def reachable_configs(m: TwoWayKwqfa, u: np.ndarray, length: int) -> list[int]:
    """Nonhalting configurations reachable from ``(q_1, 0)`` through nonzero amplitudes."""
    acc, rej = _halting_mask(m, length)
    halting = acc | rej
    seen = {0}
    queue = deque([0])
    while queue:
        c = queue.popleft()
        for d in np.nonzero(u[:, c])[0]:
            d = int(d)
            if d not in seen and not halting[d]:
                seen.add(d)
                queue.append(d)
    return sorted(seen)


def check_wellformed(m: TwoWayKwqfa, lengths: Sequence[int], tol: float = DEFAULT_TOL) -> WellformednessReport:
    """Check that the global operator is an isometry on the reachable configurations.

    Every word of each requested length is examined.  The first pair of
    configurations whose images fail orthonormality (or a configuration whose
    amplitude leaves the tape) is reported.
    """
    checked = 0
    for n in lengths:
        for letters in itertools.product(m.alphabet, repeat=n):
            word = "".join(letters)
            u, leaks = global_operator(m, word)
            checked += 1
            length = n + 2
            live = reachable_configs(m, u, length)
            for c in live:
                if c in leaks:
                    name = m.config_name(c, length)
                    return WellformednessReport(False, checked, tuple(lengths),
                                                Violation(word, name, "off-tape", complex(leaks[c]), 0.0))
            sub = u[:, live]
            gram = sub.conj().T @ sub
            bad = np.abs(gram - np.eye(len(live))) > tol
            if bad.any():
                i, j = map(int, np.argwhere(bad)[0])
                v = Violation(word, m.config_name(live[i], length), m.config_name(live[j], length),
                              complex(gram[i, j]), 1.0 if i == j else 0.0)
                return WellformednessReport(False, checked, tuple(lengths), v)
    return WellformednessReport(True, checked, tuple(lengths))


def from_local_unitaries(states: Sequence[str], alphabet: Sequence[str],
                         unitaries: Mapping[str, np.ndarray], moves: Mapping[str, Sequence[int]],
                         accepting, rejecting, one_and_half: bool = True) -> TwoWayKwqfa:
    """Build local transitions from a unitary per symbol and a move per target state.

    ``moves[symbol][q']`` is the head move taken when landing in ``q'``.
    """
    trans = {}
    for sym, v in unitaries.items():
        for q in range(len(states)):
            trans[(q, sym)] = tuple((t, moves[sym][t], v[t, q]) for t in range(len(states)) if abs(v[t, q]) > 0)
    return TwoWayKwqfa(tuple(states), tuple(alphabet), trans, frozenset(accepting), frozenset(rejecting),
                       one_and_half)


def build_eq_15kwqfa() -> TwoWayKwqfa:
    """Five-state 1.5-way machine for ``|w|_a = |w|_b``.

    ``¢`` splits ``q_1`` into ``(q_1 + q_2)/sqrt 2``.  On ``a`` the ``q_1``
    branch detours through the waiting state ``q_w`` (two steps per letter)
    while ``q_2`` moves on; ``b`` is symmetric.  The branches meet at ``$``
    iff the counts agree, where they interfere into ``q_a``.  Columns the
    construction leaves open are completed by Gram-Schmidt.
    """
    states = ("q1", "q2", "qw", "qa", "qr")
    q1, q2, qw, qa, qr = range(5)
    r = 1 / math.sqrt(2)

    def e(i, scale=1.0):
        v = np.zeros(5, dtype=complex)
        v[i] = scale
        return v

    lend = complete_unitary({q1: (e(q1) + e(q2)) * r}, 5)
    ua = complete_unitary({q1: e(qw), qw: e(q1), q2: e(q2)}, 5)
    ub = complete_unitary({q2: e(qw), qw: e(q2), q1: e(q1)}, 5)
    rend = complete_unitary({q1: (e(qa) + e(qr)) * r, q2: (e(qa) - e(qr)) * r}, 5)
    right_unless_wait = [1, 1, 0, 0, 0]
    moves = {LEFT_END: [1, 1, 0, 0, 0], "a": right_unless_wait, "b": right_unless_wait,
             RIGHT_END: [0, 0, 0, 0, 0]}
    return from_local_unitaries(states, ("a", "b"), {LEFT_END: lend, "a": ua, "b": ub, RIGHT_END: rend},
                                moves, {qa}, {qr})
