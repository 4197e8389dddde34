"""One-way quantum automata: measure-once, measure-many and superoperator models."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from . import numeric as nm
from .classical import LEFT_END, RIGHT_END, Pfa, check_alphabet, fill_transitions, tape
from .errors import DimensionError, NonTerminationError, ValidationError
from .numeric import CONSERVATION_TOL, DEFAULT_TOL, GaussianRational
from .quantum import Superoperator, kraus_defect, unitarity_defect


def _freeze(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _unitary_table(given, alphabet, n, tol, exact=None):
    if exact is None:
        exact = any(nm.is_exact(np.asarray(m)) for m in given.values())
    table = {}
    for s, u in fill_transitions(given, alphabet, nm.eye(n, exact=exact)).items():
        u = nm.complex_matrix(u, exact=exact)
        if u.shape != (n, n):
            raise DimensionError(f"U[{s!r}] has shape {u.shape}, expected ({n}, {n})")
        defect = unitarity_defect(u)
        if defect > tol:
            raise ValidationError("transition is not unitary", where=f"U[{s!r}]", defect=defect)
        table[s] = _freeze(u)
    return table


def _index_set(indices, n, what):
    out = frozenset(indices)
    if not out <= set(range(n)):
        raise ValidationError(f"{what} indices {sorted(out)} outside 0..{n - 1}")
    return out


@dataclass(frozen=True)
class Mcqfa:
    """Measure-once QFA: unitaries per symbol and one final measurement.

    ``info`` carries construction metadata (e.g. the drawn rotation
    multipliers of the logarithmic MOD_p machine); it plays no part in
    evaluation.
    """

    states: tuple
    alphabet: tuple
    unitaries: Mapping[str, np.ndarray]
    accepting: frozenset
    tol: float = DEFAULT_TOL
    info: Mapping = field(default_factory=dict, compare=False)

    def __post_init__(self):
        alphabet = check_alphabet(self.alphabet)
        n = len(self.states)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "unitaries", _unitary_table(self.unitaries, alphabet, n, self.tol))
        object.__setattr__(self, "accepting", _index_set(self.accepting, n, "accepting"))

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def exact(self) -> bool:
        return nm.is_exact(self.unitaries[LEFT_END])

    def to_exact(self) -> Mcqfa:
        return Mcqfa(self.states, self.alphabet, {s: nm.to_exact(u) for s, u in self.unitaries.items()},
                     self.accepting, self.tol, self.info)


@dataclass(frozen=True)
class Kwqfa:
    """Measure-many QFA with the accept/reject/nonhalting partition."""

    states: tuple
    alphabet: tuple
    unitaries: Mapping[str, np.ndarray]
    accepting: frozenset
    rejecting: frozenset
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        alphabet = check_alphabet(self.alphabet)
        n = len(self.states)
        acc = _index_set(self.accepting, n, "accepting")
        rej = _index_set(self.rejecting, n, "rejecting")
        if acc & rej:
            raise ValidationError(f"states {sorted(acc & rej)} are both accepting and rejecting")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "unitaries", _unitary_table(self.unitaries, alphabet, n, self.tol))
        object.__setattr__(self, "accepting", acc)
        object.__setattr__(self, "rejecting", rej)

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def nonhalting(self) -> frozenset:
        return frozenset(range(self.n)) - self.accepting - self.rejecting

    @property
    def exact(self) -> bool:
        return nm.is_exact(self.unitaries[LEFT_END])


@dataclass(frozen=True)
class GeneralQfa:
    """Superoperator QFA started in the pure state ``|q_1><q_1|``."""

    states: tuple
    alphabet: tuple
    channels: Mapping[str, Superoperator]
    accepting: frozenset
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        alphabet = check_alphabet(self.alphabet)
        n = len(self.states)
        exact = any(ch.exact for ch in self.channels.values())
        table = {}
        for s, ch in fill_transitions(self.channels, alphabet, Superoperator.identity(n, exact)).items():
            if not isinstance(ch, Superoperator):
                ch = Superoperator(tuple(ch))
            if ch.exact != exact:
                ch = ch.to_exact() if exact else ch.to_float()
            if ch.dim != n:
                raise DimensionError(f"T[{s!r}] acts on dimension {ch.dim}, expected {n}")
            defect = kraus_defect(ch)
            if defect > self.tol:
                raise ValidationError("Kraus operators are not complete", where=f"T[{s!r}]", defect=defect)
            table[s] = ch
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "channels", table)
        object.__setattr__(self, "accepting", _index_set(self.accepting, n, "accepting"))

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def exact(self) -> bool:
        return self.channels[LEFT_END].exact

    def initial_density(self) -> np.ndarray:
        rho = nm.zeros((self.n, self.n), exact=self.exact)
        rho[0, 0] = GaussianRational(1) if self.exact else 1.0
        return rho

    def to_exact(self) -> GeneralQfa:
        return GeneralQfa(self.states, self.alphabet,
                          {s: ch.to_exact() for s, ch in self.channels.items()}, self.accepting, self.tol)

    def to_float(self) -> GeneralQfa:
        return GeneralQfa(self.states, self.alphabet,
                          {s: ch.to_float() for s, ch in self.channels.items()}, self.accepting, self.tol)


# ---------------------------------------------------------------------------
# evaluators


def _basis(n, exact):
    v = nm.zeros(n, exact=exact)
    v[0] = GaussianRational(1) if exact else 1.0
    return v


def _mass(v, indices, exact):
    return sum((nm.abs2(v[i]) for i in sorted(indices)), Fraction(0) if exact else 0.0)


def mcqfa_trajectory(m: Mcqfa, word: Sequence[str]) -> list[np.ndarray]:
    """State after ``¢`` and after every later symbol of ``¢ w $``."""
    v = _basis(m.n, m.exact)
    out = []
    for s in tape(word, m.alphabet):
        v = nm.matmul(m.unitaries[s], v)
        out.append(v)
    return out


def mcqfa_accept(m: Mcqfa, word: Sequence[str]):
    final = mcqfa_trajectory(m, word)[-1]
    return _mass(final, m.accepting, m.exact)


@dataclass
class HaltingLedger:
    """Running account of a measure-many computation."""

    p_acc: object
    p_rej: object
    live: np.ndarray

    def live_mass(self):
        return _mass(self.live, range(len(self.live)), nm.is_exact(self.live))

    def total(self):
        return self.p_acc + self.p_rej + self.live_mass()


@dataclass(frozen=True)
class KwqfaRun:
    p_acc: object
    p_rej: object
    residual: object
    history: tuple = ()


def kwqfa_run(m: Kwqfa, word: Sequence[str], restart: bool = False, keep_history: bool = False) -> KwqfaRun:
    """Symbol-by-symbol measure-many evolution.

    The nonhalting mass left after ``$`` is added to ``p_rej`` unless
    ``restart`` is set, in which case it is returned as ``residual``.
    ``history`` (when requested) holds a ledger snapshot per symbol.
    """
    exact = m.exact
    zero = Fraction(0) if exact else 0.0
    ledger = HaltingLedger(zero, zero, _basis(m.n, exact))
    nonhalt = sorted(m.nonhalting)
    history = []
    for s in tape(word, m.alphabet):
        v = nm.matmul(m.unitaries[s], ledger.live)
        ledger.p_acc = ledger.p_acc + _mass(v, m.accepting, exact)
        ledger.p_rej = ledger.p_rej + _mass(v, m.rejecting, exact)
        live = nm.zeros(m.n, exact=exact)
        for i in nonhalt:
            live[i] = v[i]
        ledger.live = live
        if keep_history:
            history.append(HaltingLedger(ledger.p_acc, ledger.p_rej, live.copy()))
    residual = ledger.live_mass()
    if restart:
        return KwqfaRun(ledger.p_acc, ledger.p_rej, residual, tuple(history))
    return KwqfaRun(ledger.p_acc, ledger.p_rej + residual, zero, tuple(history))


def kwqfa_accept(m: Kwqfa, word: Sequence[str]) -> tuple:
    """``(p_acc, p_rej)``; leftover nonhalting mass at ``$`` counts as rejection."""
    run = kwqfa_run(m, word)
    return run.p_acc, run.p_rej


def restart_accept_prob(m: Kwqfa, word: Sequence[str], tol: float = CONSERVATION_TOL):
    """Acceptance probability when the machine restarts after every nonhalting pass.

    With per-pass halting masses ``A`` and ``R`` the restarts form a
    geometric series and the limit is ``A / (A + R)``.
    """
    run = kwqfa_run(m, word, restart=True)
    halting = run.p_acc + run.p_rej
    if halting <= tol:
        raise NonTerminationError(
            f"machine halts with probability {float(halting):.3g} per pass on {''.join(word)!r}")
    return run.p_acc / halting


def general_qfa_trajectory(m: GeneralQfa, word: Sequence[str]) -> list[np.ndarray]:
    rho = m.initial_density()
    out = []
    for s in tape(word, m.alphabet):
        rho = m.channels[s](rho)
        out.append(rho)
    return out


def general_qfa_accept(m: GeneralQfa, word: Sequence[str]):
    rho = general_qfa_trajectory(m, word)[-1]
    return sum((nm.real_part(rho[i, i]) for i in sorted(m.accepting)), Fraction(0) if m.exact else 0.0)


# ---------------------------------------------------------------------------
# conversions between models


def pfa_to_qfa(pfa: Pfa) -> GeneralQfa:
    """Same-size superoperator QFA with identical acceptance probabilities.

    Each positive entry ``A[j, i]`` becomes the Kraus operator
    ``sqrt(A[j, i]) |q_j><q_i|``, stored as weight ``A[j, i]`` on the
    matrix unit so rational PFAs stay exact.
    """
    n = pfa.n
    exact = pfa.exact
    one = GaussianRational(1) if exact else 1.0
    channels = {}
    for s, a in pfa.matrices.items():
        ops, weights = [], []
        for j in range(n):
            for i in range(n):
                if a[j, i] > 0:
                    unit = nm.zeros((n, n), exact=exact)
                    unit[j, i] = one
                    ops.append(unit)
                    weights.append(a[j, i])
        channels[s] = Superoperator(tuple(ops), tuple(weights))
    return GeneralQfa(pfa.states, pfa.alphabet, channels, pfa.accepting, pfa.tol)


def mcqfa_as_general(m: Mcqfa) -> GeneralQfa:
    return GeneralQfa(m.states, m.alphabet,
                      {s: Superoperator.unitary(u) for s, u in m.unitaries.items()}, m.accepting, m.tol)


def mcqfa_as_kwqfa(m: Mcqfa) -> Kwqfa:
    """Measure-many machine that only halts at ``$``.

    Every state gets a halting twin (accepting twin for accepting states,
    rejecting otherwise).  All symbols act on the original block; ``$``
    additionally swaps each original state with its twin.
    """
    n = m.n
    exact = m.exact
    big = {}
    for s, u in m.unitaries.items():
        w = nm.eye(2 * n, exact=exact)
        w[:n, :n] = u
        if s == RIGHT_END:
            swap = nm.zeros((2 * n, 2 * n), exact=exact)
            one = GaussianRational(1) if exact else 1.0
            for i in range(n):
                swap[n + i, i] = one
                swap[i, n + i] = one
            w = nm.matmul(swap, w)
        big[s] = w
    states = m.states + tuple(f"{q}'" for q in m.states)
    acc = {n + i for i in m.accepting}
    rej = {n + i for i in range(n)} - acc
    return Kwqfa(states, m.alphabet, big, frozenset(acc), frozenset(rej), m.tol)


# ---------------------------------------------------------------------------
# named constructions


def rotation(angle: float) -> np.ndarray:
    """Real rotation taking ``|q_1>`` to ``cos|q_1> + sin|q_2>``."""
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _modp_angle(p: int, k: int) -> float:
    # reduce k into (-p/2, p/2) so that k and p-k give bit-identical cos and
    # negated sin; exact-mode equivalence checks then see the true symmetry
    m = k % p
    if 2 * m > p:
        m -= p
    return 2 * math.pi * m / p


def build_modp_2state(p: int, k: int = 1) -> Mcqfa:
    """Two-state unary machine rotating by ``2 pi k / p`` per ``a``.

    Accepts ``a^j`` with probability ``cos^2(2 pi j k / p)``.
    """
    if not isinstance(p, int) or p <= 2 or p % 2 == 0:
        raise ValueError(f"p must be an odd integer > 2, got {p!r}")
    if not isinstance(k, int) or not 1 <= k <= p - 1:
        raise ValueError(f"k must lie in 1..{p - 1}, got {k!r}")
    return Mcqfa(("q1", "q2"), ("a",), {"a": rotation(_modp_angle(p, k))}, frozenset({0}),
                 info={"p": p, "k": k})


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, math.isqrt(p) + 1))


def modp_multiblock_prob(p: int, ks: Sequence[int], j: int) -> float:
    """Closed-form acceptance of ``a^j`` for the block machine with multipliers ``ks``."""
    d = len(ks)
    return (sum(math.cos(2 * math.pi * j * k / p) for k in ks) / d) ** 2


def householder_swap(dim: int, target: np.ndarray) -> np.ndarray:
    """Real reflection exchanging ``e_0`` and the unit vector ``target``."""
    e0 = np.zeros(dim)
    e0[0] = 1.0
    v = e0 - np.asarray(target, dtype=float)
    nv = float(v @ v)
    if nv < 1e-30:
        return np.eye(dim, dtype=complex)
    return (np.eye(dim) - 2.0 * np.outer(v, v) / nv).astype(complex)


def build_modp_multiblock(p: int, ks: Sequence[int]) -> Mcqfa:
    """``2d``-state machine running ``d`` rotation blocks in uniform superposition.

    States are ordered ``q_{1,1}, q_{1,2}, q_{2,1}, ...``; ``U_¢`` and
    ``U_$`` are the same Householder reflection swapping ``q_{1,1}`` with
    ``psi_0 = d^{-1/2} sum_i q_{i,1}``.
    """
    d = len(ks)
    if d == 0:
        raise ValueError("need at least one rotation block")
    dim = 2 * d
    ua = np.zeros((dim, dim), dtype=complex)
    for i, k in enumerate(ks):
        ua[2 * i:2 * i + 2, 2 * i:2 * i + 2] = rotation(_modp_angle(p, int(k)))
    psi0 = np.zeros(dim)
    psi0[0::2] = 1.0 / math.sqrt(d)
    h = householder_swap(dim, psi0)
    states = tuple(f"q{i + 1},{b}" for i in range(d) for b in (1, 2))
    return Mcqfa(states, ("a",), {"a": ua, LEFT_END: h, RIGHT_END: h}, frozenset({0}),
                 info={"p": p, "ks": tuple(int(k) for k in ks)})


def build_modp_logstate(p: int, eps: float, seed: int = 0, max_redraws: int = 1000) -> Mcqfa:
    """Logarithmic-size MOD_p recognizer with one-sided error ``eps``.

    Draws ``d = ceil(2 log2(2p/eps))`` multipliers from ``1..p-1``; if some
    nonmember residue is accepted with probability above ``eps`` (checked
    exhaustively) the draw is repeated with ``seed + 1``.  ``info`` records
    the multipliers, the seed finally used, the redraw count and the worst
    nonmember acceptance.
    """
    if not _is_prime(p):
        raise ValueError(f"p must be prime, got {p!r}")
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps!r}")
    d = math.ceil(2 * math.log2(2 * p / eps))
    for redraws in range(max_redraws + 1):
        rng = np.random.default_rng(seed + redraws)
        ks = [int(k) for k in rng.integers(1, p, size=d)]
        worst = max(modp_multiblock_prob(p, ks, j) for j in range(1, p))
        if worst <= eps:
            m = build_modp_multiblock(p, ks)
            info = dict(m.info, d=d, eps=eps, seed=seed + redraws, redraws=redraws, worst_nonmember=worst)
            return Mcqfa(m.states, m.alphabet, m.unitaries, m.accepting, m.tol, info)
    raise RuntimeError(f"no admissible multipliers after {max_redraws} redraws")


def build_neq_nqfa(theta: float = math.sqrt(2) * math.pi) -> Mcqfa:
    """Rotate by ``+theta`` on ``a`` and ``-theta`` on ``b``; accept in ``q_2``.

    Acceptance is ``sin^2(theta (|w|_a - |w|_b))``, positive exactly on
    unbalanced words when ``theta / pi`` is irrational.
    """
    return Mcqfa(("q1", "q2"), ("a", "b"), {"a": rotation(theta), "b": rotation(-theta)},
                 frozenset({1}), info={"theta": theta})
