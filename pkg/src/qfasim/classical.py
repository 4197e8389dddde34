"""One-way probabilistic and generalized finite automata."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import numeric as nm
from .errors import AlphabetError, DimensionError, ValidationError
from .numeric import DEFAULT_TOL

LEFT_END = "¢"
RIGHT_END = "$"
END_MARKERS = (LEFT_END, RIGHT_END)


def check_alphabet(alphabet: Iterable[str]) -> tuple:
    alphabet = tuple(alphabet)
    if len(set(alphabet)) != len(alphabet):
        raise ValidationError("duplicate alphabet symbols")
    for s in alphabet:
        if not isinstance(s, str) or len(s) != 1:
            raise ValidationError(f"alphabet symbols must be single characters, got {s!r}")
        if s in END_MARKERS:
            raise ValidationError(f"end-marker {s!r} cannot be an input symbol")
    return alphabet


def tape(word: Sequence[str], alphabet: Sequence[str]) -> tuple:
    """``¢ w $`` as a tuple, after checking every symbol of ``w``."""
    allowed = set(alphabet)
    for s in word:
        if s not in allowed:
            raise AlphabetError(s, alphabet)
    return (LEFT_END, *word, RIGHT_END)


def fill_transitions(given: Mapping[str, object], alphabet: Sequence[str], identity) -> dict:
    """Per-symbol transition table with identity end-markers when omitted."""
    table = dict(given)
    for s in table:
        if s not in alphabet and s not in END_MARKERS:
            raise AlphabetError(s, alphabet)
    for s in alphabet:
        if s not in table:
            raise ValidationError(f"missing transition for symbol {s!r}")
    for s in END_MARKERS:
        table.setdefault(s, identity)
    return table


def _freeze(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Pfa:
    """Column-stochastic PFA: ``A[s][j, i]`` is the probability of ``q_i -> q_j``."""

    states: tuple
    alphabet: tuple
    matrices: Mapping[str, np.ndarray]
    accepting: frozenset
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        alphabet = check_alphabet(self.alphabet)
        n = len(self.states)
        if n == 0:
            raise DimensionError("a PFA needs at least one state")
        exact = any(nm.is_exact(np.asarray(m)) for m in self.matrices.values())
        table = {}
        for s, m in fill_transitions(self.matrices, alphabet, nm.eye(n, exact=exact, real=True)).items():
            m = nm.real_matrix(m, exact=exact)
            if m.shape != (n, n):
                raise DimensionError(f"A[{s!r}] has shape {m.shape}, expected ({n}, {n})")
            _check_stochastic(m, s, self.tol)
            table[s] = _freeze(m)
        acc = frozenset(self.accepting)
        if not acc <= set(range(n)):
            raise ValidationError(f"accepting indices {sorted(acc)} outside 0..{n - 1}")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "matrices", table)
        object.__setattr__(self, "accepting", acc)

    @cached_property
    def as_gfa(self) -> Gfa:
        return lift(self)

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def exact(self) -> bool:
        return nm.is_exact(self.matrices[LEFT_END])


def _check_stochastic(m: np.ndarray, symbol: str, tol: float):
    n = m.shape[0]
    for i in range(n):
        col = m[:, i]
        for j in range(n):
            if col[j] < 0:
                raise ValidationError("negative transition probability",
                                      where=f"A[{symbol!r}] entry ({j}, {i})", defect=float(-col[j]))
        total = sum(col)
        if abs(float(total) - 1.0) > tol:
            raise ValidationError("column does not sum to 1",
                                  where=f"A[{symbol!r}] column {i}", defect=abs(float(total) - 1.0))


@dataclass(frozen=True)
class Gfa:
    """Generalized automaton: value ``final . A_$ A_wn ... A_w1 A_¢ initial``."""

    dim: int
    alphabet: tuple
    matrices: Mapping[str, np.ndarray]
    initial: np.ndarray
    final: np.ndarray

    def __post_init__(self):
        alphabet = check_alphabet(self.alphabet)
        n = self.dim
        exact = nm.is_exact(np.asarray(self.initial)) or any(
            nm.is_exact(np.asarray(m)) for m in self.matrices.values())
        table = {}
        for s, m in fill_transitions(self.matrices, alphabet, nm.eye(n, exact=exact, real=True)).items():
            m = nm.real_matrix(m, exact=exact)
            if m.shape != (n, n):
                raise DimensionError(f"M[{s!r}] has shape {m.shape}, expected ({n}, {n})")
            table[s] = _freeze(m)
        v0 = nm.real_vector(self.initial, exact=exact)
        f = nm.real_vector(self.final, exact=exact)
        if v0.shape != (n,) or f.shape != (n,):
            raise DimensionError(f"initial/final vectors must have length {n}")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "matrices", table)
        object.__setattr__(self, "initial", _freeze(v0))
        object.__setattr__(self, "final", _freeze(f))

    @property
    def exact(self) -> bool:
        return nm.is_exact(self.initial)

    @cached_property
    def integer_forms(self) -> tuple:
        """Exact machines only: ``(matrices, initial, final)`` as integer forms."""
        return ({s: nm.integer_form(m) for s, m in self.matrices.items()},
                nm.integer_form(self.initial), nm.integer_form(self.final))

    def to_exact(self) -> Gfa:
        if self.exact:
            return self
        return Gfa(self.dim, self.alphabet,
                   {s: nm.to_exact(m, real=True) for s, m in self.matrices.items()},
                   nm.to_exact(self.initial, real=True), nm.to_exact(self.final, real=True))

    def to_float(self) -> Gfa:
        if not self.exact:
            return self
        return Gfa(self.dim, self.alphabet,
                   {s: nm.to_float(m) for s, m in self.matrices.items()},
                   nm.to_float(self.initial), nm.to_float(self.final))

    def negated(self) -> Gfa:
        return Gfa(self.dim, self.alphabet, self.matrices, self.initial, -self.final)


def pfa_accept_prob(pfa: Pfa, word: Sequence[str]):
    """Probability that ``pfa`` ends in an accepting state after ``¢ w $``."""
    if pfa.exact:
        return gfa_value(pfa.as_gfa, word)
    n = pfa.n
    v = nm.zeros(n, exact=pfa.exact, real=True)
    v[0] = Fraction(1) if pfa.exact else 1.0
    for s in tape(word, pfa.alphabet):
        v = nm.matmul(pfa.matrices[s], v)
    return sum((v[i] for i in sorted(pfa.accepting)), Fraction(0) if pfa.exact else 0.0)


def gfa_value(gfa: Gfa, word: Sequence[str]):
    if gfa.exact:
        mats, v0, f = gfa.integer_forms
        return nm.integer_chain(f, [mats[s] for s in tape(word, gfa.alphabet)], v0)
    v = gfa.initial
    for s in tape(word, gfa.alphabet):
        v = nm.matmul(gfa.matrices[s], v)
    return nm.matmul(gfa.final, v)


def lift(pfa: Pfa) -> Gfa:
    """The PFA viewed as a GFA with indicator initial/final vectors."""
    n = pfa.n
    one, zero = (Fraction(1), Fraction(0)) if pfa.exact else (1.0, 0.0)
    v0 = [one if i == 0 else zero for i in range(n)]
    f = [one if i in pfa.accepting else zero for i in range(n)]
    return Gfa(n, pfa.alphabet, pfa.matrices, nm.real_vector(v0, pfa.exact), nm.real_vector(f, pfa.exact))


def dfa_as_pfa(states: Sequence[str], alphabet: Sequence[str], delta: Mapping[str, Mapping[str, str]],
               initial: str, accepting: Iterable[str]) -> Pfa:
    """Deterministic automaton as a 0/1 column-stochastic PFA.

    ``delta[symbol][state]`` is the successor; end-marker entries are
    optional and default to staying put.
    """
    states = list(states)
    if initial in states and states[0] != initial:
        states.remove(initial)
        states.insert(0, initial)
    index = {q: i for i, q in enumerate(states)}
    n = len(states)
    mats = {}
    for s, moves in delta.items():
        m = [[Fraction(0)] * n for _ in range(n)]
        for q in states:
            if q not in moves:
                raise ValidationError(f"missing move for state {q!r}", where=f"delta[{s!r}]")
            target = moves[q]
            if target not in index:
                raise ValidationError(f"unknown target state {target!r}", where=f"delta[{s!r}][{q!r}]")
            m[index[target]][index[q]] = Fraction(1)
        mats[s] = nm.real_matrix(m, exact=True)
    return Pfa(tuple(states), tuple(alphabet), mats, frozenset(index[q] for q in accepting))


# ---------------------------------------------------------------------------
# acceptance modes


class Decision(enum.Enum):
    MEMBER = "member"
    NONMEMBER = "nonmember"
    UNDETERMINED = "undetermined"

    def __str__(self):
        return self.value


class ModeKind(enum.Enum):
    CUTPOINT_STRICT = "cutpoint"
    CUTPOINT_NONSTRICT = "nonstrict"
    BOUNDED_ERROR = "bounded"
    POSITIVE_ONE_SIDED = "positive"
    NEGATIVE_ONE_SIDED = "negative"


@dataclass(frozen=True)
class AcceptanceMode:
    """How an acceptance value is turned into a membership decision.

    ``param`` is the cutpoint for the two cutpoint kinds and the error bound
    for ``BOUNDED_ERROR``.  ``NEGATIVE_ONE_SIDED`` optionally takes a
    nonmember bound: values above it (and below 1) become undetermined.
    """

    kind: ModeKind
    param: float | Fraction | None = None
    tol: float = 1e-12

    def __post_init__(self):
        k = self.kind
        if k in (ModeKind.CUTPOINT_STRICT, ModeKind.CUTPOINT_NONSTRICT) and self.param is None:
            raise ValueError(f"{k.value} mode needs a cutpoint")
        if k is ModeKind.BOUNDED_ERROR:
            if self.param is None or not 0 <= self.param < 0.5:
                raise ValueError(f"bounded-error mode needs 0 <= eps < 1/2, got {self.param!r}")
        if k is ModeKind.POSITIVE_ONE_SIDED and self.param is not None:
            raise ValueError("positive one-sided mode takes no parameter")

    @classmethod
    def parse(cls, text: str) -> AcceptanceMode:
        """Parse ``kind[:param]``, e.g. ``cutpoint:1/2`` or ``bounded:0.25``."""
        name, _, raw = text.partition(":")
        try:
            kind = ModeKind(name.strip())
        except ValueError:
            names = ", ".join(m.value for m in ModeKind)
            raise ValueError(f"unknown acceptance mode {name!r} (choose from {names})") from None
        param = None
        if raw:
            param = Fraction(raw.strip()) if "/" in raw else float(raw)
        return cls(kind, param)

    def __str__(self):
        return self.kind.value if self.param is None else f"{self.kind.value}:{self.param}"


def classify_word(value, mode: AcceptanceMode) -> Decision:
    k = mode.kind
    if k is ModeKind.CUTPOINT_STRICT:
        return Decision.MEMBER if value > mode.param else Decision.NONMEMBER
    if k is ModeKind.CUTPOINT_NONSTRICT:
        return Decision.MEMBER if value >= mode.param else Decision.NONMEMBER
    if k is ModeKind.BOUNDED_ERROR:
        if value >= 1 - mode.param:
            return Decision.MEMBER
        if value <= mode.param:
            return Decision.NONMEMBER
        return Decision.UNDETERMINED
    if k is ModeKind.POSITIVE_ONE_SIDED:
        # tol absorbs float residue such as sin^2 of a rotation that cancelled to 1e-33
        return Decision.MEMBER if value > mode.tol else Decision.NONMEMBER
    if abs(value - 1) <= mode.tol:
        return Decision.MEMBER
    if mode.param is None or value <= mode.param + mode.tol:
        return Decision.NONMEMBER
    return Decision.UNDETERMINED
