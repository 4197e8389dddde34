"""Linearization of quantum automata and exact equivalence checking."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import numeric as nm
from .classical import LEFT_END, RIGHT_END, Gfa, gfa_value
from .errors import AlphabetError
from .numeric import GaussianRational
from .oneway import GeneralQfa, Mcqfa, mcqfa_as_general

NUMERIC_RANK_TOL = 1e-9


def _coordinate_basis(n: int, exact: bool) -> list[np.ndarray]:
    """Hermitian matrices dual to the real coordinates of a density matrix.

    Coordinates are ordered: the ``n`` diagonal entries, then for every
    ``i < j`` the real and imaginary parts of ``rho[i, j]``.
    """
    one = GaussianRational(1) if exact else 1.0
    i_unit = GaussianRational(0, 1) if exact else 1j
    basis = []
    for i in range(n):
        b = nm.zeros((n, n), exact=exact)
        b[i, i] = one
        basis.append(b)
    for i in range(n):
        for j in range(i + 1, n):
            re = nm.zeros((n, n), exact=exact)
            re[i, j] = one
            re[j, i] = one
            im = nm.zeros((n, n), exact=exact)
            im[i, j] = i_unit
            im[j, i] = -i_unit
            basis.extend((re, im))
    return basis


def density_coordinates(rho: np.ndarray) -> np.ndarray:
    """Real ``n^2``-vector of a Hermitian matrix in the :func:`_coordinate_basis` order."""
    n = rho.shape[0]
    exact = nm.is_exact(rho)
    coords = [nm.real_part(rho[i, i]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            coords.append(nm.real_part(rho[i, j]))
            coords.append(nm.imag_part(rho[i, j]))
    return nm.real_vector(coords, exact=exact)


def qfa_to_gfa(m: GeneralQfa | Mcqfa) -> Gfa:
    """``n^2``-dimensional GFA with the same acceptance value on every word.

    Column ``c`` of each matrix is the coordinate vector of the channel
    applied to the ``c``-th Hermitian basis matrix; since channels are real
    linear on Hermitian matrices this reproduces ``T_s`` exactly.
    """
    if isinstance(m, Mcqfa):
        m = mcqfa_as_general(m)
    n, exact = m.n, m.exact
    basis = _coordinate_basis(n, exact)
    mats = {}
    for s, ch in m.channels.items():
        cols = [density_coordinates(ch(b)) for b in basis]
        mats[s] = np.stack(cols, axis=1) if cols else nm.zeros((0, 0), exact=exact, real=True)
    initial = density_coordinates(m.initial_density())
    one, zero = (Fraction(1), Fraction(0)) if exact else (1.0, 0.0)
    final = [one if c < n and c in m.accepting else zero for c in range(n * n)]
    return Gfa(n * n, m.alphabet, mats, initial, nm.real_vector(final, exact=exact))


@dataclass(frozen=True)
class LinearizedMachine:
    """GFA with the end-markers folded away: ``value(w) = f . M_wn ... M_w1 v0``."""

    dim: int
    alphabet: tuple
    matrices: dict
    initial: np.ndarray
    final: np.ndarray

    @classmethod
    def from_gfa(cls, g: Gfa) -> LinearizedMachine:
        return cls(g.dim, g.alphabet, {s: g.matrices[s] for s in g.alphabet},
                   nm.matmul(g.matrices[LEFT_END], g.initial), nm.matmul(g.final, g.matrices[RIGHT_END]))

    def value(self, word: Sequence[str]):
        v = self.initial
        for s in word:
            v = nm.matmul(self.matrices[s], v)
        return nm.matmul(self.final, v)


def difference_machine(g1: Gfa, g2: Gfa) -> LinearizedMachine:
    """Block-diagonal machine whose value is ``f_1(w) - f_2(w)``."""
    if set(g1.alphabet) != set(g2.alphabet):
        raise AlphabetError(sorted(set(g1.alphabet) ^ set(g2.alphabet))[0], g1.alphabet)
    a, b = LinearizedMachine.from_gfa(g1), LinearizedMachine.from_gfa(g2)
    exact = g1.exact
    n1, n2 = a.dim, b.dim
    mats = {}
    for s in sorted(g1.alphabet):
        m = nm.zeros((n1 + n2, n1 + n2), exact=exact, real=True)
        m[:n1, :n1] = a.matrices[s]
        m[n1:, n1:] = b.matrices[s]
        mats[s] = m
    v0 = np.concatenate([a.initial, b.initial])
    f = np.concatenate([a.final, -b.final])
    return LinearizedMachine(n1 + n2, tuple(sorted(g1.alphabet)), mats, v0, f)


class _ExactSpan:
    """Row-echelon basis over the rationals (first nonzero entry as pivot)."""

    def __init__(self):
        self.rows: list[tuple[int, np.ndarray]] = []

    def reduce(self, v: np.ndarray) -> np.ndarray:
        v = v.copy()
        for piv, b in self.rows:
            c = v[piv]
            if c:
                v = v - b * c
        return v

    def add(self, v: np.ndarray) -> bool:
        r = self.reduce(v)
        for k, x in enumerate(r):
            if x:
                self.rows.append((k, r / x))
                return True
        return False


class _FloatSpan:
    """Orthonormal basis grown by modified Gram-Schmidt; rank decisions at a tolerance."""

    def __init__(self, tol: float = NUMERIC_RANK_TOL):
        self.tol = tol
        self.rows: list[np.ndarray] = []

    def add(self, v: np.ndarray) -> bool:
        v = np.asarray(v, dtype=float)
        scale = max(1.0, float(np.linalg.norm(v)))
        r = v.copy()
        for _ in range(2):
            for b in self.rows:
                r = r - (b @ r) * b
        n = float(np.linalg.norm(r))
        if n <= self.tol * scale:
            return False
        self.rows.append(r / n)
        return True


@dataclass(frozen=True)
class EquivalenceVerdict:
    equal: bool
    mode: str
    witness: str | None = None
    values: tuple | None = None
    span_dim: int = 0
    bound: int = 0

    def __bool__(self):
        return self.equal


def _is_nonzero(x, exact: bool, tol: float) -> bool:
    return bool(x != 0) if exact else abs(float(x)) > tol


def gfa_equiv(g1: Gfa, g2: Gfa, exact: bool | None = None, tol: float = NUMERIC_RANK_TOL) -> EquivalenceVerdict:
    """Decide ``f_1(w) = f_2(w)`` for all words.

    Reachable vectors of the difference machine are explored breadth-first in
    length-then-lexicographic order and kept only when they enlarge the span.
    The machines agree everywhere iff the final functional vanishes on that
    span.  The first explored word with nonzero difference is returned as
    witness; it is a shortest distinguishing word and has length at most
    ``n_1 + n_2 - 1``.

    ``exact=None`` runs exactly when both machines are exact.  Float inputs
    are converted through their shortest decimal representations when
    ``exact=True``.  Float runs are labelled ``"numeric"``.
    """
    if exact is None:
        exact = g1.exact and g2.exact
    g1, g2 = (g1.to_exact(), g2.to_exact()) if exact else (g1.to_float(), g2.to_float())
    diff = difference_machine(g1, g2)
    span = _ExactSpan() if exact else _FloatSpan(tol)
    bound = g1.dim + g2.dim - 1
    mode = "exact" if exact else "numeric"
    queue = deque([((), diff.initial)])
    extensions = 0
    witness = None
    while queue:
        word, v = queue.popleft()
        # vectors already in the span cannot distinguish: every earlier basis vector passed
        if not span.add(v):
            continue
        extensions += 1
        if extensions > diff.dim:
            raise AssertionError("span grew beyond the machine dimension")
        if _is_nonzero(nm.matmul(diff.final, v), exact, tol):
            witness = word
            break
        for s in diff.alphabet:
            queue.append((word + (s,), nm.matmul(diff.matrices[s], v)))
    if witness is None:
        return EquivalenceVerdict(True, mode, span_dim=extensions, bound=bound)
    w = "".join(witness)
    return EquivalenceVerdict(False, mode, w, (gfa_value(g1, w), gfa_value(g2, w)),
                              span_dim=extensions, bound=bound)


def qfa_equiv(m1, m2, exact: bool | None = None, tol: float = NUMERIC_RANK_TOL) -> EquivalenceVerdict:
    """Equivalence of two one-way quantum automata via their ``n^2``-state linearizations.

    ``exact=True`` converts float machines to exact ones before linearizing.
    """
    def prep(m):
        if isinstance(m, Mcqfa):
            m = mcqfa_as_general(m)
        if exact is None:
            return m
        return m.to_exact() if exact else m.to_float()

    m1, m2 = prep(m1), prep(m2)
    return gfa_equiv(qfa_to_gfa(m1), qfa_to_gfa(m2), exact=exact, tol=tol)
