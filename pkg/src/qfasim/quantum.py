"""Pure states, density matrices, Kraus channels and measurements."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import numeric as nm
from .errors import DimensionError, ValidationError
from .numeric import CONSERVATION_TOL, DEFAULT_TOL, GaussianRational


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class StateVector:
    """Unit-norm amplitude vector over the basis ``|q_1>, ..., |q_dim>``."""

    amps: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        amps = self.amps
        if not isinstance(amps, np.ndarray) or amps.dtype not in (object, complex):
            amps = nm.complex_vector(amps)
        if amps.ndim != 1 or amps.size == 0:
            raise DimensionError(f"state vector must be a nonempty 1-d array, got shape {amps.shape}")
        norm2 = _norm2(amps)
        if abs(float(norm2) - 1.0) > self.tol:
            raise ValidationError("state vector is not unit norm", defect=abs(float(norm2) - 1.0))
        object.__setattr__(self, "amps", _frozen(amps))

    @classmethod
    def basis(cls, dim: int, index: int = 0, exact: bool = False) -> StateVector:
        v = nm.zeros(dim, exact=exact)
        v[index] = GaussianRational(1) if exact else 1.0
        return cls(v)

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    @property
    def exact(self) -> bool:
        return nm.is_exact(self.amps)

    def probabilities(self) -> np.ndarray:
        if self.exact:
            return np.array([x.abs2() for x in self.amps], dtype=object)
        return np.abs(self.amps) ** 2

    def evolve(self, u: np.ndarray) -> StateVector:
        return StateVector(nm.matmul(u, self.amps), tol=self.tol)

    def density(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.amps, np.conjugate(self.amps)), tol=self.tol)


def _norm2(v: np.ndarray):
    if nm.is_exact(v):
        return sum((nm.abs2(x) for x in v), Fraction(0))
    return float(np.vdot(v, v).real)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, trace-one matrix describing a (possibly mixed) state.

    Positive semidefiniteness is not checked here; see :meth:`check_psd`.
    """

    entries: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        rho = self.entries
        if not isinstance(rho, np.ndarray) or rho.dtype not in (object, complex):
            rho = nm.complex_matrix(rho)
        nm.require_square(rho, "density matrix")
        herm = nm.max_abs(rho - nm.dagger(rho))
        if herm > self.tol:
            raise ValidationError("density matrix is not Hermitian", defect=herm)
        tr = abs(complex(_trace(rho)) - 1.0)
        if tr > self.tol:
            raise ValidationError("density matrix trace differs from 1", defect=tr)
        object.__setattr__(self, "entries", _frozen(rho))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def exact(self) -> bool:
        return nm.is_exact(self.entries)

    def trace(self):
        return _trace(self.entries)

    def diagonal(self) -> list:
        """Real diagonal (Fractions in exact mode)."""
        return [nm.real_part(self.entries[i, i]) for i in range(self.dim)]

    def check_psd(self, tol: float = DEFAULT_TOL) -> bool:
        """Debug-path check: smallest eigenvalue >= -tol."""
        rho = nm.to_float(self.entries).astype(complex)
        return bool(np.linalg.eigvalsh(rho).min() >= -tol)


def _trace(m: np.ndarray):
    total = m[0, 0] * 0
    for i in range(m.shape[0]):
        total = total + m[i, i]
    return total


@dataclass(frozen=True)
class Superoperator:
    """Channel ``rho -> sum_i w_i B_i rho B_i^dagger``.

    The Kraus operators are ``E_i = sqrt(w_i) B_i``.  With ``weights`` left as
    ``None`` every ``w_i`` is 1 and ``B_i`` are the Kraus operators
    themselves; explicit weights let rational channels such as the
    stochastic-matrix embedding stay exact even though their Kraus entries
    are square roots.
    """

    kraus: tuple
    weights: tuple | None = None

    def __post_init__(self):
        ops = tuple(self.kraus)
        if not ops:
            raise DimensionError("a superoperator needs at least one Kraus operator")
        dim = nm.require_square(ops[0], "Kraus operator 0")
        for i, e in enumerate(ops):
            if nm.require_square(e, f"Kraus operator {i}") != dim:
                raise DimensionError(f"Kraus operator {i} has dimension {e.shape[0]}, expected {dim}")
        exact = {nm.is_exact(e) for e in ops}
        if len(exact) > 1:
            raise DimensionError("Kraus operators mix exact and float entries")
        weights = self.weights
        if weights is not None:
            weights = tuple(weights)
            if len(weights) != len(ops):
                raise DimensionError("one weight per Kraus operator required")
            if any(w < 0 for w in weights):
                raise ValidationError("Kraus weights must be nonnegative")
        object.__setattr__(self, "kraus", tuple(_frozen(e) for e in ops))
        object.__setattr__(self, "weights", weights)

    @classmethod
    def unitary(cls, u: np.ndarray) -> Superoperator:
        return cls((u,))

    @classmethod
    def identity(cls, dim: int, exact: bool = False) -> Superoperator:
        return cls((nm.eye(dim, exact=exact),))

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    @property
    def exact(self) -> bool:
        return nm.is_exact(self.kraus[0])

    def weighted(self):
        """Yield ``(w_i, B_i)`` pairs."""
        one = Fraction(1) if self.exact else 1.0
        ws = self.weights or (one,) * len(self.kraus)
        return zip(ws, self.kraus)

    def kraus_matrices(self) -> list[np.ndarray]:
        """Materialized Kraus operators (float; exact only when unweighted)."""
        if self.weights is None:
            return list(self.kraus)
        return [np.sqrt(float(w)) * nm.to_float(b).astype(complex) for w, b in self.weighted()]

    def to_float(self) -> Superoperator:
        if not self.exact:
            return self
        ws = None if self.weights is None else tuple(float(w) for w in self.weights)
        return Superoperator(tuple(nm.to_float(b).astype(complex) for b in self.kraus), ws)

    def to_exact(self) -> Superoperator:
        if self.exact:
            return self
        ws = None if self.weights is None else tuple(nm._frac(float(w)) for w in self.weights)
        return Superoperator(tuple(nm.to_exact(b) for b in self.kraus), ws)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        out = None
        for w, b in self.weighted():
            term = nm.matmul(nm.matmul(b, rho), nm.dagger(b))
            if w != 1:
                term = term * w
            out = term if out is None else out + term
        return out


@dataclass(frozen=True)
class BasisPartition:
    """Disjoint labelled blocks of basis indices covering ``range(dim)``."""

    blocks: tuple
    labels: tuple
    dim: int

    def __post_init__(self):
        blocks = tuple(tuple(sorted(set(b))) for b in self.blocks)
        labels = tuple(self.labels)
        if len(blocks) != len(labels):
            raise DimensionError("one label per block required")
        if len(set(labels)) != len(labels):
            raise ValidationError("block labels must be distinct")
        seen: set[int] = set()
        for label, b in zip(labels, blocks):
            for i in b:
                if not 0 <= i < self.dim:
                    raise ValidationError(f"index {i} outside 0..{self.dim - 1}", where=f"block {label!r}")
                if i in seen:
                    raise ValidationError(f"index {i} appears in two blocks", where=f"block {label!r}")
                seen.add(i)
        if len(seen) != self.dim:
            missing = sorted(set(range(self.dim)) - seen)
            raise ValidationError(f"blocks do not cover indices {missing}")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def singletons(cls, dim: int) -> BasisPartition:
        return cls(tuple((i,) for i in range(dim)), tuple(range(dim)), dim)

    def block(self, label) -> tuple:
        return self.blocks[self.labels.index(label)]


# ---------------------------------------------------------------------------
# validators


def unitarity_defect(m: np.ndarray) -> float:
    n = nm.require_square(m)
    return nm.max_abs(nm.matmul(nm.dagger(m), m) - nm.eye(n, exact=nm.is_exact(m)))


def validate_unitary(m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``max|M^dagger M - I| <= tol``."""
    return unitarity_defect(m) <= tol


def kraus_defect(e: Superoperator) -> float:
    total = nm.zeros((e.dim, e.dim), exact=e.exact)
    for w, b in e.weighted():
        total = total + nm.matmul(nm.dagger(b), b) * w
    return nm.max_abs(total - nm.eye(e.dim, exact=e.exact))


def validate_kraus(e: Superoperator, tol: float = DEFAULT_TOL) -> bool:
    """Completeness ``sum E_i^dagger E_i = I`` within ``tol``."""
    return kraus_defect(e) <= tol


def validate_bistochastic(e: Superoperator, tol: float = DEFAULT_TOL) -> bool:
    """Completeness plus unitality ``sum E_i E_i^dagger = I``."""
    if not validate_kraus(e, tol):
        return False
    total = nm.zeros((e.dim, e.dim), exact=e.exact)
    for w, b in e.weighted():
        total = total + nm.matmul(b, nm.dagger(b)) * w
    return nm.max_abs(total - nm.eye(e.dim, exact=e.exact)) <= tol


# ---------------------------------------------------------------------------
# operations


def apply_superoperator(e: Superoperator, rho: DensityMatrix) -> DensityMatrix:
    if e.dim != rho.dim:
        raise DimensionError(f"channel acts on dimension {e.dim}, state has {rho.dim}")
    if e.exact != rho.exact:
        e = e.to_exact() if rho.exact else e.to_float()
    return DensityMatrix(e(rho.entries), tol=rho.tol)


@dataclass(frozen=True)
class MeasurementOutcome:
    label: object
    probability: object
    state: StateVector | None


def partial_measure(psi: StateVector, partition: BasisPartition) -> list[MeasurementOutcome]:
    """Measure ``psi`` against the blocks of ``partition``.

    One outcome per block in partition order; the post-measurement state is
    ``None`` for zero-probability blocks.
    """
    if partition.dim != psi.dim:
        raise DimensionError(f"partition over {partition.dim} indices, state has {psi.dim}")
    probs = psi.probabilities()
    out = []
    for label, block in zip(partition.labels, partition.blocks):
        p = sum((probs[i] for i in block), Fraction(0) if psi.exact else 0.0)
        post = None
        if p > 0:
            v = nm.zeros(psi.dim, exact=psi.exact)
            for i in block:
                v[i] = psi.amps[i]
            if psi.exact:
                # sqrt(p) is generally irrational, so exact post-states fall back to float
                v = nm.to_float(v).astype(complex)
            v = v / np.sqrt(float(p))
            post = StateVector(v, tol=max(psi.tol, CONSERVATION_TOL))
        out.append(MeasurementOutcome(label, p, post))
    return out


def density_of_mixture(pairs: Sequence[tuple], tol: float = DEFAULT_TOL) -> DensityMatrix:
    """``rho = sum_j p_j |psi_j><psi_j|`` for an ensemble of pure states."""
    if not pairs:
        raise ValidationError("empty ensemble")
    total_p = 0
    rho = None
    for j, (p, psi) in enumerate(pairs):
        if p < 0:
            raise ValidationError("negative ensemble weight", where=f"member {j}")
        total_p = total_p + p
        if not isinstance(psi, StateVector):
            psi = StateVector(psi)
        term = np.outer(psi.amps, np.conjugate(psi.amps)) * (nm._frac(p) if psi.exact else float(p))
        if rho is not None and rho.shape != term.shape:
            raise DimensionError(f"member {j} has dimension {psi.dim}")
        rho = term if rho is None else rho + term
    if abs(float(total_p) - 1.0) > tol:
        raise ValidationError("ensemble weights do not sum to 1", defect=abs(float(total_p) - 1.0))
    return DensityMatrix(rho, tol=tol)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random unitary via QR of a complex Gaussian matrix."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_channel(dim: int, n_kraus: int, rng: np.random.Generator) -> Superoperator:
    """Random valid channel from a slice of a random isometry."""
    u = random_unitary(dim * n_kraus, rng)
    iso = u[:, :dim]
    return Superoperator(tuple(iso[k * dim:(k + 1) * dim, :] for k in range(n_kraus)))


def complete_unitary(columns: dict[int, np.ndarray], dim: int, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Extend prescribed orthonormal columns to a full unitary.

    Missing columns are filled in increasing index order by Gram-Schmidt
    over the standard basis ``e_0, e_1, ...``; the result is deterministic.
    """
    u = np.zeros((dim, dim), dtype=complex)
    basis = []
    for j in sorted(columns):
        col = np.asarray(nm.to_float(nm.complex_vector(columns[j])) if not isinstance(columns[j], np.ndarray)
                         else nm.to_float(columns[j]), dtype=complex)
        if col.shape != (dim,):
            raise DimensionError(f"column {j} has shape {col.shape}, expected ({dim},)")
        u[:, j] = col
        basis.append(col)
    gram = np.array([[np.vdot(a, b) for b in basis] for a in basis]) if basis else np.zeros((0, 0))
    if basis and np.max(np.abs(gram - np.eye(len(basis)))) > tol:
        raise ValidationError("prescribed columns are not orthonormal")
    missing = [j for j in range(dim) if j not in columns]
    k = 0
    for j in missing:
        while True:
            if k >= dim:
                raise ValidationError("could not complete the unitary")
            v = np.zeros(dim, dtype=complex)
            v[k] = 1.0
            k += 1
            for b in basis:
                v = v - np.vdot(b, v) * b
            n = np.linalg.norm(v)
            if n > 1e-8:
                v = v / n
                break
        u[:, j] = v
        basis.append(v)
    return u
