"""Scalar and matrix plumbing for the two arithmetic modes.

Float mode stores matrices as ``complex128`` (or ``float64`` for real
machines).  Exact mode stores ``dtype=object`` arrays whose entries are
:class:`GaussianRational` (complex) or :class:`fractions.Fraction` (real).
Numpy's object-array ``@`` and ``conj`` dispatch to the element methods, so
the same algorithm code runs in both modes.
"""

from __future__ import annotations

import math
import numbers
from fractions import Fraction

import numpy as np

from .errors import DimensionError, ParseError

DEFAULT_TOL = 1e-9
CONSERVATION_TOL = 1e-12


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        # repr() is the shortest round-tripping decimal, so 0.1 becomes 1/10
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, numbers.Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, numbers.Real):
        return _frac(float(x))
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


_ZERO = Fraction(0)


class GaussianRational:
    """Complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Fraction else _frac(re)
        self.im = im if type(im) is Fraction else _frac(im)

    @classmethod
    def coerce(cls, x) -> GaussianRational:
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (complex, np.complexfloating)):
            return cls(float(x.real), float(x.imag))
        return cls(x, 0)

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __add__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other - self.re, -self.im)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            if not other.im:
                if not self.im:
                    return GaussianRational(self.re * other.re, _ZERO)
                return GaussianRational(self.re * other.re, self.im * other.re)
            if not self.im:
                return GaussianRational(self.re * other.re, self.re * other.im)
            return GaussianRational(self.re * other.re - self.im * other.im,
                                    self.re * other.im + self.im * other.re)
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re / other, self.im / other)
        if isinstance(other, GaussianRational):
            d = other.abs2()
            num = self * other.conjugate()
            return GaussianRational(num.re / d, num.im / d)
        return NotImplemented

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, (float, complex)):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        return hash(self.re) if not self.im else hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return math.hypot(float(self.re), float(self.im))

    def __repr__(self):
        if not self.im:
            return f"GaussianRational({self.re})"
        return f"GaussianRational({self.re}, {self.im})"


# ---------------------------------------------------------------------------
# array construction


def is_exact(a) -> bool:
    return isinstance(a, np.ndarray) and a.dtype == object


def _exact_complex(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return GaussianRational(_frac(x[0]), _frac(x[1]))
    return GaussianRational.coerce(x)


def _float_complex(x) -> complex:
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(float(_frac(x[0]) if isinstance(x[0], str) else x[0]),
                       float(_frac(x[1]) if isinstance(x[1], str) else x[1]))
    if isinstance(x, str):
        return complex(float(_frac(x)))
    return complex(x)


def complex_matrix(data, exact: bool = False, ndim: int = 2) -> np.ndarray:
    """Build a complex matrix (``ndim=2``) or vector (``ndim=1``).

    Entries may be numbers, ``GaussianRational``, ``"p/q"`` strings or
    ``[re, im]`` pairs.
    """
    if isinstance(data, np.ndarray) and data.dtype != object:
        if exact:
            out = np.empty(data.shape, dtype=object)
            for idx, x in np.ndenumerate(data):
                out[idx] = GaussianRational.coerce(complex(x))
            return out
        return data.astype(complex)
    conv = _exact_complex if exact else _float_complex
    return _map_nested(data, conv, object if exact else complex, ndim)


def complex_vector(data, exact: bool = False) -> np.ndarray:
    return complex_matrix(data, exact, ndim=1)


def _real_conv(exact):
    def conv(x):
        if isinstance(x, GaussianRational):
            if x.im:
                raise ValueError(f"complex entry {x!r} in a real matrix")
            x = x.re
        if isinstance(x, (list, tuple)):
            if len(x) != 2 or _frac(x[1]) != 0:
                raise ValueError(f"complex entry {x!r} in a real matrix")
            x = x[0]
        if isinstance(x, (complex, np.complexfloating)):
            if x.imag:
                raise ValueError(f"complex entry {x!r} in a real matrix")
            x = float(x.real)
        if exact:
            return _frac(x)
        return float(_frac(x)) if isinstance(x, str) else float(x)
    return conv


def real_matrix(data, exact: bool = False, ndim: int = 2) -> np.ndarray:
    """Real-valued counterpart of :func:`complex_matrix` (Fraction or float)."""
    if isinstance(data, np.ndarray) and data.dtype != object:
        if np.iscomplexobj(data):
            if np.any(data.imag != 0):
                raise ValueError("complex entries in a real matrix")
            data = data.real
        if exact:
            out = np.empty(data.shape, dtype=object)
            for idx, x in np.ndenumerate(data):
                out[idx] = _frac(float(x))
            return out
        return data.astype(float)
    return _map_nested(data, _real_conv(exact), object if exact else float, ndim)


def real_vector(data, exact: bool = False) -> np.ndarray:
    return real_matrix(data, exact, ndim=1)


def _map_nested(data, conv, dtype, ndim):
    if ndim == 1:
        items = [conv(x) for x in data]
        out = np.empty(len(items), dtype=dtype)
        for i, x in enumerate(items):
            out[i] = x
        return out
    rows = [[conv(x) for x in row] for row in data]
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise DimensionError("ragged matrix rows")
    out = np.empty((len(rows), widths.pop() if widths else 0), dtype=dtype)
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            out[i, j] = x
    return out


def eye(n: int, exact: bool = False, real: bool = False) -> np.ndarray:
    if not exact:
        return np.eye(n, dtype=float if real else complex)
    one, zero = (Fraction(1), Fraction(0)) if real else (GaussianRational(1), GaussianRational(0))
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            out[i, j] = one if i == j else zero
    return out


def zeros(shape, exact: bool = False, real: bool = False) -> np.ndarray:
    if not exact:
        return np.zeros(shape, dtype=float if real else complex)
    zero = Fraction(0) if real else GaussianRational(0)
    out = np.empty(shape, dtype=object)
    out.fill(zero)
    return out


def _real_rows(a2, rows_b, out):
    # sum each entry over a common denominator and reduce once
    m = out.shape[1]
    rows_b = [[(j, y.numerator, y.denominator) for j, y in row] for row in rows_b]
    for i in range(a2.shape[0]):
        terms = [[] for _ in range(m)]
        for t, x in enumerate(a2[i]):
            if not x:
                continue
            x = x.real
            xn, xd = x.numerator, x.denominator
            for j, yn, yd in rows_b[t]:
                terms[j].append((xn * yn, xd * yd))
        for j, ts in enumerate(terms):
            if not ts:
                out[i, j] = _ZERO
                continue
            den = math.lcm(*(d for _, d in ts))
            out[i, j] = Fraction(sum(n * (den // d) for n, d in ts), den)


def _complex_rows(a2, rows_b, out):
    zero = GaussianRational(0)
    m = out.shape[1]
    for i in range(a2.shape[0]):
        acc = [None] * m
        for t, x in enumerate(a2[i]):
            if not x:
                continue
            for j, y in rows_b[t]:
                prod = x * y
                acc[j] = prod if acc[j] is None else acc[j] + prod
        for j in range(m):
            out[i, j] = zero if acc[j] is None else acc[j]


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``a @ b`` that skips zero entries when either operand is exact.

    Exact matrices here (matrix units, Hermitian basis elements, block
    embeddings) are mostly zeros, and each skipped product saves a rational
    multiplication.
    """
    if not (is_exact(a) or is_exact(b)):
        return a @ b
    a2 = a if a.ndim == 2 else a[None, :]
    b2 = b if b.ndim == 2 else b[:, None]
    n, k = a2.shape
    if b2.shape[0] != k:
        raise DimensionError(f"cannot multiply shapes {a.shape} and {b.shape}")
    m = b2.shape[1]
    rows_b = [[(j, y) for j, y in enumerate(b2[t]) if y] for t in range(k)]
    entries = [*a2.flat, *(y for row in rows_b for _, y in row)]
    gauss = any(isinstance(x, GaussianRational) for x in entries)
    out = np.empty((n, m), dtype=object)
    if not any(isinstance(x, GaussianRational) and x.im for x in entries):
        # purely real data takes the integer fast path, re-wrapped if the inputs were complex-typed
        _real_rows(a2, [[(j, y.real) for j, y in row] for row in rows_b], out)
        if gauss:
            for idx, v in np.ndenumerate(out):
                out[idx] = GaussianRational(v, _ZERO)
    else:
        _complex_rows(a2, rows_b, out)
    if a.ndim == 1 and b.ndim == 1:
        return out[0, 0]
    if a.ndim == 1:
        return out[0]
    if b.ndim == 1:
        return out[:, 0]
    return out


def integer_form(a: np.ndarray) -> tuple[np.ndarray, int]:
    """Split a real rational array into ``(N, D)`` with integer ``N`` and ``a = N / D``."""
    den = math.lcm(*(Fraction(x).denominator for x in a.flat)) if a.size else 1
    ints = np.empty(a.shape, dtype=object)
    for idx, x in np.ndenumerate(a):
        x = Fraction(x)
        ints[idx] = x.numerator * (den // x.denominator)
    return ints, den


def integer_chain(final, factors, initial) -> Fraction:
    """``final . F_k ... F_1 . initial`` for integer forms, reduced once at the end."""
    v, den = initial
    for n, d in factors:
        v = n @ v
        den *= d
    return Fraction(int(final[0] @ v), final[1] * den)


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conjugate(a).T


def to_float(a: np.ndarray) -> np.ndarray:
    """Float copy of an exact array (complex if any entry is complex)."""
    if not is_exact(a):
        return a
    if all(isinstance(x, Fraction) or isinstance(x, int) for x in a.flat):
        return np.array([float(x) for x in a.flat], dtype=float).reshape(a.shape)
    return np.array([complex(x) for x in a.flat], dtype=complex).reshape(a.shape)


def to_exact(a: np.ndarray, real: bool = False) -> np.ndarray:
    """Exact copy of a float array; floats convert via their shortest decimal."""
    if is_exact(a):
        if real or not any(isinstance(x, Fraction) for x in a.flat):
            return a
        return np.vectorize(GaussianRational.coerce, otypes=[object])(a)
    return real_matrix(a, exact=True) if real else complex_matrix(a, exact=True)


def max_abs(a: np.ndarray) -> float:
    """Max-norm of an array, returned as a float in either mode."""
    if a.size == 0:
        return 0.0
    if is_exact(a):
        return max(abs(complex(x)) for x in a.flat)
    return float(np.max(np.abs(a)))


def abs2(x):
    """Squared modulus; exact (Fraction) for exact scalars."""
    if isinstance(x, GaussianRational):
        return x.abs2()
    if isinstance(x, (Fraction, int)):
        return x * x
    return abs(x) ** 2


def real_part(x):
    if isinstance(x, GaussianRational):
        return x.re
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    return float(np.real(x))


def imag_part(x):
    if isinstance(x, GaussianRational):
        return x.im
    if isinstance(x, (Fraction, int)):
        return Fraction(0)
    return float(np.imag(x))


def require_square(m: np.ndarray, name: str = "matrix") -> int:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    return m.shape[0]


# ---------------------------------------------------------------------------
# scalar serialization: complex -> [re, im], rationals -> "p/q"


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def encode_scalar(x):
    if isinstance(x, GaussianRational):
        return [format_rational(x.re), format_rational(x.im)]
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    return float(x)


def decode_scalar(raw, field: str):
    """Validate one serialized scalar; returns it unchanged for the matrix builders."""
    def ok_real(v):
        if isinstance(v, bool):
            return False
        if isinstance(v, (int, float)):
            return math.isfinite(v)
        if isinstance(v, str):
            try:
                Fraction(v.strip())
            except (ValueError, ZeroDivisionError):
                return False
            return True
        return False

    if isinstance(raw, list):
        if len(raw) != 2 or not all(ok_real(v) for v in raw):
            raise ParseError(f"expected [re, im] pair, got {raw!r}", field)
        return raw
    if not ok_real(raw):
        raise ParseError(f"expected a number or 'p/q' string, got {raw!r}", field)
    return raw


def encode_matrix(a: np.ndarray):
    if a.ndim == 1:
        return [encode_scalar(x) for x in a]
    return [[encode_scalar(x) for x in row] for row in a]
