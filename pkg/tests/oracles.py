"""Independent reference computations used by several test modules."""

import itertools
from fractions import Fraction

import numpy as np

from qfasim import numeric as nm
from qfasim.classical import Gfa, Pfa


def length_lex(alphabet, max_len):
    for n in range(max_len + 1):
        for t in itertools.product(sorted(alphabet), repeat=n):
            yield "".join(t)


def first_difference(g1: Gfa, g2: Gfa, max_len: int):
    """Brute force: the length-lex first word up to ``max_len`` on which the values differ."""
    for w in length_lex(g1.alphabet, max_len):
        if _value(g1, w) != _value(g2, w):
            return w
    return None


def _value(g: Gfa, w: str):
    # plain Fraction loops, no numpy matmul, to stay independent of the library path
    v = list(g.initial)
    for s in ("¢", *w, "$"):
        m = g.matrices[s]
        v = [sum((m[i, j] * v[j] for j in range(g.dim)), Fraction(0)) for i in range(g.dim)]
    return sum((g.final[i] * v[i] for i in range(g.dim)), Fraction(0))


def random_fraction(rng, den=4, lo=-4, hi=4):
    return Fraction(int(rng.integers(lo, hi + 1)), int(rng.integers(1, den + 1)))


def random_rational_gfa(rng, n, alphabet=("a", "b")):
    mats = {s: nm.real_matrix([[random_fraction(rng) for _ in range(n)] for _ in range(n)], exact=True)
            for s in alphabet}
    v0 = nm.real_vector([random_fraction(rng) for _ in range(n)], exact=True)
    f = nm.real_vector([random_fraction(rng) for _ in range(n)], exact=True)
    return Gfa(n, alphabet, mats, v0, f)


def _unimodular(rng, n):
    s = nm.eye(n, exact=True, real=True)
    for _ in range(3):
        i, j = rng.choice(n, size=2, replace=False) if n > 1 else (0, 0)
        if i != j:
            s[i] = s[i] + s[j] * int(rng.integers(-2, 3))
    return s


def _exact_inverse(s):
    n = s.shape[0]
    aug = np.concatenate([s.copy(), nm.eye(n, exact=True, real=True)], axis=1)
    for c in range(n):
        p = next(r for r in range(c, n) if aug[r, c] != 0)
        aug[[c, p]] = aug[[p, c]]
        aug[c] = aug[c] / aug[c, c]
        for r in range(n):
            if r != c and aug[r, c] != 0:
                aug[r] = aug[r] - aug[c] * aug[r, c]
    return aug[:, n:]


def similar_gfa(rng, g: Gfa) -> Gfa:
    """Same function, different coordinates: ``S M S^-1``."""
    s = _unimodular(rng, g.dim)
    si = _exact_inverse(s)
    return Gfa(g.dim, g.alphabet, {k: s @ m @ si for k, m in g.matrices.items()}, s @ g.initial, g.final @ si)


def padded_gfa(g: Gfa, extra: int, rng) -> Gfa:
    """Add ``extra`` unreachable states with arbitrary dynamics."""
    n = g.dim + extra
    mats = {}
    for k, m in g.matrices.items():
        big = nm.zeros((n, n), exact=True, real=True)
        big[:g.dim, :g.dim] = m
        for i in range(g.dim, n):
            for j in range(n):
                big[i, j] = random_fraction(rng)
        mats[k] = big
    v0 = np.concatenate([g.initial, nm.zeros(extra, exact=True, real=True)])
    f = np.concatenate([g.final, nm.real_vector([random_fraction(rng) for _ in range(extra)], exact=True)])
    return Gfa(n, g.alphabet, mats, v0, f)


def random_rational_pfa(rng, n=3, alphabet=("a", "b")):
    mats = {}
    for s in alphabet:
        cols = []
        for _ in range(n):
            w = [int(x) for x in rng.integers(0, 5, size=n)]
            if sum(w) == 0:
                w[int(rng.integers(n))] = 1
            cols.append([Fraction(x, sum(w)) for x in w])
        mats[s] = nm.real_matrix([[cols[j][i] for j in range(n)] for i in range(n)], exact=True)
    acc = {i for i in range(n) if rng.random() < 0.5} or {0}
    return Pfa(tuple(f"s{i}" for i in range(n)), alphabet, mats, acc)


def first_difference_fast(g1: Gfa, g2: Gfa, max_len: int):
    """Same answer as :func:`first_difference`, sharing prefix vectors across words."""
    def advance(g, v, s):
        m = g.matrices[s]
        return [sum((m[i, j] * v[j] for j in range(g.dim) if v[j]), Fraction(0)) for i in range(g.dim)]

    def close(g, v):
        v = advance(g, v, "$")
        return sum((g.final[i] * v[i] for i in range(g.dim)), Fraction(0))

    layer = [("", advance(g1, list(g1.initial), "¢"), advance(g2, list(g2.initial), "¢"))]
    for n in range(max_len + 1):
        for w, v1, v2 in layer:
            if close(g1, v1) != close(g2, v2):
                return w
        if n == max_len:
            break
        layer = [(w + s, advance(g1, v1, s), advance(g2, v2, s))
                 for w, v1, v2 in layer for s in sorted(g1.alphabet)]
    return None
