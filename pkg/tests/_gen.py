"""Seeded generators of test data shared by the test modules."""

import random
from fractions import Fraction

from schottky.bt_tree import TreeIsometry, TreeVertex, neighbors, distance
from schottky.exact_arith import Matrix


def elementary(rng, p, max_exp=1):
    """Random elementary SL2 matrix with an entry of the form k / p^e."""
    e = rng.randint(0, max_exp)
    k = rng.choice([x for x in range(-p, p + 1) if x])
    x = Fraction(k, p**e)
    return Matrix([[1, x], [0, 1]]) if rng.random() < 0.5 else Matrix([[1, 0], [x, 1]])


def random_sl2(rng, p, factors=3, max_exp=1):
    m = Matrix.identity(2)
    for _ in range(factors):
        m = m * elementary(rng, p, max_exp)
    return m


def random_integral_sl2(rng, factors=4, bound=3):
    m = Matrix.identity(2)
    for _ in range(factors):
        k = rng.randint(-bound, bound)
        m = m * (Matrix([[1, k], [0, 1]]) if rng.random() < 0.5 else Matrix([[1, 0], [k, 1]]))
    return m


def random_p_unimodular(rng, p):
    """Integral matrix whose determinant is a p-adic unit."""
    m = Matrix.identity(2)
    for _ in range(3):
        m = m * random_integral_sl2(rng, 1, p + 2)
    unit = rng.choice([u for u in range(1, 3 * p) if u % p])
    return m * Matrix.diag(unit, 1)


def random_vertex(rng, p, steps=None):
    v = TreeVertex.standard(p)
    for _ in range(rng.randint(0, 6) if steps is None else steps):
        v = rng.choice(neighbors(v))
    return v


def conjugate_pairs(seed, p=5, count=5, base=None):
    """Pairs (g, T g T^-1) with g = diag(p, 1/p) and T random integral SL2."""
    rng = random.Random(seed)
    g = TreeIsometry(base or Matrix.diag(p, Fraction(1, p)), p, "g1")
    out = []
    for _ in range(count):
        t = random_integral_sl2(rng)
        out.append((g, TreeIsometry(g.matrix, p).conjugate(t), t))
    return out
