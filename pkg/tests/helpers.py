"""Shared generators for the test suite: the Latin-square corpus and random terms."""
from __future__ import annotations

import itertools
import random
from functools import lru_cache

from quasikit.freewords import ALPHA, ALPHA_INV, BETA, BETA_INV, Apply, Gen, Neg, Plus, Zero
from quasikit.tables import enumerate_latin_squares, random_latin_square
from quasikit.terms import OPS, Binary, ConstU, Var, term_size

SAMPLE_PER_ORDER = 1000


@lru_cache(maxsize=None)
def small_squares(max_order: int = 4) -> tuple:
    return tuple(Q for n in range(1, max_order + 1) for Q in enumerate_latin_squares(n))


@lru_cache(maxsize=None)
def sampled_squares(n: int, count: int = SAMPLE_PER_ORDER) -> tuple:
    return tuple(random_latin_square(n, seed) for seed in range(count))


def corpus() -> tuple:
    """All squares of order ≤ 4 plus 1000 seeded squares each of orders 5 and 6."""
    return small_squares(4) + sampled_squares(5) + sampled_squares(6)


# -- brute-force identity checking (independent of quasikit.terms) ---------------

def brute_first_counterexample(Q, identity, u=0):
    """Lexicographically first failing assignment, by a plain Python scan."""
    names = identity.variables
    M = Q.rows()
    n = Q.order
    L = [[0] * n for _ in range(n)]
    R = [[0] * n for _ in range(n)]
    for x in range(n):
        for y in range(n):
            L[x][M[x][y]] = y
            R[M[x][y]][y] = x

    def ev(t, env):
        if isinstance(t, Var):
            return env[t.name]
        if isinstance(t, ConstU):
            return u
        a, b = ev(t.left, env), ev(t.right, env)
        return {"*": M, "\\": L, "/": R}[t.op][a][b]

    for values in itertools.product(range(n), repeat=len(names)):
        env = dict(zip(names, values))
        if ev(identity.lhs, env) != ev(identity.rhs, env):
            return tuple(zip(names, values))
    return None


# -- random quasigroup terms --------------------------------------------------

def random_term(rng: random.Random, internal: int, names=("x", "y", "z", "w"), u_rate: float = 0.1):
    """A term with exactly ``internal`` binary nodes (size 2*internal + 1)."""
    if internal == 0:
        return ConstU() if rng.random() < u_rate else Var(rng.choice(names))
    left = rng.randint(0, internal - 1)
    return Binary(rng.choice(OPS), random_term(rng, left, names, u_rate),
                  random_term(rng, internal - 1 - left, names, u_rate))


_AXIOM_WRAPS = (
    lambda s, y: Binary("*", y, Binary("\\", y, s)),   # y*(y\s) = s
    lambda s, y: Binary("\\", y, Binary("*", y, s)),   # y\(y*s) = s
    lambda s, y: Binary("/", Binary("*", s, y), y),    # (s*y)/y = s
    lambda s, y: Binary("*", Binary("/", s, y), y),    # (s/y)*y = s
)


def _subterm_paths(t, path=()):
    yield path
    if isinstance(t, Binary):
        yield from _subterm_paths(t.left, path + (0,))
        yield from _subterm_paths(t.right, path + (1,))


def _replace(t, path, new):
    if not path:
        return new
    if path[0] == 0:
        return Binary(t.op, _replace(t.left, path[1:], new), t.right)
    return Binary(t.op, t.left, _replace(t.right, path[1:], new))


def _get(t, path):
    for p in path:
        t = t.left if p == 0 else t.right
    return t


def axiom_rewrite(rng: random.Random, t, names=("x", "y", "z", "w")):
    """Wrap a random subterm in one quasigroup-axiom pattern; the result is equal to ``t``."""
    path = rng.choice(list(_subterm_paths(t)))
    wrap = rng.choice(_AXIOM_WRAPS)
    y = ConstU() if rng.random() < 0.15 else Var(rng.choice(names))
    return _replace(t, path, wrap(_get(t, path), y))


def axiom_unwrap(t):
    """Undo every axiom pattern bottom-up (used to build equal pairs both ways)."""
    if not isinstance(t, Binary):
        return t
    t = Binary(t.op, axiom_unwrap(t.left), axiom_unwrap(t.right))
    l, r = t.left, t.right
    if t.op == "*" and isinstance(r, Binary) and r.op == "\\" and r.left == l:
        return r.right
    if t.op == "\\" and isinstance(r, Binary) and r.op == "*" and r.left == l:
        return r.right
    if t.op == "/" and isinstance(l, Binary) and l.op == "*" and l.right == r:
        return l.left
    if t.op == "*" and isinstance(l, Binary) and l.op == "/" and l.right == r:
        return l.left
    return t


MEDIAL_SWAP = ("(x*y)*(z*w)", "(x*z)*(y*w)")


def equal_pair(rng: random.Random, max_size: int = 15):
    """Two syntactically different terms that are equal in every quasigroup."""
    while True:
        base = random_term(rng, rng.randint(0, 3))
        a = base
        b = axiom_rewrite(rng, base)
        if rng.random() < 0.5 and term_size(b) + 4 <= max_size:
            b = axiom_rewrite(rng, b)
        if rng.random() < 0.3 and term_size(a) + 4 <= max_size:
            a = axiom_rewrite(rng, a)
        if term_size(a) <= max_size and term_size(b) <= max_size and a != b:
            return a, b


def near_miss_pair(rng: random.Random, max_size: int = 15):
    """A term and a small perturbation of it (one operator, leaf or argument order changed)."""
    while True:
        t = random_term(rng, rng.randint(1, 7))
        paths = [p for p in _subterm_paths(t)]
        p = rng.choice(paths)
        s = _get(t, p)
        kind = rng.random()
        if isinstance(s, Binary) and kind < 0.4:
            new = Binary(rng.choice([o for o in OPS if o != s.op]), s.left, s.right)
        elif isinstance(s, Binary) and kind < 0.7:
            new = Binary(s.op, s.right, s.left)
        else:
            new = Var(rng.choice(("x", "y", "z", "w")))
        t2 = _replace(t, p, new)
        if t2 != t and term_size(t2) <= max_size:
            return t, t2


def random_pair(rng: random.Random, max_size: int = 15):
    a = random_term(rng, rng.randint(0, (max_size - 1) // 2))
    b = random_term(rng, rng.randint(0, (max_size - 1) // 2))
    return a, b


# -- random Δ1-words -----------------------------------------------------------

LETTERS = (ALPHA, ALPHA_INV, BETA, BETA_INV)


def random_delta1(rng: random.Random, size: int, names=("x", "y", "z")):
    """A random Δ1-word with about ``size`` nodes."""
    if size <= 1:
        r = rng.random()
        return Zero() if r < 0.1 else Gen(rng.choice(names))
    r = rng.random()
    if r < 0.4:
        left = rng.randint(1, size - 2) if size > 2 else 1
        return Plus(random_delta1(rng, left, names), random_delta1(rng, size - 1 - left, names))
    if r < 0.55:
        return Neg(random_delta1(rng, size - 1, names))
    return Apply(rng.choice(LETTERS), random_delta1(rng, size - 1, names))


# -- acceptance bookkeeping ---------------------------------------------------

ACCEPTANCE_RESULTS: dict[int, str] = {}
