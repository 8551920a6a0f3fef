"""Small groups and the classical linear-quasigroup families built over them.

Groups are ordinary :class:`QuasigroupTable` objects that happen to be groups.
The builtin ones put the identity at index 0, but every builder here accepts
any group table and finds its identity itself.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from .tables import (
    BoundExceeded,
    Permutation,
    QuasigroupTable,
    analyze_group,
    identity_element,
    validate_table,
)

DEFAULT_AUT_BOUND = 12


class NotAGroup(ValueError):
    pass


class NotAbelian(ValueError):
    pass


class NotAutomorphism(ValueError):
    def __init__(self, which: str):
        self.which = which
        super().__init__(f"{which} is not an automorphism of the group")


class PsiNotBijective(ValueError):
    pass


class UnknownGroup(ValueError):
    pass


# -- group specifications ----------------------------------------------------

@dataclass(frozen=True)
class Cyclic:
    n: int

    def __str__(self):
        return f"Z{self.n}"


@dataclass(frozen=True)
class Named:
    name: str  # S3, D4 or Q8

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class DirectProduct:
    factors: tuple["GroupSpec", ...]

    def __str__(self):
        return "x".join(str(f) for f in self.factors)


GroupSpec = Union[Cyclic, Named, DirectProduct]

_NAMED = ("S3", "D4", "Q8")


def parse_group_spec(text: str) -> GroupSpec:
    """``Z3``, ``Z2xZ2xZ4``, ``S3``, ``D4``, ``Q8``."""
    parts = text.strip().split("x")
    specs = []
    for part in parts:
        if part in _NAMED:
            specs.append(Named(part))
        elif re.fullmatch(r"Z[1-9][0-9]*", part):
            specs.append(Cyclic(int(part[1:])))
        else:
            raise UnknownGroup(f"unknown group {part!r} in {text!r}")
    return specs[0] if len(specs) == 1 else DirectProduct(tuple(specs))


def _cyclic(n: int) -> np.ndarray:
    ar = np.arange(n)
    return (ar[:, None] + ar[None, :]) % n


def _s3() -> np.ndarray:
    perms = list(itertools.permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}
    # (p*q)(i) = p(q(i))
    return np.array([[index[tuple(p[q[i]] for i in range(3))] for q in perms] for p in perms])


def _d4() -> np.ndarray:
    # index k + 4f stands for r^k s^f, with s r s = r^-1
    def mul(a, b):
        k1, f1 = a % 4, a // 4
        k2, f2 = b % 4, b // 4
        k = (k1 + (-k2 if f1 else k2)) % 4
        return k + 4 * (f1 ^ f2)

    return np.array([[mul(a, b) for b in range(8)] for a in range(8)])


def _q8() -> np.ndarray:
    # 1, i, j, k, -1, -i, -j, -k
    unit = {("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
            ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
            ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
            ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1")}
    names = "1ijk"

    def decode(a):
        return (-1 if a >= 4 else 1), names[a % 4]

    def mul(a, b):
        s1, u1 = decode(a)
        s2, u2 = decode(b)
        s, u = unit[(u1, u2)]
        sign = s * s1 * s2
        return names.index(u) + (4 if sign < 0 else 0)

    return np.array([[mul(a, b) for b in range(8)] for a in range(8)])


def _direct_product(tables: Sequence[np.ndarray]) -> np.ndarray:
    # first factor is the most significant digit
    out = np.zeros((1, 1), dtype=np.intp)
    for t in tables:
        m = t.shape[0]
        n = out.shape[0]
        big = out[:, None, :, None] * m + t[None, :, None, :]
        out = big.reshape(n * m, n * m)
    return out


@lru_cache(maxsize=None)
def _resolve(spec: GroupSpec) -> QuasigroupTable:
    if isinstance(spec, Cyclic):
        if spec.n < 1:
            raise UnknownGroup("cyclic order must be positive")
        arr = _cyclic(spec.n)
    elif isinstance(spec, Named):
        builders = {"S3": _s3, "D4": _d4, "Q8": _q8}
        if spec.name not in builders:
            raise UnknownGroup(spec.name)
        arr = builders[spec.name]()
    else:
        arr = _direct_product([_resolve(f).cells for f in spec.factors])
    table = validate_table(arr, name=str(spec))
    info = analyze_group(table)
    if not info.is_group or info.identity != 0:
        raise AssertionError(f"builtin table for {spec} is not a group with identity 0")
    return table


def resolve_group(spec) -> QuasigroupTable:
    """Cayley table of ``spec`` (a :data:`GroupSpec` or its text form); identity is 0."""
    if isinstance(spec, str):
        spec = parse_group_spec(spec)
    return _resolve(spec)


def small_abelian_groups(max_order: int) -> list[QuasigroupTable]:
    """One representative per isomorphism type of abelian group, orders 1..max_order."""
    out = []
    for n in range(1, max_order + 1):
        for parts in _abelian_types(n):
            spec = Cyclic(parts[0]) if len(parts) == 1 else DirectProduct(tuple(Cyclic(p) for p in parts))
            out.append(resolve_group(spec))
    return out


def _abelian_types(n: int) -> list[tuple[int, ...]]:
    # invariant-factor decompositions d1 | d2 | ... with product n
    def rec(rest, smallest):
        if rest == 1:
            yield ()
            return
        for d in range(smallest, rest + 1):
            if rest % d == 0:
                for tail in rec(rest // d, d):
                    if not tail or tail[0] % d == 0:
                        yield (d,) + tail
    if n == 1:
        return [(1,)]
    types = list(rec(n, 2))
    return sorted(types, key=lambda t: (len(t), t))


# -- group helpers -----------------------------------------------------------

@lru_cache(maxsize=1024)
def _analysis(G: QuasigroupTable):
    """analyze_group, memoized on table contents (builders see the same few groups)."""
    return analyze_group(G)


@dataclass(frozen=True, eq=False)
class GroupOps:
    table: QuasigroupTable
    zero: int
    neg: np.ndarray

    @classmethod
    def of(cls, G: QuasigroupTable) -> "GroupOps":
        e = identity_element(G)
        info = _analysis(G) if e is not None else None
        if info is None or not info.is_group:
            raise NotAGroup("table is not a group")
        neg = np.argmax(G.cells == e, axis=1)
        return cls(G, e, neg)

    def add(self, x, y):
        return self.table.cells[x, y]


def is_automorphism(G: QuasigroupTable, f: Permutation) -> bool:
    if len(f) != G.order:
        return False
    a = f.array
    T = G.cells
    return bool(np.array_equal(a[T], T[np.ix_(a, a)]))


def _element_orders(T: np.ndarray, e: int) -> list[int]:
    n = T.shape[0]
    orders = []
    for x in range(n):
        k, y = 1, x
        while y != e:
            y = int(T[y, x])
            k += 1
        orders.append(k)
    return orders


def _greedy_generators(T: np.ndarray, e: int) -> list[int]:
    n = T.shape[0]
    gens: list[int] = []
    span = {e}
    for x in range(n):
        if x in span:
            continue
        gens.append(x)
        # close under right multiplication by all generators
        stack = list(span)
        while stack:
            y = stack.pop()
            for g in gens:
                z = int(T[y, g])
                if z not in span:
                    span.add(z)
                    stack.append(z)
        if len(span) == n:
            break
    return gens


def enumerate_automorphisms(G: QuasigroupTable, bound: int = DEFAULT_AUT_BOUND) -> list[Permutation]:
    """All automorphisms of the group ``G``, sorted by image sequence.

    Searches over images of a greedily chosen generating set.
    """
    if G.order > bound:
        raise BoundExceeded(f"order {G.order} exceeds automorphism bound {bound}")
    ops = GroupOps.of(G)
    T, e, n = G.cells, ops.zero, G.order
    gens = _greedy_generators(T, e)
    orders = _element_orders(T, e)
    # spanning tree: every element as parent * generator
    word: dict[int, tuple[int, int] | None] = {e: None}
    queue = [e]
    for y in queue:
        for gi, g in enumerate(gens):
            z = int(T[y, g])
            if z not in word:
                word[z] = (y, gi)
                queue.append(z)
    order_seq = queue
    found = []
    candidates = [[x for x in range(n) if orders[x] == orders[g]] for g in gens]
    for images in itertools.product(*candidates):
        f = [-1] * n
        f[e] = e
        for z in order_seq[1:]:
            parent, gi = word[z]
            f[z] = int(T[f[parent], images[gi]])
        if len(set(f)) != n:
            continue
        perm = Permutation(tuple(f))
        if is_automorphism(G, perm):
            found.append(perm)
    found.sort(key=lambda p: p.images)
    return found


def _as_group_table(group) -> QuasigroupTable:
    if isinstance(group, QuasigroupTable):
        return group
    return resolve_group(group)


def _as_perm(p, n: int) -> Permutation:
    if p is None:
        return Permutation.identity(n)
    if isinstance(p, Permutation):
        return p
    return Permutation(tuple(p))


# -- builders ----------------------------------------------------------------

class Form(Enum):
    MIDDLE = "middle"      # φx + c + ψy
    TRAILING = "trailing"  # (φx + ψy) + c


@dataclass(frozen=True)
class LinearSpec:
    group: object  # GroupSpec, its text form, or a group table
    phi: Permutation | Sequence[int] | None = None
    psi: Permutation | Sequence[int] | None = None
    c: int = 0
    form: Form = Form.MIDDLE


def linear_quasigroup(spec: LinearSpec, name: str | None = None) -> QuasigroupTable:
    G = _as_group_table(spec.group)
    GroupOps.of(G)  # rejects non-groups
    n = G.order
    phi = _as_perm(spec.phi, n)
    psi = _as_perm(spec.psi, n)
    for which, f in (("phi", phi), ("psi", psi)):
        if not is_automorphism(G, f):
            raise NotAutomorphism(which)
    if not 0 <= spec.c < n:
        raise ValueError(f"constant {spec.c} is not an element")
    T = G.cells
    px = phi.array[:, None]
    qy = psi.array[None, :]
    if spec.form is Form.MIDDLE:
        cells = T[T[px, spec.c], qy]
    else:
        cells = T[T[px, qy], spec.c]
    return validate_table(cells, name=name)


def t_quasigroup(spec: LinearSpec, name: str | None = None) -> QuasigroupTable:
    """A linear quasigroup over an abelian group (a T-quasigroup)."""
    G = _as_group_table(spec.group)
    info = _analysis(G)
    if not info.is_group:
        raise NotAGroup("table is not a group")
    if not info.is_abelian:
        raise NotAbelian("T-quasigroups need an abelian group")
    spec = LinearSpec(G, spec.phi, spec.psi, spec.c, spec.form)
    return linear_quasigroup(spec, name=name or "T")


def ch_quasigroup(group, d: int = 0) -> QuasigroupTable:
    """``x*y = (-x - y) + d`` over an abelian group."""
    G = _as_group_table(group)
    ops = GroupOps.of(G)
    if not np.array_equal(G.cells, G.cells.T):
        raise NotAbelian("CH construction needs an abelian group")
    T, neg = G.cells, ops.neg
    ar = np.arange(G.order)
    cells = T[T[neg[ar][:, None], neg[ar][None, :]], d]
    return validate_table(cells, name="CH")


def left_distributive_quasigroup(group, phi) -> QuasigroupTable:
    """Stein's form ``x*y = x + φ(-x + y)``; needs ``x ↦ x - φx`` to be bijective."""
    G = _as_group_table(group)
    ops = GroupOps.of(G)
    n = G.order
    phi = _as_perm(phi, n)
    if not is_automorphism(G, phi):
        raise NotAutomorphism("phi")
    T, neg, f = G.cells, ops.neg, phi.array
    ar = np.arange(n)
    psi = T[ar, neg[f[ar]]]
    if len(set(psi.tolist())) != n:
        raise PsiNotBijective("x - φ(x) is not a permutation")
    cells = T[ar[:, None], f[T[neg[ar][:, None], ar[None, :]]]]
    return validate_table(cells, name="LD")
