"""Isotopy classification of finite quasigroups.

Two independent routes are kept side by side and never mixed:

* identities: catalog entries (and the quasicommutator identities for
  nilpotency class) checked exhaustively with :func:`check_identity`;
* the oracle: build one principal loop isotope and analyse it as a group.

:func:`classify` runs both and reports whether they agree.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import terms as T
from .constructions import Form, LinearSpec, linear_quasigroup
from .tables import (
    GroupAnalysis,
    Permutation,
    QuasigroupTable,
    analyze_group,
    principal_isotope,
)
from .terms import Binary, Identity, Var, check_identity


class TooFewElements(ValueError):
    pass


@dataclass(frozen=True)
class CatalogEntry:
    key: str
    text: str
    meaning: str
    source: str

    @property
    def identity(self) -> Identity:
        return T.parse_identity(self.text)


GROUP_KEYS = ("GROUP_5VAR", "GROUP_4VAR")
ABELIAN_KEYS = (
    "AB_BELOUSOV",
    "AB_SYM",
    "AB_N1",
    "AB_GLUKHOV_DIV",
    "AB_GLUKHOV_MUL",
    "AB_DRAPAL",
    "AB_T22_a",
    "AB_T22_b",
    "AB_T22_c",
    "AB_T22_d",
    "AB_T22_e",
)

_GROUP = "isotopic to a group"
_ABELIAN = "isotopic to an abelian group"

# The variable u of the printed identities is spelled u1: bare u is the nullary constant.
_CATALOG = (
    CatalogEntry("GROUP_5VAR", r"x*(y\((z/u1)*v)) = ((x*(y\z))/u1)*v", _GROUP, "Belousov, five variables"),
    # printed with /u on the left; only /x holds in every group isotope
    CatalogEntry("GROUP_4VAR", r"((x*(u1\y))/x)*z = x*(u1\((y/x)*z))", _GROUP, "Sokhatsky, four variables"),
    CatalogEntry("AB_BELOUSOV", r"x\(y*(u1\v)) = u1\(y*(x\v))", _ABELIAN, "Belousov"),
    CatalogEntry("AB_SYM", r"((u1/v)*x)/y = ((u1/y)*x)/v", _ABELIAN, "Belousov, mirror form"),
    CatalogEntry("AB_N1", r"(x/u1)*(v\y) = (y/u1)*(v\x)", _ABELIAN, "nilpotent class 1"),
    # printed ((x/y)/u)/v; the all-division reading fails on abelian isotopes
    CatalogEntry("AB_GLUKHOV_DIV", r"((x/y)*u1)/v = ((x/v)*u1)/y", _ABELIAN, "Glukhov"),
    CatalogEntry("AB_GLUKHOV_MUL", r"x*(y\(u1*v)) = u1*(y\(x*v))", _ABELIAN, "Glukhov"),
    CatalogEntry("AB_DRAPAL", r"((x*y)/u1)*v = ((x*v)/u1)*y", _ABELIAN, "Drapal"),
    CatalogEntry("AB_T22_a", r"(x/u1)*(v\(y*z)) = ((y*(v\x))/u1)*z", _ABELIAN, "five variables (a)"),
    CatalogEntry("AB_T22_b", r"(x/u1)*(v\(y*(v\z))) = (z/u1)*(v\(y*(v\x)))", _ABELIAN, "five variables (b)"),
    CatalogEntry("AB_T22_c", r"(x/u1)*(v\(y*z)) = ((y*z)/u1)*(v\x)", _ABELIAN, "five variables (c)"),
    CatalogEntry("AB_T22_d", r"x*(v\((y/u1)*z)) = ((x*z)/u1)*(v\y)", _ABELIAN, "five variables (d)"),
    CatalogEntry("AB_T22_e", r"x*(v\((y/u1)*(v\z))) = (z/u1)*(v\(x*(v\y)))", _ABELIAN, "five variables (e)"),
    CatalogEntry("MEDIAL", r"(x*y)*(z*w) = (x*z)*(y*w)", "medial", "mediality"),
    CatalogEntry("CH_COMM", r"x*y = y*x", "commutative", "CH-quasigroups"),
    CatalogEntry("CH_INV", r"x*(x*y) = y", "left symmetric", "CH-quasigroups"),
    CatalogEntry("LEFT_DISTRIB", r"x*(y*z) = (x*y)*(x*z)", "left distributive", "distributive quasigroups"),
    CatalogEntry("RIGHT_DISTRIB", r"(x*y)*z = (x*z)*(y*z)", "right distributive", "distributive quasigroups"),
)


def catalog() -> list[CatalogEntry]:
    return list(_CATALOG)


def catalog_entry(key: str) -> CatalogEntry:
    for entry in _CATALOG:
        if entry.key == key:
            return entry
    raise KeyError(f"unknown catalog key {key!r}")


# -- quasicommutators --------------------------------------------------------

def quasicommutator(Q: QuasigroupTable, u, v, xs: Sequence):
    """The element of Q corresponding to the left-normed group commutator
    ``[x1, ..., xk]`` in the loop isotope ``x+y = (x/u)*(v\\y)``.

    Works elementwise on numpy arrays as well as on ints.
    """
    if len(xs) < 2:
        raise TooFewElements("a quasicommutator needs at least two elements")
    M, L, R = Q.cells, Q.ldiv_table, Q.rdiv_table

    def ri(z):  # R_u⁻¹
        return R[z, u]

    def li(z):  # L_v⁻¹
        return L[v, z]

    t = xs[0]
    for x in xs[1:]:
        t = M[R[M[ri(t), li(x)], li(M[ri(x), li(t)])], u]
    return int(t) if np.ndim(t) == 0 else t


def quasicommutator_term(xs: Sequence[T.Term], a: T.Term, b: T.Term) -> T.Term:
    """Term form of :func:`quasicommutator` with isotope parameters ``a``, ``b``."""
    def ri(t):
        return Binary(T.RDIV, t, a)

    def li(t):
        return Binary(T.LDIV, b, t)

    t = xs[0]
    for x in xs[1:]:
        inner = Binary(T.RDIV, Binary(T.MUL, ri(t), li(x)), li(Binary(T.MUL, ri(x), li(t))))
        t = Binary(T.MUL, inner, a)
    return t


def _commuting_identity(c: T.Term, y: T.Term, a: T.Term, b: T.Term) -> Identity:
    # (c/a)*(b\y) = (y/a)*(b\c): c and y commute in the isotope
    lhs = Binary(T.MUL, Binary(T.RDIV, c, a), Binary(T.LDIV, b, y))
    rhs = Binary(T.MUL, Binary(T.RDIV, y, a), Binary(T.LDIV, b, c))
    return Identity(lhs, rhs)


def nilpotency_identity(n: int) -> Identity:
    """Identity in x1..x(n+1), u1, v that holds iff Q is isotopic to a nilpotent group of class ≤ n."""
    if n < 1:
        raise ValueError("class bound must be at least 1")
    xs = [Var(f"x{i}") for i in range(1, n + 2)]
    a, b = Var("u1"), Var("v")
    c = xs[0] if n == 1 else quasicommutator_term(xs[:n], a, b)
    return _commuting_identity(c, xs[n], a, b)


def engel_identity(n: int) -> Identity:
    if n < 2:
        raise ValueError("Engel identities need n ≥ 2")
    x, y, a, b = Var("x"), Var("y"), Var("u1"), Var("v")
    c = quasicommutator_term([x] + [y] * (n - 1), a, b)
    return _commuting_identity(c, y, a, b)


def check_nilpotent_isotopy(Q: QuasigroupTable, n: int, budget: int = T.DEFAULT_BUDGET) -> T.Verdict:
    return check_identity(Q, nilpotency_identity(n), budget=budget)


def check_engel_isotopy(Q: QuasigroupTable, n: int, budget: int = T.DEFAULT_BUDGET) -> T.Verdict:
    return check_identity(Q, engel_identity(n), budget=budget)


def check_quasicommutator_vanishes(Q: QuasigroupTable, n: int) -> bool:
    """Whether {x1..x(n+1)} = v*u for all u, v, x1..x(n+1) (all n+3 arguments)."""
    k = n + 3
    grids = [g.ravel() for g in np.meshgrid(*[np.arange(Q.order)] * k, indexing="ij")]
    u, v, xs = grids[0], grids[1], grids[2:]
    return bool(np.all(quasicommutator(Q, u, v, xs) == Q.cells[v, u]))


# -- derived identities ------------------------------------------------------

def _fresh(base: str, used: set[str], start: int | None) -> str:
    if start is None and base not in used:
        return base
    i = start if start is not None else 1
    while f"{base}{i}" in used:
        i += 1
    return f"{base}{i}"


def derive_identity(loop_identity) -> Identity:
    """Replace every ``s+t`` by ``(s/u1)*(v\\t)`` with two fresh variables."""
    if isinstance(loop_identity, str):
        loop_identity = T.parse_loop_identity(loop_identity)
    used = set(loop_identity.variables)
    a = Var(_fresh("u", used, 1))
    b = Var(_fresh("v", used, None))

    def sub(t):
        if isinstance(t, Var):
            return t
        if isinstance(t, T.Plus):
            return Binary(T.MUL, Binary(T.RDIV, sub(t.left), a), Binary(T.LDIV, b, sub(t.right)))
        raise T.UnsupportedLoopOperation(f"loop identities may only use binary +, got {t!r}")

    return Identity(sub(loop_identity.lhs), sub(loop_identity.rhs))


# -- oracle ------------------------------------------------------------------

@dataclass(frozen=True)
class OracleVerdict:
    group_isotope: bool
    abelian_isotope: bool
    nilpotency_class: int | None
    analysis: GroupAnalysis = field(repr=False, compare=False, default=None)

    def to_dict(self) -> dict:
        label = None
        if self.group_isotope:
            label = self.nilpotency_class if self.nilpotency_class is not None else "not nilpotent"
        return {
            "group_isotope": self.group_isotope,
            "abelian_isotope": self.abelian_isotope,
            "nilpotency_class": label,
        }


def oracle_isotopy(Q: QuasigroupTable, a: int = 0, b: int = 0) -> OracleVerdict:
    """Decide isotopy to a group, abelian group, nilpotent class by analysing one loop isotope."""
    info = analyze_group(principal_isotope(Q, a, b))
    return OracleVerdict(info.is_group, info.is_abelian, info.nilpotency_class if info.is_group else None, info)


# -- T decomposition ---------------------------------------------------------

@dataclass(frozen=True)
class TDecomposition:
    a: int
    b: int
    group: QuasigroupTable
    phi: Permutation
    psi: Permutation
    c: int

    def reconstruct(self) -> QuasigroupTable:
        return linear_quasigroup(LinearSpec(self.group, self.phi, self.psi, self.c, Form.MIDDLE))

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "group": self.group.rows(),
            "phi": list(self.phi.images),
            "psi": list(self.psi.images),
            "c": self.c,
        }


def _is_abelian_group(iso: np.ndarray) -> bool:
    return bool(np.array_equal(iso, iso.T) and np.array_equal(iso[iso, :], iso[:, iso]))


def _is_automorphism_arr(G: np.ndarray, f: np.ndarray) -> bool:
    return bool(np.array_equal(f[G], G[np.ix_(f, f)]))


def decompose_T(Q: QuasigroupTable) -> TDecomposition | None:
    """Find x*y = φx ∘ c ∘ ψy over some abelian loop isotope (Q, ∘), if any.

    Scans (a, b) lexicographically; with e = b*a the identity of
    ``x∘y = (x/a)*(b\\y)``: c = e*e, φx = (x*e) ∘ (-c), ψy = (-c) ∘ (e*y).
    """
    M, L, R = Q.cells, Q.ldiv_table, Q.rdiv_table
    n = Q.order
    ar = np.arange(n)
    for a, b in itertools.product(range(n), repeat=2):
        iso = M[np.ix_(R[:, a], L[b, :])]
        if not _is_abelian_group(iso):
            continue
        e = int(M[b, a])
        neg = np.argmax(iso == e, axis=1)
        c = int(M[e, e])
        minus_c = int(neg[c])
        phi = iso[M[ar, e], minus_c]
        psi = iso[minus_c, M[e, ar]]
        if np.bincount(phi, minlength=n).max() != 1 or np.bincount(psi, minlength=n).max() != 1:
            continue
        if not (_is_automorphism_arr(iso, phi) and _is_automorphism_arr(iso, psi)):
            continue
        if not np.array_equal(M, iso[iso[phi[:, None], c], psi[None, :]]):
            continue
        group = QuasigroupTable.from_array(iso, name=f"isotope({a},{b})")
        return TDecomposition(a, b, group, Permutation(tuple(phi.tolist())), Permutation(tuple(psi.tolist())), c)
    return None


# -- classification report ---------------------------------------------------

@dataclass
class ClassifyOptions:
    keys: Sequence[str] | None = None  # None: the whole catalog
    max_class: int = 0
    decompose_t: bool = False
    budget: int = T.DEFAULT_BUDGET
    u: int = 0


@dataclass
class ClassificationReport:
    entries: dict[str, T.Verdict | str]
    oracle: OracleVerdict
    nilpotency: dict[int, T.Verdict | str] = field(default_factory=dict)
    t_decomposition: TDecomposition | None = None
    decomposition_requested: bool = False
    mismatches: list[str] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return not self.mismatches

    def to_dict(self) -> dict:
        def verdict(v):
            return {"verdict": "budget_exceeded", "counterexample": None, "error": v} if isinstance(v, str) else v.to_dict()

        out = {
            "entries": {k: verdict(self.entries[k]) for k in sorted(self.entries)},
            "oracle": self.oracle.to_dict(),
            "nilpotency": {str(n): verdict(v) for n, v in sorted(self.nilpotency.items())},
            "consistent": self.consistent,
            "mismatches": list(self.mismatches),
        }
        if self.decomposition_requested:
            out["t_decomposition"] = None if self.t_decomposition is None else self.t_decomposition.to_dict()
        return out


def _consistency(report: ClassificationReport) -> list[str]:
    bad = []
    oracle = report.oracle
    expected = {k: oracle.group_isotope for k in GROUP_KEYS}
    expected.update({k: oracle.abelian_isotope for k in ABELIAN_KEYS})
    for key, want in expected.items():
        v = report.entries.get(key)
        if isinstance(v, T.Verdict) and v.holds != want:
            bad.append(key)
    if oracle.group_isotope:
        for n, v in report.nilpotency.items():
            want = oracle.nilpotency_class is not None and oracle.nilpotency_class <= n
            if isinstance(v, T.Verdict) and v.holds != want:
                bad.append(f"NILPOTENT_{n}")
    if report.t_decomposition is not None and not oracle.abelian_isotope:
        bad.append("T_DECOMPOSITION")
    return bad


def classify(Q: QuasigroupTable, options: ClassifyOptions | None = None) -> ClassificationReport:
    """Run catalog entries, the oracle and optional extras independently, then compare."""
    opts = options or ClassifyOptions()
    keys = sorted(opts.keys) if opts.keys is not None else sorted(e.key for e in _CATALOG)
    entries: dict[str, T.Verdict | str] = {}
    for key in keys:
        try:
            entries[key] = check_identity(Q, catalog_entry(key).identity, budget=opts.budget, u=opts.u)
        except T.BudgetExceeded as exc:
            entries[key] = str(exc)
    nilpotency: dict[int, T.Verdict | str] = {}
    for n in range(1, opts.max_class + 1):
        try:
            nilpotency[n] = check_nilpotent_isotopy(Q, n, budget=opts.budget)
        except T.BudgetExceeded as exc:
            nilpotency[n] = str(exc)
    report = ClassificationReport(entries, oracle_isotopy(Q), nilpotency)
    if opts.decompose_t:
        report.decomposition_requested = True
        report.t_decomposition = decompose_T(Q)
    report.mismatches = _consistency(report)
    return report
