"""The word problem for free T-quasigroups and free medial quasigroups.

A quasigroup term is translated into a word over the signature
``{+, -, 0, α, α⁻¹, β, β⁻¹}`` (abelian group plus two automorphism symbols):

    x*y ↦ xα + yβ      x/y ↦ (x - yβ)α⁻¹      x\\y ↦ (-xα + y)β⁻¹      u ↦ 0

Automorphisms are written on the right, so ``xαβ`` means "apply α, then β".
Such a word is brought into canonical form: a finite sum of
``coefficient · generator·γ`` with γ a reduced word of the free group on α, β
(FREE_T) or an exponent pair ``α^p β^q`` (MEDIAL, commuting automorphisms).
Two terms are equal in the free algebra iff their canonical forms coincide.
"""
from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, Union

import numpy as np

from . import terms as T
from .constructions import (
    GroupOps,
    LinearSpec,
    NotAutomorphism,
    enumerate_automorphisms,
    is_automorphism,
    small_abelian_groups,
    t_quasigroup,
)
from .tables import Permutation, QuasigroupTable

ALPHA, ALPHA_INV, BETA, BETA_INV = "a", "a'", "b", "b'"
LETTERS = (ALPHA, ALPHA_INV, BETA, BETA_INV)
INVERSE = {ALPHA: ALPHA_INV, ALPHA_INV: ALPHA, BETA: BETA_INV, BETA_INV: BETA}
_LETTER_RANK = {l: i for i, l in enumerate(LETTERS)}
_EXPONENT = {ALPHA: (1, 0), ALPHA_INV: (-1, 0), BETA: (0, 1), BETA_INV: (0, -1)}
_PRETTY = {ALPHA: "α", ALPHA_INV: "α⁻¹", BETA: "β", BETA_INV: "β⁻¹"}


class Mode(Enum):
    FREE_T = "free-t"
    MEDIAL = "medial"


class NotCommuting(ValueError):
    pass


class UnknownSymbol(KeyError):
    pass


# -- Δ1 words ----------------------------------------------------------------

@dataclass(frozen=True)
class Gen:
    name: str


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class Plus:
    left: "Delta1Word"
    right: "Delta1Word"


@dataclass(frozen=True)
class Neg:
    inner: "Delta1Word"


@dataclass(frozen=True)
class Apply:
    letter: str
    inner: "Delta1Word"

    def __post_init__(self):
        if self.letter not in INVERSE:
            raise UnknownSymbol(self.letter)


Delta1Word = Union[Gen, Zero, Plus, Neg, Apply]


def format_delta1(w: Delta1Word) -> str:
    if isinstance(w, Gen):
        return w.name
    if isinstance(w, Zero):
        return "0"
    if isinstance(w, Plus):
        return f"({format_delta1(w.left)} + {format_delta1(w.right)})"
    if isinstance(w, Neg):
        return f"-{format_delta1(w.inner)}"
    return f"{format_delta1(w.inner)}{_PRETTY[w.letter]}"


def delta1_size(w: Delta1Word) -> int:
    if isinstance(w, Plus):
        return 1 + delta1_size(w.left) + delta1_size(w.right)
    if isinstance(w, (Neg, Apply)):
        return 1 + delta1_size(w.inner)
    return 1


# -- reduced group words -----------------------------------------------------

def reduce_word(letters: Iterable[str], mode: Mode = Mode.FREE_T, rng: random.Random | None = None):
    """Reduced form of a word in α, β and their inverses.

    FREE_T: a tuple of letters with no adjacent inverse pair.  MEDIAL: the
    exponent pair ``(p, q)`` of ``α^p β^q``.  With ``rng`` given, adjacent
    inverse pairs are cancelled in random order instead of by a stack scan.
    """
    letters = list(letters)
    for l in letters:
        if l not in INVERSE:
            raise UnknownSymbol(l)
    if mode is Mode.MEDIAL:
        p = sum(_EXPONENT[l][0] for l in letters)
        q = sum(_EXPONENT[l][1] for l in letters)
        return (p, q)
    if rng is None:
        out: list[str] = []
        for l in letters:
            if out and out[-1] == INVERSE[l]:
                out.pop()
            else:
                out.append(l)
        return tuple(out)
    while True:
        spots = [i for i in range(len(letters) - 1) if letters[i + 1] == INVERSE[letters[i]]]
        if not spots:
            return tuple(letters)
        i = rng.choice(spots)
        del letters[i : i + 2]


def _key_sort(word, mode: Mode):
    if mode is Mode.MEDIAL:
        p, q = word
        return (abs(p) + abs(q), [_LETTER_RANK[l] for l in _medial_letters(word)])
    return (len(word), [_LETTER_RANK[l] for l in word])


def _medial_letters(word) -> tuple[str, ...]:
    p, q = word
    return (ALPHA if p >= 0 else ALPHA_INV,) * abs(p) + (BETA if q >= 0 else BETA_INV,) * abs(q)


def word_letters(word, mode: Mode) -> tuple[str, ...]:
    return _medial_letters(word) if mode is Mode.MEDIAL else tuple(word)


# -- canonical words ---------------------------------------------------------

class CanonicalWord:
    """Σ coefficient · generator·γ with nonzero integer coefficients.

    Equality is equality of the underlying association; display order is
    (generator, word length, letters with α < α⁻¹ < β < β⁻¹).
    """

    __slots__ = ("mode", "_terms")

    def __init__(self, terms: Mapping[tuple[str, object], int], mode: Mode = Mode.FREE_T):
        self.mode = mode
        self._terms = {k: int(c) for k, c in terms.items() if c != 0}

    @property
    def terms(self) -> dict[tuple[str, object], int]:
        return dict(self._terms)

    def __eq__(self, other):
        if not isinstance(other, CanonicalWord):
            return NotImplemented
        return self.mode is other.mode and self._terms == other._terms

    def __hash__(self):
        return hash((self.mode, frozenset(self._terms.items())))

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __sub__(self, other: "CanonicalWord") -> "CanonicalWord":
        acc = Counter(self._terms)
        acc.subtract(other._terms)
        return CanonicalWord(acc, self.mode)

    def items(self) -> list[tuple[tuple[str, object], int]]:
        return sorted(self._terms.items(), key=lambda kv: (kv[0][0], _key_sort(kv[0][1], self.mode)))

    def generators(self) -> list[str]:
        return sorted({g for g, _ in self._terms})

    def display(self) -> str:
        """E.g. ``3·x[aab'] - 1·y[]``; ``0`` for the empty sum."""
        parts = []
        for (gen, word), c in self.items():
            body = f"{abs(c)}·{gen}[{''.join(word_letters(word, self.mode))}]"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts) if parts else "0"

    __str__ = display

    def __repr__(self):
        return f"CanonicalWord({self.display()!r}, {self.mode.name})"


def tau_transfer(term) -> Delta1Word:
    """Translate a quasigroup term into a Δ1-word."""
    term = T.as_term(term)
    if isinstance(term, T.Var):
        return Gen(term.name)
    if isinstance(term, T.ConstU):
        return Zero()
    x = tau_transfer(term.left)
    y = tau_transfer(term.right)
    if term.op == T.MUL:
        return Plus(Apply(ALPHA, x), Apply(BETA, y))
    if term.op == T.RDIV:
        return Apply(ALPHA_INV, Plus(x, Neg(Apply(BETA, y))))
    if term.op == T.LDIV:
        return Apply(BETA_INV, Plus(Neg(Apply(ALPHA, x)), y))
    raise ValueError(f"unknown operator {term.op!r}")


_SIGMA = {
    "+": "(x/u)*((u/u)\\y)",
    "-": "(u/u)*((x/u)\\u)",
    ALPHA: "x*(u\\u)",
    BETA: "(u/u)*x",
    ALPHA_INV: "x/(u\\u)",
    BETA_INV: "(u/u)\\x",
    "0": "u",
}


def sigma_transfer(symbol: str) -> T.Term:
    """Quasigroup term template for a Δ1 symbol (arguments named ``x``, ``y``)."""
    try:
        return T.parse_term(_SIGMA[symbol])
    except KeyError:
        raise UnknownSymbol(symbol) from None


def _substitute(template: T.Term, env: Mapping[str, T.Term]) -> T.Term:
    if isinstance(template, T.Var):
        return env.get(template.name, template)
    if isinstance(template, T.Binary):
        return T.Binary(template.op, _substitute(template.left, env), _substitute(template.right, env))
    return template


def sigma_expand(w: Delta1Word) -> T.Term:
    """Rewrite a whole Δ1-word as a quasigroup term using the σ templates."""
    if isinstance(w, Gen):
        if w.name == "u":
            raise ValueError("generator name 'u' is reserved for the constant")
        return T.Var(w.name)
    if isinstance(w, Zero):
        return sigma_transfer("0")
    if isinstance(w, Plus):
        return _substitute(sigma_transfer("+"), {"x": sigma_expand(w.left), "y": sigma_expand(w.right)})
    if isinstance(w, Neg):
        return _substitute(sigma_transfer("-"), {"x": sigma_expand(w.inner)})
    return _substitute(sigma_transfer(w.letter), {"x": sigma_expand(w.inner)})


# -- normalization -----------------------------------------------------------

def _push_down(w: Delta1Word) -> Delta1Word:
    """Step 1, innermost-first: distribute letters and negation over sums."""
    if isinstance(w, (Gen, Zero)):
        return w
    if isinstance(w, Plus):
        return Plus(_push_down(w.left), _push_down(w.right))
    inner = _push_down(w.inner)
    return _push_one(w, inner)


def _push_one(w, inner):
    if isinstance(inner, Zero):
        return Zero()
    if isinstance(inner, Plus):
        return Plus(_push_one(w, inner.left), _push_one(w, inner.right))
    if isinstance(w, Neg):
        if isinstance(inner, Neg):
            return inner.inner
        return Neg(inner)
    # w is Apply; inner is Gen, Apply chain, or Neg of one
    if isinstance(inner, Neg):
        return Neg(Apply(w.letter, inner.inner))
    return Apply(w.letter, inner)


def _redexes(w: Delta1Word, path=()):
    if isinstance(w, Plus):
        yield from _redexes(w.left, path + (0,))
        yield from _redexes(w.right, path + (1,))
    elif isinstance(w, (Neg, Apply)):
        inner = w.inner
        if isinstance(inner, (Plus, Zero)) or (isinstance(w, Neg) and isinstance(inner, Neg)) or (
            isinstance(w, Apply) and isinstance(inner, Neg)
        ):
            yield path
        yield from _redexes(inner, path + (0,))


def _rewrite_at(w: Delta1Word, path) -> Delta1Word:
    if not path:
        inner = w.inner
        if isinstance(inner, Zero):
            return Zero()
        if isinstance(inner, Plus):
            cls = type(w)
            if cls is Neg:
                return Plus(Neg(inner.left), Neg(inner.right))
            return Plus(Apply(w.letter, inner.left), Apply(w.letter, inner.right))
        if isinstance(w, Neg):  # Neg(Neg(s))
            return inner.inner
        return Neg(Apply(w.letter, inner.inner))  # (−s)γ = −(sγ)
    head, rest = path[0], path[1:]
    if isinstance(w, Plus):
        if head == 0:
            return Plus(_rewrite_at(w.left, rest), w.right)
        return Plus(w.left, _rewrite_at(w.right, rest))
    if isinstance(w, Neg):
        return Neg(_rewrite_at(w.inner, rest))
    return Apply(w.letter, _rewrite_at(w.inner, rest))


def open_brackets(w: Delta1Word, rng: random.Random | None = None) -> Delta1Word:
    """Step 1: rewrite until no letter or negation sits above a sum, zero or negation.

    Deterministic innermost strategy by default; with ``rng`` each rewrite
    picks a random redex.
    """
    if rng is None:
        return _push_down(w)
    while True:
        spots = list(_redexes(w))
        if not spots:
            return w
        w = _rewrite_at(w, rng.choice(spots))


def _atoms(w: Delta1Word, out: list, sign: int = 1):
    """Flatten an opened word into (sign, generator, letters) items."""
    if isinstance(w, Zero):
        return
    if isinstance(w, Plus):
        _atoms(w.left, out, sign)
        _atoms(w.right, out, sign)
        return
    if isinstance(w, Neg):
        _atoms(w.inner, out, -sign)
        return
    letters: list[str] = []
    while isinstance(w, Apply):
        letters.append(w.letter)
        w = w.inner
    if not isinstance(w, Gen):
        raise ValueError("word was not fully opened")
    # postfix notation: the innermost letter is applied first
    out.append((sign, w.name, letters[::-1]))


def normalize(w: Delta1Word, mode: Mode = Mode.FREE_T, rng: random.Random | None = None) -> CanonicalWord:
    opened = open_brackets(w, rng)
    atoms: list = []
    _atoms(opened, atoms)
    if rng is not None:
        rng.shuffle(atoms)
    coeffs: Counter = Counter()
    for sign, gen, letters in atoms:
        coeffs[(gen, reduce_word(letters, mode, rng))] += sign
    return CanonicalWord(coeffs, mode)


def normal_form(term, mode: Mode = Mode.FREE_T) -> CanonicalWord:
    return normalize(tau_transfer(term), mode)


def expand(canon: CanonicalWord) -> Delta1Word:
    """A Δ1-word whose canonical form is ``canon`` (sums of letter chains)."""
    pieces: list[Delta1Word] = []
    for (gen, word), c in canon.items():
        atom: Delta1Word = Gen(gen)
        for l in word_letters(word, canon.mode):
            atom = Apply(l, atom)
        if c < 0:
            atom = Neg(atom)
        pieces.extend([atom] * abs(c))
    if not pieces:
        return Zero()
    out = pieces[0]
    for p in pieces[1:]:
        out = Plus(out, p)
    return out


# -- models ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TModel:
    """An abelian group with two automorphisms; ``x*y = α(x) + β(y)``, ``u = 0``."""

    group: QuasigroupTable
    alpha: Permutation
    beta: Permutation

    def check(self, mode: Mode = Mode.FREE_T) -> "TModel":
        for which, f in (("alpha", self.alpha), ("beta", self.beta)):
            if not is_automorphism(self.group, f):
                raise NotAutomorphism(which)
        if mode is Mode.MEDIAL and self.alpha.compose(self.beta) != self.beta.compose(self.alpha):
            raise NotCommuting("α and β must commute in medial mode")
        return self

    @cached_property
    def ops(self) -> GroupOps:
        return GroupOps.of(self.group)

    @cached_property
    def table(self) -> QuasigroupTable:
        return t_quasigroup(LinearSpec(self.group, self.alpha, self.beta, self.ops.zero))

    def quasigroup(self) -> QuasigroupTable:
        return self.table

    def describe(self) -> str:
        return f"{self.group.name or 'group'}: α={self.alpha}, β={self.beta}"


def eval_delta1(w: Delta1Word, model: TModel, assignment: Mapping[str, object], mode: Mode = Mode.FREE_T):
    """Evaluate ``w`` in ``model``; assignment values may be ints or index arrays."""
    model.check(mode)
    ops = model.ops
    letter_maps = {
        ALPHA: model.alpha.array,
        ALPHA_INV: model.alpha.inverse().array,
        BETA: model.beta.array,
        BETA_INV: model.beta.inverse().array,
    }

    def ev(node):
        if isinstance(node, Gen):
            try:
                return assignment[node.name]
            except KeyError:
                raise T.UnboundVariable(node.name) from None
        if isinstance(node, Zero):
            return ops.zero
        if isinstance(node, Plus):
            return ops.add(ev(node.left), ev(node.right))
        if isinstance(node, Neg):
            return ops.neg[ev(node.inner)]
        return letter_maps[node.letter][ev(node.inner)]

    out = ev(w)
    return int(out) if np.ndim(out) == 0 else out


# -- deciding equality -------------------------------------------------------

@dataclass(frozen=True)
class Certificate:
    model: TModel
    table: QuasigroupTable
    assignment: tuple[tuple[str, int], ...]
    left_value: int
    right_value: int

    def to_dict(self) -> dict:
        return {
            "group": self.model.group.name,
            "alpha": list(self.model.alpha.images),
            "beta": list(self.model.beta.images),
            "table": self.table.rows(),
            "assignment": [list(p) for p in self.assignment],
            "values": [self.left_value, self.right_value],
        }


@dataclass(frozen=True)
class WordVerdict:
    equal: bool
    left: CanonicalWord
    right: CanonicalWord
    certificate: Certificate | None = None

    def __bool__(self):
        return self.equal

    @property
    def note(self) -> str:
        if self.equal:
            return "equal"
        if self.certificate is None:
            return "canonical forms differ"
        return "separated by a finite T-quasigroup"

    def to_dict(self) -> dict:
        return {
            "verdict": "equal" if self.equal else "unequal",
            "left": self.left.display(),
            "right": self.right.display(),
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
            "note": self.note,
        }


DEFAULT_MODEL_ORDER = 8


def model_groups(max_order: int = DEFAULT_MODEL_ORDER) -> list[QuasigroupTable]:
    """Abelian groups of order 2..max_order, cyclic and non-cyclic, by order."""
    return [G for G in small_abelian_groups(max_order) if G.order >= 2]


def iter_models(mode: Mode = Mode.FREE_T, max_order: int = DEFAULT_MODEL_ORDER, groups=None):
    """T-quasigroup models in a fixed order: group, then (α, β) lexicographically."""
    for G in groups if groups is not None else model_groups(max_order):
        auts = enumerate_automorphisms(G)
        for a, b in itertools.product(auts, repeat=2):
            if mode is Mode.MEDIAL and a.compose(b) != b.compose(a):
                continue
            yield TModel(G, a, b)


def _letter_arrays(model: TModel) -> dict[str, np.ndarray]:
    return {
        ALPHA: model.alpha.array,
        ALPHA_INV: model.alpha.inverse().array,
        BETA: model.beta.array,
        BETA_INV: model.beta.inverse().array,
    }


def _generator_maps(diff: CanonicalWord, model: TModel, ops: GroupOps) -> dict[str, np.ndarray]:
    """For each generator g, the endomorphism x ↦ Σ c·xγ of the difference."""
    n = model.group.order
    T_ = model.group.cells
    letters = _letter_arrays(model)
    ar = np.arange(n)
    maps: dict[str, np.ndarray] = {}
    for (gen, word), c in diff.items():
        img = ar
        for l in word_letters(word, diff.mode):
            img = letters[l][img]
        if c < 0:
            img = ops.neg[img]
        acc = maps.get(gen, np.full(n, ops.zero))
        for _ in range(abs(c)):
            acc = T_[acc, img]
        maps[gen] = acc
    return maps


def _separating_assignment(names, maps, ops: GroupOps, n: int):
    """Lexicographically first assignment at which Σ_g D_g(x_g) ≠ 0, or None."""
    T_ = ops.table.cells
    nonzero_tail = [False] * (len(names) + 1)
    for i in range(len(names) - 1, -1, -1):
        m = maps.get(names[i])
        nonzero_tail[i] = nonzero_tail[i + 1] or (m is not None and bool(np.any(m != ops.zero)))
    if not nonzero_tail[0]:
        return None
    partial = ops.zero
    values = []
    for i, name in enumerate(names):
        m = maps.get(name)
        for x in range(n):
            s = partial if m is None else int(T_[partial, m[x]])
            # some completion is nonzero iff s ≠ 0 or the remaining maps are not all zero
            if s != ops.zero or nonzero_tail[i + 1]:
                values.append(x)
                partial = s
                break
    return values


def find_certificate(t1, t2, mode: Mode = Mode.FREE_T, models=None, max_models: int | None = None):
    """Search T-quasigroup models for one in which ``t1`` and ``t2`` differ.

    The returned certificate has been checked by evaluating both terms in the
    explicit quasigroup table.
    """
    t1, t2 = T.as_term(t1), T.as_term(t2)
    diff = normal_form(t1, mode) - normal_form(t2, mode)
    if not diff:
        return None
    names = T.Identity(t1, t2).variables
    if models is None:
        models = iter_models(mode)
    for count, model in enumerate(models):
        if max_models is not None and count >= max_models:
            break
        ops = model.ops
        maps = _generator_maps(diff, model, ops)
        values = _separating_assignment(names, maps, ops, model.group.order)
        if values is None:
            continue
        Q = model.quasigroup()
        env = dict(zip(names, values))
        lv = T.eval_term(t1, Q, env, u=ops.zero)
        rv = T.eval_term(t2, Q, env, u=ops.zero)
        if lv == rv:  # would mean the transfer and the table disagree
            raise AssertionError(f"certificate failed direct evaluation in {model.describe()}")
        return Certificate(model, Q, tuple(zip(names, values)), lv, rv)
    return None


def words_equal(t1, t2, mode: Mode = Mode.FREE_T, search: bool = True, max_models: int | None = None) -> WordVerdict:
    t1, t2 = T.as_term(t1), T.as_term(t2)
    left, right = normal_form(t1, mode), normal_form(t2, mode)
    if left == right:
        return WordVerdict(True, left, right)
    cert = find_certificate(t1, t2, mode, max_models=max_models) if search else None
    return WordVerdict(False, left, right, cert)
