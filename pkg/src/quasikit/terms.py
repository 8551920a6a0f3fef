"""Terms over the quasigroup signature ``{*, /, \\, u}`` and the loop signature ``{+}``.

Grammar (whitespace between tokens is ignored)::

    expr     := atom (op atom)*          op := "*" | "/" | "\\"
    atom     := varname | "u" | "(" expr ")"
    identity := expr "=" expr

All three operators share one precedence level and associate to the left.
``u`` is the nullary constant; variables match ``[a-z][a-z0-9]*``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Mapping, Union

import numpy as np

from .tables import QuasigroupTable

MUL, LDIV, RDIV = "*", "\\", "/"
OPS = (MUL, RDIV, LDIV)
DEFAULT_BUDGET = 10**8
# Five-variable identities over order 6 are always checkable.
ALWAYS_ALLOWED = 6**5
_BLOCK = 1 << 20


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class ConstU:
    def __str__(self):
        return "u"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Term"
    right: "Term"

    def __str__(self):
        return format_term(self)


@dataclass(frozen=True)
class Plus:
    """Loop addition, only used on the input side of :func:`derive_identity`."""

    left: "LoopTerm"
    right: "LoopTerm"

    def __str__(self):
        return format_term(self)


Term = Union[Var, ConstU, Binary]
LoopTerm = Union[Var, Plus]


@dataclass(frozen=True)
class Identity:
    lhs: Term
    rhs: Term

    @property
    def variables(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for side in (self.lhs, self.rhs):
            for name in term_variables(side):
                seen.setdefault(name, None)
        return tuple(seen)

    def __str__(self):
        return f"{format_term(self.lhs)} = {format_term(self.rhs)}"


class TermSyntaxError(ValueError):
    def __init__(self, position: int, expected, text: str = ""):
        self.position = position
        self.expected = tuple(sorted(expected))
        self.text = text
        super().__init__(f"syntax error at offset {position}: expected one of {', '.join(self.expected)}")


class MissingEquals(TermSyntaxError):
    def __init__(self, position: int, text: str = ""):
        super().__init__(position, {"'='"}, text)


class UnsupportedLoopOperation(ValueError):
    pass


class UnboundVariable(KeyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(name)

    def __str__(self):
        return f"unbound variable {self.name!r}"


class BudgetExceeded(RuntimeError):
    def __init__(self, k: int, n: int, budget: int):
        self.k, self.n, self.budget = k, n, budget
        super().__init__(f"{n}^{k} assignments exceed the budget of {budget}")


def term_variables(t) -> Iterator[str]:
    """Variable names in left-to-right order of occurrence (with repeats)."""
    if isinstance(t, Var):
        yield t.name
    elif isinstance(t, (Binary, Plus)):
        yield from term_variables(t.left)
        yield from term_variables(t.right)


def term_size(t) -> int:
    if isinstance(t, (Binary, Plus)):
        return 1 + term_size(t.left) + term_size(t.right)
    return 1


def format_term(t) -> str:
    """Print with every compound operand parenthesized; the top level is bare."""
    if isinstance(t, Var):
        return t.name
    if isinstance(t, ConstU):
        return "u"
    op = "+" if isinstance(t, Plus) else t.op

    def wrap(s):
        return f"({format_term(s)})" if isinstance(s, (Binary, Plus)) else format_term(s)

    return f"{wrap(t.left)}{op}{wrap(t.right)}"


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:([a-z][a-z0-9]*)|(.))")


def _tokenize(text: str, symbols: str):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # trailing whitespace
            break
        start = m.start(1) if m.group(1) else m.start(2)
        if m.group(1):
            toks.append(("name", m.group(1), start))
        elif m.group(2) in symbols:
            toks.append((m.group(2), m.group(2), start))
        elif not m.group(2).isspace():
            toks.append(("bad", m.group(2), start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, loop: bool):
        self.text = text
        self.loop = loop
        self.ops = ("+",) if loop else OPS
        symbols = "()=" + "".join(self.ops) + ("-0*/\\" if loop else "")
        self.toks = _tokenize(text, symbols)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def fail(self, expected):
        kind, val, pos = self.peek()
        if self.loop and kind in ("-", "0", "bad") and val in "-0":
            raise UnsupportedLoopOperation(f"'{val}' at offset {pos}: only binary + is supported")
        raise TermSyntaxError(pos, expected, self.text)

    def expr(self):
        node = self.atom()
        while self.peek()[0] in self.ops:
            op = self.peek()[0]
            self.i += 1
            right = self.atom()
            node = Plus(node, right) if self.loop else Binary(op, node, right)
        return node

    def atom(self):
        kind, val, _ = self.peek()
        if kind == "name":
            self.i += 1
            if val == "u" and not self.loop:
                return ConstU()
            return Var(val)
        if kind == "(":
            self.i += 1
            node = self.expr()
            if self.peek()[0] != ")":
                self.fail({"')'"} | {f"'{o}'" for o in self.ops})
            self.i += 1
            return node
        self.fail({"variable", "'('"} | (set() if self.loop else {"'u'"}))

    def finish(self, expected_more):
        if self.peek()[0] != "end":
            self.fail(expected_more)


def parse_term(text: str) -> Term:
    p = _Parser(text, loop=False)
    t = p.expr()
    p.finish({"end of input"} | {f"'{o}'" for o in OPS})
    return t


def _parse_eq(text: str, loop: bool) -> Identity:
    p = _Parser(text, loop)
    if not any(tok[0] == "=" for tok in p.toks):
        raise MissingEquals(len(text), text)
    lhs = p.expr()
    if p.peek()[0] != "=":
        p.fail({"'='"} | {f"'{o}'" for o in p.ops})
    p.i += 1
    rhs = p.expr()
    p.finish({"end of input"} | {f"'{o}'" for o in p.ops})
    return Identity(lhs, rhs)


def parse_identity(text: str) -> Identity:
    return _parse_eq(text, loop=False)


def parse_loop_term(text: str) -> LoopTerm:
    p = _Parser(text, loop=True)
    t = p.expr()
    p.finish({"end of input", "'+'"})
    return t


def parse_loop_identity(text: str) -> Identity:
    return _parse_eq(text, loop=True)


def as_identity(identity) -> Identity:
    return parse_identity(identity) if isinstance(identity, str) else identity


def as_term(term) -> Term:
    return parse_term(term) if isinstance(term, str) else term


# -- evaluation --------------------------------------------------------------

def evaluate(term: Term, Q: QuasigroupTable, env: Mapping[str, object], u: int = 0):
    """Evaluate ``term`` in ``Q``.  Values in ``env`` may be ints or index arrays."""
    if isinstance(term, Var):
        try:
            return env[term.name]
        except KeyError:
            raise UnboundVariable(term.name) from None
    if isinstance(term, ConstU):
        return u
    a = evaluate(term.left, Q, env, u)
    b = evaluate(term.right, Q, env, u)
    if term.op == MUL:
        return Q.cells[a, b]
    if term.op == LDIV:
        return Q.ldiv_table[a, b]
    if term.op == RDIV:
        return Q.rdiv_table[a, b]
    raise ValueError(f"unknown operator {term.op!r}")


def eval_term(term, Q: QuasigroupTable, assignment: Mapping[str, int] | None = None, u: int = 0) -> int:
    return int(evaluate(as_term(term), Q, assignment or {}, u))


@dataclass(frozen=True)
class Verdict:
    holds: bool
    counterexample: tuple[tuple[str, int], ...] | None = None
    assignments_checked: int = 0

    def __bool__(self):
        return self.holds

    @property
    def assignment(self) -> dict[str, int] | None:
        return None if self.counterexample is None else dict(self.counterexample)

    def to_dict(self) -> dict:
        return {
            "verdict": "holds" if self.holds else "fails",
            "counterexample": None if self.counterexample is None else [list(p) for p in self.counterexample],
        }


def _blocks(n: int, k: int):
    """Lexicographic blocks of the assignment space: (prefix values, suffix grids)."""
    split = k
    while split > 0 and n ** (k - split + 1) <= _BLOCK:
        split -= 1
    suffix = k - split
    grids = np.meshgrid(*[np.arange(n, dtype=np.intp)] * suffix, indexing="ij") if suffix else []
    grids = [g.ravel() for g in grids]
    for prefix in product(range(n), repeat=split):
        yield prefix, grids


def check_identity(Q: QuasigroupTable, identity, budget: int = DEFAULT_BUDGET, u: int = 0) -> Verdict:
    """Decide ``identity`` in ``Q`` by exhaustive quantification.

    On failure the lexicographically first counterexample is returned
    (variables in first-occurrence order, values ascending).
    """
    identity = as_identity(identity)
    names = identity.variables
    k, n = len(names), Q.order
    total = n**k
    if total > max(budget, ALWAYS_ALLOWED):
        raise BudgetExceeded(k, n, budget)
    if k == 0:
        ok = evaluate(identity.lhs, Q, {}, u) == evaluate(identity.rhs, Q, {}, u)
        return Verdict(bool(ok), None if ok else (), 1)
    checked = 0
    split = None
    for prefix, grids in _blocks(n, k):
        split = len(prefix)
        env = dict(zip(names[:split], prefix))
        env.update(zip(names[split:], grids))
        left = np.broadcast_to(evaluate(identity.lhs, Q, env, u), (len(grids[0]),) if grids else ())
        right = np.broadcast_to(evaluate(identity.rhs, Q, env, u), left.shape)
        bad = left != right
        size = bad.size if grids else 1
        if np.any(bad):
            idx = int(np.argmax(bad)) if grids else 0
            values = list(prefix) + [int(g[idx]) for g in grids]
            return Verdict(False, tuple(zip(names, values)), checked + idx + 1)
        checked += size
    return Verdict(True, None, checked)


def all_assignments(names, n: int) -> Iterator[dict[str, int]]:
    for values in product(range(n), repeat=len(names)):
        yield dict(zip(names, values))
