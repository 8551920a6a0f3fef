"""Finite quasigroups stored as Cayley tables (Latin squares).

Elements are the integers ``0..n-1``.  A :class:`QuasigroupTable` keeps the
multiplication table together with the two division tables, so ``mul``,
``ldiv`` and ``rdiv`` are plain array lookups.  All lookups accept numpy
arrays as well as ints, which is what the vectorized identity checker relies on.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator

import numpy as np

DEFAULT_ENUMERATION_BOUND = 5


class InvalidTable(ValueError):
    """Raised when a grid is not a Latin square."""


class NonSquare(InvalidTable):
    def __init__(self, detail: str = "grid is not square"):
        super().__init__(detail)


class EntryOutOfRange(InvalidTable):
    def __init__(self, row: int, col: int, value):
        self.row, self.col, self.value = row, col, value
        super().__init__(f"entry {value!r} at ({row}, {col}) is out of range")


class RowDuplicate(InvalidTable):
    def __init__(self, row: int, col: int):
        self.row, self.col = row, col
        super().__init__(f"row {row} repeats a symbol (first at column {col})")


class ColumnDuplicate(InvalidTable):
    def __init__(self, col: int, row: int):
        self.row, self.col = row, col
        super().__init__(f"column {col} repeats a symbol (first at row {row})")


class BoundExceeded(ValueError):
    pass


class QgFormatError(ValueError):
    """Malformed ``.qg`` text (not a Latin-square violation)."""


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        imgs = tuple(int(i) for i in self.images)
        if sorted(imgs) != list(range(len(imgs))):
            raise ValueError(f"not a permutation: {imgs}")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    def __len__(self) -> int:
        return len(self.images)

    def __call__(self, x):
        if isinstance(x, np.ndarray):
            return self.array[x]
        return self.images[x]

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.images, dtype=np.intp)

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """``self ∘ other``: apply ``other`` first."""
        return Permutation(tuple(self.images[j] for j in other.images))

    def is_identity(self) -> bool:
        return self.images == tuple(range(len(self.images)))

    def __str__(self) -> str:
        return ",".join(map(str, self.images))


@dataclass(frozen=True, eq=False)
class QuasigroupTable:
    """An order-n quasigroup; ``cells[x, y] == x*y``.

    Construct through :func:`validate_table` or :meth:`from_array`; both check
    the Latin-square property.
    """

    cells: np.ndarray
    name: str | None = field(default=None)

    @classmethod
    def from_array(cls, cells, name: str | None = None) -> "QuasigroupTable":
        return validate_table(cells, name=name)

    @property
    def order(self) -> int:
        return self.cells.shape[0]

    def __len__(self) -> int:
        return self.order

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuasigroupTable):
            return NotImplemented
        return self.cells.shape == other.cells.shape and bool(np.array_equal(self.cells, other.cells))

    def __hash__(self) -> int:
        return hash(self.cells.tobytes())

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"<QuasigroupTable{label} order={self.order}>"

    @cached_property
    def ldiv_table(self) -> np.ndarray:
        # ldiv_table[x, z] = y with x*y = z
        n = self.order
        out = np.empty_like(self.cells)
        rows = np.repeat(np.arange(n), n).reshape(n, n)
        out[rows, self.cells] = np.arange(n)[None, :]
        return out

    @cached_property
    def rdiv_table(self) -> np.ndarray:
        # rdiv_table[z, y] = x with x*y = z
        n = self.order
        out = np.empty_like(self.cells)
        cols = np.tile(np.arange(n), (n, 1))
        out[self.cells, cols] = np.arange(n)[:, None]
        return out

    def mul(self, x, y):
        return self.cells[x, y]

    def ldiv(self, x, z):
        return self.ldiv_table[x, z]

    def rdiv(self, z, y):
        return self.rdiv_table[z, y]

    def rows(self) -> list[list[int]]:
        return self.cells.tolist()


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.intp)
    arr.setflags(write=False)
    return arr


def validate_table(raw, name: str | None = None) -> QuasigroupTable:
    """Check that ``raw`` is a Latin square on ``0..n-1`` and wrap it.

    Errors name the first offending cell in row-major order.
    """
    if isinstance(raw, np.ndarray):
        if raw.ndim != 2 or raw.shape[0] != raw.shape[1] or raw.shape[0] == 0:
            raise NonSquare(f"expected an n×n grid, got shape {raw.shape}")
        if not np.issubdtype(raw.dtype, np.integer):
            raise InvalidTable("entries must be integers")
        arr = raw
        n = arr.shape[0]
        srt = np.sort(arr, axis=1)
        ok_rows = np.array_equal(srt, np.broadcast_to(np.arange(n), (n, n)))
        ok_cols = ok_rows and np.array_equal(np.sort(arr, axis=0), np.broadcast_to(np.arange(n)[:, None], (n, n)))
        if ok_rows and ok_cols:
            return QuasigroupTable(_freeze(arr), name)
        grid = arr.tolist()
    else:
        grid = [list(r) for r in raw]
    n = len(grid)
    if n == 0 or any(len(r) != n for r in grid):
        raise NonSquare()
    seen_rows = [set() for _ in range(n)]
    seen_cols = [set() for _ in range(n)]
    for r in range(n):
        for c in range(n):
            v = grid[r][c]
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise InvalidTable(f"entry {v!r} at ({r}, {c}) is not an integer")
            if not 0 <= v < n:
                raise EntryOutOfRange(r, c, v)
            if v in seen_rows[r]:
                raise RowDuplicate(r, c)
            if v in seen_cols[c]:
                raise ColumnDuplicate(c, r)
            seen_rows[r].add(v)
            seen_cols[c].add(v)
    return QuasigroupTable(_freeze(np.array(grid, dtype=np.intp)), name)


def mul(Q: QuasigroupTable, x, y):
    return Q.mul(x, y)


def ldiv(Q: QuasigroupTable, x, z):
    return Q.ldiv(x, z)


def rdiv(Q: QuasigroupTable, z, y):
    return Q.rdiv(z, y)


def left_translation(Q: QuasigroupTable, b: int) -> Permutation:
    """``L_b(x) = b*x``."""
    return Permutation(tuple(Q.cells[b, :].tolist()))


def right_translation(Q: QuasigroupTable, a: int) -> Permutation:
    """``R_a(x) = x*a``."""
    return Permutation(tuple(Q.cells[:, a].tolist()))


def principal_isotope(Q: QuasigroupTable, a: int = 0, b: int = 0) -> QuasigroupTable:
    """The loop ``x∘y = R_a⁻¹(x) * L_b⁻¹(y) = (x/a)*(b\\y)``; its identity is ``b*a``."""
    left = Q.rdiv_table[:, a]
    right = Q.ldiv_table[b, :]
    return QuasigroupTable(_freeze(Q.cells[np.ix_(left, right)]))


def general_isotope(Q: QuasigroupTable, f: Permutation, g: Permutation, h: Permutation) -> QuasigroupTable:
    """``x∘y = h⁻¹(f(x) * g(y))``."""
    n = Q.order
    if not len(f) == len(g) == len(h) == n:
        raise ValueError("isotopy components must have the table's order")
    prod = Q.cells[np.ix_(f.array, g.array)]
    return QuasigroupTable(_freeze(h.inverse().array[prod]))


def identity_element(Q: QuasigroupTable) -> int | None:
    """Two-sided identity element, or None."""
    n = Q.order
    ar = np.arange(n)
    for e in range(n):
        if np.array_equal(Q.cells[e], ar) and np.array_equal(Q.cells[:, e], ar):
            return e
    return None


def is_associative(Q: QuasigroupTable) -> bool:
    T = Q.cells
    return bool(np.array_equal(T[T, :], T[:, T]))


def is_commutative(Q: QuasigroupTable) -> bool:
    return bool(np.array_equal(Q.cells, Q.cells.T))


@dataclass(frozen=True)
class GroupAnalysis:
    is_loop: bool
    identity: int | None
    is_group: bool
    is_abelian: bool
    # None: not a group, or a group that is not nilpotent (see ``is_nilpotent``)
    nilpotency_class: int | None
    lower_central_series: tuple[frozenset[int], ...] = ()

    @property
    def is_nilpotent(self) -> bool:
        return self.nilpotency_class is not None

    def class_label(self):
        if not self.is_group:
            return None
        return self.nilpotency_class if self.is_nilpotent else "not nilpotent"


def _generated_subgroup(T: np.ndarray, gens, e: int) -> frozenset[int]:
    elems = {e}
    frontier = [e]
    gens = list(set(gens))
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = int(T[x, g])
                if y not in elems:
                    elems.add(y)
                    new.append(y)
        frontier = new
    return frozenset(elems)


def lower_central_series(Q: QuasigroupTable, e: int | None = None) -> list[frozenset[int]]:
    """γ1 = G, γ(k+1) = <[g, h] : g ∈ γk, h ∈ G>, until the series stabilizes."""
    T = Q.cells
    if e is None:
        e = identity_element(Q)
    n = Q.order
    inv = np.argmax(T == e, axis=1)
    everything = np.arange(n)
    series = [frozenset(range(n))]
    while True:
        cur = np.array(sorted(series[-1]), dtype=np.intp)
        g = cur[:, None]
        h = everything[None, :]
        comm = T[T[g, h], T[inv[g], inv[h]]]  # g h g⁻¹ h⁻¹
        nxt = _generated_subgroup(T, np.unique(comm).tolist(), e)
        # normal closure; [γk, G] is already normal but closing is cheap
        conj = T[T[everything[:, None], np.array(sorted(nxt))[None, :]], inv[everything][:, None]]
        nxt = _generated_subgroup(T, np.unique(conj).tolist(), e)
        if nxt == series[-1]:
            return series
        series.append(nxt)


def analyze_group(Q: QuasigroupTable) -> GroupAnalysis:
    e = identity_element(Q)
    if e is None:
        return GroupAnalysis(False, None, False, False, None)
    if not is_associative(Q):
        return GroupAnalysis(True, e, False, False, None)
    abelian = is_commutative(Q)
    series = tuple(lower_central_series(Q, e))
    last = series[-1]
    if last == frozenset({e}):
        cls = len(series) - 1
    else:
        cls = None
    return GroupAnalysis(True, e, True, abelian, cls, series)


def enumerate_latin_squares(n: int, bound: int = DEFAULT_ENUMERATION_BOUND) -> Iterator[QuasigroupTable]:
    """Every order-n Latin square exactly once, in row-major lexicographic order."""
    if n < 1:
        raise ValueError("order must be positive")
    if n > bound:
        raise BoundExceeded(f"order {n} exceeds enumeration bound {bound}")
    grid = [[0] * n for _ in range(n)]
    row_used = [[False] * n for _ in range(n)]
    col_used = [[False] * n for _ in range(n)]
    cells = n * n

    def fill(k):
        if k == cells:
            yield QuasigroupTable(_freeze(np.array(grid, dtype=np.intp)))
            return
        r, c = divmod(k, n)
        ru, cu = row_used[r], col_used[c]
        for v in range(n):
            if ru[v] or cu[v]:
                continue
            ru[v] = cu[v] = True
            grid[r][c] = v
            yield from fill(k + 1)
            ru[v] = cu[v] = False

    yield from fill(0)


def random_latin_square(n: int, seed: int) -> QuasigroupTable:
    """A pseudo-random Latin square, deterministic in ``(n, seed)``.

    Rows are filled by randomized backtracking, then a random isotopy is applied.
    """
    if n < 1:
        raise ValueError("order must be positive")
    rng = random.Random(f"latin:{n}:{seed}")
    grid = [[-1] * n for _ in range(n)]
    row_used = [set() for _ in range(n)]
    col_used = [set() for _ in range(n)]

    def fill(k):
        if k == n * n:
            return True
        r, c = divmod(k, n)
        cand = [v for v in range(n) if v not in row_used[r] and v not in col_used[c]]
        rng.shuffle(cand)
        for v in cand:
            grid[r][c] = v
            row_used[r].add(v)
            col_used[c].add(v)
            if fill(k + 1):
                return True
            row_used[r].discard(v)
            col_used[c].discard(v)
        return False

    fill(0)
    arr = np.array(grid, dtype=np.intp)
    rp, cp, sp = (rng.sample(range(n), n) for _ in range(3))
    arr = np.array(sp, dtype=np.intp)[arr[np.ix_(rp, cp)]]
    return validate_table(arr)


def read_qg(text: str, name: str | None = None) -> QuasigroupTable:
    """Parse ``.qg`` text: ``#`` comment lines, the order, then n rows."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise QgFormatError("empty .qg document")
    try:
        n = int(lines[0].strip())
    except ValueError:
        raise QgFormatError(f"first line must be the order, got {lines[0]!r}") from None
    if n < 1:
        raise QgFormatError("order must be positive")
    if len(lines) - 1 != n:
        raise QgFormatError(f"expected {n} rows, found {len(lines) - 1}")
    grid = []
    for i, ln in enumerate(lines[1:]):
        try:
            row = [int(tok) for tok in ln.split()]
        except ValueError:
            raise QgFormatError(f"row {i}: non-integer entry") from None
        grid.append(row)
    return validate_table(grid, name=name)


def write_qg(Q: QuasigroupTable) -> str:
    out = [str(Q.order)]
    out += [" ".join(str(v) for v in row) for row in Q.rows()]
    return "\n".join(out) + "\n"


def load_qg(path) -> QuasigroupTable:
    with open(path, encoding="utf-8") as fh:
        return read_qg(fh.read(), name=str(path))


def save_qg(Q: QuasigroupTable, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(write_qg(Q))
