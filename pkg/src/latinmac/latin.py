"""Latin squares, orthogonal families and Latin rectangles.

Symbols are 1-based (``1..K``). Row indices map to channels and column
indices to time-slots once a rectangle is handed to the scheduler.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ConstructionUnsupported, InvalidArgument


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def next_prime(n: int) -> int:
    """Smallest prime >= ``n`` (and >= 2)."""
    p = max(2, n)
    while not is_prime(p):
        p += 1
    return p


def _frozen(cells) -> np.ndarray:
    arr = np.array(cells, dtype=np.int64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LatinRectangle:
    """An ``rows x cols`` grid over symbols ``1..parent_order``.

    Rows and columns never repeat a symbol. Rectangles produced by
    :func:`truncate` have ``cols == parent_order``.
    """

    cells: np.ndarray
    parent_order: int
    rows: int = field(init=False)
    cols: int = field(init=False)

    def __post_init__(self):
        arr = _frozen(self.cells)
        if arr.ndim != 2:
            raise InvalidArgument("cells must be a 2-D grid")
        object.__setattr__(self, "cells", arr)
        object.__setattr__(self, "rows", int(arr.shape[0]))
        object.__setattr__(self, "cols", int(arr.shape[1]))

    def __eq__(self, other):
        if not isinstance(other, LatinRectangle):
            return NotImplemented
        return self.parent_order == other.parent_order and np.array_equal(self.cells, other.cells)

    def __hash__(self):
        return hash((self.parent_order, self.cells.tobytes(), self.cells.shape))

    def __getitem__(self, idx):
        return int(self.cells[idx])

    def tolist(self) -> list[list[int]]:
        return self.cells.tolist()

    def is_valid(self) -> bool:
        """Check the row/column distinctness invariants."""
        c = self.cells
        if c.size and (c.min() < 1 or c.max() > self.parent_order):
            return False
        rows_ok = all(len(set(row)) == self.cols for row in c.tolist())
        cols_ok = all(len(set(col)) == self.rows for col in c.T.tolist())
        return rows_ok and cols_ok


@dataclass(frozen=True, eq=False)
class LatinSquare(LatinRectangle):
    """A ``K x K`` Latin rectangle."""

    def __post_init__(self):
        super().__post_init__()
        if self.rows != self.cols or self.rows != self.parent_order:
            raise InvalidArgument(
                f"a Latin square needs a {self.parent_order}x{self.parent_order} grid, "
                f"got {self.rows}x{self.cols}"
            )

    @property
    def order(self) -> int:
        return self.parent_order

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "LatinSquare":
        return cls(cells=np.asarray(rows), parent_order=len(rows))


@dataclass(frozen=True)
class OrthogonalFamily:
    order: int
    members: tuple[LatinSquare, ...]

    def __post_init__(self):
        if len(self.members) > max(self.order - 1, 1):
            raise InvalidArgument("an orthogonal family of order K holds at most K-1 squares")
        if any(sq.order != self.order for sq in self.members):
            raise InvalidArgument("all family members must share one order")

    def __len__(self) -> int:
        return len(self.members)

    def __getitem__(self, i: int) -> LatinSquare:
        return self.members[i]

    def __iter__(self):
        return iter(self.members)


@dataclass(frozen=True)
class SymbolPattern:
    """Cells ``(row, col)`` holding ``symbol``, ordered by row."""

    symbol: int
    positions: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.positions)

    def __iter__(self):
        return iter(self.positions)


def cyclic_square(K: int, a: int) -> LatinSquare:
    """Square with ``cell(i, j) = ((a*i + j) mod K) + 1`` for prime ``K``.

    >>> cyclic_square(3, 1).tolist()
    [[1, 2, 3], [2, 3, 1], [3, 1, 2]]
    """
    if not is_prime(K):
        raise ConstructionUnsupported(f"cyclic construction needs a prime order, got {K}")
    if not 1 <= a <= K - 1:
        raise InvalidArgument(f"multiplier must lie in 1..{K - 1}, got {a}")
    i = np.arange(K)[:, None]
    j = np.arange(K)[None, :]
    return LatinSquare(cells=(a * i + j) % K + 1, parent_order=K)


def is_orthogonal(A: LatinRectangle, B: LatinRectangle) -> bool:
    """True iff the superimposed ordered pairs ``(A[i,j], B[i,j])`` are all distinct."""
    if A.parent_order != B.parent_order or A.cells.shape != B.cells.shape:
        raise InvalidArgument("orthogonality needs two grids of the same order and shape")
    K = A.parent_order
    codes = (A.cells - 1) * K + (B.cells - 1)
    return int(np.unique(codes).size) == codes.size


def mols_family(K: int) -> OrthogonalFamily:
    """Complete set of ``K-1`` mutually orthogonal cyclic squares for prime ``K``.

    ``K = 2`` yields the single square ``[[1, 2], [2, 1]]``.
    """
    if not is_prime(K):
        raise ConstructionUnsupported(f"MOLS are only constructed for prime orders, got {K}")
    return OrthogonalFamily(order=K, members=tuple(cyclic_square(K, a) for a in range(1, K)))


def truncate(S: LatinRectangle, M: int) -> LatinRectangle:
    """Keep the first ``min(M, rows)`` rows of ``S``."""
    if M < 1:
        raise InvalidArgument(f"channel count must be >= 1, got {M}")
    rows = min(M, S.rows)
    return LatinRectangle(cells=S.cells[:rows], parent_order=S.parent_order)


def symbol_positions(R: LatinRectangle, s: int) -> SymbolPattern:
    if not 1 <= s <= R.parent_order:
        raise InvalidArgument(f"symbol must lie in 1..{R.parent_order}, got {s}")
    rows, cols = np.nonzero(R.cells == s)
    return SymbolPattern(symbol=s, positions=tuple(zip(rows.tolist(), cols.tolist())))


# -- text dump -----------------------------------------------------------------

def dumps(R: LatinRectangle) -> str:
    lines = [f"latin {R.rows} {R.cols} {R.parent_order}"]
    lines += [" ".join(str(v) for v in row) for row in R.tolist()]
    return "\n".join(lines) + "\n"


def loads(text: str) -> LatinRectangle:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InvalidArgument("empty latin dump")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "latin":
        raise InvalidArgument(f"bad header line: {lines[0]!r}")
    rows, cols, order = (int(v) for v in head[1:])
    body = [[int(v) for v in ln.split()] for ln in lines[1:]]
    if len(body) != rows or any(len(r) != cols for r in body):
        raise InvalidArgument(f"body does not match header {rows}x{cols}")
    if rows == cols == order:
        return LatinSquare(cells=np.asarray(body), parent_order=order)
    return LatinRectangle(cells=np.asarray(body), parent_order=order)


def iter_patterns(R: LatinRectangle, symbols: Iterable[int]) -> list[SymbolPattern]:
    return [symbol_positions(R, s) for s in symbols]
