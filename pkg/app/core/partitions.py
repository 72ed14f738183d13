"""
Young diagram combinatorics for torus fixed points of the rank-two framed
moduli space.
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, List, Tuple


@dataclass(frozen=True)
class YoungDiagram:
    """Weakly decreasing positive row lengths; boxes are 1-indexed (row, column)."""

    rows: Tuple[int, ...] = ()

    def __post_init__(self):
        rows = tuple(self.rows)
        if any(r <= 0 for r in rows):
            raise ValueError(f"row lengths must be positive: {rows}")
        if any(a < b for a, b in zip(rows, rows[1:])):
            raise ValueError(f"row lengths must be weakly decreasing: {rows}")
        object.__setattr__(self, "rows", rows)

    @property
    def size(self) -> int:
        return sum(self.rows)

    def row_length(self, i: int) -> int:
        """Length of row i (1-indexed); zero outside the diagram."""
        return self.rows[i - 1] if 1 <= i <= len(self.rows) else 0

    def column_height(self, j: int) -> int:
        """Height of column j (1-indexed); zero outside the diagram."""
        return sum(1 for r in self.rows if r >= j)

    def transpose(self) -> "YoungDiagram":
        if not self.rows:
            return self
        return YoungDiagram(tuple(self.column_height(j) for j in range(1, self.rows[0] + 1)))

    def boxes(self) -> Iterator[Tuple[int, int]]:
        for i, r in enumerate(self.rows, start=1):
            for j in range(1, r + 1):
                yield (i, j)

    def __contains__(self, box: Tuple[int, int]) -> bool:
        i, j = box
        return 1 <= j <= self.row_length(i)

    def __str__(self) -> str:
        return "[" + ",".join(map(str, self.rows)) + "]"


@dataclass(frozen=True)
class YoungPair:
    first: YoungDiagram
    second: YoungDiagram

    @property
    def size(self) -> int:
        return self.first.size + self.second.size

    def __getitem__(self, alpha: int) -> YoungDiagram:
        """Slot alpha in {1, 2}."""
        return (self.first, self.second)[alpha - 1]

    def swapped(self) -> "YoungPair":
        return YoungPair(self.second, self.first)

    def __str__(self) -> str:
        return f"({self.first},{self.second})"


@lru_cache(maxsize=None)
def partitions_of(n: int) -> Tuple[YoungDiagram, ...]:
    """All partitions of n, largest first part first."""
    def gen(remaining: int, cap: int) -> Iterator[Tuple[int, ...]]:
        if remaining == 0:
            yield ()
            return
        for first in range(min(remaining, cap), 0, -1):
            for rest in gen(remaining - first, first):
                yield (first,) + rest

    return tuple(YoungDiagram(rows) for rows in gen(n, n))


@lru_cache(maxsize=None)
def enumerate_pairs(n: int) -> Tuple[YoungPair, ...]:
    """Every pair of diagrams with total size n, in a fixed order."""
    if n < 0:
        raise ValueError("instanton number must be non-negative")
    pairs: List[YoungPair] = []
    for k in range(n + 1):
        for y1 in partitions_of(k):
            for y2 in partitions_of(n - k):
                pairs.append(YoungPair(y1, y2))
    return tuple(pairs)


def arm_leg(y: YoungDiagram, y_other: YoungDiagram, box: Tuple[int, int]) -> Tuple[int, int]:
    """
    Arm of the box measured in y and leg measured in y_other.

    The leg may be negative when the column of y_other is shorter than the
    row index.
    """
    if box not in y:
        raise ValueError(f"box {box} lies outside {y}")
    i, j = box
    return y.row_length(i) - j, y_other.column_height(j) - i
