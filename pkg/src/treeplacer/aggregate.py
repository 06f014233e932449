"""Failure-aggregate vectors and their lexicographic arithmetic.

The failure aggregate of a placement of size rho is the histogram
``<p_rho, ..., p_1, p_0>`` where ``p_i`` counts the vertices whose failure
number is exactly i.  Aggregates are compared lexicographically from the
top index down: the better placement first minimizes the number of events
that wipe out every replica, then the number that wipe out all but one,
and so on.

Storage convention: vectors are plain integer sequences in *ascending*
index order (``entries[0]`` is ``p_0``).  Truncated ("compact") vectors,
whose high entries are guaranteed zero, are then ordinary prefixes; the
missing entries are treated as zero by every operation here.  Difference
vectors (``b - a``) may hold negative entries; pure aggregates never do.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Sequence

# Logical roles for plain-list vectors.  A CompactAggregate of capacity m
# has m+1 entries covering failure numbers 0..m; an AggregateDiff is the
# pointwise difference of two aggregates and may be negative.
CompactAggregate = List[int]
AggregateDiff = List[int]

LESS, EQUAL, GREATER = -1, 0, 1


def lex_compare(a: Sequence[int], b: Sequence[int]) -> int:
    """Compare two aggregates from the top index downward.

    Returns LESS (-1), EQUAL (0) or GREATER (1).  The shorter operand is
    logically zero-extended, so compact and expanded vectors compare
    consistently.
    """
    la, lb = len(a), len(b)
    for i in range(max(la, lb) - 1, -1, -1):
        x = a[i] if i < la else 0
        y = b[i] if i < lb else 0
        if x != y:
            return LESS if x < y else GREATER
    return EQUAL


def add(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Pointwise sum; result capacity is the larger operand's."""
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, v in enumerate(b):
        out[i] += v
    return out


def subtract(a: Sequence[int], b: Sequence[int]) -> AggregateDiff:
    """Pointwise difference a - b; entries may be negative."""
    out = list(a) + [0] * max(0, len(b) - len(a))
    for i, v in enumerate(b):
        out[i] -= v
    return out


def bump(a: Sequence[int], index: int) -> list[int]:
    """Return a copy of ``a`` with entry ``index`` incremented by one."""
    if not 0 <= index < len(a):
        raise ValueError(f"bump index {index} out of range for capacity {len(a) - 1}")
    out = list(a)
    out[index] += 1
    return out


def accumulate(vectors: Iterable[Sequence[int]], capacity: int) -> list[int]:
    """Sum vectors into a fresh buffer of the given capacity.

    Entries are accumulated in increasing index order, so summing vectors
    of capacities c_1..c_k costs O(c_1 + ... + c_k) regardless of the
    buffer size.  Every operand must fit within ``capacity``.
    """
    out = [0] * (capacity + 1)
    for v in vectors:
        if len(v) > capacity + 1:
            raise ValueError("operand exceeds accumulator capacity")
        for i, x in enumerate(v):
            out[i] += x
    return out


def add_into(acc: list[int], v: Sequence[int]) -> None:
    """In-place ``acc += v``; ``v`` must fit within the accumulator."""
    if len(v) > len(acc):
        raise ValueError("operand exceeds accumulator capacity")
    for i, x in enumerate(v):
        acc[i] += x


def expand(compact: Sequence[int], rho: int) -> list[int]:
    """Zero-extend a compact vector to full length rho + 1."""
    if len(compact) > rho + 1:
        raise ValueError(f"capacity {len(compact) - 1} exceeds rho {rho}")
    return list(compact) + [0] * (rho + 1 - len(compact))


def truncate(entries: Sequence[int]) -> list[int]:
    """Drop zero high entries, keeping at least the index-0 entry."""
    top = len(entries) - 1
    while top > 0 and entries[top] == 0:
        top -= 1
    return list(entries[: top + 1])


def render(entries: Sequence[int]) -> str:
    """Render an aggregate as ``<p_rho,...,p_0>`` (top index first)."""
    return "<" + ",".join(str(x) for x in reversed(entries)) + ">"


def parse_render(text: str) -> list[int]:
    """Parse the ``<p_rho,...,p_0>`` rendering back to ascending entries."""
    s = text.strip()
    if not (s.startswith("<") and s.endswith(">")):
        raise ValueError(f"expected <p_rho,...,p_0>, got {text!r}")
    body = s[1:-1].strip()
    if not body:
        raise ValueError("empty aggregate rendering")
    desc = [int(tok.strip()) for tok in body.split(",")]
    return list(reversed(desc))


@dataclass(frozen=True)
class FailureAggregate:
    """An expanded failure aggregate for a placement of size ``rho``.

    ``entries`` run in ascending index order and always have length
    rho + 1.  Instances are values: freely shareable, compared
    lexicographically from the top index.
    """

    entries: tuple[int, ...]

    @property
    def rho(self) -> int:
        return len(self.entries) - 1

    @property
    def descending(self) -> tuple[int, ...]:
        return tuple(reversed(self.entries))

    @classmethod
    def from_descending(cls, desc: Sequence[int]) -> "FailureAggregate":
        return cls(tuple(reversed(desc)))

    @classmethod
    def from_compact(cls, compact: Sequence[int], rho: int) -> "FailureAggregate":
        return cls(tuple(expand(compact, rho)))

    def __str__(self) -> str:
        return render(self.entries)

    def __lt__(self, other: "FailureAggregate") -> bool:
        return lex_compare(self.entries, other.entries) == LESS

    def __le__(self, other: "FailureAggregate") -> bool:
        return lex_compare(self.entries, other.entries) != GREATER

    def __gt__(self, other: "FailureAggregate") -> bool:
        return lex_compare(self.entries, other.entries) == GREATER

    def __ge__(self, other: "FailureAggregate") -> bool:
        return lex_compare(self.entries, other.entries) != LESS
