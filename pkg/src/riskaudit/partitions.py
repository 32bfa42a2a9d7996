"""Set partitions in canonical order, with exact Bell counts."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .errors import DomainError

DEFAULT_MAX_ITEMS = 12


@dataclass(frozen=True)
class Partition:
    """Blocks sorted internally and by smallest member."""

    blocks: tuple[tuple, ...]

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable]) -> "Partition":
        canon = []
        seen = set()
        for block in blocks:
            b = tuple(sorted(block))
            if not b:
                raise DomainError("empty block")
            for x in b:
                if x in seen:
                    raise DomainError(f"element {x!r} appears in two blocks")
                seen.add(x)
            canon.append(b)
        canon.sort(key=lambda b: b[0])
        return cls(tuple(canon))

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    def members(self) -> frozenset:
        return frozenset(x for b in self.blocks for x in b)

    def __iter__(self):
        return iter(self.blocks)


def bell_number(k: int) -> int:
    """Number of partitions of a k-element set, via the Bell triangle."""
    if k < 0:
        raise DomainError("k must be nonnegative")
    row = [1]
    for _ in range(k):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def _growth_strings(k: int) -> Iterator[tuple[int, ...]]:
    # restricted growth strings in lexicographic order; a[i] <= 1 + max(a[:i])
    if k == 0:
        yield ()
        return
    a = [0] * k
    m = [0] * k
    while True:
        yield tuple(a)
        j = k - 1
        while j > 0 and a[j] > m[j - 1]:
            j -= 1
        if j == 0:
            return
        a[j] += 1
        m[j] = m[j - 1] if m[j - 1] > a[j] else a[j]
        for i in range(j + 1, k):
            a[i] = 0
            m[i] = m[j]


def enumerate_partitions(
    k: int, cap: Optional[int] = None, *, max_items: int = DEFAULT_MAX_ITEMS
) -> Iterator[Partition]:
    """Yield every partition of {0, ..., k-1} in canonical order.

    Blocks come out sorted by smallest member. Item counts above `max_items`
    are rejected eagerly unless an explicit cap bounds the enumeration.
    """
    if k < 0:
        raise DomainError("k must be nonnegative")
    if k > max_items and cap is None:
        raise DomainError(
            f"{k} items would enumerate {bell_number(k)} partitions; pass a cap to proceed"
        )
    return _partition_stream(k, cap)


def _partition_stream(k: int, cap: Optional[int]) -> Iterator[Partition]:
    emitted = 0
    for rgs in _growth_strings(k):
        if cap is not None and emitted >= cap:
            return
        nblocks = max(rgs, default=-1) + 1
        blocks: list[list[int]] = [[] for _ in range(nblocks)]
        for item, label in enumerate(rgs):
            blocks[label].append(item)
        # labels appear in order of first occurrence, so block order is by
        # smallest member already
        yield Partition(tuple(tuple(b) for b in blocks))
        emitted += 1
