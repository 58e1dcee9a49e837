"""Set partitions of {1, ..., k}.

Partitions are immutable value objects with a canonical form: every block is
sorted ascending and blocks are ordered by their least element. Enumeration
walks restricted-growth strings in lexicographic order, so the output order is
deterministic and matches the block ordering used in counting arguments.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Hashable, Iterable, Iterator, Sequence

from .errors import ArgumentError, SizeError

__all__ = [
    "MAX_ENUMERATION_K",
    "Partition",
    "PartitionClass",
    "bell_number",
    "blocks_meeting",
    "count_partitions",
    "double_factorial",
    "enumerate_partitions",
    "iter_partitions",
    "kernel_partition",
    "separation_weight",
]

MAX_ENUMERATION_K = 12
_MAX_DOUBLE_FACTORIAL = 33


class PartitionClass(enum.Enum):
    """Filtered views of the partition lattice."""

    ALL = "all"
    MIN_BLOCK_SIZE_2 = "min_block_size_2"
    PAIRS = "pairs"

    def admits(self, pi: "Partition") -> bool:
        if self is PartitionClass.ALL:
            return True
        if self is PartitionClass.MIN_BLOCK_SIZE_2:
            return pi.min_block_size >= 2
        return all(len(b) == 2 for b in pi.blocks)


@dataclass(frozen=True)
class Partition:
    """A set partition of ``{1, ..., k}`` stored in canonical form.

    Blocks may be passed in any order and with unsorted elements; they are
    canonicalised on construction. Indices are 1-based.
    """

    k: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.k < 1:
            raise ArgumentError(f"partition ground set size must be >= 1, got {self.k}")
        canon = tuple(sorted((tuple(sorted(b)) for b in self.blocks), key=lambda b: b[0] if b else 0))
        seen: set[int] = set()
        for b in canon:
            if not b:
                raise ArgumentError("partition blocks must be nonempty")
            for i in b:
                if not 1 <= i <= self.k:
                    raise ArgumentError(f"index {i} outside 1..{self.k}")
                if i in seen:
                    raise ArgumentError(f"index {i} appears in two blocks")
                seen.add(i)
        if len(seen) != self.k:
            raise ArgumentError(f"blocks do not cover 1..{self.k}")
        object.__setattr__(self, "blocks", canon)

    @classmethod
    def from_labels(cls, labels: Sequence[Hashable]) -> "Partition":
        """Partition positions ``1..len(labels)`` by equal label."""
        groups: dict[Hashable, list[int]] = {}
        for i, lab in enumerate(labels, start=1):
            groups.setdefault(lab, []).append(i)
        return cls(len(labels), tuple(tuple(g) for g in groups.values()))

    @classmethod
    def from_list(cls, blocks: Iterable[Iterable[int]]) -> "Partition":
        """Inverse of :meth:`to_list`."""
        blocks = [tuple(int(i) for i in b) for b in blocks]
        return cls(sum(len(b) for b in blocks), tuple(blocks))

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.blocks)

    def __str__(self) -> str:
        return "{" + ",".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks) + "}"

    @property
    def min_block_size(self) -> int:
        return min(len(b) for b in self.blocks)

    @property
    def singletons(self) -> int:
        """Number of blocks of size one."""
        return sum(1 for b in self.blocks if len(b) == 1)

    @property
    def labels(self) -> tuple[int, ...]:
        """Restricted-growth string: 0-based block index of each position."""
        out = [0] * self.k
        for j, b in enumerate(self.blocks):
            for i in b:
                out[i - 1] = j
        return tuple(out)

    def block_of(self, i: int) -> tuple[int, ...]:
        for b in self.blocks:
            if i in b:
                return b
        raise ArgumentError(f"index {i} outside 1..{self.k}")

    def refines(self, other: "Partition") -> bool:
        """True when every block of ``self`` lies inside a block of ``other``."""
        if self.k != other.k:
            return False
        lab = other.labels
        return all(len({lab[i - 1] for i in b}) == 1 for b in self.blocks)

    def to_list(self) -> list[list[int]]:
        """Serialise as a sorted list of lists of 1-based indices."""
        return [list(b) for b in self.blocks]


def _check_k(k: int) -> None:
    if not isinstance(k, (int,)) or k < 1:
        raise SizeError(f"k must be a positive integer, got {k!r}")
    if k > MAX_ENUMERATION_K:
        raise SizeError(f"k={k} exceeds the enumeration cap {MAX_ENUMERATION_K}")


def _rgs(k: int, min_size: int, max_size: int | None) -> Iterator[list[int]]:
    # Depth-first over restricted-growth strings with block-size pruning; the
    # visiting order is lexicographic, so pruning does not disturb it.
    labels = [0] * k
    sizes: list[int] = []

    def rec(i: int) -> Iterator[list[int]]:
        remaining = k - i
        deficit = sum(max(0, min_size - s) for s in sizes)
        if deficit > remaining:
            return
        if i == k:
            yield labels
            return
        for j in range(len(sizes) + 1):
            if j == len(sizes):
                sizes.append(0)
            if max_size is None or sizes[j] < max_size:
                labels[i] = j
                sizes[j] += 1
                yield from rec(i + 1)
                sizes[j] -= 1
            if sizes[j] == 0:
                sizes.pop()

    yield from rec(0)


def iter_partitions(k: int, cls: PartitionClass = PartitionClass.ALL) -> Iterator[Partition]:
    """Lazily enumerate the partitions of ``{1..k}`` in restricted-growth order."""
    _check_k(k)
    if cls is PartitionClass.PAIRS:
        if k % 2:
            return
        gen = _rgs(k, 2, 2)
    elif cls is PartitionClass.MIN_BLOCK_SIZE_2:
        gen = _rgs(k, 2, None)
    else:
        gen = _rgs(k, 1, None)
    for labels in gen:
        yield Partition.from_labels(labels)


def enumerate_partitions(k: int, cls: PartitionClass = PartitionClass.ALL) -> list[Partition]:
    """All partitions of ``{1..k}`` in the class ``cls``.

    Parameters
    ----------
    k : int
        Ground-set size, ``1 <= k <= 12``.
    cls : PartitionClass
        ``ALL``, ``MIN_BLOCK_SIZE_2`` (no singletons) or ``PAIRS``.

    Returns
    -------
    list of Partition
        Duplicate-free, ordered lexicographically by restricted-growth string.
        Empty for ``PAIRS`` with odd ``k``.

    Raises
    ------
    SizeError
        If ``k`` is outside ``1..12``.
    """
    return list(iter_partitions(k, cls))


@lru_cache(maxsize=None)
def bell_number(k: int) -> int:
    """Number of set partitions of a k-element set (Bell triangle)."""
    if k < 0:
        raise ArgumentError("k must be nonnegative")
    row = [1]
    for _ in range(k):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


def count_partitions(k: int, cls: PartitionClass = PartitionClass.ALL) -> int:
    """Cardinality of a partition class without enumerating it (``ALL`` and ``PAIRS``)."""
    if cls is PartitionClass.ALL:
        return bell_number(k)
    if cls is PartitionClass.PAIRS:
        return 0 if k % 2 else double_factorial(k - 1)
    return sum(1 for _ in iter_partitions(k, cls))


def kernel_partition(values: Sequence[Hashable]) -> Partition:
    """Kernel of a tuple: ``i`` and ``j`` share a block iff ``values[i] == values[j]``."""
    if len(values) == 0:
        raise SizeError("kernel of an empty tuple is undefined")
    return Partition.from_labels(list(values))


def blocks_meeting(pi: Partition, K: Iterable[int]) -> int:
    """Number of blocks of ``pi`` that intersect the index set ``K``."""
    K = set(K)
    if not K:
        raise ArgumentError("K must be nonempty")
    if not K <= set(range(1, pi.k + 1)):
        raise ArgumentError(f"K={sorted(K)} not contained in 1..{pi.k}")
    lab = pi.labels
    return len({lab[i - 1] for i in K})


def separation_weight(pi: Partition, kappa: Partition) -> int:
    """``sum over K in kappa of (blocks_meeting(pi, K) - 1)``.

    Zero exactly when ``kappa`` refines ``pi``; it counts how many factors of
    the tail mass a kernel partition ``kappa`` contributes when the tuple is
    separated along ``pi``.
    """
    if pi.k != kappa.k:
        raise ArgumentError(f"partitions of different sizes ({pi.k} vs {kappa.k})")
    return sum(blocks_meeting(pi, K) - 1 for K in kappa.blocks)


def double_factorial(k: int) -> int:
    """``k!!`` with the conventions ``(-1)!! = 0!! = 1``; capped at ``k <= 33``."""
    if k < -1:
        raise ArgumentError(f"double factorial undefined for k={k}")
    if k > _MAX_DOUBLE_FACTORIAL:
        raise SizeError(f"{k}!! exceeds the 64-bit cap (k <= {_MAX_DOUBLE_FACTORIAL})")
    out = 1
    for j in range(k, 0, -2):
        out *= j
    return out
