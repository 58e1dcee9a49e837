"""Finite metric index spaces with integer-valued metrics.

Box windows of the integer lattice under the sup-norm are the canonical
spaces; an explicit dense-matrix space exists for testing arbitrary metrics.
Points of one-dimensional boxes are plain ints, points of higher-dimensional
boxes are tuples of ints.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterator, Sequence

import numpy as np

from .errors import ArgumentError, SizeError
from .partitions import Partition, enumerate_partitions

__all__ = [
    "BoxSpace",
    "ConnectedDecomposition",
    "CountingLemmaReport",
    "ExplicitSpace",
    "IndexSpace",
    "SpaceFamily",
    "ball_size",
    "box_family",
    "connected_decomposition",
    "enumerate_tuples",
    "integer_root",
    "iter_tuples",
    "make_box",
    "make_window",
    "max_ball_size",
    "space_from_descriptor",
    "verify_counting_lemma",
]

MAX_BOX_POINTS = 10**6
MAX_BOX_DIM = 4
MAX_EXPLICIT_POINTS = 1000
_MAX_TUPLE_SPACE = 10**8


class IndexSpace:
    """A finite metric space ``(T, d)`` with ``d`` taking values in the nonnegative integers."""

    points: Sequence[Hashable]

    def metric(self, s, t) -> int:
        raise NotImplementedError

    @property
    def size(self) -> int:
        return len(self.points)

    def __len__(self) -> int:
        return self.size

    def __contains__(self, t) -> bool:
        raise NotImplementedError

    @property
    def diameter(self) -> int:
        raise NotImplementedError

    def ball_size(self, t, a: int) -> int:
        raise NotImplementedError

    def max_ball_size(self, a: int) -> int:
        raise NotImplementedError

    @property
    def descriptor(self) -> dict[str, Any]:
        raise NotImplementedError

    def _require(self, t) -> None:
        if t not in self:
            raise ArgumentError(f"point {t!r} is not in the space")


class BoxSpace(IndexSpace):
    """The lattice box ``[lo_1, hi_1] x ... x [lo_d, hi_d]`` with the sup-norm metric.

    Points are generated lazily, so size, diameter and ball queries are cheap
    even for boxes too large to enumerate.
    """

    def __init__(self, lo: Sequence[int], hi: Sequence[int]):
        lo = tuple(int(v) for v in lo)
        hi = tuple(int(v) for v in hi)
        if len(lo) != len(hi) or not lo:
            raise ArgumentError("lo and hi must be nonempty and of equal length")
        if any(h < l for l, h in zip(lo, hi)):
            raise ArgumentError(f"empty box lo={lo} hi={hi}")
        self.lo = lo
        self.hi = hi
        self.dim = len(lo)
        self._points: list | None = None

    def __repr__(self) -> str:
        return f"BoxSpace(lo={self.lo}, hi={self.hi})"

    def __eq__(self, other) -> bool:
        return isinstance(other, BoxSpace) and (self.lo, self.hi) == (other.lo, other.hi)

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(h - l + 1 for l, h in zip(self.lo, self.hi))

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    @property
    def points(self) -> list:
        if self._points is None:
            if self.size > MAX_BOX_POINTS:
                raise SizeError(f"box with {self.size} points exceeds the cap {MAX_BOX_POINTS}")
            if self.dim == 1:
                self._points = list(range(self.lo[0], self.hi[0] + 1))
            else:
                self._points = list(itertools.product(*(range(l, h + 1) for l, h in zip(self.lo, self.hi))))
        return self._points

    def coords(self, t) -> tuple[int, ...]:
        if self.dim == 1 and not isinstance(t, tuple):
            return (int(t),)
        return tuple(t)

    def __contains__(self, t) -> bool:
        try:
            c = self.coords(t)
        except TypeError:
            return False
        return len(c) == self.dim and all(l <= v <= h for v, l, h in zip(c, self.lo, self.hi))

    def metric(self, s, t) -> int:
        if self.dim == 1 and not isinstance(s, tuple):
            return abs(s - t)
        return max(abs(a - b) for a, b in zip(s, t))

    @property
    def diameter(self) -> int:
        return max(self.shape) - 1

    def ball_size(self, t, a: int) -> int:
        self._require(t)
        c = self.coords(t)
        return math.prod(min(h, v + a) - max(l, v - a) + 1 for v, l, h in zip(c, self.lo, self.hi))

    def max_ball_size(self, a: int) -> int:
        return math.prod(min(2 * a + 1, m) for m in self.shape)

    @property
    def descriptor(self) -> dict[str, Any]:
        return {"kind": "window", "lo": list(self.lo), "hi": list(self.hi)}


class ExplicitSpace(IndexSpace):
    """Arbitrary finite metric space given by a dense integer distance matrix."""

    def __init__(self, points: Sequence[Hashable], metric_matrix, check: bool = True):
        self.points = list(points)
        if len(self.points) > MAX_EXPLICIT_POINTS:
            raise SizeError(f"explicit spaces are capped at {MAX_EXPLICIT_POINTS} points")
        if len(set(self.points)) != len(self.points):
            raise ArgumentError("duplicate point labels")
        D = np.asarray(metric_matrix)
        n = len(self.points)
        if D.shape != (n, n):
            raise ArgumentError(f"metric matrix must be {n}x{n}, got {D.shape}")
        if not np.all(np.equal(np.mod(D, 1), 0)) or np.any(D < 0):
            raise ArgumentError("metric must take nonnegative integer values")
        self.matrix = D.astype(np.int64)
        self._index = {p: i for i, p in enumerate(self.points)}
        if check:
            self._check_axioms()

    def _check_axioms(self) -> None:
        D = self.matrix
        if not np.array_equal(D, D.T):
            raise ArgumentError("metric is not symmetric")
        off = ~np.eye(len(D), dtype=bool)
        if np.any(np.diag(D) != 0) or np.any(D[off] == 0):
            raise ArgumentError("metric must vanish exactly on the diagonal")
        # d(i,k) <= d(i,j) + d(j,k) for all j, via a min-plus product
        for j in range(len(D)):
            if np.any(D > D[:, [j]] + D[[j], :]):
                raise ArgumentError("metric violates the triangle inequality")

    def __contains__(self, t) -> bool:
        try:
            return t in self._index
        except TypeError:
            return False

    def metric(self, s, t) -> int:
        return int(self.matrix[self._index[s], self._index[t]])

    @property
    def diameter(self) -> int:
        return int(self.matrix.max())

    def ball_size(self, t, a: int) -> int:
        self._require(t)
        return int(np.count_nonzero(self.matrix[self._index[t]] <= a))

    def max_ball_size(self, a: int) -> int:
        return int(np.count_nonzero(self.matrix <= a, axis=1).max())

    @property
    def descriptor(self) -> dict[str, Any]:
        return {"kind": "explicit", "points": list(self.points), "metric_matrix": self.matrix.tolist()}


def make_box(d: int, n: int, centered: bool = True) -> BoxSpace:
    """Lattice box: ``{-n..n}^d`` if ``centered`` else ``{1..n}^d``.

    Raises
    ------
    SizeError
        If ``d > 4`` or the box would have more than ``10**6`` points.
    """
    if d < 1 or n < 1:
        raise ArgumentError(f"need d >= 1 and n >= 1, got d={d}, n={n}")
    if d > MAX_BOX_DIM:
        raise SizeError(f"dimension {d} exceeds the cap {MAX_BOX_DIM}")
    side = 2 * n + 1 if centered else n
    if side**d > MAX_BOX_POINTS:
        raise SizeError(f"box with {side**d} points exceeds the cap {MAX_BOX_POINTS}")
    if centered:
        return BoxSpace((-n,) * d, (n,) * d)
    return BoxSpace((1,) * d, (n,) * d)


def make_window(lo, hi) -> BoxSpace:
    """Box with explicit corners; ints are accepted for one-dimensional windows."""
    lo = (lo,) if isinstance(lo, int) else tuple(lo)
    hi = (hi,) if isinstance(hi, int) else tuple(hi)
    box = BoxSpace(lo, hi)
    if box.size > MAX_BOX_POINTS:
        raise SizeError(f"box with {box.size} points exceeds the cap {MAX_BOX_POINTS}")
    return box


def ball_size(space: IndexSpace, t, a: int) -> int:
    """``|{s : d(s, t) <= a}|``."""
    return space.ball_size(t, a)


def max_ball_size(space: IndexSpace, a: int) -> int:
    """``max_t |B_a(t)|``, the quantity written ``b_n(a)`` for the n-th space."""
    return space.max_ball_size(a)


def space_from_descriptor(desc: dict[str, Any]) -> IndexSpace:
    """Build a space from a config descriptor.

    Accepted forms: ``{"kind": "box", "dim", "side", "centered"}``,
    ``{"kind": "window", "lo", "hi"}`` and
    ``{"kind": "explicit", "points", "metric_matrix"}``.
    """
    kind = desc.get("kind")
    if kind == "box":
        return make_box(int(desc["dim"]), int(desc["side"]), bool(desc.get("centered", True)))
    if kind == "window":
        return make_window(desc["lo"], desc["hi"])
    if kind == "explicit":
        pts = [tuple(p) if isinstance(p, list) else p for p in desc["points"]]
        return ExplicitSpace(pts, desc["metric_matrix"])
    raise ArgumentError(f"unknown space kind {kind!r}")


def integer_root(n: int, ell: int) -> int:
    """``floor(n ** (1/ell))`` computed exactly for integers."""
    if n < 0 or ell < 1:
        raise ArgumentError("need n >= 0 and ell >= 1")
    r = int(round(n ** (1.0 / ell)))
    while r**ell > n:
        r -= 1
    while (r + 1) ** ell <= n:
        r += 1
    return r


@dataclass(frozen=True)
class SpaceFamily:
    """A sequence of spaces ``n -> T_n`` together with its growth descriptor.

    ``generator`` must return cheap (lazy) spaces; size and diameter queries
    never enumerate points.
    """

    generator: Callable[[int], IndexSpace]
    descriptor: dict[str, Any] = field(default_factory=dict)

    def space(self, n: int) -> IndexSpace:
        return self.generator(n)

    def size(self, n: int) -> int:
        return self.generator(n).size

    def diameter(self, n: int) -> int:
        return self.generator(n).diameter

    def max_ball_size(self, n: int, a: int) -> int:
        return self.generator(n).max_ball_size(a)

    def scaling_sequence(self, ell: int, n: int) -> int:
        """The choice ``a_n = floor(n ** (1/ell))`` (clamped to ``1..n``)."""
        return min(n, max(1, integer_root(n, ell)))


def box_family(d: int = 1, centered: bool = False) -> SpaceFamily:
    """``T_n = {1..n}^d`` (``centered=False``) or ``T_n = {-n..n}^d``."""
    if d < 1 or d > MAX_BOX_DIM:
        raise ArgumentError(f"dimension must be in 1..{MAX_BOX_DIM}")
    if centered:
        gen = lambda n: BoxSpace((-n,) * d, (n,) * d)  # noqa: E731
    else:
        gen = lambda n: BoxSpace((1,) * d, (n,) * d)  # noqa: E731
    return SpaceFamily(gen, {"kind": "box", "dim": d, "centered": centered})


@dataclass(frozen=True)
class ConnectedDecomposition:
    """A tuple split into its maximal a-connected groups of positions."""

    tuple: tuple
    a: int
    partition: Partition

    def groups(self) -> list[tuple]:
        return [tuple(self.tuple[i - 1] for i in b) for b in self.partition.blocks]


def _components(points: Sequence, a: int, metric) -> list[int]:
    k = len(points)
    parent = list(range(k))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(k):
        for j in range(i + 1, k):
            if metric(points[i], points[j]) <= a:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    return [find(i) for i in range(k)]


def connected_decomposition(space: IndexSpace, tup: Sequence, a: int) -> ConnectedDecomposition:
    """The unique partition of positions into a-connected groups more than ``a`` apart.

    Computed as connected components of the threshold graph with an edge
    ``i - j`` whenever ``d(t_i, t_j) <= a``.
    """
    if len(tup) == 0:
        raise ArgumentError("tuple must be nonempty")
    if a < 0:
        raise ArgumentError("radius must be nonnegative")
    for t in tup:
        space._require(t)
    roots = _components(tup, a, space.metric)
    return ConnectedDecomposition(tuple(tup), int(a), Partition.from_labels(roots))


def iter_tuples(space: IndexSpace, k: int, pi: Partition, a: int) -> Iterator[tuple]:
    """Stream the tuples of ``T^k`` whose a-connected decomposition is exactly ``pi``."""
    if pi.k != k:
        raise ArgumentError(f"partition is on {pi.k} points, expected k={k}")
    target = pi.labels
    metric = space.metric
    for tup in itertools.product(space.points, repeat=k):
        if Partition.from_labels(_components(tup, a, metric)).labels == target:
            yield tup


def enumerate_tuples(space: IndexSpace, k: int, pi: Partition, a: int, cap: int | None = None) -> list[tuple]:
    """Materialise :func:`iter_tuples` in lexicographic order.

    Without ``cap`` the full product ``|T|^k`` must not exceed ``10**8``.
    With ``cap``, more than ``cap`` matching tuples raise :class:`SizeError`.
    """
    if cap is None and space.size**k > _MAX_TUPLE_SPACE:
        raise SizeError(f"|T|^k = {space.size**k} exceeds {_MAX_TUPLE_SPACE}; supply a cap")
    out = []
    for tup in iter_tuples(space, k, pi, a):
        out.append(tup)
        if cap is not None and len(out) > cap:
            raise SizeError(f"more than {cap} tuples match partition {pi}")
    return out


@dataclass
class CountingLemmaRow:
    partition: Partition
    count: int
    block_bound: int
    coarse_bound: int

    @property
    def holds(self) -> bool:
        return self.count <= self.block_bound <= self.coarse_bound


@dataclass
class CountingLemmaReport:
    size: int
    k: int
    a: int
    ball: int
    rows: list[CountingLemmaRow]

    @property
    def holds(self) -> bool:
        return all(r.holds for r in self.rows)

    def to_dict(self) -> dict[str, Any]:
        return {
            "size": self.size,
            "k": self.k,
            "a": self.a,
            "max_ball_size": self.ball,
            "holds": self.holds,
            "rows": [
                {
                    "partition": r.partition.to_list(),
                    "count": r.count,
                    "block_bound": r.block_bound,
                    "coarse_bound": r.coarse_bound,
                    "holds": r.holds,
                }
                for r in self.rows
            ],
        }


def verify_counting_lemma(space: IndexSpace, k: int, a: int, cap: int = 10**7) -> CountingLemmaReport:
    """Exhaustively count ``|T^k(pi|a)|`` for every partition and compare with both bounds.

    The bounds are ``prod_B |T| b(a)^(|B|-1) |B|!`` and the coarser
    ``k! |T|^|pi| b(a)^(k-|pi|)`` with ``b(a)`` the maximal ball size.
    """
    if space.size**k > cap:
        raise SizeError(f"|T|^k = {space.size**k} exceeds the cap {cap}")
    metric = space.metric
    counts: Counter = Counter()
    for tup in itertools.product(space.points, repeat=k):
        counts[Partition.from_labels(_components(tup, a, metric)).labels] += 1
    T = space.size
    b = space.max_ball_size(a)
    rows = []
    for pi in enumerate_partitions(k):
        block = math.prod(T * b ** (len(B) - 1) * math.factorial(len(B)) for B in pi.blocks)
        coarse = math.factorial(k) * T ** len(pi) * b ** (k - len(pi))
        rows.append(CountingLemmaRow(pi, counts.get(pi.labels, 0), block, coarse))
    return CountingLemmaReport(T, k, a, b, rows)
