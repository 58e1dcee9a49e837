"""Finitely supported moving-average coefficient families and window simulation."""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping

import numpy as np

from ..errors import ArgumentError, ModelError, SizeError
from ..index_spaces import BoxSpace
from ..rng import STREAM_INNOVATIONS, hash_keys
from .innovations import InnovationSpec

__all__ = [
    "MACoefficients",
    "ProcessWindow",
    "simulate_ma_batch",
    "simulate_ma_window",
    "truncate_coefficients",
]

MAX_SUPPORT = 10**6


def _key(s, dim: int):
    if dim == 1:
        if isinstance(s, (tuple, list)):
            (s,) = s
        return int(s)
    return tuple(int(v) for v in s)


def _coords(s, dim: int) -> tuple[int, ...]:
    return (s,) if dim == 1 else s


class MACoefficients:
    """Coefficients ``c_s`` on a finite subset of the lattice ``Z^d``.

    Exact zeros are dropped. The dense representation ``grid`` covers the
    bounding box of the support with lower corner ``lo``.

    Parameters
    ----------
    entries : mapping
        Lattice point (int for ``dim == 1``, tuple otherwise) to coefficient.
    dim : int
        Lattice dimension.
    provenance : dict, optional
        Descriptor of the family the coefficients came from.
    tail_bound : callable, optional
        ``a -> `` upper bound on the l1 mass of the *untruncated* family
        outside the sup-norm ball of radius ``a``.
    """

    def __init__(
        self,
        entries: Mapping,
        dim: int = 1,
        provenance: dict | None = None,
        tail_bound: Callable[[int], float] | None = None,
        truncation_error: float = 0.0,
    ):
        if dim < 1:
            raise ArgumentError("dimension must be positive")
        self.dim = dim
        self.entries = {}
        for s, c in entries.items():
            if c != 0:
                if isinstance(c, float) and not math.isfinite(c):
                    raise ModelError(f"non-finite coefficient at {s}")
                self.entries[_key(s, dim)] = c
        if not self.entries:
            raise ModelError("coefficient family has empty support")
        if len(self.entries) > MAX_SUPPORT:
            raise SizeError(f"support of {len(self.entries)} points exceeds {MAX_SUPPORT}")
        self.provenance = provenance or {"kind": "explicit"}
        self.tail_bound = tail_bound
        self.truncation_error = float(truncation_error)
        pts = np.array([_coords(s, dim) for s in self.entries], dtype=np.int64).reshape(-1, dim)
        self.lo = tuple(int(v) for v in pts.min(axis=0))
        self.hi = tuple(int(v) for v in pts.max(axis=0))
        shape = tuple(h - l + 1 for l, h in zip(self.lo, self.hi))
        if math.prod(shape) > MAX_SUPPORT:
            raise SizeError(f"bounding box of the support exceeds {MAX_SUPPORT} points")
        self._exact = any(isinstance(c, Fraction) for c in self.entries.values())
        self.grid = np.zeros(shape, dtype=object if self._exact else np.float64)
        for s, c in self.entries.items():
            idx = tuple(v - l for v, l in zip(_coords(s, dim), self.lo))
            self.grid[idx] = c

    def __repr__(self) -> str:
        return f"MACoefficients(dim={self.dim}, support={len(self.entries)}, provenance={self.provenance})"

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, s):
        return self.entries.get(_key(s, self.dim), 0.0)

    @property
    def is_exact(self) -> bool:
        return self._exact

    @property
    def support(self) -> list:
        return sorted(self.entries)

    @property
    def radius(self) -> int:
        """Largest sup-norm of a support point."""
        return max(max(abs(v) for v in _coords(s, self.dim)) for s in self.entries)

    def l1_norm(self) -> float:
        return sum(abs(c) for c in self.entries.values())

    def lp_norm(self, p: float) -> float:
        if p == 1:
            return self.l1_norm()
        return sum(abs(float(c)) ** p for c in self.entries.values()) ** (1.0 / p)

    def power_sum(self, m: int):
        """``sum_s |c_s|^m``."""
        return sum(abs(c) ** m for c in self.entries.values())

    def total(self):
        """``sum_s c_s``; its square is the long-run variance."""
        return sum(self.entries.values())

    def norm_outside(self, a: int):
        """l1 mass of the coefficients with sup-norm strictly greater than ``a``."""
        return sum(
            abs(c) for s, c in self.entries.items() if max(abs(v) for v in _coords(s, self.dim)) > a
        )

    def scaled(self, alpha: float) -> "MACoefficients":
        return MACoefficients(
            {s: alpha * c for s, c in self.entries.items()},
            self.dim,
            {"kind": "scaled", "alpha": alpha, "base": self.provenance},
        )

    def exact(self) -> "MACoefficients":
        """Same family with every coefficient converted to an exact Fraction."""
        return MACoefficients(
            {s: Fraction(c) for s, c in self.entries.items()}, self.dim, self.provenance,
            self.tail_bound, self.truncation_error,
        )

    def as_float(self) -> "MACoefficients":
        if not self._exact:
            return self
        return MACoefficients(
            {s: float(c) for s, c in self.entries.items()}, self.dim, self.provenance,
            self.tail_bound, self.truncation_error,
        )

    def to_rows(self) -> list[list]:
        """Rows ``[s_1, ..., s_d, c]`` sorted by lattice point."""
        return [[*_coords(s, self.dim), float(self.entries[s])] for s in self.support]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"s_{i + 1}" for i in range(self.dim)] + ["c"])
            for row in self.to_rows():
                w.writerow([*row[:-1], repr(row[-1])])

    @classmethod
    def from_csv(cls, path) -> "MACoefficients":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            dim = len(header) - 1
            if dim < 1 or header[-1].strip() != "c":
                raise ArgumentError(f"expected columns s_1..s_d,c in {path}, got {header}")
            entries = {}
            for row in reader:
                if not row:
                    continue
                s = tuple(int(v) for v in row[:dim])
                entries[_key(s, dim)] = float(row[dim])
        return cls(entries, dim, {"kind": "csv", "path": str(path)})


def _geometric(rho: float, sided: str, dim: int, tol: float) -> MACoefficients:
    if not 0 < abs(rho) < 1:
        raise ModelError(f"geometric decay needs 0 < |rho| < 1, got {rho}")
    if sided not in ("one", "two"):
        raise ArgumentError(f"sided must be 'one' or 'two', got {sided!r}")
    r = abs(rho)
    two = sided == "two"
    full = (1 + r) / (1 - r) if two else 1 / (1 - r)

    def tail1(R: int) -> float:
        t = r ** (R + 1) / (1 - r)
        return 2 * t if two else t

    def tail(R: int) -> float:
        # S^d - S_R^d = (S - S_R) * sum_j S^j S_R^(d-1-j)
        if R < 0:
            return full**dim
        inner = full - tail1(R)
        return tail1(R) * sum(full**j * inner ** (dim - 1 - j) for j in range(dim))

    R = 0
    while tail(R) > tol:
        R += 1
    rng = range(-R if two else 0, R + 1)
    entries = {}
    for s in itertools.product(rng, repeat=dim):
        entries[_key(s, dim)] = math.prod(rho ** abs(v) for v in s)
    desc = {"kind": "geometric", "rho": rho, "sided": sided, "dim": dim}
    return MACoefficients(entries, dim, desc, tail, tail(R))


def _polynomial(beta: float, dim: int, tol: float) -> MACoefficients:
    if beta <= dim + 1:
        raise ModelError(f"polynomial decay needs beta > dim + 1 = {dim + 1}, got {beta}")

    def tail(R: int) -> float:
        # shell sizes (2r+1)^d - (2r-1)^d <= d 2^d (1+r)^(d-1), then an integral bound
        return dim * 2**dim * (1 + R) ** (dim - beta) / (beta - dim)

    R = 0
    while tail(R) > tol:
        R += 1
    if (2 * R + 1) ** dim > MAX_SUPPORT:
        raise SizeError(f"radius {R} in dimension {dim} exceeds the support cap")
    entries = {}
    for s in itertools.product(range(-R, R + 1), repeat=dim):
        entries[_key(s, dim)] = (1 + max(abs(v) for v in s)) ** (-beta)
    desc = {"kind": "polynomial", "beta": beta, "dim": dim}
    return MACoefficients(entries, dim, desc, tail, tail(R))


def _explicit(desc: dict[str, Any]) -> MACoefficients:
    entries = desc["entries"]
    if isinstance(entries, Mapping):
        dim = int(desc.get("dim", 1))
        items = {(_key(int(s), 1) if dim == 1 else _key(eval_point(s), dim)): float(c) for s, c in entries.items()}
        return MACoefficients(items, dim, {"kind": "explicit"})
    rows = [list(r) for r in entries]
    dim = len(rows[0]) - 1
    return MACoefficients({_key(r[:-1], dim): float(r[-1]) for r in rows}, dim, {"kind": "explicit"})


def eval_point(s) -> tuple[int, ...]:
    """Parse a point key such as ``"1,-2"`` or ``(1, -2)``."""
    if isinstance(s, str):
        return tuple(int(v) for v in s.strip("()[] ").split(","))
    return tuple(s)


def truncate_coefficients(descriptor: dict[str, Any], tol: float = 1e-12) -> MACoefficients:
    """Finite coefficient family whose discarded l1 tail is at most ``tol``.

    Descriptor kinds
    ----------------
    ``explicit``
        ``entries``: list of ``[s_1, ..., s_d, c]`` rows or a ``{s: c}`` map.
    ``csv``
        ``path`` to a CSV file with columns ``s_1..s_d, c``.
    ``geometric``
        ``c_s = rho^(|s_1| + ... + |s_d|)``; ``sided`` is ``"one"`` (all
        coordinates >= 0) or ``"two"``.
    ``polynomial``
        ``c_s = (1 + |s|_inf)^(-beta)`` with ``beta > dim + 1``.
    ``arma``
        ``a`` and ``b`` coefficient lists, expanded by :func:`arma_to_ma`.

    Raises
    ------
    ArgumentError
        If ``tol <= 0`` or the kind is unknown.
    ModelError
        If the family is not summable.
    """
    if not tol > 0:
        raise ArgumentError(f"tol must be positive, got {tol}")
    kind = descriptor.get("kind")
    if kind == "explicit":
        return _explicit(descriptor)
    if kind == "csv":
        return MACoefficients.from_csv(descriptor["path"])
    if kind == "geometric":
        return _geometric(float(descriptor["rho"]), descriptor.get("sided", "one"),
                          int(descriptor.get("dim", 1)), tol)
    if kind == "polynomial":
        return _polynomial(float(descriptor["beta"]), int(descriptor.get("dim", 1)), tol)
    if kind == "arma":
        from .arma import ArmaModel, arma_to_ma

        model = ArmaModel(descriptor.get("a", []), descriptor.get("b", []))
        return arma_to_ma(model, tol, float(descriptor.get("unit_circle_tol", 1e-8)))
    raise ArgumentError(f"unknown coefficient descriptor kind {kind!r}")


@dataclass
class ProcessWindow:
    """One realisation of a field on a box window; ``values`` has the box's shape."""

    space: BoxSpace
    values: np.ndarray
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    def __getitem__(self, t) -> float:
        c = self.space.coords(t)
        return float(self.values[tuple(v - l for v, l in zip(c, self.space.lo))])

    def total(self) -> float:
        return float(self.values.sum())


def _check_box(coeffs: MACoefficients, space) -> None:
    if not isinstance(space, BoxSpace):
        raise ArgumentError("MA simulation needs a lattice box window")
    if space.dim != coeffs.dim:
        raise ArgumentError(f"space dimension {space.dim} != coefficient dimension {coeffs.dim}")


def _innovation_grid(coeffs: MACoefficients, space: BoxSpace):
    # Y is needed on [lo - hi_c, hi - lo_c] per axis
    ylo = tuple(l - ch for l, ch in zip(space.lo, coeffs.hi))
    yhi = tuple(h - cl for h, cl in zip(space.hi, coeffs.lo))
    axes = [np.arange(l, h + 1, dtype=np.int64) for l, h in zip(ylo, yhi)]
    return ylo, np.meshgrid(*axes, indexing="ij")


def _filter(coeffs: MACoefficients, space: BoxSpace, Y: np.ndarray) -> np.ndarray:
    """``X_t = sum_s c_s Y_{t-s}`` on the box; leading axes of ``Y`` are batch axes."""
    shape = space.shape
    nb = Y.ndim - coeffs.dim
    X = np.zeros(Y.shape[:nb] + shape)
    for s in coeffs.support:
        c = float(coeffs.entries[s])
        off = tuple(ch - v for ch, v in zip(coeffs.hi, _coords(s, coeffs.dim)))
        sl = (Ellipsis,) + tuple(slice(o, o + m) for o, m in zip(off, shape))
        X += c * Y[sl]
    return X


def simulate_ma_batch(coeffs: MACoefficients, innov: InnovationSpec, space: BoxSpace, seeds) -> np.ndarray:
    """Independent windows, one per seed; returns an array of shape ``(len(seeds), *space.shape)``.

    Each innovation ``Y_z`` is a hash of ``(seed, z)``, so a row depends only
    on its own seed and never on the batch it was computed in.
    """
    _check_box(coeffs, space)
    seeds = np.asarray(seeds, dtype=np.uint64)
    _, grids = _innovation_grid(coeffs, space)
    expand = (slice(None),) + (None,) * coeffs.dim
    bits = hash_keys(seeds[expand], STREAM_INNOVATIONS, *(g[None] for g in grids))
    Y = innov.transform(bits)
    return _filter(coeffs, space, Y)


def simulate_ma_window(
    coeffs: MACoefficients,
    innov: InnovationSpec,
    space: BoxSpace,
    seed: int,
    innovations: Callable[..., np.ndarray] | None = None,
) -> ProcessWindow:
    """Simulate ``X_t = sum_s c_s Y_{t-s}`` on a box window.

    ``innovations`` is a test hook: a callable receiving the coordinate
    meshgrid of the enlarged window and returning the innovation values
    there, replacing the random draws.
    """
    _check_box(coeffs, space)
    if innovations is not None:
        _, grids = _innovation_grid(coeffs, space)
        Y = np.asarray(innovations(*grids), dtype=np.float64)
        values = _filter(coeffs, space, Y)
    else:
        values = simulate_ma_batch(coeffs, innov, space, [int(seed) & ((1 << 64) - 1)])[0]
    return ProcessWindow(space, values, seed, {"coefficients": coeffs.provenance, "innovation": innov.descriptor})
