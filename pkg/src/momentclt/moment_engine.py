"""Exact moment calculus for finitely supported MA fields.

For ``X_t = sum_s c_s Y_{t-s}`` with independent standardised innovations,

    E X_{t_1} ... X_{t_k} = sum over kernel partitions kappa without singletons
        of  prod_{K in kappa} E Y^{|K|}  times  sum over *distinct* values
        (s^K)_K of  prod_K prod_{i in K} c_{t_i - s^K}.

The distinct-values sum is evaluated by Moebius inversion over the lattice of
partitions of the blocks of ``kappa``: merging blocks that share a value and
subtracting with the partition-lattice Moebius weights. Only sums of the form
``f(I) = sum_s prod_{i in I} c_{t_i - s}`` are needed, and those are
vectorised over the dense coefficient grid.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

import numpy as np
from scipy.signal import correlate

from .errors import ArgumentError, SizeError
from .index_spaces import BoxSpace, IndexSpace, SpaceFamily, connected_decomposition
from .partitions import Partition, PartitionClass, bell_number, enumerate_partitions
from .processes.innovations import InnovationSpec
from .processes.ma import MACoefficients

__all__ = [
    "COMPARISON_SLACK",
    "DecayCheck",
    "LongRunVariance",
    "MomentEngine",
    "MomentReport",
    "SeparationCertificate",
    "covariance",
    "decay_bound_check",
    "exact_mixed_moment",
    "gamma",
    "mixing_product_bound",
    "moment_bound",
    "separation_certificate",
    "separation_constants",
    "separation_sweep",
    "sample_tuples",
    "sigma2",
]

MAX_MOMENT_ORDER = 8
ENUMERATION_CAP = 10**7
COMPARISON_SLACK = 1e-12


def _coords(t, dim: int) -> tuple[int, ...]:
    if dim == 1 and not isinstance(t, tuple):
        return (int(t),)
    return tuple(int(v) for v in t)


def _moebius(sigma: Partition) -> int:
    return math.prod((-1) ** (len(G) - 1) * math.factorial(len(G) - 1) for G in sigma.blocks)


@dataclass
class MomentReport:
    """Exact mixed moment of a tuple with its per-kernel-partition breakdown."""

    tuple: tuple
    value: Any
    term_count: int
    breakdown: list[tuple[Partition, Any]] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "tuple": [list(t) if isinstance(t, tuple) else t for t in self.tuple],
            "value": float(self.value),
            "exact_value": str(self.value) if isinstance(self.value, Fraction) else None,
            "term_count": self.term_count,
            "breakdown": [{"kernel": kappa.to_list(), "value": float(v)} for kappa, v in self.breakdown],
        }


class MomentEngine:
    """Mixed moments of one MA field, with caches shared across queries.

    Parameters
    ----------
    coeffs : MACoefficients
    innov : InnovationSpec
    exact : bool
        Use rational arithmetic throughout. Requires an innovation law with
        rational moments; float coefficients are converted exactly.
    """

    def __init__(self, coeffs: MACoefficients, innov: InnovationSpec, exact: bool = False):
        if exact and not innov.supports_exact():
            raise ArgumentError(f"innovation law {innov.descriptor} has no exact mode")
        self.exact = exact
        self.coeffs = coeffs.exact() if exact else coeffs.as_float()
        self.innov = innov
        self.dim = coeffs.dim
        self._grid = self.coeffs.grid
        self._abs = np.abs(self._grid)
        self._ind = (self._grid != 0).astype(np.int64)
        self._cache: dict = {}
        self._values: dict = {}
        self._moments = {}

    def _m(self, order: int):
        if order not in self._moments:
            self._moments[order] = self.innov.moment(order, exact=self.exact)
        return self._moments[order]

    def product_sum(self, points: Sequence[tuple[int, ...]], which: str = "signed"):
        """``sum_s prod_i g(t_i - s)`` for ``g`` the coefficients, their modulus, or the support indicator."""
        base = min(points)
        key = (which, tuple(sorted(tuple(v - b for v, b in zip(p, base)) for p in points)))
        if key in self._cache:
            return self._cache[key]
        grid = {"signed": self._grid, "abs": self._abs, "indicator": self._ind}[which]
        lo, hi = self.coeffs.lo, self.coeffs.hi
        smin = [max(p[ax] - hi[ax] for p in points) for ax in range(self.dim)]
        smax = [min(p[ax] - lo[ax] for p in points) for ax in range(self.dim)]
        if any(a > b for a, b in zip(smin, smax)):
            val = 0 if which == "indicator" else (Fraction(0) if self.exact else 0.0)
        else:
            prod = None
            for p in points:
                sl = tuple(
                    slice(p[ax] - smax[ax] - lo[ax], p[ax] - smin[ax] - lo[ax] + 1) for ax in range(self.dim)
                )
                piece = np.flip(grid[sl])
                prod = piece if prod is None else prod * piece
            val = prod.sum()
            if which == "indicator":
                val = int(val)
            elif not self.exact:
                val = float(val)
        self._cache[key] = val
        return val

    def _injective_sum(self, kappa: Partition, pts: list[tuple[int, ...]], which: str):
        nb = len(kappa)
        total = 0
        for sigma in enumerate_partitions(nb):
            term = _moebius(sigma)
            for G in sigma.blocks:
                members = [pts[i - 1] for j in G for i in kappa.blocks[j - 1]]
                term = term * self.product_sum(members, which)
                if term == 0:
                    break
            total = total + term
        return total

    def mixed_moment(self, tup: Sequence, method: str = "moebius", cap: int = ENUMERATION_CAP) -> MomentReport:
        """``E X_{t_1} ... X_{t_k}``; see :func:`exact_mixed_moment`."""
        k = len(tup)
        if k < 1:
            raise ArgumentError("tuple must be nonempty")
        if k > MAX_MOMENT_ORDER:
            raise SizeError(f"moment order {k} exceeds the cap {MAX_MOMENT_ORDER}")
        pts = [_coords(t, self.dim) for t in tup]
        zero = Fraction(0) if self.exact else 0.0
        value = zero
        terms = 0
        breakdown = []
        if k >= 2:
            for kappa in enumerate_partitions(k, PartitionClass.MIN_BLOCK_SIZE_2):
                weight = math.prod(self._m(len(K)) for K in kappa.blocks)
                if method == "moebius":
                    inj = self._injective_sum(kappa, pts, "signed")
                    count = self._injective_sum(kappa, pts, "indicator")
                elif method == "enumerate":
                    inj, count = self._enumerate(kappa, pts, cap)
                else:
                    raise ArgumentError(f"unknown method {method!r}")
                contrib = weight * inj
                breakdown.append((kappa, contrib))
                value = value + contrib
                terms += count
        return MomentReport(tuple(tup), value, terms, breakdown)

    def _enumerate(self, kappa: Partition, pts, cap: int):
        # injective assignments of lattice values to blocks, skipping reused values
        cands = []
        for K in kappa.blocks:
            weights = {}
            for s in self.coeffs.support:
                sc = _coords(s, self.dim)
                v = tuple(a - b for a, b in zip(pts[K[0] - 1], sc))
                w = 1
                for i in K:
                    w = w * self.coeffs[tuple(a - b for a, b in zip(pts[i - 1], v)) if self.dim > 1
                                        else pts[i - 1][0] - v[0]]
                    if w == 0:
                        break
                if w != 0:
                    weights[v] = w
            cands.append(list(weights.items()))
        total = Fraction(0) if self.exact else 0.0
        count = 0
        used: set = set()

        def rec(j: int, acc):
            nonlocal total, count
            if j == len(cands):
                count += 1
                if count > cap:
                    raise SizeError(f"more than {cap} injective assignments")
                total = total + acc
                return
            for v, w in cands[j]:
                if v in used:
                    continue
                used.add(v)
                rec(j + 1, acc * w)
                used.discard(v)

        rec(0, Fraction(1) if self.exact else 1.0)
        return total, count

    def moment_value(self, tup: Sequence):
        """Cached ``E X_{t_1} ... X_{t_k}``; the key ignores order and common shifts of the points."""
        pts = sorted(_coords(t, self.dim) for t in tup)
        base = pts[0]
        key = tuple(tuple(v - b for v, b in zip(p, base)) for p in pts)
        if key not in self._values:
            self._values[key] = self.mixed_moment(pts).value
        return self._values[key]

    def covariance(self, t, t2):
        return self.product_sum([_coords(t, self.dim), _coords(t2, self.dim)])


def exact_mixed_moment(
    coeffs: MACoefficients,
    innov: InnovationSpec,
    tup: Sequence,
    exact: bool = False,
    method: str = "moebius",
    cap: int = ENUMERATION_CAP,
) -> MomentReport:
    """Exact ``E X_{t_1} ... X_{t_k}`` for ``k <= 8``.

    Kernel partitions with a singleton block contribute nothing because the
    innovations are centred, so only partitions with all blocks of size at
    least two are visited. ``method="enumerate"`` walks the injective
    assignments directly (capped at ``cap``); the default Moebius route gives
    the same per-partition values without enumeration.

    Raises
    ------
    SizeError
        If ``k > 8`` or the enumeration cap is exceeded.
    """
    return MomentEngine(coeffs, innov, exact).mixed_moment(tup, method, cap)


def covariance(coeffs: MACoefficients, t, t2) -> float:
    """``E X_t X_t' = sum_s c_{t-s} c_{t'-s}``."""
    return MomentEngine(coeffs, InnovationSpec()).covariance(t, t2)


def gamma(coeffs: MACoefficients, a: int):
    """Separation decay ``gamma(a)``: l1 mass of ``c`` with sup-norm strictly above ``a/2``."""
    if a < 0:
        raise ArgumentError("a must be nonnegative")
    return coeffs.norm_outside(a // 2)


def separation_constants(coeffs: MACoefficients, innov: InnovationSpec, k: int) -> tuple[float, Callable[[int], float]]:
    """``C_k = 2 M'_k #P(k) k^k ||c||_1^k`` and the decay function ``gamma``."""
    if not 1 <= k <= 12:
        raise ArgumentError("k must be in 1..12")
    C = 2 * innov.abs_moment(k) * bell_number(k) * k**k * float(coeffs.l1_norm()) ** k
    return C, lambda a: float(gamma(coeffs, a))


def moment_bound(coeffs: MACoefficients, innov: InnovationSpec, k: int) -> float:
    """``M_k = sum_{kappa, no singletons} prod_K M'_{|K|} sum_s |c_s|^{|K|}``, bounding ``E|X_t|^k``."""
    if not 1 <= k <= 12:
        raise ArgumentError("k must be in 1..12")
    if k == 1:
        return 0.0
    sums = {m: float(coeffs.power_sum(m)) for m in range(2, k + 1)}
    return sum(
        math.prod(innov.abs_moment(len(K)) * sums[len(K)] for K in kappa.blocks)
        for kappa in enumerate_partitions(k, PartitionClass.MIN_BLOCK_SIZE_2)
    )


@dataclass
class SeparationCertificate:
    """Computed left- and right-hand side of the moment separation inequality for one tuple."""

    tuple: tuple
    a: int
    partition: Partition
    lhs: Any
    C_k: float
    gamma_a: float
    full_moment: Any
    block_moments: list

    @property
    def rhs(self) -> float:
        return self.C_k * self.gamma_a

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + COMPARISON_SLACK

    def to_dict(self) -> dict[str, Any]:
        return {
            "tuple": [list(t) if isinstance(t, tuple) else t for t in self.tuple],
            "a": self.a,
            "partition": self.partition.to_list(),
            "lhs": float(self.lhs),
            "C_k": self.C_k,
            "gamma_a": self.gamma_a,
            "rhs": self.rhs,
            "holds": self.holds,
            "full_moment": float(self.full_moment),
            "block_moments": [float(v) for v in self.block_moments],
        }


def separation_certificate(
    coeffs: MACoefficients,
    innov: InnovationSpec,
    space: IndexSpace,
    tup: Sequence,
    a: int,
    exact: bool = False,
    engine: MomentEngine | None = None,
) -> SeparationCertificate:
    """Check ``|E X_t - prod_B E X_{t_B}| <= C_k gamma(a)`` for the a-connected split of ``tup``.

    Pass a shared ``engine`` to reuse moment caches across a sweep.
    """
    engine = engine or MomentEngine(coeffs, innov, exact)
    dec = connected_decomposition(space, tup, a)
    full = engine.moment_value(tup)
    blocks = [engine.moment_value(g) for g in dec.groups()]
    prod = math.prod(blocks) if blocks else 1
    lhs = abs(full - prod)
    C, gam = separation_constants(coeffs, innov, len(tup))
    return SeparationCertificate(tuple(tup), int(a), dec.partition, lhs, C, gam(a), full, blocks)


@dataclass
class SweepSummary:
    """Outcome of checking the separation inequality over many tuples and radii."""

    checked: int
    violations: list[SeparationCertificate]
    max_ratio: float
    tuples: int
    a_values: list[int]
    certificates: list[SeparationCertificate] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict[str, Any]:
        return {
            "checked": self.checked,
            "tuples": self.tuples,
            "a_values": self.a_values,
            "holds": self.holds,
            "max_lhs_over_rhs": self.max_ratio,
            "violations": [c.to_dict() for c in self.violations],
        }


def sample_tuples(space: IndexSpace, k_max: int, max_tuples: int, seed: int = 0) -> list[tuple]:
    """All tuples of length ``1..k_max`` over ``space``, thinned to ``max_tuples`` by a seeded draw without replacement."""
    pts = space.points
    total = sum(len(pts) ** k for k in range(1, k_max + 1))
    if total > 10**7:
        raise SizeError(f"{total} tuples exceeds the enumeration cap")
    tuples = [t for k in range(1, k_max + 1) for t in itertools.product(pts, repeat=k)]
    if len(tuples) <= max_tuples:
        return tuples
    keep = np.sort(np.random.default_rng(seed).choice(len(tuples), size=max_tuples, replace=False))
    return [tuples[i] for i in keep]


def separation_sweep(
    coeffs: MACoefficients,
    innov: InnovationSpec,
    space: IndexSpace,
    k_max: int,
    a_values: Sequence[int],
    max_tuples: int = 10**4,
    seed: int = 0,
    exact: bool = False,
    keep: bool = False,
) -> SweepSummary:
    """Run :func:`separation_certificate` for every sampled tuple and every ``a``.

    With ``keep`` every certificate is retained, not only the violations.
    """
    engine = MomentEngine(coeffs, innov, exact)
    tuples = sample_tuples(space, k_max, max_tuples, seed)
    violations, kept, checked, worst = [], [], 0, 0.0
    for tup in tuples:
        for a in a_values:
            cert = separation_certificate(coeffs, innov, space, tup, a, exact, engine)
            checked += 1
            if cert.rhs > 0:
                worst = max(worst, float(cert.lhs) / cert.rhs)
            elif cert.lhs > COMPARISON_SLACK:
                worst = math.inf
            if not cert.holds:
                violations.append(cert)
            if keep:
                kept.append(cert)
    return SweepSummary(checked, violations, worst, len(tuples), [int(a) for a in a_values], kept)


@dataclass
class DecayCheck:
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + COMPARISON_SLACK

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.holds))


def decay_bound_check(
    coeffs: MACoefficients,
    points: Sequence,
    labels: Sequence,
    a: int,
    ell: int | None = None,
    metric: Callable | None = None,
) -> DecayCheck:
    """Compare ``sum_s prod_{i in K} |c_{t_i - s}|`` with ``ell ||c||_1^{|K|-ell+1} gamma(a)^{ell-1}``.

    ``labels`` assign each point to a block of the separating partition;
    points with different labels must be more than ``a`` apart (sup-norm by
    default). ``ell`` defaults to the number of distinct labels.

    Raises
    ------
    ArgumentError
        If differently labelled points are within distance ``a``.
    """
    if len(points) != len(labels) or not points:
        raise ArgumentError("need one label per point and at least one point")
    dim = coeffs.dim
    pts = [_coords(t, dim) for t in points]
    metric = metric or (lambda s, t: max(abs(x - y) for x, y in zip(s, t)))
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if labels[i] != labels[j] and metric(pts[i], pts[j]) <= a:
                raise ArgumentError(f"points {points[i]} and {points[j]} are in different blocks but within distance {a}")
    distinct = len(set(labels))
    ell = distinct if ell is None else ell
    if not 1 <= ell <= distinct:
        raise ArgumentError(f"ell must be in 1..{distinct}")
    engine = MomentEngine(coeffs.as_float(), InnovationSpec())
    lhs = engine.product_sum(pts, "abs")
    K = len(pts)
    l1 = float(coeffs.l1_norm())
    rhs = ell * l1 ** (K - ell + 1) * float(gamma(coeffs, a)) ** (ell - 1)
    return DecayCheck(float(lhs), rhs)


def mixing_product_bound(moment_cap: float, alphas: Sequence[float]) -> float:
    """``24 M sum_l sqrt(alpha_l)`` over the ``k-1`` consecutive gaps."""
    if len(alphas) < 1:
        raise ArgumentError("need at least one gap (k >= 2)")
    if moment_cap < 1:
        raise ArgumentError(f"moment cap must be >= 1, got {moment_cap}")
    for al in alphas:
        if not 0.0 <= al <= 1.0:
            raise ArgumentError(f"alpha entries must lie in [0, 1], got {al}")
    return 24.0 * moment_cap * sum(math.sqrt(al) for al in alphas)


@dataclass
class LongRunVariance:
    """Finite-n second moments of the normalised sum and the limit ``sigma^2``."""

    partials: dict[int, float]
    sigma2: float
    extrapolated: float | None
    closed_form: bool = True
    truncation_error: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "partials": {str(n): v for n, v in self.partials.items()},
            "sigma2": self.sigma2,
            "extrapolated": self.extrapolated,
            "closed_form": self.closed_form,
            "truncation_error": self.truncation_error,
        }


def autocovariance(coeffs: MACoefficients) -> tuple[np.ndarray, tuple[int, ...]]:
    """``r(h) = sum_s c_s c_{s+h}`` on the full lag box; returns the array and the zero-lag index."""
    g = np.asarray(coeffs.as_float().grid, dtype=np.float64)
    r = correlate(g, g, mode="full", method="direct")
    return r, tuple(m - 1 for m in g.shape)


def box_second_moment(coeffs: MACoefficients, space: BoxSpace, r=None) -> float:
    """``|T|^-1 sum_{s,t in T} E X_s X_t`` on a box via lag counts ``prod_i (m_i - |h_i|)_+``."""
    if r is None:
        r = autocovariance(coeffs)
    r, zero = r
    weights = []
    for ax, m in enumerate(space.shape):
        h = np.arange(r.shape[ax]) - zero[ax]
        w = np.clip(m - np.abs(h), 0, None).astype(np.float64) / m
        weights.append(w)
    out = r
    for ax in reversed(range(r.ndim)):
        out = out @ weights[ax] if ax == r.ndim - 1 else np.tensordot(out, weights[ax], axes=([ax], [0]))
    return float(out)


def sigma2(coeffs: MACoefficients, family: SpaceFamily, n_grid: Sequence[int]) -> LongRunVariance:
    """Long-run variance ``sigma^2 = (sum_s c_s)^2`` with finite-n partial values.

    Partial values are the exact second moments of ``|T_n|^{-1/2} sum X_t``.
    The extrapolation assumes an error proportional to the inverse box side
    and uses the last two grid points.
    """
    n_grid = list(n_grid)
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ArgumentError("n_grid must be strictly increasing")
    r = autocovariance(coeffs)
    partials = {}
    sides = {}
    for n in n_grid:
        sp = family.space(n)
        if isinstance(sp, BoxSpace):
            partials[n] = box_second_moment(coeffs, sp, r)
            sides[n] = max(sp.shape)
        else:
            eng = MomentEngine(coeffs.as_float(), InnovationSpec())
            pts = sp.points
            partials[n] = sum(eng.covariance(s, t) for s in pts for t in pts) / len(pts)
    extrap = None
    if len(n_grid) >= 2 and n_grid[-1] in sides and n_grid[-2] in sides:
        m1, m2 = sides[n_grid[-2]], sides[n_grid[-1]]
        if m2 != m1:
            extrap = (m2 * partials[n_grid[-1]] - m1 * partials[n_grid[-2]]) / (m2 - m1)
    total = float(coeffs.total())
    return LongRunVariance(partials, total * total, extrap, True, coeffs.truncation_error)
