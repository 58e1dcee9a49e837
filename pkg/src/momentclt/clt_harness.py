"""Statistical and combinatorial checks of the CLT setting.

Monte Carlo moments of normalised window sums, Kolmogorov distance to the
Gaussian limit, exact window-restricted alpha-mixing coefficients of finite
chains, and finite-grid evidence for the growth and decay conditions.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from scipy import stats

from .errors import ArgumentError, ConfigError, SizeError
from .index_spaces import BoxSpace, SpaceFamily
from .moment_engine import (
    COMPARISON_SLACK,
    box_second_moment,
    mixing_product_bound,
    sigma2 as long_run_variance,
)
from .partitions import double_factorial
from .processes.chains import DigitProcess, MarkovChain, stationary_distribution
from .processes.innovations import InnovationSpec
from .processes.ma import MACoefficients, _check_box, _coords, _innovation_grid, simulate_ma_batch
from .rng import STREAM_INNOVATIONS, derive_seed, hash_keys

__all__ = [
    "CltReport",
    "CltRow",
    "ConditionDiagnostics",
    "MAProcess",
    "MixingLemmaReport",
    "MixingProfile",
    "alpha_bruteforce",
    "alpha_naive",
    "condition_diagnostics",
    "empirical_mixed_moment",
    "ks_critical_value",
    "ks_statistic",
    "mixing_profile",
    "run_clt_experiment",
    "verify_mixing_lemma",
]

CHUNK = 250
MAX_ASSERTED_ORDER = 6
RELATIVE_MOMENT_TOL = 0.15
SE_FACTOR = 4.0
KS_LEVEL = 0.01


@dataclass(frozen=True)
class MAProcess:
    """An MA field: coefficients plus innovation law."""

    coeffs: MACoefficients
    innov: InnovationSpec = field(default_factory=InnovationSpec)


# ---------------------------------------------------------------- statistics


def ks_statistic(samples, sigma2: float) -> float:
    """Sup distance between the empirical CDF and ``N(0, sigma2)``; the unit step at 0 when ``sigma2 == 0``."""
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size == 0:
        raise ArgumentError("samples must be nonempty")
    if sigma2 < 0:
        raise ArgumentError("sigma2 must be nonnegative")
    if sigma2 == 0:
        return max(int((x < 0).sum()), int((x > 0).sum())) / x.size
    return float(stats.kstest(x, "norm", args=(0.0, math.sqrt(sigma2))).statistic)


def ks_critical_value(R: int, level: float = KS_LEVEL) -> float:
    """Asymptotic Kolmogorov critical value for ``R`` samples."""
    return float(stats.kstwobign.isf(level) / math.sqrt(R))


def _jackknife_se(values: np.ndarray) -> float:
    # leave-one-out means in closed form
    R = values.size
    loo = (values.sum() - values) / (R - 1)
    return float(math.sqrt((R - 1) / R * np.sum((loo - loo.mean()) ** 2)))


def moment_target(k: int, sigma2: float) -> float:
    """``(k-1)!! sigma^k`` for even ``k``, zero for odd ``k``."""
    return 0.0 if k % 2 else double_factorial(k - 1) * sigma2 ** (k / 2)


# ---------------------------------------------------------------- simulation


def _ma_sum_weights(coeffs: MACoefficients, space: BoxSpace) -> np.ndarray:
    """``W(y) = sum_s c_s 1[y + s in T]`` on the innovation grid, so that ``sum_t X_t = sum_y W(y) Y_y``."""
    _, grids = _innovation_grid(coeffs, space)
    W = np.zeros(grids[0].shape)
    for s in coeffs.support:
        off = tuple(ch - v for ch, v in zip(coeffs.hi, _coords(s, coeffs.dim)))
        W[tuple(slice(o, o + m) for o, m in zip(off, space.shape))] += float(coeffs.entries[s])
    return W


def _ma_sums(proc: MAProcess, space: BoxSpace, W: np.ndarray, seeds: np.ndarray) -> np.ndarray:
    _, grids = _innovation_grid(proc.coeffs, space)
    expand = (slice(None),) + (None,) * proc.coeffs.dim
    bits = hash_keys(seeds[expand], STREAM_INNOVATIONS, *(g[None] for g in grids))
    Y = proc.innov.transform(bits)
    return (Y * W[None]).reshape(len(seeds), -1).sum(axis=1)


def _chain_sums(chain: MarkovChain, length: int, seeds: np.ndarray) -> np.ndarray:
    mean = chain.stationary_mean()
    paths = chain.values[chain.simulate_states(length, seeds)] - mean
    return paths.sum(axis=1)


def _process_sigma2(process, family: SpaceFamily, n_grid) -> float:
    if isinstance(process, MAProcess):
        return long_run_variance(process.coeffs, family, n_grid[-1:]).sigma2
    if isinstance(process, MarkovChain):
        return max(process.long_run_variance(), 0.0)
    raise ConfigError("process", f"no long-run variance available for {type(process).__name__}")


def _exact_m2(process, space) -> float | None:
    if isinstance(process, MAProcess) and isinstance(space, BoxSpace):
        return box_second_moment(process.coeffs, space)
    if isinstance(process, MarkovChain):
        P = process.transition
        pi = stationary_distribution(P)
        if not np.allclose(process.initial, pi, atol=1e-12):
            return None
        f = process.values - pi @ process.values
        n = space.size
        v = f.copy()
        total = float(pi @ (f * f)) * n
        for h in range(1, n):
            v = P @ v
            total += 2.0 * (n - h) * float(pi @ (f * v))
        return total / n
    return None


def empirical_mixed_moment(proc: MAProcess, tup: Sequence, R: int, seed: int) -> tuple[float, float]:
    """Monte Carlo ``E X_{t_1} ... X_{t_k}`` and its standard error from ``R`` independent fields."""
    dim = proc.coeffs.dim
    pts = [_coords(t, dim) for t in tup]
    lo = tuple(min(p[ax] for p in pts) for ax in range(dim))
    hi = tuple(max(p[ax] for p in pts) for ax in range(dim))
    space = BoxSpace(lo, hi)
    seeds = np.array([derive_seed(seed, r) for r in range(R)], dtype=np.uint64)
    prods = np.ones(R)
    for start in range(0, R, CHUNK):
        X = simulate_ma_batch(proc.coeffs, proc.innov, space, seeds[start:start + CHUNK])
        for p in pts:
            prods[start:start + CHUNK] *= X[(slice(None),) + tuple(v - l for v, l in zip(p, lo))]
    return float(prods.mean()), float(prods.std(ddof=1) / math.sqrt(R))


# ---------------------------------------------------------------- CLT experiment


@dataclass
class CltRow:
    n: int
    size: int
    R: int
    attempt: int
    moments: list[float]
    std_errors: list[float]
    targets: list[float]
    exact_m2: float | None
    ks: float | None
    ks_critical: float
    max_abs: float
    verdicts: dict[str, bool]

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "size": self.size,
            "R": self.R,
            "attempt": self.attempt,
            "moments": self.moments,
            "std_errors": self.std_errors,
            "targets": self.targets,
            "exact_m2": self.exact_m2,
            "ks": self.ks,
            "ks_critical": self.ks_critical,
            "max_abs": self.max_abs,
            "verdicts": self.verdicts,
            "passed": self.passed,
        }


@dataclass
class CltReport:
    """Per-n summary of a CLT Monte Carlo experiment."""

    rows: list[CltRow]
    sigma2: float
    seed: int
    k_max: int
    meta: dict[str, Any] = field(default_factory=dict)
    wall_clock: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def csv_columns(self) -> list[str]:
        ks = range(1, self.k_max + 1)
        verdict_names = list(self.rows[0].verdicts) if self.rows else []
        return (
            ["n", "size", "R", "attempt"]
            + [f"m{k}" for k in ks]
            + [f"se{k}" for k in ks]
            + [f"target{k}" for k in ks]
            + ["exact_m2", "ks", "ks_critical", "max_abs"]
            + [f"verdict_{v}" for v in verdict_names]
            + ["passed"]
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.csv_columns())
        for r in self.rows:
            w.writerow(
                [r.n, r.size, r.R, r.attempt]
                + [repr(v) for v in r.moments]
                + [repr(v) for v in r.std_errors]
                + [repr(v) for v in r.targets]
                + ["" if r.exact_m2 is None else repr(r.exact_m2), "" if r.ks is None else repr(r.ks)]
                + [repr(r.ks_critical), repr(r.max_abs)]
                + [str(v).lower() for v in r.verdicts.values()]
                + [str(r.passed).lower()]
            )
        return buf.getvalue()

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": "clt",
            "sigma2": self.sigma2,
            "seed": self.seed,
            "k_max": self.k_max,
            "passed": self.passed,
            "rows": [r.to_dict() for r in self.rows],
            "meta": self.meta,
            "wall_clock_seconds": self.wall_clock,
        }


def _replication_sums(process, space, seeds: np.ndarray, workers: int) -> np.ndarray:
    if isinstance(process, MAProcess):
        if not isinstance(space, BoxSpace):
            raise ConfigError("family", "MA simulation needs box windows")
        _check_box(process.coeffs, space)
        W = _ma_sum_weights(process.coeffs, space)
        work = lambda chunk: _ma_sums(process, space, W, chunk)  # noqa: E731
    elif isinstance(process, MarkovChain):
        if not (isinstance(space, BoxSpace) and space.dim == 1):
            raise ConfigError("family", "chains run on one-dimensional windows")
        work = lambda chunk: _chain_sums(process, space.size, chunk)  # noqa: E731
    elif isinstance(process, DigitProcess):
        raise ConfigError("process", "the digit process is not centred; no CLT experiment is defined for it")
    else:
        raise ConfigError("process", f"unsupported process {type(process).__name__}")
    chunks = [seeds[i:i + CHUNK] for i in range(0, len(seeds), CHUNK)]
    if workers <= 1:
        parts = [work(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, chunks))
    return np.concatenate(parts)


def _clt_row(process, space, n, R, k_max, sigma2, seed, attempt, workers) -> CltRow:
    seeds = np.array([derive_seed(seed, n, r, attempt) for r in range(R)], dtype=np.uint64)
    S = _replication_sums(process, space, seeds, workers) / math.sqrt(space.size)
    powers = [S**k for k in range(1, k_max + 1)]
    moments = [float(p.mean()) for p in powers]
    ses = [_jackknife_se(p) for p in powers]
    targets = [moment_target(k, sigma2) for k in range(1, k_max + 1)]
    exact_m2 = _exact_m2(process, space)
    degenerate = sigma2 == 0
    ks = None if degenerate else ks_statistic(S, sigma2)
    crit = ks_critical_value(R)
    verdicts: dict[str, bool] = {}
    if not degenerate:
        for k in range(1, min(k_max, MAX_ASSERTED_ORDER) + 1):
            m, se, tgt = moments[k - 1], ses[k - 1], targets[k - 1]
            if k % 2:
                verdicts[f"m{k}"] = abs(m) <= SE_FACTOR * se
            else:
                verdicts[f"m{k}"] = abs(m - tgt) <= max(SE_FACTOR * se, RELATIVE_MOMENT_TOL * tgt)
        verdicts["ks"] = ks <= crit
    if exact_m2 is not None and k_max >= 2:
        verdicts["m2_exact"] = abs(moments[1] - exact_m2) <= SE_FACTOR * ses[1] + COMPARISON_SLACK
    return CltRow(n, space.size, R, attempt, moments, ses, targets, exact_m2, ks, crit, float(np.abs(S).max()), verdicts)


def run_clt_experiment(
    process,
    family: SpaceFamily,
    n_grid: Sequence[int],
    R: int,
    k_max: int = 6,
    seed: int = 0,
    workers: int = 1,
    retry: bool = True,
) -> CltReport:
    """Simulate ``R`` windows per ``n`` and compare moments of ``|T_n|^{-1/2} sum X_t`` with the Gaussian limit.

    Parameters
    ----------
    process : MAProcess or MarkovChain
    retry : bool
        Rerun a failing ``n`` once with freshly derived seeds; the retry's row
        is reported with ``attempt = 1``.

    Notes
    -----
    Replication ``r`` at size ``n`` always uses the seed derived from
    ``(seed, n, r, attempt)`` and replications are processed in fixed chunks,
    so the report does not depend on ``workers``. When ``sigma^2 = 0`` the
    Kolmogorov distance is replaced by ``max |S_n|`` and the limiting moment
    targets are not asserted; the finite-n second moment still is.
    """
    if R < 100:
        raise ArgumentError(f"need at least 100 replications, got {R}")
    if not 1 <= k_max <= 8:
        raise ArgumentError(f"k_max must be in 1..8, got {k_max}")
    n_grid = [int(n) for n in n_grid]
    if not n_grid:
        raise ArgumentError("n_grid must be nonempty")
    started = time.perf_counter()
    s2 = _process_sigma2(process, family, n_grid)
    rows = []
    for n in n_grid:
        space = family.space(n)
        row = _clt_row(process, space, n, R, k_max, s2, seed, 0, workers)
        if retry and not row.passed:
            row = _clt_row(process, space, n, R, k_max, s2, seed, 1, workers)
        rows.append(row)
    meta = {"family": family.descriptor, "n_grid": n_grid, "R": R, "chunk": CHUNK}
    return CltReport(rows, s2, seed, k_max, meta, time.perf_counter() - started)


# ---------------------------------------------------------------- mixing


def _window_matrix(chain: MarkovChain, I: Sequence[int], J: Sequence[int], cap: int) -> np.ndarray:
    I, J = sorted(set(I)), sorted(set(J))
    if not I or not J:
        raise ArgumentError("index sets must be nonempty")
    if set(I) & set(J):
        raise ArgumentError("index sets must be disjoint")
    S = chain.n_states
    for name, W in (("I", I), ("J", J)):
        if S ** len(W) > cap:
            raise SizeError(f"{S}^{len(W)} outcomes on {name} exceeds the cap {cap}")
    times = sorted(I + J)
    law = chain.joint_law(times)
    pos = {t: i for i, t in enumerate(times)}
    law = np.transpose(law, [pos[t] for t in I] + [pos[t] for t in J])
    return law.reshape(S ** len(I), S ** len(J))


def alpha_bruteforce(chain: MarkovChain, I: Sequence[int], J: Sequence[int], cap: int = 12) -> float:
    """Exact ``max |P(A and B) - P(A) P(B)|`` over events ``A`` of ``X_I`` and ``B`` of ``X_J``.

    For fixed ``A`` the best ``B`` collects the outcomes ``b`` with
    ``P(A, b) > P(A) P(b)``, so only the ``2^{S^|I|}`` choices of ``A`` are
    enumerated. This is the mixing coefficient restricted to the given
    windows, hence a lower bound for the process-level ``alpha_d``.
    ``cap`` limits the number of outcomes per side.
    """
    M = _window_matrix(chain, I, J, cap)
    nI = M.shape[0]
    # subtract the product law before summing over events to avoid cancellation
    D = M - np.outer(M.sum(axis=1), M.sum(axis=0))
    masks = ((np.arange(2**nI)[:, None] >> np.arange(nI)[None, :]) & 1).astype(np.float64)
    gain = masks @ D
    return float(np.clip(gain, 0.0, None).sum(axis=1).max())


def alpha_naive(chain: MarkovChain, I: Sequence[int], J: Sequence[int], cap: int = 6) -> float:
    """Same quantity by looping over every event pair; for cross-checks on tiny windows."""
    M = _window_matrix(chain, I, J, cap)
    best = 0.0
    rows, cols = range(M.shape[0]), range(M.shape[1])
    for A in itertools.chain.from_iterable(itertools.combinations(rows, r) for r in range(len(rows) + 1)):
        pa_row = M[list(A)].sum(axis=0) if A else np.zeros(M.shape[1])
        pA = pa_row.sum()
        for B in itertools.chain.from_iterable(itertools.combinations(cols, r) for r in range(len(cols) + 1)):
            pAB = pa_row[list(B)].sum() if B else 0.0
            pB = M[:, list(B)].sum() if B else 0.0
            best = max(best, abs(pAB - pA * pB))
    return float(best)


@dataclass
class MixingProfile:
    """``d -> alpha`` for two windows of equal width separated by gap ``d``; window-restricted lower bounds."""

    alphas: dict[int, float]
    width: int
    start: int
    n_states: int
    exact: bool = True

    @property
    def nonincreasing(self) -> bool:
        vals = [self.alphas[d] for d in sorted(self.alphas)]
        return all(b <= a + COMPARISON_SLACK for a, b in zip(vals, vals[1:]))

    def to_dict(self) -> dict[str, Any]:
        return {
            "alphas": {str(d): a for d, a in sorted(self.alphas.items())},
            "width": self.width,
            "start": self.start,
            "n_states": self.n_states,
            "exact": self.exact,
            "lower_bound_only": True,
            "nonincreasing": self.nonincreasing,
        }


def mixing_profile(chain: MarkovChain, gaps: Sequence[int], width: int = 1, start: int = 1, cap: int = 12) -> MixingProfile:
    """Window-restricted alpha at each gap ``d = min J - max I``."""
    I = list(range(start, start + width))
    alphas = {}
    for d in gaps:
        if d < 1:
            raise ArgumentError("gaps must be positive")
        J = list(range(I[-1] + d, I[-1] + d + width))
        alphas[int(d)] = alpha_bruteforce(chain, I, J, cap)
    return MixingProfile(alphas, width, start, chain.n_states)


@dataclass
class MixingLemmaReport:
    windows: list[list[int]]
    lhs: float
    moment_cap: float
    alphas: list[float]
    gaps: list[int]

    @property
    def rhs(self) -> float:
        return mixing_product_bound(self.moment_cap, self.alphas)

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + COMPARISON_SLACK

    def to_dict(self) -> dict[str, Any]:
        return {
            "windows": self.windows,
            "lhs": self.lhs,
            "moment_cap": self.moment_cap,
            "alphas": self.alphas,
            "gaps": self.gaps,
            "rhs": self.rhs,
            "holds": self.holds,
        }


def verify_mixing_lemma(
    chain: MarkovChain,
    windows: Sequence[Sequence[int]],
    functions: Sequence[Callable[[np.ndarray], np.ndarray]] | None = None,
    cap: int = 12,
) -> MixingLemmaReport:
    """Compare ``|E Y_1...Y_k - prod E Y_l|`` with ``24 M sum sqrt(alpha_l)`` exactly.

    ``Y_l = functions[l](states on window l)``; each function receives an
    integer array whose last axis runs over the window's time points. The
    default is the sum of the chain's values over the window. ``alpha_l`` is
    computed between the union of windows ``1..l`` and the union of windows
    ``l+1..k``, which dominates the coefficient the bound needs, and
    ``M = max(1, max_l E|Y_l|^{4(k-1)})``.
    """
    windows = [sorted(set(int(t) for t in w)) for w in windows]
    k = len(windows)
    if k < 2:
        raise ArgumentError("need at least two windows")
    for a, b in zip(windows, windows[1:]):
        if not a or not b or a[-1] >= b[0]:
            raise ArgumentError("windows must be nonempty and ordered I_1 < I_2 < ...")
    if functions is None:
        functions = [lambda s: chain.values[s].sum(axis=-1)] * k
    if len(functions) != k:
        raise ArgumentError("need one function per window")
    times = [t for w in windows for t in w]
    S = chain.n_states
    if S ** len(times) > 4**8:
        raise SizeError(f"joint law over {len(times)} times exceeds the enumeration cap")
    law = chain.joint_law(times).ravel()
    states = np.array(list(itertools.product(range(S), repeat=len(times))), dtype=np.int64)
    Ys, offset = [], 0
    for w, f in zip(windows, functions):
        Ys.append(np.asarray(f(states[:, offset:offset + len(w)]), dtype=np.float64))
        offset += len(w)
    lhs = abs(float(law @ np.prod(Ys, axis=0)) - math.prod(float(law @ Y) for Y in Ys))
    moment_cap = max(1.0, max(float(law @ np.abs(Y) ** (4 * (k - 1))) for Y in Ys))
    alphas, gaps = [], []
    for ell in range(1, k):
        past = [t for w in windows[:ell] for t in w]
        future = [t for w in windows[ell:] for t in w]
        alphas.append(min(1.0, alpha_bruteforce(chain, past, future, cap)))
        gaps.append(windows[ell][0] - windows[ell - 1][-1])
    return MixingLemmaReport(windows, lhs, moment_cap, alphas, gaps)


# ---------------------------------------------------------------- conditions


@dataclass
class ConditionResult:
    name: str
    verdict: str
    values: dict[str, Any]
    parameters: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "verdict": self.verdict, "values": self.values, "parameters": self.parameters}


@dataclass
class ConditionDiagnostics:
    """Finite-grid evidence per condition; ``pass`` is trend evidence, never a proof."""

    results: dict[str, ConditionResult]

    def __getitem__(self, name: str) -> ConditionResult:
        return self.results[name]

    def verdicts(self) -> dict[str, str]:
        return {k: r.verdict for k, r in self.results.items()}

    def to_dict(self) -> dict[str, Any]:
        return {"conditions": {k: r.to_dict() for k, r in self.results.items()}, "claims_proof": False}


def _top_half(grid: Sequence[int]) -> list[int]:
    return list(grid[len(grid) // 2:])


def _decay_trend(ns: Sequence[int], vals: Sequence[float]) -> bool:
    """Negative log-log slope and the later half never exceeding the earlier half."""
    vals = np.asarray(vals, dtype=np.float64)
    if len(vals) < 2:
        return False
    if np.all(vals == 0):
        return True
    if np.any(vals <= 0):
        # exact zeros after positive values count as decay
        first_zero = int(np.argmax(vals <= 0))
        return bool(np.all(vals[first_zero:] <= 0))
    slope = np.polyfit(np.log(ns), np.log(vals), 1)[0]
    half = len(vals) // 2
    return bool(slope < 0 and vals[half:].max() <= vals[:max(half, 1)].max())


def condition_diagnostics(
    family: SpaceFamily,
    gamma: Callable[[int], float],
    k_list: Sequence[int],
    ell_list: Sequence[int],
    n_grid: Sequence[int],
    process: MAProcess | None = None,
    c_grid: Sequence[float] = tuple(np.arange(0.25, 4.01, 0.25)),
    C_max: float = 10.0,
    band: float = 4.0,
) -> ConditionDiagnostics:
    """Evaluate the growth/decay conditions on a finite grid of ``n``.

    - S1: ``|T_n|^k gamma(n)`` for each ``k``, judged on the top half of the grid.
    - S2: smallest ``c`` on ``c_grid`` with ``max_{n,a} b_n(a) / |T_a|^c <= C_max``.
    - S3: ``|T_n| >= n`` and ``diam T_{n+1} >= diam T_n`` at each grid point.
    - S4: ``|T_{a_n}|^ell / |T_n|`` with ``a_n = floor(n^{1/ell})``; pass when
      max/min over the top half stays within ``band``.
    - M1-M3, when an MA ``process`` is given: mean zero, the average second
      moment and the bounds ``M_k``.
    """
    n_grid = sorted(int(n) for n in n_grid)
    if not n_grid or not k_list or not ell_list:
        raise ArgumentError("grids must be nonempty")
    res: dict[str, ConditionResult] = {}
    top = _top_half(n_grid)

    s1_vals, s1_ok = {}, True
    for k in k_list:
        vals = [family.size(n) ** k * gamma(n) for n in n_grid]
        s1_vals[str(k)] = vals
        s1_ok &= _decay_trend(top, [family.size(n) ** k * gamma(n) for n in top])
    res["S1"] = ConditionResult("S1", "pass" if s1_ok else "indeterminate",
                                {"n": n_grid, "size_k_gamma": s1_vals}, {"k": list(k_list)})

    pairs = [(n, a) for n in n_grid for a in n_grid if a <= n]
    b = {(n, a): family.max_ball_size(n, a) for n, a in pairs}
    best = None
    for c in c_grid:
        C = max(b[n, a] / family.size(a) ** c for n, a in pairs)
        if C <= C_max:
            best = (float(c), float(C))
            break
    res["S2"] = ConditionResult("S2", "pass" if best else "indeterminate",
                                {"fit": None if best is None else {"c": best[0], "C": best[1]}},
                                {"C_max": C_max, "c_grid": [float(c) for c in c_grid]})

    sizes_ok = all(family.size(n) >= n for n in n_grid)
    diam_ok = all(family.diameter(n + 1) >= family.diameter(n) for n in n_grid)
    res["S3"] = ConditionResult("S3", "pass" if sizes_ok and diam_ok else "indeterminate",
                                {"sizes": [family.size(n) for n in n_grid],
                                 "diameters": [family.diameter(n) for n in n_grid],
                                 "size_at_least_n": sizes_ok, "diameter_monotone": diam_ok}, {})

    s4_vals, s4_ok = {}, True
    for ell in ell_list:
        a_n = [family.scaling_sequence(ell, n) for n in n_grid]
        ratios = [family.size(a) ** ell / family.size(n) for a, n in zip(a_n, n_grid)]
        tr = ratios[len(ratios) // 2:]
        lo, hi = min(tr), max(tr)
        ok = lo > 0 and hi / lo <= band
        s4_ok &= ok
        s4_vals[str(ell)] = {"a_n": a_n, "ratios": ratios, "observed_band": [lo, hi]}
    res["S4"] = ConditionResult("S4", "pass" if s4_ok else "indeterminate", s4_vals, {"band": band})

    if process is not None:
        from .moment_engine import moment_bound

        c = process.coeffs
        res["M1"] = ConditionResult("M1", "pass", {"mean": 0.0}, {})
        m2 = [float(c.power_sum(2)) for _ in n_grid]
        res["M2"] = ConditionResult("M2", "pass", {"mean_second_moment": m2}, {})
        bounds = {str(k): moment_bound(c, process.innov, k) for k in k_list}
        res["M3"] = ConditionResult("M3", "pass" if all(math.isfinite(v) for v in bounds.values()) else "indeterminate",
                                    {"M_k": bounds}, {"k": list(k_list)})
    return ConditionDiagnostics(res)


def report_json(obj) -> str:
    """Serialise a report with ``to_dict`` to JSON text."""
    return json.dumps(obj.to_dict(), indent=2, sort_keys=False)
