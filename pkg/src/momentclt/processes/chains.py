"""Finite-state Markov chains and the decimal-digit process.

Chains expose their exact finite-dimensional laws, which the mixing tools
enumerate. Time indices start at 1; ``X_1`` has the initial distribution.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..errors import ArgumentError, ModelError, SizeError
from ..rng import STREAM_CHAIN, STREAM_DIGITS, hash_keys, uniforms

__all__ = [
    "DigitProcess",
    "MarkovChain",
    "digit_event_covariance",
    "make_digit_process",
    "make_markov_chain",
    "nonmixing_witness",
]

MAX_STATES = 16
ROW_SUM_TOL = 1e-12
DIGIT_DEPTH = 17


def stationary_distribution(P: np.ndarray) -> np.ndarray:
    """Solution of ``pi P = pi``, ``sum pi = 1``.

    Irreducible chains use the principal minors of ``I - P`` (weights of
    spanning in-trees), which avoids the rounding of a least-squares solve on
    small chains. Reducible chains, where every minor vanishes, get the
    minimum-norm solution (uniform over a block of frozen states, for instance).
    """
    S = len(P)
    L = np.eye(S) - P
    keep = [np.delete(np.arange(S), i) for i in range(S)]
    w = np.array([np.linalg.det(L[np.ix_(k, k)]) if S > 1 else 1.0 for k in keep])
    if np.all(w > 1e-12):
        return w / w.sum()
    M = np.vstack([P.T - np.eye(S), np.ones((1, S))])
    rhs = np.zeros(S + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


@dataclass
class MarkovChain:
    """A time-homogeneous chain on states ``0..S-1``.

    ``values`` maps states to the real observable ``X_t = values[state_t]``.
    """

    transition: np.ndarray
    initial: np.ndarray
    values: np.ndarray
    seed: int = 0

    def __post_init__(self):
        self.transition = np.asarray(self.transition, dtype=np.float64)
        self.initial = np.asarray(self.initial, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)

    @property
    def n_states(self) -> int:
        return len(self.transition)

    def marginal(self, t: int) -> np.ndarray:
        """Distribution of the state at time ``t >= 1``."""
        return self.initial @ np.linalg.matrix_power(self.transition, t - 1)

    def joint_law(self, times: Sequence[int]) -> np.ndarray:
        """Exact law of ``(state_{t_1}, ..., state_{t_m})`` as an ``S^m`` array.

        ``times`` must be strictly increasing.
        """
        times = list(times)
        if not times or any(b <= a for a, b in zip(times, times[1:])) or times[0] < 1:
            raise ArgumentError(f"times must be strictly increasing positive integers, got {times}")
        law = self.marginal(times[0])
        for a, b in zip(times, times[1:]):
            step = np.linalg.matrix_power(self.transition, b - a)
            law = law[..., None] * step.reshape((1,) * (law.ndim - 1) + step.shape)
        return law

    def stationary_mean(self) -> float:
        return float(stationary_distribution(self.transition) @ self.values)

    def long_run_variance(self) -> float:
        """``sum_h Cov(X_0, X_h)`` under the stationary law, via the fundamental matrix."""
        P = self.transition
        pi = stationary_distribution(P)
        f = self.values - pi @ self.values
        Z = np.linalg.inv(np.eye(len(P)) - P + np.outer(np.ones(len(P)), pi))
        return float(2 * pi @ (f * (Z @ f)) - pi @ (f * f))

    def simulate_states(self, length: int, seeds) -> np.ndarray:
        """State paths of ``length`` steps, one row per seed."""
        seeds = np.atleast_1d(np.asarray(seeds, dtype=np.uint64))
        t = np.arange(1, length + 1, dtype=np.int64)
        u = uniforms(hash_keys(seeds[:, None], STREAM_CHAIN, t[None, :]))
        cum_init = np.cumsum(self.initial)
        cum_rows = np.cumsum(self.transition, axis=1)
        out = np.empty((len(seeds), length), dtype=np.int64)
        out[:, 0] = np.minimum(np.searchsorted(cum_init, u[:, 0], side="right"), self.n_states - 1)
        for i in range(1, length):
            rows = cum_rows[out[:, i - 1]]
            out[:, i] = np.minimum((rows <= u[:, i, None]).sum(axis=1), self.n_states - 1)
        return out

    def simulate(self, length: int, seed: int | None = None) -> np.ndarray:
        """Observable path ``X_1..X_length``."""
        s = self.seed if seed is None else seed
        return self.values[self.simulate_states(length, [int(s) & ((1 << 64) - 1)])[0]]


def make_markov_chain(
    transition,
    stationary_init: bool = True,
    seed: int = 0,
    values=None,
    initial=None,
) -> MarkovChain:
    """Validate a row-stochastic matrix and build a chain handle.

    With ``stationary_init`` the chain starts in its stationary law;
    otherwise in ``initial`` (default: state 0).

    Raises
    ------
    ModelError
        If the matrix is not square row-stochastic within ``1e-12``.
    SizeError
        If there are more than 16 states.
    """
    P = np.asarray(transition, dtype=np.float64)
    if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] == 0:
        raise ModelError(f"transition matrix must be square, got shape {P.shape}")
    if len(P) > MAX_STATES:
        raise SizeError(f"{len(P)} states exceeds the cap {MAX_STATES}")
    if np.any(P < 0) or np.any(np.abs(P.sum(axis=1) - 1.0) > ROW_SUM_TOL):
        raise ModelError("transition matrix is not row-stochastic")
    S = len(P)
    if stationary_init:
        init = stationary_distribution(P)
    elif initial is not None:
        init = np.asarray(initial, dtype=np.float64)
        if init.shape != (S,) or np.any(init < 0) or abs(init.sum() - 1.0) > ROW_SUM_TOL:
            raise ModelError("initial distribution is not a probability vector")
    else:
        init = np.eye(S)[0]
    vals = np.arange(S, dtype=np.float64) if values is None else np.asarray(values, dtype=np.float64)
    if vals.shape != (S,):
        raise ArgumentError(f"need one value per state, got {vals.shape}")
    return MarkovChain(P, init, vals, seed)


@dataclass
class DigitProcess:
    """``X_n = sum_{k<depth} base^(-k) Y_{n+k}`` with i.i.d. uniform digits ``Y``.

    ``X_n`` is the number with digit expansion ``Y_n . Y_{n+1} Y_{n+2} ...``,
    truncated after ``depth`` digits.
    """

    seed: int = 0
    base: int = 10
    depth: int = DIGIT_DEPTH
    meta: dict = field(default_factory=dict)

    def digits(self, start: int, stop: int) -> np.ndarray:
        """``Y_start, ..., Y_{stop-1}``."""
        k = np.arange(start, stop, dtype=np.int64)
        u = uniforms(hash_keys(int(self.seed) & ((1 << 64) - 1), STREAM_DIGITS, k))
        return np.minimum((u * self.base).astype(np.int64), self.base - 1)

    def simulate(self, length: int, start: int = 0) -> np.ndarray:
        """``X_start, ..., X_{start+length-1}``."""
        Y = self.digits(start, start + length + self.depth - 1).astype(np.float64)
        weights = float(self.base) ** -np.arange(self.depth)
        windows = np.lib.stride_tricks.sliding_window_view(Y, self.depth)
        return windows[:length] @ weights

    def exact_value(self, n: int) -> Fraction:
        Y = self.digits(n, n + self.depth)
        return sum((Fraction(int(y), self.base**k) for k, y in enumerate(Y)), Fraction(0))

    def decimal_digit(self, n: int, place: int) -> int:
        """The ``place``-th digit after the point of ``X_n``, computed exactly."""
        if not 1 <= place < self.depth:
            raise ArgumentError(f"place must be in 1..{self.depth - 1}")
        x = self.exact_value(n)
        return int(x * self.base**place) % self.base


def make_digit_process(seed: int = 0, base: int = 10, depth: int = DIGIT_DEPTH) -> DigitProcess:
    if base < 2:
        raise ModelError("digit base must be at least 2")
    if not 1 <= depth <= DIGIT_DEPTH:
        raise ArgumentError(f"depth must be in 1..{DIGIT_DEPTH}")
    return DigitProcess(seed, base, depth)


def digit_event_covariance(base: int, event_a: tuple[int, set], event_b: tuple[int, set]) -> Fraction:
    """``P(A and B) - P(A) P(B)`` for events on i.i.d. uniform digits, exactly.

    Each event is ``(position, accepted digit values)``, i.e. ``{Y_pos in values}``.
    """
    positions = sorted({event_a[0], event_b[0]})
    total = Fraction(0)
    pa = pb = Fraction(0)
    w = Fraction(1, base ** len(positions))
    for ys in itertools.product(range(base), repeat=len(positions)):
        y = dict(zip(positions, ys))
        in_a = y[event_a[0]] in event_a[1]
        in_b = y[event_b[0]] in event_b[1]
        pa += w * in_a
        pb += w * in_b
        total += w * (in_a and in_b)
    return total - pa * pb


def nonmixing_witness(k: int = 1, d: int = 1, base: int = 10, digit: int = 5) -> Fraction:
    """Covariance of two events that pin the same digit, for any gap ``d``.

    ``A`` asks the ``(k+d+1)``-th digit after the point of ``X_0`` to equal
    ``digit``; ``B`` asks the first digit after the point of ``X_{k+d}`` to
    equal ``digit``. Both are the event ``{Y_{k+d+1} = digit}``, so the
    covariance is ``1/base - 1/base^2`` regardless of the gap.
    """
    if k < 1 or d < 1:
        raise ArgumentError("k and d must be positive")
    pos_a = 0 + (k + d + 1)
    pos_b = (k + d) + 1
    return digit_event_covariance(base, (pos_a, {digit}), (pos_b, {digit}))
