"""ARMA(p, q) models: common-root reduction and MA expansion.

The recursion is ``X_t + sum_j a_j X_{t-j} = Y_t + sum_j b_j Y_{t-j}`` with
lag polynomials ``A(z) = 1 + sum a_j z^j`` and ``B(z) = 1 + sum b_j z^j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from ..errors import ArgumentError, ExistenceError, ModelError, NumericalError
from .ma import MACoefficients

__all__ = ["ArmaModel", "arma_reduce", "arma_to_ma", "cluster_roots", "polynomial_roots"]

MAX_ORDER = 12
CLUSTER_TOL = 1e-4
IMAG_NOISE = 1e-10


@dataclass(frozen=True)
class ArmaModel:
    """ARMA coefficients ``(a_1..a_p)`` and ``(b_1..b_q)``.

    ``common_roots`` lists the roots cancelled by :func:`arma_reduce`; it is
    empty for unreduced models.
    """

    a_coeffs: tuple[float, ...] = ()
    b_coeffs: tuple[float, ...] = ()
    reduced: bool = False
    common_roots: tuple[complex, ...] = ()

    def __post_init__(self):
        a = _trim(self.a_coeffs)
        b = _trim(self.b_coeffs)
        if len(a) > MAX_ORDER or len(b) > MAX_ORDER:
            raise ArgumentError(f"orders p, q must not exceed {MAX_ORDER}")
        if not all(math.isfinite(v) for v in a + b):
            raise ModelError("ARMA coefficients must be finite")
        object.__setattr__(self, "a_coeffs", a)
        object.__setattr__(self, "b_coeffs", b)

    @property
    def A(self) -> np.ndarray:
        """Ascending coefficients of ``A`` (leading 1)."""
        return np.array((1.0,) + self.a_coeffs)

    @property
    def B(self) -> np.ndarray:
        return np.array((1.0,) + self.b_coeffs)

    @property
    def p(self) -> int:
        return len(self.a_coeffs)

    @property
    def q(self) -> int:
        return len(self.b_coeffs)

    def roots_A(self) -> list[tuple[complex, int]]:
        return cluster_roots(polynomial_roots(self.A))

    def roots_B(self) -> list[tuple[complex, int]]:
        return cluster_roots(polynomial_roots(self.B))

    @property
    def descriptor(self) -> dict:
        return {"kind": "arma", "a": list(self.a_coeffs), "b": list(self.b_coeffs)}


def _trim(coeffs) -> tuple[float, ...]:
    c = [float(v) for v in coeffs]
    while c and c[-1] == 0.0:
        c.pop()
    return tuple(c)


def polynomial_roots(coeffs_ascending) -> np.ndarray:
    """Roots via companion-matrix eigenvalues, each refined by one Newton step."""
    c = np.trim_zeros(np.asarray(coeffs_ascending, dtype=np.float64), "b")
    if len(c) <= 1:
        return np.zeros(0, dtype=complex)
    roots = np.roots(c[::-1]).astype(complex)
    dc = P.polyder(c)
    out = []
    for z in roots:
        d = P.polyval(z, dc)
        if d != 0:
            z2 = z - P.polyval(z, c) / d
            if abs(P.polyval(z2, c)) <= abs(P.polyval(z, c)):
                z = z2
        out.append(z)
    return np.array(out)


def cluster_roots(roots, tol: float = CLUSTER_TOL) -> list[tuple[complex, int]]:
    """Group numerically repeated roots; returns ``(mean root, multiplicity)`` pairs."""
    remaining = list(roots)
    out = []
    while remaining:
        z = remaining.pop(0)
        group = [z]
        keep = []
        for w in remaining:
            if abs(w - z) <= tol * max(1.0, abs(z)):
                group.append(w)
            else:
                keep.append(w)
        remaining = keep
        out.append((complex(np.mean(group)), len(group)))
    return out


def _from_roots(roots: list[complex]) -> np.ndarray:
    """Real ascending coefficients of ``prod (1 - z/r)``."""
    poly = np.array([1.0 + 0j])
    for r in roots:
        poly = P.polymul(poly, [1.0, -1.0 / r])
    scale = max(1.0, float(np.max(np.abs(poly))))
    if np.max(np.abs(poly.imag)) > 1e-8 * scale:
        raise NumericalError("reduced polynomial has non-real coefficients; roots are not conjugate-closed")
    return poly.real


def arma_reduce(model: ArmaModel, root_tol: float = 1e-6) -> ArmaModel:
    """Cancel linear factors belonging to common roots of ``A`` and ``B``.

    Returns a model whose ``A`` is the reduced polynomial ``A_0`` with
    ``A_0(0) = 1``. The same factors are cancelled from ``B`` so that the
    transfer function ``B/A`` is unchanged. Without common roots the
    coefficients are returned untouched.
    """
    if root_tol <= 0:
        raise ArgumentError("root_tol must be positive")
    ra = list(polynomial_roots(model.A))
    rb = list(polynomial_roots(model.B))
    if any(abs(z) < 1e-300 for z in ra):
        raise ModelError("A has a root at 0; cannot normalise A_0(0) = 1")
    common = []
    for zb in list(rb):
        if not ra:
            break
        dist = [abs(za - zb) for za in ra]
        j = int(np.argmin(dist))
        if dist[j] <= root_tol * max(1.0, abs(zb)):
            common.append(ra.pop(j))
            rb.remove(zb)
    if not common:
        return ArmaModel(model.a_coeffs, model.b_coeffs, True, ())
    a0 = _from_roots(ra)
    b0 = _from_roots(rb)
    return ArmaModel(tuple(a0[1:]), tuple(b0[1:]), True, tuple(complex(z) for z in common))


def _partial_fractions(B: np.ndarray, A: np.ndarray, roots: list[tuple[complex, int]]):
    """Residues ``R[j][mu-1]`` and polynomial part ``Q`` of ``B/A``.

    ``B/A = Q + sum_j sum_mu R_{j,mu} / (1 - z/r_j)^mu``, found by matching
    polynomial coefficients in a square linear system.
    """
    p0 = len(A) - 1
    q0 = len(B) - 1
    npoly = max(0, q0 - p0 + 1)
    N = max(q0 + 1, p0)
    cols = []
    for j, (r, m) in enumerate(roots):
        for mu in range(1, m + 1):
            basis = np.array([1.0 + 0j])
            for i, (ri, mi) in enumerate(roots):
                power = mi - mu if i == j else mi
                for _ in range(power):
                    basis = P.polymul(basis, [1.0, -1.0 / ri])
            cols.append(basis)
    for i in range(npoly):
        cols.append(P.polymul(np.eye(1, i + 1, i)[0], A).astype(complex))
    M = np.zeros((N, len(cols)), dtype=complex)
    for c, col in enumerate(cols):
        M[: len(col), c] = col
    rhs = np.zeros(N, dtype=complex)
    rhs[: len(B)] = B
    sol = np.linalg.solve(M, rhs)
    residues = []
    pos = 0
    for _, m in roots:
        residues.append(sol[pos: pos + m])
        pos += m
    return residues, sol[pos:]


def _tail_length(terms, tol: float, ratio) -> int:
    """Smallest N whose envelope tail ``sum_{n>N} E(n)`` is certified ``<= tol``.

    ``terms`` yields the envelope value ``E(n)``; ``ratio(n)`` bounds
    ``E(n+1)/E(n)`` for all later n once it is below one.
    """
    n = 0
    while True:
        q = ratio(n + 1)
        if q < 1 and terms(n + 1) / (1 - q) <= tol:
            return n
        n += 1


def arma_to_ma(model: ArmaModel, tol: float = 1e-12, unit_circle_tol: float = 1e-8) -> MACoefficients:
    """MA coefficients ``c_j`` with ``X_t = sum_j c_j Y_{t-j}``.

    Roots of ``A_0`` outside the unit disc contribute causal terms
    (``j >= 0``), roots inside contribute anticausal terms (``j < 0``).
    Repeated roots use binomially weighted geometric series.

    Raises
    ------
    ExistenceError
        If ``A_0`` has a root with ``||z| - 1| < unit_circle_tol``: no
        stationary solution exists.
    NumericalError
        If imaginary parts above ``1e-10`` survive the expansion.
    """
    if not tol > 0:
        raise ArgumentError("tol must be positive")
    m = model if model.reduced else arma_reduce(model)
    A, B = m.A, m.B
    desc = {"kind": "arma", "a": list(model.a_coeffs), "b": list(model.b_coeffs)}
    if len(A) == 1:
        entries = {j: float(v) for j, v in enumerate(B)}
        return MACoefficients(entries, 1, desc, lambda a: 0.0, 0.0)
    roots = cluster_roots(polynomial_roots(A))
    for r, _ in roots:
        if abs(abs(r) - 1.0) < unit_circle_tol:
            raise ExistenceError(
                f"reduced AR polynomial has root {r:.6g} with |z| = {abs(r):.12g}; "
                "no solution exists when A_0 has a root on the unit circle"
            )
    residues, Q = _partial_fractions(B, A, roots)
    causal = [(r, R) for (r, _), R in zip(roots, residues) if abs(r) > 1]
    anti = [(r, R) for (r, _), R in zip(roots, residues) if abs(r) < 1]
    share = tol / 2 if (causal and anti) else tol

    def env_causal(n: int) -> float:
        return sum(abs(R[mu - 1]) * math.comb(n + mu - 1, mu - 1) * abs(r) ** (-n)
                   for r, R in causal for mu in range(1, len(R) + 1))

    def ratio_causal(n: int) -> float:
        return max((n + len(R)) / (n + 1) / abs(r) for r, R in causal)

    def env_anti(k: int) -> float:
        return sum(abs(R[mu - 1]) * math.comb(k - 1, mu - 1) * abs(r) ** k
                   for r, R in anti for mu in range(1, len(R) + 1))

    def ratio_anti(k: int) -> float:
        if any(k < len(R) for _, R in anti):
            return math.inf
        return max(k / (k - len(R) + 1) * abs(r) for r, R in anti)

    n_causal = _tail_length(env_causal, share, ratio_causal) if causal else -1
    n_anti = _tail_length(env_anti, share, ratio_anti) if anti else 0
    n_causal = max(n_causal, len(Q) - 1)

    coef = {}
    n = np.arange(n_causal + 1)
    total = np.zeros(n_causal + 1, dtype=complex)
    total[: len(Q)] += Q
    for r, R in causal:
        base = np.power(1.0 / r, n)
        for mu in range(1, len(R) + 1):
            binom = np.array([math.comb(int(v) + mu - 1, mu - 1) for v in n], dtype=float)
            total += R[mu - 1] * binom * base
    for j, v in enumerate(total):
        coef[j] = v
    if anti:
        k = np.arange(1, n_anti + 1)
        tot = np.zeros(n_anti, dtype=complex)
        for r, R in anti:
            for mu in range(1, len(R) + 1):
                # coefficient of z^(-k) in 1/(1 - z/r)^mu is (-r)^mu C(k-1, mu-1) r^(k-mu)
                binom = np.array([math.comb(int(v) - 1, mu - 1) for v in k], dtype=float)
                tot += R[mu - 1] * (-1) ** mu * binom * np.power(r, k.astype(float))
        for kk, v in zip(k, tot):
            coef[-int(kk)] = v
    vals = np.array(list(coef.values()))
    scale = max(1.0, float(np.max(np.abs(vals))))
    if np.max(np.abs(vals.imag)) > IMAG_NOISE * scale:
        raise NumericalError(f"residual imaginary part {np.max(np.abs(vals.imag)):.3g} above noise floor")
    entries = {j: float(v.real) for j, v in coef.items()}

    def tail_bound(a: int) -> float:
        out = 0.0
        if causal:
            q = ratio_causal(a + 1)
            out += env_causal(a + 1) / (1 - q) if q < 1 else math.inf
        if anti:
            q = ratio_anti(a + 1)
            out += env_anti(a + 1) / (1 - q) if q < 1 else math.inf
        return out

    err = 0.0
    if causal:
        err += env_causal(n_causal + 1) / (1 - ratio_causal(n_causal + 1))
    if anti:
        err += env_anti(n_anti + 1) / (1 - ratio_anti(n_anti + 1))
    return MACoefficients(entries, 1, desc, tail_bound, err)
