"""Standardised innovation laws (mean 0, variance 1, all moments finite)."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import ndtri

from ..errors import ArgumentError
from ..partitions import double_factorial
from ..rng import uniforms

__all__ = ["Distribution", "InnovationSpec"]


class Distribution(enum.Enum):
    RADEMACHER = "rademacher"
    CENTERED_UNIFORM = "centered_uniform"
    GAUSSIAN = "gaussian"
    CENTERED_TWO_POINT = "centered_two_point"


@dataclass(frozen=True)
class InnovationSpec:
    """An innovation distribution with closed-form moments.

    ``CENTERED_UNIFORM`` is uniform on ``[-sqrt(3), sqrt(3)]``;
    ``CENTERED_TWO_POINT`` puts mass ``p`` on ``sqrt((1-p)/p)`` and ``1-p`` on
    ``-sqrt(p/(1-p))``. Heavy-tailed laws are deliberately absent.
    """

    distribution: Distribution = Distribution.RADEMACHER
    p: float = 0.5

    def __post_init__(self):
        if isinstance(self.distribution, str):
            object.__setattr__(self, "distribution", Distribution(self.distribution))
        if self.distribution is Distribution.CENTERED_TWO_POINT and not 0.0 < self.p < 1.0:
            raise ArgumentError(f"two-point parameter p must lie in (0, 1), got {self.p}")

    @classmethod
    def from_descriptor(cls, desc) -> "InnovationSpec":
        if isinstance(desc, str):
            return cls(Distribution(desc))
        return cls(Distribution(desc["distribution"]), float(desc.get("p", 0.5)))

    @property
    def descriptor(self) -> dict:
        out = {"distribution": self.distribution.value}
        if self.distribution is Distribution.CENTERED_TWO_POINT:
            out["p"] = self.p
        return out

    def _two_point(self) -> tuple[float, float]:
        p = self.p
        return math.sqrt((1 - p) / p), math.sqrt(p / (1 - p))

    def supports_exact(self) -> bool:
        """Whether signed moments are rational, enabling exact arithmetic."""
        return self.distribution is not Distribution.CENTERED_TWO_POINT or self.p == 0.5

    def moment(self, m: int, exact: bool = False):
        """Signed moment ``E Y^m``; a :class:`~fractions.Fraction` when ``exact``."""
        if m < 0:
            raise ArgumentError("moment order must be nonnegative")
        dist = self.distribution
        if exact and not self.supports_exact():
            raise ArgumentError(f"{dist.value} with p={self.p} has irrational moments")
        if m == 0:
            return Fraction(1) if exact else 1.0
        if dist is Distribution.CENTERED_TWO_POINT and self.p != 0.5:
            a, b = self._two_point()
            return self.p * a**m + (1 - self.p) * (-b) ** m
        if m % 2:
            return Fraction(0) if exact else 0.0
        if dist in (Distribution.RADEMACHER, Distribution.CENTERED_TWO_POINT):
            val = Fraction(1)
        elif dist is Distribution.CENTERED_UNIFORM:
            val = Fraction(3 ** (m // 2), m + 1)
        else:
            val = Fraction(double_factorial(m - 1))
        return val if exact else float(val)

    def abs_moment(self, m: int) -> float:
        """``E |Y|^m``; used as the moment bound ``M'_m``."""
        if m < 0:
            raise ArgumentError("moment order must be nonnegative")
        dist = self.distribution
        if m == 0:
            return 1.0
        if dist is Distribution.RADEMACHER:
            return 1.0
        if dist is Distribution.CENTERED_UNIFORM:
            return 3 ** (m / 2) / (m + 1)
        if dist is Distribution.GAUSSIAN:
            return 2 ** (m / 2) * math.gamma((m + 1) / 2) / math.sqrt(math.pi)
        a, b = self._two_point()
        return self.p * a**m + (1 - self.p) * b**m

    def transform(self, bits: np.ndarray) -> np.ndarray:
        """Map uint64 hashes to innovation draws."""
        dist = self.distribution
        if dist is Distribution.RADEMACHER:
            return np.where(bits >> np.uint64(63), 1.0, -1.0)
        u = uniforms(bits)
        if dist is Distribution.CENTERED_UNIFORM:
            return math.sqrt(3.0) * (2.0 * u - 1.0)
        if dist is Distribution.GAUSSIAN:
            return ndtri(u)
        a, b = self._two_point()
        return np.where(u < self.p, a, -b)
