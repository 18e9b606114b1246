"""Hermite polynomials in the normalization H_n = He_n / n!.

With this normalization H_0 = 1, H_1(x) = x, H_2(x) = (x^2 - 1) / 2 and
(n + 1) H_{n+1}(x) = x H_n(x) - H_{n-1}(x).
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import hermite_e

# degrees above this are evaluated by recurrence only
TABLE_MAX_DEGREE = 20


def hermite(n: int, x: float | np.ndarray) -> float | np.ndarray:
    """Evaluate H_n at x (scalar or array)."""
    if n < 0:
        raise ValueError(f"Hermite degree must be non-negative, got {n}")
    unit = np.zeros(n + 1)
    unit[n] = 1.0
    value = hermite_e.hermeval(x, unit) / math.factorial(n)
    return float(value) if np.ndim(value) == 0 else value


def probabilists_table(x: np.ndarray, degree: int) -> np.ndarray:
    """He_0(x), ..., He_degree(x) stacked along a new last axis."""
    return hermite_e.hermevander(np.asarray(x, dtype=float), degree)


@dataclass(frozen=True)
class HermiteTable:
    """Monomial coefficients of H_0..H_max_degree, row n holding H_n."""

    max_degree: int
    coefficients: np.ndarray

    @classmethod
    def build(cls, max_degree: int = TABLE_MAX_DEGREE) -> "HermiteTable":
        rows = np.zeros((max_degree + 1, max_degree + 1))
        for n in range(max_degree + 1):
            unit = np.zeros(n + 1)
            unit[n] = 1.0
            rows[n, : n + 1] = hermite_e.herme2poly(unit) / math.factorial(n)
        return cls(max_degree, rows)

    def evaluate(self, n: int, x: float | np.ndarray) -> float | np.ndarray:
        if n > self.max_degree:
            return hermite(n, x)
        value = np.polynomial.polynomial.polyval(x, self.coefficients[n])
        return float(value) if np.ndim(value) == 0 else value

    def recurrence_residual(self) -> float:
        """Largest coefficient error in (n+1) H_{n+1} = x H_n - H_{n-1}."""
        worst = 0.0
        c = self.coefficients
        for n in range(1, self.max_degree):
            x_hn = np.concatenate(([0.0], c[n, :-1]))
            residual = (n + 1) * c[n + 1] - x_hn + c[n - 1]
            worst = max(worst, float(np.max(np.abs(residual))))
        return worst
