"""Connection coefficients between Jacobi families.

``C[l, n]`` is the coefficient of :math:`P_l^{(a,b)}` in the expansion of
:math:`P_n^{(\\alpha,\\beta)}`, so that ``C @ u_source`` gives the
coefficients of the same polynomial in the target family.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .orthopoly import JacobiParam, _as_param, jacobi_gamma, jacobi_table
from .quadrature import jacobi_gauss

#: largest degree accepted by the explicit-formula oracle
EXPLICIT_MAX_DEGREE = 20


@dataclass(frozen=True)
class ConnectionMatrix:
    source: JacobiParam
    target: JacobiParam
    C: np.ndarray

    @property
    def N(self) -> int:
        return self.C.shape[0] - 1


@lru_cache(maxsize=32)
def _connection(N: int, source: JacobiParam, target: JacobiParam) -> np.ndarray:
    if source.isclose(target):
        C = np.eye(N + 1)
    else:
        rule = jacobi_gauss(N, target)
        Pt = jacobi_table(N, target, rule.nodes)
        Ps = jacobi_table(N, source, rule.nodes)
        C = (Pt * rule.weights[None, :]) @ Ps.T
        C /= jacobi_gamma(np.arange(N + 1), target)[:, None]
        C = np.triu(C)

    C.setflags(write=False)
    return C


def connection_matrix(N: int, source, target) -> ConnectionMatrix:
    """Upper-triangular map from *source* to *target* coefficients, degrees ``0..N``."""
    source = _as_param(source)
    target = _as_param(target)
    if N < 0:
        raise DomainError(f"N must be non-negative: {N}")

    return ConnectionMatrix(source, target, _connection(int(N), source, target))


def connection_apply(C: ConnectionMatrix, coeffs) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.shape[0] != C.C.shape[1]:
        raise DomainError(
            f"expected {C.C.shape[1]} coefficients, got {coeffs.shape[0]}"
        )
    return C.C @ coeffs


def connection_explicit(l: int, n: int, source, target) -> float:
    """Closed-form connection coefficient, summed in extended precision.

    Meant as a test oracle: the alternating sum cancels badly as *n* grows.
    """
    import mpmath

    source = _as_param(source)
    target = _as_param(target)
    if n > EXPLICIT_MAX_DEGREE:
        raise DomainError(f"explicit formula limited to n <= {EXPLICIT_MAX_DEGREE}")
    if l < 0 or n < 0:
        raise DomainError("degrees must be non-negative")
    if l > n:
        return 0.0
    if n == 0:
        return 1.0

    with mpmath.workdps(50):
        al, be = mpmath.mpf(source.alpha), mpmath.mpf(source.beta)
        a, b = mpmath.mpf(target.alpha), mpmath.mpf(target.beta)

        # (2l+a+b+1) Gamma(l+a+b+1), with the l = 0 limit taken analytically
        if l == 0:
            lead = mpmath.gamma(a + b + 2)
        else:
            lead = (2 * l + a + b + 1) * mpmath.gamma(l + a + b + 1)
        lead *= mpmath.gamma(n + al + 1) * mpmath.rgamma(n + al + be + 1)
        lead *= mpmath.rgamma(l + a + 1)

        terms = [
            (-1) ** m
            * mpmath.gamma(n + l + m + al + be + 1)
            * mpmath.gamma(m + l + a + 1)
            * mpmath.rgamma(m + 1)
            * mpmath.rgamma(n - l - m + 1)
            * mpmath.rgamma(l + m + al + 1)
            * mpmath.rgamma(m + 2 * l + a + b + 2)
            for m in range(n - l + 1)
        ]
        return float(lead * mpmath.fsum(terms))
