"""Jacobi-Gauss and Jacobi-Gauss-Lobatto rules and Lagrange coefficients."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DomainError, NumericError
from .orthopoly import (
    JacobiParam,
    _as_param,
    jacobi_gamma,
    jacobi_gamma_tilde,
    jacobi_recurrence,
    jacobi_table,
)

GAUSS = "gauss"
LOBATTO = "lobatto"

NEWTON_TOL = 1.0e-15
NEWTON_MAXIT = 10


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class QuadratureRule:
    params: JacobiParam
    nodes: np.ndarray
    weights: np.ndarray
    flavor: str

    @property
    def N(self) -> int:
        """Index of the last node (the rule has ``N + 1`` nodes)."""
        return self.nodes.size - 1

    def integrate(self, f) -> float:
        """Apply the rule to a callable or to an array of nodal values."""
        values = f(self.nodes) if callable(f) else np.asarray(f)
        return float(self.weights @ values)


@dataclass(frozen=True)
class LagrangeCoeffs:
    """Jacobi expansion coefficients of the Lagrange basis of a Lobatto rule.

    Column ``j`` of ``t`` holds the coefficients of :math:`h_j`.
    """

    rule: QuadratureRule
    t: np.ndarray


# {{{ Gauss


def _newton_refine(x: np.ndarray, n: int, p: JacobiParam) -> np.ndarray:
    """Polish the zeros of :math:`P_n^{(\\alpha,\\beta)}` near *x*."""
    x = x.copy()
    dp = p.shifted(1.0, 1.0)
    scale = 0.5 * (n + p.alpha + p.beta + 1.0)

    # bracket each zero by the midpoints to its neighbors
    mid = 0.5 * (x[1:] + x[:-1])
    lo = np.concatenate([[-1.0], mid])
    hi = np.concatenate([mid, [1.0]])

    for _ in range(NEWTON_MAXIT):
        f = jacobi_table(n, p, x)[n]
        df = scale * jacobi_table(n - 1, dp, x)[n - 1]
        step = f / df
        x_new = x - step
        bad = ~((x_new > lo) & (x_new < hi))
        if np.any(bad):
            x_new[bad] = _bisect(x[bad], lo[bad], hi[bad], n, p)
        x = x_new
        if np.max(np.abs(step)) <= NEWTON_TOL:
            break

    return x


def _bisect(x, lo, hi, n: int, p: JacobiParam, iters: int = 60) -> np.ndarray:
    # keep the eigenvalue estimate unless the bracket contains a sign change
    a, b = lo.copy(), hi.copy()
    fa = jacobi_table(n, p, a)[n]
    fb = jacobi_table(n, p, b)[n]
    ok = fa * fb < 0
    if not np.any(ok):
        return x

    for _ in range(iters):
        m = 0.5 * (a + b)
        fm = jacobi_table(n, p, m)[n]
        left = fa * fm <= 0
        b = np.where(left, m, b)
        a = np.where(left, a, m)
        fa = np.where(left, fa, fm)

    return np.where(ok, 0.5 * (a + b), x)


def _gauss_nodes(n: int, p: JacobiParam) -> np.ndarray:
    """Zeros of :math:`P_n^{(\\alpha,\\beta)}` via the Jacobi matrix."""
    if n == 1:
        return np.array([(p.beta - p.alpha) / (p.alpha + p.beta + 2.0)])

    k = np.arange(n)
    A, B, C = jacobi_recurrence(k, p)
    offdiag = np.sqrt(A[:-1] * C[1:])
    try:
        x = eigh_tridiagonal(B, offdiag, eigvals_only=True)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"tridiagonal eigensolver failed for n={n}") from exc

    x = np.clip(np.sort(x), -1.0 + 1.0e-16, 1.0 - 1.0e-16)
    x = _newton_refine(x, n, p)
    if abs(p.alpha - p.beta) == 0.0:
        x = 0.5 * (x - x[::-1])
        if n % 2 == 1:
            x[n // 2] = 0.0

    return x


@lru_cache(maxsize=64)
def _jacobi_gauss(N: int, p: JacobiParam) -> QuadratureRule:
    n = N + 1
    a, b = p.alpha, p.beta
    x = _gauss_nodes(n, p)

    # w_j = G / ((1 - x_j^2) P_n'(x_j)^2)
    logG = (
        (a + b + 1.0) * math.log(2.0)
        + math.lgamma(n + a + 1.0)
        + math.lgamma(n + b + 1.0)
        - math.lgamma(n + a + b + 1.0)
        - math.lgamma(n + 1.0)
    )
    dp = 0.5 * (n + a + b + 1.0) * jacobi_table(n - 1, p.shifted(1.0, 1.0), x)[n - 1]
    w = np.exp(logG - np.log1p(-x * x) - 2.0 * np.log(np.abs(dp)))

    return QuadratureRule(p, _readonly(x), _readonly(w), GAUSS)


def jacobi_gauss(N: int, p: JacobiParam) -> QuadratureRule:
    """The ``N + 1`` point Jacobi-Gauss rule for the weight
    :math:`(1-x)^\\alpha (1+x)^\\beta`."""
    p = _as_param(p)
    if N < 0:
        raise DomainError(f"N must be non-negative: {N}")
    return _jacobi_gauss(int(N), p)


# }}}


# {{{ Gauss-Lobatto


def _lobatto_endpoint_weights(N: int, p: JacobiParam) -> tuple[float, float]:
    a, b = p.alpha, p.beta
    common = (
        (a + b + 1.0) * math.log(2.0)
        + math.lgamma(N)
        - math.lgamma(N + a + b + 2.0)
    )
    w0 = math.exp(
        common
        + math.log(b + 1.0)
        + 2.0 * math.lgamma(b + 1.0)
        + math.lgamma(N + a + 1.0)
        - math.lgamma(N + b + 1.0)
    )
    wN = math.exp(
        common
        + math.log(a + 1.0)
        + 2.0 * math.lgamma(a + 1.0)
        + math.lgamma(N + b + 1.0)
        - math.lgamma(N + a + 1.0)
    )
    return w0, wN


@lru_cache(maxsize=64)
def _jacobi_gauss_lobatto(N: int, p: JacobiParam) -> QuadratureRule:
    w0, wN = _lobatto_endpoint_weights(N, p)
    if N == 1:
        x = np.array([-1.0, 1.0])
        w = np.array([w0, wN])
    else:
        inner = jacobi_gauss(N - 2, p.shifted(1.0, 1.0))
        xi = inner.nodes
        x = np.concatenate([[-1.0], xi, [1.0]])
        w = np.concatenate([[w0], inner.weights / (1.0 - xi * xi), [wN]])

    return QuadratureRule(p, _readonly(x), _readonly(w), LOBATTO)


def jacobi_gauss_lobatto(N: int, p: JacobiParam) -> QuadratureRule:
    """The ``N + 1`` point Jacobi-Gauss-Lobatto rule, exact for degree ``2N - 1``.

    Interior weights are derived from the Gauss rule of the shifted family
    and the endpoint weights use their closed forms; both avoid the
    cancellation that an interpolatory construction suffers for the tiny
    endpoint weights at large ``N``.
    """
    p = _as_param(p)
    if N < 1:
        raise DomainError(f"a Lobatto rule needs N >= 1: got {N}")
    return _jacobi_gauss_lobatto(int(N), p)


def _interpolatory_weights(N: int, p: JacobiParam) -> np.ndarray:
    """Lobatto weights :math:`\\int h_j \\omega` by an exact Gauss rule.

    Reference route used in tests only.
    """
    p = _as_param(p)
    rule = jacobi_gauss_lobatto(N, p)
    gauss = jacobi_gauss(N, p)
    x = rule.nodes

    # barycentric form of h_j on the Gauss nodes
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    bw = 1.0 / np.prod(diff, axis=1)
    d = gauss.nodes[:, None] - x[None, :]
    h = bw[None, :] / d
    h /= h.sum(axis=1, keepdims=True)
    return gauss.weights @ h


# }}}


# {{{ Lagrange basis


def lagrange_coeffs(rule: QuadratureRule) -> LagrangeCoeffs:
    """:math:`t_{nj} = \\omega_j P_n(x_j) / \\tilde\\gamma_n`."""
    if rule.flavor != LOBATTO:
        raise DomainError("Lagrange coefficients need a Gauss-Lobatto rule")

    N = rule.N
    V = jacobi_table(N, rule.params, rule.nodes)
    t = V * rule.weights[None, :] / jacobi_gamma_tilde(N, rule.params)[:, None]
    return LagrangeCoeffs(rule, _readonly(t))


def lagrange_eval(coeffs: LagrangeCoeffs, j, x):
    """Evaluate :math:`h_j(x)`; *j* may be a slice or index array."""
    N = coeffs.rule.N
    x = np.asarray(x, dtype=np.float64)
    P = jacobi_table(N, coeffs.rule.params, x)
    out = np.tensordot(coeffs.t[:, j], P, axes=([0], [0]))
    return float(out) if np.ndim(out) == 0 else out


# }}}


def jacobi_moment(p: JacobiParam, k: int) -> float:
    """:math:`\\int_{-1}^1 (1+x)^k \\omega^{(\\alpha,\\beta)}(x)\\,dx` in closed form."""
    p = _as_param(p)
    a, b = p.alpha, p.beta
    return math.exp(
        (a + b + k + 1.0) * math.log(2.0)
        + math.lgamma(a + 1.0)
        + math.lgamma(b + k + 1.0)
        - math.lgamma(a + b + k + 2.0)
    )


def rule_to_csv(rule: QuadratureRule) -> str:
    buf = io.StringIO()
    buf.write("j,x_j,w_j\n")
    for j, (x, w) in enumerate(zip(rule.nodes, rule.weights)):
        buf.write(f"{j},{x:.17g},{w:.17g}\n")
    return buf.getvalue()


__all__ = [
    "GAUSS",
    "LOBATTO",
    "LagrangeCoeffs",
    "QuadratureRule",
    "jacobi_gauss",
    "jacobi_gauss_lobatto",
    "jacobi_moment",
    "lagrange_coeffs",
    "lagrange_eval",
    "rule_to_csv",
]
