"""Fractional Birkhoff interpolation bases.

Each basis has ``N + 1`` members stored as expansion coefficients, one
column per member. Two expansion families are used:

``"legendre"``
    column ``c`` represents :math:`\\sum_n c_n P_n(x)`;
``"phi"``
    column ``c`` represents :math:`c_0 + \\sum_{m} c_{m+1} (1+x) P_m^{(0,1)}(x)`.

The interior members, sampled at the interior nodes, form the matrix that
inverts the interior differentiation matrix of the same order.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre as npleg
from scipy.special import gammaln, rgamma

from .connection import connection_matrix
from .errors import DomainError, NumericError
from .fracmat import (
    CAPUTO,
    RL,
    FracOrder,
    fpsdm,
    interior_slice,
)
from .orthopoly import (
    LEGENDRE,
    JacobiParam,
    jacobi_gamma,
    jacobi_recurrence,
    jacobi_table,
    legendre_antideriv_coeffs,
    phi_coeffs,
)
from .quadrature import QuadratureRule, jacobi_gauss_lobatto, lagrange_coeffs

LEGENDRE_FAMILY = "legendre"
PHI_FAMILY = "phi"

#: relative size under which a denominator is treated as vanishing
DENOMINATOR_GUARD = 1.0e-13

PHI_PARAM = JacobiParam(0.0, 1.0)


@dataclass(frozen=True)
class BirkhoffBasis:
    order: FracOrder
    rule: QuadratureRule
    family: str
    coeffs: np.ndarray

    @property
    def kind(self) -> str:
        return self.order.flavor

    @property
    def N(self) -> int:
        return self.rule.N

    @property
    def interior(self) -> slice:
        return interior_slice(self.order.k, self.N)

    @property
    def boundary_members(self) -> tuple[int, ...]:
        return (0,) if self.order.k == 1 else (0, self.N)

    def evaluate(self, x) -> np.ndarray:
        """Values of all members at *x*, shape ``(len(x), N + 1)``."""
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        return family_table(self.family, self.N, x).T @ self.coeffs

    def member(self, j: int, x):
        out = self.evaluate(x)[:, j]
        return float(out[0]) if np.ndim(x) == 0 else out


@dataclass(frozen=True)
class BirkhoffMatrix:
    basis: BirkhoffBasis
    Q: np.ndarray


@dataclass(frozen=True)
class HatExpansion:
    """Coefficients of the Lagrange basis on the nodes ``x_0..x_{N-1}``.

    ``rho`` in the source family, ``rho_tilde`` in the
    :math:`(\\mu, 1-\\mu)` family, and ``rho_hat`` in the shifted form
    :math:`\\hat\\varrho_0 + \\sum_l \\hat\\varrho_{l+1} (1+x) P_l^{(\\mu,1-\\mu)}`.
    """

    rho: np.ndarray
    rho_tilde: np.ndarray
    rho_hat: np.ndarray
    T: np.ndarray


def family_table(family: str, N: int, x: np.ndarray) -> np.ndarray:
    """Values of the ``N + 1`` expansion functions of *family* at *x*."""
    if family == LEGENDRE_FAMILY:
        return jacobi_table(N, LEGENDRE, x)
    if family == PHI_FAMILY:
        out = np.empty((N + 1,) + x.shape)
        out[0] = 1.0
        if N >= 1:
            out[1:] = (1.0 + x) * jacobi_table(N - 1, PHI_PARAM, x)
        return out
    raise DomainError(f"unknown family {family!r}")


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _guarded_sum(terms, what: str) -> float:
    terms = np.asarray(terms, dtype=np.float64)
    total = math.fsum(terms)
    scale = math.fsum(np.abs(terms))
    if abs(total) <= DENOMINATOR_GUARD * scale or scale == 0.0:
        raise NumericError(f"vanishing denominator in {what}")
    return total


def _check_mu(mu: float, k: int) -> None:
    if not k - 1 < mu < k:
        raise DomainError(f"order must lie in ({k - 1}, {k}): got {mu}")


# {{{ Caputo


def _hbar_endpoint_data(rule: QuadratureRule):
    N = rule.N
    p = rule.params
    V = jacobi_table(N, p, rule.nodes)
    gamma = jacobi_gamma(np.arange(N + 1), p)
    return V, gamma


def caputo_birkhoff_01(rule: QuadratureRule, mu: float) -> BirkhoffBasis:
    _check_mu(mu, 1)
    N = rule.N
    p = rule.params
    x, w = rule.nodes, rule.weights
    V, gamma = _hbar_endpoint_data(rule)

    # values at -1 of the interpolants on x_1..x_N
    j = np.arange(1, N + 1)
    c = np.ones(N)
    c[-1] = p.alpha + 1.0
    hbar_m1 = -c / (p.beta + 1.0) * V[N, 0] / V[N, j]

    xi = (
        np.outer(V[:N, 0] * w[0], hbar_m1) + V[:N, j] * w[j][None, :]
    ) / gamma[:N, None]
    xi_breve = connection_matrix(N - 1, p, JacobiParam(mu - 1.0, 1.0 - mu)).C @ xi

    l = np.arange(N)
    g = np.exp(gammaln(l + 2.0 - mu) - gammaln(l + 1.0))
    dQ = g[:, None] * xi_breve * np.power(1.0 + x[j], mu - 1.0)[None, :]

    coeffs = np.zeros((N + 1, N + 1))
    coeffs[0, 0] = 1.0
    coeffs[:, 1:] = legendre_antideriv_coeffs(dQ)
    return BirkhoffBasis(FracOrder(mu, CAPUTO), rule, LEGENDRE_FAMILY, _freeze(coeffs))


def caputo_birkhoff_12(rule: QuadratureRule, mu: float) -> BirkhoffBasis:
    _check_mu(mu, 2)
    N = rule.N
    if N < 2:
        raise DomainError("this basis needs N >= 2")

    p = rule.params
    x, w = rule.nodes, rule.weights
    V, gamma = _hbar_endpoint_data(rule)

    j = np.arange(1, N)
    xj = x[j]
    hbar_m1 = -(1.0 - xj) / (2.0 * (p.beta + 1.0)) * V[N, 0] / V[N, j]
    hbar_p1 = -(1.0 + xj) / (2.0 * (p.alpha + 1.0)) * V[N, N] / V[N, j]

    n = N - 1
    xi = (
        np.outer(V[:n, 0] * w[0], hbar_m1)
        + np.outer(V[:n, N] * w[N], hbar_p1)
        + V[:n, j] * w[j][None, :]
    ) / gamma[:n, None]
    xi_breve = connection_matrix(N - 2, p, JacobiParam(mu - 2.0, 2.0 - mu)).C @ xi

    l = np.arange(n)
    g = np.exp(gammaln(l + 3.0 - mu) - gammaln(l + 1.0))
    d2Q = g[:, None] * xi_breve * np.power(1.0 + xj, mu - 2.0)[None, :]

    coeffs = np.zeros((N + 1, N + 1))
    coeffs[:, 1:N] = phi_coeffs(N - 2) @ d2Q
    coeffs[0, 0], coeffs[1, 0] = 0.5, -0.5
    coeffs[0, N], coeffs[1, N] = 0.5, 0.5
    return BirkhoffBasis(FracOrder(mu, CAPUTO), rule, LEGENDRE_FAMILY, _freeze(coeffs))


# }}}


# {{{ modified Riemann-Liouville


def rl_birkhoff_01(rule: QuadratureRule, mu: float) -> BirkhoffBasis:
    _check_mu(mu, 1)
    N = rule.N
    t = lagrange_coeffs(rule).t
    t_hat = connection_matrix(N, rule.params, JacobiParam(mu, -mu)).C @ t

    l = np.arange(N + 1)
    g = np.exp(gammaln(l + 1.0 - mu) - gammaln(l + 1.0))
    coeffs = g[:, None] * t_hat
    coeffs[:, 0] *= float(rgamma(1.0 - mu))
    return BirkhoffBasis(FracOrder(mu, RL), rule, LEGENDRE_FAMILY, _freeze(coeffs))


def back_substitute(T: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve ``T y = rhs`` for an upper triangular *T* with two superdiagonals."""
    n = T.shape[0]
    y = np.zeros_like(rhs, dtype=np.float64)
    for i in range(n - 1, -1, -1):
        acc = rhs[i].copy()
        if i + 1 < n:
            acc -= T[i, i + 1] * y[i + 1]
        if i + 2 < n:
            acc -= T[i, i + 2] * y[i + 2]
        y[i] = acc / T[i, i]
    return y


def shift_matrix(N: int, mu: float) -> np.ndarray:
    """Map from shifted coefficients to plain :math:`(\\mu, 1-\\mu)` coefficients.

    Uses :math:`(1+x) P_l = A_l P_{l+1} + (B_l + 1) P_l + C_l P_{l-1}`.
    """
    A, B, C = jacobi_recurrence(np.arange(N + 1), JacobiParam(mu, 1.0 - mu))
    T = np.zeros((N, N))
    T[0, 0] = 1.0
    for i in range(N):
        if i >= 1:
            T[i, i] = A[i - 1]
        if i + 1 < N:
            T[i, i + 1] = B[i] + 1.0
        if i + 2 < N:
            T[i, i + 2] = C[i + 1]
    return T


def rl_hat_expansion(rule: QuadratureRule, mu: float) -> HatExpansion:
    _check_mu(mu, 2)
    N = rule.N
    p = rule.params
    x, w = rule.nodes, rule.weights
    V, gamma = _hbar_endpoint_data(rule)
    PN = V[N]

    rho = np.empty((N, N))
    g = gamma[:N]
    rho[:, 0] = (
        V[:N, 0] * w[0]
        - (p.beta + 1.0) / (p.alpha + 1.0) * PN[N] / PN[0] * V[:N, N] * w[N]
    ) / g
    j = np.arange(1, N)
    rho[:, 1:] = (
        V[:N, j] * w[j][None, :]
        - np.outer(V[:N, N] * w[N], PN[N] / ((p.alpha + 1.0) * PN[j]))
    ) / g[:, None]

    rho_tilde = connection_matrix(N - 1, p, JacobiParam(mu, 1.0 - mu)).C @ rho
    T = shift_matrix(N, mu)
    rho_hat = back_substitute(T, rho_tilde)
    return HatExpansion(rho, rho_tilde, rho_hat, T)


def rl_birkhoff_12(
    rule: QuadratureRule, mu: float, *, route: str = "auto"
) -> BirkhoffBasis:
    """Modified RL basis for ``mu`` in (1, 2), in the phi family.

    ``route="closed-form"`` uses the interpolants on ``x_0..x_{N-1}`` and the
    linear-factor normalization; ``route="lagrange"`` works with the full
    Lobatto Lagrange basis instead. The latter needs no connection step
    when ``(alpha, beta) = (mu, 1 - mu)`` and is the more accurate one
    there; ``"auto"`` picks it for that pair and the closed form otherwise.
    """
    _check_mu(mu, 2)
    if rule.N < 2:
        raise DomainError("this basis needs N >= 2")

    if route == "auto":
        special = rule.params.isclose(JacobiParam(mu, 1.0 - mu))
        route = "lagrange" if special else "closed-form"

    if route == "closed-form":
        coeffs = _rl12_closed_form(rule, mu)
    elif route == "lagrange":
        coeffs = _rl12_lagrange(rule, mu)
    else:
        raise DomainError(f"unknown route {route!r}")

    return BirkhoffBasis(FracOrder(mu, RL), rule, PHI_FAMILY, _freeze(coeffs))


def _d_weights(n: int, mu: float) -> np.ndarray:
    l = np.arange(n)
    return np.exp(gammaln(l + 2.0 - mu) - gammaln(l + 2.0))


def _rl12_closed_form(rule: QuadratureRule, mu: float) -> np.ndarray:
    N = rule.N
    hat = rl_hat_expansion(rule, mu)
    rt, rh = hat.rho_tilde, hat.rho_hat
    A, B, C = jacobi_recurrence(np.arange(N + 1), JacobiParam(mu, 1.0 - mu))
    d = _d_weights(N, mu)
    rg = float(rgamma(1.0 - mu))

    coeffs = np.zeros((N + 1, N + 1))

    # member 0: value 1 at -1 and 0 at +1
    s_tilde = _guarded_sum(d * rt[:, 0], "the boundary member normalization")
    s_hat0 = math.fsum(d[: N - 1] * rh[1:, 0])
    kappa = -(0.5 + rg * s_hat0) / s_tilde
    coeffs[0, 0] = 1.0
    coeffs[1:, 0] = kappa * d * rt[:, 0]
    coeffs[1:N, 0] += rg * d[: N - 1] * rh[1:, 0]

    # member N: value 0 at -1 and 1 at +1
    coeffs[1:, N] = d * rt[:, 0] / (2.0 * s_tilde)

    x = rule.nodes
    gam2 = math.exp(math.lgamma(2.0 - mu))
    for j in range(1, N):
        wp = np.zeros(N + 1)
        wp[: N - 1] = rh[1:, j]
        denom = _guarded_sum(d[: N - 1] * wp[: N - 1], f"tau for member {j}")
        tau = -1.0 + mu * gam2 * rh[1, j] / denom

        # x * (1+x) P_l expanded by the three-term recurrence
        xpart = B[:N] * wp[:N]
        xpart[1:] += A[: N - 1] * wp[: N - 1]
        xpart += C[1 : N + 1] * wp[1 : N + 1]
        xpart *= d

        scale = _guarded_sum([x[j], tau], f"x_j + tau for member {j}")
        coeffs[1:, j] = (tau * d * wp[:N] + xpart) / scale

    return coeffs


def _rl12_lagrange(rule: QuadratureRule, mu: float) -> np.ndarray:
    N = rule.N
    t = lagrange_coeffs(rule).t
    t_tilde = connection_matrix(N, rule.params, JacobiParam(mu, 1.0 - mu)).C @ t
    g_hat = back_substitute(shift_matrix(N + 1, mu), t_tilde)

    # H_j = I^mu {(1+x)^{-mu} (h_j - h_j(-1))} in the phi family
    H = _d_weights(N, mu)[:, None] * g_hat[1:, :]
    H1 = 2.0 * H.sum(axis=0)
    hN1 = _guarded_sum(2.0 * H[:, N], "the boundary member normalization")
    rg = float(rgamma(1.0 - mu))

    coeffs = np.zeros((N + 1, N + 1))
    coeffs[1:, 1:N] = H[:, 1:N] - np.outer(H[:, N], H1[1:N] / hN1)
    coeffs[1:, N] = H[:, N] / hN1

    # 1 - (1/Gamma(1-mu)) sum_{j >= 1} H_j, then fix the value at +1
    rest = -rg * H[:, 1:].sum(axis=1)
    coeffs[0, 0] = 1.0
    coeffs[1:, 0] = rest - (1.0 + 2.0 * rest.sum()) * coeffs[1:, N]
    return coeffs


# }}}


# {{{ dispatch


@lru_cache(maxsize=16)
def _birkhoff_cached(N: int, params: JacobiParam, order: FracOrder) -> BirkhoffBasis:
    rule = jacobi_gauss_lobatto(N, params)
    builders = {
        (CAPUTO, 1): caputo_birkhoff_01,
        (CAPUTO, 2): caputo_birkhoff_12,
        (RL, 1): rl_birkhoff_01,
        (RL, 2): rl_birkhoff_12,
    }
    return builders[order.flavor, order.k](rule, order.mu)


def birkhoff_basis(rule: QuadratureRule, order: FracOrder) -> BirkhoffBasis:
    return _birkhoff_cached(rule.N, rule.params, order)


def birkhoff_matrix(basis: BirkhoffBasis) -> BirkhoffMatrix:
    idx = basis.interior
    values = basis.evaluate(basis.rule.nodes[idx])
    return BirkhoffMatrix(basis, _freeze(values[:, idx].copy()))


# }}}


# {{{ fractional derivatives of the members


def _legendre_caputo(coeffs: np.ndarray, rho: float, x: np.ndarray) -> np.ndarray:
    k = int(math.ceil(rho))
    sigma = k - rho
    if coeffs.shape[0] <= k:
        return np.zeros((x.size, coeffs.shape[1]))

    dc = npleg.legder(coeffs, k, axis=0)
    n = np.arange(dc.shape[0])
    g = np.exp(gammaln(n + 1.0) - gammaln(n + sigma + 1.0))
    P = jacobi_table(n[-1], JacobiParam(-sigma, sigma), x)
    with np.errstate(divide="ignore"):
        w = np.where(x == -1.0, 0.0, np.power(1.0 + x, sigma))
    return w[:, None] * (P.T @ (g[:, None] * dc))


def _legendre_rl(coeffs: np.ndarray, rho: float, x: np.ndarray) -> np.ndarray:
    if not 0.0 < rho < 1.0:
        raise DomainError("Legendre members support modified RL orders in (0, 1)")
    n = np.arange(coeffs.shape[0])
    g = np.exp(gammaln(n + 1.0) - gammaln(n + 1.0 - rho))
    P = jacobi_table(n[-1], JacobiParam(rho, -rho), x)
    return P.T @ (g[:, None] * coeffs)


def _phi_rl(coeffs: np.ndarray, rho: float, x: np.ndarray) -> np.ndarray:
    if not 0.0 < rho < 2.0 or rho == 1.0:
        raise DomainError("phi members support modified RL orders in (0, 1) or (1, 2)")
    M = coeffs.shape[0] - 1
    out = np.full((x.size, coeffs.shape[1]), float(rgamma(1.0 - rho))) * coeffs[0]
    if M >= 1:
        l = np.arange(M)
        g = np.exp(gammaln(l + 2.0) - gammaln(l + 2.0 - rho))
        P = (1.0 + x) * jacobi_table(M - 1, JacobiParam(rho, 1.0 - rho), x)
        out += P.T @ (g[:, None] * coeffs[1:])
    return out


def frac_derivative(basis: BirkhoffBasis, rho: float, x, flavor: str | None = None):
    """Fractional derivatives of order *rho* of every member at *x*.

    Caputo derivatives act on Legendre members, modified RL derivatives on
    either family. Returns shape ``(len(x), N + 1)``.
    """
    flavor = basis.kind if flavor is None else flavor
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if rho <= 0.0:
        raise DomainError(f"order must be positive: got {rho}")

    if flavor == CAPUTO:
        if basis.family != LEGENDRE_FAMILY:
            raise DomainError("Caputo derivatives need Legendre members")
        return _legendre_caputo(basis.coeffs, rho, x)
    if flavor == RL:
        if basis.family == LEGENDRE_FAMILY:
            return _legendre_rl(basis.coeffs, rho, x)
        return _phi_rl(basis.coeffs, rho, x)
    raise DomainError(f"unknown flavor {flavor!r}")


def lower_order_matrix(
    basis: BirkhoffBasis, nu: float, *, via_matrix: bool = False
) -> np.ndarray:
    """Order-*nu* derivatives of the interior members at the interior nodes."""
    if not 0.0 < nu < basis.order.mu:
        raise DomainError(f"need 0 < nu < mu: got nu={nu}, mu={basis.order.mu}")

    idx = basis.interior
    rule = basis.rule
    if via_matrix:
        M = fpsdm(rule, FracOrder(nu, basis.kind)).full
        vals = M @ basis.evaluate(rule.nodes)
        return _freeze(vals[idx, idx].copy())

    vals = frac_derivative(basis, nu, rule.nodes[idx])
    return _freeze(vals[:, idx].copy())


# }}}


def basis_to_csv(basis: BirkhoffBasis) -> str:
    buf = io.StringIO()
    buf.write(
        f"# family={basis.family}, mu={basis.order.mu}, flavor={basis.kind}, "
        f"N={basis.N}, alpha={basis.rule.params.alpha}, beta={basis.rule.params.beta}\n"
    )
    buf.write("member," + ",".join(f"c{n}" for n in range(basis.N + 1)) + "\n")
    for j in range(basis.N + 1):
        buf.write(f"{j}," + ",".join(f"{v:.17g}" for v in basis.coeffs[:, j]) + "\n")
    return buf.getvalue()
