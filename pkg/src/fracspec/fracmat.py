"""Fractional pseudospectral differentiation matrices at JGL points.

Every matrix here acts on nodal values of a polynomial of degree ``N``
and returns exact values (up to rounding) of the corresponding operator at
the nodes:

* :func:`psdm_first_order`: the usual first-order matrix ``D``;
* :func:`caputo_psdm`: Caputo derivatives of order ``mu`` in (0, 1) or (1, 2);
* :func:`rl_int_matrix`: the modified fractional integral
  :math:`(1+x)^{-s} I^s`;
* :func:`rl_mod_psdm`: the modified Riemann-Liouville derivative
  :math:`(1+x)^{\\mu}\\, {}^R D^{\\mu}`.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, rgamma

from .connection import connection_matrix
from .errors import DomainError
from .orthopoly import LEGENDRE, JacobiParam, jacobi_gamma, jacobi_table
from .quadrature import LOBATTO, QuadratureRule, lagrange_coeffs

CAPUTO = "caputo"
RL = "rl"
INTEGRAL = "integral"

FLAVORS = (CAPUTO, RL)


@dataclass(frozen=True)
class FracOrder:
    mu: float
    flavor: str = CAPUTO

    def __post_init__(self) -> None:
        object.__setattr__(self, "mu", float(self.mu))
        if self.flavor not in FLAVORS:
            raise DomainError(f"unknown flavor {self.flavor!r}")
        if not (0.0 < self.mu < 2.0) or self.mu == 1.0:
            raise DomainError(f"order must lie in (0, 1) or (1, 2): got {self.mu}")

    @property
    def k(self) -> int:
        return int(math.ceil(self.mu))

    @property
    def s(self) -> float:
        return self.mu - (self.k - 1)


@dataclass(frozen=True)
class Fpsdm:
    order: FracOrder
    rule: QuadratureRule
    full: np.ndarray
    interior: np.ndarray


def interior_slice(k: int, N: int) -> slice:
    """Indices kept after removing the boundary rows/columns for ``k = ceil(mu)``."""
    if k == 1:
        return slice(1, N + 1)
    if k == 2:
        return slice(1, N)
    raise DomainError(f"k must be 1 or 2: got {k}")


def _check_rule(rule: QuadratureRule) -> None:
    if rule.flavor != LOBATTO:
        raise DomainError("differentiation matrices need a Gauss-Lobatto rule")


def _check_s(s: float) -> None:
    if not 0.0 < s < 1.0:
        raise DomainError(f"fractional part must lie in (0, 1): got {s}")


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _endpoint_power(x: np.ndarray, p: float) -> np.ndarray:
    # (1 + x)^p with an exact zero at x = -1 for p > 0
    out = np.power(1.0 + x, p)
    if p > 0:
        out[x == -1.0] = 0.0
    return out


# {{{ first order


def barycentric_weights(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Log-magnitudes and signs of :math:`1/\\prod_{k \\ne j}(x_j - x_k)`."""
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    logw = -np.sum(np.log(np.abs(diff)), axis=1)
    sign = np.prod(np.sign(diff), axis=1)
    return logw, sign


def psdm_first_order(rule: QuadratureRule) -> np.ndarray:
    _check_rule(rule)
    x = rule.nodes
    logw, sign = barycentric_weights(x)

    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    ratio = (sign[None, :] * sign[:, None]) * np.exp(logw[None, :] - logw[:, None])
    D = ratio / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return _freeze(D)


# }}}


# {{{ Caputo


def _caputo_legendre_coeffs_general(rule: QuadratureRule) -> np.ndarray:
    """Legendre coefficients (degrees ``0..N-1``) of :math:`h_j'`, by columns."""
    N = rule.N
    p = rule.params
    t = lagrange_coeffs(rule).t
    m = np.arange(N)
    dcoef = 0.5 * (m + p.alpha + p.beta + 2.0)[:, None] * t[1:, :]
    C = connection_matrix(N - 1, p.shifted(1.0, 1.0), LEGENDRE).C
    return C @ dcoef


def _caputo_legendre_coeffs_shortcut(rule: QuadratureRule) -> np.ndarray:
    # Legendre weights only: integrate h_j' P_m by parts
    N = rule.N
    x, w = rule.nodes, rule.weights
    m = np.arange(N)
    dP = np.zeros((N, N + 1))
    if N >= 2:
        dP[1:] = 0.5 * (m[1:] + 1.0)[:, None] * jacobi_table(
            N - 2, JacobiParam(1.0, 1.0), x
        )

    L = -dP * w[None, :]
    L[:, N] += 1.0
    L[:, 0] += (-1.0) ** (m + 1)
    return L / jacobi_gamma(m, LEGENDRE)[:, None]


def caputo_psdm_frac(
    rule: QuadratureRule, s: float, *, route: str = "auto"
) -> np.ndarray:
    """Caputo matrix of order ``s`` in (0, 1).

    *route* selects the Legendre shortcut (``"legendre"``), the general
    connection-based assembly (``"general"``), or picks automatically.
    """
    _check_rule(rule)
    _check_s(s)
    if route == "auto":
        route = "legendre" if rule.params.is_legendre else "general"

    if route == "legendre":
        if not rule.params.is_legendre:
            raise DomainError("the Legendre route needs (alpha, beta) = (0, 0)")
        L = _caputo_legendre_coeffs_shortcut(rule)
    elif route == "general":
        L = _caputo_legendre_coeffs_general(rule)
    else:
        raise DomainError(f"unknown route {route!r}")

    N = rule.N
    x = rule.nodes
    m = np.arange(N)
    g = np.exp(gammaln(m + 1.0) - gammaln(m + 2.0 - s))
    V = jacobi_table(N - 1, JacobiParam(s - 1.0, 1.0 - s), x)
    D = _endpoint_power(x, 1.0 - s)[:, None] * (V.T @ (g[:, None] * L))
    D[0, :] = 0.0
    return _freeze(D)


def caputo_psdm(rule: QuadratureRule, order: FracOrder) -> Fpsdm:
    if order.flavor != CAPUTO:
        raise DomainError("caputo_psdm expects a Caputo order")

    Ds = caputo_psdm_frac(rule, order.s)
    if order.k == 2:
        Ds = Ds @ psdm_first_order(rule)
        Ds[0, :] = 0.0
        Ds = _freeze(Ds)

    idx = interior_slice(order.k, rule.N)
    return Fpsdm(order, rule, Ds, _freeze(Ds[idx, idx].copy()))


# }}}


# {{{ modified Riemann-Liouville


def rl_int_matrix(rule: QuadratureRule, s: float) -> np.ndarray:
    """Nodal matrix of :math:`(1+x)^{-s} I_-^s`, for ``s`` in (0, 1)."""
    _check_rule(rule)
    _check_s(s)
    N = rule.N
    t = lagrange_coeffs(rule).t
    shat = connection_matrix(N, rule.params, LEGENDRE).C @ t

    l = np.arange(N + 1)
    g = np.exp(gammaln(l + 1.0) - gammaln(l + s + 1.0))
    V = jacobi_table(N, JacobiParam(-s, s), rule.nodes)
    return _freeze(V.T @ (g[:, None] * shat))


def rl_breve(rule: QuadratureRule, mu: float, k: int) -> np.ndarray:
    """:math:`(1+x)^\\mu D^k (1+x)^{k-\\mu}` as a nodal matrix."""
    N = rule.N
    D = psdm_first_order(rule)
    lam = 1.0 + rule.nodes
    eye = np.eye(N + 1)
    if k == 1:
        return (1.0 - mu) * eye + lam[:, None] * D
    if k == 2:
        return (
            (2.0 - mu) * (1.0 - mu) * eye
            + 2.0 * (2.0 - mu) * lam[:, None] * D
            + (lam * lam)[:, None] * (D @ D)
        )
    raise DomainError(f"k must be 1 or 2: got {k}")


def rl_mod_psdm(rule: QuadratureRule, order: FracOrder) -> Fpsdm:
    if order.flavor != RL:
        raise DomainError("rl_mod_psdm expects a Riemann-Liouville order")

    mu, k = order.mu, order.k
    full = _freeze(rl_breve(rule, mu, k) @ rl_int_matrix(rule, k - mu))
    idx = interior_slice(k, rule.N)
    return Fpsdm(order, rule, full, _freeze(full[idx, idx].copy()))


def fpsdm(rule: QuadratureRule, order: FracOrder) -> Fpsdm:
    if order.flavor == CAPUTO:
        return caputo_psdm(rule, order)
    return rl_mod_psdm(rule, order)


# }}}


# {{{ analytic oracle


def frac_monomial_oracle(flavor: str, mu: float, eta: float, x, *, modified=False):
    """Fractional derivative or integral of :math:`(1+x)^\\eta`.

    ``flavor`` is ``"caputo"``, ``"rl"`` or ``"integral"``. With
    ``modified=True`` the RL result is multiplied by :math:`(1+x)^\\mu`
    and the integral is divided by it, matching the nodal matrices.
    """
    if eta <= -1.0:
        raise DomainError(f"eta must exceed -1: got {eta}")
    if mu <= 0.0:
        raise DomainError(f"order must be positive: got {mu}")

    x = np.asarray(x, dtype=np.float64)
    y = 1.0 + x

    if flavor == INTEGRAL:
        c = math.exp(math.lgamma(eta + 1.0) - math.lgamma(eta + mu + 1.0))
        p = eta if modified else eta + mu
    elif flavor in (RL, CAPUTO):
        if flavor == CAPUTO:
            k = int(math.ceil(mu))
            if float(eta).is_integer() and eta <= k - 1:
                out = np.zeros_like(x)
                return float(out) if out.ndim == 0 else out
            if eta < k - 1:
                raise DomainError(
                    f"Caputo derivative of order {mu} undefined for (1+x)^{eta}"
                )
        c = math.exp(math.lgamma(eta + 1.0)) * float(rgamma(eta - mu + 1.0))
        p = eta if (modified and flavor == RL) else eta - mu
    else:
        raise DomainError(f"unknown flavor {flavor!r}")

    with np.errstate(divide="ignore"):
        out = c * np.power(y, p) if p != 0 else np.full_like(y, c)
    return float(out) if out.ndim == 0 else out


# }}}


def matrix_to_csv(A: np.ndarray, **header) -> str:
    buf = io.StringIO()
    if header:
        buf.write("# " + ", ".join(f"{k}={v}" for k, v in header.items()) + "\n")
    for row in np.asarray(A):
        buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
    return buf.getvalue()
