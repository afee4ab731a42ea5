"""Jacobi polynomials on [-1, 1] in the Szegő normalization.

Evaluation uses the ascending three-term recurrence; every Gamma-function
ratio goes through ``math.lgamma`` so that degrees in the thousands do not
overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

#: tolerance under which two parameter pairs are treated as the same family
PARAM_ATOL = 1.0e-13


@dataclass(frozen=True)
class JacobiParam:
    """Parameters :math:`(\\alpha, \\beta)` of a classical Jacobi family."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))
        if not (self.alpha > -1.0 and self.beta > -1.0):
            raise DomainError(
                f"Jacobi parameters must exceed -1: got ({self.alpha}, {self.beta})"
            )

    def isclose(self, other: JacobiParam, atol: float = PARAM_ATOL) -> bool:
        return (
            abs(self.alpha - other.alpha) <= atol
            and abs(self.beta - other.beta) <= atol
        )

    @property
    def is_legendre(self) -> bool:
        return self.isclose(LEGENDRE)

    def shifted(self, da: float, db: float) -> JacobiParam:
        return JacobiParam(self.alpha + da, self.beta + db)


LEGENDRE = JacobiParam(0.0, 0.0)


@dataclass(frozen=True)
class JacobiNorm:
    #: :math:`\gamma_n`, the squared weighted norm of :math:`P_n`
    gamma_n: float
    #: the Lobatto-modified norm; equal to ``gamma_n`` unless ``n == N``
    gamma_tilde_N: float


def _as_param(p) -> JacobiParam:
    if isinstance(p, JacobiParam):
        return p
    return JacobiParam(*p)


# {{{ evaluation


def jacobi_table(nmax: int, p: JacobiParam, x) -> np.ndarray:
    """Values of :math:`P_0, \\dots, P_{n_{max}}` at the points *x*.

    Returns an array of shape ``(nmax + 1,) + np.shape(x)``.
    """
    p = _as_param(p)
    if nmax < 0:
        raise DomainError(f"degree must be non-negative: {nmax}")

    a, b = p.alpha, p.beta
    x = np.asarray(x, dtype=np.float64)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = 1.0
    if nmax == 0:
        return out

    out[1] = (a + 1.0) + 0.5 * (a + b + 2.0) * (x - 1.0)
    ab = a + b
    for n in range(2, nmax + 1):
        c = 2.0 * n + ab
        a1 = 2.0 * n * (n + ab) * (c - 2.0)
        a2 = (c - 1.0) * (a * a - b * b)
        a3 = (c - 2.0) * (c - 1.0) * c
        a4 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * c
        out[n] = ((a2 + a3 * x) * out[n - 1] - a4 * out[n - 2]) / a1

    return out


def jacobi_eval(n: int, p: JacobiParam, x):
    """Evaluate :math:`P_n^{(\\alpha,\\beta)}(x)`."""
    p = _as_param(p)
    x = np.asarray(x, dtype=np.float64)
    if np.any(np.abs(x) > 1.0 + 1.0e-14):
        raise DomainError("points must lie in [-1, 1]")

    values = jacobi_table(n, p, x)[n]
    return float(values) if values.ndim == 0 else values


def jacobi_deriv_eval(n: int, p: JacobiParam, x):
    """First derivative of :math:`P_n^{(\\alpha,\\beta)}` at *x*."""
    p = _as_param(p)
    if n == 0:
        x = np.asarray(x, dtype=np.float64)
        return 0.0 if x.ndim == 0 else np.zeros_like(x)

    scale = 0.5 * (n + p.alpha + p.beta + 1.0)
    return scale * jacobi_eval(n - 1, p.shifted(1.0, 1.0), x)


def jacobi_recurrence(n, p: JacobiParam):
    r"""Coefficients of :math:`x P_n = A_n P_{n+1} + B_n P_n + C_n P_{n-1}`.

    *n* may be an integer array. :math:`C_0 = 0`; the removable
    singularities at ``n == 0`` (``alpha + beta in {0, -1}``) are
    resolved analytically.
    """
    p = _as_param(p)
    a, b = p.alpha, p.beta
    ab = a + b
    n = np.asarray(n, dtype=np.float64)
    c = 2.0 * n + ab

    with np.errstate(divide="ignore", invalid="ignore"):
        A = 2.0 * (n + 1.0) * (n + ab + 1.0) / ((c + 1.0) * (c + 2.0))
        B = (b * b - a * a) / (c * (c + 2.0))
        C = 2.0 * (n + a) * (n + b) / (c * (c + 1.0))

    zero = n == 0
    A = np.where(zero, 2.0 / (ab + 2.0), A)
    B = np.where(zero, (b - a) / (ab + 2.0), B)
    C = np.where(zero, 0.0, C)
    if A.ndim == 0:
        return float(A), float(B), float(C)
    return A, B, C


# }}}


# {{{ norms


def jacobi_gamma(n, p: JacobiParam):
    """Squared norms :math:`\\gamma_n^{(\\alpha,\\beta)}` for an integer or array *n*."""
    p = _as_param(p)
    a, b = p.alpha, p.beta
    scalar = np.ndim(n) == 0
    ns = np.atleast_1d(np.asarray(n, dtype=np.int64))
    if np.any(ns < 0):
        raise DomainError("degree must be non-negative")

    out = np.empty(ns.shape)
    for i, k in enumerate(ns):
        if k == 0:
            out[i] = math.exp(
                (a + b + 1.0) * math.log(2.0)
                + math.lgamma(a + 1.0)
                + math.lgamma(b + 1.0)
                - math.lgamma(a + b + 2.0)
            )
        else:
            out[i] = math.exp(
                (a + b + 1.0) * math.log(2.0)
                + math.lgamma(k + a + 1.0)
                + math.lgamma(k + b + 1.0)
                - math.log(2.0 * k + a + b + 1.0)
                - math.lgamma(k + 1.0)
                - math.lgamma(k + a + b + 1.0)
            )

    return float(out[0]) if scalar else out


def jacobi_norm(n: int, N: int, p: JacobiParam) -> JacobiNorm:
    p = _as_param(p)
    if not 0 <= n <= N:
        raise DomainError(f"expected 0 <= n <= N: got n={n}, N={N}")

    g = jacobi_gamma(n, p)
    if n < N:
        return JacobiNorm(g, g)
    return JacobiNorm(g, (2.0 + (p.alpha + p.beta + 1.0) / N) * g)


def jacobi_gamma_tilde(N: int, p: JacobiParam) -> np.ndarray:
    """The vector :math:`\\tilde\\gamma_0, \\dots, \\tilde\\gamma_N`."""
    p = _as_param(p)
    g = jacobi_gamma(np.arange(N + 1), p)
    if N >= 1:
        g[N] *= 2.0 + (p.alpha + p.beta + 1.0) / N
    return g


def jacobi_endpoint(n, p: JacobiParam, side: int = 1):
    """:math:`P_n(\\pm 1)`, from the closed form at ``x = 1`` and symmetry."""
    p = _as_param(p)
    if side > 0:
        a = p.alpha
        sign = 1.0
    else:
        a = p.beta
        sign = (-1.0) ** np.asarray(n)

    n = np.asarray(n, dtype=np.float64)
    val = np.exp(
        np.vectorize(math.lgamma)(n + a + 1.0)
        - np.vectorize(math.lgamma)(n + 1.0)
        - math.lgamma(a + 1.0)
    )
    val = sign * val
    return float(val) if np.ndim(val) == 0 else val


# }}}


# {{{ Legendre antiderivatives


def legendre_antideriv(l: int, x):
    """:math:`\\int_{-1}^x P_l(t)\\,dt` in closed form."""
    x = np.asarray(x, dtype=np.float64)
    if l < 0:
        raise DomainError(f"degree must be non-negative: {l}")
    if l == 0:
        out = 1.0 + x
    else:
        P = jacobi_table(l + 1, LEGENDRE, x)
        out = (P[l + 1] - P[l - 1]) / (2.0 * l + 1.0)

    return float(out) if out.ndim == 0 else out


def _boundary_moment(l: int) -> float:
    # int_{-1}^{1} (t - 1) P_l(t) dt
    if l == 0:
        return -2.0
    if l == 1:
        return 2.0 / 3.0
    return 0.0


def phi_l(l: int, x):
    r"""Evaluate :math:`\Phi_l(x) = \frac{1+x}{2}\int_{-1}^1 (t-1)P_l\,dt
    + \int_{-1}^x (x-t) P_l(t)\,dt`.

    The second term is the antiderivative of :func:`legendre_antideriv`,
    written again through the same closed form.
    """
    if l < 0:
        raise DomainError(f"degree must be non-negative: {l}")

    x = np.asarray(x, dtype=np.float64)
    if l == 0:
        second = 0.5 * (1.0 + x) ** 2
    else:
        second = (
            legendre_antideriv(l + 1, x) - legendre_antideriv(l - 1, x)
        ) / (2.0 * l + 1.0)

    out = 0.5 * (1.0 + x) * _boundary_moment(l) + second
    return float(out) if np.ndim(out) == 0 else out


def legendre_antideriv_coeffs(c) -> np.ndarray:
    """Legendre coefficients of :math:`\\int_{-1}^x p` given those of *p*.

    Works column-wise on 2d input; the result has one more row.
    """
    c = np.asarray(c, dtype=np.float64)
    out = np.zeros((c.shape[0] + 1,) + c.shape[1:])
    if c.shape[0] == 0:
        return out

    # P_0 -> P_0 + P_1;  P_l -> (P_{l+1} - P_{l-1}) / (2l + 1)
    out[0] += c[0]
    out[1] += c[0]
    for l in range(1, c.shape[0]):
        s = c[l] / (2.0 * l + 1.0)
        out[l + 1] += s
        out[l - 1] -= s

    return out


def phi_coeffs(lmax: int) -> np.ndarray:
    """Legendre coefficients of :math:`\\Phi_0, \\dots, \\Phi_{l_{max}}` as columns."""
    eye = np.eye(lmax + 1)
    second = legendre_antideriv_coeffs(legendre_antideriv_coeffs(eye))
    lift = np.zeros_like(second)
    for l in range(min(lmax, 1) + 1):
        m = _boundary_moment(l)
        lift[0, l] += 0.5 * m
        lift[1, l] += 0.5 * m

    return second + lift


# }}}
