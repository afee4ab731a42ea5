"""Exact solutions, their fractional derivatives, and the built-in presets.

All derivatives are taken from ``x = -1``; ``y`` below stands for ``1 + x``.
With ``modified=True`` a Riemann-Liouville derivative of order ``rho`` is
returned multiplied by ``y**rho``, which is the quantity the collocation
matrices produce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import rgamma

from .errors import DomainError
from .fracmat import CAPUTO, RL, frac_monomial_oracle
from .mittag import MLParams, ml_eval

IVP_CAPUTO = "ivp-caputo"
BVP_CAPUTO = "bvp-caputo"
BVP_RL = "bvp-rl"
KINDS = (IVP_CAPUTO, BVP_CAPUTO, BVP_RL)


def _y(x) -> np.ndarray:
    return 1.0 + np.asarray(x, dtype=np.float64)


def _scale(out: np.ndarray, y: np.ndarray, rho: float, flavor: str, modified: bool):
    # y^{-rho} factor of an RL result, dropped when the result is modified
    if flavor == RL and modified:
        return out
    with np.errstate(divide="ignore"):
        return out * np.power(y, -rho)


def exp_frac(flavor: str, rho: float, x, sign: float = 1.0, *, modified=False):
    """Fractional derivative of :math:`e^{\\pm y}` (``sign`` picks the exponent sign)."""
    y = _y(x)
    if flavor == CAPUTO:
        k = int(math.ceil(rho))
        z = sign * y
        return sign**k * np.power(y, k - rho) * ml_eval(MLParams(1.0, k + 1.0 - rho), z)
    if flavor == RL:
        out = ml_eval(MLParams(1.0, 1.0 - rho), sign * y)
        return _scale(out, y, rho, RL, modified)
    raise DomainError(f"unknown flavor {flavor!r}")


def ml_frac(flavor: str, rho: float, a: float, c: float, x, *, modified=False):
    """Fractional derivative of :math:`E_{a,1}(-c\\, y^a)`."""
    y = _y(x)
    z = -c * np.power(y, a)
    if flavor == RL:
        out = ml_eval(MLParams(a, 1.0 - rho), z)
        return _scale(out, y, rho, RL, modified)
    if flavor == CAPUTO:
        if abs(rho - a) <= 1e-15:
            # the Caputo derivative reproduces the function
            return -c * ml_eval(MLParams(a, 1.0), z)
        out = ml_eval(MLParams(a, 1.0 - rho), z) - float(rgamma(1.0 - rho))
        return _scale(out, y, rho, RL, False)
    raise DomainError(f"unknown flavor {flavor!r}")


def power_frac(flavor: str, rho: float, eta: float, x, *, modified=False):
    """Fractional derivative of :math:`y^\\eta`; integer powers allowed."""
    return frac_monomial_oracle(flavor, rho, eta, x, modified=modified)


# {{{ presets


@dataclass(frozen=True)
class Preset:
    """A model problem with a known solution.

    ``deriv(flavor, rho, x, modified)`` returns the fractional derivative of
    ``exact``; ``lam`` holds one coefficient (IVP) or two (BVP).
    """

    name: str
    kind: str
    mu: float
    nu: float | None
    params: tuple[float, float]
    lam: tuple[Callable, ...]
    exact: Callable
    deriv: Callable


def _sec61_deriv(mu):
    def deriv(flavor, rho, x, modified=False):
        return ml_frac(flavor, rho, mu, 2.0, x, modified=modified)

    return deriv


def _sec62_exact(x):
    y = _y(x)
    return np.exp(y) + y ** (6.0 + 4.0 / 7.0) - 2.0 * y ** (5.0 + 4.0 / 7.0)


def _sec62_deriv(flavor, rho, x, modified=False):
    return (
        exp_frac(flavor, rho, x, modified=modified)
        + power_frac(flavor, rho, 6.0 + 4.0 / 7.0, x, modified=modified)
        - 2.0 * power_frac(flavor, rho, 5.0 + 4.0 / 7.0, x, modified=modified)
    )


def _smooth_exact(x):
    y = _y(x)
    return np.exp(-y) - 1.0 + 0.5 * y - 0.5 * math.exp(-2.0) * y


def _smooth_deriv(flavor, rho, x, modified=False):
    # e^{-y} - 1 + (1 - e^{-2}) y / 2
    b = 0.5 * (1.0 - math.exp(-2.0))
    out = exp_frac(flavor, rho, x, -1.0, modified=modified)
    out = out - power_frac(flavor, rho, 0.0, x, modified=modified)
    return out + b * power_frac(flavor, rho, 1.0, x, modified=modified)


def _table1_exact(mu):
    b = 0.5 * (1.0 - ml_eval(MLParams(mu, 1.0), -(2.0 ** (mu - 1.0))))

    def exact(x):
        y = _y(x)
        return ml_eval(MLParams(mu, 1.0), -0.5 * np.power(y, mu)) + b * y - 1.0

    def deriv(flavor, rho, x, modified=False):
        out = ml_frac(flavor, rho, mu, 0.5, x, modified=modified)
        out = out + b * power_frac(flavor, rho, 1.0, x, modified=modified)
        return out - power_frac(flavor, rho, 0.0, x, modified=modified)

    return exact, deriv


def _lam12():
    return (lambda x: 2.0 + np.sin(4.0 * np.pi * x), lambda x: 2.0 + np.cos(x))


def _lam34():
    return (
        lambda x: 1.0 + np.exp(-1000.0 * x * x),
        lambda x: 1.0 + np.exp(-1000.0 * (x + 0.2) ** 2),
    )


PRESET_NAMES = ("sec61", "sec62", "caputo-smooth", "rl-smooth", "rl-table1")


def make_preset(name: str, mu: float | None = None, nu: float | None = None) -> Preset:
    """Build a preset, optionally overriding its orders.

    Unless given explicitly, the Jacobi parameters follow the order:
    ``(mu - k, k - mu)`` for Caputo problems and ``(mu, 1 - mu)`` for the
    modified RL ones.
    """
    if name == "sec61":
        mu = 0.8 if mu is None else mu
        lam = lambda x: 2.0 + np.sin(25.0 * x)  # noqa: E731
        exact = lambda x: ml_eval(MLParams(mu, 1.0), -2.0 * np.power(_y(x), mu))  # noqa: E731
        return Preset(
            name, IVP_CAPUTO, mu, None, (mu - 1.0, 1.0 - mu), (lam,), exact,
            _sec61_deriv(mu),
        )

    if name in ("sec62", "caputo-smooth"):
        mu = 1.9 if mu is None else mu
        nu = 0.7 if nu is None else nu
        params = (mu - 2.0, 2.0 - mu)
        if name == "sec62":
            return Preset(name, BVP_CAPUTO, mu, nu, params, _lam12(), _sec62_exact, _sec62_deriv)
        return Preset(name, BVP_CAPUTO, mu, nu, params, _lam12(), _smooth_exact, _smooth_deriv)

    if name == "rl-smooth":
        mu = 1.9 if mu is None else mu
        nu = 0.7 if nu is None else nu
        return Preset(
            name, BVP_RL, mu, nu, (mu, 1.0 - mu), _lam12(), _smooth_exact, _smooth_deriv
        )

    if name == "rl-table1":
        mu = 1.5 if mu is None else mu
        nu = 0.6 if nu is None else nu
        exact, deriv = _table1_exact(mu)
        return Preset(name, BVP_RL, mu, nu, (mu, 1.0 - mu), _lam34(), exact, deriv)

    raise DomainError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")


# }}}
