"""Two-parameter Mittag-Leffler function by its power series."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, gammasgn, rgamma

from .errors import DomainError, NumericError

#: largest |z| accepted by the series
MAX_ARGUMENT = 50.0
REL_STOP = 1.0e-17
MAX_TERMS = 10000
#: least relative accuracy tolerated after cancellation among the terms
MIN_ACCURACY = 1.0e-6


@dataclass(frozen=True)
class MLParams:
    a: float
    b: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        if not self.a > 0.0:
            raise DomainError(f"first parameter must be positive: got {self.a}")


def _ml_scalar(a: float, b: float, z: float) -> float:
    if abs(z) > MAX_ARGUMENT:
        raise DomainError(f"|z| must not exceed {MAX_ARGUMENT}: got {z}")
    if z == 0.0:
        return float(rgamma(b))

    # Neumaier summation; z^n / Gamma(na + b) built in log space to avoid overflow
    total = 0.0
    comp = 0.0
    peak = 0.0
    logz = math.log(abs(z))
    neg = z < 0.0
    for n in range(MAX_TERMS):
        arg = n * a + b
        if arg <= 0.0 and arg.is_integer():
            continue  # 1/Gamma vanishes at the poles
        mag = n * logz - float(gammaln(arg))
        if mag > 700.0:
            raise NumericError(f"series terms overflow for E_{{{a},{b}}}({z})")
        term = float(gammasgn(arg)) * math.exp(mag)
        if neg and n % 2:
            term = -term
        peak = max(peak, abs(term))

        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t

        # stop once past the peak of the terms
        if n * a > abs(z) + 1.0 and abs(term) < REL_STOP * abs(total + comp):
            break

    result = total + comp
    if peak * np.finfo(float).eps > MIN_ACCURACY * abs(result):
        raise NumericError(f"cancellation leaves too few digits in E_{{{a},{b}}}({z})")
    return result


def ml_eval(p: MLParams, z):
    """:math:`E_{a,b}(z) = \\sum_n z^n / \\Gamma(na + b)` for real ``|z| <= 50``."""
    if not isinstance(p, MLParams):
        p = MLParams(*p)
    z_arr = np.asarray(z, dtype=np.float64)
    out = np.vectorize(lambda v: _ml_scalar(p.a, p.b, float(v)), otypes=[float])(z_arr)
    return float(out) if out.ndim == 0 else out


def caputo_exp_rhs(mu: float, x):
    """Caputo derivative of order *mu* of :math:`e^{1+x}` from ``-1``."""
    if not (0.0 < mu < 2.0) or mu == 1.0:
        raise DomainError(f"order must lie in (0, 1) or (1, 2): got {mu}")
    k = int(math.ceil(mu))
    y = 1.0 + np.asarray(x, dtype=np.float64)
    out = np.power(y, k - mu) * ml_eval(MLParams(1.0, k + 1.0 - mu), y)
    return float(out) if np.ndim(out) == 0 else out
