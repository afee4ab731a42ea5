"""Eigenvalue and condition-number diagnostics for dense matrices."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .errors import DomainError, NumericError

RQ_TOL = 1.0e-8
MAX_ITER = 5000
FULL_SPECTRUM_MAX = 1024

CSV_COLUMNS = ("N", "mu", "flavor", "min_mod", "max_mod", "sigma2", "sigmaNm2", "cond2")


@dataclass(frozen=True)
class SpectrumSummary:
    min_modulus: float
    max_modulus: float
    sigma2: float
    sigmaNm2: float
    cond2: float | None = None
    sorted_moduli: np.ndarray | None = None


def _square(A) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {A.shape}")
    return A


def _lu(A: np.ndarray):
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("error", LinAlgWarning)
        try:
            lu = lu_factor(A)
        except (LinAlgWarning, ValueError) as exc:
            raise NumericError("matrix is singular to working precision") from exc
    if np.any(lu[0].diagonal() == 0.0):
        raise NumericError("matrix is singular")
    return lu


def _dominant_modulus(apply, n: int, rng: np.random.Generator) -> float:
    """Largest eigenvalue modulus of a linear map by two-vector subspace iteration.

    A block of two vectors captures a dominant complex-conjugate pair as well
    as a dominant real eigenvalue; the estimate is the larger modulus of the
    eigenvalues of the 2x2 Rayleigh quotient.
    """
    if n == 1:
        return abs(float(apply(np.ones((1, 1)))[0, 0]))

    V, _ = np.linalg.qr(rng.standard_normal((n, 2)))
    est = np.nan
    for _ in range(MAX_ITER):
        W = apply(V)
        H = V.T @ W
        new = float(np.max(np.abs(np.linalg.eigvals(H))))
        if np.isfinite(est) and abs(new - est) <= RQ_TOL * abs(new):
            return new
        est = new
        V, _ = np.linalg.qr(W)
    raise NumericError(f"subspace iteration did not settle in {MAX_ITER} steps", best=est)


def extreme_eigs(A, seed: int = 0) -> tuple[float, float]:
    """Smallest and largest eigenvalue moduli by power and inverse iteration."""
    A = _square(A)
    n = A.shape[0]
    rng = np.random.default_rng(seed)
    lmax = _dominant_modulus(lambda V: A @ V, n, rng)
    lu = _lu(A)
    inv = _dominant_modulus(lambda V: lu_solve(lu, V), n, rng)
    return 1.0 / inv, lmax


def cond2_estimate(A, seed: int = 0) -> float:
    """Ratio of the extreme singular values, from iterations on :math:`A^T A`."""
    A = _square(A)
    n = A.shape[0]
    rng = np.random.default_rng(seed)
    smax2 = _dominant_modulus(lambda V: A.T @ (A @ V), n, rng)
    lu = _lu(A)
    # (A^T A)^{-1} v = A^{-1} A^{-T} v
    sinv2 = _dominant_modulus(lambda V: lu_solve(lu, lu_solve(lu, V, trans=1)), n, rng)
    return math.sqrt(smax2 * sinv2)


def full_spectrum(A, *, cond: bool = False) -> SpectrumSummary:
    """All eigenvalue moduli, sorted ascending, with the concentration statistics."""
    A = _square(A)
    n = A.shape[0]
    if n > FULL_SPECTRUM_MAX + 1:
        raise DomainError(f"dense spectra are limited to N <= {FULL_SPECTRUM_MAX}")
    try:
        ev = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise NumericError("QR iteration did not converge") from exc

    mods = np.sort(np.abs(ev))
    s2 = mods[1] if n >= 2 else mods[0]
    sN2 = mods[-2] if n >= 2 else mods[-1]
    c = cond2_estimate(A) if cond else None
    return SpectrumSummary(float(mods[0]), float(mods[-1]), float(s2), float(sN2), c, mods)


def spectrum_csv(rows) -> str:
    """CSV text for an iterable of ``(N, mu, flavor, SpectrumSummary)``."""
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for N, mu, flavor, s in rows:
        c = "" if s.cond2 is None else f"{s.cond2:.6e}"
        buf.write(
            f"{N},{mu},{flavor},{s.min_modulus:.6e},{s.max_modulus:.6e},"
            f"{s.sigma2:.6e},{s.sigmaNm2:.6e},{c}\n"
        )
    return buf.getvalue()
