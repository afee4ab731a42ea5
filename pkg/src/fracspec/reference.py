"""Reference values for the ``rl-table1`` preset and the bounds used to compare.

Each row is ``N: (|sigma_2|, |sigma_{N-2}|, iterations, error_l2)``, keyed by
``(mu, nu)``. The eigenvalue moduli are given to one decimal.
"""

from __future__ import annotations

TABLE1 = {
    (1.5, 0.6): {
        8: (0.7, 1.0, 7, 8.58e-3),
        16: (0.6, 1.1, 12, 2.03e-3),
        32: (0.6, 1.2, 12, 5.39e-4),
        64: (0.6, 1.3, 12, 1.31e-4),
        128: (0.6, 1.5, 12, 3.24e-5),
        256: (0.6, 1.6, 12, 8.08e-6),
        512: (0.6, 1.7, 13, 2.02e-6),
        1024: (0.6, 1.7, 13, 5.04e-7),
    },
    (1.9, 0.7): {
        8: (0.4, 1.0, 6, 2.66e-3),
        16: (0.2, 1.7, 8, 3.69e-4),
        32: (0.2, 3.0, 8, 5.49e-5),
        64: (0.1, 5.0, 8, 7.46e-6),
        128: (0.1, 7.4, 8, 1.06e-6),
        256: (0.1, 9.9, 8, 1.53e-7),
        512: (0.1, 12.7, 8, 2.21e-8),
        1024: (0.1, 21.1, 8, 3.69e-9),
    },
}

ERROR_FACTOR = 3.0
ITER_SLACK = 3
SIGMA_SLACK = 0.05

#: IVP preset: iteration cap and condition bound for the Birkhoff schemes
SEC61_MAX_ITER = 12
SEC61_MAX_COND = 100.0


def compare_table1(mu: float, nu: float, N: int, sigma2, sigmaNm2, iterations, error):
    """Per-column pass flags against the reference row, or ``None`` if there is none."""
    row = TABLE1.get((round(mu, 6), round(nu, 6)), {}).get(N)
    if row is None:
        return None
    s2, sN2, it, err = row
    out = {
        "error_l2": err / ERROR_FACTOR <= error <= err * ERROR_FACTOR,
        "iterations": abs(iterations - it) <= ITER_SLACK,
    }
    if sigma2 is not None:
        out["sigma2"] = abs(sigma2 - s2) <= SIGMA_SLACK
        out["sigmaNm2"] = abs(sigmaNm2 - sN2) <= SIGMA_SLACK
    return out
