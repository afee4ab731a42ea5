"""Collocation schemes for fractional initial and boundary value problems.

Three kinds of problem are supported:

* ``ivp-caputo``: :math:`D^\\mu u + \\lambda u = f`, ``u(-1) = u_-``, ``mu`` in (0, 1);
* ``bvp-caputo``: :math:`D^\\mu u + \\lambda_1 D^\\nu u + \\lambda_2 u = f`
  with both end values, ``mu`` in (1, 2);
* ``bvp-rl``: the same with Riemann-Liouville derivatives, collocated after
  multiplying through by :math:`(1+x)^\\mu`.

Each can be discretized in the Lagrange basis (``L-COL``), in the Birkhoff
basis (``B-COL``), or in the Lagrange basis preconditioned by the Birkhoff
matrix (``PL-COL``).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .birkhoff import birkhoff_basis, birkhoff_matrix, frac_derivative, lower_order_matrix
from .errors import DomainError, NumericError
from .fracmat import CAPUTO, RL, FracOrder, fpsdm
from .manufactured import BVP_RL, IVP_CAPUTO, KINDS, Preset, make_preset
from .orthopoly import JacobiParam, _as_param
from .quadrature import jacobi_gauss_lobatto, lagrange_coeffs, lagrange_eval

LCOL = "L-COL"
BCOL = "B-COL"
PLCOL = "PL-COL"
SCHEMES = (LCOL, BCOL, PLCOL)

DEFAULT_TOL = 1.0e-12
#: size of the uniform grid used by :func:`l2_error`
FINE_GRID = 2001
#: largest size for which the direct solver is offered
LU_MAX_N = 512


@dataclass(frozen=True)
class CollocationProblem:
    kind: str
    mu: FracOrder
    lam: tuple[Callable, ...]
    rhs: Callable
    data: tuple[float, ...]
    N: int
    params: JacobiParam
    scheme: str = BCOL
    nu: float | None = None
    exact: Callable | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "params", _as_param(self.params))
        if self.kind not in KINDS:
            raise DomainError(f"unknown problem kind {self.kind!r}")
        if self.scheme not in SCHEMES:
            raise DomainError(f"unknown scheme {self.scheme!r}")

        want = CAPUTO if self.kind != BVP_RL else RL
        if self.mu.flavor != want:
            raise DomainError(f"{self.kind} needs a {want} order")
        if self.kind == IVP_CAPUTO:
            if self.mu.k != 1 or len(self.lam) != 1 or len(self.data) != 1:
                raise DomainError("an IVP needs mu in (0, 1), one coefficient and u(-1)")
            if self.N < 1:
                raise DomainError("an IVP needs N >= 1")
        else:
            if self.mu.k != 2 or len(self.lam) != 2 or len(self.data) != 2:
                raise DomainError("a BVP needs mu in (1, 2), two coefficients and u(+-1)")
            if self.nu is None or not 0.0 < self.nu < self.mu.mu or self.nu == 1.0:
                raise DomainError(f"need 0 < nu < mu with nu != 1: got {self.nu}")
            if self.N < 2:
                raise DomainError("a BVP needs N >= 2")

    @property
    def rule(self):
        return jacobi_gauss_lobatto(self.N, self.params)

    @property
    def interior(self) -> slice:
        return slice(1, self.N + 1) if self.mu.k == 1 else slice(1, self.N)


@dataclass
class SolveReport:
    nodal_values: np.ndarray
    iterations: int
    residual: float
    birkhoff_unknowns: np.ndarray | None = None
    condition_estimate: float | None = None
    error_l2: float | None = None
    matrix: np.ndarray | None = field(default=None, repr=False)
    wall_ms: float = 0.0
    #: "bicgstab", "lu", or "lu-fallback" after BiCGSTAB gave up
    method: str = "bicgstab"


def from_preset(
    preset: Preset | str,
    N: int,
    scheme: str = BCOL,
    params=None,
    mu: float | None = None,
    nu: float | None = None,
) -> CollocationProblem:
    """Build a problem whose right-hand side comes from the preset's exact solution."""
    if isinstance(preset, str):
        preset = make_preset(preset, mu, nu)
    params = preset.params if params is None else params
    exact, deriv = preset.exact, preset.deriv
    order = FracOrder(preset.mu, RL if preset.kind == BVP_RL else CAPUTO)

    if preset.kind == IVP_CAPUTO:
        (lam,) = preset.lam

        def rhs(x):
            return deriv(CAPUTO, order.mu, x) + lam(x) * exact(x)

        data = (float(exact(-1.0)),)
    else:
        lam1, lam2 = preset.lam
        flavor = order.flavor

        def rhs(x):
            return (
                deriv(flavor, order.mu, x)
                + lam1(x) * deriv(flavor, preset.nu, x)
                + lam2(x) * exact(x)
            )

        data = (float(exact(-1.0)), float(exact(1.0)))

    return CollocationProblem(
        preset.kind, order, preset.lam, rhs, data, N, params, scheme, preset.nu, exact
    )


# {{{ assembly


def _hatted(problem: CollocationProblem, x: np.ndarray):
    """Coefficients and right-hand side at *x* of the collocated equation."""
    y = 1.0 + x
    mu, nu = problem.mu.mu, problem.nu
    if problem.kind == IVP_CAPUTO:
        return (problem.lam[0](x),), problem.rhs(x)
    lam1, lam2 = problem.lam[0](x), problem.lam[1](x)
    f = problem.rhs(x)
    if problem.kind == BVP_RL:
        return (y ** (mu - nu) * lam1, y**mu * lam2), y**mu * f
    return (lam1, lam2), f


def _lcol_parts(problem: CollocationProblem):
    """Interior system pieces: (D_in, lower-order part, rhs after boundary lift)."""
    rule = problem.rule
    idx = problem.interior
    x = rule.nodes[idx]
    D = fpsdm(rule, problem.mu).full
    lam, f = _hatted(problem, x)
    ends = [0] if problem.kind == IVP_CAPUTO else [0, problem.N]
    ub = np.asarray(problem.data, dtype=np.float64)

    if problem.kind == IVP_CAPUTO:
        low = np.diag(lam[0])
        rhs = f - D[idx][:, ends] @ ub
        return D[idx, idx], low, rhs

    Dnu = fpsdm(rule, FracOrder(problem.nu, problem.mu.flavor)).full
    low = lam[0][:, None] * Dnu[idx, idx] + np.diag(lam[1])
    rhs = f - (D[idx][:, ends] + lam[0][:, None] * Dnu[idx][:, ends]) @ ub
    return D[idx, idx], low, rhs


def assemble_lcol(problem: CollocationProblem):
    """Lagrange-basis system for the interior nodal values."""
    Din, low, rhs = _lcol_parts(problem)
    return Din + low, rhs


def precondition_lcol(problem: CollocationProblem):
    """The Lagrange system multiplied on the left by the Birkhoff matrix."""
    _, low, rhs = _lcol_parts(problem)
    Q = birkhoff_matrix(birkhoff_basis(problem.rule, problem.mu)).Q
    return np.eye(Q.shape[0]) + Q @ low, Q @ rhs


def _lift(problem: CollocationProblem, basis, x: np.ndarray) -> np.ndarray:
    """Boundary part of the Birkhoff expansion evaluated at *x*."""
    ub = np.asarray(problem.data, dtype=np.float64)
    if problem.kind == IVP_CAPUTO:
        return np.full(x.shape, ub[0])
    vals = basis.evaluate(x)
    return vals[:, [0, problem.N]] @ ub


def assemble_bcol(problem: CollocationProblem, *, via_matrix: bool = False):
    """Birkhoff-basis system for the derivative values at the interior nodes."""
    rule = problem.rule
    idx = problem.interior
    x = rule.nodes[idx]
    basis = birkhoff_basis(rule, problem.mu)
    Q = birkhoff_matrix(basis).Q
    lam, f = _hatted(problem, x)
    n = Q.shape[0]

    if problem.kind == IVP_CAPUTO:
        A = np.eye(n) + lam[0][:, None] * Q
        return A, f - lam[0] * problem.data[0]

    Qnu = lower_order_matrix(basis, problem.nu, via_matrix=via_matrix)
    A = np.eye(n) + lam[0][:, None] * Qnu + lam[1][:, None] * Q

    ub = np.asarray(problem.data, dtype=np.float64)
    ends = [0, problem.N]
    if via_matrix:
        M = fpsdm(rule, FracOrder(problem.nu, problem.mu.flavor)).full
        dlift = (M @ basis.evaluate(rule.nodes)[:, ends])[idx] @ ub
    else:
        dlift = frac_derivative(basis, problem.nu, x)[:, ends] @ ub
    g = f - lam[0] * dlift - lam[1] * _lift(problem, basis, x)
    return A, g


# }}}


# {{{ BiCGSTAB


def bicgstab(A, b, tol: float = DEFAULT_TOL, max_iter: int | None = None, x0=None):
    """Unpreconditioned BiCGSTAB.

    Returns ``(x, iterations, relative_residual)``; a half-step that already
    meets the tolerance counts as a full iteration. On breakdown the method
    restarts once from the current iterate.
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n = b.size
    if A.shape != (n, n):
        raise DomainError(f"expected a square system of size {n}, got {A.shape}")
    max_iter = 5 * n if max_iter is None else max_iter
    bnorm = np.linalg.norm(b)
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=np.float64)
    if bnorm == 0.0:
        return np.zeros(n), 0, 0.0

    tiny = np.finfo(float).tiny
    iters = 0
    best = (x.copy(), np.inf)
    restarted = False

    while True:
        r = b - A @ x
        rel = np.linalg.norm(r) / bnorm
        if rel <= tol:
            return x, iters, rel
        r_hat = r.copy()
        rho_old = alpha = omega = 1.0
        v = np.zeros(n)
        p = np.zeros(n)
        broke = False

        while iters < max_iter:
            rho = r_hat @ r
            if abs(rho) <= tiny or omega == 0.0:
                broke = True
                break
            beta = (rho / rho_old) * (alpha / omega)
            p = r + beta * (p - omega * v)
            v = A @ p
            denom = r_hat @ v
            if abs(denom) <= tiny:
                broke = True
                break
            alpha = rho / denom
            s = r - alpha * v
            iters += 1

            srel = np.linalg.norm(s) / bnorm
            if srel <= tol:
                x = x + alpha * p
                return x, iters, srel

            t = A @ s
            tt = t @ t
            if tt <= tiny:
                broke = True
                x = x + alpha * p
                break
            omega = (t @ s) / tt
            x = x + alpha * p + omega * s
            r = s - omega * t
            rho_old = rho

            rel = np.linalg.norm(r) / bnorm
            if rel < best[1]:
                best = (x.copy(), rel)
            if rel <= tol:
                return x, iters, rel

        if broke and not restarted:
            restarted = True
            continue
        reason = "breakdown" if broke else f"no convergence in {max_iter} iterations"
        raise NumericError(f"BiCGSTAB {reason} (residual {best[1]:.3e})", best=best[0])


def lu_solve_dense(A, b):
    """Direct solve by LU with partial pivoting, for moderate sizes."""
    A = np.asarray(A, dtype=np.float64)
    if A.shape[0] > LU_MAX_N:
        raise DomainError(f"direct solves are limited to N <= {LU_MAX_N}")
    x = lu_solve(lu_factor(A), b)
    rel = np.linalg.norm(b - A @ x) / max(np.linalg.norm(b), np.finfo(float).tiny)
    return x, 0, float(rel)


# }}}


def solve(
    problem: CollocationProblem,
    tol: float = DEFAULT_TOL,
    *,
    direct: bool = False,
    fallback: bool = False,
    condition: bool = False,
    keep_matrix: bool = False,
    seed: int = 0,
) -> SolveReport:
    """Assemble, solve, and measure one problem.

    With *fallback*, a BiCGSTAB failure is answered by a direct solve and
    the report says so; otherwise the :class:`NumericError` propagates.
    """
    start = time.perf_counter()
    builders = {LCOL: assemble_lcol, BCOL: assemble_bcol, PLCOL: precondition_lcol}
    A, rhs = builders[problem.scheme](problem)

    method = "lu" if direct else "bicgstab"
    if direct:
        sol, iters, res = lu_solve_dense(A, rhs)
    else:
        try:
            sol, iters, res = bicgstab(A, rhs, tol)
        except NumericError:
            if not fallback or A.shape[0] > LU_MAX_N:
                raise
            sol, _, res = lu_solve_dense(A, rhs)
            iters, method = 5 * A.shape[0], "lu-fallback"

    rule = problem.rule
    idx = problem.interior
    nodal = np.empty(problem.N + 1)
    v = None
    if problem.scheme == BCOL:
        v = sol
        basis = birkhoff_basis(rule, problem.mu)
        nodal[:] = _lift(problem, basis, rule.nodes)
        nodal += basis.evaluate(rule.nodes)[:, idx] @ v
    else:
        nodal[idx] = sol
    nodal[0] = problem.data[0]
    if problem.kind != IVP_CAPUTO:
        nodal[problem.N] = problem.data[1]

    report = SolveReport(nodal, iters, float(res), birkhoff_unknowns=v, method=method)
    if condition:
        from .spectra import cond2_estimate

        report.condition_estimate = cond2_estimate(A, seed)
    if keep_matrix:
        report.matrix = A
    if problem.exact is not None:
        report.error_l2 = l2_error(reconstruct(problem, report), problem.exact)
    report.wall_ms = 1e3 * (time.perf_counter() - start)
    return report


def reconstruct(problem: CollocationProblem, report: SolveReport) -> Callable:
    """Evaluator of the computed polynomial anywhere in [-1, 1]."""
    rule = problem.rule

    if report.birkhoff_unknowns is not None:
        basis = birkhoff_basis(rule, problem.mu)
        idx = problem.interior
        v = report.birkhoff_unknowns

        def u(x):
            xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
            out = _lift(problem, basis, xs) + basis.evaluate(xs)[:, idx] @ v
            return float(out[0]) if np.ndim(x) == 0 else out

        return u

    coeffs = lagrange_coeffs(rule)
    nodal = report.nodal_values

    def u(x):
        out = nodal @ lagrange_eval(coeffs, slice(None), x)
        return float(out) if np.ndim(x) == 0 else out

    return u


def l2_error(solution: Callable, reference: Callable, n: int = FINE_GRID) -> float:
    """Root mean square difference on ``n`` equispaced points of [-1, 1]."""
    x = np.linspace(-1.0, 1.0, n)
    d = np.asarray(solution(x)) - np.asarray(reference(x))
    return float(math.sqrt(np.mean(d * d)))


def with_scheme(problem: CollocationProblem, scheme: str) -> CollocationProblem:
    return replace(problem, scheme=scheme)
