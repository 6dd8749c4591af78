"""Preconditioned Krylov solvers: BiCGSTAB, BiCGSTAB(l), TFQMR.

All three methods share the same protocol: relative residual tolerance
(default 1e-9), zero initial guess unless one is supplied, and an iteration
cap (default 1000) after which non-convergence is reported as data, not as an
error. Preconditioning is applied from the right, so the residual the solver
tracks and reports is the residual of the original system; on top of that,
every history entry is a freshly recomputed ||b - A x|| / ||r0||, never a
recurrence estimate, so reported residuals are genuine by construction.

Inner products follow the conjugated-dot convention with the shadow vector in
the conjugated slot. Scalar recurrences divide via Smith's algorithm (see
:mod:`zlinalg.cnum`). Denominators smaller than 1e-300 in magnitude raise
:class:`~zlinalg.errors.BreakdownError` carrying the partial report.

References
----------
H. A. van der Vorst, Bi-CGSTAB, SIAM J. Sci. Stat. Comput. 13 (1992).
G. L. G. Sleijpen and D. R. Fokkema, BiCGstab(l) for linear equations
involving unsymmetric matrices with complex spectrum, ETNA 1 (1993).
R. W. Freund, A transpose-free quasi-minimal residual algorithm for
non-Hermitian linear systems, SIAM J. Sci. Comput. 14 (1993).
Y. Saad, Iterative Methods for Sparse Linear Systems, 2nd ed., SIAM (2003).
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .cnum import Cplx
from .errors import BreakdownError, DimensionError, ParameterError, SingularPreconditionerError
from .sparse import CsrMatrix, spmv
from .vecops import ZVector, zaxpy, zdot, znorm2, zscal

__all__ = [
    "SolverConfig",
    "Preconditioner",
    "SolveReport",
    "build_jacobi",
    "solve_bicgstab",
    "solve_bicgstab_l",
    "solve_tfqmr",
]

_BREAKDOWN_EPS = 1e-300


@dataclass(frozen=True)
class SolverConfig:
    """Shared solver protocol knobs.

    ``l`` is the polynomial degree used by BiCGSTAB(l) only (default 8).
    ``initial_guess`` of None means the zero vector. For BiCGSTAB(l) one
    iteration is one outer cycle (l BiCG steps plus one minimal-residual
    polynomial update).
    """

    tolerance: float = 1e-9
    max_iterations: int = 1000
    initial_guess: ZVector | None = None
    l: int = 8

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ParameterError(f"tolerance must be positive, got {self.tolerance!r}")
        if self.max_iterations < 1:
            raise ParameterError(f"max_iterations must be >= 1, got {self.max_iterations!r}")
        if self.l < 1:
            raise ParameterError(f"polynomial degree l must be >= 1, got {self.l!r}")


class Preconditioner:
    """Right preconditioner: identity, or Jacobi (stored inverse diagonal)."""

    __slots__ = ("kind", "data")

    def __init__(self, kind: str, data: np.ndarray | None = None):
        if kind not in ("identity", "jacobi"):
            raise ParameterError(f"unknown preconditioner kind {kind!r}")
        if kind == "jacobi" and data is None:
            raise ParameterError("jacobi preconditioner needs the inverse diagonal")
        self.kind = kind
        self.data = data

    @classmethod
    def identity(cls) -> "Preconditioner":
        return cls("identity")

    def apply(self, v: ZVector) -> ZVector:
        """Apply the stored inverse to v as a new vector; identity is a plain copy."""
        if self.kind == "identity":
            return v.copy()
        if self.data.shape[0] != len(v):
            raise DimensionError(
                f"preconditioner built for size {self.data.shape[0]}, vector has {len(v)}"
            )
        return ZVector(v.data * self.data)

    def __repr__(self):
        return f"Preconditioner({self.kind})"


def build_jacobi(A: CsrMatrix) -> Preconditioner:
    """Jacobi preconditioner from the inverse main diagonal of A.

    Raises
    ------
    SingularPreconditionerError
        If any diagonal entry is missing or exactly zero, naming the row.
    """
    diag = A.diagonal()
    zero = np.flatnonzero(diag == 0)
    if zero.size:
        raise SingularPreconditionerError(
            f"zero diagonal entry at row {int(zero[0])}; Jacobi preconditioner is singular"
        )
    return Preconditioner("jacobi", np.divide(1.0, diag))


@dataclass
class SolveReport:
    """Bookkeeping for one solve.

    ``residual_history[0]`` is the initial relative residual (1.0 for a fresh
    start); one more entry is appended per iteration, and the last entry
    always equals ``final_relative_residual``.
    """

    iterations: int = 0
    final_relative_residual: float = math.inf
    converged: bool = False
    residual_history: list = field(default_factory=list)
    elapsed_ms: float = 0.0


class _Run:
    """Shared solve state: residual bookkeeping, truthful convergence checks.

    Relative residuals are normalized by ||b||, which equals ||r0|| under the
    default zero initial guess; this keeps the reported value identical to an
    independent ||b - A x|| / ||b|| recomputation even when a guess is given.
    """

    def __init__(self, A: CsrMatrix, b: ZVector, M: Preconditioner | None, cfg: SolverConfig):
        n = A.n  # raises for rectangular
        if len(b) != n:
            raise DimensionError(f"matrix is {n}x{n} but right-hand side has {len(b)} elements")
        self.A = A
        self.b = b
        self.M = M if M is not None else Preconditioner.identity()
        if self.M.kind == "jacobi" and self.M.data.shape[0] != n:
            raise DimensionError(
                f"preconditioner built for size {self.M.data.shape[0]}, matrix is {n}x{n}"
            )
        self.cfg = cfg
        self.t0 = time.perf_counter()
        self.x0 = cfg.initial_guess.copy() if cfg.initial_guess is not None else ZVector.zeros(n)
        if cfg.initial_guess is not None and len(self.x0) != n:
            raise DimensionError(f"initial guess has {len(self.x0)} elements, need {n}")
        self.b_norm = znorm2(b)
        r0 = b.copy()
        zaxpy(Cplx(-1.0), spmv(A, self.x0), r0)
        self.r0 = r0
        self.r0_norm = znorm2(r0)
        self.history = [self.r0_norm / self.b_norm if self.b_norm > 0.0 else 0.0]
        self.iterations = 0

    def trivial_result(self):
        """Immediately solved cases: zero right-hand side, or a guess whose
        residual already vanishes. None when the iteration must run."""
        if self.b_norm == 0.0:
            report = self.report(converged=True)
            report.residual_history = [0.0]
            report.final_relative_residual = 0.0
            return ZVector.zeros(len(self.b)), report
        if self.history[0] <= self.cfg.tolerance:
            return self.x0, self.report(converged=True)
        return None

    def true_relative_residual(self, x: ZVector) -> float:
        r = self.b.copy()
        zaxpy(Cplx(-1.0), spmv(self.A, x), r)
        return znorm2(r) / self.b_norm

    def record(self, rel: float) -> None:
        self.iterations += 1
        self.history.append(rel)

    def report(self, converged: bool) -> SolveReport:
        return SolveReport(
            iterations=self.iterations,
            final_relative_residual=self.history[-1],
            converged=converged,
            residual_history=list(self.history),
            elapsed_ms=(time.perf_counter() - self.t0) * 1e3,
        )

    def breakdown(self, what: str) -> BreakdownError:
        return BreakdownError(
            f"{what} numerically zero (|value| < {_BREAKDOWN_EPS:g}) "
            f"after {self.iterations} iterations",
            report=self.report(converged=False),
        )


def _small(value) -> bool:
    return abs(value) < _BREAKDOWN_EPS


def solve_bicgstab(A, b, M=None, cfg=None):
    """Right-preconditioned BiCGSTAB (van der Vorst).

    Parameters
    ----------
    A : CsrMatrix
        Square system matrix.
    b : ZVector
        Right-hand side.
    M : Preconditioner, optional
        Right preconditioner; identity when omitted.
    cfg : SolverConfig, optional
        Tolerance / iteration-cap / initial-guess protocol.

    Returns
    -------
    (ZVector, SolveReport)
        The approximate solution and its bookkeeping. Non-convergence at the
        iteration cap is a normal return with ``converged=False``.

    Raises
    ------
    BreakdownError
        When a recurrence denominator (rho, the shadow pivot, or omega)
        collapses; the partial report rides on the exception.
    """
    cfg = cfg or SolverConfig()
    run = _Run(A, b, M, cfg)
    trivial = run.trivial_result()
    if trivial is not None:
        return trivial

    x = run.x0
    r = run.r0.copy()
    r_shadow = run.r0.copy()
    rho = Cplx(1.0)
    alpha = Cplx(1.0)
    omega = Cplx(1.0)
    v = ZVector.zeros(len(b))
    p = ZVector.zeros(len(b))

    while run.iterations < cfg.max_iterations:
        rho_next = zdot(r_shadow, r, conjugate=True)
        if _small(rho):
            raise run.breakdown("rho")
        if _small(omega):
            raise run.breakdown("omega")
        beta = (rho_next / rho) * (alpha / omega)
        rho = rho_next
        # p = r + beta * (p - omega * v)
        zaxpy(-omega, v, p)
        zscal(beta, p)
        zaxpy(Cplx(1.0), r, p)
        p_hat = run.M.apply(p)
        v = spmv(A, p_hat)
        pivot = zdot(r_shadow, v, conjugate=True)
        if _small(pivot):
            raise run.breakdown("shadow pivot <r~, A M^-1 p>")
        alpha = rho / pivot
        s = r.copy()
        zaxpy(-alpha, v, s)
        zaxpy(alpha, p_hat, x)
        if znorm2(s) / run.b_norm <= cfg.tolerance:
            rel = run.true_relative_residual(x)
            if rel <= cfg.tolerance:
                run.record(rel)
                return x, run.report(converged=True)
        s_hat = run.M.apply(s)
        t = spmv(A, s_hat)
        t_sq = zdot(t, t, conjugate=True)
        if _small(t_sq):
            raise run.breakdown("omega denominator <t, t>")
        omega = zdot(t, s, conjugate=True) / t_sq
        if _small(omega):
            raise run.breakdown("omega")
        zaxpy(omega, s_hat, x)
        r = s
        zaxpy(-omega, t, r)
        rel = run.true_relative_residual(x)
        run.record(rel)
        if rel <= cfg.tolerance:
            return x, run.report(converged=True)
    return x, run.report(converged=False)


def solve_bicgstab_l(A, b, M=None, cfg=None):
    """Right-preconditioned BiCGSTAB(l) (Sleijpen-Fokkema).

    Each outer cycle runs l BiCG steps followed by a degree-l minimal-residual
    polynomial update whose least-squares system is solved by modified
    Gram-Schmidt on the residual stack. ``cfg.l`` fixes the degree (default 8);
    ``cfg.max_iterations`` caps the number of cycles, and the residual history
    gains one entry per cycle (or per early exit inside a cycle).

    Returns and raises as :func:`solve_bicgstab`; a numerically singular
    least-squares system inside the polynomial step is also a breakdown.
    """
    cfg = cfg or SolverConfig()
    ell = cfg.l
    run = _Run(A, b, M, cfg)
    trivial = run.trivial_result()
    if trivial is not None:
        return trivial

    n = len(b)

    def op(vec: ZVector) -> ZVector:
        return spmv(A, run.M.apply(vec))

    def current_x(acc: ZVector) -> ZVector:
        x = run.x0.copy()
        zaxpy(Cplx(1.0), run.M.apply(acc), x)
        return x

    # Solution updates accumulate in the preconditioned variable; the true
    # iterate is x0 + M^-1 * acc, formed only for residual checks and output.
    acc = ZVector.zeros(n)
    r = [run.r0.copy()] + [ZVector.zeros(n) for _ in range(ell)]
    u = [ZVector.zeros(n) for _ in range(ell + 1)]
    r_shadow = run.r0.copy()
    rho = Cplx(1.0)
    alpha = Cplx(0.0)
    omega = Cplx(1.0)

    while run.iterations < cfg.max_iterations:
        if _small(omega):
            raise run.breakdown("omega")
        rho = -omega * rho

        # BiCG part: l steps, probing the recurrence residual for early exit.
        for j in range(ell):
            rho_next = zdot(r_shadow, r[j], conjugate=True)
            if _small(rho):
                raise run.breakdown("rho")
            beta = alpha * (rho_next / rho)
            rho = rho_next
            for i in range(j + 1):
                zscal(-beta, u[i])
                zaxpy(Cplx(1.0), r[i], u[i])
            u[j + 1] = op(u[j])
            pivot = zdot(r_shadow, u[j + 1], conjugate=True)
            if _small(pivot):
                raise run.breakdown("shadow pivot")
            alpha = rho / pivot
            for i in range(j + 1):
                zaxpy(-alpha, u[i + 1], r[i])
            r[j + 1] = op(r[j])
            zaxpy(alpha, u[0], acc)
            if znorm2(r[0]) / run.b_norm <= cfg.tolerance:
                x = current_x(acc)
                rel = run.true_relative_residual(x)
                if rel <= cfg.tolerance:
                    run.record(rel)
                    return x, run.report(converged=True)

        # Minimal-residual part: modified Gram-Schmidt on r[1..l], then the
        # triangular back-substitutions for the polynomial coefficients.
        tau = [[Cplx(0.0)] * (ell + 1) for _ in range(ell + 1)]
        sigma = [0.0] * (ell + 1)
        gamma_p = [Cplx(0.0)] * (ell + 1)
        for j in range(1, ell + 1):
            for i in range(1, j):
                tij = zdot(r[i], r[j], conjugate=True) / sigma[i]
                tau[i][j] = tij
                zaxpy(-tij, r[i], r[j])
            sigma[j] = zdot(r[j], r[j], conjugate=True).re
            if _small(sigma[j]):
                raise run.breakdown(f"minimal-residual basis vector {j}")
            gamma_p[j] = zdot(r[j], r[0], conjugate=True) / sigma[j]
        gamma = [Cplx(0.0)] * (ell + 1)
        gamma[ell] = gamma_p[ell]
        omega = gamma[ell]
        for j in range(ell - 1, 0, -1):
            s = Cplx(0.0)
            for i in range(j + 1, ell + 1):
                s = s + tau[j][i] * gamma[i]
            gamma[j] = gamma_p[j] - s
        gamma_pp = [Cplx(0.0)] * (ell + 1)
        for j in range(1, ell):
            s = Cplx(0.0)
            for i in range(j + 1, ell):
                s = s + tau[j][i] * gamma[i + 1]
            gamma_pp[j] = gamma[j + 1] + s

        zaxpy(gamma[1], r[0], acc)
        zaxpy(-gamma_p[ell], r[ell], r[0])
        zaxpy(-gamma[ell], u[ell], u[0])
        for j in range(1, ell):
            zaxpy(-gamma[j], u[j], u[0])
            zaxpy(gamma_pp[j], r[j], acc)
            zaxpy(-gamma_p[j], r[j], r[0])

        x = current_x(acc)
        rel = run.true_relative_residual(x)
        run.record(rel)
        if rel <= cfg.tolerance:
            return x, run.report(converged=True)
    return current_x(acc), run.report(converged=False)


def solve_tfqmr(A, b, M=None, cfg=None):
    """Right-preconditioned transpose-free QMR (Freund).

    Two half-steps advance the iterate per iteration; after each half-step the
    solver recomputes the true residual ||b - A x|| and tests it against the
    tolerance, so convergence never relies on the quasi-residual bound alone.

    Returns and raises as :func:`solve_bicgstab`.
    """
    cfg = cfg or SolverConfig()
    run = _Run(A, b, M, cfg)
    trivial = run.trivial_result()
    if trivial is not None:
        return trivial

    x = run.x0
    w = run.r0.copy()
    y = run.r0.copy()
    r_shadow = run.r0.copy()
    d = ZVector.zeros(len(b))
    z = run.M.apply(y)
    uvec = spmv(A, z)
    v = uvec.copy()
    theta = 0.0
    eta = Cplx(0.0)
    tau = run.r0_norm
    rho = zdot(r_shadow, run.r0, conjugate=True)

    while run.iterations < cfg.max_iterations:
        sigma = zdot(r_shadow, v, conjugate=True)
        if _small(sigma):
            raise run.breakdown("sigma = <r~, v>")
        alpha = rho / sigma
        if _small(alpha):
            raise run.breakdown("alpha")
        rel = math.inf
        converged = False
        for half in range(2):
            if half == 1:
                zaxpy(-alpha, v, y)
                z = run.M.apply(y)
                uvec = spmv(A, z)
            zaxpy(-alpha, uvec, w)
            # d = z + (theta^2 * eta / alpha) * d
            zscal((theta * theta) * eta / alpha, d)
            zaxpy(Cplx(1.0), z, d)
            if _small(tau):
                raise run.breakdown("quasi-residual tau")
            theta = znorm2(w) / tau
            c = 1.0 / math.sqrt(1.0 + theta * theta)
            tau = tau * theta * c
            eta = (c * c) * alpha
            zaxpy(eta, d, x)
            rel = run.true_relative_residual(x)
            if rel <= cfg.tolerance:
                converged = True
                break
        run.record(rel)
        if converged:
            return x, run.report(converged=True)
        rho_next = zdot(r_shadow, w, conjugate=True)
        if _small(rho):
            raise run.breakdown("rho")
        beta = rho_next / rho
        rho = rho_next
        # y = w + beta * y
        zscal(beta, y)
        zaxpy(Cplx(1.0), w, y)
        u_old = uvec
        z = run.M.apply(y)
        uvec = spmv(A, z)
        # v = u_new + beta * (u_old + beta * v)
        zscal(beta, v)
        zaxpy(Cplx(1.0), u_old, v)
        zscal(beta, v)
        zaxpy(Cplx(1.0), uvec, v)
    return x, run.report(converged=False)
