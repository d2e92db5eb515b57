"""Optimization over density matrices and a small log-barrier SDP solver.

``density_maximize`` runs entropic mirror ascent
``rho <- exp(log rho + eta G) / Tr`` with an adaptive step. For concave
objectives it stops on the Frank-Wolfe gap ``lambda_max(G) - Tr rho G``, which
bounds the distance to the optimum. Nonconcave objectives get seeded
multi-start runs instead.

``barrier_sdp`` solves ``min Tr Y s.t. L(Y) >= rho, Y >= 0`` for a positive
linear map ``L`` with a damped Newton method on the standard log-barrier.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from . import linalg
from .errors import NumericalError, ValidationError

Objective = Callable[[np.ndarray], float]
Gradient = Callable[[np.ndarray], np.ndarray]

FD_STEP = 1e-5
MIN_STEP = 1e-16


@dataclass(frozen=True)
class NumericPolicy:
    """Numeric knobs shared by every optimization."""

    eigen_cutoff: float = 1e-14
    opt_tol: float = 1e-8
    max_iter: int = 5000
    restarts: int = 8
    step_init: float = 1.0
    seed: int = 42

    def __post_init__(self):
        for name in ("eigen_cutoff", "opt_tol", "step_init"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive, got {getattr(self, name)}")
        if self.max_iter < 1 or self.restarts < 1:
            raise ValidationError("max_iter and restarts must be at least 1")
        if self.seed < 0:
            raise ValidationError(f"seed must be non-negative, got {self.seed}")

    def replace(self, **changes) -> "NumericPolicy":
        values = {k: getattr(self, k) for k in self.__dataclass_fields__}
        values.update(changes)
        return NumericPolicy(**values)


@dataclass
class OptimizationReport:
    """Outcome of an optimization.

    ``fw_gap`` is set for concave runs. For multi-start runs ``spread`` is the
    gap between the best and worst restart values and ``converged`` means
    ``spread <= opt_tol``.
    """

    value: float
    optimizer_state: Optional[np.ndarray]
    fw_gap: Optional[float]
    iterations: int
    restarts_used: int
    converged: bool
    route: str = ""
    spread: Optional[float] = None
    details: dict = field(default_factory=dict)

    @property
    def certificate(self) -> Optional[float]:
        return self.fw_gap if self.fw_gap is not None else self.spread


class _Run(NamedTuple):
    value: float
    rho: np.ndarray
    gap: float
    iterations: int


def restart_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for restart ``index`` derived from ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def fd_gradient(objective: Objective, rho: np.ndarray, step: float = FD_STEP) -> np.ndarray:
    """Central finite-difference gradient over an orthonormal Hermitian basis.

    The step is capped at half the smallest eigenvalue so every probe stays PSD.
    """
    d = rho.shape[0]
    lam_min = linalg.eigvalsh(rho)[0]
    h = min(step, 0.5 * lam_min) if lam_min > 0 else step
    grad = np.zeros((d, d), dtype=np.complex128)
    for e in linalg.hermitian_basis(d):
        df = objective(rho + h * e) - objective(rho - h * e)
        grad += (df / (2.0 * h)) * e
    return grad


def fw_gap(grad: np.ndarray, rho: np.ndarray) -> float:
    g = linalg.hermitian_part(grad)
    return float(linalg.lambda_max(g) - np.real(np.vdot(g, rho)))


LOG_FLOOR = 28.0


def _exp_normalized(logm: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(rho, log rho)`` for ``rho = exp(logm) / Tr``.

    The log-spectrum is floored ``LOG_FLOOR`` below its maximum, so the
    smallest eigenvalue stays near ``1e-12`` of the largest and above the
    round-off of the reconstruction.
    """
    w, v = linalg.hermitian_eig(linalg.hermitian_part(logm), check=False)
    w = np.maximum(w - w[-1], -LOG_FLOOR)
    p = np.exp(w)
    total = p.sum()
    return linalg.reconstruct(v, p / total), linalg.reconstruct(v, w - np.log(total))


def _evaluate(objective: Objective, rho: np.ndarray, it: int) -> float:
    val = float(objective(rho))
    if math.isnan(val):
        raise NumericalError(f"objective returned NaN at iteration {it} (trace {np.trace(rho).real:.6g})")
    return val


def _mirror_ascent(
    objective: Objective,
    gradient: Gradient,
    rho0: np.ndarray,
    policy: NumericPolicy,
    gap_tol: float,
    max_iter: int,
) -> _Run:
    rho, logm = _exp_normalized(
        linalg.matrix_func(rho0, lambda x: np.log(np.maximum(x, 1e-300)), "full")
    )
    f = _evaluate(objective, rho, 0)
    eta = policy.step_init
    g = linalg.hermitian_part(gradient(rho))
    gap = fw_gap(g, rho)
    it = 0
    while it < max_iter and gap > gap_tol:
        it += 1
        noise = 1e-14 * max(1.0, abs(f))
        # scale so that eta is in units of the gradient spread
        spread = np.ptp(linalg.eigvalsh(g)) or 1.0
        accepted = False
        while eta >= MIN_STEP:
            trial, trial_log = _exp_normalized(logm + (eta / spread) * g)
            ft = _evaluate(objective, trial, it)
            if ft > f + noise:
                gt = linalg.hermitian_part(gradient(trial))
                accepted = True
                eta *= 1.5
                break
            if ft >= f - noise:
                # change below round-off: accept only if stationarity improves
                gt = linalg.hermitian_part(gradient(trial))
                if fw_gap(gt, trial) < gap:
                    accepted = True
                    break
            eta *= 0.5
        if not accepted:
            break
        logm = trial_log
        rho, f, g = trial, ft, gt
        gap = fw_gap(g, rho)
    return _Run(f, rho, gap, it)


def _starts(dim: int, policy: NumericPolicy, count: int) -> list[np.ndarray]:
    starts = [np.eye(dim, dtype=np.complex128) / dim]
    for k in range(1, count):
        rng = restart_rng(policy.seed, k)
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        v /= np.linalg.norm(v)
        starts.append(0.7 * np.outer(v, v.conj()) + 0.3 * np.eye(dim) / dim)
    return starts


def density_maximize(
    objective: Objective,
    dim: int,
    policy: NumericPolicy = NumericPolicy(),
    gradient: Gradient | None = None,
    concave: bool = True,
    starts: list[np.ndarray] | None = None,
    route: str = "",
    max_iter: int | None = None,
) -> OptimizationReport:
    """Maximize ``objective`` over ``dim x dim`` density matrices.

    Args:
        objective: Function of a density matrix; must be finite on full-rank states.
        dim: Matrix dimension.
        policy: Tolerances, iteration budget, restarts and seed.
        gradient: Hermitian gradient; central finite differences if omitted.
        concave: If True run once from the maximally mixed state and certify the
            result with the Frank-Wolfe gap. Otherwise run ``policy.restarts``
            seeded starts (or the given ``starts``) and report the spread.
        starts: Explicit starting states for nonconcave runs.
        route: Tag copied to the report.
        max_iter: Per-run iteration cap overriding ``policy.max_iter``.

    Returns:
        An :class:`OptimizationReport` for the best run.

    Raises:
        NumericalError: If the objective returns NaN.
    """
    grad = gradient if gradient is not None else (lambda r: fd_gradient(objective, r))
    cap = policy.max_iter if max_iter is None else max_iter
    if concave:
        rho0 = starts[0] if starts else np.eye(dim, dtype=np.complex128) / dim
        run = _mirror_ascent(objective, grad, rho0, policy, policy.opt_tol, cap)
        return OptimizationReport(
            run.value, run.rho, run.gap, run.iterations, 1, run.gap <= policy.opt_tol, route
        )
    initial = starts if starts is not None else _starts(dim, policy, policy.restarts)
    runs = [_mirror_ascent(objective, grad, r0, policy, policy.opt_tol, cap) for r0 in initial]
    values = np.array([r.value for r in runs])
    top = values.max()
    # ties within tolerance go to the lowest restart index
    best = int(np.flatnonzero(values >= top - policy.opt_tol)[0])
    spread = float(top - values.min())
    return OptimizationReport(
        float(values[best]),
        runs[best].rho,
        None,
        sum(r.iterations for r in runs),
        len(runs),
        spread <= policy.opt_tol,
        route,
        spread,
        {"restart_values": values.tolist(), "stationarity": runs[best].gap},
    )


# ------------------------------------------------------------------ barrier SDP


def _null_space(m: np.ndarray, rel: float = 1e-7) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    return v[:, w <= rel * max(w[-1], 1e-300)]


def _polish_dual(A, basis, tr_e, Y, Z) -> np.ndarray | None:
    """Dual multiplier from complementary slackness at a near-optimal primal.

    Solves ``L^dagger(N S N^dagger) + M T M^dagger = I`` in least squares with
    ``N`` and ``M`` spanning the near-null spaces of ``Z`` and ``Y``, then
    scales the PSD part of ``N S N^dagger`` into dual feasibility.
    """
    n, m = _null_space(Z), _null_space(Y)
    if n.shape[1] == 0:
        return None
    cols = []
    sb = linalg.hermitian_basis(n.shape[1])
    for f in sb:
        cols.append(np.einsum("kij,ji->k", A, n @ f @ n.conj().T).real)
    for g in linalg.hermitian_basis(m.shape[1]) if m.shape[1] else []:
        cols.append(np.einsum("kij,ji->k", basis.conj(), m @ g @ m.conj().T).real)
    coef = np.linalg.lstsq(np.array(cols).T, tr_e, rcond=None)[0]
    s = np.einsum("k,kij->ij", coef[: len(sb)], sb)
    w, v = np.linalg.eigh(linalg.hermitian_part(s))
    x = n @ (v * np.clip(w, 0.0, None)) @ v.conj().T @ n.conj().T
    adj = np.einsum("k,kij->ij", np.einsum("kij,ji->k", A, x).real, basis)
    top = linalg.lambda_max(linalg.hermitian_part(adj))
    return x / top if top > 0 else None


class SdpResult(NamedTuple):
    """Solution of ``min Tr Y s.t. L(Y) >= rho, Y >= 0``.

    ``dual`` is the multiplier ``X >= 0`` of the operator constraint, so the
    derivative of ``value`` with respect to ``rho`` is ``dual``. It is scaled
    to be exactly dual feasible, and ``gap = value - Tr(X rho)`` bounds
    ``value - optimum``.
    """

    value: float
    primal: np.ndarray
    dual: np.ndarray
    gap: float
    iterations: int
    feasible: bool


def barrier_sdp(
    lin_map: Callable[[np.ndarray], np.ndarray],
    rho: np.ndarray,
    dim: int,
    rel_gap: float = 1e-11,
    max_newton: int = 500,
) -> SdpResult:
    """Minimize ``Tr Y`` subject to ``L(Y) >= rho`` and ``Y >= 0``.

    ``L`` must map PSD ``dim x dim`` matrices to PSD matrices of the size of
    ``rho``. The constraint is restricted to the support of ``L(I)``; if
    ``rho`` has weight outside it the problem is infeasible.

    Args:
        lin_map: The positive linear map ``L``.
        rho: Hermitian right-hand side.
        dim: Size of ``Y``.
        rel_gap: Stop once the barrier duality-gap bound is below
            ``rel_gap * Tr Y``.
        max_newton: Total Newton step budget.

    Returns:
        An :class:`SdpResult`.

    Raises:
        NumericalError: If Newton's method fails to make progress.
    """
    rho = linalg.hermitian_part(linalg.as_matrix(rho))
    basis = linalg.hermitian_basis(dim)
    l_eye = linalg.hermitian_part(lin_map(np.eye(dim, dtype=np.complex128)))
    w, v = linalg.hermitian_eig(l_eye, check=False)
    keep = w > 1e-12 * w[-1]
    W = v[:, keep]
    outside = rho - W @ (W.conj().T @ rho @ W) @ W.conj().T
    if np.max(np.abs(outside), initial=0.0) > 1e-9 * max(1.0, np.max(np.abs(rho))):
        return SdpResult(math.inf, np.zeros((dim, dim)), np.zeros_like(rho), 0.0, 0, False)
    A = np.array([W.conj().T @ lin_map(e) @ W for e in basis])
    r = W.shape[1]
    b = W.conj().T @ rho @ W
    tr_e = np.array([np.trace(e).real for e in basis])
    coords = lambda y: np.einsum("k,kij->ij", y, basis)  # noqa: E731

    lam_b = max(linalg.lambda_max(b), 0.0)
    c0 = 2.0 * lam_b / w[keep][0] + 1e-3 * (1.0 + lam_b)
    y = c0 * np.array([np.trace(e).real for e in basis])  # Y = c0 I

    def barrier_parts(y):
        Z = np.einsum("k,kij->ij", y, A) - b
        return linalg.hermitian_part(coords(y)), linalg.hermitian_part(Z)

    def phi(y, t):
        Y, Z = barrier_parts(y)
        try:
            lz = np.linalg.cholesky(Z)
            ly = np.linalg.cholesky(Y)
        except np.linalg.LinAlgError:
            return math.inf
        return t * tr_e @ y - 2 * np.sum(np.log(np.abs(np.diag(lz)))) - 2 * np.sum(
            np.log(np.abs(np.diag(ly)))
        )

    nu = r + dim
    t = nu / max(1e-3, c0 * dim)
    steps = 0
    best_dual, best_obj = np.zeros_like(rho), -math.inf
    while True:
        centered = False
        for _ in range(100):
            Y, Z = barrier_parts(y)
            zi = np.linalg.inv(Z)
            yi = np.linalg.inv(Y)
            pz = np.einsum("ij,kjl->kil", zi, A)
            py = np.einsum("ij,kjl->kil", yi, basis)
            grad = t * tr_e - np.einsum("kii->k", pz).real - np.einsum("kii->k", py).real
            hess = np.einsum("kij,lji->kl", pz, pz).real + np.einsum("kij,lji->kl", py, py).real
            try:
                dy = -np.linalg.solve(hess, grad)
            except np.linalg.LinAlgError:
                dy = -np.linalg.lstsq(hess, grad, rcond=None)[0]
            dec2 = float(-grad @ dy)
            steps += 1
            if dec2 <= 1e-10:
                centered = True
                break
            if steps > max_newton:
                break
            s = 1.0
            if dec2 < 0.25:
                # quadratic region: full steps, only kept strictly feasible
                while s > 1e-12 and not math.isfinite(phi(y + s * dy, t)):
                    s *= 0.5
            else:
                f0 = phi(y, t)
                while s > 1e-12 and not phi(y + s * dy, t) <= f0 - 0.25 * s * dec2:
                    s *= 0.5
            if s <= 1e-12:
                break
            y = y + s * dy
        value = float(tr_e @ y)
        if centered:
            # central-path multiplier, scaled into dual feasibility L^dagger(X) <= I
            m = np.linalg.inv(barrier_parts(y)[1]) / t
            adj = np.einsum("k,kij->ij", np.einsum("kij,ji->k", A, m).real, basis)
            m = linalg.hermitian_part(m) / max(1.0, linalg.lambda_max(linalg.hermitian_part(adj)))
            obj = float(np.real(np.vdot(m, b)))
            if obj > best_obj:
                best_obj, best_dual = obj, W @ m @ W.conj().T
        if not centered or nu / t <= rel_gap * max(value, 1e-300):
            break
        t *= 10.0
    polished = _polish_dual(A, basis, tr_e, coords(y), barrier_parts(y)[1])
    if polished is not None:
        obj = float(np.real(np.vdot(polished, b)))
        if obj > best_obj:
            best_obj, best_dual = obj, W @ polished @ W.conj().T
    gap = value - best_obj
    if not gap <= 1e-6 * max(value, 1.0):
        raise NumericalError(f"barrier SDP did not converge (duality gap {gap:.3e})")
    dual = best_dual
    gap = max(gap, 0.0)
    return SdpResult(value, coords(y), dual, gap, steps, True)
