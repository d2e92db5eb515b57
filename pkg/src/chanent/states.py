"""Entropies and divergences of quantum states (all in bits)."""
from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from . import linalg
from .errors import DomainError, ValidationError

LN2 = math.log(2.0)

SUPPORT_OK = 1e-10
SUPPORT_WARN = 1e-6
STATE_TOL = 1e-10


class DivergenceValue(NamedTuple):
    """A divergence with an explicit infinity marker.

    Attributes:
        value: The divergence in bits, ``inf`` when the support condition fails.
        support_violation: True when ``rho`` has mass above ``1e-6`` outside
            the support of ``sigma``.
        warning: True when that mass lies in ``(1e-10, 1e-6]``; the value is
            then computed on the support and may be inaccurate.
    """

    value: float
    support_violation: bool = False
    warning: bool = False

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)

    def __float__(self) -> float:
        return float(self.value)


def check_state(rho, tol: float = STATE_TOL) -> np.ndarray:
    """Validate a density matrix and return it as a complex array.

    Raises:
        ValidationError: Non-Hermitian, non-PSD or trace different from one.
    """
    m = linalg.as_matrix(rho)
    linalg.check_hermitian(m)
    tr = np.trace(m).real
    if abs(tr - 1.0) > tol:
        raise ValidationError(f"state has trace {tr:.12g}, expected 1")
    w = linalg.eigvalsh(m)
    if w[0] < -tol:
        raise ValidationError(f"state has negative eigenvalue {w[0]:.3e}")
    return m


def random_state(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density matrix ``G G^dagger / Tr`` with a ``d x rank`` Ginibre ``G``."""
    r = d if rank is None else rank
    g = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure_state(d: int, rng: np.random.Generator) -> np.ndarray:
    return random_state(d, rng, rank=1)


def maximally_mixed(d: int) -> np.ndarray:
    return np.eye(d, dtype=np.complex128) / d


def _entropy_from_spectrum(w: np.ndarray, cutoff: float = linalg.DEFAULT_CUTOFF) -> float:
    w = w[w > cutoff * max(w.max(initial=0.0), 0.0)]
    return float(-np.sum(w * np.log2(w)))


def von_neumann_entropy(rho) -> float:
    """``-Tr rho log2 rho`` over the support of ``rho``."""
    return _entropy_from_spectrum(linalg.eigvalsh(rho))


def _support_mass(rho: np.ndarray, sigma: np.ndarray, cutoff: float) -> float:
    w, v = linalg.hermitian_eig(sigma, check=False)
    null = np.abs(w) <= cutoff * np.max(np.abs(w), initial=0.0)
    if not null.any():
        return 0.0
    vn = v[:, null]
    return float(np.real(np.trace(vn.conj().T @ rho @ vn)))


def _support_status(rho, sigma, cutoff) -> tuple[bool, bool]:
    mass = _support_mass(rho, sigma, cutoff)
    return mass > SUPPORT_WARN, SUPPORT_OK < mass <= SUPPORT_WARN


def relative_entropy(rho, sigma, cutoff: float = linalg.DEFAULT_CUTOFF) -> DivergenceValue:
    """``D(rho || sigma) = Tr rho (log2 rho - log2 sigma)`` with the support rule."""
    rho, sigma = linalg.as_matrix(rho), linalg.as_matrix(sigma)
    violation, warn = _support_status(rho, sigma, cutoff)
    if violation:
        return DivergenceValue(math.inf, True, False)
    val = -von_neumann_entropy(rho) - np.real(np.trace(rho @ linalg.mlog2(sigma, cutoff)))
    return DivergenceValue(float(val), False, warn)


def _check_alpha(alpha: float, name: str) -> float:
    alpha = float(alpha)
    if alpha == 1.0:
        raise DomainError(f"{name} is undefined at alpha = 1; use relative_entropy")
    if not alpha > 0 or math.isnan(alpha):
        raise DomainError(f"{name} needs alpha > 0, got {alpha}")
    return alpha


def _from_log_q(log_q: float, alpha: float, warn: bool) -> DivergenceValue:
    if log_q == -math.inf:
        # orthogonal supports with alpha < 1
        return DivergenceValue(math.inf, False, warn)
    return DivergenceValue(float(log_q / (LN2 * (alpha - 1.0))), False, warn)


def sandwiched_log_q(rho, sigma, alpha: float, cutoff: float = linalg.DEFAULT_CUTOFF) -> float:
    """Natural log of ``Tr (sigma^g rho sigma^g)^alpha`` with ``g = (1 - alpha) / (2 alpha)``.

    The sum of powers is scaled by the largest eigenvalue, so large orders
    neither underflow nor overflow.
    """
    s = linalg.mpow(sigma, (1.0 - alpha) / (2.0 * alpha), cutoff=cutoff)
    w = np.clip(linalg.eigvalsh(linalg.hermitian_part(s @ rho @ s)), 0.0, None)
    top = float(w.max())
    if top <= 0.0:
        return -math.inf
    return float(alpha * math.log(top) + math.log(np.sum((w / top) ** alpha)))


def sandwiched_q(rho, sigma, alpha: float, cutoff: float = linalg.DEFAULT_CUTOFF) -> float:
    """``Tr (sigma^g rho sigma^g)^alpha`` with ``g = (1 - alpha) / (2 alpha)``."""
    return math.exp(sandwiched_log_q(rho, sigma, alpha, cutoff))


def sandwiched_renyi(rho, sigma, alpha: float, cutoff: float = linalg.DEFAULT_CUTOFF) -> DivergenceValue:
    """Sandwiched Renyi divergence of order ``alpha``.

    Args:
        rho: A density matrix.
        sigma: A PSD operator.
        alpha: Order in ``(0, 1)`` or ``(1, inf)``.
        cutoff: Relative eigenvalue cutoff for support-projected powers.

    Returns:
        A :class:`DivergenceValue`; infinite for ``alpha > 1`` when the support
        of ``rho`` is not contained in that of ``sigma``.

    Raises:
        DomainError: If ``alpha`` is 1 or not positive.
    """
    alpha = _check_alpha(alpha, "sandwiched Renyi divergence")
    rho, sigma = linalg.as_matrix(rho), linalg.as_matrix(sigma)
    warn = False
    if alpha > 1:
        violation, warn = _support_status(rho, sigma, cutoff)
        if violation:
            return DivergenceValue(math.inf, True, False)
    return _from_log_q(sandwiched_log_q(rho, sigma, alpha, cutoff), alpha, warn)


def petz_q(rho, sigma, alpha: float, cutoff: float = linalg.DEFAULT_CUTOFF) -> float:
    a = linalg.mpow(rho, alpha, cutoff=cutoff)
    b = linalg.mpow(sigma, 1.0 - alpha, cutoff=cutoff)
    return float(np.real(np.trace(a @ b)))


def _log_support_spectrum(m, cutoff: float) -> tuple[np.ndarray, np.ndarray]:
    w, v = linalg.hermitian_eig(m, check=False)
    keep = w > cutoff * np.max(np.abs(w))
    return np.log(w[keep]), v[:, keep]


def petz_log_q(rho, sigma, alpha: float, cutoff: float = linalg.DEFAULT_CUTOFF) -> float:
    """Natural log of ``Tr rho^alpha sigma^(1 - alpha)`` on the supports.

    Expands the trace over both eigenbases and sums in log space, so large
    orders neither underflow nor overflow.
    """
    lr, vr = _log_support_spectrum(linalg.as_matrix(rho), cutoff)
    ls, vs = _log_support_spectrum(linalg.as_matrix(sigma), cutoff)
    overlap = np.abs(vr.conj().T @ vs) ** 2
    mask = overlap > 0.0
    if not mask.any():
        return -math.inf
    terms = (alpha * lr[:, None] + (1.0 - alpha) * ls[None, :])[mask] + np.log(overlap[mask])
    top = float(terms.max())
    return top + math.log(float(np.sum(np.exp(terms - top))))


def petz_renyi(rho, sigma, alpha: float, cutoff: float = linalg.DEFAULT_CUTOFF) -> DivergenceValue:
    """Petz Renyi divergence ``log2 Tr(rho^alpha sigma^(1-alpha)) / (alpha - 1)``.

    Raises:
        DomainError: If ``alpha`` is 1 or not positive.
    """
    alpha = _check_alpha(alpha, "Petz Renyi divergence")
    rho, sigma = linalg.as_matrix(rho), linalg.as_matrix(sigma)
    warn = False
    if alpha > 1:
        violation, warn = _support_status(rho, sigma, cutoff)
        if violation:
            return DivergenceValue(math.inf, True, False)
    return _from_log_q(petz_log_q(rho, sigma, alpha, cutoff), alpha, warn)


def max_relative_entropy(rho, sigma, cutoff: float = linalg.DEFAULT_CUTOFF) -> DivergenceValue:
    """``log2 lambda_max(sigma^(-1/2) rho sigma^(-1/2))`` with the support rule."""
    rho, sigma = linalg.as_matrix(rho), linalg.as_matrix(sigma)
    violation, warn = _support_status(rho, sigma, cutoff)
    if violation:
        return DivergenceValue(math.inf, True, False)
    s = linalg.mpow(sigma, -0.5, cutoff=cutoff)
    lam = linalg.lambda_max(linalg.hermitian_part(s @ rho @ s))
    if lam <= 0:
        return DivergenceValue(-math.inf, False, warn)
    return DivergenceValue(float(math.log2(lam)), False, warn)


def _bipartite(rho, dims: Sequence[int], condition_on: int) -> tuple[np.ndarray, list[int], int]:
    rho = linalg.as_matrix(rho)
    dims = [int(d) for d in dims]
    if len(dims) != 2 or dims[0] * dims[1] != rho.shape[0]:
        raise ValidationError(f"bipartite dims {dims} do not match matrix size {rho.shape[0]}")
    if condition_on not in (0, 1):
        raise ValidationError(f"condition_on must be 0 or 1, got {condition_on}")
    return rho, dims, condition_on


def conditional_entropy(rho, dims: Sequence[int], condition_on: int = 1) -> float:
    """``H(XY) - H(Y)`` where ``Y`` is subsystem ``condition_on``."""
    rho, dims, c = _bipartite(rho, dims, condition_on)
    return von_neumann_entropy(rho) - von_neumann_entropy(linalg.partial_trace(rho, dims, c))


def _identity_tensor(marginal: np.ndarray, dims: list[int], condition_on: int) -> np.ndarray:
    other = np.eye(dims[1 - condition_on])
    return np.kron(other, marginal) if condition_on == 1 else np.kron(marginal, other)


def conditional_renyi_fixed(
    rho, dims: Sequence[int], alpha: float, condition_on: int = 1
) -> float:
    """``-D_alpha(rho_XY || I_X (x) rho_Y)`` with the sandwiched divergence.

    ``alpha = inf`` uses the max-relative entropy.

    Raises:
        DomainError: If ``alpha < 1/2`` or ``alpha == 1``.
    """
    rho, dims, c = _bipartite(rho, dims, condition_on)
    alpha = float(alpha)
    if alpha < 0.5:
        raise DomainError(f"conditional Renyi entropy needs alpha >= 1/2, got {alpha}")
    sigma = _identity_tensor(linalg.partial_trace(rho, dims, c), dims, c)
    if math.isinf(alpha):
        return -max_relative_entropy(rho, sigma).value
    return -sandwiched_renyi(rho, sigma, alpha).value


def conditional_petz_fixed(rho, dims: Sequence[int], alpha: float, condition_on: int = 1) -> float:
    """``-Dbar_alpha(rho_XY || I_X (x) rho_Y)`` with the Petz divergence."""
    rho, dims, c = _bipartite(rho, dims, condition_on)
    sigma = _identity_tensor(linalg.partial_trace(rho, dims, c), dims, c)
    return -petz_renyi(rho, sigma, alpha).value


def petz_conditional_optimized(
    rho, dims: Sequence[int], alpha: float, condition_on: int = 1
) -> float:
    """``-inf_sigma Dbar_alpha(rho_XY || I_X (x) sigma_Y)`` in closed form.

    Evaluates ``alpha / (1 - alpha) * log2 Tr (Tr_X rho^alpha)^(1/alpha)``.

    Raises:
        DomainError: If ``alpha`` is 1 or not positive.
    """
    rho, dims, c = _bipartite(rho, dims, condition_on)
    alpha = _check_alpha(alpha, "optimized Petz conditional entropy")
    # rho^alpha = top^alpha (rho / top)^alpha keeps large orders representable
    top = linalg.lambda_max(rho)
    marg = linalg.partial_trace(linalg.mpow(rho / top, alpha), dims, c)
    w = np.clip(linalg.eigvalsh(linalg.hermitian_part(marg)), 0.0, None)
    t = float(np.sum(w ** (1.0 / alpha)))
    return alpha / (1.0 - alpha) * (math.log2(t) + math.log2(top))


def renyi_entropy(rho, alpha: float) -> float:
    """Renyi entropy of a state; ``alpha = inf`` gives the min-entropy."""
    w = np.clip(linalg.eigvalsh(rho), 0.0, None)
    if math.isinf(alpha):
        return -math.log2(w.max())
    alpha = _check_alpha(alpha, "Renyi entropy")
    w = w[w > 0]
    return math.log2(np.sum(w**alpha)) / (1.0 - alpha)


def min_entropy(rho) -> float:
    return renyi_entropy(rho, math.inf)
