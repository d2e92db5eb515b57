"""Entropy, Renyi entropy and min-entropy of quantum channels.

Sign conventions: every quantity is reported as an entropy, so the identity
channel on ``d`` levels scores ``-log2 d`` and the completely randomizing
channel scores ``+log2 d``.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from . import linalg
from .channels import (
    KrausChannel,
    apply_adjoint,
    apply_channel,
    complementary,
    covariance_check,
    kraus_to_choi,
    require_channel,
)
from .errors import DomainError, PreconditionError, ValidationError
from .optimize import NumericPolicy, OptimizationReport, barrier_sdp, density_maximize, fw_gap
from .states import maximally_mixed, sandwiched_renyi, von_neumann_entropy

LN2 = math.log(2.0)


def binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return float(-p * math.log2(p) - (1 - p) * math.log2(1 - p))


def shannon_entropy(probs: Sequence[float]) -> float:
    p = np.asarray(probs, dtype=np.float64)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def conditional_entropy_objective(channel: KrausChannel):
    """``f(rho) = H(rho) - H(N^c(rho))`` (that is ``H(B|E)`` of ``V rho V^dagger``) and its gradient."""
    comp = complementary(channel)

    def objective(rho):
        return von_neumann_entropy(rho) - von_neumann_entropy(apply_channel(comp, rho))

    def gradient(rho):
        out = apply_channel(comp, rho)
        return -linalg.mlog2(rho) + apply_adjoint(comp, linalg.mlog2(out))

    return objective, gradient


def channel_entropy(channel: KrausChannel, policy: NumericPolicy = NumericPolicy()) -> OptimizationReport:
    """``H(N) = -max_rho H(B|E)`` over Stinespring outputs ``V rho V^dagger``.

    The objective is concave, so the reported Frank-Wolfe gap bounds the
    error of ``value``.
    """
    require_channel(channel)
    f, g = conditional_entropy_objective(channel)
    rep = density_maximize(f, channel.dim_in, policy, gradient=g, concave=True, route="conditional_entropy")
    rep.value = -rep.value
    return rep


def channel_entropy_covariant(
    channel: KrausChannel,
    input_unitaries: Sequence,
    output_unitaries: Sequence,
    policy: NumericPolicy = NumericPolicy(),
) -> OptimizationReport:
    """Channel entropy evaluated at the maximally mixed input.

    Valid when the channel is covariant under a group whose input
    representation is a unitary one-design.

    Raises:
        PreconditionError: If the covariance or one-design check fails.
    """
    require_channel(channel)
    report = covariance_check(channel, input_unitaries, output_unitaries)
    if not (report.covariant and report.one_design):
        raise PreconditionError(
            f"covariant shortcut needs a covariant channel and a one-design "
            f"(deviations {report.max_deviation:.2e}, {report.design_deviation:.2e})"
        )
    f, g = conditional_entropy_objective(channel)
    pi = maximally_mixed(channel.dim_in)
    gap = fw_gap(g(pi), pi)
    return OptimizationReport(-f(pi), pi, gap, 0, 1, gap <= policy.opt_tol, "covariant")


def closed_form_entropy(kind: str, **params) -> float:
    """Closed-form channel entropies.

    Args:
        kind: ``erasure(d, p)``, ``dephasing(probs)``, ``werner_holevo(d)`` or
            ``depolarizing(d, p)``.
        **params: Parameters of the family.

    Returns:
        The entropy in bits.

    Raises:
        ValidationError: Unknown kind or parameters out of range.
    """
    if kind == "erasure":
        d, p = int(params.get("d", 2)), float(params["p"])
        _unit(p)
        return binary_entropy(p) + (p - 1.0) * math.log2(d)
    if kind == "dephasing":
        probs = np.asarray(params["probs"], dtype=np.float64)
        if np.any(probs < 0) or abs(probs.sum() - 1) > 1e-12:
            raise ValidationError("dephasing probabilities must be non-negative and sum to 1")
        return shannon_entropy(probs) - math.log2(len(probs))
    if kind == "werner_holevo":
        d = int(params.get("d", 2))
        if d < 2:
            raise ValidationError("Werner-Holevo channel needs d >= 2")
        return math.log2((d - 1) / 2.0)
    if kind == "depolarizing":
        d, p = int(params.get("d", 2)), float(params["p"])
        _unit(p)
        a = 1.0 - p + p / d**2
        b = p / d**2
        xlog = lambda x: x * math.log2(x) if x > 0 else 0.0  # noqa: E731
        return -xlog(a) - (d * d - 1) * xlog(b) - math.log2(d)
    raise ValidationError(f"no closed form for channel kind {kind!r}")


def _unit(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"p must lie in [0, 1], got {p}")


def _check_renyi_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not (0.5 <= alpha < 1.0 or 1.0 < alpha < math.inf):
        raise DomainError(f"channel Renyi entropy needs alpha in [1/2, 1) or (1, inf), got {alpha}")
    return alpha


def _log2_power_sum(w: np.ndarray, alpha: float) -> float:
    """``log2 sum_i w_i^alpha`` scaled by the largest entry so large ``alpha`` stays finite."""
    w = np.clip(w, 0.0, None)
    top = w.max()
    return float(alpha * math.log2(top) + math.log2(np.sum((w / top) ** alpha)))


def _power_gradient(m: np.ndarray, alpha: float) -> np.ndarray:
    """Gradient of ``log2 Tr m^alpha`` in ``m``, computed on the scaled spectrum."""
    ew, ev = linalg.hermitian_eig(m, check=False)
    top = ew[-1]
    ew = np.clip(ew, 0.0, None) / top
    pw = linalg.spectral_apply(ew, lambda x: x ** (alpha - 1.0), "support")
    return alpha * linalg.reconstruct(ev, pw) / (np.sum(ew**alpha) * top * LN2)


def sibson_objective(channel: KrausChannel, alpha: float):
    """``g(rho) = log2 Tr[N^c(rho^(1/alpha))^alpha] / (alpha - 1)`` and its gradient.

    ``g`` is the optimized Petz conditional entropy of order ``1/alpha`` of
    ``B`` given ``E`` for the Stinespring output of ``rho``.
    """
    comp = complementary(channel)
    beta = 1.0 / alpha
    scale = 1.0 / (alpha - 1.0)

    def q_and_w(rho):
        r = linalg.mpow(rho, beta, "full")
        w = linalg.hermitian_part(apply_channel(comp, r))
        return w

    def objective(rho):
        return scale * _log2_power_sum(linalg.eigvalsh(q_and_w(rho)), alpha)

    def gradient(rho):
        inner = apply_adjoint(comp, _power_gradient(q_and_w(rho), alpha))
        return scale * linalg.frechet(rho, lambda x: x**beta, lambda x: beta * x ** (beta - 1.0), inner)

    return objective, gradient


def purified_output(choi: np.ndarray, tau: np.ndarray, dim_out: int, power: float = 0.5) -> np.ndarray:
    """``(tau^p (x) I) Gamma^N (tau^p (x) I)``.

    With ``p = 1/2`` this is ``N`` applied to a purification of ``tau^T`` whose
    reference marginal is ``tau``.
    """
    s = np.kron(linalg.mpow(tau, power, "full"), np.eye(dim_out))
    return linalg.hermitian_part(s @ choi @ s)


def purified_pullback(
    choi: np.ndarray, tau: np.ndarray, dim_out: int, y: np.ndarray, power: float = 0.5
) -> np.ndarray:
    """Gradient in ``tau`` of ``<Y, purified_output(choi, tau)>`` for fixed ``Y``."""
    d = tau.shape[0]
    s = np.kron(linalg.mpow(tau, power, "full"), np.eye(dim_out))
    m = choi @ s @ y
    m = m + m.conj().T
    t = linalg.partial_trace(m, [d, dim_out], keep=[0])
    return linalg.frechet(tau, lambda x: x**power, lambda x: power * x ** (power - 1.0), t)


def conditional_renyi_objective(channel: KrausChannel, alpha: float):
    """``a(tau) = D_alpha(omega || omega_R (x) I_B)`` with ``omega = purified_output``."""
    choi = kraus_to_choi(channel).matrix
    dB = channel.dim_out

    def objective(tau):
        omega = purified_output(choi, tau, dB)
        return sandwiched_renyi(omega, np.kron(tau, np.eye(dB)), alpha).value

    return objective


def renyi_channel_entropy(
    channel: KrausChannel,
    alpha: float,
    policy: NumericPolicy = NumericPolicy(),
    cross_check: bool = True,
) -> OptimizationReport:
    """Renyi entropy of a channel (sandwiched divergence to the randomizing channel).

    The reported value maximizes the closed-form Petz-Sibson objective
    :func:`sibson_objective` over inputs (multi-start; no concavity assumed).
    With ``cross_check`` the minimum of ``H_alpha(B|R)`` over purified inputs
    is also computed, warm-started from the first route's optimizer, and the
    difference is stored in ``details["route_gap"]``.

    Raises:
        DomainError: If ``alpha`` is outside ``[1/2, 1)`` or ``(1, inf)``.
    """
    alpha = _check_renyi_alpha(alpha)
    require_channel(channel)
    f, g = sibson_objective(channel, alpha)
    rep = density_maximize(f, channel.dim_in, policy, gradient=g, concave=False, route="sibson")
    rep.value = -rep.value
    if cross_check:
        a = conditional_renyi_objective(channel, alpha)
        start = linalg.hermitian_part(rep.optimizer_state.conj())
        mixed = 0.999 * start + 0.001 * maximally_mixed(channel.dim_in)
        alt = density_maximize(
            a,
            channel.dim_in,
            policy,
            concave=False,
            starts=[mixed, maximally_mixed(channel.dim_in)],
            route="conditional_renyi",
            max_iter=min(policy.max_iter, 2000),
        )
        rep.details["route_a"] = -alt.value
        rep.details["route_gap"] = abs(-alt.value - rep.value)
    return rep


def min_entropy_channel(channel: KrausChannel) -> float:
    """``H_min(N) = -log2 lambda_max(Gamma^N)``.

    ``Gamma^N = M M^dag`` with the vectorized Kraus operators as columns of
    ``M``, so its largest eigenvalue is that of the Gram matrix
    ``Tr K_i^dag K_j`` whenever there are fewer Kraus operators than
    ``|A||B|``.
    """
    require_channel(channel)
    if channel.num_kraus < channel.dim_in * channel.dim_out:
        k = channel.stacked.reshape(channel.num_kraus, -1)
        return -math.log2(linalg.lambda_max(k.conj() @ k.T))
    return -math.log2(linalg.lambda_max(kraus_to_choi(channel).matrix))


def extended_min_entropy(channel: KrausChannel, policy: NumericPolicy = NumericPolicy()) -> OptimizationReport:
    """``-log2 min { Tr Y : Phi^N <= Y (x) I_B }``, the optimized conditional min-entropy of the Choi state.

    Solved as a semidefinite program with a log-barrier method. The
    certificate is the duality-gap bound converted to bits.
    """
    require_channel(channel)
    dA, dB = channel.dim_in, channel.dim_out
    omega = kraus_to_choi(channel).normalized
    res = barrier_sdp(lambda y: np.kron(y, np.eye(dB)), omega, dA)
    gap = res.gap / (res.value * LN2)
    sigma = res.primal / np.trace(res.primal).real
    return OptimizationReport(
        -math.log2(res.value), sigma, gap, res.iterations, 1, gap <= policy.opt_tol, "barrier_sdp"
    )


def cb_norm_objective(channel: KrausChannel, alpha: float):
    """``log2 || (rho^(1/2a) (x) I) Gamma^N (rho^(1/2a) (x) I) ||_a^a`` and its gradient."""
    choi = kraus_to_choi(channel).matrix
    dB = channel.dim_out
    p = 1.0 / (2.0 * alpha)

    def objective(rho):
        return _log2_power_sum(linalg.eigvalsh(purified_output(choi, rho, dB, p)), alpha)

    def gradient(rho):
        y = _power_gradient(purified_output(choi, rho, dB, p), alpha)
        return purified_pullback(choi, rho, dB, y, p)

    return objective, gradient


def cb_one_to_alpha_norm(
    channel: KrausChannel, alpha: float, policy: NumericPolicy = NumericPolicy()
) -> OptimizationReport:
    """Completely bounded ``1 -> alpha`` norm, by multi-start ascent over ``rho_R``.

    ``details["log2_norm"]`` holds ``log2`` of the returned norm.

    Raises:
        DomainError: If ``alpha <= 1``.
    """
    alpha = float(alpha)
    if not alpha > 1.0 or math.isinf(alpha):
        raise DomainError(f"CB 1->alpha norm needs finite alpha > 1, got {alpha}")
    require_channel(channel)
    f, g = cb_norm_objective(channel, alpha)
    rep = density_maximize(f, channel.dim_in, policy, gradient=g, concave=False, route="cb_norm")
    log_norm = rep.value / alpha
    rep.details["log2_norm"] = log_norm
    rep.value = 2.0**log_norm
    return rep


def entropy_from_cb_norm(norm: float, alpha: float) -> float:
    """``alpha / (1 - alpha) * log2 norm``."""
    return alpha / (1.0 - alpha) * math.log2(norm)


def merging_capacity(channel: KrausChannel, policy: NumericPolicy = NumericPolicy()) -> float:
    """Quantum channel merging capacity, which equals the channel entropy."""
    return channel_entropy(channel, policy).value
