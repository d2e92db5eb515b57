"""Divergences between channels and entropy functions of Choi states.

Each result carries an exactness tag:

* ``closed_form``: a direct evaluation, no optimization.
* ``certified``: a convex program solved with a duality or Frank-Wolfe
  certificate.
* ``heuristic_bound``: an optimization whose value is only known to be
  attained, hence a lower bound on a supremum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from . import linalg
from .channels import KrausChannel, apply_adjoint, apply_channel, kraus_to_choi, require_channel
from .entropy import LN2, channel_entropy, purified_output, purified_pullback
from .errors import DomainError, ValidationError
from .optimize import NumericPolicy, barrier_sdp, density_maximize
from .states import (
    conditional_entropy,
    conditional_petz_fixed,
    conditional_renyi_fixed,
    max_relative_entropy,
    maximally_mixed,
    petz_conditional_optimized,
    petz_log_q,
    petz_renyi,
    relative_entropy,
    sandwiched_log_q,
    sandwiched_renyi,
)

KINDS = {
    "relative": "relative",
    "renyi": "sandwiched_renyi",
    "sandwiched_renyi": "sandwiched_renyi",
    "petz": "petz_renyi",
    "petz_renyi": "petz_renyi",
    "max": "max",
}
ADVERSARIAL_OUTER_ITER = 300
ADVERSARIAL_INNER_ITER = 200


@dataclass
class ChannelDivergenceResult:
    value: float
    kind: str
    mode: str
    exactness: str
    certificate: Optional[float] = None
    alpha: Optional[float] = None
    iterations: int = 0
    details: dict = field(default_factory=dict)


def _normalize_kind(kind: str, alpha: float | None) -> tuple[str, float | None]:
    try:
        k = KINDS[kind]
    except KeyError:
        raise ValidationError(f"unknown divergence kind {kind!r}; expected one of {sorted(KINDS)}") from None
    if k in ("sandwiched_renyi", "petz_renyi"):
        if alpha is None:
            raise ValidationError(f"divergence kind {kind!r} needs alpha")
        alpha = float(alpha)
        if alpha == 1.0 or not alpha > 0:
            raise DomainError(f"Renyi divergence needs alpha > 0 and alpha != 1, got {alpha}")
    return k, alpha


def _check_pair(first: KrausChannel, second: KrausChannel) -> None:
    require_channel(first)
    require_channel(second)
    if (first.dim_in, first.dim_out) != (second.dim_in, second.dim_out):
        raise ValidationError(
            f"channels have different dimensions: {first.dim_in}->{first.dim_out} vs "
            f"{second.dim_in}->{second.dim_out}"
        )


def state_divergence(kind: str, rho, sigma, alpha: float | None = None) -> float:
    """Dispatch to the state divergence named by ``kind``."""
    kind, alpha = _normalize_kind(kind, alpha)
    if kind == "relative":
        return relative_entropy(rho, sigma).value
    if kind == "sandwiched_renyi":
        return sandwiched_renyi(rho, sigma, alpha).value
    if kind == "petz_renyi":
        return petz_renyi(rho, sigma, alpha).value
    return max_relative_entropy(rho, sigma).value


def is_randomizing(channel: KrausChannel, tol: float = 1e-12) -> bool:
    d = channel.dim_in * channel.dim_out
    return bool(np.max(np.abs(kraus_to_choi(channel).matrix - np.eye(d) / channel.dim_out)) <= tol)


def choi_divergence(
    first: KrausChannel, second: KrausChannel, kind: str = "relative", alpha: float | None = None
) -> ChannelDivergenceResult:
    """State divergence between the normalized Choi states of two channels."""
    _check_pair(first, second)
    k, alpha = _normalize_kind(kind, alpha)
    value = state_divergence(k, kraus_to_choi(first).normalized, kraus_to_choi(second).normalized, alpha)
    return ChannelDivergenceResult(value, k, "choi", "closed_form", alpha=alpha)


def _dlog_gradient(omega_1, omega_2):
    """Gradients of ``D(omega_1 || omega_2)`` in both arguments (up to multiples of I)."""
    g1 = linalg.mlog2(omega_1) - linalg.mlog2(omega_2)
    g2 = -linalg.frechet(omega_2, np.log, lambda x: 1.0 / x, omega_1, zero_policy="support") / LN2
    return g1, g2


def generalized_channel_divergence(
    first: KrausChannel,
    second: KrausChannel,
    kind: str = "relative",
    alpha: float | None = None,
    policy: NumericPolicy = NumericPolicy(),
) -> ChannelDivergenceResult:
    """``sup_psi D(N(psi) || M(psi))`` over pure inputs ``psi_RA``.

    The pure input is parametrized by its reference marginal ``tau``. The
    max-relative entropy is evaluated at the maximally entangled input, where
    it is optimal. When ``second`` is the randomizing channel and
    ``kind="relative"``, ``details["entropy_route"]`` holds
    ``log2|B| - H(first)`` for comparison.
    """
    _check_pair(first, second)
    k, alpha = _normalize_kind(kind, alpha)
    dA, dB = first.dim_in, first.dim_out
    if k == "max":
        value = max_relative_entropy(kraus_to_choi(first).normalized, kraus_to_choi(second).normalized).value
        return ChannelDivergenceResult(value, k, "generalized", "closed_form", alpha=alpha)
    c1 = kraus_to_choi(first).matrix
    c2 = kraus_to_choi(second).matrix

    def objective(tau):
        return state_divergence(k, purified_output(c1, tau, dB), purified_output(c2, tau, dB), alpha)

    pi = maximally_mixed(dA)
    if math.isinf(objective(pi)):
        return ChannelDivergenceResult(math.inf, k, "generalized", "closed_form", alpha=alpha)
    def relative_gradient(tau):
        w1, w2 = purified_output(c1, tau, dB), purified_output(c2, tau, dB)
        g1, g2 = _dlog_gradient(w1, w2)
        return purified_pullback(c1, tau, dB, g1) + purified_pullback(c2, tau, dB, g2)

    gradient = relative_gradient if k == "relative" else None
    rep = density_maximize(objective, dA, policy, gradient=gradient, concave=False, route="generalized")
    res = ChannelDivergenceResult(
        rep.value, k, "generalized", "heuristic_bound", rep.spread, alpha, rep.iterations
    )
    res.details["optimal_reference_marginal"] = rep.optimizer_state
    if k == "relative" and is_randomizing(second):
        res.details["entropy_route"] = math.log2(dB) - channel_entropy(first, policy).value
    return res


# ----------------------------------------------------------- adversarial inner


class _Inner(NamedTuple):
    value: float
    sigma: np.ndarray
    certificate: float
    iterations: int
    dual: Optional[np.ndarray]


def _lifted(second: KrausChannel):
    dA = second.dim_in
    return lambda s: apply_channel(second, s, embed=dA)


def _q_form(kind: str, alpha: float):
    """Objective ``-D_alpha(rho || sigma)`` and a map from its Frank-Wolfe gap to a certificate.

    The maximization runs on ``log Q`` so large orders stay representable.
    Since ``Q`` itself is convex (``alpha > 1``) or concave (``alpha < 1``) in
    ``sigma`` and ``grad log Q = grad Q / Q``, a gap ``g`` of the log objective
    is a relative gap of ``Q``, which bounds the divergence error by
    ``-log(1 - g') / (|alpha - 1| ln 2)`` with ``g' = g |alpha - 1| ln 2``.
    """
    log_q = sandwiched_log_q if kind == "sandwiched_renyi" else petz_log_q
    scale = LN2 * abs(alpha - 1.0)

    def objective(rho, sig):
        return -log_q(rho, sig, alpha) / (LN2 * (alpha - 1.0))

    def certificate(gap):
        rel = gap * scale
        return math.inf if rel >= 1.0 else -math.log1p(-rel) / scale

    return objective, certificate


def _inner_minimize(
    omega: np.ndarray,
    second: KrausChannel,
    kind: str,
    alpha: float | None,
    policy: NumericPolicy,
    start: np.ndarray | None = None,
    max_iter: int | None = None,
) -> _Inner:
    """``inf_sigma D(omega || (id (x) M)(sigma))`` over states ``sigma_RA``."""
    dA = second.dim_in
    n = dA * dA
    lift = _lifted(second)
    if kind == "max":
        res = barrier_sdp(lift, omega, n)
        if not res.feasible:
            return _Inner(math.inf, maximally_mixed(n), 0.0, 0, None)
        sigma = res.primal / np.trace(res.primal).real
        cert = res.gap / (res.value * LN2)
        return _Inner(math.log2(res.value), sigma, cert, res.iterations, res.dual)
    pi = maximally_mixed(n)
    if math.isinf(state_divergence(kind, omega, lift(pi), alpha)):
        return _Inner(math.inf, pi, 0.0, 0, None)
    starts = None if start is None else [0.999 * start + 0.001 * pi]
    if kind == "relative":

        def objective(sig):
            return -relative_entropy(omega, lift(sig)).value

        def gradient(sig):
            x = lift(sig)
            d = linalg.frechet(x, np.log, lambda v: 1.0 / v, omega, zero_policy="support")
            return apply_adjoint(second, d, embed=dA) / LN2

        rep = density_maximize(objective, n, policy, gradient, True, starts, "inner", max_iter)
        return _Inner(-rep.value, rep.optimizer_state, rep.fw_gap, rep.iterations, None)
    q, certificate = _q_form(kind, alpha)
    rep = density_maximize(lambda s: q(omega, lift(s)), n, policy, None, True, starts, "inner", max_iter)
    return _Inner(-rep.value, rep.optimizer_state, certificate(rep.fw_gap), rep.iterations, None)


def adversarial_choi_divergence(
    first: KrausChannel,
    second: KrausChannel,
    kind: str = "relative",
    alpha: float | None = None,
    policy: NumericPolicy = NumericPolicy(),
) -> ChannelDivergenceResult:
    """``inf_sigma D(N(Phi) || M(sigma))`` over all states ``sigma_RA``.

    The relative-entropy and max kinds are convex programs and come back
    ``certified``; the Renyi kinds are solved in the same way but tagged
    ``heuristic_bound``.
    """
    _check_pair(first, second)
    k, alpha = _normalize_kind(kind, alpha)
    omega = kraus_to_choi(first).normalized
    inner = _inner_minimize(omega, second, k, alpha, policy)
    exact = "certified" if k in ("relative", "max") and inner.certificate <= policy.opt_tol else "heuristic_bound"
    res = ChannelDivergenceResult(inner.value, k, "adversarial_choi", exact, inner.certificate, alpha, inner.iterations)
    res.details["optimal_sigma"] = inner.sigma
    return res


def adversarial_divergence(
    first: KrausChannel,
    second: KrausChannel,
    kind: str = "relative",
    alpha: float | None = None,
    policy: NumericPolicy = NumericPolicy(),
) -> ChannelDivergenceResult:
    """``sup_psi inf_sigma D(N(psi_RA) || M(sigma_RA))``.

    The outer supremum runs over pure inputs (parametrized by the reference
    marginal ``tau``) with multi-start mirror ascent; the gradient is taken at
    the current inner minimizer. The inner problem is warm-started and capped
    at ``ADVERSARIAL_INNER_ITER`` iterations. The max kind uses the barrier
    solver for the inner problem and, since its outer problem is concave, a
    single ascent whose Frank-Wolfe gap is reported as the certificate. The
    outer objective can be nonsmooth at the optimum, so every result is
    tagged ``heuristic_bound``.
    """
    _check_pair(first, second)
    k, alpha = _normalize_kind(kind, alpha)
    dA, dB = first.dim_in, first.dim_out
    c1 = kraus_to_choi(first).matrix
    cache: dict = {"sigma": None, "inner": {}, "iterations": 0}

    def solve(tau):
        key = tau.tobytes()
        if key not in cache["inner"]:
            omega = purified_output(c1, tau, dB)
            inner = _inner_minimize(omega, second, k, alpha, policy, cache["sigma"], ADVERSARIAL_INNER_ITER)
            if math.isfinite(inner.value):
                cache["sigma"] = inner.sigma
            cache["iterations"] += inner.iterations
            if len(cache["inner"]) > 64:
                cache["inner"].clear()
            cache["inner"][key] = (omega, inner)
        return cache["inner"][key]

    def objective(tau):
        return solve(tau)[1].value

    def gradient(tau):
        omega, inner = solve(tau)
        if k == "max":
            return purified_pullback(c1, tau, dB, inner.dual) / (2.0**inner.value * LN2)
        x = _lifted(second)(inner.sigma)
        return purified_pullback(c1, tau, dB, linalg.mlog2(omega) - linalg.mlog2(x))

    pi = maximally_mixed(dA)
    if math.isinf(objective(pi)):
        return ChannelDivergenceResult(math.inf, k, "adversarial", "closed_form", alpha=alpha)
    grad = gradient if k in ("relative", "max") else None
    # For the max kind the substitution Y = (sqrt(tau) x I) Y' (sqrt(tau) x I)
    # turns the value into log2 min_Y' Tr[(tau x I) Y'], a concave function of tau.
    concave = k == "max"
    rep = density_maximize(
        objective,
        dA,
        policy,
        grad,
        concave,
        route="adversarial",
        max_iter=min(policy.max_iter, ADVERSARIAL_OUTER_ITER),
    )
    # the outer supremum is only known to be attained, so every kind is a lower bound
    cert = rep.fw_gap if concave else rep.spread
    res = ChannelDivergenceResult(
        rep.value, k, "adversarial", "heuristic_bound", cert, alpha, rep.iterations + cache["iterations"]
    )
    res.details["optimal_reference_marginal"] = rep.optimizer_state
    return res


# ----------------------------------------------------------- Choi entropy suite


class ChoiEntropySuite(NamedTuple):
    """Entropy functions of the Choi state ``Phi^N_RB`` (``B`` conditioned on ``R``).

    Attributes:
        conditional: ``H(B|R)``.
        sandwiched: ``-D_alpha(Phi || Phi_R (x) I_B)``.
        petz: The Petz version of ``sandwiched``.
        sandwiched_optimized: ``-inf_sigma D_alpha(Phi || sigma_R (x) I_B)``.
        petz_optimized: The Petz version, in closed form.
    """

    conditional: float
    sandwiched: float
    petz: float
    sandwiched_optimized: float
    petz_optimized: float


def optimized_sandwiched_conditional(
    rho: np.ndarray, dims, alpha: float, policy: NumericPolicy = NumericPolicy(), condition_on: int = 0
) -> tuple[float, float]:
    """``-inf_sigma D_alpha(rho || sigma (x) I)`` with the conditioning system ``condition_on``.

    Returns:
        ``(value, fw_gap)``; the certificate bounds the distance to the optimum.
    """
    dims = [int(d) for d in dims]
    dc, do = dims[condition_on], dims[1 - condition_on]
    lift = (lambda s: np.kron(s, np.eye(do))) if condition_on == 0 else (lambda s: np.kron(np.eye(do), s))
    q, certificate = _q_form("sandwiched_renyi", alpha)
    rep = density_maximize(lambda s: q(rho, lift(s)), dc, policy, None, True, route="sandwiched_optimized")
    return rep.value, certificate(rep.fw_gap)


def choi_entropy_suite(
    channel: KrausChannel, alpha: float, policy: NumericPolicy = NumericPolicy()
) -> ChoiEntropySuite:
    """Five entropy functions of the normalized Choi state.

    Raises:
        DomainError: If ``alpha`` is outside ``[1/2, 1)`` or ``(1, inf)``.
    """
    require_channel(channel)
    alpha = float(alpha)
    if not (0.5 <= alpha < 1.0 or 1.0 < alpha < math.inf):
        raise DomainError(f"Choi entropy suite needs alpha in [1/2, 1) or (1, inf), got {alpha}")
    phi = kraus_to_choi(channel).normalized
    dims = [channel.dim_in, channel.dim_out]
    opt, _ = optimized_sandwiched_conditional(phi, dims, alpha, policy)
    return ChoiEntropySuite(
        conditional_entropy(phi, dims, condition_on=0),
        conditional_renyi_fixed(phi, dims, alpha, condition_on=0),
        conditional_petz_fixed(phi, dims, alpha, condition_on=0),
        opt,
        petz_conditional_optimized(phi, dims, alpha, condition_on=0),
    )
