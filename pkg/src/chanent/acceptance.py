"""Acceptance checks shared by ``chanent check`` and the test suite.

Each check returns a :class:`CriterionResult`; ``run_all`` runs them in
order. All randomness is derived from the policy seed.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import linalg
from .bosonic import BosonicChannelParams, constrained_entropy, unconstrained_entropy
from .channels import (
    apply_channel,
    make_superchannel,
    random_channel,
    standard_channel,
    superchannel_apply,
    tensor_channels,
)
from .divergence import (
    adversarial_divergence,
    choi_divergence,
    generalized_channel_divergence,
)
from .entropy import (
    channel_entropy,
    closed_form_entropy,
    cb_one_to_alpha_norm,
    conditional_entropy_objective,
    entropy_from_cb_norm,
    min_entropy_channel,
    renyi_channel_entropy,
)
from .optimize import NumericPolicy, fd_gradient
from .states import (
    petz_conditional_optimized,
    petz_renyi,
    random_state,
    relative_entropy,
    renyi_entropy,
    sandwiched_renyi,
    von_neumann_entropy,
)


@dataclass(frozen=True)
class Measurement:
    """One measured deviation and the bound it must not exceed."""

    label: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.tolerance)


@dataclass
class CriterionResult:
    number: int
    title: str
    measurements: list[Measurement]
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(m.passed for m in self.measurements)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        parts = "; ".join(f"{m.label} {m.value:.2e} <= {m.tolerance:.0e}" for m in self.measurements)
        return f"[{status}] criterion {self.number:2d} {self.title}: {parts} [{self.seconds:.1f}s]"


def _rng(policy: NumericPolicy, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([policy.seed, 1000 + stream]))


def closed_form_entropies(policy: NumericPolicy) -> list[Measurement]:
    cases = []
    for d, p in itertools.product((2, 3), (0.0, 0.3, 0.5, 1.0)):
        cases.append(("erasure", {"d": d, "p": p}))
    for probs in ([1.0, 0.0], [0.7, 0.3], [0.5, 0.5], [1.0, 0.0, 0.0], [0.2, 0.3, 0.5], [1 / 3] * 3):
        cases.append(("dephasing", {"probs": probs}))
    for d in (2, 3, 4):
        cases.append(("werner_holevo", {"d": d}))
    for d, p in itertools.product((2, 3), (0.0, 0.5, 1.0)):
        cases.append(("depolarizing", {"d": d, "p": p}))
    worst = 0.0
    for kind, params in cases:
        rep = channel_entropy(standard_channel(kind, **params), policy)
        worst = max(worst, abs(rep.value - closed_form_entropy(kind, **params)))
    expected = {2: -1.0, 3: 0.0, 4: math.log2(1.5)}
    for d, val in expected.items():
        worst = max(worst, abs(closed_form_entropy("werner_holevo", d=d) - val))
    return [Measurement(f"max deviation over {len(cases)} channels", worst, 1e-5)]


def dimension_saturation(policy: NumericPolicy) -> list[Measurement]:
    worst = 0.0
    for d in (2, 3):
        worst = max(worst, abs(channel_entropy(standard_channel("identity", d=d), policy).value + math.log2(d)))
        worst = max(worst, abs(channel_entropy(standard_channel("randomizing", d=d), policy).value - math.log2(d)))
    return [Measurement("max deviation", worst, 1e-6)]


def replacer_reduction(policy: NumericPolicy) -> list[Measurement]:
    rng = _rng(policy, 3)
    worst = 0.0
    for i in range(10):
        sigma = random_state(2 + i % 2, rng)
        ch = standard_channel("replacer", sigma=sigma, d=2)
        worst = max(worst, abs(channel_entropy(ch, policy).value - von_neumann_entropy(sigma)))
        for alpha in (0.5, 2.0, 10.0):
            rep = renyi_channel_entropy(ch, alpha, policy, cross_check=False)
            worst = max(worst, abs(rep.value - renyi_entropy(sigma, alpha)))
        worst = max(worst, abs(min_entropy_channel(ch) - renyi_entropy(sigma, math.inf)))
    return [Measurement("max deviation over 10 states", worst, 1e-5)]


def additivity(policy: NumericPolicy) -> list[Measurement]:
    rng = _rng(policy, 4)
    worst_vn = worst_min = 0.0
    for _ in range(5):
        n, m = random_channel(2, 2, rng), random_channel(2, 2, rng)
        nm = tensor_channels(n, m)
        h = channel_entropy(nm, policy).value
        worst_vn = max(worst_vn, abs(h - channel_entropy(n, policy).value - channel_entropy(m, policy).value))
        hm = min_entropy_channel(nm)
        worst_min = max(worst_min, abs(hm - min_entropy_channel(n) - min_entropy_channel(m)))
    return [Measurement("von Neumann", worst_vn, 2e-4), Measurement("min-entropy", worst_min, 1e-10)]


def renyi_bridge(policy: NumericPolicy) -> list[Measurement]:
    rng = _rng(policy, 5)
    alphas = (1.1, 2.0, 5.0, 20.0, 100.0)
    worst_mono = 0.0
    worst_lim = 0.0
    for _ in range(5):
        ch = random_channel(2, 2, rng)
        vals = [renyi_channel_entropy(ch, a, policy, cross_check=False).value for a in alphas]
        worst_mono = max(worst_mono, max(b - a for a, b in zip(vals, vals[1:])))
        worst_lim = max(worst_lim, abs(vals[-1] - min_entropy_channel(ch)))
    return [Measurement("max increase in alpha", worst_mono, 1e-6), Measurement("|H_100 - H_min|", worst_lim, 2e-2)]


def cb_norm_relation(policy: NumericPolicy) -> list[Measurement]:
    rng = _rng(policy, 6)
    worst = 0.0
    for _ in range(5):
        ch = random_channel(2, 2, rng)
        h2 = renyi_channel_entropy(ch, 2.0, policy).value
        norm = cb_one_to_alpha_norm(ch, 2.0, policy).value
        worst = max(worst, abs(entropy_from_cb_norm(norm, 2.0) - h2))
    return [Measurement("max deviation at alpha=2", worst, 1e-5)]


def divergence_collapse(policy: NumericPolicy) -> list[Measurement]:
    rng = _rng(policy, 7)
    rand = standard_channel("randomizing", d=2)
    worst_rel = worst_max = 0.0
    for _ in range(5):
        ch = random_channel(2, 2, rng)
        gen = generalized_channel_divergence(ch, rand, "relative", policy=policy).value
        adv = adversarial_divergence(ch, rand, "relative", policy=policy).value
        worst_rel = max(worst_rel, abs(adv - gen))
        adv_max = adversarial_divergence(ch, rand, "max", policy=policy).value
        choi_max = choi_divergence(ch, rand, "max").value
        ref = 1.0 - min_entropy_channel(ch)
        worst_max = max(worst_max, abs(adv_max - choi_max), abs(choi_max - ref))
    return [Measurement("relative", worst_rel, 1e-4), Measurement("max", worst_max, 1e-6)]


def superchannel_monotonicity(policy: NumericPolicy) -> list[Measurement]:
    worst_h = worst_d = -math.inf
    for k in range(20):
        rng = _rng(policy, 800 + k)
        ch = random_channel(2, 2, rng)
        theta = make_superchannel("random_unitary", seed=int(rng.integers(2**31)), dim_in=2, dim_out=2, terms=3)
        drop = channel_entropy(ch, policy).value - channel_entropy(superchannel_apply(theta, ch), policy).value
        worst_h = max(worst_h, drop)
    for k in range(20):
        rng = _rng(policy, 900 + k)
        n, m = random_channel(2, 2, rng), random_channel(2, 2, rng)
        theta = make_superchannel(
            "unital_pre_mix", seed=int(rng.integers(2**31)), dim_in=2, dim_out=2, dim_env=2, dim_final=2
        )
        rise = (
            choi_divergence(superchannel_apply(theta, n), superchannel_apply(theta, m)).value
            - choi_divergence(n, m).value
        )
        worst_d = max(worst_d, rise)
    return [Measurement("largest entropy drop", worst_h, 1e-5), Measurement("largest divergence rise", worst_d, 1e-6)]


def bosonic_formulas(policy: NumericPolicy) -> list[Measurement]:
    exact = [
        (BosonicChannelParams("thermal", eta=0.5, n_b=0.0), -1.0),
        (BosonicChannelParams("amplifier", gain=2.0, n_b=0.0), 0.0),
        (BosonicChannelParams("additive_noise", xi=1.0), 1.0 / math.log(2.0)),
    ]
    worst_exact = max(abs(unconstrained_entropy(p) - v) for p, v in exact)
    limit_cases = [
        BosonicChannelParams("thermal", eta=0.5, n_b=0.0),
        BosonicChannelParams("thermal", eta=0.3, n_b=2.0),
        BosonicChannelParams("amplifier", gain=2.0, n_b=0.0),
        BosonicChannelParams("amplifier", gain=3.5, n_b=1.5),
        BosonicChannelParams("additive_noise", xi=1.0),
        BosonicChannelParams("additive_noise", xi=0.25),
    ]
    worst_lim = max(abs(constrained_entropy(p, 1e6) - unconstrained_entropy(p)) for p in limit_cases)
    return [Measurement("unconstrained values", worst_exact, 1e-9), Measurement("N_S = 1e6 limit", worst_lim, 1e-3)]


def sibson_grid_minimum(rho: np.ndarray, alpha: float, stages: int = 3, points: int = 21) -> float:
    """``-min_sigma Dbar_alpha(rho_AB || I_A (x) sigma_B)`` over a zooming Bloch-ball grid (qubit ``B``).

    Each stage evaluates a cube of ``points**3`` Bloch vectors; later stages
    zoom in around the best point so far.
    """
    m = linalg.partial_trace(linalg.mpow(rho, alpha), [rho.shape[0] // 2, 2], keep=[1])
    paulis = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=np.complex128)
    mc = np.real(np.array([np.trace(m @ p) for p in paulis]))
    tr_m = np.trace(m).real
    center, half = np.zeros(3), 1.0
    best_val, best_r = math.inf, np.zeros(3)
    for _ in range(stages):
        axis = np.linspace(-half, half, points)
        grid = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), -1).reshape(-1, 3) + center
        norm = np.linalg.norm(grid, axis=1)
        grid, norm = grid[norm < 1 - 1e-9], norm[norm < 1 - 1e-9]
        # sigma^(1-alpha) = a I + b (n . sigma) with eigenvalues ((1 +- |r|)/2)^(1-alpha)
        lp = ((1 + norm) / 2) ** (1 - alpha)
        lm = ((1 - norm) / 2) ** (1 - alpha)
        a, b = (lp + lm) / 2, (lp - lm) / 2
        with np.errstate(invalid="ignore", divide="ignore"):
            unit = np.where(norm[:, None] > 0, grid / norm[:, None], 0.0)
        q = a * tr_m + b * (unit @ mc)
        vals = np.log2(q) / (alpha - 1)
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val, best_r = float(vals[i]), grid[i]
        center, half = best_r, 2.0 * (axis[1] - axis[0])
    return -best_val


def property_suites(policy: NumericPolicy) -> list[Measurement]:
    rng = _rng(policy, 10)
    # analytic vs finite-difference gradient of the channel-entropy objective
    grad_dev = 0.0
    for _ in range(10):
        ch = random_channel(2, 3, rng)
        f, g = conditional_entropy_objective(ch)
        rho = 0.5 * random_state(2, rng) + 0.5 * np.eye(2) / 2
        diff = g(rho) - fd_gradient(f, rho)
        # compare modulo the identity direction, which the trace constraint ignores
        diff -= np.trace(diff) / 2 * np.eye(2)
        grad_dev = max(grad_dev, float(np.max(np.abs(diff))))
    # closed-form Sibson optimum vs grid minimization
    sib_dev = 0.0
    for _ in range(3):
        rho = random_state(4, rng)
        sib_dev = max(sib_dev, abs(petz_conditional_optimized(rho, [2, 2], 2.0) - sibson_grid_minimum(rho, 2.0)))
    # data processing under random channels
    dp = 0.0
    for _ in range(10):
        r, s = random_state(3, rng), random_state(3, rng)
        ch = random_channel(3, 2, rng)
        nr, ns = apply_channel(ch, r), apply_channel(ch, s)
        dp = max(dp, relative_entropy(nr, ns).value - relative_entropy(r, s).value)
        for a in (0.5, 0.8, 1.5, 3.0):
            dp = max(dp, sandwiched_renyi(nr, ns, a).value - sandwiched_renyi(r, s, a).value)
        for a in (0.5, 1.5, 2.0):
            dp = max(dp, petz_renyi(nr, ns, a).value - petz_renyi(r, s, a).value)
    # Frank-Wolfe certificates on concave runs
    gap = 0.0
    for d_in, d_out in ((2, 2), (2, 3), (3, 2), (3, 3)):
        rep = channel_entropy(random_channel(d_in, d_out, rng), policy)
        gap = max(gap, rep.fw_gap if rep.converged else math.inf)
    return [
        Measurement("gradient vs finite difference", grad_dev, 1e-5),
        Measurement("Sibson vs grid", sib_dev, 2e-4),
        Measurement("data-processing violation", dp, 1e-9),
        Measurement("Frank-Wolfe gap", gap, policy.opt_tol),
    ]


CRITERIA: list[tuple[int, str, Callable[[NumericPolicy], list[Measurement]]]] = [
    (1, "closed-form finite-dimensional entropies", closed_form_entropies),
    (2, "dimension saturation", dimension_saturation),
    (3, "reduction to states", replacer_reduction),
    (4, "additivity", additivity),
    (5, "Renyi bridge to the min-entropy", renyi_bridge),
    (6, "CB-norm relation", cb_norm_relation),
    (7, "divergence collapses", divergence_collapse),
    (8, "superchannel monotonicity", superchannel_monotonicity),
    (9, "bosonic formulas", bosonic_formulas),
    (10, "property suites", property_suites),
]


def run_criterion(number: int, policy: NumericPolicy = NumericPolicy()) -> CriterionResult:
    for num, title, check in CRITERIA:
        if num == number:
            start = time.perf_counter()
            measurements = check(policy)
            return CriterionResult(num, title, measurements, time.perf_counter() - start)
    raise KeyError(number)


def run_all(policy: NumericPolicy = NumericPolicy(), emit: Callable[[str], None] | None = None) -> list[CriterionResult]:
    results = []
    for num, *_ in CRITERIA:
        res = run_criterion(num, policy)
        if emit is not None:
            emit(res.line())
        results.append(res)
    return results
