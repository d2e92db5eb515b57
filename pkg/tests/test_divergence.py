import math

import numpy as np
import pytest

from chanent.channels import (
    kraus_to_choi,
    make_superchannel,
    random_channel,
    standard_channel,
    superchannel_apply,
    tensor_channels,
)
from chanent.divergence import (
    adversarial_choi_divergence,
    adversarial_divergence,
    choi_divergence,
    choi_entropy_suite,
    generalized_channel_divergence,
    state_divergence,
)
from chanent.entropy import channel_entropy, extended_min_entropy, min_entropy_channel, purified_output
from chanent.errors import DomainError, ValidationError
from chanent.optimize import NumericPolicy
from chanent.states import max_relative_entropy, random_state, renyi_entropy, von_neumann_entropy

FAST = NumericPolicy(restarts=3)
ID2 = standard_channel("identity", d=2)
R2 = standard_channel("randomizing", d=2)
PAULIS = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


def _full_rank_channel(rng, d_in=2, d_out=2):
    # four Kraus operators keep the Choi state full rank, so every divergence is finite
    return random_channel(d_in, d_out, rng, num_kraus=d_in * d_out)


@pytest.mark.parametrize(
    "compute",
    [
        lambda n, m: generalized_channel_divergence(n, m, policy=FAST),
        lambda n, m: choi_divergence(n, m),
        lambda n, m: adversarial_choi_divergence(n, m, policy=FAST),
        lambda n, m: adversarial_divergence(n, m, policy=FAST),
    ],
    ids=["generalized", "choi", "adversarial_choi", "adversarial"],
)
def test_identity_against_randomizing(compute):
    assert compute(ID2, R2).value == pytest.approx(2.0, abs=1e-5)


@pytest.mark.parametrize(
    "compute",
    [
        lambda n: generalized_channel_divergence(n, n, policy=FAST),
        lambda n: choi_divergence(n, n),
        lambda n: adversarial_choi_divergence(n, n, policy=FAST),
        lambda n: adversarial_divergence(n, n, policy=FAST),
    ],
    ids=["generalized", "choi", "adversarial_choi", "adversarial"],
)
def test_divergence_of_channel_with_itself_vanishes(compute, rng):
    assert abs(compute(random_channel(2, 2, rng)).value) <= 1e-5


def test_max_divergence_identity_randomizing():
    res = generalized_channel_divergence(ID2, R2, "max")
    assert res.value == pytest.approx(2.0, abs=1e-12)
    assert res.exactness == "closed_form"


def test_choi_max_is_closed_form(rng):
    res = choi_divergence(random_channel(2, 2, rng), R2, "max")
    assert (res.mode, res.exactness) == ("choi", "closed_form")


def test_generalized_matches_entropy_route(rng):
    ch = random_channel(2, 2, rng)
    res = generalized_channel_divergence(ch, R2, policy=FAST)
    assert res.value == pytest.approx(res.details["entropy_route"], abs=1e-5)
    assert res.exactness == "heuristic_bound"


def test_adversarial_choi_collapses_to_choi(rng):
    ch = random_channel(2, 2, rng)
    res = adversarial_choi_divergence(ch, R2, policy=FAST)
    assert res.value == pytest.approx(choi_divergence(ch, R2).value, abs=1e-5)
    assert res.exactness == "certified"


def test_adversarial_collapses_to_generalized(rng):
    ch = random_channel(2, 2, rng)
    gen = generalized_channel_divergence(ch, R2, policy=FAST).value
    adv = adversarial_divergence(ch, R2, policy=FAST)
    assert adv.value == pytest.approx(gen, abs=1e-4)
    assert adv.exactness == "heuristic_bound"


@pytest.mark.parametrize("seed", range(3))
def test_adversarial_max_matches_min_entropy(seed):
    ch = random_channel(2, 2, np.random.default_rng(seed))
    res = adversarial_divergence(ch, R2, "max", policy=FAST)
    assert res.value == pytest.approx(1.0 - min_entropy_channel(ch), abs=1e-6)
    assert res.exactness == "heuristic_bound"


def test_max_divergence_is_constant_over_full_schmidt_rank_inputs(rng):
    n, m = _full_rank_channel(rng), _full_rank_channel(rng)
    cn, cm = kraus_to_choi(n).matrix, kraus_to_choi(m).matrix
    reference = choi_divergence(n, m, "max").value
    for _ in range(10):
        tau = random_state(2, rng)
        value = max_relative_entropy(purified_output(cn, tau, 2), purified_output(cm, tau, 2)).value
        assert value == pytest.approx(reference, abs=1e-8)


def test_adversarial_choi_below_product_grid(rng):
    ch = random_channel(2, 2, rng)
    value = adversarial_choi_divergence(ch, R2, policy=FAST).value
    omega = kraus_to_choi(ch).normalized
    omega_r = omega.reshape(2, 2, 2, 2).trace(axis1=1, axis2=3)
    axis = np.linspace(-1, 1, 27)
    pts = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), -1).reshape(-1, 3)
    pts = pts[np.linalg.norm(pts, axis=1) < 0.999]
    assert len(pts) > 9000
    sig = 0.5 * (np.eye(2) + np.einsum("nk,kij->nij", pts, PAULIS))
    w, v = np.linalg.eigh(sig)
    log_sig = np.einsum("nij,nj,nkj->nik", v, np.log2(w), v.conj())
    # D(omega || sigma (x) pi) = -H(omega) - Tr[omega_R log sigma] + log2 2
    grid = -von_neumann_entropy(omega) - np.einsum("ij,nji->n", omega_r, log_sig).real + 1.0
    assert value <= grid.min() + 1e-9


@pytest.mark.parametrize(
    "kind, alpha", [("relative", None), ("renyi", 0.5), ("renyi", 2.0), ("petz", 0.5), ("petz", 1.5)]
)
@pytest.mark.parametrize("seed", range(4))
def test_choi_divergence_monotone_under_unital_pre_mix(kind, alpha, seed):
    rng = np.random.default_rng(seed)
    n, m = _full_rank_channel(rng), _full_rank_channel(rng)
    theta = make_superchannel("unital_pre_mix", seed=seed, dim_in=2, dim_out=2, dim_env=2, dim_final=2)
    before = choi_divergence(n, m, kind, alpha).value
    after = choi_divergence(superchannel_apply(theta, n), superchannel_apply(theta, m), kind, alpha).value
    assert after <= before + 1e-6


@pytest.mark.parametrize("alpha", [0.75, 1.5])
@pytest.mark.parametrize("seed", range(3))
def test_suite_never_decreases_under_doubly_stochastic(alpha, seed):
    rng = np.random.default_rng(seed)
    ch = random_channel(2, 2, rng)
    theta = make_superchannel("doubly_stochastic", seed=seed, dim_in=2, dim_out=2, terms=3)
    before = choi_entropy_suite(ch, alpha, FAST)
    after = choi_entropy_suite(superchannel_apply(theta, ch), alpha, FAST)
    for name, b, a in zip(before._fields, before, after):
        assert a >= b - 1e-6, name


@pytest.mark.parametrize("alpha", [0.5, 0.8, 1.5, 2.0])
def test_suite_reduces_to_state_entropies_for_replacer(alpha, rng):
    sigma = random_state(3, rng)
    suite = choi_entropy_suite(standard_channel("replacer", sigma=sigma, d=2), alpha, FAST)
    assert suite.conditional == pytest.approx(von_neumann_entropy(sigma), abs=1e-6)
    for value in suite[1:]:
        assert value == pytest.approx(renyi_entropy(sigma, alpha), abs=1e-6)


def test_suite_identity():
    suite = choi_entropy_suite(ID2, 2.0, FAST)
    assert suite.conditional == pytest.approx(-1.0, abs=1e-12)
    for value in suite:
        assert value == pytest.approx(-1.0, abs=1e-6)


@pytest.mark.parametrize("alpha", [1 - 1e-4, 1 + 1e-4])
def test_suite_converges_to_conditional_entropy(alpha, rng):
    suite = choi_entropy_suite(random_channel(2, 3, rng), alpha, FAST)
    for value in suite:
        assert value == pytest.approx(suite.conditional, abs=1e-3)


def test_suite_large_alpha_approaches_extended_min_entropy(rng):
    ch = random_channel(2, 2, rng)
    ext = extended_min_entropy(ch).value
    values = [choi_entropy_suite(ch, a, FAST).sandwiched_optimized for a in (10.0, 100.0, 1e3, 1e4)]
    # non-increasing in alpha and bounded below by the limit
    assert np.all(np.diff(values) <= 1e-9)
    assert values[-1] >= ext - 1e-9
    assert values[-1] - ext <= 2e-3


def test_suite_is_additive(rng):
    n, m = random_channel(2, 2, rng), random_channel(2, 2, rng)
    joint = choi_entropy_suite(tensor_channels(n, m), 1.5, FAST)
    sn, sm = choi_entropy_suite(n, 1.5, FAST), choi_entropy_suite(m, 1.5, FAST)
    for name, j, a, b in zip(joint._fields, joint, sn, sm):
        assert j == pytest.approx(a + b, abs=1e-6), name


@pytest.mark.parametrize("alpha", [0.4, 1.0])
def test_suite_alpha_window(alpha):
    with pytest.raises(DomainError):
        choi_entropy_suite(ID2, alpha)


def test_dimension_mismatch_is_rejected(rng):
    with pytest.raises(ValidationError, match="different dimensions"):
        choi_divergence(random_channel(2, 2, rng), random_channel(2, 3, rng))


def test_renyi_kind_needs_alpha():
    with pytest.raises(ValidationError):
        choi_divergence(ID2, R2, "renyi")
    with pytest.raises(DomainError):
        state_divergence("petz", np.eye(2) / 2, np.eye(2) / 2, 1.0)


def test_unsupported_divergence_is_infinite():
    # the replacer's outputs never contain the entangled part of the identity's outputs
    reset = standard_channel("replacer", sigma=np.diag([1.0, 0.0]), d=2)
    assert choi_divergence(ID2, reset).value == math.inf
    assert generalized_channel_divergence(ID2, reset, policy=FAST).value == math.inf


def test_generalized_relative_equals_entropy_difference():
    # D(N || R) = log2|B| - H(N) for the erasure channel
    ch = standard_channel("erasure", d=2, p=0.5)
    rand = standard_channel("replacer", sigma=np.eye(3) / 3, d=2)
    value = generalized_channel_divergence(ch, rand, policy=FAST).value
    assert value == pytest.approx(math.log2(3) - channel_entropy(ch).value, abs=1e-5)
