import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chanent import linalg
from chanent.channels import (
    ChoiOperator,
    KrausChannel,
    apply_adjoint,
    apply_channel,
    canonical,
    choi_distance,
    choi_to_kraus,
    complementary,
    covariance_check,
    heisenberg_weyl,
    kraus_to_choi,
    make_superchannel,
    random_channel,
    random_unitary,
    standard_channel,
    stinespring,
    superchannel_apply,
    tensor_channels,
    validate_channel,
)
from chanent.errors import ValidationError
from chanent.states import random_state

Z = np.diag([1.0, -1.0]).astype(complex)
PAULIS = [np.eye(2), np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1, -1])]

STANDARD = [
    ("identity", {"d": 3}),
    ("randomizing", {"d": 2}),
    ("replacer", {"sigma": np.diag([0.3, 0.7]), "d": 3}),
    ("erasure", {"d": 2, "p": 0.5}),
    ("erasure", {"d": 3, "p": 0.0}),
    ("dephasing", {"probs": [0.2, 0.3, 0.5]}),
    ("depolarizing", {"d": 2, "p": 0.4}),
    ("werner_holevo", {"d": 3}),
    ("amplitude_damping", {"gamma": 0.3}),
]


@pytest.mark.parametrize("kind, params", STANDARD)
def test_standard_channels_are_valid(kind, params):
    ch = standard_channel(kind, **params)
    rep = validate_channel(ch)
    assert rep.valid and rep.tp_defect <= 1e-12
    assert 1 <= ch.num_kraus <= ch.dim_in * ch.dim_out
    tr_b = linalg.partial_trace(kraus_to_choi(ch).matrix, [ch.dim_in, ch.dim_out], keep=[0])
    np.testing.assert_allclose(tr_b, np.eye(ch.dim_in), atol=1e-12)


def test_erasure_action(rng):
    rho = random_state(2, rng)
    out = apply_channel(standard_channel("erasure", d=2, p=0.3), rho)
    expected = np.zeros((3, 3), dtype=complex)
    expected[:2, :2] = 0.7 * rho
    expected[2, 2] = 0.3
    np.testing.assert_allclose(out, expected, atol=1e-14)


def test_depolarizing_action(rng):
    rho = random_state(3, rng)
    out = apply_channel(standard_channel("depolarizing", d=3, p=0.4), rho)
    np.testing.assert_allclose(out, 0.6 * rho + 0.4 * np.eye(3) / 3, atol=1e-14)


def test_werner_holevo_action(rng):
    rho = random_state(3, rng)
    out = apply_channel(standard_channel("werner_holevo", d=3), rho)
    np.testing.assert_allclose(out, (np.eye(3) - rho.T) / 2, atol=1e-14)


@pytest.mark.parametrize(
    "kind, params",
    [("erasure", {"d": 2, "p": 1.5}), ("depolarizing", {"d": 0, "p": 0.1}), ("dephasing", {"probs": [0.5, 0.6]}),
     ("nonsense", {})],
)
def test_standard_channel_rejects_bad_parameters(kind, params):
    with pytest.raises(ValidationError):
        standard_channel(kind, **params)


def test_kraus_shape_is_checked():
    with pytest.raises(ValidationError, match="shape"):
        KrausChannel((np.eye(2), np.eye(3)), 2, 2)


def test_validate_reports_defect():
    rep = validate_channel(KrausChannel((np.eye(2) * 1.1,), 2, 2))
    assert not rep.valid and rep.tp_defect == pytest.approx(0.21)


def test_kraus_arrays_are_read_only():
    ch = standard_channel("identity", d=2)
    with pytest.raises(ValueError):
        ch.kraus[0][0, 0] = 2.0


def test_choi_of_identity_to_kraus():
    ch = choi_to_kraus(ChoiOperator(linalg.gamma_operator(2), 2, 2))
    assert ch.num_kraus == 1
    k = ch.kraus[0]
    np.testing.assert_allclose(k / k[0, 0], np.eye(2), atol=1e-14)
    assert abs(abs(k[0, 0]) - 1) < 1e-14


def test_choi_of_randomizing_to_kraus(rng):
    ch = choi_to_kraus(ChoiOperator(np.eye(4) / 2, 2, 2))
    assert ch.num_kraus == 4
    np.testing.assert_allclose(apply_channel(ch, random_state(2, rng)), np.eye(2) / 2, atol=1e-14)


def test_choi_to_kraus_rejects_non_psd():
    with pytest.raises(ValidationError, match="PSD"):
        choi_to_kraus(ChoiOperator(np.diag([1.0, -0.5, 0.5, 1.0]), 2, 2))


def test_choi_to_kraus_rejects_non_tp():
    with pytest.raises(ValidationError, match="trace preserving"):
        choi_to_kraus(ChoiOperator(np.eye(4), 2, 2))


@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_choi_round_trip(d_in, d_out, seed):
    ch = random_channel(d_in, d_out, np.random.default_rng(seed))
    back = choi_to_kraus(kraus_to_choi(ch))
    assert choi_distance(ch, back) <= 1e-10
    assert back.num_kraus <= d_in * d_out


def test_choi_is_image_of_gamma(rng):
    ch = random_channel(2, 3, rng)
    choi = apply_channel(ch, linalg.gamma_operator(2), embed=2)
    np.testing.assert_allclose(kraus_to_choi(ch).matrix, choi, atol=1e-13)


def test_dephasing_stinespring():
    p = 0.3
    iso = stinespring(standard_channel("dephasing", probs=[1 - p, p]))
    e0, e1 = np.array([[1.0], [0.0]]), np.array([[0.0], [1.0]])
    expected = np.sqrt(1 - p) * np.kron(np.eye(2), e0) + np.sqrt(p) * np.kron(Z, e1)
    # Kraus operators are only fixed up to a unitary on E; compare the channels instead
    np.testing.assert_allclose(iso.V.conj().T @ iso.V, np.eye(2), atol=1e-14)
    rho = np.array([[0.6, 0.2 - 0.1j], [0.2 + 0.1j, 0.4]])
    for v in (iso.V, expected):
        out = linalg.partial_trace(v @ rho @ v.conj().T, [2, 2], keep=[0])
        np.testing.assert_allclose(out, np.diag(np.diag(rho)) + (1 - 2 * p) * (rho - np.diag(np.diag(rho))), atol=1e-14)


def test_stinespring_matches_kraus(rng):
    ch = random_channel(3, 2, rng)
    iso = stinespring(ch)
    rho = random_state(3, rng)
    out = linalg.partial_trace(iso.V @ rho @ iso.V.conj().T, [2, iso.dim_env], keep=[0])
    np.testing.assert_allclose(out, apply_channel(ch, rho), atol=1e-13)


def test_complementary_of_dephasing():
    comp = complementary(standard_channel("dephasing", probs=[0.5, 0.5]))
    np.testing.assert_allclose(apply_channel(comp, np.eye(2) / 2), np.eye(2) / 2, atol=1e-15)


def test_complementary_environment_output(rng):
    ch = random_channel(2, 2, rng)
    iso = stinespring(ch)
    rho = random_state(2, rng)
    out = linalg.partial_trace(iso.V @ rho @ iso.V.conj().T, [2, iso.dim_env], keep=[1])
    np.testing.assert_allclose(apply_channel(complementary(ch), rho), out, atol=1e-13)


def test_complementary_is_involutive(rng):
    ch = random_channel(2, 3, rng)
    np.testing.assert_allclose(complementary(complementary(ch)).stacked, ch.stacked)


def test_adjoint_is_hilbert_schmidt_adjoint(rng):
    ch = random_channel(3, 2, rng)
    x = random_state(3, rng)
    y = random_state(2, rng)
    lhs = np.trace(apply_channel(ch, x) @ y)
    rhs = np.trace(x @ apply_adjoint(ch, y))
    assert abs(lhs - rhs) < 1e-14


def test_tensor_channel_choi_is_permuted_product(rng):
    n, m = random_channel(2, 2, rng), random_channel(2, 3, rng)
    big = kraus_to_choi(tensor_channels(n, m)).matrix
    prod = np.kron(kraus_to_choi(n).matrix, kraus_to_choi(m).matrix)
    perm = linalg.permute_subsystems(prod, [2, 2, 2, 3], [0, 2, 1, 3])
    np.testing.assert_allclose(big, perm, atol=1e-13)


def test_tensor_channel_on_product_input(rng):
    n, m = random_channel(2, 2, rng), random_channel(3, 2, rng)
    r, s = random_state(2, rng), random_state(3, rng)
    out = apply_channel(tensor_channels(n, m), np.kron(r, s))
    np.testing.assert_allclose(out, np.kron(apply_channel(n, r), apply_channel(m, s)), atol=1e-13)


@pytest.mark.parametrize("seed", range(5))
def test_random_unitary_superchannel_preserves_randomizing(seed):
    theta = make_superchannel("random_unitary", seed=seed, dim_in=2, dim_out=3, terms=3)
    randomizing = standard_channel("replacer", sigma=np.eye(3) / 3, d=2)
    assert choi_distance(superchannel_apply(theta, randomizing), randomizing) <= 1e-12


def test_pre_post_superchannel_is_conjugation(rng):
    u, v = random_unitary(2, rng), random_unitary(2, rng)
    ch = random_channel(2, 2, rng)
    pre = KrausChannel((u,), 2, 2)
    post = KrausChannel((v,), 2, 2)
    out = superchannel_apply(make_superchannel("pre_post", pre=pre, post=post), ch)
    # Choi of V o N o U is (U^T (x) V) Gamma^N (U^T (x) V)^dagger
    w = np.kron(u.T, v)
    expected = w @ kraus_to_choi(ch).matrix @ w.conj().T
    np.testing.assert_allclose(kraus_to_choi(out).matrix, expected, atol=1e-13)


@pytest.mark.parametrize("kind", ["unital_pre_mix", "doubly_stochastic", "random_unitary"])
def test_superchannel_outputs_channels(kind, rng):
    theta = make_superchannel(kind, seed=3, dim_in=2, dim_out=2, dim_env=2, dim_final=3)
    out = superchannel_apply(theta, random_channel(2, 2, rng))
    assert validate_channel(out).valid
    assert out.dim_in == theta.pre.dim_in


def test_doubly_stochastic_is_unital_on_both_sides():
    theta = make_superchannel("doubly_stochastic", seed=1, dim_in=2, dim_out=2)
    out = superchannel_apply(theta, standard_channel("randomizing", d=2))
    assert choi_distance(out, standard_channel("randomizing", d=2)) <= 1e-12


def test_superchannel_seed_is_deterministic():
    a = make_superchannel("random_unitary", seed=9, dim_in=2, dim_out=2)
    b = make_superchannel("random_unitary", seed=9, dim_in=2, dim_out=2)
    np.testing.assert_array_equal(a.pre.stacked, b.pre.stacked)


def test_dephasing_is_weyl_covariant():
    hw = heisenberg_weyl(2)
    rep = covariance_check(standard_channel("dephasing", probs=[0.7, 0.3]), hw, hw)
    assert rep.covariant and rep.one_design


def test_depolarizing_is_pauli_covariant():
    rep = covariance_check(standard_channel("depolarizing", d=2, p=0.3), PAULIS, PAULIS)
    assert rep.covariant and rep.one_design


def test_amplitude_damping_is_not_pauli_covariant():
    rep = covariance_check(standard_channel("amplitude_damping", gamma=0.3), PAULIS, PAULIS)
    assert not rep.covariant
    assert rep.max_deviation > 1e-3


def test_covariance_rejects_non_unitary():
    with pytest.raises(ValidationError):
        covariance_check(standard_channel("identity", d=2), [2 * np.eye(2)], [np.eye(2)])


def test_canonical_form_is_minimal(rng):
    ch = KrausChannel.from_kraus([np.eye(2) / np.sqrt(2), np.eye(2) / np.sqrt(2)])
    assert canonical(ch).num_kraus == 1
