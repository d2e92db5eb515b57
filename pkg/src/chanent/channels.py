"""Channel representations, standard constructors and superchannels.

A channel ``A -> B`` is stored as a tuple of ``|B| x |A|`` Kraus matrices.
Choi operators use the reference system first: ``Gamma^N = sum_ij |i><j|_R
(x) N(|i><j|)``, so ``Gamma^N`` acts on ``R (x) B`` with ``R`` the slow index.
For a product channel ``N (x) M`` the Choi operator is ordered
``R1 R2 B1 B2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from . import linalg
from .errors import ValidationError

TP_TOL = 1e-10
CHOI_TP_TOL = 1e-9
PSD_TOL = 1e-10
KRAUS_CUTOFF = 1e-12

STANDARD_KINDS = (
    "identity",
    "randomizing",
    "replacer",
    "erasure",
    "dephasing",
    "depolarizing",
    "werner_holevo",
    "amplitude_damping",
)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class KrausChannel:
    """A linear map ``rho -> sum_i K_i rho K_i^dagger``.

    Construction only checks shapes; trace preservation is reported by
    :func:`validate_channel` and enforced by the operations that need it.
    """

    kraus: tuple
    dim_in: int
    dim_out: int
    name: str = ""

    def __post_init__(self):
        ops = tuple(_frozen(k) for k in self.kraus)
        if not ops:
            raise ValidationError("a channel needs at least one Kraus operator")
        for i, k in enumerate(ops):
            if k.shape != (self.dim_out, self.dim_in):
                raise ValidationError(
                    f"Kraus operator {i} has shape {k.shape}, expected "
                    f"({self.dim_out}, {self.dim_in})"
                )
        object.__setattr__(self, "kraus", ops)

    @classmethod
    def from_kraus(cls, kraus: Sequence, name: str = "") -> "KrausChannel":
        ops = [np.atleast_2d(np.asarray(k, dtype=np.complex128)) for k in kraus]
        if not ops:
            raise ValidationError("a channel needs at least one Kraus operator")
        d_out, d_in = ops[0].shape
        return cls(tuple(ops), d_in, d_out, name)

    @property
    def stacked(self) -> np.ndarray:
        """Kraus operators as an array of shape ``(n, |B|, |A|)``."""
        return np.stack(self.kraus)

    @property
    def num_kraus(self) -> int:
        return len(self.kraus)

    def __call__(self, rho) -> np.ndarray:
        return apply_channel(self, rho)


@dataclass(frozen=True)
class ChoiOperator:
    """Unnormalized Choi operator ``N(Gamma_RA)`` on ``R (x) B``."""

    matrix: np.ndarray
    dim_in: int
    dim_out: int

    def __post_init__(self):
        m = _frozen(self.matrix)
        n = self.dim_in * self.dim_out
        if m.shape != (n, n):
            raise ValidationError(f"Choi matrix has shape {m.shape}, expected ({n}, {n})")
        object.__setattr__(self, "matrix", m)

    @property
    def normalized(self) -> np.ndarray:
        """The Choi state ``Phi^N = Gamma^N / |A|``."""
        return self.matrix / self.dim_in


@dataclass(frozen=True)
class StinespringIsometry:
    """Isometry ``V: A -> B (x) E`` with ``N(rho) = Tr_E V rho V^dagger``."""

    V: np.ndarray
    dim_in: int
    dim_out: int
    dim_env: int


@dataclass(frozen=True)
class Superchannel:
    """Pre-processing ``C -> A E``, memory ``E`` and post-processing ``B E -> D``."""

    pre: KrausChannel
    post: KrausChannel
    dim_memory: int
    kind: str = "general"
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.pre.dim_out % self.dim_memory or self.post.dim_in % self.dim_memory:
            raise ValidationError(
                f"memory dimension {self.dim_memory} does not divide the pre-processing "
                f"output ({self.pre.dim_out}) and post-processing input ({self.post.dim_in})"
            )

    @property
    def dim_a(self) -> int:
        return self.pre.dim_out // self.dim_memory

    @property
    def dim_b(self) -> int:
        return self.post.dim_in // self.dim_memory


class ValidationReport(NamedTuple):
    valid: bool
    tp_defect: float
    dim_in: int
    dim_out: int
    num_kraus: int


def validate_channel(channel: KrausChannel, tol: float = TP_TOL) -> ValidationReport:
    """Report the trace-preservation defect ``||sum K^dagger K - I||_inf``.

    Complete positivity holds by construction for a Kraus form.
    """
    k = channel.stacked
    defect = np.einsum("nba,nbc->ac", k.conj(), k) - np.eye(channel.dim_in)
    norm = linalg.schatten_norm(defect, np.inf)
    return ValidationReport(norm <= tol, norm, channel.dim_in, channel.dim_out, channel.num_kraus)


def require_channel(channel: KrausChannel) -> KrausChannel:
    report = validate_channel(channel)
    if not report.valid:
        label = f" {channel.name!r}" if channel.name else ""
        raise ValidationError(
            f"channel{label} is not trace preserving (defect {report.tp_defect:.3e})"
        )
    return channel


def apply_channel(channel: KrausChannel, rho, embed: int | None = None) -> np.ndarray:
    """Apply ``id_R (x) N`` to ``rho``.

    Args:
        channel: The channel ``N``.
        rho: Operator on ``A`` or, with ``embed``, on ``R (x) A``.
        embed: Dimension of the untouched reference system ``R``.

    Returns:
        The output operator on ``B`` (or ``R (x) B``).

    Raises:
        ValidationError: If the dimensions do not match.
    """
    rho = linalg.as_matrix(rho)
    k = channel.stacked
    r = 1 if embed is None else int(embed)
    if rho.shape != (r * channel.dim_in, r * channel.dim_in):
        raise ValidationError(
            f"input has shape {rho.shape}, expected ({r * channel.dim_in}, {r * channel.dim_in})"
        )
    if embed is None:
        return np.einsum("nba,ac,ndc->bd", k, rho, k.conj())
    t = rho.reshape(r, channel.dim_in, r, channel.dim_in)
    out = np.einsum("nba,iajc,ndc->ibjd", k, t, k.conj())
    return out.reshape(r * channel.dim_out, r * channel.dim_out)


def apply_adjoint(channel: KrausChannel, y, embed: int | None = None) -> np.ndarray:
    """Apply the Hilbert-Schmidt adjoint ``sum_i K_i^dagger Y K_i`` (optionally ``id_R (x)``)."""
    y = linalg.as_matrix(y)
    k = channel.stacked
    if embed is None:
        return np.einsum("nba,bd,ndc->ac", k.conj(), y, k)
    r = int(embed)
    t = y.reshape(r, channel.dim_out, r, channel.dim_out)
    out = np.einsum("nba,ibjd,ndc->iajc", k.conj(), t, k)
    return out.reshape(r * channel.dim_in, r * channel.dim_in)


def kraus_to_choi(channel: KrausChannel) -> ChoiOperator:
    """Unnormalized Choi operator ``sum_i (I (x) K_i) Gamma (I (x) K_i)^dagger``."""
    k = channel.stacked
    # vec_i[a * dB + b] = K_i[b, a]
    vecs = k.transpose(0, 2, 1).reshape(channel.num_kraus, -1)
    return ChoiOperator(vecs.T @ vecs.conj(), channel.dim_in, channel.dim_out)


def choi_to_kraus(
    choi: ChoiOperator, name: str = "", cutoff: float = KRAUS_CUTOFF
) -> KrausChannel:
    """Canonical Kraus operators from the spectral decomposition of a Choi operator.

    One Kraus operator per eigenvalue above ``cutoff * lambda_max``, in ascending
    eigenvalue order, with the first non-negligible entry made real-positive.

    Raises:
        ValidationError: If the Choi operator is not PSD or not trace preserving.
    """
    dA, dB = choi.dim_in, choi.dim_out
    m = linalg.hermitian_part(choi.matrix)
    w, v = linalg.hermitian_eig(m)
    if w[0] < -PSD_TOL * max(1.0, abs(w[-1])):
        raise ValidationError(f"Choi operator is not PSD (eigenvalue {w[0]:.3e})")
    tr_b = linalg.partial_trace(m, [dA, dB], keep=[0])
    defect = np.max(np.abs(tr_b - np.eye(dA)))
    if defect > CHOI_TP_TOL:
        raise ValidationError(f"Choi operator is not trace preserving: Tr_B differs from I by {defect:.3e}")
    keep = w > cutoff * max(w[-1], 0.0)
    ops = []
    for lam, vec in zip(w[keep], v[:, keep].T):
        big = np.flatnonzero(np.abs(vec) > 1e-12 * np.max(np.abs(vec)))
        if big.size:
            vec = vec * (abs(vec[big[0]]) / vec[big[0]])
        ops.append(np.sqrt(lam) * vec.reshape(dA, dB).T)
    return KrausChannel(tuple(ops), dA, dB, name)


def canonical(channel: KrausChannel) -> KrausChannel:
    """Canonical Kraus form (minimal number of operators)."""
    return choi_to_kraus(kraus_to_choi(channel), name=channel.name)


def choi_distance(a: KrausChannel, b: KrausChannel) -> float:
    """Max-entry distance between the Choi operators of two channels."""
    ca, cb = kraus_to_choi(a).matrix, kraus_to_choi(b).matrix
    if ca.shape != cb.shape:
        return float("inf")
    return float(np.max(np.abs(ca - cb)))


def stinespring(channel: KrausChannel) -> StinespringIsometry:
    """``V = sum_i K_i (x) |i>_E`` with ``E`` the fast index."""
    k = channel.stacked
    n = channel.num_kraus
    V = k.transpose(1, 0, 2).reshape(channel.dim_out * n, channel.dim_in)
    return StinespringIsometry(V, channel.dim_in, channel.dim_out, n)


def complementary(channel: KrausChannel) -> KrausChannel:
    """Complementary channel ``A -> E`` with ``[N^c(rho)]_ij = Tr K_i rho K_j^dagger``.

    Its Kraus operators are the rows ``<b| K_i`` regrouped by ``b``, so
    ``complementary(complementary(N))`` returns the original Kraus set.
    """
    k = channel.stacked.transpose(1, 0, 2)
    name = f"{channel.name}^c" if channel.name else ""
    return KrausChannel(tuple(k), channel.dim_in, channel.num_kraus, name)


# ----------------------------------------------------------------- constructors


def _check_dim(d, label="d", minimum=1) -> int:
    if int(d) != d or d < minimum:
        raise ValidationError(f"{label} must be an integer >= {minimum}, got {d}")
    return int(d)


def _check_prob(p, label="p") -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"{label} must lie in [0, 1], got {p}")
    return p


def generalized_z(d: int) -> np.ndarray:
    return np.diag(np.exp(2j * np.pi * np.arange(d) / d))


def generalized_x(d: int) -> np.ndarray:
    return np.roll(np.eye(d, dtype=np.complex128), 1, axis=0)


def heisenberg_weyl(d: int) -> list[np.ndarray]:
    """The ``d**2`` operators ``X^a Z^b``."""
    x, z = generalized_x(d), generalized_z(d)
    return [
        np.linalg.matrix_power(x, a) @ np.linalg.matrix_power(z, b)
        for a in range(d)
        for b in range(d)
    ]


def _check_state(sigma, d=None) -> np.ndarray:
    s = linalg.as_matrix(sigma)
    linalg.check_hermitian(s)
    if d is not None and s.shape != (d, d):
        raise ValidationError(f"state has shape {s.shape}, expected ({d}, {d})")
    if abs(np.trace(s).real - 1.0) > 1e-10 or linalg.eigvalsh(s)[0] < -1e-10:
        raise ValidationError("replacement state must be a density matrix")
    return s


def standard_channel(kind: str, **params) -> KrausChannel:
    """Build a named channel.

    Args:
        kind: One of ``identity(d)``, ``randomizing(d)``, ``replacer(d, sigma)``,
            ``erasure(d, p)``, ``dephasing(probs)``, ``depolarizing(d, p)``,
            ``werner_holevo(d)``, ``amplitude_damping(gamma)``.
        **params: Keyword parameters for the chosen kind.

    Returns:
        A trace-preserving :class:`KrausChannel`. The erasure flag is the last
        output basis vector.

    Raises:
        ValidationError: Unknown kind or parameters out of range.
    """
    try:
        return _STANDARD[kind](**params)
    except KeyError:
        raise ValidationError(
            f"unknown channel kind {kind!r}; expected one of {', '.join(STANDARD_KINDS)}"
        ) from None
    except TypeError as exc:
        raise ValidationError(f"bad parameters for {kind!r}: {exc}") from None


def _identity(d=2):
    d = _check_dim(d)
    return KrausChannel((np.eye(d),), d, d, f"identity_{d}")


def _randomizing(d=2):
    d = _check_dim(d)
    choi = ChoiOperator(np.eye(d * d) / d, d, d)
    return choi_to_kraus(choi, f"randomizing_{d}")


def _replacer(sigma, d=None):
    s = _check_state(sigma)
    dB = s.shape[0]
    dA = dB if d is None else _check_dim(d)
    choi = ChoiOperator(np.kron(np.eye(dA), s), dA, dB)
    return choi_to_kraus(choi, "replacer")


def _erasure(p, d=2):
    d, p = _check_dim(d), _check_prob(p)
    ops = []
    if p < 1.0:
        ops.append(np.sqrt(1 - p) * np.vstack([np.eye(d), np.zeros((1, d))]))
    if p > 0.0:
        for i in range(d):
            k = np.zeros((d + 1, d))
            k[d, i] = np.sqrt(p)
            ops.append(k)
    return KrausChannel(tuple(ops), d, d + 1, f"erasure_{d}_{p:g}")


def _dephasing(probs):
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim != 1 or probs.size < 2:
        raise ValidationError("dephasing needs a probability vector of length d >= 2")
    if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
        raise ValidationError(f"dephasing probabilities must be non-negative and sum to 1, got {probs}")
    d = probs.size
    z = generalized_z(d)
    ops = [np.sqrt(q) * np.linalg.matrix_power(z, ell) for ell, q in enumerate(probs) if q > 0]
    return KrausChannel(tuple(ops), d, d, f"dephasing_{d}")


def _depolarizing(p, d=2):
    d, p = _check_dim(d), _check_prob(p)
    choi = (1 - p) * linalg.gamma_operator(d) + p * np.eye(d * d) / d
    return choi_to_kraus(ChoiOperator(choi, d, d), f"depolarizing_{d}_{p:g}")


def _werner_holevo(d=2):
    d = _check_dim(d, minimum=2)
    swap = np.eye(d * d).reshape(d, d, d, d).transpose(1, 0, 2, 3).reshape(d * d, d * d)
    choi = (np.eye(d * d) - swap) / (d - 1)
    return choi_to_kraus(ChoiOperator(choi, d, d), f"werner_holevo_{d}")


def _amplitude_damping(gamma):
    g = _check_prob(gamma, "gamma")
    k0 = np.array([[1, 0], [0, np.sqrt(1 - g)]])
    k1 = np.array([[0, np.sqrt(g)], [0, 0]])
    return KrausChannel((k0, k1), 2, 2, f"amplitude_damping_{g:g}")


_STANDARD = {
    "identity": _identity,
    "randomizing": _randomizing,
    "replacer": _replacer,
    "erasure": _erasure,
    "dephasing": _dephasing,
    "depolarizing": _depolarizing,
    "werner_holevo": _werner_holevo,
    "amplitude_damping": _amplitude_damping,
}


def tensor_channels(first: KrausChannel, second: KrausChannel) -> KrausChannel:
    """Product channel with Kraus set ``{K_i (x) L_j}``."""
    ops = tuple(np.kron(a, b) for a in first.kraus for b in second.kraus)
    name = f"{first.name}*{second.name}" if first.name and second.name else ""
    return KrausChannel(
        ops, first.dim_in * second.dim_in, first.dim_out * second.dim_out, name
    )


def tensor_choi(first: ChoiOperator, second: ChoiOperator) -> np.ndarray:
    """Choi operator of a product channel, reordered from ``R1 B1 R2 B2`` to ``R1 R2 B1 B2``."""
    dims = [first.dim_in, first.dim_out, second.dim_in, second.dim_out]
    return linalg.permute_subsystems(np.kron(first.matrix, second.matrix), dims, [0, 2, 1, 3])


# ------------------------------------------------------------------ randomness


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix with phase fixing."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_isometry(d_in: int, d_out: int, rng: np.random.Generator) -> np.ndarray:
    if d_out < d_in:
        raise ValidationError("an isometry needs d_out >= d_in")
    z = (rng.standard_normal((d_out, d_in)) + 1j * rng.standard_normal((d_out, d_in))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_channel(
    d_in: int, d_out: int, rng: np.random.Generator, num_kraus: int | None = None, name: str = "random"
) -> KrausChannel:
    """Random channel from a Haar-like Stinespring isometry."""
    n = num_kraus or d_in * d_out
    v = random_isometry(d_in, d_out * n, rng)
    ops = v.reshape(d_out, n, d_in).transpose(1, 0, 2)
    return KrausChannel(tuple(ops), d_in, d_out, name)


def random_unitary_channel(d: int, rng: np.random.Generator, terms: int = 3) -> KrausChannel:
    """Mixed-unitary (hence unital) channel with random weights."""
    p = rng.dirichlet(np.ones(terms))
    ops = tuple(np.sqrt(q) * random_unitary(d, rng) for q in p)
    return KrausChannel(ops, d, d, "mixed_unitary")


# --------------------------------------------------------------- superchannels


def superchannel_apply(theta: Superchannel, channel: KrausChannel) -> KrausChannel:
    """Compose ``Omega o (N (x) id_E) o Lambda`` and return it in canonical form.

    Raises:
        ValidationError: If ``channel`` does not fit between the pre- and
            post-processing.
    """
    dE = theta.dim_memory
    if channel.dim_in != theta.dim_a or channel.dim_out != theta.dim_b:
        raise ValidationError(
            f"superchannel expects a {theta.dim_a}->{theta.dim_b} channel, got "
            f"{channel.dim_in}->{channel.dim_out}"
        )
    eye = np.eye(dE)
    mids = [np.kron(k, eye) for k in channel.kraus]
    ops = [o @ m @ lam for o in theta.post.kraus for m in mids for lam in theta.pre.kraus]
    out = KrausChannel(tuple(ops), theta.pre.dim_in, theta.post.dim_out, channel.name)
    return canonical(out)


def _basis_vec(n: int, i: int) -> np.ndarray:
    e = np.zeros((n, 1))
    e[i, 0] = 1.0
    return e


def make_superchannel(kind: str, seed: int | None = None, **params) -> Superchannel:
    """Construct a superchannel.

    Kinds:
        ``random_unitary``: ``sum_x p(x) V^x o N o U^x`` with Haar unitaries
        (params ``dim_in``, ``dim_out``, ``terms``; optional explicit
        ``probs``, ``pre_unitaries``, ``post_unitaries``).

        ``unital_pre_mix``: ``sum_x p(x) Omega^x o (N (x) id_E) o Lambda^x`` with
        mixed-unitary ``Lambda^x`` on ``C = A E`` and random ``Omega^x: B E -> D``
        (params ``dim_in``, ``dim_out``, ``dim_env``, ``dim_final``, ``terms``;
        or explicit ``pre_channels`` / ``post_channels``).

        ``doubly_stochastic``: like ``unital_pre_mix`` with trivial ``E`` and
        mixed-unitary post-processing, so both the pre- and post-processing are
        unital and ``|C| = |A|``, ``|D| = |B|``.

        ``pre_post``: ``Omega o N o Lambda`` from explicit channels ``pre`` and
        ``post``.

    Args:
        kind: Superchannel family.
        seed: Seed for randomized families.
        **params: Family parameters.

    Returns:
        The :class:`Superchannel`.
    """
    rng = np.random.default_rng(seed)
    if kind == "random_unitary":
        dA = _check_dim(params.get("dim_in", 2))
        dB = _check_dim(params.get("dim_out", dA))
        us = params.get("pre_unitaries")
        vs = params.get("post_unitaries")
        terms = len(us) if us is not None else int(params.get("terms", 3))
        probs = params.get("probs")
        probs = rng.dirichlet(np.ones(terms)) if probs is None else np.asarray(probs, float)
        if us is None:
            us = [random_unitary(dA, rng) for _ in range(terms)]
        if vs is None:
            vs = [random_unitary(dB, rng) for _ in range(terms)]
        pre = [np.sqrt(p) * np.kron(u, _basis_vec(terms, x)) for x, (p, u) in enumerate(zip(probs, us))]
        post = [np.kron(v, _basis_vec(terms, x).T) for x, v in enumerate(vs)]
        return Superchannel(
            KrausChannel(tuple(pre), dA, dA * terms),
            KrausChannel(tuple(post), dB * terms, dB),
            terms,
            "random_unitary",
            {"probs": probs},
        )
    if kind in ("unital_pre_mix", "doubly_stochastic"):
        pre_chs = params.get("pre_channels")
        post_chs = params.get("post_channels")
        if pre_chs is None:
            dA = _check_dim(params.get("dim_in", 2))
            dB = _check_dim(params.get("dim_out", dA))
            dE = 1 if kind == "doubly_stochastic" else _check_dim(params.get("dim_env", 2))
            dD = dB if kind == "doubly_stochastic" else _check_dim(params.get("dim_final", dB))
            terms = int(params.get("terms", 2))
            pre_chs = [random_unitary_channel(dA * dE, rng) for _ in range(terms)]
            if kind == "doubly_stochastic":
                post_chs = [random_unitary_channel(dB, rng) for _ in range(terms)]
            else:
                post_chs = [random_channel(dB * dE, dD, rng, num_kraus=2) for _ in range(terms)]
        else:
            dE = int(params.get("dim_env", 1))
        terms = len(pre_chs)
        probs = params.get("probs")
        probs = rng.dirichlet(np.ones(terms)) if probs is None else np.asarray(probs, float)
        dC = pre_chs[0].dim_in
        dAE = pre_chs[0].dim_out
        dBE = post_chs[0].dim_in
        dD = post_chs[0].dim_out
        pre = [
            np.sqrt(p) * np.kron(k, _basis_vec(terms, x))
            for x, (p, ch) in enumerate(zip(probs, pre_chs))
            for k in ch.kraus
        ]
        post = [
            np.kron(k, _basis_vec(terms, x).T) for x, ch in enumerate(post_chs) for k in ch.kraus
        ]
        return Superchannel(
            KrausChannel(tuple(pre), dC, dAE * terms),
            KrausChannel(tuple(post), dBE * terms, dD),
            dE * terms,
            kind,
            {"probs": probs},
        )
    if kind == "pre_post":
        pre, post = params["pre"], params["post"]
        return Superchannel(pre, post, 1, "pre_post")
    raise ValidationError(f"unknown superchannel kind {kind!r}")


class CovarianceReport(NamedTuple):
    covariant: bool
    one_design: bool
    max_deviation: float
    design_deviation: float


def _check_unitary(u: np.ndarray) -> np.ndarray:
    u = linalg.as_matrix(u)
    if u.shape[0] != u.shape[1] or np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) > 1e-10:
        raise ValidationError("group representation contains a non-unitary matrix")
    return u


def covariance_check(
    channel: KrausChannel,
    input_unitaries: Sequence,
    output_unitaries: Sequence,
    tol: float = 1e-9,
) -> CovarianceReport:
    """Test ``N o U_g = V_g o N`` for every group element and whether ``{U_g}`` is a one-design.

    Raises:
        ValidationError: Mismatched sequence lengths or non-unitary entries.
    """
    if len(input_unitaries) != len(output_unitaries) or not input_unitaries:
        raise ValidationError("input and output representations must be non-empty and of equal length")
    us = [_check_unitary(u) for u in input_unitaries]
    vs = [_check_unitary(v) for v in output_unitaries]
    dev = 0.0
    for u, v in zip(us, vs):
        left = KrausChannel(tuple(k @ u for k in channel.kraus), channel.dim_in, channel.dim_out)
        right = KrausChannel(tuple(v @ k for k in channel.kraus), channel.dim_in, channel.dim_out)
        dev = max(dev, choi_distance(left, right))
    d = channel.dim_in
    avg = sum(kraus_to_choi(KrausChannel((u,), d, d)).matrix for u in us) / len(us)
    design_dev = float(np.max(np.abs(avg - np.eye(d * d) / d)))
    return CovarianceReport(dev <= tol, design_dev <= tol, dev, design_dev)
