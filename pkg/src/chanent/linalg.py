"""Dense complex linear algebra kernel.

All operators are plain ``numpy`` arrays of dtype ``complex128``. Tensor
products follow the row-major convention: the leftmost factor is the slowest
varying index, so ``kron(A, B)[i * dB + k, j * dB + l] == A[i, j] * B[k, l]``
and ``partial_trace`` / ``permute_subsystems`` read ``dims`` in that order.

The Hermitian eigensolver is the only hot kernel. When the compiled
``chanent._jacobi`` extension is importable it handles matrices up to
``JACOBI_MAX_DIM`` (where call overhead dominates and Jacobi beats LAPACK);
larger matrices, and everything when the extension is missing, go through
numpy's LAPACK binding. Set ``CHANENT_BACKEND=python`` to force the fallback.
"""
from __future__ import annotations

import os
from functools import reduce
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import _fallback
from .errors import DomainError, ValidationError

DEFAULT_CUTOFF = 1e-14
HERMITIAN_TOL = 1e-10
JACOBI_MAX_DIM = 5

if os.environ.get("CHANENT_BACKEND", "").lower() == "python":
    _kernel = _fallback
    BACKEND = "python"
else:
    try:
        from . import _jacobi as _kernel  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on the build
        _kernel = _fallback
        BACKEND = "python"


class HermitianEigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def backend_name() -> str:
    """``"compiled"`` or ``"python"``: the eigensolver backend in use."""
    return BACKEND


def use_backend(name: str) -> str:
    """Switch the eigensolver backend at runtime; returns the previous name.

    Only intended for benchmarks and backend cross-checks.
    """
    global _kernel, BACKEND
    previous = BACKEND
    if name == "python":
        _kernel = _fallback
    elif name == "compiled":
        from . import _jacobi

        _kernel = _jacobi
    else:
        raise ValidationError(f"unknown backend {name!r}")
    BACKEND = name
    return previous


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ValidationError(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def check_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    if m.shape[0] != m.shape[1]:
        raise ValidationError(f"matrix is not square: shape {m.shape}")
    diff = np.abs(m - m.conj().T)
    if diff.size and diff.max() > tol:
        i, j = np.unravel_index(np.argmax(diff), diff.shape)
        raise ValidationError(
            f"matrix is not Hermitian: entry ({i}, {j}) differs from the conjugate "
            f"of ({j}, {i}) by {diff[i, j]:.3e}"
        )


def hermitian_eig(m, check: bool = True) -> HermitianEigenDecomposition:
    """Eigendecomposition of a Hermitian matrix with ascending eigenvalues."""
    a = as_matrix(m)
    if check:
        check_hermitian(a)
    w, v = _eigh(a)
    return HermitianEigenDecomposition(w, v)


def _eigh(a: np.ndarray):
    if a.shape[0] <= JACOBI_MAX_DIM:
        return _kernel.eigh(a)
    return _fallback.eigh(a)


def _reconstruct(v: np.ndarray, fw: np.ndarray) -> np.ndarray:
    if v.shape[0] <= JACOBI_MAX_DIM:
        return _kernel.reconstruct(v, fw)
    return _fallback.reconstruct(v, fw)


def eigvalsh(m) -> np.ndarray:
    return _eigh(as_matrix(m))[0]


def lambda_max(m) -> float:
    return float(_eigh(as_matrix(m))[0][-1])


def _retained(w: np.ndarray, cutoff: float) -> np.ndarray:
    scale = np.max(np.abs(w)) if w.size else 0.0
    return np.abs(w) > cutoff * scale


def spectral_apply(
    w: np.ndarray,
    f: Callable[[np.ndarray], np.ndarray],
    zero_policy: str = "support",
    cutoff: float = DEFAULT_CUTOFF,
) -> np.ndarray:
    """Apply ``f`` to a spectrum under the given zero policy."""
    if zero_policy == "support":
        keep = _retained(w, cutoff)
        with np.errstate(all="ignore"):
            f0 = float(np.asarray(f(np.zeros(1)))[0])
            fw = np.full_like(w, f0 if np.isfinite(f0) else 0.0)
            fw[keep] = f(w[keep])
    elif zero_policy == "full":
        scale = np.max(np.abs(w)) if w.size else 0.0
        w = np.where((w < 0) & (w >= -cutoff * scale), 0.0, w)
        with np.errstate(all="ignore"):
            fw = np.asarray(f(w), dtype=np.float64)
    else:
        raise ValidationError(f"unknown zero_policy {zero_policy!r}")
    if not np.all(np.isfinite(fw)):
        bad = w[~np.isfinite(fw)]
        raise DomainError(f"function undefined on eigenvalue(s) {bad.tolist()}")
    return fw


def matrix_func(
    m,
    f: Callable[[np.ndarray], np.ndarray],
    zero_policy: str = "support",
    cutoff: float = DEFAULT_CUTOFF,
    check: bool = False,
) -> np.ndarray:
    """Return ``V f(Lambda) V^dagger`` for Hermitian ``m``.

    With ``zero_policy="support"`` eigenvalues with modulus at most
    ``cutoff * ||m||_inf`` are treated as exact zeros: they map to ``f(0)``
    when that is finite and to zero otherwise. This gives ``0 log 0 = 0``,
    ``0**p = 0``, ``exp(0) = 1`` and support-projected logarithms and
    inverse powers. With ``"full"`` the
    function is applied to the whole spectrum (tiny negative eigenvalues are
    clamped to zero first).
    """
    w, v = hermitian_eig(m, check=check)
    return _reconstruct(v, spectral_apply(w, f, zero_policy, cutoff))


def mpow(m, p: float, zero_policy: str = "support", cutoff: float = DEFAULT_CUTOFF):
    return matrix_func(m, lambda x: np.power(x, p), zero_policy, cutoff)


def mlog2(m, cutoff: float = DEFAULT_CUTOFF):
    """Base-2 logarithm restricted to the support of ``m``."""
    return matrix_func(m, np.log2, "support", cutoff)


def mexp(m):
    """Matrix exponential of a Hermitian matrix (shifted for stability)."""
    w, v = hermitian_eig(m, check=False)
    return _reconstruct(v, np.exp(w - w[-1])) * np.exp(w[-1])


def reconstruct(v: np.ndarray, fw: np.ndarray) -> np.ndarray:
    return _reconstruct(v, np.asarray(fw, dtype=np.float64))


def divided_differences(w: np.ndarray, fw: np.ndarray, dfw: np.ndarray) -> np.ndarray:
    """First divided-difference matrix used by Frechet derivatives."""
    dw = w[:, None] - w[None, :]
    scale = np.maximum(1.0, np.maximum(np.abs(w)[:, None], np.abs(w)[None, :]))
    close = np.abs(dw) <= 1e-7 * scale
    with np.errstate(all="ignore"):
        lm = (fw[:, None] - fw[None, :]) / np.where(close, 1.0, dw)
    mid = 0.5 * (dfw[:, None] + dfw[None, :])
    return np.where(close, mid, lm)


def frechet(
    m,
    f: Callable[[np.ndarray], np.ndarray],
    df: Callable[[np.ndarray], np.ndarray],
    h,
    zero_policy: str = "full",
    cutoff: float = DEFAULT_CUTOFF,
    eig: HermitianEigenDecomposition | None = None,
) -> np.ndarray:
    """Frechet derivative of the matrix function ``f`` at ``m`` in direction ``h``.

    For Hermitian ``m`` the derivative map is self-adjoint with respect to the
    Hilbert-Schmidt inner product, so the same call also pulls gradients back.
    Under the support policy, entries that touch the null space are zeroed.
    """
    w, v = eig if eig is not None else hermitian_eig(m, check=False)
    if zero_policy == "support":
        keep = _retained(w, cutoff)
        fw = np.zeros_like(w)
        dfw = np.zeros_like(w)
        with np.errstate(all="ignore"):
            fw[keep] = f(w[keep])
            dfw[keep] = df(w[keep])
        lm = divided_differences(w, fw, dfw)
        lm[~keep, :] = 0.0
        lm[:, ~keep] = 0.0
    else:
        with np.errstate(all="ignore"):
            lm = divided_differences(w, f(w), df(w))
    if not np.all(np.isfinite(lm)):
        raise DomainError("Frechet derivative undefined on the spectrum")
    hv = v.conj().T @ np.asarray(h, dtype=np.complex128) @ v
    return v @ (lm * hv) @ v.conj().T


def kron(*mats) -> np.ndarray:
    """Kronecker product of any number of matrices (or vectors)."""
    if not mats:
        raise ValidationError("kron needs at least one factor")
    return reduce(np.kron, [np.asarray(m, dtype=np.complex128) for m in mats])


def _check_dims(n: int, dims: Sequence[int]) -> list[int]:
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims) or int(np.prod(dims)) != n:
        raise ValidationError(f"subsystem dims {dims} do not multiply to matrix size {n}")
    return dims


def partial_trace(m, dims: Sequence[int], keep) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    Kept subsystems appear in their original order.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValidationError(f"partial trace needs a square matrix, got {a.shape}")
    dims = _check_dims(a.shape[0], dims)
    keep = sorted({int(keep)} if np.isscalar(keep) else {int(k) for k in keep})
    n = len(dims)
    if any(k < 0 or k >= n for k in keep):
        raise ValidationError(f"keep indices {keep} out of range for {n} subsystems")
    t = a.reshape(dims + dims)
    row = list(range(n))
    col = [n + i if i in keep else i for i in range(n)]
    out = [i for i in keep] + [n + i for i in keep]
    res = np.einsum(t, row + col, out)
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    return res.reshape(dk, dk)


def permute_subsystems(m, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors: output factor ``k`` is input factor ``perm[k]``."""
    a = np.asarray(m, dtype=np.complex128)
    dims = _check_dims(a.shape[0], dims)
    n = len(dims)
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(n)):
        raise ValidationError(f"{perm} is not a permutation of {n} subsystems")
    if a.ndim == 1:
        return a.reshape(dims).transpose(perm).reshape(-1)
    t = a.reshape(dims + dims).transpose(perm + [n + p for p in perm])
    return t.reshape(a.shape)


def schatten_norm(m, p: float = 1.0) -> float:
    """Schatten ``p``-norm from singular values; ``p=np.inf`` gives the operator norm."""
    if p < 1:
        raise DomainError(f"Schatten norm requires p >= 1, got {p}")
    s = np.linalg.svd(as_matrix(m), compute_uv=False)
    if np.isinf(p):
        return float(s.max(initial=0.0))
    return float(np.sum(s**p) ** (1.0 / p))


def canonical_purification(rho) -> np.ndarray:
    """Purification ``sum_i sqrt(l_i) |i>_S |v_i>_A`` with ``|S| = |A|``.

    Eigenvalues are taken in descending order (stable for ties), so a pure
    ``|0><0|`` maps to ``|0>_S |0>_A``.
    """
    w, v = hermitian_eig(rho)
    order = np.argsort(-w, kind="stable")
    w = np.clip(w[order], 0.0, None)
    v = v[:, order]
    d = len(w)
    psi = np.zeros(d * d, dtype=np.complex128)
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        psi += np.sqrt(w[i]) * np.kron(e, v[:, i])
    return psi


def gamma_operator(d: int, normalized: bool = False) -> np.ndarray:
    """``|Gamma><Gamma|`` with ``|Gamma> = sum_i |i>|i>``; divided by ``d`` if normalized."""
    g = np.eye(d, dtype=np.complex128).reshape(-1)
    op = np.outer(g, g.conj())
    return op / d if normalized else op


def hermitian_basis(d: int) -> np.ndarray:
    """Orthonormal (Hilbert-Schmidt) basis of ``d x d`` Hermitian matrices."""
    basis = []
    for i in range(d):
        e = np.zeros((d, d), dtype=np.complex128)
        e[i, i] = 1.0
        basis.append(e)
    r = 1.0 / np.sqrt(2.0)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), dtype=np.complex128)
            e[i, j] = e[j, i] = r
            basis.append(e)
            e = np.zeros((d, d), dtype=np.complex128)
            e[i, j] = -1j * r
            e[j, i] = 1j * r
            basis.append(e)
    return np.array(basis)


def hermitian_part(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)
