"""Pure-Python kernels used when the compiled eigensolver is unavailable."""
import numpy as np


def eigh(a):
    w, v = np.linalg.eigh(np.asarray(a, dtype=np.complex128))
    return w, v


def reconstruct(v, f):
    out = (v * f) @ v.conj().T
    return 0.5 * (out + out.conj().T)
