"""Compare the compiled eigensolver with the numpy fallback.

Usage::

    python benchmarks/bench_kernels.py [--repeat N]

Reports microseconds per call of ``eigh`` and ``reconstruct`` at several
sizes, then the wall time of one channel-entropy solve with each backend.
Sizes above ``linalg.JACOBI_MAX_DIM`` are listed to show why the dispatcher
hands them to LAPACK.
"""
import argparse
import time

import numpy as np

from chanent import linalg
from chanent import _fallback
from chanent.channels import random_channel
from chanent.entropy import channel_entropy, renyi_channel_entropy
from chanent.optimize import NumericPolicy

try:
    from chanent import _jacobi
except ImportError:  # pragma: no cover
    _jacobi = None


def _per_call(fn, args, repeat):
    fn(*args)
    start = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - start) / repeat * 1e6


def kernels(repeat):
    rng = np.random.default_rng(0)
    print(f"{'n':>3} {'eigh compiled':>14} {'eigh numpy':>11} {'recon compiled':>15} {'recon numpy':>12}  (us/call)")
    for n in (2, 4, 6, 8, 16):
        x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        a = x + x.conj().T
        w, v = np.linalg.eigh(a)
        row = [_per_call(_jacobi.eigh, (a,), repeat), _per_call(_fallback.eigh, (a,), repeat)]
        row += [_per_call(_jacobi.reconstruct, (v, w), repeat), _per_call(_fallback.reconstruct, (v, w), repeat)]
        print(f"{n:>3} {row[0]:>14.2f} {row[1]:>11.2f} {row[2]:>15.2f} {row[3]:>12.2f}")


def end_to_end():
    ch = random_channel(3, 3, np.random.default_rng(1))
    policy = NumericPolicy(restarts=4)
    print("\nend to end (seconds)")
    for backend in ("compiled", "python"):
        linalg.use_backend(backend)
        start = time.perf_counter()
        h = channel_entropy(ch, policy).value
        mid = time.perf_counter()
        r = renyi_channel_entropy(ch, 2.0, policy, cross_check=False).value
        end = time.perf_counter()
        print(f"{backend:>9}: entropy {mid - start:.3f} ({h:.12f})  renyi-2 {end - mid:.3f} ({r:.12f})")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=2000)
    args = parser.parse_args()
    if _jacobi is None:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation` first")
    kernels(args.repeat)
    end_to_end()


if __name__ == "__main__":
    main()
