"""Hot inner loops for the 1D split-step evolution.

The JIT path is selected at import time.  Set ``KDS_DISABLE_NUMBA=1`` to
force the pure-numpy fallback (used by the benchmark and by CI boxes
without a working numba).  Both paths produce bitwise-comparable results
up to floating-point non-associativity in the matvec.
"""

from __future__ import annotations

import os

import numpy as np

NUMBA_DISABLED = os.environ.get("KDS_DISABLE_NUMBA", "0").lower() in ("1", "true", "yes")

try:  # pragma: no cover - exercised via the benchmark
    if NUMBA_DISABLED:
        raise ImportError
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


def _evolve_strang_py(values, phase_half, vel, steps):
    """Pure-numpy Strang stepping: half phase, lattice shift, half phase.

    values      (N, d) complexial state, modified copy is returned
    phase_half  (N, d, d) pointwise exp(-i dt/2 V(r*_j))
    vel         (d,) int, +1 or -1, lattice velocity of each component
    steps       number of dt = dr* steps

    Returns (values, max_edge2): max_edge2 is the largest per-step sum of
    |psi|^2 over the two boundary cells (before the shift), used for the
    boundary-touch policy.
    """
    v = values.copy()
    n = v.shape[0]
    d = v.shape[1]
    max_edge2 = 0.0
    right = [c for c in range(d) if vel[c] > 0]
    left = [c for c in range(d) if vel[c] < 0]
    for _ in range(steps):
        v = np.einsum("nij,nj->ni", phase_half, v)
        edge2 = float(np.sum(np.abs(v[0]) ** 2) + np.sum(np.abs(v[n - 1]) ** 2))
        if edge2 > max_edge2:
            max_edge2 = edge2
        for c in right:
            v[1:, c] = v[:-1, c]
            v[0, c] = 0.0
        for c in left:
            v[:-1, c] = v[1:, c]
            v[n - 1, c] = 0.0
        v = np.einsum("nij,nj->ni", phase_half, v)
    return v, max_edge2


@njit(cache=True)
def _evolve_strang_jit(values, phase_half, vel, steps):  # pragma: no cover - numba
    v = values.copy()
    n = v.shape[0]
    d = v.shape[1]
    tmp = np.zeros(d, dtype=np.complex128)
    max_edge2 = 0.0
    for _ in range(steps):
        # half phase
        for j in range(n):
            for i in range(d):
                acc = 0.0 + 0.0j
                for k in range(d):
                    acc += phase_half[j, i, k] * v[j, k]
                tmp[i] = acc
            for i in range(d):
                v[j, i] = tmp[i]
        edge2 = 0.0
        for i in range(d):
            edge2 += abs(v[0, i]) ** 2 + abs(v[n - 1, i]) ** 2
        if edge2 > max_edge2:
            max_edge2 = edge2
        # exact lattice shift
        for i in range(d):
            if vel[i] > 0:
                for j in range(n - 1, 0, -1):
                    v[j, i] = v[j - 1, i]
                v[0, i] = 0.0
            else:
                for j in range(n - 1):
                    v[j, i] = v[j + 1, i]
                v[n - 1, i] = 0.0
        # half phase
        for j in range(n):
            for i in range(d):
                acc = 0.0 + 0.0j
                for k in range(d):
                    acc += phase_half[j, i, k] * v[j, k]
                tmp[i] = acc
            for i in range(d):
                v[j, i] = tmp[i]
    return v, max_edge2


def evolve_strang(values, phase_half, vel, steps):
    """Dispatch to the JIT kernel when available."""
    vel = np.ascontiguousarray(vel, dtype=np.int64)
    values = np.ascontiguousarray(values, dtype=np.complex128)
    phase_half = np.ascontiguousarray(phase_half, dtype=np.complex128)
    if HAS_NUMBA:
        return _evolve_strang_jit(values, phase_half, vel, steps)
    return _evolve_strang_py(values, phase_half, vel, steps)
