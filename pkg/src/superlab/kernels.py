"""Hot inner loops, each in two interchangeable flavours.

``*_loops`` functions are explicit index loops compiled with numba when it is
available; ``*_numpy`` functions are vectorised numpy equivalents.  The
module-level names without suffix (``correlate3``, ``rollout3``,
``lu_factor``, ``lu_solve``, ``upwind_matrix``) point at the flavour picked by
:mod:`superlab._accel`.  Both flavours are kept importable so the test-suite
and ``benchmarks/bench_kernels.py`` can compare them.

Conventions shared by all kernels:

* ``taps = (k_minus1, k_0, k_plus1)`` and
  ``out[i] = k_minus1*u[i-1] + k_0*u[i] + k_plus1*u[i+1]`` (periodic).
* ``lu_factor`` overwrites a copy of ``a`` with unit-lower ``L`` (strictly
  below the diagonal) and ``U``; ``piv[k]`` is the row swapped with row ``k``
  at elimination step ``k`` (LAPACK ``getrf`` style, zero-based).  ``info`` is
  ``-1`` on success, otherwise the step whose pivot fell below ``tol``.
"""
import numpy as np

from ._accel import NUMBA_AVAILABLE, USE_NUMBA, njit

__all__ = [
    "correlate3",
    "rollout3",
    "lu_factor",
    "lu_solve",
    "upwind_matrix",
    "BACKENDS",
]


# --------------------------------------------------------------------------
# 3-tap periodic cross-correlation
# --------------------------------------------------------------------------

def _correlate3_loops(taps, u):
    n = u.shape[0]
    out = np.empty(n)
    km, k0, kp = taps[0], taps[1], taps[2]
    for i in range(n):
        im = i - 1 if i > 0 else n - 1
        ip = i + 1 if i < n - 1 else 0
        out[i] = km * u[im] + k0 * u[i] + kp * u[ip]
    return out


def _correlate3_numpy(taps, u):
    return taps[0] * np.roll(u, 1) + taps[1] * u + taps[2] * np.roll(u, -1)


def _rollout3_loops(taps, u0, steps):
    n = u0.shape[0]
    traj = np.empty((steps + 1, n))
    km, k0, kp = taps[0], taps[1], taps[2]
    for i in range(n):
        traj[0, i] = u0[i]
    for t in range(steps):
        for i in range(n):
            im = i - 1 if i > 0 else n - 1
            ip = i + 1 if i < n - 1 else 0
            traj[t + 1, i] = km * traj[t, im] + k0 * traj[t, i] + kp * traj[t, ip]
    return traj


def _rollout3_numpy(taps, u0, steps):
    traj = np.empty((steps + 1, u0.shape[0]))
    traj[0] = u0
    for t in range(steps):
        traj[t + 1] = _correlate3_numpy(taps, traj[t])
    return traj


# --------------------------------------------------------------------------
# Dense LU with partial pivoting
# --------------------------------------------------------------------------

def _lu_factor_loops(a, tol):
    lu = a.copy()
    n = lu.shape[0]
    piv = np.empty(n, dtype=np.int64)
    info = -1
    for k in range(n):
        p = k
        big = abs(lu[k, k])
        for r in range(k + 1, n):
            v = abs(lu[r, k])
            if v > big:
                big = v
                p = r
        piv[k] = p
        if big <= tol:
            info = k
            break
        if p != k:
            for c in range(n):
                tmp = lu[k, c]
                lu[k, c] = lu[p, c]
                lu[p, c] = tmp
        inv = 1.0 / lu[k, k]
        for r in range(k + 1, n):
            lu[r, k] *= inv
            f = lu[r, k]
            if f != 0.0:
                for c in range(k + 1, n):
                    lu[r, c] -= f * lu[k, c]
    return lu, piv, info


def _lu_factor_numpy(a, tol):
    lu = np.array(a, dtype=float, copy=True)
    n = lu.shape[0]
    piv = np.empty(n, dtype=np.int64)
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        piv[k] = p
        if abs(lu[p, k]) <= tol:
            return lu, piv, k
        if p != k:
            lu[[k, p]] = lu[[p, k]]
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, piv, -1


def _lu_solve_loops(lu, piv, b):
    n = lu.shape[0]
    x = b.copy()
    for k in range(n):
        p = piv[k]
        if p != k:
            tmp = x[k]
            x[k] = x[p]
            x[p] = tmp
    for i in range(n):
        s = x[i]
        for j in range(i):
            s -= lu[i, j] * x[j]
        x[i] = s
    for i in range(n - 1, -1, -1):
        s = x[i]
        for j in range(i + 1, n):
            s -= lu[i, j] * x[j]
        x[i] = s / lu[i, i]
    return x


def _lu_solve_numpy(lu, piv, b):
    n = lu.shape[0]
    x = np.array(b, dtype=float, copy=True)
    for k in range(n):
        p = piv[k]
        if p != k:
            x[k], x[p] = x[p], x[k]
    for i in range(1, n):
        x[i] -= lu[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - lu[i, i + 1:] @ x[i + 1:]) / lu[i, i]
    return x


# --------------------------------------------------------------------------
# Upwind first-derivative matrix for the Burgers linearisation
# --------------------------------------------------------------------------

def _upwind_matrix_loops(w, inv_dx, literal):
    # Row i: gate_b * (u_i - u_{i-1}) + gate_f * (u_{i+1} - u_i), both / dx.
    n = w.shape[0]
    g = np.zeros((n, n))
    for i in range(n):
        im = i - 1 if i > 0 else n - 1
        ip = i + 1 if i < n - 1 else 0
        gate_b = 0.5 * (w[ip] + w[i])
        gate_f = 0.5 * (w[im] + w[i])
        gate_b = gate_b if gate_b > 0.0 else 0.0
        if literal:
            gate_f = gate_f if gate_f > 0.0 else 0.0
        else:
            gate_f = gate_f if gate_f < 0.0 else 0.0
        g[i, i] += (gate_b - gate_f) * inv_dx
        g[i, im] -= gate_b * inv_dx
        g[i, ip] += gate_f * inv_dx
    return g


def _upwind_matrix_numpy(w, inv_dx, literal):
    n = w.shape[0]
    gate_b = np.maximum(0.5 * (np.roll(w, -1) + w), 0.0)
    avg_f = 0.5 * (np.roll(w, 1) + w)
    gate_f = np.maximum(avg_f, 0.0) if literal else np.minimum(avg_f, 0.0)
    idx = np.arange(n)
    g = np.zeros((n, n))
    # += so that n < 3 aliasing of neighbours would still accumulate
    np.add.at(g, (idx, idx), (gate_b - gate_f) * inv_dx)
    np.add.at(g, (idx, (idx - 1) % n), -gate_b * inv_dx)
    np.add.at(g, (idx, (idx + 1) % n), gate_f * inv_dx)
    return g


_PY = {
    "correlate3": _correlate3_loops,
    "rollout3": _rollout3_loops,
    "lu_factor": _lu_factor_loops,
    "lu_solve": _lu_solve_loops,
    "upwind_matrix": _upwind_matrix_loops,
}

BACKENDS = {
    "numpy": {
        "correlate3": _correlate3_numpy,
        "rollout3": _rollout3_numpy,
        "lu_factor": _lu_factor_numpy,
        "lu_solve": _lu_solve_numpy,
        "upwind_matrix": _upwind_matrix_numpy,
    },
}
if NUMBA_AVAILABLE:
    BACKENDS["numba"] = {name: njit(f) for name, f in _PY.items()}

_active = BACKENDS["numba" if USE_NUMBA else "numpy"]

correlate3 = _active["correlate3"]
rollout3 = _active["rollout3"]
lu_factor = _active["lu_factor"]
lu_solve = _active["lu_solve"]
upwind_matrix = _active["upwind_matrix"]
