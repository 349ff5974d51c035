"""Dense hot kernels with a numba backend and a pure-numpy fallback.

The backend is chosen once at import from the environment variable
``ZASSUCC_BACKEND`` ("numba" or "numpy", default "numba" when numba imports
cleanly). Both paths run the same algorithm; tests and
benchmarks/bench_backends.py compare them directly.
"""

from __future__ import annotations

import math
import os

import numpy as np

# Pade-13 coefficients for the scaling-and-squaring matrix exponential
# (double precision), with 1-norm threshold theta_13.
_PADE13_B = np.array([
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0,
    670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
    960960.0, 16380.0, 182.0, 1.0,
])
_THETA13 = 5.371920351148152


def _expm_pade13(A, b, theta):
    n = A.shape[0]
    eye = np.eye(n, dtype=A.dtype)
    nrm = np.abs(A).sum(axis=0).max()
    s = 0
    if nrm > theta:
        s = int(math.ceil(math.log2(nrm / theta)))
    As = A / (2.0 ** s)
    A2 = As @ As
    A4 = A2 @ A2
    A6 = A2 @ A4
    U = As @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
              + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * eye)
    V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
         + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * eye)
    R = np.ascontiguousarray(np.linalg.solve(V - U, V + U))
    for _ in range(s):
        R = R @ R
    return R


def _trotter_power(EX, EY, k):
    """(EX @ EY)^k by repeated squaring-free left multiplication."""
    step = EX @ EY
    out = np.eye(step.shape[0], dtype=step.dtype)
    for _ in range(k):
        out = out @ step
    return out


def _pick_backend() -> str:
    choice = os.environ.get("ZASSUCC_BACKEND", "numba").lower()
    if choice not in ("numba", "numpy"):
        raise ValueError(f"ZASSUCC_BACKEND must be 'numba' or 'numpy', got {choice!r}")
    if choice == "numba":
        try:
            import numba  # noqa: F401
        except ImportError:
            return "numpy"
    return choice


BACKEND = _pick_backend()

if BACKEND == "numba":
    from numba import njit

    _expm_pade13_jit = njit(cache=True)(_expm_pade13)
    _trotter_power_jit = njit(cache=True)(_trotter_power)

    def expm_dense(A: np.ndarray) -> np.ndarray:
        A = np.ascontiguousarray(A)
        if A.dtype == np.float64:
            return _expm_pade13_jit(A, _PADE13_B, _THETA13)
        # the jitted kernel is specialized for float64; complex input
        # takes the numpy path
        return _expm_pade13(A, _PADE13_B.astype(A.dtype), _THETA13)

    def trotter_power(EX: np.ndarray, EY: np.ndarray, k: int) -> np.ndarray:
        if EX.dtype == np.float64 and EY.dtype == np.float64:
            return _trotter_power_jit(np.ascontiguousarray(EX), np.ascontiguousarray(EY), k)
        return _trotter_power(EX, EY, k)

else:
    def expm_dense(A: np.ndarray) -> np.ndarray:
        A = np.asarray(A)
        return _expm_pade13(A, _PADE13_B.astype(A.dtype, copy=False), _THETA13)

    def trotter_power(EX: np.ndarray, EY: np.ndarray, k: int) -> np.ndarray:
        return _trotter_power(EX, EY, k)


def expm_dense_numpy(A: np.ndarray) -> np.ndarray:
    """Backend-independent reference path (used by the benchmark and tests)."""
    A = np.asarray(A)
    return _expm_pade13(A, _PADE13_B.astype(A.dtype, copy=False), _THETA13)
