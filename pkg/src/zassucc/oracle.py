"""Brute-force ground truth: matrix exponentials, the restricted 2^N
representation of the block generators, and the Trotterization comparator."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import norm as sparse_norm

from . import fock
from ._kernels import expm_dense, trotter_power
from .fock import ClusterParams, FockOperator, ModeIndexing


def expm(A, tol: float = 1e-15):
    """Scaling-and-squaring matrix exponential.

    Dense input goes through the Pade-13 kernel; sparse input through a
    norm-scaled Taylor series that preserves sparsity. FockOperator in,
    FockOperator out.
    """
    if isinstance(A, FockOperator):
        return FockOperator(_expm_sparse(A.matrix, tol), A.modes)
    if sparse.issparse(A):
        return _expm_sparse(sparse.csr_matrix(A), tol)
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expm needs a square matrix")
    if not np.all(np.isfinite(A.real)) or (np.iscomplexobj(A) and not np.all(np.isfinite(A.imag))):
        raise ValueError("expm input has non-finite entries")
    return expm_dense(A)


def _expm_sparse(A: sparse.csr_matrix, tol: float) -> sparse.csr_matrix:
    if A.nnz and not np.all(np.isfinite(A.data)):
        raise ValueError("expm input has non-finite entries")
    nrm = sparse_norm(A, 1) if A.nnz else 0.0
    s = max(0, int(math.ceil(math.log2(nrm)))) if nrm > 1.0 else 0
    B = A / (2.0 ** s)
    out = sparse.identity(A.shape[0], dtype=A.dtype, format="csr")
    term = out
    total = sparse_norm(out, "fro")
    for k in range(1, 128):
        term = (term @ B) / k
        out = out + term
        tnorm = sparse_norm(term, "fro")
        total += tnorm
        if tnorm < tol * total:
            break
    else:
        raise RuntimeError("sparse expm Taylor series failed to converge")
    for _ in range(s):
        out = out @ out
    out = sparse.csr_matrix(out)
    out.eliminate_zeros()
    return out


@dataclass(frozen=True)
class RestrictedRep:
    """The 2^N invariant subspace spanned by per-block closed-pair (P) and
    open-pair (O) states; basis state s has block k open iff bit k-1 of s
    is set."""

    n: int

    @property
    def dim(self) -> int:
        return 1 << self.n

    def labels(self) -> list:
        return ["".join("O" if (s >> k) & 1 else "P" for k in range(self.n))
                for s in range(self.dim)]

    def B_r(self, k: int) -> np.ndarray:
        """|O><P| - |P><O| on block k, identity elsewhere."""
        if not 1 <= k <= self.n:
            raise ValueError(f"block {k} outside [1, {self.n}]")
        bit = 1 << (k - 1)
        m = np.zeros((self.dim, self.dim))
        for s in range(self.dim):
            if not s & bit:
                m[s | bit, s] = 1.0
                m[s, s | bit] = -1.0
        return m

    def A_r(self, i: int, j: int) -> np.ndarray:
        """|O_i O_j><P_i P_j| - h.c., zero on mixed block states."""
        if not 1 <= i < j <= self.n:
            raise ValueError(f"A indices ({i},{j}) must satisfy 1 <= i < j <= {self.n}")
        bi, bj = 1 << (i - 1), 1 << (j - 1)
        m = np.zeros((self.dim, self.dim))
        for s in range(self.dim):
            if not s & bi and not s & bj:
                t = s | bi | bj
                m[t, s] = 1.0
                m[s, t] = -1.0
        return m

    def X_r(self, params: ClusterParams) -> np.ndarray:
        m = np.zeros((self.dim, self.dim))
        for (i, j), mu in params.mu_pair.items():
            m += mu * self.A_r(i, j)
        return m

    def Y_r(self, params: ClusterParams) -> np.ndarray:
        m = np.zeros((self.dim, self.dim))
        for k, mu in params.mu_single.items():
            m += mu * self.B_r(k)
        return m

    def reference(self) -> np.ndarray:
        vec = np.zeros(self.dim)
        vec[0] = 1.0  # |P...P>
        return vec


def build_restricted(params: ClusterParams) -> RestrictedRep:
    if params.n > 20:
        raise ValueError("restricted representation capped at 20 blocks")
    return RestrictedRep(params.n)


def build_intertwiner(rep: RestrictedRep, modes: ModeIndexing) -> np.ndarray:
    """Columns are the Fock-space images of the restricted basis states:
    per block, a closed pair on p_i (P) or an open pair on (p_i, q_i) (O)."""
    cols = np.zeros((modes.dim, rep.dim), dtype=np.complex128)
    for s in range(rep.dim):
        vec = np.zeros(modes.dim, dtype=np.complex128)
        vec[0] = 1.0
        for k in range(1, rep.n + 1):
            p, q = modes.block_map[k - 1]
            if (s >> (k - 1)) & 1:
                vec = fock.build_pair_plus(p, q, modes).apply(vec)
            else:
                vec = fock.build_pair_plus(p, p, modes).apply(vec)
        cols[:, s] = vec
    return cols


@dataclass(frozen=True)
class TrotterReport:
    """Rows of (k, error, factor_count); k = 0 is the exact-plan baseline."""

    rows: tuple

    def to_csv(self) -> str:
        lines = ["# k=0 denotes exact plan", "k,error,factor_count"]
        for k, err, count in self.rows:
            lines.append(f"{k},{err:.17g},{count}")
        return "\n".join(lines) + "\n"


def _plan_matrices(plan, rep: RestrictedRep):
    mats = []
    for gen, angle in plan.factors:
        if gen[0] == "A":
            g = rep.A_r(gen[1], gen[2])
        else:
            g = rep.B_r(gen[1])
        mats.append(expm_dense(angle * g))
    return mats


def plan_product_restricted(plan, rep: RestrictedRep) -> np.ndarray:
    out = np.eye(rep.dim)
    for m in _plan_matrices(plan, rep):
        out = out @ m
    return out


def plan_product_fock(plan, modes: ModeIndexing) -> FockOperator:
    out = FockOperator(sparse.identity(modes.dim, dtype=np.complex128), modes)
    for gen, angle in plan.factors:
        if gen[0] == "A":
            g = fock.build_A(gen[1], gen[2], modes)
        else:
            g = fock.build_B(gen[1], modes)
        out = out @ expm(angle * g)
    return out


def trotter_compare(params: ClusterParams, k_list, use_restricted: bool = True) -> TrotterReport:
    """First-order Trotter error versus the exact plan baseline."""
    from .decomposition import decompose

    if not k_list:
        raise ValueError("k_list must be non-empty")
    if any(k < 1 for k in k_list):
        raise ValueError("Trotter step counts must be >= 1")
    plan = decompose(params)
    rows = []
    if use_restricted:
        rep = build_restricted(params)
        X, Y = rep.X_r(params), rep.Y_r(params)
        exact = expm_dense(X + Y)
        baseline = float(np.linalg.norm(plan_product_restricted(plan, rep) - exact, "fro"))
        rows.append((0, baseline, len(plan.factors)))
        for k in k_list:
            prod = trotter_power(expm_dense(X / k), expm_dense(Y / k), int(k))
            rows.append((int(k), float(np.linalg.norm(prod - exact, "fro")), 2 * int(k)))
    else:
        modes = fock.default_modes(params.n)
        X, Y = fock.build_X(params, modes), fock.build_Y(params, modes)
        exact = expm(X + Y)
        baseline = (plan_product_fock(plan, modes) - exact).norm()
        rows.append((0, float(baseline), len(plan.factors)))
        for k in k_list:
            step = expm((1.0 / k) * X) @ expm((1.0 / k) * Y)
            prod = FockOperator(sparse.identity(modes.dim, dtype=np.complex128), modes)
            for _ in range(int(k)):
                prod = prod @ step
            rows.append((int(k), float((prod - exact).norm()), 2 * int(k)))
    return TrotterReport(rows=tuple(rows))


def state_fidelity_check(params: ClusterParams) -> float:
    """|<plan psi0 | exp(X+Y) psi0>| on the restricted representation."""
    from .decomposition import decompose

    rep = build_restricted(params)
    plan = decompose(params)
    ref = rep.reference()
    lhs = plan_product_restricted(plan, rep) @ ref
    rhs = expm_dense(rep.X_r(params) + rep.Y_r(params)) @ ref
    return float(abs(np.dot(lhs, rhs)))
