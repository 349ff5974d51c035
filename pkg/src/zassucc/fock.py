"""Exact sparse-matrix representations of fermionic and pair operators.

Conventions fixed here once and for all:

* spin-orbitals are indexed orbital-major, spin +1/2 before -1/2, so the
  linear mode index of orbital ``i`` (1-based) with spin ``s`` is
  ``2*(i-1) + (0 if s > 0 else 1)``;
* the Fock space is the 2^(2*n_orb)-dimensional qubit space with mode 0 as
  the most significant tensor factor and ``|0...0>`` as the vacuum;
* creation operators carry the Jordan-Wigner sign string over all modes of
  lower index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import sparse

# Dense Fock-space construction above this many spin-orbital modes is
# refused by default (dim 16384); larger block counts go through the
# restricted representation in zassucc.oracle.
MAX_MODES = 14


class FockSpaceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class ModeIndexing:
    """Orbital bookkeeping: n_orb spatial orbitals, n_occ occupied pairs,
    and the (p_i, q_i) orbital couple of each 2D block (1-based)."""

    n_orb: int
    n_occ: int
    block_map: tuple = None  # tuple of (p_i, q_i)

    def __post_init__(self):
        if self.n_orb < 1 or self.n_occ < 1 or self.n_occ > self.n_orb:
            raise ValueError(f"invalid orbital counts n_orb={self.n_orb}, n_occ={self.n_occ}")
        if self.block_map is None:
            if self.n_orb < 2 * self.n_occ:
                raise ValueError("default block map needs n_orb >= 2*n_occ")
            object.__setattr__(
                self, "block_map",
                tuple((i, self.n_occ + i) for i in range(1, self.n_occ + 1)),
            )
        else:
            object.__setattr__(self, "block_map", tuple(tuple(b) for b in self.block_map))
        if len(self.block_map) != self.n_occ:
            raise ValueError("block_map must have one (p, q) couple per occupied pair")
        seen = set()
        for p, q in self.block_map:
            if not (1 <= p <= self.n_occ):
                raise ValueError(f"occupied orbital {p} outside [1, {self.n_occ}]")
            if not (self.n_occ < q <= self.n_orb):
                raise ValueError(f"virtual orbital {q} outside [{self.n_occ + 1}, {self.n_orb}]")
            if p in seen or q in seen:
                raise ValueError("block orbitals must be distinct")
            seen.update((p, q))

    @property
    def n_modes(self) -> int:
        return 2 * self.n_orb

    @property
    def dim(self) -> int:
        return 1 << self.n_modes

    def mode(self, orbital: int, spin: int) -> int:
        """Linear spin-orbital index of (orbital, spin), spin in {+1, -1}."""
        if not 1 <= orbital <= self.n_orb:
            raise ValueError(f"orbital {orbital} outside [1, {self.n_orb}]")
        if spin not in (+1, -1):
            raise ValueError("spin must be +1 or -1")
        return 2 * (orbital - 1) + (0 if spin > 0 else 1)

    def check_size(self):
        if self.n_modes > MAX_MODES:
            raise FockSpaceTooLarge(
                f"{self.n_modes} spin-orbital modes exceed the dense-Fock ceiling "
                f"of {MAX_MODES}; use the restricted representation instead"
            )


class FockOperator:
    """Immutable sparse operator on the finite Fock space."""

    def __init__(self, matrix, modes: ModeIndexing):
        mat = sparse.csr_matrix(matrix, dtype=np.complex128)
        mat.sum_duplicates()
        mat.eliminate_zeros()
        if mat.shape != (modes.dim, modes.dim):
            raise ValueError(f"matrix shape {mat.shape} does not match Fock dim {modes.dim}")
        self.matrix = mat
        self.modes = modes
        self.dim = modes.dim

    def adjoint(self) -> "FockOperator":
        return FockOperator(self.matrix.conj().T, self.modes)

    def norm(self) -> float:
        return sparse.linalg.norm(self.matrix, "fro")

    def commutator(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.matrix @ other.matrix - other.matrix @ self.matrix, self.modes)

    def anticommutator(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.matrix @ other.matrix + other.matrix @ self.matrix, self.modes)

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec

    def __add__(self, other):
        return FockOperator(self.matrix + other.matrix, self.modes)

    def __sub__(self, other):
        return FockOperator(self.matrix - other.matrix, self.modes)

    def __matmul__(self, other):
        return FockOperator(self.matrix @ other.matrix, self.modes)

    def __mul__(self, scalar):
        return FockOperator(self.matrix * scalar, self.modes)

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1.0)

    def nnz(self) -> int:
        return self.matrix.nnz


@lru_cache(maxsize=None)
def _jw_ladder(n_modes: int):
    """Jordan-Wigner creation operators for n_modes modes (mode 0 is the
    most significant kron factor)."""
    id2 = sparse.identity(2, format="csr", dtype=np.complex128)
    z = sparse.csr_matrix(np.diag([1.0, -1.0]).astype(np.complex128))
    up = sparse.csr_matrix(np.array([[0.0, 0.0], [1.0, 0.0]], dtype=np.complex128))
    created = []
    for m in range(n_modes):
        op = sparse.identity(1, format="csr", dtype=np.complex128)
        for j in range(n_modes):
            if j < m:
                op = sparse.kron(op, z, format="csr")
            elif j == m:
                op = sparse.kron(op, up, format="csr")
            else:
                op = sparse.kron(op, id2, format="csr")
        created.append(sparse.csr_matrix(op))
    return tuple(created)


def build_creation(mode: int, modes: ModeIndexing) -> FockOperator:
    """a^dagger for the given spin-orbital mode index."""
    modes.check_size()
    if not 0 <= mode < modes.n_modes:
        raise ValueError(f"mode {mode} outside [0, {modes.n_modes})")
    return FockOperator(_jw_ladder(modes.n_modes)[mode], modes)


def build_annihilation(mode: int, modes: ModeIndexing) -> FockOperator:
    return build_creation(mode, modes).adjoint()


def build_pair_plus(i: int, j: int, modes: ModeIndexing) -> FockOperator:
    """Pair creation S+_{ij} = (a+_{i up} a+_{j down} + a+_{j up} a+_{i down})
    / sqrt(2 (1 + delta_ij))."""
    cu_i = build_creation(modes.mode(i, +1), modes)
    cd_j = build_creation(modes.mode(j, -1), modes)
    cu_j = build_creation(modes.mode(j, +1), modes)
    cd_i = build_creation(modes.mode(i, -1), modes)
    norm = 1.0 / np.sqrt(2.0 * (1.0 + (i == j)))
    return norm * (cu_i @ cd_j + cu_j @ cd_i)


def build_pair_minus(i: int, j: int, modes: ModeIndexing) -> FockOperator:
    return build_pair_plus(i, j, modes).adjoint()


def _block_orbitals(block: int, modes: ModeIndexing):
    if not 1 <= block <= modes.n_occ:
        raise ValueError(f"block {block} outside [1, {modes.n_occ}]")
    return modes.block_map[block - 1]


def build_B(i: int, modes: ModeIndexing) -> FockOperator:
    """Anti-Hermitian broken-pair single-excitation generator of block i."""
    p, q = _block_orbitals(i, modes)
    sp_pq = build_pair_plus(p, q, modes)
    sm_p = build_pair_minus(p, p, modes)
    return sp_pq @ sm_p - sm_p.adjoint() @ sp_pq.adjoint()


def build_A(i: int, j: int, modes: ModeIndexing) -> FockOperator:
    """Anti-Hermitian broken-pair double-excitation generator of blocks i < j."""
    if not i < j:
        raise ValueError("build_A requires block indices i < j")
    pi, qi = _block_orbitals(i, modes)
    pj, qj = _block_orbitals(j, modes)
    sp_i = build_pair_plus(pi, qi, modes)
    sp_j = build_pair_plus(pj, qj, modes)
    sm_j = build_pair_minus(pj, pj, modes)
    sm_i = build_pair_minus(pi, pi, modes)
    term = sp_i @ sp_j @ sm_j @ sm_i
    return term - term.adjoint()


def build_T1_general(params: dict, modes: ModeIndexing) -> FockOperator:
    """General single broken-pair cluster operator: sum over occupied p and
    virtual q of mu_pq (S+_{pq} S-_p - S+_p S-_{pq})."""
    modes.check_size()
    op = sparse.csr_matrix((modes.dim, modes.dim), dtype=np.complex128)
    for (p, q), mu in params.items():
        if not (1 <= p <= modes.n_occ and modes.n_occ < q <= modes.n_orb):
            raise ValueError(f"T1 indices ({p},{q}) out of range")
        sp_pq = build_pair_plus(p, q, modes)
        sm_p = build_pair_minus(p, p, modes)
        term = sp_pq @ sm_p
        op = op + mu * (term - term.adjoint()).matrix
    return FockOperator(op, modes)


def build_T2prime_general(params: dict, modes: ModeIndexing) -> FockOperator:
    """General broken-pair double-excitation cluster operator: sum over
    occupied p1 < p2 and distinct virtuals q1 != q2 of
    mu (S+_{p1 q1} S+_{p2 q2} S-_{p2} S-_{p1} - h.c.)."""
    modes.check_size()
    op = sparse.csr_matrix((modes.dim, modes.dim), dtype=np.complex128)
    for (p1, p2, q1, q2), mu in params.items():
        if not (1 <= p1 < p2 <= modes.n_occ):
            raise ValueError(f"T2' occupied indices ({p1},{p2}) out of range")
        if not (modes.n_occ < q1 <= modes.n_orb and modes.n_occ < q2 <= modes.n_orb and q1 != q2):
            raise ValueError(f"T2' virtual indices ({q1},{q2}) out of range")
        term = (build_pair_plus(p1, q1, modes) @ build_pair_plus(p2, q2, modes)
                @ build_pair_minus(p2, p2, modes) @ build_pair_minus(p1, p1, modes))
        op = op + mu * (term - term.adjoint()).matrix
    return FockOperator(op, modes)


def build_reference(modes: ModeIndexing) -> np.ndarray:
    """Reference state: product of closed-shell pair creations over the
    occupied orbitals applied to the vacuum."""
    modes.check_size()
    vec = np.zeros(modes.dim, dtype=np.complex128)
    vec[0] = 1.0
    for p in range(1, modes.n_occ + 1):
        vec = build_pair_plus(p, p, modes).apply(vec)
    return vec


def build_number_operator(modes: ModeIndexing) -> FockOperator:
    """Total particle number; diagonal popcount in the occupation basis."""
    modes.check_size()
    diag = np.array([bin(k).count("1") for k in range(modes.dim)], dtype=np.complex128)
    return FockOperator(sparse.diags(diag), modes)


@dataclass(frozen=True)
class ClusterParams:
    """Cluster amplitudes: mu_pair maps (i, j) with i < j to mu_ij, mu_single
    maps k to mu_k, over n 2D blocks."""

    n: int
    mu_pair: dict = field(default_factory=dict)
    mu_single: dict = field(default_factory=dict)

    def __post_init__(self):
        for (i, j) in self.mu_pair:
            if not (1 <= i < j <= self.n):
                raise ValueError(f"pair key ({i},{j}) must satisfy 1 <= i < j <= {self.n}")
        for k in self.mu_single:
            if not 1 <= k <= self.n:
                raise ValueError(f"single key {k} outside [1, {self.n}]")

    def transfer_matrix(self) -> np.ndarray:
        """The symmetric hollow matrix M with M[i-1, j-1] = mu_ij."""
        m = np.zeros((self.n, self.n))
        for (i, j), mu in self.mu_pair.items():
            m[i - 1, j - 1] = mu
            m[j - 1, i - 1] = mu
        return m

    def mu_vector(self) -> np.ndarray:
        v = np.zeros(self.n)
        for k, mu in self.mu_single.items():
            v[k - 1] = mu
        return v

    @classmethod
    def from_dict(cls, d: dict, n: int | None = None) -> "ClusterParams":
        """Parse {"mu_pair": {"i,j": mu}, "mu_single": {"k": mu}} with i < j
        enforced on the keys."""
        mu_pair = {}
        for key, val in d.get("mu_pair", {}).items():
            i, j = (int(t) for t in key.split(","))
            if not i < j:
                raise ValueError(f'mu_pair key "{key}" must have i < j')
            mu_pair[(i, j)] = float(val)
        mu_single = {int(k): float(v) for k, v in d.get("mu_single", {}).items()}
        if n is None:
            n = max([j for (_, j) in mu_pair] + list(mu_single) + [d.get("blocks", 1)])
        return cls(n=n, mu_pair=mu_pair, mu_single=mu_single)

    def to_dict(self) -> dict:
        return {
            "blocks": self.n,
            "mu_pair": {f"{i},{j}": mu for (i, j), mu in sorted(self.mu_pair.items())},
            "mu_single": {str(k): mu for k, mu in sorted(self.mu_single.items())},
        }


def build_X(params: ClusterParams, modes: ModeIndexing) -> FockOperator:
    """Sum of mu_ij A_ij over the pair couplings."""
    modes.check_size()
    op = sparse.csr_matrix((modes.dim, modes.dim), dtype=np.complex128)
    for (i, j), mu in sorted(params.mu_pair.items()):
        op = op + mu * build_A(i, j, modes).matrix
    return FockOperator(op, modes)


def build_Y(params: ClusterParams, modes: ModeIndexing) -> FockOperator:
    """Sum of mu_k B_k over the single amplitudes."""
    modes.check_size()
    op = sparse.csr_matrix((modes.dim, modes.dim), dtype=np.complex128)
    for k, mu in sorted(params.mu_single.items()):
        op = op + mu * build_B(k, modes).matrix
    return FockOperator(op, modes)


def default_modes(n_blocks: int) -> ModeIndexing:
    """Minimal mode layout for n 2D blocks: orbital i pairs with n + i."""
    return ModeIndexing(n_orb=2 * n_blocks, n_occ=n_blocks)
