"""Exact arithmetic in the solvable Lie algebra spanned by the broken-pair
generators {A_ij (i<j), B_k}.

Structure constants:
    [A_ij, A_kl] = 0,   [B_i, B_k] = 0,
    [A_ij, B_k]  = delta_ik B_j + delta_jk B_i.

Coefficients may be floats or fractions.Fraction; the bracket never leaves
the integer span of the inputs, so exact-rational runs stay exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import fock


class AlgebraElement:
    """Real linear combination of A_ij (i < j) and B_k over n blocks."""

    __slots__ = ("n", "a", "b")

    def __init__(self, n: int, a: dict | None = None, b: dict | None = None):
        self.n = n
        self.a = {}
        self.b = {}
        for (i, j), c in (a or {}).items():
            if not (1 <= i < j <= n):
                raise ValueError(f"A index ({i},{j}) must satisfy 1 <= i < j <= {n}")
            if c != 0:
                self.a[(i, j)] = c
        for k, c in (b or {}).items():
            if not (1 <= k <= n):
                raise ValueError(f"B index {k} outside [1, {n}]")
            if c != 0:
                self.b[k] = c

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        _check_same_n(self, other)
        a = dict(self.a)
        for key, c in other.a.items():
            a[key] = a.get(key, 0) + c
        b = dict(self.b)
        for key, c in other.b.items():
            b[key] = b.get(key, 0) + c
        return AlgebraElement(self.n, a, b)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-1) * other

    def __mul__(self, scalar):
        return AlgebraElement(
            self.n,
            {k: c * scalar for k, c in self.a.items()},
            {k: c * scalar for k, c in self.b.items()},
        )

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __eq__(self, other):
        return (isinstance(other, AlgebraElement) and self.n == other.n
                and self.a == other.a and self.b == other.b)

    def __repr__(self):
        return f"AlgebraElement(n={self.n}, a={self.a}, b={self.b})"

    def is_zero(self) -> bool:
        return not self.a and not self.b

    def norm(self) -> float:
        return math.sqrt(float(sum(c * c for c in self.a.values())
                               + sum(c * c for c in self.b.values())))

    def b_vector(self) -> np.ndarray:
        v = np.zeros(self.n)
        for k, c in self.b.items():
            v[k - 1] = float(c)
        return v

    def commutator(self, other: "AlgebraElement") -> "AlgebraElement":
        return bracket(self, other)

    def to_fock_operator(self, modes: fock.ModeIndexing) -> fock.FockOperator:
        """Embed via the exact sparse generators."""
        op = fock.build_X(
            fock.ClusterParams(self.n, mu_pair={k: float(c) for k, c in self.a.items()}),
            modes,
        )
        return op + fock.build_Y(
            fock.ClusterParams(self.n, mu_single={k: float(c) for k, c in self.b.items()}),
            modes,
        )


def _check_same_n(x: AlgebraElement, y: AlgebraElement):
    if x.n != y.n:
        raise ValueError(f"block counts differ: {x.n} vs {y.n}")


def from_params(params: fock.ClusterParams):
    """(X, Y) elements of a ClusterParams instance."""
    x = AlgebraElement(params.n, a=dict(params.mu_pair))
    y = AlgebraElement(params.n, b=dict(params.mu_single))
    return x, y


def bracket(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """Lie bracket [x, y]; the result always lies in the B span."""
    _check_same_n(x, y)
    b = {}

    def _ab_terms(a_coeffs, b_coeffs, sign):
        for (i, j), ca in a_coeffs.items():
            for k, cb in b_coeffs.items():
                if k == i:
                    b[j] = b.get(j, 0) + sign * ca * cb
                if k == j:
                    b[i] = b.get(i, 0) + sign * ca * cb

    _ab_terms(x.a, y.b, +1)
    _ab_terms(y.a, x.b, -1)
    return AlgebraElement(x.n, b=b)


def iterated_adjoint(x: AlgebraElement, y: AlgebraElement, k: int) -> AlgebraElement:
    """ad^k_x y, computed by k successive brackets."""
    if k < 0:
        raise ValueError("adjoint power must be non-negative")
    out = y
    for _ in range(k):
        out = bracket(x, out)
    return out


@dataclass(frozen=True)
class NmaReport:
    holds: bool
    max_depth_checked: int
    witness: Optional[tuple] = None  # (depth, residual) when violated

    def to_dict(self) -> dict:
        d = {"holds": self.holds, "max_depth_checked": self.max_depth_checked}
        if self.witness is not None:
            d["witness"] = {"depth": self.witness[0], "residual": self.witness[1]}
        return d


def _as_matrix(op):
    if isinstance(op, fock.FockOperator):
        return op.matrix
    return op


def _mat_comm(a, b):
    return a @ b - b @ a


def _mat_norm(a):
    if hasattr(a, "toarray") and not isinstance(a, np.ndarray):
        from scipy.sparse.linalg import norm as spnorm
        return spnorm(a, "fro")
    return float(np.linalg.norm(np.asarray(a), "fro"))


def check_nma(x, y, depth: int = 6, tol: float = 1e-12) -> NmaReport:
    """Numerically test ad_y ad^i_x y = 0 for i = 0 .. depth-1 on matrices.

    Residuals are compared against tol * ||x||^i * ||y||^2 so the verdict is
    scale-invariant.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    xm, ym = _as_matrix(x), _as_matrix(y)
    if xm.shape != ym.shape:
        raise ValueError(f"dimension mismatch: {xm.shape} vs {ym.shape}")
    nx, ny = _mat_norm(xm), _mat_norm(ym)
    ad = ym
    for i in range(depth):
        resid = _mat_norm(_mat_comm(ym, ad))
        scale = max(tol * (nx ** i) * ny * ny, tol)
        if resid >= scale:
            return NmaReport(holds=False, max_depth_checked=depth, witness=(i, float(resid)))
        ad = _mat_comm(xm, ad)
    return NmaReport(holds=True, max_depth_checked=depth)


def nma_certificate(x: AlgebraElement, y: AlgebraElement) -> bool:
    """Unbounded-depth no-mixed-adjoint certificate by closure.

    Every bracket of algebra elements lies in the B span and B elements
    mutually commute, so if y itself has no A component then ad_y ad^i_x y
    vanishes for every i: the i = 0 case is [y, y] = 0 and every deeper
    image is a commutator of two B-span elements.
    """
    _check_same_n(x, y)
    if y.a:
        return False
    # closure sanity: first few adjoint images must be b-only by construction
    ad = y
    for _ in range(3):
        ad = bracket(x, ad)
        assert not ad.a
    return True


def corollary_check(x, y, p: int, q: int):
    """Residual norm of [ad^p_x y, ad^q_x y]; vanishes under NMA."""
    if isinstance(x, AlgebraElement):
        lhs = bracket(iterated_adjoint(x, y, p), iterated_adjoint(x, y, q))
        return lhs.norm()
    xm, ym = _as_matrix(x), _as_matrix(y)
    adp, adq = ym, ym
    for _ in range(p):
        adp = _mat_comm(xm, adp)
    for _ in range(q):
        adq = _mat_comm(xm, adq)
    return _mat_norm(_mat_comm(adp, adq))
