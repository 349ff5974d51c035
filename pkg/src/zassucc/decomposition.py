"""Exact finite product decompositions of exp(X+Y).

Three routes to the B-factor angles gamma_k = (mu . phi(M))_k:

* n2_closed_form -- the sinh/cosh expressions of the single-coupling case;
* phi_matrix     -- phi(M) = (I - exp(-M)) M^{-1} when M is well conditioned,
                    otherwise the entire-series evaluation with
                    scaling-and-halving;
* star_algebra   -- truncated *-product series on weighted path words,
                    well-defined for singular M.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import expm_dense
from .fock import ClusterParams

_COND_LIMIT = 1e8
_SERIES_CAP = 64
_SERIES_RTOL = 1e-16


@dataclass(frozen=True)
class DecompositionPlan:
    """Ordered factors exp(angle * generator); generators are tagged
    ("A", i, j) or ("B", k). A-factors precede B-factors."""

    factors: tuple
    provenance: str
    n: int

    def __post_init__(self):
        seen_b = False
        for gen, _ in self.factors:
            if gen[0] == "B":
                seen_b = True
            elif seen_b:
                raise ValueError("A-factors must precede all B-factors")
        n_a = sum(1 for g, _ in self.factors if g[0] == "A")
        n_b = sum(1 for g, _ in self.factors if g[0] == "B")
        if n_a > self.n * (self.n - 1) // 2 or n_b > self.n:
            raise ValueError("factor counts exceed the N(N+1)/2 bound")

    def b_angles(self) -> dict:
        return {g[1]: angle for g, angle in self.factors if g[0] == "B"}

    def to_dict(self) -> dict:
        factors = []
        for gen, angle in self.factors:
            if gen[0] == "A":
                factors.append({"gen": "A", "i": gen[1], "j": gen[2], "angle": angle})
            else:
                factors.append({"gen": "B", "k": gen[1], "angle": angle})
        return {"provenance": self.provenance, "factors": factors}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def phi_of_M(M: np.ndarray) -> np.ndarray:
    """The entire function phi(M) = sum_{k>=0} (-M)^k / (k+1)!, equal to
    (I - exp(-M)) M^{-1} whenever M is invertible."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("M must be square")
    if not np.allclose(M, M.T):
        raise ValueError("M must be symmetric")
    if np.any(np.diagonal(M) != 0.0):
        raise ValueError("M must have zero diagonal")
    n = M.shape[0]
    if n == 0:
        return np.zeros((0, 0))
    emm = expm_dense(-M)
    cond = np.linalg.cond(M) if np.linalg.norm(M) > 0 else np.inf
    if np.isfinite(cond) and cond < _COND_LIMIT:
        return np.linalg.solve(M.T, (np.eye(n) - emm).T).T
    return _phi_series(M)


def _phi_series(M: np.ndarray) -> np.ndarray:
    # scaling-and-halving: phi(2A) = phi(A) (I + exp(-A)) / 2
    n = M.shape[0]
    nrm = np.linalg.norm(M, 1) if n else 0.0
    s = max(0, int(math.ceil(math.log2(nrm)))) if nrm > 1.0 else 0
    A = M / (2.0 ** s)
    out = np.eye(n)
    term = np.eye(n)
    acc = float(np.linalg.norm(out, "fro"))
    for k in range(1, _SERIES_CAP + 1):
        term = -(term @ A) / (k + 1)
        out = out + term
        tn = float(np.linalg.norm(term, "fro"))
        acc += tn
        if tn < _SERIES_RTOL * acc:
            break
    E = expm_dense(-A)
    for _ in range(s):
        out = 0.5 * (out @ (np.eye(n) + E))
        E = E @ E
    return out


def n2_closed_angles(mu12: float, mu1: float, mu2: float):
    """The sinh/cosh B-angles of the single-coupling case."""
    if mu12 == 0.0:
        return mu1, mu2
    sh, ch = math.sinh(mu12), math.cosh(mu12)
    beta = (sh * mu1 - (ch - 1.0) * mu2) / mu12
    gamma = (sh * mu2 - (ch - 1.0) * mu1) / mu12
    return beta, gamma


def _single_coupling(params: ClusterParams):
    nonzero = [(key, mu) for key, mu in params.mu_pair.items() if mu != 0.0]
    if len(nonzero) > 1:
        return None
    return nonzero[0] if nonzero else ((None, None), 0.0)


def _assemble(params: ClusterParams, gammas: np.ndarray, provenance: str) -> DecompositionPlan:
    factors = [(("A", i, j), float(mu))
               for (i, j), mu in sorted(params.mu_pair.items()) if mu != 0.0]
    factors += [(("B", k), float(gammas[k - 1])) for k in range(1, params.n + 1)]
    return DecompositionPlan(factors=tuple(factors), provenance=provenance, n=params.n)


def decompose(params: ClusterParams, method: str = "phi") -> DecompositionPlan:
    """Plan = product of exp(mu_ij A_ij) followed by exp(gamma_k B_k) with
    gamma = mu . phi(M)."""
    if method == "phi":
        gammas = params.mu_vector() @ phi_of_M(params.transfer_matrix())
        return _assemble(params, gammas, "phi_matrix")
    if method == "closed":
        return decompose_n2(params)
    if method == "star":
        return star_decompose(params)
    raise ValueError(f"unknown decomposition method {method!r}")


def decompose_n2(params: ClusterParams) -> DecompositionPlan:
    """Closed-form route: requires at most one non-zero pair coupling; the
    two coupled blocks get the sinh/cosh angles, every other block passes
    through as exp(mu_k B_k)."""
    single = _single_coupling(params)
    if single is None:
        raise ValueError("closed-form route needs at most one non-zero mu_ij")
    (i, j), mu12 = single
    mu = params.mu_vector()
    gammas = mu.copy()
    if i is not None:
        beta, gamma = n2_closed_angles(mu12, mu[i - 1], mu[j - 1])
        gammas[i - 1] = beta
        gammas[j - 1] = gamma
    return _assemble(params, gammas, "n2_closed_form")


@dataclass(frozen=True)
class ReparamResult:
    gamma: dict
    alpha_beta_gamma: tuple | None = None  # (alpha, beta, gamma) when N == 2


def reparametrize(params: ClusterParams) -> ReparamResult:
    gammas = params.mu_vector() @ phi_of_M(params.transfer_matrix())
    abg = None
    if params.n == 2:
        abg = (params.mu_pair.get((1, 2), 0.0), float(gammas[0]), float(gammas[1]))
    return ReparamResult(gamma={k: float(gammas[k - 1]) for k in range(1, params.n + 1)},
                         alpha_beta_gamma=abg)


def _param_order(n: int):
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    singles = list(range(1, n + 1))
    return pairs, singles


def _pack(params: ClusterParams) -> np.ndarray:
    pairs, singles = _param_order(params.n)
    return np.array([params.mu_pair.get(p, 0.0) for p in pairs]
                    + [params.mu_single.get(k, 0.0) for k in singles])


def _unpack(vec: np.ndarray, n: int) -> ClusterParams:
    pairs, singles = _param_order(n)
    mu_pair = {p: float(vec[idx]) for idx, p in enumerate(pairs)}
    mu_single = {k: float(vec[len(pairs) + idx]) for idx, k in enumerate(singles)}
    return ClusterParams(n=n, mu_pair=mu_pair, mu_single=mu_single)


def reparam_jacobian(params: ClusterParams, h: float = 1e-6) -> np.ndarray:
    """Central finite-difference Jacobian of the change of variables
    (mu_ij, mu_k) -> (mu_ij, gamma_k), variables ordered pairs then
    singles. Warns on condition number above 1e8."""
    import warnings

    if h <= 0:
        raise ValueError("step must be positive")
    n = params.n

    def image(vec):
        p = _unpack(vec, n)
        gam = p.mu_vector() @ phi_of_M(p.transfer_matrix())
        return np.concatenate([vec[: n * (n - 1) // 2], gam])

    x0 = _pack(params)
    dim = x0.size
    jac = np.zeros((dim, dim))
    for col in range(dim):
        step = np.zeros(dim)
        step[col] = h
        jac[:, col] = (image(x0 + step) - image(x0 - step)) / (2.0 * h)
    if np.linalg.cond(jac) > _COND_LIMIT:
        warnings.warn("reparametrization Jacobian is near-singular", RuntimeWarning)
    return jac


def gamma_mu_sensitivity(params: ClusterParams) -> np.ndarray:
    """Analytic d gamma_k / d mu_l = phi(M)_{lk}; gamma is linear in mu."""
    return phi_of_M(params.transfer_matrix())


# ---------------------------------------------------------------------------
# *-product free-algebra path (valid for singular M)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StarWord:
    """Formal sum of nu-symbol path words over n vertices, collapsed to
    weighted path sums keyed by word length: buckets[length][i-1, j-1] is
    the total weight of stored words that start at vertex i and end at
    vertex j. Structurally equal words merge; the data stays finite and
    agrees exactly with powers of the transfer matrix."""

    n: int
    buckets: dict = field(default_factory=dict)  # length -> (n, n) ndarray

    @classmethod
    def empty(cls, n: int) -> "StarWord":
        """The empty word (the *-product unit)."""
        return cls(n=n, buckets={0: np.eye(n)})

    @classmethod
    def nu(cls, i: int, j: int, value: float, n: int) -> "StarWord":
        """The single edge symbol nu_{i->j} with the given weight."""
        if i == j or not (1 <= i <= n and 1 <= j <= n):
            raise ValueError(f"edge ({i},{j}) invalid for {n} vertices")
        m = np.zeros((n, n))
        m[i - 1, j - 1] = value
        return cls(n=n, buckets={1: m})

    @classmethod
    def edge_sum(cls, M: np.ndarray) -> "StarWord":
        """Sum of all nu_{i->j} weighted by the transfer matrix."""
        M = np.asarray(M, dtype=float)
        return cls(n=M.shape[0], buckets={1: M.copy()})

    def is_empty(self) -> bool:
        return all(not np.any(m) for m in self.buckets.values())

    def scaled(self, c: float) -> "StarWord":
        return StarWord(self.n, {l: c * m for l, m in self.buckets.items()})

    def __add__(self, other: "StarWord") -> "StarWord":
        out = {l: m.copy() for l, m in self.buckets.items()}
        for l, m in other.buckets.items():
            out[l] = out.get(l, np.zeros((self.n, self.n))) + m
        return StarWord(self.n, out)


def star_product(u: StarWord, v: StarWord) -> StarWord:
    """Concatenation with the Kronecker-delta joining rule: a word ending at
    vertex j joins a word starting at vertex k only when j = k, which is a
    per-length matrix product of the path-sum buckets."""
    if u.n != v.n:
        raise ValueError("vertex counts differ")
    out: dict = {}
    for lu, mu in u.buckets.items():
        for lv, mv in v.buckets.items():
            prod = mu @ mv
            key = lu + lv
            out[key] = out.get(key, np.zeros((u.n, u.n))) + prod
    return StarWord(u.n, out)


def nu_star_inverse(value: float, i: int, j: int, k: int, l: int, n: int) -> StarWord:
    """The two-case rule for nu_{i->j} (nu_{k->l})^{*-1}: the empty word
    scaled by 1/nu_{i->j} when (l, k) = (i, j) and the edge weight is
    non-zero, the zero word otherwise (a vanished edge inverts to nothing)."""
    if value == 0.0:
        return StarWord(n, {})
    if (l, k) == (i, j):
        return StarWord.empty(n).scaled(1.0 / value)
    return StarWord(n, {})


def star_project(w: StarWord, mu: np.ndarray):
    """The morphism pi onto the reals, per target B-vertex: contract the
    path sums with the mu vector on the start side."""
    out = np.zeros(w.n)
    for m in w.buckets.values():
        out += mu @ m
    return out


def star_gamma(params: ClusterParams, cap: int = _SERIES_CAP) -> np.ndarray:
    """B-angles by the truncated *-exponential series
    sum_n (-1)^n/(n+1)! mu * V^{*n} * B, evaluated on path-sum buckets;
    requires no inverse of M and stays well-defined when M is singular."""
    M = params.transfer_matrix()
    mu = params.mu_vector()
    V = StarWord.edge_sum(M)
    word = StarWord.empty(params.n)
    gam = star_project(word, mu)
    acc = float(np.linalg.norm(gam))
    power = word
    for n in range(1, cap + 1):
        power = star_product(power, V)
        term = star_project(power.scaled((-1.0) ** n / math.factorial(n + 1)), mu)
        gam = gam + term
        tn = float(np.linalg.norm(term))
        acc += tn
        if tn < _SERIES_RTOL * max(acc, 1e-300):
            break
    else:
        raise RuntimeError("*-series failed to converge within the order cap")
    return gam


def star_decompose(params: ClusterParams) -> DecompositionPlan:
    return _assemble(params, star_gamma(params), "star_algebra")


def singular_transfer_witness(scale: float = 0.3) -> ClusterParams:
    """An all-non-zero N=4 transfer matrix with exactly zero determinant.

    For a hollow symmetric 4x4 matrix with upper entries (a, b, c, d, e, f)
    the determinant factors as (a f - b e - c d)^2 - 4 b c d e, so the
    pattern (1, 1, 1, 1, 1, 4) is singular; scaling preserves singularity.
    """
    base = {(1, 2): 1.0, (1, 3): 1.0, (1, 4): 1.0,
            (2, 3): 1.0, (2, 4): 1.0, (3, 4): 4.0}
    return ClusterParams(
        n=4,
        mu_pair={k: scale * v for k, v in base.items()},
        mu_single={1: 0.11, 2: -0.07, 3: 0.05, 4: 0.09},
    )
