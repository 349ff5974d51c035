import json
import math

import numpy as np
import pytest

from zassucc._kernels import expm_dense_numpy
from zassucc.decomposition import (DecompositionPlan, StarWord, decompose,
                                   decompose_n2, gamma_mu_sensitivity,
                                   n2_closed_angles, nu_star_inverse,
                                   phi_of_M, reparam_jacobian, reparametrize,
                                   singular_transfer_witness, star_decompose,
                                   star_gamma, star_product, star_project)
from zassucc.fock import ClusterParams

from conftest import make_rng, random_params


def _random_hollow(n, rng, scale=0.5):
    m = rng.uniform(-scale, scale, (n, n))
    m = m + m.T
    np.fill_diagonal(m, 0.0)
    return m


# ---------------------------------------------------------------------------
# phi(M)
# ---------------------------------------------------------------------------

def test_phi_zero_matrix_is_identity():
    assert np.array_equal(phi_of_M(np.zeros((3, 3))), np.eye(3))


def test_phi_matches_inverse_form(rng):
    for n in (3, 4, 5, 6):
        m = _random_hollow(n, rng)
        expected = (np.eye(n) - expm_dense_numpy(-m)) @ np.linalg.inv(m)
        assert np.max(np.abs(phi_of_M(m) - expected)) < 1e-12


def test_phi_identity_on_singular_matrix():
    # (I - exp(-M)) = phi(M) M is an identity of entire functions and is the
    # singular-safe correctness statement
    m = singular_transfer_witness().transfer_matrix()
    assert abs(np.linalg.det(m)) < 1e-12
    lhs = np.eye(4) - expm_dense_numpy(-m)
    assert np.max(np.abs(lhs - phi_of_M(m) @ m)) < 1e-13


def test_phi_n2_reproduces_closed_angles():
    mu12, mu1, mu2 = 0.37, 0.21, -0.4
    m = np.array([[0.0, mu12], [mu12, 0.0]])
    beta, gamma = n2_closed_angles(mu12, mu1, mu2)
    got = np.array([mu1, mu2]) @ phi_of_M(m)
    assert abs(got[0] - beta) < 1e-15
    assert abs(got[1] - gamma) < 1e-15
    # displayed form of exp(-M) for the 2x2 hollow case
    em = expm_dense_numpy(-m)
    ch, sh = math.cosh(mu12), math.sinh(mu12)
    assert np.max(np.abs(em - np.array([[ch, -sh], [-sh, ch]]))) < 1e-14


def test_phi_input_validation():
    with pytest.raises(ValueError):
        phi_of_M(np.ones((2, 3)))
    with pytest.raises(ValueError):
        phi_of_M(np.array([[0.0, 1.0], [2.0, 0.0]]))  # not symmetric
    with pytest.raises(ValueError):
        phi_of_M(np.array([[1.0, 0.5], [0.5, 0.0]]))  # non-zero diagonal


# ---------------------------------------------------------------------------
# plans
# ---------------------------------------------------------------------------

def test_plan_ordering_and_bounds():
    with pytest.raises(ValueError):
        DecompositionPlan(factors=((("B", 1), 0.1), (("A", 1, 2), 0.2)),
                          provenance="phi_matrix", n=2)
    with pytest.raises(ValueError):
        DecompositionPlan(factors=((("B", 1), 0.1), (("B", 1), 0.2),
                                   (("B", 2), 0.3)),
                          provenance="phi_matrix", n=2)


def test_plan_json_shape():
    plan = decompose(ClusterParams(n=2, mu_pair={(1, 2): 0.2},
                                   mu_single={1: 0.1, 2: 0.3}))
    doc = json.loads(plan.to_json())
    assert list(doc.keys()) == ["provenance", "factors"]
    assert doc["provenance"] == "phi_matrix"
    assert list(doc["factors"][0].keys()) == ["gen", "i", "j", "angle"]
    assert list(doc["factors"][1].keys()) == ["gen", "k", "angle"]
    assert doc["factors"][0] == {"gen": "A", "i": 1, "j": 2, "angle": 0.2}


def test_routes_agree_single_coupling():
    params = ClusterParams(n=2, mu_pair={(1, 2): 0.3},
                           mu_single={1: 0.1, 2: 0.2})
    plans = [decompose(params, method=m) for m in ("phi", "closed", "star")]
    angles = [[angle for _, angle in p.factors] for p in plans]
    for other in angles[1:]:
        assert np.max(np.abs(np.array(angles[0]) - np.array(other))) < 1e-12
    assert {p.provenance for p in plans} == {"phi_matrix", "n2_closed_form",
                                             "star_algebra"}


def test_routes_agree_random_n4(rng):
    params = random_params(4, rng)
    phi_plan = decompose(params, method="phi")
    star_plan = decompose(params, method="star")
    for (g1, a1), (g2, a2) in zip(phi_plan.factors, star_plan.factors):
        assert g1 == g2
        assert abs(a1 - a2) < 1e-12


def test_decompose_n2_rejects_multiple_couplings():
    params = ClusterParams(n=3, mu_pair={(1, 2): 0.1, (2, 3): 0.2},
                           mu_single={})
    with pytest.raises(ValueError):
        decompose_n2(params)


def test_decompose_n2_passthrough_blocks():
    params = ClusterParams(n=3, mu_pair={(1, 2): 0.3},
                           mu_single={1: 0.1, 2: 0.2, 3: 0.7})
    plan = decompose_n2(params)
    beta, gamma = n2_closed_angles(0.3, 0.1, 0.2)
    assert plan.b_angles() == pytest.approx({1: beta, 2: gamma, 3: 0.7})


def test_decompose_zero_couplings_only_b_factors():
    params = ClusterParams(n=3, mu_pair={}, mu_single={1: 0.1, 3: -0.2})
    plan = decompose(params)
    assert all(gen[0] == "B" for gen, _ in plan.factors)
    assert plan.b_angles() == pytest.approx({1: 0.1, 2: 0.0, 3: -0.2})


def test_unknown_method():
    with pytest.raises(ValueError):
        decompose(ClusterParams(n=2), method="magic")


# ---------------------------------------------------------------------------
# reparametrization
# ---------------------------------------------------------------------------

def test_reparametrize_matches_plan():
    params = ClusterParams(n=2, mu_pair={(1, 2): 0.2},
                           mu_single={1: 0.1, 2: 0.3})
    res = reparametrize(params)
    assert res.gamma == pytest.approx(decompose(params).b_angles())
    alpha, beta, gamma = res.alpha_beta_gamma
    assert alpha == 0.2
    assert (beta, gamma) == pytest.approx(n2_closed_angles(0.2, 0.1, 0.3))


def test_jacobian_tends_to_identity_at_small_scale(rng):
    params = random_params(3, rng, scale=1e-4)
    jac = reparam_jacobian(params, h=1e-6)
    assert np.linalg.norm(jac - np.eye(jac.shape[0])) < 1e-3


def test_jacobian_nonsingular_n2():
    params = ClusterParams(n=2, mu_pair={(1, 2): 0.2},
                           mu_single={1: 0.1, 2: 0.3})
    jac = reparam_jacobian(params)
    assert abs(np.linalg.det(jac)) > 1e-6


def test_jacobian_step_validation():
    with pytest.raises(ValueError):
        reparam_jacobian(ClusterParams(n=2), h=0.0)


def test_gamma_sensitivity_is_phi(rng):
    params = random_params(3, rng)
    sens = gamma_mu_sensitivity(params)
    assert np.max(np.abs(sens - phi_of_M(params.transfer_matrix()))) == 0.0
    # finite-difference cross-check of d gamma_k / d mu_l
    h = 1e-6
    for l in range(1, 4):
        up = dict(params.mu_single)
        dn = dict(params.mu_single)
        up[l] = up.get(l, 0.0) + h
        dn[l] = dn.get(l, 0.0) - h
        gu = np.array(list(reparametrize(ClusterParams(3, dict(params.mu_pair), up)).gamma.values()))
        gd = np.array(list(reparametrize(ClusterParams(3, dict(params.mu_pair), dn)).gamma.values()))
        fd = (gu - gd) / (2 * h)
        assert np.max(np.abs(fd - sens[l - 1])) < 1e-9


def test_gamma_limit_linear_in_coupling_scale(rng):
    base = random_params(3, rng, scale=1.0)
    mu = np.array([base.mu_single.get(k, 0.0) for k in (1, 2, 3)])

    def rel_err(s):
        p = ClusterParams(3, {k: s * v for k, v in base.mu_pair.items()},
                          dict(base.mu_single))
        gam = np.array(list(reparametrize(p).gamma.values()))
        return np.linalg.norm(gam - mu) / np.linalg.norm(mu)

    r1, r2 = rel_err(1e-3), rel_err(5e-4)
    assert r1 < 1e-2
    assert r1 / r2 == pytest.approx(2.0, rel=0.3)


# ---------------------------------------------------------------------------
# *-algebra
# ---------------------------------------------------------------------------

def test_star_unit_and_edge():
    unit = StarWord.empty(3)
    edge = StarWord.nu(1, 2, 0.5, 3)
    assert star_product(unit, edge).buckets[1][0, 1] == 0.5
    assert star_product(edge, unit).buckets[1][0, 1] == 0.5
    with pytest.raises(ValueError):
        StarWord.nu(1, 1, 0.5, 3)


def test_star_delta_joining_rule():
    nu12 = StarWord.nu(1, 2, 0.3, 4)
    nu34 = StarWord.nu(3, 4, 0.7, 4)
    assert star_product(nu12, nu34).is_empty()  # endpoints do not match
    nu23 = StarWord.nu(2, 3, 0.7, 4)
    joined = star_product(nu12, nu23)
    assert joined.buckets[2][0, 2] == pytest.approx(0.21)


def test_star_product_associative(rng):
    words = [StarWord.edge_sum(rng.standard_normal((3, 3))) for _ in range(3)]
    left = star_product(star_product(words[0], words[1]), words[2])
    right = star_product(words[0], star_product(words[1], words[2]))
    assert left.buckets.keys() == right.buckets.keys()
    for k in left.buckets:
        assert np.max(np.abs(left.buckets[k] - right.buckets[k])) < 1e-13


def test_nu_star_inverse_two_cases():
    inv = nu_star_inverse(0.5, 1, 2, 2, 1, 3)
    assert inv.buckets[0][0, 0] == pytest.approx(2.0)
    assert nu_star_inverse(0.5, 1, 2, 1, 2, 3).is_empty()
    assert nu_star_inverse(0.0, 1, 2, 2, 1, 3).is_empty()


def test_star_projection_boundary_rule():
    # a word mu_1 nu_{1->2} B_2 contributes mu1 * nu12 at target vertex 2
    word = StarWord.nu(1, 2, 0.3, 2)
    mu = np.array([0.5, 0.0])
    out = star_project(word, mu)
    assert out[1] == pytest.approx(0.15)
    assert out[0] == 0.0


def test_star_gamma_matches_series_definition(rng):
    params = random_params(3, rng)
    M = params.transfer_matrix()
    mu = params.mu_vector()
    direct = sum((-1.0) ** n / math.factorial(n + 1)
                 * mu @ np.linalg.matrix_power(M, n) for n in range(40))
    assert np.max(np.abs(star_gamma(params) - direct)) < 1e-14


def test_singular_witness_properties():
    params = singular_transfer_witness()
    m = params.transfer_matrix()
    upper = m[np.triu_indices(4, k=1)]
    assert np.all(upper != 0.0)
    assert abs(np.linalg.det(m)) < 1e-12
    # the phi route falls back to the entire series and agrees with the
    # star route on the singular instance
    phi_plan = decompose(params, method="phi")
    star_plan = star_decompose(params)
    for (g1, a1), (g2, a2) in zip(phi_plan.factors, star_plan.factors):
        assert g1 == g2
        assert abs(a1 - a2) < 1e-12
