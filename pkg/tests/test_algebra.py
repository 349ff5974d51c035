from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zassucc.algebra import (AlgebraElement, bracket, check_nma,
                             corollary_check, from_params, iterated_adjoint,
                             nma_certificate)
from zassucc.fock import ClusterParams, build_X, build_Y, default_modes

from conftest import random_params


def _elem(n, a=None, b=None):
    return AlgebraElement(n, a=a, b=b)


def _int_elements(n, max_terms=3):
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    coeff = st.integers(min_value=-5, max_value=5)
    a = st.dictionaries(st.sampled_from(pairs), coeff, max_size=max_terms)
    b = st.dictionaries(st.integers(1, n), coeff, max_size=max_terms)
    return st.builds(lambda aa, bb: AlgebraElement(n, a=aa, b=bb), a, b)


def test_bracket_structure_constants():
    a12 = _elem(2, a={(1, 2): 1})
    b1 = _elem(2, b={1: 1})
    b2 = _elem(2, b={2: 1})
    assert bracket(a12, b1) == b2
    assert bracket(a12, b2) == b1
    assert bracket(b1, b2).is_zero()
    assert bracket(0.7 * a12, 0.3 * b1) == 0.7 * 0.3 * b2


def test_bracket_result_is_b_only():
    x = _elem(3, a={(1, 2): 2, (2, 3): -1}, b={1: 4})
    y = _elem(3, a={(1, 3): 1}, b={2: 3, 3: -2})
    out = bracket(x, y)
    assert not out.a


def test_bracket_disjoint_blocks_vanish():
    assert bracket(_elem(3, a={(1, 2): 1}), _elem(3, b={3: 1})).is_zero()


def test_bracket_rejects_mismatched_n():
    with pytest.raises(ValueError):
        bracket(_elem(2, b={1: 1}), _elem(3, b={1: 1}))


@given(_int_elements(3), _int_elements(3))
@settings(max_examples=60, deadline=None)
def test_bracket_antisymmetry(x, y):
    assert (bracket(x, y) + bracket(y, x)).is_zero()
    assert bracket(x, x).is_zero()


@given(_int_elements(3), _int_elements(3), st.integers(-4, 4), st.integers(-4, 4))
@settings(max_examples=60, deadline=None)
def test_bracket_bilinearity(x, y, c1, c2):
    z = _elem(3, b={2: 1})
    lhs = bracket(c1 * x + c2 * y, z)
    rhs = c1 * bracket(x, z) + c2 * bracket(y, z)
    assert (lhs - rhs).is_zero()


@given(_int_elements(2), _int_elements(2), _int_elements(2))
@settings(max_examples=60, deadline=None)
def test_jacobi_identity_two_blocks(x, y, z):
    total = (bracket(x, bracket(y, z)) + bracket(y, bracket(z, x))
             + bracket(z, bracket(x, y)))
    assert total.is_zero()


def test_jacobi_defect_three_blocks():
    # with three or more blocks the posited bracket is not a Lie bracket:
    # the cyclic sum over (A_12, A_13, B_3) leaves exactly B_2 behind
    x = _elem(3, a={(1, 2): 1})
    y = _elem(3, a={(1, 3): 1})
    z = _elem(3, b={3: 1})
    total = (bracket(x, bracket(y, z)) + bracket(y, bracket(z, x))
             + bracket(z, bracket(x, y)))
    assert total == _elem(3, b={2: 1})


def test_iterated_adjoint_matches_transfer_matrix_powers(rng):
    params = random_params(4, rng)
    x, y = from_params(params)
    M = params.transfer_matrix()
    mu = params.mu_vector()
    for k in range(6):
        expected = mu @ np.linalg.matrix_power(M, k)
        got = iterated_adjoint(x, y, k)
        assert not got.a or k == 0
        assert np.max(np.abs(got.b_vector() - expected)) < 1e-13


def test_iterated_adjoint_n2_closed_pattern():
    x = _elem(2, a={(1, 2): Fraction(1, 3)})
    y = _elem(2, b={1: Fraction(1, 2), 2: Fraction(1, 5)})
    even = iterated_adjoint(x, y, 2)
    assert even.b == {1: Fraction(1, 3) ** 2 * Fraction(1, 2),
                      2: Fraction(1, 3) ** 2 * Fraction(1, 5)}
    odd = iterated_adjoint(x, y, 1)
    assert odd.b == {1: Fraction(1, 3) * Fraction(1, 5),
                     2: Fraction(1, 3) * Fraction(1, 2)}


def test_embedding_agrees_where_the_algebra_closes():
    # identities that genuinely hold as matrices: B-B and block-disjoint pairs
    modes = default_modes(3)
    params = ClusterParams(n=3, mu_pair={(1, 2): 0.4}, mu_single={3: 0.7})
    xm = build_X(params, modes)
    ym = build_Y(params, modes)
    assert xm.commutator(ym).norm() < 1e-14  # symbolic bracket is zero too
    assert bracket(*from_params(params)).is_zero()


def test_embedding_departs_on_shared_blocks():
    # the symbolic bracket posits [A_12, B_1] = B_2; the matrices disagree,
    # so the symbolic algebra is a model of the decomposition formulas, not
    # of the fermionic operators
    modes = default_modes(2)
    x = _elem(2, a={(1, 2): 1.0})
    y = _elem(2, b={1: 1.0})
    sym = bracket(x, y).to_fock_operator(modes)
    mat = x.to_fock_operator(modes).commutator(y.to_fock_operator(modes))
    assert (mat - sym).norm() > 1.0


def test_nma_certificate():
    x = _elem(3, a={(1, 2): 0.3, (1, 3): -0.2})
    y = _elem(3, b={1: 0.5, 2: 0.1})
    assert nma_certificate(x, y) is True
    assert nma_certificate(x, x) is False  # y with an A component


def test_check_nma_pauli_witness():
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    sy = np.array([[0.0, -1.0j], [1.0j, 0.0]])
    report = check_nma(sx, sy, depth=3)
    assert report.holds is False
    # the i = 0 image [y, y] vanishes identically; the first possible
    # witness is the adjoint power i = 1
    assert report.witness[0] == 1
    assert report.to_dict()["witness"]["depth"] == 1


def test_check_nma_self_adjoint_trivial():
    m = np.diag([1.0, 2.0, 3.0])
    assert check_nma(m, m, depth=4).holds is True


def test_check_nma_block_generators_fail_at_depth_one():
    # the no-mixed-adjoint property does not survive the embedding: the
    # first mixed adjoint ad_Y ad_X Y is non-zero for coupled blocks
    modes = default_modes(2)
    params = ClusterParams(n=2, mu_pair={(1, 2): 0.3},
                           mu_single={1: 0.2, 2: -0.15})
    report = check_nma(build_X(params, modes), build_Y(params, modes), depth=6)
    assert report.holds is False
    assert report.witness[0] == 1
    assert report.witness[1] > 1e-3


def test_check_nma_depth_validation():
    with pytest.raises(ValueError):
        check_nma(np.eye(2), np.eye(2), depth=0)


def test_corollary_check_symbolic_zero():
    params = ClusterParams(n=3, mu_pair={(1, 2): 0.3, (2, 3): 0.4},
                           mu_single={1: 0.1, 2: 0.2, 3: 0.3})
    x, y = from_params(params)
    for p, q in [(0, 2), (1, 3), (2, 2)]:
        assert corollary_check(x, y, p, q) == 0.0


def test_corollary_check_matrix_self_commutator(rng):
    m = rng.standard_normal((5, 5))
    y = rng.standard_normal((5, 5))
    assert corollary_check(m, y, 2, 2) < 1e-12
