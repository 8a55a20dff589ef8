import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncsym import funcalc, mat, symmap
from ncsym.errors import DomainError, PreconditionError
from ncsym.funcalc import FejerPlan
from ncsym.ncfun import GradedPoint, random_biball_point, random_point_with_norm
from ncsym.symmap import DiscAlgElem


def test_plan_validation():
    with pytest.raises(ValueError):
        FejerPlan(max_k=0)
    with pytest.raises(ValueError):
        FejerPlan(tol=0)


def test_constant_series():
    c = mat.random_gaussian(1, 2)
    t = mat.random_unitary(2, 3)
    res = funcalc.theta(DiscAlgElem.from_list([c]), t)
    np.testing.assert_allclose(res.value, np.kron(c, np.eye(3)), atol=1e-15)
    assert res.converged and res.exact


def test_scalar_operator():
    g = DiscAlgElem.scalar([0.5, -0.25, 0.125j])
    lam = 0.6
    res = funcalc.theta(g, lam * np.eye(2))
    expect = 0.5 - 0.25 * lam + 0.125j * lam**2
    assert mat.op_norm(res.value - expect * np.eye(2)) <= 1e-8


def test_contraction_required():
    with pytest.raises(DomainError):
        funcalc.theta(DiscAlgElem.scalar([1, 1]), 1.5 * np.eye(2))


def test_partial_sum_reference():
    g = DiscAlgElem.scalar([1, 2, 3])
    t = mat.random_unitary(3, 2)
    res = funcalc.theta(g, t)
    expect = np.eye(2) + 2 * t + 3 * t @ t
    assert mat.op_norm(res.partial_sum - expect) <= 1e-14


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 3), st.integers(1, 8))
def test_theta_matches_closed_form(seed, n, h):
    rng = mat.make_rng(seed)
    x = random_biball_point(rng, n, 0.8)
    u = mat.random_unitary(rng, h)
    g = symmap.s_map(x).series
    plan = FejerPlan()
    res = funcalc.theta(g, u, plan)
    exact = funcalc.theta_closed_smap(x, u)
    assert mat.op_norm(res.value - exact) <= plan.tol + g.tail_bound + 1e-8
    assert res.achieved_k <= plan.max_k


def test_raw_fejer_error_decays_like_one_over_k():
    g = DiscAlgElem.scalar([0.3, 0.2, -0.1, 0.05])
    t = mat.random_unitary(4, 3)
    exact = funcalc.theta(g, t).partial_sum
    weight = sum(j * mat.op_norm(g[j]) for j in range(g.length))
    for k in (4, 16, 64, 256, 1024):
        err = mat.op_norm(funcalc.fejer_mean(g, t, k) - exact)
        assert err <= weight / (k + 1) + 1e-14


def test_raw_plan_stops_on_successive_means():
    g = DiscAlgElem.scalar([0.3, 0.2])
    res = funcalc.theta(g, mat.random_unitary(5, 2), FejerPlan(max_k=50, tol=1e-3,
                                                              accelerate=False))
    assert res.converged
    np.testing.assert_array_equal(res.value, res.fejer_mean)


def test_nonconvergence_is_flagged():
    x = random_point_with_norm(6, 2, 0.95)
    res = funcalc.theta(symmap.s_map(x).series, mat.random_unitary(7, 3),
                        FejerPlan(max_k=3, accelerate=False))
    assert not res.converged
    assert res.achieved_k == 3


def test_closed_form_examples():
    a = mat.random_gaussian(8, 2) * 0.3
    u = mat.random_unitary(9, 3)
    np.testing.assert_allclose(funcalc.theta_closed_smap(GradedPoint.of(a, a), u),
                               np.kron(a, np.eye(3)), atol=1e-15)
    x = random_biball_point(10, 2, 0.8)
    uu, _ = symmap.uv(x)
    np.testing.assert_allclose(funcalc.theta_closed_smap(x, np.zeros((3, 3))),
                               np.kron(uu, np.eye(3)), atol=1e-15)


def test_direct_sums_with_permutation():
    t = mat.random_unitary(11, 3)
    g = symmap.s_map(random_biball_point(12, 2), 12).series
    h = symmap.s_map(random_biball_point(13, 1), 12).series
    perm = funcalc.tensor_sum_permutation(2, 1, 3)
    np.testing.assert_array_equal(perm, np.eye(9))
    lhs = funcalc.theta(g.direct_sum(h), t).value
    rhs = perm @ mat.direct_sum(funcalc.theta(g, t).value, funcalc.theta(h, t).value) @ perm.T
    assert mat.op_norm(lhs - rhs) <= 1e-10


def test_tensor_sum_permutation_from_index_maps():
    # the identification maps e_i (x) f_a of the second summand to e_{m+i} (x) f_a
    m, n, h = 2, 3, 2
    perm = funcalc.tensor_sum_permutation(m, n, h)
    for i in range(n):
        for a in range(h):
            src = m * h + i * h + a
            dst = np.kron(np.eye(m + n)[m + i], np.eye(h)[a])
            np.testing.assert_array_equal(perm[:, src], dst)


def test_vn_norm_check_examples():
    g = DiscAlgElem.scalar([0, 0.5])
    chk = funcalc.vn_norm_check(g, mat.random_unitary(14, 4))
    assert chk.norm == pytest.approx(0.5, abs=1e-12) and chk.strict
    x = random_point_with_norm(15, 2, 0.8)
    chk = funcalc.vn_norm_check(symmap.s_map(x).series, mat.random_unitary(16, 8))
    assert chk.norm <= 0.8 + 1e-6 and chk.strict
    with pytest.raises(PreconditionError):
        funcalc.vn_norm_check(DiscAlgElem.scalar([0, 1.0]), np.eye(2))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32))
def test_von_neumann_inequality(seed):
    rng = mat.make_rng(seed)
    g = DiscAlgElem(mat.random_gaussian(rng, 6, 2).reshape(3, 2, 2) * 0.1)
    if symmap.sup_norm(g) >= 1:
        return
    plan = FejerPlan()
    t = mat.random_strict_contraction(rng, 3, 0.99)
    chk = funcalc.vn_norm_check(g, t, plan)
    assert chk.norm <= chk.sup_norm + plan.tol


def test_theta_similarity_examples():
    g = symmap.s_map(random_biball_point(17, 3), 15).series
    u = mat.random_unitary(18, 2)
    assert funcalc.theta_similarity_check(g, np.eye(3), u) == 0.0
    s = mat.random_similarity(19, 3)
    assert funcalc.theta_similarity_check(g, s, u) <= 1e-9
    gd = DiscAlgElem(np.stack([np.diag(mat.random_gaussian(20, 3, 1).ravel()) * 0.2
                               for _ in range(3)]))
    sd = np.diag([1.0, 2.0, 0.5])
    assert funcalc.theta_similarity_check(gd, sd, u) <= 1e-12
