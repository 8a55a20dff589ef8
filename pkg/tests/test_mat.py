import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncsym import mat
from ncsym.errors import InvalidInputError, SingularMatrixError


def power_iteration_norm(a, iters=2000):
    rng = np.random.default_rng(0)
    v = rng.standard_normal(a.shape[1]) + 1j * rng.standard_normal(a.shape[1])
    gram = a.conj().T @ a
    for _ in range(iters):
        v = gram @ v
        v /= np.linalg.norm(v)
    return np.sqrt(np.real(v.conj() @ gram @ v))


def test_op_norm_examples():
    assert mat.op_norm(mat.identity(3)) == pytest.approx(1.0, abs=1e-15)
    assert mat.op_norm(np.diag([0.5, -0.25])) == pytest.approx(0.5, abs=1e-15)


def test_op_norm_matches_power_iteration():
    a = mat.random_gaussian(11, 4, 4)
    assert abs(mat.op_norm(a) - power_iteration_norm(a)) <= 1e-10


def test_op_norm_rejects_nonfinite():
    with pytest.raises(InvalidInputError):
        mat.op_norm(np.array([[1.0, np.nan]]))


def test_direct_sum_examples():
    np.testing.assert_array_equal(mat.direct_sum([[1]], [[2]]), np.diag([1, 2]))
    a = mat.random_gaussian(1, 3, 2)
    np.testing.assert_array_equal(mat.direct_sum(a, np.zeros((0, 0))), a)
    out = mat.direct_sum(a, mat.random_gaussian(2, 2, 4))
    assert out.shape == (5, 6)
    assert np.all(out[:3, 2:] == 0) and np.all(out[3:, :2] == 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 6), st.integers(1, 6))
def test_direct_sum_norm_is_max(seed, n, m):
    rng = mat.make_rng(seed)
    a, b = mat.random_gaussian(rng, n), mat.random_gaussian(rng, m)
    assert abs(mat.op_norm(mat.direct_sum(a, b)) - max(mat.op_norm(a), mat.op_norm(b))) <= 1e-12 * (
        1 + mat.op_norm(a) + mat.op_norm(b))


def test_kron_convention():
    np.testing.assert_array_equal(mat.kron(mat.identity(2), mat.identity(3)), mat.identity(6))
    np.testing.assert_array_equal(mat.kron(np.diag([2, 3]), mat.identity(2)), np.diag([2, 2, 3, 3]))
    a, b = mat.random_gaussian(3, 2, 3), mat.random_gaussian(4, 4, 2)
    k = mat.kron(a, b)
    for i in range(2):
        for j in range(3):
            for p in range(4):
                for q in range(2):
                    assert abs(k[i * 4 + p, j * 2 + q] - a[i, j] * b[p, q]) <= 1e-15


def test_kron_mixed_product():
    rng = mat.make_rng(5)
    a, b, c, d = (mat.random_gaussian(rng, 2) for _ in range(4))
    lhs = mat.kron(a, b) @ mat.kron(c, d)
    assert mat.op_norm(lhs - mat.kron(a @ c, b @ d)) <= 1e-12 * mat.op_norm(lhs)


def test_inverse_examples():
    np.testing.assert_allclose(mat.inverse(mat.identity(3)), mat.identity(3))
    np.testing.assert_allclose(mat.inverse(np.diag([2.0, 4.0])), np.diag([0.5, 0.25]))
    a = 3 * mat.identity(5) + mat.random_gaussian(8, 5)
    assert mat.op_norm(a @ mat.inverse(a) - mat.identity(5)) <= 1e-10
    assert mat.op_norm(mat.inverse(a) @ a - mat.identity(5)) <= 1e-10


def test_inverse_singular_reports_smallest_sv():
    a = np.array([[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(SingularMatrixError) as info:
        mat.inverse(a, which="test pencil")
    assert info.value.smallest_sv < 1e-12
    assert info.value.which == "test pencil"


def test_random_unitary():
    u1 = mat.random_unitary(9, 1)
    assert abs(abs(u1[0, 0]) - 1) <= 1e-15
    np.testing.assert_array_equal(mat.random_unitary(9, 4), mat.random_unitary(9, 4))
    u = mat.random_unitary(9, 4)
    assert mat.op_norm(u.conj().T @ u - mat.identity(4)) <= 1e-12


def test_unitary_invariance_of_norm():
    a = mat.random_gaussian(1, 5)
    u = mat.random_unitary(2, 5)
    assert abs(mat.op_norm(u.conj().T @ a @ u) - mat.op_norm(a)) <= 1e-10


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**63), st.integers(1, 6), st.floats(0.01, 0.99))
def test_random_strict_contraction_bound(seed, n, r):
    x = mat.random_strict_contraction(seed, n, r)
    assert x.shape == (n, n)
    assert mat.op_norm(x) <= r


def test_random_strict_contraction_deterministic():
    np.testing.assert_array_equal(mat.random_strict_contraction(3, 3, 0.5),
                                  mat.random_strict_contraction(3, 3, 0.5))
    assert abs(mat.random_strict_contraction(4, 1, 0.5)[0, 0]) <= 0.5


def test_streams_are_independent():
    a = mat.random_gaussian(mat.make_rng(1, "a"), 3)
    b = mat.random_gaussian(mat.make_rng(1, "b"), 3)
    assert not np.allclose(a, b)


def test_json_roundtrip():
    a = mat.random_gaussian(2, 2, 3)
    obj = json.loads(json.dumps(mat.matrix_to_json(a)))
    assert obj["rows"] == 2 and obj["cols"] == 3 and len(obj["data"]) == 6
    assert obj["data"][1] == [a[0, 1].real, a[0, 1].imag]
    np.testing.assert_array_equal(mat.matrix_from_json(obj), a)
