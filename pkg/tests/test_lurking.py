import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncsym import lurking, mat
from ncsym.errors import ContractViolation, GramMismatchError, PaddingError
from ncsym.lurking import VectorFamily
from ncsym.ncfun import GradedPoint, random_biball_point


def family(seed, k, m):
    return VectorFamily(mat.random_gaussian(seed, k, m))


def test_identity_families():
    p = family(1, 5, 3)
    sol = lurking.solve(p, p)
    assert np.max(np.linalg.norm(sol.J @ p.vectors - p.vectors, axis=0)) <= 1e-10
    assert sol.rank == 3 and not sol.unitary


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), st.integers(2, 8), st.integers(1, 12))
def test_planted_unitary(seed, k, m):
    rng = mat.make_rng(seed)
    j0 = mat.random_unitary(rng, k)
    p = mat.random_gaussian(rng, k, m)
    sol = lurking.solve(VectorFamily(p), VectorFamily(j0 @ p), pad_to_unitary=True)
    assert np.max(np.linalg.norm(sol.J @ p - j0 @ p, axis=0)) <= 1e-9
    assert sol.unitary and mat.is_unitary(sol.J)
    assert sol.rank == min(k, m)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), st.integers(2, 8), st.integers(1, 6))
def test_partial_isometry_projects_onto_span(seed, k, m):
    rng = mat.make_rng(seed)
    j0 = mat.random_unitary(rng, k)
    p = mat.random_gaussian(rng, k, min(m, k - 1))
    sol = lurking.solve(VectorFamily(p), VectorFamily(j0 @ p))
    proj = lurking.projection_onto_span(p)
    assert mat.op_norm(sol.J.conj().T @ sol.J - proj) <= 1e-9


def test_gram_perturbation_rejected():
    p = family(2, 4, 3)
    j0 = mat.random_unitary(3, 4)
    q = j0 @ p.vectors + mat.random_matrix_with_norm(4, 4, 3, 1e-3)
    with pytest.raises(GramMismatchError) as info:
        lurking.solve(p, VectorFamily(q))
    assert info.value.mismatch > 1e-6


def test_size_mismatch():
    with pytest.raises(ContractViolation):
        lurking.solve(family(5, 3, 2), family(6, 3, 3))


def test_padding_needs_equal_dimensions():
    p = mat.random_gaussian(7, 3, 2)
    iso = np.linalg.qr(mat.random_gaussian(8, 5, 5))[0][:, :3]
    q = iso @ p
    sol = lurking.solve(VectorFamily(p), VectorFamily(q))
    assert sol.J.shape == (5, 3)
    with pytest.raises(PaddingError):
        lurking.solve(VectorFamily(p), VectorFamily(q), pad_to_unitary=True)


def test_rank_deficient_families():
    base = mat.random_gaussian(9, 6, 2)
    p = np.hstack([base, base @ np.array([[1.0, 2.0], [0.5, -1.0]])])
    j0 = mat.random_unitary(10, 6)
    sol = lurking.solve(VectorFamily(p), VectorFamily(j0 @ p), pad_to_unitary=True)
    assert sol.rank == 2
    assert sol.residual <= 1e-9 and mat.is_unitary(sol.J)


def graded_pair(seed, k):
    """``f(x) = x1 (x) c + x2 (x) d`` and ``g = (1 (x) J0) f``."""
    rng = mat.make_rng(seed)
    c, d = mat.random_gaussian(rng, k, 1), mat.random_gaussian(rng, k, 1)
    j0 = mat.random_unitary(rng, k)
    f = lambda x: np.kron(x[0], c) + np.kron(x[1], d)
    g = lambda x: np.kron(np.eye(x.level), j0) @ f(x)
    return f, g


def test_collect_vectors_counts_and_layout():
    c = mat.random_gaussian(11, 4, 1)
    fam = lurking.collect_vectors(lambda x: c, [GradedPoint.of([[0.1]], [[0.2]])], 4)
    assert len(fam) == 1
    np.testing.assert_array_equal(fam.vectors[:, 0], c[:, 0])
    f, _ = graded_pair(12, 4)
    samples = [random_biball_point(13, n) for n in (1, 2, 3)]
    fam = lurking.collect_vectors(f, samples, 4)
    assert len(fam) == 1 + 4 + 9
    x = samples[1]
    val = f(x)
    # slice for row-block k and basis vector e_i is (e_k^* (x) 1) f(x) e_i
    for k in range(2):
        for i in range(2):
            expect = np.kron(np.eye(2)[k][None, :], np.eye(4)) @ val[:, i]
            idx = fam.labels.index((k, i, 1))
            np.testing.assert_allclose(fam.vectors[:, idx], expect)


def test_collect_vectors_shape_error():
    with pytest.raises(ContractViolation):
        lurking.collect_vectors(lambda x: np.zeros((5, 1)), [random_biball_point(14, 2)], 4)


def test_span_matches_rank_oracle():
    f, _ = graded_pair(15, 6)
    samples = [random_biball_point(mat.make_rng(16, i), 1 + i % 2) for i in range(4)]
    fam = lurking.collect_vectors(f, samples, 6)
    stacked = np.hstack([f(x).reshape(x.level, 6, x.level).transpose(1, 0, 2).reshape(6, -1)
                         for x in samples])
    assert fam.rank() == np.linalg.matrix_rank(stacked, tol=1e-10 * np.linalg.norm(stacked, 2))
    assert mat.op_norm(lurking.projection_onto_span(fam.vectors)
                       - lurking.projection_onto_span(stacked)) <= 1e-10


def test_graded_intertwining():
    f, g = graded_pair(17, 5)
    samples = [random_biball_point(mat.make_rng(18, i), 1 + i % 3) for i in range(6)]
    sol = lurking.solve(lurking.collect_vectors(f, samples, 5),
                        lurking.collect_vectors(g, samples, 5))
    for x in samples:
        assert mat.op_norm(sol.apply_graded(x.level) @ f(x) - g(x)) <= 1e-9


def test_nesting_consistency():
    f, g = graded_pair(19, 6)
    samples = [random_biball_point(mat.make_rng(20, i), 1 + i % 3) for i in range(6)]
    small = lurking.solve(lurking.collect_vectors(f, samples[:2], 6),
                          lurking.collect_vectors(g, samples[:2], 6))
    full = lurking.solve(lurking.collect_vectors(f, samples, 6),
                         lurking.collect_vectors(g, samples, 6))
    sub = lurking.collect_vectors(f, samples[:2], 6).vectors
    proj = lurking.projection_onto_span(sub)
    assert mat.op_norm((small.J - full.J) @ proj) <= 1e-9


def test_family_helpers():
    a, b = family(21, 3, 2), family(22, 3, 1)
    ab = a.extend(b)
    assert len(ab) == 3 and ab.ambient_dim == 3
    assert len(ab.subset([True, False, True])) == 2
    with pytest.raises(ContractViolation):
        VectorFamily(np.zeros((3, 2)), labels=("a",))
