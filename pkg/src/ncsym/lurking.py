"""Lurking isometries: partial isometries built from equal Gram matrices.

Given vectors ``p_a`` in ``K1`` and ``q_a`` in ``K2`` with
``<p_a, p_b> == <q_a, q_b>`` for all ``a, b`` there is a partial isometry
``J: K1 -> K2`` with initial space ``span{p_a}`` and ``J p_a = q_a``.

For graded functions ``f(x): C^n (x) H -> C^n (x) K`` the vectors are the
slices ``(e_k^* (x) 1_K) f(x) xi`` over levels, samples, rows ``k`` and
basis vectors ``xi``.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import mat
from .errors import ContractViolation, GramMismatchError, PaddingError

GRAM_TOL = 1e-8
RANK_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class VectorFamily:
    """Columns of ``vectors`` (shape ``ambient_dim x count``) with provenance labels."""

    vectors: np.ndarray
    labels: tuple = field(default=())

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=np.complex128)
        if v.ndim == 1:
            v = v[:, np.newaxis]
        object.__setattr__(self, "vectors", v)
        labels = tuple(self.labels) or tuple(range(v.shape[1]))
        if len(labels) != v.shape[1]:
            raise ContractViolation("one label per vector required")
        object.__setattr__(self, "labels", labels)

    @property
    def ambient_dim(self):
        return self.vectors.shape[0]

    def __len__(self):
        return self.vectors.shape[1]

    def gram(self):
        return mat.adjoint(self.vectors) @ self.vectors

    def rank(self, rtol=RANK_RTOL):
        if len(self) == 0:
            return 0
        s = np.linalg.svd(self.vectors, compute_uv=False)
        return int(np.sum(s > rtol * s[0])) if s[0] > 0 else 0

    def extend(self, other):
        return VectorFamily(np.hstack([self.vectors, other.vectors]), self.labels + other.labels)

    def subset(self, mask):
        idx = [i for i, keep in enumerate(mask) if keep]
        return VectorFamily(self.vectors[:, idx], tuple(self.labels[i] for i in idx))


def slices(value, n, k_dim, h_dim=1):
    """Columns ``(e_k^* (x) 1_K) F xi`` of an ``(n*K) x (n*h)`` matrix F."""
    value = mat.as_cmatrix(value)
    if value.shape != (n * k_dim, n * h_dim):
        raise ContractViolation(
            f"value of shape {value.shape} does not fit level {n} with K={k_dim}, H={h_dim}")
    # rows are ordered (k, a) with k the level index; regroup into k blocks
    blocks = value.reshape(n, k_dim, n * h_dim)
    return np.concatenate(list(blocks), axis=1), [(k, i) for k in range(n) for i in range(n * h_dim)]


def collect_vectors(f, samples, k_dim, h_dim=1, tag=None):
    """Gather the slice vectors of ``f`` over all sample points.

    ``f`` may be a callable or a precomputed list of values aligned with
    ``samples``.  Each level-n sample contributes ``n * n * h_dim`` vectors.
    """
    cols = []
    labels = []
    for s_id, x in enumerate(samples):
        value = f[s_id] if not callable(f) else f(x)
        n = x.level
        vecs, idx = slices(value, n, k_dim, h_dim)
        cols.append(vecs)
        labels.extend((k, i, s_id if tag is None else (tag, s_id)) for k, i in idx)
    if not cols:
        return VectorFamily(np.zeros((k_dim, 0), dtype=np.complex128), ())
    return VectorFamily(np.hstack(cols), tuple(labels))


@dataclass(frozen=True, eq=False)
class IsometrySolution:
    J: np.ndarray
    rank: int
    gram_residual: float
    unitary: bool
    residual: float  # max_a ||J p_a - q_a||

    def apply_graded(self, n):
        """``1_n (x) J``."""
        return np.kron(mat.identity(n), self.J)


def _orth_complement(basis, dim):
    """Orthonormal basis of the orthogonal complement of ``basis``'s columns."""
    if basis.shape[1] == 0:
        return mat.identity(dim)
    return scipy.linalg.null_space(mat.adjoint(basis))


def solve(pfam, qfam, pad_to_unitary=False, gram_tol=GRAM_TOL, rank_rtol=RANK_RTOL):
    """Partial isometry ``J`` with ``J p_a = q_a`` for aligned families.

    Construction: thin SVD ``P = V S W^*`` of the stacked p-vectors, the
    matching images ``M = Q W_r S_r^{-1}`` of the orthonormal basis ``V_r``,
    re-orthonormalised by polar decomposition, then ``J = polar(M) V_r^*``.
    With ``pad_to_unitary`` the orthogonal complements are matched too, which
    needs equal ambient dimensions.
    """
    if len(pfam) != len(qfam):
        raise ContractViolation(f"families differ in size: {len(pfam)} vs {len(qfam)}")
    p, q = pfam.vectors, qfam.vectors
    gp, gq = pfam.gram(), qfam.gram()
    scale = max(1.0, float(np.max(np.abs(gp))) if gp.size else 1.0)
    mismatch = mat.op_norm(gp - gq) if gp.size else 0.0
    if mismatch > gram_tol * scale:
        raise GramMismatchError(
            f"Gram matrices differ by {mismatch:.3e} (tolerance {gram_tol * scale:.1e})", mismatch)
    k1, k2 = p.shape[0], q.shape[0]
    if len(pfam) == 0:
        v_r = np.zeros((k1, 0), dtype=np.complex128)
        iso = np.zeros((k2, 0), dtype=np.complex128)
    else:
        v, s, wh = np.linalg.svd(p, full_matrices=False)
        r = int(np.sum(s > rank_rtol * s[0])) if s[0] > 0 else 0
        v_r = v[:, :r]
        m = q @ mat.adjoint(wh[:r]) / s[:r]
        if r:
            iso, _ = scipy.linalg.polar(m)
        else:
            iso = np.zeros((k2, 0), dtype=np.complex128)
    r = v_r.shape[1]
    j = iso @ mat.adjoint(v_r)
    unitary = False
    if pad_to_unitary:
        if k1 != k2:
            raise PaddingError(
                f"cannot pad to a unitary: redundant dimensions {k1 - r} and {k2 - r} differ")
        pc = _orth_complement(v_r, k1)
        qc = _orth_complement(iso, k2)
        if pc.shape[1] != qc.shape[1]:
            raise PaddingError(
                f"cannot pad to a unitary: complements of dimension {pc.shape[1]} and {qc.shape[1]}")
        j = j + qc @ mat.adjoint(pc)
        unitary = True
    residual = float(np.max(np.linalg.norm(j @ p - q, axis=0))) if len(pfam) else 0.0
    return IsometrySolution(j, r, mismatch, unitary, residual)


def projection_onto_span(vectors, rank_rtol=RANK_RTOL):
    """Orthogonal projector onto the column span (independent SVD route)."""
    u, s, _ = np.linalg.svd(np.asarray(vectors, dtype=np.complex128), full_matrices=False)
    r = int(np.sum(s > rank_rtol * s[0])) if s.size and s[0] > 0 else 0
    return u[:, :r] @ mat.adjoint(u[:, :r])
