"""Linear fractional transformations and the Redheffer star product.

A :class:`Colligation` ``p = [[p11, p12], [p21, p22]]`` maps
``K1 (+) H2 -> H1 (+) K2``; the block shapes are

    p11: h1 x k1    p12: h1 x h2
    p21: k2 x k1    p22: k2 x h2

Lower map:  F_l(X) = p22 + p21 X (1 - p11 X)^{-1} p12,   X: k1 x h1
Upper map:  F_u(X) = p11 + p12 X (1 - p22 X)^{-1} p21,   X: h2 x k2
"""

from dataclasses import dataclass

import numpy as np

from . import mat
from .errors import InvalidInputError

CONTRACTION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Colligation:
    p11: np.ndarray
    p12: np.ndarray
    p21: np.ndarray
    p22: np.ndarray

    def __post_init__(self):
        blocks = [mat.as_cmatrix(b, name) for b, name in
                  ((self.p11, "p11"), (self.p12, "p12"), (self.p21, "p21"), (self.p22, "p22"))]
        p11, p12, p21, p22 = blocks
        if p11.shape[0] != p12.shape[0] or p21.shape[0] != p22.shape[0] \
                or p11.shape[1] != p21.shape[1] or p12.shape[1] != p22.shape[1]:
            raise InvalidInputError(
                "non-conformal blocks: "
                f"p11 {p11.shape}, p12 {p12.shape}, p21 {p21.shape}, p22 {p22.shape}")
        for name, b in zip(("p11", "p12", "p21", "p22"), blocks):
            object.__setattr__(self, name, b)

    @classmethod
    def from_matrix(cls, p, h1, k1):
        """Split an assembled matrix after ``h1`` rows and ``k1`` columns."""
        p = mat.as_cmatrix(p)
        return cls(p[:h1, :k1], p[:h1, k1:], p[h1:, :k1], p[h1:, k1:])

    @property
    def dims(self):
        """``(h1, k1, h2, k2)``."""
        return (self.p11.shape[0], self.p11.shape[1], self.p12.shape[1], self.p21.shape[0])

    @property
    def matrix(self):
        return np.block([[self.p11, self.p12], [self.p21, self.p22]])

    def norm(self):
        return mat.op_norm(self.matrix)

    def is_contraction(self, tol=CONTRACTION_TOL):
        return self.norm() <= 1.0 + tol

    def block_transpose(self):
        """Exchange 11 <-> 22 and 12 <-> 21, turning upper maps into lower ones."""
        return Colligation(self.p22, self.p21, self.p12, self.p11)

    def graded(self, n):
        """The colligation ``1_n (x) p`` (each block tensored with ``I_n``)."""
        i = mat.identity(n)
        return Colligation(np.kron(i, self.p11), np.kron(i, self.p12),
                           np.kron(i, self.p21), np.kron(i, self.p22))

    def to_json(self):
        return {"dims": list(self.dims),
                "p11": mat.matrix_to_json(self.p11), "p12": mat.matrix_to_json(self.p12),
                "p21": mat.matrix_to_json(self.p21), "p22": mat.matrix_to_json(self.p22)}

    @classmethod
    def from_json(cls, obj):
        col = cls(*(mat.matrix_from_json(obj[k]) for k in ("p11", "p12", "p21", "p22")))
        if "dims" in obj and tuple(obj["dims"]) != col.dims:
            raise InvalidInputError(f"dims {obj['dims']} disagree with block shapes {col.dims}")
        return col


def _check_shape(x, shape, what):
    x = mat.as_cmatrix(x)
    if x.shape != shape:
        raise InvalidInputError(f"{what}: argument has shape {x.shape}, expected {shape}")
    return x


def f_lower(p, x):
    h1, k1, h2, k2 = p.dims
    x = _check_shape(x, (k1, h1), "lower LFT")
    pencil = mat.identity(h1) - p.p11 @ x
    return p.p22 + p.p21 @ x @ mat.solve(pencil, p.p12, which="1 - p11 X")


def f_upper(p, x):
    h1, k1, h2, k2 = p.dims
    x = _check_shape(x, (h2, k2), "upper LFT")
    pencil = mat.identity(k2) - p.p22 @ x
    return p.p11 + p.p12 @ x @ mat.solve(pencil, p.p21, which="1 - p22 X")


def graded_f_upper(p, n, x):
    """``F_u`` of ``1_n (x) p`` at ``X: C^n (x) K2 -> C^n (x) H2``."""
    return f_upper(p.graded(n), x)


def graded_f_lower(p, n, x):
    return f_lower(p.graded(n), x)


def realization_sides(p, x):
    """Both sides of the identity expressing ``1 - F_l(X)^* F_l(X)``.

    Returns ``(lhs, rhs)`` where

        rhs = p12^* (1 - X^* p11^*)^{-1} (1 - X^* X) (1 - p11 X)^{-1} p12
              + [p12^* (1 - X p11^*)^{-1} X^*, 1] (1 - p^* p) [X (1 - p11 X)^{-1} p12; 1]
    """
    h1, k1, h2, k2 = p.dims
    x = _check_shape(x, (k1, h1), "realization identity")
    f = f_lower(p, x)
    lhs = mat.identity(h2) - mat.adjoint(f) @ f
    r = mat.solve(mat.identity(h1) - p.p11 @ x, p.p12, which="1 - p11 X")  # (1 - p11 X)^{-1} p12
    first = mat.adjoint(r) @ (mat.identity(h1) - mat.adjoint(x) @ x) @ r
    col = np.vstack([x @ r, mat.identity(h2)])
    big = p.matrix
    defect = mat.identity(big.shape[1]) - mat.adjoint(big) @ big
    second = mat.adjoint(col) @ defect @ col
    return lhs, first + second


def realization_residual(p, x):
    lhs, rhs = realization_sides(p, x)
    return mat.op_norm(lhs - rhs)


def redheffer(b, a):
    """Star product ``B * A`` with ``F_u(B * A) = F_u(B) o F_u(A)``.

    Requires ``A.h1 == B.h2`` and ``A.k1 == B.k2``.
    """
    bh1, bk1, bh2, bk2 = b.dims
    ah1, ak1, ah2, ak2 = a.dims
    if (ah1, ak1) != (bh2, bk2):
        raise InvalidInputError(
            f"Redheffer product needs A's outer block {(ah1, ak1)} to match B's inner {(bh2, bk2)}")
    c11 = f_upper(b, a.p11)
    c12 = b.p12 @ mat.solve(mat.identity(bh2) - a.p11 @ b.p22, a.p12, which="1 - A11 B22")
    c21 = a.p21 @ mat.solve(mat.identity(bk2) - b.p22 @ a.p11, b.p21, which="1 - B22 A11")
    c22 = f_lower(a, b.p22)
    return Colligation(c11, c12, c21, c22)


def passthrough(h, k):
    """Colligation with ``F_u(X) == X``: p11 = 0, p12 = I, p21 = I, p22 = 0."""
    return Colligation(mat.zeros(h, k), mat.identity(h), mat.identity(k), mat.zeros(k, h))


def random_colligation(seed, dims, norm=None):
    """Seeded colligation with the given ``(h1, k1, h2, k2)``.

    With ``norm`` the assembled matrix is rescaled to that operator norm.
    """
    h1, k1, h2, k2 = dims
    g = mat.random_gaussian(seed, h1 + k2, k1 + h2)
    if norm is not None:
        g = mat.scale_to_norm(g, norm)
    return Colligation.from_matrix(g, h1, k1)


def random_unitary_colligation(seed, outer, inner):
    """Unitary colligation with ``h1 == k1 == outer`` and ``h2 == k2 == inner``."""
    return Colligation.from_matrix(mat.random_unitary(seed, outer + inner), outer, outer)
