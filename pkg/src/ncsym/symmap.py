"""The symmetrization map ``S`` from the biball into the nc-disc algebra.

For ``x = (x1, x2)`` put ``u = (x1 + x2)/2`` and ``v = (x1 - x2)/2``.  Then

    S(x) = (u, v^2, v u v, v u^2 v, ...)

whose generating function is ``u + v z (1 - u z)^{-1} v``.  Elements of the
nc-disc algebra are stored as truncated coefficient sequences together with a
certified bound on the sup-norm of the discarded tail.
"""

from dataclasses import dataclass

import numpy as np

from . import mat
from .errors import DomainError, InvalidInputError
from .ncfun import GradedPoint, in_biball

DEFAULT_TAIL_TOL = 1e-12
MAX_TRUNCATION = 512
DEFAULT_GRID = 256
# within this distance of 1 an Omega-membership verdict is not decided
MEMBERSHIP_GAP = 1e-8


@dataclass(frozen=True, eq=False)
class DiscAlgElem:
    """Truncated power series ``sum_j coeffs[j] z^j`` with n x n coefficients."""

    coeffs: np.ndarray
    tail_bound: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.ndim == 2:
            c = c[np.newaxis]
        if c.ndim != 3 or c.shape[0] < 1 or c.shape[1] != c.shape[2] or c.shape[1] < 1:
            raise InvalidInputError(f"coefficients must have shape (N, n, n), got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise InvalidInputError("coefficients must be finite")
        tb = float(self.tail_bound)
        if not np.isfinite(tb) or tb < 0:
            raise InvalidInputError("tail_bound must be finite and >= 0")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "tail_bound", tb)

    @classmethod
    def from_list(cls, coeffs, tail_bound=0.0):
        return cls(np.stack([mat.as_cmatrix(c) for c in coeffs]), tail_bound)

    @classmethod
    def scalar(cls, coeffs, tail_bound=0.0):
        return cls(np.asarray(coeffs, dtype=np.complex128).reshape(-1, 1, 1), tail_bound)

    @property
    def level(self):
        return self.coeffs.shape[1]

    @property
    def length(self):
        return self.coeffs.shape[0]

    def __getitem__(self, j):
        if j >= self.length:
            return mat.zeros(self.level)
        return self.coeffs[j]

    def __call__(self, z):
        """Value of the truncated series at ``z`` (Horner)."""
        out = mat.zeros(self.level)
        for c in self.coeffs[::-1]:
            out = out * z + c
        return out

    def values(self, zs):
        """Stacked values at many points, shape (len(zs), n, n)."""
        zs = np.asarray(zs, dtype=np.complex128)
        powers = zs[:, np.newaxis] ** np.arange(self.length)[np.newaxis, :]
        return np.einsum("kj,jab->kab", powers, self.coeffs)

    def direct_sum(self, other):
        length = max(self.length, other.length)
        coeffs = [mat.direct_sum(self[j], other[j]) for j in range(length)]
        return DiscAlgElem.from_list(coeffs, max(self.tail_bound, other.tail_bound))

    def conjugate(self, s, s_inv=None):
        """``s^{-1} g s`` coefficientwise (the tail bound scales with cond(s))."""
        s_inv = mat.inverse(s) if s_inv is None else s_inv
        coeffs = np.einsum("ab,jbc,cd->jad", s_inv, self.coeffs, s)
        return DiscAlgElem(coeffs, self.tail_bound * mat.op_norm(s) * mat.op_norm(s_inv))

    def to_json(self):
        return {"level": self.level,
                "coeffs": [mat.matrix_to_json(c) for c in self.coeffs],
                "tail_bound": self.tail_bound}

    @classmethod
    def from_json(cls, obj):
        el = cls.from_list([mat.matrix_from_json(c) for c in obj["coeffs"]], obj["tail_bound"])
        if "level" in obj and int(obj["level"]) != el.level:
            raise InvalidInputError("level field disagrees with coefficient size")
        return el


@dataclass(frozen=True, eq=False)
class SPoint:
    """The image ``S(x)`` with the pair ``(u, v)`` it was built from."""

    u: np.ndarray
    v: np.ndarray
    series: DiscAlgElem


def uv(x):
    """``u = (x1 + x2)/2``, ``v = (x1 - x2)/2``."""
    if x.d != 2:
        raise InvalidInputError("uv needs a two-component point")
    return (x[0] + x[1]) / 2.0, (x[0] - x[1]) / 2.0


def from_uv(u, v):
    return GradedPoint((u + v, u - v))


def tail_bound(u_norm, v_norm, length):
    """Sup-norm bound on ``sum_{j >= length} v u^{j-1} v z^j`` over the closed disc."""
    if v_norm == 0.0:
        return 0.0
    if u_norm >= 1.0:
        return float("inf")
    return v_norm**2 * u_norm ** (length - 1) / (1.0 - u_norm)


def default_truncation(x, tol=DEFAULT_TAIL_TOL, cap=MAX_TRUNCATION):
    """Smallest length ``N >= 2`` whose tail bound is <= tol, capped at ``cap``."""
    u, v = uv(x)
    a, b = mat.op_norm(u), mat.op_norm(v)
    if b == 0.0 or a == 0.0:
        return 2
    if a >= 1.0:
        return cap
    # b^2 a^{N-1}/(1-a) <= tol
    need = np.log(tol * (1.0 - a) / b**2) / np.log(a) + 1.0
    return int(min(cap, max(2, np.ceil(need))))


def s_map(x, N=None):
    """``S(x)`` truncated to ``N`` coefficients ``(u, v^2, vuv, ..., v u^{N-2} v)``."""
    if not in_biball(x):
        raise DomainError("S is only defined on the biball (both components strict contractions)")
    if N is None:
        N = default_truncation(x)
    if N < 2:
        raise InvalidInputError("truncation length must be >= 2")
    u, v = uv(x)
    n = x.level
    coeffs = np.empty((N, n, n), dtype=np.complex128)
    coeffs[0] = u
    left = v.copy()  # v u^{j-1}
    for j in range(1, N):
        coeffs[j] = left @ v
        left = left @ u
    tb = tail_bound(mat.op_norm(u), mat.op_norm(v), N)
    return SPoint(u, v, DiscAlgElem(coeffs, tb))


def s_gen(x, z):
    """Closed form ``u + v z (1 - u z)^{-1} v`` of the generating function."""
    if not in_biball(x):
        raise DomainError("S is only defined on the biball")
    u, v = uv(x)
    n = x.level
    return u + z * v @ mat.solve(mat.identity(n) - z * u, v, which="1 - u z")


def hadamard_block(n):
    """The unitary ``W = (1/sqrt 2) [[I, I], [I, -I]]`` of size 2n."""
    i = mat.identity(n)
    return np.block([[i, i], [i, -i]]) / np.sqrt(2.0)


def q_mat(x):
    """``Q(x) = [[u, v], [v, u]]``, equal to ``W diag(x1, x2) W``."""
    u, v = uv(x)
    return np.block([[u, v], [v, u]])


def sup_norm(g, grid_size=DEFAULT_GRID):
    """Grid estimate of ``sup_{|z|<=1} ||g(z)||`` plus the tail bound.

    By the maximum principle the supremum sits on the unit circle; a finite
    grid can under-estimate it, the added tail bound over-corrects.
    """
    if grid_size < 64:
        raise InvalidInputError("grid_size must be >= 64")
    zs = np.exp(2j * np.pi * np.arange(grid_size) / grid_size)
    vals = g.values(zs)
    norms = np.linalg.svd(vals, compute_uv=False)[:, 0]
    return float(norms.max()) + g.tail_bound


@dataclass(frozen=True)
class OmegaMembership:
    """Estimated membership of ``g`` in the open unit ball of the disc algebra.

    ``inside`` is None when the estimate lies within ``gap`` of 1 and the
    grid/tail uncertainty does not decide the strict inequality.
    """

    estimate: float
    gap: float
    inside: object


def omega_membership(g, grid_size=DEFAULT_GRID, gap=MEMBERSHIP_GAP):
    est = sup_norm(g, grid_size)
    if abs(est - 1.0) <= gap:
        return OmegaMembership(est, gap, None)
    return OmegaMembership(est, gap, est < 1.0)
