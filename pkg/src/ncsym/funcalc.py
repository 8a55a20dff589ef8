"""Functional calculus ``g(T) = sum_j g^j (x) T^j`` by Fejer (Cesaro) summation.

The k-th Fejer mean is the average of the first k+1 partial sums,

    h_k(T) = sum_{j<=k} (1 - j/(k+1)) g^j (x) T^j .

Fejer means of a truncated series converge only like 1/k, so besides the raw
means ``theta`` tracks the first-order Richardson extrapolant of consecutive
means, ``(k+2) h_{k+1} - (k+1) h_k``, which removes that 1/k term exactly.
(Algebraically it is the partial sum of order k+1; it tends to the Cesaro
limit whenever the series converges, which is always the case for the
finitely truncated elements used in this package.)
"""

from dataclasses import dataclass, replace

import numpy as np

from . import mat, symmap
from .errors import DomainError, PreconditionError

CONTRACTION_TOL = 1e-12


@dataclass(frozen=True)
class FejerPlan:
    """Stopping rule for the Fejer loop.

    ``accelerate`` selects whether successive Richardson-extrapolated limits
    (default) or successive raw Fejer means are compared against ``tol``.
    ``achieved_k`` is filled in on the copy returned with each result.
    """

    max_k: int = 4096
    tol: float = 1e-8
    accelerate: bool = True
    achieved_k: int = None

    def __post_init__(self):
        if self.max_k < 1:
            raise ValueError("max_k must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be > 0")


@dataclass(frozen=True, eq=False)
class ThetaResult:
    value: np.ndarray        # limit estimate returned to callers
    fejer_mean: np.ndarray   # raw h_k at the stopping order
    partial_sum: np.ndarray  # full finite sum of the stored coefficients
    exact: bool              # True when partial_sum is exact (tail_bound == 0)
    converged: bool
    plan: FejerPlan

    @property
    def achieved_k(self):
        return self.plan.achieved_k


def tensor_terms(g, t):
    """Stack of ``g^j (x) T^j`` for all stored coefficients."""
    t = mat.as_cmatrix(t)
    h = t.shape[0]
    n = g.level
    out = np.empty((g.length, n * h, n * h), dtype=np.complex128)
    power = mat.identity(h)
    for j in range(g.length):
        out[j] = np.kron(g.coeffs[j], power)
        power = power @ t
    return out


def fejer_mean(g, t, k):
    """Raw Fejer mean ``h_k(T)``."""
    terms = tensor_terms(g, t)
    j = np.arange(min(k + 1, len(terms)))
    weights = 1.0 - j / (k + 1.0)
    return np.einsum("j,jab->ab", weights, terms[:len(j)])


def theta(g, t, plan=None):
    """``g(T)`` for a contraction ``T`` on a finite-dimensional space."""
    plan = plan or FejerPlan()
    t = mat.as_cmatrix(t, "T")
    if t.shape[0] != t.shape[1]:
        raise DomainError("T must be square")
    if mat.op_norm(t) > 1.0 + CONTRACTION_TOL:
        raise DomainError(f"T must be a contraction, ||T|| = {mat.op_norm(t):.6g}")
    terms = tensor_terms(g, t)
    size = terms.shape[1]
    zero = np.zeros((size, size), dtype=np.complex128)

    def term(j):
        return terms[j] if j < len(terms) else zero

    partial = term(0).copy()    # S_k
    cumulative = partial.copy()  # sum_{r<=k} S_r
    h_prev = partial.copy()      # h_0
    limit_prev = None
    converged = False
    k = 0
    while k < plan.max_k:
        partial = partial + term(k + 1)
        cumulative = cumulative + partial
        h_next = cumulative / (k + 2.0)
        limit = (k + 2.0) * h_next - (k + 1.0) * h_prev
        # Frobenius norm bounds the operator norm, so this stop is conservative
        if plan.accelerate:
            delta = np.inf if limit_prev is None else np.linalg.norm(limit - limit_prev)
        else:
            delta = np.linalg.norm(h_next - h_prev)
        h_prev, limit_prev = h_next, limit
        k += 1
        if delta <= plan.tol:
            converged = True
            break
    value = limit_prev if plan.accelerate else h_prev
    return ThetaResult(
        value=value,
        fejer_mean=h_prev,
        partial_sum=terms.sum(axis=0),
        exact=g.tail_bound == 0.0,
        converged=converged,
        plan=replace(plan, achieved_k=k),
    )


def theta_closed_smap(x, u):
    """``u (x) 1 + (v (x) U)(1 - u (x) U)^{-1}(v (x) 1)`` for ``S(x)`` at ``U``."""
    uu, vv = symmap.uv(x)
    u = mat.as_cmatrix(u, "U")
    if mat.op_norm(u) > 1.0 + CONTRACTION_TOL:
        raise DomainError("U must be a contraction")
    one = mat.identity(u.shape[0])
    n = x.level
    inner = mat.identity(n * u.shape[0]) - np.kron(uu, u)
    return np.kron(uu, one) + np.kron(vv, u) @ mat.solve(inner, np.kron(vv, one),
                                                        which="1 - u (x) U")


@dataclass(frozen=True)
class VonNeumannCheck:
    norm: float
    strict: bool
    slack: float
    sup_norm: float
    converged: bool


def vn_norm_check(g, t, plan=None, grid_size=symmap.DEFAULT_GRID):
    """``||g(T)||`` and whether it is strictly below 1 beyond numerical slack."""
    plan = plan or FejerPlan()
    sup = symmap.sup_norm(g, grid_size)
    if sup >= 1.0:
        raise PreconditionError(f"g is not in the open unit ball: sup norm estimate {sup:.6g}")
    res = theta(g, t, plan)
    nrm = mat.op_norm(res.value)
    slack = plan.tol + g.tail_bound
    return VonNeumannCheck(nrm, bool(nrm < 1.0 - slack), slack, sup, res.converged)


def theta_similarity_residual(g, s, u, plan=None):
    """``||theta(s^-1 g s) - (s^-1 (x) 1) theta(g) (s (x) 1)||``."""
    s = mat.as_cmatrix(s)
    s_inv = mat.inverse(s)
    u = mat.as_cmatrix(u)
    one = mat.identity(u.shape[0])
    lhs = theta(g.conjugate(s, s_inv), u, plan).value
    rhs = np.kron(s_inv, one) @ theta(g, u, plan).value @ np.kron(s, one)
    return mat.op_norm(lhs - rhs)


def tensor_sum_permutation(m, n, h):
    """Permutation taking ``(C^m (x) H) (+) (C^n (x) H)`` onto ``C^{m+n} (x) H``.

    Built from the index maps; with the package's Kronecker convention it is
    the identity, which the tests pin down.
    """
    perm = np.zeros(((m + n) * h, (m + n) * h))
    for i in range(m):
        for a in range(h):
            perm[i * h + a, i * h + a] = 1.0
    for i in range(n):
        for a in range(h):
            perm[(m + i) * h + a, m * h + i * h + a] = 1.0
    return perm


theta_similarity_check = theta_similarity_residual
