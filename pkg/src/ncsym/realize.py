"""From an nc-model of a symmetric function to its realization through ``S``.

Input: a symmetric graded function ``phi`` on the biball and a sampled model
``(P, m)`` with

    1 - phi(y)^* phi(x) = m(y)^* (1 - y_P^* x_P) m(x),   x_P = x1 (x) P1 + x2 (x) P2.

Output: a unitary (or partial isometry) ``U`` on the model space and a
contraction ``p`` on ``C (+) K`` with

    phi(x) = F_u[1 (x) p]( Theta_U(S(x)) )

for every biball point.  The construction runs in stages: averaging the model
over the swap (``w``, ``w~``), a lurking isometry for ``U``, the symmetric
state ``nu``, the Cayley-type operator ``A``, a second lurking isometry for
the colligation ``T``, and finally ``p = T diag(1, -U)``.  Each stage's
identity is checked on the samples and logged.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import funcalc, linfrac, lurking, mat, symmap
from .errors import (DegenerateSpanWarning, InvalidInputError, MissingSampleError,
                     PaddingError, SingularMatrixError, StageError)
from .ncfun import GradedPoint, in_biball

STAGE_TOL = 1e-8
STAGES = ("model", "average", "intertwine", "kernel", "colligation", "cayley")
DEFAULT_TOLERANCES = {name: STAGE_TOL for name in STAGES}
SQRT_HALF = 1.0 / np.sqrt(2.0)


def memoize(f):
    """Cache a graded function by exact point (samples are revisited many times)."""
    cache = {}

    def g(x):
        key = x.key()
        if key not in cache:
            cache[key] = f(x)
        return cache[key]

    return g


# -- models ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class NcModel:
    """Sampled nc-model: projections ``P1 + P2 = 1`` on ``K`` and the map ``m``.

    ``m_oracle(x)`` returns an ``(n*K) x n`` matrix for a level-n point.
    ``samples`` must be closed under swapping the two components.
    """

    P1: np.ndarray
    P2: np.ndarray
    m_oracle: object
    samples: tuple
    holdout: tuple = ()

    def __post_init__(self):
        p1, p2 = mat.as_cmatrix(self.P1, "P1"), mat.as_cmatrix(self.P2, "P2")
        if p1.shape != p2.shape or p1.shape[0] != p1.shape[1]:
            raise InvalidInputError("P1 and P2 must be square of equal size")
        object.__setattr__(self, "P1", p1)
        object.__setattr__(self, "P2", p2)
        object.__setattr__(self, "samples", tuple(self.samples))
        object.__setattr__(self, "holdout", tuple(self.holdout))

    @property
    def model_dim(self):
        return self.P1.shape[0]

    def projection_defect(self):
        """Max deviation from idempotent, self-adjoint, complementary projections."""
        p1, p2 = self.P1, self.P2
        k = self.model_dim
        return max(mat.op_norm(p1 @ p1 - p1), mat.op_norm(p2 @ p2 - p2),
                   mat.op_norm(p1 - mat.adjoint(p1)), mat.op_norm(p2 - mat.adjoint(p2)),
                   mat.op_norm(p1 + p2 - mat.identity(k)))

    def m(self, x):
        out = mat.as_cmatrix(self.m_oracle(x), "model value")
        n, k = x.level, self.model_dim
        if out.shape != (n * k, n):
            raise InvalidInputError(f"model value has shape {out.shape}, expected {(n * k, n)}")
        return out

    def x_p(self, x):
        return np.kron(x[0], self.P1) + np.kron(x[1], self.P2)


def pad_model(model):
    """Model on ``K (+) K`` that is zero on the first copy.

    Keeps the model relation and guarantees a large redundant subspace, so
    the lurking isometries below can be completed to unitaries.
    """
    k = model.model_dim
    z = mat.zeros(k)
    p1, p2 = mat.direct_sum(z, model.P1), mat.direct_sum(z, model.P2)

    def padded(x):
        n = x.level
        m = model.m(x).reshape(n, k, n)
        out = np.concatenate([np.zeros_like(m), m], axis=1)
        return out.reshape(n * 2 * k, n)

    return NcModel(p1, p2, padded, model.samples, model.holdout)


def model_relation_sides(model, phi, x, y):
    n = x.level
    fx, fy = phi(x), phi(y)
    lhs = mat.identity(n) - mat.adjoint(fy) @ fx
    kernel = mat.identity(n * model.model_dim) - mat.adjoint(model.x_p(y)) @ model.x_p(x)
    rhs = mat.adjoint(model.m(y)) @ kernel @ model.m(x)
    return lhs, rhs


def _same_level_pairs(points):
    by_level = {}
    for x in points:
        by_level.setdefault(x.level, []).append(x)
    for group in by_level.values():
        for x in group:
            for y in group:
                yield x, y


def model_residual(model, phi, points=None):
    """Max residual of the model relation over same-level sample pairs."""
    points = model.samples if points is None else points
    worst = 0.0
    for x, y in _same_level_pairs(points):
        lhs, rhs = model_relation_sides(model, phi, x, y)
        worst = max(worst, mat.op_norm(lhs - rhs))
    return worst


def split_model(model):
    """``m^i(x) = (1_n (x) P^i) m(x)`` for i = 1, 2."""
    def part(p):
        return lambda x: np.kron(mat.identity(x.level), p) @ model.m(x)
    return part(model.P1), part(model.P2)


def split_residual(model, phi, points=None):
    """Residual of ``1 - phi(y)^* phi(x) = sum_i m^i(y)^* ((1 - y^i* x^i) (x) 1) m^i(x)``."""
    points = model.samples if points is None else points
    m1, m2 = split_model(model)
    k = model.model_dim
    worst = 0.0
    for x, y in _same_level_pairs(points):
        n = x.level
        lhs = mat.identity(n) - mat.adjoint(phi(y)) @ phi(x)
        rhs = mat.zeros(n)
        for i, mi in enumerate((m1, m2)):
            kern = np.kron(mat.identity(n) - mat.adjoint(y[i]) @ x[i], mat.identity(k))
            rhs = rhs + mat.adjoint(mi(y)) @ kern @ mi(x)
        worst = max(worst, mat.op_norm(lhs - rhs))
    return worst


class SampleTable:
    """Model values at the sample points, addressable by exact point."""

    def __init__(self, model):
        self.model = model
        self._index = {x.key(): i for i, x in enumerate(model.samples)}
        self._m = {}

    def __contains__(self, x):
        return x.key() in self._index

    def m(self, x):
        key = x.key()
        if key not in self._index:
            raise MissingSampleError(
                f"point not in the sample set (level {x.level}, ||x1||={mat.op_norm(x[0]):.6g}, "
                f"||x2||={mat.op_norm(x[1]):.6g})")
        if key not in self._m:
            self._m[key] = self.model.m(x)
        return self._m[key]


def build_w(model, table=None):
    """The swap-averaged maps ``w`` and ``w~`` on the sample set.

    ``w(x) = (1/sqrt 2) [(1 (x) P1) m(x) + (1 (x) P2) m(x~)]`` where ``x~`` is
    ``x`` with its components exchanged, and ``w~(x) = w(x~)``.
    """
    table = table or SampleTable(model)

    def w(x):
        xs = x.swapped()
        if xs not in table:
            raise MissingSampleError(
                f"swapped partner of a level-{x.level} sample is missing "
                f"(||x1||={mat.op_norm(x[0]):.6g}, ||x2||={mat.op_norm(x[1]):.6g})")
        one = mat.identity(x.level)
        return SQRT_HALF * (np.kron(one, model.P1) @ table.m(x)
                            + np.kron(one, model.P2) @ table.m(xs))

    w = memoize(w)

    def w_tilde(x):
        return w(x.swapped())

    return w, w_tilde


def average_sides(model, phi, w, w_tilde, x, y):
    """Both sides of the swap-averaged model relation."""
    n = x.level
    k = model.model_dim
    one_k = mat.identity(k)
    lhs = mat.identity(n) - mat.adjoint(phi(y)) @ phi(x)
    k1 = np.kron(mat.identity(n) - mat.adjoint(y[0]) @ x[0], one_k)
    k2 = np.kron(mat.identity(n) - mat.adjoint(y[1]) @ x[1], one_k)
    rhs = (mat.adjoint(w(y)) @ k1 @ w(x)
           + mat.adjoint(w_tilde(y)) @ k2 @ w_tilde(x))
    return lhs, rhs


# -- stage building blocks ----------------------------------------------------

def _tensor(x_comp, op):
    return np.kron(x_comp, op)


def g_map(x, w, w_tilde, k):
    """``(x1 (x) 1) w(x) - (x2 (x) 1) w~(x)``."""
    one = mat.identity(k)
    return _tensor(x[0], one) @ w(x) - _tensor(x[1], one) @ w_tilde(x)


def build_A(x, u):
    """``A(x) = (1 - x1 (x) U)^{-1} + (1 - x2 (x) U)^{-1} - 1``."""
    u = mat.as_cmatrix(u, "U")
    size = x.level * u.shape[0]
    one = mat.identity(size)
    return (mat.inverse(one - _tensor(x[0], u), which="1 - x1 (x) U")
            + mat.inverse(one - _tensor(x[1], u), which="1 - x2 (x) U") - one)


def nu_map(x, u, w):
    """``nu(x) = (1 - x1 (x) U) w(x)``."""
    size = x.level * u.shape[0]
    return (mat.identity(size) - _tensor(x[0], u)) @ w(x)


def cayley_sides(x, u):
    """``(1 + A)^{-1}(1 - A)`` and ``-(1_n (x) U) Theta_U(S(x))``."""
    u = mat.as_cmatrix(u, "U")
    a = build_A(x, u)
    one = mat.identity(a.shape[0])
    lhs = mat.solve(one + a, one - a, which="1 + A(x)")
    rhs = -np.kron(mat.identity(x.level), u) @ funcalc.theta_closed_smap(x, u)
    return lhs, rhs


def cayley_check(x, u):
    lhs, rhs = cayley_sides(x, u)
    return mat.op_norm(lhs - rhs)


def matrix_identity_sides(z1, z2):
    """``4 (Z1^-1 + Z2^-1)^-1`` and ``Z1 + Z2 - (Z1 - Z2)(Z1 + Z2)^-1 (Z1 - Z2)``."""
    z1, z2 = mat.as_cmatrix(z1, "Z1"), mat.as_cmatrix(z2, "Z2")
    i1 = mat.inverse(z1, which="Z1")
    i2 = mat.inverse(z2, which="Z2")
    s = z1 + z2
    mat.inverse(s, which="Z1 + Z2")
    lhs = 4.0 * mat.inverse(i1 + i2, which="Z1^-1 + Z2^-1")
    rhs = s - (z1 - z2) @ mat.solve(s, z1 - z2, which="Z1 + Z2")
    return lhs, rhs


def matrix_identity_check(z1, z2):
    lhs, rhs = matrix_identity_sides(z1, z2)
    return mat.op_norm(lhs - rhs)


def stack_top(top, bottom, n, k):
    """Lay out ``[top; bottom]`` from ``C^n (+) (C^n (x) K)`` as ``C^n (x) (C (+) K)``."""
    c = top.shape[1]
    out = np.concatenate([top.reshape(n, 1, c), bottom.reshape(n, k, c)], axis=1)
    return out.reshape(n * (1 + k), c)


# -- pipeline ----------------------------------------------------------------

@dataclass
class Stage:
    name: str
    residual: float
    tol: float
    note: str = ""

    @property
    def passed(self):
        return bool(self.residual <= self.tol)

    def to_json(self):
        out = {"name": self.name, "residual": float(self.residual), "tol": self.tol,
               "pass": self.passed}
        if self.note:
            out["note"] = self.note
        return out


@dataclass(frozen=True, eq=False)
class Realization:
    """``U`` on the model space and ``p = T diag(1, -U)`` on ``C (+) K``."""

    U: np.ndarray
    p: linfrac.Colligation
    T: linfrac.Colligation = None
    stages: tuple = ()
    u_unitary: bool = True
    t_unitary: bool = True

    @property
    def model_dim(self):
        return self.U.shape[0]

    def diagnostics(self):
        return [s.to_json() for s in self.stages]


def solve_U(model, table=None, pad_to_unitary=True):
    """Lurking isometry with ``w - w~ = (1 (x) U)((x1 (x) 1) w - (x2 (x) 1) w~)``."""
    table = table or SampleTable(model)
    w, wt = build_w(model, table)
    k = model.model_dim
    gs = [g_map(x, w, wt, k) for x in model.samples]
    ds = [w(x) - wt(x) for x in model.samples]
    pfam = lurking.collect_vectors(gs, model.samples, k, tag="g")
    qfam = lurking.collect_vectors(ds, model.samples, k, tag="w-w~")
    if pfam.rank() == 0:
        warnings.warn("the families defining U span nothing (are all samples diagonal?)",
                      DegenerateSpanWarning, stacklevel=2)
    try:
        return lurking.solve(pfam, qfam, pad_to_unitary=pad_to_unitary)
    except PaddingError:
        return lurking.solve(pfam, qfam, pad_to_unitary=False)


def intertwine_residual(model, u, table=None, points=None):
    """Max of ``||(1 - x1 (x) U) w(x) - (1 - x2 (x) U) w~(x)||`` on samples."""
    table = table or SampleTable(model)
    w, wt = build_w(model, table)
    worst = 0.0
    for x in (model.samples if points is None else points):
        one = mat.identity(x.level * u.shape[0])
        res = (one - _tensor(x[0], u)) @ w(x) - (one - _tensor(x[1], u)) @ wt(x)
        worst = max(worst, mat.op_norm(res))
    return worst


def nu_symmetry_residual(model, u, table=None):
    """Max of ``||nu(x1, x2) - nu(x2, x1)||`` over the (swap-closed) samples."""
    table = table or SampleTable(model)
    w, _ = build_w(model, table)
    return max((mat.op_norm(nu_map(x, u, w) - nu_map(x.swapped(), u, w))
                for x in model.samples), default=0.0)


def colligation_families(model, phi, u, table=None):
    """Value lists for the two sides of the colligation equation at every sample."""
    table = table or SampleTable(model)
    w, _ = build_w(model, table)
    k = model.model_dim
    left, right, extras = [], [], []
    for x in model.samples:
        n = x.level
        a = build_A(x, u)
        nu = nu_map(x, u, w)
        one = mat.identity(n * k)
        left.append(stack_top(mat.identity(n), SQRT_HALF * (one - a) @ nu, n, k))
        right.append(stack_top(phi(x), SQRT_HALF * (one + a) @ nu, n, k))
        extras.append((a, nu))
    return left, right, extras


def solve_T(model, phi, u, table=None, pad_to_unitary=True):
    """Contraction ``T`` on ``C (+) K`` with ``(1 (x) T) [1; (1-A)nu/sqrt2] = [phi; (1+A)nu/sqrt2]``."""
    left, right, _ = colligation_families(model, phi, u, table)
    k = model.model_dim
    pfam = lurking.collect_vectors(left, model.samples, 1 + k, tag="in")
    qfam = lurking.collect_vectors(right, model.samples, 1 + k, tag="out")
    try:
        sol = lurking.solve(pfam, qfam, pad_to_unitary=pad_to_unitary)
    except PaddingError:
        sol = lurking.solve(pfam, qfam, pad_to_unitary=False)
    return linfrac.Colligation.from_matrix(sol.J, 1, 1), sol


def assemble_realization(t, u, **kw):
    """``p = T diag(1, -U)``."""
    u = mat.as_cmatrix(u, "U")
    t_mat = t.matrix if isinstance(t, linfrac.Colligation) else mat.as_cmatrix(t)
    p = t_mat @ mat.direct_sum(mat.identity(1), -u)
    t_col = t if isinstance(t, linfrac.Colligation) else linfrac.Colligation.from_matrix(t_mat, 1, 1)
    return Realization(U=u, p=linfrac.Colligation.from_matrix(p, 1, 1), T=t_col, **kw)


def realize(model, phi, tolerances=None, pad=True, strict=True):
    """Run the full pipeline and return a :class:`Realization`.

    With ``strict`` a stage whose residual exceeds its tolerance raises
    :class:`StageError`; otherwise all stages are recorded and returned.
    """
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    phi = memoize(phi)
    stages = []

    def record(name, residual, note=""):
        st = Stage(name, float(residual), float(tol.get(name, STAGE_TOL)), note)
        stages.append(st)
        if strict and not st.passed:
            raise StageError(name, st.residual, st.tol)

    record("model", model_residual(model, phi))
    work = pad_model(model) if pad else model
    table = SampleTable(work)
    w, wt = build_w(work, table)

    worst = 0.0
    for x, y in _same_level_pairs(work.samples):
        lhs, rhs = average_sides(work, phi, w, wt, x, y)
        worst = max(worst, mat.op_norm(lhs - rhs))
    record("average", worst)

    u_sol = solve_U(work, table)
    u = u_sol.J
    record("intertwine", intertwine_residual(work, u, table),
           "" if u_sol.unitary else "U is a partial isometry (unitary completion unavailable)")

    left, right, extras = colligation_families(work, phi, u, table)
    worst = 0.0
    nus = {}
    for x, (a, nu) in zip(work.samples, extras):
        nus[x.key()] = (a, nu)
    for x, y in _same_level_pairs(work.samples):
        ax, nux = nus[x.key()]
        ay, nuy = nus[y.key()]
        lhs = mat.identity(x.level) - mat.adjoint(phi(y)) @ phi(x)
        rhs = mat.adjoint(nuy) @ (ax + mat.adjoint(ay)) @ nux
        worst = max(worst, mat.op_norm(lhs - rhs))
    record("kernel", worst)

    k = work.model_dim
    pfam = lurking.collect_vectors(left, work.samples, 1 + k, tag="in")
    qfam = lurking.collect_vectors(right, work.samples, 1 + k, tag="out")
    try:
        t_sol = lurking.solve(pfam, qfam, pad_to_unitary=True)
    except PaddingError:
        t_sol = lurking.solve(pfam, qfam, pad_to_unitary=False)
    t = linfrac.Colligation.from_matrix(t_sol.J, 1, 1)
    worst = 0.0
    for x, lv, rv in zip(work.samples, left, right):
        big = np.kron(mat.identity(x.level), t_sol.J)
        worst = max(worst, mat.op_norm(big @ lv - rv))
    record("colligation", worst)

    record("cayley", max(cayley_check(x, u) for x in work.samples))

    return assemble_realization(t, u, stages=tuple(stages),
                                u_unitary=u_sol.unitary, t_unitary=t_sol.unitary)


# -- evaluating the realization ---------------------------------------------------

def phi_eval(r, g, plan=None):
    """``Phi(g) = F_u[1_n (x) p](g(U))`` with ``g(U)`` from Fejer summation."""
    gu = funcalc.theta(g, r.U, plan).value
    return linfrac.graded_f_upper(r.p, g.level, gu)


def phi_of_point(r, x):
    """``Phi(S(x))`` using the closed form of ``Theta_U(S(x))``."""
    return linfrac.graded_f_upper(r.p, x.level, funcalc.theta_closed_smap(x, r.U))


def verify_factorization(r, phi, points):
    """Max of ``||phi(x) - Phi(S(x))||`` over ``points``."""
    worst = 0.0
    for x in points:
        if not in_biball(x):
            raise InvalidInputError("verification points must lie in the biball")
        worst = max(worst, mat.op_norm(phi(x) - phi_of_point(r, x)))
    return worst


def q_colligation(x, k):
    """``Q(x) (x) 1_K`` as a colligation with blocks ``u (x) 1`` and ``v (x) 1``."""
    u, v = symmap.uv(x)
    one = mat.identity(k)
    return linfrac.Colligation(np.kron(u, one), np.kron(v, one), np.kron(v, one), np.kron(u, one))


def redheffer_value(r, x):
    """``F_u[C(x)](1_n (x) U)`` with ``C(x) = (1_n (x) p) * (Q(x) (x) 1)``."""
    n, k = x.level, r.model_dim
    c = linfrac.redheffer(r.p.graded(n), q_colligation(x, k))
    return linfrac.f_upper(c, np.kron(mat.identity(n), r.U))


# -- synthetic instances --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GeneratedInstance:
    phi: object
    model: NcModel
    colligation: linfrac.Colligation

    def __iter__(self):
        # allows ``phi, model = gen_symmetric_colligation(...)``
        return iter((self.phi, self.model))


def swap_invariant_unitary(seed, h):
    """Unitary on ``C (+) C^h (+) C^h`` commuting with ``1 (+) sigma``.

    ``sigma`` exchanges the two ``C^h`` summands.  Built block-diagonally on
    the +1 and -1 eigenspaces of ``1 (+) sigma``.
    """
    rng = mat.make_rng(seed)
    size = 1 + 2 * h
    plus = np.zeros((size, 1 + h), dtype=np.complex128)
    minus = np.zeros((size, h), dtype=np.complex128)
    plus[0, 0] = 1.0
    for i in range(h):
        plus[1 + i, 1 + i] = plus[1 + h + i, 1 + i] = SQRT_HALF
        minus[1 + i, i] = SQRT_HALF
        minus[1 + h + i, i] = -SQRT_HALF
    v_plus = mat.random_unitary(rng, 1 + h)
    v_minus = mat.random_unitary(rng, h)
    return plus @ v_plus @ mat.adjoint(plus) + minus @ v_minus @ mat.adjoint(minus)


def swap_closed_samples(seed, levels, per_level, radius):
    rng = mat.make_rng(seed)
    out = []
    for n in levels:
        for _ in range(per_level):
            x = GradedPoint((mat.random_strict_contraction(rng, n, radius),
                             mat.random_strict_contraction(rng, n, radius)))
            out.extend([x, x.swapped()])
    return out


def gen_symmetric_colligation(seed, k_half_dim, levels=(1, 2, 3), per_level=6, holdout=4,
                              radius=0.9):
    """Symmetric test function with an exact nc-model.

    Draws a unitary colligation ``V = [[a, B], [C, D]]`` on ``C (+) H1 (+) H2``
    (``H1 = H2 = C^k``) commuting with the swap of ``H1`` and ``H2``.  Then
    ``phi(x) = F_u[1 (x) V](x_P)`` is symmetric and
    ``m(x) = (1 - (1 (x) D) x_P)^{-1} (1 (x) C)`` is an exact model.
    ``holdout`` points per level are drawn from an independent stream.
    """
    if k_half_dim < 1:
        raise InvalidInputError("k_half_dim must be >= 1")
    h = k_half_dim
    k = 2 * h
    v = linfrac.Colligation.from_matrix(swap_invariant_unitary(mat.make_rng(seed, "V"), h), 1, 1)
    p1 = mat.direct_sum(mat.identity(h), mat.zeros(h))
    p2 = mat.direct_sum(mat.zeros(h), mat.identity(h))

    def x_p(x):
        return np.kron(x[0], p1) + np.kron(x[1], p2)

    def phi(x):
        return linfrac.graded_f_upper(v, x.level, x_p(x))

    def m(x):
        n = x.level
        pencil = mat.identity(n * k) - np.kron(mat.identity(n), v.p22) @ x_p(x)
        return mat.solve(pencil, np.kron(mat.identity(n), v.p21), which="1 - D x_P")

    samples = swap_closed_samples(mat.make_rng(seed, "samples"), levels, per_level, radius)
    held = []
    hold_rng = mat.make_rng(seed, "holdout")
    for n in levels:
        for _ in range(holdout):
            held.append(GradedPoint((mat.random_strict_contraction(hold_rng, n, radius),
                                     mat.random_strict_contraction(hold_rng, n, radius))))
    return GeneratedInstance(phi, NcModel(p1, p2, m, samples, held), v)


# -- non-uniqueness ---------------------------------------------------------------

def nonuniqueness_phi0(g, z0):
    """``(det(g(z0) - g(0)) - z0^n det g'(0) / det(1 - g(0) z0)) 1_n``.

    Vanishes on the image of ``S`` although it is not the zero function;
    it does not respect direct sums.
    """
    z0 = complex(z0)
    if not 0 < abs(z0) < 1:
        raise InvalidInputError("need 0 < |z0| < 1")
    if g.length < 2:
        raise InvalidInputError("need at least two coefficients")
    n = g.level
    g0, g1 = g[0], g[1]
    pencil = mat.identity(n) - g0 * z0
    if mat.smallest_sv(pencil) <= mat.SINGULAR_RTOL * max(mat.op_norm(pencil), 1.0):
        raise SingularMatrixError("1 - g(0) z0 is singular", mat.smallest_sv(pencil), "1 - g(0) z0")
    val = np.linalg.det(g(z0) - g0) - z0**n * np.linalg.det(g1) / np.linalg.det(pencil)
    return val * mat.identity(n)


def report_json(r, verify=None):
    out = {"stages": r.diagnostics(), "p": r.p.to_json(), "U": mat.matrix_to_json(r.U),
           "u_unitary": r.u_unitary, "t_unitary": r.t_unitary}
    if verify is not None:
        out["verify"] = verify
    return out
