"""Numbered acceptance battery.

Each ``criterion_N(seed)`` draws its own seeded instances, measures the
relevant residuals and returns a :class:`CriterionResult`.  Reports carry
no timings, so the same seed always yields the same JSON.
"""

from dataclasses import dataclass, field

import numpy as np

from . import freepoly, funcalc, linfrac, lurking, mat, realize, symmap
from .errors import GramMismatchError
from .ncfun import (check_direct_sums, check_similarity, check_symmetry,
                    in_biball, random_biball_point, random_point_with_norm)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)

    def to_json(self):
        return {"criterion": self.number, "name": self.name, "pass": bool(self.passed),
                "measured": {k: _jsonable(v) for k, v in sorted(self.measured.items())}}

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        parts = ", ".join(f"{k}={_short(v)}" for k, v in sorted(self.measured.items()))
        return f"[{status}] criterion {self.number:2d} {self.name}: {parts}"


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    return v


def _short(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.3e}"
    return str(v)


def _rng(seed, number, *rest):
    return mat.make_rng(seed, f"criterion-{number}", *rest)


# -- 1 --------------------------------------------------------------------

def criterion_1(seed=0):
    """Symmetric word sums vs polynomials in ``z + w`` and ``zw + wz``."""
    gens = [freepoly.parse("z + w"), freepoly.parse("z*w + w*z")]
    zwz = freepoly.expressibility(freepoly.parse("z*w*z + w*z*w"), gens, 3)
    e2 = freepoly.expressibility(freepoly.parse("z*w + w*z"), gens, 3)
    sq = freepoly.expressibility(freepoly.parse("z + w") ** 2, gens, 3)
    ok = (not zwz.expressible and zwz.residual > 0.1 and e2.expressible and sq.expressible
          and e2.residual <= 1e-12 and sq.residual <= 1e-12)
    return CriterionResult(1, "inexpressible symmetric polynomial", ok, {
        "zwz+wzw_residual": zwz.residual, "zwz+wzw_expressible": zwz.expressible,
        "zw+wz_residual": e2.residual, "(z+w)^2_residual": sq.residual})


# -- 2 --------------------------------------------------------------------

def criterion_2(seed=0, count=100):
    worst = 0.0
    for i in range(count):
        rng = _rng(seed, 2, i)
        x = random_biball_point(rng, 1 + i % 8, r=0.99)
        expect = max(mat.op_norm(x[0]), mat.op_norm(x[1]))
        worst = max(worst, abs(mat.op_norm(symmap.q_mat(x)) - expect))
    return CriterionResult(2, "Q(x) norm equals max component norm", worst <= 1e-10,
                           {"max_abs_error": worst, "points": count})


# -- 3 --------------------------------------------------------------------

S_STACK_LENGTH = 12


def s_stack(x):
    """First ``S_STACK_LENGTH`` coefficients of ``S(x)`` laid out in ``C^n (x) C^N``."""
    c = symmap.s_map(x, S_STACK_LENGTH).series.coeffs
    n = x.level
    return np.transpose(c, (1, 0, 2)).reshape(n * S_STACK_LENGTH, n)


def criterion_3(seed=0, count=50):
    dims = (S_STACK_LENGTH, 1)
    ds = sim = sym = 0.0
    sup_ok = True
    sup_excess = -np.inf
    for i in range(count):
        rng = _rng(seed, 3, i)
        n1, n2 = 1 + i % 3, 1 + (i // 3) % 3
        x = random_biball_point(rng, n1, r=0.9)
        y = random_biball_point(rng, n2, r=0.9)
        ds = max(ds, check_direct_sums(s_stack, [x, y], dims=dims, domain=in_biball).max_residual)
        sim = max(sim, check_similarity(s_stack, [x], seed=rng, dims=dims,
                                        domain=in_biball).max_residual)
        sym = max(sym, check_symmetry(s_stack, [x], dims=dims).max_residual)
        bound = max(mat.op_norm(x[0]), mat.op_norm(x[1]))
        sup = symmap.sup_norm(symmap.s_map(x).series)
        sup_excess = max(sup_excess, sup - bound)
        sup_ok &= sup <= bound + 1e-8 and sup < 1.0
    ok = ds <= 1e-9 and sim <= 1e-9 and sym <= 1e-9 and sup_ok
    return CriterionResult(3, "S respects direct sums, similarities and the swap", ok, {
        "direct_sum": ds, "similarity": sim, "symmetry": sym,
        "sup_minus_maxnorm": float(sup_excess), "sup_below_one": bool(sup_ok)})


# -- 4 --------------------------------------------------------------------

def criterion_4(seed=0, count=100):
    worst = 0.0
    excess = -np.inf
    for i in range(count):
        rng = _rng(seed, 4, i)
        dims = tuple(int(d) for d in rng.integers(1, 7, size=4))
        p = linfrac.random_colligation(rng, dims, norm=1.0 - 0.5 * rng.random())
        h1, k1, h2, k2 = dims
        x = mat.random_matrix_with_norm(rng, k1, h1, 1.0 - 0.5 * rng.random())
        worst = max(worst, linfrac.realization_residual(p, x))
        excess = max(excess, mat.op_norm(linfrac.f_lower(p, x)) - p.norm())
    ok = worst <= 1e-10 and excess <= 1e-10
    return CriterionResult(4, "lower LFT realization identity and norm bound", ok,
                           {"identity_residual": worst, "norm_excess": float(excess)})


# -- 5 --------------------------------------------------------------------

def criterion_5(seed=0, count=50):
    worst = 0.0
    for i in range(count):
        rng = _rng(seed, 5, i)
        d = [int(v) for v in rng.integers(1, 5, size=6)]
        # A: (h1, k1, h2, k2); B's inner block must match A's outer block
        a = linfrac.random_colligation(rng, (d[0], d[1], d[2], d[3]), norm=0.9)
        b = linfrac.random_colligation(rng, (d[4], d[5], d[0], d[1]), norm=0.9)
        x = mat.random_matrix_with_norm(rng, d[2], d[3], 0.9)
        lhs = linfrac.f_upper(linfrac.redheffer(b, a), x)
        rhs = linfrac.f_upper(b, linfrac.f_upper(a, x))
        worst = max(worst, mat.op_norm(lhs - rhs))
    return CriterionResult(5, "Redheffer product composes upper LFTs", worst <= 1e-10,
                           {"max_residual": worst})


# -- 6 --------------------------------------------------------------------

def well_conditioned_pair(rng, n):
    z1 = 2.0 * mat.identity(n) + mat.random_matrix_with_norm(rng, n, n, 0.9)
    z2 = 2.0 * mat.identity(n) + mat.random_matrix_with_norm(rng, n, n, 0.9)
    return z1, z2


def criterion_6(seed=0, count=100):
    worst = 0.0
    for i in range(count):
        rng = _rng(seed, 6, i)
        z1, z2 = well_conditioned_pair(rng, 1 + i % 6)
        worst = max(worst, realize.matrix_identity_check(z1, z2))
    return CriterionResult(6, "harmonic-mean matrix identity", worst <= 1e-11,
                           {"max_residual": worst})


# -- 7 --------------------------------------------------------------------

def criterion_7(seed=0, count=20):
    worst = 0.0
    worst_raw = 0.0
    max_k = 0
    strict = True
    plan = funcalc.FejerPlan()
    for i in range(count):
        rng = _rng(seed, 7, i)
        n = 1 + i % 3
        x = random_point_with_norm(rng, n, 0.8 * (1.0 - 0.5 * rng.random()) if i % 2 else 0.8)
        u = mat.random_unitary(rng, 1 + i % 8)
        g = symmap.s_map(x).series
        res = funcalc.theta(g, u, plan)
        exact = funcalc.theta_closed_smap(x, u)
        worst = max(worst, mat.op_norm(res.value - exact))
        worst_raw = max(worst_raw, mat.op_norm(res.fejer_mean - exact))
        max_k = max(max_k, res.achieved_k)
        strict &= funcalc.vn_norm_check(g, u, plan).strict
    ok = worst <= 1e-6 and max_k <= 4096 and strict
    return CriterionResult(7, "Fejer functional calculus matches the closed form", ok, {
        "max_error": worst, "raw_fejer_error_at_stop": worst_raw, "max_achieved_k": max_k,
        "von_neumann_strict": bool(strict)})


# -- 8 --------------------------------------------------------------------

def criterion_8(seed=0, count=20):
    worst = 0.0
    rejected = True
    for i in range(count):
        rng = _rng(seed, 8, i)
        k = int(rng.integers(2, 9))
        m = int(rng.integers(1, k + 1))
        j0 = mat.random_unitary(rng, k)
        p = mat.random_gaussian(rng, k, m)
        q = j0 @ p
        sol = lurking.solve(lurking.VectorFamily(p), lurking.VectorFamily(q))
        worst = max(worst, float(np.max(np.linalg.norm(sol.J @ p - q, axis=0))))
        bump = mat.random_matrix_with_norm(rng, k, m, 1e-3)
        try:
            lurking.solve(lurking.VectorFamily(p), lurking.VectorFamily(q + bump))
            rejected = False
        except GramMismatchError:
            pass
    ok = worst <= 1e-9 and rejected
    return CriterionResult(8, "lurking isometry recovers planted unitaries", ok,
                           {"max_recovery_error": worst, "perturbation_rejected": bool(rejected)})


# -- 9 --------------------------------------------------------------------

PIPELINE_STAGES = ("average", "intertwine", "kernel", "colligation", "cayley")


def pipeline_run(seed, k_half_dim, levels=(1, 2, 3), tolerances=None):
    """One generated instance through the full pipeline (non-strict)."""
    inst = realize.gen_symmetric_colligation(seed, k_half_dim, levels=levels)
    r = realize.realize(inst.model, inst.phi, tolerances=tolerances, strict=False)
    fit = realize.verify_factorization(r, inst.phi, inst.model.samples)
    hold = realize.verify_factorization(r, inst.phi, inst.model.holdout)
    return inst, r, {"fit": fit, "holdout": hold}


def criterion_9(seed=0, count=20):
    worst_stage = 0.0
    worst_hold = 0.0
    worst_fit = 0.0
    for i in range(count):
        _, r, ver = pipeline_run(mat.make_rng(seed, "criterion-9", i), 1 + i % 4)
        stages = {s.name: s.residual for s in r.stages}
        worst_stage = max(worst_stage, max(stages[name] for name in PIPELINE_STAGES))
        worst_hold = max(worst_hold, ver["holdout"])
        worst_fit = max(worst_fit, ver["fit"])
    ok = worst_stage <= 1e-8 and worst_hold <= 1e-6
    return CriterionResult(9, "end-to-end realization through S", ok, {
        "max_stage_residual": worst_stage, "max_holdout_residual": worst_hold,
        "max_fit_residual": worst_fit, "instances": count})


# -- 10 -------------------------------------------------------------------

def criterion_10(seed=0, count=50):
    worst = 0.0
    for i in range(count):
        rng = _rng(seed, 10, i)
        x = random_biball_point(rng, 1 + i % 3, r=0.95)
        u = mat.random_unitary(rng, 1 + i % 8)
        worst = max(worst, realize.cayley_check(x, u))
    return CriterionResult(10, "Cayley transform of A", worst <= 1e-9, {"max_residual": worst})


# -- 11 -------------------------------------------------------------------

def criterion_11(seed=0, count=50):
    z0 = 0.3
    worst = 0.0
    for i in range(count):
        rng = _rng(seed, 11, i)
        x = random_biball_point(rng, 1 + i % 3, r=0.9)
        worst = max(worst, mat.op_norm(realize.nonuniqueness_phi0(symmap.s_map(x).series, z0)))
    scalar = realize.nonuniqueness_phi0(symmap.DiscAlgElem.scalar([0.0, 0.0, 0.5]), z0)[0, 0]
    scalar_err = abs(scalar - 0.045)
    rng = _rng(seed, 11, "direct-sum")
    g = symmap.DiscAlgElem.scalar(mat.random_gaussian(rng, 3, 1).ravel() * 0.3)
    h = symmap.DiscAlgElem.scalar(mat.random_gaussian(rng, 3, 1).ravel() * 0.3)
    joint = realize.nonuniqueness_phi0(g.direct_sum(h), z0)
    parts = mat.direct_sum(realize.nonuniqueness_phi0(g, z0), realize.nonuniqueness_phi0(h, z0))
    violation = mat.op_norm(joint - parts)
    ok = worst <= 1e-10 and scalar_err <= 1e-12 and violation >= 1e-3
    return CriterionResult(11, "second realization vanishing on the image of S", ok, {
        "max_on_image": worst, "scalar_value_error": scalar_err,
        "direct_sum_violation": violation})


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 12)}


def run(selection=None, seed=0):
    """Run the selected criteria (default: all) in numeric order."""
    chosen = sorted(CRITERIA) if selection is None else sorted(set(selection))
    return [CRITERIA[i](seed) for i in chosen]
