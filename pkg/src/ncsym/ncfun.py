"""Graded points, biball membership and sampled nc-function axiom checks.

A *graded function* here is any Python callable taking a :class:`GradedPoint`
of level ``n`` and returning a matrix.  Scalar nc-functions return ``n x n``
matrices; operator-valued ones (``L(H, K)``-valued) return
``(n*k) x (n*h)`` matrices laid out as ``C^n (x) K <- C^n (x) H`` with the
package's Kronecker convention.  Under that convention the natural
identification of ``(C^m (x) H) (+) (C^n (x) H)`` with ``C^{m+n} (x) H`` is a
plain block-diagonal embedding, so direct sums need no reshuffling.
"""

from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np

from . import mat
from .errors import ContractViolation, DomainTooTightError, InvalidInputError

DEFAULT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class GradedPoint:
    """A d-tuple of n x n matrices, i.e. a point of level n."""

    components: tuple

    def __post_init__(self):
        comps = tuple(mat.as_cmatrix(c, "component") for c in self.components)
        if not comps:
            raise InvalidInputError("a graded point needs at least one component")
        n = comps[0].shape[0]
        if n < 1:
            raise InvalidInputError("level must be >= 1")
        for c in comps:
            if c.shape != (n, n):
                raise InvalidInputError(
                    f"all components must be {n}x{n}, got {c.shape}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def of(cls, *components):
        return cls(tuple(components))

    @property
    def level(self):
        return self.components[0].shape[0]

    @property
    def d(self):
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def direct_sum(self, other):
        if other.d != self.d:
            raise InvalidInputError("direct sum of points with different arity")
        return GradedPoint(tuple(mat.direct_sum(a, b) for a, b in zip(self, other)))

    def conjugate(self, s, s_inv=None):
        """The point ``s^{-1} x s``."""
        s_inv = mat.inverse(s) if s_inv is None else s_inv
        return GradedPoint(tuple(s_inv @ c @ s for c in self))

    def swapped(self):
        if self.d != 2:
            raise InvalidInputError("swap is only defined for d == 2")
        return GradedPoint((self.components[1], self.components[0]))

    def norm(self):
        return max(mat.op_norm(c) for c in self)

    def key(self):
        """Hashable fingerprint (exact bytes) used for sample lookup."""
        return tuple(c.tobytes() for c in self) + (self.level,)

    def to_json(self):
        return {"level": self.level, "components": [mat.matrix_to_json(c) for c in self]}

    @classmethod
    def from_json(cls, obj):
        return cls(tuple(mat.matrix_from_json(c) for c in obj["components"]))


def in_biball(x):
    """True iff both components of ``x`` are strict contractions."""
    if x.d != 2:
        raise InvalidInputError("biball membership needs d == 2")
    return max(mat.op_norm(x[0]), mat.op_norm(x[1])) < 1.0


def random_biball_point(seed, n, r=0.8):
    rng = mat.make_rng(seed)
    return GradedPoint((mat.random_strict_contraction(rng, n, r),
                        mat.random_strict_contraction(rng, n, r)))


def random_point_with_norm(seed, n, norm):
    """Biball point whose larger component has operator norm exactly ``norm``."""
    rng = mat.make_rng(seed)
    a = mat.random_matrix_with_norm(rng, n, n, norm)
    b = mat.random_matrix_with_norm(rng, n, n, norm * (1.0 - rng.random()))
    return GradedPoint((a, b))


# -- property reports ------------------------------------------------------

@dataclass
class Check:
    name: str
    sample: str
    residual: float
    tol: float

    @property
    def passed(self):
        return bool(self.residual <= self.tol)

    def to_json(self):
        return {"name": self.name, "sample": self.sample,
                "residual": float(self.residual), "pass": self.passed}


@dataclass
class PropertyReport:
    checks: list = field(default_factory=list)

    @property
    def max_residual(self):
        return max((c.residual for c in self.checks), default=0.0)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def merged(self, other):
        return PropertyReport(self.checks + other.checks)

    def to_json(self):
        return {"checks": [c.to_json() for c in self.checks],
                "max_residual": float(self.max_residual)}


def _call(f, x, dims):
    out = mat.as_cmatrix(f(x), "oracle output")
    k, h = dims
    want = (x.level * k, x.level * h)
    if out.shape != want:
        raise ContractViolation(
            f"oracle returned shape {out.shape} at level {x.level}, expected {want}")
    return out


def check_direct_sums(f, samples, tol=DEFAULT_TOL, dims=(1, 1), domain=None):
    """Residuals of ``f(M (+) N) - f(M) (+) f(N)`` over all sample pairs."""
    report = PropertyReport()
    values = [_call(f, x, dims) for x in samples]
    for i, j in combinations_with_replacement(range(len(samples)), 2):
        xy = samples[i].direct_sum(samples[j])
        if domain is not None and not domain(xy):
            continue
        lhs = _call(f, xy, dims)
        res = mat.op_norm(lhs - mat.direct_sum(values[i], values[j]))
        report.checks.append(Check("direct_sum", f"({i},{j})", res, tol))
    return report


def admissible_similarity(x, seed, domain=None, eps=0.25, max_cond=4.0, retries=32):
    """Seeded ``s = I + eps*G`` with cond(s) <= max_cond and ``s^-1 x s`` in the domain."""
    rng = mat.make_rng(seed)
    g = mat.random_gaussian(rng, x.level)
    for _ in range(retries):
        s = mat.identity(x.level) + eps * g
        sv = np.linalg.svd(s, compute_uv=False)
        if sv[-1] > 0 and sv[0] / sv[-1] <= max_cond:
            if domain is None or domain(x.conjugate(s)):
                return s
        eps /= 2.0
    raise DomainTooTightError(
        f"no admissible similarity found for a level-{x.level} point after {retries} retries")


def check_similarity(f, samples, seed=0, tol=DEFAULT_TOL, dims=(1, 1), domain=None,
                     similarities=None):
    """Residuals of ``f(s^-1 M s) - (s^-1 (x) 1) f(M) (s (x) 1)``.

    ``similarities`` may supply one explicit ``s`` per sample; otherwise they
    are drawn from ``seed`` with the retry rule of :func:`admissible_similarity`.
    """
    report = PropertyReport()
    k, h = dims
    for i, x in enumerate(samples):
        if similarities is not None:
            s = mat.as_cmatrix(similarities[i])
        else:
            s = admissible_similarity(x, mat.make_rng(seed, i), domain)
        s_inv = mat.inverse(s)
        lhs = _call(f, x.conjugate(s, s_inv), dims)
        rhs = mat.kron(s_inv, mat.identity(k)) @ _call(f, x, dims) @ mat.kron(s, mat.identity(h))
        report.checks.append(Check("similarity", f"{i}", mat.op_norm(lhs - rhs), tol))
    return report


def check_symmetry(f, samples, tol=DEFAULT_TOL, dims=(1, 1)):
    """Residuals of ``f(x1, x2) - f(x2, x1)``."""
    report = PropertyReport()
    for i, x in enumerate(samples):
        res = mat.op_norm(_call(f, x, dims) - _call(f, x.swapped(), dims))
        report.checks.append(Check("symmetry", f"{i}", res, tol))
    return report


def pointwise_product(f, g):
    """The graded function ``x -> f(x) g(x)``."""
    return lambda x: f(x) @ g(x)
