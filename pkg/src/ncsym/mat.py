"""Dense complex matrix kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  This module
collects the handful of operations every other module leans on: operator
norms, direct sums, the Kronecker product convention, guarded inversion,
seeded random generation and the JSON matrix encoding.

Kronecker convention (used everywhere in the package)::

    kron(A, B)[i*rB + k, j*cB + l] == A[i, j] * B[k, l]

so in ``C^n (x) H`` the matrix level index is the *outer* index.
"""

import zlib

import numpy as np

from .errors import InvalidInputError, SingularMatrixError

SINGULAR_RTOL = 1e-12
_SEED_MASK = (1 << 64) - 1


def as_cmatrix(a, name="matrix"):
    """Coerce ``a`` to a finite 2-D complex128 array."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return arr


def identity(n):
    return np.eye(n, dtype=np.complex128)


def zeros(rows, cols=None):
    return np.zeros((rows, rows if cols is None else cols), dtype=np.complex128)


def adjoint(a):
    return np.conj(np.transpose(a))


def op_norm(a):
    """Largest singular value of ``a`` (0 for empty matrices)."""
    a = as_cmatrix(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[0])


def smallest_sv(a):
    a = as_cmatrix(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[-1])


def direct_sum(*mats):
    """Block-diagonal matrix ``diag(A, B, ...)``; empty blocks are neutral."""
    mats = [as_cmatrix(m) for m in mats]
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = np.zeros((rows, cols), dtype=np.complex128)
    r = c = 0
    for m in mats:
        out[r:r + m.shape[0], c:c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


def kron(a, b):
    # numpy's kron already uses the outer-index-first convention
    return np.kron(as_cmatrix(a), as_cmatrix(b))


def inverse(a, rtol=SINGULAR_RTOL, which=None):
    """Inverse of a square matrix, refusing numerically singular input.

    Raises :class:`SingularMatrixError` carrying the smallest singular value
    when it falls below ``rtol * op_norm(a)``.
    """
    a = as_cmatrix(a)
    if a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"cannot invert non-square matrix of shape {a.shape}")
    if a.shape[0] == 0:
        return a.copy()
    s = np.linalg.svd(a, compute_uv=False)
    if s[-1] <= rtol * s[0] or s[0] == 0.0:
        label = f" ({which})" if which else ""
        raise SingularMatrixError(
            f"matrix{label} is numerically singular: smallest singular value {s[-1]:.3e}",
            smallest_sv=float(s[-1]), which=which)
    return np.linalg.inv(a)


def solve(a, b, rtol=SINGULAR_RTOL, which=None):
    """``a^{-1} b`` with the same singularity guard as :func:`inverse`."""
    a = as_cmatrix(a)
    if a.shape[0] and a.shape[0] == a.shape[1]:
        s = np.linalg.svd(a, compute_uv=False)
        if s[-1] <= rtol * s[0] or s[0] == 0.0:
            label = f" ({which})" if which else ""
            raise SingularMatrixError(
                f"matrix{label} is numerically singular: smallest singular value {s[-1]:.3e}",
                smallest_sv=float(s[-1]), which=which)
        return np.linalg.solve(a, b)
    return inverse(a, rtol, which) @ b


def is_unitary(u, tol=1e-10):
    u = as_cmatrix(u)
    if u.shape[0] != u.shape[1]:
        return False
    return op_norm(adjoint(u) @ u - identity(u.shape[0])) <= tol


# -- random generation -------------------------------------------------------

def stream_key(name):
    """Stable integer key for a named random stream."""
    return zlib.crc32(name.encode("utf-8"))


def make_rng(seed, *stream):
    """Counter-based (Philox) generator for ``seed`` and an optional stream path.

    ``stream`` items may be ints or strings; strings are hashed with CRC32 so
    the same path always yields the same stream on every platform.
    """
    if isinstance(seed, np.random.Generator):
        if not stream:
            return seed
        seed = int(seed.integers(0, 2**63))
    key = tuple(stream_key(s) if isinstance(s, str) else int(s) & 0xFFFFFFFF for s in stream)
    ss = np.random.SeedSequence(int(seed) & _SEED_MASK, spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


def random_gaussian(seed, rows, cols=None):
    """Complex Gaussian matrix with unit-variance entries."""
    rng = make_rng(seed)
    cols = rows if cols is None else cols
    re = rng.standard_normal((rows, cols))
    im = rng.standard_normal((rows, cols))
    return (re + 1j * im) / np.sqrt(2.0)


def random_unitary(seed, n):
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    g = random_gaussian(seed, n)
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    phases = np.where(np.abs(d) > 0, d / np.abs(d), 1.0)
    return q * phases[np.newaxis, :]


def scale_to_norm(a, target):
    """Rescale ``a`` so that its operator norm is at most ``target``."""
    a = as_cmatrix(a)
    nrm = op_norm(a)
    if nrm == 0.0:
        return a
    out = a * (target / nrm)
    # rounding can overshoot by an ulp or two
    while op_norm(out) > target:
        out = out * (1.0 - 2.0**-52)
    return out


def random_strict_contraction(seed, n, r):
    """Seeded n x n matrix with operator norm ``r * rho``, ``rho`` in (0, 1]."""
    if not 0.0 < r < 1.0:
        raise InvalidInputError("r must lie in (0, 1)")
    rng = make_rng(seed)
    rho = 1.0 - rng.random()
    g = random_gaussian(rng, n)
    return scale_to_norm(g, r * rho)


def random_matrix_with_norm(seed, rows, cols, norm):
    """Seeded Gaussian matrix rescaled to operator norm exactly ``norm``."""
    g = random_gaussian(seed, rows, cols)
    return scale_to_norm(g, norm)


def random_similarity(seed, n, eps=0.25, max_cond=4.0):
    """``I + eps * G`` with condition number at most ``max_cond``.

    ``eps`` is halved until the bound holds.
    """
    rng = make_rng(seed)
    g = random_gaussian(rng, n)
    while True:
        s = identity(n) + eps * g
        sv = np.linalg.svd(s, compute_uv=False)
        if sv[-1] > 0 and sv[0] / sv[-1] <= max_cond:
            return s
        eps /= 2.0


# -- JSON encoding ---------------------------------------------------------

def matrix_to_json(a):
    a = as_cmatrix(a)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in a.ravel()],
    }


def matrix_from_json(obj):
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"bad matrix JSON: {exc}") from None
    if len(data) != rows * cols:
        raise InvalidInputError(f"matrix JSON has {len(data)} entries, expected {rows * cols}")
    flat = np.array([complex(re, im) for re, im in data], dtype=np.complex128)
    return as_cmatrix(flat.reshape(rows, cols))
