"""Recover a unitary from two families with equal Gram matrices.

If <p_a, p_b> = <q_a, q_b> for all a, b then some isometry sends each
p_a to q_a.  A planted unitary is recovered on the span of the p's, and a
small perturbation of the q's is detected as a Gram mismatch.
"""

import numpy as np

from ncsym import lurking, mat
from ncsym.errors import GramMismatchError

rng = mat.make_rng(11)
j0 = mat.random_unitary(rng, 5)
p = mat.random_gaussian(rng, 5, 3)
sol = lurking.solve(lurking.VectorFamily(p), lurking.VectorFamily(j0 @ p),
                     pad_to_unitary=True)
print(f"recovery error on the family: {np.max(np.abs(sol.J @ p - j0 @ p)):.2e}")
print(f"solution unitary: {sol.unitary}")

try:
    lurking.solve(lurking.VectorFamily(p),
                  lurking.VectorFamily(j0 @ p + mat.random_matrix_with_norm(rng, 5, 3, 1e-3)))
except GramMismatchError as exc:
    print("perturbed family rejected:", exc)
