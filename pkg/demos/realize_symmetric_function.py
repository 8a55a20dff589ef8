"""Realize a symmetric nc function through the map S.

A random swap-equivariant unitary colligation defines a symmetric function
phi on the bi-ball.  From sampled values of phi and of its model alone we
recover a unitary U and a contractive colligation p, then check that
phi(x) = Theta_p(S(x)) at points that were never used for fitting.
"""

import numpy as np

from ncsym import mat, realize, symmap

inst = realize.gen_symmetric_colligation(seed=7, k_half_dim=2)
r = realize.realize(inst.model, inst.phi)

for stage in r.stages:
    print(f"{stage.name:>12}: {stage.residual:.2e}")
print(f"||p|| = {r.p.norm():.6f}, U unitary: {r.u_unitary}")

x = inst.model.holdout[0]
via_fejer = realize.phi_eval(r, symmap.s_map(x).series)
print(f"held-out level-{x.level} point: |phi - Theta_p(S(x))| = "
      f"{mat.op_norm(via_fejer - inst.phi(x)):.2e}")
print(f"swap symmetry of phi there: "
      f"{mat.op_norm(inst.phi(x) - inst.phi(x.swapped())):.2e}")
print("worst held-out error:", f"{realize.verify_factorization(r, inst.phi, inst.model.holdout):.2e}")
np.set_printoptions(precision=3, suppress=True)
print("constant term p11 =", r.p.p11.ravel())
