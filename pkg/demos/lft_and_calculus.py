"""Linear fractional maps, Redheffer products and the Fejer calculus.

Feeding one upper LFT into another is the same as a single LFT by the
Redheffer product.  The functional calculus Theta_U(g), summed with Fejer
means, is checked against its closed form on g = S(x).
"""

from ncsym import funcalc, linfrac, mat, symmap
from ncsym.ncfun import random_point_with_norm

rng = mat.make_rng(3)
a = linfrac.random_colligation(rng, (2, 2, 3, 3), norm=0.9)
b = linfrac.random_colligation(rng, (2, 2, 2, 2), norm=0.9)
x = mat.random_matrix_with_norm(rng, 3, 3, 0.9)
lhs = linfrac.f_upper(linfrac.redheffer(b, a), x)
rhs = linfrac.f_upper(b, linfrac.f_upper(a, x))
print(f"Redheffer composition error: {mat.op_norm(lhs - rhs):.2e}")

pt = random_point_with_norm(rng, 2, 0.8)
u = mat.random_unitary(rng, 4)
g = symmap.s_map(pt).series
res = funcalc.theta(g, u)
exact = funcalc.theta_closed_smap(pt, u)
print(f"Fejer terms used: {res.achieved_k}")
print(f"raw Fejer mean error:   {mat.op_norm(res.fejer_mean - exact):.2e}")
print(f"extrapolated error:     {mat.op_norm(res.value - exact):.2e}")
print(f"||Theta_U(g)|| = {mat.op_norm(exact):.4f} < 1")
