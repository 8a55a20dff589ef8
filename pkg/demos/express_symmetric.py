"""Which symmetric polynomials are polynomials in z + w and zw + wz?

In commuting variables every symmetric polynomial is.  With noncommuting
z, w the word sum zwz + wzw is symmetric but is not, and the least-squares
residual against all products of the generators measures by how much.
"""

from ncsym import freepoly

gens = [freepoly.parse("z + w"), freepoly.parse("z*w + w*z")]
for text in ["z*w + w*z", "z*z + w*w", "z*w*z + w*z*w", "z*z*z + w*w*w"]:
    res = freepoly.expressibility(freepoly.parse(text), gens, 3)
    verdict = "expressible" if res.expressible else "NOT expressible"
    print(f"{text:>16}: {verdict:<16} residual {res.residual:.3e}")

print("\nsymmetric basis of degree 3:")
for p in freepoly.symmetric_word_basis(3):
    print("   ", freepoly.format_poly(p))
