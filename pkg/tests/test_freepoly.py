import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncsym import freepoly, mat
from ncsym.errors import InvalidInputError, ParseError
from ncsym.freepoly import FreePoly, parse
from ncsym.ncfun import GradedPoint, check_direct_sums, check_similarity, check_symmetry

GENS = [parse("z + w"), parse("z*w + w*z")]


def random_poly(seed, d=2, terms=5, max_len=3):
    rng = mat.make_rng(seed)
    out = {}
    for _ in range(terms):
        length = int(rng.integers(0, max_len + 1))
        word = tuple(int(i) for i in rng.integers(0, d, size=length))
        out[word] = complex(rng.standard_normal(), rng.standard_normal())
    return FreePoly(d, out)


def random_points(seed, count, d=2):
    rng = mat.make_rng(seed)
    return [GradedPoint(tuple(mat.random_gaussian(rng, 1 + i % 3) for _ in range(d)))
            for i in range(count)]


def test_canonical_form_drops_zeros_and_orders():
    p = FreePoly(2, {(1, 0): 2.0, (0,): 1.0, (0, 1): 0.0, (): 3.0})
    assert list(p.terms) == [(), (0,), (1, 0)]
    assert p.degree == 2
    assert FreePoly(2).degree == -1
    assert (p - p).is_zero()


def test_eval_examples():
    p = parse("z + w")
    assert p(GradedPoint.of([[1]], [[2]]))[0, 0] == 3
    comm = parse("z*w - w*z")
    x = GradedPoint.of(np.diag([1.0, 2.0]), np.diag([3.0, -1.0]))
    np.testing.assert_array_equal(comm(x), np.zeros((2, 2)))


def test_eval_against_product_chain():
    x = GradedPoint.of(mat.random_gaussian(7, 2), mat.random_gaussian(8, 2))
    z, w = x
    expect = z @ w @ z + w @ z @ w
    assert mat.op_norm(parse("z*w*z + w*z*w")(x) - expect) <= 1e-13


def test_eval_arity_mismatch():
    with pytest.raises(InvalidInputError):
        parse("x0 + x1 + x2")(GradedPoint.of([[1]], [[2]]))


def test_swap_examples():
    assert swap_text("z*w") == "w*z"
    p = parse("z*w*z + w*z*w")
    assert p.swap() == p
    assert p.is_symmetric()
    assert not parse("z*w").is_symmetric()
    assert parse("z + w").is_symmetric()
    with pytest.raises(InvalidInputError):
        freepoly.swap(parse("x0 + x1 + x2"))


def swap_text(text):
    return freepoly.format_poly(parse(text).swap())


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32))
def test_swap_involution_and_eval(seed):
    p = random_poly(seed)
    assert p.swap().swap() == p
    x = random_points(seed, 1)[0]
    assert mat.op_norm(p.swap()(x) - p(x.swapped())) <= 1e-13 * (1 + mat.op_norm(p(x)))


def test_poly_eval_is_nc_function():
    p = random_poly(4)
    pts = random_points(5, 4)
    assert check_direct_sums(p, pts, tol=1e-12 * 100).passed
    assert check_similarity(p, pts, seed=1, tol=1e-9).passed


def test_symmetric_poly_passes_symmetry_and_asymmetric_fails():
    pts = random_points(6, 4)
    assert check_symmetry(parse("z*w*z + w*z*w"), pts, tol=1e-12).passed
    assert not check_symmetry(parse("z*w"), pts, tol=1e-9).passed


def test_symmetric_word_basis_small_degrees():
    assert symmetric_word_basis_text(0) == {"1"}
    assert symmetric_word_basis_text(1) == {"z + w"}
    assert symmetric_word_basis_text(2) == {"z*z + w*w", "z*w + w*z"}


def symmetric_word_basis_text(k):
    return {freepoly.format_poly(p) for p in freepoly.symmetric_word_basis(k)}


def swap_orbit_count(k):
    words = set(itertools.product((0, 1), repeat=k))
    orbits = {frozenset({w, tuple(1 - i for i in w)}) for w in words}
    return len(orbits)


@pytest.mark.parametrize("k", range(1, 9))
def test_symmetric_word_basis_orbit_count(k):
    basis = freepoly.symmetric_word_basis(k)
    # exchanging letters fixes no nonempty word, so every orbit has size 2
    assert len(basis) == swap_orbit_count(k) == 2 ** (k - 1)
    assert all(p.is_symmetric() for p in basis)
    assert len({p for p in basis}) == len(basis)


def test_expressibility_examples():
    sq = freepoly.expressibility(parse("z*z + z*w + w*z + w*w"), GENS, 2)
    assert sq.expressible and sq.residual <= 1e-12
    assert sq.as_poly(GENS) == parse("z*z + z*w + w*z + w*w")
    assert sq.coefficients == {(0, 0): 1.0}
    e2 = freepoly.expressibility(parse("z*w + w*z"), GENS, 3)
    assert e2.expressible and e2.coefficients == {(1,): 1.0}
    zwz = freepoly.expressibility(parse("z*w*z + w*z*w"), GENS, 3)
    assert not zwz.expressible and zwz.residual > 0.1
    assert zwz.residual == pytest.approx(np.sqrt(0.5), abs=1e-12)


def test_zwz_residual_exact_oracle():
    sympy = pytest.importorskip("sympy")
    z, w = sympy.symbols("z w", commutative=False)
    g1, g2 = z + w, z * w + w * z
    products = [sympy.Integer(1), g1, g1**2, g2, g1**3, g1 * g2, g2 * g1]
    target = z * w * z + w * z * w

    def coeffs(expr):
        return sympy.expand(expr).as_coefficients_dict()

    cols = [coeffs(p) for p in products]
    tcoef = coeffs(target)
    words = sorted(set().union(*cols, tcoef), key=str)
    a = sympy.Matrix([[c.get(wd, 0) for c in cols] for wd in words])
    b = sympy.Matrix([tcoef.get(wd, 0) for wd in words])
    x = (a.T * a).solve(a.T * b)
    r = b - a * x
    assert (r.T * r)[0] == sympy.Rational(1, 2)


def test_expressibility_degree_bound_below_target():
    with pytest.raises(InvalidInputError):
        freepoly.expressibility(parse("z*w*z"), GENS, 2)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32))
def test_decomposition_reevaluates(seed):
    rng = mat.make_rng(seed)
    c = rng.standard_normal(3)
    target = c[0] * GENS[0] * GENS[1] + c[1] * GENS[0] ** 2 + FreePoly.constant(2, c[2])
    res = freepoly.expressibility(target, GENS, 3)
    assert res.expressible
    rebuilt = res.as_poly(GENS)
    for x in random_points(seed, 10):
        assert mat.op_norm(rebuilt(x) - target(x)) <= 1e-9 * (1 + mat.op_norm(target(x)))


def test_parse_grammar():
    p = parse("(1,2)*z*w - 3 * w + 0.5")
    assert p == FreePoly(2, {(0, 1): 1 + 2j, (1,): -3.0, (): 0.5})
    assert parse("x0*x2 + x1").d == 3
    assert parse("z − w") == parse("z - w")
    assert parse(freepoly.format_poly(p)) == p


@pytest.mark.parametrize("text,col", [("z**w", 3), ("z + ", 5), ("z*q", 3), ("", 1)])
def test_parse_errors_carry_position(text, col):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.line == 1
    assert info.value.column == col


def test_parse_error_line_numbers():
    with pytest.raises(ParseError) as info:
        parse("z +\n w ** z")
    assert info.value.line == 2
