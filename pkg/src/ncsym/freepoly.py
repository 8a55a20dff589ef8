"""Free (noncommutative) polynomials over C.

A :class:`FreePoly` in ``d`` letters is a finite map from words (tuples of
letter indices) to nonzero complex coefficients.  For ``d == 2`` the letters
print as ``z`` and ``w``; otherwise as ``x0 .. x9``.

Example
-------
>>> p = parse("z*w*z + w*z*w")
>>> p.is_symmetric()
True
>>> r = expressibility(p, [parse("z+w"), parse("z*w+w*z")], degree_bound=3)
>>> r.expressible
False
"""

import itertools
import re
from dataclasses import dataclass

import numpy as np

from . import mat
from .errors import InvalidInputError, ParseError

MAX_LETTERS = 10
EXPRESS_TOL = 1e-9


def _word_order(word):
    return (len(word), word)


class FreePoly:
    """Complex linear combination of words in ``d`` noncommuting letters."""

    __slots__ = ("d", "_terms")

    def __init__(self, d, terms=None):
        if not 1 <= d <= MAX_LETTERS:
            raise InvalidInputError(f"number of letters must be in 1..{MAX_LETTERS}, got {d}")
        self.d = d
        clean = {}
        for word, c in (terms or {}).items():
            word = tuple(int(i) for i in word)
            if any(i < 0 or i >= d for i in word):
                raise InvalidInputError(f"letter index out of range in word {word}")
            c = complex(c)
            if c != 0:
                clean[word] = clean.get(word, 0) + c
        self._terms = {w: c for w, c in sorted(clean.items(), key=lambda kv: _word_order(kv[0]))
                       if c != 0}

    # construction helpers
    @classmethod
    def constant(cls, d, c=1.0):
        return cls(d, {(): c})

    @classmethod
    def letter(cls, d, i):
        return cls(d, {(i,): 1.0})

    @classmethod
    def word(cls, d, letters, coeff=1.0):
        return cls(d, {tuple(letters): coeff})

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    @property
    def degree(self):
        return max((len(w) for w in self._terms), default=-1)

    def is_zero(self):
        return not self._terms

    def _check(self, other):
        if not isinstance(other, FreePoly):
            other = FreePoly.constant(self.d, other)
        if other.d != self.d:
            raise InvalidInputError(f"letter count mismatch: {self.d} vs {other.d}")
        return other

    def __add__(self, other):
        other = self._check(other)
        t = dict(self._terms)
        for w, c in other.items():
            t[w] = t.get(w, 0) + c
        return FreePoly(self.d, t)

    __radd__ = __add__

    def __neg__(self):
        return FreePoly(self.d, {w: -c for w, c in self.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        if not isinstance(other, FreePoly):
            return FreePoly(self.d, {w: c * complex(other) for w, c in self.items()})
        other = self._check(other)
        t = {}
        for (w1, c1), (w2, c2) in itertools.product(self.items(), other.items()):
            w = w1 + w2
            t[w] = t.get(w, 0) + c1 * c2
        return FreePoly(self.d, t)

    def __rmul__(self, other):
        return FreePoly(self.d, {w: complex(other) * c for w, c in self.items()})

    def __pow__(self, k):
        out = FreePoly.constant(self.d)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, FreePoly):
            return NotImplemented
        return self.d == other.d and self._terms == other._terms

    def __hash__(self):
        return hash((self.d, tuple(self._terms.items())))

    def allclose(self, other, atol=1e-12):
        diff = self - other
        return all(abs(c) <= atol for _, c in diff.items())

    def __call__(self, x):
        return evaluate(self, x)

    def swap(self):
        return swap(self)

    def is_symmetric(self):
        return is_symmetric(self)

    def __repr__(self):
        return f"FreePoly({self.d}, {format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)


def letter_name(d, i):
    return "zw"[i] if d == 2 else f"x{i}"


def _format_coeff(c):
    if c.imag == 0:
        r = c.real
        return repr(int(r)) if r == int(r) and abs(r) < 1e15 else repr(r)
    return f"({c.real!r},{c.imag!r})"


def format_poly(p):
    """Render ``p`` in the text grammar accepted by :func:`parse`."""
    if p.is_zero():
        return "0"
    parts = []
    for w, c in p.items():
        letters = "*".join(letter_name(p.d, i) for i in w)
        sign = "+"
        if c.imag == 0 and c.real < 0:
            sign, c = "-", -c
        if not letters:
            body = _format_coeff(c)
        elif c == 1:
            body = letters
        else:
            body = f"{_format_coeff(c)}*{letters}"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def evaluate(p, x):
    """Evaluate ``p`` at a graded point (or sequence of n x n matrices).

    Each word contributes ``coeff * X[w0] @ X[w1] @ ...``; the empty word
    contributes ``coeff * I``.
    """
    comps = tuple(x.components) if hasattr(x, "components") else tuple(x)
    if len(comps) != p.d:
        raise InvalidInputError(f"polynomial has {p.d} letters, point has {len(comps)} components")
    comps = tuple(mat.as_cmatrix(c) for c in comps)
    n = comps[0].shape[0]
    out = mat.zeros(n)
    # share prefixes: words are sorted length-then-lex, cache products by prefix
    cache = {(): mat.identity(n)}
    for w, c in p.items():
        for k in range(1, len(w) + 1):
            if w[:k] not in cache:
                cache[w[:k]] = cache[w[:k - 1]] @ comps[w[k - 1]]
        out = out + c * cache[w]
    return out


def swap(p):
    """Exchange the two letters of a 2-letter polynomial."""
    if p.d != 2:
        raise InvalidInputError("swap is only defined for two letters")
    return FreePoly(2, {tuple(1 - i for i in w): c for w, c in p.items()})


def is_symmetric(p):
    return swap(p) == p


def symmetric_word_basis(degree):
    """One symmetrized word ``w + swap(w)`` (or ``w`` if fixed) per swap orbit."""
    if degree < 0:
        raise InvalidInputError("degree must be >= 0")
    seen = set()
    basis = []
    for w in itertools.product((0, 1), repeat=degree):
        if w in seen:
            continue
        sw = tuple(1 - i for i in w)
        seen.update((w, sw))
        basis.append(FreePoly(2, {w: 1.0}) if sw == w else FreePoly(2, {w: 1.0, sw: 1.0}))
    return basis


# -- expressibility --------------------------------------------------------

@dataclass
class Expressibility:
    """Outcome of :func:`expressibility`.

    ``coefficients`` maps tuples of generator indices (an ordered product,
    ``()`` being the empty product) to the fitted coefficient.  When
    ``expressible`` is False ``residual`` is the least-squares distance from
    the target to the span of all admissible products.
    """

    expressible: bool
    residual: float
    coefficients: dict
    products: list

    def as_poly(self, generators):
        d = generators[0].d
        out = FreePoly(d)
        for idx, c in self.coefficients.items():
            term = FreePoly.constant(d)
            for i in idx:
                term = term * generators[i]
            out = out + c * term
        return out

    def to_json(self):
        return {
            "expressible": self.expressible,
            "residual": float(self.residual),
            "terms": [{"product": list(k), "coeff": [v.real, v.imag]}
                      for k, v in self.coefficients.items()],
        }


def generator_products(generators, degree_bound):
    """All ordered products of generators whose degrees sum to <= degree_bound."""
    degs = [g.degree for g in generators]
    if any(dg < 1 for dg in degs):
        raise InvalidInputError("generators must have degree >= 1")
    out = [()]
    frontier = [((), 0)]
    while frontier:
        nxt = []
        for idx, deg in frontier:
            for i, dg in enumerate(degs):
                if deg + dg <= degree_bound:
                    nxt.append((idx + (i,), deg + dg))
        out.extend(idx for idx, _ in nxt)
        frontier = nxt
    return out


def expressibility(target, generators, degree_bound, tol=EXPRESS_TOL):
    """Decide whether ``target`` is a polynomial in ``generators`` up to a degree.

    Expands every ordered generator product of total degree at most
    ``degree_bound`` into word coordinates and solves the linear system for
    the target's coefficients by least squares.
    """
    if degree_bound < target.degree:
        raise InvalidInputError(
            f"degree_bound {degree_bound} is below the target degree {target.degree}")
    if not generators:
        raise InvalidInputError("need at least one generator")
    d = target.d
    products = generator_products(generators, degree_bound)
    expanded = []
    for idx in products:
        term = FreePoly.constant(d)
        for i in idx:
            term = term * generators[i]
        expanded.append(term)
    words = sorted({w for e in expanded + [target] for w in e.terms}, key=_word_order)
    row = {w: k for k, w in enumerate(words)}
    a = np.zeros((len(words), len(products)), dtype=np.complex128)
    for j, e in enumerate(expanded):
        for w, c in e.items():
            a[row[w], j] = c
    b = np.zeros(len(words), dtype=np.complex128)
    for w, c in target.items():
        b[row[w]] = c
    coef, *_ = np.linalg.lstsq(a, b, rcond=None)
    residual = float(np.linalg.norm(a @ coef - b))
    ok = residual <= tol
    coefficients = {}
    if ok:
        for idx, c in zip(products, coef):
            c = complex(c)
            if abs(c) > tol:
                # snap float noise on integer-valued coefficients
                c = complex(round(c.real, 12), round(c.imag, 12))
                coefficients[idx] = c
    return Expressibility(ok, residual, coefficients, products)


# -- text grammar ------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<cplx>\(\s*[-+]?[0-9.]+(?:[eE][-+]?\d+)?\s*,\s*[-+]?[0-9.]+(?:[eE][-+]?\d+)?\s*\))
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)
  | (?P<letter>x\d|[zw])
  | (?P<op>[-+*−])
""", re.VERBOSE)


def _tokenize(text):
    pos, line, col0 = 0, 1, 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - col0 + 1)
        kind = m.lastgroup
        if kind == "ws":
            for k, ch in enumerate(m.group()):
                if ch == "\n":
                    line += 1
                    col0 = pos + k + 1
        else:
            val = m.group()
            if val == "−":
                val = "-"
            tokens.append((kind, val, line, pos - col0 + 1))
        pos = m.end()
    tokens.append(("end", "", line, pos - col0 + 1))
    return tokens


def parse(text, d=None):
    """Parse the polynomial text grammar.

    Terms are separated by ``+``/``-``.  A term is an optional coefficient
    (real literal or ``(re,im)``) followed by ``*``-separated letters, ``z``
    and ``w`` for two letters or ``x0``..``x9`` in general.
    """
    tokens = _tokenize(text)
    pos = 0
    terms = []
    letters_seen = set()

    def peek():
        return tokens[pos]

    def fail(msg, tok):
        raise ParseError(msg, tok[2], tok[3])

    sign = 1.0
    tok = peek()
    if tok[0] == "op" and tok[1] in "+-":
        sign = -1.0 if tok[1] == "-" else 1.0
        pos += 1
    while True:
        coeff = complex(sign)
        word = []
        tok = peek()
        if tok[0] in ("num", "cplx"):
            if tok[0] == "num":
                coeff *= float(tok[1])
            else:
                re_s, im_s = tok[1].strip("() ").split(",")
                coeff *= complex(float(re_s), float(im_s))
            pos += 1
            if peek()[0] == "op" and peek()[1] == "*":
                pos += 1
                if peek()[0] != "letter":
                    fail("expected a letter after '*'", peek())
        elif tok[0] != "letter":
            fail("expected a coefficient or letter", tok)
        while peek()[0] == "letter":
            name = peek()[1]
            idx = 0 if name == "z" else 1 if name == "w" else int(name[1:])
            letters_seen.add(name)
            word.append(idx)
            pos += 1
            if peek()[0] == "op" and peek()[1] == "*":
                pos += 1
                if peek()[0] != "letter":
                    fail("expected a letter after '*'", peek())
        terms.append((tuple(word), coeff))
        tok = peek()
        if tok[0] == "end":
            break
        if tok[0] == "op" and tok[1] in "+-":
            sign = -1.0 if tok[1] == "-" else 1.0
            pos += 1
            continue
        fail(f"unexpected token {tok[1]!r}", tok)

    zw = letters_seen & {"z", "w"}
    xs = letters_seen - {"z", "w"}
    if zw and xs:
        raise ParseError("cannot mix z/w with x0..x9 letters", 1, 1)
    if d is None:
        d = 2 if zw or not xs else max(int(s[1:]) for s in xs) + 1
    if zw and d != 2:
        raise ParseError("letters z, w require exactly two letters", 1, 1)
    try:
        return FreePoly(d, _accumulate(terms))
    except InvalidInputError as exc:
        raise ParseError(str(exc), 1, 1) from None


def _accumulate(terms):
    out = {}
    for w, c in terms:
        out[w] = out.get(w, 0) + c
    return out
