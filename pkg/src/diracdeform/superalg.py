"""
Exact term algebra for polynomial sections of the Grassmann bundle over
T*M built on L + L*.

An :class:`Element` is a finite sum of terms

    coefficient * q-monomial * momentum-monomial * odd word

with exact rational coefficients.  Even generators are the base
coordinates ``q1..qn`` and the momenta (``r1..rn`` in the super-Darboux
basis, ``p1..pn`` in the curved basis).  Odd generators are ``e1..ek``
(sections a_alpha of L) and ``f1..fk`` (sections a^alpha of L*), stored
internally as a bitmask in the canonical order

    e1 < ... < ek < f1 < ... < fk

with the reordering sign absorbed into the coefficient.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, Tuple

__all__ = [
    "GeneratorSet",
    "Element",
    "ParseError",
    "GeneratorMismatch",
    "merge_sign",
    "wedge",
    "bidegree",
    "total_degree",
    "interior_left",
    "interior_right",
    "partial",
    "parse",
    "odd_index",
    "odd_name",
]

Monomial = Tuple[Tuple[int, ...], int]


class GeneratorMismatch(ValueError):
    """Operands live over different generator sets or momentum bases."""


class ParseError(ValueError):
    def __init__(self, message, text="", pos=0):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.column = col


@dataclass(frozen=True)
class GeneratorSet:
    """Dimensions of the generator set.

    ``basis`` is ``"r"`` for super-Darboux momenta and ``"p"`` for the
    canonical (curved) momenta.
    """

    n: int
    k: int
    basis: str = "r"

    def __post_init__(self):
        if self.n < 0 or self.k < 1:
            raise ValueError(f"need n >= 0 and k >= 1, got n={self.n}, k={self.k}")
        if self.basis not in ("r", "p"):
            raise ValueError(f"unknown momentum basis {self.basis!r}")

    def with_basis(self, basis):
        return GeneratorSet(self.n, self.k, basis)

    @property
    def n_odd(self):
        return 2 * self.k


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def merge_sign(m1: int, m2: int) -> int:
    """Sign of reordering the concatenated word m1 m2 into canonical order.

    Returns 0 when the words share a generator.
    """
    if m1 & m2:
        return 0
    swaps = 0
    for j in _bits(m2):
        swaps += (m1 >> (j + 1)).bit_count()
    return -1 if swaps & 1 else 1


def odd_index(name: str, k: int) -> int:
    """Bit position of ``e<alpha>`` or ``f<alpha>`` (1-based alpha)."""
    m = re.fullmatch(r"([ef])(\d+)", name)
    if not m:
        raise ValueError(f"not an odd generator: {name!r}")
    alpha = int(m.group(2))
    if not 1 <= alpha <= k:
        raise ValueError(f"odd generator {name!r} out of range for k={k}")
    return alpha - 1 if m.group(1) == "e" else k + alpha - 1


def odd_name(index: int, k: int) -> str:
    return f"e{index + 1}" if index < k else f"f{index - k + 1}"


class Element:
    """Immutable normalized sum of terms.

    ``terms`` maps ``(exponents, mask)`` to a nonzero :class:`Fraction`,
    where ``exponents`` has length 2n (q exponents then momentum
    exponents) and ``mask`` is the canonical odd word.
    """

    __slots__ = ("gens", "terms", "_hash")

    def __init__(self, gens: GeneratorSet, terms: Dict[Monomial, Fraction] = None):
        self.gens = gens
        self.terms = {} if terms is None else terms
        self._hash = None

    @classmethod
    def from_terms(cls, gens, items: Iterable[Tuple[Monomial, object]]):
        acc: Dict[Monomial, Fraction] = {}
        for mono, c in items:
            acc[mono] = acc.get(mono, 0) + c
        return cls(gens, {m: Fraction(c) for m, c in acc.items() if c != 0})

    # constructors

    @classmethod
    def zero(cls, gens):
        return cls(gens, {})

    @classmethod
    def scalar(cls, gens, c):
        c = Fraction(c)
        if c == 0:
            return cls(gens, {})
        return cls(gens, {((0,) * (2 * gens.n), 0): c})

    @classmethod
    def one(cls, gens):
        return cls.scalar(gens, 1)

    @classmethod
    def generator(cls, gens, name: str):
        """Single generator by name: q<i>, r<i>/p<i>, e<alpha>, f<alpha>."""
        m = re.fullmatch(r"([qrpef])(\d+)", name)
        if not m:
            raise ValueError(f"unknown generator {name!r}")
        kind, idx = m.group(1), int(m.group(2))
        zero_exps = [0] * (2 * gens.n)
        if kind in "ef":
            return cls(gens, {(tuple(zero_exps), 1 << odd_index(name, gens.k)): Fraction(1)})
        if not 1 <= idx <= gens.n:
            raise ValueError(f"even generator {name!r} out of range for n={gens.n}")
        if kind == "q":
            zero_exps[idx - 1] = 1
        else:
            if kind != gens.basis:
                raise GeneratorMismatch(
                    f"momentum {name!r} does not belong to basis {gens.basis!r}")
            zero_exps[gens.n + idx - 1] = 1
        return cls(gens, {(tuple(zero_exps), 0): Fraction(1)})

    # value semantics

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.terms == Element.scalar(self.gens, other).terms
        if not isinstance(other, Element):
            return NotImplemented
        return self.gens == other.gens and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.gens, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def _check(self, other):
        if self.gens != other.gens:
            raise GeneratorMismatch(f"{self.gens} vs {other.gens}")

    def _coerce(self, other):
        if isinstance(other, Element):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Element.scalar(self.gens, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for m, c in other.terms.items():
            v = terms.get(m, 0) + c
            if v:
                terms[m] = v
            else:
                terms.pop(m, None)
        return Element(self.gens, terms)

    __radd__ = __add__

    def __neg__(self):
        return Element(self.gens, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = Fraction(c)
        if c == 0:
            return Element(self.gens, {})
        return Element(self.gens, {m: c * v for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, Element):
            return wedge(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, e):
        if not isinstance(e, int) or e < 0:
            raise ValueError("only non-negative integer powers")
        out = Element.one(self.gens)
        for _ in range(e):
            out = wedge(out, self)
        return out

    # structure

    def parity(self):
        """Grassmann parity (0/1), or None if the element mixes parities."""
        ps = {m.bit_count() & 1 for (_, m) in self.terms}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def parity_parts(self):
        """Split into (even part, odd part)."""
        even, odd = {}, {}
        for (e, m), c in self.terms.items():
            (odd if m.bit_count() & 1 else even)[(e, m)] = c
        return Element(self.gens, even), Element(self.gens, odd)

    def project(self, predicate):
        return Element(self.gens, {m: c for m, c in self.terms.items() if predicate(m)})

    def bidegree_part(self, deg):
        n, k = self.gens.n, self.gens.k
        return self.project(lambda m: _term_bidegree(m, n, k) == tuple(deg))

    def q_degree(self):
        """Maximal total q-degree over the terms (-1 for zero)."""
        n = self.gens.n
        return max((sum(e[:n]) for (e, _) in self.terms), default=-1)

    def momentum_degree(self):
        n = self.gens.n
        return max((sum(e[n:]) for (e, _) in self.terms), default=-1)

    def coefficient(self, mono: Monomial):
        return self.terms.get(mono, Fraction(0))

    def with_gens(self, gens):
        """Reinterpret the same terms over a compatible generator set."""
        if (gens.n, gens.k) != (self.gens.n, self.gens.k):
            raise GeneratorMismatch(f"{self.gens} vs {gens}")
        return Element(gens, dict(self.terms))

    def sorted_terms(self):
        k = self.gens.k
        return sorted(self.terms.items(), key=lambda t: _sort_key(t[0], k))

    def __str__(self):
        return format_element(self)

    def __repr__(self):
        return f"Element({format_element(self)!r}, n={self.gens.n}, k={self.gens.k}, basis={self.gens.basis!r})"


def _sort_key(mono, k):
    exps, mask = mono
    return (mask.bit_count(), [i for i in _bits(mask)], sum(exps), tuple(-e for e in exps))


def _term_bidegree(mono, n, k):
    exps, mask = mono
    mom = sum(exps[n:])
    low = mask & ((1 << k) - 1)
    return (mom + low.bit_count(), mom + (mask >> k).bit_count())


# ---------------------------------------------------------------- products


def wedge(x: Element, y: Element) -> Element:
    """Graded-commutative product.  Even generators commute with
    everything, odd generators anticommute."""
    x._check(y)
    acc: Dict[Monomial, Fraction] = {}
    for (e1, m1), c1 in x.terms.items():
        for (e2, m2), c2 in y.terms.items():
            s = merge_sign(m1, m2)
            if not s:
                continue
            mono = (tuple(a + b for a, b in zip(e1, e2)), m1 | m2)
            v = acc.get(mono, 0) + (c1 * c2 if s > 0 else -c1 * c2)
            if v:
                acc[mono] = v
            else:
                acc.pop(mono, None)
    return Element(x.gens, acc)


def bidegree(x: Element):
    """Common bidegree (deg_L, deg_Lstar) of all terms.

    deg_L counts momenta plus ``e`` generators, deg_Lstar counts momenta
    plus ``f`` generators.  Returns ``None`` for an inhomogeneous element
    and the string ``"every"`` for zero.
    """
    if not x.terms:
        return "every"
    n, k = x.gens.n, x.gens.k
    degs = {_term_bidegree(m, n, k) for m in x.terms}
    if len(degs) > 1:
        return None
    return degs.pop()


def total_degree(x: Element):
    """Common total degree (momenta count twice), ``None`` if mixed,
    ``"every"`` for zero."""
    if not x.terms:
        return "every"
    n = x.gens.n
    degs = {2 * sum(e[n:]) + m.bit_count() for (e, m) in x.terms}
    return degs.pop() if len(degs) == 1 else None


def _partner(g: int, k: int) -> int:
    return g + k if g < k else g - k


def _contract(g: str, x: Element, left: bool) -> Element:
    k = x.gens.k
    # contracting with f_alpha removes e_alpha and vice versa
    target = _partner(odd_index(g, k), k)
    bit = 1 << target
    acc = {}
    for (e, m), c in x.terms.items():
        if not m & bit:
            continue
        if left:
            before = (m & (bit - 1)).bit_count()
        else:
            before = (m >> (target + 1)).bit_count()
        acc[(e, m ^ bit)] = -c if before & 1 else c
    return Element(x.gens, acc)


def interior_left(g: str, x: Element) -> Element:
    """Left interior product with the odd generator named ``g``.

    ``f<a>`` contracts against ``e<a>`` and ``e<a>`` against ``f<a>``.
    This is the left derivative with respect to the partner generator.
    """
    return _contract(g, x, left=True)


def interior_right(g: str, x: Element) -> Element:
    """Interior product from the right (right derivative)."""
    return _contract(g, x, left=False)


def partial(v: str, x: Element) -> Element:
    """Formal partial derivative with respect to ``q<i>`` or the momentum
    ``r<i>``/``p<i>``."""
    m = re.fullmatch(r"([qrp])(\d+)", v)
    if not m:
        raise ValueError(f"not an even generator: {v!r}")
    n = x.gens.n
    i = int(m.group(2)) - 1
    if not 0 <= i < n:
        raise ValueError(f"{v!r} out of range for n={n}")
    if m.group(1) != "q":
        if m.group(1) != x.gens.basis:
            raise GeneratorMismatch(f"{v!r} not in basis {x.gens.basis!r}")
        i += n
    return _partial_index(i, x)


def _partial_index(i: int, x: Element) -> Element:
    acc = {}
    for (e, m), c in x.terms.items():
        if e[i]:
            ne = list(e)
            ne[i] -= 1
            acc[(tuple(ne), m)] = c * e[i]
    return Element(x.gens, acc)


# ---------------------------------------------------------------- printing


def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_element(x: Element) -> str:
    """Render in the literal grammar accepted by :func:`parse`."""
    if not x.terms:
        return "0"
    n, k = x.gens.n, x.gens.k
    mom = x.gens.basis
    pieces = []
    for (exps, mask), c in x.sorted_terms():
        factors = []
        for i in range(n):
            if exps[i]:
                factors.append(f"q{i + 1}" + (f"^{exps[i]}" if exps[i] > 1 else ""))
        for i in range(n):
            if exps[n + i]:
                factors.append(f"{mom}{i + 1}" + (f"^{exps[n + i]}" if exps[n + i] > 1 else ""))
        factors.extend(odd_name(b, k) for b in _bits(mask))
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not factors:
            body = _fmt_coeff(a)
        elif a == 1:
            body = "*".join(factors)
        else:
            body = _fmt_coeff(a) + "*" + "*".join(factors)
        pieces.append((sign, body))
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([qrpef]\d+)|(\S))")


def _tokenize(text):
    pos = 0
    out = []
    text_len = len(text)
    while pos < text_len:
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(1):
            out.append(("num", m.group(1), m.start(1)))
        elif m.group(2):
            out.append(("var", m.group(2), m.start(2)))
        elif m.group(3):
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", text, m.start(3))
            out.append(("op", ch, m.start(3)))
        pos = m.end()
    out.append(("end", "", text_len))
    return out


class _Parser:
    def __init__(self, text, gens):
        self.text = text
        self.gens = gens
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.text, tok[2])

    def parse(self):
        x = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected token {self.peek()[1]!r}")
        return x

    def expr(self):
        x = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            y = self.term()
            x = x + y if op == "+" else x - y
        return x

    def term(self):
        x = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op_tok = self.take()
            y = self.unary()
            if op_tok[1] == "*":
                x = wedge(x, y)
            else:
                const = _as_constant(y)
                if const is None:
                    self.error("division only by a nonzero rational constant", op_tok)
                if const == 0:
                    self.error("division by zero", op_tok)
                x = x.scale(1 / const)
        return x

    def unary(self):
        t = self.peek()
        if t[0] == "op" and t[1] in ("+", "-"):
            self.take()
            x = self.unary()
            return -x if t[1] == "-" else x
        return self.power()

    def power(self):
        x = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            t = self.take()
            if t[0] != "num":
                self.error("exponent must be a non-negative integer literal", t)
            x = x ** int(t[1])
        return x

    def atom(self):
        t = self.take()
        if t[0] == "num":
            return Element.scalar(self.gens, int(t[1]))
        if t[0] == "var":
            try:
                return Element.generator(self.gens, t[1])
            except ValueError as exc:
                self.error(str(exc), t)
        if t[0] == "op" and t[1] == "(":
            x = self.expr()
            if self.take()[1] != ")":
                self.error("expected ')'", self.toks[self.i - 1])
            return x
        self.error("unexpected end of input" if t[0] == "end" else f"unexpected token {t[1]!r}", t)


def _as_constant(x: Element):
    if not x.terms:
        return Fraction(0)
    if len(x.terms) == 1:
        (e, m), c = next(iter(x.terms.items()))
        if m == 0 and not any(e):
            return c
    return None


def parse(text: str, gens: GeneratorSet) -> Element:
    """Parse an element literal.

    >>> g = GeneratorSet(1, 1)
    >>> str(parse("q1*(e1 + f1) - 1/2", g))
    '-1/2 + q1*e1 + q1*f1'
    """
    return _Parser(text, gens).parse()
