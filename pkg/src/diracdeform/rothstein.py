"""
The Rothstein-Poisson super-bracket on polynomial sections.

Two independent implementations are provided:

* :func:`bracket` works in super-Darboux generators, where the only
  nonzero generator brackets are ``{q_i, r_j} = delta_ij`` and
  ``{f_a, e_b} = {e_b, f_a} = delta_ab``.  It is extended to arbitrary
  elements as a graded biderivation.
* :func:`bracket_curved` evaluates the explicit local formula in the
  canonical momenta ``p_i`` for a connection on L (covariant
  q-derivatives, momentum derivatives, a curvature correction and the
  two interior-product pairing terms).

:func:`to_darboux` and :func:`to_curved` convert between the bases via
``r_i = p_i - Gamma^b_{i a} f_a e_b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Sequence

from .superalg import (
    Element,
    GeneratorMismatch,
    GeneratorSet,
    _bits,
    _partial_index,
    merge_sign,
    wedge,
)

__all__ = [
    "ConnectionData",
    "bracket",
    "bracket_curved",
    "curvature",
    "covariant_derivative",
    "to_darboux",
    "to_curved",
]


def bracket(x: Element, y: Element) -> Element:
    """Rothstein-Poisson bracket in super-Darboux generators."""
    if x.gens != y.gens:
        raise GeneratorMismatch(f"{x.gens} vs {y.gens}")
    if x.gens.basis != "r":
        raise GeneratorMismatch("bracket() needs super-Darboux (r) elements; "
                                "use bracket_curved for the p basis")
    n, k = x.gens.n, x.gens.k
    acc: Dict = {}

    def add(mono, v):
        v = acc.get(mono, 0) + v
        if v:
            acc[mono] = v
        else:
            acc.pop(mono, None)

    for (e1, m1), c1 in x.terms.items():
        for (e2, m2), c2 in y.terms.items():
            c = c1 * c2
            # even part: d_q x d_r y - d_r x d_q y
            s = merge_sign(m1, m2)
            if s:
                mask = m1 | m2
                for i in range(n):
                    a, b = e1[i], e2[n + i]
                    if a and b:
                        ne = [u + v for u, v in zip(e1, e2)]
                        ne[i] -= 1
                        ne[n + i] -= 1
                        add((tuple(ne), mask), s * a * b * c)
                    a, b = e1[n + i], e2[i]
                    if a and b:
                        ne = [u + v for u, v in zip(e1, e2)]
                        ne[i] -= 1
                        ne[n + i] -= 1
                        add((tuple(ne), mask), -s * a * b * c)
            # odd part: right derivative of x times left derivative of y
            # with respect to dual generator pairs
            partners = ((m1 & ((1 << k) - 1)) << k) | (m1 >> k)
            common = partners & m2
            if not common:
                continue
            exps = None
            for h in _bits(common):
                g = h - k if h >= k else h + k
                gb, hb = 1 << g, 1 << h
                r1 = m1 ^ gb
                l2 = m2 ^ hb
                sgn = -1 if ((m1 >> (g + 1)).bit_count() + (m2 & (hb - 1)).bit_count()) & 1 else 1
                s2 = merge_sign(r1, l2)
                if not s2:
                    continue
                if exps is None:
                    exps = tuple(u + v for u, v in zip(e1, e2))
                add((exps, r1 | l2), sgn * s2 * c)
    return Element(x.gens, acc)


# ------------------------------------------------------------ curved basis


@dataclass(frozen=True)
class ConnectionData:
    """Christoffel symbols of a connection on L.

    ``gamma[i][a][b]`` is Gamma^b_{i a}, a polynomial in q given as an
    Element of bidegree (0, 0); ``nabla_{d/dq^i} e_a = Gamma^b_{ia} e_b``.
    """

    gamma: tuple

    def __post_init__(self):
        g = self.gamma
        n = len(g)
        if n == 0:
            return
        k = len(g[0])
        for row in g:
            if len(row) != k or any(len(col) != k for col in row):
                raise ValueError("connection coefficients must have shape (n, k, k)")
            for col in row:
                for entry in col:
                    if entry.terms and (entry.momentum_degree() > 0 or any(m for (_, m) in entry.terms)):
                        raise ValueError("connection coefficients must be polynomials in q")

    @classmethod
    def flat(cls, gens: GeneratorSet):
        z = Element.zero(gens.with_basis("p"))
        return cls(tuple(tuple(tuple(z for _ in range(gens.k)) for _ in range(gens.k))
                         for _ in range(gens.n)))

    @classmethod
    def from_table(cls, gens: GeneratorSet, table: Sequence):
        """Build from nested lists of Elements/ints indexed [i][a][b]."""
        gp = gens.with_basis("p")

        def conv(v):
            if isinstance(v, Element):
                return v.with_gens(gp)
            return Element.scalar(gp, v)

        return cls(tuple(tuple(tuple(conv(v) for v in col) for col in row) for row in table))

    def entry(self, i, a, b, gens):
        """Gamma^b_{ia} expressed over ``gens`` (either basis)."""
        return self.gamma[i][a][b].with_gens(gens)

    def is_flat(self):
        return all(not v for row in self.gamma for col in row for v in col)


def _derivation_replace(x: Element, images: Dict[int, Element]) -> Element:
    """Even derivation sending odd generator bit g to images[g]."""
    out = Element.zero(x.gens)
    for g, img in images.items():
        if not img:
            continue
        bit = 1 << g
        stripped = {}
        for (e, m), c in x.terms.items():
            if m & bit:
                before = (m & (bit - 1)).bit_count()
                stripped[(e, m ^ bit)] = -c if before & 1 else c
        if stripped:
            out = out + wedge(img, Element(x.gens, stripped))
    return out


def covariant_derivative(i: int, x: Element, conn: ConnectionData) -> Element:
    """nabla_{d/dq^i} on the p-basis: ordinary q-derivative at fixed p plus
    the induced connection on the odd generators.

    ``e_a -> Gamma^b_{ia} e_b`` and ``f_a -> -Gamma^a_{ib} f_b``.
    """
    gens = x.gens
    k = gens.k
    out = _partial_index(i, x)
    images = {}
    for a in range(k):
        img_e = Element.zero(gens)
        img_f = Element.zero(gens)
        for b in range(k):
            g_ab = conn.entry(i, a, b, gens)
            if g_ab:
                img_e = img_e + wedge(g_ab, Element.generator(gens, f"e{b + 1}"))
            g_ba = conn.entry(i, b, a, gens)
            if g_ba:
                img_f = img_f - wedge(g_ba, Element.generator(gens, f"f{b + 1}"))
        images[a] = img_e
        images[k + a] = img_f
    return out + _derivation_replace(x, images)


def curvature(conn: ConnectionData, gens: GeneratorSet):
    """Coordinate curvature R[b][a][i][j] = R^b_{a ij}:

    d_i Gamma^b_{ja} - d_j Gamma^b_{ia}
      + Gamma^b_{ic} Gamma^c_{ja} - Gamma^b_{jc} Gamma^c_{ia}
    """
    n, k = gens.n, gens.k
    gp = gens.with_basis("p")
    G = lambda i, a, b: conn.entry(i, a, b, gp)
    R = [[[[Element.zero(gp) for _ in range(n)] for _ in range(n)] for _ in range(k)] for _ in range(k)]
    for b in range(k):
        for a in range(k):
            for i in range(n):
                for j in range(n):
                    v = _partial_index(i, G(j, a, b)) - _partial_index(j, G(i, a, b))
                    for c in range(k):
                        v = v + wedge(G(i, c, b), G(j, a, c)) - wedge(G(j, c, b), G(i, a, c))
                    R[b][a][i][j] = v
    return R


def _pairing_terms(x: Element, y: Element) -> Element:
    """j(e_a)x ^ i(f_a)y + j(f_a)x ^ i(e_a)y, i.e. the odd part of the
    bracket; shared between both bases."""
    k = x.gens.k
    acc: Dict = {}
    for (e1, m1), c1 in x.terms.items():
        partners = ((m1 & ((1 << k) - 1)) << k) | (m1 >> k)
        for (e2, m2), c2 in y.terms.items():
            common = partners & m2
            if not common:
                continue
            exps = tuple(u + v for u, v in zip(e1, e2))
            for h in _bits(common):
                g = h - k if h >= k else h + k
                r1 = m1 ^ (1 << g)
                l2 = m2 ^ (1 << h)
                sgn = -1 if ((m1 >> (g + 1)).bit_count() + (m2 & ((1 << h) - 1)).bit_count()) & 1 else 1
                s2 = merge_sign(r1, l2)
                if s2:
                    mono = (exps, r1 | l2)
                    v = acc.get(mono, 0) + sgn * s2 * c1 * c2
                    if v:
                        acc[mono] = v
                    else:
                        acc.pop(mono, None)
    return Element(x.gens, acc)


def bracket_curved(x: Element, y: Element, conn: ConnectionData) -> Element:
    """Rothstein-Poisson bracket in the canonical momenta p_i:

        nabla_i x ^ d_{p_i} y - d_{p_i} x ^ nabla_i y
        + R^a_{b ij} e_a f_b ^ d_{p_i} x ^ d_{p_j} y
        + j(e_a) x ^ i(f_a) y + j(f_a) x ^ i(e_a) y
    """
    if x.gens != y.gens:
        raise GeneratorMismatch(f"{x.gens} vs {y.gens}")
    if x.gens.basis != "p":
        raise GeneratorMismatch("bracket_curved() needs p-basis elements")
    gens = x.gens
    n, k = gens.n, gens.k
    out = _pairing_terms(x, y)
    dpx = [_partial_index(n + i, x) for i in range(n)]
    dpy = [_partial_index(n + i, y) for i in range(n)]
    for i in range(n):
        if dpy[i]:
            out = out + wedge(covariant_derivative(i, x, conn), dpy[i])
        if dpx[i]:
            out = out - wedge(dpx[i], covariant_derivative(i, y, conn))
    if conn.is_flat():
        return out
    R = curvature(conn, gens)
    for i in range(n):
        for j in range(n):
            if not dpx[i] or not dpy[j]:
                continue
            form = Element.zero(gens)
            for a in range(k):
                for b in range(k):
                    r = R[a][b][i][j]
                    if r:
                        form = form + wedge(r.with_gens(gens), wedge(
                            Element.generator(gens, f"e{a + 1}"),
                            Element.generator(gens, f"f{b + 1}")))
            if form:
                out = out + wedge(form, wedge(dpx[i], dpy[j]))
    return out


def _momentum_shift(gens_from: GeneratorSet, gens_to: GeneratorSet, conn, sign):
    """Images of the momenta: m_i -> m'_i + sign * Gamma^b_{ia} f_a e_b."""
    n, k = gens_from.n, gens_from.k
    images = []
    for i in range(n):
        img = Element.generator(gens_to, f"{gens_to.basis}{i + 1}")
        for a in range(k):
            fa = Element.generator(gens_to, f"f{a + 1}")
            for b in range(k):
                g = conn.entry(i, a, b, gens_to)
                if g:
                    img = img + wedge(g, wedge(fa, Element.generator(gens_to, f"e{b + 1}"))).scale(sign)
        images.append(img)
    return images


def _substitute_momenta(x: Element, gens_to: GeneratorSet, images) -> Element:
    n = x.gens.n
    zero_mom = (0,) * n
    cache: Dict = {}

    def power(i, e):
        key = (i, e)
        if key not in cache:
            cache[key] = images[i] ** e
        return cache[key]

    out = Element.zero(gens_to)
    for (exps, mask), c in x.terms.items():
        base = Element(gens_to, {(exps[:n] + zero_mom, mask): c})
        factor = None
        for i in range(n):
            if exps[n + i]:
                p = power(i, exps[n + i])
                factor = p if factor is None else wedge(factor, p)
        # momentum images are even, so the order of factors is irrelevant
        out = out + (base if factor is None else wedge(factor, base))
    return out


def to_darboux(x: Element, conn: ConnectionData) -> Element:
    """p-basis element rewritten in r: p_i = r_i + Gamma^b_{ia} f_a e_b."""
    if x.gens.basis != "p":
        raise GeneratorMismatch("to_darboux expects a p-basis element")
    target = x.gens.with_basis("r")
    return _substitute_momenta(x, target, _momentum_shift(x.gens, target, conn, +1))


def to_curved(x: Element, conn: ConnectionData) -> Element:
    """r-basis element rewritten in p: r_i = p_i - Gamma^b_{ia} f_a e_b."""
    if x.gens.basis != "r":
        raise GeneratorMismatch("to_curved expects an r-basis element")
    target = x.gens.with_basis("p")
    return _substitute_momenta(x, target, _momentum_shift(x.gens, target, conn, -1))
