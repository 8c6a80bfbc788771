"""
Lie algebroid calculus derived from the components of Theta, and
Lie algebroid cohomology of L on degree-truncated cochain spaces.

Cochains of L are elements of bidegree (0, m): polynomials in q times
words in the ``f`` generators.  The algebra operations never truncate;
only the linear-algebra layer works in the finite spaces
``C^m_D`` = (q-monomials of degree <= D) x (m-subsets of f1..fk).

For n = 0 (point models) the results are the Chevalley-Eilenberg
cohomology of the Lie algebra L.  For n > 0 they are relative to the
truncation: a class reported as non-exact may still have a primitive of
higher polynomial degree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from . import linalg
from .courant import ThetaDecomposition, _exponent_vectors
from .rothstein import bracket
from .superalg import Element, GeneratorSet, bidegree

__all__ = [
    "NotClosedError",
    "CochainBasis",
    "LieAlgebroid",
    "CohomologyResult",
    "ExactResult",
    "check_cochain",
    "d_L",
    "d_Lstar",
    "schouten",
    "triple_bracket",
    "evaluate",
]


class NotClosedError(ValueError):
    pass


def _has_bidegree(x: Element, want_L=None, want_Ls=None):
    d = bidegree(x)
    if d == "every":
        return True
    if d is None:
        return False
    return (want_L is None or d[0] == want_L) and (want_Ls is None or d[1] == want_Ls)


def check_cochain(x: Element, m: Optional[int] = None) -> int:
    """Validate a cochain (bidegree (0, m), no momenta).  Returns m, or
    the requested m for the zero element."""
    d = bidegree(x)
    if d == "every":
        return 0 if m is None else m
    if d is None or d[0] != 0:
        raise ValueError(f"not a cochain: bidegree {d}")
    if m is not None and d[1] != m:
        raise ValueError(f"expected a {m}-cochain, got bidegree {d}")
    return d[1]


def d_L(mu: Element, eta: Element) -> Element:
    """d_L eta = {mu, eta}."""
    check_cochain(eta)
    return bracket(mu, eta)


def d_Lstar(gamma: Element, P: Element) -> Element:
    """d_{L*} P = {gamma, P} for P of bidegree (m, 0)."""
    if not _has_bidegree(P, want_Ls=0):
        raise ValueError(f"d_Lstar needs bidegree (m, 0), got {bidegree(P)}")
    return bracket(gamma, P)


def schouten(mu: Element, P: Element, Q: Element) -> Element:
    """[P, Q]_mu = {{P, mu}, Q} for multisections P, Q of L."""
    for label, X in (("P", P), ("Q", Q)):
        if not _has_bidegree(X, want_Ls=0):
            raise ValueError(f"schouten: {label} must have bidegree (p, 0), got {bidegree(X)}")
    return bracket(bracket(P, mu), Q)


def triple_bracket(phi: Element, eta1: Element, eta2: Element, eta3: Element) -> Element:
    """[eta1, eta2, eta3]_phi = {{{phi, eta1}, eta2}, eta3}."""
    if not _has_bidegree(phi, want_Ls=0):
        raise ValueError(f"phi must have bidegree (3, 0), got {bidegree(phi)}")
    for eta in (eta1, eta2, eta3):
        check_cochain(eta)
    return bracket(bracket(bracket(phi, eta1), eta2), eta3)


def evaluate(eta: Element, *sections: Element) -> Element:
    """eta(s1, ..., sm) = i_{sm} ... i_{s1} eta with i_s = {s, .}."""
    out = eta
    for s in sections:
        out = bracket(s, out)
    return out


# ------------------------------------------------------------ cochain spaces


class CochainBasis:
    """Monomial basis of C^m_D.

    Ordered lexicographically by q-exponent vector (ascending), then by
    the odd subset (lexicographic in generator index).
    """

    def __init__(self, gens: GeneratorSet, m: int, D: int):
        self.gens, self.m, self.D = gens, m, D
        n, k = gens.n, gens.k
        qmonos = sorted(e for d in range(max(D, 0) + 1) for e in _exponent_vectors(n, d))
        if D < 0:
            qmonos = []
        subsets = list(itertools.combinations(range(k), m)) if 0 <= m <= k else []
        zero_mom = (0,) * n
        self.monomials = []
        for e in qmonos:
            for sub in subsets:
                mask = 0
                for a in sub:
                    mask |= 1 << (k + a)
                self.monomials.append((tuple(e) + zero_mom, mask))
        self.index = {mono: i for i, mono in enumerate(self.monomials)}

    def __len__(self):
        return len(self.monomials)

    def element(self, i) -> Element:
        return Element(self.gens, {self.monomials[i]: Fraction(1)})

    def vector(self, x: Element) -> Dict[int, Fraction]:
        """Coordinates of x; raises KeyError if x leaves the space."""
        return {self.index[mono]: c for mono, c in x.terms.items()}

    def contains(self, x: Element) -> bool:
        return all(mono in self.index for mono in x.terms)

    def from_vector(self, v) -> Element:
        return Element(self.gens, {self.monomials[i]: Fraction(c) for i, c in v.items() if c})

    def degree_of(self, i) -> int:
        return sum(self.monomials[i][0][: self.gens.n])


@dataclass
class CohomologyResult:
    m: int
    D: int
    kernel: int
    image: int
    dim: int
    truncated: bool

    def label(self):
        return f"H^{self.m}" + (f" (truncation D={self.D})" if self.truncated else "")


@dataclass
class ExactResult:
    exact: bool
    primitive: Optional[Element]
    certificate: Optional[Dict] = None
    D: int = 0
    truncated: bool = False

    def verdict(self):
        if self.exact:
            return "exact"
        return f"not exact within truncation D={self.D}" if self.truncated else "not exact"


class LieAlgebroid:
    """The Lie algebroid L with differential d_L = {mu, .}.

    Building the context checks {mu, mu} = 0.
    """

    def __init__(self, theta: ThetaDecomposition, spec=None, check=True):
        self.theta = theta
        self.spec = spec
        self.mu, self.gamma, self.phi = theta.mu, theta.gamma, theta.phi
        self.gens = theta.mu.gens
        if check and bracket(self.mu, self.mu):
            raise ValueError("{mu, mu} != 0: L is not a Lie algebroid")
        self._matrices = {}

    @property
    def is_point(self):
        return self.gens.n == 0

    @property
    def growth(self) -> int:
        """Upper bound on the q-degree increase of d_L."""
        n = self.gens.n
        g = 0
        for (e, m), _ in self.mu.terms.items():
            qd = sum(e[:n])
            if sum(e[n:]):
                g = max(g, qd - 1)
            else:
                g = max(g, qd)
        return g

    def d(self, eta):
        return d_L(self.mu, eta)

    def basis(self, m, D) -> CochainBasis:
        return _basis(self.gens, m, D)

    def matrix(self, m, D, D_out=None):
        """Rows of the matrix of d_L : C^m_D -> C^{m+1}_{D_out}.

        Returns (rows, domain basis, codomain basis)."""
        D_out = D + self.growth if D_out is None else D_out
        key = (m, D, D_out)
        if key not in self._matrices:
            dom = self.basis(m, D)
            cod = self.basis(m + 1, D_out)
            rows: List[Dict[int, Fraction]] = [dict() for _ in range(len(cod))]
            for j in range(len(dom)):
                img = self.d(dom.element(j))
                for mono, c in img.terms.items():
                    rows[cod.index[mono]][j] = c
            self._matrices[key] = (rows, dom, cod)
        return self._matrices[key]

    def matrix_of_dL(self, m, D):
        rows, dom, cod = self.matrix(m, D)
        return rows, dom, cod

    def cohomology_dim(self, m, D=0) -> CohomologyResult:
        """(dim Z^m_D, dim B^m_D, dim H^m) with B^m_D the image of
        C^{m-1}_{D+1} intersected with C^m_D."""
        if self.is_point:
            D = 0
        rows, dom, _ = self.matrix(m, D)
        kernel = len(dom) - linalg.rank(rows, len(dom))
        image = 0
        if m >= 1:
            Dp = D if self.is_point else D + 1
            rows_in, dom_in, cod_in = self.matrix(m - 1, Dp)
            full = linalg.rank(rows_in, len(dom_in))
            high = [r for i, r in enumerate(rows_in) if cod_in.degree_of(i) > D]
            image = full - linalg.rank(high, len(dom_in))
        return CohomologyResult(m, D, kernel, image, kernel - image, not self.is_point)

    def is_exact(self, eta: Element, D=0) -> ExactResult:
        """Search a primitive beta in C^{m-1}_D with d_L beta = eta.

        Free variables of the echelon form are set to zero.  When no
        primitive exists the result carries a linear functional on the
        codomain that kills the image of d_L but not eta.
        """
        m = check_cochain(eta)
        if self.d(eta):
            raise NotClosedError("is_exact: eta is not d_L-closed")
        if self.is_point:
            D = 0
        if not eta:
            return ExactResult(True, Element.zero(self.gens), None, D, not self.is_point)
        if m == 0:
            return ExactResult(False, None, {mono: Fraction(1) for mono in list(eta.terms)[:1]},
                               D, False)
        D_out = max(D + self.growth, eta.q_degree())
        rows, dom, cod = self.matrix(m - 1, D, D_out)
        b = cod.vector(eta)
        x = linalg.solve(rows, len(dom), b)
        if x is not None:
            beta = dom.from_vector(x)
            assert self.d(beta) == eta
            return ExactResult(True, beta, None, D, not self.is_point)
        y = linalg.left_certificate(rows, len(dom), b)
        cert = {cod.monomials[i]: v for i, v in y.items()}
        return ExactResult(False, None, cert, D, not self.is_point)


@lru_cache(maxsize=256)
def _basis(gens, m, D):
    return CochainBasis(gens, m, D)
