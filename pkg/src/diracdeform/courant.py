"""
Courant algebroid structures on E = L + L* from structure functions.

The generating element Theta = psi + mu + gamma + phi is assembled in
super-Darboux generators, the master equation {Theta, Theta} = 0 is
checked component by component, and the derived bracket, anchor and
D operator are exposed.  Gauge transformations are provided for the
standard model TM + T*M.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from .rothstein import ConnectionData, bracket, to_darboux
from .superalg import Element, GeneratorSet, bidegree, total_degree, wedge, _partial_index

__all__ = [
    "SpecError",
    "AlgebroidSpec",
    "ThetaDecomposition",
    "MasterReport",
    "Classification",
    "assemble_theta",
    "assemble_theta_curved",
    "verify_master",
    "derived_bracket",
    "derived_anchor",
    "D_theta",
    "pairing",
    "torsion",
    "classify",
    "gauge_transform",
    "two_form_matrix",
    "is_standard_model",
    "is_gauge_automorphism",
    "exterior_derivative_2form",
    "standard_spec",
    "poisson_spec",
]


class SpecError(ValueError):
    """Structure data violates a declared shape or symmetry."""


def _is_function(x: Element) -> bool:
    return all(m == 0 and not any(e[x.gens.n:]) for (e, m) in x.terms)


@dataclass(frozen=True)
class AlgebroidSpec:
    """Structure functions of E = L + L* in a local frame.

    Index conventions (0-based in code):

    * ``rho_L[a][i]``   = rho^i(e_a), ``rho_Lstar[a][i]`` = rho^i(f_a)
    * ``c_low[a][b][c]`` = c_{ab}^c = <[e_a, e_b], f_c>
    * ``c_up[a][b][c]``  = c^{ab}_c = <[f_a, f_b], e_c>
    * ``phi[a][b][c]``   = phi^{abc}  (Theta contains 1/6 phi^{abc} e_a e_b e_c)
    * ``psi[a][b][c]``   = psi_{abc}  (Theta contains 1/6 psi_{abc} f_a f_b f_c)

    All entries are Elements of bidegree (0, 0) over ``gens``.
    """

    gens: GeneratorSet
    rho_L: tuple
    rho_Lstar: tuple
    c_low: tuple
    c_up: tuple
    phi: tuple
    psi: tuple
    connection: Optional[ConnectionData] = None
    name: str = ""
    description: str = ""

    @property
    def n(self):
        return self.gens.n

    @property
    def k(self):
        return self.gens.k

    @classmethod
    def build(cls, n, k, rho_L=None, rho_Lstar=None, c_low=None, c_up=None,
              phi=None, psi=None, connection=None, name="", description=""):
        """Convenience constructor from (possibly sparse) tables.

        Matrices are nested lists; 3-index tables may also be dicts
        ``{(a, b, c): value}`` with 0-based indices.  Values are Elements,
        ints or Fractions.  Antisymmetric partners are *not* filled in.
        """
        gens = GeneratorSet(n, k, "r")
        zero = Element.zero(gens)

        def conv(v):
            if isinstance(v, Element):
                return v.with_gens(gens)
            return Element.scalar(gens, v)

        def mat(t):
            if t is None:
                return tuple(tuple(zero for _ in range(n)) for _ in range(k))
            return tuple(tuple(conv(v) for v in row) for row in t)

        def cube(t):
            out = [[[zero] * k for _ in range(k)] for _ in range(k)]
            if isinstance(t, dict):
                for (a, b, c), v in t.items():
                    out[a][b][c] = conv(v)
            elif t is not None:
                out = [[[conv(v) for v in col] for col in row] for row in t]
            return tuple(tuple(tuple(col) for col in row) for row in out)

        if connection is not None and not isinstance(connection, ConnectionData):
            connection = ConnectionData.from_table(gens, connection)
        spec = cls(gens, mat(rho_L), mat(rho_Lstar), cube(c_low), cube(c_up),
                   cube(phi), cube(psi), connection, name, description)
        spec.validate()
        return spec

    def validate(self):
        n, k = self.n, self.k
        for label, m in (("rho_L", self.rho_L), ("rho_Lstar", self.rho_Lstar)):
            if len(m) != k or any(len(row) != n for row in m):
                raise SpecError(f"{label} must have shape ({k}, {n})")
        for label, t in (("c_low", self.c_low), ("c_up", self.c_up),
                         ("phi", self.phi), ("psi", self.psi)):
            if len(t) != k or any(len(r) != k or any(len(c) != k for c in r) for r in t):
                raise SpecError(f"{label} must have shape ({k}, {k}, {k})")
        for label, table in (("rho_L", self.rho_L), ("rho_Lstar", self.rho_Lstar)):
            for row in table:
                for v in row:
                    if v.gens != self.gens or not _is_function(v):
                        raise SpecError(f"{label} entries must be polynomials in q")
        for label, t in (("c_low", self.c_low), ("c_up", self.c_up),
                         ("phi", self.phi), ("psi", self.psi)):
            for a, b, c in itertools.product(range(k), repeat=3):
                v = t[a][b][c]
                if v.gens != self.gens or not _is_function(v):
                    raise SpecError(f"{label} entries must be polynomials in q")
                if t[b][a][c] != -v:
                    raise SpecError(f"{label} not antisymmetric in its first two indices "
                                    f"at ({a + 1},{b + 1},{c + 1})")
                if label in ("phi", "psi") and t[a][c][b] != -v:
                    raise SpecError(f"{label} not totally antisymmetric at ({a + 1},{b + 1},{c + 1})")
        if self.connection is not None:
            g = self.connection.gamma
            if len(g) != n or any(len(r) != k or any(len(c) != k for c in r) for r in g):
                raise SpecError(f"connection must have shape ({n}, {k}, {k})")

    def max_degree(self, table_name):
        t = getattr(self, table_name)
        flat = list(_flatten(t))
        return max((v.q_degree() for v in flat), default=-1)


def _flatten(t):
    if isinstance(t, Element):
        yield t
    else:
        for s in t:
            yield from _flatten(s)


@dataclass(frozen=True)
class ThetaDecomposition:
    psi: Element
    mu: Element
    gamma: Element
    phi: Element

    @property
    def theta(self):
        return self.psi + self.mu + self.gamma + self.phi

    @property
    def gens(self):
        return self.mu.gens

    def components(self):
        return {"psi": self.psi, "mu": self.mu, "gamma": self.gamma, "phi": self.phi}


def _gen(gens, name):
    return Element.generator(gens, name)


def _theta_parts(spec: AlgebroidSpec, gens: GeneratorSet, low, up):
    """Momentum-linear part with the given 3-index coefficient tables."""
    n, k = spec.n, spec.k
    mom = gens.basis
    E = [_gen(gens, f"e{a + 1}") for a in range(k)]
    F = [_gen(gens, f"f{a + 1}") for a in range(k)]
    P = [_gen(gens, f"{mom}{i + 1}") for i in range(n)]

    def lift(v):
        return v.with_gens(gens)

    mu = Element.zero(gens)
    gamma = Element.zero(gens)
    for a in range(k):
        for i in range(n):
            if spec.rho_L[a][i]:
                mu = mu - wedge(wedge(lift(spec.rho_L[a][i]), P[i]), F[a])
            if spec.rho_Lstar[a][i]:
                gamma = gamma - wedge(wedge(lift(spec.rho_Lstar[a][i]), P[i]), E[a])
    half = Fraction(1, 2)
    sixth = Fraction(1, 6)
    phi = Element.zero(gens)
    psi = Element.zero(gens)
    for a, b, c in itertools.product(range(k), repeat=3):
        if low[a][b][c]:
            mu = mu + wedge(lift(low[a][b][c]), wedge(wedge(F[a], F[b]), E[c])).scale(half)
        if up[a][b][c]:
            gamma = gamma + wedge(lift(up[a][b][c]), wedge(wedge(E[a], E[b]), F[c])).scale(half)
        if spec.phi[a][b][c]:
            phi = phi + wedge(lift(spec.phi[a][b][c]), wedge(wedge(E[a], E[b]), E[c])).scale(sixth)
        if spec.psi[a][b][c]:
            psi = psi + wedge(lift(spec.psi[a][b][c]), wedge(wedge(F[a], F[b]), F[c])).scale(sixth)
    return ThetaDecomposition(psi=psi, mu=mu, gamma=gamma, phi=phi)


def assemble_theta(spec: AlgebroidSpec) -> ThetaDecomposition:
    """Theta in super-Darboux generators:

        mu    = -r_i rho^i(e_a) f_a - 1/2 c_{ab}^c f_a f_b e_c
        gamma = -r_i rho^i(f_a) e_a - 1/2 c^{ab}_c e_a e_b f_c
        phi   = 1/6 phi^{abc} e_a e_b e_c,  psi = 1/6 psi_{abc} f_a f_b f_c
    """
    neg = lambda t: tuple(tuple(tuple(-v for v in col) for col in row) for row in t)
    return _theta_parts(spec, spec.gens, neg(spec.c_low), neg(spec.c_up))


def torsion(spec: AlgebroidSpec, conn: Optional[ConnectionData] = None):
    """Torsion components (T_low, T_up, phi) for a connection on L.

    T_low[a][b][c] = rho^i(e_a) G^c_{ib} - rho^i(e_b) G^c_{ia} - c_{ab}^c
    T_up[a][b][c]  = rho^i(f_b) G^a_{ic} - rho^i(f_a) G^b_{ic} - c^{ab}_c
    """
    conn = conn if conn is not None else spec.connection
    if conn is None:
        raise SpecError("torsion needs a connection")
    n, k, gens = spec.n, spec.k, spec.gens
    G = lambda i, a, b: conn.entry(i, a, b, gens)
    T_low = [[[None] * k for _ in range(k)] for _ in range(k)]
    T_up = [[[None] * k for _ in range(k)] for _ in range(k)]
    for a, b, c in itertools.product(range(k), repeat=3):
        lo = -spec.c_low[a][b][c]
        up = -spec.c_up[a][b][c]
        for i in range(n):
            lo = lo + wedge(spec.rho_L[a][i], G(i, b, c)) - wedge(spec.rho_L[b][i], G(i, a, c))
            up = up + wedge(spec.rho_Lstar[b][i], G(i, c, a)) - wedge(spec.rho_Lstar[a][i], G(i, c, b))
        T_low[a][b][c] = lo
        T_up[a][b][c] = up
    freeze = lambda t: tuple(tuple(tuple(col) for col in row) for row in t)
    return freeze(T_low), freeze(T_up), spec.phi


def assemble_theta_curved(spec: AlgebroidSpec, conn: Optional[ConnectionData] = None) -> Element:
    """Theta = -J(rho#) + T# in the canonical momenta p_i."""
    conn = conn if conn is not None else spec.connection
    if conn is None:
        raise SpecError("assemble_theta_curved needs a connection")
    T_low, T_up, _ = torsion(spec, conn)
    return _theta_parts(spec, spec.gens.with_basis("p"), T_low, T_up).theta


# ------------------------------------------------------------ master equation


@dataclass
class MasterReport:
    theta_theta: Element
    components: dict
    passed: bool

    def failing(self):
        return [name for name, v in self.components.items() if v]


COMPONENT_NAMES = (
    "{mu,psi}",
    "1/2{mu,mu} + {gamma,psi}",
    "{phi,psi} + {mu,gamma}",
    "1/2{gamma,gamma} + {mu,phi}",
    "{gamma,phi}",
)


def verify_master(theta: ThetaDecomposition) -> MasterReport:
    """{Theta, Theta} and its five bidegree components."""
    psi, mu, gamma, phi = theta.psi, theta.mu, theta.gamma, theta.phi
    half = Fraction(1, 2)
    comps = dict(zip(COMPONENT_NAMES, (
        bracket(mu, psi),
        bracket(mu, mu).scale(half) + bracket(gamma, psi),
        bracket(phi, psi) + bracket(mu, gamma),
        bracket(gamma, gamma).scale(half) + bracket(mu, phi),
        bracket(gamma, phi),
    )))
    tt = bracket(theta.theta, theta.theta)
    passed = not tt and not any(comps.values())
    return MasterReport(tt, comps, passed)


# ------------------------------------------------------------ derived operations


def _require_degree(x: Element, deg, what):
    d = total_degree(x)
    if d not in (deg, "every"):
        raise ValueError(f"{what} must have total degree {deg}, got {d}")


def pairing(e1: Element, e2: Element) -> Element:
    """Fiber pairing <e1, e2> = {e1, e2} of degree-1 elements."""
    return bracket(e1, e2)


def derived_bracket(theta, e1: Element, e2: Element) -> Element:
    """[[e1, e2]]_Theta = {{e1, Theta}, e2}."""
    th = theta.theta if isinstance(theta, ThetaDecomposition) else theta
    _require_degree(e1, 1, "e1")
    _require_degree(e2, 1, "e2")
    return bracket(bracket(e1, th), e2)


def derived_anchor(theta, e: Element, f: Element) -> Element:
    """rho_Theta(e) f = {{e, Theta}, f}."""
    th = theta.theta if isinstance(theta, ThetaDecomposition) else theta
    _require_degree(e, 1, "e")
    _require_degree(f, 0, "f")
    return bracket(bracket(e, th), f)


def D_theta(theta, f: Element) -> Element:
    """D_Theta f = {Theta, f}."""
    th = theta.theta if isinstance(theta, ThetaDecomposition) else theta
    _require_degree(f, 0, "f")
    return bracket(th, f)


# ------------------------------------------------------------ classification


@dataclass
class Classification:
    psi_zero: bool
    phi_zero: bool
    mu_phi_zero: bool
    labels: List[str] = field(default_factory=list)

    def summary(self):
        return ", ".join(self.labels)


def classify(theta: ThetaDecomposition, report: Optional[MasterReport] = None) -> Classification:
    report = report or verify_master(theta)
    if not report.passed:
        raise ValueError("classify needs a solution of the master equation; failing: "
                         + ", ".join(report.failing() or ["{Theta,Theta}"]))
    psi0 = not theta.psi
    phi0 = not theta.phi
    muphi0 = not bracket(theta.mu, theta.phi)
    if psi0 and phi0:
        labels = ["L and L* Dirac"]
    else:
        labels = ["L Dirac" if psi0 else "L not Dirac", "L* Dirac" if phi0 else "L* not Dirac"]
    labels.append("Lie bialgebroid" if psi0 and muphi0 else "quasi-bialgebroid")
    return Classification(psi0, phi0, muphi0, labels)


# ------------------------------------------------------------ example specs


def standard_spec(n: int, name="", description="") -> AlgebroidSpec:
    """TM + T*M: e_a = d/dx^a, f_a = dx^a, identity anchor on TM."""
    ident = [[1 if a == i else 0 for i in range(n)] for a in range(n)]
    return AlgebroidSpec.build(n, n, rho_L=ident, name=name, description=description)


def poisson_spec(pi, name="", description="") -> AlgebroidSpec:
    """T*M + TM for a Poisson bivector ``pi`` (n x n antisymmetric matrix of
    Elements/ints over GeneratorSet(n, n)).

    L = T*M with e_a = dx^a, rho(dx^a) = pi^{ai} d_i and
    [dx^a, dx^b] = d pi^{ab}, i.e. c_{ab}^c = d_c pi^{ab};
    L* = TM with f_a = d/dx^a, identity anchor and c_up = 0.
    """
    n = len(pi)
    gens = GeneratorSet(n, n, "r")
    P = [[v.with_gens(gens) if isinstance(v, Element) else Element.scalar(gens, v) for v in row]
         for row in pi]
    for a in range(n):
        for b in range(n):
            if P[a][b] != -P[b][a]:
                raise SpecError("Poisson tensor must be antisymmetric")
    ident = [[1 if a == i else 0 for i in range(n)] for a in range(n)]
    c_low = {}
    for a, b, c in itertools.product(range(n), repeat=3):
        d = _partial_index(c, P[a][b])
        if d:
            c_low[(a, b, c)] = d
    return AlgebroidSpec.build(n, n, rho_L=P, rho_Lstar=ident, c_low=c_low,
                               name=name, description=description)


# ------------------------------------------------------------ gauge transformations


def _two_form(B, gens):
    """1/2 B_ij f_i f_j as an Element."""
    n = len(B)
    out = Element.zero(gens)
    for i in range(n):
        for j in range(n):
            v = B[i][j]
            v = v.with_gens(gens) if isinstance(v, Element) else Element.scalar(gens, v)
            if v:
                out = out + wedge(v, wedge(_gen(gens, f"f{i + 1}"), _gen(gens, f"f{j + 1}"))).scale(Fraction(1, 2))
    return out


def two_form_matrix(x: Element):
    """Antisymmetric matrix B with x = 1/2 B_ij f_i f_j."""
    gens = x.gens
    n, k = gens.n, gens.k
    if n != k:
        raise SpecError("two-forms need n = k (the standard model)")
    d = bidegree(x)
    if d != "every" and d != (0, 2):
        raise SpecError(f"B must be a polynomial 2-form in f1..f{k}, got bidegree {d}")
    z = Element.zero(gens)
    M = [[z] * n for _ in range(n)]
    for (exps, mask), c in x.terms.items():
        i, j = [b - k for b in range(2 * k) if mask >> b & 1]
        v = Element(gens, {(exps, 0): c})
        M[i][j] = M[i][j] + v
        M[j][i] = M[j][i] - v
    return M


def is_standard_model(spec: AlgebroidSpec) -> bool:
    """TM + T*M in the frame e_a = d/dx^a, f_a = dx^a."""
    n, k = spec.n, spec.k
    if n != k or spec.connection is not None and not spec.connection.is_flat():
        return False
    if any(spec.rho_L[a][i] != (1 if a == i else 0) for a in range(k) for i in range(n)):
        return False
    if any(v for row in spec.rho_Lstar for v in row):
        return False
    return not any(v for t in (spec.c_low, spec.c_up, spec.phi, spec.psi) for v in _flatten(t))


def _check_B(B, gens):
    n = len(B)
    if n != gens.n or any(len(row) != n for row in B):
        raise SpecError(f"B must be an {gens.n} x {gens.n} matrix")
    conv = lambda v: v.with_gens(gens) if isinstance(v, Element) else Element.scalar(gens, v)
    M = [[conv(v) for v in row] for row in B]
    for i in range(n):
        for j in range(n):
            if M[i][j] != -M[j][i]:
                raise SpecError("B must be antisymmetric")
            if not _is_function(M[i][j]):
                raise SpecError("B entries must be polynomials in q")
    return M


def gauge_transform(B, e: Element) -> Element:
    """tau_B(X, alpha) = (X, alpha + i_X B) on a degree-1 element."""
    gens = e.gens
    M = _check_B(B, gens)
    _require_degree(e, 1, "e")
    k = gens.k
    low = (1 << k) - 1
    X = e.project(lambda mono: mono[1] & low and not mono[1] & ~low)
    return e + bracket(X, _two_form(M, gens))


def exterior_derivative_2form(B, gens):
    """(dB)_{ijk} = d_i B_jk + d_j B_ki + d_k B_ij by direct differentiation."""
    M = _check_B(B, gens)
    n = gens.n
    out = {}
    for i, j, l in itertools.combinations(range(n), 3):
        v = (_partial_index(i, M[j][l]) + _partial_index(j, M[l][i]) + _partial_index(l, M[i][j]))
        if v:
            out[(i, j, l)] = v
    return out


def _section_basis(gens, bound):
    n, k = gens.n, gens.k
    monos = [e for d in range(bound + 1) for e in _exponent_vectors(n, d)]
    out = []
    for name in [f"e{a + 1}" for a in range(k)] + [f"f{a + 1}" for a in range(k)]:
        g = _gen(gens, name)
        for exps in monos:
            out.append(Element(gens, {(tuple(exps) + (0,) * n, g_mask(g)): Fraction(1)}))
    return out


def g_mask(g: Element):
    ((_, m),) = g.terms.keys()
    return m


def _exponent_vectors(n, d):
    if n == 0:
        if d == 0:
            yield ()
        return
    if n == 1:
        yield (d,)
        return
    for first in range(d, -1, -1):
        for rest in _exponent_vectors(n - 1, d - first):
            yield (first,) + rest


@dataclass
class GaugeResult:
    automorphism: bool
    closed: bool
    counterexample: Optional[Tuple[Element, Element, Element]] = None
    checked_pairs: int = 0


def is_gauge_automorphism(theta, B, degree_bound: int) -> GaugeResult:
    """Test [[tau e1, tau e2]] = tau [[e1, e2]] over all monomial basis
    sections with q-degree at most ``degree_bound``.

    Returns the first violating pair (with the defect) if any, and the
    independent verdict dB == 0.
    """
    th = theta.theta if isinstance(theta, ThetaDecomposition) else theta
    gens = th.gens
    M = _check_B(B, gens)
    closed = not exterior_derivative_2form(M, gens)
    basis = _section_basis(gens, degree_bound)
    tau = {id(s): gauge_transform(M, s) for s in basis}
    left = {id(s): bracket(s, th) for s in basis}
    left_tau = {id(s): bracket(tau[id(s)], th) for s in basis}
    checked = 0
    for s1 in basis:
        for s2 in basis:
            checked += 1
            lhs = bracket(left_tau[id(s1)], tau[id(s2)])
            rhs = gauge_transform(M, bracket(left[id(s1)], s2))
            if lhs != rhs:
                return GaugeResult(False, closed, (s1, s2, lhs - rhs), checked)
    return GaugeResult(True, closed, None, checked)
