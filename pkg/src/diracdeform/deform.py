"""
Formal deformations of the Dirac structure L inside E = L + L*.

A deformation is the graph of a 2-cochain omega = t w1 + t^2 w2 + ...
It stays Dirac iff the Maurer-Cartan residual

    d_L w + 1/2 [[w, w]]_gamma + 1/6 [w, w, w]_phi

vanishes order by order.  The order N+1 obstruction

    R_{N+1} = -1/2 sum_{i=1}^{N} [[w_i, w_{N+1-i}]]_gamma
              - 1/6 sum_{i+j+k=N+1} [w_i, w_j, w_k]_phi

is d_L-closed, and the deformation extends iff it is d_L-exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .courant import (
    AlgebroidSpec,
    ThetaDecomposition,
    assemble_theta,
    derived_bracket,
    pairing,
    poisson_spec,
    standard_spec,
    verify_master,
)
from .liealgebroid import ExactResult, LieAlgebroid, check_cochain, evaluate, schouten, triple_bracket
from .rothstein import bracket
from .superalg import Element, GeneratorSet, wedge

__all__ = [
    "DiracContext",
    "DeformationState",
    "ObstructionResult",
    "ClosednessViolation",
    "mc_residual",
    "mc_residual_oracle",
    "gamma_bracket",
    "residual_at_order",
    "obstruction",
    "extend_order",
    "start",
    "d_eta",
    "d_eta_check",
    "poisson_equivalence_check",
    "bivector_cochain",
    "bivector_field",
    "first_order_exactness",
]

HALF = Fraction(1, 2)
SIXTH = Fraction(1, 6)


class ClosednessViolation(AssertionError):
    """d_L R_{N+1} != 0.  The obstruction is closed by theorem, so this
    signals an implementation error."""


class DiracContext:
    """Theta with psi = 0 together with the Lie algebroid of L."""

    def __init__(self, spec: AlgebroidSpec, theta: Optional[ThetaDecomposition] = None):
        theta = theta if theta is not None else assemble_theta(spec)
        if theta.psi:
            raise ValueError("psi != 0: L is not a Dirac structure")
        self.spec = spec
        self.theta = theta
        self.algebroid = LieAlgebroid(theta, spec)
        self.gens = theta.mu.gens

    @property
    def mu(self):
        return self.theta.mu

    @property
    def gamma(self):
        return self.theta.gamma

    @property
    def phi(self):
        return self.theta.phi

    def d_L(self, eta):
        return self.algebroid.d(eta)


def gamma_bracket(ctx: DiracContext, w1: Element, w2: Element) -> Element:
    """[[w1, w2]]_gamma = {{w1, gamma}, w2}."""
    return bracket(bracket(w1, ctx.gamma), w2)


def mc_residual(ctx: DiracContext, omega: Element) -> Element:
    check_cochain(omega, 2)
    out = ctx.d_L(omega)
    if ctx.gamma:
        out = out + gamma_bracket(ctx, omega, omega).scale(HALF)
    if ctx.phi:
        out = out + triple_bracket(ctx.phi, omega, omega, omega).scale(SIXTH)
    return out


def mc_residual_oracle(ctx: DiracContext, omega: Element) -> Element:
    """The residual assembled from the graph condition

        < [[s_a + w(s_a), s_b + w(s_b)]], s_c + w(s_c) >

    over basis triples a < b < c, with w(s) = i_s w and the Courant
    bracket realised as the derived bracket of Theta."""
    check_cochain(omega, 2)
    gens, k = ctx.gens, ctx.gens.k
    theta = ctx.theta.theta
    lifted = []
    for a in range(k):
        s = Element.generator(gens, f"e{a + 1}")
        lifted.append(s + bracket(s, omega))
    out = Element.zero(gens)
    for a, b, c in itertools.combinations(range(k), 3):
        value = pairing(derived_bracket(theta, lifted[a], lifted[b]), lifted[c])
        if value:
            word = wedge(wedge(Element.generator(gens, f"f{a + 1}"),
                               Element.generator(gens, f"f{b + 1}")),
                         Element.generator(gens, f"f{c + 1}"))
            out = out + wedge(value, word)
    return out


def residual_at_order(ctx: DiracContext, omegas: Sequence[Element], s: int) -> Element:
    """Coefficient of t^s in the residual of sum_r t^r omegas[r-1]."""
    w = lambda r: omegas[r - 1] if 1 <= r <= len(omegas) else None
    out = Element.zero(ctx.gens)
    if w(s) is not None:
        out = out + ctx.d_L(w(s))
    if ctx.gamma:
        for i in range(1, s):
            if w(i) is not None and w(s - i) is not None:
                out = out + gamma_bracket(ctx, w(i), w(s - i)).scale(HALF)
    if ctx.phi:
        for i, j in itertools.product(range(1, s), repeat=2):
            l = s - i - j
            if l >= 1 and w(i) is not None and w(j) is not None and w(l) is not None:
                out = out + triple_bracket(ctx.phi, w(i), w(j), w(l)).scale(SIXTH)
    return out


@dataclass(frozen=True)
class DeformationState:
    ctx: DiracContext
    omegas: Tuple[Element, ...]
    residual_ok_to: int

    @property
    def order(self):
        return len(self.omegas)


@dataclass
class ObstructionResult:
    order: int
    R: Element
    closed: bool
    exact: object  # True, False or "truncation-unknown"
    primitive: Optional[Element] = None
    certificate: Optional[dict] = None
    D: int = 0

    def verdict(self):
        if self.exact is True:
            return "exact"
        if self.exact == "truncation-unknown":
            return f"obstructed at truncation D={self.D}"
        return "obstructed"


def start(ctx: DiracContext, omega1: Element) -> DeformationState:
    """First-order deformation; requires d_L omega1 = 0."""
    check_cochain(omega1, 2)
    res = ctx.d_L(omega1)
    if res:
        raise ValueError(f"omega1 is not a valid first order: d_L omega1 = {res}")
    return DeformationState(ctx, (omega1,), 1)


def obstruction(state: DeformationState, D: int = 0) -> ObstructionResult:
    N = state.order
    if state.residual_ok_to < N:
        raise ValueError(f"state verified only to order {state.residual_ok_to} < {N}")
    ctx, w = state.ctx, state.omegas
    R = Element.zero(ctx.gens)
    if ctx.gamma:
        for i in range(1, N + 1):
            R = R - gamma_bracket(ctx, w[i - 1], w[N - i]).scale(HALF)
    if ctx.phi:
        for i, j in itertools.product(range(1, N + 1), repeat=2):
            l = N + 1 - i - j
            if 1 <= l <= N:
                R = R - triple_bracket(ctx.phi, w[i - 1], w[j - 1], w[l - 1]).scale(SIXTH)
    if ctx.d_L(R):
        raise ClosednessViolation(f"d_L R_{N + 1} != 0")
    ex: ExactResult = ctx.algebroid.is_exact(R, D)
    if ex.exact:
        verdict = True
    else:
        verdict = "truncation-unknown" if ex.truncated else False
    return ObstructionResult(N + 1, R, True, verdict, ex.primitive, ex.certificate, ex.D)


def extend_order(state: DeformationState, D: int = 0):
    """Append w_{N+1} if R_{N+1} has a primitive within the truncation;
    otherwise return the ObstructionResult."""
    obs = obstruction(state, D)
    if obs.exact is not True:
        return obs
    omegas = state.omegas + (obs.primitive,)
    for s in range(1, len(omegas) + 1):
        res = residual_at_order(state.ctx, omegas, s)
        if res:
            raise AssertionError(f"residual at order {s} does not vanish: {res}")
    return DeformationState(state.ctx, omegas, len(omegas))


# ------------------------------------------------------------ consistency checks


def d_eta(ctx: DiracContext, eta: Element, x: Element) -> Element:
    """d_eta x = {mu, x} + {{eta, gamma}, x} + 1/2 {{{phi, eta}, eta}, x}."""
    out = bracket(ctx.mu, x)
    if ctx.gamma:
        out = out + bracket(bracket(eta, ctx.gamma), x)
    if ctx.phi:
        out = out + bracket(bracket(bracket(ctx.phi, eta), eta), x).scale(HALF)
    return out


def d_eta_check(ctx: DiracContext, eta: Element) -> Element:
    """d_eta applied to the residual of eta; vanishes identically."""
    return d_eta(ctx, eta, mc_residual(ctx, eta))


def bivector_cochain(lam, gens: GeneratorSet) -> Element:
    """1/2 lambda^{ab} f_a f_b from an antisymmetric matrix."""
    n = len(lam)
    out = Element.zero(gens)
    for a in range(n):
        for b in range(n):
            v = lam[a][b]
            v = v.with_gens(gens) if isinstance(v, Element) else Element.scalar(gens, v)
            if v:
                out = out + wedge(v, wedge(Element.generator(gens, f"f{a + 1}"),
                                           Element.generator(gens, f"f{b + 1}"))).scale(HALF)
    return out


def bivector_field(P, gens: GeneratorSet) -> Element:
    """1/2 P^{ab} e_a e_b (a bivector field in the standard model)."""
    n = len(P)
    out = Element.zero(gens)
    for a in range(n):
        for b in range(n):
            v = P[a][b]
            v = v.with_gens(gens) if isinstance(v, Element) else Element.scalar(gens, v)
            if v:
                out = out + wedge(v, wedge(Element.generator(gens, f"e{a + 1}"),
                                           Element.generator(gens, f"e{b + 1}"))).scale(HALF)
    return out


def _bivector_to_cochain(x: Element, gens: GeneratorSet) -> Element:
    """Relabel e_a -> f_a: a multivector in the standard model becomes a
    cochain of the Poisson model (where f_a = d/dx^a)."""
    k = gens.k
    low = (1 << k) - 1
    return Element(gens, {(e, (m & low) << k | m >> k): c for (e, m), c in x.terms.items()})


@dataclass
class PoissonEquivalence:
    residual: Element
    schouten_square: Element
    residual_zero: bool
    poisson: bool
    identity: bool

    @property
    def equivalent(self):
        return self.residual_zero == self.poisson


def poisson_equivalence_check(pi, lam) -> PoissonEquivalence:
    """Compare mc_residual(w_lambda) = 0 in the Poisson model of ``pi``
    with [pi + lambda, pi + lambda] = 0 computed as a Schouten bracket of
    bivector fields in the standard model.

    ``identity`` records the exact relation
    residual = 1/2 [pi + lambda, pi + lambda] - 1/2 [pi, pi]
    after identifying d/dx^a with f_a.
    """
    n = len(pi)
    spec = poisson_spec(pi)
    ctx = DiracContext(spec)
    omega = bivector_cochain(lam, ctx.gens)
    res = mc_residual(ctx, omega)
    std = assemble_theta(standard_spec(n))
    gens = std.mu.gens
    conv = lambda v: v.with_gens(gens) if isinstance(v, Element) else Element.scalar(gens, v)
    total = [[conv(pi[a][b]) + conv(lam[a][b]) for b in range(n)] for a in range(n)]
    P = bivector_field(total, gens)
    P0 = bivector_field([[conv(v) for v in row] for row in pi], gens)
    sq = schouten(std.mu, P, P)
    sq0 = schouten(std.mu, P0, P0)
    expected = _bivector_to_cochain(sq - sq0, ctx.gens).scale(HALF)
    return PoissonEquivalence(res, sq, not res, not sq, res == expected)


def first_order_exactness(ctx: DiracContext, omega1: Element, D: int = 0) -> ExactResult:
    """Whether omega1 = d_L beta.  An exact first order is trivial to first
    order; this is only a necessary condition for triviality of the whole
    deformation, which is not decided here."""
    return ctx.algebroid.is_exact(omega1, D)
