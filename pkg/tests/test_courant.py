import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import VALID_SPECS, spec, theta
from oracles import dorfman, function_to_sympy, section_to_pair, symbols
from diracdeform.courant import (
    AlgebroidSpec,
    SpecError,
    D_theta,
    _section_basis,
    assemble_theta,
    assemble_theta_curved,
    classify,
    derived_anchor,
    derived_bracket,
    exterior_derivative_2form,
    gauge_transform,
    is_gauge_automorphism,
    is_standard_model,
    pairing,
    poisson_spec,
    standard_spec,
    torsion,
    two_form_matrix,
    verify_master,
)
from diracdeform.randomgen import random_element, random_function, random_section
from diracdeform.rothstein import ConnectionData, bracket, to_darboux
from diracdeform.superalg import Element, GeneratorSet, parse, wedge

G2, G3 = GeneratorSet(2, 2), GeneratorSet(3, 3)


def P(text, gens=G3):
    return parse(text, gens)


def test_standard_theta():
    th = assemble_theta(standard_spec(3))
    assert th.mu == P("-r1*f1 - r2*f2 - r3*f3")
    assert not th.gamma and not th.phi and not th.psi


def test_point_model_theta():
    th = theta("aff1_point")
    g = th.gens
    assert th.mu == -wedge(wedge(parse("f1", g), parse("f2", g)), parse("e2", g))
    assert th.theta.gens.n == 0


def test_zero_spec():
    th = assemble_theta(AlgebroidSpec.build(2, 2))
    assert not th.theta


def test_component_bidegrees():
    from diracdeform.superalg import bidegree
    for name in VALID_SPECS:
        th = theta(name)
        for comp, deg in (("psi", (0, 3)), ("mu", (1, 2)), ("gamma", (2, 1)), ("phi", (3, 0))):
            v = getattr(th, comp)
            assert bidegree(v) in ("every", deg), (name, comp)


def test_spec_validation():
    with pytest.raises(SpecError):
        AlgebroidSpec.build(0, 2, c_low={(0, 1, 1): 1})
    with pytest.raises(SpecError):
        AlgebroidSpec.build(0, 3, phi={(0, 1, 2): 1, (1, 0, 2): -1})
    with pytest.raises(SpecError):
        AlgebroidSpec.build(2, 2, rho_L=[[1, 0]])


@pytest.mark.parametrize("name", VALID_SPECS)
def test_bundled_master(name):
    report = verify_master(theta(name))
    assert report.passed, report.failing()


def test_broken_spec_names_component():
    report = verify_master(theta("broken_aff1"))
    assert not report.passed
    assert report.failing() == ["{phi,psi} + {mu,gamma}"]


def test_two_dimensional_doubles_pass():
    # any cobracket on aff(1) paired this way is a Lie bialgebra
    s = AlgebroidSpec.build(0, 2, c_low={(0, 1, 1): 1, (1, 0, 1): -1},
                            c_up={(0, 1, 0): 1, (1, 0, 0): -1})
    assert verify_master(assemble_theta(s)).passed


def test_derived_bracket_examples():
    th = theta("standard_courant_R3").theta
    assert derived_bracket(th, P("e1"), P("q1*e2")) == P("e2")
    assert derived_bracket(th, P("e1"), P("q1*f2")) == P("f2")
    for s in (P("e1"), P("f2"), P("e1 + e2")):
        assert derived_bracket(th, s, s) == 0


def test_anchor_and_D():
    th = theta("standard_courant_R3").theta
    assert derived_anchor(th, P("e1"), P("q1")) == 1
    assert derived_anchor(th, P("f1"), P("q1")) == 0
    assert D_theta(th, P("q1")) == P("f1")
    assert pairing(D_theta(th, P("q1")), P("e1")) == derived_anchor(th, P("e1"), P("q1"))
    assert D_theta(th, P("7")) == 0
    point = theta("so3_phi_point").theta
    assert D_theta(point, Element.scalar(point.gens, 3)) == 0


def test_poisson_anchor():
    # in the Poisson model e_a = dx^a, so rho(dx^1) q2 = pi^{12}
    th = theta("poisson_R2").theta
    assert derived_anchor(th, P("e1", G2), P("q2", G2)) == P("q1", G2)
    assert derived_anchor(th, P("f1", G2), P("q1", G2)) == 1


def test_degree_checks():
    th = theta("standard_courant_R2").theta
    with pytest.raises(ValueError):
        derived_bracket(th, P("q1", G2), P("e1", G2))
    with pytest.raises(ValueError):
        D_theta(th, P("e1", G2))


def _random_theta(rng, gens):
    return random_element(gens, rng, total=3, max_q=1, terms=4)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 9))
def test_symmetric_part_is_D_of_pairing(seed):
    rng = random.Random(seed)
    th = _random_theta(rng, G2)
    e1, e2 = random_section(G2, rng), random_section(G2, rng)
    lhs = derived_bracket(th, e1, e2) + derived_bracket(th, e2, e1)
    assert lhs == D_theta(th, pairing(e1, e2))


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 9))
def test_metric_compatibility(seed):
    rng = random.Random(seed)
    th = _random_theta(rng, G2)
    e1, e2, e3 = (random_section(G2, rng) for _ in range(3))
    lhs = derived_anchor(th, e1, pairing(e2, e3))
    rhs = pairing(derived_bracket(th, e1, e2), e3) + pairing(e2, derived_bracket(th, e1, e3))
    assert lhs == rhs


def _jacobi_ok(th, triples):
    D = lambda x, y: derived_bracket(th, x, y)
    return all(D(a, D(b, c)) == D(D(a, b), c) + D(b, D(a, c)) for a, b, c in triples)


@pytest.mark.parametrize("name", VALID_SPECS)
def test_jacobi_on_frame(name):
    th = theta(name)
    frame = _section_basis(th.gens, 0)
    assert _jacobi_ok(th.theta, itertools.product(frame, repeat=3))


def test_jacobi_fails_for_broken_spec():
    th = theta("broken_aff1")
    frame = _section_basis(th.gens, 1)
    assert not _jacobi_ok(th.theta, itertools.product(frame, repeat=3))


@pytest.mark.parametrize("name", ["poisson_R2", "poisson_R3", "standard_courant_R2_curved"])
def test_anchor_morphism(name):
    th = theta(name)
    T = th.theta
    rng = random.Random(7)
    for _ in range(10):
        e1, e2 = random_section(th.gens, rng), random_section(th.gens, rng)
        f = random_function(th.gens, rng, max_q=3)
        a = lambda e, g: derived_anchor(T, e, g)
        assert a(derived_bracket(T, e1, e2), f) == a(e1, a(e2, f)) - a(e2, a(e1, f))


def test_standard_bracket_against_textbook():
    th = theta("standard_courant_R3")
    xs = symbols(3)
    rng = random.Random(11)
    for _ in range(10):
        s1, s2 = random_section(th.gens, rng), random_section(th.gens, rng)
        got = section_to_pair(derived_bracket(th.theta, s1, s2), xs)
        want = dorfman(section_to_pair(s1, xs), section_to_pair(s2, xs), xs)
        assert got == want


def test_torsion_examples():
    s = spec("aff1_point")
    T_low, T_up, phi = torsion(s, ConnectionData.flat(s.gens))
    for a, b, c in itertools.product(range(2), repeat=3):
        assert T_low[a][b][c] == -s.c_low[a][b][c]
    std = spec("standard_courant_R2_curved")
    T_low, _, _ = torsion(std)
    for a, b, c in itertools.product(range(2), repeat=3):
        expect = std.connection.entry(a, b, c, std.gens) - std.connection.entry(b, a, c, std.gens)
        assert T_low[a][b][c] == expect
    with pytest.raises(SpecError):
        torsion(spec("poisson_R2"))


@pytest.mark.parametrize("name", VALID_SPECS)
def test_curved_assembly_round_trip(name):
    s = spec(name)
    gens = s.gens
    rng = random.Random(len(name))
    table = [[[random_function(gens, rng, max_q=1, terms=2) for _ in range(gens.k)]
              for _ in range(gens.k)] for _ in range(gens.n)]
    conn = s.connection or ConnectionData.from_table(gens, table)
    assert to_darboux(assemble_theta_curved(s, conn), conn) == assemble_theta(s).theta


def test_classification():
    assert classify(theta("standard_courant_R3")).summary() == "L and L* Dirac, Lie bialgebroid"
    assert classify(theta("poisson_R3")).summary() == "L and L* Dirac, Lie bialgebroid"
    c = classify(theta("so3_phi_point"))
    assert not c.phi_zero and c.psi_zero
    assert "L* not Dirac" in c.labels
    with pytest.raises(ValueError):
        classify(theta("broken_aff1"))


def test_classification_proto():
    # psi != 0 is accepted; with phi = psi = e-f symmetric cubic the double of so(3) data
    eps = {p: (1 if p in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else -1)
           for p in itertools.permutations(range(3))}
    s = AlgebroidSpec.build(0, 3, psi=eps)
    th = assemble_theta(s)
    assert verify_master(th).passed
    assert classify(th).labels == ["L not Dirac", "L* Dirac", "quasi-bialgebroid"]


def test_two_form_matrix():
    M = two_form_matrix(P("q1*f1*f2 - 3*f2*f3"))
    assert M[0][1] == P("q1") and M[1][0] == P("-q1")
    assert M[1][2] == -3 and M[2][1] == 3
    with pytest.raises(SpecError):
        two_form_matrix(P("e1*f2"))


def test_standard_model_detection():
    assert is_standard_model(spec("standard_courant_R3"))
    assert not is_standard_model(spec("poisson_R2"))
    assert not is_standard_model(spec("standard_courant_R2_curved"))


def test_gauge_transform_action():
    th = theta("standard_courant_R3")
    B = two_form_matrix(P("q1*f1*f2"))
    assert gauge_transform(B, P("e1")) == P("e1 + q1*f2")
    assert gauge_transform(B, P("f3")) == P("f3")


@pytest.mark.parametrize("B,closed", [
    ("2*f1*f2 - f2*f3", True),
    ("q3*f1*f2", False),
    ("-q1*f1*f2", True),       # d(q1 q2 dx^1)
    ("q1*q2*f1*f3 + q2^2*f2*f3", False),
])
def test_gauge_automorphism_iff_closed(B, closed):
    th = theta("standard_courant_R3")
    M = two_form_matrix(P(B))
    res = is_gauge_automorphism(th, M, 1)
    assert res.closed == closed
    assert res.automorphism == closed
    assert (res.counterexample is None) == closed
    assert (not exterior_derivative_2form(M, th.gens)) == closed


def test_gauge_rejects_non_antisymmetric():
    th = theta("standard_courant_R2")
    with pytest.raises(SpecError):
        is_gauge_automorphism(th, [[P("q1", G2), 0], [0, 0]], 1)
