"""Regenerate the bundled example specs in canonical form."""

import itertools
from pathlib import Path

from diracdeform.courant import AlgebroidSpec, poisson_spec, standard_spec
from diracdeform.specfile import SpecFile, dumps_spec
from diracdeform.superalg import GeneratorSet, parse

OUT = Path(__file__).resolve().parent.parent / "src" / "diracdeform" / "specs"


def anti(entries):
    out = {}
    for (a, b, c), v in entries.items():
        out[(a, b, c)] = v
        out[(b, a, c)] = -v
    return out


def levi_civita(k=3):
    out = {}
    for p in itertools.permutations(range(k)):
        inv = sum(1 for i in range(k) for j in range(i + 1, k) if p[i] > p[j])
        out[p] = -1 if inv % 2 else 1
    return out


def renamed(spec, name, description):
    return AlgebroidSpec(spec.gens, spec.rho_L, spec.rho_Lstar, spec.c_low, spec.c_up,
                         spec.phi, spec.psi, spec.connection, name, description)


def specs():
    g2, g3 = GeneratorSet(2, 2), GeneratorSet(3, 3)
    q = lambda t, g: parse(t, g)
    yield renamed(standard_spec(2), "standard_courant_R2",
                  "standard Courant algebroid TM + T*M over R^2; e_a = d/dx^a, f_a = dx^a")
    yield renamed(standard_spec(3), "standard_courant_R3",
                  "standard Courant algebroid TM + T*M over R^3; e_a = d/dx^a, f_a = dx^a")
    yield AlgebroidSpec.build(
        2, 2, rho_L=[[1, 0], [0, 1]],
        connection=[[[0, q("q2", g2)], [0, 0]], [[0, 0], [q("q1", g2), 0]]],
        name="standard_courant_R2_curved",
        description="standard Courant algebroid over R^2 with a non-flat connection on TM")
    yield renamed(poisson_spec([[0, q("q1", g2)], [-q("q1", g2), 0]]), "poisson_R2",
                  "T*M + TM for the Poisson bivector pi^{12} = q1 on R^2; e_a = dx^a, f_a = d/dx^a")
    x1, x2, x3 = (q(f"q{i}", g3) for i in (1, 2, 3))
    pi3 = [[0, x3, -x2], [-x3, 0, x1], [x2, -x1, 0]]
    yield renamed(poisson_spec(pi3), "poisson_R3",
                  "T*M + TM for the linear Poisson structure of so(3)* on R^3")
    yield AlgebroidSpec.build(0, 2, name="abelian_point",
                              description="abelian point model, k = 2")
    yield AlgebroidSpec.build(0, 2, c_low=anti({(0, 1, 1): 1}), name="aff1_point",
                              description="point model: L = aff(1), [e1, e2] = e2; L* abelian")
    eps = levi_civita()
    yield AlgebroidSpec.build(0, 3, c_low=eps, phi=eps, name="so3_phi_point",
                              description="quadratic Lie algebra: L = so(3), gamma = 0, phi = e1 e2 e3")
    yield AlgebroidSpec.build(
        1, 2, rho_L=[[1], [0]], c_low=anti({(0, 1, 1): 1}), c_up=anti({(0, 1, 0): 1}),
        name="broken_aff1",
        description="aff(1) over R with anchor e1 -> d/dx plus an incompatible c^{12}_1 = 1")
    yield AlgebroidSpec.build(
        0, 3, c_low=anti({(0, 1, 1): 1}), c_up=anti({(0, 1, 0): 1, (0, 1, 1): 1}),
        name="bialgebra_k3_point",
        description="double of the Lie bialgebra aff(1)+R with [f1, f2] = f1 + f2; "
                    "omega1 = f1*f2 + f1*f3 needs nonzero higher orders")
    yield AlgebroidSpec.build(
        0, 4, c_low=anti({(0, 1, 1): 1}), c_up=anti({(2, 3, 0): 1}),
        name="obstructed_k4_point",
        description="double of the Lie bialgebra aff(1)+R^2 with [f3, f4] = f1; "
                    "omega1 = f3*f4 is obstructed at order 2")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for spec in specs():
        text = dumps_spec(SpecFile(spec, {"truncate": 2, "seed": 0}))
        (OUT / f"{spec.name}.yaml").write_text(text)
        print("wrote", spec.name)


if __name__ == "__main__":
    main()
