"""Search small point models (doubles of Lie bialgebras, phi = psi = 0)
for a first-order deformation whose order-2 obstruction is not exact.

Search space for rank k: every L in a short list of Lie algebras and
every cobracket table c_up with at most ``--max-entries`` independent
nonzero entries c^{ab}_c (a < b) in {-1, 1}.  For each model solving
the master equation, each basis vector of Z^2 (d_L-closed 2-cochains)
is tried as omega_1.
"""

import argparse
import itertools
import sys

from diracdeform.courant import AlgebroidSpec, assemble_theta, verify_master
from diracdeform.deform import DiracContext, obstruction, start
from diracdeform import linalg


def lie_algebras(k):
    """(label, sparse c_low) for a few Lie algebras of dimension k."""
    def anti(entries):
        out = {}
        for (a, b, c), v in entries.items():
            out[(a, b, c)] = v
            out[(b, a, c)] = -v
        return out
    yield "abelian", {}
    yield "aff1+abelian", anti({(0, 1, 1): 1})
    if k >= 3:
        yield "heisenberg+abelian", anti({(0, 1, 2): 1})
        yield "so3+abelian", anti({(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1})


def cobrackets(k, max_entries):
    slots = [(a, b, c) for a, b in itertools.combinations(range(k), 2) for c in range(k)]
    for r in range(1, max_entries + 1):
        for chosen in itertools.combinations(slots, r):
            for signs in itertools.product((1, -1), repeat=r):
                out = {}
                for (a, b, c), s in zip(chosen, signs):
                    out[(a, b, c)] = s
                    out[(b, a, c)] = -s
                yield out


def cocycle_basis(ctx):
    rows, dom, _ = ctx.algebroid.matrix(2, 0)
    return [dom.from_vector(v) for v in linalg.nullspace(rows, len(dom))]


def search(k, max_entries, first_only=True):
    found = []
    tried = 0
    for label, c_low in lie_algebras(k):
        for c_up in cobrackets(k, max_entries):
            spec = AlgebroidSpec.build(0, k, c_low=c_low, c_up=c_up)
            if not verify_master(assemble_theta(spec)).passed:
                continue
            tried += 1
            ctx = DiracContext(spec)
            for w in cocycle_basis(ctx):
                obs = obstruction(start(ctx, w))
                if obs.exact is not True:
                    found.append((label, c_up, w, obs.R))
                    if first_only:
                        return found, tried
    return found, tried


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=4)
    ap.add_argument("--max-entries", type=int, default=2)
    args = ap.parse_args(argv)
    found, tried = search(args.k, args.max_entries)
    print(f"k={args.k}: {tried} bialgebra doubles checked")
    for label, c_up, w, R in found:
        nz = {f"{a + 1},{b + 1},{c + 1}": v for (a, b, c), v in sorted(c_up.items()) if a < b}
        print(f"obstructed: L={label} c_up={nz} omega1={w} R2={R}")
    if not found:
        print("no obstructed instance in the search space")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
