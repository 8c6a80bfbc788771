"""Seeded random Elements for property checks.

Every generator takes an explicit ``random.Random`` so that runs are
reproducible from a seed.  Momenta are drawn with probability about one
half whenever the requested degree allows them.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional

from .superalg import Element, GeneratorSet

COEFFS = (Fraction(1), Fraction(-1), Fraction(2), Fraction(-3), Fraction(1, 2), Fraction(-2, 3))


def _q_exponents(rng, n, max_q):
    d = rng.randint(0, max_q)
    exps = [0] * n
    for _ in range(d if n else 0):
        exps[rng.randrange(n)] += 1
    return exps


def _momentum(rng, n, m):
    exps = [0] * n
    for _ in range(m):
        exps[rng.randrange(n)] += 1
    return exps


def _mask(rng, k, n_low, n_up):
    low = rng.sample(range(k), n_low)
    up = rng.sample(range(k), n_up)
    mask = 0
    for a in low:
        mask |= 1 << a
    for a in up:
        mask |= 1 << (k + a)
    return mask


def random_element(gens: GeneratorSet, rng: random.Random, bidegree=None, total: Optional[int] = None,
                   max_q: int = 2, terms: int = 3, max_mom: int = 1) -> Element:
    """Random element of the given bidegree or total degree (exactly one
    of the two must be set).  May return zero if no monomial fits."""
    if (bidegree is None) == (total is None):
        raise ValueError("give exactly one of bidegree, total")
    n, k = gens.n, gens.k
    out = {}
    for _ in range(terms):
        if bidegree is not None:
            p, q = bidegree
            choices = [m for m in range(0, min(p, q, max_mom if n else 0) + 1)
                       if p - m <= k and q - m <= k]
            if not choices:
                continue
            m = rng.choice(choices)
            lo, up = p - m, q - m
        else:
            choices = [m for m in range(0, min(total // 2, max_mom if n else 0) + 1)
                       if total - 2 * m <= 2 * k]
            if not choices:
                continue
            m = rng.choice(choices)
            odd = total - 2 * m
            lo = rng.randint(max(0, odd - k), min(odd, k))
            up = odd - lo
        exps = tuple(_q_exponents(rng, n, max_q) + _momentum(rng, n, m))
        mono = (exps, _mask(rng, k, lo, up))
        out[mono] = out.get(mono, 0) + rng.choice(COEFFS)
    return Element.from_terms(gens, out.items())


def random_section(gens, rng, max_q=2, terms=3):
    """Degree-one element: sum of polynomial multiples of e_a and f_a."""
    return random_element(gens, rng, total=1, max_q=max_q, terms=terms)


def random_function(gens, rng, max_q=2, terms=3):
    return random_element(gens, rng, bidegree=(0, 0), max_q=max_q, terms=terms)


def random_cochain(gens, rng, m, max_q=2, terms=3):
    """Element of bidegree (0, m): polynomial coefficients times f-words."""
    return random_element(gens, rng, bidegree=(0, m), max_q=max_q, terms=terms)


def random_homogeneous(gens, rng, max_total=4, max_q=2, terms=3):
    """Total-degree homogeneous element with momenta available."""
    d = rng.randint(0, max_total)
    return random_element(gens, rng, total=d, max_q=max_q, terms=terms, max_mom=2)
