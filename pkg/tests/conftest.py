import random

import pytest

from diracdeform.courant import assemble_theta
from diracdeform.specfile import load_spec

# bundled specs that solve the master equation
VALID_SPECS = [
    "standard_courant_R2",
    "standard_courant_R3",
    "standard_courant_R2_curved",
    "poisson_R2",
    "poisson_R3",
    "abelian_point",
    "aff1_point",
    "so3_phi_point",
    "bialgebra_k3_point",
    "obstructed_k4_point",
]


@pytest.fixture
def rng():
    return random.Random(20240611)


def spec(name):
    return load_spec(name).spec


def theta(name):
    return assemble_theta(spec(name))
