"""Exact symbolic computations for Courant algebroids, Dirac structures
and their formal deformations in graded Poisson-geometric language."""

from .courant import (
    AlgebroidSpec,
    ThetaDecomposition,
    assemble_theta,
    classify,
    derived_bracket,
    verify_master,
)
from .deform import DiracContext, extend_order, mc_residual, obstruction, start
from .liealgebroid import LieAlgebroid
from .rothstein import ConnectionData, bracket, bracket_curved, to_curved, to_darboux
from .superalg import Element, GeneratorSet, format_element, parse

__version__ = "0.1.0"
