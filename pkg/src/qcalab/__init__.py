"""qcalab: a numerical laboratory for one-dimensional quantum cellular automata."""

from .pauli import PauliTerm, compose, diameter, symplectic_product
from .clifford import (
    CliffordRule,
    compose_rules,
    find_gliders,
    fractal_rule,
    identity_rule,
    inverse_rule,
    orbit,
    shift_rule,
    spacetime_diagram,
    step,
    support_growth_check,
)

__version__ = "0.1.0"
