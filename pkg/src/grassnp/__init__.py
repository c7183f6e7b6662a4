"""Matrix models of Grassmannians, hardness reductions and their numerical checks."""
from .graphs import Graph, clique_number, generate, parse_graph, stability_number
from .poly import SparsePoly, substitute_corner, substitute_gram
from .reductions import (ReductionInstance, clique_decision_form, clique_number_form,
                         copositivity_form, density_qp_form, simplex_ms_form,
                         stiefel_pullback)
from .schur_horn import lift_diagonal
from .solvers import multistart_rgd

__all__ = [
    "Graph", "ReductionInstance", "SparsePoly", "clique_decision_form", "clique_number",
    "clique_number_form", "copositivity_form", "density_qp_form", "generate",
    "lift_diagonal", "multistart_rgd", "parse_graph", "simplex_ms_form",
    "stability_number", "stiefel_pullback", "substitute_corner", "substitute_gram",
]
