"""Computational toolkit for Leavitt path algebras and their Morita theory."""

from .algebra import (
    AmbientMismatch, Element, ExpressionError, LeavittPathAlgebra, Monomial, NonComposableWarning,
    basis, dimension, equal, grade, multiply, normal_form, parse_element,
)
from .fields import QQ, Field, GF, parse_field
from .graph import (
    Edge, Graph, GraphError, GraphSyntaxError, HSLattice, Path, closed_simple_paths, cofinal,
    condition_K, condition_L, cycles, format_graph, hs_closure, hs_lattice, is_hereditary,
    is_saturated, load_graph, parse_graph,
)
from .report import Check, Report
from .tails import (
    Tail, TailedGraph, UncountableEmitter, desingularize, format_tailed, parse_tailed,
    predicates_on_tailed, truncate,
)

__version__ = "0.1.0"
