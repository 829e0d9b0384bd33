"""Algebraic effects as algebra: theories, models, free effect trees,
handlers, and comodel runners, with a small core language on top."""

from .comodels import Cointerpretation, Done, Stuck, tensor_run, validate_comodel
from .errors import AlgeffError
from .free import FreeElement, TreeEq, eta, generic_op, lift, normalize, sequence, \
    state_normal_form, tree_equal_modulo
from .models import FiniteModel, Interpretation, interpret_term, product_model, \
    validate_equation, validate_model
from .terms import Equation, OpDecl, OpNode, Return, Theory, make_tree_op, substitute
from .theories import builtin_theory, combine
from .universe import BOOL, EMPTY, UNIT, Bool, Empty, Enum, Fin, Product, Unit

__all__ = [
    "AlgeffError",
    "BOOL",
    "Bool",
    "Cointerpretation",
    "Done",
    "EMPTY",
    "Empty",
    "Enum",
    "Equation",
    "Fin",
    "FiniteModel",
    "FreeElement",
    "Interpretation",
    "OpDecl",
    "OpNode",
    "Product",
    "Return",
    "Stuck",
    "Theory",
    "TreeEq",
    "UNIT",
    "Unit",
    "builtin_theory",
    "combine",
    "eta",
    "generic_op",
    "interpret_term",
    "lift",
    "make_tree_op",
    "normalize",
    "product_model",
    "sequence",
    "state_normal_form",
    "substitute",
    "tensor_run",
    "tree_equal_modulo",
    "validate_comodel",
    "validate_equation",
    "validate_model",
]
