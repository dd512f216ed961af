"""Exact classical groups and their geometries over finite fields and the rational quaternions."""

__version__ = "0.1.0"

from .budget import Budget, BudgetExceeded
from .scalar import GF, H, FieldAuto, Quaternion, Sigma
from .named import parse_named_group
from .permgrp import PermGroup
from .projgeom import PointLineGeometry, build_pg, check_pg_axioms
from .forms import PseudoQuadraticForm, FormParameter, classify_form_case, witt_index
from .polar import PolarSpace, build_polar, check_polar_axioms

__all__ = [
    "Budget", "BudgetExceeded", "GF", "H", "FieldAuto", "Quaternion", "Sigma",
    "parse_named_group", "PermGroup", "PointLineGeometry", "build_pg", "check_pg_axioms",
    "PseudoQuadraticForm", "FormParameter", "classify_form_case", "witt_index",
    "PolarSpace", "build_polar", "check_polar_axioms",
]
