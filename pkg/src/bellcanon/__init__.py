"""Canonical forms, decomposition and storage of Bell expressions."""
from .scenario import Scenario, ScenarioError, canonical_scenario
from .expr import (Bound, BellExpression, CorrelationPoint, OrientedExpression, evaluate,
                   negate, tensor)
from .nsbasis import project_expression, to_symmetric, from_symmetric, mu_tensor
from .symmgroup import (chain_for, group_order, lex_min, orbit_size, rank_of, relabeling_group,
                        unrank)
from .canonical import (TrivialExpressionError, canonical_form, compose_bounds, decompose,
                        facet_check, local_bound, remove_superfluous, split_composite)
from .compendium import Record, Store, canonical_key, match, parse, serialize

__version__ = "0.1.0"
