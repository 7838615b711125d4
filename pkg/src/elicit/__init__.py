"""Elicitable functionals, consistent scoring functions and property checks."""

from . import convex, dist, literals, mest, props, scores
from .dist import (
    FiniteDiscrete,
    Functional,
    Gaussian,
    Mixture,
    Uniform,
    discrete,
    evaluate_functional,
    mix,
    point_mass,
)
from .errors import (
    ConvexityError,
    DenominatorError,
    Diverged,
    DomainError,
    DomainViolation,
    ElicitError,
    NonUniqueError,
    ParseError,
    Unsupported,
    UsageError,
)
from .literals import parse_distribution, parse_functional, parse_score
from .mest import consistency_experiment, fit, ranking_experiment, sample
from .props import CheckConfig, PropertyReport
from .scores import Score, expected_score, make_score

__version__ = "0.1.0"

__all__ = [
    "convex",
    "dist",
    "literals",
    "mest",
    "props",
    "scores",
    "FiniteDiscrete",
    "Functional",
    "Gaussian",
    "Mixture",
    "Uniform",
    "discrete",
    "evaluate_functional",
    "mix",
    "point_mass",
    "ConvexityError",
    "DenominatorError",
    "Diverged",
    "DomainError",
    "DomainViolation",
    "ElicitError",
    "NonUniqueError",
    "ParseError",
    "Unsupported",
    "UsageError",
    "parse_distribution",
    "parse_functional",
    "parse_score",
    "consistency_experiment",
    "fit",
    "ranking_experiment",
    "sample",
    "CheckConfig",
    "PropertyReport",
    "Score",
    "expected_score",
    "make_score",
]
