"""Negative Bernstein functions of several variables: Levy triples,
membership tests, constructors, a catalog and a Monte Carlo link."""

from .catalog import CatalogEntry
from .constructors import (
    ConstructionError,
    WeightSpec,
    atomize,
    compose,
    conic_combine,
    divided_difference_lift,
    permute_arguments,
    pushforward,
    tail_integral,
)
from .expr import ParseError, parse_expression
from .families import ExponentialOverU, StableDensity
from .handles import FunctionHandle
from .membership import (
    Compact,
    SectorSpec,
    convergence_probe,
    exponential_criterion,
    lemma_inequality_check,
    sector_check,
    verify_Tn,
)
from .quadrature import QuadratureError
from .representation import (
    Atoms,
    DomainPoint,
    GridDensity,
    IntegrabilityError,
    LevyTriple,
    Parametric,
    StructuralError,
    SumMeasure,
    evaluate_complex,
    evaluate_real,
    gradient,
    shift_normalize,
    triple_from_json,
    validate_triple,
)
from .stochastic import SimPlan, empirical_laplace, power_scaling_check, sample_increments, verify_exponent

__version__ = "0.1.0"
