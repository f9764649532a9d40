"""Value types for t-norms, distance distributions, spaces and reports."""
from models.distribution import ExpDistribution, StepDistribution
from models.errors import (
    AxiomViolationError,
    CarrierSizeError,
    GeneratorError,
    InvalidDistributionError,
    InvalidTNormError,
    PlateauLimitError,
    SchemaError,
    ToolkitError,
    TransformError,
)
from models.reports import AxiomCheck, AxiomReport, ClassificationReport, TransformReport
from models.spaces import ClassicalMetricSpace, FiniteApproachSpace, LambdaTable, ProbMetricSpace
from models.tnorm import Archetype, OrdinalInterval, OrdinalSumTNorm

__all__ = [
    'Archetype',
    'OrdinalInterval',
    'OrdinalSumTNorm',
    'StepDistribution',
    'ExpDistribution',
    'ClassicalMetricSpace',
    'ProbMetricSpace',
    'FiniteApproachSpace',
    'LambdaTable',
    'AxiomCheck',
    'AxiomReport',
    'TransformReport',
    'ClassificationReport',
    'ToolkitError',
    'SchemaError',
    'InvalidTNormError',
    'InvalidDistributionError',
    'PlateauLimitError',
    'CarrierSizeError',
    'AxiomViolationError',
    'TransformError',
    'GeneratorError'
]
