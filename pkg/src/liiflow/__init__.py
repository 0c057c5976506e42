"""Quantum discord, entanglement of formation and locally inaccessible information."""

from .measures import (
    CorrelationReport,
    MeasurementBasis,
    OptimizerConfig,
    concurrence,
    conditional_entropy,
    correlation_report,
    discord,
    eof_two_qubit,
    mutual_information,
    von_neumann_entropy,
)
from .qmat import DensityMatrix, PureState, haar_random_pure, partial_trace, purify

__version__ = "0.1.0"
