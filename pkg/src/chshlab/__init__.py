"""Classical, quantum and super-quantum CHSH correlations."""

__version__ = "0.1.0"

from .behavior import (
    Behavior,
    ChshReport,
    CorrelationTable,
    chsh_value,
    classify,
    correlations,
    deterministic_behavior,
    mix,
    no_signaling_check,
    signed_combination,
    uniform_noise,
)
from .errors import ImpossibleValueError, RangeError, ValidationError
from .lhv import (
    DeterministicStrategy,
    LhvModel,
    chsh_of_strategy,
    classical_max,
    lhv_chsh_values,
    lhv_sample,
    lhv_to_behavior,
)
from .superquantum import X_CC, PNormSpace, PVector, noisy_box, pnorm, pnorm_chsh_bound, pr_box

__all__ = [
    "X_CC",
    "Behavior",
    "ChshReport",
    "CorrelationTable",
    "DeterministicStrategy",
    "ImpossibleValueError",
    "LhvModel",
    "PNormSpace",
    "PVector",
    "RangeError",
    "ValidationError",
    "chsh_of_strategy",
    "chsh_value",
    "classical_max",
    "classify",
    "correlations",
    "deterministic_behavior",
    "lhv_chsh_values",
    "lhv_sample",
    "lhv_to_behavior",
    "mix",
    "no_signaling_check",
    "noisy_box",
    "pnorm",
    "pnorm_chsh_bound",
    "pr_box",
    "signed_combination",
    "uniform_noise",
]
