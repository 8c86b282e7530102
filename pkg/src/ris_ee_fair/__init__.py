"""Robust fairness-constrained energy-efficiency maximization for RIS-assisted
mmWave downlinks: channel synthesis, robust rate bounds, analytic gradients,
and a penalty-dual-decomposition projected-gradient-ascent solver."""

from ._kernels import backend_name
from .channel_model import (
    ChannelRealization,
    PathSet,
    ScenarioGeometry,
    SystemDims,
    apply_csi_error,
    effective_channel,
    synthesize_channels,
)
from .objectives import (
    DesignVariables,
    FairnessSpec,
    PowerModel,
    augmented_lagrangian,
    ee_lb,
    ee_true,
    jain_index,
    penalty_value,
    robust_rate_lb,
    sum_rate_lb,
    total_power,
    true_rate,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelRealization", "PathSet", "ScenarioGeometry", "SystemDims",
    "apply_csi_error", "effective_channel", "synthesize_channels",
    "DesignVariables", "FairnessSpec", "PowerModel",
    "augmented_lagrangian", "ee_lb", "ee_true", "jain_index", "penalty_value",
    "robust_rate_lb", "sum_rate_lb", "total_power", "true_rate",
    "backend_name", "__version__",
]
