"""Resource allocation for multiuser immersive volumetric video.

Thin wrapper over the compiled ``_imvol`` extension: the closed-form
link/latency/QoE model, the slot environment, the equal-share baselines, and
the train/eval/sweep experiment drivers. Configs are flat dicts (or JSON
strings) with the same keys the ``imvol`` CLI accepts.
"""

from ._imvol import (  # noqa: F401
    AllocationAction,
    Environment,
    LatencyBreakdown,
    RenderingSite,
    StepOutcome,
    SystemConfig,
    TrainedPolicy,
    UserAllocation,
    UserState,
    avg_policy,
    cloud_avg_policy,
    coefficient_of_variation,
    default_config,
    download_rate,
    evaluate_baseline,
    flatten_states,
    frame_latency,
    load_policy,
    normalize_action,
    qoe_score,
    sweep,
    system_reward,
    train,
    upload_rate,
    validate_action,
)

__all__ = [
    "AllocationAction",
    "Environment",
    "LatencyBreakdown",
    "RenderingSite",
    "StepOutcome",
    "SystemConfig",
    "TrainedPolicy",
    "UserAllocation",
    "UserState",
    "avg_policy",
    "cloud_avg_policy",
    "coefficient_of_variation",
    "default_config",
    "download_rate",
    "evaluate_baseline",
    "flatten_states",
    "frame_latency",
    "load_policy",
    "normalize_action",
    "qoe_score",
    "sweep",
    "system_reward",
    "train",
    "upload_rate",
    "validate_action",
]
