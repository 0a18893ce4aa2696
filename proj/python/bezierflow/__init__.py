"""Bezier scheduler distillation for flow samplers."""

from ._core import (
    ConfigError,
    GmmSpec,
    ScheduleSample,
    Scheduler,
    SchedulerFormatError,
    SnrRangeError,
    TimestepFit,
    TransformContext,
    VelocityField,
    bernstein,
    bezier_derivative,
    bezier_eval,
    fit_scheduler_to_timesteps,
    make_grid,
    monotone_points_from_logits,
    sample_source,
    sample_target,
    student_endpoint,
    teacher_endpoint,
    train,
    verify,
)

__all__ = [name for name in dir() if not name.startswith("_")]
