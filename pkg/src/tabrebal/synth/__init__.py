"""Autoregressive mixed-type table synthesizer with class conditioning."""

from .argn import (
    ArgnConfig,
    ArgnModel,
    GenerationRequest,
    generate,
    hybrid_upsample,
    load_argn,
    save_argn,
    train,
)
from .discretizer import Discretizer, fit_discretizer

__all__ = [
    "ArgnConfig",
    "ArgnModel",
    "Discretizer",
    "GenerationRequest",
    "fit_discretizer",
    "generate",
    "hybrid_upsample",
    "load_argn",
    "save_argn",
    "train",
]
