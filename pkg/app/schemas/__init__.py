"""Schemas module - exports all Pydantic schemas"""
from app.schemas.evaluation import InferenceConfig, SsimConfig
from app.schemas.network import DiscriminatorConfig, GeneratorConfig
from app.schemas.noise import StripeNoiseParams, WaveNoiseParams
from app.schemas.training import PatchSpec, TrainConfig

__all__ = [
    # Noise
    "StripeNoiseParams",
    "WaveNoiseParams",
    # Networks
    "GeneratorConfig",
    "DiscriminatorConfig",
    # Training
    "PatchSpec",
    "TrainConfig",
    # Evaluation
    "SsimConfig",
    "InferenceConfig",
]
