"""
Adam with bias correction and the two-phase learning-rate schedule
"""
from dataclasses import dataclass, field

import torch
import torch.nn as nn

from app.core.errors import DimensionError, GradientError
from app.core.logging import get_logger
from app.schemas.training import TrainConfig

logger = get_logger(__name__)


@dataclass
class OptimState:
    """Per-parameter Adam moments and the step counter"""

    exp_avg: dict[str, torch.Tensor] = field(default_factory=dict)
    exp_avg_sq: dict[str, torch.Tensor] = field(default_factory=dict)
    step: int = 0

    @classmethod
    def for_model(cls, model: nn.Module) -> "OptimState":
        params = dict(model.named_parameters())
        return cls(
            exp_avg={name: torch.zeros_like(p, memory_format=torch.contiguous_format) for name, p in params.items()},
            exp_avg_sq={name: torch.zeros_like(p, memory_format=torch.contiguous_format) for name, p in params.items()},
        )


def lr_at(epoch: int, cfg: TrainConfig) -> float:
    """
    Learning rate for a 1-based epoch

    Constant lr0 through `decay_start_epoch`, then linear decay so the last
    epoch runs at lr0 / (epochs - decay_start_epoch); zero after `epochs`.

    Args:
        epoch: Epoch number (1-based)
        cfg: Training config

    Returns:
        Learning rate
    """
    if epoch <= cfg.decay_start_epoch:
        return cfg.lr0
    if epoch > cfg.epochs:
        return 0.0
    decay_epochs = cfg.epochs - cfg.decay_start_epoch
    return cfg.lr0 * max(cfg.epochs - epoch, 1) / decay_epochs


@torch.no_grad()
def adam_step(
    params: dict[str, torch.Tensor],
    grads: dict[str, torch.Tensor],
    state: OptimState,
    lr: float,
    cfg: TrainConfig,
) -> tuple[dict[str, torch.Tensor], OptimState]:
    """
    One bias-corrected Adam update, applied in place

    Args:
        params: Parameter name -> tensor (updated in place)
        grads: Parameter name -> gradient
        state: Moments and step counter (updated in place)
        lr: Learning rate for this step
        cfg: Supplies beta1, beta2 and eps

    Returns:
        (params, state)
    """
    if params.keys() != grads.keys():
        raise DimensionError("gradients do not cover the same parameters")
    for name, grad in grads.items():
        if grad.shape != params[name].shape:
            raise DimensionError(f"gradient shape {list(grad.shape)} != parameter '{name}' {list(params[name].shape)}")
        if not torch.all(torch.isfinite(grad)):
            bad = int((~torch.isfinite(grad)).sum())
            logger.error("adam_nan_gradient", parameter=name, non_finite=bad, step=state.step)
            raise GradientError(f"{bad} non-finite gradient entries in '{name}' at step {state.step}")

    state.step += 1
    beta1, beta2 = cfg.beta1, cfg.beta2
    bias1 = 1.0 - beta1**state.step
    bias2 = 1.0 - beta2**state.step
    for name, param in params.items():
        grad = grads[name]
        m = state.exp_avg.setdefault(name, torch.zeros_like(param))
        v = state.exp_avg_sq.setdefault(name, torch.zeros_like(param))
        m.mul_(beta1).add_(grad, alpha=1.0 - beta1)
        v.mul_(beta2).addcmul_(grad, grad, value=1.0 - beta2)
        if lr == 0.0:
            continue
        denom = (v / bias2).sqrt_().add_(cfg.adam_eps)
        param.addcdiv_(m / bias1, denom, value=-lr)
    return params, state


def step_model(model: nn.Module, grads: dict[str, torch.Tensor], state: OptimState, lr: float, cfg: TrainConfig) -> None:
    """Adam update of every parameter of a module"""
    adam_step(dict(model.named_parameters()), grads, state, lr, cfg)
