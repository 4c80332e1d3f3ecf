"""
Least-squares adversarial, cycle-consistency and identity losses
"""
from typing import NamedTuple, Union

import torch

from app.core.errors import DimensionError

Scalar = Union[float, torch.Tensor]


class LossParts(NamedTuple):
    """Terms of the full objective"""
    gan_g: Scalar
    gan_f: Scalar
    cycle: Scalar
    identity: Scalar


def _same_shape(*pairs: tuple[torch.Tensor, torch.Tensor]) -> None:
    for a, b in pairs:
        if a.shape != b.shape:
            raise DimensionError(f"shape mismatch {list(a.shape)} vs {list(b.shape)}")


def lsgan_g_loss(score_fake: torch.Tensor) -> torch.Tensor:
    """E[(D(fake) - 1)^2]: the generator wants fakes scored as real"""
    return torch.mean((score_fake - 1.0) ** 2)


def lsgan_d_loss(score_real: torch.Tensor, score_fake: torch.Tensor) -> torch.Tensor:
    """1/2 E[(D(real) - 1)^2] + 1/2 E[D(fake)^2]"""
    return 0.5 * torch.mean((score_real - 1.0) ** 2) + 0.5 * torch.mean(score_fake**2)


def cycle_loss(y: torch.Tensor, fgy: torch.Tensor, x: torch.Tensor, gfx: torch.Tensor) -> torch.Tensor:
    """mean|F(G(y)) - y| + mean|G(F(x)) - x|"""
    _same_shape((y, fgy), (x, gfx))
    return torch.mean(torch.abs(fgy - y)) + torch.mean(torch.abs(gfx - x))


def identity_loss(x: torch.Tensor, gx: torch.Tensor, y: torch.Tensor, fy: torch.Tensor) -> torch.Tensor:
    """mean|G(x) - x| + mean|F(y) - y|, applied over all channels"""
    _same_shape((x, gx), (y, fy))
    return torch.mean(torch.abs(gx - x)) + torch.mean(torch.abs(fy - y))


def total_objective(parts: LossParts, lambda_cycle: float, gamma: float) -> Scalar:
    """GAN(G, D_X) + GAN(F, D_Y) + lambda * cycle + gamma * identity"""
    return parts.gan_g + parts.gan_f + lambda_cycle * parts.cycle + gamma * parts.identity
