"""
Tight-frame U-Net generators and five-conv patch discriminators
"""
from typing import Union

import torch
import torch.nn as nn
import torch.nn.functional as F

from app.core.errors import GradientError, ModelSizeError
from app.core.logging import get_logger
from app.schemas.network import DiscriminatorConfig, GeneratorConfig

logger = get_logger(__name__)

INIT_STD = 0.02


def haar_decompose(x: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor, torch.Tensor]:
    """
    One orthonormal Haar level on feature maps

    Args:
        x: Tensor [B, C, H, W] with even H, W

    Returns:
        (LL, LH, HL, HH), each [B, C, H/2, W/2]
    """
    a = x[:, :, 0::2, 0::2]
    b = x[:, :, 0::2, 1::2]
    c = x[:, :, 1::2, 0::2]
    d = x[:, :, 1::2, 1::2]
    ll = (a + b + c + d) / 2
    lh = (a + b - c - d) / 2
    hl = (a - b + c - d) / 2
    hh = (a - b - c + d) / 2
    return ll, lh, hl, hh


def haar_reconstruct(
    ll: torch.Tensor, lh: torch.Tensor, hl: torch.Tensor, hh: torch.Tensor
) -> torch.Tensor:
    """
    Inverse of `haar_decompose`

    Args:
        ll, lh, hl, hh: Subbands [B, C, H, W]

    Returns:
        Tensor [B, C, 2H, 2W]
    """
    batch, channels, height, width = ll.shape
    out = ll.new_empty(batch, channels, 2 * height, 2 * width)
    out[:, :, 0::2, 0::2] = (ll + lh + hl + hh) / 2
    out[:, :, 0::2, 1::2] = (ll + lh - hl - hh) / 2
    out[:, :, 1::2, 0::2] = (ll - lh + hl - hh) / 2
    out[:, :, 1::2, 1::2] = (ll - lh - hl + hh) / 2
    return out


class ConvBlock(nn.Module):
    """Two 3x3 conv + instance norm + ReLU stages"""

    def __init__(self, in_channels: int, out_channels: int, eps: float = 1e-5):
        super().__init__()
        self.layers = nn.Sequential(
            nn.Conv2d(in_channels, out_channels, kernel_size=3, padding=1),
            nn.InstanceNorm2d(out_channels, affine=True, eps=eps),
            nn.ReLU(),
            nn.Conv2d(out_channels, out_channels, kernel_size=3, padding=1),
            nn.InstanceNorm2d(out_channels, affine=True, eps=eps),
            nn.ReLU(),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.layers(x)


class TightFrameUNet(nn.Module):
    """
    U-Net whose pooling is a Haar decomposition and whose unpooling is the
    inverse Haar transform of the decoder features and the stored high bands.

    output = x + body(x); `head` is the final 1x1 projection.
    """

    def __init__(self, cfg: GeneratorConfig):
        super().__init__()
        self.cfg = cfg
        widths = [cfg.width_at(level) for level in range(cfg.depth + 1)]

        self.encoders = nn.ModuleList()
        in_channels = cfg.in_channels
        for level in range(cfg.depth):
            self.encoders.append(ConvBlock(in_channels, widths[level], cfg.norm_eps))
            in_channels = widths[level]
        self.bottleneck = ConvBlock(widths[cfg.depth - 1], widths[cfg.depth], cfg.norm_eps)

        self.laterals = nn.ModuleList()
        self.decoders = nn.ModuleList()
        current = widths[cfg.depth]
        for level in reversed(range(cfg.depth)):
            self.laterals.append(nn.Conv2d(current, widths[level], kernel_size=1))
            self.decoders.append(ConvBlock(2 * widths[level], widths[level], cfg.norm_eps))
            current = widths[level]
        self.head = nn.Conv2d(widths[0], cfg.in_channels, kernel_size=1)

    def check_input(self, x: torch.Tensor) -> None:
        step = 2**self.cfg.depth
        if x.ndim != 4 or x.shape[1] != self.cfg.in_channels:
            raise ModelSizeError(
                f"generator expects [B, {self.cfg.in_channels}, H, W], got {list(x.shape)}"
            )
        if x.shape[2] % step or x.shape[3] % step:
            raise ModelSizeError(f"patch {x.shape[3]}x{x.shape[2]} not divisible by {step}")

    def body(self, x: torch.Tensor) -> torch.Tensor:
        skips = []
        for encoder in self.encoders:
            features = encoder(x)
            ll, lh, hl, hh = haar_decompose(features)
            skips.append((features, lh, hl, hh))
            x = ll
        x = self.bottleneck(x)
        for lateral, decoder, (features, lh, hl, hh) in zip(self.laterals, self.decoders, reversed(skips)):
            x = haar_reconstruct(lateral(x), lh, hl, hh)
            x = decoder(torch.cat([x, features], dim=1))
        return self.head(x)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        self.check_input(x)
        return x + self.body(x)


class PatchDiscriminator(nn.Module):
    """Five 4x4 convs (strides 2,2,2,1,1) with instance norm, then a linear score"""

    def __init__(self, cfg: DiscriminatorConfig):
        super().__init__()
        self.cfg = cfg
        layers: list[nn.Module] = []
        in_channels = cfg.in_channels
        for index, (width, stride) in enumerate(zip(cfg.widths, cfg.strides)):
            layers.append(nn.Conv2d(in_channels, width, kernel_size=cfg.kernel_size, stride=stride, padding=1))
            if index > 0:
                layers.append(nn.InstanceNorm2d(width, affine=True, eps=cfg.norm_eps))
            layers.append(nn.LeakyReLU(cfg.leaky_slope))
            in_channels = width
        self.features = nn.Sequential(*layers)
        self.fc = nn.Linear(in_channels, 1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.ndim != 4 or x.shape[1] != self.cfg.in_channels:
            raise ModelSizeError(
                f"discriminator expects [B, {self.cfg.in_channels}, H, W], got {list(x.shape)}"
            )
        if min(x.shape[2], x.shape[3]) < self.cfg.min_input:
            raise ModelSizeError(
                f"discriminator input {x.shape[3]}x{x.shape[2]} below the {self.cfg.min_input}-pixel footprint"
            )
        pooled = F.adaptive_avg_pool2d(self.features(x), 1).flatten(1)
        return self.fc(pooled).squeeze(1)


Network = Union[TightFrameUNet, PatchDiscriminator]


def init_params(cfg: Union[GeneratorConfig, DiscriminatorConfig], seed: int) -> Network:
    """
    Build a network with seeded parameters

    Conv and linear weights ~ N(0, 0.02^2); biases 0; norm scale 1, shift 0.

    Args:
        cfg: Generator or discriminator config
        seed: Parameter seed

    Returns:
        Initialized module
    """
    model: Network = TightFrameUNet(cfg) if isinstance(cfg, GeneratorConfig) else PatchDiscriminator(cfg)
    generator = torch.Generator().manual_seed(seed)
    with torch.no_grad():
        for module in model.modules():
            if isinstance(module, (nn.Conv2d, nn.Linear)):
                module.weight.copy_(torch.randn(module.weight.shape, generator=generator) * INIT_STD)
                if module.bias is not None:
                    module.bias.zero_()
            elif isinstance(module, nn.InstanceNorm2d) and module.affine:
                module.weight.fill_(1.0)
                module.bias.zero_()
    logger.debug(
        "network_initialized",
        network=type(model).__name__,
        parameters=sum(p.numel() for p in model.parameters()),
        seed=seed,
    )
    return model


def zero_head(model: TightFrameUNet) -> TightFrameUNet:
    """Zero the final projection so the generator becomes the identity map"""
    with torch.no_grad():
        model.head.weight.zero_()
        model.head.bias.zero_()
    return model


def generator_forward(model: TightFrameUNet, x: torch.Tensor) -> torch.Tensor:
    """
    Apply a generator to one patch [C, H, W] or a batch [B, C, H, W]

    Args:
        model: Generator
        x: Patch tensor

    Returns:
        Tensor of the same shape
    """
    if x.ndim == 3:
        return model(x.unsqueeze(0)).squeeze(0)
    return model(x)


def discriminator_forward(model: PatchDiscriminator, x: torch.Tensor) -> torch.Tensor:
    """
    Score one patch [C, H, W] (scalar) or a batch [B, C, H, W] (one score each)

    Args:
        model: Discriminator
        x: Patch tensor

    Returns:
        Score tensor
    """
    if x.ndim == 3:
        return model(x.unsqueeze(0)).squeeze(0)
    return model(x)


def backward(loss: torch.Tensor, model: nn.Module) -> dict[str, torch.Tensor]:
    """
    Gradients of a scalar loss with respect to every parameter of `model`

    Parameters the loss does not reach get zero gradients.

    Args:
        loss: Scalar tensor recorded with autograd
        model: Module whose parameters are differentiated

    Returns:
        Mapping parameter name -> gradient (same shapes)
    """
    if loss.ndim != 0 or not loss.requires_grad:
        raise GradientError("loss must be a scalar recorded with autograd")
    if not torch.isfinite(loss):
        raise GradientError(f"loss is not finite: {loss.item()}")
    names, params = zip(*model.named_parameters())
    grads = torch.autograd.grad(loss, params, allow_unused=True, retain_graph=True)
    result = {}
    for name, param, grad in zip(names, params, grads):
        grad = torch.zeros_like(param) if grad is None else grad.detach()
        if not torch.all(torch.isfinite(grad)):
            raise GradientError(f"non-finite gradient for parameter '{name}'")
        result[name] = grad
    return result
