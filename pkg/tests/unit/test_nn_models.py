"""
Unit tests for the tight-frame U-Net, patch discriminator and gradients
"""
import numpy as np
import pytest
import torch

from app.core.errors import GradientError, ModelSizeError
from app.schemas.network import DiscriminatorConfig, GeneratorConfig
from app.services.losses import LossParts, cycle_loss, identity_loss, lsgan_g_loss, total_objective
from app.services.nn_models import (
    PatchDiscriminator,
    TightFrameUNet,
    backward,
    discriminator_forward,
    generator_forward,
    haar_decompose,
    haar_reconstruct,
    init_params,
    zero_head,
)

TINY_GEN = GeneratorConfig(in_channels=1, depth=2, base_width=4, max_width=16)
TINY_DISC = DiscriminatorConfig(in_channels=1, base_width=4)


def test_haar_round_trip():
    """Test the Haar pooling pair is perfectly invertible"""
    x = torch.randn(2, 3, 8, 6, generator=torch.Generator().manual_seed(0), dtype=torch.float64)

    restored = haar_reconstruct(*haar_decompose(x))

    torch.testing.assert_close(restored, x, rtol=0, atol=1e-12)


def test_haar_is_orthonormal():
    """Test the decomposition preserves energy"""
    x = torch.randn(1, 1, 16, 16, generator=torch.Generator().manual_seed(1), dtype=torch.float64)

    bands = haar_decompose(x)

    assert sum(float((b**2).sum()) for b in bands) == pytest.approx(float((x**2).sum()), rel=1e-12)


def test_generator_preserves_shape():
    """Test output shape equals input shape"""
    model = init_params(TINY_GEN, seed=0)

    out = generator_forward(model, torch.zeros(1, 32, 64))

    assert out.shape == (1, 32, 64)


def test_generator_with_zero_head_is_identity():
    """Test zeroing the final projection gives exactly the input back"""
    model = zero_head(init_params(TINY_GEN, seed=0))
    x = torch.randn(2, 1, 16, 32, generator=torch.Generator().manual_seed(2))

    assert torch.equal(model(x), x)


def test_fresh_generator_maps_zero_to_zero():
    """Test zero biases make the untrained generator fix the zero patch"""
    model = init_params(GeneratorConfig(in_channels=4, depth=2, base_width=4, max_width=16), seed=3)

    assert torch.equal(model(torch.zeros(1, 4, 32, 32)), torch.zeros(1, 4, 32, 32))


def test_generator_rejects_indivisible_patch():
    """Test spatial sizes must be multiples of 2^depth"""
    model = init_params(TINY_GEN, seed=0)

    with pytest.raises(ModelSizeError):
        model(torch.zeros(1, 1, 30, 32))
    with pytest.raises(ModelSizeError):
        model(torch.zeros(1, 2, 32, 32))


def test_discriminator_scores_each_patch():
    """Test one score per batch item and a scalar for a single patch"""
    model = init_params(TINY_DISC, seed=0)

    assert discriminator_forward(model, torch.zeros(3, 1, 32, 64)).shape == (3,)
    assert discriminator_forward(model, torch.zeros(1, 32, 32)).shape == ()


def test_discriminator_rejects_small_input():
    """Test inputs below the receptive footprint are rejected"""
    model = init_params(TINY_DISC, seed=0)

    with pytest.raises(ModelSizeError):
        model(torch.zeros(1, 1, 16, 64))


def test_discriminator_layout():
    """Test five 4x4 convolutions with strides 2,2,2,1,1 and widths b..8b"""
    model = PatchDiscriminator(DiscriminatorConfig(in_channels=4, base_width=8))
    convs = [m for m in model.modules() if isinstance(m, torch.nn.Conv2d)]

    assert [c.stride[0] for c in convs] == [2, 2, 2, 1, 1]
    assert [c.out_channels for c in convs] == [8, 16, 32, 64, 64]
    assert all(c.kernel_size == (4, 4) for c in convs)
    assert model.fc.in_features == 64


def test_generator_widths_cap_at_max():
    """Test encoder widths double per level up to the cap"""
    model = TightFrameUNet(GeneratorConfig(depth=4, base_width=64, max_width=256))

    widths = [block.layers[0].out_channels for block in model.encoders]

    assert widths == [64, 128, 256, 256]
    assert model.bottleneck.layers[0].out_channels == 256


def test_init_params_is_seed_deterministic():
    """Test identical seeds give identical parameters and different seeds differ"""
    a, b, c = init_params(TINY_GEN, 5), init_params(TINY_GEN, 5), init_params(TINY_GEN, 6)

    for (name, pa), (_, pb), (_, pc) in zip(a.named_parameters(), b.named_parameters(), c.named_parameters()):
        assert torch.equal(pa, pb), name
    assert not torch.equal(a.head.weight, c.head.weight)


def test_init_params_distribution():
    """Test conv weights ~ N(0, 0.02^2), biases 0, norm scale 1"""
    model = init_params(GeneratorConfig(depth=2, base_width=32, max_width=64), seed=0)
    weights = torch.cat([m.weight.flatten() for m in model.modules() if isinstance(m, torch.nn.Conv2d)])

    assert weights.detach().std().item() == pytest.approx(0.02, rel=0.05)
    for module in model.modules():
        if isinstance(module, torch.nn.Conv2d):
            assert not module.bias.any()
        if isinstance(module, torch.nn.InstanceNorm2d):
            assert torch.all(module.weight == 1)


def test_backward_covers_every_parameter():
    """Test gradients come back for all parameters with matching shapes"""
    model = init_params(TINY_GEN, seed=0)
    x = torch.randn(1, 1, 16, 16, generator=torch.Generator().manual_seed(4))

    grads = backward(torch.mean(model(x) ** 2), model)

    params = dict(model.named_parameters())
    assert grads.keys() == params.keys()
    assert all(grads[n].shape == params[n].shape for n in params)


def test_backward_zero_fills_unreached_parameters():
    """Test parameters outside the graph get zero gradients"""
    model = init_params(TINY_DISC, seed=0)
    loss = (model.fc.bias * 2.0).sum()

    grads = backward(loss, model)

    assert float(grads["fc.bias"]) == 2.0
    assert not grads["features.0.weight"].any()


def test_backward_rejects_non_scalar_and_nan():
    """Test the loss must be a finite autograd scalar"""
    model = init_params(TINY_GEN, seed=0)
    out = model(torch.zeros(1, 1, 16, 16))

    with pytest.raises(GradientError):
        backward(out, model)
    with pytest.raises(GradientError):
        backward(out.sum() * float("nan"), model)


def test_finite_difference_gradient_of_full_objective():
    """Test autograd matches central differences on the composite objective"""
    g, f = init_params(TINY_GEN, 1).double(), init_params(TINY_GEN, 2).double()
    d_x, d_y = init_params(TINY_DISC, 3).double(), init_params(TINY_DISC, 4).double()
    gen = torch.Generator().manual_seed(7)
    x = torch.randn(1, 1, 32, 32, generator=gen, dtype=torch.float64)
    y = torch.randn(1, 1, 32, 32, generator=gen, dtype=torch.float64)

    def objective() -> torch.Tensor:
        fake_x, fake_y = g(y), f(x)
        parts = LossParts(
            gan_g=lsgan_g_loss(d_x(fake_x)),
            gan_f=lsgan_g_loss(d_y(fake_y)),
            cycle=cycle_loss(y, f(fake_x), x, g(fake_y)),
            identity=identity_loss(x, g(x), y, f(y)),
        )
        return total_objective(parts, 10.0, 5.0)

    grads = {**{f"g.{k}": v for k, v in backward(objective(), g).items()},
             **{f"f.{k}": v for k, v in backward(objective(), f).items()}}
    params = {**{f"g.{k}": v for k, v in g.named_parameters()},
              **{f"f.{k}": v for k, v in f.named_parameters()}}

    picker = np.random.default_rng(0)
    names = sorted(params)
    h = 1e-6
    passed = 0
    samples = 120
    for _ in range(samples):
        name = names[int(picker.integers(len(names)))]
        flat = params[name].data.view(-1)
        index = int(picker.integers(flat.numel()))
        original = float(flat[index])
        with torch.no_grad():
            flat[index] = original + h
            plus = float(objective())
            flat[index] = original - h
            minus = float(objective())
            flat[index] = original
        numeric = (plus - minus) / (2 * h)
        analytic = float(grads[name].view(-1)[index])
        passed += abs(numeric - analytic) <= 1e-3 * max(abs(numeric), abs(analytic)) + 1e-6
    assert passed >= 0.99 * samples - 1
