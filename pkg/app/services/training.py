"""
Unpaired CycleGAN training over subband stores
"""
import math
from typing import Optional, Sequence

import numpy as np
import torch

from app.core.config import get_settings
from app.core.errors import CheckpointFormatError, DivergenceError, ModeError, ModelSizeError, PipelineSizeError
from app.core.logging import get_logger
from app.domain.models import Checkpoint, DomainKind, DomainStore, MultiBandRaster, NoiseMode
from app.schemas.training import TrainConfig
from app.services.data_pipeline import build_subband_store, crop_capacity, sample_patch, split_scene
from app.services.losses import LossParts, cycle_loss, identity_loss, lsgan_d_loss, lsgan_g_loss, total_objective
from app.services.nn_models import TightFrameUNet, backward, init_params
from app.services.optimizer import OptimState, lr_at, step_model
from app.workers.patch_worker import iterate_patches

logger = get_logger(__name__)

NETWORKS = ("G", "F", "D_X", "D_Y")
CHECKPOINT_VERSION = 1


def configure_torch(serial: bool, threads: int) -> None:
    """Thread count and deterministic kernels for the current process"""
    torch.set_num_threads(max(threads, 1))
    torch.use_deterministic_algorithms(serial, warn_only=True)


def build_stores(
    cfg: TrainConfig,
    clean_scenes: Sequence[MultiBandRaster],
    noisy_scenes: Sequence[MultiBandRaster],
    clean_ids: Optional[Sequence[str]] = None,
    noisy_ids: Optional[Sequence[str]] = None,
) -> dict[DomainKind, DomainStore]:
    """
    Split scenes and build both domain stores for a config

    Args:
        cfg: Training config (mode, selection, split, factor)
        clean_scenes: Clean-domain rasters
        noisy_scenes: Noisy-domain rasters
        clean_ids: Provenance of the clean scenes
        noisy_ids: Provenance of the noisy scenes

    Returns:
        {CLEAN: store, NOISY: store}
    """
    stores = {}
    for domain, scenes, ids in (
        (DomainKind.CLEAN, clean_scenes, clean_ids),
        (DomainKind.NOISY, noisy_scenes, noisy_ids),
    ):
        stores[domain] = build_subband_store(
            [split_scene(raster, cfg.train_split) for raster in scenes],
            domain,
            cfg.mode,
            cfg.subband_selection(),
            cfg.levels,
            factor=cfg.downsample_factor,
            provenance=ids,
            use_subbands=cfg.use_subbands,
            wave_channels=cfg.wave_channels,
        )
    return stores


class CycleGANTrainer:
    """
    Alternating LSGAN training of G (noisy -> clean), F (clean -> noisy) and
    the discriminators D_X (clean) and D_Y (noisy)

    Generators are updated first in every iteration; discriminators then see
    the detached fakes of that same iteration.
    """

    def __init__(self, cfg: TrainConfig, device: Optional[str] = None):
        self.cfg = cfg
        self.device = torch.device(device or get_settings().device)
        seeds = np.random.SeedSequence(cfg.seed).spawn(len(NETWORKS) + 2)
        gen_cfg, disc_cfg = cfg.generator_config(), cfg.discriminator_config()
        self.networks: dict[str, torch.nn.Module] = {}
        for name, seq in zip(NETWORKS, seeds):
            net_cfg = gen_cfg if name in ("G", "F") else disc_cfg
            self.networks[name] = init_params(net_cfg, int(seq.generate_state(1)[0])).to(self.device)
        self.states = {name: OptimState.for_model(net) for name, net in self.networks.items()}
        self.rng_clean = np.random.default_rng(seeds[-2])
        self.rng_noisy = np.random.default_rng(seeds[-1])
        self.iteration = 0
        self.history: list[dict[str, float]] = []
        self.spec = cfg.patch_spec()
        self._check_patch_geometry()

    def _check_patch_geometry(self) -> None:
        step = 2**self.cfg.gen_depth
        width, height = self.spec.patch_width, self.spec.patch_height
        if width % step or height % step:
            raise ModelSizeError(f"patch {width}x{height} not divisible by 2^{self.cfg.gen_depth}")
        footprint = self.networks["D_X"].cfg.min_input
        if min(width, height) < footprint:
            raise ModelSizeError(f"patch {width}x{height} below the {footprint}-pixel discriminator footprint")

    def iterations_per_epoch(self, noisy_store: DomainStore) -> int:
        return self.cfg.iters_per_epoch or crop_capacity(noisy_store, self.spec)

    def _draw(self, clean: DomainStore, noisy: DomainStore) -> tuple[np.ndarray, np.ndarray]:
        batch = self.cfg.batch_size
        x = np.stack([sample_patch(clean, self.spec, self.rng_clean) for _ in range(batch)])
        y = np.stack([sample_patch(noisy, self.spec, self.rng_noisy) for _ in range(batch)])
        return x, y

    def _to_tensor(self, patch: np.ndarray) -> torch.Tensor:
        return torch.from_numpy(patch / np.float32(self.cfg.sample_scale)).to(self.device)

    def _guard(self, values: dict[str, float]) -> None:
        bad = {name: value for name, value in values.items() if not math.isfinite(value)}
        if bad:
            logger.error("training_diverged", iteration=self.iteration, **bad)
            raise DivergenceError(f"non-finite loss at iteration {self.iteration}: {sorted(bad)}")

    def step(self, x: torch.Tensor, y: torch.Tensor, lr: float) -> dict[str, float]:
        """
        One alternating update

        Args:
            x: Clean batch [B, C, H, W] in network units
            y: Noisy batch [B, C, H, W] in network units
            lr: Learning rate of this iteration

        Returns:
            History row
        """
        g, f, d_x, d_y = (self.networks[name] for name in NETWORKS)

        fake_x = g(y)
        fake_y = f(x)
        parts = LossParts(
            gan_g=lsgan_g_loss(d_x(fake_x)),
            gan_f=lsgan_g_loss(d_y(fake_y)),
            cycle=cycle_loss(y, f(fake_x), x, g(fake_y)),
            identity=identity_loss(x, g(x), y, f(y)),
        )
        objective = total_objective(parts, self.cfg.lambda_cycle, self.cfg.gamma)
        row = {name: float(value.detach()) for name, value in parts._asdict().items()}
        self._guard(row)

        grads_g = backward(objective, g)
        grads_f = backward(objective, f)
        step_model(g, grads_g, self.states["G"], lr, self.cfg)
        step_model(f, grads_f, self.states["F"], lr, self.cfg)
        del objective, parts

        fake_x, fake_y = fake_x.detach(), fake_y.detach()
        loss_dx = lsgan_d_loss(d_x(x), d_x(fake_x))
        loss_dy = lsgan_d_loss(d_y(y), d_y(fake_y))
        row["d_x"], row["d_y"] = float(loss_dx.detach()), float(loss_dy.detach())
        self._guard(row)
        step_model(d_x, backward(loss_dx, d_x), self.states["D_X"], lr, self.cfg)
        step_model(d_y, backward(loss_dy, d_y), self.states["D_Y"], lr, self.cfg)

        row["iteration"] = self.iteration + 1
        row["lr"] = lr
        return row

    def fit(
        self,
        stores: dict[DomainKind, DomainStore],
        threads: int = 1,
        serial: bool = True,
    ) -> Checkpoint:
        """
        Run the remaining iterations of the schedule

        Args:
            stores: {CLEAN: store, NOISY: store}
            threads: Torch intra-op threads
            serial: Deterministic kernels and inline patch sampling

        Returns:
            Checkpoint with the loss history of this run
        """
        clean, noisy = stores.get(DomainKind.CLEAN), stores.get(DomainKind.NOISY)
        if not clean or not noisy:
            raise PipelineSizeError("both clean and noisy stores must be non-empty")
        for store in (clean, noisy):
            if store.mode is not self.cfg.mode:
                raise ModeError(f"{store.domain.value} store is {store.mode.value}, config is {self.cfg.mode.value}")
            if store.channels != self.cfg.in_channels:
                raise ModeError(f"{store.domain.value} store has {store.channels} channels, networks expect {self.cfg.in_channels}")

        configure_torch(serial, threads)
        per_epoch = self.iterations_per_epoch(noisy)
        total = self.cfg.epochs * per_epoch
        logger.info(
            "training_started",
            mode=self.cfg.mode.value,
            iterations=total,
            iterations_per_epoch=per_epoch,
            start_iteration=self.iteration,
            clean_items=len(clean),
            noisy_items=len(noisy),
        )

        remaining = max(total - self.iteration, 0)
        for x, y in iterate_patches(lambda: self._draw(clean, noisy), remaining, prefetch=not serial):
            epoch = self.iteration // per_epoch + 1
            row = self.step(self._to_tensor(x), self._to_tensor(y), lr_at(epoch, self.cfg))
            self.history.append(row)
            self.iteration += 1
            if self.iteration % self.cfg.log_every == 0 or self.iteration == total:
                logger.info("training_iteration", epoch=epoch, **row)

        logger.info("training_finished", iterations=self.iteration)
        return self.to_checkpoint()

    def to_checkpoint(self) -> Checkpoint:
        """Parameters, Adam moments and sampler state"""
        tensors: dict[str, np.ndarray] = {}
        for name, net in self.networks.items():
            for param_name, param in net.named_parameters():
                tensors[f"{name}.{param_name}"] = param.detach().cpu().numpy().copy()
        for name, state in self.states.items():
            for param_name in state.exp_avg:
                tensors[f"opt.{name}.m.{param_name}"] = state.exp_avg[param_name].cpu().numpy().copy()
                tensors[f"opt.{name}.v.{param_name}"] = state.exp_avg_sq[param_name].cpu().numpy().copy()
        config = {
            "version": CHECKPOINT_VERSION,
            "train": self.cfg.to_file_dict(),
            "iteration": self.iteration,
            "steps": {name: state.step for name, state in self.states.items()},
            "rng": {
                "clean": self.rng_clean.bit_generator.state,
                "noisy": self.rng_noisy.bit_generator.state,
            },
        }
        return Checkpoint(tensors=tensors, config=config, history=list(self.history))

    @classmethod
    def from_checkpoint(cls, ckpt: Checkpoint, cfg: Optional[TrainConfig] = None, device: Optional[str] = None) -> "CycleGANTrainer":
        """
        Restore a trainer to continue a run

        Args:
            ckpt: Checkpoint written by `to_checkpoint`
            cfg: Config to continue with (defaults to the echoed one)
            device: Torch device

        Returns:
            Trainer positioned after the checkpointed iteration
        """
        trainer = cls(cfg or config_from_checkpoint(ckpt), device)
        for name, net in trainer.networks.items():
            load_parameters(net, ckpt.subset(name), name)
        try:
            for name, state in trainer.states.items():
                for param_name in state.exp_avg:
                    state.exp_avg[param_name].copy_(torch.from_numpy(ckpt.tensors[f"opt.{name}.m.{param_name}"]))
                    state.exp_avg_sq[param_name].copy_(torch.from_numpy(ckpt.tensors[f"opt.{name}.v.{param_name}"]))
                state.step = int(ckpt.config["steps"][name])
            trainer.iteration = int(ckpt.config["iteration"])
            trainer.rng_clean.bit_generator.state = ckpt.config["rng"]["clean"]
            trainer.rng_noisy.bit_generator.state = ckpt.config["rng"]["noisy"]
        except (KeyError, RuntimeError, TypeError, ValueError) as e:
            raise CheckpointFormatError(f"checkpoint cannot resume training: {e}") from e
        logger.info("training_resumed", iteration=trainer.iteration)
        return trainer


def train(
    cfg: TrainConfig,
    stores: dict[DomainKind, DomainStore],
    threads: int = 1,
    serial: bool = True,
    resume: Optional[Checkpoint] = None,
) -> Checkpoint:
    """
    Train a CycleGAN pair on unpaired clean/noisy stores

    Args:
        cfg: Training config
        stores: {CLEAN: store, NOISY: store}
        threads: Torch intra-op threads
        serial: Deterministic mode
        resume: Checkpoint to continue from

    Returns:
        Final checkpoint with loss history
    """
    trainer = CycleGANTrainer.from_checkpoint(resume, cfg) if resume is not None else CycleGANTrainer(cfg)
    return trainer.fit(stores, threads=threads, serial=serial)


def config_from_checkpoint(ckpt: Checkpoint) -> TrainConfig:
    """Training config echoed in a checkpoint"""
    try:
        return TrainConfig.model_validate(ckpt.config["train"])
    except (KeyError, ValueError) as e:
        raise CheckpointFormatError(f"checkpoint config echo is unusable: {e}") from e


def load_parameters(model: torch.nn.Module, tensors: dict[str, np.ndarray], label: str) -> None:
    """Copy named arrays into a module, requiring an exact name and shape match"""
    params = dict(model.named_parameters())
    if tensors.keys() != params.keys():
        missing = sorted(params.keys() - tensors.keys())[:3]
        extra = sorted(tensors.keys() - params.keys())[:3]
        raise CheckpointFormatError(f"{label}: parameter names differ (missing {missing}, unexpected {extra})")
    with torch.no_grad():
        for name, param in params.items():
            value = torch.from_numpy(np.asarray(tensors[name], dtype=np.float32))
            if value.shape != param.shape:
                raise CheckpointFormatError(f"{label}.{name}: shape {list(value.shape)} != {list(param.shape)}")
            param.copy_(value)


def load_generator(ckpt: Checkpoint, mode: Optional[NoiseMode] = None, which: str = "G") -> tuple[TightFrameUNet, TrainConfig]:
    """
    Rebuild one generator from a checkpoint

    Args:
        ckpt: Checkpoint
        mode: Required noise mode, if any
        which: "G" (noisy -> clean) or "F"

    Returns:
        (generator in eval mode, echoed training config)
    """
    cfg = config_from_checkpoint(ckpt)
    if mode is not None and cfg.mode is not mode:
        raise ModeError(f"checkpoint was trained for {cfg.mode.value}, not {mode.value}")
    model = init_params(cfg.generator_config(), 0)
    load_parameters(model, ckpt.subset(which), which)
    model.eval()
    return model, cfg
