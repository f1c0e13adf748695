"""
Joint training of all DBP filters: SGD, outermost-pair pruning and
quantization-aware fine-tuning.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from ..channel.link import Transmission, transmit
from ..core.exceptions import TrainingDivergedError
from ..core.models import (
    DesignSettings,
    FilterBank,
    FixedFormat,
    LinkParams,
    QuantizedFilterBank,
    SimulationSettings,
    TrainConfig,
)
from ..core.types import DesignMethod
from ..dbp.engine import span_gamma
from ..filters.design import design_bank
from ..fixedpoint.coefficients import quantize_bank
from .checkpoints import save_checkpoint
from .network import Batch, DbpNetwork

logger = logging.getLogger(__name__)


def batch_seed(seed: int, index: int) -> int:
    """Deterministic per-batch seed."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


class BatchSource:
    """
    Training batches: a fresh transmission every iteration, or a fixed pool
    of ``batch_pool`` transmissions reused round-robin.
    """

    def __init__(self, cfg: TrainConfig, link: LinkParams, sim: SimulationSettings):
        self.cfg = cfg
        self.link = link
        self.sim = sim
        self._pool: dict[int, Batch] = {}

    def transmission(self, index: int) -> Transmission:
        return transmit(self.link, self.sim, self.cfg.batch_symbols, batch_seed(self.cfg.seed, index))

    def batch(self, iteration: int) -> Batch:
        if self.cfg.batch_pool == 0:
            return Batch.from_transmission(self.transmission(iteration))
        slot = iteration % self.cfg.batch_pool
        if slot not in self._pool:
            self._pool[slot] = Batch.from_transmission(self.transmission(slot))
        return self._pool[slot]


@dataclass
class TrainState:
    """Where a training run stands."""

    bank: FilterBank
    iteration: int = 0
    loss_history: list[tuple[int, float]] = field(default_factory=list)
    float_bank: FilterBank | None = None
    quantized_bank: QuantizedFilterBank | None = None


class Trainer:
    """Runs the prune and fake-quantization schedule of one TrainConfig."""

    def __init__(
        self,
        cfg: TrainConfig,
        link: LinkParams,
        sim: SimulationSettings,
        design: DesignSettings | None = None,
        initial_bank: FilterBank | None = None,
    ):
        self.cfg = cfg
        self.sim = sim
        self.link = link.with_power(cfg.launch_power_dbm) if cfg.launch_power_dbm is not None else link
        if initial_bank is None:
            initial_bank = design_bank(
                self.link,
                cfg.initial_taps,
                sim.dbp_sample_rate,
                DesignMethod.LSCO,
                settings=design,
                rolloff=sim.rolloff,
                samples_per_symbol=sim.dbp_samples_per_symbol,
            )
        torch.manual_seed(cfg.seed)
        self.network = DbpNetwork(
            initial_bank,
            (span_gamma(self.link),) * (initial_bank.num_filters - 1),
            sim,
            nonlinearity=cfg.nonlinearity,
            taylor_sign=cfg.taylor_sign,
            train_nonlinear_scales=cfg.train_nonlinear_scales,
        )
        self.optimizer = torch.optim.Adam(self.network.trainable_parameters(), lr=cfg.learning_rate)
        self.scheduler = torch.optim.lr_scheduler.ExponentialLR(self.optimizer, gamma=cfg.lr_decay)
        self.batches = BatchSource(cfg, self.link, sim)
        self.state = TrainState(bank=initial_bank)
        self._below_reference = 0

    def step(self, iteration: int) -> float:
        """One SGD update; returns the batch effective SNR in dB before the update."""
        batch = self.batches.batch(iteration)
        self.optimizer.zero_grad(set_to_none=True)
        value = self.network.backward_checked(batch, iteration)
        self.optimizer.step()
        # Adam moments would otherwise move masked taps
        self.network.apply_mask()
        self.scheduler.step()
        return 10.0 * math.log10(-float(value))

    def _start_fake_quant(self) -> None:
        self.state.float_bank = self.network.float_bank()
        self.network.enable_fake_quant(self.cfg.coeff_bits)
        for group in self.optimizer.param_groups:
            group["lr"] = self.cfg.fakequant_lr

    def _check_divergence(self, iteration: int, snr_db: float) -> None:
        reference = self.state.loss_history[0][1]
        if snr_db < reference - self.cfg.divergence_db:
            self._below_reference += 1
        else:
            self._below_reference = 0
        if self._below_reference >= self.cfg.divergence_patience:
            raise TrainingDivergedError(iteration, reference, snr_db)

    def quantized_bank(self) -> QuantizedFilterBank:
        """Round the latent taps with the exponents frozen at fake-quant start."""
        return quantize_bank(
            self.network.float_bank(),
            FixedFormat(word_bits=self.cfg.coeff_bits),
            scale_exps=self.network.scale_exps,
        )

    def checkpoint(self, directory: Path | str) -> Path:
        return save_checkpoint(
            directory,
            self.network.float_bank(),
            self.state.iteration,
            self.optimizer.state_dict(),
            self.network.mask,
            self.network.scale_exps,
        )

    def run(
        self,
        checkpoint_dir: Path | str | None = None,
        checkpoint_every: int | None = None,
    ) -> TrainState:
        """
        Train for ``cfg.total_iterations`` iterations.

        Raises:
            GradientError: on a non-finite gradient
            TrainingDivergedError: if quality stays far below the start
        """
        cfg = self.cfg
        schedule = dict(cfg.resolved_prune_schedule())
        fakequant_start = cfg.resolved_fakequant_start()
        total = cfg.max_iterations or cfg.total_iterations
        logger.info(
            f"Training {cfg.initial_taps} -> {cfg.target_taps} taps, {total} iterations, "
            f"{cfg.batch_symbols} symbols per batch"
        )

        for iteration in range(total):
            if iteration in schedule:
                self.network.prune(schedule[iteration])
            if iteration == fakequant_start:
                self._start_fake_quant()

            snr_db = self.step(iteration)
            self.state.iteration = iteration + 1
            self.state.loss_history.append((iteration, snr_db))
            self._check_divergence(iteration, snr_db)

            if iteration % cfg.log_every == 0:
                logger.info(f"iter {iteration:6d}  eff. SNR {snr_db:7.3f} dB  taps {2 * self.network.active_half + 1}")
            if checkpoint_dir is not None and checkpoint_every and (iteration + 1) % checkpoint_every == 0:
                self.checkpoint(checkpoint_dir)

        if self.state.float_bank is None:
            self.state.float_bank = self.network.float_bank()
            self.network.enable_fake_quant(cfg.coeff_bits)
        self.state.bank = self.network.float_bank()
        self.state.quantized_bank = self.quantized_bank()
        if checkpoint_dir is not None:
            self.checkpoint(checkpoint_dir)
        return self.state


def train(
    cfg: TrainConfig,
    link: LinkParams,
    sim: SimulationSettings | None = None,
    design: DesignSettings | None = None,
) -> tuple[FilterBank, QuantizedFilterBank, list[tuple[int, float]]]:
    """
    Returns:
        (float bank before fake quantization, quantized bank, loss history)
    """
    state = Trainer(cfg, link, sim or SimulationSettings(), design).run()
    return state.float_bank, state.quantized_bank, state.loss_history
