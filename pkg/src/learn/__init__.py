"""Gradient-based joint optimization of the DBP filters."""

from .checkpoints import load_checkpoint, read_loss_history, save_checkpoint, write_loss_history
from .fake_quant import FakeQuantize, fake_quantize
from .network import Batch, DbpNetwork, effective_snr_linear, gradient, loss
from .trainer import BatchSource, Trainer, TrainState, train

__all__ = [
    "load_checkpoint",
    "read_loss_history",
    "save_checkpoint",
    "write_loss_history",
    "FakeQuantize",
    "fake_quantize",
    "Batch",
    "DbpNetwork",
    "effective_snr_linear",
    "gradient",
    "loss",
    "BatchSource",
    "Trainer",
    "TrainState",
    "train",
]
