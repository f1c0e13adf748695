"""Training checkpoints and loss-history export."""

import logging
from pathlib import Path
from typing import Any

import pandas as pd
import torch

from ..core.exceptions import SerializationError
from ..core.models import FilterBank
from ..storage.bank_store import load_bank, save_bank

logger = logging.getLogger(__name__)

BANK_FILE = "bank.json"
STATE_FILE = "optimizer.pt"
HISTORY_COLUMNS = ["iteration", "eff_snr_db"]


def save_checkpoint(
    directory: Path | str,
    bank: FilterBank,
    iteration: int,
    optimizer_state: dict[str, Any],
    mask: torch.Tensor,
    scale_exps: list[int] | None = None,
) -> Path:
    """Write the latent bank as JSON plus the optimizer state next to it."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    save_bank(bank, directory / BANK_FILE)
    torch.save(
        {
            "iteration": iteration,
            "optimizer": optimizer_state,
            "mask": mask.detach().clone(),
            "scale_exps": scale_exps,
        },
        directory / STATE_FILE,
    )
    logger.debug(f"Checkpoint at iteration {iteration} -> {directory}")
    return directory


def load_checkpoint(directory: Path | str) -> tuple[FilterBank, dict[str, Any]]:
    """Bank plus the saved training state (iteration, optimizer, mask, scale_exps)."""
    directory = Path(directory)
    state_path = directory / STATE_FILE
    if not state_path.exists():
        raise SerializationError(str(state_path), "checkpoint state not found")
    bank = load_bank(directory / BANK_FILE)
    state = torch.load(state_path, weights_only=False)
    return bank, state


def write_loss_history(history: list[tuple[int, float]], path: Path | str) -> Path:
    """Loss history as CSV: iteration, eff_snr_db."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(history, columns=HISTORY_COLUMNS).to_csv(path, index=False, float_format="%.8g")
    return path


def read_loss_history(path: Path | str) -> list[tuple[int, float]]:
    frame = pd.read_csv(path)
    return [(int(row.iteration), float(row.eff_snr_db)) for row in frame.itertuples(index=False)]
