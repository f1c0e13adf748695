"""
Launch-power sweeps over DBP variants.

Every (power, seed) pair is one job: a single transmission is simulated and
all variants equalize the same received field. Jobs may run on a thread
pool; rows are sorted before writing, so the CSV does not depend on
scheduling.
"""

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import pandas as pd

from ..channel.link import Transmission, transmit
from ..core.config import Settings, get_settings
from ..core.exceptions import CellFailure, TdDbpError
from ..core.models import (
    ExperimentSpec,
    FilterBank,
    QuantConfig,
    QuantizedFilterBank,
    VariantSpec,
)
from ..core.types import BankSource, CellStatus, Nonlinearity, TaylorSign
from ..dbp.engine import build_config
from ..dbp.receiver import evaluate, evaluate_ideal
from ..filters.design import design_bank
from ..fixedpoint.coefficients import quantize_bank
from ..learn.checkpoints import write_loss_history
from ..learn.trainer import Trainer
from ..storage.bank_store import load_any_bank
from .spec import load_spec, resolve_bank_path, spec_hash, with_seed

logger = logging.getLogger(__name__)

RESULT_COLUMNS = [
    "variant",
    "power_dbm",
    "seed",
    "eff_snr_db",
    "ber",
    "n_symbols",
    "spec_hash",
    "commit",
    "status",
]
RESULTS_FILE = "results.csv"
VARIANTS_FILE = "variants.json"


@dataclass(frozen=True)
class PreparedVariant:
    """A variant with its bank resolved."""

    name: str
    ideal: bool = False
    bank: FilterBank | None = None
    quantized_bank: QuantizedFilterBank | None = None
    quant: QuantConfig | None = None
    nonlinearity: Nonlinearity = Nonlinearity.TAYLOR1
    taylor_sign: TaylorSign = TaylorSign.COMPENSATING

    def describe(self) -> dict[str, Any]:
        """Sidecar entry used by compare_report for cost proxies."""
        coeff_bits = None
        if self.quant is not None:
            coeff_bits = self.quantized_bank.word_bits if self.quantized_bank else self.quant.coeff_bits
        elif self.quantized_bank is not None:
            coeff_bits = self.quantized_bank.word_bits
        return {
            "ideal": self.ideal,
            "taps": None if self.bank is None else self.bank.num_taps,
            "signal_bits": None if self.quant is None else self.quant.signal_bits,
            "coeff_bits": coeff_bits,
            "nonlinearity": self.nonlinearity.value,
        }


@dataclass
class ResultSet:
    """Rows of one sweep plus the per-variant descriptions."""

    rows: pd.DataFrame
    variants: dict[str, dict[str, Any]] = field(default_factory=dict)
    label: str = "run"

    @property
    def failed(self) -> list[str]:
        bad = self.rows[self.rows["status"] != "ok"]
        return [f"{r.variant}@{r.power_dbm:+g}dBm/seed{r.seed}" for r in bad.itertuples(index=False)]

    def write(self, out_dir: Path | str) -> Path:
        """results.csv plus the variants.json sidecar."""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / RESULTS_FILE
        self.rows.to_csv(path, index=False, float_format="%.8g")
        (out_dir / VARIANTS_FILE).write_text(json.dumps(self.variants, indent=2, sort_keys=True), encoding="utf-8")
        logger.info(f"Wrote {len(self.rows)} rows to {path}")
        return path

    @classmethod
    def read(cls, path: Path | str) -> "ResultSet":
        """Load a results CSV (or its directory) and the sidecar if present."""
        path = Path(path)
        if path.is_dir():
            path = path / RESULTS_FILE
        rows = pd.read_csv(path, dtype={"variant": str, "status": str, "spec_hash": str, "commit": str})
        sidecar = path.parent / VARIANTS_FILE
        variants = json.loads(sidecar.read_text(encoding="utf-8")) if sidecar.exists() else {}
        return cls(rows=rows, variants=variants, label=path.parent.name or path.stem)


class ExperimentRunner:
    """Prepares every variant's bank once, then runs the sweep."""

    def __init__(
        self,
        spec: ExperimentSpec,
        base_dir: Path | str = ".",
        threads: int = 1,
        commit: str = "unknown",
        out_dir: Path | str | None = None,
    ):
        self.spec = spec
        self.base_dir = Path(base_dir)
        self.threads = max(1, threads)
        self.commit = commit
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.hash = spec_hash(spec)
        self._learned: tuple[FilterBank, QuantizedFilterBank] | None = None

    # -- variant preparation -------------------------------------------------

    def _learned_banks(self) -> tuple[FilterBank, QuantizedFilterBank]:
        if self._learned is None:
            trainer = Trainer(self.spec.train, self.spec.link, self.spec.simulation, self.spec.design)
            state = trainer.run()
            self._learned = (state.float_bank, state.quantized_bank)
            if self.out_dir is not None:
                write_loss_history(state.loss_history, self.out_dir / "loss_history.csv")
        return self._learned

    def _design(self, variant: VariantSpec) -> FilterBank:
        sim = self.spec.simulation
        return design_bank(
            self.spec.link,
            variant.taps,
            sim.dbp_sample_rate,
            variant.design_method,
            settings=self.spec.design,
            rolloff=sim.rolloff,
            samples_per_symbol=sim.dbp_samples_per_symbol,
        )

    def prepare(self, variant: VariantSpec) -> PreparedVariant:
        common = {
            "name": variant.name,
            "quant": variant.quant,
            "nonlinearity": variant.nonlinearity,
            "taylor_sign": variant.taylor_sign,
        }
        if variant.source is BankSource.IDEAL:
            return PreparedVariant(name=variant.name, ideal=True, nonlinearity=variant.nonlinearity)
        if variant.source is BankSource.LSCO:
            return PreparedVariant(bank=self._design(variant), **common)
        if variant.source is BankSource.LEARNED:
            float_bank, quantized = self._learned_banks()
            if variant.quant is None:
                return PreparedVariant(bank=float_bank, **common)
            if variant.quant.coeff_bits != quantized.word_bits:
                # Plain rounding of the float bank to the requested width
                quantized = quantize_bank(float_bank, variant.quant.coeff_format, variant.quant.rounding)
            return PreparedVariant(bank=quantized.to_bank(), quantized_bank=quantized, **common)

        loaded = load_any_bank(resolve_bank_path(self.base_dir, variant.path))
        if isinstance(loaded, QuantizedFilterBank):
            return PreparedVariant(bank=loaded.to_bank(), quantized_bank=loaded, **common)
        return PreparedVariant(bank=loaded, **common)

    # -- sweep -----------------------------------------------------------------

    def _evaluate(self, variant: PreparedVariant, transmission: Transmission, link) -> tuple[float, float]:
        sim = self.spec.simulation
        if variant.ideal:
            ideal_link = link if variant.nonlinearity is not Nonlinearity.OFF else link.model_copy(update={"gamma": 0.0})
            metrics = evaluate_ideal(transmission, ideal_link, sim)
        else:
            cfg = build_config(
                variant.bank,
                link,
                variant.nonlinearity,
                variant.taylor_sign,
                quant=variant.quant,
                quantized_bank=variant.quantized_bank,
            )
            metrics = evaluate(transmission, cfg, sim)
        return metrics.effective_snr_db, metrics.ber

    def _row(self, variant: str, power: float, seed: int, snr: float, ber: float, status: CellStatus) -> dict[str, Any]:
        return {
            "variant": variant,
            "power_dbm": power,
            "seed": seed,
            "eff_snr_db": snr,
            "ber": ber,
            "n_symbols": self.spec.symbols_per_point,
            "spec_hash": self.hash,
            "commit": self.commit,
            "status": status,
        }

    def _run_cell(self, variants: list[PreparedVariant], power: float, seed: int) -> list[dict[str, Any]]:
        link = self.spec.link.with_power(power)
        try:
            transmission = transmit(link, self.spec.simulation, self.spec.symbols_per_point, seed)
        except (TdDbpError, ArithmeticError, ValueError) as e:
            logger.warning(f"Transmission failed at {power:+g} dBm, seed {seed}: {e}")
            return [self._row(v.name, power, seed, math.nan, math.nan, "failed") for v in variants]

        rows = []
        for variant in variants:
            try:
                snr, ber = self._evaluate(variant, transmission, link)
                rows.append(self._row(variant.name, power, seed, snr, ber, "ok"))
            except (TdDbpError, ArithmeticError, ValueError) as e:
                logger.warning(f"{variant.name} failed at {power:+g} dBm, seed {seed}: {e}")
                rows.append(self._row(variant.name, power, seed, math.nan, math.nan, "failed"))
        logger.info(f"Cell {power:+g} dBm / seed {seed} done")
        return rows

    def run(self) -> ResultSet:
        """Run every cell; failed cells are kept as rows with status 'failed'."""
        variants = [self.prepare(v) for v in self.spec.variants]
        cells = [(power, seed) for power in self.spec.sweep_dbm for seed in self.spec.seeds]
        logger.info(
            f"Sweep {self.spec.name!r}: {len(variants)} variants x {len(cells)} cells, "
            f"{self.threads} thread(s)"
        )

        if self.threads == 1:
            results = [self._run_cell(variants, power, seed) for power, seed in cells]
        else:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                futures = [pool.submit(self._run_cell, variants, power, seed) for power, seed in cells]
                results = [f.result() for f in futures]

        order = {v.name: i for i, v in enumerate(variants)}
        rows = sorted(
            (row for cell in results for row in cell),
            key=lambda r: (order[r["variant"]], r["power_dbm"], r["seed"]),
        )
        return ResultSet(
            rows=pd.DataFrame(rows, columns=RESULT_COLUMNS),
            variants={v.name: v.describe() for v in variants},
            label=self.spec.name,
        )


def run_experiment(
    spec_path: Path | str,
    out_dir: Path | str,
    threads: int | None = None,
    seed: int | None = None,
    settings: Settings | None = None,
) -> ResultSet:
    """
    Load a spec, run its sweep and write results.csv to ``out_dir``.

    Raises:
        SpecError: for an invalid spec
        CellFailure: after writing, if any cell failed
    """
    settings = settings or get_settings()
    spec_path = Path(spec_path)
    spec = load_spec(spec_path)
    if seed is not None:
        spec = with_seed(spec, seed)

    runner = ExperimentRunner(
        spec,
        base_dir=spec_path.parent,
        threads=threads if threads is not None else settings.runtime.threads,
        commit=settings.commit_stamp,
        out_dir=out_dir,
    )
    result = runner.run()
    result.write(out_dir)
    if result.failed:
        raise CellFailure(result.failed)
    return result
