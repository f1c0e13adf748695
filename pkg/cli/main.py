"""CLI entry point for the TD-DBP toolkit.

Usage:
    tddbp design --taps 25 --out banks/
    tddbp train --spec config/presets/desk.json --out runs/learned
    tddbp run --spec config/presets/desk.json --out runs/desk --threads 4
    tddbp compare runs/desk runs/desk_seed1 --baseline lsco_T25_9bit
    tddbp cost --taps 15 --taps 25 --crossover
"""

import logging
from pathlib import Path
from typing import Optional

import pandas as pd
import typer
from rich.console import Console
from rich.logging import RichHandler

from src import __version__
from src.core.config import Settings, get_settings, reload_settings
from src.core.exceptions import TdDbpError
from src.core.models import CostModel, FixedFormat, QuantConfig
from src.core.types import ComplexMultiplier, DesignMethod, FftCostModel
from src.dbp.complexity import estimate_crossover
from src.filters.design import cascade_ideal, cascade_response, default_passband_fraction, design_bank, inband_error
from src.fixedpoint.coefficients import quantize_bank
from src.fixedpoint.cost import cost_report
from src.harness.compare import compare_report
from src.harness.runner import ResultSet, run_experiment
from src.harness.spec import load_spec
from src.learn.checkpoints import write_loss_history
from src.learn.trainer import Trainer
from src.output.formatters import CSVFormatter, JSONFormatter, TableFormatter
from src.storage.bank_store import BankStore

# Initialize app
app = typer.Typer(
    name="tddbp",
    help="Time-domain digital backpropagation: design, training and sweeps",
    add_completion=False,
)

console = Console()


def setup_logging(verbose: bool = False) -> None:
    """Configure logging."""
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=console, show_time=False, show_path=False)],
    )


def _settings(path: Optional[Path]) -> Settings:
    try:
        return reload_settings(path) if path else get_settings()
    except TdDbpError as e:
        console.print(f"[red]Error: {e.message}[/]")
        raise typer.Exit(1)


def _fail(e: TdDbpError, verbose: bool) -> None:
    console.print(f"[red]Error: {e.message}[/]")
    if verbose:
        import traceback
        traceback.print_exc()
    raise typer.Exit(getattr(e, "exit_code", 1))


@app.command()
def design(
    taps: list[int] = typer.Option([25], "--taps", "-t", help="Filter length(s), odd"),
    out: Path = typer.Option(Path("banks"), "--out", "-o", help="Output directory"),
    method: str = typer.Option("lsco", "--method", help="Design method: lsco, ls"),
    coeff_bits: Optional[int] = typer.Option(
        None, "--coeff-bits", help="Also write a bank quantized to this many bits"
    ),
    settings_path: Optional[Path] = typer.Option(None, "--settings", help="Settings YAML"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Enable verbose logging"),
) -> None:
    """
    Emit LS-CO (or plain least-squares) CD filter banks for the configured link.
    """
    setup_logging(verbose)
    settings = _settings(settings_path)
    sim = settings.simulation
    try:
        design_method = DesignMethod(method)
    except ValueError:
        console.print(f"[red]Invalid design method: {method}[/]")
        raise typer.Exit(1)

    store = BankStore(out)
    passband = default_passband_fraction(sim.rolloff, sim.dbp_samples_per_symbol, settings.design.passband_guard)
    rows = []
    try:
        for num_taps in taps:
            bank = design_bank(
                settings.link,
                num_taps,
                sim.dbp_sample_rate,
                design_method,
                settings=settings.design,
                rolloff=sim.rolloff,
                samples_per_symbol=sim.dbp_samples_per_symbol,
            )
            name = f"{design_method.value}_T{num_taps}"
            store.save(name, bank)
            error = inband_error(cascade_response(bank), cascade_ideal(bank), passband)
            rows.append({"bank": name, "filters": bank.num_filters, "taps": num_taps, "cascade_rms_error": error})
            if coeff_bits is not None:
                quantized = quantize_bank(bank, FixedFormat(word_bits=coeff_bits))
                store.save(f"{name}_{coeff_bits}bit", quantized)
    except TdDbpError as e:
        _fail(e, verbose)

    console.print(TableFormatter(title=f"Designed banks -> {out}").format(pd.DataFrame(rows)))


@app.command()
def train(
    spec: Optional[Path] = typer.Option(None, "--spec", help="Experiment spec with a train section"),
    out: Path = typer.Option(Path("runs/train"), "--out", "-o", help="Output directory"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Override the training seed"),
    checkpoint_every: Optional[int] = typer.Option(
        None, "--checkpoint-every", help="Write a checkpoint every N iterations"
    ),
    settings_path: Optional[Path] = typer.Option(None, "--settings", help="Settings YAML"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Enable verbose logging"),
) -> None:
    """
    Jointly train all filters: prune to target length, then fake-quantize.
    """
    setup_logging(verbose)
    settings = _settings(settings_path)
    try:
        if spec is not None:
            experiment = load_spec(spec)
            if experiment.train is None:
                console.print(f"[red]Spec {spec} has no train section[/]")
                raise typer.Exit(2)
            cfg, link, sim, design_settings = experiment.train, experiment.link, experiment.simulation, experiment.design
        else:
            cfg, link, sim, design_settings = settings.training, settings.link, settings.simulation, settings.design
        if seed is not None:
            cfg = cfg.model_copy(update={"seed": seed})

        state = Trainer(cfg, link, sim, design_settings).run(
            checkpoint_dir=out / "checkpoint", checkpoint_every=checkpoint_every
        )
    except TdDbpError as e:
        _fail(e, verbose)

    store = BankStore(out)
    store.save("float_bank", state.float_bank)
    store.save("quantized_bank", state.quantized_bank)
    history_path = write_loss_history(state.loss_history, out / "loss_history.csv")
    final = state.loss_history[-1][1] if state.loss_history else float("nan")
    console.print(f"[green]Trained {cfg.initial_taps} -> {cfg.target_taps} taps[/], final eff. SNR {final:.2f} dB")
    console.print(f"  Banks: {out}  Loss history: {history_path}")


@app.command()
def run(
    spec: Path = typer.Option(..., "--spec", help="Experiment spec (JSON)"),
    out: Path = typer.Option(Path("runs/latest"), "--out", "-o", help="Output directory"),
    threads: Optional[int] = typer.Option(None, "--threads", "-j", help="Concurrent sweep cells"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Override the spec seeds"),
    settings_path: Optional[Path] = typer.Option(None, "--settings", help="Settings YAML"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Enable verbose logging"),
) -> None:
    """
    Run a launch-power sweep and write results.csv.

    Exit codes: 2 for an invalid spec, 3 if any sweep cell failed.
    """
    setup_logging(verbose)
    settings = _settings(settings_path)
    try:
        result = run_experiment(spec, out, threads=threads, seed=seed, settings=settings)
    except TdDbpError as e:
        # SpecError and CellFailure carry their own exit codes
        _fail(e, verbose)

    ok = result.rows[result.rows["status"] == "ok"]
    summary = ok.groupby(["variant", "power_dbm"], sort=False)["eff_snr_db"].mean().reset_index()
    console.print(TableFormatter(title=f"Effective SNR (dB), {out / 'results.csv'}").format(summary))


@app.command()
def compare(
    results: list[Path] = typer.Argument(..., help="Two or more result directories or results.csv files"),
    baseline: Optional[str] = typer.Option(None, "--baseline", "-b", help="Variant for proxy reduction"),
    output: str = typer.Option("table", "--output", "-o", help="Output format: table, json, csv"),
    save: Optional[Path] = typer.Option(None, "--save", "-s", help="Save output to file"),
    multiplier: str = typer.Option("mult4", "--multiplier", help="Complex multiplier: mult4, mult3"),
    settings_path: Optional[Path] = typer.Option(None, "--settings", help="Settings YAML"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Enable verbose logging"),
) -> None:
    """
    Peak effective SNR, optimal launch power and cost proxies per variant.
    """
    setup_logging(verbose)
    settings = _settings(settings_path)
    try:
        sets = [ResultSet.read(path) for path in results]
        summary = compare_report(
            sets,
            baseline=baseline,
            parallelism=settings.runtime.parallelism,
            multiplier=ComplexMultiplier(multiplier),
        )
    except (OSError, ValueError) as e:
        console.print(f"[red]Error: {e}[/]")
        raise typer.Exit(1)
    except TdDbpError as e:
        _fail(e, verbose)

    formatters = {"table": TableFormatter(title="Comparison"), "json": JSONFormatter(), "csv": CSVFormatter()}
    if output not in formatters:
        console.print(f"[red]Invalid output format: {output}[/]")
        raise typer.Exit(1)
    formatter = formatters[output]
    if save:
        formatter.format_to_file(summary, str(save))
        console.print(f"[green]Saved to {save}[/]")
    else:
        console.print(formatter.format(summary))


@app.command()
def cost(
    taps: list[int] = typer.Option([15, 25], "--taps", "-t", help="Filter length(s)"),
    signal_bits: int = typer.Option(9, "--signal-bits", help="Signal word length"),
    coeff_bits: list[int] = typer.Option([6, 9], "--coeff-bits", help="Coefficient word length(s)"),
    multiplier: str = typer.Option("mult4", "--multiplier", help="Complex multiplier: mult4, mult3"),
    crossover: bool = typer.Option(False, "--crossover", help="Also estimate the direct/FFT crossover"),
    fft_model: str = typer.Option("radix2", "--fft-model", help="FFT cost model: radix2, split_radix"),
    settings_path: Optional[Path] = typer.Option(None, "--settings", help="Settings YAML"),
) -> None:
    """
    Arithmetic-cost proxies per DBP step (relative units, not watts).
    """
    setup_logging(False)
    settings = _settings(settings_path)
    try:
        mult = ComplexMultiplier(multiplier)
        fft = FftCostModel(fft_model)
    except ValueError as e:
        console.print(f"[red]Error: {e}[/]")
        raise typer.Exit(1)

    rows = []
    try:
        for num_taps in taps:
            for bits in coeff_bits:
                report = cost_report(
                    num_taps,
                    QuantConfig.from_bits(signal_bits, bits),
                    parallelism=settings.runtime.parallelism,
                    multiplier=mult,
                    clock_hz=settings.runtime.clock_hz,
                )
                rows.append(
                    {
                        "taps": num_taps,
                        "coeff_bits": bits,
                        "complex_mults": report.complex_multipliers,
                        "real_mults": report.real_multipliers,
                        "adders": report.adders,
                        "proxy": report.area_power_proxy,
                        "proxy_per_bit": report.proxy_per_bit,
                    }
                )
    except TdDbpError as e:
        _fail(e, False)
    console.print(TableFormatter(title=f"Cost per DBP step, {signal_bits}-bit signal").format(pd.DataFrame(rows)))

    if crossover:
        report = estimate_crossover(cost_model=CostModel(fft=fft, multiplier=mult))
        console.print(f"Direct/FFT crossover ({fft.value}): [bold]{report.crossover_taps}[/] taps")


@app.command()
def version() -> None:
    """Show version information."""
    console.print(f"TD-DBP toolkit v{__version__}")


def main() -> None:
    """Main entry point."""
    app()


if __name__ == "__main__":
    main()
