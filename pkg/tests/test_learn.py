"""Tests for the differentiable DBP, fake quantization and training."""

import math

import numpy as np
import pytest
import torch

from src.channel.link import transmit
from src.core.exceptions import GradientError, SerializationError, TrainingDivergedError
from src.core.models import FixedFormat, LinkParams, SimulationSettings, TrainConfig
from src.dbp.engine import build_config, dbp_run, span_gamma
from src.dbp.receiver import evaluate
from src.filters.design import design_bank
from src.fixedpoint.coefficients import quantize_bank
from src.learn.checkpoints import load_checkpoint, read_loss_history, save_checkpoint, write_loss_history
from src.learn.fake_quant import fake_quantize, fake_quantize_real
from src.learn.network import Batch, DbpNetwork, effective_snr_linear, gradient, loss
from src.learn.trainer import BatchSource, Trainer, batch_seed, train
from src.signals.metrics import effective_snr


@pytest.fixture
def three_span_link() -> LinkParams:
    return LinkParams(num_spans=3, launch_power_dbm=2.0)


@pytest.fixture
def small_network(three_span_link, fast_sim) -> DbpNetwork:
    bank = design_bank(three_span_link, 5, fast_sim.dbp_sample_rate)
    return DbpNetwork(bank, (span_gamma(three_span_link),) * 3, fast_sim)


@pytest.fixture
def small_batch(three_span_link, fast_sim) -> Batch:
    return Batch.from_transmission(transmit(three_span_link, fast_sim, 2048, seed=17))


def _tiny_train_config(**overrides) -> TrainConfig:
    values = {
        "initial_taps": 9,
        "target_taps": 7,
        "batch_symbols": 512,
        "prune_interval": 2,
        "fakequant_iterations": 500,
        "batch_pool": 2,
        "seed": 3,
    }
    values.update(overrides)
    return TrainConfig(**values)


class TestFakeQuantize:
    """Tests for straight-through fake quantization."""

    def test_forward_rounds_and_saturates(self):
        x = torch.tensor([0.1, 0.13, 0.125, -0.125, 5.0, -3.0], dtype=torch.float64)
        y = fake_quantize_real(x, 0.25, 4)
        assert y.tolist() == [0.0, 0.25, 0.25, 0.0, 1.75, -2.0]

    def test_straight_through_gradient(self):
        """Identity inside the range, zero where saturated."""
        x = torch.tensor([0.1, 0.13, 5.0, -3.0], dtype=torch.float64, requires_grad=True)
        fake_quantize_real(x, 0.25, 4).sum().backward()
        assert x.grad.tolist() == [1.0, 1.0, 0.0, 0.0]

    def test_complex_parts_independent(self):
        taps = torch.tensor([0.3 - 0.2j], dtype=torch.complex128)
        y = fake_quantize(taps, FixedFormat(word_bits=6, scale_exp=-6))
        assert y.real.item() == pytest.approx(19 / 64)
        assert y.imag.item() == pytest.approx(-13 / 64)


class TestNetwork:
    """Tests for the torch forward pass and its gradients."""

    def test_matches_numpy_datapath(self, three_span_link, fast_sim, small_batch):
        """The torch cascade reproduces the float numpy datapath."""
        bank = design_bank(three_span_link, 5, fast_sim.dbp_sample_rate)
        network = DbpNetwork(bank, (span_gamma(three_span_link),) * 3, fast_sim)
        received = transmit(three_span_link, fast_sim, 2048, seed=17).received
        expected = dbp_run(received, build_config(bank, three_span_link)).samples
        with torch.no_grad():
            actual = network.propagate(small_batch.received).numpy()
        np.testing.assert_allclose(actual, expected, rtol=0, atol=1e-12)

    def test_loss_is_minus_snr(self, small_network, small_batch):
        with torch.no_grad():
            equalized = small_network.equalize(small_batch.received).numpy()
        edge = small_network.edge
        reference = small_batch.symbols.numpy()[edge:-edge]
        snr_db = effective_snr(equalized, reference)
        assert -loss(small_network, small_batch) == pytest.approx(10.0 ** (snr_db / 10.0), rel=1e-9)

    def test_finite_difference_gradient(self, small_network, small_batch):
        """Analytic gradients match central differences (3 spans, T=5, 2048 symbols)."""
        tap_grad, scale_grad = gradient(small_network, small_batch)
        analytic = np.concatenate([np.stack([tap_grad.real, tap_grad.imag], axis=-1).ravel(), scale_grad])
        params = [small_network.taps, small_network.nl_scales]

        numeric = []
        step = 1e-6
        for param in params:
            flat = param.data.view(-1)
            for i in range(flat.numel()):
                original = flat[i].item()
                flat[i] = original + step
                upper = loss(small_network, small_batch)
                flat[i] = original - step
                lower = loss(small_network, small_batch)
                flat[i] = original
                numeric.append((upper - lower) / (2 * step))

        numeric = np.array(numeric)
        scale = np.max(np.abs(analytic))
        np.testing.assert_allclose(analytic, numeric, rtol=1e-5, atol=1e-6 * scale)

    def test_mask_matches_tap_layout(self, small_network):
        """One mask entry per real and imaginary tap part."""
        assert small_network.mask.shape == small_network.taps.shape == (4, 3, 2)
        small_network.prune(1)
        assert torch.all(small_network.mask[:, 2, :] == 0)
        assert torch.all(small_network.mask[:, :2, :] == 1)

    def test_pruned_positions_report_zero(self, small_network, small_batch):
        small_network.prune(1)
        tap_grad, _ = gradient(small_network, small_batch)
        assert np.all(tap_grad[:, 2] == 0)
        assert small_network.float_bank().num_taps == 3

    def test_prune_too_far(self, small_network):
        small_network.prune(2)
        with pytest.raises(ValueError):
            small_network.prune(1)

    def test_fake_quant_freezes_exponents(self, small_network):
        exps = small_network.enable_fake_quant(6)
        assert len(exps) == small_network.num_filters
        taps = small_network.complex_taps().detach().numpy()
        for index, exp in enumerate(exps):
            codes = np.ldexp(taps[index].real, -exp)
            np.testing.assert_array_equal(codes, np.round(codes))
            assert np.all(np.abs(codes) <= 32)

    def test_scales_frozen_when_not_trained(self, three_span_link, fast_sim, small_batch):
        bank = design_bank(three_span_link, 5, fast_sim.dbp_sample_rate)
        network = DbpNetwork(bank, (span_gamma(three_span_link),) * 3, fast_sim, train_nonlinear_scales=False)
        assert network.trainable_parameters() == [network.taps]
        _, scale_grad = gradient(network, small_batch)
        assert np.all(scale_grad == 0)

    def test_non_finite_gradient_is_diagnosed(self, small_network, small_batch):
        with torch.no_grad():
            small_network.nl_scales[1] = math.inf
        with pytest.raises(GradientError):
            small_network.backward_checked(small_batch, iteration=4)

    def test_effective_snr_linear_degenerate(self):
        from src.core.exceptions import DegenerateBatchError

        with pytest.raises(DegenerateBatchError):
            effective_snr_linear(torch.zeros(4, dtype=torch.complex128), torch.ones(4, dtype=torch.complex128))


class TestCheckpoints:
    """Tests for checkpoint and loss-history files."""

    def test_checkpoint_round_trip(self, small_network, tmp_path):
        optimizer = torch.optim.Adam(small_network.trainable_parameters(), lr=1e-3)
        bank = small_network.float_bank()
        save_checkpoint(tmp_path, bank, 12, optimizer.state_dict(), small_network.mask, [-5, -6, -6, -5])
        loaded, state = load_checkpoint(tmp_path)
        for original, restored in zip(bank.filters, loaded.filters):
            np.testing.assert_array_equal(original.unique_taps, restored.unique_taps)
        assert state["iteration"] == 12
        assert state["scale_exps"] == [-5, -6, -6, -5]
        assert torch.equal(state["mask"], small_network.mask)

    def test_missing_state(self, tmp_path):
        with pytest.raises(SerializationError):
            load_checkpoint(tmp_path)

    def test_loss_history_round_trip(self, tmp_path):
        history = [(0, 12.5), (1, 12.75), (2, 13.125)]
        path = write_loss_history(history, tmp_path / "loss_history.csv")
        assert read_loss_history(path) == history


class TestTrainer:
    """Tests for the training schedule."""

    def test_batch_seed_deterministic(self):
        assert batch_seed(3, 5) == batch_seed(3, 5)
        assert batch_seed(3, 5) != batch_seed(3, 6)

    def test_batch_pool_reused(self, fast_sim):
        cfg = _tiny_train_config()
        source = BatchSource(cfg, LinkParams(num_spans=2), fast_sim)
        assert source.batch(0) is source.batch(2)
        assert source.batch(0) is not source.batch(1)

    def test_step_keeps_mask(self, fast_sim):
        trainer = Trainer(_tiny_train_config(), LinkParams(num_spans=2), fast_sim)
        trainer.network.prune(1)
        snr_db = trainer.step(0)
        assert math.isfinite(snr_db)
        assert torch.all(trainer.network.taps[:, 4, :] == 0)

    def test_fake_quant_start_snapshots_float_bank(self, fast_sim):
        cfg = _tiny_train_config()
        trainer = Trainer(cfg, LinkParams(num_spans=2), fast_sim)
        trainer._start_fake_quant()
        assert trainer.state.float_bank.num_taps == 9
        assert trainer.network.fake_quant_enabled
        assert all(group["lr"] == cfg.fakequant_lr for group in trainer.optimizer.param_groups)
        qbank = trainer.quantized_bank()
        assert qbank.word_bits == cfg.coeff_bits
        assert [f.fmt.scale_exp for f in qbank.filters] == trainer.network.scale_exps

    def test_divergence_detected(self, fast_sim):
        cfg = _tiny_train_config(divergence_patience=2)
        trainer = Trainer(cfg, LinkParams(num_spans=2), fast_sim)
        trainer.state.loss_history.append((0, 20.0))
        trainer._check_divergence(1, 5.0)
        with pytest.raises(TrainingDivergedError):
            trainer._check_divergence(2, 5.0)

    def test_launch_power_override(self, fast_sim):
        trainer = Trainer(_tiny_train_config(launch_power_dbm=3.0), LinkParams(num_spans=2), fast_sim)
        assert trainer.link.launch_power_dbm == 3.0

    @pytest.mark.slow
    def test_train_schedule(self, fast_sim, tmp_path):
        """Full schedule: prune to the target length, fake-quantize, checkpoint."""
        cfg = _tiny_train_config()
        link = LinkParams(num_spans=2)
        trainer = Trainer(cfg, link, SimulationSettings(forward_steps_per_span=2))
        state = trainer.run(checkpoint_dir=tmp_path / "ckpt")
        assert len(state.loss_history) == cfg.total_iterations
        assert state.float_bank.num_taps == 7
        assert state.quantized_bank.num_taps == 7
        assert state.quantized_bank.word_bits == cfg.coeff_bits
        assert all(math.isfinite(snr) for _, snr in state.loss_history)
        _, saved = load_checkpoint(tmp_path / "ckpt")
        assert saved["iteration"] == cfg.total_iterations

        float_bank, quantized, history = train(cfg, link, SimulationSettings(forward_steps_per_span=2))
        assert [snr for _, snr in history] == pytest.approx([snr for _, snr in state.loss_history], rel=1e-9)
        assert float_bank.num_taps == 7
        assert quantized.num_taps == 7


# Reduced desk link: 4 spans, 25 -> 15 taps, one pair every 100 iterations
OUTCOME_POOL = 8
OUTCOME_PRUNE_INTERVAL = 100


@pytest.fixture(scope="module")
def trained_outcome() -> dict:
    """One 25 -> 15 tap run with 6-bit fine-tuning, plus a 5-bit fine-tuning of its float bank."""
    link = LinkParams(num_spans=4, launch_power_dbm=2.0)
    sim = SimulationSettings(forward_steps_per_span=5)
    common = {"batch_symbols": 2048, "batch_pool": OUTCOME_POOL, "fakequant_iterations": 500, "seed": 5}

    six_bit = TrainConfig(
        initial_taps=25, target_taps=15, prune_interval=OUTCOME_PRUNE_INTERVAL, coeff_bits=6, **common
    )
    state = Trainer(six_bit, link, sim).run()

    five_bit = TrainConfig(
        initial_taps=15, target_taps=15, prune_schedule=(), fakequant_start=0, coeff_bits=5, **common
    )
    five_state = Trainer(five_bit, link, sim, initial_bank=state.float_bank).run()

    return {
        "link": link,
        "sim": sim,
        "cfg": six_bit,
        "state": state,
        "five_bit": five_state.quantized_bank,
        "evaluation": transmit(link, sim, 16384, seed=99),
    }


def _snr(outcome: dict, bank) -> float:
    link, sim = outcome["link"], outcome["sim"]
    return evaluate(outcome["evaluation"], build_config(bank, link), sim).effective_snr_db


@pytest.mark.slow
class TestTrainingOutcomes:
    """Quality of trained banks on a reduced desk-scale link."""

    def test_loss_decreases_over_first_hundred_iterations(self):
        """From the LS-CO start at -1 dBm the SNR on a fixed pool improves."""
        cfg = _tiny_train_config(
            initial_taps=25, target_taps=25, prune_schedule=(), batch_symbols=2048, batch_pool=10
        )
        trainer = Trainer(cfg, LinkParams(num_spans=4, launch_power_dbm=-1.0), SimulationSettings(forward_steps_per_span=5))
        snr = [trainer.step(iteration) for iteration in range(100)]
        assert np.mean(snr[90:]) > np.mean(snr[:10])

    def test_pruning_recovers_before_next_event(self, trained_outcome):
        """Each prune event is recovered to within 0.5 dB before the next one."""
        cfg = trained_outcome["cfg"]
        snr = np.array([value for _, value in trained_outcome["state"].loss_history])
        for event, _ in cfg.resolved_prune_schedule():
            before = snr[event - OUTCOME_POOL:event].mean()
            end = event + OUTCOME_PRUNE_INTERVAL
            assert snr[end - OUTCOME_POOL:end].mean() >= before - 0.5

    def test_learned_fifteen_taps_match_lsco_twentyfive(self, trained_outcome):
        """Learned 15-tap float bank is no worse than the 25-tap LS-CO bank (0.1 dB tolerance)."""
        link, sim = trained_outcome["link"], trained_outcome["sim"]
        learned = _snr(trained_outcome, trained_outcome["state"].float_bank)
        lsco = _snr(trained_outcome, design_bank(link, 25, sim.dbp_sample_rate))
        assert trained_outcome["state"].float_bank.num_taps == 15
        assert learned >= lsco - 0.1

    def test_six_bit_penalty(self, trained_outcome):
        state = trained_outcome["state"]
        penalty = _snr(trained_outcome, state.float_bank) - _snr(trained_outcome, state.quantized_bank.to_bank())
        assert penalty <= 0.2

    def test_five_bit_penalty(self, trained_outcome):
        state = trained_outcome["state"]
        assert trained_outcome["five_bit"].word_bits == 5
        penalty = _snr(trained_outcome, state.float_bank) - _snr(trained_outcome, trained_outcome["five_bit"].to_bank())
        assert penalty <= 1.0

    def test_joint_fine_tuning_beats_independent_rounding(self, trained_outcome):
        """Fake-quantized fine-tuning is at least as good as rounding each float filter alone."""
        state = trained_outcome["state"]
        independent = quantize_bank(state.float_bank, FixedFormat(word_bits=6))
        joint = _snr(trained_outcome, state.quantized_bank.to_bank())
        assert joint >= _snr(trained_outcome, independent.to_bank()) - 0.05
