import numpy as np
import pandas as pd
import pytest
from omegaconf import DictConfig

from bbdpd.chain.passband import PassbandChain
from bbdpd.chain.volterra import CtVolterraModel, delay_in_samples
from bbdpd.dpd.structures import NoCompensation, PlainVolterra, ProposedLV
from bbdpd.experiments.config import ExperimentConfig
from bbdpd.experiments.model_check import MODEL_CHECK_COLUMNS, run_model_check
from bbdpd.experiments.sources import (
    QAM64_LEVELS,
    gaussian_source,
    ofdm_demodulate,
    ofdm_modulate,
    oversampled_source,
    qam64_source,
)
from bbdpd.experiments.sweep import (
    SWEEP_COLUMNS,
    TABLE1_COLUMNS,
    ofdm_roundtrip,
    reproduce_table1,
    run_sweep,
    structure_counts,
    training_frames,
)
from bbdpd.signals.core import evm_db, relative_error
from bbdpd.utils.io_utils import save_csv


def desk_config(tmp_path, **overrides) -> ExperimentConfig:
    values = dict(L=64, n_symbols=256, output_dir=str(tmp_path), record_runtime=False)
    values.update(overrides)
    return ExperimentConfig(**values)


def test_qam64_power() -> None:
    u = qam64_source(4096, 1)
    assert np.mean(np.abs(u.samples) ** 2) == pytest.approx(1.0, rel=0.03)


def test_qam64_points_and_determinism() -> None:
    u = qam64_source(1, 7)
    assert len(u) == 1
    scaled = u.samples * np.sqrt(42)
    assert np.isin(np.round(scaled.real), QAM64_LEVELS).all()
    assert np.isin(np.round(scaled.imag), QAM64_LEVELS).all()
    np.testing.assert_allclose(scaled, np.round(scaled.real) + 1j * np.round(scaled.imag), atol=1e-12)

    np.testing.assert_array_equal(qam64_source(128, 3).samples, qam64_source(128, 3).samples)
    assert not np.array_equal(qam64_source(128, 3).samples, qam64_source(128, 4).samples)
    with pytest.raises(ValueError):
        qam64_source(0, 0)


def test_qam64_symbol_rate() -> None:
    assert qam64_source(8, 0, symbol_rate=2e6).symbol_rate == 2e6


def test_gaussian_power() -> None:
    w = gaussian_source(8192, 0)
    assert np.mean(np.abs(w.samples) ** 2) == pytest.approx(1.0, rel=0.05)


def test_oversampled_source_keeps_symbols() -> None:
    u = qam64_source(64, 2, symbol_rate=2.0)
    w = oversampled_source(u, 4)
    assert len(w) == 256
    assert w.symbol_rate == 8.0
    np.testing.assert_allclose(w.samples[::4], u.samples, atol=1e-12)

    spectrum = np.fft.fft(w.samples)
    bins = np.fft.fftfreq(256, d=1 / 256)
    assert np.max(np.abs(spectrum[np.abs(bins) > 32])) < 1e-9

    assert oversampled_source(u, 1) is u
    with pytest.raises(ValueError):
        oversampled_source(u, 0)


def test_ofdm_transforms_are_unitary_inverses() -> None:
    u = qam64_source(256, 5)
    w = ofdm_modulate(u, 64)
    assert np.linalg.norm(w.samples) == pytest.approx(np.linalg.norm(u.samples))
    assert relative_error(u, ofdm_demodulate(w, 64)) <= 1e-12
    with pytest.raises(ValueError):
        ofdm_modulate(u, 60)


@pytest.mark.parametrize(
    "overrides",
    [
        dict(L=21),
        dict(n_symbols=300),
        dict(n_train=100),
        dict(delta_list=[0.0]),
        dict(delta_list=[0.25]),
        dict(table1_delta=0.3),
        dict(tau_over_T=[-0.1, 0.2, 0.3]),
        dict(source_oversampling=0),
        dict(prune_tolerance=-0.01),
    ],
)
def test_experiment_config_validation(tmp_path, overrides) -> None:
    with pytest.raises(ValueError):
        desk_config(tmp_path, **overrides)


def test_experiment_config_defaults(tmp_path) -> None:
    cfg = desk_config(tmp_path)
    assert cfg.n_train == cfg.n_validate == 256
    assert cfg.delta_list == [0.02, 0.04, 0.06, 0.08, 0.1, 0.12, 0.14, 0.16, 0.18, 0.2]
    assert cfg.T == pytest.approx(5e-7)
    assert cfg.f_c == pytest.approx(2e7)
    assert cfg.params.M == 10 and cfg.params.L == 64
    assert cfg.taus == pytest.approx((0.1e-6, 0.15e-6, 0.2e-6))
    assert cfg.output_path.is_dir()


def test_distortion_is_snapped_to_the_grid(tmp_path) -> None:
    cfg = desk_config(tmp_path)
    F = cfg.distortion(0.1)
    assert F.terms[1].coefficient == -0.1
    samples = [delay_in_samples(tau, cfg.params.sample_rate) for tau in F.terms[1].delays]
    assert samples == [13, 19, 26]


def test_training_frames(tmp_path) -> None:
    cfg = desk_config(tmp_path)
    train, validate = training_frames(cfg)
    assert len(train) == len(validate) == 256
    assert not np.array_equal(train.samples, validate.samples)

    train_oversampled, _ = training_frames(desk_config(tmp_path, source_oversampling=4))
    assert len(train_oversampled) == 256


def test_run_sweep(tmp_path) -> None:
    structures = {
        "none": NoCompensation("none"),
        "volterra_1": PlainVolterra("volterra_1", m1=0, m2=2, degree=2),
        "proposed": ProposedLV("proposed", memory=1, degree=3, poly_order=2),
    }
    cfg = desk_config(tmp_path, n_symbols=1024, delta_list=[0.1, 0.02, 0.2], structures=structures)
    df = run_sweep(cfg)

    assert list(df.columns) == SWEEP_COLUMNS
    assert len(df) == 9
    assert list(df["delta"]) == [0.02] * 3 + [0.1] * 3 + [0.2] * 3
    assert list(df["structure"]) == ["none", "volterra_1", "proposed"] * 3
    assert (df["runtime_s"] == 0).all()

    proposed = df[df["structure"] == "proposed"]
    assert (proposed["n_coeffs"] == 210).all()
    assert (proposed["n_significant"] == 210).all()

    uncompensated = df[df["structure"] == "none"]["evm_db"].to_numpy()
    assert np.all(np.diff(uncompensated) > 0)
    assert (df[df["structure"] == "none"]["n_coeffs"] == 0).all()

    mild = df[df["delta"] == 0.02].set_index("structure")["evm_db"]
    assert mild["proposed"] < mild["none"]


def test_sweep_is_reproducible(tmp_path) -> None:
    structures = {"none": NoCompensation("none"), "proposed": ProposedLV("proposed")}
    cfg = desk_config(tmp_path, delta_list=[0.05], structures=structures)
    first = save_csv(run_sweep(cfg), tmp_path / "first.csv")
    second = save_csv(run_sweep(cfg), tmp_path / "second.csv")
    assert first.read_bytes() == second.read_bytes()


def test_sweep_needs_structures(tmp_path) -> None:
    with pytest.raises(ValueError):
        run_sweep(desk_config(tmp_path))


def test_small_distortion_limit(tmp_path) -> None:
    structures = {"none": NoCompensation("none"), "proposed": ProposedLV("proposed")}
    cfg = desk_config(tmp_path, delta_list=[1e-5], structures=structures)
    df = run_sweep(cfg)
    assert (df["evm_db"] <= -80).all()


def test_reproduce_table1(tmp_path) -> None:
    structures = {
        "none": NoCompensation("none"),
        "volterra_1": PlainVolterra("volterra_1", m1=0, m2=2, degree=5),
        "proposed": ProposedLV("proposed", memory=1, degree=3, poly_order=2),
    }
    cfg = desk_config(tmp_path, structures=structures)
    df = reproduce_table1(cfg)

    assert list(df.columns) == TABLE1_COLUMNS
    assert list(df["model"]) == ["volterra_1", "proposed"]
    assert list(df["n_coeffs"]) == [924, 210]
    assert (df["n_significant"] <= df["n_coeffs"]).all()
    assert (df["n_significant"] > 0).all()


def test_structure_counts() -> None:
    structures = {
        "none": NoCompensation("none"),
        "volterra_1": PlainVolterra("volterra_1", m1=0, m2=2, degree=5),
        "volterra_2": PlainVolterra("volterra_2", m1=0, m2=4, degree=5),
        "volterra_3": PlainVolterra("volterra_3", m1=2, m2=2, degree=5),
        "proposed": ProposedLV("proposed", memory=1, degree=3, poly_order=2),
    }
    df = structure_counts(structures)
    assert list(df["model"]) == ["volterra_1", "volterra_2", "volterra_3", "proposed"]
    assert list(df["n_coeffs"]) == [924, 6006, 6006, 210]


def test_ofdm_roundtrip_identity(tmp_path) -> None:
    cfg = desk_config(tmp_path)
    result = ofdm_roundtrip(64, CtVolterraModel.identity(), cfg)
    assert result.evm_without_dpd <= -80
    assert result.evm_with_dpd is None


def test_ofdm_is_more_sensitive_than_single_carrier(tmp_path) -> None:
    cfg = desk_config(tmp_path)
    F = cfg.distortion(0.02)
    ofdm = ofdm_roundtrip(64, F, cfg)

    _, validate_seed = cfg.seed_streams()
    u = qam64_source(cfg.n_symbols, validate_seed, symbol_rate=cfg.f_symb)
    single_carrier = evm_db(u, PassbandChain(F, cfg.params)(u))
    assert ofdm.evm_without_dpd > single_carrier


def test_ofdm_roundtrip_with_dpd(tmp_path) -> None:
    cfg = desk_config(tmp_path, n_symbols=1024)
    result = ofdm_roundtrip(64, cfg.distortion(0.02), cfg, ProposedLV("proposed"))
    assert result.evm_with_dpd < result.evm_without_dpd

    with pytest.raises(ValueError):
        ofdm_roundtrip(48, CtVolterraModel.identity(), cfg)


def test_run_model_check() -> None:
    df = run_model_check(n_trials=6, carrier_ratios=[4, 10], n_symbols=64, seed=3, L=64)
    assert list(df.columns) == MODEL_CHECK_COLUMNS
    assert list(df["trial"]) == list(range(6))
    assert list(df["M"]) == [4, 10] * 3
    assert (df["degree"] <= 3).all()
    assert (df["n_terms"] <= 3).all()
    assert df["rel_error"].max() <= 1e-6

    again = run_model_check(n_trials=6, carrier_ratios=[4, 10], n_symbols=64, seed=3, L=64)
    pd.testing.assert_frame_equal(df, again)


def test_experiment_config_from_cfg(cfg_sweep: DictConfig) -> None:
    cfg = ExperimentConfig.from_cfg(cfg_sweep.experiment, structures=cfg_sweep.structures)
    assert cfg.L == 64 and cfg.n_symbols == 256 and cfg.n_train == 256
    assert list(cfg.structures) == ["none", "volterra_1", "volterra_2", "volterra_3", "proposed", "ideal"]
    assert isinstance(cfg.structures["proposed"], ProposedLV)
    assert cfg.record_runtime is False
