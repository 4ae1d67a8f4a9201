import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbdpd.signals.core import (
    EVM_FLOOR_DB,
    CtSignal,
    DtSignal,
    FreqResponse,
    apply_freq_response,
    centered_bins,
    dft,
    evm_db,
    idft,
    relative_error,
)


def random_signal(seed: int, n: int) -> DtSignal:
    rng = np.random.default_rng(seed)
    return DtSignal(rng.standard_normal(n) + 1j * rng.standard_normal(n))


def test_dft_of_unit_sample() -> None:
    impulse = np.zeros(8)
    impulse[0] = 1
    np.testing.assert_allclose(dft(DtSignal(impulse)).values, np.ones(8), atol=1e-15)


def test_dft_of_constant() -> None:
    np.testing.assert_allclose(dft(DtSignal(np.ones(8))).values, [8, 0, 0, 0, 0, 0, 0, 0], atol=1e-12)


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 300))
@settings(max_examples=50, deadline=None)
def test_dft_round_trip(seed: int, n: int) -> None:
    s = random_signal(seed, n)
    assert relative_error(s, idft(dft(s))) <= 1e-12


def test_dft_rejects_empty() -> None:
    with pytest.raises(ValueError):
        dft(np.zeros(0))


@pytest.mark.parametrize("n", [1, 2, 7, 8, 256])
def test_centered_bins(n: int) -> None:
    bins = centered_bins(n)
    assert sorted(bins) == list(range(-(n // 2), n - n // 2))
    assert np.all((bins - np.arange(n)) % n == 0)


def test_unit_response_is_identity() -> None:
    s = random_signal(0, 64)
    out = apply_freq_response(s, FreqResponse.ones(64))
    np.testing.assert_allclose(out.samples, s.samples, atol=1e-12)


def test_zero_response_gives_zero() -> None:
    s = random_signal(1, 64)
    out = apply_freq_response(s, FreqResponse(np.zeros(64)))
    assert np.all(out.samples == 0)


def test_linear_phase_delays_by_one_sample() -> None:
    n = 32
    s = random_signal(2, n)
    H = FreqResponse(np.exp(-2j * np.pi * np.arange(n) / n))
    out = apply_freq_response(s, H)
    np.testing.assert_allclose(out.samples, np.roll(s.samples, 1), atol=1e-12)


def test_length_mismatch() -> None:
    with pytest.raises(ValueError):
        apply_freq_response(random_signal(3, 16), FreqResponse.ones(8))


def test_real_signal_stays_real_under_hermitian_response() -> None:
    n = 64
    x = CtSignal(np.random.default_rng(4).standard_normal(n), sample_rate=8.0, oversample_factor=8, n_symbols=8)
    H = FreqResponse((np.abs(centered_bins(n)) < 10).astype(float))
    assert H.is_hermitian
    out = apply_freq_response(x, H)
    assert out.is_real
    assert len(out) == n


@given(seed=st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_parseval(seed: int) -> None:
    s = random_signal(seed, 128)
    energy = np.sum(np.abs(s.samples) ** 2)
    spectral = np.sum(np.abs(dft(s).values) ** 2) / len(s)
    assert spectral == pytest.approx(energy, rel=1e-10)


def test_responses_compose() -> None:
    n = 128
    rng = np.random.default_rng(5)
    s = random_signal(6, n)
    H1 = FreqResponse(rng.standard_normal(n) + 1j * rng.standard_normal(n))
    H2 = FreqResponse(rng.standard_normal(n) + 1j * rng.standard_normal(n))

    cascade = apply_freq_response(apply_freq_response(s, H1), H2)
    product = apply_freq_response(s, H1 * H2)
    assert relative_error(product, cascade) <= 1e-10


def test_evm_floor() -> None:
    u = random_signal(7, 32)
    assert evm_db(u, u) == EVM_FLOOR_DB


@pytest.mark.parametrize("scale, expected", [(1.1, -20.0), (2.0, 0.0), (1.01, -40.0)])
def test_evm_of_scaled_reference(scale: float, expected: float) -> None:
    u = random_signal(8, 32)
    assert evm_db(u, u.with_samples(scale * u.samples)) == pytest.approx(expected, abs=1e-9)


@given(seed=st.integers(0, 2**32 - 1), alpha=st.floats(1e-6, 10.0))
@settings(max_examples=50, deadline=None)
def test_evm_matches_error_ratio(seed: int, alpha: float) -> None:
    u = random_signal(seed, 64)
    e = random_signal(seed + 1, 64).samples
    e = e * alpha * np.linalg.norm(u.samples) / np.linalg.norm(e)
    assert evm_db(u, u.samples + e) == pytest.approx(20 * np.log10(alpha), abs=1e-9)


def test_evm_rejects_zero_reference() -> None:
    with pytest.raises(ValueError):
        evm_db(np.zeros(4), np.ones(4))


def test_signal_validation() -> None:
    with pytest.raises(ValueError):
        DtSignal(np.zeros(0))
    with pytest.raises(ValueError):
        DtSignal(np.array([1.0, np.nan]))
    with pytest.raises(ValueError):
        CtSignal(np.zeros(10), sample_rate=4.0, oversample_factor=4, n_symbols=2)


def test_signals_are_immutable() -> None:
    s = random_signal(9, 8)
    with pytest.raises(ValueError):
        s.samples[0] = 0
    assert np.array_equal(s.roll(1).samples, np.roll(s.samples, 1))
