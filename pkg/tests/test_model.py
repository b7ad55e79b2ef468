"""Signal construction, noise generation, and spectrum synthesis."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specamp import (
    NoiseSequence,
    SignalModel,
    SinusoidParams,
    Spectrum,
    ValidationError,
    gaussian_sequence,
    make_sinusoid_signal,
    residual_diagnostics,
    synthesize_spectrum,
)


def test_sinusoid_single_channel_is_offset():
    sig = make_sinusoid_signal(SinusoidParams(amplitude=27.0, offset=17.0, scale=32.3, n=1))
    assert sig.values[0] == 17.0
    assert sig.n == 1


def test_sinusoid_zero_amplitude_is_flat():
    sig = make_sinusoid_signal(SinusoidParams(amplitude=0.0, offset=5.0, scale=1.0, n=3))
    assert sig.values.tolist() == [5.0, 5.0, 5.0]


def test_sinusoid_value_at_channel_50():
    # 27*sin(50/32.3) + 17 evaluated independently at 50-digit precision
    sig = make_sinusoid_signal(SinusoidParams(amplitude=27.0, offset=17.0, scale=32.3, n=101))
    assert sig.values[50] == pytest.approx(43.99297710114373, abs=1e-11)


def test_default_style_signal_value_at_channel_50():
    # 17*sin(50/32.3) + 27, same independent evaluation
    sig = make_sinusoid_signal(SinusoidParams(amplitude=17.0, offset=27.0, scale=32.3, n=200))
    assert sig.values[50] == pytest.approx(43.995578174794198, abs=1e-11)
    assert np.all(sig.values > 0.0)


def test_sinusoid_rejects_channels_reaching_zero():
    # amplitude above offset drives the curve negative once i/scale passes pi
    with pytest.raises(ValidationError):
        make_sinusoid_signal(SinusoidParams(amplitude=27.0, offset=17.0, scale=32.3, n=200))


def test_sinusoid_params_validation():
    with pytest.raises(ValidationError):
        SinusoidParams(amplitude=1.0, offset=2.0, scale=0.0, n=5)
    with pytest.raises(ValidationError):
        SinusoidParams(amplitude=1.0, offset=2.0, scale=1.0, n=0)
    with pytest.raises(ValidationError):
        SinusoidParams(amplitude=math.inf, offset=2.0, scale=1.0, n=5)


def test_signal_model_requires_positive_values():
    with pytest.raises(ValidationError):
        SignalModel(values=[1.0, 0.0, 2.0])
    with pytest.raises(ValidationError):
        SignalModel(values=[1.0, -3.0])
    with pytest.raises(ValidationError):
        SignalModel(values=[])
    with pytest.raises(ValidationError):
        SignalModel(values=[1.0, math.nan])


def test_signal_values_are_read_only():
    sig = SignalModel(values=[1.0, 2.0])
    with pytest.raises(ValueError):
        sig.values[0] = 9.0


def test_spectrum_allows_negative_counts():
    spec = Spectrum(counts=[3.0, -0.5, 0.0])
    assert spec.n == 3
    assert spec.counts[1] == -0.5


def test_noise_sequence_standardized_flag_is_checked():
    with pytest.raises(ValidationError):
        NoiseSequence(values=[1.0, 2.0, 3.0], seed=0, standardized=True)
    raw = np.array([1.0, 2.0, 4.0])
    scaled = (raw - raw.mean()) / raw.std(ddof=1)
    nz = NoiseSequence(values=scaled, seed=0, standardized=True)
    assert nz.standardized


def test_gaussian_sequence_is_deterministic():
    a = gaussian_sequence(123, 50)
    b = gaussian_sequence(123, 50)
    assert np.array_equal(a.values, b.values)
    assert a.seed == 123 and not a.standardized


def test_gaussian_sequence_deterministic_across_threads():
    with ThreadPoolExecutor(max_workers=8) as pool:
        results = list(pool.map(lambda _: gaussian_sequence(7, 100).values, range(16)))
    for arr in results[1:]:
        assert np.array_equal(arr, results[0])


def test_gaussian_standardize_exact_sample_moments():
    nz = gaussian_sequence(5, 1000, standardize=True)
    assert abs(float(nz.values.mean())) <= 1e-12
    assert abs(float(nz.values.std(ddof=1)) - 1.0) <= 1e-12


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_gaussian_raw_moments_within_bands(seed):
    nz = gaussian_sequence(seed, 10000)
    mean = float(nz.values.mean())
    std = float(nz.values.std(ddof=1))
    tail = float(np.mean(np.abs(nz.values) > 1.96))
    assert abs(mean) <= 0.05
    assert 0.97 <= std <= 1.03
    assert 0.035 <= tail <= 0.065


def test_gaussian_sequence_validation():
    with pytest.raises(ValidationError):
        gaussian_sequence(0, 0)
    with pytest.raises(ValidationError):
        gaussian_sequence(-1, 10)
    with pytest.raises(ValidationError):
        gaussian_sequence(0, 1, standardize=True)


def test_synthesize_zero_noise_is_scaled_signal():
    sig = SignalModel(values=[1.0, 2.0, 3.0])
    nz = NoiseSequence(values=[0.0, 0.0, 0.0], seed=0)
    spec = synthesize_spectrum(sig, 2.5, nz)
    assert np.array_equal(spec.counts, 2.5 * sig.values)


def test_synthesize_single_channel_values():
    sig = SignalModel(values=[17.0])
    spec = synthesize_spectrum(sig, 1.0, NoiseSequence(values=[0.5], seed=0))
    # 17 + 0.5*sqrt(17), evaluated independently
    assert spec.counts[0] == pytest.approx(19.06155281280883, abs=1e-13)
    sig4 = SignalModel(values=[4.0])
    spec4 = synthesize_spectrum(sig4, 1.0, NoiseSequence(values=[1.0], seed=0))
    assert spec4.counts[0] == 6.0


def test_synthesize_validation():
    sig = SignalModel(values=[1.0, 2.0])
    nz = NoiseSequence(values=[0.0], seed=0)
    with pytest.raises(ValidationError):
        synthesize_spectrum(sig, 1.0, nz)
    nz2 = NoiseSequence(values=[0.0, 0.0], seed=0)
    with pytest.raises(ValidationError):
        synthesize_spectrum(sig, 0.0, nz2)
    with pytest.raises(ValidationError):
        synthesize_spectrum(sig, -2.0, nz2)


@st.composite
def signal_noise_alpha(draw, max_n=8):
    n = draw(st.integers(min_value=1, max_value=max_n))
    f = draw(
        st.lists(
            st.floats(min_value=1.0, max_value=50.0, allow_nan=False),
            min_size=n,
            max_size=n,
        )
    )
    bg = draw(
        st.lists(
            st.floats(min_value=-3.0, max_value=3.0, allow_nan=False),
            min_size=n,
            max_size=n,
        )
    )
    alpha = draw(st.floats(min_value=0.1, max_value=10.0, allow_nan=False))
    return f, bg, alpha


@given(signal_noise_alpha())
@settings(max_examples=60, deadline=None)
def test_normalized_residual_recovers_noise_exactly(case):
    f, bg, alpha = case
    sig = SignalModel(values=f)
    nz = NoiseSequence(values=bg, seed=0)
    spec = synthesize_spectrum(sig, alpha, nz)
    rr = residual_diagnostics(spec, sig, alpha)
    assert np.allclose(rr.normalized, nz.values, rtol=1e-12, atol=1e-12)
