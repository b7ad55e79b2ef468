"""Reference signals, measured spectra, and external noise sequences.

A spectrum is modelled as counts m_i = alpha * F_i + bg_i * sqrt(alpha * F_i),
where F is a known strictly positive per-channel reference signal, alpha the
amplitude to estimate, and bg an externally generated unit-normal sequence
standing in for the counting fluctuations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EstimationError, ValidationError


def _readonly_f64(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True).reshape(-1)
    if arr.size < 1:
        raise ValidationError(f"{name} must contain at least one channel")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise ValidationError(f"{name} has a non-finite entry at channel {bad}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SignalModel:
    """Known reference signal F_i, strictly positive in every channel."""

    values: np.ndarray
    description: str = ""

    def __post_init__(self) -> None:
        arr = _readonly_f64(self.values, "signal values")
        if np.any(arr <= 0.0):
            bad = int(np.flatnonzero(arr <= 0.0)[0])
            raise ValidationError(
                f"signal values must be strictly positive; channel {bad} is {arr[bad]!r}"
            )
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class Spectrum:
    """Measured (or synthesized) per-channel counts; real-valued, any sign."""

    counts: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "counts", _readonly_f64(self.counts, "spectrum counts"))

    @property
    def n(self) -> int:
        return int(self.counts.size)


@dataclass(frozen=True)
class NoiseSequence:
    """External noise draw bg_i with the seed that produced it.

    standardized means the stored values were affinely rescaled to exact
    sample mean 0 and sample std 1; the flag is re-checked on construction.
    """

    values: np.ndarray
    seed: int
    standardized: bool = False

    def __post_init__(self) -> None:
        arr = _readonly_f64(self.values, "noise values")
        object.__setattr__(self, "values", arr)
        if self.standardized:
            if arr.size < 2:
                raise ValidationError("a standardized sequence needs at least 2 entries")
            mean = float(arr.mean())
            std = float(arr.std(ddof=1))
            if abs(mean) > 1e-12 or abs(std - 1.0) > 1e-12:
                raise ValidationError(
                    f"sequence marked standardized but has mean {mean!r}, std {std!r}"
                )

    @property
    def n(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class SinusoidParams:
    """Parameters of the sinusoidal reference signal a*sin(i/s) + b over channels i = 0..n-1."""

    amplitude: float
    offset: float
    scale: float
    n: int

    def __post_init__(self) -> None:
        for name in ("amplitude", "offset", "scale"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise ValidationError(f"{name} must be finite, got {v!r}")
        if self.scale == 0.0:
            raise ValidationError("scale must be nonzero")
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n!r}")


def make_sinusoid_signal(params: SinusoidParams) -> SignalModel:
    """Evaluate the sinusoid on channels 0..n-1; rejected if any value is <= 0."""
    i = np.arange(params.n, dtype=np.float64)
    values = params.amplitude * np.sin(i / params.scale) + params.offset
    if np.any(values <= 0.0):
        bad = int(np.flatnonzero(values <= 0.0)[0])
        raise ValidationError(
            "sinusoid is not strictly positive over the requested channels "
            f"(amplitude={params.amplitude}, offset={params.offset}: "
            f"channel {bad} evaluates to {values[bad]!r})"
        )
    desc = (
        f"sinusoid(amplitude={params.amplitude}, offset={params.offset}, "
        f"scale={params.scale}, n={params.n})"
    )
    return SignalModel(values=values, description=desc)


def gaussian_sequence(seed: int, n: int, standardize: bool = False) -> NoiseSequence:
    """Draw n unit normals from a PCG64 generator seeded with seed.

    With standardize the draw is recentred and rescaled to exact sample
    moments (mean 0, std 1 with the n-1 divisor), which needs n >= 2.
    """
    if int(n) != n or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}")
    if int(seed) != seed or seed < 0:
        raise ValidationError(f"seed must be a nonnegative integer, got {seed!r}")
    values = np.random.default_rng(int(seed)).standard_normal(int(n))
    if standardize:
        if n < 2:
            raise ValidationError("standardize requires n >= 2")
        centred = values - values.mean()
        spread = float(centred.std(ddof=1))
        if spread == 0.0:
            raise EstimationError(f"degenerate draw for seed {seed}: zero sample spread")
        values = centred / spread
    return NoiseSequence(values=values, seed=int(seed), standardized=bool(standardize))


def synthesize_spectrum(signal: SignalModel, alpha: float, noise: NoiseSequence) -> Spectrum:
    """Build counts alpha*F + bg*sqrt(alpha*F) channel by channel."""
    if not (np.isfinite(alpha) and alpha > 0.0):
        raise ValidationError(f"alpha must be finite and positive, got {alpha!r}")
    if noise.n != signal.n:
        raise ValidationError(
            f"noise length {noise.n} does not match signal length {signal.n}"
        )
    scaled = alpha * signal.values
    return Spectrum(counts=scaled + noise.values * np.sqrt(scaled))
