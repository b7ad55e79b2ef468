"""Amplitude estimators for counting spectra against a known reference signal.

Two fitters live here. The weighted least-squares one solves its normal
equation in closed form. The modified-likelihood one injects an external
unit-normal sequence bg into the fit residual, m - alpha*F - bg*sqrt(alpha*F);
with per-channel variances tied to the model (sigma^2 = alpha*F) its
stationarity condition collapses to a cubic in u = sqrt(alpha) built from five
channel sums, which is solved by bisection on the cubic's monotone segments
inside a fixed bracket around the least-squares seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import EstimationError, ValidationError
from .model import NoiseSequence, SignalModel, Spectrum

WEIGHT_KINDS = ("measured", "model", "unit")
UNCERTAINTY_VARIANTS = ("standard", "paper-literal")

_LS_MODEL_MAX_ITER = 100
_LS_MODEL_REL_TOL = 1e-10


@dataclass(frozen=True)
class WeightMode:
    """Per-channel variance rule for the least-squares weights.

    measured: sigma_i^2 = max(m_i, floor); model: sigma_i^2 = alpha * F_i,
    iterated to a fixed point; unit: sigma_i^2 = 1.
    """

    kind: str = "measured"
    floor: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in WEIGHT_KINDS:
            raise ValidationError(
                f"weight kind must be one of {WEIGHT_KINDS}, got {self.kind!r}"
            )
        if not (math.isfinite(self.floor) and self.floor > 0.0):
            raise ValidationError(f"floor must be finite and positive, got {self.floor!r}")


MEASURED = WeightMode("measured")
MODEL = WeightMode("model")
UNIT = WeightMode("unit")


@dataclass(frozen=True)
class Estimate:
    """Fit outcome: amplitude, its uncertainty, and solver bookkeeping."""

    alpha: float
    delta_alpha: float
    method: str
    variant: str | None = None
    score_residual: float | None = None
    seed_alpha: float | None = None
    positive_roots: int | None = None


@dataclass(frozen=True)
class ResidualReport:
    """Residuals of counts against alpha * F and their normalized form."""

    residuals: np.ndarray
    normalized: np.ndarray
    positive_count: int
    normalized_mean: float
    normalized_std: float

    def __post_init__(self) -> None:
        for name in ("residuals", "normalized"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def _fsum(arr: np.ndarray) -> float:
    return math.fsum(arr.tolist())


def _check_pair(spectrum: Spectrum, signal: SignalModel) -> None:
    if spectrum.n != signal.n:
        raise ValidationError(
            f"spectrum length {spectrum.n} does not match signal length {signal.n}"
        )


def _check_triple(spectrum: Spectrum, signal: SignalModel, noise: NoiseSequence) -> None:
    _check_pair(spectrum, signal)
    if noise.n != signal.n:
        raise ValidationError(
            f"noise length {noise.n} does not match signal length {signal.n}"
        )


def _variances(
    weights: WeightMode,
    spectrum: Spectrum,
    signal: SignalModel,
    alpha: float | None = None,
) -> np.ndarray:
    if weights.kind == "measured":
        return np.maximum(spectrum.counts, weights.floor)
    if weights.kind == "unit":
        return np.ones(signal.n)
    # model
    if alpha is None or not (math.isfinite(alpha) and alpha > 0.0):
        raise EstimationError(
            f"model weights need a positive alpha to form sigma^2 = alpha*F, got {alpha!r}"
        )
    return alpha * signal.values


def _wls_alpha(m: np.ndarray, f: np.ndarray, s2: np.ndarray) -> tuple[float, float]:
    denom = _fsum(f * f / s2)
    if denom <= 0.0 or not math.isfinite(denom):
        raise EstimationError(f"least-squares normal equation is degenerate (denominator {denom!r})")
    return _fsum(m * f / s2) / denom, denom


def ls_estimate(
    spectrum: Spectrum, signal: SignalModel, weights: WeightMode = MEASURED
) -> Estimate:
    """Weighted least-squares amplitude: alpha = sum(mF/s2) / sum(F^2/s2).

    delta_alpha = 1/sqrt(sum(F^2/s2)). Model weights start from the measured
    solution and iterate sigma^2 = alpha*F until alpha is stationary.
    """
    _check_pair(spectrum, signal)
    m, f = spectrum.counts, signal.values
    if weights.kind != "model":
        alpha, denom = _wls_alpha(m, f, _variances(weights, spectrum, signal))
        return Estimate(alpha=alpha, delta_alpha=1.0 / math.sqrt(denom), method="ls")

    alpha, _ = _wls_alpha(m, f, _variances(MEASURED, spectrum, signal))
    for _ in range(_LS_MODEL_MAX_ITER):
        if not (math.isfinite(alpha) and alpha > 0.0):
            raise EstimationError(
                f"model-weight iteration left the positive domain (alpha {alpha!r})"
            )
        new, denom = _wls_alpha(m, f, alpha * f)
        if abs(new - alpha) <= _LS_MODEL_REL_TOL * max(abs(new), 1e-300):
            return Estimate(alpha=new, delta_alpha=1.0 / math.sqrt(denom), method="ls")
        alpha = new
    raise EstimationError("model-weight iteration did not converge")


def loglik_modified(
    alpha: float,
    spectrum: Spectrum,
    signal: SignalModel,
    noise: NoiseSequence,
    weights: WeightMode = MODEL,
) -> float:
    """Noise-augmented log-likelihood (no factor 1/2 on the quadratic term).

    -sum((m - alpha*F - bg*sqrt(alpha*F))^2 / sigma^2) + sum(ln(1/(sqrt(2pi)*sigma)))
    """
    _check_triple(spectrum, signal, noise)
    if not (math.isfinite(alpha) and alpha > 0.0):
        raise ValidationError(f"alpha must be finite and positive, got {alpha!r}")
    s2 = _variances(weights, spectrum, signal, alpha=alpha)
    if np.any(s2 <= 0.0):
        raise EstimationError("nonpositive variance in the likelihood weights")
    scaled = alpha * signal.values
    r = spectrum.counts - scaled - noise.values * np.sqrt(scaled)
    return -_fsum(r * r / s2) - 0.5 * _fsum(np.log(2.0 * math.pi * s2))


def score_general(
    alpha: float,
    spectrum: Spectrum,
    signal: SignalModel,
    noise: NoiseSequence,
    weights: WeightMode = MODEL,
) -> float:
    """Stationarity expression of the augmented likelihood with free per-channel weights."""
    _check_triple(spectrum, signal, noise)
    if not (math.isfinite(alpha) and alpha > 0.0):
        raise ValidationError(f"alpha must be finite and positive, got {alpha!r}")
    s2 = _variances(weights, spectrum, signal, alpha=alpha)
    if np.any(s2 <= 0.0):
        raise EstimationError("nonpositive variance in the score weights")
    m, f, bg = spectrum.counts, signal.values, noise.values
    sqf = np.sqrt(f)
    u = math.sqrt(alpha)
    return (
        _fsum(m * f / s2)
        - alpha * _fsum(f * f / s2)
        - 0.5 * u * _fsum(f * sqf * bg / s2)
        - 0.5 / u * _fsum(m * sqf * bg / s2)
        + 0.5 * _fsum(f * bg * bg / s2)
    )


class _ReducedSums(NamedTuple):
    """Channel sums entering the reduced score; sum_mb is sum(m*bg/sqrt(F))."""

    sum_m: float
    sum_f: float
    sum_sfb: float
    sum_mb: float
    sum_b2: float


def _reduced_sums(spectrum: Spectrum, signal: SignalModel, noise: NoiseSequence) -> _ReducedSums:
    m, f, bg = spectrum.counts, signal.values, noise.values
    sqf = np.sqrt(f)
    return _ReducedSums(
        sum_m=_fsum(m),
        sum_f=_fsum(f),
        sum_sfb=_fsum(sqf * bg),
        sum_mb=_fsum(m * bg / sqf),
        sum_b2=_fsum(bg * bg),
    )


def _reduced_score(alpha: float, sums: _ReducedSums) -> float:
    u = math.sqrt(alpha)
    return (
        sums.sum_m
        - alpha * sums.sum_f
        - 0.5 * u * sums.sum_sfb
        - 0.5 / u * sums.sum_mb
        + 0.5 * sums.sum_b2
    )


def score_reduced(
    alpha: float, spectrum: Spectrum, signal: SignalModel, noise: NoiseSequence
) -> float:
    """Stationarity expression after tying the weights to the model, sigma^2 = alpha*F.

    Equals alpha * score_general(alpha, ..., model weights) channel algebra aside.
    """
    _check_triple(spectrum, signal, noise)
    if not (math.isfinite(alpha) and alpha > 0.0):
        raise ValidationError(f"alpha must be finite and positive, got {alpha!r}")
    return _reduced_score(alpha, _reduced_sums(spectrum, signal, noise))


def _quad_roots(a: float, b: float, c: float) -> list[float]:
    # a*u^2 + b*u + c with a != 0; stable two-branch form
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return []
    sq = math.sqrt(disc)
    if sq == 0.0:
        return [-b / (2.0 * a)]
    q = -0.5 * (b + math.copysign(sq, b)) if b != 0.0 else -0.5 * sq
    return [q / a, c / q]


def _bisect(f, lo: float, hi: float, f_lo: float, rel_tol: float) -> float:
    a, b, fa = lo, hi, f_lo
    while True:
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        # alpha = u^2, so half the requested relative tolerance on u
        if (b - a) <= 0.5 * rel_tol * mid:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (fa > 0.0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def _cubic_roots_between(
    coeffs: tuple[float, float, float, float], lo: float, hi: float, rel_tol: float
) -> list[float]:
    c3, c2, c1, c0 = coeffs

    def f(u: float) -> float:
        return ((c3 * u + c2) * u + c1) * u + c0

    knots = {lo, hi}
    for r in _quad_roots(3.0 * c3, 2.0 * c2, c1):
        if lo < r < hi:
            knots.add(r)
    ordered = sorted(knots)

    roots: list[float] = []
    for a, b in zip(ordered, ordered[1:]):
        fa, fb = f(a), f(b)
        if fa == 0.0:
            roots.append(a)
            continue
        if fb == 0.0 or (fa > 0.0) == (fb > 0.0):
            continue
        roots.append(_bisect(f, a, b, fa, rel_tol))
    if f(hi) == 0.0:
        roots.append(hi)

    roots.sort()
    merged: list[float] = []
    for r in roots:
        if merged and abs(r - merged[-1]) <= 1e-9 * max(abs(r), 1e-300):
            continue
        merged.append(r)
    return merged


def solve_alpha(
    spectrum: Spectrum,
    signal: SignalModel,
    noise: NoiseSequence,
    init: float | str = "auto",
    rel_tol: float = 1e-12,
    variant: str = "standard",
) -> Estimate:
    """Root of the reduced score nearest the least-squares seed.

    The search runs over u = sqrt(alpha) in [u_seed/10, 10*u_seed], split at
    the cubic's turning points so every sign change is caught; "auto" seeds
    from measured-weight least squares. All positive roots found in the
    bracket are counted in the returned estimate.
    """
    _check_triple(spectrum, signal, noise)
    if not (math.isfinite(rel_tol) and rel_tol > 0.0):
        raise ValidationError(f"rel_tol must be finite and positive, got {rel_tol!r}")
    if isinstance(init, str):
        if init != "auto":
            raise ValidationError(f"init must be a number or 'auto', got {init!r}")
        seed = ls_estimate(spectrum, signal, MEASURED).alpha
    else:
        seed = float(init)
    if not (math.isfinite(seed) and seed > 0.0):
        raise EstimationError(
            f"root search needs a positive seed amplitude, got {seed!r}"
        )

    sums = _reduced_sums(spectrum, signal, noise)
    # u * reduced_score(u^2) expands to this cubic in u
    coeffs = (
        -sums.sum_f,
        -0.5 * sums.sum_sfb,
        sums.sum_m + 0.5 * sums.sum_b2,
        -0.5 * sums.sum_mb,
    )
    u_seed = math.sqrt(seed)
    u_roots = _cubic_roots_between(coeffs, u_seed / 10.0, u_seed * 10.0, rel_tol)
    if not u_roots:
        raise EstimationError(
            f"no stationary amplitude in [{seed / 100.0!r}, {seed * 100.0!r}] "
            f"around the least-squares seed {seed!r}"
        )
    alphas = [u * u for u in u_roots]
    alpha_hat = min(alphas, key=lambda a: (abs(a - seed), a))
    return Estimate(
        alpha=alpha_hat,
        delta_alpha=alpha_uncertainty(
            alpha_hat, spectrum, signal, noise, weights=MODEL, variant=variant
        ),
        method="modlik",
        variant=variant,
        score_residual=abs(_reduced_score(alpha_hat, sums)),
        seed_alpha=seed,
        positive_roots=len(alphas),
    )


def alpha_uncertainty(
    alpha: float,
    spectrum: Spectrum,
    signal: SignalModel,
    noise: NoiseSequence,
    weights: WeightMode = MODEL,
    variant: str = "standard",
) -> float:
    """Propagated uncertainty of the score root under count and noise spreads.

    Count spreads are sqrt(alpha*F_i); the external sequence always carries
    unit spread per channel. "standard" sums squared per-channel terms;
    "paper-literal" squares the two channel sums after summation.
    """
    _check_triple(spectrum, signal, noise)
    if variant not in UNCERTAINTY_VARIANTS:
        raise ValidationError(
            f"variant must be one of {UNCERTAINTY_VARIANTS}, got {variant!r}"
        )
    if not (math.isfinite(alpha) and alpha > 0.0):
        raise ValidationError(f"alpha must be finite and positive, got {alpha!r}")
    s2 = _variances(weights, spectrum, signal, alpha=alpha)
    if np.any(s2 <= 0.0):
        raise EstimationError("nonpositive variance in the uncertainty weights")

    m, f, bg = spectrum.counts, signal.values, noise.values
    sqf = np.sqrt(f)
    u = math.sqrt(alpha)
    c = f / s2 - 0.5 / u * sqf * bg / s2
    d = 0.5 * u * f * sqf / s2 + 0.5 / alpha * m * sqf / s2 - f * bg / s2
    denom = _fsum(
        f * f / s2 + 0.25 / u * f * sqf * bg / s2 + 0.25 / (alpha * u) * bg * m * sqf / s2
    )
    if denom == 0.0 or not math.isfinite(denom):
        raise EstimationError(f"uncertainty denominator is degenerate ({denom!r})")

    dm = np.sqrt(alpha * f)
    if variant == "standard":
        num = _fsum((c * dm) ** 2) + _fsum(d * d)
    else:
        num = _fsum(c * dm) ** 2 + _fsum(d) ** 2
    return math.sqrt(num) / abs(denom)


def residual_diagnostics(spectrum: Spectrum, signal: SignalModel, alpha: float) -> ResidualReport:
    """Residuals m - alpha*F and the same scaled by sqrt(alpha*F)."""
    _check_pair(spectrum, signal)
    if not (math.isfinite(alpha) and alpha > 0.0):
        raise ValidationError(f"alpha must be finite and positive, got {alpha!r}")
    residuals = spectrum.counts - alpha * signal.values
    normalized = residuals / np.sqrt(alpha * signal.values)
    n = normalized.size
    mean = _fsum(normalized) / n
    if n >= 2:
        std = math.sqrt(math.fsum((float(v) - mean) ** 2 for v in normalized) / (n - 1))
    else:
        std = float("nan")
    return ResidualReport(
        residuals=residuals,
        normalized=normalized,
        positive_count=int(np.count_nonzero(residuals > 0.0)),
        normalized_mean=mean,
        normalized_std=std,
    )
