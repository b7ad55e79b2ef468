"""On-disk formats: spectrum and noise tables (CSV) and JSON report documents.

Floats in the tables carry 17 significant digits so a write/read cycle is
value-exact; the JSON side relies on repr round-tripping. Every document is
wrapped in an envelope with a format version and the tool version.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from . import __version__
from .errors import FileFormatError
from .estimators import Estimate, ResidualReport, WeightMode
from .model import NoiseSequence, SignalModel, SinusoidParams, Spectrum
from .study import (
    ComparisonReport,
    ErrorQuantiles,
    ReplicateReport,
    StudyConfig,
    TrialResult,
)

FORMAT_VERSION = 1

SPECTRUM_HEADER = "channel,F,m"
NOISE_HEADER = "channel,bg"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _parse_float(token: str, path: str, lineno: int, what: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise FileFormatError(f"{path}:{lineno}: {what} is not a number: {token!r}") from None
    if not math.isfinite(value):
        raise FileFormatError(f"{path}:{lineno}: {what} must be finite, got {token!r}")
    return value


def _parse_channel(token: str, path: str, lineno: int, expected: int) -> None:
    try:
        channel = int(token)
    except ValueError:
        raise FileFormatError(
            f"{path}:{lineno}: channel index is not an integer: {token!r}"
        ) from None
    if channel != expected:
        raise FileFormatError(
            f"{path}:{lineno}: channel index {channel} out of order, expected {expected}"
        )


def write_spectrum_file(path: str | Path, signal: SignalModel, spectrum: Spectrum) -> None:
    if spectrum.n != signal.n:
        raise FileFormatError(
            f"cannot write {path}: spectrum length {spectrum.n} != signal length {signal.n}"
        )
    lines = [SPECTRUM_HEADER]
    for i in range(signal.n):
        lines.append(f"{i},{_fmt(signal.values[i])},{_fmt(spectrum.counts[i])}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_spectrum_file(path: str | Path) -> tuple[SignalModel, Spectrum]:
    name = str(path)
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != SPECTRUM_HEADER:
        raise FileFormatError(f"{name}:1: expected header {SPECTRUM_HEADER!r}")
    f_vals: list[float] = []
    m_vals: list[float] = []
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise FileFormatError(f"{name}:{lineno}: expected 3 fields, got {len(parts)}")
        _parse_channel(parts[0], name, lineno, len(f_vals))
        f = _parse_float(parts[1], name, lineno, "F")
        if f <= 0.0:
            raise FileFormatError(f"{name}:{lineno}: F must be strictly positive, got {f!r}")
        f_vals.append(f)
        m_vals.append(_parse_float(parts[2], name, lineno, "m"))
    if not f_vals:
        raise FileFormatError(f"{name}: no data rows")
    return SignalModel(values=np.array(f_vals)), Spectrum(counts=np.array(m_vals))


def write_noise_file(path: str | Path, noise: NoiseSequence) -> None:
    lines = [
        f"# seed={noise.seed}",
        f"# standardized={'true' if noise.standardized else 'false'}",
        NOISE_HEADER,
    ]
    for i in range(noise.n):
        lines.append(f"{i},{_fmt(noise.values[i])}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_noise_file(path: str | Path) -> NoiseSequence:
    name = str(path)
    lines = Path(path).read_text().splitlines()
    meta: dict[str, str] = {}
    body_at = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line.startswith("#"):
            body_at = lineno
            break
        key, sep, value = line.lstrip("#").strip().partition("=")
        if not sep:
            raise FileFormatError(f"{name}:{lineno}: malformed metadata line {raw!r}")
        meta[key.strip()] = value.strip()
    else:
        raise FileFormatError(f"{name}: no header line after metadata")

    if "seed" not in meta:
        raise FileFormatError(f"{name}: missing '# seed=...' metadata")
    if "standardized" not in meta:
        raise FileFormatError(f"{name}: missing '# standardized=...' metadata")
    try:
        seed = int(meta["seed"])
    except ValueError:
        raise FileFormatError(f"{name}: seed metadata is not an integer: {meta['seed']!r}") from None
    if meta["standardized"] not in ("true", "false"):
        raise FileFormatError(
            f"{name}: standardized metadata must be 'true' or 'false', got {meta['standardized']!r}"
        )
    standardized = meta["standardized"] == "true"

    if body_at == 0 or lines[body_at - 1].strip() != NOISE_HEADER:
        raise FileFormatError(f"{name}:{body_at}: expected header {NOISE_HEADER!r}")
    values: list[float] = []
    for lineno, raw in enumerate(lines[body_at:], start=body_at + 1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise FileFormatError(f"{name}:{lineno}: expected 2 fields, got {len(parts)}")
        _parse_channel(parts[0], name, lineno, len(values))
        values.append(_parse_float(parts[1], name, lineno, "bg"))
    if not values:
        raise FileFormatError(f"{name}: no data rows")
    return NoiseSequence(values=np.array(values), seed=seed, standardized=standardized)


# --- JSON report documents ---


def document(kind: str, payload: dict) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "tool_version": __version__,
        "kind": kind,
        "payload": payload,
    }


def dumps_document(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def parse_document(text: str, source: str = "<string>") -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{source}: not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise FileFormatError(f"{source}: document root must be an object")
    if doc.get("format_version") != FORMAT_VERSION:
        raise FileFormatError(
            f"{source}: unsupported format_version {doc.get('format_version')!r}"
        )
    for key in ("kind", "payload"):
        if key not in doc:
            raise FileFormatError(f"{source}: missing {key!r}")
    return doc


def write_document(path: str | Path, doc: dict) -> None:
    Path(path).write_text(dumps_document(doc))


def read_document(path: str | Path) -> dict:
    return parse_document(Path(path).read_text(), source=str(path))


def weight_mode_to_dict(w: WeightMode) -> dict:
    return {"kind": w.kind, "floor": w.floor}


def weight_mode_from_dict(d: dict) -> WeightMode:
    return WeightMode(kind=d["kind"], floor=d["floor"])


def sinusoid_params_to_dict(p: SinusoidParams) -> dict:
    return {"amplitude": p.amplitude, "offset": p.offset, "scale": p.scale, "n": p.n}


def sinusoid_params_from_dict(d: dict) -> SinusoidParams:
    return SinusoidParams(
        amplitude=d["amplitude"], offset=d["offset"], scale=d["scale"], n=d["n"]
    )


def study_config_to_dict(c: StudyConfig) -> dict:
    return {
        "signal_params": sinusoid_params_to_dict(c.signal_params),
        "alpha_true": c.alpha_true,
        "data_seed": c.data_seed,
        "study_seed": c.study_seed,
        "replicates": c.replicates,
        "standardize": c.standardize,
        "weights": weight_mode_to_dict(c.weights),
        "uncertainty_variant": c.uncertainty_variant,
    }


def study_config_from_dict(d: dict) -> StudyConfig:
    return StudyConfig(
        signal_params=sinusoid_params_from_dict(d["signal_params"]),
        alpha_true=d["alpha_true"],
        data_seed=d["data_seed"],
        study_seed=d["study_seed"],
        replicates=d["replicates"],
        standardize=d["standardize"],
        weights=weight_mode_from_dict(d["weights"]),
        uncertainty_variant=d["uncertainty_variant"],
    )


def estimate_to_dict(e: Estimate) -> dict:
    out = {"alpha": e.alpha, "delta_alpha": e.delta_alpha, "method": e.method}
    for key in ("variant", "score_residual", "seed_alpha", "positive_roots"):
        value = getattr(e, key)
        if value is not None:
            out[key] = value
    return out


def estimate_from_dict(d: dict) -> Estimate:
    return Estimate(
        alpha=d["alpha"],
        delta_alpha=d["delta_alpha"],
        method=d["method"],
        variant=d.get("variant"),
        score_residual=d.get("score_residual"),
        seed_alpha=d.get("seed_alpha"),
        positive_roots=d.get("positive_roots"),
    )


def replicate_report_to_dict(r: ReplicateReport) -> dict:
    out = {
        "ls_baseline": estimate_to_dict(r.ls_baseline),
        "replicate_alphas": list(r.replicate_alphas),
        "mean": r.mean,
        "per_replicate_uncertainties": list(r.per_replicate_uncertainties),
        "seeds_used": list(r.seeds_used),
        "config": study_config_to_dict(r.config_echo),
    }
    if r.sample_std is not None:
        out["sample_std"] = r.sample_std
    return out


def replicate_report_from_dict(d: dict) -> ReplicateReport:
    return ReplicateReport(
        ls_baseline=estimate_from_dict(d["ls_baseline"]),
        replicate_alphas=tuple(d["replicate_alphas"]),
        mean=d["mean"],
        sample_std=d.get("sample_std"),
        per_replicate_uncertainties=tuple(d["per_replicate_uncertainties"]),
        seeds_used=tuple(d["seeds_used"]),
        config_echo=study_config_from_dict(d["config"]),
    )


def _quantiles_to_dict(q: ErrorQuantiles) -> dict:
    return {"q25": q.q25, "median": q.median, "q75": q.q75}


def _quantiles_from_dict(d: dict) -> ErrorQuantiles:
    return ErrorQuantiles(q25=d["q25"], median=d["median"], q75=d["q75"])


def _trial_to_dict(t: TrialResult) -> dict:
    out = {
        "trial": t.trial,
        "data_seed": t.data_seed,
        "study_seed": t.study_seed,
        "ls_alpha": t.ls_alpha,
        "ls_delta_alpha": t.ls_delta_alpha,
        "ls_error": t.ls_error,
        "study_mean": t.study_mean,
        "study_mean_error": t.study_mean_error,
    }
    if t.study_sample_std is not None:
        out["study_sample_std"] = t.study_sample_std
    return out


def _trial_from_dict(d: dict) -> TrialResult:
    return TrialResult(
        trial=d["trial"],
        data_seed=d["data_seed"],
        study_seed=d["study_seed"],
        ls_alpha=d["ls_alpha"],
        ls_delta_alpha=d["ls_delta_alpha"],
        ls_error=d["ls_error"],
        study_mean=d["study_mean"],
        study_mean_error=d["study_mean_error"],
        study_sample_std=d.get("study_sample_std"),
    )


def comparison_report_to_dict(r: ComparisonReport) -> dict:
    return {
        "trials": [_trial_to_dict(t) for t in r.trials],
        "ls_error_quantiles": _quantiles_to_dict(r.ls_error_quantiles),
        "study_mean_error_quantiles": _quantiles_to_dict(r.study_mean_error_quantiles),
        "outer_trials": r.outer_trials,
        "config": study_config_to_dict(r.config_echo),
    }


def comparison_report_from_dict(d: dict) -> ComparisonReport:
    return ComparisonReport(
        trials=tuple(_trial_from_dict(t) for t in d["trials"]),
        ls_error_quantiles=_quantiles_from_dict(d["ls_error_quantiles"]),
        study_mean_error_quantiles=_quantiles_from_dict(d["study_mean_error_quantiles"]),
        outer_trials=d["outer_trials"],
        config_echo=study_config_from_dict(d["config"]),
    )


def residual_report_to_dict(r: ResidualReport) -> dict:
    out = {
        "residuals": [float(v) for v in r.residuals],
        "normalized": [float(v) for v in r.normalized],
        "positive_count": r.positive_count,
        "normalized_mean": r.normalized_mean,
    }
    if not math.isnan(r.normalized_std):
        out["normalized_std"] = r.normalized_std
    return out


def residual_report_from_dict(d: dict) -> ResidualReport:
    return ResidualReport(
        residuals=np.array(d["residuals"]),
        normalized=np.array(d["normalized"]),
        positive_count=d["positive_count"],
        normalized_mean=d["normalized_mean"],
        normalized_std=d.get("normalized_std", float("nan")),
    )
