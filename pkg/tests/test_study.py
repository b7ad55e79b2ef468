"""Replication studies: seed handling, aggregation, determinism, comparison."""

from __future__ import annotations

import math

import numpy as np
import pytest

from specamp import (
    DEFAULT_SIGNAL,
    MODEL,
    SinusoidParams,
    StudyConfig,
    ValidationError,
    aggregate,
    compare_estimators,
    gaussian_sequence,
    make_sinusoid_signal,
    matched_recovery_check,
    run_study,
    solve_alpha,
    synthesize_spectrum,
)

SMALL_SIGNAL = SinusoidParams(amplitude=17.0, offset=27.0, scale=32.3, n=40)


def test_aggregate_reference_vector():
    # ten-replicate regression vector; mean and sample std recomputed
    # independently with exact decimal arithmetic
    values = (0.9952, 0.9871, 0.9992, 1.0157, 1.0058, 1.0215, 1.0105, 0.9895, 1.0017, 1.0096)
    mean, std = aggregate(values)
    assert mean == pytest.approx(1.00358, abs=1e-12)
    assert std == pytest.approx(0.01115474986023644, rel=1e-12)


def test_aggregate_degenerate_cases():
    mean, std = aggregate((3.5, 3.5, 3.5))
    assert mean == 3.5 and std == 0.0
    mean, std = aggregate((0.0, 2.0))
    assert mean == 1.0
    assert std == pytest.approx(math.sqrt(2.0), rel=1e-15)
    mean, std = aggregate((4.25,))
    assert mean == 4.25 and std is None
    with pytest.raises(ValidationError):
        aggregate(())


def test_study_config_validation():
    with pytest.raises(ValidationError):
        StudyConfig(alpha_true=0.0)
    with pytest.raises(ValidationError):
        StudyConfig(replicates=0)
    with pytest.raises(ValidationError):
        StudyConfig(data_seed=-1)
    with pytest.raises(ValidationError):
        StudyConfig(uncertainty_variant="typo")


def test_single_replicate_study_matches_direct_solve():
    config = StudyConfig(signal_params=SMALL_SIGNAL, replicates=1)
    report = run_study(config)
    assert report.sample_std is None
    assert report.mean == report.replicate_alphas[0]

    signal = make_sinusoid_signal(config.signal_params)
    spectrum = synthesize_spectrum(
        signal, config.alpha_true, gaussian_sequence(config.data_seed, signal.n)
    )
    noise = gaussian_sequence(report.seeds_used[0], signal.n)
    direct = solve_alpha(spectrum, signal, noise)
    assert report.replicate_alphas[0] == direct.alpha
    assert report.per_replicate_uncertainties[0] == direct.delta_alpha


def test_study_reports_are_deterministic():
    config = StudyConfig(signal_params=SMALL_SIGNAL, replicates=4)
    assert run_study(config) == run_study(config)


def test_parallel_study_equals_serial():
    config = StudyConfig(signal_params=SMALL_SIGNAL, replicates=6)
    assert run_study(config, workers=4) == run_study(config, workers=1)


def test_replicate_seeds_are_unique_and_avoid_data_seed():
    config = StudyConfig(signal_params=SMALL_SIGNAL, replicates=8)
    report = run_study(config)
    assert len(set(report.seeds_used)) == 8
    assert config.data_seed not in report.seeds_used


def test_growing_the_study_keeps_earlier_seeds():
    small = run_study(StudyConfig(signal_params=SMALL_SIGNAL, replicates=3))
    large = run_study(StudyConfig(signal_params=SMALL_SIGNAL, replicates=6))
    assert large.seeds_used[:3] == small.seeds_used
    assert large.replicate_alphas[:3] == small.replicate_alphas


def test_report_statistics_recompute_from_replicates():
    report = run_study(StudyConfig(signal_params=SMALL_SIGNAL, replicates=5))
    mean, std = aggregate(report.replicate_alphas)
    assert report.mean == pytest.approx(mean, rel=1e-12)
    assert report.sample_std == pytest.approx(std, rel=1e-12)


@pytest.mark.parametrize("alpha_true", [0.1, 1.0, 5.0, 100.0])
def test_matched_recovery_across_amplitudes(alpha_true):
    for seed in (0, 1, 2):
        _, rel_error = matched_recovery_check(DEFAULT_SIGNAL, alpha_true, seed)
        assert rel_error <= 1e-10


def test_matched_recovery_returns_estimate_and_error():
    alpha_hat, rel_error = matched_recovery_check(SMALL_SIGNAL, 2.0, seed=9)
    assert rel_error == abs(alpha_hat - 2.0) / 2.0


def test_comparison_row_count_and_error_columns():
    config = StudyConfig(signal_params=SMALL_SIGNAL, replicates=3)
    report = compare_estimators(config, outer_trials=4)
    assert report.outer_trials == 4
    assert len(report.trials) == 4
    assert [t.trial for t in report.trials] == [0, 1, 2, 3]
    for t in report.trials:
        assert t.ls_error == abs(t.ls_alpha - config.alpha_true)
        assert t.study_mean_error == abs(t.study_mean - config.alpha_true)
        assert t.ls_delta_alpha > 0.0
    med = float(np.median([t.ls_error for t in report.trials]))
    assert report.ls_error_quantiles.median == pytest.approx(med, rel=1e-12)
    assert report.ls_error_quantiles.q25 <= report.ls_error_quantiles.median
    assert report.ls_error_quantiles.median <= report.ls_error_quantiles.q75


def test_comparison_single_trial_reduces_to_one_study():
    config = StudyConfig(signal_params=SMALL_SIGNAL, replicates=3, weights=MODEL)
    report = compare_estimators(config, outer_trials=1)
    trial = report.trials[0]
    from dataclasses import replace

    sub = replace(config, data_seed=trial.data_seed, study_seed=trial.study_seed)
    study = run_study(sub)
    assert trial.study_mean == study.mean
    assert trial.ls_alpha == study.ls_baseline.alpha
    assert trial.study_sample_std == study.sample_std


def test_comparison_is_deterministic():
    config = StudyConfig(signal_params=SMALL_SIGNAL, replicates=2)
    assert compare_estimators(config, outer_trials=3) == compare_estimators(
        config, outer_trials=3
    )


def test_comparison_trial_seeds_differ_between_trials():
    config = StudyConfig(signal_params=SMALL_SIGNAL, replicates=2)
    report = compare_estimators(config, outer_trials=5)
    data_seeds = [t.data_seed for t in report.trials]
    assert len(set(data_seeds)) == 5
