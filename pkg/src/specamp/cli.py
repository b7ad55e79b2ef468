"""Command line front end: simulate, fit, study, diagnose.

Exit codes: 2 for usage or parameter errors, 3 for file problems, 4 for
numerical failures. Identical invocations produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .errors import EstimationError, FileFormatError, ValidationError
from .estimators import (
    UNCERTAINTY_VARIANTS,
    WEIGHT_KINDS,
    WeightMode,
    ls_estimate,
    residual_diagnostics,
    score_reduced,
    solve_alpha,
)
from .io_files import (
    _fmt,
    document,
    dumps_document,
    estimate_to_dict,
    read_noise_file,
    read_spectrum_file,
    replicate_report_to_dict,
    residual_report_to_dict,
    write_document,
    write_noise_file,
    write_spectrum_file,
)
from .model import (
    SinusoidParams,
    gaussian_sequence,
    make_sinusoid_signal,
    synthesize_spectrum,
)
from .study import DEFAULT_SIGNAL, StudyConfig, run_study

EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

_SCORE_CURVE_POINTS = 201


def _emit(doc: dict, output: str | None) -> None:
    if output is None:
        sys.stdout.write(dumps_document(doc))
    else:
        write_document(output, doc)


def _add_signal_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--amplitude", type=float, default=DEFAULT_SIGNAL.amplitude)
    p.add_argument("--offset", type=float, default=DEFAULT_SIGNAL.offset)
    p.add_argument("--scale", type=float, default=DEFAULT_SIGNAL.scale)
    p.add_argument("--channels", type=int, default=DEFAULT_SIGNAL.n)


def _add_weight_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--weights", choices=WEIGHT_KINDS, default="measured")
    p.add_argument("--floor", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specamp",
        description="Estimate the amplitude of a known reference signal in a counting spectrum.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="synthesize a spectrum and its noise sequence")
    _add_signal_flags(p)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--standardize", action="store_true")
    p.add_argument("--spectrum-out", required=True)
    p.add_argument("--noise-out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("fit", help="fit one spectrum")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--method", choices=("ls", "modlik"), default="modlik")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--noise-file")
    src.add_argument("--noise-seed", type=int)
    p.add_argument("--standardize", action="store_true")
    _add_weight_flags(p)
    p.add_argument("--uncertainty", choices=UNCERTAINTY_VARIANTS, default="standard")
    p.add_argument("--init", default="auto")
    p.add_argument("--rel-tol", type=float, default=1e-12)
    p.add_argument("--output")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("study", help="run the replication study")
    _add_signal_flags(p)
    p.add_argument("--alpha-true", type=float, default=1.0)
    p.add_argument("--data-seed", type=int, default=0)
    p.add_argument("--study-seed", type=int, default=1)
    p.add_argument("--replicates", type=int, default=10)
    p.add_argument("--standardize", action="store_true")
    _add_weight_flags(p)
    p.add_argument("--uncertainty", choices=UNCERTAINTY_VARIANTS, default="standard")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--replicate-table")
    p.add_argument("--emit-plot-data", metavar="DIR")
    p.add_argument("--output")
    p.set_defaults(func=_cmd_study)

    p = sub.add_parser("diagnose", help="residual checks of a spectrum at a given amplitude")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--output")
    p.set_defaults(func=_cmd_diagnose)

    return parser


def _cmd_simulate(args: argparse.Namespace) -> int:
    params = SinusoidParams(
        amplitude=args.amplitude, offset=args.offset, scale=args.scale, n=args.channels
    )
    signal = make_sinusoid_signal(params)
    noise = gaussian_sequence(args.seed, signal.n, args.standardize)
    spectrum = synthesize_spectrum(signal, args.alpha, noise)
    write_spectrum_file(args.spectrum_out, signal, spectrum)
    write_noise_file(args.noise_out, noise)
    sys.stdout.write(f"wrote {args.spectrum_out}\nwrote {args.noise_out}\n")
    return 0


def _cmd_fit(args: argparse.Namespace) -> int:
    signal, spectrum = read_spectrum_file(args.spectrum)
    weights = WeightMode(kind=args.weights, floor=args.floor)

    if args.method == "ls":
        est = ls_estimate(spectrum, signal, weights)
        noise_echo = None
    else:
        if args.noise_file is not None:
            noise = read_noise_file(args.noise_file)
            noise_echo = {"file": args.noise_file}
        elif args.noise_seed is not None:
            noise = gaussian_sequence(args.noise_seed, signal.n, args.standardize)
            noise_echo = {"seed": args.noise_seed, "standardize": args.standardize}
        else:
            raise ValidationError("method modlik needs --noise-file or --noise-seed")
        if args.init == "auto":
            init: float | str = "auto"
        else:
            try:
                init = float(args.init)
            except ValueError:
                raise ValidationError(
                    f"--init must be a number or 'auto', got {args.init!r}"
                ) from None
        est = solve_alpha(
            spectrum,
            signal,
            noise,
            init=init,
            rel_tol=args.rel_tol,
            variant=args.uncertainty,
        )

    payload = {
        "estimate": estimate_to_dict(est),
        "config": {
            "spectrum": args.spectrum,
            "method": args.method,
            "weights": {"kind": args.weights, "floor": args.floor},
            "uncertainty": args.uncertainty,
            "init": args.init,
            "rel_tol": args.rel_tol,
            "noise": noise_echo,
        },
    }
    _emit(document("fit", payload), args.output)
    return 0


def _write_plot_data(outdir: str, config: StudyConfig, report) -> None:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    signal = make_sinusoid_signal(config.signal_params)
    data_noise = gaussian_sequence(config.data_seed, signal.n, config.standardize)
    spectrum = synthesize_spectrum(signal, config.alpha_true, data_noise)
    rep_noises = [
        gaussian_sequence(seed, signal.n, config.standardize) for seed in report.seeds_used
    ]

    lines = ["channel,F,m"]
    for i in range(signal.n):
        lines.append(f"{i},{_fmt(signal.values[i])},{_fmt(spectrum.counts[i])}")
    (out / "signal_spectrum.csv").write_text("\n".join(lines) + "\n")

    width = len(str(len(rep_noises) - 1)) if rep_noises else 1
    header = ["channel", "bg_data"] + [f"bg_rep_{k:0{width}d}" for k in range(len(rep_noises))]
    lines = [",".join(header)]
    for i in range(signal.n):
        row = [str(i), _fmt(data_noise.values[i])]
        row += [_fmt(nz.values[i]) for nz in rep_noises]
        lines.append(",".join(row))
    (out / "noise_sequences.csv").write_text("\n".join(lines) + "\n")

    lines = ["replicate,seed,alpha,delta_alpha,ls_alpha,alpha_true"]
    for k, seed in enumerate(report.seeds_used):
        lines.append(
            f"{k},{seed},{_fmt(report.replicate_alphas[k])},"
            f"{_fmt(report.per_replicate_uncertainties[k])},"
            f"{_fmt(report.ls_baseline.alpha)},{_fmt(config.alpha_true)}"
        )
    (out / "replicates.csv").write_text("\n".join(lines) + "\n")

    # score of the final replicate on a geometric grid around its root; the
    # grid point nearest the root carries the marker
    final_noise = rep_noises[-1]
    root = report.replicate_alphas[-1]
    lo = root / 4.0
    ratio = 16.0 ** (1.0 / (_SCORE_CURVE_POINTS - 1))
    grid = [lo * ratio**j for j in range(_SCORE_CURVE_POINTS)]
    nearest = min(range(len(grid)), key=lambda j: abs(grid[j] - root))
    lines = ["alpha,score,is_root"]
    for j, a in enumerate(grid):
        score = score_reduced(a, spectrum, signal, final_noise)
        lines.append(f"{_fmt(a)},{_fmt(score)},{1 if j == nearest else 0}")
    (out / "score_curve.csv").write_text("\n".join(lines) + "\n")


def _cmd_study(args: argparse.Namespace) -> int:
    config = StudyConfig(
        signal_params=SinusoidParams(
            amplitude=args.amplitude, offset=args.offset, scale=args.scale, n=args.channels
        ),
        alpha_true=args.alpha_true,
        data_seed=args.data_seed,
        study_seed=args.study_seed,
        replicates=args.replicates,
        standardize=args.standardize,
        weights=WeightMode(kind=args.weights, floor=args.floor),
        uncertainty_variant=args.uncertainty,
    )
    report = run_study(config, workers=args.workers)

    if args.replicate_table is not None:
        lines = ["replicate,seed,alpha,delta_alpha"]
        for k, seed in enumerate(report.seeds_used):
            lines.append(
                f"{k},{seed},{_fmt(report.replicate_alphas[k])},"
                f"{_fmt(report.per_replicate_uncertainties[k])}"
            )
        Path(args.replicate_table).write_text("\n".join(lines) + "\n")

    if args.emit_plot_data is not None:
        _write_plot_data(args.emit_plot_data, config, report)

    _emit(document("study", replicate_report_to_dict(report)), args.output)
    return 0


def _cmd_diagnose(args: argparse.Namespace) -> int:
    signal, spectrum = read_spectrum_file(args.spectrum)
    rr = residual_diagnostics(spectrum, signal, args.alpha)

    negatives = int(sum(1 for v in rr.residuals if v < 0.0))
    nonzero = rr.positive_count + negatives
    halfwidth = 1.98 * math.sqrt(nonzero)
    sign_ok = abs(rr.positive_count - nonzero / 2.0) <= halfwidth
    spread_ok = math.isnan(rr.normalized_std) or rr.normalized_std <= 1.1

    payload = {
        "alpha": args.alpha,
        "residual_report": residual_report_to_dict(rr),
        "checks": {
            "sign_balance": {
                "status": "pass" if sign_ok else "warn",
                "positive": rr.positive_count,
                "negative": negatives,
                "band_halfwidth": halfwidth,
            },
            "normalized_spread": {
                "status": "pass" if spread_ok else "warn",
                "max_allowed": 1.1,
            },
        },
    }
    _emit(document("diagnostics", payload), args.output)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except EstimationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
