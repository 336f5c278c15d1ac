"""
Command-line entry point: ``landing-gp [--config FILE] [--quiet] <subcommand> ...``.

Exit codes: 0 success, 1 usage or configuration error, 2 data/schema error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

from .config import ConfigError, derive_seed, digest_mapping, digest_text, load_config_file, parse_int
from .constants import DEFAULT_BLOCKS, DEFAULT_EVAL_END, DEFAULT_EVAL_START, DEFAULT_FOLDS, DEFAULT_TEST_SIZE
from .dataset import (
    BrakeProfile,
    DatasetSchemaError,
    FlightDatabase,
    FoldCapacityError,
    GeneratorConfig,
    ThrottleProfile,
    generate_synthetic,
    split_folds,
)
from .evaluation import FoldError, ReportFormat, cross_validate, emit_report, load_report, score_landings
from .gp import (
    FactorizationError,
    GpModel,
    HorizonMismatchError,
    ModelFormatError,
    NegativeVarianceError,
    OptimizerConfig,
    TimeWeight,
    WeightMode,
    block_scheme,
    fit_model,
    predict_profile,
)
from .io import get_default_output_dir, load_csv, read_json, save_csv, write_canonical_csv, write_json
from .regressors import (
    FeatureMode,
    ForestConfig,
    GaussianProcessRegressor,
    LinearRegressor,
    NotFittedError,
    RandomForestRegressor,
    Regressor,
)
from .schemas import AnomalyScoreRowSchema

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

MODEL_CHOICES = ("gp", "lr", "rf")


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; usage errors here exit with 1."""

    def error(self, message: str):  # type: ignore[override]
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from exc
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _non_negative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from exc
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _model_list(text: str) -> list[str]:
    names = [name.strip() for name in text.split(",") if name.strip()]
    unknown = [name for name in names if name not in MODEL_CHOICES]
    if not names or unknown:
        raise argparse.ArgumentTypeError(f"models must be a comma list of {','.join(MODEL_CHOICES)}, got {text!r}")
    return list(dict.fromkeys(names))


def _add_optimizer_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--blocks", type=_positive_int, default=None, help=f"Time blocks N (default {DEFAULT_BLOCKS}).")
    parser.add_argument("--weight", choices=[WeightMode.UNIFORM, WeightMode.CAUSAL_BOX], default=WeightMode.UNIFORM)
    parser.add_argument("--standardize", action="store_true", help="Z-score kernel input channels.")
    parser.add_argument("--max-iters", type=_positive_int, default=None)
    parser.add_argument("--restarts", type=_positive_int, default=None)
    parser.add_argument("--threads", type=_positive_int, default=1, help="Worker threads for blocks and folds.")


def _add_range_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--eval-end", type=_non_negative_int, default=DEFAULT_EVAL_END, help="Last evaluated second.")
    group.add_argument("--full-range", action="store_true", help="Evaluate over the whole horizon.")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="landing-gp", description="Deceleration-profile reconstruction with Gaussian processes."
    )
    parser.add_argument("--config", type=Path, default=None, help="Flat key=value config file.")
    parser.add_argument("--quiet", action="store_true", help="Only log warnings and errors.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    gen = sub.add_parser("gen", help="Generate a synthetic landing CSV.")
    gen.add_argument("--landings", type=_positive_int, required=True)
    gen.add_argument("--seed", type=_non_negative_int, default=None)
    gen.add_argument("--out", type=Path, default=None)
    gen.add_argument("--noise-std", type=float, default=None)
    gen.add_argument("--horizon", type=_positive_int, default=None)
    gen.add_argument("--brake-family", choices=[str(p) for p in BrakeProfile], default=None)
    gen.add_argument("--throttle-family", choices=[str(p) for p in ThrottleProfile], default=None)
    gen.add_argument("--brake-efficiency", type=float, default=None)

    fit = sub.add_parser("fit", help="Fit a GP model and write it as JSON.")
    fit.add_argument("--data", type=Path, required=True)
    fit.add_argument("--out", type=Path, default=None)
    fit.add_argument("--seed", type=_non_negative_int, default=None)
    _add_optimizer_flags(fit)

    predict = sub.add_parser("predict", help="Predict decel_force profiles for a landing CSV.")
    predict.add_argument("--model", type=Path, required=True)
    predict.add_argument("--data", type=Path, required=True)
    predict.add_argument("--out", type=Path, default=None)

    crossval = sub.add_parser("crossval", help="Cross-validate one or more models and emit reports.")
    crossval.add_argument("--data", type=Path, required=True)
    crossval.add_argument("--out", type=Path, default=None)
    crossval.add_argument("--model", type=_model_list, default=["gp"], help="Comma list of gp,lr,rf.")
    crossval.add_argument("--folds", type=_positive_int, default=None)
    crossval.add_argument("--test-size", type=_positive_int, default=None)
    crossval.add_argument("--seed", type=_non_negative_int, default=None)
    crossval.add_argument("--trees", type=_positive_int, default=None)
    crossval.add_argument("--features", choices=[str(f) for f in FeatureMode], default=None)
    crossval.add_argument("--format", choices=[str(f) for f in ReportFormat], default=ReportFormat.ALL)
    _add_range_flags(crossval)
    _add_optimizer_flags(crossval)

    score = sub.add_parser("score", help="Anomaly scores of measured landings against a model.")
    score.add_argument("--model", type=Path, required=True)
    score.add_argument("--data", type=Path, required=True)
    score.add_argument("--out", type=Path, default=None)
    score.add_argument("--threshold", type=float, default=None)
    score.add_argument(
        "--with-variance", action="store_true", help="Also compute z-scores from the posterior variance."
    )
    _add_range_flags(score)

    report = sub.add_parser("report", help="Re-emit a report.json in other formats.")
    report.add_argument("--input", type=Path, required=True)
    report.add_argument("--out", type=Path, default=None)
    report.add_argument("--format", choices=[str(f) for f in ReportFormat], default=ReportFormat.ALL)
    return parser


def _root_seed(args: argparse.Namespace, file_config: dict[str, str]) -> int:
    return args.seed if args.seed is not None else parse_int(file_config, "seed", 0)


def _eval_range(args: argparse.Namespace) -> tuple[int, int] | None:
    return None if args.full_range else (DEFAULT_EVAL_START, args.eval_end)


def _output(args: argparse.Namespace, default_name: str) -> Path:
    return args.out if args.out is not None else get_default_output_dir() / default_name


def _file_digest(path: Path) -> str:
    return digest_text(path.read_text(encoding="utf-8"))


def _optimizer(args: argparse.Namespace, file_config: dict[str, str], seed: int) -> OptimizerConfig:
    return OptimizerConfig.from_mapping(
        file_config, max_iters=args.max_iters, restarts=args.restarts, seed=derive_seed(seed, "hyperfit")
    )


def _n_blocks(args: argparse.Namespace, file_config: dict[str, str]) -> int:
    return args.blocks if args.blocks is not None else parse_int(file_config, "blocks", DEFAULT_BLOCKS)


def cmd_gen(args: argparse.Namespace, file_config: dict[str, str]) -> str:
    seed = _root_seed(args, file_config)
    cfg = GeneratorConfig.from_mapping(
        file_config,
        n_landings=args.landings,
        seed=derive_seed(seed, "generator"),
        horizon=args.horizon,
        noise_std=args.noise_std,
        brake_profile_family=args.brake_family,
        throttle_profile_family=args.throttle_family,
        brake_efficiency=args.brake_efficiency,
    )
    out = _output(args, "landings.csv")
    save_csv(generate_synthetic(cfg), out)
    return _file_digest(out)


def cmd_fit(args: argparse.Namespace, file_config: dict[str, str]) -> str:
    seed = _root_seed(args, file_config)
    db = load_csv(args.data)
    scheme = block_scheme(db.horizon, _n_blocks(args, file_config))
    model = fit_model(
        db,
        scheme,
        _optimizer(args, file_config, seed),
        TimeWeight(WeightMode(args.weight)),
        standardize=args.standardize,
        threads=args.threads,
    )
    write_json(model.to_dict(), _output(args, "model.json"))
    return _file_digest(args.data)


def cmd_predict(args: argparse.Namespace, file_config: dict[str, str]) -> str:
    model = GpModel.from_dict(read_json(args.model))
    db = load_csv(args.data)
    if db.n_ob == 0:
        predicted = FlightDatabase(horizon=model.horizon, landings=())
    else:
        profiles = predict_profile(model, db.inputs())
        predicted = FlightDatabase.from_landings(
            [landing.with_target(profile) for landing, profile in zip(db, profiles, strict=True)]
        )
    save_csv(predicted, _output(args, "predicted.csv"))
    return _file_digest(args.data)


def _build_regressor(name: str, args: argparse.Namespace, file_config: dict[str, str], seed: int) -> Regressor:
    match name:
        case "gp":
            return GaussianProcessRegressor(
                n_blocks=_n_blocks(args, file_config),
                optimizer=_optimizer(args, file_config, seed),
                weight=TimeWeight(WeightMode(args.weight)),
                standardize=args.standardize,
            )
        case "lr":
            return LinearRegressor(features=args.features or file_config.get("features") or FeatureMode.PER_T)
        case "rf":
            forest = ForestConfig.from_mapping(
                file_config, n_trees=args.trees, features=args.features, seed=derive_seed(seed, "forest")
            )
            return RandomForestRegressor(forest)
    raise UsageError(f"unknown model {name!r}")


def cmd_crossval(args: argparse.Namespace, file_config: dict[str, str]) -> str:
    seed = _root_seed(args, file_config)
    db = load_csv(args.data)
    n_folds = args.folds if args.folds is not None else parse_int(file_config, "folds", DEFAULT_FOLDS)
    n_test = args.test_size if args.test_size is not None else parse_int(file_config, "test_size", DEFAULT_TEST_SIZE)
    plan = split_folds(db.n_ob, n_folds, n_test, derive_seed(seed, "folds"))
    eval_range = _eval_range(args)

    reports = []
    for name in args.model:
        regressor = _build_regressor(name, args, file_config, seed)
        reports.append(cross_validate(db, regressor, plan, eval_range, threads=args.threads))
    emit_report(reports, _output(args, "crossval"), args.format)
    return _file_digest(args.data)


def cmd_score(args: argparse.Namespace, file_config: dict[str, str]) -> str:
    model = GpModel.from_dict(read_json(args.model))
    db = load_csv(args.data)
    if db.n_ob and db.horizon != model.horizon:
        raise HorizonMismatchError(f"model has T={model.horizon}, data has T={db.horizon}")
    scores = score_landings(
        model, db, _eval_range(args), with_variance=args.with_variance, threshold=args.threshold
    )
    write_canonical_csv(scores, AnomalyScoreRowSchema, _output(args, "scores.csv"))
    return _file_digest(args.data)


def cmd_report(args: argparse.Namespace, file_config: dict[str, str]) -> str:
    reports = load_report(args.input)
    emit_report(reports, _output(args, "report"), args.format)
    return _file_digest(args.input if args.input.is_file() else args.input / "report.json")


COMMANDS: dict[str, Callable[[argparse.Namespace, dict[str, str]], str]] = {
    "gen": cmd_gen,
    "fit": cmd_fit,
    "predict": cmd_predict,
    "crossval": cmd_crossval,
    "score": cmd_score,
    "report": cmd_report,
}


def exit_code_for(exc: BaseException) -> int | None:
    """Map a failure onto the CLI exit codes; None for unexpected exceptions."""
    if isinstance(exc, FoldError) and exc.__cause__ is not None:
        return exit_code_for(exc.__cause__) or EXIT_NUMERIC
    if isinstance(exc, (UsageError, ConfigError, FoldCapacityError)):
        return EXIT_USAGE
    if isinstance(exc, (FactorizationError, NegativeVarianceError, NotFittedError)):
        return EXIT_NUMERIC
    if isinstance(exc, (DatasetSchemaError, HorizonMismatchError, ModelFormatError, json.JSONDecodeError, OSError)):
        return EXIT_DATA
    if isinstance(exc, ValueError):
        return EXIT_USAGE
    return None


# outputs do not depend on these, so neither does the config digest
_UNDIGESTED_SETTINGS = ("quiet", "threads")


def _run_config(args: argparse.Namespace, file_config: dict[str, str]) -> dict[str, object]:
    flags = {key: str(value) for key, value in vars(args).items() if key not in _UNDIGESTED_SETTINGS}
    from_file = {f"file.{key}": value for key, value in file_config.items() if key not in _UNDIGESTED_SETTINGS}
    return {**from_file, **flags}


def run(argv: Sequence[str] | None = None) -> int:
    """Parse `argv`, run the subcommand and return its exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    if args.quiet:
        logging.getLogger("landing_gp").setLevel(logging.WARNING)

    try:
        file_config = load_config_file(args.config) if args.config is not None else {}
        data_digest = COMMANDS[args.command](args, file_config)
    except Exception as exc:
        code = exit_code_for(exc)
        if code is None:
            raise
        logger.error(f"{args.command} failed: {exc}")
        return code

    print(f"run {args.command} config={digest_mapping(_run_config(args, file_config))[:12]} data={data_digest[:12]}")
    return EXIT_OK


def main() -> None:
    """Console-script entry point."""
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    sys.exit(run())


if __name__ == "__main__":
    main()
