"""Command-line front end.

Exit codes: 0 success, 2 usage or config error, 3 data error, 4 runtime or
resource error. Parallelism is read from $OPTCHOICE_WORKERS.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from dataclasses import fields, replace
from pathlib import Path
from typing import Any

import yaml

from . import __version__
from .baselines import LogisticModel, TrainConfig, fit_logistic
from .core import (
    Dataset,
    describe,
    lotwise_auc,
    pointwise_accuracy,
    predict_dataset,
    success_rate,
)
from .datagen import GenConfig, engine_preset, generate
from .errors import DataError, InvalidArgumentError, OptChoiceError, SchemaError
from .evaluation import (
    MODES,
    BruteForceTrainer,
    LogisticTrainer,
    NelderMeadTrainer,
    Trainer,
    build_report,
    leave_one_lot_out,
)
from .features import AGGREGATES, AugmentationSpec, augment, negate
from .optimize import BruteForceConfig, LinearScorer, brute_force_search, default_nm_config, maximize_success_rate
from .serialization import (
    align_to,
    load_dataset,
    load_model,
    save_dataset,
    save_logistic,
    save_scorer,
)


EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_RUNTIME = 0, 2, 3, 4


class ConfigError(OptChoiceError):
    pass


# ---------------------------------------------------------------------------
# shared argument groups

def _add_data(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="dataset CSV")
    p.add_argument("--negate-features", action="store_true", help="flip feature signs before fitting")


def _add_bruteforce(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("brute force")
    g.add_argument("--n", type=int, default=5, help="coefficients range over 0..n (default 5)")
    g.add_argument("--tolerance", type=float, default=0.01)


def _add_neldermead(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("Nelder-Mead")
    g.add_argument("--starts-seed", type=int, default=0)
    g.add_argument("--max-iterations", type=int, default=None, help="default 500*d")
    g.add_argument("--simplex-scale", type=float, default=0.5)


def _add_logistic(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("logistic regression")
    g.add_argument("--lr", type=float, default=0.5)
    g.add_argument("--epochs", type=int, default=500)
    g.add_argument("--l2", type=float, default=0.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--positive-weight", type=float, default=1.0)


def _parse_augment(values: Sequence[str] | None) -> AugmentationSpec | None:
    if not values:
        return None
    records = []
    for v in values:
        agg, sep, feat = v.partition(":")
        if not sep or agg not in AGGREGATES or not feat:
            raise ConfigError(f"--augment expects AGG:FEATURE with AGG in {sorted(AGGREGATES)}, got {v!r}")
        records.append({"feature": feat, "aggregate": agg})
    return AugmentationSpec.from_records(records)


def _load(args: argparse.Namespace) -> Dataset:
    ds = load_dataset(args.data)
    return negate(ds) if getattr(args, "negate_features", False) else ds


def _train_config(args: argparse.Namespace) -> TrainConfig:
    return TrainConfig(
        learning_rate=args.lr, epochs=args.epochs, l2_penalty=args.l2, seed=args.seed,
        positive_weight=args.positive_weight,
    )


def _nm_trainer(args: argparse.Namespace) -> NelderMeadTrainer:
    return NelderMeadTrainer(seed=args.starts_seed, max_iterations=args.max_iterations, simplex_scale=args.simplex_scale)


# ---------------------------------------------------------------------------
# subcommands

def cmd_gen(args: argparse.Namespace) -> int:
    cfg = engine_preset() if args.preset == "engine" else GenConfig()
    over: dict[str, Any] = {}
    if args.lots is not None:
        over["lots"] = args.lots
    if args.choices is not None:
        over["choices_min"], over["choices_max"] = args.choices
    if args.dim is not None:
        over["dimension"] = args.dim
    if args.binary_index is not None:
        over["binary_feature_index"] = None if args.binary_index < 0 else args.binary_index
    if args.weights is not None:
        over["planted_weights"] = tuple(float(w) for w in args.weights.split(","))
    elif args.dim is not None and args.dim != cfg.dimension:
        over["planted_weights"] = (1.0,) * args.dim
    if args.noise is not None:
        over["noise_sigma"] = args.noise
    if args.prime_probability is not None:
        over["prime_probability"] = args.prime_probability
    if args.seed is not None:
        over["seed"] = args.seed
    if args.invert:
        over["invert"] = True
    ds = generate(replace(cfg, **over))
    save_dataset(ds, args.out)
    info = describe(ds)
    print(f"wrote {args.out}: {info['lots']} lots, {info['choices']} choices, {info['dimension']} features")
    return EXIT_OK


def cmd_augment(args: argparse.Namespace) -> int:
    spec = _parse_augment(args.augment)
    if spec is None:
        raise ConfigError("augment needs at least one --augment AGG:FEATURE")
    ds = augment(load_dataset(args.data), spec)
    save_dataset(ds, args.out)
    print(f"wrote {args.out}: {ds.dimension} features")
    return EXIT_OK


def cmd_bruteforce(args: argparse.Namespace) -> int:
    ds = _load(args)
    scorer, rate = brute_force_search(ds, BruteForceConfig(n=args.n, tolerance=args.tolerance))
    print(f"coefficients {' '.join(f'{c:g}' for c in scorer.coefficients)}")
    print(f"success {rate:.4f}")
    if args.out:
        save_scorer(scorer, args.out)
    return EXIT_OK


def cmd_neldermead(args: argparse.Namespace) -> int:
    ds = _load(args)
    kw: dict[str, Any] = {"simplex_scale": args.simplex_scale}
    if args.max_iterations is not None:
        kw["max_iterations"] = args.max_iterations
    scorer, rate = maximize_success_rate(ds, default_nm_config(ds.dimension, args.starts_seed, **kw))
    print(f"coefficients {' '.join(repr(float(c)) for c in scorer.coefficients)}")
    print(f"success {rate:.4f}")
    if args.out:
        save_scorer(scorer, args.out)
    return EXIT_OK


def cmd_logistic(args: argparse.Namespace) -> int:
    ds = _load(args)
    model = fit_logistic(ds, _train_config(args))
    print(f"success {success_rate(model, ds):.4f}")
    if args.out:
        save_logistic(model, ds.feature_names, args.out)
    return EXIT_OK


def cmd_loo(args: argparse.Namespace) -> int:
    ds = _load(args)
    trainer: Trainer
    if args.method == "bruteforce":
        trainer = BruteForceTrainer(BruteForceConfig(n=args.n, tolerance=args.tolerance))
    elif args.method == "neldermead":
        trainer = _nm_trainer(args)
    else:
        trainer = LogisticTrainer(_train_config(args))
    rate = leave_one_lot_out(trainer, ds, _parse_augment(args.augment))
    print(f"{args.method} leave-one-lot-out success {rate:.4f} over {len(ds)} lots")
    return EXIT_OK


def cmd_diagnose(args: argparse.Namespace) -> int:
    ds = _load(args)
    model = load_model(args.scorer)
    if isinstance(model, LinearScorer):
        scorer: Any = LinearScorer(align_to(model.feature_names, model.coefficients, ds), ds.feature_names)
    else:
        logit, names = model
        scorer = LogisticModel(align_to(names, logit.weights, ds), logit.bias)
    preds = predict_dataset(scorer, ds)
    print(f"lots      {len(ds)}")
    print(f"choices   {ds.n_choices}")
    print(f"accuracy  {pointwise_accuracy(preds, ds):.4f}")
    if any(lot.prime is None for lot in ds.lots):
        print("auc       n/a (some lots have no prime)")
    else:
        print(f"auc       {lotwise_auc(scorer, ds):.4f}")
    print(f"success   {success_rate(scorer, ds):.4f}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# run: config-driven pipeline

_METHOD_KEYS = {
    "bruteforce": {"n", "tolerance", "candidate_cap"},
    "neldermead": {"seed", "max_iterations", "simplex_scale"},
    "logistic": {f.name for f in fields(TrainConfig)},
}


def _method_trainer(entry: Any) -> Trainer:
    if not isinstance(entry, dict) or "type" not in entry:
        raise ConfigError(f"each method needs a 'type': {entry!r}")
    kind = entry["type"]
    if kind not in _METHOD_KEYS:
        raise ConfigError(f"unknown method type {kind!r}; expected one of {sorted(_METHOD_KEYS)}")
    params = {k: v for k, v in entry.items() if k not in ("type", "name")}
    unknown = set(params) - _METHOD_KEYS[kind]
    if unknown:
        raise ConfigError(f"unknown parameters for {kind}: {sorted(unknown)}")
    name = str(entry.get("name", kind))
    try:
        if kind == "bruteforce":
            return BruteForceTrainer(BruteForceConfig(**params), name=name)
        if kind == "neldermead":
            return NelderMeadTrainer(**params, name=name)
        return LogisticTrainer(TrainConfig(**params), name=name)
    except (TypeError, InvalidArgumentError) as e:
        raise ConfigError(f"method {name!r}: {e}") from e


def _config_dataset(section: Any, base: Path) -> Dataset:
    if not isinstance(section, dict) or ("path" in section) == ("preset" in section):
        raise ConfigError("data section needs exactly one of 'path' or 'preset'")
    if "path" in section:
        path = Path(section["path"])
        return load_dataset(path if path.is_absolute() else base / path)
    if section["preset"] != "engine":
        raise ConfigError(f"unknown preset {section['preset']!r}")
    over = dict(section.get("overrides") or {})
    if "planted_weights" in over:
        over["planted_weights"] = tuple(over["planted_weights"])
    try:
        return generate(replace(engine_preset(), **over))
    except TypeError as e:
        raise ConfigError(f"bad preset override: {e}") from e


def load_run_config(path: Path) -> dict:
    try:
        cfg = yaml.safe_load(path.read_text())
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse {path}: {e}") from e
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path} must contain a mapping")
    unknown = set(cfg) - {"data", "augment", "methods", "evaluation", "negate_features", "output"}
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    if not cfg.get("methods"):
        raise ConfigError("config lists no methods")
    return cfg


def cmd_run(args: argparse.Namespace) -> int:
    path = Path(args.config)
    cfg = load_run_config(path)
    trainers = [_method_trainer(m) for m in cfg["methods"]]
    mode = cfg.get("evaluation", "both")
    if mode not in MODES:
        raise ConfigError(f"evaluation must be one of {MODES}, got {mode!r}")
    spec = AugmentationSpec.from_records(cfg["augment"]) if cfg.get("augment") else None
    ds = _config_dataset(cfg.get("data"), path.parent)
    if cfg.get("negate_features"):
        ds = negate(ds)
    if spec is not None:
        spec.check(ds.feature_names)
    report = build_report(ds, trainers, spec, mode)
    text = report.to_text()
    sys.stdout.write(text)
    out = args.out or cfg.get("output")
    if out:
        out = Path(out)
        out.write_text(text)
        out.with_suffix(out.suffix + ".tsv").write_text(report.to_tsv())
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="optchoice", description="Learn to pick the prime choice of each lot.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic dataset")
    p.add_argument("--preset", choices=["engine"])
    p.add_argument("--lots", type=int)
    p.add_argument("--choices", type=int, nargs=2, metavar=("MIN", "MAX"))
    p.add_argument("--dim", type=int)
    p.add_argument("--binary-index", type=int, help="index of the binary feature (-1 for none)")
    p.add_argument("--weights", help="comma-separated planted weights")
    p.add_argument("--noise", type=float)
    p.add_argument("--prime-probability", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--invert", action="store_true", help="emit 1-x so smaller is better")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("augment", help="append lot-aggregate features")
    p.add_argument("--data", required=True)
    p.add_argument("--augment", action="append", metavar="AGG:FEATURE", help="e.g. min:f1; repeatable")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("bruteforce", help="exhaustive integer coefficient search")
    _add_data(p)
    _add_bruteforce(p)
    p.add_argument("--out", help="write the scorer here")
    p.set_defaults(func=cmd_bruteforce)

    p = sub.add_parser("neldermead", help="multi-start Nelder-Mead on the success rate")
    _add_data(p)
    _add_neldermead(p)
    p.add_argument("--out", help="write the scorer here")
    p.set_defaults(func=cmd_neldermead)

    p = sub.add_parser("logistic", help="point-wise logistic regression baseline")
    _add_data(p)
    _add_logistic(p)
    p.add_argument("--out", help="write the model here")
    p.set_defaults(func=cmd_logistic)

    p = sub.add_parser("loo", help="leave-one-lot-out success rate of one method")
    _add_data(p)
    p.add_argument("--method", choices=["bruteforce", "neldermead", "logistic"], required=True)
    p.add_argument("--augment", action="append", metavar="AGG:FEATURE")
    _add_bruteforce(p)
    _add_neldermead(p)
    _add_logistic(p)
    p.set_defaults(func=cmd_loo)

    p = sub.add_parser("run", help="run a config-driven experiment and write a report")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="report path (overrides the config's output)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("diagnose", help="accuracy, AUC and success rate side by side")
    _add_data(p)
    p.add_argument("--scorer", required=True, help="scorer or logistic model file")
    p.set_defaults(func=cmd_diagnose)
    return parser


def _exit_code(e: BaseException) -> int:
    if isinstance(e, (ConfigError, InvalidArgumentError)) and not isinstance(e, (DataError, SchemaError)):
        return EXIT_USAGE
    if isinstance(e, (DataError, SchemaError, FileNotFoundError)):
        return EXIT_DATA
    return EXIT_RUNTIME


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (OptChoiceError, OSError) as e:
        msg = " ".join(str(e).split())
        print(f"optchoice {args.command}: error: {msg}", file=sys.stderr)
        return _exit_code(e)


if __name__ == "__main__":
    sys.exit(main())
