import argparse
import json
import logging
import os
import sys
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

import config
from core import data, evaluation, gdd, net
from core.checks import CheckRegistry
from core.errors import ConfigError, DomainError, HennError
from core.evaluation import PredictionRecord
from core.hyperdomain import Partition, label_set
from core.loss import RegMode

logging.basicConfig(
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s", level=logging.INFO
)

REPORT_KEYS = ("over_js", "comp_js", "acc", "nz_sngl", "nz_comp")


def _load_split(cfg: config.RunConfig, split: str) -> Tuple[Partition, List[data.Sample]]:
    partition = data.read_domain(cfg.domain_path)
    return partition, data.read_jsonl(cfg.split_path(split), partition)


def _records(params: net.MlpParams, samples: Sequence[data.Sample],
             partition: Partition) -> Tuple[List[PredictionRecord], np.ndarray]:
    x = np.array([s.features for s in samples], dtype=np.float64)
    preds = net.predict_batch(params, x, partition)
    records = [
        PredictionRecord(
            truth=label_set(s.label),
            set_pred=p.predicted_set,
            singleton_pred=p.singleton_prediction,
            scores={"vagueness": p.vagueness, "vacuity": p.vacuity, "dissonance": p.dissonance},
        )
        for s, p in zip(samples, preds)
    ]
    evidence = np.array([p.evidence for p in preds])
    return records, evidence


def _validation_records(params: net.MlpParams, x: np.ndarray, truths: List[frozenset],
                        partition: Partition) -> List[PredictionRecord]:
    evidence = net.forward(params, x)
    sets = net.set_predictions(evidence, partition)
    singles = np.atleast_1d(gdd.projected_prediction(net.evidence_to_params(evidence, partition)))
    return [PredictionRecord(t, s, int(k)) for t, s, k in zip(truths, sets, singles)]


def fit(cfg: config.RunConfig, train: Sequence[data.Sample], val: Sequence[data.Sample],
        partition: Partition):
    """
    Train for cfg.train.epochs and keep the parameters of the epoch with the
    best validation set accuracy (earliest epoch on ties).

    Returns (best params, per-epoch log rows, best epoch index).
    """
    tcfg = cfg.train
    if not train:
        raise DomainError("the training split is empty; nothing to fit")
    x, targets = data.to_arrays(train, partition)
    x_val = np.array([s.features for s in val], dtype=np.float64)
    truths = [label_set(s.label) for s in val]

    dims = [x.shape[1], *tcfg.hidden, partition.head_width]
    params = net.init_params(dims, tcfg.seed, tcfg.activation)
    state = net.init_adam(params)
    best_params, best_acc, best_epoch = params.copy(), float("-inf"), -1
    log_rows = []
    for epoch in range(tcfg.epochs):
        params, state, breakdown = net.train_epoch(params, state, x, targets, partition, tcfg,
                                                   epoch)
        row = {"epoch": epoch, "upce": breakdown.upce, "reg": breakdown.reg,
               "total": breakdown.total, "lambda": breakdown.lam}
        if val:
            records = _validation_records(params, x_val, truths, partition)
            row["val_set_acc"] = evaluation.set_accuracy(records)
            row["val_acc"] = evaluation.accuracy(records)
        log_rows.append(row)
        logging.info(
            f"Epoch {epoch + 1}/{tcfg.epochs}: loss={breakdown.total:.5f} "
            f"(upce={breakdown.upce:.5f}, reg={breakdown.reg:.5f}) "
            f"val_set_acc={row.get('val_set_acc', float('nan')):.4f}"
        )
        score = row.get("val_set_acc", -breakdown.total)
        if score > best_acc:
            best_params, best_acc, best_epoch = params.copy(), score, epoch
    logging.info(f"Best epoch {best_epoch + 1} with validation score {best_acc:.4f}")
    return best_params, log_rows, best_epoch


def evaluate(params: net.MlpParams, samples: Sequence[data.Sample], partition: Partition,
             gamma: float) -> Dict:
    records, evidence = _records(params, samples, partition)
    metrics = evaluation.summarize(records)
    metrics.update(evaluation.nonzero_ratios(evidence, partition, gamma))
    return metrics


def _write_text(path: str, text: str):
    dir_path = os.path.dirname(path)
    if dir_path:
        os.makedirs(dir_path, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)


def cmd_gen_data(cfg: config.RunConfig, args) -> int:
    splits = data.generate(cfg.dataset)
    data.write_dataset(splits, cfg.dataset.partition, cfg.data_dir)
    for split, samples in splits.items():
        composite = data.composite_count(samples)
        print(f"{split}: {len(samples)} samples, {composite} composite, "
              f"{len(samples) - composite} singleton")
    return 0


def cmd_train(cfg: config.RunConfig, args) -> int:
    partition, train = _load_split(cfg, "train")
    _, val = _load_split(cfg, "val")
    params, log_rows, best_epoch = fit(cfg, train, val, partition)
    _write_text(cfg.loss_log_path, "".join(json.dumps(r) + "\n" for r in log_rows))
    meta = {
        "best_epoch": best_epoch,
        "lambda": cfg.train.lam,
        "reg_mode": cfg.train.reg_mode,
        "seed": cfg.train.seed,
        "epochs": cfg.train.epochs,
    }
    net.save_checkpoint(cfg.checkpoint_path, params, partition, meta)
    print(f"best epoch {best_epoch + 1}/{cfg.train.epochs}; checkpoint {cfg.checkpoint_path}")
    return 0


def cmd_eval(cfg: config.RunConfig, args) -> int:
    partition, test = _load_split(cfg, "test")
    params, _, _ = net.load_checkpoint(cfg.checkpoint_path, partition)
    metrics = evaluate(params, test, partition, cfg.gamma)
    report = evaluation.format_report(metrics)
    _write_text(cfg.metrics_txt_path, report)
    _write_text(cfg.metrics_json_path, evaluation.report_json(metrics))
    print(report, end="")
    return 0


def cmd_uncertainty(cfg: config.RunConfig, args) -> int:
    split = getattr(args, "split", "test")
    partition, samples = _load_split(cfg, split)
    params, _, _ = net.load_checkpoint(cfg.checkpoint_path, partition)
    x = np.array([s.features for s in samples], dtype=np.float64)
    preds = net.predict_batch(params, x, partition)
    lines = []
    for i, (s, p) in enumerate(zip(samples, preds)):
        singles = p.evidence[: partition.k]
        composites = p.evidence[partition.k :]
        lines.append(json.dumps({
            "index": i,
            "label": list(s.label),
            "evidence": p.evidence.tolist(),
            "set_prediction": sorted(p.predicted_set),
            "singleton_prediction": p.singleton_prediction,
            "vacuity": p.vacuity,
            "vagueness": p.vagueness,
            "dissonance": p.dissonance,
            "entropy": p.entropy,
            "nz_sngl": bool(singles.mean() >= cfg.gamma),
            "nz_comp": bool(composites.size and composites.mean() >= cfg.gamma),
        }) + "\n")
    _write_text(cfg.uncertainty_path, "".join(lines))
    if preds:
        evidence = np.array([p.evidence for p in preds])
        ratios = evaluation.nonzero_ratios(evidence, partition, cfg.gamma)
        print(f"nz_sngl: {ratios['nz_sngl']:.4f}\nnz_comp: {ratios['nz_comp']:.4f}")
    logging.info(f"Wrote {len(lines)} uncertainty records to {cfg.uncertainty_path}")
    return 0


def cmd_verify(cfg: Optional[config.RunConfig], args) -> int:
    registry = CheckRegistry()
    registry.load_modules()
    only = getattr(args, "only", None)
    if not registry.names(only):
        logging.error(f"No checks match {only!r}")
        return 1
    results = registry.run(only)
    for result in results:
        print(result.row())
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def _float_list(text: str) -> List[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def cmd_ablation(cfg: config.RunConfig, args) -> int:
    """Regularization-strength (and optionally regularizer-mode) sweep over several seeds."""
    partition, train = _load_split(cfg, "train")
    _, val = _load_split(cfg, "val")
    _, test = _load_split(cfg, "test")
    lambdas = args.lambdas or list(config.DEFAULT_ABLATION_LAMBDAS)
    try:
        modes = [RegMode(m).value for m in (args.reg_modes or [cfg.train.reg_mode])]
    except ValueError as e:
        raise ConfigError(str(e))
    seeds = range(cfg.train.seed, cfg.train.seed + args.seeds)

    rows = []
    for mode in modes:
        for lam in lambdas:
            runs = []
            for seed in seeds:
                run_cfg = config.RunConfig(
                    train=net.TrainConfig(**{**vars(cfg.train), "lam": lam, "seed": seed,
                                             "reg_mode": mode}),
                    dataset=cfg.dataset, out_dir=cfg.out_dir, gamma=cfg.gamma,
                )
                params, _, _ = fit(run_cfg, train, val, partition)
                runs.append(evaluate(params, test, partition, cfg.gamma))
            summary = {"reg_mode": mode, "lambda": lam, "seeds": len(runs)}
            for key in REPORT_KEYS:
                values = [r[key] if r[key] is not None else 0.0 for r in runs]
                summary[key] = evaluation.mean_std(values)
            rows.append(summary)
            print(f"{summary['reg_mode']:<13} lambda={lam:<8g} " + "  ".join(
                f"{key}={summary[key]['mean']:.4f}±{summary[key]['std']:.4f}"
                for key in REPORT_KEYS
            ))
    _write_text(cfg.ablation_path, json.dumps(rows, indent=2) + "\n")
    logging.info(f"Ablation table written to {cfg.ablation_path}")
    return 0


COMMANDS = {
    "gen-data": (cmd_gen_data, "Generate the synthetic train/val/test splits"),
    "train": (cmd_train, "Train the evidence network and write the best checkpoint"),
    "eval": (cmd_eval, "Evaluate a checkpoint on the test split"),
    "uncertainty": (cmd_uncertainty, "Write per-sample uncertainty records"),
    "verify": (cmd_verify, "Run the analytic-vs-oracle verification suite"),
    "ablation": (cmd_ablation, "Sweep the regularization strength over seeds"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run config")
    common.add_argument("--seed", type=int, help="Training (and default data) seed")
    common.add_argument("--lambda", dest="lam", type=float, help="Regularization strength")
    common.add_argument("--reg-mode", choices=[m.value for m in RegMode], help="Regularizer")
    common.add_argument("--out", help="Output directory")
    common.add_argument("--epochs", type=int, help="Training epochs")
    common.add_argument("--verbose", action="store_true", help="Debug logging")

    parser = argparse.ArgumentParser(prog="henn", description="Hyper-evidential classification")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name == "uncertainty":
            p.add_argument("--split", choices=data.SPLITS, default="test")
        elif name == "verify":
            p.add_argument("--only", help="Run only checks whose name starts with this prefix")
        elif name == "ablation":
            p.add_argument("--lambdas", type=_float_list, help="Comma-separated lambda values")
            p.add_argument("--seeds", type=int, default=1, help="Number of consecutive seeds")
            p.add_argument("--reg-modes", type=lambda s: s.split(","),
                           help="Comma-separated regularizer modes")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.getLogger().setLevel(logging.DEBUG if args.verbose else logging.INFO)
    handler, _ = COMMANDS[args.command]
    try:
        cfg = config.load_run_config(args.config, {
            "seed": args.seed,
            "lambda": args.lam,
            "reg_mode": args.reg_mode,
            "out_dir": args.out,
            "epochs": args.epochs,
        })
        if args.command == "ablation" and args.seeds < 1:
            raise ConfigError(f"--seeds must be >= 1, got {args.seeds}")
        return handler(cfg, args)
    except HennError as e:
        logging.error(f"{args.command} failed: {e}")
        return 1
    except OSError as e:
        logging.error(f"{args.command} failed with an I/O error: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
