"""
Run defaults and the JSON run-config loader.

A run config is one flat JSON object; any key left out takes the default
below. Command-line flags override values read from the file.
"""

import json
import os
from dataclasses import dataclass
from typing import Any, Dict, Optional

from core.data import DatasetSpec
from core.errors import ConfigError, HennError
from core.hyperdomain import Partition
from core.net import TrainConfig

# Training
DEFAULT_LR = 0.005
DEFAULT_LAMBDA = 0.1
DEFAULT_EPOCHS = 100
DEFAULT_BATCH_SIZE = 64
DEFAULT_HIDDEN = (32, 32)
DEFAULT_ACTIVATION = "relu"
DEFAULT_REG_MODE = "kl"
DEFAULT_SEED = 0

# Synthetic dataset
DEFAULT_K = 6
DEFAULT_GROUPS = ((0,), (1, 2), (3,), (4, 5))
DEFAULT_D = 2
DEFAULT_RADIUS = 8.0
DEFAULT_STD = 1.0
DEFAULT_BLUR = 2.0
DEFAULT_RHO = 0.5
DEFAULT_COUNTS = {"train": 2000, "val": 500, "test": 500}

# Oracle and reporting
MC_SAMPLES = 200_000
NONZERO_GAMMA = 1e-4
OUT_DIR = "runs/default"

DEFAULT_ABLATION_LAMBDAS = (0.0, 1e-8, 1e-4, 0.01, 0.1)

DEFAULTS: Dict[str, Any] = {
    "out_dir": OUT_DIR,
    "seed": DEFAULT_SEED,
    "data_seed": None,
    "lr": DEFAULT_LR,
    "lambda": DEFAULT_LAMBDA,
    "epochs": DEFAULT_EPOCHS,
    "batch_size": DEFAULT_BATCH_SIZE,
    "hidden": list(DEFAULT_HIDDEN),
    "activation": DEFAULT_ACTIVATION,
    "reg_mode": DEFAULT_REG_MODE,
    "k": DEFAULT_K,
    "groups": [list(g) for g in DEFAULT_GROUPS],
    "d": DEFAULT_D,
    "radius": DEFAULT_RADIUS,
    "std": DEFAULT_STD,
    "blur": DEFAULT_BLUR,
    "rho": DEFAULT_RHO,
    "counts": dict(DEFAULT_COUNTS),
    "gamma": NONZERO_GAMMA,
}


@dataclass
class RunConfig:
    train: TrainConfig
    dataset: DatasetSpec
    out_dir: str
    gamma: float = NONZERO_GAMMA

    @property
    def data_dir(self) -> str:
        return os.path.join(self.out_dir, "data")

    def split_path(self, split: str) -> str:
        return os.path.join(self.data_dir, f"{split}.jsonl")

    @property
    def domain_path(self) -> str:
        return os.path.join(self.data_dir, "domain.json")

    @property
    def checkpoint_path(self) -> str:
        return os.path.join(self.out_dir, "checkpoint.json")

    @property
    def loss_log_path(self) -> str:
        return os.path.join(self.out_dir, "loss_log.jsonl")

    @property
    def metrics_txt_path(self) -> str:
        return os.path.join(self.out_dir, "metrics.txt")

    @property
    def metrics_json_path(self) -> str:
        return os.path.join(self.out_dir, "metrics.json")

    @property
    def uncertainty_path(self) -> str:
        return os.path.join(self.out_dir, "uncertainty.jsonl")

    @property
    def ablation_path(self) -> str:
        return os.path.join(self.out_dir, "ablation.json")


def _read_document(path: str) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        try:
            document = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: not valid JSON ({e})")
    if not isinstance(document, dict):
        raise ConfigError(f"{path}: the config must be a JSON object")
    return document


def build_run_config(values: Dict[str, Any]) -> RunConfig:
    unknown = sorted(set(values) - set(DEFAULTS))
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    v = {**DEFAULTS, **values}
    if not v["out_dir"]:
        raise ConfigError("out_dir must be a non-empty path")
    try:
        partition = Partition.checked(v["k"], v["groups"])
        train = TrainConfig(
            lr=float(v["lr"]),
            lam=float(v["lambda"]),
            epochs=int(v["epochs"]),
            batch_size=int(v["batch_size"]),
            seed=int(v["seed"]),
            hidden=tuple(v["hidden"]),
            activation=v["activation"],
            reg_mode=v["reg_mode"],
        )
        data_seed = v["seed"] if v["data_seed"] is None else v["data_seed"]
        dataset = DatasetSpec(
            partition=partition,
            d=int(v["d"]),
            radius=float(v["radius"]),
            std=float(v["std"]),
            rho=float(v["rho"]),
            blur=float(v["blur"]),
            counts={split: int(n) for split, n in v["counts"].items()},
            seed=int(data_seed),
        )
    except ConfigError:
        raise
    except (HennError, TypeError, ValueError, AttributeError) as e:
        raise ConfigError(f"invalid config: {e}")
    gamma = float(v["gamma"])
    if gamma <= 0:
        raise ConfigError(f"gamma must be > 0, got {gamma}")
    return RunConfig(train=train, dataset=dataset, out_dir=str(v["out_dir"]), gamma=gamma)


def load_run_config(path: Optional[str] = None,
                    overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Defaults, then the JSON file at path, then the non-None overrides."""
    values: Dict[str, Any] = {}
    if path:
        values.update(_read_document(path))
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    return build_run_config(values)
