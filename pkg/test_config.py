import json
import os

import pytest

import config
from core.errors import ConfigError


def test_defaults():
    cfg = config.load_run_config()
    assert cfg.train.lr == config.DEFAULT_LR
    assert cfg.train.lam == config.DEFAULT_LAMBDA
    assert cfg.train.hidden == (32, 32)
    assert cfg.dataset.partition.k == 6
    assert cfg.dataset.partition.eta == 4
    assert cfg.dataset.seed == cfg.train.seed
    assert cfg.checkpoint_path == os.path.join(config.OUT_DIR, "checkpoint.json")
    assert cfg.split_path("val") == os.path.join(config.OUT_DIR, "data", "val.jsonl")


def test_file_then_overrides(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"lambda": 0.01, "epochs": 3, "data_seed": 9,
                                "out_dir": str(tmp_path / "out")}))
    cfg = config.load_run_config(str(path), {"lambda": 0.5, "epochs": None, "seed": 4})
    assert cfg.train.lam == 0.5
    assert cfg.train.epochs == 3
    assert cfg.train.seed == 4
    assert cfg.dataset.seed == 9
    assert cfg.out_dir == str(tmp_path / "out")


def test_unknown_key_is_rejected():
    with pytest.raises(ConfigError, match="learning_rate"):
        config.build_run_config({"learning_rate": 0.1})


@pytest.mark.parametrize("values", [
    {"groups": [[0, 1], [1, 2]], "k": 3},
    {"lr": -1.0},
    {"reg_mode": "l2"},
    {"rho": 2.0},
    {"gamma": 0.0},
    {"out_dir": ""},
])
def test_invalid_values_raise_config_error(values):
    with pytest.raises(ConfigError):
        config.build_run_config(values)


def test_bad_json(tmp_path):
    path = tmp_path / "run.json"
    path.write_text("{lambda: 0.1")
    with pytest.raises(ConfigError, match="not valid JSON"):
        config.load_run_config(str(path))
    path.write_text("[1, 2]")
    with pytest.raises(ConfigError, match="JSON object"):
        config.load_run_config(str(path))
