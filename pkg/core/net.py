"""
Feed-forward evidence network f(x; θ) -> e ∈ R+^(K+m) with a softplus head,
analytic backpropagation through the UPCE objective, Adam, and the epoch loop.
"""

import json
import logging
import os
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from core import gdd, opinion
from core.errors import CheckpointError, ConfigError, DomainError
from core.gdd import GddParams
from core.hyperdomain import LabelKind, LabelTargets, Partition
from core.loss import LossBreakdown, RegMode, objective

ACTIVATIONS = ("relu", "tanh")
EVIDENCE_FLOOR = np.finfo(np.float64).tiny


@dataclass
class MlpParams:
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    activation: str = "relu"

    @property
    def dims(self) -> List[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    def copy(self) -> "MlpParams":
        return MlpParams([w.copy() for w in self.weights], [b.copy() for b in self.biases],
                         self.activation)


@dataclass
class AdamState:
    m: List[np.ndarray]
    v: List[np.ndarray]
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


@dataclass
class TrainConfig:
    lr: float = 0.005
    lam: float = 0.1
    epochs: int = 100
    batch_size: int = 64
    seed: int = 0
    hidden: Tuple[int, ...] = (32, 32)
    activation: str = "relu"
    reg_mode: str = RegMode.KL.value

    def __post_init__(self):
        if self.lr <= 0:
            raise ConfigError(f"learning rate must be > 0, got {self.lr}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch size must be >= 1, got {self.batch_size}")
        if self.lam < 0:
            raise ConfigError(f"lambda must be >= 0, got {self.lam}")
        if self.activation not in ACTIVATIONS:
            raise ConfigError(f"activation must be one of {ACTIVATIONS}, got {self.activation}")
        try:
            RegMode(self.reg_mode)
        except ValueError:
            raise ConfigError(f"unknown regularizer mode {self.reg_mode!r}")
        self.hidden = tuple(int(h) for h in self.hidden)


@dataclass
class Prediction:
    evidence: np.ndarray
    params: GddParams
    set_prediction: LabelKind
    singleton_prediction: int
    vacuity: float
    vagueness: float
    dissonance: float
    entropy: float

    @property
    def predicted_set(self) -> frozenset:
        return opinion.kind_to_set(self.set_prediction)


def init_params(dims: Sequence[int], seed: int, activation: str = "relu") -> MlpParams:
    """Uniform Glorot initialisation in ±sqrt(6 / (fan_in + fan_out)), zero biases."""
    if activation not in ACTIVATIONS:
        raise ConfigError(f"activation must be one of {ACTIVATIONS}, got {activation}")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpParams(weights, biases, activation)


def softplus(z: np.ndarray) -> np.ndarray:
    """log(1 + e^z), floored at the smallest normal float so evidence stays > 0."""
    return np.maximum(np.logaddexp(0.0, z), EVIDENCE_FLOOR)


def _act(params: MlpParams, a: np.ndarray) -> np.ndarray:
    if params.activation == "tanh":
        return np.tanh(a)
    return np.maximum(a, 0.0)


def _act_grad(params: MlpParams, a: np.ndarray, h: np.ndarray) -> np.ndarray:
    if params.activation == "tanh":
        return 1.0 - h * h
    return (a > 0).astype(np.float64)


def _run(params: MlpParams, x: np.ndarray):
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != params.dims[0]:
        raise DomainError(f"input has {x.shape[-1]} features, network expects {params.dims[0]}")
    pre, post = [], [x]
    h = x
    for w, b in zip(params.weights[:-1], params.biases[:-1]):
        a = h @ w + b
        h = _act(params, a)
        pre.append(a)
        post.append(h)
    z = h @ params.weights[-1] + params.biases[-1]
    return z, pre, post


def forward(params: MlpParams, x: np.ndarray) -> np.ndarray:
    """Evidence for one input (d,) or a batch (B, d)."""
    z, _, _ = _run(params, x)
    return softplus(z)


def evidence_to_params(evidence: np.ndarray, partition: Partition) -> GddParams:
    return gdd.params_from_evidence(evidence, partition)


def backward(params: MlpParams, x: np.ndarray, targets: LabelTargets, partition: Partition,
             lam: float, mode: RegMode = RegMode.KL) -> Tuple[MlpParams, LossBreakdown]:
    """
    Gradient of the batch-mean loss (1/|B|) Σ UPCE + λ·Reg with respect to
    every weight and bias, and the mean loss breakdown.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if partition.head_width != params.dims[-1]:
        raise DomainError(
            f"network head has width {params.dims[-1]}, partition needs {partition.head_width}"
        )
    z, pre, post = _run(params, x)
    evidence = softplus(z)
    batch = len(x)
    gparams = evidence_to_params(evidence, partition)
    upce_value, reg_value, d_alpha, d_c = objective(gparams, targets, lam, mode)

    d_evidence = np.concatenate([d_alpha, d_c[:, list(partition.composite_groups)]], axis=1)
    delta = d_evidence * expit(z) / batch

    grad_w = [None] * len(params.weights)
    grad_b = [None] * len(params.biases)
    for layer in reversed(range(len(params.weights))):
        grad_w[layer] = post[layer].T @ delta
        grad_b[layer] = delta.sum(axis=0)
        if layer > 0:
            dh = delta @ params.weights[layer].T
            delta = dh * _act_grad(params, pre[layer - 1], post[layer])

    mean_upce = float(np.mean(upce_value))
    mean_reg = float(np.mean(reg_value))
    breakdown = LossBreakdown(mean_upce, mean_reg, mean_upce + lam * mean_reg, lam)
    return MlpParams(grad_w, grad_b, params.activation), breakdown


def batch_loss(params: MlpParams, x: np.ndarray, targets: LabelTargets, partition: Partition,
               lam: float, mode: RegMode = RegMode.KL) -> float:
    """Scalar batch-mean loss; the function backward() differentiates."""
    evidence = forward(params, np.atleast_2d(x))
    upce_value, reg_value, _, _ = objective(evidence_to_params(evidence, partition), targets,
                                            lam, mode)
    return float(np.mean(upce_value) + lam * np.mean(reg_value))


def init_adam(params: MlpParams) -> AdamState:
    tensors = params.weights + params.biases
    return AdamState([np.zeros_like(t) for t in tensors], [np.zeros_like(t) for t in tensors])


def adam_step(params: MlpParams, grads: MlpParams, state: AdamState,
              lr: float) -> Tuple[MlpParams, AdamState]:
    tensors = params.weights + params.biases
    grad_tensors = grads.weights + grads.biases
    if len(tensors) != len(grad_tensors) or any(
        t.shape != g.shape for t, g in zip(tensors, grad_tensors)
    ):
        raise DomainError("gradient shapes do not match the parameters")
    t = state.t + 1
    new_m, new_v, updated = [], [], []
    for theta, g, m, v in zip(tensors, grad_tensors, state.m, state.v):
        m = state.beta1 * m + (1.0 - state.beta1) * g
        v = state.beta2 * v + (1.0 - state.beta2) * g * g
        m_hat = m / (1.0 - state.beta1 ** t)
        v_hat = v / (1.0 - state.beta2 ** t)
        updated.append(theta - lr * m_hat / (np.sqrt(v_hat) + state.eps))
        new_m.append(m)
        new_v.append(v)
    n = len(params.weights)
    new_params = MlpParams(updated[:n], updated[n:], params.activation)
    return new_params, AdamState(new_m, new_v, t, state.beta1, state.beta2, state.eps)


def epoch_permutation(seed: int, epoch: int, n: int) -> np.ndarray:
    return np.random.default_rng([seed, epoch]).permutation(n)


def train_epoch(params: MlpParams, state: AdamState, x: np.ndarray, targets: LabelTargets,
                partition: Partition, cfg: TrainConfig,
                epoch: int = 0) -> Tuple[MlpParams, AdamState, LossBreakdown]:
    """One pass over the data in shuffled mini-batches, one Adam step per batch."""
    x = np.asarray(x, dtype=np.float64)
    n = len(x)
    if n == 0:
        raise DomainError("cannot train on an empty dataset")
    mode = RegMode(cfg.reg_mode)
    order = epoch_permutation(cfg.seed, epoch, n)
    upce_sum = reg_sum = 0.0
    for start in range(0, n, cfg.batch_size):
        idx = order[start : start + cfg.batch_size]
        grads, breakdown = backward(params, x[idx], targets.take(idx), partition, cfg.lam, mode)
        params, state = adam_step(params, grads, state, cfg.lr)
        upce_sum += breakdown.upce * len(idx)
        reg_sum += breakdown.reg * len(idx)
    mean_upce, mean_reg = upce_sum / n, reg_sum / n
    return params, state, LossBreakdown(mean_upce, mean_reg, mean_upce + cfg.lam * mean_reg,
                                        cfg.lam)


def _prediction(evidence: np.ndarray, partition: Partition,
                family: opinion.FocalFamily) -> Prediction:
    params = evidence_to_params(evidence, partition)
    op = opinion.opinion_from_evidence(evidence, partition.k)
    return Prediction(
        evidence=evidence,
        params=params,
        set_prediction=opinion.argmax_evidence(evidence, partition),
        singleton_prediction=gdd.projected_prediction(params),
        vacuity=opinion.vacuity(op),
        vagueness=opinion.vagueness(op, family),
        dissonance=opinion.dissonance(op, family),
        entropy=gdd.entropy(params),
    )


def predict_from_evidence(evidence: Sequence[float], partition: Partition) -> Prediction:
    return _prediction(np.asarray(evidence, dtype=np.float64), partition,
                       opinion.FocalFamily.from_partition(partition))


def predict(params: MlpParams, x: np.ndarray, partition: Partition) -> Prediction:
    return predict_from_evidence(forward(params, np.asarray(x, dtype=np.float64)), partition)


def predict_batch(params: MlpParams, x: np.ndarray, partition: Partition) -> List[Prediction]:
    family = opinion.FocalFamily.from_partition(partition)
    evidence = forward(params, np.atleast_2d(x))
    return [_prediction(e, partition, family) for e in evidence]


def set_predictions(evidence: np.ndarray, partition: Partition) -> List[frozenset]:
    """Batch form of the largest-evidence set prediction; lowest index wins ties."""
    sets = opinion.FocalFamily.from_partition(partition).sets
    return [sets[i] for i in np.argmax(np.atleast_2d(evidence), axis=1)]


def save_checkpoint(path: str, params: MlpParams, partition: Partition,
                    meta: Optional[dict] = None) -> None:
    dir_path = os.path.dirname(path)
    if dir_path:
        os.makedirs(dir_path, exist_ok=True)
    payload = {
        "dims": params.dims,
        "activation": params.activation,
        "partition": partition.to_dict(),
        "weights": [w.tolist() for w in params.weights],
        "biases": [b.tolist() for b in params.biases],
        "meta": meta or {},
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2)
    logging.info(f"Checkpoint written to {path}")


def load_checkpoint(path: str, partition: Optional[Partition] = None):
    """Returns (params, partition, meta); checks the domain when one is given."""
    with open(path, "r", encoding="utf-8") as f:
        try:
            payload = json.load(f)
        except json.JSONDecodeError as e:
            raise CheckpointError(f"{path} is not a valid checkpoint: {e}")
    try:
        stored = Partition.from_dict(payload["partition"])
        params = MlpParams(
            [np.asarray(w, dtype=np.float64) for w in payload["weights"]],
            [np.asarray(b, dtype=np.float64) for b in payload["biases"]],
            payload["activation"],
        )
    except (KeyError, TypeError, IndexError) as e:
        raise CheckpointError(f"{path} is missing checkpoint fields: {e}")
    if partition is not None and stored != partition:
        raise CheckpointError(
            f"checkpoint domain {stored.to_dict()} does not match data domain {partition.to_dict()}"
        )
    if params.dims != payload["dims"] or params.dims[-1] != stored.head_width:
        raise CheckpointError(f"checkpoint dims {payload['dims']} are inconsistent")
    return params, stored, payload.get("meta", {})
