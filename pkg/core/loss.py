"""
Training objective: the uncertainty partial cross-entropy (UPCE, the expected
partial cross-entropy under the predicted GDD) plus a regularizer on the
evidence that does not support the label.

Every loss has an analytic gradient in (α, c). The batched entry point
`objective` is what the trainer calls; the per-label functions wrap it.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Sequence, Tuple, Union

import numpy as np

from core import gdd, special_fn
from core.errors import DomainError
from core.gdd import GddParams
from core.hyperdomain import LabelTargets, Partition, encode_labels

PCE_FLOOR = 1e-300
DEFAULT_LAMBDA = 0.1


class RegMode(str, Enum):
    KL = "kl"
    ENTROPY = "entropy"
    DIRICHLET_KL = "dirichlet-kl"
    NONE = "none"


@dataclass(frozen=True)
class LossBreakdown:
    upce: float
    reg: float
    total: float
    lam: float


@dataclass(frozen=True)
class LossGrad:
    d_alpha: np.ndarray
    d_c: np.ndarray


class Pce(NamedTuple):
    value: Union[float, np.ndarray]
    clamped: bool


Label = Union[Sequence[int], LabelTargets]


def pce(p: Sequence[float], y: Sequence[int]) -> Pce:
    """-log Σ_k y_k p_k; p may carry leading batch axes."""
    probs = np.asarray(p, dtype=np.float64)
    inner = probs @ np.asarray(y, dtype=np.float64)
    clamped = bool(np.any(inner < PCE_FLOOR))
    if clamped:
        logging.warning(f"PCE inner product below {PCE_FLOOR}; clamping to the floor")
        inner = np.maximum(inner, PCE_FLOOR)
    value = -np.log(inner)
    if np.ndim(value) == 0:
        value = float(value)
    return Pce(value, clamped)


def _targets(y: Label, partition: Partition) -> LabelTargets:
    if isinstance(y, LabelTargets):
        return y
    return encode_labels([y], partition)


def _batched(params: GddParams) -> Tuple[GddParams, bool]:
    if params.alpha.ndim == 1:
        return GddParams(params.alpha[None, :], params.c[None, :], params.partition), True
    if params.alpha.ndim != 2:
        raise DomainError("loss functions take one parameter set or a flat batch")
    return params, False


def _label_masks(targets: LabelTargets, partition: Partition):
    """Entries of (α, c) that carry supporting evidence for each label."""
    n = len(targets)
    rows = np.arange(n)
    alpha_mask = np.zeros((n, partition.k), dtype=bool)
    sing = targets.is_singleton
    alpha_mask[rows[sing], targets.singleton[sing]] = True
    c_mask = np.zeros((n, partition.eta), dtype=bool)
    c_mask[rows[~sing], targets.group[~sing]] = True
    return alpha_mask, c_mask


def _upce_and_grad(params: GddParams, targets: LabelTargets):
    part = params.partition
    rows = np.arange(len(targets))
    g = targets.group
    sing = targets.is_singleton.astype(np.float64)
    s = np.where(targets.is_singleton, targets.singleton, 0)

    beta = params.beta
    group_alpha = params.group_alpha
    beta0 = params.beta0
    beta_g = beta[rows, g]
    group_alpha_g = group_alpha[rows, g]
    alpha_s = params.alpha[rows, s]

    value = (
        special_fn.digamma(beta0)
        - special_fn.digamma(beta_g)
        + sing * (special_fn.digamma(group_alpha_g) - special_fn.digamma(alpha_s))
    )

    tri_beta0 = special_fn.trigamma(beta0)[:, None]
    tri_beta_g = special_fn.trigamma(beta_g)[:, None]
    members = part.membership[g]
    onehot_s = np.zeros_like(params.alpha)
    onehot_s[rows, s] = 1.0
    d_alpha = (
        tri_beta0
        - members * tri_beta_g
        + sing[:, None]
        * (members * special_fn.trigamma(group_alpha_g)[:, None]
           - onehot_s * special_fn.trigamma(alpha_s)[:, None])
    )
    onehot_g = np.zeros_like(params.c)
    onehot_g[rows, g] = 1.0
    d_c = tri_beta0 - onehot_g * tri_beta_g
    return value, d_alpha, d_c


def _masked(params: GddParams, targets: LabelTargets) -> GddParams:
    alpha_mask, c_mask = _label_masks(targets, params.partition)
    return GddParams(
        np.where(alpha_mask, 1.0, params.alpha),
        np.where(c_mask, 0.0, params.c),
        params.partition,
    )


def _reg_and_grad(params: GddParams, targets: LabelTargets, mode: RegMode):
    mode = RegMode(mode)
    n = len(targets)
    if mode is RegMode.NONE:
        return np.zeros(n), np.zeros_like(params.alpha), np.zeros_like(params.c)

    if mode is RegMode.ENTROPY:
        value = -np.asarray(gdd.entropy(params))
        d_alpha, d_c = gdd.kl_to_flat_grad(params)
        return value, d_alpha, d_c

    alpha_mask, c_mask = _label_masks(targets, params.partition)
    alpha_bar = np.where(alpha_mask, 1.0, params.alpha)

    if mode is RegMode.DIRICHLET_KL:
        k = params.partition.k
        dirichlet = GddParams(alpha_bar, np.zeros((n, k)), Partition.singletons(k))
        value = np.asarray(gdd.kl_to_flat(dirichlet))
        d_alpha, _ = gdd.kl_to_flat_grad(dirichlet)
        return value, np.where(alpha_mask, 0.0, d_alpha), np.zeros_like(params.c)

    masked = GddParams(alpha_bar, np.where(c_mask, 0.0, params.c), params.partition)
    value = np.asarray(gdd.kl_to_flat(masked))
    d_alpha, d_c = gdd.kl_to_flat_grad(masked)
    return value, np.where(alpha_mask, 0.0, d_alpha), np.where(c_mask, 0.0, d_c)


def objective(params: GddParams, targets: LabelTargets, lam: float = DEFAULT_LAMBDA,
              mode: RegMode = RegMode.KL):
    """
    Per-example UPCE, regularizer and the gradient of UPCE + λ·Reg.

    params is a batch of shape (B, K) / (B, η) aligned with targets.
    Returns (upce (B,), reg (B,), d_alpha (B, K), d_c (B, η)).
    """
    if lam < 0:
        raise DomainError(f"lambda must be >= 0, got {lam}")
    upce_value, du_alpha, du_c = _upce_and_grad(params, targets)
    reg_value, dr_alpha, dr_c = _reg_and_grad(params, targets, mode)
    return upce_value, reg_value, du_alpha + lam * dr_alpha, du_c + lam * dr_c


def upce(params: GddParams, y: Label) -> float:
    batch, single = _batched(params)
    value = _upce_and_grad(batch, _targets(y, params.partition))[0]
    return float(value[0]) if single else value


def masked_params(params: GddParams, y: Label) -> GddParams:
    """Drop the evidence that supports the label: ᾱ_IS = 1 or c̄_IC = 0."""
    batch, single = _batched(params)
    masked = _masked(batch, _targets(y, params.partition))
    return masked[0] if single else masked


def reg(params: GddParams, y: Label, mode: RegMode = RegMode.KL) -> float:
    batch, single = _batched(params)
    value = _reg_and_grad(batch, _targets(y, params.partition), mode)[0]
    return float(value[0]) if single else value


def total_loss(params: GddParams, y: Label, lam: float = DEFAULT_LAMBDA,
               mode: RegMode = RegMode.KL) -> LossBreakdown:
    if lam < 0:
        raise DomainError(f"lambda must be >= 0, got {lam}")
    u = upce(params, y)
    r = reg(params, y, mode)
    return LossBreakdown(upce=u, reg=r, total=u + lam * r, lam=lam)


def grad_total(params: GddParams, y: Label, lam: float = DEFAULT_LAMBDA,
               mode: RegMode = RegMode.KL) -> LossGrad:
    batch, single = _batched(params)
    _, _, d_alpha, d_c = objective(batch, _targets(y, params.partition), lam, mode)
    if single:
        return LossGrad(d_alpha[0], d_c[0])
    return LossGrad(d_alpha, d_c)
