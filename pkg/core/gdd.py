"""
Grouped Dirichlet distribution GDD(p | α, c) over the K-simplex.

The density is proportional to ∏_k p_k^(α_k - 1) · ∏_j (Σ_{l∈S_j} p_l)^(c_j)
with normalizer Z = ∏_j B({α_l}_{l∈S_j}) · B(β_1, ..., β_η), where
β_j = Σ_{l∈S_j} α_l + c_j and β₀ = Σ_j β_j.

GddParams may carry leading batch axes (alpha of shape (..., K), c of shape
(..., η)); every function here works over them.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from core import special_fn
from core.errors import DomainError
from core.hyperdomain import Partition

SIMPLEX_TOL = 1e-9


@dataclass(frozen=True)
class GddParams:
    alpha: np.ndarray
    c: np.ndarray
    partition: Partition

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=np.float64)
        c = np.asarray(self.c, dtype=np.float64)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "c", c)
        if alpha.shape[-1:] != (self.partition.k,):
            raise DomainError(f"alpha must end in axis of size {self.partition.k}, got {alpha.shape}")
        if c.shape[-1:] != (self.partition.eta,):
            raise DomainError(f"c must end in axis of size {self.partition.eta}, got {c.shape}")
        if not (np.all(np.isfinite(alpha)) and np.all(np.isfinite(c))):
            raise DomainError("GDD parameters must be finite")
        if np.any(alpha <= 0):
            raise DomainError("alpha entries must be > 0")
        if np.any(c < 0):
            raise DomainError("c entries must be >= 0")

    @classmethod
    def of(cls, alpha: Sequence[float], c: Sequence[float], partition: Partition) -> "GddParams":
        return cls(np.asarray(alpha, dtype=np.float64), np.asarray(c, dtype=np.float64), partition)

    @classmethod
    def flat(cls, partition: Partition) -> "GddParams":
        return cls(np.ones(partition.k), np.zeros(partition.eta), partition)

    @property
    def group_alpha(self) -> np.ndarray:
        """α_{S_j} = Σ_{l∈S_j} α_l, shape (..., η)."""
        return self.alpha @ self.partition.membership.T

    @property
    def beta(self) -> np.ndarray:
        return self.group_alpha + self.c

    @property
    def beta0(self) -> np.ndarray:
        return np.sum(self.beta, axis=-1)

    def __getitem__(self, idx) -> "GddParams":
        """Select along the batch axes."""
        return GddParams(self.alpha[idx], self.c[idx], self.partition)


def params_from_evidence(e: Sequence[float], partition: Partition) -> GddParams:
    """α = e_singletons + 1; c_j = composite evidence of group j, 0 for singleton groups."""
    evidence = np.asarray(e, dtype=np.float64)
    if evidence.shape[-1:] != (partition.head_width,):
        raise DomainError(
            f"evidence must end in axis of size {partition.head_width}, got {evidence.shape}"
        )
    if np.any(evidence < 0):
        raise DomainError("evidence must be non-negative")
    alpha = evidence[..., : partition.k] + 1.0
    c = np.zeros(evidence.shape[:-1] + (partition.eta,))
    c[..., list(partition.composite_groups)] = evidence[..., partition.k :]
    return GddParams(alpha, c, partition)


def log_normalizer(p: GddParams):
    part = p.partition
    within = np.zeros(p.alpha.shape[:-1])
    for group in part.groups:
        within = within + special_fn.log_beta_multi(p.alpha[..., list(group)])
    value = within + special_fn.log_beta_multi(p.beta)
    return _scalar(value)


def log_pdf(p: GddParams, x: Sequence[float]):
    """Log density at x; x has shape (..., K) and broadcasts against the params."""
    pts = np.asarray(x, dtype=np.float64)
    if pts.shape[-1:] != (p.partition.k,):
        raise DomainError(f"point must have {p.partition.k} coordinates, got shape {pts.shape}")
    if np.any(pts <= 0) or np.any(np.abs(np.sum(pts, axis=-1) - 1.0) > SIMPLEX_TOL):
        raise DomainError("point is not in the open simplex")
    group_mass = pts @ p.partition.membership.T
    value = (
        np.sum((p.alpha - 1.0) * np.log(pts), axis=-1)
        + np.sum(p.c * np.log(group_mass), axis=-1)
        - log_normalizer(p)
    )
    return _scalar(value)


def mean(p: GddParams) -> np.ndarray:
    """Expected class-probability vector."""
    g = p.partition.group_of
    beta = p.beta
    ratio = beta / p.group_alpha
    return p.alpha / np.asarray(p.beta0)[..., None] * ratio[..., g]


def expected_log_singletons(p: GddParams) -> np.ndarray:
    """E[log p_k] for every k, shape (..., K)."""
    g = p.partition.group_of
    group_term = special_fn.digamma(p.beta) - special_fn.digamma(p.group_alpha)
    return (
        special_fn.digamma(p.alpha)
        - np.asarray(special_fn.digamma(p.beta0))[..., None]
        + np.asarray(group_term)[..., g]
    )


def expected_log_groups(p: GddParams) -> np.ndarray:
    """E[log Σ_{l∈S_j} p_l] for every group j, shape (..., η)."""
    return special_fn.digamma(p.beta) - np.asarray(special_fn.digamma(p.beta0))[..., None]


def expected_log_singleton(p: GddParams, k: int):
    if k < 0 or k >= p.partition.k:
        raise DomainError(f"class index {k} out of range")
    return _scalar(expected_log_singletons(p)[..., k])


def expected_log_group(p: GddParams, j: int):
    if j < 0 or j >= p.partition.eta:
        raise DomainError(f"group index {j} out of range")
    return _scalar(expected_log_groups(p)[..., j])


def _natural_offset(p: GddParams):
    """Natural parameters (α - 1, c), the offset from the flat GDD."""
    return p.alpha - 1.0, p.c


def entropy(p: GddParams):
    rho, c = _natural_offset(p)
    value = (
        log_normalizer(p)
        - np.sum(rho * expected_log_singletons(p), axis=-1)
        - np.sum(c * expected_log_groups(p), axis=-1)
    )
    return _scalar(value)


def flat_log_normalizer(partition: Partition) -> float:
    return -float(special_fn.log_gamma(float(partition.k)))


def kl_to_flat(p: GddParams):
    """KL(GDD(α, c) ‖ GDD(1, 0)); the flat GDD is uniform on the simplex."""
    rho, c = _natural_offset(p)
    value = (
        flat_log_normalizer(p.partition)
        - log_normalizer(p)
        + np.sum(rho * expected_log_singletons(p), axis=-1)
        + np.sum(c * expected_log_groups(p), axis=-1)
    )
    return _scalar(value)


def fisher_times(p: GddParams, v_alpha: np.ndarray, v_c: np.ndarray):
    """
    Product of the Fisher information (Hessian of log Z in (α, c)) with a
    direction (v_alpha, v_c). Returns the (α, c) components.
    """
    part = p.partition
    g = part.group_of
    tri_alpha = special_fn.trigamma(p.alpha)
    tri_beta = special_fn.trigamma(p.beta)
    tri_group_alpha = special_fn.trigamma(p.group_alpha)
    tri_beta0 = np.asarray(special_fn.trigamma(p.beta0))[..., None]

    group_v = v_alpha @ part.membership.T
    total_v = np.sum(v_alpha, axis=-1, keepdims=True) + np.sum(v_c, axis=-1, keepdims=True)

    h_alpha = (
        tri_alpha * v_alpha
        - ((tri_group_alpha - tri_beta) * group_v)[..., g]
        + (tri_beta * v_c)[..., g]
        - tri_beta0 * total_v
    )
    h_c = tri_beta * (v_c + group_v) - tri_beta0 * total_v
    return h_alpha, h_c


def fisher_information(p: GddParams) -> np.ndarray:
    """Dense (K + η) x (K + η) Fisher matrix for a single parameter set."""
    if p.alpha.ndim != 1:
        raise DomainError("fisher_information expects unbatched parameters")
    k, eta = p.partition.k, p.partition.eta
    eye = np.eye(k + eta)
    cols = [np.concatenate(fisher_times(p, e[:k], e[k:])) for e in eye]
    return np.stack(cols, axis=1)


def kl_to_flat_grad(p: GddParams):
    """Gradient of kl_to_flat: the Fisher information applied to (α - 1, c)."""
    rho, c = _natural_offset(p)
    return fisher_times(p, rho, c)


def sample(p: GddParams, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
    """
    Hierarchical draw: group weights w ~ Dir(β), within-group q ~ Dir(α_{S_j}),
    p_l = w_j q_l. Returns shape (K,) or (size, K). Unbatched params only.
    """
    if p.alpha.ndim != 1:
        raise DomainError("sample expects unbatched parameters")
    part = p.partition
    n = 1 if size is None else int(size)
    weights = rng.dirichlet(p.beta, size=n)
    out = np.empty((n, part.k))
    for j, group in enumerate(part.groups):
        members = list(group)
        if len(members) == 1:
            out[:, members[0]] = weights[:, j]
        else:
            inner = rng.dirichlet(p.alpha[members], size=n)
            out[:, members] = weights[:, j : j + 1] * inner
    return out[0] if size is None else out


def projected_prediction(p: GddParams):
    """Class with the largest projected probability; lowest index on ties."""
    value = np.argmax(mean(p), axis=-1)
    if np.ndim(value) == 0:
        return int(value)
    return value


def _scalar(value):
    if np.ndim(value) == 0:
        return float(value)
    return value
