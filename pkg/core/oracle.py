"""
Brute-force estimators used to verify the analytic GDD and loss formulas:
Monte-Carlo expectations over GDD samples, central finite differences, and
Gauss–Legendre integration of the density over the 1- and 2-simplex.
"""

import asyncio
import math
import re
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm

from core import gdd
from core.errors import DomainError
from core.gdd import GddParams
from core.hyperdomain import Partition
from core.loss import pce

DEFAULT_SAMPLES = 200_000
DEFAULT_CHUNKS = 8
MIN_SAMPLES = 1000
MC_SIGMAS = 3.0
FAMILY_ERROR_RATE = float(2.0 * norm.sf(MC_SIGMAS))

_TAG = re.compile(r"^(mean|log_p|log_group)_(\d+)$")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n: int

    def tolerance(self, n_se: float = MC_SIGMAS) -> float:
        return n_se * self.std_error

    def contains(self, value: float, n_se: float = MC_SIGMAS) -> bool:
        return abs(self.mean - value) <= self.tolerance(n_se)


def comparison_sigmas(comparisons: int, error_rate: float = FAMILY_ERROR_RATE) -> float:
    """
    Two-sided standard-error multiplier that keeps the chance of any false
    failure among `comparisons` independent MC checks at error_rate
    (Bonferroni). One comparison gives MC_SIGMAS.
    """
    if comparisons < 1:
        raise DomainError(f"need at least one comparison, got {comparisons}")
    return float(norm.isf(error_rate / (2.0 * comparisons)))


def _statistic(params: GddParams, tag: str,
               label: Optional[Sequence[int]]) -> Callable[[np.ndarray], np.ndarray]:
    match = _TAG.match(tag)
    if match:
        kind, index = match.group(1), int(match.group(2))
        if kind == "mean":
            if index >= params.partition.k:
                raise DomainError(f"{tag}: class index out of range")
            return lambda pts: pts[:, index]
        if kind == "log_p":
            if index >= params.partition.k:
                raise DomainError(f"{tag}: class index out of range")
            return lambda pts: np.log(pts[:, index])
        if index >= params.partition.eta:
            raise DomainError(f"{tag}: group index out of range")
        members = list(params.partition.groups[index])
        return lambda pts: np.log(pts[:, members].sum(axis=1))
    if tag == "pce":
        if label is None:
            raise DomainError("the pce statistic needs a label")
        return lambda pts: pce(pts, label).value
    if tag == "neg_log_pdf":
        return lambda pts: -gdd.log_pdf(params, pts)
    if tag == "log_ratio_to_flat":
        flat = GddParams.flat(params.partition)
        return lambda pts: gdd.log_pdf(params, pts) - gdd.log_pdf(flat, pts)
    raise DomainError(f"unknown statistic tag {tag!r}")


def _chunk_sums(params: GddParams, stat, n: int, seed_seq: np.random.SeedSequence):
    rng = np.random.default_rng(seed_seq)
    values = np.asarray(stat(gdd.sample(params, rng, size=n)), dtype=np.float64)
    return float(values.sum()), float(np.square(values).sum()), n


async def _gather_chunks(params: GddParams, stat, sizes: List[int], seed: int):
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    tasks = [
        asyncio.to_thread(_chunk_sums, params, stat, size, stream)
        for size, stream in zip(sizes, streams)
    ]
    return await asyncio.gather(*tasks)


def mc_expectation(params: GddParams, tag: str, n: int = DEFAULT_SAMPLES, seed: int = 0,
                   label: Optional[Sequence[int]] = None,
                   chunks: int = DEFAULT_CHUNKS) -> McEstimate:
    """
    Monte-Carlo estimate of E[f(p)], p ~ GDD(params). Chunks are drawn
    concurrently from independent child streams and merged in chunk order,
    so the result depends only on (seed, n, chunks).
    """
    if n < MIN_SAMPLES:
        raise DomainError(f"need at least {MIN_SAMPLES} samples, got {n}")
    stat = _statistic(params, tag, label)
    chunks = max(1, min(chunks, n))
    sizes = [n // chunks + (1 if i < n % chunks else 0) for i in range(chunks)]
    partials = asyncio.run(_gather_chunks(params, stat, sizes, seed))
    total = sum(p[0] for p in partials)
    total_sq = sum(p[1] for p in partials)
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0) * n / (n - 1)
    return McEstimate(mean=mean, std_error=math.sqrt(var / n), n=n)


def finite_diff(f: Callable[[np.ndarray], float], at: Sequence[float],
                rel_step: float = 1e-5) -> np.ndarray:
    """Central differences with step rel_step·max(1, |x_i|) per coordinate."""
    x = np.asarray(at, dtype=np.float64)
    grad = np.zeros_like(x)
    for i in range(x.size):
        h = rel_step * max(1.0, abs(x[i]))
        up, down = x.copy(), x.copy()
        up[i] += h
        down[i] -= h
        f_up, f_down = f(up), f(down)
        if not (np.isfinite(f_up) and np.isfinite(f_down)):
            raise DomainError(f"function is not finite around coordinate {i}")
        grad[i] = (f_up - f_down) / (2.0 * h)
    return grad


def simplex_quadrature(params: GddParams, nodes: int = 200) -> float:
    """Integral of the density over the simplex, K in {2, 3}."""
    k = params.partition.k
    if params.alpha.ndim != 1:
        raise DomainError("quadrature expects unbatched parameters")
    u, w = np.polynomial.legendre.leggauss(nodes)
    u = 0.5 * (u + 1.0)
    w = 0.5 * w
    if k == 2:
        pts = np.stack([u, 1.0 - u], axis=1)
        return float(np.sum(w * np.exp(gdd.log_pdf(params, pts))))
    if k == 3:
        uu, vv = np.meshgrid(u, u, indexing="ij")
        ww = np.outer(w, w) * (1.0 - uu)
        x1 = uu
        x2 = (1.0 - uu) * vv
        pts = np.stack([x1, x2, 1.0 - x1 - x2], axis=-1).reshape(-1, 3)
        return float(np.sum(ww.reshape(-1) * np.exp(gdd.log_pdf(params, pts))))
    raise DomainError(f"quadrature supports K in {{2, 3}}, got K={k}")


def random_params(rng: np.random.Generator, partition: Partition,
                  alpha_range: Tuple[float, float] = (0.6, 4.0),
                  c_range: Tuple[float, float] = (0.0, 4.0)) -> GddParams:
    """Random GDD parameters; composite groups draw c from c_range, singleton groups get 0."""
    alpha = rng.uniform(*alpha_range, size=partition.k)
    c = np.zeros(partition.eta)
    for j in partition.composite_groups:
        c[j] = rng.uniform(*c_range)
    return GddParams(alpha, c, partition)


def random_partition(rng: np.random.Generator, k: int, max_groups: int = 3) -> Partition:
    """Random partition of k >= 2 classes into between 2 and max_groups groups."""
    if k < 2:
        raise DomainError(f"need at least two classes, got {k}")
    n_groups = int(rng.integers(2, min(max_groups, k) + 1))
    order = rng.permutation(k)
    cuts = np.sort(rng.choice(np.arange(1, k), size=n_groups - 1, replace=False))
    groups = [tuple(sorted(int(i) for i in chunk)) for chunk in np.split(order, cuts)]
    return Partition.checked(k, groups)
