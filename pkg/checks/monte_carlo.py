"""
Analytic GDD and loss quantities against Monte-Carlo estimates on random
parameter sets (K in 2..5, at most three groups).
"""

import numpy as np

from core import gdd, loss, oracle
from core.checks import Measurement
from core.gdd import GddParams
from core.hyperdomain import singleton_label

MC_SEED = 23
RANDOM_SETS = 20


def _random_setting(index: int):
    rng = np.random.default_rng([MC_SEED, index])
    k = int(rng.integers(2, 6))
    partition = oracle.random_partition(rng, k)
    params = oracle.random_params(rng, partition)
    composite = partition.composite_groups
    if composite and rng.random() < 0.5:
        label = partition.indicator(int(rng.choice(composite))).tolist()
    else:
        label = singleton_label(int(rng.integers(k)), partition)
    return params, label


def analytic_table(params: GddParams, label):
    """Pairs of (statistic tag, analytic expectation) covered by the oracle."""
    part = params.partition
    rows = []
    means = gdd.mean(params)
    log_p = gdd.expected_log_singletons(params)
    log_group = gdd.expected_log_groups(params)
    for k in range(part.k):
        rows.append((f"mean_{k}", float(means[k])))
        rows.append((f"log_p_{k}", float(log_p[k])))
    for j in range(part.eta):
        rows.append((f"log_group_{j}", float(log_group[j])))
    rows.append(("neg_log_pdf", gdd.entropy(params)))
    rows.append(("log_ratio_to_flat", gdd.kl_to_flat(params)))
    rows.append(("pce", loss.upce(params, label)))
    return rows


def suite_comparisons() -> int:
    """Number of MC comparisons across every random set of the suite."""
    return sum(len(analytic_table(*_random_setting(i))) for i in range(RANDOM_SETS))


def _mc_set(index: int):
    def check() -> Measurement:
        params, label = _random_setting(index)
        n_se = oracle.comparison_sigmas(suite_comparisons())
        worst, where = 0.0, ""
        for offset, (tag, expected) in enumerate(analytic_table(params, label)):
            est = oracle.mc_expectation(params, tag, seed=MC_SEED * 1000 + index * 100 + offset,
                                        label=label)
            ratio = abs(est.mean - expected) / est.tolerance(n_se)
            if not ratio <= worst:
                worst = ratio
                where = f"{tag}: analytic={expected:.6f} mc={est.mean:.6f}±{est.std_error:.1e}"
        return Measurement(worst, 1.0, where)

    return check


def register_checks(registry):
    for i in range(RANDOM_SETS):
        registry.register(f"gdd.mc_set_{i:02d}", _mc_set(i),
                          "Mean, E[log p], E[log group], entropy, KL and UPCE vs Monte-Carlo")
