import numpy as np

from core import gdd, loss, oracle, special_fn
from core.checks import Measurement
from core.gdd import GddParams
from core.hyperdomain import singleton_label

PROPERTY_SEED = 47
BOUND_CASES = 200
SIGN_CASES = 100
REDUCTION_CASES = 50
BOUND_TOL = 1e-10
REDUCTION_TOL = 1e-10


def _random_case(rng, min_k=2, need_composite=False):
    while True:
        partition = oracle.random_partition(rng, int(rng.integers(min_k, 6)))
        if partition.composite_groups or not need_composite:
            return partition, oracle.random_params(rng, partition)


def upce_lower_bound() -> Measurement:
    """The expected PCE is never below the PCE of the expected probabilities."""
    rng = np.random.default_rng(PROPERTY_SEED)
    worst = 0.0
    for _ in range(BOUND_CASES):
        partition, params = _random_case(rng)
        composite = partition.composite_groups
        if composite and rng.random() < 0.5:
            label = partition.indicator(int(rng.choice(composite))).tolist()
        else:
            label = singleton_label(int(rng.integers(partition.k)), partition)
        gap = loss.pce(gdd.mean(params), label).value - loss.upce(params, label)
        worst = max(worst, gap)
    return Measurement(worst, BOUND_TOL, "max PCE(mean) - UPCE")


def signs_singleton_label() -> Measurement:
    """∂/∂α_own < 0, ∂/∂c_containing < 0, ∂/∂α_other > 0."""
    rng = np.random.default_rng([PROPERTY_SEED, 1])
    violations = 0
    for _ in range(SIGN_CASES):
        partition, params = _random_case(rng)
        s = int(rng.integers(partition.k))
        g = int(partition.group_of[s])
        grad = loss.grad_total(params, singleton_label(s, partition), lam=0.0)
        others = np.delete(grad.d_alpha, s)
        violations += int(grad.d_alpha[s] >= 0) + int(grad.d_c[g] >= 0)
        violations += int(np.sum(others <= 0))
    return Measurement(violations, 0, f"{SIGN_CASES} draws")


def signs_composite_label() -> Measurement:
    """∂/∂c_own < 0, ∂/∂α_member < 0, ∂/∂c_other > 0."""
    rng = np.random.default_rng([PROPERTY_SEED, 2])
    violations = 0
    for _ in range(SIGN_CASES):
        partition, params = _random_case(rng, min_k=3, need_composite=True)
        g = int(rng.choice(partition.composite_groups))
        grad = loss.grad_total(params, partition.indicator(g).tolist(), lam=0.0)
        members = list(partition.groups[g])
        violations += int(grad.d_c[g] >= 0)
        violations += int(np.sum(grad.d_alpha[members] >= 0))
        violations += int(np.sum(np.delete(grad.d_c, g) <= 0))
    return Measurement(violations, 0, f"{SIGN_CASES} draws")


def dirichlet_reduction() -> Measurement:
    """With c = 0 the GDD is Dir(α); a singleton label turns UPCE into ψ(Σα) - ψ(α_y)."""
    rng = np.random.default_rng([PROPERTY_SEED, 3])
    worst, where = 0.0, ""
    for _ in range(REDUCTION_CASES):
        partition, params = _random_case(rng)
        alpha = params.alpha
        plain = GddParams(alpha, np.zeros(partition.eta), partition)
        total = alpha.sum()
        s = int(rng.integers(partition.k))
        errors = {
            "log_normalizer": abs(gdd.log_normalizer(plain) - special_fn.log_beta_multi(alpha)),
            "mean": float(np.max(np.abs(gdd.mean(plain) - alpha / total))),
            "expected_log": float(np.max(np.abs(
                gdd.expected_log_singletons(plain)
                - (special_fn.digamma(alpha) - special_fn.digamma(total))
            ))),
            "upce": abs(loss.upce(plain, singleton_label(s, partition))
                        - (special_fn.digamma(total) - special_fn.digamma(alpha[s]))),
        }
        name = max(errors, key=errors.get)
        if not errors[name] <= worst:
            worst, where = errors[name], name
    return Measurement(worst, REDUCTION_TOL, where)


def register_checks(registry):
    registry.register("loss.upce_lower_bound", upce_lower_bound,
                      "UPCE >= PCE of the projected probabilities")
    registry.register("loss.signs_singleton_label", signs_singleton_label,
                      "Gradient sign structure for singleton ground truth")
    registry.register("loss.signs_composite_label", signs_composite_label,
                      "Gradient sign structure for composite ground truth")
    registry.register("gdd.dirichlet_reduction", dirichlet_reduction,
                      "c = 0 reduces GDD quantities and UPCE to their Dirichlet forms")
