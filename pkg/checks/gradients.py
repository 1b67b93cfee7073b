import numpy as np

from core import loss, net, oracle
from core.checks import Measurement, relative_error
from core.gdd import GddParams
from core.hyperdomain import Partition, encode_labels, singleton_label
from core.loss import RegMode

LOSS_CASES = 100
LOSS_TOL = 1e-5
NET_SEEDS = 20
NET_TOL = 1e-4
NET_STEPS = 50
GRAD_SEED = 31

NET_PARTITION = Partition.checked(4, [[0], [1, 2], [3]])
NET_HIDDEN = (8, 8)
NET_BATCH = 12


def random_label(rng: np.random.Generator, partition: Partition):
    composite = partition.composite_groups
    if composite and rng.random() < 0.5:
        return partition.indicator(int(rng.choice(composite))).tolist()
    return singleton_label(int(rng.integers(partition.k)), partition)


def _split(vector: np.ndarray, partition: Partition) -> GddParams:
    """Free coordinates are α and the composite-group c; singleton-group c stays 0."""
    k = partition.k
    c = np.zeros(partition.eta)
    c[list(partition.composite_groups)] = vector[k:]
    return GddParams(vector[:k], c, partition)


def loss_gradients() -> Measurement:
    rng = np.random.default_rng(GRAD_SEED)
    modes = list(RegMode)
    worst, where = 0.0, ""
    for case in range(LOSS_CASES):
        k = int(rng.integers(2, 6))
        partition = oracle.random_partition(rng, k)
        params = oracle.random_params(rng, partition, c_range=(0.1, 4.0))
        label = random_label(rng, partition)
        lam = float(rng.uniform(0.0, 1.0))
        mode = modes[case % len(modes)]
        composite = list(partition.composite_groups)

        def f(v):
            return loss.total_loss(_split(v, partition), label, lam, mode).total

        at = np.concatenate([params.alpha, params.c[composite]])
        grad = loss.grad_total(params, label, lam, mode)
        analytic = np.concatenate([grad.d_alpha, grad.d_c[composite]])
        err = relative_error(oracle.finite_diff(f, at), analytic)
        if not err <= worst:
            worst, where = err, f"case {case}, mode {mode.value}"
    return Measurement(worst, LOSS_TOL, where)


def flatten(params: net.MlpParams) -> np.ndarray:
    return np.concatenate([t.ravel() for t in params.weights + params.biases])


def unflatten(vector: np.ndarray, like: net.MlpParams) -> net.MlpParams:
    tensors, pos = [], 0
    for t in like.weights + like.biases:
        tensors.append(vector[pos : pos + t.size].reshape(t.shape))
        pos += t.size
    n = len(like.weights)
    return net.MlpParams(tensors[:n], tensors[n:], like.activation)


def _network_error(params: net.MlpParams, x, targets, lam) -> float:
    grads, _ = net.backward(params, x, targets, NET_PARTITION, lam)

    def f(v):
        return net.batch_loss(unflatten(v, params), x, targets, NET_PARTITION, lam)

    return relative_error(oracle.finite_diff(f, flatten(params)), flatten(grads))


def network_gradients() -> Measurement:
    """End-to-end backprop vs finite differences, at init and after a few Adam steps."""
    dims = [2, *NET_HIDDEN, NET_PARTITION.head_width]
    worst, where = 0.0, ""
    for seed in range(NET_SEEDS):
        rng = np.random.default_rng([GRAD_SEED, seed])
        x = rng.standard_normal((NET_BATCH, 2))
        targets = encode_labels([random_label(rng, NET_PARTITION) for _ in range(NET_BATCH)],
                                NET_PARTITION)
        lam = 0.1
        params = net.init_params(dims, seed, activation="tanh")
        err = _network_error(params, x, targets, lam)
        if not err <= worst:
            worst, where = err, f"seed {seed} at init"
        state = net.init_adam(params)
        for _ in range(NET_STEPS):
            grads, _ = net.backward(params, x, targets, NET_PARTITION, lam)
            params, state = net.adam_step(params, grads, state, 0.005)
        err = _network_error(params, x, targets, lam)
        if not err <= worst:
            worst, where = err, f"seed {seed} after {NET_STEPS} steps"
    return Measurement(worst, NET_TOL, where)


def register_checks(registry):
    registry.register("loss.fd_gradients", loss_gradients,
                      "grad_total vs central differences on random (α, c, y, λ, mode)")
    registry.register("net.fd_gradients", network_gradients,
                      "Network backprop vs central differences over every weight")
