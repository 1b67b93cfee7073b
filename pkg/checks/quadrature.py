import numpy as np

from core import oracle
from core.checks import Measurement
from core.gdd import GddParams
from core.hyperdomain import Partition

QUADRATURE_SEED = 11
RANDOM_SETS = 6


def _normalization(params: GddParams, tol: float):
    def check() -> Measurement:
        return Measurement(abs(oracle.simplex_quadrature(params) - 1.0), tol)

    return check


def random_sets() -> Measurement:
    rng = np.random.default_rng(QUADRATURE_SEED)
    worst = 0.0
    for i in range(RANDOM_SETS):
        k = 2 + i % 2
        params = oracle.random_params(rng, oracle.random_partition(rng, k), alpha_range=(1.0, 4.0))
        worst = max(worst, abs(oracle.simplex_quadrature(params) - 1.0))
    return Measurement(worst, 1e-2, f"{RANDOM_SETS} random sets, K in {{2, 3}}")


def register_checks(registry):
    two = Partition.singletons(2)
    grouped = Partition.checked(3, [[0], [1, 2]])
    registry.register("gdd.quadrature_flat", _normalization(GddParams.flat(two), 1e-4),
                      "Flat density on the 1-simplex integrates to 1")
    registry.register("gdd.quadrature_dirichlet",
                      _normalization(GddParams.of([2.0, 1.0], [0.0, 0.0], two), 1e-6),
                      "Dir(2, 1) integrates to 1")
    registry.register("gdd.quadrature_grouped",
                      _normalization(GddParams.of([4.0, 1.0, 1.0], [0.0, 24.0], grouped), 1e-2),
                      "GDD(α=(4,1,1), c=(0,24)) integrates to 1")
    registry.register("gdd.quadrature_random", random_sets,
                      "Random GDDs with K <= 3 integrate to 1")
