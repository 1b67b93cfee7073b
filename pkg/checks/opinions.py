from core import opinion
from core.checks import Measurement
from core.hyperdomain import Composite, Partition

EXAMPLE_TOL = 1e-6

# (evidence over the reduced power set of 3 classes, vacuity, vagueness, dissonance)
WORKED_EXAMPLES = (
    ((3, 0, 0, 0, 0, 24), 0.1, 0.8, 0.2),
    ((3, 12, 12, 0, 0, 0), 0.1, 0.0, 0.744),
)


def _row(index: int):
    def check() -> Measurement:
        evidence, u, vag, diss = WORKED_EXAMPLES[index]
        family = opinion.FocalFamily.reduced_power_set(3)
        op = opinion.opinion_from_evidence(evidence, 3)
        errors = {
            "vacuity": abs(opinion.vacuity(op) - u),
            "vagueness": abs(opinion.vagueness(op, family) - vag),
            "dissonance": abs(opinion.dissonance(op, family) - diss),
        }
        worst = max(errors, key=errors.get)
        return Measurement(errors[worst], EXAMPLE_TOL, f"worst: {worst}")

    return check


def set_prediction() -> Measurement:
    partition = Partition.checked(3, [[0], [1, 2]])
    kind = opinion.argmax_evidence([3, 0, 0, 24], partition)
    wrong = 0 if kind == Composite(1, (1, 2)) else 1
    return Measurement(wrong, 0, f"predicted {kind}")


def register_checks(registry):
    registry.register("opinion.vague_example", _row(0),
                      "Vagueness-dominated opinion: u=0.1, vag=0.8, diss=0.2")
    registry.register("opinion.conflict_example", _row(1),
                      "Conflicting singleton evidence: u=0.1, vag=0, diss=0.744")
    registry.register("opinion.set_prediction", set_prediction,
                      "Largest evidence on a composite group predicts that group")
