from enum import Enum


class KernelFamily(Enum):
    """The translation-invariant kernel families the estimators and random
    feature bases support"""

    gaussian = "gaussian"
    rational_quadratic = "rational_quadratic"

    def __str__(self):
        return self.name

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls[str(value).lower().replace("-", "_")]
        except KeyError:
            raise ValueError(
                f"Unrecognised kernel family '{value}', valid options are "
                + ", ".join(m.name for m in cls)
            )


class Algorithm(Enum):
    """The samplers a chain can be run with"""

    rw = ("rw", "random-walk Metropolis with tuned isotropic step")
    hmc = ("hmc", "Hamiltonian Monte Carlo using the exact target gradient")
    kmc_lite = ("kmc_lite", "kernel HMC with the sub-sampled dual estimator")
    kmc_finite = ("kmc_finite", "kernel HMC with the online random-feature estimator")

    def __init__(self, key, desc):
        self.key = key
        self.desc = desc

    def __str__(self):
        return self.name

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls[str(value).lower().replace("-", "_")]
        except KeyError:
            raise ValueError(
                f"Unrecognised algorithm '{value}', valid options are "
                + ", ".join(m.name for m in cls)
            )


class EstimatorKind(Enum):
    "Which score-matching estimator a cross-validation run fits"

    lite = "lite"
    finite = "finite"

    def __str__(self):
        return self.name

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls[str(value).lower()]
        except KeyError:
            raise ValueError(
                f"Unrecognised estimator '{value}', valid options are "
                + ", ".join(m.name for m in cls)
            )
