from .config import (
    AbcConfig,
    AcceptanceBenchmarkConfig,
    BananaConfig,
    FitConfig,
    GridConfig,
    LogNormalConfig,
    SampleConfig,
    TargetConfig,
    TrajectoriesConfig,
)
from .fit import run_fit
from .sample import run_sample
from .trajectories import run_trajectories
from .acceptance import run_acceptance_benchmark
from .banana import run_banana
from .abc import run_abc
from .diagnose import run_diagnose
