from kernhmc.core.cli import cli
from .fit import fit
from .sample import sample
from .trajectories import trajectories
from .acceptance import acceptance_benchmark
from .banana import banana
from .abc import abc
from .diagnose import diagnose
