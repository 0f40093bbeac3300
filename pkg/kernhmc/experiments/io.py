"""Reading inputs and writing the outputs of experiment runs: the resolved
config, CSV tables at full precision, JSON reports and wall-clock timings (kept
in their own file so that results are byte-identical between runs)"""
import csv
import json
import logging
import time
import typing as ty
from contextlib import contextmanager
from multiprocessing import Pool
from pathlib import Path
import numpy as np
from kernhmc.exceptions import KernhmcFileFormatError, KernhmcInputError
from kernhmc.core.utils import asdict, save_yaml


logger = logging.getLogger("kernhmc")

# JSON reports written by the experiment commands
REPORT_SCHEMA_VERSION = 1


def prepare_output(output_dir: ty.Union[str, Path], config) -> Path:
    """Creates the output directory and writes the resolved config into it"""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    save_yaml(asdict(config), output_dir / "config.yaml")
    return output_dir


def format_value(value):
    if isinstance(value, (bool, np.bool_)):
        return int(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value


def write_csv(path: ty.Union[str, Path], header: ty.Sequence[str], rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])


def json_safe(value):
    if isinstance(value, dict):
        return {str(k): json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    if isinstance(value, np.ndarray):
        return json_safe(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def write_report(path: ty.Union[str, Path], report: dict):
    """Writes a JSON report tagged with the report schema version"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    report = {"schema_version": REPORT_SCHEMA_VERSION, **report}
    with open(path, "w") as f:
        json.dump(json_safe(report), f, indent=2)


def read_samples_csv(path: ty.Union[str, Path]) -> np.ndarray:
    """Reads a sample file: a header row then one point per row, every column
    being a coordinate

    Raises
    ------
    KernhmcFileFormatError
        pointing at the offending line if a row cannot be parsed
    """
    path = Path(path)
    if not path.exists():
        raise KernhmcInputError(f"Sample file '{path}' does not exist")
    with open(path, newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise KernhmcFileFormatError(path, 1, "file is empty")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise KernhmcFileFormatError(
                    path, lineno, f"expected {len(header)} fields, found {len(row)}"
                )
            try:
                rows.append([float(v) for v in row])
            except ValueError as e:
                raise KernhmcFileFormatError(path, lineno, str(e))
    if not rows:
        raise KernhmcFileFormatError(path, 2, "no samples")
    return np.array(rows)


def write_samples_csv(path: ty.Union[str, Path], samples: np.ndarray):
    samples = np.atleast_2d(samples)
    write_csv(
        path, [f"x{i + 1}" for i in range(samples.shape[1])], samples.tolist()
    )


class Timings:
    """Collects wall-clock durations of the named stages of a run"""

    def __init__(self):
        self.durations = {}

    @contextmanager
    def stage(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.durations[name] = self.durations.get(name, 0.0) + (
                time.perf_counter() - start
            )

    def save(self, output_dir: ty.Union[str, Path]):
        with open(Path(output_dir) / "timings.json", "w") as f:
            json.dump(self.durations, f, indent=2)


def map_trials(func: ty.Callable, trials: ty.Sequence[tuple], workers: int = 1):
    """Applies `func` to every argument tuple, sequentially if workers is 1,
    otherwise over a process pool. Results are returned in the order of
    `trials` either way, so aggregation does not depend on scheduling"""
    if workers == 1 or len(trials) <= 1:
        return [func(*args) for args in trials]
    logger.info("Running %d trials over %d processes", len(trials), workers)
    with Pool(workers) as pool:
        return pool.starmap(func, trials)
