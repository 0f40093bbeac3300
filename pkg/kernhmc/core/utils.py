import json
import logging
import typing as ty
from enum import Enum
from pathlib import Path
import attrs
import numpy as np
import yaml
from kernhmc.exceptions import (
    KernhmcDimensionError,
    KernhmcFileFormatError,
    KernhmcInputError,
    KernhmcNonFiniteError,
)


logger = logging.getLogger("kernhmc")

# Bumped whenever the layout of serialised models/bases/summaries changes
FORMAT_VERSION = 1


def set_loggers(loglevel, depend_level="warning"):
    """Sets loggers for kernhmc and its dependencies. To be used in CLI

    Parameters
    ----------
    loglevel : str
        the threshold to produce logs at (e.g. debug, info, warning, error)
    depend_level : str, optional
        the threshold to produce logs in dependency packages
    """

    def parse(level):
        if isinstance(level, str):
            level = getattr(logging, level.upper())
        return level

    logging.getLogger("kernhmc").setLevel(parse(loglevel))

    # set logging format
    logging.basicConfig(
        level=parse(depend_level),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )


def as_vector(x, dim=None, name="x") -> np.ndarray:
    """Casts `x` to a 1-D float array, checking its length against `dim`"""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise KernhmcDimensionError(
            f"Expected '{name}' to be a vector, found array of shape {arr.shape}"
        )
    if dim is not None and arr.shape[0] != dim:
        raise KernhmcDimensionError(
            f"Expected '{name}' to have dimension {dim}, found {arr.shape[0]}"
        )
    return arr


def as_matrix(X, dim=None, name="X") -> np.ndarray:
    """Casts `X` to a 2-D float array (one point per row), checking the number of
    columns against `dim`. 1-D input is treated as a single point"""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise KernhmcDimensionError(
            f"Expected '{name}' to be a matrix, found array of shape {arr.shape}"
        )
    if dim is not None and arr.shape[1] != dim:
        raise KernhmcDimensionError(
            f"Expected '{name}' to have {dim} columns, found {arr.shape[1]}"
        )
    return arr


def check_finite(arr, what):
    """Raises KernhmcNonFiniteError pointing at the first row containing a
    non-finite value"""
    arr = np.asarray(arr)
    if np.all(np.isfinite(arr)):
        return arr
    if arr.ndim == 0:
        index = 0
    else:
        rows_ok = np.all(np.isfinite(arr.reshape(arr.shape[0], -1)), axis=1)
        index = int(np.flatnonzero(~rows_ok)[0])
    raise KernhmcNonFiniteError(index, f"Non-finite value in {what} at index {index}")


def parse_value(value):
    """Parses values from string representations"""
    try:
        value = json.loads(value)
    except (TypeError, json.decoder.JSONDecodeError):
        pass
    return value


def set_nested(dct: dict, path: str, value):
    """Sets a value within nested dictionaries using a dot-separated key path,
    e.g. 'sampler.schedule.exponent'"""
    keys = path.split(".")
    for key in keys[:-1]:
        dct = dct.setdefault(key, {})
        if not isinstance(dct, dict):
            raise KernhmcInputError(
                f"Cannot set '{path}' as '{key}' is not a parameter block"
            )
    dct[keys[-1]] = value


def asdict(obj) -> dict:
    """Serialises an object of a class defined with attrs to a dictionary of plain
    YAML/JSON-compatible values (enums by name, paths as strings, arrays as
    nested lists)

    Parameters
    ----------
    obj
        the object to serialise. Must be defined using the attrs decorator
    """

    def value_asdict(value):
        if attrs.has(type(value)):
            return asdict(value)
        elif isinstance(value, Enum):
            return str(value)
        elif isinstance(value, Path):
            return str(value)
        elif isinstance(value, np.ndarray):
            return value.tolist()
        elif isinstance(value, np.generic):
            return value.item()
        elif isinstance(value, (tuple, list)):
            return [value_asdict(x) for x in value]
        elif isinstance(value, dict):
            return {str(k): value_asdict(v) for k, v in value.items()}
        return value

    return {
        a.name: value_asdict(getattr(obj, a.name))
        for a in attrs.fields(type(obj))
        if a.init and a.metadata.get("asdict", True)
    }


def merge_nested(base: dict, override: dict) -> dict:
    """Copy of `base` with the values of `override` laid over it, descending into
    nested dictionaries"""
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            value = merge_nested(merged[key], value)
        merged[key] = value
    return merged


def fromdict(klass: type, dct: ty.Optional[dict]):
    """Unserialise an attrs config class from a dict created by `asdict` (or
    read from a config file). Nested attrs classes are resolved recursively
    from the field annotations, and unknown keys are rejected. Partial blocks
    of fields carrying a "template" factory in their metadata are completed from
    the template rather than from the class defaults

    Parameters
    ----------
    klass : type
        the attrs class to create
    dct : dict
        the (possibly partial) parameters, missing keys take the defaults
    """
    if dct is None:
        dct = {}
    if not isinstance(dct, dict):
        raise KernhmcInputError(
            f"Expected a parameter block for {klass.__name__}, found {dct!r}"
        )
    fields = {a.name: a for a in attrs.fields(klass) if a.init}
    unknown = set(dct) - set(fields)
    if unknown:
        raise KernhmcInputError(
            f"Unrecognised parameters for {klass.__name__}: "
            + ", ".join(sorted(unknown))
        )
    kwargs = {}
    for name, value in dct.items():
        field_type = fields[name].type
        template = fields[name].metadata.get("template")
        if template is not None and isinstance(value, dict):
            value = merge_nested(asdict(template()), value)
        if isinstance(field_type, type) and attrs.has(field_type):
            value = fromdict(field_type, value)
        kwargs[name] = value
    try:
        return klass(**kwargs)
    except (TypeError, ValueError) as e:
        raise KernhmcInputError(f"Invalid parameters for {klass.__name__}: {e}")


def save_yaml(dct: dict, path: ty.Union[str, Path]):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        yaml.safe_dump(dct, f, sort_keys=False)


def load_yaml(path: ty.Union[str, Path]) -> dict:
    path = Path(path)
    if not path.exists():
        raise KernhmcInputError(f"File '{path}' does not exist")
    with open(path) as f:
        try:
            dct = yaml.safe_load(f)
        except yaml.YAMLError as e:
            line = getattr(getattr(e, "problem_mark", None), "line", -1) + 1
            raise KernhmcFileFormatError(path, line, str(e))
    return dct if dct is not None else {}


def check_format_version(dct: dict, what: str):
    version = dct.get("format_version")
    if version != FORMAT_VERSION:
        raise KernhmcInputError(
            f"Unsupported {what} format version {version!r} "
            f"(this version of kernhmc reads version {FORMAT_VERSION})"
        )
