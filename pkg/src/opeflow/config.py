# -*- coding=utf-8 -*-
"""Run configuration read from a single INI file.

::

    [opeflow]
    schema_version = 1
    cache_dir = ~/.cache/opeflow
    output_format = json
    seed = 0

    [theory]
    name = scalar
    mu = 1.0
    d_max = 4
    lagrangian = 1/24 phi^4 1

    [numerics]
    tol = 1e-6
    samples = 10000

Only ``OPEFLOW_CACHE_DIR`` is read from the environment.
"""
import configparser
import dataclasses
import os

from fractions import Fraction
from typing import Any, Dict, Optional, Tuple

from .exceptions import ConfigError, ConfigNotFoundError
from .misc import as_fraction, content_digest, fraction_to_json
from .operators import DEFAULT_BASIS_LIMIT
from .path import normalize_path
from .quadrature import DEFAULT_TOL, LEVELS
from .theories import THEORY_NAMES, Theory, theory_by_name
from .wick import DEFAULT_GRAPH_LIMIT

__all__ = [
    "SCHEMA_VERSION",
    "CACHE_ENV",
    "RunConfig",
    "default_cache_dir",
    "load_config",
    "parse_config",
]

SCHEMA_VERSION = 1
CACHE_ENV = "OPEFLOW_CACHE_DIR"
OUTPUT_FORMATS = ("json", "csv")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
LagrangianEntry = Tuple[Fraction, str, int]


def default_cache_dir():
    # type: () -> str
    override = os.environ.get(CACHE_ENV)
    if override:
        return normalize_path(override)
    return normalize_path(os.path.join("~", ".cache", "opeflow"))


@dataclasses.dataclass(frozen=True)
class RunConfig:
    schema_version: int = SCHEMA_VERSION
    theory: str = "scalar"
    mu: float = 1.0
    d_max: Fraction = Fraction(4)
    tol: float = DEFAULT_TOL
    max_level: int = LEVELS[-1]
    seed: int = 0
    samples: int = 10000
    cache_dir: str = dataclasses.field(default_factory=default_cache_dir)
    output_format: str = "json"
    log_level: str = "WARNING"
    basis_limit: int = DEFAULT_BASIS_LIMIT
    graph_limit: int = DEFAULT_GRAPH_LIMIT
    max_derivative_order: int = 8
    lagrangian: Optional[Tuple[LagrangianEntry, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "d_max", as_fraction(self.d_max))
        if self.lagrangian is not None:
            object.__setattr__(
                self,
                "lagrangian",
                tuple((as_fraction(c), str(m), int(p)) for c, m, p in self.lagrangian),
            )
        self.validate()

    def validate(self):
        """
        :raises ConfigError: If a value is out of range
        """
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError(
                "unsupported schema version {0}".format(self.schema_version),
                expected=SCHEMA_VERSION,
            )
        if self.theory not in THEORY_NAMES:
            raise ConfigError("unknown theory {0!r}".format(self.theory), choices=THEORY_NAMES)
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError(
                "unknown output format {0!r}".format(self.output_format), choices=OUTPUT_FORMATS
            )
        if self.log_level.upper() not in LOG_LEVELS:
            raise ConfigError("unknown log level {0!r}".format(self.log_level))
        if not self.mu > 0:
            raise ConfigError("mu must be positive", mu=self.mu)
        if not self.tol > 0:
            raise ConfigError("tol must be positive", tol=self.tol)
        if self.d_max < 0:
            raise ConfigError("d_max must not be negative", d_max=self.d_max)
        if self.max_level not in LEVELS:
            raise ConfigError("max_level must be one of {0}".format(LEVELS), max_level=self.max_level)
        for name in ("samples", "basis_limit", "graph_limit", "max_derivative_order"):
            if getattr(self, name) < 1:
                raise ConfigError("{0} must be positive".format(name))

    @property
    def levels(self):
        # type: () -> Tuple[int, ...]
        return tuple(level for level in LEVELS if level <= self.max_level)

    def build_theory(self):
        # type: () -> Theory
        lagrangian = None if self.lagrangian is None else list(self.lagrangian)
        return theory_by_name(self.theory, lagrangian)

    def replace(self, **changes):
        # type: (Any) -> RunConfig
        """Copy with the given fields changed; ``None`` values are ignored."""
        changes = {key: value for key, value in changes.items() if value is not None}
        unknown = set(changes) - {f.name for f in dataclasses.fields(self)}
        if unknown:
            raise ConfigError("unknown settings: {0}".format(", ".join(sorted(unknown))))
        return dataclasses.replace(self, **changes)

    def as_dict(self):
        # type: () -> Dict[str, Any]
        payload = dataclasses.asdict(self)
        payload["d_max"] = fraction_to_json(self.d_max)
        if self.lagrangian is not None:
            payload["lagrangian"] = [
                [fraction_to_json(c), m, p] for c, m, p in self.lagrangian
            ]
        return payload

    def content_hash(self):
        # type: () -> str
        """sha256 of the settings that determine results; the cache location is left out."""
        payload = self.as_dict()
        payload.pop("cache_dir")
        payload.pop("log_level")
        return content_digest(payload)


_SCHEMA = {
    "opeflow": {
        "schema_version": int,
        "log_level": str,
        "cache_dir": str,
        "output_format": str,
        "seed": int,
    },
    "theory": {"name": str, "mu": float, "d_max": as_fraction, "lagrangian": str},
    "numerics": {
        "tol": float,
        "max_level": int,
        "samples": int,
        "basis_limit": int,
        "graph_limit": int,
        "max_derivative_order": int,
    },
}


def _parse_lagrangian(text):
    # type: (str) -> Tuple[LagrangianEntry, ...]
    entries = []
    for line in text.strip().splitlines():
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ConfigError(
                "lagrangian entries read 'coefficient monomial g-power', got {0!r}".format(line)
            )
        coefficient, monomial, power = parts
        try:
            entries.append((as_fraction(coefficient), monomial, int(power)))
        except (ValueError, ZeroDivisionError):
            raise ConfigError("malformed lagrangian entry {0!r}".format(line))
    return tuple(entries)


def parse_config(text, source="<string>"):
    # type: (str, str) -> RunConfig
    """Build a :class:`RunConfig` from INI text.

    :raises ConfigError: On unknown sections or keys, bad values or a
        mismatching schema version
    """
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError("cannot parse {0}: {1}".format(source, exc))
    values = {}  # type: Dict[str, Any]
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError("unknown section [{0}]".format(section), source=source)
        for key, raw in parser.items(section):
            converter = _SCHEMA[section].get(key)
            if converter is None:
                raise ConfigError("unknown key {0} in [{1}]".format(key, section), source=source)
            try:
                value = converter(raw)
            except (ValueError, ZeroDivisionError):
                raise ConfigError(
                    "invalid value {0!r} for {1}".format(raw, key), source=source
                )
            if key == "name":
                key = "theory"
            elif key == "lagrangian":
                value = _parse_lagrangian(value)
            elif key == "cache_dir":
                value = normalize_path(value)
            values[key] = value
    version = values.get("schema_version")
    if version is None:
        raise ConfigError("missing schema_version in [opeflow]", source=source)
    if os.environ.get(CACHE_ENV):
        values["cache_dir"] = default_cache_dir()
    return RunConfig(**values)


def load_config(path=None):
    # type: (Optional[os.PathLike]) -> RunConfig
    """Read the configuration at *path*, or the defaults when no path is given.

    :raises ConfigNotFoundError: If *path* does not exist
    """
    if path is None:
        return RunConfig()
    path = str(path)
    if not os.path.isfile(path):
        raise ConfigNotFoundError("no configuration file at {0}".format(path), path=path)
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), source=path)
