"""Suite configuration: defaults, YAML loading and the thread-count override."""

from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

import yaml

from .errors import ConfigInvalid, UnknownBound
from .registry import BOUND_NAMES, get_bound

THREADS_ENV = "BLOCKDET_THREADS"

# camelCase document keys <-> dataclass fields
_KEYS = {
    "seed": "seed",
    "samplesPerBound": "samples_per_bound",
    "maxN": "max_n",
    "maxBlockDim": "max_block_dim",
    "maxFactors": "max_factors",
    "condCap": "cond_cap",
    "tol": "tol",
    "bounds": "bounds",
    "includeSingular": "include_singular",
}


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 42
    samples_per_bound: int = 1000
    max_n: int = 5
    max_block_dim: int = 3
    max_factors: int = 4
    cond_cap: float = 1e4
    tol: float = 1e-8
    bounds: Tuple[str, ...] = field(default=BOUND_NAMES)
    include_singular: bool = False

    def validate(self) -> SuiteConfig:
        if not 0 <= self.seed < 2**64:
            raise ConfigInvalid(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.samples_per_bound < 0:
            raise ConfigInvalid(f"samplesPerBound must be >= 0, got {self.samples_per_bound}")
        if self.max_block_dim < 1:
            raise ConfigInvalid(f"maxBlockDim must be positive, got {self.max_block_dim}")
        # fischer needs a 2x2 grid and the product bounds two factors
        for key, label in (("max_n", "maxN"), ("max_factors", "maxFactors")):
            if getattr(self, key) < 2:
                raise ConfigInvalid(f"{label} must be at least 2, got {getattr(self, key)}")
        if not (math.isfinite(self.cond_cap) and self.cond_cap > 1.0):
            raise ConfigInvalid(f"condCap must be a finite number > 1, got {self.cond_cap}")
        if not (math.isfinite(self.tol) and self.tol > 0):
            raise ConfigInvalid(f"tol must be positive, got {self.tol}")
        if not self.bounds:
            raise ConfigInvalid("bounds must name at least one bound")
        for name in self.bounds:
            try:
                get_bound(name)
            except UnknownBound as exc:
                raise ConfigInvalid(str(exc)) from None
        return self

    def to_dict(self) -> Dict[str, Any]:
        values = asdict(self)
        doc = {key: values[attr] for key, attr in _KEYS.items()}
        doc["bounds"] = list(self.bounds)
        return doc

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any], base: Optional[SuiteConfig] = None) -> SuiteConfig:
        """Overlay the camelCase keys of ``doc`` on ``base`` (defaults if None)."""
        if not isinstance(doc, Mapping):
            raise ConfigInvalid(f"suite configuration must be a mapping, got {type(doc).__name__}")
        unknown = sorted(set(doc) - set(_KEYS))
        if unknown:
            raise ConfigInvalid(f"unknown configuration keys: {', '.join(unknown)}")
        types = {f.name: f.type for f in fields(cls)}
        changes: Dict[str, Any] = {}
        for key, value in doc.items():
            attr = _KEYS[key]
            try:
                changes[attr] = _coerce(types[attr], value)
            except (TypeError, ValueError) as exc:
                raise ConfigInvalid(f"{key}: {exc}") from None
        return replace(base or cls(), **changes)

    @classmethod
    def from_yaml(cls, path: str | Path) -> SuiteConfig:
        try:
            with open(path, encoding="utf-8") as handle:
                doc = yaml.safe_load(handle)
        except OSError as exc:
            raise ConfigInvalid(f"cannot read {path}: {exc}") from None
        except yaml.YAMLError as exc:
            raise ConfigInvalid(f"invalid YAML in {path}: {exc}") from None
        return cls.from_dict(doc or {})


def _coerce(kind: str, value: Any) -> Any:
    if kind == "bool":
        if not isinstance(value, bool):
            raise TypeError(f"expected true/false, got {value!r}")
        return value
    if kind == "int":
        if isinstance(value, bool) or int(value) != value:
            raise ValueError(f"expected an integer, got {value!r}")
        return int(value)
    if kind == "float":
        if isinstance(value, bool):
            raise TypeError(f"expected a number, got {value!r}")
        return float(value)
    if isinstance(value, str):
        value = [part.strip() for part in value.split(",") if part.strip()]
    if not isinstance(value, (list, tuple)):
        raise TypeError(f"expected a list of bound names, got {value!r}")
    return tuple(str(v) for v in value)


def resolve_threads(environ: Optional[Mapping[str, str]] = None) -> int:
    """Worker-process count: ``BLOCKDET_THREADS`` if set, else the CPU count."""
    environ = os.environ if environ is None else environ
    raw = environ.get(THREADS_ENV, "").strip()
    if not raw:
        return os.cpu_count() or 1
    try:
        threads = int(raw)
    except ValueError:
        raise ConfigInvalid(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if threads < 1:
        raise ConfigInvalid(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return threads
