"""JSON experiment configuration.

Schema (keys other than ``atoms`` are optional)::

    {
      "atoms": [{"weight": 0.5,
                 "maps": [{"ratio": 0.25, "translation": -0.75, "reflect": false}]}],
      "dimension": 1,
      "bounds": {"r_min": 0.1, "r_max": 0.9, "n_max": 8},
      "seeds": [0, 1] | "0..9" | {"start": 0, "stop": 10},
      "depth": 10, "samples": 100000, "max_words": 10000000,
      "grid": {"eps0": 0.333, "ratio": 0.333, "count": 8},
      "exponent": null,
      "separation": {"gamma": null, "x0": [0.0]},
      "output": "out"
    }

Maps in ``d >= 2`` give ``translation`` as a list and may give an explicit
``orthogonal`` matrix (identity by default). In 1D ``reflect: true`` flips
the map.
"""

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .content import ScaleGrid
from .core import DEFAULT_MAX_WORDS, IfsTuple, RifsDistribution, Similarity, validate_distribution


class ConfigError(ValueError):
    pass


def parse_seeds(value):
    """``[1, 2]``, ``"A..B"`` (inclusive), ``{"start": A, "stop": B}`` (exclusive) or a single int."""
    if value is None:
        return [0]
    if isinstance(value, bool):
        raise ConfigError("seeds must be integers")
    if isinstance(value, int):
        return [value]
    if isinstance(value, str):
        if ".." in value:
            a, b = value.split("..", 1)
            try:
                lo, hi = int(a), int(b)
            except ValueError as exc:
                raise ConfigError(f"bad seed range {value!r}") from exc
            if hi < lo:
                raise ConfigError(f"empty seed range {value!r}")
            return list(range(lo, hi + 1))
        try:
            return [int(value)]
        except ValueError as exc:
            raise ConfigError(f"bad seed {value!r}") from exc
    if isinstance(value, dict):
        return list(range(int(value.get("start", 0)), int(value["stop"])))
    seeds = [int(s) for s in value]
    if not seeds:
        raise ConfigError("seed list is empty")
    return seeds


def _similarity(raw, d):
    try:
        ratio = float(raw["ratio"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"map needs a numeric ratio: {raw!r}") from exc
    t = np.atleast_1d(np.asarray(raw.get("translation", [0.0] * d), dtype=float))
    if t.size != d:
        raise ConfigError(f"translation {t.tolist()} does not match dimension {d}")
    if "orthogonal" in raw:
        q = np.asarray(raw["orthogonal"], dtype=float).reshape(d, d)
    else:
        q = np.eye(d)
    if raw.get("reflect", False):
        if d != 1:
            raise ConfigError("'reflect' is only meaningful in dimension 1; give 'orthogonal'")
        q = -q
    return Similarity(ratio, q, t)


def _distribution(raw):
    atoms_raw = raw.get("atoms")
    if not atoms_raw:
        raise ConfigError("config needs a nonempty 'atoms' list")
    d = raw.get("dimension")
    if d is None:
        first = atoms_raw[0]["maps"][0].get("translation", 0.0)
        d = np.atleast_1d(first).size
    d = int(d)
    atoms, weights = [], []
    for a in atoms_raw:
        maps = a.get("maps")
        if not maps:
            raise ConfigError("every atom needs a nonempty 'maps' list")
        atoms.append(IfsTuple(tuple(_similarity(m, d) for m in maps)))
        weights.append(float(a.get("weight", 1.0 / len(atoms_raw))))
    bounds = raw.get("bounds", {}) or {}
    dist = RifsDistribution(atoms, weights, bounds.get("r_min"), bounds.get("r_max"), bounds.get("n_max"))
    report = validate_distribution(dist)
    if not report.ok:
        raise ConfigError(f"invalid distribution: {report}")
    return dist


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    dist: RifsDistribution
    raw: dict
    seeds: list
    depth: int = 10
    samples: int = 100_000
    max_words: int = DEFAULT_MAX_WORDS
    grid: ScaleGrid | None = None
    exponent: float | None = None
    gamma: float | None = None
    x0: np.ndarray = field(default_factory=lambda: np.zeros(1))
    output: str = "out"

    @property
    def hash(self):
        canonical = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()

    @classmethod
    def from_dict(cls, raw):
        try:
            dist = _distribution(raw)
            grid_raw = raw.get("grid")
            grid = None
            if grid_raw is not None:
                grid = ScaleGrid(float(grid_raw["eps0"]), float(grid_raw["ratio"]), int(grid_raw["count"]))
            sep = raw.get("separation", {}) or {}
            x0 = np.atleast_1d(np.asarray(sep.get("x0", [0.0] * dist.dim), dtype=float))
            if x0.size != dist.dim:
                raise ConfigError("separation x0 does not match the dimension")
            gamma = sep.get("gamma")
            if gamma is not None and not float(gamma) > 0:
                raise ConfigError("separation gamma must be positive")
            exponent = raw.get("exponent")
            return cls(
                dist=dist,
                raw=raw,
                seeds=parse_seeds(raw.get("seeds")),
                depth=int(raw.get("depth", 10)),
                samples=int(raw.get("samples", 100_000)),
                max_words=int(raw.get("max_words", DEFAULT_MAX_WORDS)),
                grid=grid,
                exponent=None if exponent is None else float(exponent),
                gamma=None if gamma is None else float(gamma),
                x0=x0,
                output=str(raw.get("output", "out")),
            )
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path):
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")
        return cls.from_dict(raw)
