"""Experiment configuration: JSON documents validated into typed settings.

A minimal document is::

    {"experiment": "eigenvalues", "potential": {"radial": [2]}}

Unknown keys are rejected.  Potentials come from exactly one of

- ``values``: ``{"n,k": value}`` with depth ``n`` and 1-based index ``k``;
- ``radial``: shell profile ``[v_0, v_1, ...]``;
- ``random``: ``{"seed", "depth", "amplitude", "decay"}`` through
  :func:`bethe_sumrules.tree.random_potential`;
- ``file``: path to a JSON file holding one of the three forms above.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, ValidationError, model_validator

from .conformal import CosCoeffs, weight_coeffs
from .tree import Potential, VertexId, random_potential

EXPERIMENTS = ("identity-suite", "eigenvalues", "ledger-inequality", "main-lemma",
               "radial-compare", "conjecture-form", "hypothesis-scan")


class ConfigError(ValueError):
    pass


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class RandomSpec(_Strict):
    seed: int
    depth: int = Field(ge=0, le=12)
    amplitude: PositiveFloat = 1.0
    decay: float = Field(default=0.0, ge=0.0)


class PotentialSpec(_Strict):
    values: dict[str, float] | None = None
    radial: list[float] | None = None
    random: RandomSpec | None = None
    file: str | None = None

    @model_validator(mode="after")
    def _one_source(self):
        given = [k for k in ("values", "radial", "random", "file") if getattr(self, k) is not None]
        if len(given) > 1:
            raise ValueError(f"potential takes one source, got {given}")
        return self

    def build(self, base: Path | None = None) -> Potential:
        if self.file is not None:
            path = Path(self.file)
            if base is not None and not path.is_absolute():
                path = base / path
            inner = _validate(PotentialSpec, _load_json(path.read_text(), str(path)), str(path))
            if inner.file is not None:
                raise ConfigError(f"{path}: nested potential files are not allowed")
            return inner.build()
        if self.radial is not None:
            return Potential.radial(self.radial)
        if self.random is not None:
            r = self.random
            return random_potential(r.seed, r.depth, r.amplitude, r.decay)
        vals = {}
        for key, x in (self.values or {}).items():
            try:
                n, k = (int(t) for t in key.split(","))
                vals[VertexId(n, k)] = x
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"potential.values: bad vertex key {key!r} ({exc})") from exc
        return Potential(vals)


class WeightSpec(_Strict):
    sin_power: int | None = None
    poly: list[float] | None = None

    @model_validator(mode="after")
    def _one_kind(self):
        if (self.sin_power is None) == (self.poly is None):
            raise ValueError("weight takes exactly one of sin_power, poly")
        if self.sin_power is not None and (self.sin_power < 0 or self.sin_power % 2):
            raise ValueError("sin_power must be a nonnegative even integer")
        return self

    def coeffs(self) -> CosCoeffs:
        return weight_coeffs(self.model_dump(exclude_none=True))


class Grids(_Strict):
    theta_max_nodes: int = Field(default=2 ** 16, ge=64)
    zeta_samples: int = Field(default=5, ge=1)
    boundary_angles: int = Field(default=64, ge=1)
    radial_test_points: int = Field(default=10, ge=1)


class Tolerances(_Strict):
    identity: PositiveFloat = 1e-7
    slack: PositiveFloat = 1e-8
    eigen: PositiveFloat = 1e-6
    structure: PositiveFloat = 1e-10
    quadrature: PositiveFloat = 1e-9


class ExperimentConfig(_Strict):
    experiment: Literal[EXPERIMENTS]
    potential: PotentialSpec = PotentialSpec(values={})
    weight: WeightSpec = WeightSpec(sin_power=4)
    depth: int = Field(default=3, ge=0, le=10, description="truncation depth N")
    modes: int = Field(default=6, ge=0, description="largest Fourier mode in the identity suite")
    oracle_depth: int = Field(default=60, ge=1)
    oracle_margin: PositiveFloat = 0.05
    scan_depths: list[int] = [1, 2, 3, 4, 5, 6]
    scan_p: int = Field(default=2, ge=1)
    A: list[float] = [-4.0, 0.0, 1.0]
    grids: Grids = Grids()
    tolerances: Tolerances = Tolerances()
    out: str = "out"


def _load_json(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _validate(model, data, source: str):
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        lines = [f"{source}: {'.'.join(str(p) for p in e['loc']) or '<root>'}: {e['msg']}"
                 for e in exc.errors()]
        raise ConfigError("\n".join(lines)) from exc


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    return _validate(ExperimentConfig, _load_json(text, source), source)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    return parse_config(path.read_text(), str(path))
