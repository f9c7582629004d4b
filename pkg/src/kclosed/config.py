"""Run configuration: one JSON document, with seed and output directory overridable from the environment."""

from __future__ import annotations

import copy
import json
import os
from dataclasses import dataclass
from pathlib import Path

from .corpus import DEFAULT_BAND, FAMILIES, SPLITS
from .grid import GridSpec, TLadder
from .maximal import ConeParams

ENV_SEED = "KCLOSED_SEED"
ENV_OUT = "KCLOSED_OUT"

DEFAULTS = {
    "grid": {"dim": 2, "points": 128, "period": 1.0},
    "ladder": {"count": 48, "t_min": None, "t_max": None},
    "cone": {"aperture": 1.0},
    "p1": 0.8,
    "p2": 2.0,
    "corpus": {"count": 50, "seed": 42, "families": list(FAMILIES), "splits": list(SPLITS), "band": DEFAULT_BAND},
    "verify": {
        "lemma_samples": 1_000_000,
        "lemma_factor": 2.0,
        "exploratory_delta": 0.1,
        "refine": True,
        "identity_items": 3,
        "ball_samples": 12,
    },
    "tolerances": {"majorization": 1e-4, "stability": 0.25},
    "save_items": True,
    "out": "runs/default",
}


class ConfigError(ValueError):
    """Malformed or inconsistent configuration (CLI exit code 2)."""


def _merge(base: dict, over: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, val in over.items():
        if key not in base:
            raise ConfigError(f"unknown config key {path + key!r}")
        if isinstance(base[key], dict):
            if not isinstance(val, dict):
                raise ConfigError(f"config key {path + key!r} must be an object")
            out[key] = _merge(base[key], val, f"{path}{key}.")
        else:
            out[key] = val
    return out


@dataclass(frozen=True)
class RunConfig:
    data: dict

    @classmethod
    def from_dict(cls, over: dict | None = None, env: dict | None = None) -> "RunConfig":
        data = _merge(DEFAULTS, over or {})
        env = os.environ if env is None else env
        if env.get(ENV_SEED):
            try:
                data["corpus"]["seed"] = int(env[ENV_SEED])
            except ValueError as exc:
                raise ConfigError(f"{ENV_SEED} must be an integer") from exc
        if env.get(ENV_OUT):
            data["out"] = env[ENV_OUT]
        cfg = cls(data)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str | Path | None = None, env: dict | None = None) -> "RunConfig":
        if path is None:
            return cls.from_dict({}, env)
        try:
            over = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(over, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(over, env)

    def with_overrides(self, **kw) -> "RunConfig":
        """Apply CLI-style overrides: seed, out, items, grid, p1."""
        d = copy.deepcopy(self.data)
        if kw.get("seed") is not None:
            d["corpus"]["seed"] = int(kw["seed"])
        if kw.get("out") is not None:
            d["out"] = str(kw["out"])
        if kw.get("items") is not None:
            d["corpus"]["count"] = int(kw["items"])
        if kw.get("grid") is not None:
            d["grid"]["points"] = int(kw["grid"])
        if kw.get("p1") is not None:
            d["p1"] = float(kw["p1"])
        cfg = RunConfig(d)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        try:
            self.spec()
            self.ladder()
            self.cone()
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        n = self.data["grid"]["dim"]
        p1, p2 = self.p1, self.p2
        if not (n - 1) / n < p1 < 1 < p2:
            raise ConfigError(f"need (n-1)/n < p1 < 1 < p2, got p1={p1}, p2={p2}")
        c = self.data["corpus"]
        if not isinstance(c["count"], int) or c["count"] < 0:
            raise ConfigError("corpus.count must be a non-negative integer")
        for fam in c["families"]:
            if fam not in FAMILIES:
                raise ConfigError(f"unknown family {fam!r}; valid: {', '.join(FAMILIES)}")
        for spl in c["splits"]:
            if spl not in SPLITS:
                raise ConfigError(f"unknown split {spl!r}; valid: {', '.join(SPLITS)}")
        if not c["families"] or not c["splits"]:
            raise ConfigError("corpus needs at least one family and one split")

    def spec(self, points: int | None = None) -> GridSpec:
        g = self.data["grid"]
        return GridSpec(int(g["dim"]), int(points or g["points"]), float(g["period"]))

    def ladder(self, spec: GridSpec | None = None) -> TLadder:
        spec = self.spec() if spec is None else spec
        lad = self.data["ladder"]
        lo = lad["t_min"] if lad["t_min"] is not None else spec.h / 32
        hi = lad["t_max"] if lad["t_max"] is not None else 4 * spec.period
        return TLadder.geometric(float(lo), float(hi), int(lad["count"]))

    def cone(self) -> ConeParams:
        return ConeParams(float(self.data["cone"]["aperture"]))

    @property
    def p1(self) -> float:
        return float(self.data["p1"])

    @property
    def p2(self) -> float:
        return float(self.data["p2"])

    @property
    def corpus(self) -> dict:
        return self.data["corpus"]

    @property
    def verify(self) -> dict:
        return self.data["verify"]

    @property
    def tolerances(self) -> dict:
        return self.data["tolerances"]

    @property
    def out(self) -> Path:
        return Path(self.data["out"])

    def to_json(self) -> str:
        return json.dumps(self.data, indent=1, sort_keys=True)
