"""Run configuration: one JSON document describes a reproducible run.

No environment variables, no defaults that depend on the machine (the one
exception, thread count 0 = all cores, never changes results).  Parsing is
strict; `RunConfig.canonical()` emits the normalized document, and
parse -> serialize -> parse is the identity on it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .criteria import CheckHorizons, JMode
from .densities import IndexSet
from .families import (
    FamilyError,
    HittingFamily,
    SeparationRule,
    family_from_text,
    generate_block_family,
    generate_lower_family,
)
from .schedules import EpsilonSchedule, Schedules, default_epsilon, default_schedules
from .spaces import FiniteVector, SpaceModel
from .weights import WeightError, WeightRule, weight_rule_from_config

__all__ = ["ConfigError", "RunConfig", "EXIT_CONFIG_ERROR"]

EXIT_CONFIG_ERROR = 64


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


_KNOWN_KEYS = {"space", "weight", "family", "schedule", "horizons", "check",
               "targets", "set", "rational", "threads", "out"}


@dataclass
class RunConfig:
    raw: dict = field(default_factory=dict)

    def __post_init__(self):
        unknown = set(self.raw) - _KNOWN_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    # -- parsing ----------------------------------------------------------

    @staticmethod
    def from_json(text: str) -> "RunConfig":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config root must be an object")
        return RunConfig(raw)

    @staticmethod
    def load(path: str) -> "RunConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return RunConfig.from_json(fh.read())

    # -- typed accessors ---------------------------------------------------

    def space(self) -> SpaceModel:
        cfg = self.raw.get("space", {"variant": "c0_Z"})
        try:
            return SpaceModel.from_config(cfg)
        except Exception as exc:
            raise ConfigError(f"bad space config: {exc}") from exc

    def weight(self) -> WeightRule:
        if "weight" not in self.raw:
            raise ConfigError("config needs a 'weight' entry")
        try:
            return weight_rule_from_config(self.raw["weight"])
        except WeightError as exc:
            raise ConfigError(f"bad weight config: {exc}") from exc

    def separation(self, fam_cfg: dict) -> SeparationRule:
        return SeparationRule(extra=int(fam_cfg.get("sep_extra", 0)))

    def family(self) -> HittingFamily:
        cfg = self.raw.get("family")
        if cfg is None:
            raise ConfigError("config needs a 'family' entry")
        try:
            if "file" in cfg:
                with open(cfg["file"], "r", encoding="utf-8") as fh:
                    return family_from_text(fh.read())
            gen = cfg.get("generator", "block")
            P = int(cfg["P"])
            horizon = int(cfg["horizon"])
            sep = self.separation(cfg)
            if gen == "block":
                return generate_block_family(P, sep, gamma=int(cfg.get("gamma", 4)),
                                             horizon=horizon)
            if gen == "lower":
                return generate_lower_family(P, sep, K=int(cfg.get("K", 16)),
                                             horizon=horizon)
            raise ConfigError(f"unknown family generator {gen!r}")
        except (KeyError, ValueError, FamilyError, OSError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad family config: {exc}") from exc

    def epsilon(self, P: int) -> EpsilonSchedule:
        cfg = self.raw.get("schedule", {"default": True})
        if cfg.get("default", False) or "epsilon" not in cfg:
            return default_epsilon(P)
        try:
            eps = EpsilonSchedule.from_config(cfg["epsilon"])
        except ValueError as exc:
            raise ConfigError(f"bad schedule: {exc}") from exc
        if eps.P < P:
            raise ConfigError(f"schedule provides {eps.P} values, family needs {P}")
        return eps

    def schedules(self, w: WeightRule, P: int) -> Schedules:
        return default_schedules(w, P)

    def horizons(self) -> CheckHorizons:
        cfg = self.raw.get("horizons")
        if cfg is None:
            raise ConfigError("config needs a 'horizons' entry")
        try:
            return CheckHorizons(outer=int(cfg["outer"]), inner=int(cfg["inner"]))
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad horizons: {exc}") from exc

    def window(self) -> int:
        cfg = self.raw.get("horizons", {})
        if "window" not in cfg:
            raise ConfigError("horizons config needs a 'window' for build/orbit runs")
        return int(cfg["window"])

    def j_mode(self) -> JMode:
        mode = self.raw.get("check", {}).get("j_mode", "full")
        try:
            jm = JMode(mode)
        except ValueError as exc:
            raise ConfigError(f"unknown j_mode {mode!r}") from exc
        if jm is JMode.ZERO and not self.weight().invertible:
            raise ConfigError("j_mode 'zero' requires an invertible weight rule")
        return jm

    def check_form(self) -> str:
        form = self.raw.get("check", {}).get("form", "auto")
        if form not in ("auto", "norm", "products", "growth"):
            raise ConfigError(f"unknown check form {form!r}")
        return form

    def growth_thresholds(self) -> tuple:
        ts = self.raw.get("check", {}).get("thresholds", [1.0, 10.0, 100.0])
        out = tuple(float(t) for t in ts)
        if not out or any(t <= 0 for t in out):
            raise ConfigError("growth thresholds must be positive")
        return out

    def user_targets(self) -> Optional[list]:
        cfg = self.raw.get("targets", {"default": True})
        if cfg.get("default", False) or "vectors" not in cfg:
            return None
        out = []
        for entry in cfg["vectors"]:
            try:
                from fractions import Fraction
                out.append(FiniteVector({int(k): Fraction(v) for k, v in entry.items()}))
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"bad target vector {entry!r}: {exc}") from exc
        return out

    def index_set(self) -> IndexSet:
        cfg = self.raw.get("set")
        if cfg is None:
            raise ConfigError("config needs a 'set' entry for density runs")
        kind = cfg.get("kind")
        horizon = int(cfg.get("horizon", self.raw.get("horizons", {}).get("outer", 10**5)))
        try:
            if kind == "multiples":
                return IndexSet.multiples(int(cfg["step"]), horizon)
            if kind == "powers":
                return IndexSet.powers(int(cfg["base"]), horizon)
            if kind == "explicit":
                with open(cfg["path"], "r", encoding="utf-8") as fh:
                    return IndexSet(int(line) for line in fh if line.strip())
            if kind == "naturals":
                return IndexSet.naturals(horizon)
        except (KeyError, ValueError, OSError) as exc:
            raise ConfigError(f"bad set config: {exc}") from exc
        raise ConfigError(f"unknown set kind {kind!r}")

    def rational(self) -> bool:
        return bool(self.raw.get("rational", False))

    def threads(self) -> int:
        t = int(self.raw.get("threads", 1))
        if t == 0:
            import os
            t = os.cpu_count() or 1
        if t < 1:
            raise ConfigError("threads must be positive (0 = all cores)")
        return t

    def out_dir(self) -> str:
        return str(self.raw.get("out", "out"))

    # -- canonical form ----------------------------------------------------

    def canonical(self) -> dict:
        """The normalized config document (defaults made explicit)."""
        doc = {
            "space": self.space().to_config(),
            "rational": self.rational(),
            "threads": int(self.raw.get("threads", 1)),
            "out": self.out_dir(),
        }
        if "weight" in self.raw:
            doc["weight"] = self.weight().to_config()
        for key in ("family", "schedule", "horizons", "check", "targets", "set"):
            if key in self.raw:
                doc[key] = self.raw[key]
        return doc

    def to_json(self) -> str:
        return json.dumps(self.canonical(), sort_keys=True, indent=2) + "\n"
