"""Experiment config documents: catalog, scenario and a list of named runs."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .adaptation import AdaptationParams, ParamError, SaraParams
from .catalog import CatalogError, VideoCatalog, load_catalog
from .controller import ControllerError, ControllerParams
from .engine import ALGORITHMS, ConfigError, SessionConfig
from .netmodel import Topology, TopologyError, TraceError, load_scenario

DATA_DIR = Path(__file__).parent / "data"
BUNDLED_CONFIG = DATA_DIR / "experiments_table4.json"

RUN_KEYS = {"name", "algorithm", "algorithm_params", "policy", "policy_params", "start_version", "startup_buffer_s"}


@dataclass(frozen=True)
class RunSpec:
    name: str
    algorithm: str
    adaptation: AdaptationParams
    sara: SaraParams
    controller: ControllerParams
    start_version: int = 0
    startup_buffer_s: float | None = None

    def echo(self) -> dict:
        algo_params = asdict(self.sara) if self.algorithm == "sara" else asdict(self.adaptation)
        policy_params = asdict(self.controller)
        policy = policy_params.pop("policy")
        return {
            "name": self.name,
            "algorithm": self.algorithm,
            "algorithm_params": algo_params,
            "policy": policy,
            "policy_params": policy_params,
            "start_version": self.start_version,
            "startup_buffer_s": self.startup_buffer_s,
        }

    def session(self, catalog: VideoCatalog, topology: Topology, extra_echo: dict | None = None) -> SessionConfig:
        echo = self.echo()
        if extra_echo:
            echo.update(extra_echo)
        return SessionConfig(
            catalog=catalog,
            topology=topology,
            algorithm=self.algorithm,
            adaptation=self.adaptation,
            sara=self.sara,
            controller=self.controller,
            start_version=self.start_version,
            startup_buffer_s=self.startup_buffer_s,
            echo=echo,
        )


@dataclass(frozen=True)
class ExperimentConfig:
    catalog_path: Path
    scenario_path: Path
    runs: tuple[RunSpec, ...]

    def load_inputs(self) -> tuple[VideoCatalog, Topology]:
        try:
            return load_catalog(self.catalog_path), load_scenario(self.scenario_path)
        except (CatalogError, TopologyError, TraceError) as exc:
            raise ConfigError(str(exc)) from exc


def _build(cls, where: str, params: dict, **extra):
    if not isinstance(params, dict):
        raise ConfigError(f"{where}: expected an object")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(params) - known)
    if unknown:
        raise ConfigError(f"{where}: unknown field(s) {unknown}")
    try:
        return cls(**params, **extra)
    except (ParamError, ControllerError, TypeError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def parse_run(doc: dict, where: str = "run") -> RunSpec:
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = sorted(set(doc) - RUN_KEYS)
    if unknown:
        raise ConfigError(f"{where}: unknown field(s) {unknown}")
    for key in ("name", "algorithm", "policy"):
        if key not in doc:
            raise ConfigError(f"{where}.{key}: missing")
    algorithm = doc["algorithm"]
    if algorithm not in ALGORITHMS:
        raise ConfigError(f"{where}.algorithm: must be one of {ALGORITHMS}, got {algorithm!r}")
    algo_params = doc.get("algorithm_params", {})
    if algorithm == "sara":
        sara = _build(SaraParams, f"{where}.algorithm_params", algo_params)
        adaptation = AdaptationParams()
    else:
        sara = SaraParams()
        adaptation = _build(AdaptationParams, f"{where}.algorithm_params", algo_params)
    controller = _build(ControllerParams, f"{where}.policy_params", doc.get("policy_params", {}), policy=doc["policy"])
    start = doc.get("start_version", 0)
    if not isinstance(start, int) or start < 0:
        raise ConfigError(f"{where}.start_version: must be a non-negative integer")
    startup = doc.get("startup_buffer_s")
    if startup is not None and not (isinstance(startup, (int, float)) and startup >= 0):
        raise ConfigError(f"{where}.startup_buffer_s: must be a non-negative number")
    return RunSpec(str(doc["name"]), algorithm, adaptation, sara, controller, start, startup)


def parse_config(doc: dict, base_dir: Path) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config: expected a JSON object")
    for key in ("catalog", "scenario", "runs"):
        if key not in doc:
            raise ConfigError(f"config.{key}: missing")
    runs = doc["runs"]
    if not isinstance(runs, list) or not runs:
        raise ConfigError("config.runs: must be a non-empty list")
    specs = tuple(parse_run(r, f"runs[{i}]") for i, r in enumerate(runs))
    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        raise ConfigError("config.runs: run names must be unique")
    return ExperimentConfig(base_dir / doc["catalog"], base_dir / doc["scenario"], specs)


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(doc, path.parent)
