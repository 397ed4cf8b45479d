"""Typed run configuration assembled from the merged YAML mapping."""

import copy
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from ..analysis.resources import ResourceMethod
from ..mapping.unitary_map import BraMethod, ExpansionMode
from ..measurement.estimators import MeasurementConfig, MeasurementMode
from ..model.aim import AimParams
from ..model.series import TimeGrid
from ..simulation.circuit_sim import EvolutionMode, TrotterSplit
from .exceptions import AimCcgfError, ConfigError
from .helpers import config_hash, load_config

logger = logging.getLogger(__name__)

OUTPUT_FORMATS = ("csv", "json")


@dataclass
class ModelSettings:
    params: AimParams
    max_bath: int = 6


@dataclass
class ReferenceSettings:
    n_electrons: Optional[int] = None
    occupation: Optional[str] = None


@dataclass
class CcSettings:
    level: int = 2
    tol: float = 1e-10
    max_iter: int = 200
    diis_size: int = 6
    damping: float = 0.5
    guess: str = "continuation"
    continuation_steps: int = 16
    bra_method: BraMethod = BraMethod.CLOSED_FORM


@dataclass
class GreensSettings:
    p: Optional[int] = None
    q: Optional[int] = None
    expansion: ExpansionMode = ExpansionMode.FULL


@dataclass
class EvolutionSettings:
    mode: EvolutionMode = EvolutionMode.EXACT
    dt: float = 0.03
    horizon: float = 50.0
    r: Optional[int] = None

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid.from_horizon(self.dt, self.horizon)


@dataclass
class SpectralSettings:
    delta: float = 0.1
    padding: int = 4


@dataclass
class TrotterRatioSettings:
    dt: float = 0.03
    n_substeps: List[int] = field(default_factory=lambda: [1, 2, 4, 8])
    n_timesteps: int = 100
    splits: List[TrotterSplit] = field(default_factory=lambda: [TrotterSplit.POTENTIAL])


@dataclass
class ResourceSettings:
    t: float = 10.0
    eps_s: float = 1e-3
    eps_m: Optional[float] = 1e-2
    p_f: float = 0.0
    methods: List[ResourceMethod] = field(default_factory=list)
    trotter_ratio: TrotterRatioSettings = field(default_factory=TrotterRatioSettings)


@dataclass
class ValidateSettings:
    threshold: float = 1e-6
    horizon: float = 10.0


@dataclass
class OutputSettings:
    dir: str = "results"
    format: str = "csv"


@dataclass
class LoggingSettings:
    level: str = "INFO"
    format: Optional[str] = None
    file: Optional[str] = None


@dataclass
class RunConfig:
    """Complete settings for one CLI run."""

    model: ModelSettings
    reference: ReferenceSettings
    cc: CcSettings
    greens: GreensSettings
    evolution: EvolutionSettings
    measurement: MeasurementConfig
    progress: bool
    spectral: SpectralSettings
    resources: ResourceSettings
    validate: ValidateSettings
    output: OutputSettings
    logging: LoggingSettings
    raw: Dict[str, Any] = field(default_factory=dict)

    @property
    def hash(self) -> str:
        return config_hash(self.raw)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        """Build typed settings from a merged configuration mapping.

        Raises:
            ConfigError: If a value is missing or invalid
        """
        try:
            model = data["model"]
            ratio = data["resources"]["trotter_ratio"]
            measurement = data["measurement"]
            config = cls(
                model=ModelSettings(
                    params=AimParams.from_dict(model),
                    max_bath=int(model["max_bath"]),
                ),
                reference=ReferenceSettings(**data["reference"]),
                cc=CcSettings(**{**data["cc"], "bra_method": BraMethod(data["cc"]["bra_method"])}),
                greens=GreensSettings(**{**data["greens"], "expansion": ExpansionMode(data["greens"]["expansion"])}),
                evolution=EvolutionSettings(**{**data["evolution"], "mode": EvolutionMode(data["evolution"]["mode"])}),
                measurement=MeasurementConfig(
                    mode=MeasurementMode(measurement["mode"]),
                    shots=measurement["shots"],
                    seed=int(measurement["seed"]),
                    eps_m=float(measurement["eps_m"]),
                ),
                progress=bool(measurement["progress"]),
                spectral=SpectralSettings(**data["spectral"]),
                resources=ResourceSettings(
                    t=float(data["resources"]["t"]),
                    eps_s=float(data["resources"]["eps_s"]),
                    eps_m=data["resources"]["eps_m"],
                    p_f=float(data["resources"]["p_f"]),
                    methods=[ResourceMethod(m) for m in data["resources"]["methods"] or []],
                    trotter_ratio=TrotterRatioSettings(
                        dt=float(ratio["dt"]),
                        n_substeps=[int(n) for n in ratio["n_substeps"]],
                        n_timesteps=int(ratio["n_timesteps"]),
                        splits=[TrotterSplit(s) for s in ratio.get("splits") or ["potential"]],
                    ),
                ),
                validate=ValidateSettings(**data["validate"]),
                output=OutputSettings(**data["output"]),
                logging=LoggingSettings(**data["logging"]),
                raw=copy.deepcopy(data),
            )
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError, AimCcgfError) as e:
            raise ConfigError(f"Invalid configuration: {e}") from e

        if config.output.format not in OUTPUT_FORMATS:
            raise ConfigError(f"output.format must be one of {OUTPUT_FORMATS}, got {config.output.format!r}")
        if config.evolution.r is not None and int(config.evolution.r) < 1:
            raise ConfigError(f"evolution.r must be a positive integer, got {config.evolution.r}")
        return config


def apply_overrides(data: Dict[str, Any], **overrides: Any) -> Dict[str, Any]:
    """Copy of ``data`` with CLI flags applied (``None`` values are ignored).

    Recognized keys: ``seed``, ``shots``, ``mode``, ``out``, ``format``, ``threshold``.
    """
    targets = {
        "seed": ("measurement", "seed"),
        "shots": ("measurement", "shots"),
        "mode": ("measurement", "mode"),
        "out": ("output", "dir"),
        "format": ("output", "format"),
        "threshold": ("validate", "threshold"),
    }
    result = copy.deepcopy(data)
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in targets:
            raise ConfigError(f"Unknown override: {key}")
        section, name = targets[key]
        result[section][name] = value
    return result


def load_run_config(config_path: Optional[str] = None, **overrides: Any) -> RunConfig:
    """Load, merge, override and type a configuration file."""
    data = apply_overrides(load_config(config_path), **overrides)
    config = RunConfig.from_dict(data)
    logger.debug(f"Loaded configuration {config.hash}")
    return config
