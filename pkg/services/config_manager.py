"""Configuration manager for the probabilistic metrizability toolkit."""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

logger = logging.getLogger(__name__)


def _default_jump_grid() -> List[float]:
    return [0.25 * k for k in range(1, 17)]


def _default_value_grid() -> List[float]:
    return [round(0.1 * k, 1) for k in range(1, 10)] + [1.0]


@dataclass
class LimitsConfig:
    """Size caps."""
    max_table_carrier: int = 16                  # largest carrier for a full delta table
    max_exhaustive_carrier: int = 8              # largest carrier for A4 / closure-operator sweeps
    max_plateaus: int = 1_000_000                # convolution output cap


@dataclass
class ToleranceConfig:
    """Numeric slacks. Jump positions and "equals 1" tests never use these."""
    associativity: float = 1e-12
    monotonicity: float = 1e-15
    order: float = 1e-12                         # value slack of the pointwise order (P5, non-expansiveness)
    exp_grid: float = 1e-9                       # sampled P5 check for exponential entries
    transport_grid: float = 1e-12                # isomorphism round trip


@dataclass
class GeneratorConfig:
    """Random step-space generator settings."""
    jump_grid: List[float] = field(default_factory=_default_jump_grid)
    value_grid: List[float] = field(default_factory=_default_value_grid)
    max_plateaus: int = 3
    one_probability: float = 0.7                 # chance that an entry ends with value 1
    max_attempts: int = 100


@dataclass
class OracleConfig:
    """Grid oracle settings."""
    resolution: int = 1000
    t_max_factor: float = 2.0                    # t_max = factor * largest jump
    exp_grid_points: int = 1000


class ConfigManager:
    """Manages toolkit configuration loading and saving."""

    DEFAULT_CONFIG_FILENAME = "config.json"
    EXAMPLE_CONFIG_FILENAME = "config.example.json"

    def __init__(self, config_path: Optional[str] = None):
        """
        Initialize the config manager.

        Args:
            config_path: Optional custom path to config file.
                        If not provided, uses config.json in the app directory,
                        falling back to config.example.json and then to defaults.
        """
        self._config_path = config_path or self._get_default_config_path()
        self._config: Dict[str, Any] = {}
        self._load_config(explicit=config_path is not None)

    def _get_default_config_path(self) -> str:
        """Get the default configuration file path."""
        app_dir = Path(__file__).parent.parent
        return str(app_dir / self.DEFAULT_CONFIG_FILENAME)

    def _load_config(self, explicit: bool = False) -> None:
        """Load configuration from file."""
        config_path = Path(self._config_path)

        if not config_path.exists():
            if explicit:
                logger.error(f"Config file not found: {config_path}")
                raise ValueError(f"Configuration file not found: {config_path}")
            example_path = config_path.parent / self.EXAMPLE_CONFIG_FILENAME
            if example_path.exists():
                logger.info(f"Using example config from {example_path}")
                self._config = self._read(example_path)
            else:
                logger.warning("No configuration file found, using defaults")
                self._config = self._get_default_config()
        else:
            self._config = self._read(config_path)
            logger.info(f"Configuration loaded from {config_path}")

    @staticmethod
    def _read(path: Path) -> Dict[str, Any]:
        try:
            with open(path, 'r') as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            logger.error(f"Failed to parse config file: {e}")
            raise ValueError(f"Invalid configuration file: {e}")
        if not isinstance(data, dict):
            raise ValueError(f"Invalid configuration file: {path} must hold a JSON object")
        return data

    def _get_default_config(self) -> Dict[str, Any]:
        """Get default configuration values."""
        return {
            "limits": LimitsConfig().__dict__.copy(),
            "tolerances": ToleranceConfig().__dict__.copy(),
            "generator": GeneratorConfig().__dict__.copy(),
            "oracle": OracleConfig().__dict__.copy(),
        }

    def save(self, path: Optional[str] = None) -> None:
        """Save current configuration to file."""
        target = path or self._config_path
        try:
            with open(target, 'w') as f:
                json.dump(self._config, f, indent=2)
            logger.info(f"Configuration saved to {target}")
        except Exception as e:
            logger.error(f"Failed to save configuration: {e}")
            raise

    @property
    def config_path(self) -> str:
        """Get the configuration file path."""
        return self._config_path

    def _section(self, name: str) -> Dict[str, Any]:
        section = self._config.get(name, {})
        return section if isinstance(section, dict) else {}

    # Typed sections
    @property
    def limits(self) -> LimitsConfig:
        """Get size caps."""
        cfg = self._section("limits")
        defaults = LimitsConfig()
        return LimitsConfig(
            max_table_carrier=cfg.get("max_table_carrier", defaults.max_table_carrier),
            max_exhaustive_carrier=cfg.get("max_exhaustive_carrier", defaults.max_exhaustive_carrier),
            max_plateaus=cfg.get("max_plateaus", defaults.max_plateaus),
        )

    @property
    def tolerances(self) -> ToleranceConfig:
        """Get numeric tolerances."""
        cfg = self._section("tolerances")
        defaults = ToleranceConfig()
        return ToleranceConfig(
            associativity=cfg.get("associativity", defaults.associativity),
            monotonicity=cfg.get("monotonicity", defaults.monotonicity),
            order=cfg.get("order", defaults.order),
            exp_grid=cfg.get("exp_grid", defaults.exp_grid),
            transport_grid=cfg.get("transport_grid", defaults.transport_grid),
        )

    @property
    def generator(self) -> GeneratorConfig:
        """Get generator settings."""
        cfg = self._section("generator")
        defaults = GeneratorConfig()
        return GeneratorConfig(
            jump_grid=list(cfg.get("jump_grid", defaults.jump_grid)),
            value_grid=list(cfg.get("value_grid", defaults.value_grid)),
            max_plateaus=cfg.get("max_plateaus", defaults.max_plateaus),
            one_probability=cfg.get("one_probability", defaults.one_probability),
            max_attempts=cfg.get("max_attempts", defaults.max_attempts),
        )

    @property
    def oracle(self) -> OracleConfig:
        """Get oracle grid settings."""
        cfg = self._section("oracle")
        defaults = OracleConfig()
        return OracleConfig(
            resolution=cfg.get("resolution", defaults.resolution),
            t_max_factor=cfg.get("t_max_factor", defaults.t_max_factor),
            exp_grid_points=cfg.get("exp_grid_points", defaults.exp_grid_points),
        )

    # Overrides
    def set_value(self, section: str, key: str, value: Any) -> None:
        """Override one value, e.g. from a CLI flag."""
        self._config.setdefault(section, {})[key] = value

    # Validation
    def is_valid(self) -> bool:
        """Check if configuration values are usable."""
        return not self.get_validation_errors()

    def get_validation_errors(self) -> list:
        """Get list of validation errors."""
        errors = []
        limits = self.limits
        for name in ("max_table_carrier", "max_exhaustive_carrier", "max_plateaus"):
            value = getattr(limits, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                errors.append(f"limits.{name} must be a positive integer")

        for name, value in self.tolerances.__dict__.items():
            if not isinstance(value, (int, float)) or not (0.0 <= value <= 1e-6):
                errors.append(f"tolerances.{name} must lie in [0, 1e-6]")

        generator = self.generator
        if not generator.jump_grid or any(not isinstance(j, (int, float)) or j < 0 for j in generator.jump_grid):
            errors.append("generator.jump_grid must be a nonempty list of non-negative numbers")
        if not generator.value_grid or any(not isinstance(v, (int, float)) or not (0 < v <= 1) for v in generator.value_grid):
            errors.append("generator.value_grid must be a nonempty list of values in (0, 1]")
        if not isinstance(generator.max_plateaus, int) or generator.max_plateaus < 1:
            errors.append("generator.max_plateaus must be a positive integer")
        if not isinstance(generator.one_probability, (int, float)) or not (0 <= generator.one_probability <= 1):
            errors.append("generator.one_probability must lie in [0, 1]")
        if not isinstance(generator.max_attempts, int) or generator.max_attempts < 1:
            errors.append("generator.max_attempts must be a positive integer")

        oracle = self.oracle
        if not isinstance(oracle.resolution, int) or oracle.resolution < 1:
            errors.append("oracle.resolution must be a positive integer")
        if not isinstance(oracle.t_max_factor, (int, float)) or oracle.t_max_factor <= 0:
            errors.append("oracle.t_max_factor must be positive")
        if not isinstance(oracle.exp_grid_points, int) or oracle.exp_grid_points < 2:
            errors.append("oracle.exp_grid_points must be an integer >= 2")
        return errors
