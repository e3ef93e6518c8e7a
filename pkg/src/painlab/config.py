"""Run configuration, lab settings file and argument parsing helpers."""
import json
import logging
import os
import re
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from typing import Any, Dict, Optional

from dotenv import load_dotenv

from painlab.errors import ConfigError
from painlab.precision import PrecisionContext

logger = logging.getLogger(__name__)

DEFAULT_SETTINGS_PATH = "painlab.json"
MIN_DIGITS = 10
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def parse_rational(text: Any, name: str = "value") -> Fraction:
    """Exact rational from "15/7", "-0.5", "4" (or an int/Fraction)."""
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{name} must be a rational like '15/7' or a decimal, got {text!r}")


def parse_mu(text: Any) -> Fraction:
    mu = parse_rational(text, "mu")
    if mu <= -4:
        raise ConfigError(f"mu must exceed -4, got {mu}")
    return mu


_BARE_IMAG = re.compile(r"(^|[+-])j")


def parse_complex(text: Any, prec: PrecisionContext):
    """Complex number from "1.5-2i", "-3.2+1.1j", "2i" or a plain real."""
    if not isinstance(text, str):
        return prec.cplx(text)
    cleaned = text.strip().lower().replace(" ", "").replace("i", "j")
    cleaned = _BARE_IMAG.sub(lambda m: f"{m.group(1)}1j", cleaned)
    try:
        return prec.cplx(cleaned)
    except (ValueError, TypeError, AttributeError):
        raise ConfigError(f"cannot read {text!r} as a complex number")


@dataclass
class LabSettings:
    digits: int = 30
    guard_digits: int = 20
    taylor_terms: int = 40
    walk_steps: int = 100
    exclusion_radius: float = 1e-3
    log_level: str = "WARNING"

    def __post_init__(self):
        if self.digits < MIN_DIGITS:
            raise ConfigError(f"digits must be at least {MIN_DIGITS}, got {self.digits}")
        if self.taylor_terms < 4:
            raise ConfigError(f"taylor_terms must be at least 4, got {self.taylor_terms}")
        if self.walk_steps < 1:
            raise ConfigError(f"walk_steps must be positive, got {self.walk_steps}")
        self.log_level = str(self.log_level).upper()
        if self.log_level not in LOG_LEVELS:
            raise ConfigError(f"log_level must be one of {', '.join(LOG_LEVELS)}, got {self.log_level}")

    def to_dict(self):
        return asdict(self)

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> "LabSettings":
        known = {f.name for f in fields(LabSettings)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown settings keys: {', '.join(sorted(unknown))}")
        try:
            return LabSettings(**data)
        except TypeError as e:
            raise ConfigError(f"invalid settings: {e}")


class SettingsStore:
    """Loads painlab.json, then applies PAINLAB_* environment overrides."""

    def __init__(self, settings_path: Optional[str] = None):
        self.settings_path = settings_path or DEFAULT_SETTINGS_PATH
        self.explicit = settings_path is not None
        self.settings = self.load()

    def load(self) -> LabSettings:
        load_dotenv()
        data: Dict[str, Any] = {}
        if os.path.exists(self.settings_path):
            try:
                with open(self.settings_path, "r", encoding="utf-8") as f:
                    data = json.load(f)
            except (OSError, json.JSONDecodeError) as e:
                raise ConfigError(f"cannot read {self.settings_path}: {e}")
            if not isinstance(data, dict):
                raise ConfigError(f"{self.settings_path} must hold a JSON object")
        elif self.explicit:
            raise ConfigError(f"settings file {self.settings_path} does not exist")
        else:
            logger.info(f"{self.settings_path} not found, using built-in defaults")

        env_digits = os.getenv("PAINLAB_DIGITS")
        if env_digits:
            try:
                data["digits"] = int(env_digits)
            except ValueError:
                raise ConfigError(f"PAINLAB_DIGITS must be an integer, got {env_digits!r}")
        env_level = os.getenv("PAINLAB_LOG_LEVEL")
        if env_level:
            data["log_level"] = env_level
        return LabSettings.from_dict(data)


@dataclass
class RunConfig:
    """Resolved inputs of one CLI invocation; written as the artifact header."""

    command: str
    mu: Optional[str] = None
    digits: int = 30
    guard_digits: int = 20
    options: Dict[str, Any] = field(default_factory=dict)
    output_format: str = "json"
    output_path: Optional[str] = None

    def __post_init__(self):
        if self.mu is not None:
            self.mu = str(parse_mu(self.mu))
        if self.digits < MIN_DIGITS:
            raise ConfigError(f"digits must be at least {MIN_DIGITS}, got {self.digits}")
        if self.output_format not in ("json", "csv"):
            raise ConfigError(f"output format must be json or csv, got {self.output_format}")

    @property
    def mu_exact(self) -> Optional[Fraction]:
        return Fraction(self.mu) if self.mu is not None else None

    @property
    def prec(self) -> PrecisionContext:
        return PrecisionContext(self.digits, self.guard_digits)

    def to_dict(self):
        return asdict(self)

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> "RunConfig":
        return RunConfig(**data)
