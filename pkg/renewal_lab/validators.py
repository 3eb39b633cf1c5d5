"""
Input validation for experiment parameters
Parses JSON distribution, strategy and noise specs and checks numeric flags
"""

import json
import logging
from pathlib import Path
from typing import Any, Optional, Union

from pydantic import TypeAdapter, ValidationError

from .distributions import DISTRIBUTION_ADAPTER, NOISE_ADAPTER, DistributionSpec, NoiseSpec
from .error_models import ErrorCode, ValidationFailure
from .window_strategies import STRATEGY_ADAPTER, WindowStrategy

logger = logging.getLogger(__name__)


def _describe(exc: ValidationError) -> str:
    """First pydantic error as 'location: message'"""
    first = exc.errors()[0]
    location = ".".join(str(part) for part in first.get("loc", ())) or "value"
    return f"{location}: {first.get('msg', 'invalid')}"


class InputValidator:
    """
    Validates user inputs before any computation starts

    Every failure is raised as ValidationFailure naming the offending flag.
    """

    @classmethod
    def _parse(cls, adapter: TypeAdapter, raw: Union[str, dict, Any], flag: str,
               code: ErrorCode) -> Any:
        if not isinstance(raw, (str, bytes)):
            try:
                return adapter.validate_python(raw)
            except ValidationError as exc:
                raise ValidationFailure(f"{flag}: {_describe(exc)}", code)

        try:
            return adapter.validate_json(raw)
        except ValidationError as exc:
            logger.error(f"Rejected {flag} value {raw!r}")
            raise ValidationFailure(f"{flag}: {_describe(exc)}", code)

    @classmethod
    def parse_distribution(cls, raw: Union[str, dict], flag: str = "--dist") -> DistributionSpec:
        """
        Parse a DistributionSpec from JSON text or a dict

        Args:
            raw: e.g. '{"kind":"exponential","rate":1}'
            flag: Flag name used in error messages

        Returns:
            Validated DistributionSpec

        Raises:
            ValidationFailure: If the JSON is malformed or a parameter is out of range
        """
        spec = cls._parse(DISTRIBUTION_ADAPTER, raw, flag, ErrorCode.INVALID_DISTRIBUTION)
        logger.info(f"Distribution validated: {spec.label()}")
        return spec

    @classmethod
    def parse_strategy(cls, raw: Union[str, dict], flag: str = "--strategy") -> WindowStrategy:
        strat = cls._parse(STRATEGY_ADAPTER, raw, flag, ErrorCode.INVALID_STRATEGY)
        logger.info(f"Strategy validated: {strat.label()}")
        return strat

    @classmethod
    def parse_noise(cls, raw: Union[str, dict], flag: str = "--noise") -> NoiseSpec:
        return cls._parse(NOISE_ADAPTER, raw, flag, ErrorCode.INVALID_PARAMETER)

    @classmethod
    def validate_trials(cls, n_trials: int, flag: str = "--n-trials") -> int:
        if n_trials < 2:
            raise ValidationFailure(f"{flag} must be at least 2, got {n_trials}")
        if n_trials < 1000:
            logger.warning(f"{flag}={n_trials}: confidence intervals are unreliable below 1000 trials")
        return n_trials

    @classmethod
    def validate_seed(cls, seed: Optional[int], flag: str = "--seed") -> int:
        if seed is None:
            raise ValidationFailure(f"{flag} is required")
        if seed < 0:
            raise ValidationFailure(f"{flag} must be non-negative, got {seed}")
        return seed

    @classmethod
    def load_config_file(cls, path: Path, flag: str = "--config") -> dict:
        """
        Read a JSON config file into a dict

        Raises:
            ValidationFailure: If the file is missing, unreadable or not a JSON object
        """
        path = Path(path)
        try:
            payload = json.loads(path.read_text())
        except FileNotFoundError:
            raise ValidationFailure(f"{flag}: {path} does not exist", ErrorCode.MALFORMED_CONFIG)
        except json.JSONDecodeError as exc:
            raise ValidationFailure(f"{flag}: {path} is not valid JSON ({exc.msg})", ErrorCode.MALFORMED_CONFIG)

        if not isinstance(payload, dict):
            raise ValidationFailure(f"{flag}: {path} must hold a JSON object", ErrorCode.MALFORMED_CONFIG)

        logger.info(f"Config file validated: {path}")
        return payload
