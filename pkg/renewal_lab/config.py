"""
Runtime settings
Environment-driven defaults for trial execution and logging
"""

import os
from dataclasses import dataclass, field
from typing import Optional


def _default_threads() -> int:
    return int(os.getenv("RENEWAL_LAB_THREADS", str(os.cpu_count() or 1)))


@dataclass
class LabSettings:
    """Runtime settings for trial execution and logging."""

    # Worker threads for trial execution
    threads: int = field(default_factory=_default_threads)

    # Hard cap on generated events per realization
    max_events: int = field(default_factory=lambda: int(os.getenv("RENEWAL_LAB_MAX_EVENTS", str(10**9))))

    # Trials handed to a worker at a time
    chunk_size: int = field(default_factory=lambda: int(os.getenv("RENEWAL_LAB_CHUNK_SIZE", "256")))

    # Logging
    log_level: str = field(default_factory=lambda: os.getenv("RENEWAL_LAB_LOG_LEVEL", "WARNING"))
    log_file: Optional[str] = field(default_factory=lambda: os.getenv("RENEWAL_LAB_LOG_FILE") or None)

    def __post_init__(self):
        """Validate settings after initialization."""
        if self.threads < 1:
            raise ValueError("threads must be at least 1")

        if self.max_events < 1:
            raise ValueError("max_events must be at least 1")

        if self.chunk_size < 1:
            raise ValueError("chunk_size must be at least 1")

        self.log_level = self.log_level.upper()


def get_settings() -> LabSettings:
    """Settings as currently described by the environment."""
    return LabSettings()
