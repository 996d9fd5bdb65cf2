"""Configuration management for the application."""

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

# Load environment variables from .env file
try:
    from dotenv import load_dotenv
    # Load .env from project root
    env_path = Path(__file__).parent.parent / ".env"
    load_dotenv(dotenv_path=env_path)
except ImportError:
    # python-dotenv not installed, skip
    pass


LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


@dataclass
class Config:
    """Application configuration."""

    # Reproducibility and output
    seed: int = 0
    output_dir: str = "output"
    log_level: str = "WARNING"

    # Routing optimizer (Adam on softmax parameters)
    adam_step: float = 0.05
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    adam_decay: float = 0.998
    iterations: int = 2000
    restarts: int = 5
    grad_tolerance: float = 1e-7
    patience: int = 2

    # Oracles and simulation statistics
    state_cap: int = 2_000_000
    batches: int = 20

    @classmethod
    def from_env(cls) -> "Config":
        """
        Load configuration from environment variables.

        Returns:
            Config instance
        """
        return cls(
            seed=int(os.getenv("FLQ_SEED", "0")),
            output_dir=os.getenv("FLQ_OUTPUT_DIR", "output"),
            log_level=os.getenv("FLQ_LOG_LEVEL", "WARNING"),
            adam_step=float(os.getenv("FLQ_ADAM_STEP", "0.05")),
            adam_beta1=float(os.getenv("FLQ_ADAM_BETA1", "0.9")),
            adam_beta2=float(os.getenv("FLQ_ADAM_BETA2", "0.999")),
            adam_epsilon=float(os.getenv("FLQ_ADAM_EPSILON", "1e-8")),
            adam_decay=float(os.getenv("FLQ_ADAM_DECAY", "0.998")),
            iterations=int(os.getenv("FLQ_ITERATIONS", "2000")),
            restarts=int(os.getenv("FLQ_RESTARTS", "5")),
            grad_tolerance=float(os.getenv("FLQ_GRAD_TOL", "1e-7")),
            patience=int(os.getenv("FLQ_PATIENCE", "2")),
            state_cap=int(os.getenv("FLQ_STATE_CAP", "2000000")),
            batches=int(os.getenv("FLQ_BATCHES", "20")),
        )


def configure_logging(level: Optional[str] = None) -> None:
    """
    Install a single stream handler on the root logger.

    Args:
        level: Level name such as "INFO"; defaults to WARNING
    """
    level_name = (level or "WARNING").upper()
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    root.setLevel(getattr(logging, level_name, logging.WARNING))
