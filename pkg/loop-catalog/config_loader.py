"""Configuration loader with environment variable support."""

import json
import logging
import os
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict

from dotenv import load_dotenv

from schemas import EngineSettings

load_dotenv()

logger = logging.getLogger(__name__)

CONFIG_DIR = Path(__file__).resolve().parent

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# env var -> (config key, parser)
_INT_OVERRIDES = {
    'AUTOLOOPS_ORDER_CAP': 'order_cap',
    'AUTOLOOPS_MAX_PRIME': 'max_prime',
    'AUTOLOOPS_WORKERS': 'workers',
    'AUTOLOOPS_ISO_NODE_BUDGET': 'iso_node_budget',
    'AUTOLOOPS_IDENTITY_A_SAMPLES': 'identity_a_samples',
    'AUTOLOOPS_EXHAUSTIVE_LIMIT': 'exhaustive_limit',
}


def load_config() -> Dict[str, Any]:
    """
    Load configuration from config.json with environment variable overrides.

    Environment variables:
    - AUTOLOOPS_ORDER_CAP: Overrides order_cap
    - AUTOLOOPS_MAX_PRIME: Overrides max_prime
    - AUTOLOOPS_WORKERS: Overrides workers (parallelism degree)
    - AUTOLOOPS_ISO_NODE_BUDGET: Overrides iso_node_budget
    - AUTOLOOPS_IDENTITY_A_SAMPLES: Overrides identity_a_samples
    - AUTOLOOPS_EXHAUSTIVE_LIMIT: Overrides exhaustive_limit
    - AUTOLOOPS_DEBUG: Enables debug-mode cross-checks ("1", "true", "yes")
    - AUTOLOOPS_LOG_LEVEL: Overrides log_level
    """
    # Load base config
    try:
        with open(CONFIG_DIR / 'config.json', 'r') as f:
            config = json.load(f)
    except FileNotFoundError:
        # If no config.json, start with sample
        with open(CONFIG_DIR / 'config.json.sample', 'r') as f:
            config = json.load(f)

    for env_name, key in _INT_OVERRIDES.items():
        if raw := os.environ.get(env_name):
            try:
                config[key] = int(raw)
            except ValueError:
                logger.warning(f"Invalid {env_name} value ignored: {raw!r}")

    if debug := os.environ.get('AUTOLOOPS_DEBUG'):
        config['debug'] = debug.strip().lower() in ('1', 'true', 'yes', 'on')

    if log_level := os.environ.get('AUTOLOOPS_LOG_LEVEL'):
        config['log_level'] = log_level.upper()

    return config


@lru_cache(maxsize=1)
def get_settings() -> EngineSettings:
    """Validated engine settings, loaded once per process."""
    return EngineSettings(**load_config())


def setup_logging(level: str = None) -> None:
    """Configure root logging in the service's usual format."""
    logging.basicConfig(
        level=getattr(logging, (level or get_settings().log_level).upper(), logging.INFO),
        format=LOG_FORMAT,
    )
