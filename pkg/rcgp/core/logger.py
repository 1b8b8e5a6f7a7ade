"""Logging setup from the YAML dictConfig file in ``config/``."""

import logging
import logging.config
from pathlib import Path
from typing import Optional

import yaml

from rcgp.core.config import DEFAULT_SETTINGS_PATH, get_settings

DEFAULT_LOG_CONFIG = DEFAULT_SETTINGS_PATH.parent / "log-config.yml"


def setup_logging(path: Optional[Path] = None, level: Optional[str] = None) -> None:
    """Configure logging from a dictConfig YAML document.

    Args:
        path: YAML file; defaults to ``config/log-config.yml``
        level: Overrides the level of the ``rcgp`` logger
    """
    if path is None:
        configured = Path(get_settings().logging_config.CONFIG_FILE)
        path = configured if configured.exists() else DEFAULT_LOG_CONFIG
    path = Path(path)

    if path.exists():
        with open(path, "r") as f:
            logging.config.dictConfig(yaml.safe_load(f))
    else:
        logging.basicConfig(
            format="%(asctime)s %(levelname)s %(name)s - %(message)s"
        )

    logging.getLogger("rcgp").setLevel(level or get_settings().logging_config.LEVEL)
