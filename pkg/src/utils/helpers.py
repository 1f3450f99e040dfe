"""
Helper utilities for the GvM symmetry toolkit
"""

import os
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

import yaml
from dotenv import load_dotenv

from .exceptions import ConfigError

LOGGER_NAME = "gvm_symmetry"
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

REQUIRED_SECTIONS = ["study", "test", "logging"]


def load_config(config_path: Optional[str]) -> Dict[str, Any]:
    """Load configuration from YAML file"""
    logger = logging.getLogger(LOGGER_NAME)
    if not config_path:
        return {}

    load_dotenv()
    try:
        with open(config_path, 'r', encoding='utf-8') as file:
            config = yaml.safe_load(file) or {}
    except FileNotFoundError:
        logger.warning(f"Configuration file not found: {config_path}")
        return {}
    except yaml.YAMLError as e:
        raise ConfigError(f"Error parsing configuration file {config_path}: {e}") from e

    if not isinstance(config, dict):
        raise ConfigError(f"Configuration file {config_path} must hold a mapping")

    # Handle environment variable substitution
    return _substitute_env_vars(config)


def _substitute_env_vars(config: Any) -> Any:
    """Recursively substitute environment variables in configuration"""
    if isinstance(config, dict):
        return {key: _substitute_env_vars(value) for key, value in config.items()}
    elif isinstance(config, list):
        return [_substitute_env_vars(item) for item in config]
    elif isinstance(config, str) and config.startswith("${") and config.endswith("}"):
        env_var = config[2:-1]
        return os.getenv(env_var, config)
    else:
        return config


def setup_logging(config: Dict[str, Any]) -> logging.Logger:
    """Set up logging configuration"""
    logger = logging.getLogger(LOGGER_NAME)

    # Set log level
    log_level = str(config.get("level", "INFO"))
    level = getattr(logging, log_level.upper(), None)
    if not isinstance(level, int):
        raise ConfigError(f"Unknown log level: {log_level}")
    logger.setLevel(level)

    # Handlers from an earlier call are replaced, not stacked
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(LOG_FORMAT)

    # Console output shares stderr with the CLI status lines
    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    log_file = config.get("file")
    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)

        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


def ensure_directories(paths: Iterable[Optional[str]]) -> None:
    """Ensure the parent directories of output paths exist"""
    for path in paths:
        if path:
            Path(path).parent.mkdir(parents=True, exist_ok=True)


def validate_config(config: Dict[str, Any]) -> bool:
    """Validate configuration file"""
    logger = logging.getLogger(LOGGER_NAME)

    for section in REQUIRED_SECTIONS:
        if section not in config:
            logger.error(f"Missing required configuration section: {section}")
            return False

    return True


def config_section(config: Dict[str, Any], name: str) -> Dict[str, Any]:
    """Return one section of the configuration, empty when absent"""
    section = config.get(name) or {}
    if not isinstance(section, dict):
        raise ConfigError(f"Configuration section '{name}' must be a mapping")
    return section
