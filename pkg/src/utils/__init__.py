# Utils Package
from .helpers import load_config, setup_logging, validate_config, ensure_directories
from .records import format_record, parse_record

__all__ = [
    "load_config",
    "setup_logging",
    "validate_config",
    "ensure_directories",
    "format_record",
    "parse_record",
]
