"""
Configuration management for polyflux.

Resolves the run configuration file from:
1. Explicit path parameter
2. POLYFLUX_CONFIG environment variable
3. .env file in project root
4. ./polyflux.cfg in project root (default)

If none of these exists the reference parameter set is used.
"""

import logging
import os
from collections.abc import Iterable
from pathlib import Path

from dotenv import load_dotenv

from .core.config import SimConfig

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_FILE = "polyflux.cfg"


class ConfigManager:
    """
    Manages run configuration and environment settings.

    Priority order:
    1. Explicit config_path parameter
    2. POLYFLUX_CONFIG environment variable
    3. polyflux.cfg in project root
    """

    def __init__(self, project_root: Path | None = None) -> None:
        """
        Initialize configuration manager.

        Args:
            project_root: Root directory of the project (defaults to cwd)
        """
        self.project_root = project_root or Path.cwd()

        env_file = self.project_root / ".env"
        if env_file.exists():
            load_dotenv(env_file)

    def get_config_path(self, explicit_path: str | Path | None = None) -> Path | None:
        """
        Resolve configuration file path using priority order.

        Args:
            explicit_path: Explicitly provided config path (highest priority)

        Returns:
            Resolved Path, or None when the defaults apply

        Raises:
            FileNotFoundError: If an explicit or environment-provided path does not exist
        """
        if explicit_path is not None:
            path = Path(explicit_path).expanduser().resolve()
            if not path.exists():
                raise FileNotFoundError(f"Explicitly provided config file not found: {path}")
            return path

        env_path = os.getenv("POLYFLUX_CONFIG")
        if env_path:
            path = Path(env_path).expanduser().resolve()
            if not path.exists():
                raise FileNotFoundError(f"POLYFLUX_CONFIG points to non-existent file: {path}")
            return path

        default_path = self.project_root / DEFAULT_CONFIG_FILE
        if default_path.exists():
            return default_path

        return None

    def load(self, explicit_path: str | Path | None = None, overrides: Iterable[str] = ()) -> SimConfig:
        """
        Load the resolved configuration with 'key=value' overrides applied.

        Raises:
            FileNotFoundError: See get_config_path
            ConfigurationError: If the file or an override is invalid
        """
        path = self.get_config_path(explicit_path)
        if path is None:
            logger.info("No config file found, using reference defaults")
            return SimConfig.from_text("", overrides)
        logger.info(f"Loading configuration from {path}")
        return SimConfig.from_file(path, overrides)

    def get_output_dir(self) -> Path:
        """
        Get the default output directory from environment.

        Returns:
            POLYFLUX_OUT, or ./results under the project root
        """
        env_out = os.getenv("POLYFLUX_OUT")
        return Path(env_out).expanduser() if env_out else self.project_root / "results"

    def get_log_level(self) -> str:
        """
        Get log level from environment or use default.

        Returns:
            Level name such as 'INFO' or 'DEBUG'
        """
        return os.getenv("POLYFLUX_LOG_LEVEL", "INFO").upper()


def create_default_config_file(path: Path) -> bool:
    """
    Create a config file with every key at its default.

    Args:
        path: Target file, or a directory to place polyflux.cfg in

    Returns:
        True if the file was written, False if it already existed
    """
    if path.is_dir():
        path = path / DEFAULT_CONFIG_FILE

    if path.exists():
        logger.warning(f"Config file already exists at {path}")
        return False

    header = """# polyflux run configuration
# ==========================
#
# Every key is optional; an empty file runs the reference setup.
# Section headers are optional too, but a key placed under the wrong
# header is rejected. Override single keys on the command line with
#   polyflux run --set eta=6 --set splitting=lax_friedrichs

"""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(header + SimConfig().to_text(), encoding="utf-8")
    logger.info(f"Created default config file at {path}")
    return True
