"""
Configuration loader for the pose uncertainty library
"""
import json
import os
import re
import yaml
from pathlib import Path
from typing import Any, Dict, Optional
from dotenv import load_dotenv

from src.utils.logger import get_logger

logger = get_logger(__name__)

_ENV_PATTERN = re.compile(r"^\$\{([^}:]+)(?::([^}]*))?\}$")


class ConfigLoader:
    """Configuration loader with environment variable support"""

    def __init__(self, config_path: Optional[str] = None):
        """
        Initialize configuration loader

        Args:
            config_path: YAML or JSON configuration file; defaults to $SLUE_CONFIG
                or config/config.yaml
        """
        self.config_path = Path(config_path or os.getenv("SLUE_CONFIG", "config/config.yaml"))
        self.config: Dict[str, Any] = {}

        load_dotenv()
        self._load_config()

    def _load_config(self):
        """Load configuration from file"""
        try:
            if not self.config_path.exists():
                logger.warning(f"Config file not found: {self.config_path}")
                return

            with open(self.config_path, 'r') as f:
                if self.config_path.suffix.lower() == ".json":
                    raw_config = json.load(f)
                else:
                    raw_config = yaml.safe_load(f)

            self.config = self._replace_env_vars(raw_config or {})

            logger.debug(f"Configuration loaded from {self.config_path}")
        except Exception as e:
            logger.error(f"Error loading configuration: {e}")
            raise

    def _replace_env_vars(self, config: Any) -> Any:
        """
        Recursively replace ${VAR} and ${VAR:default} strings

        Args:
            config: Configuration object (dict, list, or scalar)

        Returns:
            Configuration with environment variables replaced
        """
        if isinstance(config, dict):
            return {k: self._replace_env_vars(v) for k, v in config.items()}
        if isinstance(config, list):
            return [self._replace_env_vars(item) for item in config]
        if isinstance(config, str):
            match = _ENV_PATTERN.match(config)
            if match:
                var_name, default = match.group(1), match.group(2)
                return os.getenv(var_name, default if default is not None else config)
        return config

    def merge(self, overrides: Dict[str, Any]):
        """Deep-merge a mapping of overrides into the loaded configuration"""
        def _merge(base: Dict[str, Any], extra: Dict[str, Any]):
            for key, value in extra.items():
                if isinstance(value, dict) and isinstance(base.get(key), dict):
                    _merge(base[key], value)
                else:
                    base[key] = value

        _merge(self.config, self._replace_env_vars(overrides))

    def get(self, key_path: str, default: Any = None) -> Any:
        """
        Get configuration value by dot-separated key path

        Args:
            key_path: Dot-separated key path (e.g., 'solver.name')
            default: Default value if key not found

        Returns:
            Configuration value
        """
        value = self.config
        for key in key_path.split('.'):
            if isinstance(value, dict) and key in value:
                value = value[key]
            else:
                return default
        return value

    def get_float(self, key_path: str, default: float) -> float:
        """Get a numeric value, falling back to the default on bad input"""
        try:
            return float(self.get(key_path, default))
        except (TypeError, ValueError):
            logger.warning(f"Invalid numeric config value for {key_path}, using {default}")
            return default

    def get_int(self, key_path: str, default: int) -> int:
        try:
            return int(self.get(key_path, default))
        except (TypeError, ValueError):
            logger.warning(f"Invalid integer config value for {key_path}, using {default}")
            return default

    def get_bool(self, key_path: str, default: bool) -> bool:
        value = self.get(key_path, default)
        if isinstance(value, str):
            return value.strip().lower() in ("1", "true", "yes", "on")
        return bool(value)

    def get_solver_config(self) -> Dict[str, Any]:
        """Get conic solver configuration"""
        return self.get('solver', {})

    def get_constraint_config(self) -> Dict[str, Any]:
        return self.get('constraints', {})

    def get_conformal_config(self) -> Dict[str, Any]:
        return self.get('conformal', {})

    def get_projection_config(self) -> Dict[str, Any]:
        return self.get('projection', {})

    def get_pnp_config(self) -> Dict[str, Any]:
        return self.get('pnp', {})

    def get_harness_config(self) -> Dict[str, Any]:
        """Get synthetic scene and evaluation configuration"""
        return self.get('harness', {})

    def reload(self, config_path: Optional[str] = None):
        """Reload configuration, optionally from a different file"""
        if config_path:
            self.config_path = Path(config_path)
        self.config = {}
        self._load_config()
        logger.info(f"Configuration reloaded from {self.config_path}")


# Global configuration instance
config = ConfigLoader()


def get_config() -> ConfigLoader:
    """
    Get global configuration instance

    Returns:
        Configuration loader instance
    """
    return config
