"""Configuration Manager - Single Responsibility Principle"""
import copy
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

TRAINING_SECTIONS = ("training", "model", "losses", "augment", "data", "evaluation")


class ConfigManager:
    """
    Centralized configuration management.

    Loads configuration from a YAML file and environment variables, and
    applies ``key=value`` overrides from the command line.
    """

    def __init__(self, config_path: Optional[str] = None):
        """
        Initialize configuration manager.

        Args:
            config_path: YAML file to load (default: config/config.yaml)
        """
        self._config_path = Path(config_path) if config_path else self._find_config_dir() / "config.yaml"
        self._config: Dict[str, Any] = {}
        self._load_config()

    def _load_config(self):
        """Load configuration from file and environment"""
        load_dotenv()

        if not self._config_path.exists():
            raise FileNotFoundError(f"Configuration file not found: {self._config_path}")
        with open(self._config_path, 'r', encoding='utf-8') as f:
            self._config = yaml.safe_load(f) or {}

        # Override output root from environment if set
        env_out_dir = os.getenv('HPGAN_OUT_DIR')
        if env_out_dir:
            self.set("output.dir", env_out_dir)

    def _find_config_dir(self) -> Path:
        """Find the config directory"""
        current = Path(__file__).resolve()

        for parent in [current.parent.parent.parent, Path.cwd()]:
            config_dir = parent / "config"
            if config_dir.exists() and config_dir.is_dir():
                return config_dir

        return Path.cwd() / "config"

    def get(self, key_path: str, default: Any = None) -> Any:
        """
        Get configuration value using dot notation.

        Args:
            key_path: Dot-separated path (e.g., "training.batch_size")
            default: Default value if key not found

        Returns:
            Configuration value or default
        """
        value = self._config
        for key in key_path.split('.'):
            if isinstance(value, dict) and key in value:
                value = value[key]
            else:
                return default
        return value

    def set(self, key_path: str, value: Any):
        """
        Set configuration value using dot notation.

        Args:
            key_path: Dot-separated path
            value: Value to set
        """
        keys = key_path.split('.')
        config = self._config
        for key in keys[:-1]:
            if key not in config or not isinstance(config[key], dict):
                config[key] = {}
            config = config[key]
        config[keys[-1]] = value

    def find_section(self, key: str) -> Optional[str]:
        """Name of the section that declares ``key``, if any"""
        for section, values in self._config.items():
            if isinstance(values, dict) and key in values:
                return section
        return None

    def apply_override(self, assignment: str):
        """
        Apply one ``key=value`` override.

        The value is parsed as YAML, so numbers, booleans, null and lists
        keep their types. A bare key is resolved to the section declaring it.

        Args:
            assignment: Text such as "training.batch_size=8" or "batch_size=8"
        """
        if '=' not in assignment:
            raise ValueError(f"Override must look like key=value, got '{assignment}'")
        key, raw_value = assignment.split('=', 1)
        key = key.strip()
        if '.' not in key:
            section = self.find_section(key)
            if section is None:
                raise ValueError(f"Unknown configuration key '{key}'")
            key = f"{section}.{key}"
        self.set(key, yaml.safe_load(raw_value) if raw_value.strip() else None)

    def training_values(self) -> Dict[str, Any]:
        """Flatten the training-related sections into one mapping"""
        values: Dict[str, Any] = {}
        for section in TRAINING_SECTIONS:
            for key, value in (self._config.get(section) or {}).items():
                if key in values:
                    raise ValueError(f"Key '{key}' is declared in more than one section")
                values[key] = copy.deepcopy(value)
        return values

    def save_config(self, config_path: Optional[Path] = None):
        """
        Save current configuration to file.

        Args:
            config_path: Path to save to (default: original config file)
        """
        path = Path(config_path) if config_path else self._config_path
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            yaml.safe_dump(self._config, f, default_flow_style=False, allow_unicode=True, sort_keys=True)
