"""Read and write generation configs as `key = value` text files."""

from pathlib import Path
from typing import Any, Dict, Union

import yaml

from ..simulation.scenario import ConfigError, GenerationConfig

__all__ = ['ConfigError', 'read_config', 'write_config', 'parse_config_text', 'format_config']


def _parse_value(raw: str, key: str, line_number: int) -> Any:
    """Parse a value as a YAML scalar so `0.2`, `1e-3` and `42` read naturally."""
    try:
        value = yaml.safe_load(raw)
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse value {raw!r}: {e}", key=key, line=line_number) from e
    if isinstance(value, str):
        # YAML 1.1 leaves exponent floats without a dot (1e-3) as strings
        try:
            value = float(value)
        except ValueError:
            pass
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {raw!r}", key=key, line=line_number)
    return value


def parse_config_text(text: str) -> GenerationConfig:
    """
    Parse config text; missing keys keep their defaults.

    Raises:
        ConfigError: syntax errors carry the line number, range errors the key
    """
    flat: Dict[str, Any] = {}
    lines_by_key: Dict[str, int] = {}
    known = set(GenerationConfig.flat_keys())

    for line_number, line in enumerate(text.splitlines(), start=1):
        content = line.split('#', 1)[0].strip()
        if not content:
            continue
        if '=' not in content:
            raise ConfigError(f"expected 'key = value', got {content!r}", line=line_number)
        key, raw = (part.strip() for part in content.split('=', 1))
        if not key:
            raise ConfigError("missing key before '='", line=line_number)
        if key not in known:
            raise ConfigError("unknown configuration key", key=key, line=line_number)
        if key in flat:
            raise ConfigError(
                f"duplicate key (first set on line {lines_by_key[key]})", key=key, line=line_number,
            )
        if not raw:
            raise ConfigError("missing value after '='", key=key, line=line_number)
        flat[key] = _parse_value(raw, key, line_number)
        lines_by_key[key] = line_number

    try:
        return GenerationConfig.from_flat(flat)
    except ConfigError as e:
        if e.key in lines_by_key and e.line is None:
            raise ConfigError(str(e).split(': ', 1)[-1], key=e.key, line=lines_by_key[e.key]) from e
        raise


def read_config(path: Union[str, Path]) -> GenerationConfig:
    """
    Load a config file.

    Raises:
        FileNotFoundError / OSError: the file cannot be read
        ConfigError: the content is invalid
    """
    return parse_config_text(Path(path).read_text(encoding='utf-8'))


def format_config(cfg: GenerationConfig) -> str:
    """Every key in fixed order; floats written with ``repr`` so they read back exactly."""
    lines = ["# Tailgate generation config (tool defaults for any key left out)"]
    for key, value in cfg.to_flat().items():
        lines.append(f"{key} = {value!r}")
    return "\n".join(lines) + "\n"


def write_config(cfg: GenerationConfig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_config(cfg), encoding='utf-8')
    return path
