"""
Run manifest parser.

Manifests are INI files with a [run] section of flat key = value entries.
Metadata records written after a run use the same keys, so a run can be
replayed from its metadata alone. Values resolve with the precedence
flags > manifest file > environment > defaults.
"""

import configparser
import logging
import os
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from als.errors import InvalidParameterError, ParseError
from als.models import Command, Method, RunManifest
from als.parser.base import InputParser

logger = logging.getLogger(__name__)

RUN_SECTION = 'run'

# Value of mu or iterations that selects the automatic policy
AUTO = 'auto'

# Environment variables consulted when neither a flag nor the manifest sets a key
ENVIRONMENT_KEYS = {
    'output_dir': 'ALS_OUTPUT_DIR',
    'seed': 'ALS_SEED',
    'workers': 'ALS_WORKERS',
}


def parse_dims(text: str) -> Tuple[Tuple[int, int], ...]:
    """Parse "100x1,100x10" into ((100, 1), (100, 10))."""
    dims = []
    for item in text.split(','):
        item = item.strip().lower()
        if not item:
            continue
        try:
            m_text, p_text = item.split('x')
            dims.append((int(m_text), int(p_text)))
        except ValueError:
            raise InvalidParameterError(f"Invalid dimension '{item}', expected MxP")
    if not dims:
        raise InvalidParameterError("Dimension list is empty")
    return tuple(dims)


def parse_methods(text: str) -> Tuple[Method, ...]:
    try:
        return tuple(Method(item.strip().lower()) for item in text.split(',') if item.strip())
    except ValueError as e:
        raise InvalidParameterError(f"Unknown method in '{text}': {e}")


def _optional_number(text: str, kind):
    if text.strip().lower() == AUTO:
        return AUTO
    return kind(text)


# Converters from raw strings to RunManifest field values
CONVERTERS = {
    'matrix_path': str,
    'vector_path': str,
    'truth_path': str,
    'methods': parse_methods,
    'mu': lambda text: _optional_number(text, float),
    'step_divisor': float,
    'iterations': lambda text: _optional_number(text, int),
    'iteration_policy': str,
    'seed': int,
    'output_dir': str,
    'full_scale': lambda text: text.strip().lower() in ('1', 'true', 'yes', 'full'),
    'dims': parse_dims,
    'noise_free': lambda text: text.strip().lower() in ('1', 'true', 'yes'),
    'sigma': float,
    'initial_scale': float,
    'workers': int,
}


class ManifestParser(InputParser):
    """Parser for INI run manifests."""

    valid_extensions = ('.ini', '.cfg', '.meta')

    def parse_file(self, file_path: Union[str, Path]) -> Dict[str, Any]:
        """Parse the [run] section of a manifest.

        Args:
            file_path: Path to the manifest

        Returns:
            Dictionary of typed RunManifest field values

        Raises:
            FileNotFoundError: If the file does not exist
            ParseError: If the file is not valid INI or a value is malformed
        """
        text = self.read_text(file_path)
        config = configparser.ConfigParser()
        try:
            config.read_string(text, source=str(file_path))
        except configparser.Error as e:
            raise ParseError(f"Invalid manifest: {e}", path=str(file_path))

        if not config.has_section(RUN_SECTION):
            raise ParseError(f"Manifest has no [{RUN_SECTION}] section", path=str(file_path))

        values = {}
        for key, raw in config.items(RUN_SECTION):
            if key == 'command':
                continue
            if key not in CONVERTERS:
                logger.warning(f"Ignoring unknown manifest key '{key}' in {file_path}")
                continue
            try:
                values[key] = CONVERTERS[key](raw)
            except (ValueError, InvalidParameterError) as e:
                raise ParseError(f"Invalid value for '{key}': {e}", path=str(file_path))
        return values


def environment_defaults(environ: Optional[Mapping[str, str]] = None) -> Dict[str, Any]:
    """Read manifest defaults from environment variables."""
    environ = os.environ if environ is None else environ
    values = {}
    for key, variable in ENVIRONMENT_KEYS.items():
        raw = environ.get(variable)
        if raw:
            try:
                values[key] = CONVERTERS[key](raw)
            except ValueError:
                raise InvalidParameterError(f"Invalid value for {variable}: {raw!r}")
    return values


def build_manifest(command: Command,
                   flag_values: Mapping[str, Any],
                   manifest_path: Optional[Union[str, Path]] = None,
                   environ: Optional[Mapping[str, str]] = None) -> RunManifest:
    """Resolve a RunManifest from flags, an optional manifest file and the environment.

    Flags whose value is None count as unset; an explicit AUTO for mu or
    iterations overrides lower layers with the automatic policy.
    """
    values: Dict[str, Any] = environment_defaults(environ)
    if manifest_path is not None:
        values.update(ManifestParser().parse_file(manifest_path))
    values.update({key: value for key, value in flag_values.items() if value is not None})
    for key in ('mu', 'iterations'):
        if values.get(key) == AUTO:
            values[key] = None
    return RunManifest(command=command, **values)


def manifest_entries(manifest: RunManifest) -> Dict[str, str]:
    """Render a manifest as flat [run] entries understood by ManifestParser."""
    entries = {
        'command': manifest.command.value,
        'methods': ','.join(method.value for method in manifest.selected_methods),
        'mu': AUTO if manifest.mu is None else format(manifest.mu, '.17g'),
        'step_divisor': format(manifest.step_divisor, '.17g'),
        'iterations': AUTO if manifest.iterations is None else str(manifest.iterations),
        'iteration_policy': manifest.iteration_policy,
        'seed': str(manifest.seed),
        'output_dir': manifest.output_dir,
        'full_scale': str(manifest.full_scale).lower(),
        'noise_free': str(manifest.noise_free).lower(),
        'sigma': format(manifest.sigma, '.17g'),
        'initial_scale': format(manifest.initial_scale, '.17g'),
        'workers': str(manifest.workers),
    }
    for key in ('matrix_path', 'vector_path', 'truth_path'):
        if getattr(manifest, key) is not None:
            entries[key] = str(getattr(manifest, key))
    if manifest.dims is not None:
        entries['dims'] = ','.join(f"{m}x{p}" for m, p in manifest.dims)
    return entries
