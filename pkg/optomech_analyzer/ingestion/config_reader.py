"""
JSON configuration reader
Loads parameter, fit and simulation records from explicit JSON files
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from ..core import SystemParams, SchemaError, ParseError, get_preset


logger = logging.getLogger(__name__)


def read_json(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Read a JSON object from file

    Args:
        path: JSON file

    Returns:
        Parsed object

    Raises:
        FileNotFoundError: If the file doesn't exist
        ParseError: On malformed JSON, with its line number
        SchemaError: If the top level is not an object
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"File not found: {path}")

    try:
        with open(path, 'r', encoding='utf-8') as f:
            record = json.load(f)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: {e.msg}", line=e.lineno) from e

    if not isinstance(record, dict):
        raise SchemaError(f"{path}: top level must be a JSON object")
    return record


def load_params(path: Optional[Union[str, Path]] = None,
                preset: Optional[str] = None) -> SystemParams:
    """
    Load physical parameters from a JSON file or a named preset

    Exactly one of path and preset must be given.

    Raises:
        SchemaError: On a bad record, unknown preset or ambiguous source
    """
    if (path is None) == (preset is None):
        raise SchemaError("give exactly one of a parameter file or a preset name")
    if preset is not None:
        logger.debug("using preset %s", preset)
        return get_preset(preset)
    return SystemParams.from_hz(read_json(path))
