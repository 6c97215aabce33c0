"""
Input validation utilities
Validation for instance documents, atom names, model file paths and config values
"""
import re
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

ATOM_NAME_PATTERN = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*(\([A-Za-z0-9_]+(,[A-Za-z0-9_]+)*\))?$")
RESERVED_NAMES = frozenset({"true", "false", "B", "K", "W", "O"})

INSTANCE_KEYS = ["agents", "atoms", "gamma", "base", "valuation", "query"]

# a 2^26-state context already needs 8 MiB per extension bitset
MAX_ENUMERATION_CAP = 26


def validate_file_path(path: str, must_exist: bool = False, must_be_file: bool = False) -> Tuple[bool, Optional[str]]:
    """Validate a model or output file path

    Args:
        path: Path to validate
        must_exist: Path must exist
        must_be_file: Path must be a regular file

    Returns:
        Tuple of (is_valid, error_message)
    """
    if not path or not isinstance(path, str):
        return False, "Path must be a non-empty string"
    if "\x00" in path:
        return False, "Path contains a null byte"

    path_obj = Path(path).expanduser()
    if must_exist and not path_obj.exists():
        return False, f"Path does not exist: {path}"
    if must_be_file and not path_obj.is_file():
        return False, f"Path is not a file: {path}"
    return True, None


def validate_atom_name(name: Any) -> Tuple[bool, Optional[str]]:
    """Atom ids are identifiers with an optional argument list, e.g. vote(1,c2)"""
    if not isinstance(name, str):
        return False, f"Atom name must be a string, got {type(name).__name__}"
    if name in RESERVED_NAMES:
        return False, f"Atom name '{name}' is a reserved keyword"
    if not ATOM_NAME_PATTERN.match(name):
        return False, f"Invalid atom name: {name!r}"
    return True, None


def validate_json_structure(data: Any, expected_type: type, required_keys: Optional[List[str]] = None) -> Tuple[bool, Optional[str]]:
    """Validate JSON structure

    Args:
        data: Data to validate
        expected_type: Expected type (dict, list, etc.)
        required_keys: Required keys if dict

    Returns:
        Tuple of (is_valid, error_message)
    """
    if not isinstance(data, expected_type):
        return False, f"Expected {expected_type.__name__}, got {type(data).__name__}"

    if expected_type == dict and required_keys:
        for key in required_keys:
            if key not in data:
                return False, f"Missing required key: {key}"

    return True, None


def _validate_agent_map(field: str, value: Any) -> Tuple[bool, Optional[str]]:
    if not isinstance(value, dict):
        return False, f"'{field}' must map agent ids to lists of formula strings"
    for key, formulas in value.items():
        if not isinstance(key, str) or not key.isdigit():
            return False, f"'{field}' key {key!r} is not an agent id"
        if not isinstance(formulas, list) or not all(isinstance(f, str) for f in formulas):
            return False, f"'{field}[{key}]' must be a list of formula strings"
    return True, None


def validate_instance_document(data: Any) -> Tuple[bool, Optional[str]]:
    """Schema check of a decoded instance document

    Only shape and types are checked here; agent ranges, atom membership and
    B_i ⊆ Γ_i need the parsed formulas and are checked by the parser.

    Returns:
        Tuple of (is_valid, error_message)
    """
    ok, error = validate_json_structure(data, dict, INSTANCE_KEYS)
    if not ok:
        return ok, error

    agents = data["agents"]
    if not isinstance(agents, int) or isinstance(agents, bool) or agents < 1:
        return False, f"'agents' must be a positive integer, got {agents!r}"

    for field in ("atoms", "valuation"):
        if not isinstance(data[field], list):
            return False, f"'{field}' must be a list of atom names"
        for name in data[field]:
            ok, error = validate_atom_name(name)
            if not ok:
                return False, f"'{field}': {error}"
    if len(set(data["atoms"])) != len(data["atoms"]):
        return False, "'atoms' contains duplicates"

    for field in ("gamma", "base"):
        ok, error = _validate_agent_map(field, data[field])
        if not ok:
            return ok, error

    if not isinstance(data["query"], str) or not data["query"].strip():
        return False, "'query' must be a non-empty formula string"
    return True, None


def validate_config_value(key: str, value: Any) -> Tuple[bool, Optional[str]]:
    """Validate configuration value

    Args:
        key: Configuration key
        value: Configuration value

    Returns:
        Tuple of (is_valid, error_message)
    """
    validators: Dict[str, Any] = {
        "enumeration_cap": lambda v: isinstance(v, int) and not isinstance(v, bool) and 0 < v <= MAX_ENUMERATION_CAP,
        "timeout": lambda v: isinstance(v, (int, float)) and not isinstance(v, bool) and v > 0,
        "node_limit": lambda v: isinstance(v, int) and not isinstance(v, bool) and v > 2,
        "engine": lambda v: v in ("auto", "bdd", "enumerate"),
        "stats_format": lambda v: v in ("text", "json"),
        "bench_workers": lambda v: isinstance(v, int) and not isinstance(v, bool) and v >= 1,
        "log_file": lambda v: isinstance(v, str) and bool(v),
        "log_level": lambda v: v in ("DEBUG", "INFO", "WARNING", "ERROR"),
    }

    if key in validators:
        if not validators[key](value):
            return False, f"Invalid value for {key}: {value}"

    return True, None
