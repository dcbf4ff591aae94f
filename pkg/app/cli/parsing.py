# app/cli/parsing.py
"""
Option parsing helpers for the command line: named or JSON input states,
shift states, and config files with positioned parse errors.
"""
import json
from pathlib import Path
from typing import Any, Dict, Union

import yaml

from app.core.exceptions import InputParseError
from app.schemas.channel import UnitaryLiteral
from app.schemas.run_config import load_config_document
from app.schemas.state import MaxEntangled, PureState4, StateLiteral
from app.services.state_service import NAMED_STATES, StateService

NAMED_SHIFTS = ("beta0", "singlet", "bell1", "bell3")


def _load_json(text: str, source: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputParseError(source, e.msg, line=e.lineno, column=e.colno)


def parse_state(text: str, states: StateService) -> PureState4:
    """
    Named state or JSON literal {"basis": ..., "amplitudes": [[re, im] x 4]}.

    Literals are normalized only within tolerance; an unnormalized literal
    is rejected by PureState4.

    Raises:
        InputParseError: On malformed JSON, with line and column
        ValidationError: On a well-formed literal of the wrong shape
    """
    key = text.strip().lower()
    if key in NAMED_STATES:
        return states.named_state(key)
    literal = StateLiteral.model_validate(_load_json(text, "--input"))
    return states.from_literal(literal)


def parse_beta(text: str, states: StateService) -> MaxEntangled:
    """Shift state by name or as {"unitary": [[[re, im], [re, im]], [[re, im], [re, im]]]}"""
    key = text.strip().lower()
    if key in NAMED_SHIFTS:
        return states.named_shift(key)
    literal = UnitaryLiteral.model_validate(_load_json(text, "--beta"))
    return MaxEntangled(u=literal.as_array())


def read_config(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Load a config file, mapping decoder errors to InputParseError.

    Raises:
        InputParseError: On malformed JSON or YAML, with line and column
        OSError: If the file cannot be read
    """
    try:
        return load_config_document(path)
    except json.JSONDecodeError as e:
        raise InputParseError(str(path), e.msg, line=e.lineno, column=e.colno)
    except yaml.MarkedYAMLError as e:
        mark = e.problem_mark
        raise InputParseError(
            str(path),
            e.problem or "invalid YAML",
            line=mark.line + 1 if mark else None,
            column=mark.column + 1 if mark else None,
        )
    except yaml.YAMLError as e:
        raise InputParseError(str(path), str(e))

