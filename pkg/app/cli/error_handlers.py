# app/cli/error_handlers.py
"""
Exit-code contract of the command line.

0 success, 1 verification failure, 2 usage, parse, validation or domain
error, 3 unexpected internal error. Errors are written to stderr as a
CommandResponse envelope; stdout only ever carries command output.
"""
import functools
from typing import Any, Callable, Dict, List, Optional

import click
from pydantic import ValidationError

from app.core.exceptions import ChannelToolkitError, InputParseError, ParameterRangeError
from app.core.logging_config import get_logger
from app.schemas.response import DataResponse, ErrorDetail

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


class VerificationFailed(Exception):
    """A suite or check found a counterexample; carries the response to print"""

    def __init__(self, response: DataResponse):
        self.response = response
        super().__init__("verification failed")


def create_validation_errors(validation_errors: List[Dict[str, Any]]) -> List[ErrorDetail]:
    """Error details for pydantic validation errors"""
    return [
        ErrorDetail(
            code="VALIDATION_ERROR",
            message=str(error.get("msg", "Validation failed")),
            field=".".join(str(loc) for loc in error.get("loc", [])) or None,
        )
        for error in validation_errors
    ]


def _emit(errors: List[ErrorDetail], command: str, seed: Optional[int]) -> None:
    click.echo(DataResponse.error(errors=errors, command=command, seed=seed).to_json(), err=True)


def error_details(exc: Exception) -> List[ErrorDetail]:
    """Error details for a toolkit or parse error"""
    if isinstance(exc, ValidationError):
        return create_validation_errors(exc.errors())
    if isinstance(exc, ParameterRangeError):
        return [ErrorDetail(code=exc.code, message=str(exc), field=exc.name)]
    if isinstance(exc, InputParseError):
        return [ErrorDetail(code=exc.code, message=str(exc), field=exc.source)]
    if isinstance(exc, ChannelToolkitError):
        return [ErrorDetail(code=exc.code, message=str(exc))]
    return [ErrorDetail(code="INVALID_INPUT", message=str(exc))]


def handle_command_errors(command: str) -> Callable:
    """
    Decorator mapping exceptions raised by a command body to exit codes.

    The wrapped function may read `seed` from its keyword arguments; it is
    echoed in the error envelope when present.
    """

    def decorator(func: Callable) -> Callable:
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            seed = kwargs.get("seed")
            try:
                return func(*args, **kwargs)
            except click.exceptions.Exit:
                raise
            except click.ClickException:
                raise
            except VerificationFailed as e:
                click.echo(e.response.to_json(), err=True)
                raise click.exceptions.Exit(EXIT_VERIFICATION_FAILED)
            except (ValidationError, ChannelToolkitError, ValueError) as e:
                logger.warning(
                    f"Command rejected: {str(e)}",
                    extra={"extra_fields": {"operation": command, "status": "rejected"}},
                )
                _emit(error_details(e), command, seed)
                raise click.exceptions.Exit(EXIT_USAGE)
            except OSError as e:
                logger.error(
                    f"I/O error: {str(e)}",
                    extra={"extra_fields": {"operation": command, "path": getattr(e, "filename", None), "status": "error"}},
                )
                _emit([ErrorDetail(code="IO_ERROR", message=str(e), field=str(e.filename) if e.filename else None)], command, seed)
                raise click.exceptions.Exit(EXIT_USAGE)
            except Exception as e:
                logger.error(f"Unhandled exception in {command}: {str(e)}", exc_info=True)
                _emit([ErrorDetail(code="INTERNAL_ERROR", message="An internal error occurred")], command, seed)
                raise click.exceptions.Exit(EXIT_INTERNAL)

        return wrapper

    return decorator
