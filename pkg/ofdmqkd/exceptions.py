import json
import logging
import traceback
from typing import Any, Dict

import click

LOG = logging.getLogger('ofdmqkd')


class BaseError(Exception):
    code = 1
    description = 'Unhandled exception'

    def __init__(self, message, code=None, errors=None):
        super().__init__(message)
        self.message = message
        if code is not None:
            self.code = code
        self.errors = errors


class ConfigError(BaseError):
    """The study config or a command-line option is malformed or out of range."""
    code = 2


class InvalidParameters(BaseError):
    """The parameters describe an unphysical state or a numeric evaluation failed."""
    code = 3


class NoThresholdCrossing(BaseError):
    """The key rate does not change sign inside the excess noise bracket."""
    code = 3

    def __init__(self, message, rate_at_low=None, rate_at_high=None):
        super().__init__(message, errors=[f'rate at bracket ends: {rate_at_low!r}, {rate_at_high!r}'])
        self.rate_at_low = rate_at_low
        self.rate_at_high = rate_at_high


class NoOptimum(BaseError):
    """Every carrier count in the search grid gives a zero key rate."""
    code = 3


class OutputError(BaseError):
    """Results could not be written."""
    code = 4


def error_payload(error: BaseError) -> Dict[str, Any]:
    return {
        'status': 'error',
        'message': error.message,
        'code': error.code,
        'errors': error.errors
    }


def handle_error(error: Exception) -> int:
    """Render a diagnostic on stderr and return the process exit code."""
    if isinstance(error, BaseError):
        if error.code >= 3:
            LOG.error(error.message)
        click.echo(json.dumps(error_payload(error)), err=True)
        return error.code

    if isinstance(error, click.ClickException):
        error.show()
        return error.exit_code

    LOG.exception(error)
    click.echo(json.dumps({
        'status': 'error',
        'message': 'An internal error has occurred!',
        'code': 1,
        'errors': traceback.format_exception_only(error.__class__, error)
    }), err=True)
    return 1
