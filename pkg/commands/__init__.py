"""
Commands Package - Initialize all command blueprints and shared helpers
"""

import functools
import json
import os
from typing import List, Optional

import click
from flask import Config, current_app

from services.angles import AngleSpec
from services.errors import BeamsplitterError, DomainError
from services.settings import EngineSettings

# Exit status for library and parse errors; verdicts use 0, 1 and 2
ERROR_EXIT = 3


def engine_settings(config_path: Optional[str] = None) -> EngineSettings:
    """Settings from the application config, overlaid with a JSON file when given."""
    config = Config(current_app.root_path, current_app.config)
    if config_path:
        config.from_file(os.path.abspath(config_path), load=json.load)
    return EngineSettings.from_mapping(config)


def emit(document: dict) -> None:
    click.echo(current_app.json.dumps(document, indent=2))


def handle_errors(command):
    """Report library errors on stderr and exit with ERROR_EXIT."""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except BeamsplitterError as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            click.get_current_context().exit(ERROR_EXIT)
    return wrapper


def parse_angle(ctx, param, value) -> Optional[AngleSpec]:
    if value is None:
        return None
    try:
        return AngleSpec.parse(value)
    except DomainError as exc:
        raise click.BadParameter(str(exc)) from None


def parse_orders(ctx, param, value) -> Optional[List[Optional[int]]]:
    """'5,5' or '4,free': one order per generator, 'free' for infinite order."""
    if value is None:
        return None
    orders: List[Optional[int]] = []
    for item in value.split(','):
        item = item.strip().lower()
        if item in ('free', 'inf', '-'):
            orders.append(None)
        elif item.isdigit() and int(item) >= 1:
            orders.append(int(item))
        else:
            raise click.BadParameter(f"not an order: {item!r}")
    return orders


config_option = click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False),
                             help='JSON file overlaid on the configuration for this run.')

matrix_mode_option = click.option('--exact/--float', 'exact', default=None,
                                  help='Override the arithmetic mode declared in the matrix file.')


def matrix_mode(exact: Optional[bool]) -> Optional[str]:
    if exact is None:
        return None
    return 'exact' if exact else 'float'


from .check_commands import check_bp  # noqa: E402
from .angle_commands import angle_bp  # noqa: E402
from .algebra_commands import algebra_bp  # noqa: E402
from .word_commands import word_bp  # noqa: E402


def register_blueprints(app):
    """Register all command blueprints with the Flask app."""
    app.register_blueprint(check_bp)
    app.register_blueprint(angle_bp)
    app.register_blueprint(algebra_bp)
    app.register_blueprint(word_bp)
