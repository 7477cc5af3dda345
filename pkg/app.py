"""
Main entry point for the beamsplitter universality tool.

This module provides the application factory that builds the configured
Flask app and the `beamsplit` command group. Commands are organized in
separate blueprint modules in the commands package.
"""

import json
import logging
import os
import sys
from fractions import Fraction

import click
import numpy as np
from flask import Flask
from flask.cli import FlaskGroup
from flask.json.provider import DefaultJSONProvider

from commands import ERROR_EXIT, register_blueprints
from services import __version__
from services.errors import BeamsplitterError
from services.exact_scalar import QuadSurd

CONFIG_ENV_VAR = 'BEAMSPLIT_CONFIG'
USAGE_EXIT = 4
VERBOSE_KEY = 'beamsplit.verbose'
LOG_FORMAT = '%(levelname)s %(name)s: %(message)s'


class DocumentJSONProvider(DefaultJSONProvider):
    """JSON output with sorted keys that also understands numpy and exact scalars."""

    sort_keys = True

    @staticmethod
    def default(o):
        if isinstance(o, np.generic):
            return o.item()
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, (Fraction, QuadSurd)):
            return str(o)
        return DefaultJSONProvider.default(o)


def _configure_logging(app):
    level = app.config['LOG_LEVEL']
    ctx = click.get_current_context(silent=True)
    if ctx is not None and ctx.meta.get(VERBOSE_KEY):
        level = 'DEBUG'
    logger = logging.getLogger('services')
    logger.setLevel(level)
    if not any(getattr(h, '_beamsplit', False) for h in logger.handlers):
        # logs go to stderr so stdout carries only the JSON document
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._beamsplit = True
        logger.addHandler(handler)


def create_app(test_config=None):
    """
    Application factory function to create and configure the Flask app.

    Args:
        test_config: mapping applied last, over the defaults and the
            JSON file named by BEAMSPLIT_CONFIG

    Returns:
        Flask: Configured Flask application instance
    """
    app = Flask(__name__)
    app.config.from_object('config.DefaultConfig')

    # Environment variable selects a config file only, never single values
    config_path = os.environ.get(CONFIG_ENV_VAR)
    if config_path:
        app.config.from_file(os.path.abspath(config_path), load=json.load, silent=True)

    if test_config is not None:
        app.config.from_mapping(test_config)

    app.json = DocumentJSONProvider(app)
    _configure_logging(app)

    # Register all command blueprints
    register_blueprints(app)

    return app


def _set_verbose(ctx, param, value):
    if value:
        ctx.meta[VERBOSE_KEY] = True


cli = FlaskGroup(
    name='beamsplit',
    help='Decide universality of real beamsplitters and explore the groups they generate.',
    create_app=create_app,
    add_default_commands=False,
    add_version_option=False,
    load_dotenv=False,
    set_debug_flag=False,
    params=[click.Option(['--verbose', '-v'], is_flag=True, expose_value=False, is_eager=True,
                         callback=_set_verbose, help='Log decisions at DEBUG level on stderr.')],
)
cli = click.version_option(__version__, prog_name='beamsplit')(cli)


def main(argv=None):
    """
    Run the command group and map outcomes to exit codes.

    Returns:
        int: 0/1/2 for verdicts, 3 for library errors, 4 for usage errors
    """
    try:
        result = cli.main(args=argv, prog_name='beamsplit', standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return USAGE_EXIT
    except click.exceptions.Abort:
        click.echo('Aborted!', err=True)
        return USAGE_EXIT
    except BeamsplitterError as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        return ERROR_EXIT
    return result if isinstance(result, int) else 0


if __name__ == '__main__':
    sys.exit(main())
