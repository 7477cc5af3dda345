"""
Check Commands - Universality verdict for a beamsplitter matrix file
"""

import click
from flask import Blueprint

from commands import config_option, emit, engine_settings, handle_errors, matrix_mode, matrix_mode_option, parse_angle
from datafiles import load_matrix_document
from services.documents import verdict_document
from services.universality_engine import check_device

check_bp = Blueprint('check', __name__, cli_group=None)


@check_bp.cli.command('check')
@click.argument('matrix', type=click.Path(exists=True, dir_okay=False))
@click.option('--modes', 'n_modes', type=int, required=True, help='Number of modes available.')
@matrix_mode_option
@click.option('--generator', is_flag=True, help='The file holds a skew generator A with O = exp(A).')
@click.option('--theta', callback=parse_angle, help='Rotation angle, e.g. 3π/4, 0.4pi or cos=1/3.')
@config_option
@handle_errors
def check(matrix, n_modes, exact, generator, theta, config_path):
    """
    Decide universality of the beamsplitter in MATRIX on --modes modes.
    Exit status: 0 Universal, 1 NotUniversal, 2 Inconclusive, 3 error.
    """
    settings = engine_settings(config_path)
    document = load_matrix_document(matrix)
    mode = matrix_mode(exact)
    value = document.to_generator(mode) if generator else document.to_rotation(mode)
    verdict = check_device(value, n_modes, settings, theta)
    emit(verdict_document(verdict, settings, matrix))
    click.get_current_context().exit(verdict.exit_code)
