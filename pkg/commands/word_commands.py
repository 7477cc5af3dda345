"""
Word Commands - Covering-radius estimates and identity-word searches
"""

import click
from flask import Blueprint

from commands import (
    config_option,
    emit,
    engine_settings,
    handle_errors,
    matrix_mode,
    matrix_mode_option,
    parse_angle,
    parse_orders,
)
from datafiles import load_matrix_document
from services.documents import coverage_document, identity_search_document
from services.word_explorer import beamsplitter_generators, covering_estimate, identity_word_search

word_bp = Blueprint('word', __name__, cli_group=None)


def _generators(matrices, theta, n_modes, exact):
    if matrices and theta is not None:
        raise click.UsageError('give matrix files or --theta, not both')
    if theta is not None:
        if n_modes is None:
            raise click.UsageError('--theta needs --modes')
        generators = beamsplitter_generators(n_modes, theta.radians, theta.cos_exact, theta.sin_exact)
        return generators, [f"O{k}{l}({theta.text})" for k in range(1, n_modes + 1)
                            for l in range(k + 1, n_modes + 1)]
    if not matrices:
        raise click.UsageError('give matrix files or --theta')
    return [load_matrix_document(path).to_rotation(matrix_mode(exact)) for path in matrices], list(matrices)


@word_bp.cli.command('density')
@click.argument('matrices', nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.option('--theta', callback=parse_angle, help='Use the beamsplitter O(theta) on every pair of modes.')
@click.option('--modes', 'n_modes', type=int, default=None)
@click.option('--max-len', type=int, required=True, help='Longest word, in syllables.')
@click.option('--samples', type=int, default=1000, show_default=True)
@click.option('--seed', type=int, required=True)
@click.option('--orders', callback=parse_orders, help='Declared generator orders, e.g. 5,5 or 4,free.')
@click.option('--max-exponent', type=int, default=1, show_default=True)
@matrix_mode_option
@config_option
@handle_errors
def density(matrices, theta, n_modes, max_len, samples, seed, orders, max_exponent, exact, config_path):
    """Covering radius of short words over seeded Haar samples."""
    settings = engine_settings(config_path)
    generators, names = _generators(matrices, theta, n_modes, exact)
    report = covering_estimate(generators, max_len, samples, seed, orders, max_exponent, settings.word_budget)
    emit(coverage_document(report, settings, names))


@word_bp.cli.command('search-identity')
@click.argument('matrices', nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.option('--theta', callback=parse_angle, help='Use the beamsplitter O(theta) on every pair of modes.')
@click.option('--modes', 'n_modes', type=int, default=None)
@click.option('--max-len', type=int, required=True, help='Longest word, in syllables.')
@click.option('--orders', callback=parse_orders, help='Declared generator orders, e.g. 5,5.')
@click.option('--max-exponent', type=int, default=None, help='Exponent bound for free generators.')
@click.option('--tol', type=float, default=None, help='Identity tolerance in float arithmetic.')
@matrix_mode_option
@config_option
@handle_errors
def search_identity(matrices, theta, n_modes, max_len, orders, max_exponent, tol, exact, config_path):
    """First reduced word of length <= --max-len equal to the identity."""
    settings = engine_settings(config_path)
    generators, names = _generators(matrices, theta, n_modes, exact)
    tol = tol if tol is not None else settings.identity_tol
    word = identity_word_search(generators, max_len, tol, orders, max_exponent, settings.word_budget)
    emit(identity_search_document(word, max_len, tol, orders, settings, names))
