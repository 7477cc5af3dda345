"""
Algebra Commands - Permutation orbits, Lie closures, product generating sets
and the trivial-action experiment
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
)
from datafiles import load_matrix_document
from services.documents import closure_document, conjecture_document, generating_set_document, orbit_document
from services.errors import BranchError
from services.lie_closure import build_generating_set, closure, generating_set_basis_matrix
from services.perm_orbit import all_embeddings, orbit
from services.universality_engine import conjecture_experiment

algebra_bp = Blueprint('algebra', __name__, cli_group=None)


@algebra_bp.cli.command('orbit')
@click.argument('matrix', type=click.Path(exists=True, dir_okay=False))
@matrix_mode_option
@config_option
@handle_errors
def orbit_command(matrix, exact, config_path):
    """Conjugates of the rotation in MATRIX under all mode permutations."""
    settings = engine_settings(config_path)
    rotation = load_matrix_document(matrix).to_rotation(matrix_mode(exact))
    emit(orbit_document(orbit(rotation, settings.dedup_tol, settings.orbit_max_modes), settings, matrix))


@algebra_bp.cli.command('closure')
@click.argument('matrices', nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option('--modes', 'n_modes', type=int, default=None,
              help='Embed every generator through every mode subset of this size first.')
@matrix_mode_option
@config_option
@handle_errors
def closure_command(matrices, n_modes, exact, config_path):
    """Lie algebra generated by the skew generators in MATRICES."""
    settings = engine_settings(config_path)
    generators = [load_matrix_document(path).to_generator(matrix_mode(exact)) for path in matrices]
    if n_modes is not None:
        generators = [e for g in generators for e in all_embeddings(g, n_modes)]
    span = closure(generators, settings.rank_tol)
    emit(closure_document(span, len(generators), settings, matrices))


@algebra_bp.cli.command('genset')
@click.option('--modes', 'n_modes', type=int, required=True)
@click.option('--theta', callback=parse_angle, required=True, help='Beamsplitter angle, e.g. 0.4π.')
@handle_errors
def genset(n_modes, theta):
    """The product generating set S^(N) of the two-mode beamsplitter O(theta)."""
    products = build_generating_set(n_modes, theta.radians)
    try:
        report = generating_set_basis_matrix(n_modes, theta.radians, principal=False)
    except BranchError:
        # a product is a half turn; its logarithm has no unique coordinates
        report = None
    emit(generating_set_document(n_modes, theta.text, theta.radians, products, report))


@algebra_bp.cli.command('conjecture')
@click.option('--k', 'k', type=int, required=True, help='Number of modes.')
@config_option
@handle_errors
def conjecture(k, config_path):
    """Closure of the trivial-action embeddings in so(k) against dim so(k-1)."""
    settings = engine_settings(config_path)
    emit(conjecture_document(conjecture_experiment(k, settings), settings))
