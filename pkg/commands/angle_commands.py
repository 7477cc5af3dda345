"""
Angle Commands - Rational-multiple-of-pi classification
"""

import click
from flask import Blueprint, current_app

from commands import emit, handle_errors, parse_angle
from services.angle_classifier import classify_exact, degree_two_cosines
from services.documents import angle_class_document, degree_two_angles_document
from services.exact_scalar import QuadSurd

angle_bp = Blueprint('angle', __name__, cli_group=None)


@angle_bp.cli.command('classify-angle')
@click.option('--cos', 'cos_expr', help='Exact cosine, e.g. 1/2 or (-1/4 + 1/4*sqrt(5)).')
@click.option('--theta', callback=parse_angle, help='Angle literal, e.g. 0.75π, 3pi/4 or radians.')
@click.option('--q-max', type=int, default=None, help='Largest denominator tried numerically.')
@click.option('--tol', type=float, default=None, help='Numeric tolerance.')
@handle_errors
def classify_angle(cos_expr, theta, q_max, tol):
    """Classify an angle as a rational or irrational multiple of pi."""
    if (cos_expr is None) == (theta is None):
        raise click.UsageError('give exactly one of --cos and --theta')
    q_max = q_max if q_max is not None else current_app.config['Q_MAX']
    tol = tol if tol is not None else current_app.config['ANGLE_TOL']
    if cos_expr is not None:
        try:
            cosine = QuadSurd.parse(cos_expr)
        except ValueError as exc:
            raise click.BadParameter(str(exc), param_hint='--cos') from None
        emit(angle_class_document(classify_exact(cosine), f"cos={cos_expr}", q_max, tol))
        return
    emit(angle_class_document(theta.classify(q_max, tol), theta.text, q_max, tol))


@angle_bp.cli.command('degree-two-angles')
def degree_two_angles():
    """List the angles in [0, pi] whose cosine is a quadratic surd, with their product angles."""
    emit(degree_two_angles_document(degree_two_cosines()))
