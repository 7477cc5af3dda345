"""
Universality Engine Module - Decide whether a real beamsplitter, applied to
any choice of modes, generates a dense subgroup of SO(N).

Verdicts are Universal, NotUniversal or Inconclusive. Every verdict carries
an ordered certificate of replayable steps (see services.certificates).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations, permutations
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from services.angle_classifier import (
    AngleClass,
    classify_exact,
    classify_numeric,
    dense_in_one_param,
    rotation_order,
)
from services.angles import AngleSpec
from services.certificates import (
    CertificateStep,
    matrix_from_payload,
    matrix_payload,
    register_replayer,
)
from services.errors import (
    BranchError,
    DimensionError,
    DomainError,
    NormalizationError,
    PreconditionError,
    SizeError,
)
from services.exact_scalar import QuadSurd
from services.lie_closure import (
    LieSpan,
    bch_determinant_factor,
    bracket_determinant,
    closure,
    generating_set_basis_matrix,
    identify_so3_xyz,
    is_abelian,
    is_full,
    is_semisimple,
    p_block_determinant,
)
from services.matrices import (
    RotationMatrix,
    SkewMatrix,
    algebra_dimension,
    standard_basis,
)
from services.perm_orbit import (
    ModePermutation,
    all_embeddings,
    coefficient_vector,
    is_trivial_action,
    orbit,
    trivial_action_generators,
)
from services.settings import EngineSettings
from services.so3_kernel import (
    AxisAngle,
    axis_angle,
    exp_skew,
    log_rotation,
    product_angle,
    product_angle_cosine,
)

logger = logging.getLogger(__name__)

# theta in {0, pi/2, pi, 3pi/2}: the beamsplitter permutes modes up to signs
EXCLUDED_FRACTIONS = {(0, 1), (1, 2), (1, 1), (3, 2)}
FACTOR_TOL = 1e-12


class VerdictKind(str, Enum):
    UNIVERSAL = "Universal"
    NOT_UNIVERSAL = "NotUniversal"
    INCONCLUSIVE = "Inconclusive"


EXIT_CODES = {
    VerdictKind.UNIVERSAL: 0,
    VerdictKind.NOT_UNIVERSAL: 1,
    VerdictKind.INCONCLUSIVE: 2,
}


@dataclass(frozen=True)
class UniversalityVerdict:
    """
    Outcome of a universality check.

    ``reason`` names the identified subgroup or excluded angle for
    NotUniversal, the blocking hypothesis for Inconclusive and the proof path
    for Universal.
    """

    kind: VerdictKind
    modes_available: int
    reason: str
    certificate: Tuple[CertificateStep, ...] = field(default=())
    closure_dim: Optional[int] = None

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.kind]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "modes_available": self.modes_available,
            "reason": self.reason,
            "closure_dim": self.closure_dim,
            "certificate": [step.to_dict() for step in self.certificate],
        }


@dataclass(frozen=True, eq=False)
class CrsContext:
    """Two finite-order rotations of SO(3) and the angle between their axes."""

    rot1: AxisAngle
    rot2: AxisAngle
    separation_alpha: float
    separation_cos: Optional[QuadSurd]
    orders: Tuple[Optional[int], Optional[int]]
    separation_class: AngleClass


@dataclass(frozen=True)
class CrsResult:
    dense: bool
    exception: Optional[str]
    certificate: str


@dataclass(frozen=True)
class ConjectureReport:
    k: int
    dim: int
    expected: int
    matches: bool
    generators: int


def _verdict(kind: VerdictKind, n_modes: int, reason: str, steps: List[CertificateStep],
             closure_dim: Optional[int] = None) -> UniversalityVerdict:
    logger.debug("verdict %s on %d modes: %s", kind.value, n_modes, reason)
    return UniversalityVerdict(kind, n_modes, reason, tuple(steps), closure_dim)


def _class_outputs(angle_class: AngleClass) -> dict:
    data = angle_class.to_dict()
    data.pop("certificate")
    return data


def _classification_step(spec: AngleSpec, angle_class: AngleClass, settings: EngineSettings) -> CertificateStep:
    if spec.rational is not None:
        p, q = spec.rational
        return CertificateStep("rational_angle", {"p": p, "q": q}, _class_outputs(angle_class))
    if spec.cos_exact is not None:
        return CertificateStep("classify_exact", {"cos": str(spec.cos_exact)}, _class_outputs(angle_class))
    return CertificateStep("classify_numeric", {"theta": spec.radians, "q_max": settings.q_max,
                                                "tol": settings.angle_tol}, _class_outputs(angle_class))


def _closure_step(name: str, modes: int, generators: Sequence[SkewMatrix], embed: bool,
                  outputs: dict, settings: EngineSettings) -> CertificateStep:
    return CertificateStep(name, {"modes": modes, "embed": embed, "rank_tol": settings.rank_tol,
                                  "generators": [matrix_payload(g) for g in generators]}, outputs)


def _embedded(generators: Sequence[SkewMatrix], n_modes: int) -> List[SkewMatrix]:
    if not generators or generators[0].dimension == n_modes:
        return list(generators)
    return [e for g in generators for e in all_embeddings(g, n_modes)]


def is_excluded(angle_class: AngleClass) -> bool:
    return angle_class.is_rational and (angle_class.p, angle_class.q) in EXCLUDED_FRACTIONS


def product_has_infinite_order(order1: Optional[int], order2: Optional[int]) -> bool:
    """
    Whether the product of two finite-order rotations about orthogonal axes
    has infinite order: it does unless one is the identity, one is a half
    turn, or both orders divide four.
    """
    if order1 is None or order2 is None:
        raise PreconditionError("both rotations must have finite order")
    if 1 in (order1, order2) or 2 in (order1, order2):
        return False
    return not (4 % order1 == 0 and 4 % order2 == 0)


def crs_dense(ctx: CrsContext) -> CrsResult:
    """
    Density of the group generated by two finite-order rotations whose axes
    are separated by a rational multiple of pi, with the three classical
    exceptions and the coaxial case.
    """
    order1, order2 = ctx.orders
    if order1 is None or order2 is None:
        raise PreconditionError("crs_dense needs rotations of finite order")
    if not ctx.separation_class.is_rational:
        raise PreconditionError("crs_dense needs an axis separation that is a rational multiple of pi")
    alpha = Fraction(ctx.separation_class.p, ctx.separation_class.q)
    if order1 == 1 or order2 == 1:
        return CrsResult(False, "a", "one rotation is the identity")
    if alpha in (0, 1):
        return CrsResult(False, "coaxial", "the rotations share an axis")
    if (order1 == 2 or order2 == 2) and alpha == Fraction(1, 2):
        return CrsResult(False, "b", "a half turn about an orthogonal axis")
    if 4 % order1 == 0 and 4 % order2 == 0:
        return CrsResult(False, "c", "both rotations have order dividing four")
    return CrsResult(True, None, f"orders {order1}, {order2} with separation {alpha}π generate a dense subgroup")


def geodetic_supports_relations(sin_sq_alpha: Union[Fraction, str], table: Optional[Iterable[Fraction]] = None,
                                table_path: Optional[str] = None) -> bool:
    """Whether sin^2(alpha) is listed as a geodetic value that admits relations."""
    value = Fraction(sin_sq_alpha)
    if not 0 <= value <= 1:
        raise DomainError(f"sin^2 must lie in [0, 1], got {value}")
    if table is None:
        from datafiles import DEFAULT_GEODETIC_TABLE, load_geodetic_table

        table = load_geodetic_table(table_path or DEFAULT_GEODETIC_TABLE)
    return value in set(table)


def _rotation_class(R: RotationMatrix, settings: EngineSettings) -> AngleClass:
    if R.exact is not None and R.dimension == 3:
        trace = R.exact[0, 0] + R.exact[1, 1] + R.exact[2, 2]
        return classify_exact((trace - 1) / 2)
    return classify_numeric(axis_angle(R).angle, settings.q_max, settings.angle_tol)


def crs_context(R1: RotationMatrix, R2: RotationMatrix,
                generators: Optional[Tuple[SkewMatrix, SkewMatrix]] = None,
                angle_classes: Optional[Tuple[AngleClass, AngleClass]] = None,
                settings: Optional[EngineSettings] = None) -> CrsContext:
    """
    Axes, angles, orders and axis separation of two SO(3) rotations. With
    exact generators the separation cosine <A, B>/(|A||B|) is kept exactly.
    """
    settings = settings or EngineSettings()
    rot1, rot2 = axis_angle(R1), axis_angle(R2)
    classes = angle_classes or (_rotation_class(R1, settings), _rotation_class(R2, settings))
    orders = (rotation_order(classes[0]), rotation_order(classes[1]))
    cos_exact = None
    if generators is not None:
        A, B = generators
        inner = A.exact_inner(B)
        norms = None
        if inner is not None:
            product = A.exact_inner(A) * B.exact_inner(B)
            norms = product.sqrt()
        if inner is not None and norms is not None:
            try:
                cos_exact = inner / norms
            except (DomainError, ZeroDivisionError):
                cos_exact = None
    if cos_exact is not None:
        alpha = math.acos(max(-1.0, min(1.0, float(cos_exact))))
        separation_class = classify_exact(cos_exact)
    else:
        value = float(np.dot(rot1.signed_axis(), rot2.signed_axis()))
        if generators is not None:
            A, B = generators
            value = A.inner(B) / (A.norm() * B.norm())
        alpha = math.acos(max(-1.0, min(1.0, value)))
        separation_class = classify_numeric(alpha, settings.q_max, settings.angle_tol)
    return CrsContext(rot1, rot2, alpha, cos_exact, orders, separation_class)


def trivial_axes_separation() -> Tuple[Fraction, Fraction]:
    """
    Exact cos(alpha) between the axes of the trivial-action rotations on
    modes (1,2,3) and (2,3,4), and the resulting sin^2(alpha).
    """
    generators = trivial_action_generators(4)
    a, b = generators[(0, 1, 2)], generators[(1, 2, 3)]
    cos_alpha = a.exact_inner(b) / a.exact_inner(a)
    cos_value = Fraction(cos_alpha.a)
    return cos_value, 1 - cos_value * cos_value


# -- two modes ---------------------------------------------------------------


def _as_angle(theta: Union[AngleSpec, float, str]) -> AngleSpec:
    if isinstance(theta, AngleSpec):
        return theta
    if isinstance(theta, str):
        return AngleSpec.parse(theta)
    return AngleSpec.from_radians(float(theta))


def check_two_mode(theta: Union[AngleSpec, float, str], n_modes: int,
                   settings: Optional[EngineSettings] = None) -> UniversalityVerdict:
    """
    Universality of the 2-mode beamsplitter O(theta) on n_modes modes.

    Irrational angles certify through the closure of the one-parameter
    subgroups exp(t E_kl); rational angles through the product generating
    set S^(N), whose elements have infinite order and whose logarithms have
    a nonvanishing change-of-basis determinant.
    """
    settings = settings or EngineSettings()
    spec = _as_angle(theta)
    if n_modes < 2:
        raise DomainError(f"need at least 2 modes, got {n_modes}")
    angle_class = spec.classify(settings.q_max, settings.angle_tol)
    steps = [_classification_step(spec, angle_class, settings)]
    if is_excluded(angle_class):
        steps.append(CertificateStep("excluded_angle", {"p": angle_class.p, "q": angle_class.q},
                                     {"excluded": True}))
        return _verdict(VerdictKind.NOT_UNIVERSAL, n_modes,
                        f"excluded angle {angle_class.p}π/{angle_class.q}: the beamsplitter permutes modes",
                        steps)
    if n_modes == 2:
        if angle_class.is_irrational:
            return _verdict(VerdictKind.UNIVERSAL, 2, "irrational angle: powers are dense in SO(2)", steps, 1)
        if angle_class.is_rational:
            return _verdict(VerdictKind.NOT_UNIVERSAL, 2,
                            f"rational angle generates a finite cyclic group of order {rotation_order(angle_class)}",
                            steps, 1)
        return _verdict(VerdictKind.INCONCLUSIVE, 2, "angle not certified rational or irrational", steps)
    if angle_class.is_irrational:
        span = closure(standard_basis(n_modes), settings.rank_tol)
        steps.append(CertificateStep("standard_generators_closure", {"modes": n_modes}, {"dim": span.dim}))
        if is_full(span):
            return _verdict(VerdictKind.UNIVERSAL, n_modes,
                            "irrational angle: one-parameter subgroups exp(t E_kl) generate so(N)", steps, span.dim)
        return _verdict(VerdictKind.INCONCLUSIVE, n_modes, "closure of the planar generators is not full",
                        steps, span.dim)
    if angle_class.is_rational:
        return _two_mode_rational(spec, angle_class, n_modes, settings, steps)
    return _verdict(VerdictKind.INCONCLUSIVE, n_modes,
                    "angle not certified as a rational or irrational multiple of pi", steps)


def _two_mode_rational(spec: AngleSpec, angle_class: AngleClass, n_modes: int,
                       settings: EngineSettings, steps: List[CertificateStep]) -> UniversalityVerdict:
    theta = angle_class.radians
    order = rotation_order(angle_class)
    infinite = product_has_infinite_order(order, order)
    steps.append(CertificateStep("product_has_infinite_order", {"orders": [order, order]}, {"infinite": infinite}))
    if spec.cos_exact is not None:
        product_class = classify_exact(product_angle_cosine(spec.cos_exact))
        steps.append(CertificateStep("product_angle_class", {"cos_theta": str(spec.cos_exact)},
                                     _class_outputs(product_class)))
    else:
        product_class = classify_numeric(product_angle(theta), settings.q_max, settings.angle_tol)
        steps.append(CertificateStep("classify_numeric", {"theta": product_angle(theta), "q_max": settings.q_max,
                                                          "tol": settings.angle_tol}, _class_outputs(product_class)))
    if not infinite or product_class.is_rational:
        return _verdict(VerdictKind.INCONCLUSIVE, n_modes,
                        "product O12 O23 not certified to have infinite order", steps)
    factor = bch_determinant_factor(theta)
    steps.append(CertificateStep("bch_determinant_factor", {"theta": theta}, {"value": factor}, 1e-12))
    blocks = []
    for size in range(4, n_modes + 1):
        value = p_block_determinant(size, theta)
        blocks.append(value)
        steps.append(CertificateStep("p_block_determinant", {"modes": size, "theta": theta}, {"value": value}, 1e-12))
    report = generating_set_basis_matrix(n_modes, theta, principal=False)
    steps.append(CertificateStep("generating_set_determinant", {"modes": n_modes, "theta": theta},
                                 {"determinant": report.determinant, "closed_form": report.closed_form}, 1e-8))
    if abs(factor) <= FACTOR_TOL or any(abs(v) <= FACTOR_TOL for v in blocks):
        return _verdict(VerdictKind.INCONCLUSIVE, n_modes,
                        "logarithms of S^(N) are linearly dependent at this angle", steps)
    return _verdict(VerdictKind.UNIVERSAL, n_modes,
                    "rational angle: S^(N) products have infinite order and their logarithms span so(N)",
                    steps, algebra_dimension(n_modes))


# -- three modes -------------------------------------------------------------


def _nonzero_count(A: SkewMatrix, settings: EngineSettings) -> int:
    exact = A.exact_coordinates()
    if exact is not None:
        return sum(1 for x in exact if x)
    v = coefficient_vector(A)
    return int(np.sum(np.abs(v) > settings.direction_tol * np.linalg.norm(v)))


# transpositions to try, by number of nonzero coefficients
_CANDIDATE_SWAPS = {
    1: [(2, 1, 0), (0, 2, 1)],
    2: [(2, 1, 0), (1, 0, 2), (0, 2, 1)],
    3: [(1, 0, 2), (0, 2, 1), (2, 1, 0)],
}


def _trivial_three_mode(A: SkewMatrix, n_modes: int, settings: EngineSettings,
                        steps: List[CertificateStep]) -> UniversalityVerdict:
    if n_modes == 3:
        base = orbit(exp_skew(A.drop_exact()), settings.dedup_tol, settings.orbit_max_modes)
        steps.append(CertificateStep("orbit", {"matrix": matrix_payload(base.base), "dedup_tol": settings.dedup_tol},
                                     {"size": len(base.elements), "trivial": base.trivial}))
        return _verdict(VerdictKind.NOT_UNIVERSAL, 3,
                        "trivial action: the orbit is {O, O^-1} and generates an abelian subgroup", steps, 1)
    if n_modes == 4:
        generators = list(trivial_action_generators(4).values())
        span = closure(generators, settings.rank_tol)
        semisimple = is_semisimple(span, settings.rank_tol)
        steps.append(_closure_step("semisimple", 4, generators, False,
                                   {"dim": span.dim, "semisimple": semisimple}, settings))
        cos_alpha, sin_sq = trivial_axes_separation()
        steps.append(CertificateStep("axis_separation", {"first": [0, 1, 2], "second": [1, 2, 3]},
                                     {"cos": str(cos_alpha), "sin_sq": str(sin_sq)}))
        steps.append(CertificateStep("geodetic", {"sin_sq": str(sin_sq), "table": settings.geodetic_table},
                                     {"supports": geodetic_supports_relations(sin_sq, table_path=settings.geodetic_table)}))
        triple = identify_so3_xyz(span)
        reason = "trivial action: closure is a 3-dimensional so(3) inside so(4)"
        if triple is None:
            reason += " (no so(3) basis fitted)"
        return _verdict(VerdictKind.NOT_UNIVERSAL, 4, reason, steps, span.dim)
    span = None
    if n_modes <= settings.conjecture_max_k:
        generators = list(trivial_action_generators(n_modes).values())
        span = closure(generators, settings.rank_tol)
        if n_modes == 5:
            semisimple = is_semisimple(span, settings.rank_tol)
            steps.append(_closure_step("semisimple", 5, generators, False,
                                       {"dim": span.dim, "semisimple": semisimple}, settings))
        else:
            steps.append(CertificateStep("conjecture", {"k": n_modes}, {"dim": span.dim}))
    if n_modes == 5 and span is not None:
        return _verdict(VerdictKind.NOT_UNIVERSAL, 5,
                        f"trivial action: closure has dimension {span.dim}, an so(4) inside so(5)", steps, span.dim)
    return _verdict(VerdictKind.INCONCLUSIVE, n_modes, f"conjecture SO({n_modes - 1})", steps,
                    span.dim if span is not None else None)


def _orbit_generators(A: SkewMatrix) -> List[SkewMatrix]:
    generators: List[SkewMatrix] = []
    for sigma in ModePermutation.all(3):
        candidate = sigma.conjugate(A)
        if not any(np.allclose(candidate.entries, g.entries, atol=1e-12) for g in generators):
            generators.append(candidate)
    return generators


def check_three_mode(A: SkewMatrix, n_modes: int, settings: Optional[EngineSettings] = None,
                     theta: Optional[AngleSpec] = None) -> UniversalityVerdict:
    """
    Universality of O = exp(A) for a 3-mode generator A with |A| = theta.

    ``theta`` overrides the rotation angle while keeping the direction of A.
    """
    settings = settings or EngineSettings()
    if A.dimension != 3:
        raise DimensionError(f"expected a 3x3 generator, got {A.dimension}x{A.dimension}")
    if n_modes < 3:
        raise DomainError(f"a 3-mode beamsplitter needs at least 3 modes, got {n_modes}")
    if A.norm() == 0.0:
        raise NormalizationError("generator has zero norm")
    trivial = is_trivial_action(A, settings.direction_tol)
    steps = [CertificateStep("trivial_action", {"matrix": matrix_payload(A), "direction_tol": settings.direction_tol},
                             {"trivial": trivial})]
    if trivial:
        return _trivial_three_mode(A, n_modes, settings, steps)

    count = _nonzero_count(A, settings)
    partner = None
    for mapping in _CANDIDATE_SWAPS[count]:
        candidate = ModePermutation(mapping).conjugate(A)
        determinant, _ = bracket_determinant(A, candidate)
        if abs(determinant) > settings.rank_tol * A.norm() ** 4:
            partner = candidate
            steps.append(CertificateStep("linear_independence", {"a": matrix_payload(A), "b": matrix_payload(candidate)},
                                         {"determinant": determinant}, 1e-9))
            break
    generators = [A] + ([partner] if partner is not None else [])
    span = closure(generators, settings.rank_tol)
    steps.append(_closure_step("closure", 3, generators, False, {"dim": span.dim}, settings))
    if not is_full(span):
        return _verdict(VerdictKind.INCONCLUSIVE, n_modes, "no linearly independent conjugate found", steps, span.dim)

    spec = theta or AngleSpec.from_radians(A.norm())
    angle_class = spec.classify(settings.q_max, settings.angle_tol)
    steps.append(_classification_step(spec, angle_class, settings))
    if angle_class.is_irrational:
        return _verdict(VerdictKind.UNIVERSAL, n_modes,
                        "irrational angle: two independent conjugate generators span so(3); universal on k >= 3",
                        steps, span.dim)
    if not angle_class.is_rational:
        return _verdict(VerdictKind.INCONCLUSIVE, n_modes, "rotation angle not classified", steps, span.dim)
    return _three_mode_rational(A, spec, angle_class, n_modes, settings, steps, span)


def _three_mode_rational(A: SkewMatrix, spec: AngleSpec, angle_class: AngleClass, n_modes: int,
                         settings: EngineSettings, steps: List[CertificateStep], span: LieSpan) -> UniversalityVerdict:
    direction = A.scaled(1.0 / A.norm()) if A.exact is None else A
    generators = _orbit_generators(direction)
    scale = angle_class.radians / A.norm()
    rotations = [exp_skew(SkewMatrix(g.entries * scale)) for g in generators]
    order = rotation_order(angle_class)
    any_rational = False
    for i, j in combinations(range(len(generators)), 2):
        ctx = crs_context(rotations[i], rotations[j], (generators[i], generators[j]),
                          (angle_class, angle_class), settings)
        if not ctx.separation_class.is_rational:
            continue
        any_rational = True
        result = crs_dense(ctx)
        alpha = ctx.separation_class
        steps.append(CertificateStep("crs_dense", {"orders": [order, order], "alpha": [alpha.p, alpha.q]},
                                     {"dense": result.dense, "exception": result.exception}))
        if result.dense:
            return _verdict(VerdictKind.UNIVERSAL, n_modes,
                            f"rational angle: conjugates about axes separated by {alpha.p}π/{alpha.q} are dense in SO(3)",
                            steps, span.dim)
    if any_rational:
        return _verdict(VerdictKind.INCONCLUSIVE, n_modes,
                        "every rational axis separation hits a density exception", steps, span.dim)
    return _verdict(VerdictKind.INCONCLUSIVE, n_modes, "transcendence of e^{i2α} unverified", steps, span.dim)


# -- m modes -----------------------------------------------------------------


def _rotation_from_angle(O: RotationMatrix) -> AngleSpec:
    radians = math.atan2(O.entries[0, 1], O.entries[0, 0]) % (2 * math.pi)
    if O.exact is not None:
        return AngleSpec(radians, O.exact[0, 0], O.exact[0, 1], None, "two-mode matrix")
    return AngleSpec.from_radians(radians, "two-mode matrix")


def _logarithm(R: RotationMatrix) -> Optional[SkewMatrix]:
    try:
        return log_rotation(R)
    except BranchError:
        if R.dimension == 3:
            # half turn: the logarithm line is spanned by the fixed axis
            outer = (R.entries + np.eye(3)) / 2.0
            axis = outer[:, int(np.argmax(np.diag(outer)))]
            w = math.pi * axis / np.linalg.norm(axis)
            return SkewMatrix(np.array([[0.0, -w[2], w[1]], [w[2], 0.0, -w[0]], [-w[1], w[0], 0.0]]))
        logger.warning("skipping a logarithm at a branch point (eigenvalue -1)")
        return None


def check_m_mode(O: RotationMatrix, n_modes: int, settings: Optional[EngineSettings] = None) -> UniversalityVerdict:
    """
    Generic pipeline: orbit, logarithms, closure over all mode subsets and
    spectral density, with pairwise product substitutions when the spectra
    are rational.
    """
    settings = settings or EngineSettings()
    m = O.dimension
    if n_modes < m:
        raise DomainError(f"cannot apply a {m}-mode beamsplitter to {n_modes} modes")
    if m == 2:
        return check_two_mode(_rotation_from_angle(O), n_modes, settings)
    if O.is_identity():
        return _verdict(VerdictKind.NOT_UNIVERSAL, n_modes, "identity beamsplitter: the orbit is {I}",
                        [CertificateStep("orbit", {"matrix": matrix_payload(O), "dedup_tol": settings.dedup_tol},
                                         {"size": 1, "trivial": True})], 0)
    orbit_set = orbit(O, settings.dedup_tol, settings.orbit_max_modes)
    steps = [CertificateStep("orbit", {"matrix": matrix_payload(O), "dedup_tol": settings.dedup_tol},
                             {"size": len(orbit_set.elements), "trivial": orbit_set.trivial})]
    logs = [log for log in (_logarithm(e) for e in orbit_set.elements) if log is not None]
    skipped = len(orbit_set.elements) - len(logs)
    if m == 3 and n_modes >= 6 and logs and is_trivial_action(logs[0], settings.direction_tol):
        return _trivial_three_mode(logs[0], n_modes, settings, steps)
    if not logs:
        return _verdict(VerdictKind.INCONCLUSIVE, n_modes, "no orbit logarithm is defined", steps)
    span = closure(_embedded(logs, n_modes), settings.rank_tol)
    steps.append(_closure_step("closure", n_modes, logs, n_modes > m, {"dim": span.dim}, settings))

    if is_full(span):
        density = dense_in_one_param(O, settings.q_max, settings.angle_tol)
        steps.append(CertificateStep("spectrum_density", {"matrix": matrix_payload(O), "q_max": settings.q_max,
                                                          "tol": settings.angle_tol}, {"dense": density.dense}))
        if density.dense:
            return _verdict(VerdictKind.UNIVERSAL, n_modes,
                            f"closure is so({n_modes}) and orbit spectra are irrational; universal on k >= {m}",
                            steps, span.dim)
        substituted = _substitute_products(orbit_set.elements, n_modes, settings, steps)
        if substituted is not None:
            return _verdict(VerdictKind.UNIVERSAL, n_modes,
                            f"products of orbit pairs have irrational spectra and generate so({n_modes})",
                            steps, substituted.dim)
        hypothesis = "rational orbit spectra" if density.dense is False else "orbit spectra not certified irrational"
        return _verdict(VerdictKind.INCONCLUSIVE, n_modes,
                        f"closure is full but {hypothesis} and no substitution succeeded", steps, span.dim)
    if skipped == 0 and is_semisimple(span, settings.rank_tol):
        steps.append(_closure_step("semisimple", n_modes, logs, n_modes > m,
                                   {"dim": span.dim, "semisimple": True}, settings))
        return _verdict(VerdictKind.NOT_UNIVERSAL, n_modes,
                        f"closure is a proper semisimple subalgebra of dimension {span.dim}", steps, span.dim)
    if skipped == 0 and is_abelian(span, settings.rank_tol):
        steps.append(_closure_step("abelian", n_modes, logs, n_modes > m,
                                   {"dim": span.dim, "abelian": True}, settings))
        return _verdict(VerdictKind.NOT_UNIVERSAL, n_modes,
                        f"closure is abelian of dimension {span.dim}: the generated group is commutative",
                        steps, span.dim)
    return _verdict(VerdictKind.INCONCLUSIVE, n_modes,
                    f"closure of dimension {span.dim} is proper but not certified semisimple", steps, span.dim)


def _substitute_products(elements: Sequence[RotationMatrix], n_modes: int, settings: EngineSettings,
                         steps: List[CertificateStep]) -> Optional[LieSpan]:
    if settings.substitution_depth < 2:
        return None
    dense_logs: List[SkewMatrix] = []
    for i, j in permutations(range(len(elements)), 2):
        product = elements[i] @ elements[j]
        if product.is_identity():
            continue
        density = dense_in_one_param(product, settings.q_max, settings.angle_tol)
        if not density.dense:
            continue
        log = _logarithm(product)
        if log is None:
            continue
        steps.append(CertificateStep("spectrum_density", {"matrix": matrix_payload(product), "q_max": settings.q_max,
                                                          "tol": settings.angle_tol}, {"dense": True}))
        dense_logs.append(log)
        span = closure(_embedded(dense_logs, n_modes), settings.rank_tol)
        if is_full(span):
            steps.append(_closure_step("closure", n_modes, dense_logs, n_modes > dense_logs[0].dimension,
                                       {"dim": span.dim}, settings))
            return span
    return None


def check_device(matrix: Union[RotationMatrix, SkewMatrix], n_modes: int,
                 settings: Optional[EngineSettings] = None, theta: Optional[AngleSpec] = None) -> UniversalityVerdict:
    """Dispatch a beamsplitter given as a rotation or as a generator."""
    settings = settings or EngineSettings()
    if isinstance(matrix, SkewMatrix):
        if matrix.dimension == 3:
            return check_three_mode(matrix, n_modes, settings, theta)
        if theta is not None:
            matrix = SkewMatrix(matrix.entries * (theta.radians / matrix.norm()))
        return check_m_mode(exp_skew(matrix), n_modes, settings)
    if theta is not None and matrix.dimension == 2:
        return check_two_mode(theta, n_modes, settings)
    return check_m_mode(matrix, n_modes, settings)


def conjecture_experiment(k: int, settings: Optional[EngineSettings] = None) -> ConjectureReport:
    """Closure of the C(k,3) trivial-action embeddings, compared with dim so(k-1)."""
    settings = settings or EngineSettings()
    if k < 4:
        raise DomainError(f"the experiment starts at k = 4, got {k}")
    if k > settings.conjecture_max_k:
        raise SizeError(f"k = {k} exceeds the configured cap {settings.conjecture_max_k}")
    generators = list(trivial_action_generators(k).values())
    span = closure(generators, settings.rank_tol)
    expected = algebra_dimension(k - 1)
    logger.debug("trivial-action closure in so(%d): dim %d (so(%d) has %d)", k, span.dim, k - 1, expected)
    return ConjectureReport(k, span.dim, expected, span.dim == expected, len(generators))


# -- certificate replay ------------------------------------------------------


def _settings_from(inputs: dict) -> EngineSettings:
    return EngineSettings(rank_tol=inputs.get("rank_tol", EngineSettings.rank_tol))


def _replay_generators(inputs: dict) -> List[SkewMatrix]:
    generators = [matrix_from_payload(g, SkewMatrix) for g in inputs["generators"]]
    return _embedded(generators, inputs["modes"]) if inputs.get("embed") else generators


@register_replayer("rational_angle")
def _replay_rational(inputs: dict) -> dict:
    return _class_outputs(AngleClass.rational(inputs["p"], inputs["q"]))


@register_replayer("classify_exact")
def _replay_classify_exact(inputs: dict) -> dict:
    return _class_outputs(classify_exact(QuadSurd.parse(inputs["cos"])))


@register_replayer("classify_numeric")
def _replay_classify_numeric(inputs: dict) -> dict:
    return _class_outputs(classify_numeric(inputs["theta"], inputs["q_max"], inputs["tol"]))


@register_replayer("excluded_angle")
def _replay_excluded(inputs: dict) -> dict:
    return {"excluded": is_excluded(AngleClass.rational(inputs["p"], inputs["q"]))}


@register_replayer("standard_generators_closure")
def _replay_standard_closure(inputs: dict) -> dict:
    return {"dim": closure(standard_basis(inputs["modes"])).dim}


@register_replayer("closure")
def _replay_closure(inputs: dict) -> dict:
    return {"dim": closure(_replay_generators(inputs), _settings_from(inputs).rank_tol).dim}


@register_replayer("semisimple")
def _replay_semisimple(inputs: dict) -> dict:
    rank_tol = _settings_from(inputs).rank_tol
    span = closure(_replay_generators(inputs), rank_tol)
    return {"dim": span.dim, "semisimple": is_semisimple(span, rank_tol)}


@register_replayer("abelian")
def _replay_abelian(inputs: dict) -> dict:
    rank_tol = _settings_from(inputs).rank_tol
    span = closure(_replay_generators(inputs), rank_tol)
    return {"dim": span.dim, "abelian": is_abelian(span, rank_tol)}


@register_replayer("product_has_infinite_order")
def _replay_infinite_order(inputs: dict) -> dict:
    return {"infinite": product_has_infinite_order(*inputs["orders"])}


@register_replayer("product_angle_class")
def _replay_product_class(inputs: dict) -> dict:
    return _class_outputs(classify_exact(product_angle_cosine(QuadSurd.parse(inputs["cos_theta"]))))


@register_replayer("bch_determinant_factor")
def _replay_factor(inputs: dict) -> dict:
    return {"value": bch_determinant_factor(inputs["theta"])}


@register_replayer("p_block_determinant")
def _replay_p_block(inputs: dict) -> dict:
    return {"value": p_block_determinant(inputs["modes"], inputs["theta"])}


@register_replayer("generating_set_determinant")
def _replay_generating_set(inputs: dict) -> dict:
    report = generating_set_basis_matrix(inputs["modes"], inputs["theta"], principal=False)
    return {"determinant": report.determinant, "closed_form": report.closed_form}


@register_replayer("trivial_action")
def _replay_trivial_action(inputs: dict) -> dict:
    A = matrix_from_payload(inputs["matrix"], SkewMatrix)
    return {"trivial": is_trivial_action(A, inputs.get("direction_tol", EngineSettings.direction_tol))}


@register_replayer("orbit")
def _replay_orbit(inputs: dict) -> dict:
    O = matrix_from_payload(inputs["matrix"], RotationMatrix)
    if O.is_identity():
        return {"size": 1, "trivial": True}
    result = orbit(O, inputs.get("dedup_tol", EngineSettings.dedup_tol))
    return {"size": len(result.elements), "trivial": result.trivial}


@register_replayer("spectrum_density")
def _replay_density(inputs: dict) -> dict:
    R = matrix_from_payload(inputs["matrix"], RotationMatrix)
    return {"dense": dense_in_one_param(R, inputs["q_max"], inputs["tol"]).dense}


@register_replayer("linear_independence")
def _replay_independence(inputs: dict) -> dict:
    A = matrix_from_payload(inputs["a"], SkewMatrix)
    B = matrix_from_payload(inputs["b"], SkewMatrix)
    return {"determinant": bracket_determinant(A, B)[0]}


@register_replayer("crs_dense")
def _replay_crs(inputs: dict) -> dict:
    p, q = inputs["alpha"]
    order1, order2 = inputs["orders"]
    identity = AxisAngle(np.array([1.0, 0.0, 0.0]), 0.0)
    ctx = CrsContext(identity, identity, math.pi * p / q, None, (order1, order2), AngleClass.rational(p, q))
    result = crs_dense(ctx)
    return {"dense": result.dense, "exception": result.exception}


@register_replayer("axis_separation")
def _replay_axis_separation(inputs: dict) -> dict:
    cos_alpha, sin_sq = trivial_axes_separation()
    return {"cos": str(cos_alpha), "sin_sq": str(sin_sq)}


@register_replayer("geodetic")
def _replay_geodetic(inputs: dict) -> dict:
    return {"supports": geodetic_supports_relations(Fraction(inputs["sin_sq"]), table_path=inputs.get("table"))}


@register_replayer("conjecture")
def _replay_conjecture(inputs: dict) -> dict:
    k = inputs["k"]
    return {"dim": closure(list(trivial_action_generators(k).values())).dim}
