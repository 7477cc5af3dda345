"""
Documents Module - Structured output documents.

Every command prints exactly one of these. All kinds share the keys
``document`` (the kind), ``version`` and, where configuration affects the
result, ``config``; data/documents.schema.json describes them all.
"""

from typing import List, Optional, Sequence, Tuple

from services import __version__
from services.angle_classifier import AngleClass, DegreeTwoAngle
from services.lie_closure import (
    BasisChangeReport,
    LieSpan,
    ProductLabel,
    is_abelian,
    is_full,
    is_semisimple,
    label_text,
)
from services.matrices import RotationMatrix, algebra_dimension
from services.perm_orbit import OrbitSet
from services.settings import EngineSettings
from services.universality_engine import ConjectureReport, UniversalityVerdict
from services.word_explorer import CoverageReport, Word


def _document(kind: str, settings: Optional[EngineSettings] = None, /, **body) -> dict:
    document = {"document": kind, "version": __version__}
    if settings is not None:
        document["config"] = settings.to_dict()
    document.update(body)
    return document


def verdict_document(verdict: UniversalityVerdict, settings: EngineSettings, source: str = "") -> dict:
    return _document(
        "verdict", settings,
        source=source,
        verdict=verdict.kind.value,
        exit_code=verdict.exit_code,
        modes_available=verdict.modes_available,
        reason=verdict.reason,
        closure_dim=verdict.closure_dim,
        certificate=[step.to_dict() for step in verdict.certificate],
    )


def angle_class_document(angle_class: AngleClass, literal: str, q_max: int, tol: float) -> dict:
    return _document("angle_class", input=literal, q_max=q_max, tol=tol,
                     radians=angle_class.radians, **angle_class.to_dict())


def orbit_document(orbit_set: OrbitSet, settings: EngineSettings, source: str = "") -> dict:
    return _document(
        "orbit", settings,
        source=source,
        modes=orbit_set.base.dimension,
        size=len(orbit_set.elements),
        trivial=orbit_set.trivial,
        permutations=[[i + 1 for i in sigma.mapping] for sigma in orbit_set.permutations],
        elements=[element.entries.tolist() for element in orbit_set.elements],
    )


def closure_document(span: LieSpan, generator_count: int, settings: EngineSettings,
                     sources: Sequence[str] = ()) -> dict:
    return _document(
        "closure", settings,
        sources=list(sources),
        modes=span.dimension_n,
        generators=generator_count,
        dim=span.dim,
        algebra_dim=algebra_dimension(span.dimension_n),
        full=is_full(span),
        semisimple=is_semisimple(span, settings.rank_tol),
        abelian=is_abelian(span, settings.rank_tol),
        exact=span.is_exact,
        rounds=span.rounds,
    )


def generating_set_document(n: int, theta_text: str, theta: float,
                            products: List[Tuple[ProductLabel, RotationMatrix]],
                            report: Optional[BasisChangeReport] = None) -> dict:
    body = {
        "modes": n,
        "theta": theta_text,
        "radians": theta,
        "count": len(products),
        "products": [{"label": label_text(label), "matrix": matrix.entries.tolist()} for label, matrix in products],
    }
    if report is not None:
        body["basis_determinant"] = report.determinant
        body["closed_form"] = report.closed_form
    return _document("generating_set", **body)


def coverage_document(report: CoverageReport, settings: EngineSettings, generators: Sequence[str]) -> dict:
    return _document("coverage", settings, generators=list(generators), **report.to_dict())


def identity_search_document(word: Optional[Word], max_len: int, tol: float,
                             orders: Optional[Sequence[Optional[int]]], settings: EngineSettings,
                             generators: Sequence[str]) -> dict:
    return _document(
        "identity_search", settings,
        generators=list(generators),
        max_len=max_len,
        tol=tol,
        orders=list(orders) if orders is not None else None,
        found=word is not None,
        word=word.to_list() if word is not None else None,
        word_text=str(word) if word is not None else None,
        length=len(word) if word is not None else None,
    )


def conjecture_document(report: ConjectureReport, settings: EngineSettings) -> dict:
    return _document("conjecture", settings, k=report.k, dim=report.dim, expected=report.expected,
                     matches=report.matches, generators=report.generators)


def degree_two_angles_document(angles: List[DegreeTwoAngle]) -> dict:
    rows = []
    for angle in angles:
        product = angle.product_class.to_dict()
        product.pop("certificate", None)
        rows.append({
            "p": angle.p,
            "q": angle.q,
            "cosine": str(angle.cosine),
            "product_cosine": str(angle.product_cosine),
            "product_class": product,
        })
    return _document("degree_two_angles", count=len(rows), angles=rows)
