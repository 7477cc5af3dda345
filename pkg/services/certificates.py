"""
Certificates Module - Replayable records of the facts behind a verdict.

A certificate is an ordered list of named steps. Each step records its inputs
in JSON-friendly form together with the outputs it produced; a replayer
registered under the step name recomputes the outputs from the inputs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Sequence, Tuple, Union

import numpy as np

from services.errors import BeamsplitterError
from services.exact_scalar import QuadSurd
from services.matrices import RotationMatrix, SkewMatrix, exact_array

logger = logging.getLogger(__name__)

Replayer = Callable[[Dict[str, Any]], Dict[str, Any]]

REPLAYERS: Dict[str, Replayer] = {}


@dataclass(frozen=True)
class CertificateStep:
    name: str
    inputs: Dict[str, Any] = field(default_factory=dict)
    outputs: Dict[str, Any] = field(default_factory=dict)
    tolerance: float = 0.0

    def to_dict(self) -> dict:
        return {"name": self.name, "inputs": self.inputs, "outputs": self.outputs,
                "tolerance": self.tolerance}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> CertificateStep:
        return cls(data["name"], dict(data.get("inputs", {})), dict(data.get("outputs", {})),
                   float(data.get("tolerance", 0.0)))


def register_replayer(name: str) -> Callable[[Replayer], Replayer]:
    def decorator(function: Replayer) -> Replayer:
        REPLAYERS[name] = function
        return function
    return decorator


def matrix_payload(M: Union[RotationMatrix, SkewMatrix]) -> Dict[str, Any]:
    """Entries as nested lists, plus the exact mirror as strings when present."""
    payload: Dict[str, Any] = {"entries": M.entries.tolist()}
    if M.exact is not None:
        payload["exact"] = [[str(x) for x in row] for row in M.exact]
    return payload


def matrix_from_payload(payload: Dict[str, Any], kind: type) -> Union[RotationMatrix, SkewMatrix]:
    if payload.get("exact") is not None:
        return kind(None, exact_array([[QuadSurd.parse(x) for x in row] for row in payload["exact"]]))
    return kind(np.array(payload["entries"], dtype=float))


def _matches(recorded: Any, replayed: Any, tolerance: float) -> bool:
    if isinstance(recorded, dict):
        return isinstance(replayed, dict) and all(
            _matches(value, replayed.get(key), tolerance) for key, value in recorded.items())
    if isinstance(recorded, bool) or recorded is None or isinstance(recorded, str):
        return recorded == replayed
    if isinstance(recorded, (int, float)) and isinstance(replayed, (int, float)) \
            and not isinstance(replayed, bool):
        if isinstance(recorded, int) and isinstance(replayed, int):
            return recorded == replayed
        return abs(recorded - replayed) <= tolerance * max(1.0, abs(recorded))
    if isinstance(recorded, (list, tuple)) and isinstance(replayed, (list, tuple)):
        return len(recorded) == len(replayed) and all(
            _matches(a, b, tolerance) for a, b in zip(recorded, replayed))
    return recorded == replayed


def replay_step(step: CertificateStep) -> Tuple[bool, str]:
    replayer = REPLAYERS.get(step.name)
    if replayer is None:
        return False, f"{step.name}: no replayer registered"
    try:
        outputs = replayer(step.inputs)
    except BeamsplitterError as exc:
        return False, f"{step.name}: replay raised {type(exc).__name__}: {exc}"
    if _matches(step.outputs, outputs, step.tolerance):
        return True, f"{step.name}: reproduced {step.outputs}"
    return False, f"{step.name}: recorded {step.outputs}, replayed {outputs}"


def replay_certificate(steps: Sequence[Union[CertificateStep, Dict[str, Any]]]) -> List[Tuple[bool, str]]:
    """
    Re-run every step and compare with the recorded outputs.

    Returns:
        list: one (ok, message) tuple per step
    """
    # the engine registers its replayers on import
    import services.universality_engine  # noqa: F401

    results = []
    for step in steps:
        if isinstance(step, dict):
            step = CertificateStep.from_dict(step)
        ok, message = replay_step(step)
        if not ok:
            logger.warning("certificate step failed to replay: %s", message)
        results.append((ok, message))
    return results


def all_replayed(results: Sequence[Tuple[bool, str]]) -> bool:
    return all(ok for ok, _ in results)
