"""
Settings Module - Engine tolerances and caps as one immutable value.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Any, Mapping, Optional


@dataclass(frozen=True)
class EngineSettings:
    rank_tol: float = 1e-8
    dedup_tol: float = 1e-9
    direction_tol: float = 1e-9
    orbit_max_modes: int = 8
    q_max: int = 10_000
    angle_tol: float = 1e-9
    identity_tol: float = 1e-9
    word_budget: int = 10 ** 7
    substitution_depth: int = 2
    conjecture_max_k: int = 9
    geodetic_table: Optional[str] = None

    @classmethod
    def from_mapping(cls, config: Mapping[str, Any]) -> EngineSettings:
        """Build from upper-case config keys (RANK_TOL, Q_MAX, ...); missing keys keep defaults."""
        values = {}
        for item in fields(cls):
            key = item.name.upper()
            if key in config and config[key] is not None:
                values[item.name] = config[key]
        return cls(**values)

    def to_dict(self) -> dict:
        return asdict(self)
