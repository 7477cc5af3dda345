"""
Default configuration for the beamsplitter universality tool.

Values can be overridden by a JSON file named in the BEAMSPLIT_CONFIG
environment variable, or per command with --config PATH.
"""

from datafiles import DEFAULT_GEODETIC_TABLE


class DefaultConfig:
    LOG_LEVEL = "WARNING"

    # Lie closure rank threshold and orbit/trivial-action comparisons
    RANK_TOL = 1e-8
    DEDUP_TOL = 1e-9
    DIRECTION_TOL = 1e-9
    ORBIT_MAX_MODES = 8

    # Angle classification
    Q_MAX = 10_000
    ANGLE_TOL = 1e-9

    # Word exploration
    IDENTITY_TOL = 1e-9
    WORD_BUDGET = 10 ** 7

    # Engine search depths
    SUBSTITUTION_DEPTH = 2
    CONJECTURE_MAX_K = 9

    GEODETIC_TABLE = DEFAULT_GEODETIC_TABLE
