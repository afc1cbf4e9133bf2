"""Exact verification toolkit for greedy and Beatty solutions of ``a(sum_{j<r} a(n-j)) = n``."""
from .beatty import BeattyParams
from .errors import ConstructionError, InternalConsistencyError, OstrowskiError, UsageError
from .qfield import QuadExpr, floor_quad, parse_quad, sign
from .report import VerifyReport

__all__ = ["BeattyParams", "ConstructionError", "InternalConsistencyError", "OstrowskiError", "QuadExpr",
           "UsageError", "VerifyReport", "floor_quad", "parse_quad", "sign"]
