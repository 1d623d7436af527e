from .combinat import FlagShape, Partition, PartitionTuple, ShapeError, parse_shape
from .exactalg import LaurentExpr, RatFunc, VarId
from .mirror import ExternalConvention, build_ladder, build_WP, build_WT, pullback_WT
from .verify import VerificationReport, check_main_theorem, check_structure
from .storage import ReportStorage

__all__ = [
    "FlagShape", "Partition", "PartitionTuple", "ShapeError", "parse_shape",
    "LaurentExpr", "RatFunc", "VarId",
    "ExternalConvention", "build_ladder", "build_WP", "build_WT", "pullback_WT",
    "VerificationReport", "check_main_theorem", "check_structure",
    "ReportStorage",
]
