"""Private polynomial computation over X-secure coded storage with Byzantine and silent servers."""

from .errors import (
    AmbiguousDecode,
    ConfigurationError,
    DecodeFailure,
    EnumerationTooLarge,
    InfeasibleDecode,
    ProtocolFailure,
    SPPCError,
)
from .field import FieldContext, OpCounter, counting
from .mvpoly import MultiPoly, from_text, span_basis, to_text
from .params import SystemParams, derive_params
from .points import PublicPoints, generate_points, verify_points
from .protocol import plaintext_evaluations, run_protocol
from .storage import FileSet, encode_storage, random_fileset

__version__ = "0.1.0"

__all__ = [
    "AmbiguousDecode", "ConfigurationError", "DecodeFailure", "EnumerationTooLarge", "InfeasibleDecode",
    "ProtocolFailure", "SPPCError", "FieldContext", "OpCounter", "counting", "MultiPoly", "from_text",
    "span_basis", "to_text", "SystemParams", "derive_params", "PublicPoints", "generate_points",
    "verify_points", "plaintext_evaluations", "run_protocol", "FileSet", "encode_storage", "random_fileset",
]
