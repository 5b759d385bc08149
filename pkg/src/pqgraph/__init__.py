"""Post-quantum exposure scoring over infrastructure dependency graphs.

Builds a typed asset graph from scanner output, scores how much of the
organization's crown-jewel impact is reachable through quantum-vulnerable
cryptography (exhaustive attack paths or an all-walks resolvent), attributes
the exposure to cryptographic domains by Shapley value, and serves the
results plus an LLM-assisted edge-validation pipeline over HTTP.
"""

from .config import ScoringConfig, ScoringContext, make_context
from .errors import (
    ConfigurationError,
    ConflictError,
    EndpointUnavailableError,
    NotFoundError,
    ParseError,
    PathExplosionError,
    PqgraphError,
    StructuralError,
    ValidationError,
)
from .exposure import (
    ExposureReport,
    ReadinessDelta,
    exposure,
    normalize,
    pqri,
    readiness_delta,
    score_report,
)
from .graph import (
    AssetGraph,
    AssetNode,
    DependencyEdge,
    GraphIndex,
    NodeKind,
    Relation,
    ValidationStatus,
    build_graph,
)
from .ingest import IngestReport, VulnRecord, ingest, parse_vuln_feed
from .katz import KatzScorer, exposure_katz, spectral_radius
from .kernels import active_backend
from .paths import AttackPath, ExactScorer, exposure_exact
from .registry import ResistanceRegistry, lookup_resistance, weakest_link_resistance
from .shapley import AttributionResult, attribute_values
from .snapshot import (
    SnapshotDocument,
    from_graph,
    parse_snapshot,
    serialize_snapshot,
    to_graph,
)

__version__ = "0.1.0"

__all__ = [
    "AssetGraph",
    "AssetNode",
    "AttackPath",
    "AttributionResult",
    "ConfigurationError",
    "ConflictError",
    "DependencyEdge",
    "EndpointUnavailableError",
    "ExactScorer",
    "ExposureReport",
    "GraphIndex",
    "IngestReport",
    "KatzScorer",
    "NodeKind",
    "NotFoundError",
    "ParseError",
    "PathExplosionError",
    "PqgraphError",
    "ReadinessDelta",
    "Relation",
    "ResistanceRegistry",
    "ScoringConfig",
    "ScoringContext",
    "SnapshotDocument",
    "StructuralError",
    "ValidationError",
    "ValidationStatus",
    "VulnRecord",
    "active_backend",
    "attribute_values",
    "build_graph",
    "exposure",
    "exposure_exact",
    "exposure_katz",
    "from_graph",
    "ingest",
    "lookup_resistance",
    "make_context",
    "normalize",
    "parse_snapshot",
    "parse_vuln_feed",
    "pqri",
    "readiness_delta",
    "score_report",
    "serialize_snapshot",
    "spectral_radius",
    "to_graph",
    "weakest_link_resistance",
    "__version__",
]
