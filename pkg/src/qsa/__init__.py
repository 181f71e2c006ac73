"""Decision support for quantum software architecture.

The package ships six curated decision models — communication,
decomposition, data processing, fault tolerance, integration &
optimization, and algorithm implementation — each a gateway graph over
architecture patterns annotated with the quality attributes they improve
or degrade.  On top of the models it provides:

* a textual authoring format (``qsa.dsl``) with diagnostics, a canonical
  serializer, and a linter;
* a pure traversal/scoring engine (``qsa.engine``) for guided sessions,
  weighted rankings, automatic score-maximizing selection, and what-if
  comparison;
* a bundled catalog loader (``qsa.catalog``) with provenance utilities;
* a stateless HTTP service (``qsa.service``) and a command-line client
  (``qsa.cli``).
"""

from __future__ import annotations

from .catalog import (
    Catalog,
    CatalogManifest,
    ManifestEntry,
    QualityAssessment,
    load_builtin,
    load_dir,
    slr_include,
    slr_quality_score,
)
from .engine import (
    Recommendation,
    Selection,
    Session,
    WeightVector,
    WhatIfReport,
    answer,
    auto_select,
    brute_force_oracle,
    compare_whatif,
    recommend,
    score_pattern,
    session_with,
    start_session,
)
from .errors import (
    ArityViolationError,
    CatalogError,
    NegativeWeightError,
    NoModelsFoundError,
    QsaError,
    TooLargeToEnumerateError,
    UnknownAreaError,
    UnknownAttributeError,
    UnknownBranchError,
    UnknownGatewayError,
    UnvalidatedModelError,
)
from .model import (
    Branch,
    DecisionModel,
    DesignArea,
    Direction,
    Finding,
    Gateway,
    GatewayKind,
    ModelMeta,
    Pattern,
    QualityImpact,
    Severity,
    ValidationReport,
    qa_usage,
    reachable_patterns,
    validate_model,
)
from .vocabulary import BUILTIN_VOCABULARY, QualityAttribute, Vocabulary

__version__ = "0.1.0"

__all__ = [
    "ArityViolationError",
    "BUILTIN_VOCABULARY",
    "Branch",
    "Catalog",
    "CatalogError",
    "CatalogManifest",
    "DecisionModel",
    "DesignArea",
    "Direction",
    "Finding",
    "Gateway",
    "GatewayKind",
    "ManifestEntry",
    "ModelMeta",
    "NegativeWeightError",
    "NoModelsFoundError",
    "Pattern",
    "QsaError",
    "QualityAssessment",
    "QualityAttribute",
    "QualityImpact",
    "Recommendation",
    "Selection",
    "Session",
    "Severity",
    "TooLargeToEnumerateError",
    "UnknownAreaError",
    "UnknownAttributeError",
    "UnknownBranchError",
    "UnknownGatewayError",
    "UnvalidatedModelError",
    "ValidationReport",
    "Vocabulary",
    "WeightVector",
    "WhatIfReport",
    "answer",
    "auto_select",
    "brute_force_oracle",
    "compare_whatif",
    "load_builtin",
    "load_dir",
    "qa_usage",
    "reachable_patterns",
    "recommend",
    "score_pattern",
    "session_with",
    "slr_include",
    "slr_quality_score",
    "start_session",
    "validate_model",
    "__version__",
]
