"""Exception hierarchy shared by all modules.

Every error carries a stable machine-readable ``code`` that the HTTP layer
maps 1:1 onto JSON error responses and the CLI maps onto exit code 2.
"""


class EngineError(Exception):
    """Base class for all domain errors raised by this package."""

    code = "engine_error"


class InvalidDimension(EngineError):
    code = "invalid_dimension"


class NonUnitary(EngineError):
    code = "non_unitary"


class InvalidTargets(EngineError):
    code = "invalid_targets"


class NotCPTP(EngineError):
    code = "not_cptp"


class InvalidConfusion(EngineError):
    code = "invalid_confusion"


class InvalidCalibration(EngineError):
    code = "invalid_calibration"


class EdgeNotInSnapshot(EngineError):
    code = "edge_not_in_snapshot"


class RoutingRequired(EngineError):
    code = "routing_required"


class NoEmbedding(EngineError):
    code = "no_embedding"


class EmptySweep(EngineError):
    code = "empty_sweep"


class ReferenceMismatch(EngineError):
    code = "reference_mismatch"


class MalformedSnapshot(EngineError):
    code = "malformed_snapshot"
