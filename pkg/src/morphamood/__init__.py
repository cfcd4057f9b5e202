"""Continuous pictographic affect scale toolkit.

A polar map of key facial expressions with field-wise bilinear
interpolation, plus the surrounding experiment machinery: score-range
conversions, stimulus subset selection, rating-session state machine
and event log, a loopback service for interactive clients, and
agreement statistics.
"""

from .expression import (
    Cursor,
    FeatureSchema,
    FeatureVector,
    Field,
    KeyExpression,
    MapConfigError,
    PolarMap,
    clamp_cursor,
    interpolate_expression,
    interpolate_va,
    load_default_map,
    load_map,
    load_map_file,
    locate_field,
    radius_rescale,
    serialize_map,
)
from .analysis import (
    ICCResult,
    classify_cicchetti,
    f_cdf,
    f_quantile,
    icc_a_k,
    icc_by_stimulus,
    mean_difference_matrix,
    per_method_means,
    read_ratings_csv,
)
from .scales import VAScore, center_deap, sam5_to_9, sam9_to_5
from .session import (
    EventLog,
    ProtocolError,
    RatingEvent,
    SessionState,
    compute_durations,
    handle_event,
    read_event_log,
    replay,
)
from .stimuli import StimulusRecord, read_corpus_csv, select_protocol

__version__ = "0.1.0"

__all__ = [
    "Cursor",
    "EventLog",
    "FeatureSchema",
    "FeatureVector",
    "Field",
    "ICCResult",
    "KeyExpression",
    "MapConfigError",
    "PolarMap",
    "ProtocolError",
    "RatingEvent",
    "SessionState",
    "StimulusRecord",
    "VAScore",
    "center_deap",
    "clamp_cursor",
    "classify_cicchetti",
    "compute_durations",
    "f_cdf",
    "f_quantile",
    "handle_event",
    "icc_a_k",
    "icc_by_stimulus",
    "interpolate_expression",
    "interpolate_va",
    "load_default_map",
    "load_map",
    "load_map_file",
    "locate_field",
    "mean_difference_matrix",
    "per_method_means",
    "radius_rescale",
    "read_corpus_csv",
    "read_event_log",
    "read_ratings_csv",
    "replay",
    "sam5_to_9",
    "sam9_to_5",
    "select_protocol",
    "serialize_map",
    "__version__",
]
