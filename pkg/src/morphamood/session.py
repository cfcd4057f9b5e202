"""Rating-session protocol: modes, events, logging, and duration accounting.

A session shows one stimulus at a time and collects one rating per
stimulus. The face is protected from unintentional changes by a
two-mode protocol: in View mode controller motion leaves the cursor
alone; holding the trigger enters Edit mode, where motion drives the
cursor; releasing returns to View; a confirm press in View commits the
current cursor's interpolated expression and score as the rating.

Every interaction is appended to a newline-delimited log of
RatingEvent records with a millisecond monotonic timestamp (t_mono)
and a wall-clock timestamp (t_wall). Replaying a log through the state
machine reproduces the live session; duration accounting pairs
rating_shown -> confirm for in-headset methods and hmd_removed ->
hmd_reattached for the paper methods.
"""

from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import dataclass, replace
from typing import Any, Iterable, Iterator, Mapping, Sequence

from .expression import Cursor, FeatureVector, PolarMap, interpolate_expression, interpolate_va
from .scales import VAScore

logger = logging.getLogger(__name__)

MODE_VIEW = "View"
MODE_EDIT = "Edit"

METHOD_MAM = "MAM"
METHOD_PAM = "PAM"
METHOD_SAM_VR = "SAM_VR"
METHOD_SAM_PP = "SAM_PP"
METHODS = (METHOD_MAM, METHOD_PAM, METHOD_SAM_VR, METHOD_SAM_PP)
VR_METHODS = frozenset({METHOD_MAM, METHOD_SAM_VR})
PP_METHODS = frozenset({METHOD_PAM, METHOD_SAM_PP})

EVENT_TYPES = (
    "stimulus_start",
    "rating_shown",
    "trigger_press",
    "move",
    "trigger_release",
    "confirm",
    "hmd_removed",
    "checkmark",
    "hmd_reattached",
)

MODE_VRR = "VRR"  # in-headset rating durations
MODE_PPR = "PPR"  # paper rating durations

EVENT_FIELDS = (
    "session_id",
    "subject_id",
    "method",
    "stimulus_id",
    "event_type",
    "t_mono",
    "t_wall",
    "payload",
)


class EventValidationError(ValueError):
    """An event record is structurally invalid."""


class ClockError(ValueError):
    """t_mono regressed within a session."""


class ProtocolError(Exception):
    """An event is illegal in the session's current mode."""


@dataclass(frozen=True)
class RatingEvent:
    session_id: str
    subject_id: str
    method: str
    stimulus_id: str | None
    event_type: str
    t_mono: int
    t_wall: str
    payload: Mapping[str, Any] | None = None


def validate_event(event: RatingEvent) -> None:
    if not event.session_id or not isinstance(event.session_id, str):
        raise EventValidationError("session_id must be a non-empty string")
    if not isinstance(event.subject_id, str):
        raise EventValidationError("subject_id must be a string")
    if event.method not in METHODS:
        raise EventValidationError(f"unknown method {event.method!r}")
    if event.event_type not in EVENT_TYPES:
        raise EventValidationError(f"unknown event_type {event.event_type!r}")
    if isinstance(event.t_mono, bool) or not isinstance(event.t_mono, int):
        raise EventValidationError("t_mono must be an integer millisecond count")
    if event.t_mono < 0:
        raise EventValidationError("t_mono must be non-negative")
    if not isinstance(event.t_wall, str) or not event.t_wall:
        raise EventValidationError("t_wall must be a non-empty timestamp string")
    if event.stimulus_id is not None and not isinstance(event.stimulus_id, str):
        raise EventValidationError("stimulus_id must be a string or null")
    if event.payload is not None and not isinstance(event.payload, Mapping):
        raise EventValidationError("payload must be an object or null")
    if event.event_type == "move":
        payload = event.payload or {}
        r, phi = payload.get("r"), payload.get("phi")
        ok = (
            isinstance(r, (int, float)) and not isinstance(r, bool) and math.isfinite(r)
            and isinstance(phi, (int, float)) and not isinstance(phi, bool) and math.isfinite(phi)
        )
        if not ok:
            raise EventValidationError("move events must carry a cursor payload {r, phi}")
    if event.event_type == "stimulus_start" and not event.stimulus_id:
        raise EventValidationError("stimulus_start events must carry a stimulus_id")


def event_to_json_line(event: RatingEvent) -> str:
    record = {
        "session_id": event.session_id,
        "subject_id": event.subject_id,
        "method": event.method,
        "stimulus_id": event.stimulus_id,
        "event_type": event.event_type,
        "t_mono": event.t_mono,
        "t_wall": event.t_wall,
        "payload": dict(event.payload) if event.payload is not None else None,
    }
    return json.dumps(record, separators=(",", ":"))


def event_from_json_line(line: str) -> RatingEvent:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise EventValidationError(f"malformed event record: {exc}") from exc
    if not isinstance(record, dict) or set(record) != set(EVENT_FIELDS):
        raise EventValidationError(f"event record must have exactly the fields {EVENT_FIELDS}")
    event = RatingEvent(**record)
    validate_event(event)
    return event


# ---------------------------------------------------------------------------
# state machine


@dataclass(frozen=True)
class CommittedRating:
    stimulus_id: str
    cursor: Cursor
    fv: FeatureVector
    va: VAScore


@dataclass(frozen=True)
class SessionState:
    mode: str = MODE_VIEW
    cursor: Cursor = Cursor(0.0, 0.0)
    stimulus_id: str | None = None
    committed: CommittedRating | None = None


INITIAL_STATE = SessionState()


def handle_event(state: SessionState, event: RatingEvent, pmap: PolarMap) -> SessionState:
    """Apply one validated event; raises ProtocolError on mode-illegal events.

    The cursor changes only through move events in Edit mode; the
    committed rating changes only through confirm events in View mode.
    Timing markers (rating_shown, checkmark, hmd_*) leave state alone.
    """
    et = event.event_type
    if et == "stimulus_start":
        return replace(state, stimulus_id=event.stimulus_id, committed=None)
    if et == "trigger_press":
        if state.mode != MODE_VIEW:
            raise ProtocolError("trigger_press while already in Edit mode")
        return replace(state, mode=MODE_EDIT)
    if et == "trigger_release":
        if state.mode != MODE_EDIT:
            raise ProtocolError("trigger_release in View mode")
        return replace(state, mode=MODE_VIEW)
    if et == "move":
        if state.mode != MODE_EDIT:
            return state  # legal but inert: View mode ignores motion
        payload = event.payload or {}
        return replace(state, cursor=Cursor(float(payload["r"]), float(payload["phi"])))
    if et == "confirm":
        if state.mode != MODE_VIEW:
            raise ProtocolError("confirm in Edit mode")
        if state.stimulus_id is None:
            raise ProtocolError("confirm with no active stimulus")
        rating = CommittedRating(
            stimulus_id=state.stimulus_id,
            cursor=state.cursor,
            fv=interpolate_expression(pmap, state.cursor),
            va=interpolate_va(pmap, state.cursor),
        )
        return replace(state, committed=rating)
    # rating_shown, hmd_removed, checkmark, hmd_reattached: timing markers
    return state


@dataclass
class ReplayedRating:
    session_id: str
    subject_id: str
    method: str
    stimulus_id: str
    t_mono: int
    rating: CommittedRating


@dataclass
class ReplayResult:
    final_states: dict[str, SessionState]
    ratings: list[ReplayedRating]
    protocol_errors: int
    events: int


def replay(events: Iterable[RatingEvent], pmap: PolarMap) -> ReplayResult:
    """Fold a log through the state machine, per session.

    Protocol errors are counted and skipped with state unchanged, which
    mirrors how the live service treats them, so a replayed log
    reproduces the live session's final state and committed ratings.
    """
    states: dict[str, SessionState] = {}
    ratings: list[ReplayedRating] = []
    errors = 0
    total = 0
    for event in events:
        total += 1
        state = states.get(event.session_id, INITIAL_STATE)
        try:
            new_state = handle_event(state, event, pmap)
        except ProtocolError as exc:
            logger.debug("replay: protocol error ignored: %s", exc)
            errors += 1
            continue
        if event.event_type == "confirm" and new_state.committed is not None:
            ratings.append(ReplayedRating(
                session_id=event.session_id,
                subject_id=event.subject_id,
                method=event.method,
                stimulus_id=new_state.committed.stimulus_id,
                t_mono=event.t_mono,
                rating=new_state.committed,
            ))
        states[event.session_id] = new_state
    return ReplayResult(states, ratings, errors, total)


# ---------------------------------------------------------------------------
# event log


class EventLog:
    """Append-only JSON Lines event log with per-session monotonicity."""

    def __init__(self, path: str | os.PathLike[str]):
        self.path = os.fspath(path)
        self._last_t: dict[str, int] = {}
        if os.path.exists(self.path):
            for event in read_event_log(self.path):
                self._last_t[event.session_id] = event.t_mono
        self._fh = open(self.path, "a", encoding="utf-8")

    def check_clock(self, event: RatingEvent) -> None:
        last = self._last_t.get(event.session_id)
        if last is not None and event.t_mono < last:
            raise ClockError(
                f"t_mono regressed in session {event.session_id!r}: {event.t_mono} < {last}"
            )

    def last_t_mono(self, session_id: str) -> int | None:
        """Highest t_mono accepted for a session, or None before its first event.

        Clients resuming a session use this floor to keep their clocks monotonic.
        """
        return self._last_t.get(session_id)

    def append(self, event: RatingEvent) -> None:
        validate_event(event)
        self.check_clock(event)
        self._fh.write(event_to_json_line(event) + "\n")
        self._fh.flush()
        os.fsync(self._fh.fileno())
        self._last_t[event.session_id] = event.t_mono

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "EventLog":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def read_event_log(path: str | os.PathLike[str]) -> list[RatingEvent]:
    events: list[RatingEvent] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                events.append(event_from_json_line(line))
            except EventValidationError as exc:
                raise EventValidationError(f"{path}:{lineno}: {exc}") from None
    return events


# ---------------------------------------------------------------------------
# durations


@dataclass(frozen=True)
class RatingDuration:
    session_id: str
    method: str
    stimulus_id: str | None
    millis: int

    @property
    def seconds(self) -> float:
        return self.millis / 1000.0


@dataclass(frozen=True)
class Aggregate:
    count: int
    mean_s: float
    sd_s: float


def _aggregate(millis: Sequence[int]) -> Aggregate:
    """Mean/SD in seconds from exact integer millisecond sums.

    Integer accumulation makes the result independent of summation
    order, so merged per-session reports match whole-log reports
    bit-for-bit. SD is the sample SD; singleton groups report 0.0.
    """
    n = len(millis)
    total = sum(millis)
    mean_s = total / (n * 1000.0)
    if n < 2:
        return Aggregate(n, mean_s, 0.0)
    sq = sum(m * m for m in millis)
    num = sq - (total * total) / n
    if num < 0.0:  # guard against float rounding of the exact-zero case
        num = 0.0
    return Aggregate(n, mean_s, math.sqrt(num / (n - 1)) / 1000.0)


@dataclass(frozen=True)
class DurationReport:
    ratings: tuple[RatingDuration, ...]
    excluded: int

    def _groups(self, key) -> dict:
        grouped: dict = {}
        for r in self.ratings:
            grouped.setdefault(key(r), []).append(r.millis)
        return grouped

    def per_mode(self) -> dict[str, Aggregate]:
        def mode(r: RatingDuration) -> str:
            return MODE_VRR if r.method in VR_METHODS else MODE_PPR

        return {k: _aggregate(v) for k, v in sorted(self._groups(mode).items())}

    def per_method(self) -> dict[str, Aggregate]:
        groups = self._groups(lambda r: r.method)
        return {m: _aggregate(groups[m]) for m in METHODS if m in groups}

    def per_method_stimulus(self) -> dict[tuple[str, str | None], Aggregate]:
        groups = self._groups(lambda r: (r.method, r.stimulus_id))
        return {k: _aggregate(groups[k]) for k in sorted(groups, key=lambda k: (k[0], k[1] or ""))}

    @staticmethod
    def merge(reports: Iterable["DurationReport"]) -> "DurationReport":
        ratings: list[RatingDuration] = []
        excluded = 0
        for report in reports:
            ratings.extend(report.ratings)
            excluded += report.excluded
        return DurationReport(tuple(ratings), excluded)


def compute_durations(events: Iterable[RatingEvent]) -> DurationReport:
    """Pair start/end timing events into per-rating durations.

    In-headset methods pair rating_shown -> confirm; paper methods pair
    hmd_removed -> hmd_reattached, keyed by (session, method,
    stimulus). An end without an open start, and any start left
    unmatched (including one displaced by a newer start), is counted as
    excluded. Events must be time-ordered per session.
    """
    open_pairs: dict[tuple[str, str, str, str | None], int] = {}
    last_t: dict[str, int] = {}
    durations: list[RatingDuration] = []
    excluded = 0

    def start_kind(event: RatingEvent) -> str | None:
        if event.event_type == "rating_shown" and event.method in VR_METHODS:
            return "vr"
        if event.event_type == "hmd_removed" and event.method in PP_METHODS:
            return "pp"
        return None

    def end_kind(event: RatingEvent) -> str | None:
        if event.event_type == "confirm" and event.method in VR_METHODS:
            return "vr"
        if event.event_type == "hmd_reattached" and event.method in PP_METHODS:
            return "pp"
        return None

    for event in events:
        last = last_t.get(event.session_id)
        if last is not None and event.t_mono < last:
            raise ClockError(
                f"events not time-ordered in session {event.session_id!r}: "
                f"{event.t_mono} < {last}"
            )
        last_t[event.session_id] = event.t_mono
        kind = start_kind(event)
        if kind is not None:
            key = (kind, event.session_id, event.method, event.stimulus_id)
            if key in open_pairs:
                excluded += 1  # displaced unmatched start
            open_pairs[key] = event.t_mono
            continue
        kind = end_kind(event)
        if kind is not None:
            key = (kind, event.session_id, event.method, event.stimulus_id)
            if key in open_pairs:
                durations.append(RatingDuration(
                    event.session_id, event.method, event.stimulus_id,
                    event.t_mono - open_pairs.pop(key),
                ))
            else:
                excluded += 1
    excluded += len(open_pairs)
    return DurationReport(tuple(durations), excluded)
