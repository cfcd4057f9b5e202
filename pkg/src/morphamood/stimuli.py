"""Selection of a 16-clip stimulus subset from a rated corpus.

Ratings come in on a 1..9 scale and are centered at 5 before any
geometry. Per valence/arousal quadrant the procedure picks the
strongest and weakest record by Euclidean distance from the center,
one "balanced" record whose centered valence/arousal ratio is closest
to 1, and finally two records with near-neutral valence and two with
near-neutral arousal. A record ranking first in several categories
keeps the slot of the earliest category in the precedence order and
later categories move down their ranked candidate lists; every such
promotion is recorded in the audit trace.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .scales import center_deap

QUADRANTS = ("Q1", "Q2", "Q3", "Q4")
BOUNDARY = "boundary"

CATEGORY_EXTREMES = "extremes"
CATEGORY_BALANCED = "balanced"
CATEGORY_NEUTRAL = "neutral"
DEFAULT_CATEGORY_ORDER = (CATEGORY_EXTREMES, CATEGORY_BALANCED, CATEGORY_NEUTRAL)

RAW_MIN = 1.0
RAW_MAX = 9.0

SUBSET_SIZE = 16


class SelectionError(Exception):
    """Base class for selection failures."""


class CorpusFormatError(SelectionError):
    """Malformed corpus table."""


class InsufficientCandidatesError(SelectionError):
    """A category has no (or too few) eligible records."""


class UnfilledSlotsError(SelectionError):
    """Conflict resolution ran out of candidates for one or more slots."""

    def __init__(self, slots: Sequence[str]):
        self.slots = tuple(slots)
        super().__init__(f"no remaining candidates for slots: {', '.join(self.slots)}")


@dataclass(frozen=True)
class StimulusRecord:
    id: str
    valence_raw: float
    arousal_raw: float
    usable: bool = True

    def __post_init__(self) -> None:
        for label, value in (("valence", self.valence_raw), ("arousal", self.arousal_raw)):
            if not (RAW_MIN <= value <= RAW_MAX):  # also rejects NaN
                raise ValueError(
                    f"record {self.id!r}: {label} {value!r} outside [{RAW_MIN}, {RAW_MAX}]"
                )

    @property
    def centered(self) -> tuple[float, float]:
        return center_deap(self.valence_raw), center_deap(self.arousal_raw)

    @property
    def origin_distance(self) -> float:
        v, a = self.centered
        return math.hypot(v, a)


def quadrant_of(v_centered: float, a_centered: float) -> str:
    """Quadrant of a centered score pair; zero components sit on a boundary.

    Q1 = (+,+), Q2 = (-,+), Q3 = (-,-), Q4 = (+,-).
    """
    if not (math.isfinite(v_centered) and math.isfinite(a_centered)):
        raise ValueError("centered scores must be finite")
    if v_centered == 0.0 or a_centered == 0.0:
        return BOUNDARY
    if v_centered > 0.0:
        return "Q1" if a_centered > 0.0 else "Q4"
    return "Q2" if a_centered > 0.0 else "Q3"


def _usable(corpus: Iterable[StimulusRecord]) -> list[StimulusRecord]:
    return [r for r in corpus if r.usable]


def _quadrant_members(corpus: Iterable[StimulusRecord], quadrant: str) -> list[StimulusRecord]:
    return [r for r in _usable(corpus) if quadrant_of(*r.centered) == quadrant]


def rank_strong(corpus: Iterable[StimulusRecord], quadrant: str) -> list[StimulusRecord]:
    return sorted(_quadrant_members(corpus, quadrant), key=lambda r: (-r.origin_distance, r.id))


def rank_weak(corpus: Iterable[StimulusRecord], quadrant: str) -> list[StimulusRecord]:
    return sorted(_quadrant_members(corpus, quadrant), key=lambda r: (r.origin_distance, r.id))


def rank_balanced(corpus: Iterable[StimulusRecord], quadrant: str) -> list[StimulusRecord]:
    # quadrant membership already excludes zero-arousal records, so the
    # ratio below is defined for every candidate
    def deviation(r: StimulusRecord) -> float:
        v, a = r.centered
        return abs(v / a - 1.0)

    return sorted(_quadrant_members(corpus, quadrant), key=lambda r: (deviation(r), r.id))


def rank_neutral_valence(corpus: Iterable[StimulusRecord]) -> list[StimulusRecord]:
    return sorted(_usable(corpus), key=lambda r: (abs(r.centered[0]), r.id))


def rank_neutral_arousal(corpus: Iterable[StimulusRecord]) -> list[StimulusRecord]:
    return sorted(_usable(corpus), key=lambda r: (abs(r.centered[1]), r.id))


def select_extremes(corpus: Sequence[StimulusRecord]) -> dict[str, tuple[str, str]]:
    """Per quadrant: (strongest, weakest) record ids by origin distance.

    Ties resolve to the lexicographically smaller id. Raises
    InsufficientCandidatesError naming the first deficient quadrant.
    """
    out: dict[str, tuple[str, str]] = {}
    for q in QUADRANTS:
        members = _quadrant_members(corpus, q)
        if len(members) < 2:
            raise InsufficientCandidatesError(
                f"quadrant {q} has {len(members)} usable record(s), need at least 2"
            )
        out[q] = (rank_strong(corpus, q)[0].id, rank_weak(corpus, q)[0].id)
    return out


def select_balanced(corpus: Sequence[StimulusRecord]) -> dict[str, str]:
    """Per quadrant: the id whose centered valence/arousal ratio is nearest 1."""
    out: dict[str, str] = {}
    for q in QUADRANTS:
        ranked = rank_balanced(corpus, q)
        if not ranked:
            raise InsufficientCandidatesError(f"quadrant {q} has no usable record for balanced pick")
        out[q] = ranked[0].id
    return out


def select_neutral(corpus: Sequence[StimulusRecord]) -> tuple[tuple[str, str], tuple[str, str]]:
    """Two ids nearest neutral valence and two nearest neutral arousal."""
    nv = rank_neutral_valence(corpus)
    na = rank_neutral_arousal(corpus)
    if len(nv) < 2 or len(na) < 2:
        raise InsufficientCandidatesError("fewer than 2 usable records for neutral picks")
    return (nv[0].id, nv[1].id), (na[0].id, na[1].id)


@dataclass(frozen=True)
class Slot:
    """One of the 16 subset positions with its ranked candidate ids."""

    name: str
    category: str
    ranked_ids: tuple[str, ...]
    # metric value per candidate, aligned with ranked_ids (for the audit)
    metrics: tuple[float, ...]


@dataclass
class SelectionResult:
    quadrants: dict[str, dict[str, str]]  # quadrant -> {strong, weak, balanced}
    neutral_valence: tuple[str, str]
    neutral_arousal: tuple[str, str]
    by_slot: dict[str, str]
    audit: dict

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(self.by_slot.values())

    def to_dict(self) -> dict:
        return {
            "selected": {
                **{q: dict(picks) for q, picks in self.quadrants.items()},
                "neutral_valence": list(self.neutral_valence),
                "neutral_arousal": list(self.neutral_arousal),
            },
            "ids": list(self.ids),
            "audit": self.audit,
        }


def _build_slots(corpus: Sequence[StimulusRecord],
                 category_order: Sequence[str]) -> list[Slot]:
    def slot(name: str, category: str, ranked: list[StimulusRecord], metric) -> Slot:
        return Slot(name, category,
                    tuple(r.id for r in ranked),
                    tuple(metric(r) for r in ranked))

    def ratio_dev(r: StimulusRecord) -> float:
        v, a = r.centered
        return abs(v / a - 1.0)

    by_category: dict[str, list[Slot]] = {CATEGORY_EXTREMES: [], CATEGORY_BALANCED: [], CATEGORY_NEUTRAL: []}
    for q in QUADRANTS:
        by_category[CATEGORY_EXTREMES].append(
            slot(f"{q}.strong", CATEGORY_EXTREMES, rank_strong(corpus, q), lambda r: r.origin_distance))
        by_category[CATEGORY_EXTREMES].append(
            slot(f"{q}.weak", CATEGORY_EXTREMES, rank_weak(corpus, q), lambda r: r.origin_distance))
    for q in QUADRANTS:
        by_category[CATEGORY_BALANCED].append(
            slot(f"{q}.balanced", CATEGORY_BALANCED, rank_balanced(corpus, q), ratio_dev))
    nv = rank_neutral_valence(corpus)
    na = rank_neutral_arousal(corpus)
    by_category[CATEGORY_NEUTRAL].append(
        slot("neutral_valence.1", CATEGORY_NEUTRAL, nv, lambda r: abs(r.centered[0])))
    by_category[CATEGORY_NEUTRAL].append(
        slot("neutral_valence.2", CATEGORY_NEUTRAL, nv, lambda r: abs(r.centered[0])))
    by_category[CATEGORY_NEUTRAL].append(
        slot("neutral_arousal.1", CATEGORY_NEUTRAL, na, lambda r: abs(r.centered[1])))
    by_category[CATEGORY_NEUTRAL].append(
        slot("neutral_arousal.2", CATEGORY_NEUTRAL, na, lambda r: abs(r.centered[1])))

    ordered: list[Slot] = []
    for category in category_order:
        ordered.extend(by_category[category])
    return ordered


def _assign(slots: Sequence[Slot]) -> tuple[dict[str, str], list[dict], list[str]]:
    """Greedy assignment in precedence order with promotion on conflicts."""
    taken: dict[str, str] = {}  # id -> slot that holds it
    picks: dict[str, str] = {}
    promotions: list[dict] = []
    unfilled: list[str] = []
    for s in slots:
        chosen = None
        for candidate in s.ranked_ids:
            if candidate not in taken:
                chosen = candidate
                break
            promotions.append({"slot": s.name, "skipped": candidate, "held_by": taken[candidate]})
        if chosen is None:
            unfilled.append(s.name)
        else:
            taken[chosen] = s.name
            picks[s.name] = chosen
    return picks, promotions, unfilled


def select_protocol(corpus: Sequence[StimulusRecord],
                    category_order: Sequence[str] = DEFAULT_CATEGORY_ORDER) -> SelectionResult:
    """Run the full 16-slot selection with conflict resolution and audit trace."""
    if sorted(category_order) != sorted(DEFAULT_CATEGORY_ORDER):
        raise SelectionError(
            f"category order must be a permutation of {DEFAULT_CATEGORY_ORDER}, got {tuple(category_order)}"
        )
    ids = [r.id for r in corpus]
    if len(ids) != len(set(ids)):
        raise CorpusFormatError("corpus contains duplicate record ids")

    slots = _build_slots(corpus, category_order)
    picks, promotions, unfilled = _assign(slots)
    if unfilled:
        raise UnfilledSlotsError(unfilled)

    quadrants = {
        q: {
            "strong": picks[f"{q}.strong"],
            "weak": picks[f"{q}.weak"],
            "balanced": picks[f"{q}.balanced"],
        }
        for q in QUADRANTS
    }
    notes: list[str] = []
    if tuple(category_order) != DEFAULT_CATEGORY_ORDER:
        default_picks, _, default_unfilled = _assign(_build_slots(corpus, DEFAULT_CATEGORY_ORDER))
        if default_unfilled or default_picks != picks:
            changed = sorted(
                name for name in set(default_picks) | set(picks)
                if default_picks.get(name) != picks.get(name)
            )
            notes.append(
                "configured category order changes the outcome for slots: " + ", ".join(changed)
            )
    audit = {
        "category_order": list(category_order),
        "rankings": {
            s.name: [{"id": i, "metric": m} for i, m in zip(s.ranked_ids, s.metrics)]
            for s in slots
        },
        "promotions": promotions,
        "notes": notes,
    }
    result = SelectionResult(
        quadrants=quadrants,
        neutral_valence=(picks["neutral_valence.1"], picks["neutral_valence.2"]),
        neutral_arousal=(picks["neutral_arousal.1"], picks["neutral_arousal.2"]),
        by_slot=picks,
        audit=audit,
    )
    assert len(set(result.ids)) == SUBSET_SIZE
    return result


# ---------------------------------------------------------------------------
# corpus ingestion

CORPUS_HEADER = ("id", "valence", "arousal", "usable")
_TRUE_WORDS = frozenset({"true", "1", "yes"})
_FALSE_WORDS = frozenset({"false", "0", "no"})


def parse_usable(token: str) -> bool:
    word = token.strip().lower()
    if word in _TRUE_WORDS:
        return True
    if word in _FALSE_WORDS:
        return False
    raise CorpusFormatError(f"unrecognized usable flag {token!r}")


def read_corpus_csv(path: str) -> list[StimulusRecord]:
    """Read a corpus table with header id,valence,arousal,usable."""
    records: list[StimulusRecord] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CorpusFormatError("corpus file is empty") from None
        if tuple(h.strip() for h in header) != CORPUS_HEADER:
            raise CorpusFormatError(f"corpus header must be {','.join(CORPUS_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(CORPUS_HEADER):
                raise CorpusFormatError(f"line {lineno}: expected {len(CORPUS_HEADER)} fields")
            rid = row[0].strip()
            if not rid:
                raise CorpusFormatError(f"line {lineno}: empty id")
            if rid in seen:
                raise CorpusFormatError(f"line {lineno}: duplicate id {rid!r}")
            seen.add(rid)
            try:
                valence = float(row[1])
                arousal = float(row[2])
            except ValueError:
                raise CorpusFormatError(f"line {lineno}: non-numeric rating") from None
            try:
                records.append(StimulusRecord(rid, valence, arousal, parse_usable(row[3])))
            except ValueError as exc:
                raise CorpusFormatError(f"line {lineno}: {exc}") from None
    return records
