"""Score ranges and the conversions between them.

The pictographic map scores valence and arousal on a 1..5 range; the
self-assessment manikin uses 1..9 and the DEAP ratings are centered at 5.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Final

VA_MIN: Final = 1.0
VA_MAX: Final = 5.0
SAM_MIN: Final = 1.0
SAM_MAX: Final = 9.0
DEAP_CENTER: Final = 5.0


@dataclass(frozen=True)
class VAScore:
    """A valence/arousal pair on the 1..5 map range."""

    valence: float
    arousal: float

    def as_dict(self) -> dict[str, float]:
        return {"valence": self.valence, "arousal": self.arousal}


def check_va_range(valence: float, arousal: float) -> None:
    """Raise ValueError unless both components are finite and within 1..5."""
    for label, value in (("valence", valence), ("arousal", arousal)):
        if not (VA_MIN <= value <= VA_MAX):  # also rejects NaN
            raise ValueError(f"{label} {value!r} outside [{VA_MIN}, {VA_MAX}]")


def sam9_to_5(x: float) -> float:
    """Rescale a 9-point manikin score onto the 5-point map range.

    Affine with fixed endpoints: 1 -> 1, 5 -> 3, 9 -> 5.
    """
    if not (SAM_MIN <= x <= SAM_MAX):
        raise ValueError(f"SAM score {x!r} outside [{SAM_MIN}, {SAM_MAX}]")
    return (x - 1.0) / 2.0 + 1.0


def sam5_to_9(y: float) -> float:
    """Inverse of :func:`sam9_to_5`."""
    if not (VA_MIN <= y <= VA_MAX):
        raise ValueError(f"score {y!r} outside [{VA_MIN}, {VA_MAX}]")
    return (y - 1.0) * 2.0 + 1.0


def center_deap(x: float) -> float:
    """Shift a 1..9 rating so the neutral midpoint 5 maps to 0."""
    if not math.isfinite(x):
        raise ValueError(f"rating {x!r} is not finite")
    return x - DEAP_CENTER
