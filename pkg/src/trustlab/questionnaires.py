"""Question banks, per-subject order randomization, validation, and coding
for the time-preference, trust, certainty, and demographics instruments."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum

from .strategy import Treatment


class ResponseError(ValueError):
    """Answer rejected by instrument validation."""


class Choice(str, Enum):
    PRESENT = "present"
    FUTURE = "future"


# Present value p for each (future value m, delay t in weeks). p is shared
# within the {1, 2} week pair and within the {4, 8} week pair for every m.
FUTURE_VALUES = (25, 30, 40)
DELAYS_WEEKS = (1, 2, 4, 8)
PRESENT_VALUES: dict[tuple[int, int], int] = {
    (25, 1): 21, (25, 2): 21, (25, 4): 19, (25, 8): 19,
    (30, 1): 26, (30, 2): 26, (30, 4): 23, (30, 8): 23,
    (40, 1): 34, (40, 2): 34, (40, 4): 31, (40, 8): 31,
}

SLIDER_MIN, SLIDER_MAX = -50, 50
CERTAINTY_MIN, CERTAINTY_MAX = 0, 100
DEFAULT_CERTAINTY_HORIZONS = (5, 10)  # years; the instrument text leaves t open

REVERSED_TRUST_IDS = frozenset({2, 3})

AGREEMENT_LABELS = {
    -50: "disagree strongly",
    -25: "disagree somewhat",
    0: "neutral",
    25: "agree somewhat",
    50: "agree strongly",
}


@dataclass(frozen=True)
class TrustQuestion:
    question_id: int
    text: str
    labels: dict[int, str]


TRUST_QUESTIONS: dict[int, TrustQuestion] = {
    1: TrustQuestion(
        1,
        "How much do you agree with the following statement: "
        "In general, you can trust people.",
        AGREEMENT_LABELS,
    ),
    2: TrustQuestion(
        2,
        "How much do you agree with the following statement: "
        "Nowadays, you can't rely on anybody.",
        AGREEMENT_LABELS,
    ),
    3: TrustQuestion(
        3,
        "How much do you agree with the following statement: "
        "When dealing with strangers, it's better to be cautious "
        "before trusting them.",
        AGREEMENT_LABELS,
    ),
    4: TrustQuestion(
        4,
        "How much do you trust strangers you meet for the first time?",
        {
            -50: "I don't trust them at all",
            -25: "I trust them very little",
            25: "I trust them quite a bit",
            50: "I trust them a lot",
        },
    ),
    5: TrustQuestion(
        5,
        "Imagine you lost your wallet with your money, identification or "
        "address in your city/area and it was found by a stranger. How likely "
        "do you think your wallet would be returned to you?",
        {
            -50: "Not likely at all",
            -25: "Not very likely",
            25: "Fairly likely",
            50: "Very likely",
        },
    ),
}

# Closed category codes for the demographic battery. Stable codes keep the
# downstream dummy construction deterministic.
DEMOGRAPHIC_CATEGORIES: dict[str, tuple[str, ...]] = {
    "gender": ("female", "male", "nonbinary", "prefer_not_to_say"),
    "age_band": ("18_24", "25_34", "35_44", "45_plus"),
    "ethnicity": ("asian", "black", "hispanic", "white", "other"),
    "education": ("high_school", "bachelors", "masters", "doctorate"),
    "major": ("economics", "psychology", "other", "none"),
    "religious_practice": ("practicing", "non_practicing"),
}


@dataclass(frozen=True)
class TimePrefItem:
    m: int
    t_weeks: int
    p: int
    future_first: bool  # answer-order flag: whether the future option shows first

    def __post_init__(self):
        expected = PRESENT_VALUES.get((self.m, self.t_weeks))
        if expected is None:
            raise ResponseError(f"unknown (m, t) pair ({self.m}, {self.t_weeks})")
        if self.p != expected:
            raise ResponseError(
                f"present value for (m={self.m}, t={self.t_weeks}) must be "
                f"{expected}, got {self.p}"
            )


@dataclass(frozen=True)
class CertaintyItem:
    horizon_years: int
    agreement: int  # slider in [-50, 50]
    certainty: int  # slider in [0, 100]


@dataclass
class ResponseSet:
    """Everything one subject answered, with the orders they saw recorded."""

    subject_id: str
    treatment: Treatment
    time_pref_order: list[TimePrefItem] = field(default_factory=list)
    time_pref_answers: dict[tuple[int, int], Choice] = field(default_factory=dict)
    trust_order: list[int] = field(default_factory=list)
    trust_raw: dict[int, int] = field(default_factory=dict)
    certainty: list[CertaintyItem] = field(default_factory=list)
    demographics: dict[str, str] = field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return (
            len(self.time_pref_answers) == len(PRESENT_VALUES)
            and len(self.trust_raw) == len(TRUST_QUESTIONS)
            and len(self.certainty) == 2
            and set(self.demographics) == set(DEMOGRAPHIC_CATEGORIES)
        )


def build_time_pref_sequence(rng: random.Random) -> list[TimePrefItem]:
    """Random permutation of the full 3x4 (m, t) grid, each item with an
    independently fair answer-order flag."""
    grid = [(m, t) for m in FUTURE_VALUES for t in DELAYS_WEEKS]
    rng.shuffle(grid)
    return [
        TimePrefItem(m, t, PRESENT_VALUES[(m, t)], future_first=rng.random() < 0.5)
        for m, t in grid
    ]


def build_trust_sequence(rng: random.Random) -> list[int]:
    """Random permutation of the five trust-question ids."""
    order = list(TRUST_QUESTIONS)
    rng.shuffle(order)
    return order


def code_trust(raw: dict[int, int]) -> dict[int, int]:
    """Sign-flip the negatively phrased items so all five point the same way."""
    if set(raw) != set(TRUST_QUESTIONS):
        raise ResponseError(f"expected answers for questions {sorted(TRUST_QUESTIONS)}")
    for qid, value in raw.items():
        validate_slider(value)
    return {qid: -v if qid in REVERSED_TRUST_IDS else v for qid, v in raw.items()}


def validate_slider(value, lo: int = SLIDER_MIN, hi: int = SLIDER_MAX) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ResponseError(f"slider value must be an integer, got {value!r}")
    if not lo <= value <= hi:
        raise ResponseError(f"slider value {value} outside [{lo}, {hi}]")
    return value


def validate_certainty(value) -> int:
    return validate_slider(value, CERTAINTY_MIN, CERTAINTY_MAX)


def validate_choice(answer) -> Choice:
    try:
        return Choice(answer)
    except ValueError:
        raise ResponseError(
            f"binary answer must be one of {[c.value for c in Choice]}, got {answer!r}"
        ) from None


def validate_demographics(answers: dict) -> dict[str, str]:
    missing = set(DEMOGRAPHIC_CATEGORIES) - set(answers)
    if missing:
        raise ResponseError(f"missing demographic fields: {sorted(missing)}")
    extra = set(answers) - set(DEMOGRAPHIC_CATEGORIES)
    if extra:
        raise ResponseError(f"unknown demographic fields: {sorted(extra)}")
    for name, value in answers.items():
        if value not in DEMOGRAPHIC_CATEGORIES[name]:
            raise ResponseError(
                f"{name}={value!r} not in {DEMOGRAPHIC_CATEGORIES[name]}"
            )
    return {name: answers[name] for name in DEMOGRAPHIC_CATEGORIES}
