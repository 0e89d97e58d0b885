"""Per-subject preference measures from raw responses.

The 12 binary present-vs-future items pair up into 6 blocks sharing (p, m) and
differing only in delay, each yielding one weekly discount factor D from
p = D^t * m under linear utility. Non-switching blocks only bound D, so every
estimate carries a censoring tag; non-monotone blocks are flagged, not dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .questionnaires import (
    Choice,
    CertaintyItem,
    FUTURE_VALUES,
    PRESENT_VALUES,
    validate_certainty,
)


class EstimationError(ValueError):
    pass


class Censoring(str, Enum):
    NONE = "none"
    UPPER = "upper_censored"  # always chose Future: at least this patient
    LOWER = "lower_censored"  # always chose Present: at most this patient


# Response pattern over (shorter delay, longer delay); F = Future, P = Present.
PATTERNS = ("FF", "FP", "PP", "PF")

TIMEFRAME_PAIRS = ((1, 2), (4, 8))


@dataclass(frozen=True)
class ChoiceBlock:
    block_id: str
    m: int
    p: int
    t_short: int
    t_long: int
    choice_short: Choice
    choice_long: Choice

    @property
    def pattern(self) -> str:
        short = "F" if self.choice_short == Choice.FUTURE else "P"
        long = "F" if self.choice_long == Choice.FUTURE else "P"
        return short + long


@dataclass(frozen=True)
class DiscountRateEstimate:
    block_id: str
    rate: float  # weekly discount factor D in (0, 1]
    censoring: Censoring
    pattern: str

    @property
    def non_monotone(self) -> bool:
        return self.pattern == "PF"


def blocks_from_responses(answers: dict[tuple[int, int], Choice]) -> list[ChoiceBlock]:
    """Pair the answered grid into 6 blocks: (m, {1,2}w) and (m, {4,8}w)."""
    missing = set(PRESENT_VALUES) - set(answers)
    if missing:
        raise EstimationError(f"incomplete grid, missing items: {sorted(missing)}")
    blocks = []
    for m in FUTURE_VALUES:
        for t_short, t_long in TIMEFRAME_PAIRS:
            blocks.append(
                ChoiceBlock(
                    block_id=f"m{m}_t{t_short}_{t_long}",
                    m=m,
                    p=PRESENT_VALUES[(m, t_short)],
                    t_short=t_short,
                    t_long=t_long,
                    choice_short=answers[(m, t_short)],
                    choice_long=answers[(m, t_long)],
                )
            )
    return blocks


def block_discount_rate(block: ChoiceBlock) -> DiscountRateEstimate:
    """Weekly discount factor implied by one block's pair of choices.

    With r = p/m: FF identifies only D >= r^(1/t_long) (upper-censored at the
    bound); FP attributes indifference to the shorter delay, D = r^(1/t_short);
    PP identifies only D <= r^(1/t_short) (lower-censored); PF is scored like
    FP but flagged non-monotone.
    """
    r = block.p / block.m
    pattern = block.pattern
    if pattern == "FF":
        rate = r ** (1.0 / block.t_long)
        censoring = Censoring.UPPER
    elif pattern == "PP":
        rate = r ** (1.0 / block.t_short)
        censoring = Censoring.LOWER
    else:  # FP or PF
        rate = r ** (1.0 / block.t_short)
        censoring = Censoring.NONE
    return DiscountRateEstimate(block.block_id, rate, censoring, pattern)


def attributed_delay(estimate_pattern: str, t_short: int, t_long: int) -> int:
    """Delay at which the estimate's D satisfies p = D^t * m exactly."""
    return t_long if estimate_pattern == "FF" else t_short


def mean_discount_rate(estimates: list[DiscountRateEstimate]) -> float:
    """Subject-level discount factor: arithmetic mean of the six block rates."""
    if len(estimates) != 6:
        raise EstimationError(f"expected 6 block estimates, got {len(estimates)}")
    return sum(e.rate for e in estimates) / 6


def certainty_scores(items: list[CertaintyItem]) -> list[int]:
    """One observation per certainty block, passed through on [0, 100]."""
    if len(items) != 2:
        raise EstimationError(f"expected 2 certainty blocks, got {len(items)}")
    return [validate_certainty(item.certainty) for item in items]
