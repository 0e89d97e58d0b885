"""Algorithmic counterpart strategies for the trust game.

A strategy table holds, per treatment arm, the send distribution used when the
bot plays as Participant A and the per-amount return triples used when it plays
as Participant B. Tables are validated so that for every amount sent, the
expected return in the high-trust arm weakly dominates the low-trust arm.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import yaml

MAX_SEND = 10
HIGH_SEND_SUPPORT = (7, 8, 9, 10)
LOW_SEND_SUPPORT = (0, 1, 2, 3)
DEFAULT_PRACTICE_SEND = 5


class Treatment(str, Enum):
    HIGH_TRUST = "high_trust"
    LOW_TRUST = "low_trust"


class StrategyError(ValueError):
    """Malformed or constraint-violating strategy configuration."""


@dataclass(frozen=True)
class SendDistribution:
    """Support and relative frequencies for the bot's Participant-A sends."""

    support: tuple[int, ...]
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.support) != len(self.weights):
            raise StrategyError("support and weights must have equal length")
        if not self.support:
            raise StrategyError("send distribution must have nonempty support")
        if any(w <= 0 for w in self.weights):
            raise StrategyError("all weights on the support must be positive")
        total = sum(self.weights)
        object.__setattr__(
            self, "weights", tuple(Fraction(w, 1) / total for w in self.weights)
        )

    def sample(self, rng: random.Random) -> int:
        return rng.choices(self.support, weights=[float(w) for w in self.weights])[0]


@dataclass(frozen=True)
class StrategyTable:
    """One treatment arm's complete bot strategy."""

    treatment: Treatment
    send: SendDistribution
    returns: dict[int, tuple[int, int, int]]
    practice_send: int = DEFAULT_PRACTICE_SEND
    version: str = "default-v1"

    def __post_init__(self):
        for x in range(MAX_SEND + 1):
            triple = self.returns.get(x)
            if triple is None:
                raise StrategyError(f"missing return triple for x={x}")
            if len(triple) != 3:
                raise StrategyError(f"return entry for x={x} must be a triple")
            for y in triple:
                if not isinstance(y, int) or not 0 <= y <= 3 * x:
                    raise StrategyError(
                        f"return {y} for x={x} outside [0, {3 * x}] or non-integer"
                    )


@dataclass
class ValidationReport:
    """Outcome of cross-treatment strategy validation."""

    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def expected_return(table: StrategyTable, x: int) -> Fraction:
    """Exact-rational mean of the return triple for amount x."""
    if not 0 <= x <= MAX_SEND:
        raise StrategyError(f"x={x} outside [0, {MAX_SEND}]")
    triple = table.returns[x]
    return Fraction(sum(triple), 3)


def validate_strategy_table(high: StrategyTable, low: StrategyTable) -> ValidationReport:
    """Check both arms against the support and dominance constraints.

    Violations are collected, not raised, so a config file can be rejected with
    a complete diagnostic list.
    """
    report = ValidationReport()
    if high.treatment != Treatment.HIGH_TRUST or low.treatment != Treatment.LOW_TRUST:
        report.violations.append("tables passed in the wrong treatment order")
    for value in high.send.support:
        if value not in HIGH_SEND_SUPPORT:
            report.violations.append(
                f"high-trust send support contains {value}, allowed {HIGH_SEND_SUPPORT}"
            )
    for value in low.send.support:
        if value not in LOW_SEND_SUPPORT:
            report.violations.append(
                f"low-trust send support contains {value}, allowed {LOW_SEND_SUPPORT}"
            )
    if high.practice_send != low.practice_send:
        report.violations.append(
            f"practice send differs across arms: {high.practice_send} vs {low.practice_send}"
        )
    for x in range(MAX_SEND + 1):
        mean_high = expected_return(high, x)
        mean_low = expected_return(low, x)
        if mean_high < mean_low:
            report.violations.append(
                f"dominance violated at x={x}: E[high]={mean_high} < E[low]={mean_low}"
            )
    return report


def bot_send(table: StrategyTable, round_index: int, rng: random.Random) -> int:
    """Amount the bot sends as Participant A in the given round."""
    if round_index == 0:
        return table.practice_send
    return table.send.sample(rng)


def bot_return(table: StrategyTable, x: int, rng: random.Random) -> int:
    """Uniform draw from the return triple for amount x."""
    if not 0 <= x <= MAX_SEND:
        raise StrategyError(f"x={x} outside [0, {MAX_SEND}]")
    return rng.choice(table.returns[x])


def _scaled_triple(base: tuple[int, int, int], x: int, round_up: bool) -> tuple[int, int, int]:
    # Scale the x=5 anchor triple to another send amount, clamped to [0, 3x].
    rounder = math.ceil if round_up else math.floor
    return tuple(min(3 * x, max(0, rounder(v * x / 5))) for v in base)


def default_tables(version: str = "default-v1") -> tuple[StrategyTable, StrategyTable]:
    """Shipped default strategy pair.

    Send weights are uniform over each arm's support. Return triples anchor at
    x=5 (high: 7/8/10, low: 2/1/0) and scale proportionally to other amounts,
    rounding up in the high arm and down in the low arm so dominance holds at
    every x.
    """
    high_anchor = (7, 8, 10)
    low_anchor = (2, 1, 0)
    high = StrategyTable(
        treatment=Treatment.HIGH_TRUST,
        send=SendDistribution(HIGH_SEND_SUPPORT, tuple(Fraction(1) for _ in HIGH_SEND_SUPPORT)),
        returns={x: _scaled_triple(high_anchor, x, round_up=True) for x in range(MAX_SEND + 1)},
        version=version,
    )
    low = StrategyTable(
        treatment=Treatment.LOW_TRUST,
        send=SendDistribution(LOW_SEND_SUPPORT, tuple(Fraction(1) for _ in LOW_SEND_SUPPORT)),
        returns={x: _scaled_triple(low_anchor, x, round_up=False) for x in range(MAX_SEND + 1)},
        version=version,
    )
    report = validate_strategy_table(high, low)
    assert report.ok, report.violations
    return high, low


def _table_from_dict(treatment: Treatment, raw: dict, version: str) -> StrategyTable:
    try:
        send = SendDistribution(
            support=tuple(int(v) for v in raw["send"]["support"]),
            weights=tuple(Fraction(str(w)) for w in raw["send"]["weights"]),
        )
        returns = {int(x): tuple(int(y) for y in triple) for x, triple in raw["returns"].items()}
        practice_send = int(raw.get("practice_send", DEFAULT_PRACTICE_SEND))
    except (KeyError, TypeError, ValueError) as exc:
        raise StrategyError(f"malformed strategy config for {treatment.value}: {exc}") from exc
    return StrategyTable(treatment, send, returns, practice_send, version)


def load_strategy_config(path) -> tuple[StrategyTable, StrategyTable]:
    """Load and validate a strategy config file; reject on any violation."""
    with open(path) as fh:
        raw = yaml.safe_load(fh)
    return parse_strategy_config(raw)


def parse_strategy_config(raw: dict) -> tuple[StrategyTable, StrategyTable]:
    if not isinstance(raw, dict):
        raise StrategyError("strategy config must be a mapping")
    version = str(raw.get("version", "unversioned"))
    try:
        high = _table_from_dict(Treatment.HIGH_TRUST, raw["high_trust"], version)
        low = _table_from_dict(Treatment.LOW_TRUST, raw["low_trust"], version)
    except KeyError as exc:
        raise StrategyError(f"strategy config missing section: {exc}") from exc
    report = validate_strategy_table(high, low)
    if not report.ok:
        raise StrategyError("; ".join(report.violations))
    return high, low


def dump_strategy_config(high: StrategyTable, low: StrategyTable) -> dict:
    """Round-trippable dict form of a strategy pair."""

    def table_dict(table: StrategyTable) -> dict:
        return {
            "send": {
                "support": list(table.send.support),
                "weights": [str(w) for w in table.send.weights],
            },
            "returns": {x: list(triple) for x, triple in sorted(table.returns.items())},
            "practice_send": table.practice_send,
        }

    return {
        "version": high.version,
        "high_trust": table_dict(high),
        "low_trust": table_dict(low),
    }


def write_strategy_config(path, high: StrategyTable, low: StrategyTable) -> None:
    with open(path, "w") as fh:
        yaml.safe_dump(dump_strategy_config(high, low), fh, sort_keys=False)
