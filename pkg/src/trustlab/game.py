"""Deterministic state machine for the repeated trust game.

The subject plays one practice round as Participant B, then 11 scored rounds
alternating roles: odd rounds as A (they send, the counterpart returns), even
rounds as B (the counterpart sends, they return). Sends are tripled in transit.
All operations are pure transitions on an explicit match state.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from .strategy import Treatment


class GameError(ValueError):
    """Base for rule violations in the game state machine."""


class InvalidConfig(GameError):
    pass


class InvalidMove(GameError):
    pass


class OutOfTurn(GameError):
    pass


class Role(str, Enum):
    A = "A"
    B = "B"


@dataclass(frozen=True)
class GameConfig:
    endowment: int = 10
    multiplier: int = 3
    scored_rounds: int = 11
    practice_rounds: int = 1

    def __post_init__(self):
        if self.endowment <= 0:
            raise InvalidConfig(f"endowment must be positive, got {self.endowment}")
        if self.multiplier < 1:
            raise InvalidConfig(f"multiplier must be >= 1, got {self.multiplier}")
        if self.scored_rounds < 1:
            raise InvalidConfig(f"scored_rounds must be >= 1, got {self.scored_rounds}")
        if self.practice_rounds < 0:
            raise InvalidConfig(f"practice_rounds must be >= 0, got {self.practice_rounds}")

    @property
    def max_send(self) -> int:
        return self.endowment

    @property
    def total_rounds(self) -> int:
        return self.practice_rounds + self.scored_rounds


def role_for_round(round_index: int, config: GameConfig = GameConfig()) -> Role:
    """Subject's role in a round: 0 (practice) -> B, odd -> A, even -> B."""
    if not 0 <= round_index <= config.scored_rounds:
        raise OutOfTurn(f"round index {round_index} beyond match length")
    if round_index == 0:
        return Role.B
    return Role.A if round_index % 2 == 1 else Role.B


@dataclass(frozen=True)
class RoundRecord:
    round_index: int
    role: Role
    sent: int
    tripled: int
    returned: int | None = None
    subject_payoff: int | None = None
    counterpart_payoff: int | None = None

    @property
    def is_practice(self) -> bool:
        return self.round_index == 0

    @property
    def closed(self) -> bool:
        return self.returned is not None


@dataclass(frozen=True)
class MatchState:
    treatment: Treatment
    config: GameConfig
    rng_seed: int
    rounds: tuple[RoundRecord, ...] = ()
    cumulative_payoff: int = 0

    @property
    def open_round(self) -> RoundRecord | None:
        if self.rounds and not self.rounds[-1].closed:
            return self.rounds[-1]
        return None

    @property
    def next_round_index(self) -> int:
        """Index of the round awaiting its send (practice counts as index 0)."""
        return len(self.rounds)

    @property
    def complete(self) -> bool:
        return (
            len(self.rounds) == self.config.total_rounds
            and self.open_round is None
        )


def new_match(treatment: Treatment, config: GameConfig, seed: int) -> MatchState:
    """Fresh match: no rounds played, practice round (role B) up first."""
    return MatchState(treatment=treatment, config=config, rng_seed=seed)


def apply_send(state: MatchState, x: int) -> MatchState:
    """Open the next round with a send of x; the round then awaits a return."""
    if state.open_round is not None:
        raise OutOfTurn("previous round still awaits its return")
    if state.complete:
        raise OutOfTurn("match already complete")
    index = state.next_round_index
    if not isinstance(x, int) or isinstance(x, bool):
        raise InvalidMove(f"send must be an integer dollar amount, got {x!r}")
    if not 0 <= x <= state.config.endowment:
        raise InvalidMove(f"send {x} outside [0, {state.config.endowment}]")
    record = RoundRecord(
        round_index=index,
        role=role_for_round(index, state.config),
        sent=x,
        tripled=state.config.multiplier * x,
    )
    return replace(state, rounds=state.rounds + (record,))


def apply_return(state: MatchState, y: int) -> MatchState:
    """Close the open round with a return of y and settle payoffs."""
    record = state.open_round
    if record is None:
        raise OutOfTurn("no round awaiting a return")
    if not isinstance(y, int) or isinstance(y, bool):
        raise InvalidMove(f"return must be an integer dollar amount, got {y!r}")
    if not 0 <= y <= record.tripled:
        raise InvalidMove(f"return {y} outside [0, {record.tripled}]")
    endowment = state.config.endowment
    if record.role == Role.A:
        subject = endowment - record.sent + y
        counterpart = record.tripled - y
    else:
        subject = record.tripled - y
        counterpart = endowment - record.sent + y
    closed = replace(
        record, returned=y, subject_payoff=subject, counterpart_payoff=counterpart
    )
    cumulative = state.cumulative_payoff + (0 if record.is_practice else subject)
    return replace(
        state, rounds=state.rounds[:-1] + (closed,), cumulative_payoff=cumulative
    )
