"""Session orchestration: registration, treatment assignment, the staged
subject flow, append-only event persistence, dataset export, and the
payoff-weighted lottery.

Every mutation is realized by constructing an event and feeding it through a
single reducer (`_apply`), used identically for live play and for replaying a
persisted log, which guarantees replay reconstructs flows exactly. Public
methods validate inputs before any event is emitted.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Callable, Iterable

from . import game, questionnaires as q
from .events import EventLog, EventRecord
from .game import GameConfig, MatchState, Role
from .strategy import StrategyTable, Treatment, bot_return, bot_send, default_tables


class ServiceError(ValueError):
    pass


class UnknownSubject(ServiceError):
    pass


class StageError(ServiceError):
    """Submission does not match the subject's current stage."""


DEFAULT_SLOT_TIMES = (
    "10:00", "12:00", "14:00", "16:00", "18:00", "20:00", "22:00",
)

INSTRUCTIONS_TEXT = (
    "You will play a short investment game with other participants in this "
    "session, followed by a series of questions. All answers are anonymous. "
    "One participant will win a monetary reward; the chance of winning "
    "depends on your cumulative payoff in the game. Payments are made "
    "automatically online, regardless of the payment date."
)

DEBRIEF_TEXT = (
    "Thank you for participating. In the game stage your counterpart was a "
    "computer program, not another participant; it played pre-recorded "
    "strategies drawn from earlier human play. This was necessary to study "
    "how the interaction affects short-term beliefs, and was only used "
    "because sessions run online. The questionnaires measured time "
    "preference, trust in strangers, and certainty about future outcomes. "
    "Please acknowledge to finish."
)


class Stage(IntEnum):
    INSTRUCTIONS = 0
    PRACTICE = 1
    GAME = 2
    TIME_PREF = 3
    TRUST = 4
    CERTAINTY = 5
    DEMOGRAPHICS = 6
    DEBRIEF = 7
    DONE = 8


@dataclass(frozen=True)
class ServiceConfig:
    slot_times: tuple[str, ...] = DEFAULT_SLOT_TIMES
    seed: int = 0
    game: GameConfig = field(default_factory=GameConfig)
    certainty_horizons: tuple[int, int] = q.DEFAULT_CERTAINTY_HORIZONS
    wait_delay: tuple[float, float] = (3.0, 8.0)  # fake "other participant" delay, seconds
    reward_range: tuple[int, int] = (25, 40)

    def __post_init__(self):
        if len(self.slot_times) < 1:
            raise ServiceError("at least one session slot is required")
        if len(set(self.slot_times)) != len(self.slot_times):
            raise ServiceError("session slots must not overlap")
        if self.wait_delay[0] < 0 or self.wait_delay[1] < self.wait_delay[0]:
            raise ServiceError("wait_delay must be a nonnegative (min, max) pair")
        if self.reward_range[0] > self.reward_range[1]:
            raise ServiceError("reward_range must be a (low, high) pair")


@dataclass
class SubjectFlow:
    subject_id: str
    slot: str
    stage: Stage = Stage.INSTRUCTIONS
    treatment: Treatment | None = None
    match_seed: int | None = None
    match: MatchState | None = None
    responses: q.ResponseSet | None = None
    last_wait_seconds: float | None = None

    @property
    def awaiting(self) -> str | None:
        """What the subject must do next inside the game stages."""
        if self.stage not in (Stage.PRACTICE, Stage.GAME) or self.match is None:
            return None
        if self.match.open_round is not None:
            return "return" if self.match.open_round.role == Role.B else "bot_return"
        if self.match.complete:
            return None
        role = game.role_for_round(self.match.next_round_index, self.match.config)
        return "send" if role == Role.A else "bot_send"


@dataclass(frozen=True)
class LotteryResult:
    winner: str
    reward: int
    weights: dict[str, int]


class ExperimentService:
    """Single-session experiment orchestrator.

    Subjects progress independently; each subject's events are serialized by
    the per-subject sequence number. Randomness is derived per subject from the
    service seed, so identical seeds reproduce identical sessions.
    """

    def __init__(
        self,
        config: ServiceConfig | None = None,
        tables: tuple[StrategyTable, StrategyTable] | None = None,
        event_sink: str | Path | None = None,
        clock: Callable[[], float] | None = None,
    ):
        self.config = config or ServiceConfig()
        self.high_table, self.low_table = tables or default_tables()
        self.log = EventLog(event_sink)
        self.flows: dict[str, SubjectFlow] = {}
        self.clock = clock or time.time
        self._rngs: dict[str, random.Random] = {}
        self._admin_rng = random.Random(f"{self.config.seed}:admin")

    # -- randomness ---------------------------------------------------------

    def _rng(self, subject_id: str) -> random.Random:
        if subject_id not in self._rngs:
            self._rngs[subject_id] = random.Random(f"{self.config.seed}:{subject_id}")
        return self._rngs[subject_id]

    def _table(self, flow: SubjectFlow) -> StrategyTable:
        return self.high_table if flow.treatment == Treatment.HIGH_TRUST else self.low_table

    def _wait(self, rng: random.Random) -> float:
        lo, hi = self.config.wait_delay
        return round(rng.uniform(lo, hi), 3)

    # -- event plumbing -----------------------------------------------------

    def _emit(self, subject_id: str, kind: str, payload: dict) -> None:
        record = EventRecord(
            seq=self.log.next_seq(subject_id),
            timestamp=self.clock(),
            subject_id=subject_id,
            kind=kind,
            payload=payload,
        )
        self.log.append(record)
        self._apply(record)

    def _apply(self, event: EventRecord) -> None:
        """Pure-state reducer; the only place flows mutate."""
        kind, payload = event.kind, event.payload
        if kind == "registered":
            self.flows[event.subject_id] = SubjectFlow(
                subject_id=event.subject_id, slot=payload["slot"]
            )
            return
        if kind in ("lottery_drawn", "strategy_table_loaded", "dataset_exported"):
            return
        flow = self.flows[event.subject_id]
        if kind == "treatment_assigned":
            flow.treatment = Treatment(payload["treatment"])
            flow.match_seed = payload["match_seed"]
            flow.responses = q.ResponseSet(flow.subject_id, flow.treatment)
        elif kind == "instructions_acknowledged":
            flow.match = game.new_match(flow.treatment, self.config.game, flow.match_seed)
            flow.stage = Stage.PRACTICE
        elif kind in ("bot_sent", "send_submitted"):
            flow.match = game.apply_send(flow.match, payload["amount"])
            if kind == "bot_sent":
                flow.last_wait_seconds = payload["wait_seconds"]
        elif kind in ("bot_returned", "return_submitted"):
            flow.match = game.apply_return(flow.match, payload["amount"])
            if kind == "bot_returned":
                flow.last_wait_seconds = payload["wait_seconds"]
            if flow.stage == Stage.PRACTICE and flow.match.rounds[0].closed:
                flow.stage = Stage.GAME
            if flow.match.complete:
                flow.stage = Stage.TIME_PREF
        elif kind == "timepref_sequence":
            flow.responses.time_pref_order = [
                q.TimePrefItem(i["m"], i["t"], i["p"], i["future_first"])
                for i in payload["items"]
            ]
        elif kind == "timepref_answered":
            flow.responses.time_pref_answers[(payload["m"], payload["t"])] = q.Choice(
                payload["choice"]
            )
            if len(flow.responses.time_pref_answers) == len(q.PRESENT_VALUES):
                flow.stage = Stage.TRUST
        elif kind == "trust_sequence":
            flow.responses.trust_order = list(payload["order"])
        elif kind == "trust_answered":
            flow.responses.trust_raw[payload["question_id"]] = payload["value"]
            if len(flow.responses.trust_raw) == len(q.TRUST_QUESTIONS):
                flow.stage = Stage.CERTAINTY
        elif kind == "certainty_answered":
            flow.responses.certainty.append(
                q.CertaintyItem(
                    payload["horizon_years"], payload["agreement"], payload["certainty"]
                )
            )
            if len(flow.responses.certainty) == 2:
                flow.stage = Stage.DEMOGRAPHICS
        elif kind == "demographics_recorded":
            flow.responses.demographics = dict(payload["answers"])
            flow.stage = Stage.DEBRIEF
        elif kind == "debrief_acknowledged":
            flow.stage = Stage.DONE
        else:
            raise ServiceError(f"unknown event kind {kind!r}")

    def _run_service_moves(self, subject_id: str) -> None:
        """Emit any bot moves or sequence draws the flow is now waiting on."""
        flow = self.flows[subject_id]
        rng = self._rng(subject_id)
        while True:
            if flow.stage in (Stage.PRACTICE, Stage.GAME):
                pending = flow.awaiting
                if pending == "bot_send":
                    index = flow.match.next_round_index
                    amount = bot_send(self._table(flow), index, rng)
                    self._emit(subject_id, "bot_sent", {
                        "round_index": index,
                        "amount": amount,
                        "wait_seconds": self._wait(rng),
                        "strategy_version": self._table(flow).version,
                    })
                    continue
                if pending == "bot_return":
                    record = flow.match.open_round
                    amount = bot_return(self._table(flow), record.sent, rng)
                    self._emit(subject_id, "bot_returned", {
                        "round_index": record.round_index,
                        "amount": amount,
                        "wait_seconds": self._wait(rng),
                        "strategy_version": self._table(flow).version,
                    })
                    continue
            if flow.stage == Stage.TIME_PREF and not flow.responses.time_pref_order:
                items = q.build_time_pref_sequence(rng)
                self._emit(subject_id, "timepref_sequence", {
                    "items": [
                        {"m": i.m, "t": i.t_weeks, "p": i.p, "future_first": i.future_first}
                        for i in items
                    ]
                })
                continue
            if flow.stage == Stage.TRUST and not flow.responses.trust_order:
                self._emit(subject_id, "trust_sequence", {"order": q.build_trust_sequence(rng)})
                continue
            return

    # -- subject lifecycle ---------------------------------------------------

    def register(self, slot: str) -> str:
        if slot not in self.config.slot_times:
            raise ServiceError(
                f"unknown slot {slot!r}; configured slots: {list(self.config.slot_times)}"
            )
        subject_id = f"S{len(self.flows) + 1:05d}"
        self._emit(subject_id, "registered", {"slot": slot})
        return subject_id

    def _flow(self, subject_id: str) -> SubjectFlow:
        flow = self.flows.get(subject_id)
        if flow is None:
            raise UnknownSubject(f"unknown subject {subject_id!r}")
        return flow

    def start(self, subject_id: str) -> Treatment:
        """Assign the treatment arm with a fair coin; one-shot per subject."""
        flow = self._flow(subject_id)
        if flow.treatment is not None:
            raise StageError(f"{subject_id} already assigned {flow.treatment.value}")
        rng = self._rng(subject_id)
        treatment = Treatment.HIGH_TRUST if rng.random() < 0.5 else Treatment.LOW_TRUST
        self._emit(subject_id, "treatment_assigned", {
            "treatment": treatment.value,
            "match_seed": rng.getrandbits(63),
        })
        return treatment

    def acknowledge_instructions(self, subject_id: str) -> None:
        flow = self._flow(subject_id)
        if flow.stage != Stage.INSTRUCTIONS:
            raise StageError(f"{subject_id} is at stage {flow.stage.name}, not INSTRUCTIONS")
        if flow.treatment is None:
            raise StageError(f"{subject_id} has no treatment assigned; call start first")
        self._emit(subject_id, "instructions_acknowledged", {})
        self._run_service_moves(subject_id)

    def submit_send(self, subject_id: str, amount: int) -> None:
        flow = self._flow(subject_id)
        if flow.awaiting != "send":
            raise StageError(f"{subject_id} is not awaiting a send")
        probe = game.apply_send(flow.match, amount)  # validates bounds
        self._emit(subject_id, "send_submitted", {
            "round_index": probe.rounds[-1].round_index,
            "amount": amount,
        })
        self._run_service_moves(subject_id)

    def submit_return(self, subject_id: str, amount: int) -> None:
        flow = self._flow(subject_id)
        if flow.awaiting != "return":
            raise StageError(f"{subject_id} is not awaiting a return")
        game.apply_return(flow.match, amount)  # validates bounds
        self._emit(subject_id, "return_submitted", {
            "round_index": flow.match.open_round.round_index,
            "amount": amount,
        })
        self._run_service_moves(subject_id)

    def submit_time_pref(self, subject_id: str, position: int, choice) -> None:
        flow = self._flow(subject_id)
        if flow.stage != Stage.TIME_PREF:
            raise StageError(f"{subject_id} is at stage {flow.stage.name}, not TIME_PREF")
        answered = len(flow.responses.time_pref_answers)
        if position != answered:
            raise StageError(f"expected answer for position {answered}, got {position}")
        item = flow.responses.time_pref_order[position]
        self._emit(subject_id, "timepref_answered", {
            "position": position,
            "m": item.m,
            "t": item.t_weeks,
            "choice": q.validate_choice(choice).value,
        })
        self._run_service_moves(subject_id)

    def submit_trust(self, subject_id: str, position: int, value: int) -> None:
        flow = self._flow(subject_id)
        if flow.stage != Stage.TRUST:
            raise StageError(f"{subject_id} is at stage {flow.stage.name}, not TRUST")
        answered = len(flow.responses.trust_raw)
        if position != answered:
            raise StageError(f"expected answer for position {answered}, got {position}")
        self._emit(subject_id, "trust_answered", {
            "position": position,
            "question_id": flow.responses.trust_order[position],
            "value": q.validate_slider(value),
        })

    def submit_certainty(self, subject_id: str, block: int, agreement: int, certainty: int) -> None:
        flow = self._flow(subject_id)
        if flow.stage != Stage.CERTAINTY:
            raise StageError(f"{subject_id} is at stage {flow.stage.name}, not CERTAINTY")
        expected = len(flow.responses.certainty)
        if block != expected:
            raise StageError(f"expected certainty block {expected}, got {block}")
        self._emit(subject_id, "certainty_answered", {
            "block": block,
            "horizon_years": self.config.certainty_horizons[block],
            "agreement": q.validate_slider(agreement),
            "certainty": q.validate_certainty(certainty),
        })

    def submit_demographics(self, subject_id: str, answers: dict) -> None:
        flow = self._flow(subject_id)
        if flow.stage != Stage.DEMOGRAPHICS:
            raise StageError(f"{subject_id} is at stage {flow.stage.name}, not DEMOGRAPHICS")
        self._emit(subject_id, "demographics_recorded", {
            "answers": q.validate_demographics(answers)
        })

    def acknowledge_debrief(self, subject_id: str) -> None:
        flow = self._flow(subject_id)
        if flow.stage != Stage.DEBRIEF:
            raise StageError(f"{subject_id} is at stage {flow.stage.name}, not DEBRIEF")
        self._emit(subject_id, "debrief_acknowledged", {})

    # -- client view -----------------------------------------------------------

    def snapshot(self, subject_id: str) -> dict:
        """Stage-scoped view for the participant client.

        Treatment and the counterpart's algorithmic nature are only exposed
        from the debrief stage on.
        """
        flow = self._flow(subject_id)
        view: dict = {
            "subject_id": subject_id,
            "slot": flow.slot,
            "stage": flow.stage.name.lower(),
            "started": flow.treatment is not None,
        }
        if flow.stage in (Stage.PRACTICE, Stage.GAME):
            match = flow.match
            awaiting = flow.awaiting
            context = {
                "round_index": (
                    match.open_round.round_index if match.open_round else match.next_round_index
                ),
                "total_rounds": match.config.total_rounds,
                "cumulative_payoff": match.cumulative_payoff,
                "awaiting": awaiting,
                "wait_seconds": flow.last_wait_seconds,
            }
            if awaiting == "send":
                context["role"] = "A"
                context["max_send"] = match.config.endowment
            elif awaiting == "return":
                context["role"] = "B"
                context["received"] = match.open_round.sent
                context["tripled"] = match.open_round.tripled
                context["max_return"] = match.open_round.tripled
            view["game"] = context
        elif flow.stage == Stage.TIME_PREF:
            position = len(flow.responses.time_pref_answers)
            item = flow.responses.time_pref_order[position]
            present = {"choice": "present", "text": f"${item.p} today"}
            future = {"choice": "future", "text": f"${item.m} in {item.t_weeks} week(s)"}
            view["question"] = {
                "position": position,
                "total": len(flow.responses.time_pref_order),
                "prompt": "Would you rather be paid:",
                "options": [future, present] if item.future_first else [present, future],
            }
        elif flow.stage == Stage.TRUST:
            position = len(flow.responses.trust_raw)
            question = q.TRUST_QUESTIONS[flow.responses.trust_order[position]]
            view["question"] = {
                "position": position,
                "total": len(flow.responses.trust_order),
                "text": question.text,
                "scale": {"min": q.SLIDER_MIN, "max": q.SLIDER_MAX},
                "labels": {str(k): v for k, v in question.labels.items()},
            }
        elif flow.stage == Stage.CERTAINTY:
            block = len(flow.responses.certainty)
            horizon = self.config.certainty_horizons[block]
            view["question"] = {
                "block": block,
                "statement": (
                    f'Do you agree with the following statement: "In {horizon} '
                    'years, I will be better off than I am right now"'
                ),
                "agreement_scale": {"min": q.SLIDER_MIN, "max": q.SLIDER_MAX},
                "certainty_prompt": "How certain are you about your response?",
                "certainty_scale": {"min": q.CERTAINTY_MIN, "max": q.CERTAINTY_MAX},
            }
        elif flow.stage == Stage.DEMOGRAPHICS:
            view["fields"] = {
                name: list(categories)
                for name, categories in q.DEMOGRAPHIC_CATEGORIES.items()
            }
        elif flow.stage in (Stage.DEBRIEF, Stage.DONE):
            view["debrief"] = {
                "treatment": flow.treatment.value,
                "text": DEBRIEF_TEXT,
            }
        if flow.stage == Stage.INSTRUCTIONS:
            view["instructions"] = {
                "text": INSTRUCTIONS_TEXT,
                "reward_range": list(self.config.reward_range),
            }
        return view

    # -- admin ----------------------------------------------------------------

    def done_subjects(self) -> list[SubjectFlow]:
        return [f for f in self.flows.values() if f.stage == Stage.DONE]

    def draw_lottery(self) -> LotteryResult:
        """Winner drawn with probability proportional to cumulative payoff;
        zero-payoff subjects get the minimal positive weight of 1."""
        eligible = sorted(self.done_subjects(), key=lambda f: f.subject_id)
        if not eligible:
            raise ServiceError("no completed subjects are eligible for the lottery")
        weights = {
            f.subject_id: (f.match.cumulative_payoff or 1) for f in eligible
        }
        winner = self._admin_rng.choices(
            list(weights), weights=list(weights.values())
        )[0]
        reward = self._admin_rng.randint(*self.config.reward_range)
        self._emit("", "lottery_drawn", {
            "winner": winner, "reward": reward, "weights": weights,
        })
        return LotteryResult(winner, reward, weights)

    # -- replay ----------------------------------------------------------------

    @classmethod
    def replay(
        cls,
        records: Iterable[EventRecord],
        config: ServiceConfig | None = None,
        tables: tuple[StrategyTable, StrategyTable] | None = None,
    ) -> "ExperimentService":
        """Reconstruct a service's flows by reducing a persisted event log."""
        service = cls(config=config, tables=tables)
        for record in records:
            service.log.append(record)
            service._apply(record)
        return service
