import itertools
import random

import pytest

from trustlab import questionnaires as q
from trustlab.dataset import export_tables, write_tables
from trustlab.events import EventRecord, dump_events, load_events
from trustlab.game import InvalidMove
from trustlab.session import (
    ExperimentService,
    ServiceConfig,
    Stage,
    StageError,
    UnknownSubject,
    ServiceError,
)
from trustlab.strategy import Treatment


def fast_config(**kwargs):
    kwargs.setdefault("wait_delay", (0.0, 0.0))
    return ServiceConfig(**kwargs)


def make_service(**kwargs):
    counter = itertools.count()
    return ExperimentService(fast_config(**kwargs), clock=lambda: float(next(counter)))


DEMOGRAPHICS = {
    "gender": "female",
    "age_band": "18_24",
    "ethnicity": "asian",
    "education": "bachelors",
    "major": "economics",
    "religious_practice": "practicing",
}


def play_to_done(service, slot="10:00", send=5, return_fraction=0.5):
    subject_id = service.register(slot)
    service.start(subject_id)
    service.acknowledge_instructions(subject_id)
    flow = service.flows[subject_id]
    while flow.stage in (Stage.PRACTICE, Stage.GAME):
        pending = flow.awaiting
        if pending == "return":
            service.submit_return(
                subject_id, int(flow.match.open_round.tripled * return_fraction)
            )
        elif pending == "send":
            service.submit_send(subject_id, send)
        else:
            break
    for position in range(12):
        service.submit_time_pref(subject_id, position, "future")
    for position in range(5):
        service.submit_trust(subject_id, position, 10)
    service.submit_certainty(subject_id, 0, 5, 70)
    service.submit_certainty(subject_id, 1, -5, 40)
    service.submit_demographics(subject_id, DEMOGRAPHICS)
    service.acknowledge_debrief(subject_id)
    return subject_id


class TestConfig:
    def test_needs_at_least_one_slot(self):
        with pytest.raises(ServiceError):
            ServiceConfig(slot_times=())

    def test_duplicate_slots_rejected(self):
        with pytest.raises(ServiceError):
            ServiceConfig(slot_times=("10:00", "10:00"))

    def test_default_has_seven_slots(self):
        assert len(ServiceConfig().slot_times) == 7


class TestRegistrationAndAssignment:
    def test_register_unknown_slot(self):
        service = make_service()
        with pytest.raises(ServiceError, match="unknown slot"):
            service.register("03:00")

    def test_double_assignment_rejected(self):
        service = make_service()
        subject_id = service.register("10:00")
        service.start(subject_id)
        with pytest.raises(StageError, match="already assigned"):
            service.start(subject_id)

    def test_unknown_subject(self):
        service = make_service()
        with pytest.raises(UnknownSubject):
            service.start("S99999")

    def test_assignment_deterministic_under_seed(self):
        def assignments(seed):
            service = make_service(seed=seed)
            return [service.start(service.register("10:00")) for _ in range(50)]

        assert assignments(5) == assignments(5)
        assert assignments(5) != assignments(6)

    def test_assignment_balance(self):
        service = make_service(seed=11)
        n = 20000
        high = sum(
            service.start(service.register("10:00")) == Treatment.HIGH_TRUST
            for _ in range(n)
        )
        assert abs(high / n - 0.5) < 0.01

    def test_treatment_persisted_before_first_bot_event(self):
        service = make_service(seed=2)
        subject_id = play_to_done(service)
        kinds = [e.kind for e in service.log if e.subject_id == subject_id]
        assert kinds.index("treatment_assigned") < kinds.index("bot_sent")

    def test_bot_events_record_strategy_version(self):
        service = make_service(seed=2)
        play_to_done(service)
        bot_events = [e for e in service.log if e.kind in ("bot_sent", "bot_returned")]
        assert bot_events
        assert all(e.payload["strategy_version"] == "default-v1" for e in bot_events)


class TestStageProgression:
    def test_full_flow_reaches_done(self):
        service = make_service(seed=1)
        subject_id = play_to_done(service)
        assert service.flows[subject_id].stage == Stage.DONE
        assert service.flows[subject_id].match.complete

    def test_practice_round_is_first_and_role_b(self):
        service = make_service(seed=1)
        subject_id = service.register("10:00")
        service.start(subject_id)
        service.acknowledge_instructions(subject_id)
        flow = service.flows[subject_id]
        assert flow.stage == Stage.PRACTICE
        assert flow.awaiting == "return"
        assert flow.match.open_round.sent == 5  # practice send in both arms
        assert flow.match.open_round.tripled == 15

    def test_out_of_order_submission_rejected(self):
        service = make_service(seed=1)
        subject_id = service.register("10:00")
        service.start(subject_id)
        with pytest.raises(StageError):
            service.submit_send(subject_id, 5)
        with pytest.raises(StageError):
            service.submit_trust(subject_id, 0, 10)
        with pytest.raises(StageError):
            service.acknowledge_debrief(subject_id)

    def test_game_bounds_enforced(self):
        service = make_service(seed=1)
        subject_id = service.register("10:00")
        service.start(subject_id)
        service.acknowledge_instructions(subject_id)
        with pytest.raises(InvalidMove):
            service.submit_return(subject_id, 16)  # 3x = 15 in the practice round

    def test_incomplete_stage_blocks_advance(self):
        service = make_service(seed=1)
        subject_id = service.register("10:00")
        service.start(subject_id)
        service.acknowledge_instructions(subject_id)
        flow = service.flows[subject_id]
        while flow.stage in (Stage.PRACTICE, Stage.GAME):
            if flow.awaiting == "return":
                service.submit_return(subject_id, 0)
            elif flow.awaiting == "send":
                service.submit_send(subject_id, 5)
        for position in range(11):
            service.submit_time_pref(subject_id, position, "present")
        # 11 of 12 answered: still TIME_PREF, trust submissions rejected.
        assert flow.stage == Stage.TIME_PREF
        with pytest.raises(StageError):
            service.submit_trust(subject_id, 0, 10)

    def test_wrong_position_rejected(self):
        service = make_service(seed=1)
        subject_id = service.register("10:00")
        service.start(subject_id)
        service.acknowledge_instructions(subject_id)
        flow = service.flows[subject_id]
        while flow.stage in (Stage.PRACTICE, Stage.GAME):
            if flow.awaiting == "return":
                service.submit_return(subject_id, 0)
            elif flow.awaiting == "send":
                service.submit_send(subject_id, 5)
        with pytest.raises(StageError, match="position"):
            service.submit_time_pref(subject_id, 3, "future")

    def test_debrief_required_before_done(self):
        service = make_service(seed=1)
        subject_id = service.register("10:00")
        service.start(subject_id)
        service.acknowledge_instructions(subject_id)
        flow = service.flows[subject_id]
        while flow.stage in (Stage.PRACTICE, Stage.GAME):
            if flow.awaiting == "return":
                service.submit_return(subject_id, 0)
            elif flow.awaiting == "send":
                service.submit_send(subject_id, 5)
        for position in range(12):
            service.submit_time_pref(subject_id, position, "future")
        for position in range(5):
            service.submit_trust(subject_id, position, 0)
        service.submit_certainty(subject_id, 0, 0, 50)
        service.submit_certainty(subject_id, 1, 0, 50)
        service.submit_demographics(subject_id, DEMOGRAPHICS)
        assert flow.stage == Stage.DEBRIEF
        service.acknowledge_debrief(subject_id)
        assert flow.stage == Stage.DONE

    def test_bot_respects_send_supports(self):
        service = make_service(seed=3)
        for _ in range(20):
            subject_id = play_to_done(service)
            flow = service.flows[subject_id]
            high = flow.treatment == Treatment.HIGH_TRUST
            for record in flow.match.rounds:
                if record.role.value == "B" and not record.is_practice:
                    support = {7, 8, 9, 10} if high else {0, 1, 2, 3}
                    assert record.sent in support


class TestSnapshot:
    def test_treatment_hidden_before_debrief(self):
        service = make_service(seed=4)
        subject_id = service.register("10:00")
        service.start(subject_id)
        service.acknowledge_instructions(subject_id)
        view = service.snapshot(subject_id)
        flat = str(view)
        assert "high_trust" not in flat and "low_trust" not in flat

    def test_debrief_reveals_treatment_and_bot(self):
        service = make_service(seed=4)
        subject_id = play_to_done(service)
        view = service.snapshot(subject_id)
        assert view["debrief"]["treatment"] in ("high_trust", "low_trust")
        assert "computer" in view["debrief"]["text"]

    def test_game_snapshot_bounds(self):
        service = make_service(seed=4)
        subject_id = service.register("10:00")
        service.start(subject_id)
        service.acknowledge_instructions(subject_id)
        view = service.snapshot(subject_id)
        assert view["game"]["max_return"] == 15
        service.submit_return(subject_id, 0)
        view = service.snapshot(subject_id)
        assert view["game"]["awaiting"] == "send"
        assert view["game"]["max_send"] == 10


class TestExport:
    def test_row_law_per_subject(self):
        service = make_service(seed=5)
        for _ in range(3):
            play_to_done(service)
        tables = export_tables(service)
        assert len(tables["trust_long"]) == 15
        assert len(tables["discount_long"]) == 18
        assert len(tables["certainty_long"]) == 6

    def test_empty_export_has_headers(self, tmp_path):
        service = make_service(seed=5)
        paths = write_tables(export_tables(service), tmp_path)
        header = paths["trust_long"].read_text().splitlines()[0]
        assert header.startswith("subject_id,question_id,trust,high_trust")

    def test_trust_rows_are_coded(self):
        service = make_service(seed=6)
        subject_id = play_to_done(service)  # raw 10 on every question
        tables = export_tables(service)
        mine = tables["trust_long"]
        coded = dict(zip(mine["question_id"], mine["trust"]))
        assert coded[1] == 10 and coded[2] == -10 and coded[3] == -10

    def test_incomplete_subjects_excluded(self):
        service = make_service(seed=7)
        play_to_done(service)
        service.start(service.register("12:00"))  # never finishes
        tables = export_tables(service)
        assert len(tables["trust_long"]) == 5


class TestLottery:
    def test_no_eligible_subjects(self):
        service = make_service(seed=8)
        with pytest.raises(ServiceError, match="eligible"):
            service.draw_lottery()

    def test_single_subject_wins(self):
        service = make_service(seed=8)
        subject_id = play_to_done(service)
        result = service.draw_lottery()
        assert result.winner == subject_id
        assert 25 <= result.reward <= 40

    def test_zero_payoff_gets_floor_weight(self):
        service = make_service(seed=9)
        # Send 0 as A and return everything as B: payoff can still accrue from
        # bot returns; force a true zero by inspecting weights directly on a
        # synthetic pair instead.
        sid = play_to_done(service, send=0, return_fraction=1.0)
        result = service.draw_lottery()
        assert all(w >= 1 for w in result.weights.values())

    def test_payoff_proportional_selection(self):
        # Payoffs differ per seed (bot randomness), so compare the win count
        # against the sum of per-repetition win probabilities.
        b_wins = 0
        expected = 0.0
        n = 4000
        for seed in range(n):
            service = make_service(seed=seed)
            a = play_to_done(service, send=0, return_fraction=1.0)  # low payoff
            b = play_to_done(service, send=10, return_fraction=0.0)  # high payoff
            result = service.draw_lottery()
            expected += result.weights[b] / (result.weights[a] + result.weights[b])
            b_wins += result.winner == b
        assert abs(b_wins / n - expected / n) < 0.02


class TestEventSourcing:
    def test_event_json_round_trip(self):
        record = EventRecord(0, 12.5, "S00001", "registered", {"slot": "10:00"})
        assert EventRecord.from_json(record.to_json()) == record

    def test_gapless_sequences(self):
        service = make_service(seed=10)
        play_to_done(service)
        per_subject = {}
        for event in service.log:
            expected = per_subject.get(event.subject_id, 0)
            assert event.seq == expected
            per_subject[event.subject_id] = expected + 1

    def test_replay_reconstructs_flows_exactly(self):
        service = make_service(seed=12)
        for _ in range(5):
            play_to_done(service)
        replayed = ExperimentService.replay(service.log, config=service.config)
        assert replayed.flows == service.flows

    def test_replay_from_file(self, tmp_path):
        service = make_service(seed=13)
        play_to_done(service)
        path = tmp_path / "events.jsonl"
        dump_events(service.log, path)
        replayed = ExperimentService.replay(load_events(path), config=service.config)
        assert replayed.flows == service.flows

    def test_event_sink_appends_lines(self, tmp_path):
        path = tmp_path / "session.jsonl"
        counter = itertools.count()
        service = ExperimentService(
            fast_config(seed=14), event_sink=path, clock=lambda: float(next(counter))
        )
        play_to_done(service)
        service.log.close()
        lines = path.read_text().splitlines()
        assert len(lines) == len(service.log)
        assert EventRecord.from_json(lines[0]).kind == "registered"
