"""Record real service responses as JSON fixtures for the frontend tests.

Drives one subject through every stage against the actual FastAPI app and
captures the state snapshot at each stage, plus representative error
responses, so the client tests exercise the true wire format.
"""

import itertools
import json
from pathlib import Path

from fastapi.testclient import TestClient

from trustlab.service.app import create_app
from trustlab.session import ExperimentService, ServiceConfig

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

DEMOGRAPHICS = {
    "gender": "female",
    "age_band": "18_24",
    "ethnicity": "other",
    "education": "bachelors",
    "major": "psychology",
    "religious_practice": "non_practicing",
}


def snap(client, subject_id):
    return client.get(f"/subjects/{subject_id}/state").json()


def main():
    counter = itertools.count()
    service = ExperimentService(
        ServiceConfig(seed=20260823, wait_delay=(0.0, 0.0)),
        clock=lambda: float(next(counter)),
    )
    client = TestClient(create_app(service))
    fixtures = {}

    fixtures["slots"] = client.get("/slots").json()
    register = client.post("/register", json={"slot": "10:00"}).json()
    subject_id = register["subject_id"]
    fixtures["register"] = register
    fixtures["state_instructions_locked"] = snap(client, subject_id)
    client.post(f"/subjects/{subject_id}/start")
    fixtures["state_instructions"] = snap(client, subject_id)
    client.post(f"/subjects/{subject_id}/instructions/ack")
    fixtures["state_practice"] = snap(client, subject_id)

    # Error fixtures gathered mid-flow so statuses come from the live app.
    fixtures["errors"] = {
        "unknown_subject": {
            "status": 404,
            "body": client.get("/subjects/S99999/state").json(),
        },
        "out_of_stage_send": {
            "status": 409,
            "body": client.post(
                f"/subjects/{subject_id}/send", json={"amount": 5}
            ).json(),
        },
        "return_too_large": {
            "status": 422,
            "body": client.post(
                f"/subjects/{subject_id}/return", json={"amount": 99}
            ).json(),
        },
    }

    state = snap(client, subject_id)
    saw_send = False
    while state["stage"] in ("practice", "game"):
        game = state["game"]
        if game["awaiting"] == "return":
            client.post(
                f"/subjects/{subject_id}/return", json={"amount": game["tripled"] // 3}
            )
        else:
            if not saw_send:
                fixtures["state_game_send"] = state
                fixtures["errors"]["send_too_large"] = {
                    "status": 422,
                    "body": client.post(
                        f"/subjects/{subject_id}/send", json={"amount": 11}
                    ).json(),
                }
                saw_send = True
            client.post(f"/subjects/{subject_id}/send", json={"amount": 6})
        state = snap(client, subject_id)
        if state["stage"] == "game" and state["game"]["awaiting"] == "return" \
                and "state_game_return" not in fixtures:
            fixtures["state_game_return"] = state

    fixtures["state_time_pref"] = state
    fixtures["errors"]["bad_choice"] = {
        "status": 422,
        "body": client.post(
            f"/subjects/{subject_id}/answers/time-preference",
            json={"position": 0, "choice": "maybe"},
        ).json(),
    }
    for position in range(12):
        client.post(
            f"/subjects/{subject_id}/answers/time-preference",
            json={"position": position, "choice": "future" if position % 2 else "present"},
        )

    fixtures["state_trust"] = snap(client, subject_id)
    fixtures["errors"]["slider_out_of_range"] = {
        "status": 422,
        "body": client.post(
            f"/subjects/{subject_id}/answers/trust",
            json={"position": 0, "value": 51},
        ).json(),
    }
    for position in range(5):
        client.post(
            f"/subjects/{subject_id}/answers/trust",
            json={"position": position, "value": 15},
        )

    fixtures["state_certainty"] = snap(client, subject_id)
    fixtures["errors"]["certainty_out_of_range"] = {
        "status": 422,
        "body": client.post(
            f"/subjects/{subject_id}/answers/certainty",
            json={"block": 0, "agreement": 0, "certainty": 101},
        ).json(),
    }
    for block in range(2):
        client.post(
            f"/subjects/{subject_id}/answers/certainty",
            json={"block": block, "agreement": 20, "certainty": 75},
        )

    fixtures["state_demographics"] = snap(client, subject_id)
    client.post(
        f"/subjects/{subject_id}/answers/demographics", json={"answers": DEMOGRAPHICS}
    )
    fixtures["state_debrief"] = snap(client, subject_id)
    fixtures["errors"]["done_requires_debrief_ack"] = {
        "status": 409,
        "body": client.post(f"/subjects/{subject_id}/send", json={"amount": 5}).json(),
    }
    fixtures["ack_debrief"] = client.post(f"/subjects/{subject_id}/debrief/ack").json()
    fixtures["state_done"] = snap(client, subject_id)

    OUT.mkdir(parents=True, exist_ok=True)
    for name, payload in fixtures.items():
        (OUT / f"{name}.json").write_text(json.dumps(payload, indent=2) + "\n")
    print(f"wrote {len(fixtures)} fixtures to {OUT}")


if __name__ == "__main__":
    main()
