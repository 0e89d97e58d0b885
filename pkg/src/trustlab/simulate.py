"""Synthetic subjects and batch experiment runs.

A subject policy drives a complete flow through the live service logic
in-process: game moves from a trust propensity and a reciprocity rate,
time-preference answers from a latent weekly discount factor via the threshold
rule (Future iff D^t * m >= p), slider answers from noisy latent means.
Planted treatment effects are additive shifts applied in the high-trust arm,
so the full export-and-regression pipeline can be checked against known truth.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path

import pandas as pd
import yaml

from . import questionnaires as q
from .analysis import subject_mean_discount
from .dataset import export_tables, write_tables
from .econometrics import DesignError, ModelSpec, TREATMENT_COLUMN, fit
from .events import dump_events
from .session import ExperimentService, ServiceConfig, Stage
from .strategy import Treatment


def _clamp(value: int, lo: int, hi: int) -> int:
    return max(lo, min(hi, value))


@dataclass(frozen=True)
class PlantedEffects:
    """Additive shifts applied to high-trust subjects' latent parameters."""

    delta_trust: float = 0.0
    delta_discount: float = 0.0
    delta_certainty: float = 0.0


@dataclass(frozen=True)
class SubjectPolicy:
    trust_propensity: float  # theta in [0, 1]; sends round(theta * 10)
    reciprocity: float  # rho in [0, 1]; returns round(rho * 3x)
    discount: float  # latent weekly discount factor in (0, 1]
    trust_mu: float  # mean of coded trust-slider responses
    trust_sigma: float
    certainty_mu: float
    certainty_sigma: float
    choice_temperature: float = 0.0  # 0 = deterministic threshold rule

    def __post_init__(self):
        if not 0 <= self.trust_propensity <= 1:
            raise ValueError("trust_propensity must be in [0, 1]")
        if not 0 <= self.reciprocity <= 1:
            raise ValueError("reciprocity must be in [0, 1]")
        if not 0 < self.discount <= 1:
            raise ValueError("discount must be in (0, 1]")


@dataclass(frozen=True)
class PopulationSpec:
    """Per-subject parameter distributions (uniform ranges / normal means)."""

    trust_propensity: tuple[float, float] = (0.2, 0.9)
    reciprocity: tuple[float, float] = (0.1, 0.6)
    discount: tuple[float, float] = (0.85, 0.995)
    trust_mu: tuple[float, float] = (10.0, 6.0)  # (mean, sd), normal
    trust_sigma: float = 10.0
    certainty_mu: tuple[float, float] = (60.0, 10.0)
    certainty_sigma: float = 12.0
    choice_temperature: float = 0.0
    # Sampling weights for the demographic categories, per field.
    demographic_weights: dict[str, dict[str, float]] = field(
        default_factory=lambda: {"major": {"economics": 0.12, "psychology": 0.08,
                                           "other": 0.5, "none": 0.3}}
    )

    def draw_policy(self, rng: random.Random) -> SubjectPolicy:
        return SubjectPolicy(
            trust_propensity=rng.uniform(*self.trust_propensity),
            reciprocity=rng.uniform(*self.reciprocity),
            discount=rng.uniform(*self.discount),
            trust_mu=rng.gauss(*self.trust_mu),
            trust_sigma=self.trust_sigma,
            certainty_mu=rng.gauss(*self.certainty_mu),
            certainty_sigma=self.certainty_sigma,
            choice_temperature=self.choice_temperature,
        )

    def draw_demographics(self, rng: random.Random) -> dict[str, str]:
        answers = {}
        for name, categories in q.DEMOGRAPHIC_CATEGORIES.items():
            weights = self.demographic_weights.get(name)
            if weights:
                answers[name] = rng.choices(
                    list(weights), weights=list(weights.values())
                )[0]
            else:
                answers[name] = rng.choice(categories)
        return answers


# Fixed per-question level differences on the coded scale; absorbed by the
# question fixed effects in the analysis.
TRUST_QUESTION_OFFSETS = {1: 6.0, 2: 10.0, 3: -8.0, 4: 0.0, 5: 3.0}


def choose_future(d: float, m: int, t: int, p: int, temperature: float, rng: random.Random) -> bool:
    """Threshold rule with optional logistic noise on the value gap."""
    gap = d**t * m - p
    if temperature <= 0:
        return gap >= 0
    return rng.random() < 1 / (1 + math.exp(-gap / temperature))


def simulate_subject(
    service: ExperimentService,
    policy: SubjectPolicy,
    effects: PlantedEffects,
    slot: str,
    rng: random.Random,
    demographics: dict[str, str] | None = None,
) -> str:
    """Drive one synthetic subject from registration to Done; returns its id."""
    subject_id = service.register(slot)
    treatment = service.start(subject_id)
    high = treatment == Treatment.HIGH_TRUST
    service.acknowledge_instructions(subject_id)
    flow = service.flows[subject_id]

    send = _clamp(round(policy.trust_propensity * 10), 0, 10)
    while flow.stage in (Stage.PRACTICE, Stage.GAME):
        pending = flow.awaiting
        if pending == "return":
            tripled = flow.match.open_round.tripled
            service.submit_return(
                subject_id, _clamp(round(policy.reciprocity * tripled), 0, tripled)
            )
        elif pending == "send":
            service.submit_send(subject_id, send)
        else:  # complete; stage advances on the closing bot event
            break

    d = policy.discount + (effects.delta_discount if high else 0.0)
    d = max(1e-6, min(1.0, d))
    for position, item in enumerate(flow.responses.time_pref_order):
        future = choose_future(
            d, item.m, item.t_weeks, item.p, policy.choice_temperature, rng
        )
        service.submit_time_pref(
            subject_id, position, q.Choice.FUTURE if future else q.Choice.PRESENT
        )

    trust_level = policy.trust_mu + (effects.delta_trust if high else 0.0)
    for position, qid in enumerate(flow.responses.trust_order):
        coded = _clamp(
            round(rng.gauss(trust_level + TRUST_QUESTION_OFFSETS[qid], policy.trust_sigma)),
            q.SLIDER_MIN, q.SLIDER_MAX,
        )
        raw = -coded if qid in q.REVERSED_TRUST_IDS else coded
        service.submit_trust(subject_id, position, raw)

    certainty_level = policy.certainty_mu + (effects.delta_certainty if high else 0.0)
    for block in range(2):
        agreement = _clamp(round(rng.gauss(10, 15)), q.SLIDER_MIN, q.SLIDER_MAX)
        certainty = _clamp(
            round(rng.gauss(certainty_level, policy.certainty_sigma)),
            q.CERTAINTY_MIN, q.CERTAINTY_MAX,
        )
        service.submit_certainty(subject_id, block, agreement, certainty)

    if demographics is None:
        demographics = PopulationSpec().draw_demographics(rng)
    service.submit_demographics(subject_id, demographics)
    service.acknowledge_debrief(subject_id)
    return subject_id


@dataclass
class RecoveryEntry:
    name: str
    planted: float
    recovered: float | None
    se: float | None
    ci95: tuple[float, float] | None
    covered: bool | None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "planted": self.planted,
            "recovered": self.recovered,
            "se": self.se,
            "ci95": list(self.ci95) if self.ci95 else None,
            "ci_covers_planted": self.covered,
            "note": self.note,
        }


@dataclass
class SimReport:
    n_subjects: int
    seed: int
    effects: PlantedEffects
    entries: dict[str, RecoveryEntry]
    row_counts: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "n_subjects": self.n_subjects,
            "seed": self.seed,
            "planted_effects": {
                "delta_trust": self.effects.delta_trust,
                "delta_discount": self.effects.delta_discount,
                "delta_certainty": self.effects.delta_certainty,
            },
            "row_counts": self.row_counts,
            "recovery": {name: e.to_dict() for name, e in self.entries.items()},
        }


def _recovery_entry(name: str, planted: float, frame: pd.DataFrame, spec: ModelSpec) -> RecoveryEntry:
    try:
        result = fit(frame, spec)
    except (DesignError, ValueError) as exc:
        return RecoveryEntry(name, planted, None, None, None, None,
                             note=f"not identified: {exc}")
    lo, hi = result.conf_int(TREATMENT_COLUMN)
    return RecoveryEntry(
        name=name,
        planted=planted,
        recovered=result[TREATMENT_COLUMN],
        se=result.se_for(TREATMENT_COLUMN),
        ci95=(lo, hi),
        covered=lo <= planted <= hi,
    )


def run_experiment(
    n: int,
    effects: PlantedEffects | None = None,
    population: PopulationSpec | None = None,
    seed: int = 0,
    out_dir: str | Path | None = None,
) -> tuple[dict[str, pd.DataFrame], SimReport]:
    """Simulate a whole experiment and compare recovered treatment
    coefficients against the planted effects.

    Deterministic: the same seed yields a byte-identical dataset and report.
    """
    if n < 2:
        raise ValueError("need at least 2 subjects")
    effects = effects or PlantedEffects()
    population = population or PopulationSpec()
    counter = iter(range(10**12))
    config = ServiceConfig(seed=seed, wait_delay=(0.0, 0.0))
    service = ExperimentService(config, clock=lambda: float(next(counter)))
    pop_rng = random.Random(f"{seed}:population")
    slots = config.slot_times
    for i in range(n):
        policy = population.draw_policy(pop_rng)
        demographics = population.draw_demographics(pop_rng)
        simulate_subject(
            service, policy, effects, slots[i % len(slots)], pop_rng, demographics
        )

    tables = export_tables(service)
    entries = {
        "trust": _recovery_entry(
            "trust", effects.delta_trust, tables["trust_long"],
            ModelSpec(outcome="trust", fixed_effect_factor="question_id"),
        ),
        # Subject-mean regression: one independent observation per subject,
        # so the unclustered HC1 interval is the honest one for coverage.
        "discount": _recovery_entry(
            "discount", effects.delta_discount,
            subject_mean_discount(tables["discount_long"]),
            ModelSpec(outcome="discount_rate"),
        ),
        "certainty": _recovery_entry(
            "certainty", effects.delta_certainty, tables["certainty_long"],
            ModelSpec(outcome="certainty"),
        ),
    }
    report = SimReport(
        n_subjects=n,
        seed=seed,
        effects=effects,
        entries=entries,
        row_counts={name: len(frame) for name, frame in tables.items()},
    )
    if out_dir is not None:
        out_dir = Path(out_dir)
        write_tables(tables, out_dir)
        dump_events(service.log, out_dir / "events.jsonl")
        (out_dir / "sim_report.json").write_text(json.dumps(report.to_dict(), indent=2))
    return tables, report


def load_effects_config(path: str | Path) -> tuple[PlantedEffects, PopulationSpec]:
    """Effects file: planted deltas plus optional population distributions."""
    with open(path) as fh:
        raw = yaml.safe_load(fh) or {}
    eff = raw.get("effects", {})
    effects = PlantedEffects(
        delta_trust=float(eff.get("delta_trust", 0.0)),
        delta_discount=float(eff.get("delta_discount", 0.0)),
        delta_certainty=float(eff.get("delta_certainty", 0.0)),
    )
    pop = raw.get("population", {})
    defaults = PopulationSpec()

    def pair(name, default):
        value = pop.get(name, default)
        return tuple(float(v) for v in value) if not isinstance(value, (int, float)) else default

    population = PopulationSpec(
        trust_propensity=pair("trust_propensity", defaults.trust_propensity),
        reciprocity=pair("reciprocity", defaults.reciprocity),
        discount=pair("discount", defaults.discount),
        trust_mu=pair("trust_mu", defaults.trust_mu),
        trust_sigma=float(pop.get("trust_sigma", defaults.trust_sigma)),
        certainty_mu=pair("certainty_mu", defaults.certainty_mu),
        certainty_sigma=float(pop.get("certainty_sigma", defaults.certainty_sigma)),
        choice_temperature=float(pop.get("choice_temperature", defaults.choice_temperature)),
        demographic_weights=pop.get("demographic_weights", defaults.demographic_weights),
    )
    return effects, population
