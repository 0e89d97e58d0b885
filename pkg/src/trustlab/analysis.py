"""Standard regression batteries over an exported dataset.

Three report families: trust levels with question fixed effects (4 columns),
discount rates at the subject mean and at block granularity (6 columns), and
certainty (2 columns). Each adds demographic controls and, where applicable,
economics/psychology-major x treatment interactions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import pandas as pd

from .dataset import DEMOGRAPHIC_COLUMNS, read_tables
from .econometrics import (
    ModelSpec,
    RegressionResult,
    fit,
    regression_table,
    results_to_dict,
)

MAJOR_INTERACTIONS = (("major", "economics"), ("major", "psychology"))


@dataclass
class ReportFamily:
    title: str
    results: list[RegressionResult] = field(default_factory=list)
    notices: list[str] = field(default_factory=list)

    def text(self) -> str:
        body = regression_table(self.results, self.title) if self.results else "(no estimable specifications)"
        if self.notices:
            body += "\n" + "\n".join(f"note: {n}" for n in self.notices)
        return body


def _has_demographics(frame: pd.DataFrame) -> bool:
    return all(c in frame.columns for c in DEMOGRAPHIC_COLUMNS)


def _fit_specs(frame: pd.DataFrame, specs: list[ModelSpec], family: ReportFamily) -> None:
    for spec in specs:
        needs_demog = bool(spec.demographic_factors or spec.interactions)
        if needs_demog and not _has_demographics(frame):
            family.notices.append(
                f"skipped column {spec.label!r}: dataset lacks demographic columns"
            )
            continue
        try:
            family.results.append(fit(frame, spec))
        except ValueError as exc:
            family.notices.append(f"skipped column {spec.label!r}: {exc}")


def trust_report(trust_long: pd.DataFrame, exclude_subjects: tuple[str, ...] = ()) -> ReportFamily:
    """Treatment effect on coded trust with question fixed effects.

    Column 4 repeats the interaction specification on a restricted sample
    (subjects flagged for exclusion, e.g. aware of the bot); with no exclusions
    it coincides with column 3.
    """
    family = ReportFamily("Trust levels (question fixed effects)")
    base = dict(outcome="trust", fixed_effect_factor="question_id")
    specs = [
        ModelSpec(**base, label="(1)"),
        ModelSpec(**base, demographic_factors=DEMOGRAPHIC_COLUMNS, label="(2)"),
        ModelSpec(**base, demographic_factors=DEMOGRAPHIC_COLUMNS,
                  interactions=MAJOR_INTERACTIONS, label="(3)"),
    ]
    _fit_specs(trust_long, specs, family)
    restricted = trust_long[~trust_long["subject_id"].isin(exclude_subjects)]
    _fit_specs(
        restricted,
        [ModelSpec(**base, demographic_factors=DEMOGRAPHIC_COLUMNS,
                   interactions=MAJOR_INTERACTIONS, label="(4)")],
        family,
    )
    return family


def subject_mean_discount(discount_long: pd.DataFrame) -> pd.DataFrame:
    """Collapse the six block rates to one mean rate per subject."""
    carried = ["high_trust"] + [c for c in DEMOGRAPHIC_COLUMNS if c in discount_long.columns]
    grouped = discount_long.groupby("subject_id", sort=True)
    frame = grouped[carried].first()
    frame["discount_rate"] = grouped["discount_rate"].mean()
    return frame.reset_index()


def discount_report(discount_long: pd.DataFrame) -> ReportFamily:
    """Treatment effect on discount rates: columns 1-3 use the subject mean,
    columns 4-6 use all six block rates per subject."""
    family = ReportFamily("Discount rates")
    mean_frame = subject_mean_discount(discount_long)
    base = dict(outcome="discount_rate")
    mean_specs = [
        ModelSpec(**base, label="(1) mean"),
        ModelSpec(**base, demographic_factors=DEMOGRAPHIC_COLUMNS, label="(2) mean"),
        ModelSpec(**base, demographic_factors=DEMOGRAPHIC_COLUMNS,
                  interactions=MAJOR_INTERACTIONS, label="(3) mean"),
    ]
    block_specs = [
        ModelSpec(**base, label="(4) blocks"),
        ModelSpec(**base, demographic_factors=DEMOGRAPHIC_COLUMNS, label="(5) blocks"),
        ModelSpec(**base, demographic_factors=DEMOGRAPHIC_COLUMNS,
                  interactions=MAJOR_INTERACTIONS, label="(6) blocks"),
    ]
    _fit_specs(mean_frame, mean_specs, family)
    _fit_specs(discount_long, block_specs, family)
    return family


def certainty_report(certainty_long: pd.DataFrame) -> ReportFamily:
    """Treatment effect on certainty, two observations per subject."""
    family = ReportFamily("Certainty about future outcomes")
    specs = [
        ModelSpec(outcome="certainty", label="(1)"),
        ModelSpec(outcome="certainty", demographic_factors=DEMOGRAPHIC_COLUMNS, label="(2)"),
    ]
    _fit_specs(certainty_long, specs, family)
    return family


def analyze_tables(tables: dict[str, pd.DataFrame]) -> dict[str, ReportFamily]:
    return {
        "trust": trust_report(tables["trust_long"]),
        "discount": discount_report(tables["discount_long"]),
        "certainty": certainty_report(tables["certainty_long"]),
    }


def analyze(data_dir: str | Path, report_path: str | Path | None = None) -> dict[str, ReportFamily]:
    """Run the full battery over an exported dataset directory.

    Writes a plain-text report plus a machine-readable JSON twin when
    report_path is given.
    """
    tables = read_tables(data_dir)
    for name, frame in tables.items():
        if frame.empty:
            raise ValueError(f"table {name} has no rows")
    reports = analyze_tables(tables)
    if report_path is not None:
        report_path = Path(report_path)
        report_path.parent.mkdir(parents=True, exist_ok=True)
        report_path.write_text(
            "\n\n".join(reports[k].text() for k in ("trust", "discount", "certainty")) + "\n"
        )
        machine = {k: results_to_dict(v.results) | {"notices": v.notices} for k, v in reports.items()}
        report_path.with_suffix(".json").write_text(json.dumps(machine, indent=2))
    return reports
