"""Long-format analysis dataset export.

Three tables, one CSV each, with fixed row laws per completed subject:
trust_long (5 rows: one per trust question), discount_long (6 rows: one per
choice block), certainty_long (2 rows: one per certainty block). Every table
carries the treatment indicator and the demographic categorical columns.
"""

from __future__ import annotations

from pathlib import Path

import pandas as pd

from . import preferences as pref
from . import questionnaires as q
from .econometrics import TREATMENT_COLUMN
from .session import ExperimentService, Stage, SubjectFlow
from .strategy import Treatment

DEMOGRAPHIC_COLUMNS = tuple(q.DEMOGRAPHIC_CATEGORIES)

TRUST_COLUMNS = ("subject_id", "question_id", "trust", TREATMENT_COLUMN) + DEMOGRAPHIC_COLUMNS
DISCOUNT_COLUMNS = (
    "subject_id", "block_id", "discount_rate", "censoring", "pattern",
    "non_monotone", TREATMENT_COLUMN,
) + DEMOGRAPHIC_COLUMNS
CERTAINTY_COLUMNS = (
    "subject_id", "block", "horizon_years", "certainty", TREATMENT_COLUMN,
) + DEMOGRAPHIC_COLUMNS

TABLE_FILES = {
    "trust_long": "trust_long.csv",
    "discount_long": "discount_long.csv",
    "certainty_long": "certainty_long.csv",
}


def _base_columns(flow: SubjectFlow) -> dict:
    row = {
        "subject_id": flow.subject_id,
        TREATMENT_COLUMN: int(flow.treatment == Treatment.HIGH_TRUST),
    }
    row.update(flow.responses.demographics)
    return row


def export_tables(service: ExperimentService) -> dict[str, pd.DataFrame]:
    """Build the three long tables from all Done-stage subjects."""
    flows = sorted(
        (f for f in service.flows.values() if f.stage == Stage.DONE),
        key=lambda f: f.subject_id,
    )
    trust_rows, discount_rows, certainty_rows = [], [], []
    for flow in flows:
        base = _base_columns(flow)
        coded = q.code_trust(flow.responses.trust_raw)
        for qid in sorted(coded):
            trust_rows.append({**base, "question_id": qid, "trust": coded[qid]})
        blocks = pref.blocks_from_responses(flow.responses.time_pref_answers)
        for block in blocks:
            est = pref.block_discount_rate(block)
            discount_rows.append({
                **base,
                "block_id": est.block_id,
                "discount_rate": est.rate,
                "censoring": est.censoring.value,
                "pattern": est.pattern,
                "non_monotone": int(est.non_monotone),
            })
        for i, score in enumerate(pref.certainty_scores(flow.responses.certainty)):
            certainty_rows.append({
                **base,
                "block": i + 1,
                "horizon_years": flow.responses.certainty[i].horizon_years,
                "certainty": score,
            })
    return {
        "trust_long": pd.DataFrame(trust_rows, columns=list(TRUST_COLUMNS)),
        "discount_long": pd.DataFrame(discount_rows, columns=list(DISCOUNT_COLUMNS)),
        "certainty_long": pd.DataFrame(certainty_rows, columns=list(CERTAINTY_COLUMNS)),
    }


def write_tables(tables: dict[str, pd.DataFrame], out_dir: str | Path) -> dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {}
    for name, filename in TABLE_FILES.items():
        path = out_dir / filename
        tables[name].to_csv(path, index=False, float_format="%.12g")
        paths[name] = path
    return paths


def read_tables(data_dir: str | Path) -> dict[str, pd.DataFrame]:
    """Load a previously exported dataset, checking the column dictionary."""
    data_dir = Path(data_dir)
    # Demographic columns are optional on read: datasets without them still
    # support the no-control specifications.
    required = {
        "trust_long": ("subject_id", "question_id", "trust", TREATMENT_COLUMN),
        "discount_long": (
            "subject_id", "block_id", "discount_rate", "censoring", "pattern",
            "non_monotone", TREATMENT_COLUMN,
        ),
        "certainty_long": (
            "subject_id", "block", "horizon_years", "certainty", TREATMENT_COLUMN,
        ),
    }
    tables = {}
    for name, filename in TABLE_FILES.items():
        path = data_dir / filename
        if not path.exists():
            raise FileNotFoundError(f"missing table file {path}")
        frame = pd.read_csv(path)
        missing = [c for c in required[name] if c not in frame.columns]
        if missing:
            raise ValueError(f"{filename} lacks required columns: {missing}")
        tables[name] = frame
    return tables


def export_dataset(service: ExperimentService, out_dir: str | Path) -> dict[str, Path]:
    """Export all completed subjects to CSV files under out_dir.

    With no completed subjects the tables are written empty, header only.
    """
    return write_tables(export_tables(service), out_dir)
