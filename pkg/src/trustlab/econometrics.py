"""Design-matrix construction and OLS with heteroskedasticity-robust standard
errors, for treatment-effect models with question fixed effects, demographic
dummies, and factor-level x treatment interactions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy import stats
from scipy.linalg import qr

TREATMENT_COLUMN = "high_trust"

STAR_THRESHOLDS = ((0.01, "***"), (0.05, "**"), (0.10, "*"))


class DesignError(ValueError):
    pass


class RankDeficiencyError(DesignError):
    def __init__(self, aliased: list[str]):
        self.aliased = aliased
        super().__init__(f"design matrix is rank deficient; aliased columns: {aliased}")


@dataclass(frozen=True)
class ModelSpec:
    """Declarative regression specification over a long-format dataset.

    Factors use reference-level omission: one dummy per non-reference level,
    reference = first level in sorted order. Interactions are (factor, level)
    pairs whose dummy is multiplied by the treatment indicator.
    """

    outcome: str
    treatment_dummy: bool = True
    fixed_effect_factor: str | None = None
    demographic_factors: tuple[str, ...] = ()
    interactions: tuple[tuple[str, str], ...] = ()
    label: str = ""


@dataclass
class DesignMatrix:
    X: np.ndarray
    y: np.ndarray
    names: list[str]

    @property
    def nobs(self) -> int:
        return self.X.shape[0]

    @property
    def nparams(self) -> int:
        return self.X.shape[1]


@dataclass
class RegressionResult:
    names: list[str]
    coef: np.ndarray
    cov: np.ndarray
    se: np.ndarray
    tstats: np.ndarray
    pvalues: np.ndarray
    r_squared: float
    adj_r_squared: float
    nobs: int
    nparams: int
    residuals: np.ndarray = field(repr=False, default=None)
    label: str = ""

    def __getitem__(self, name: str) -> float:
        return float(self.coef[self.names.index(name)])

    def se_for(self, name: str) -> float:
        return float(self.se[self.names.index(name)])

    def pvalue_for(self, name: str) -> float:
        return float(self.pvalues[self.names.index(name)])

    def conf_int(self, name: str, level: float = 0.95) -> tuple[float, float]:
        z = stats.norm.ppf(0.5 + level / 2)
        i = self.names.index(name)
        return float(self.coef[i] - z * self.se[i]), float(self.coef[i] + z * self.se[i])


def _factor_dummies(df: pd.DataFrame, column: str, prefix: str) -> tuple[list[np.ndarray], list[str]]:
    levels = sorted(df[column].astype(str).unique())
    cols, names = [], []
    for level in levels[1:]:  # first sorted level is the omitted reference
        cols.append((df[column].astype(str) == level).to_numpy(dtype=float))
        names.append(f"{prefix}[{level}]")
    return cols, names


def _aliased_columns(X: np.ndarray, names: list[str]) -> list[str]:
    # Pivoted QR: trailing pivots with negligible diagonal are the aliased columns.
    _, R, piv = qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    tol = diag.max() * max(X.shape) * np.finfo(float).eps if diag.size else 0.0
    return [names[piv[i]] for i in range(len(diag)) if diag[i] <= tol]


def build_design(df: pd.DataFrame, spec: ModelSpec) -> DesignMatrix:
    """Materialize a full-rank design matrix, with listwise deletion of rows
    missing any used column."""
    used = [spec.outcome]
    if spec.treatment_dummy or spec.interactions:
        used.append(TREATMENT_COLUMN)
    if spec.fixed_effect_factor:
        used.append(spec.fixed_effect_factor)
    used.extend(spec.demographic_factors)
    used.extend(f for f, _ in spec.interactions)
    missing = [c for c in dict.fromkeys(used) if c not in df.columns]
    if missing:
        raise DesignError(f"dataset lacks columns: {missing}")

    data = df.dropna(subset=list(dict.fromkeys(used)))
    if data.empty:
        raise DesignError("no complete rows after listwise deletion")

    n = len(data)
    cols = [np.ones(n)]
    names = ["intercept"]
    if spec.treatment_dummy:
        cols.append(data[TREATMENT_COLUMN].to_numpy(dtype=float))
        names.append(TREATMENT_COLUMN)
    if spec.fixed_effect_factor:
        c, nm = _factor_dummies(data, spec.fixed_effect_factor, spec.fixed_effect_factor)
        cols.extend(c)
        names.extend(nm)
    for factor in spec.demographic_factors:
        c, nm = _factor_dummies(data, factor, factor)
        cols.extend(c)
        names.extend(nm)
    treatment = data[TREATMENT_COLUMN].to_numpy(dtype=float) if spec.interactions else None
    for factor, level in spec.interactions:
        dummy = (data[factor].astype(str) == str(level)).to_numpy(dtype=float)
        cols.append(dummy * treatment)
        names.append(f"{factor}[{level}]:{TREATMENT_COLUMN}")

    X = np.column_stack(cols)
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise RankDeficiencyError(_aliased_columns(X, names))
    y = data[spec.outcome].to_numpy(dtype=float)
    return DesignMatrix(X=X, y=y, names=names)


def robust_covariance(X: np.ndarray, residuals: np.ndarray, variant: str = "HC1") -> np.ndarray:
    """Heteroskedasticity-consistent sandwich covariance (HC0 or HC1)."""
    n, k = X.shape
    xtx_inv = np.linalg.inv(X.T @ X)
    meat = (X * residuals[:, None] ** 2).T @ X
    cov = xtx_inv @ meat @ xtx_inv
    if variant == "HC1":
        if n <= k:
            raise DesignError("HC1 correction undefined for N <= k")
        cov = cov * n / (n - k)
    elif variant != "HC0":
        raise DesignError(f"unknown robust variant {variant!r}")
    return cov


def ols_fit(
    dm: DesignMatrix,
    cov_variant: str = "HC1",
    pvalue_dist: str = "normal",
    label: str = "",
) -> RegressionResult:
    """OLS point estimates plus robust inference on a full-rank design."""
    n, k = dm.X.shape
    if n <= k:
        raise DesignError(f"need N > k, got N={n}, k={k}")
    coef, _, rank, _ = np.linalg.lstsq(dm.X, dm.y, rcond=None)
    if rank < k:
        raise RankDeficiencyError(_aliased_columns(dm.X, dm.names))
    fitted = dm.X @ coef
    residuals = dm.y - fitted
    cov = robust_covariance(dm.X, residuals, cov_variant)
    se = np.sqrt(np.diag(cov))
    with np.errstate(divide="ignore", invalid="ignore"):
        tstats = np.where(se > 0, coef / se, 0.0)
    if pvalue_dist == "normal":
        pvalues = 2 * stats.norm.sf(np.abs(tstats))
    elif pvalue_dist == "t":
        pvalues = 2 * stats.t.sf(np.abs(tstats), df=n - k)
    else:
        raise DesignError(f"unknown p-value distribution {pvalue_dist!r}")
    ss_res = float(residuals @ residuals)
    ss_tot = float(((dm.y - dm.y.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0 else 1 - ss_res / ss_tot
    adj_r2 = 1 - (1 - r2) * (n - 1) / (n - k) if n > k else float("nan")
    return RegressionResult(
        names=list(dm.names),
        coef=coef,
        cov=cov,
        se=se,
        tstats=tstats,
        pvalues=pvalues,
        r_squared=r2,
        adj_r_squared=adj_r2,
        nobs=n,
        nparams=k,
        residuals=residuals,
        label=label,
    )


def fit(df: pd.DataFrame, spec: ModelSpec, **kwargs) -> RegressionResult:
    """Build the design for a spec and fit it."""
    kwargs.setdefault("label", spec.label)
    return ols_fit(build_design(df, spec), **kwargs)


def significance_marker(pvalue: float) -> str:
    """Stars at the 1/5/10 percent levels (strict inequality at each bound)."""
    for threshold, marker in STAR_THRESHOLDS:
        if pvalue < threshold:
            return marker
    return ""


def regression_table(results: list[RegressionResult], title: str = "") -> str:
    """Side-by-side text table: one column per specification, coefficient rows
    with robust SEs in parentheses, then N and adjusted R-squared."""
    row_names: list[str] = []
    for res in results:
        for name in res.names:
            if name not in row_names:
                row_names.append(name)
    headers = [res.label or f"({i + 1})" for i, res in enumerate(results)]
    width = max([18] + [len(h) + 2 for h in headers])
    name_width = max([12] + [len(n) for n in row_names]) + 2

    def cell(text: str) -> str:
        return text.rjust(width)

    lines = []
    if title:
        lines.append(title)
    lines.append(" " * name_width + "".join(cell(h) for h in headers))
    for name in row_names:
        coef_cells, se_cells = [], []
        for res in results:
            if name in res.names:
                b = res[name]
                stars = significance_marker(res.pvalue_for(name))
                coef_cells.append(cell(f"{b:.4f}{stars}"))
                se_cells.append(cell(f"({res.se_for(name):.4f})"))
            else:
                coef_cells.append(cell(""))
                se_cells.append(cell(""))
        lines.append(name.ljust(name_width) + "".join(coef_cells))
        lines.append(" " * name_width + "".join(se_cells))
    lines.append("N".ljust(name_width) + "".join(cell(str(r.nobs)) for r in results))
    lines.append(
        "adj. R2".ljust(name_width)
        + "".join(cell(f"{r.adj_r_squared:.3f}") for r in results)
    )
    lines.append("Robust (HC1) standard errors in parentheses. * p<0.10, ** p<0.05, *** p<0.01.")
    return "\n".join(lines)


def results_to_dict(results: list[RegressionResult]) -> dict:
    """Machine-readable form of a set of fitted specifications."""
    return {
        "specifications": [
            {
                "label": res.label,
                "nobs": res.nobs,
                "r_squared": res.r_squared,
                "adj_r_squared": res.adj_r_squared,
                "coefficients": {
                    name: {
                        "estimate": float(res.coef[i]),
                        "se": float(res.se[i]),
                        "t": float(res.tstats[i]),
                        "p": float(res.pvalues[i]),
                    }
                    for i, name in enumerate(res.names)
                },
            }
            for res in results
        ]
    }
