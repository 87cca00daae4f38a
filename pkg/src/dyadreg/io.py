"""CSV ingestion and report serialization.

CSV dialect: comma separated, UTF-8, mandatory header row, ``.`` decimal
separator, unquoted numerics (scientific notation accepted).
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .data import NodeTable, add_intercept, build_dataset
from .errors import DuplicateLabel, ParseError, UnknownColumn

__all__ = [
    "load_dyads_csv",
    "load_nodes_csv",
    "write_dyads_csv",
    "FitReport",
    "FIT_SCHEMA",
    "COVERAGE_SCHEMA",
    "dumps_json",
    "fit_report_csv",
    "coverage_report_csv",
]

FIT_SCHEMA = "dyadreg.fit_report/1"
COVERAGE_SCHEMA = "dyadreg.coverage_report/1"


def _read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file, header row required", row=0) from None
        header = [h.strip() for h in header]
        rows = []
        for row_no, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"{path}: row {row_no} (line {reader.line_num}) has {len(row)} fields, expected {len(header)}",
                    row=row_no,
                )
            rows.append((row_no, reader.line_num, row))
    return header, rows


def _columns(path, header, names):
    pos = {}
    for name in names:
        if name not in header:
            raise UnknownColumn(f"{path}: no column named {name!r} (have {', '.join(header)})")
        pos[name] = header.index(name)
    return pos


def _number(path, text, row_no, line_no, col):
    try:
        return float(text.strip())
    except ValueError:
        raise ParseError(
            f"{path}: row {row_no} (line {line_no}), column {col!r}: cannot parse {text!r} as a number",
            row=row_no,
        ) from None


def load_dyads_csv(path, outcome_col, regressor_cols, ego_col, alter_col, intercept=True):
    """Read one ordered pair per row into a validated :class:`DyadDataset`.

    Node indices follow the order in which labels first appear (ego before
    alter within a row). With ``intercept`` a leading ``"intercept"``
    column of ones is added.
    """
    regressor_cols = list(regressor_cols)
    header, rows = _read_rows(path)
    pos = _columns(path, header, [ego_col, alter_col, outcome_col] + regressor_cols)

    labels = {}
    records = []
    for row_no, line_no, row in rows:
        a, b = row[pos[ego_col]].strip(), row[pos[alter_col]].strip()
        if not a or not b:
            raise ParseError(f"{path}: row {row_no} (line {line_no}): empty node label", row=row_no)
        labels.setdefault(a, None)
        labels.setdefault(b, None)
        yv = _number(path, row[pos[outcome_col]], row_no, line_no, outcome_col)
        r = [_number(path, row[pos[c]], row_no, line_no, c) for c in regressor_cols]
        records.append((a, b, yv, r))
    if not records:
        raise ParseError(f"{path}: no data rows", row=0)
    if not regressor_cols:
        records = [(a, b, yv, np.zeros(0)) for a, b, yv, _ in records]
    ds = build_dataset(list(labels), records, regressor_names=regressor_cols)
    return add_intercept(ds) if intercept else ds


def load_nodes_csv(path, label_col):
    """Read a node attribute table; every non-label column must be numeric."""
    header, rows = _read_rows(path)
    _columns(path, header, [label_col])
    li = header.index(label_col)
    value_cols = [h for h in header if h != label_col]
    labels, values = [], {c: [] for c in value_cols}
    seen = set()
    for row_no, line_no, row in rows:
        lab = row[li].strip()
        if lab in seen:
            raise DuplicateLabel(f"{path}: row {row_no} (line {line_no}): duplicate label {lab!r}")
        seen.add(lab)
        labels.append(lab)
        for c in value_cols:
            values[c].append(_number(path, row[header.index(c)], row_no, line_no, c))
    return NodeTable(tuple(labels), {c: np.array(v) for c, v in values.items()})


def write_dyads_csv(dataset, path, ego_col="ego", alter_col="alter", outcome_col="y", include_intercept=False):
    """Write a dataset in the loader's format; ``repr`` keeps floats exact."""
    names = list(dataset.regressor_names)
    keep = [k for k, n in enumerate(names) if include_intercept or n != "intercept"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([ego_col, alter_col, outcome_col] + [names[k] for k in keep])
        for a, b, yv, r in dataset.records():
            w.writerow([a, b, repr(float(yv))] + [repr(float(r[k])) for k in keep])


def _num(x):
    if x is None:
        return None
    x = float(x)
    return None if math.isnan(x) else x


@dataclass
class FitReport:
    """Serializable summary of a fit and its standard errors.

    ``coefficients`` holds one dict per regressor with keys ``name``,
    ``estimate``, ``se`` and ``ci`` (the latter two keyed by estimator).
    """

    n_nodes: int
    n_dyads: int
    regressors: list
    level: float
    estimators: list
    sigma1_denominator: str
    coefficients: list
    convergence: dict
    vcov: dict | None = None
    warnings: list = field(default_factory=list)

    @classmethod
    def build(cls, dataset, fit, vcovs, level, estimators, sigma1_denominator, ci, include_vcov=False, warnings=()):
        coefs = []
        for k, name in enumerate(dataset.regressor_names):
            coefs.append(
                {
                    "name": name,
                    "estimate": _num(fit.theta_hat[k]),
                    "se": {e: _num(vcovs[e][1][k]) if e in vcovs else None for e in estimators},
                    "ci": {e: [_num(ci[e][0][k]), _num(ci[e][1][k])] if e in ci else None for e in estimators},
                }
            )
        conv = {
            "converged": bool(fit.converged),
            "iterations": int(fit.iterations),
            "score_norm": _num(fit.final_score_norm),
            "loglik": _num(fit.loglik_at_optimum),
        }
        vc = None
        if include_vcov:
            vc = {e: np.asarray(vcovs[e][0]).tolist() if e in vcovs else None for e in estimators}
        return cls(
            n_nodes=dataset.n_nodes,
            n_dyads=dataset.n_dyads,
            regressors=list(dataset.regressor_names),
            level=float(level),
            estimators=list(estimators),
            sigma1_denominator=sigma1_denominator,
            coefficients=coefs,
            convergence=conv,
            vcov=vc,
            warnings=list(fit.warnings) + list(warnings),
        )

    def to_dict(self) -> dict:
        d = {
            "schema": FIT_SCHEMA,
            "dataset": {"n_nodes": self.n_nodes, "n_dyads": self.n_dyads},
            "regressors": list(self.regressors),
            "level": self.level,
            "estimators": list(self.estimators),
            "sigma1_denominator": self.sigma1_denominator,
            "coefficients": self.coefficients,
            "convergence": self.convergence,
            "warnings": list(self.warnings),
        }
        if self.vcov is not None:
            d["vcov"] = self.vcov
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FitReport":
        if d.get("schema") != FIT_SCHEMA:
            raise ValueError(f"not a fit report (schema {d.get('schema')!r})")
        return cls(
            n_nodes=d["dataset"]["n_nodes"],
            n_dyads=d["dataset"]["n_dyads"],
            regressors=d["regressors"],
            level=d["level"],
            estimators=d["estimators"],
            sigma1_denominator=d["sigma1_denominator"],
            coefficients=d["coefficients"],
            convergence=d["convergence"],
            vcov=d.get("vcov"),
            warnings=d["warnings"],
        )

    def to_json(self) -> str:
        return dumps_json(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "FitReport":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        return fit_report_csv(self)


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _csv_text(header, rows):
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])
    return buf.getvalue()


def fit_report_csv(report: FitReport) -> str:
    """One row per coefficient per estimator."""
    rows = []
    for c in report.coefficients:
        for e in report.estimators:
            lo, hi = c["ci"][e] if c["ci"].get(e) else (None, None)
            rows.append([c["name"], e, c["estimate"], c["se"].get(e), lo, hi])
    return _csv_text(["coefficient", "estimator", "estimate", "se", "ci_lower", "ci_upper"], rows)


def coverage_report_csv(report_dict: dict) -> str:
    """One row per parameter per estimator from a coverage report dict."""
    rows = []
    for p in report_dict["parameters"]:
        for e in report_dict["config"]["estimators"]:
            rows.append(
                [p["name"], e, p["true"], p["coverage"][e], p["mc_se"][e], p["mean_estimate"], p["sd_estimate"]]
            )
    header = ["parameter", "estimator", "true", "coverage", "mc_se", "mean_estimate", "sd_estimate"]
    return _csv_text(header, rows)
