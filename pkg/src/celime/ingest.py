"""Loading trigger-style event tables and measuring trigger overlap.

A schema maps each CSV column to a role: ``feature``, ``trigger`` or
``ignore``. Columns the schema does not mention are ignored. Schema files
are JSON objects of the form ``{"columns": {"<name>": "<role>", ...}}``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._fileio import atomic_write_text, format_float
from .datagen import Dataset

ROLES = ("feature", "trigger", "ignore")
_TRUE = {"1", "true", "1.0"}
_FALSE = {"0", "false", "0.0"}


class DataError(ValueError):
    """Input data cannot be loaded as requested."""


@dataclass
class LoadReport:
    rows_read: int = 0
    rows_kept: int = 0
    dropped_lines: list = field(default_factory=list)

    @property
    def rows_dropped(self) -> int:
        return len(self.dropped_lines)

    def to_dict(self) -> dict:
        return {
            "rows_read": self.rows_read,
            "rows_kept": self.rows_kept,
            "rows_dropped": self.rows_dropped,
            "dropped_lines": list(self.dropped_lines),
        }


@dataclass
class TriggerDataset:
    X: np.ndarray
    trigger_outcomes: np.ndarray
    trigger_names: list
    feature_names: list
    report: LoadReport = field(default_factory=LoadReport)

    def __post_init__(self):
        if self.trigger_outcomes.shape[1] != len(self.trigger_names):
            raise ValueError("one trigger name per outcome column required")
        if not np.all((self.trigger_outcomes == 0) | (self.trigger_outcomes == 1)):
            raise ValueError("trigger outcomes must be 0/1")

    def target(self, trigger) -> Dataset:
        """View one trigger column as the binary outcome of a :class:`Dataset`."""
        if isinstance(trigger, str):
            if trigger not in self.trigger_names:
                raise DataError(f"unknown trigger {trigger!r}")
            trigger = self.trigger_names.index(trigger)
        return Dataset(X=self.X, y=self.trigger_outcomes[:, trigger].astype(int),
                       feature_names=list(self.feature_names))


@dataclass(frozen=True)
class OverlapMatrix:
    values: np.ndarray
    labels: list
    inactive: np.ndarray  # triggers that never fire

    def to_csv_text(self) -> str:
        lines = [",".join(["label"] + list(self.labels))]
        for name, row in zip(self.labels, self.values):
            lines.append(",".join([name] + [format_float(v) for v in row]))
        return "\n".join(lines) + "\n"


def read_schema(path) -> dict:
    raw = json.loads(Path(path).read_text())
    cols = raw.get("columns", raw)
    bad = {k: v for k, v in cols.items() if v not in ROLES}
    if bad:
        raise DataError(f"unknown column roles: {bad}")
    return dict(cols)


def _parse_bool(cell: str):
    s = cell.strip().lower()
    if s in _TRUE:
        return 1
    if s in _FALSE:
        return 0
    return None


def _parse_float(cell: str):
    try:
        v = float(cell)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def load_csv(path, schema: dict) -> TriggerDataset:
    """Read a comma-separated, UTF-8 table with a header row.

    Rows with an unparseable or missing feature value, or a trigger cell that
    is not one of 0/1/true/false, are dropped and listed in the report by
    their 1-based line number.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path} is empty") from None
        missing = [c for c, r in schema.items() if r != "ignore" and c not in header]
        if missing:
            raise DataError(f"schema columns absent from header: {missing}")
        feat_cols = [i for i, h in enumerate(header) if schema.get(h) == "feature"]
        trig_cols = [i for i, h in enumerate(header) if schema.get(h) == "trigger"]
        if not trig_cols:
            raise DataError("schema names no trigger columns")
        report = LoadReport()
        feats, trigs = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            report.rows_read += 1
            if len(row) != len(header):
                report.dropped_lines.append(lineno)
                continue
            f = [_parse_float(row[i]) for i in feat_cols]
            t = [_parse_bool(row[i]) for i in trig_cols]
            if any(v is None for v in f) or any(v is None for v in t):
                report.dropped_lines.append(lineno)
                continue
            feats.append(f)
            trigs.append(t)
    report.rows_kept = len(feats)
    if not feats:
        raise DataError(f"all {report.rows_read} rows of {path} were dropped")
    return TriggerDataset(
        X=np.array(feats, dtype=float).reshape(len(feats), len(feat_cols)),
        trigger_outcomes=np.array(trigs, dtype=int),
        trigger_names=[header[i] for i in trig_cols],
        feature_names=[header[i] for i in feat_cols],
        report=report,
    )


def export_csv(ds: TriggerDataset, path) -> dict:
    """Write ``ds`` in the layout :func:`load_csv` reads; returns its schema."""
    lines = [",".join(list(ds.feature_names) + list(ds.trigger_names))]
    for xrow, trow in zip(ds.X, ds.trigger_outcomes):
        lines.append(",".join([format_float(v) for v in xrow] + [str(int(t)) for t in trow]))
    atomic_write_text(Path(path), "\n".join(lines) + "\n")
    schema = {n: "feature" for n in ds.feature_names}
    schema.update({n: "trigger" for n in ds.trigger_names})
    return schema


def overlap_matrix(trigger_outcomes, labels=None, mode: str = "jaccard") -> OverlapMatrix:
    """Pairwise overlap of trigger firing sets.

    ``jaccard`` gives ``|A & B| / |A | B|``; ``conditional`` gives
    ``|A & B| / |A|`` with ``A`` the row trigger. Triggers that never fire
    get an all-zero row and column, diagonal included.
    """
    T = np.asarray(trigger_outcomes)
    if T.ndim != 2 or T.shape[0] < 1:
        raise ValueError("need a 2-D outcome matrix with at least one event")
    T = (T != 0).astype(float)
    labels = list(labels) if labels is not None else [f"t{j}" for j in range(T.shape[1])]
    inter = T.T @ T
    size = np.diag(inter).copy()
    inactive = size == 0
    if mode == "jaccard":
        union = size[:, None] + size[None, :] - inter
        vals = np.divide(inter, union, out=np.zeros_like(inter), where=union > 0)
    elif mode == "conditional":
        denom = np.broadcast_to(size[:, None], inter.shape)
        vals = np.divide(inter, denom, out=np.zeros_like(inter), where=denom > 0)
    else:
        raise ValueError(f"unknown overlap mode {mode!r}")
    vals[inactive, :] = 0.0
    vals[:, inactive] = 0.0
    return OverlapMatrix(values=vals, labels=labels, inactive=inactive)


def assign_categories(trigger_names, rules) -> dict:
    """Map each trigger name to the category of the first matching rule.

    ``rules`` is an ordered mapping of keyword to category; a rule matches
    when the keyword occurs anywhere in the name. Unmatched names go to
    ``"other"``.
    """
    if not rules:
        raise ValueError("need at least one category rule")
    out = {}
    for name in trigger_names:
        out[name] = next((cat for key, cat in rules.items() if key in name), "other")
    return out


def group_categories(trigger_names, trigger_outcomes, rules, mode: str = "jaccard"):
    """Collapse triggers into categories and compute category overlap.

    A category fires on an event when any of its member triggers fires.
    Returns ``(assignment, category_outcomes, OverlapMatrix)``; categories
    appear in rule order, ``"other"`` last, and empty categories are omitted.
    """
    T = np.asarray(trigger_outcomes) != 0
    assignment = assign_categories(trigger_names, rules)
    order = list(dict.fromkeys(list(rules.values()) + ["other"]))
    cats = [c for c in order if c in assignment.values()]
    cols = []
    for cat in cats:
        members = [j for j, n in enumerate(trigger_names) if assignment[n] == cat]
        cols.append(T[:, members].any(axis=1))
    cat_T = np.column_stack(cols).astype(int)
    return assignment, cat_T, overlap_matrix(cat_T, labels=cats, mode=mode)
