"""Synthetic classification problems with redundant features, and random costs.

Column blocks, in order: informative, linear combinations of informative,
exact duplicates of informative-or-combination columns, pure noise.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._fileio import atomic_write_text, format_float

INFORMATIVE, COMBO, DUPLICATE, NOISE = "informative", "combo", "duplicate", "noise"
LABEL_COLUMN = "label"


@dataclass(frozen=True)
class ToySpec:
    n: int = 1000
    p: int = 80
    n_informative: int = 20
    n_linear_combo: int = 20
    n_duplicate: int = 20
    n_noise: int | None = None  # None -> whatever is left of p
    label_flip_prob: float = 0.01
    class_sep: float = 1.0
    seed: int = 0

    def __post_init__(self):
        counts = (self.n_informative, self.n_linear_combo, self.n_duplicate)
        if any(c < 0 for c in counts):
            raise ValueError("feature counts must be nonnegative")
        if self.n_noise is None:
            object.__setattr__(self, "n_noise", self.p - sum(counts))
        if self.n_noise < 0 or sum(counts) + self.n_noise != self.p:
            raise ValueError(
                "n_informative + n_linear_combo + n_duplicate + n_noise must equal p"
            )
        if self.n_informative < 1:
            raise ValueError("need at least one informative feature")
        if self.n < 2 or self.p < 1:
            raise ValueError("need n >= 2 and p >= 1")
        if not 0.0 <= self.label_flip_prob < 0.5:
            raise ValueError("label_flip_prob must lie in [0, 0.5)")
        if not self.class_sep > 0:
            raise ValueError("class_sep must be positive")


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    feature_names: list
    provenance: list | None = None
    sources: dict = field(default_factory=dict)  # duplicate column -> source column

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


def _draw(spec: ToySpec, rng: np.random.Generator) -> Dataset:
    n = spec.n
    k = spec.n_informative
    inf = rng.standard_normal((n, k))
    direction = rng.standard_normal(k)
    direction /= np.linalg.norm(direction)
    score = inf @ direction
    y = (score > 0).astype(int)
    # push each class off the hyperplane: every point ends at margin >= class_sep
    inf = inf + np.outer(spec.class_sep * (2 * y - 1), direction)

    combo_coef = rng.standard_normal((k, spec.n_linear_combo))
    combo = inf @ combo_coef
    base = np.hstack([inf, combo])
    src = rng.integers(0, base.shape[1], size=spec.n_duplicate)
    dup = base[:, src]
    noise = rng.standard_normal((n, spec.n_noise))
    X = np.hstack([base, dup, noise])

    flip = rng.random(n) < spec.label_flip_prob
    y = np.where(flip, 1 - y, y)

    provenance = (
        [INFORMATIVE] * k + [COMBO] * spec.n_linear_combo
        + [DUPLICATE] * spec.n_duplicate + [NOISE] * spec.n_noise
    )
    names = [f"f{j:03d}" for j in range(spec.p)]
    off = base.shape[1]
    sources = {off + i: int(s) for i, s in enumerate(src)}
    return Dataset(X=X, y=y, feature_names=names, provenance=provenance, sources=sources)


def generate_toy(spec: ToySpec | None = None) -> Dataset:
    """Draw a toy problem; deterministic in ``spec.seed``.

    Informative features start standard normal. A random unit direction
    labels each row by side of the hyperplane, and each class is then
    shifted ``class_sep`` away from it along that direction. Labels are
    flipped independently with ``label_flip_prob``. If a draw ends with a
    single class, it is redrawn from sub-seed ``(seed, attempt)``.
    """
    spec = spec or ToySpec()
    for attempt in range(10):
        rng = np.random.default_rng([spec.seed, attempt])
        ds = _draw(spec, rng)
        if 0 < ds.y.sum() < ds.n:
            return ds
    raise RuntimeError("could not draw a dataset with both classes in 10 attempts")


def sample_costs(p: int, low: float = 0.0, high: float = 10.0, seed: int = 0) -> np.ndarray:
    """I.i.d. ``Uniform(low, high)`` costs, kept strictly positive."""
    if p < 1:
        raise ValueError("p must be positive")
    if not (0 <= low < high):
        raise ValueError("need 0 <= low < high")
    rng = np.random.default_rng(seed)
    c = rng.uniform(low, high, size=p)
    floor = np.nextafter(low, np.inf)
    c[c <= low] = floor
    return c


def export_csv(ds: Dataset, path, label_column: str = LABEL_COLUMN) -> dict:
    """Write ``ds`` as CSV and return the ingest schema for it.

    Also writes ``<path>.schema.json`` and, for generated data,
    ``<path>.provenance.json``.
    """
    path = Path(path)
    lines = [",".join(list(ds.feature_names) + [label_column])]
    for row, label in zip(ds.X, ds.y):
        lines.append(",".join([format_float(v) for v in row] + [str(int(label))]))
    atomic_write_text(path, "\n".join(lines) + "\n")

    schema = {name: "feature" for name in ds.feature_names}
    schema[label_column] = "trigger"
    atomic_write_text(schema_path(path), json.dumps({"columns": schema}, indent=2) + "\n")
    if ds.provenance is not None:
        side = {
            "provenance": dict(zip(ds.feature_names, ds.provenance)),
            "duplicate_sources": {
                ds.feature_names[k]: ds.feature_names[v] for k, v in sorted(ds.sources.items())
            },
        }
        atomic_write_text(provenance_path(path), json.dumps(side, indent=2) + "\n")
    return schema


def schema_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".schema.json")


def provenance_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".provenance.json")


def write_costs(path, costs, feature_names) -> None:
    lines = ["feature,cost"] + [f"{n},{format_float(c)}" for n, c in zip(feature_names, costs)]
    atomic_write_text(Path(path), "\n".join(lines) + "\n")


def read_costs(path, feature_names) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        table = {row["feature"]: float(row["cost"]) for row in csv.DictReader(fh)}
    missing = [n for n in feature_names if n not in table]
    if missing:
        raise ValueError(f"cost file lacks features: {missing[:5]}")
    return np.array([table[n] for n in feature_names])
