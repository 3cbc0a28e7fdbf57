"""Fuzzy knowledge base built from tabular data.

Each numeric attribute is segmented into fuzzy regions with fuzzy c-means:

    minimize  J = sum_i sum_j  u_ij^m * (x_i - c_j)^2
    subject to  sum_j u_ij = 1,  u_ij in [0, 1]

with the usual alternating updates

    u_ij = 1 / sum_k (d_ij / d_ik)^(2/(m-1))          (membership)
    c_j  = sum_i u_ij^m x_i / sum_i u_ij^m            (centroid)

A point sitting exactly on a centroid gets membership 1 there and 0
elsewhere.  Converged centroids are sorted ascending so linguistic labels
("low" < "high") always attach in a stable order.

The resulting per-attribute membership matrices form the knowledge base
consumed by query compilation and record scoring; out-of-sample values are
scored against the stored centroids with the same membership formula.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConfigError,
    DegenerateDataError,
    EmptyDatasetError,
    ParseError,
    ShapeError,
)

DEFAULT_CLUSTERS = 3
DEFAULT_FUZZIFIER = 2.0
DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 200

# Labels attached to clusters when the caller gives none, per cluster count.
_DEFAULT_LABELS = {
    2: ("low", "high"),
    3: ("low", "medium", "high"),
}


@dataclass
class Dataset:
    """Rectangular numeric table: one row per record, one column per attribute.

    Missing cells are stored as NaN; everything else is a finite float.
    """

    attributes: list[str]
    records: np.ndarray  # shape (record_count, len(attributes))

    def __post_init__(self):
        self.records = np.asarray(self.records, dtype=float)
        if self.records.ndim != 2 or self.records.shape[1] != len(self.attributes):
            raise ShapeError(0, "records do not form a rectangle over the attributes")

    @property
    def record_count(self) -> int:
        return self.records.shape[0]

    def column(self, attribute: str) -> np.ndarray:
        try:
            idx = self.attributes.index(attribute)
        except ValueError:
            raise ConfigError(f"unknown attribute {attribute!r}") from None
        return self.records[:, idx]


def ingest_tabular(source, has_header: bool = True, delimiter: str = ",") -> Dataset:
    """Read delimiter-separated UTF-8 text into a Dataset.

    ``source`` may be bytes, a string, or a (binary or text) file object.
    Attribute names come from the header row, or are synthesized as
    ``col0..colN-1`` when ``has_header`` is false.  Empty cells become NaN
    (missing); any other cell that does not parse as a number is an error.
    """
    text = _as_text(source)
    rows = [r for r in csv.reader(io.StringIO(text), delimiter=delimiter) if r]
    if not rows:
        raise EmptyDatasetError("input contains no rows")

    if has_header:
        attributes = [cell.strip() for cell in rows[0]]
        duplicates = {a for a in attributes if attributes.count(a) > 1}
        if duplicates:
            raise ParseError(f"duplicate attribute names in header: {sorted(duplicates)}")
        data_rows = rows[1:]
    else:
        attributes = [f"col{i}" for i in range(len(rows[0]))]
        data_rows = rows

    width = len(attributes)
    parsed = np.empty((len(data_rows), width), dtype=float)
    for i, row in enumerate(data_rows):
        if len(row) != width:
            raise ShapeError(i, f"row {i}: expected {width} cells, found {len(row)}")
        for j, cell in enumerate(row):
            cell = cell.strip()
            if cell == "":
                parsed[i, j] = math.nan
                continue
            try:
                parsed[i, j] = float(cell)
            except ValueError:
                raise ParseError(
                    f"cannot parse {cell!r} as a number", line=i, column=j
                ) from None
    return Dataset(attributes, parsed)


def _as_text(source) -> str:
    if isinstance(source, bytes):
        # utf-8-sig strips a byte-order mark, common in exported CSVs
        return source.decode("utf-8-sig")
    if isinstance(source, str):
        return source.lstrip("﻿")
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8-sig")
    return data.lstrip("﻿")


@dataclass(frozen=True)
class ClusterModel:
    """Fuzzy segmentation of one attribute: centroids with linguistic labels."""

    attribute: str
    centroids: tuple[float, ...]  # strictly ascending
    labels: tuple[str, ...]
    fuzzifier: float

    def __post_init__(self):
        if len(self.centroids) != len(self.labels):
            raise ConfigError(
                f"{self.attribute}: {len(self.labels)} labels for "
                f"{len(self.centroids)} centroids"
            )
        if any(b <= a for a, b in zip(self.centroids, self.centroids[1:])):
            raise DegenerateDataError(
                f"{self.attribute}: centroids are not strictly ascending"
            )
        if len(set(self.labels)) != len(self.labels):
            raise ConfigError(f"{self.attribute}: duplicate labels")
        if self.fuzzifier <= 1.0:
            raise ConfigError("fuzzifier must be > 1")

    def label_index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ConfigError(
                f"attribute {self.attribute!r} has no label {label!r}"
            ) from None


@dataclass
class MembershipMatrix:
    """Per-record membership degrees to each cluster of one attribute."""

    attribute: str
    values: np.ndarray  # shape (record_count, cluster_count), rows sum to 1

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.size:
            if self.values.min() < -1e-12 or self.values.max() > 1 + 1e-12:
                raise ValueError(f"{self.attribute}: membership outside [0, 1]")
            sums = self.values.sum(axis=1)
            if np.max(np.abs(sums - 1.0)) > 1e-9:
                raise ValueError(f"{self.attribute}: membership rows do not sum to 1")


@dataclass(frozen=True)
class FcmResult:
    """Converged fuzzy c-means run, with its per-iteration objective trace."""

    centroids: np.ndarray
    memberships: np.ndarray
    objective_trace: tuple[float, ...]
    iterations: int


def fuzzy_c_means(
    values,
    c: int,
    m: float = DEFAULT_FUZZIFIER,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    seed=0,
    init=None,
) -> FcmResult:
    """Cluster 1-D values into ``c`` fuzzy regions.

    Centroids start at evenly spaced data quantiles perturbed by seeded
    noise (reproducible for a fixed seed), unless ``init`` supplies
    explicit starting centroids.  Iteration stops once the largest centroid
    movement drops below ``tol`` or after ``max_iter`` rounds.  Returned
    centroids are sorted ascending, memberships aligned to that order.
    """
    x = np.asarray(values, dtype=float).ravel()
    if c < 2:
        raise ValueError("cluster count must be at least 2")
    if m <= 1.0:
        raise ValueError("fuzzifier must be > 1")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if x.size and not np.all(np.isfinite(x)):
        raise ParseError("values contain non-finite entries")
    if len(np.unique(x)) < c:
        raise DegenerateDataError(
            f"need at least {c} distinct values, found {len(np.unique(x))}"
        )

    if init is not None:
        centroids = np.sort(np.asarray(init, dtype=float))
        if centroids.shape != (c,):
            raise ValueError("init must supply one centroid per cluster")
    else:
        rng = np.random.default_rng(seed)
        quantiles = (np.arange(c) + 0.5) / c
        centroids = np.quantile(x, quantiles)
        spread = x.max() - x.min()
        centroids = np.sort(centroids + rng.normal(0.0, 1e-3 * spread, size=c))

    trace = []
    iterations = 0
    memberships = _membership_grid(x, centroids, m)
    for iterations in range(1, max_iter + 1):
        memberships = _membership_grid(x, centroids, m)
        weights = memberships**m
        mass = weights.sum(axis=0)
        # a cluster can lose all weight only while another centroid sits on
        # every point; keep it where it is instead of dividing by zero
        safe_mass = np.where(mass > 0.0, mass, 1.0)
        new_centroids = np.where(
            mass > 0.0, (weights * x[:, None]).sum(axis=0) / safe_mass, centroids
        )
        trace.append(float(np.sum(weights * (x[:, None] - new_centroids[None, :]) ** 2)))
        movement = np.max(np.abs(new_centroids - centroids))
        centroids = new_centroids
        if movement < tol:
            break

    order = np.argsort(centroids, kind="stable")
    centroids = centroids[order]
    memberships = _membership_grid(x, centroids, m)
    if np.any(np.diff(centroids) <= 0.0):
        raise DegenerateDataError("clusters collapsed onto the same centroid")
    return FcmResult(centroids, memberships, tuple(trace), iterations)


def _membership_grid(x: np.ndarray, centroids: np.ndarray, m: float) -> np.ndarray:
    """Membership of every value to every centroid; rows sum to 1."""
    d = np.abs(x[:, None] - centroids[None, :])
    out = np.zeros_like(d)
    dmin = d.min(axis=1)
    on_centroid = dmin == 0.0
    if np.any(on_centroid):
        hits = d[on_centroid] == 0.0
        out[on_centroid] = hits / hits.sum(axis=1, keepdims=True)
    off = ~on_centroid
    if np.any(off):
        # Scaling by the row minimum keeps the powers in (0, 1]: no overflow
        # however close a point sits to a centroid.
        ratio = (dmin[off, None] / d[off]) ** (2.0 / (m - 1.0))
        out[off] = ratio / ratio.sum(axis=1, keepdims=True)
    return out


def membership_vector(model: ClusterModel, value: float) -> np.ndarray:
    """Membership of a single (possibly unseen) value to the model's clusters."""
    if not math.isfinite(value):
        raise ParseError(f"cannot compute memberships for non-finite value {value!r}")
    grid = _membership_grid(
        np.array([value], dtype=float), np.asarray(model.centroids), model.fuzzifier
    )
    return grid[0]


@dataclass(frozen=True)
class AttributeConfig:
    """Per-attribute overrides for the knowledge-base build."""

    clusters: int | None = None
    labels: tuple[str, ...] | None = None


@dataclass(frozen=True)
class KBConfig:
    clusters: int = DEFAULT_CLUSTERS
    labels: tuple[str, ...] | None = None
    fuzzifier: float = DEFAULT_FUZZIFIER
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    seed: int = 0
    per_attribute: dict[str, AttributeConfig] = field(default_factory=dict)

    def resolve(self, attribute: str) -> tuple[int, tuple[str, ...]]:
        override = self.per_attribute.get(attribute, AttributeConfig())
        c = override.clusters if override.clusters is not None else self.clusters
        labels = override.labels if override.labels is not None else self.labels
        if labels is None:
            labels = _DEFAULT_LABELS.get(c) or tuple(f"c{i}" for i in range(c))
        if len(labels) != c:
            raise ConfigError(
                f"{attribute}: {len(labels)} labels configured for {c} clusters"
            )
        return c, tuple(labels)


@dataclass
class AttributeEntry:
    model: ClusterModel
    memberships: MembershipMatrix


@dataclass
class KnowledgeBase:
    """One (ClusterModel, MembershipMatrix) pair per dataset attribute."""

    entries: dict[str, AttributeEntry]
    provenance: dict

    def model(self, attribute: str) -> ClusterModel:
        try:
            return self.entries[attribute].model
        except KeyError:
            raise ConfigError(f"unknown attribute {attribute!r}") from None

    def membership_of(self, attribute: str, value: float) -> np.ndarray:
        """Membership vector of ``value`` under the attribute's cluster model."""
        return membership_vector(self.model(attribute), value)

    def to_document(self) -> dict:
        attributes = []
        for name, entry in self.entries.items():
            attributes.append(
                {
                    "name": name,
                    "labels": list(entry.model.labels),
                    "centroids": list(entry.model.centroids),
                    "fuzzifier": entry.model.fuzzifier,
                    "memberships": entry.memberships.values.tolist(),
                }
            )
        return {
            "format_version": 1,
            "attributes": attributes,
            "provenance": self.provenance,
        }

    @classmethod
    def from_document(cls, doc: dict) -> "KnowledgeBase":
        if doc.get("format_version") != 1:
            raise ConfigError("unsupported knowledge-base document version")
        entries = {}
        for attr in doc["attributes"]:
            model = ClusterModel(
                attribute=attr["name"],
                centroids=tuple(float(v) for v in attr["centroids"]),
                labels=tuple(attr["labels"]),
                fuzzifier=float(attr["fuzzifier"]),
            )
            matrix = MembershipMatrix(attr["name"], np.asarray(attr["memberships"]))
            entries[attr["name"]] = AttributeEntry(model, matrix)
        return cls(entries=entries, provenance=dict(doc.get("provenance", {})))

    def dump(self) -> str:
        return json.dumps(self.to_document(), ensure_ascii=False, indent=2) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.dump())

    @classmethod
    def load(cls, path) -> "KnowledgeBase":
        with open(path, encoding="utf-8") as f:
            return cls.from_document(json.load(f))


def membership_of(kb: KnowledgeBase, attribute: str, value: float) -> np.ndarray:
    return kb.membership_of(attribute, value)


def build_knowledge_base(
    dataset: Dataset, config: KBConfig | None = None, source: str | None = None
) -> KnowledgeBase:
    """Cluster every attribute of ``dataset`` and assemble the knowledge base.

    Deterministic for a fixed config seed: each attribute derives its own
    RNG stream from (seed, attribute position).
    """
    config = config or KBConfig()
    unknown = set(config.per_attribute) - set(dataset.attributes)
    if unknown:
        raise ConfigError(f"config references unknown attributes: {sorted(unknown)}")

    entries: dict[str, AttributeEntry] = {}
    clusters_used: dict[str, int] = {}
    iterations: dict[str, int] = {}
    for idx, attribute in enumerate(dataset.attributes):
        c, labels = config.resolve(attribute)
        column = dataset.column(attribute)
        if np.any(~np.isfinite(column)):
            bad = int(np.flatnonzero(~np.isfinite(column))[0])
            raise ParseError(
                f"attribute {attribute!r} has a missing or non-finite value",
                line=bad,
                column=idx,
            )
        result = fuzzy_c_means(
            column,
            c,
            m=config.fuzzifier,
            tol=config.tol,
            max_iter=config.max_iter,
            seed=np.random.SeedSequence(entropy=config.seed, spawn_key=(idx,)),
        )
        model = ClusterModel(
            attribute=attribute,
            centroids=tuple(float(v) for v in result.centroids),
            labels=labels,
            fuzzifier=config.fuzzifier,
        )
        entries[attribute] = AttributeEntry(
            model, MembershipMatrix(attribute, result.memberships)
        )
        clusters_used[attribute] = c
        iterations[attribute] = result.iterations

    provenance = {
        "source": source,
        "clusters": clusters_used,
        "fuzzifier": config.fuzzifier,
        "tol": config.tol,
        "max_iter": config.max_iter,
        "seed": config.seed,
        "iterations": iterations,
    }
    return KnowledgeBase(entries=entries, provenance=provenance)
