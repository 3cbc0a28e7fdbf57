"""Score and rank records against a compiled query.

Each record is projected onto the query's criteria space: for term k and
query variable i, the projection holds the record's membership degree to
the cluster labeled by the value term k picked for variable i.  Per-term
scores weight those memberships by node importance,

    S_k = sum_i(mu_ki * G_i) / sum_i(G_i)

and the final relevance is the fuzzy weighted disjunction

    score = max over k of min(S_k, U_k)

where U_k is the term's importance.  A record missing a bound attribute
degrades (membership 0, flagged) instead of failing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cpnet import node_importance
from .errors import BindingError, DegenerateQueryError
from .kb import Dataset, KnowledgeBase
from .query import WeightedQuery


@dataclass
class DataProjection:
    """Per-(term, variable) membership degrees of one record."""

    record_index: int
    variables: tuple[str, ...]
    entries: np.ndarray  # shape (term_count, len(variables)), values in [0, 1]
    missing: tuple[str, ...]  # variables whose record value was absent


@dataclass
class Evaluation:
    term_scores: tuple[float, ...]  # S_k
    clipped: tuple[float, ...]  # min(S_k, U_k)
    score: float  # max over k


@dataclass
class RankedResult:
    record_index: int
    term_scores: tuple[float, ...]
    clipped: tuple[float, ...]
    score: float | None
    missing: tuple[str, ...]
    error: str | None = None
    position: int | None = None


def project(
    kb: KnowledgeBase,
    query: WeightedQuery,
    record,
    record_index: int = 0,
) -> DataProjection:
    """Membership of ``record`` to every term's chosen clusters.

    ``record`` maps attribute names to values; a missing or non-finite
    value scores membership 0 for that variable under every term and is
    flagged.  A term label with no matching cluster is a BindingError.
    """
    variables = tuple(v.name for v in query.net.nodes)
    vectors: dict[str, dict[str, float] | None] = {}
    missing = []
    for name in variables:
        attribute = query.bindings[name]
        value = record.get(attribute)
        if value is None or not math.isfinite(value):
            vectors[name] = None
            missing.append(name)
            continue
        model = kb.model(attribute)
        grid = kb.membership_of(attribute, float(value))
        vectors[name] = dict(zip(model.labels, grid))

    entries = np.zeros((len(query.terms), len(variables)))
    for k, term in enumerate(query.terms):
        for i, name in enumerate(variables):
            wanted = term.assignment[name]
            degrees = vectors[name]
            if degrees is None:
                continue
            if wanted not in degrees:
                raise BindingError(
                    f"no cluster labeled {wanted!r} for attribute "
                    f"{query.bindings[name]!r}"
                )
            entries[k, i] = degrees[wanted]
    return DataProjection(
        record_index=record_index,
        variables=variables,
        entries=entries,
        missing=tuple(missing),
    )


def aggregate_term_score(memberships, importances) -> float:
    """Importance-weighted mean of one term's membership entries."""
    memberships = np.asarray(memberships, dtype=float)
    weights = np.asarray(importances, dtype=float)
    if memberships.size == 0:
        raise DegenerateQueryError("term has no variables to aggregate")
    total = weights.sum()
    if total <= 0:
        raise DegenerateQueryError("importance weights sum to zero")
    score = float(np.dot(memberships, weights) / total)
    return min(max(score, 0.0), 1.0)


def evaluate(
    projection: DataProjection,
    query: WeightedQuery,
    importance: dict[str, int],
) -> Evaluation:
    """All S_k, all min(S_k, U_k), and their maximum."""
    if not query.terms:
        raise DegenerateQueryError("query has no terms")
    weights = [importance[name] for name in projection.variables]
    term_scores = tuple(
        aggregate_term_score(projection.entries[k], weights)
        for k in range(len(query.terms))
    )
    clipped = tuple(
        min(s, term.importance) for s, term in zip(term_scores, query.terms)
    )
    return Evaluation(term_scores=term_scores, clipped=clipped, score=max(clipped))


def rank(
    kb: KnowledgeBase,
    query: WeightedQuery,
    dataset: Dataset,
    top_n: int | None = None,
) -> list[RankedResult]:
    """Score every record and sort best-first.

    Ties keep the input order; a record that cannot be scored at all keeps
    its error in the result instead of aborting the run.
    """
    importance = node_importance(query.net)
    columns = {a: i for i, a in enumerate(dataset.attributes)}
    bound = set(query.bindings.values())

    results = []
    for idx in range(dataset.record_count):
        row = dataset.records[idx]
        record = {a: float(row[columns[a]]) for a in bound if a in columns}
        try:
            projection = project(kb, query, record, record_index=idx)
            outcome = evaluate(projection, query, importance)
        except BindingError as exc:
            results.append(
                RankedResult(
                    record_index=idx,
                    term_scores=(),
                    clipped=(),
                    score=None,
                    missing=(),
                    error=str(exc),
                )
            )
            continue
        results.append(
            RankedResult(
                record_index=idx,
                term_scores=outcome.term_scores,
                clipped=outcome.clipped,
                score=outcome.score,
                missing=projection.missing,
            )
        )

    results.sort(key=lambda r: (-(r.score if r.score is not None else -1.0), r.record_index))
    for position, result in enumerate(results, start=1):
        result.position = position
    if top_n is not None:
        results = results[:top_n]
    return results
