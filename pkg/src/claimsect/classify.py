"""Scores + thresholds + taxonomy -> claim labels and class labels.

A claim is detected in a document when its score clears the claim's
threshold (strict ``>`` by default, configurable to ``>=``).  The optional
negation filter additionally requires the claim's score to beat its negated
variant's score — a precision filter that can only remove labels.  Class
assignment then follows the taxonomy: any_of / all_of membership with
absence-claim vetoes for multi-label tasks, a normalized-score argmax for
single-topic tasks, and a detected-claim majority vote (normalized-mean tie
break) for stance.
"""

from __future__ import annotations

from .scores import ScoreMatrix
from .taxonomy import Taxonomy, negated_column_id

STANCE_FAVOR = "favor"
STANCE_AGAINST = "against"
STANCE_NEUTRAL = "neutral"

THRESHOLD_EPS = 1e-6


class ClassifyError(ValueError):
    pass


ThresholdSet = dict[str, float]
ClaimLabeling = dict[str, set[str]]


def ensure_thresholds_cover(
    taxonomy: Taxonomy, thresholds: ThresholdSet, lo: float, hi: float
) -> None:
    for claim_id in taxonomy.claim_ids():
        if claim_id not in thresholds:
            raise ClassifyError(f"no threshold for claim {claim_id!r}")
        t = thresholds[claim_id]
        if not lo <= t <= hi:
            raise ClassifyError(
                f"threshold {t} for claim {claim_id!r} outside [{lo}, {hi}]"
            )


def zero_shot_thresholds(taxonomy: Taxonomy, value: float = 0.5) -> ThresholdSet:
    """One uniform threshold for every claim — the no-annotation baseline."""
    return {cid: value for cid in taxonomy.claim_ids()}


def detect_claims(
    matrix: ScoreMatrix,
    thresholds: ThresholdSet,
    taxonomy: Taxonomy,
    negation_filter: bool = False,
    comparator: str = ">",
) -> ClaimLabeling:
    """Per-document set of detected claim ids.

    With the negation filter on, a claim that declares a negated variant is
    only detected when its score also exceeds the negated column's score.
    """
    if comparator not in (">", ">="):
        raise ClassifyError(f"comparator must be '>' or '>=', got {comparator!r}")
    ensure_thresholds_cover(taxonomy, thresholds, matrix.range_lo, matrix.range_hi)
    if negation_filter:
        for claim in taxonomy.claims:
            if claim.negated_text is not None and not matrix.has_claim(
                negated_column_id(claim.claim_id)
            ):
                raise ClassifyError(
                    f"negation filter needs column {negated_column_id(claim.claim_id)!r}"
                )
    hit = (lambda s, t: s > t) if comparator == ">" else (lambda s, t: s >= t)
    labeling: ClaimLabeling = {d: set() for d in matrix.doc_ids}
    for claim in taxonomy.claims:
        if not matrix.has_claim(claim.claim_id):
            raise ClassifyError(f"no score column for claim {claim.claim_id!r}")
        t = thresholds[claim.claim_id]
        neg = (
            negated_column_id(claim.claim_id)
            if negation_filter and claim.negated_text is not None
            else None
        )
        for doc_id in matrix.doc_ids:
            s = matrix.score(doc_id, claim.claim_id)
            if not hit(s, t):
                continue
            if neg is not None and not s > matrix.score(doc_id, neg):
                continue
            labeling[doc_id].add(claim.claim_id)
    return labeling


def normalize_score(x: float, t_c: float) -> float:
    """Piecewise-linear rescaling that maps the claim's threshold to 0.5.

    Scores at or below the threshold land in [0, 0.5], scores above it in
    (0.5, 1].  The threshold is clamped away from 0 and 1 so both branches
    stay well-defined.
    """
    t = min(max(t_c, THRESHOLD_EPS), 1.0 - THRESHOLD_EPS)
    if x <= t:
        return 0.5 * x / t
    return 0.5 + 0.5 * (x - t) / (1.0 - t)


def classify_multilabel(labeling: ClaimLabeling, taxonomy: Taxonomy) -> dict[str, set[str]]:
    """Class sets from detected claims: any_of needs one member, all_of needs
    every member, and any detected absence claim vetoes the class."""
    out: dict[str, set[str]] = {}
    for doc_id, detected in labeling.items():
        assigned: set[str] = set()
        for rule in taxonomy.classes:
            members = set(rule.member_claims)
            if rule.mode == "all_of":
                ok = members <= detected
            else:
                ok = bool(members & detected)
            if ok and not (set(rule.absence_claims) & detected):
                assigned.add(rule.class_id)
        out[doc_id] = assigned
    return out


def classify_topic(
    matrix: ScoreMatrix,
    thresholds: ThresholdSet,
    taxonomy: Taxonomy,
) -> dict[str, str]:
    """Single topic per document: the class whose claims have the greatest
    mean normalized score.  Ties break toward the smaller class_id."""
    if taxonomy.task_kind != "multi_class_topic":
        raise ClassifyError(
            f"classify_topic needs a multi_class_topic taxonomy, got {taxonomy.task_kind}"
        )
    ensure_thresholds_cover(taxonomy, thresholds, matrix.range_lo, matrix.range_hi)
    out: dict[str, str] = {}
    for doc_id in matrix.doc_ids:
        best: tuple[float, str] | None = None
        for rule in sorted(taxonomy.classes, key=lambda r: r.class_id):
            vals = [
                normalize_score(
                    matrix.score(doc_id, cid), thresholds[cid]
                )
                for cid in rule.member_claims
            ]
            mean = sum(vals) / len(vals)
            if best is None or mean > best[0]:
                best = (mean, rule.class_id)
        assert best is not None
        out[doc_id] = best[1]
    return out


def classify_stance(
    matrix: ScoreMatrix,
    thresholds: ThresholdSet,
    taxonomy: Taxonomy,
    topic: str,
    doc_ids: list[str] | None = None,
    negation_filter: bool = False,
    comparator: str = ">",
) -> dict[str, str]:
    """Stance of each document toward ``topic``.

    Majority of detected against vs favor claims; a non-zero tie falls back
    to the higher mean normalized score over each side's full claim list,
    and an exact residual tie is neutral.
    """
    against_rule, favor_rule = taxonomy.stance_partition(topic)
    detected = detect_claims(
        matrix, thresholds, taxonomy, negation_filter=negation_filter, comparator=comparator
    )
    docs = list(matrix.doc_ids) if doc_ids is None else doc_ids
    out: dict[str, str] = {}
    for doc_id in docs:
        hits = detected[doc_id]
        n_a = len(hits & set(against_rule.member_claims))
        n_f = len(hits & set(favor_rule.member_claims))
        if n_a == 0 and n_f == 0:
            out[doc_id] = STANCE_NEUTRAL
        elif n_a > n_f:
            out[doc_id] = STANCE_AGAINST
        elif n_f > n_a:
            out[doc_id] = STANCE_FAVOR
        else:
            mean_a = _normalized_mean(matrix, thresholds, doc_id, against_rule.member_claims)
            mean_f = _normalized_mean(matrix, thresholds, doc_id, favor_rule.member_claims)
            if mean_a > mean_f:
                out[doc_id] = STANCE_AGAINST
            elif mean_f > mean_a:
                out[doc_id] = STANCE_FAVOR
            else:
                out[doc_id] = STANCE_NEUTRAL
    return out


def _normalized_mean(
    matrix: ScoreMatrix, thresholds: ThresholdSet, doc_id: str, claim_ids: tuple[str, ...]
) -> float:
    vals = [
        normalize_score(matrix.score(doc_id, cid), thresholds[cid])
        for cid in claim_ids
    ]
    return sum(vals) / len(vals)
