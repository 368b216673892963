"""Metrics and experiment harnesses.

Covers support-weighted precision/recall/F1, the accuracy-maximizing
ground-truth threshold used as the reference point for trajectory
experiments, the annotator-correctness sweep (how fast the estimated
threshold approaches the reference as annotations accumulate), fold
stability (threshold spread across equal splits of the data), and the
temperature-scaling calibration baseline.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .annotation import SimulatedAnnotator, _stable_unit, simulate_answer
from .pba import BisectionConfig, Column, run_session
from .scores import Document, ScoreMatrix
from .taxonomy import Taxonomy


class EvalError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Weighted precision / recall / F1
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class MetricReport:
    per_class: dict[str, ClassMetrics]
    weighted: ClassMetrics
    annotations: int | None = None


def weighted_f1(
    pred: dict[str, set[str]],
    gold: dict[str, set[str]],
    classes: Sequence[str],
) -> MetricReport:
    """Multi-label P/R/F1 per class, averaged with gold-support weights.

    A class with neither gold nor predicted examples gets P = R = F1 = 0 by
    convention.  Documents are the keys of ``gold``; a document absent from
    ``pred`` counts as predicted-empty.
    """
    per_class: dict[str, ClassMetrics] = {}
    for cls in classes:
        tp = fp = fn = 0
        for doc_id, gold_set in gold.items():
            p = cls in pred.get(doc_id, set())
            g = cls in gold_set
            tp += p and g
            fp += p and not g
            fn += g and not p
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[cls] = ClassMetrics(precision, recall, f1, support=tp + fn)
    total = sum(m.support for m in per_class.values())
    if total:
        wp = sum(m.precision * m.support for m in per_class.values()) / total
        wr = sum(m.recall * m.support for m in per_class.values()) / total
        wf = sum(m.f1 * m.support for m in per_class.values()) / total
    else:
        wp = wr = wf = 0.0
    return MetricReport(per_class=per_class, weighted=ClassMetrics(wp, wr, wf, total))


@dataclass(frozen=True)
class MetricDelta:
    precision: float
    recall: float
    f1: float


@dataclass
class DeltaReport:
    per_class: dict[str, MetricDelta]
    weighted: MetricDelta


def compare_runs(a: MetricReport, b: MetricReport) -> DeltaReport:
    """Per-class and weighted metric deltas (b minus a), as plain
    differences on the 0-1 scale, i.e. +0.02 is two percentage points."""
    if set(a.per_class) != set(b.per_class):
        raise EvalError(
            f"class sets differ: {sorted(set(a.per_class) ^ set(b.per_class))}"
        )
    per_class = {
        cls: MetricDelta(
            b.per_class[cls].precision - a.per_class[cls].precision,
            b.per_class[cls].recall - a.per_class[cls].recall,
            b.per_class[cls].f1 - a.per_class[cls].f1,
        )
        for cls in a.per_class
    }
    weighted = MetricDelta(
        b.weighted.precision - a.weighted.precision,
        b.weighted.recall - a.weighted.recall,
        b.weighted.f1 - a.weighted.f1,
    )
    return DeltaReport(per_class=per_class, weighted=weighted)


# ---------------------------------------------------------------------------
# Ground-truth threshold
# ---------------------------------------------------------------------------


def ground_truth_threshold(
    pairs: Sequence[tuple[float, bool]],
    lo: float = 0.0,
    hi: float = 1.0,
) -> float:
    """Threshold maximizing accuracy of the rule ``entailed iff score > t``.

    Accuracy is piecewise constant in the threshold, so midpoints between
    consecutive distinct scores plus the range endpoints exhaust the
    achievable accuracies; ties resolve to the smallest candidate.
    """
    if not any(e for _, e in pairs) or not any(not e for _, e in pairs):
        raise EvalError("need at least one positive and one negative pair")
    scores = np.array([s for s, _ in pairs])
    labels = np.array([e for _, e in pairs])
    distinct = np.unique(scores)
    candidates = np.concatenate(
        ([lo], (distinct[:-1] + distinct[1:]) / 2.0, [hi])
    )
    # correct when (score > t) == label
    over = scores[None, :] > candidates[:, None]
    accuracy = (over == labels[None, :]).mean(axis=1)
    best = accuracy.max()
    return float(candidates[np.argmax(accuracy == best)])


# ---------------------------------------------------------------------------
# Temperature scaling
# ---------------------------------------------------------------------------

LOGIT_CLAMP = 1e-6
_T_SEARCH_LOG_BOUNDS = (math.log(0.01), math.log(100.0))


def _logit(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, LOGIT_CLAMP, 1.0 - LOGIT_CLAMP)
    return np.log(x / (1.0 - x))


def _nll(logits: np.ndarray, labels: np.ndarray, temperature: float) -> float:
    z = logits / temperature
    # -[y log sigma(z) + (1-y) log(1 - sigma(z))], stable via logaddexp
    return float(
        np.sum(np.logaddexp(0.0, -z) * labels + np.logaddexp(0.0, z) * (1 - labels))
    )


def _golden_section_min(f: Callable[[float], float], lo: float, hi: float,
                        tol: float = 1e-8) -> float:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a + b) / 2.0


@dataclass(frozen=True)
class TemperatureCalibrator:
    temperature: float
    low_confidence: bool = False

    def calibrate(self, score: float) -> float:
        z = float(_logit(np.array([score]))[0]) / self.temperature
        return 1.0 / (1.0 + math.exp(-z))

    def detect(self, score: float) -> bool:
        return self.calibrate(score) > 0.5


def fit_temperature(
    samples: Sequence[tuple[float, bool]],
    n_per_class: int,
    seed: int = 0,
) -> TemperatureCalibrator:
    """Fit a single temperature on N positives + N negatives drawn from
    ``samples`` (seeded), minimizing the negative log-likelihood of
    sigmoid(logit/T) by golden-section search on log T.

    Note that dividing logits by a positive temperature never moves the 0.5
    decision boundary; the calibrator reshapes confidence, not detections.
    """
    pos = [s for s, e in samples if e]
    neg = [s for s, e in samples if not e]
    if len(pos) < n_per_class or len(neg) < n_per_class:
        raise EvalError(
            f"need {n_per_class} of each label, have {len(pos)} positive / "
            f"{len(neg)} negative"
        )
    rng = np.random.default_rng(seed)
    chosen = np.concatenate(
        [
            rng.choice(np.array(pos), size=n_per_class, replace=False),
            rng.choice(np.array(neg), size=n_per_class, replace=False),
        ]
    )
    labels = np.concatenate(
        [np.ones(n_per_class), np.zeros(n_per_class)]
    )
    logits = _logit(chosen)

    lo, hi = _T_SEARCH_LOG_BOUNDS
    best_log_t = _golden_section_min(lambda u: _nll(logits, labels, math.exp(u)), lo, hi)
    temperature = math.exp(best_log_t)

    # an untrustworthy fit barely beats the information-free calibrator
    # (T at the upper search bound flattens every score toward 0.5), or
    # lands on a search boundary
    nll_best = _nll(logits, labels, temperature)
    nll_flat = _nll(logits, labels, math.exp(hi))
    uninformative = nll_flat - nll_best <= 1e-3 * len(labels)
    at_bound = best_log_t < lo + 0.01 or best_log_t > hi - 0.01
    return TemperatureCalibrator(
        temperature=temperature, low_confidence=uninformative or at_bound
    )


@dataclass(frozen=True)
class TemperatureResult:
    claim_id: str
    n: int
    temperature: float | None
    low_confidence: bool
    available_pos: int
    available_neg: int


def experiment_temp_scaling(
    matrix: ScoreMatrix,
    taxonomy: Taxonomy,
    docs: Sequence[Document],
    n_values: Sequence[int],
    seed: int = 0,
) -> list[TemperatureResult]:
    """Fit a per-claim temperature for each sample size N; claims without
    enough labeled data at a given N are reported with temperature None."""
    doc_gold = {}
    for d in docs:
        if d.gold_classes is not None and (d.split in (None, "train")):
            doc_gold[d.doc_id] = d.gold_classes
    results = []
    for claim in taxonomy.claims:
        supported = claim.supported_classes()
        samples = [
            (matrix.score(doc_id, claim.claim_id), bool(supported & gold))
            for doc_id, gold in doc_gold.items()
            if matrix.has_claim(claim.claim_id)
        ]
        pos = sum(1 for _, e in samples if e)
        neg = len(samples) - pos
        for n in n_values:
            if pos < n or neg < n:
                results.append(
                    TemperatureResult(claim.claim_id, n, None, False, pos, neg)
                )
                continue
            cal = fit_temperature(samples, n, seed=seed)
            results.append(
                TemperatureResult(
                    claim.claim_id, n, cal.temperature, cal.low_confidence, pos, neg
                )
            )
    return results


# ---------------------------------------------------------------------------
# Synthetic data helpers (used by experiments, tests, and the demo)
# ---------------------------------------------------------------------------


def uniform_column(
    n: int, seed: int, lo: float = 0.0, hi: float = 1.0, prefix: str = "d"
) -> Column:
    """n synthetic datapoints with scores uniform in [lo, hi], sorted."""
    rng = np.random.default_rng(seed)
    scores = rng.uniform(lo, hi, size=n)
    return sorted(
        ((f"{prefix}{i:05d}", float(s)) for i, s in enumerate(scores)),
        key=lambda t: (t[1], t[0]),
    )


def step_oracle(
    root: float, noise: float = 0.0, seed: int = 0
) -> Callable[[str, float], bool]:
    """Noiseless-by-default monotone oracle: entailed iff score > root.
    Flip noise is keyed by (seed, doc_id) so answers are order-independent."""

    def answer(doc_id: str, score: float) -> bool:
        truth = score > root
        if noise > 0.0 and _stable_unit(seed, "step", doc_id) < noise:
            return not truth
        return truth

    return answer


# ---------------------------------------------------------------------------
# Experiment 1 analogue: annotator-correctness sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepTask:
    """One claim-tuning problem: a score column, the oracle answering for
    it, and the reference threshold distances are measured against."""

    claim_id: str
    column: Column
    truth: float
    annotator: Callable[[str, float], bool]


@dataclass(frozen=True)
class TrajectoryPoint:
    step: int
    mean_dist: float      # over sessions still active at this step
    se: float
    n_active: int
    mean_dist_all: float  # over all sessions, stopped ones carried forward
    var_all: float


@dataclass
class TrajectoryReport:
    per_p: dict[float, list[TrajectoryPoint]]
    max_steps: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["p", "step", "mean_dist", "se", "n_active"])
        for p in sorted(self.per_p):
            for pt in self.per_p[p]:
                writer.writerow(
                    [p, pt.step, f"{pt.mean_dist:.6f}", f"{pt.se:.6f}", pt.n_active]
                )
        return buf.getvalue()


def sweep_config(
    p: float,
    max_steps: int,
    grid_size: int = 1001,
    range_lo: float = 0.0,
    range_hi: float = 1.0,
) -> BisectionConfig:
    """Session config for trajectory experiments: the completion criterion
    is effectively disabled (width below grid resolution) so sessions run
    to data sparsity or the step cap, like the reference procedure."""
    return BisectionConfig(
        p=p,
        grid_size=grid_size,
        completion_ci_width=min(1e-9, (range_hi - range_lo) / 2),
        max_annotations=max_steps,
        range_lo=range_lo,
        range_hi=range_hi,
    )


def experiment_p_sweep(
    task_factory: Callable[[int], Sequence[SweepTask]],
    p_values: Sequence[float],
    seeds: Sequence[int],
    max_steps: int = 60,
    grid_size: int = 1001,
    range_lo: float = 0.0,
    range_hi: float = 1.0,
) -> TrajectoryReport:
    """For each p, tune every task at every seed and aggregate the distance
    of the running median from the reference threshold, per step.

    ``mean_dist``/``se`` cover sessions still active at the step (matching
    the per-round aggregation of the reference plots); ``mean_dist_all``
    carries a stopped session's final estimate forward so every step has a
    defined value across all sessions.
    """
    midpoint = (range_lo + range_hi) / 2.0
    per_p: dict[float, list[TrajectoryPoint]] = {}
    for p in p_values:
        config = sweep_config(p, max_steps, grid_size, range_lo, range_hi)
        series: list[tuple[list[float], float]] = []
        for seed in seeds:
            for task in task_factory(seed):
                _, log = run_session(config, task.column, task.annotator)
                dists = [abs(e.median - task.truth) for e in log]
                series.append((dists, abs(midpoint - task.truth)))
        points = []
        for step in range(1, max_steps + 1):
            active = [s[step - 1] for s, _ in series if len(s) >= step]
            carried = [
                s[min(step, len(s)) - 1] if s else d0 for s, d0 in series
            ]
            if active:
                mean = float(np.mean(active))
                se = (
                    float(np.std(active, ddof=1) / math.sqrt(len(active)))
                    if len(active) > 1
                    else 0.0
                )
            else:
                mean, se = float("nan"), float("nan")
            points.append(
                TrajectoryPoint(
                    step=step,
                    mean_dist=mean,
                    se=se,
                    n_active=len(active),
                    mean_dist_all=float(np.mean(carried)) if carried else float("nan"),
                    var_all=float(np.var(carried, ddof=1)) if len(carried) > 1 else 0.0,
                )
            )
        per_p[p] = points
    return TrajectoryReport(per_p=per_p, max_steps=max_steps)


# ---------------------------------------------------------------------------
# Experiment 2 analogue: fold stability
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClaimFoldResult:
    claim_id: str
    thresholds: tuple[float, ...]
    statuses: tuple[str, ...]

    @property
    def spread(self) -> float:
        return max(self.thresholds) - min(self.thresholds)

    @property
    def category(self) -> str:
        completed = sum(1 for s in self.statuses if s == "complete")
        if completed == len(self.statuses):
            return "Complete"
        if completed == 0:
            return "Early stop"
        return "Mixed"


@dataclass(frozen=True)
class FoldCategoryStats:
    n: int
    min: float
    max: float
    avg: float
    std: float


@dataclass
class FoldReport:
    k: int
    per_claim: list[ClaimFoldResult]
    categories: dict[str, FoldCategoryStats]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["claim_id", "category", "spread"] + [
            f"threshold_fold{i}" for i in range(self.k)
        ])
        for r in self.per_claim:
            writer.writerow(
                [r.claim_id, r.category, f"{r.spread:.6f}"]
                + [f"{t:.6f}" for t in r.thresholds]
            )
        return buf.getvalue()


def _category_stats(results: Sequence[ClaimFoldResult]) -> FoldCategoryStats:
    spreads = np.array([r.spread for r in results])
    return FoldCategoryStats(
        n=len(spreads),
        min=float(spreads.min()),
        max=float(spreads.max()),
        avg=float(spreads.mean()),
        std=float(spreads.std()),
    )


def experiment_folds(
    matrix: ScoreMatrix,
    taxonomy: Taxonomy,
    annotator: SimulatedAnnotator,
    documents: Sequence[Document],
    k: int,
    seed: int,
    config: BisectionConfig,
) -> FoldReport:
    """Shuffle the documents into k equal folds (remainder dropped), tune
    every claim independently on each fold, and summarize the per-claim
    threshold spread by completion category."""
    if k < 2:
        raise EvalError(f"need at least 2 folds, got {k}")
    if len(matrix.doc_ids) < k:
        raise EvalError(f"{len(matrix.doc_ids)} documents cannot fill {k} folds")
    docs_by_id = {d.doc_id: d for d in documents}
    rng = np.random.default_rng(seed)
    order = list(matrix.doc_ids)
    rng.shuffle(order)
    fold_size = len(order) // k
    folds = [order[i * fold_size : (i + 1) * fold_size] for i in range(k)]

    per_claim: list[ClaimFoldResult] = []
    for claim in taxonomy.claims:
        thresholds: list[float] = []
        statuses: list[str] = []
        for fold_ids in folds:
            sub = matrix.subset(fold_ids)
            column = sub.column(claim.claim_id)

            def answer(doc_id: str, score: float) -> bool:
                return simulate_answer(annotator, docs_by_id[doc_id], claim)

            report, _ = run_session(config, column, answer)
            thresholds.append(report.threshold)
            statuses.append(report.status)
        per_claim.append(
            ClaimFoldResult(claim.claim_id, tuple(thresholds), tuple(statuses))
        )

    categories = {}
    for name in ("All", "Complete", "Early stop", "Mixed"):
        matching = (
            per_claim
            if name == "All"
            else [r for r in per_claim if r.category == name]
        )
        if matching:
            categories[name] = _category_stats(matching)
    return FoldReport(k=k, per_claim=per_claim, categories=categories)
