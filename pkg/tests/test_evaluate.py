"""Metrics against confusion-matrix arithmetic, threshold search against
brute force, temperature recovery, and the experiment harnesses."""

import math

import numpy as np
import pytest

from claimsect import pba
from claimsect.annotation import SimulatedAnnotator
from claimsect.evaluate import (
    EvalError,
    SweepTask,
    compare_runs,
    experiment_folds,
    experiment_p_sweep,
    fit_temperature,
    ground_truth_threshold,
    step_oracle,
    sweep_config,
    uniform_column,
    weighted_f1,
)
from claimsect.pba import BisectionConfig
from claimsect.scores import Document, ScoreMatrix
from claimsect.taxonomy import parse_taxonomy

from helpers import taxonomy_bytes


class TestWeightedF1:
    def test_perfect_predictions(self):
        gold = {"d1": {"A"}, "d2": {"B"}, "d3": {"A", "B"}}
        report = weighted_f1(gold, gold, ["A", "B"])
        assert report.weighted.f1 == 1.0
        assert all(m.f1 == 1.0 for m in report.per_class.values())

    def test_empty_predictions_zero_recall(self):
        gold = {"d1": {"A"}, "d2": {"A"}}
        report = weighted_f1({}, gold, ["A"])
        assert report.per_class["A"].recall == 0.0
        assert report.weighted.f1 == 0.0

    def test_three_doc_hand_case(self):
        # one TP, one FP, one FN for class A -> P = R = F1 = 0.5
        gold = {"d1": {"A"}, "d2": set(), "d3": {"A"}}
        pred = {"d1": {"A"}, "d2": {"A"}, "d3": set()}
        report = weighted_f1(pred, gold, ["A"])
        assert report.per_class["A"].precision == 0.5
        assert report.per_class["A"].recall == 0.5
        assert report.per_class["A"].f1 == 0.5

    def test_zero_support_zero_predicted_convention(self):
        gold = {"d1": {"A"}}
        pred = {"d1": {"A"}}
        report = weighted_f1(pred, gold, ["A", "ghost"])
        assert report.per_class["ghost"].precision == 0.0
        assert report.per_class["ghost"].recall == 0.0
        assert report.per_class["ghost"].support == 0
        assert report.weighted.f1 == 1.0  # zero-support class carries no weight

    def test_matches_naive_oracle_on_random_instances(self):
        rng = np.random.default_rng(17)
        classes = ["A", "B", "C"]
        for _ in range(300):
            n = int(rng.integers(1, 6))
            gold = {
                f"d{i}": {c for c in classes if rng.random() < 0.4} for i in range(n)
            }
            pred = {
                f"d{i}": {c for c in classes if rng.random() < 0.4} for i in range(n)
            }
            report = weighted_f1(pred, gold, classes)
            # naive per-class confusion counts
            weighted_sum, total_support = 0.0, 0
            for c in classes:
                tp = sum(1 for d in gold if c in gold[d] and c in pred[d])
                fp = sum(1 for d in gold if c not in gold[d] and c in pred[d])
                fn = sum(1 for d in gold if c in gold[d] and c not in pred[d])
                p = tp / (tp + fp) if tp + fp else 0.0
                r = tp / (tp + fn) if tp + fn else 0.0
                f1 = 2 * p * r / (p + r) if p + r else 0.0
                m = report.per_class[c]
                assert (m.precision, m.recall, m.f1) == pytest.approx((p, r, f1))
                weighted_sum += f1 * (tp + fn)
                total_support += tp + fn
            expect = weighted_sum / total_support if total_support else 0.0
            assert report.weighted.f1 == pytest.approx(expect)


class TestCompareRuns:
    def rep(self, f1_a):
        gold = {"d1": {"A"}}
        pred = {"d1": {"A"} if f1_a else set()}
        return weighted_f1(pred, gold, ["A"])

    def test_identical_reports_zero_delta(self):
        a = self.rep(True)
        delta = compare_runs(a, a)
        assert delta.weighted.f1 == 0.0
        assert delta.per_class["A"].precision == 0.0

    def test_plain_difference(self):
        gold = {f"d{i}": {"A"} for i in range(10)} | {"e0": set(), "e1": set()}
        pred_a = {f"d{i}": ({"A"} if i < 7 else set()) for i in range(10)}
        pred_b = {f"d{i}": ({"A"} if i < 9 else set()) for i in range(10)}
        a = weighted_f1(pred_a, gold, ["A"])
        b = weighted_f1(pred_b, gold, ["A"])
        delta = compare_runs(a, b)
        assert delta.per_class["A"].recall == pytest.approx(0.2)

    def test_mismatched_class_sets_rejected(self):
        gold = {"d1": {"A"}}
        a = weighted_f1(gold, gold, ["A"])
        b = weighted_f1(gold, gold, ["A", "B"])
        with pytest.raises(EvalError, match="class sets differ"):
            compare_runs(a, b)


class TestGroundTruthThreshold:
    def test_separable_pairs(self):
        pairs = [(0.2, False), (0.4, False), (0.6, True), (0.8, True)]
        assert ground_truth_threshold(pairs) == 0.5

    def test_interleaved_returns_smallest(self):
        pairs = [(0.2, True), (0.4, False), (0.6, True), (0.8, False)]
        # every candidate achieves accuracy 0.5; smallest candidate is lo=0
        assert ground_truth_threshold(pairs) == 0.0

    def test_symmetric_pair(self):
        assert ground_truth_threshold([(0.3, False), (0.7, True)]) == 0.5

    def test_single_label_rejected(self):
        with pytest.raises(EvalError):
            ground_truth_threshold([(0.3, True), (0.7, True)])

    def test_matches_fine_grid_brute_force(self):
        rng = np.random.default_rng(23)
        grid = np.linspace(0.0, 1.0, 10_000)
        for _ in range(1000):
            n = int(rng.integers(2, 40))
            scores = rng.uniform(0, 1, size=n)
            labels = rng.random(n) < (scores + rng.normal(0, 0.3, size=n) > 0.5)
            if labels.all() or (~labels).all():
                continue
            pairs = list(zip(scores.tolist(), labels.tolist()))
            t = ground_truth_threshold(pairs)

            def accuracy(theta):
                return np.mean((scores > theta) == labels)

            best_grid = max(accuracy(g) for g in grid)
            assert accuracy(t) >= best_grid - 1e-12


class TestFitTemperature:
    def generate(self, t0, n, seed):
        rng = np.random.default_rng(seed)
        z = rng.normal(0.0, 2.5, size=4 * n)
        y = rng.random(4 * n) < 1 / (1 + np.exp(-z / t0))
        scores = 1 / (1 + np.exp(-z))
        return list(zip(scores.tolist(), y.tolist()))

    def test_recovers_known_temperature(self):
        for t0 in (0.5, 1.0, 2.0):
            recovered = []
            for seed in range(20):
                samples = self.generate(t0, 160, seed)
                cal = fit_temperature(samples, 160, seed=seed)
                recovered.append(cal.temperature)
            assert np.median(recovered) == pytest.approx(t0, rel=0.10)

    def test_calibrated_input_gives_t_near_one(self):
        samples = self.generate(1.0, 400, seed=5)
        cal = fit_temperature(samples, 400, seed=0)
        # grid-search oracle over temperatures confirms the optimum
        zs = None
        assert cal.temperature == pytest.approx(1.0, abs=0.15)

    def test_label_independent_scores_flagged(self):
        rng = np.random.default_rng(0)
        scores = rng.uniform(0.3, 0.7, 400)
        labels = rng.random(400) < 0.5
        cal = fit_temperature(list(zip(scores.tolist(), labels.tolist())), 100, seed=0)
        assert cal.low_confidence

    def test_insufficient_samples_rejected(self):
        samples = [(0.9, True)] * 10 + [(0.1, False)] * 3
        with pytest.raises(EvalError, match="need 5"):
            fit_temperature(samples, 5)

    def test_detection_boundary_unmoved(self):
        # dividing logits by T > 0 cannot move the 0.5 boundary
        samples = self.generate(2.0, 160, seed=1)
        cal = fit_temperature(samples, 160, seed=1)
        for s in (0.1, 0.49, 0.51, 0.9):
            assert cal.detect(s) == (s > 0.5)

    def test_golden_section_matches_grid_oracle(self):
        samples = self.generate(0.7, 160, seed=9)
        cal = fit_temperature(samples, 160, seed=9)
        from claimsect.evaluate import _logit, _nll

        rng = np.random.default_rng(9)
        pos = np.array([s for s, e in samples if e])
        neg = np.array([s for s, e in samples if not e])
        chosen = np.concatenate(
            [rng.choice(pos, 160, replace=False), rng.choice(neg, 160, replace=False)]
        )
        labels = np.concatenate([np.ones(160), np.zeros(160)])
        logits = _logit(chosen)
        ts = np.exp(np.linspace(math.log(0.01), math.log(100), 20_000))
        nlls = [_nll(logits, labels, t) for t in ts]
        t_grid = ts[int(np.argmin(nlls))]
        assert cal.temperature == pytest.approx(t_grid, rel=1e-3)


class TestPSweep:
    def test_synthetic_trajectories_shrink(self):
        def factory(seed):
            column = uniform_column(300, seed=seed)
            return [
                SweepTask(
                    claim_id="c", column=column, truth=0.6,
                    annotator=step_oracle(0.6, noise=0.1, seed=seed),
                )
            ]

        report = experiment_p_sweep(
            factory, p_values=[0.7], seeds=range(8), max_steps=30
        )
        points = report.per_p[0.7]
        assert points[29].mean_dist_all <= points[4].mean_dist_all
        assert points[29].mean_dist_all < 0.1

    def test_csv_shape(self):
        def factory(seed):
            column = uniform_column(100, seed=seed)
            return [
                SweepTask("c", column, 0.5, step_oracle(0.5, noise=0.0, seed=seed))
            ]

        report = experiment_p_sweep(factory, [0.6, 0.8], seeds=[0], max_steps=5)
        lines = report.to_csv().strip().splitlines()
        assert lines[0] == "p,step,mean_dist,se,n_active"
        assert len(lines) == 1 + 2 * 5

    def test_empty_task_list(self):
        report = experiment_p_sweep(lambda seed: [], [0.7], seeds=[0], max_steps=5)
        assert all(math.isnan(pt.mean_dist) for pt in report.per_p[0.7])
        assert all(pt.n_active == 0 for pt in report.per_p[0.7])


def fold_fixture(n_docs=1800, seed=100):
    """One claim with dense separable scores (completes on every fold) and
    one whose scores are sparse near the decision region with overlapping
    labels (exhausts candidates and early-stops at fold-specific spots)."""
    from claimsect.annotation import _stable_unit

    tax = parse_taxonomy(
        taxonomy_bytes(
            {
                "taxonomy_id": "folds",
                "task_kind": "multi_label",
                "claims": [
                    {"claim_id": "dense", "text": "dense",
                     "classes": [{"class_id": "D"}]},
                    {"claim_id": "gappy", "text": "gappy",
                     "classes": [{"class_id": "G"}]},
                ],
                "classes": [
                    {"class_id": "D", "label": "D", "mode": "any_of"},
                    {"class_id": "G", "label": "G", "mode": "any_of"},
                ],
            }
        )
    )
    rng = np.random.default_rng(seed)
    docs, rows = [], []
    for i in range(n_docs):
        doc_id = f"d{i:04d}"
        s_dense = float(rng.uniform())
        if rng.random() < 0.03:
            s_gappy = float(rng.uniform(0.4, 0.7))
        elif rng.random() < 0.5:
            s_gappy = float(rng.uniform(0.0, 0.4))
        else:
            s_gappy = float(rng.uniform(0.7, 1.0))
        gold = []
        if s_dense > 0.55:
            gold.append("D")
        # labels overlap the score boundary in a +-0.15 band
        if s_gappy > 0.55 + (_stable_unit(77, "overlap", doc_id) - 0.5) * 0.3:
            gold.append("G")
        docs.append(Document(doc_id=doc_id, text="", gold_classes=frozenset(gold)))
        rows.append((s_dense, s_gappy))
    matrix = ScoreMatrix(
        [d.doc_id for d in docs], ["dense", "gappy"], np.array(rows), "entailment"
    )
    return tax, matrix, docs


class TestFolds:
    def test_categories_and_spread(self):
        tax, matrix, docs = fold_fixture()
        annotator = SimulatedAnnotator.from_documents(docs)
        report = experiment_folds(
            matrix, tax, annotator, docs, k=3, seed=0, config=BisectionConfig(p=0.85)
        )
        by_claim = {r.claim_id: r for r in report.per_claim}
        assert len(by_claim["dense"].thresholds) == 3
        assert by_claim["dense"].category == "Complete"
        assert by_claim["gappy"].category == "Early stop"
        assert by_claim["dense"].spread <= 0.12
        assert by_claim["dense"].spread < by_claim["gappy"].spread
        assert "All" in report.categories
        assert report.categories["Complete"].avg < report.categories["Early stop"].avg

    def test_remainder_dropped(self):
        tax, matrix, docs = fold_fixture(n_docs=10)
        annotator = SimulatedAnnotator.from_documents(docs)
        report = experiment_folds(
            matrix, tax, annotator, docs, k=3, seed=0,
            config=BisectionConfig(p=0.7),
        )
        # 10 docs, 3 folds -> folds of 3, one doc unused
        assert all(len(r.thresholds) == 3 for r in report.per_claim)

    def test_k_below_two_rejected(self):
        tax, matrix, docs = fold_fixture(n_docs=12)
        annotator = SimulatedAnnotator.from_documents(docs)
        with pytest.raises(EvalError):
            experiment_folds(
                matrix, tax, annotator, docs, k=1, seed=0,
                config=BisectionConfig(p=0.7),
            )

    def test_mixed_category_label(self):
        from claimsect.evaluate import ClaimFoldResult

        r = ClaimFoldResult("c", (0.5, 0.6, 0.7), ("complete", "complete", "early_stop"))
        assert r.category == "Mixed"
        assert r.spread == pytest.approx(0.2)
        all_complete = ClaimFoldResult("c", (0.5,) * 3, ("complete",) * 3)
        assert all_complete.category == "Complete"
        none_complete = ClaimFoldResult("c", (0.5,) * 3, ("early_stop", "capped", "early_stop"))
        assert none_complete.category == "Early stop"
