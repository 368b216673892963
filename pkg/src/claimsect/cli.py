"""Command-line entry points for the offline pipeline and experiments.

Subcommands: ingest, validate, tune, classify, eval, serve, experiment.
Exit codes: 0 success, 1 validation error, 2 runtime error, 64 usage error.
Runs taking ``--seed`` are bit-reproducible in every emitted file.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import WIRE_FORMAT, annotation, evaluate, pba
from .annotation import (
    Campaign,
    QuitRequested,
    SimulatedAnnotator,
    UndoRequested,
    read_log,
)
from .classify import (
    classify_multilabel,
    classify_stance,
    classify_topic,
    detect_claims,
    zero_shot_thresholds,
)
from .pba import BisectionConfig
from .scores import (
    ProviderConfig,
    ScoreError,
    fetch_scores,
    ingest_scores,
    load_dataset,
)
from .taxonomy import TaxonomyError, parse_taxonomy, validate_against_scores

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_USAGE = 64


class ValidationFailure(click.ClickException):
    exit_code = EXIT_VALIDATION


@click.group()
def cli() -> None:
    """Claim-taxonomy classification with actively tuned thresholds."""


def _read_taxonomy(path: str):
    try:
        return parse_taxonomy(Path(path).read_bytes())
    except TaxonomyError as exc:
        raise ValidationFailure(f"taxonomy: {exc}")


def _read_scores(path: str):
    try:
        return ingest_scores(Path(path).read_bytes())
    except ScoreError as exc:
        raise ValidationFailure(f"scores: {exc}")


def _read_dataset(path: str):
    try:
        return load_dataset(Path(path).read_bytes())
    except ScoreError as exc:
        raise ValidationFailure(f"dataset: {exc}")


def _read_thresholds(path: str) -> dict[str, float]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if "reports" in doc:
        return {r["claim_id"]: float(r["threshold"]) for r in doc["reports"]}
    if "thresholds" in doc:
        return {k: float(v) for k, v in doc["thresholds"].items()}
    raise ValidationFailure(f"{path}: neither a reports file nor a thresholds file")


# ---------------------------------------------------------------------------
# ingest / validate
# ---------------------------------------------------------------------------


@cli.command()
@click.option("--scores", "scores_path", type=click.Path(exists=True), help="Score file to validate and normalize.")
@click.option("--fetch", is_flag=True, help="Fetch scores from the provider endpoint instead.")
@click.option("--taxonomy", "taxonomy_path", type=click.Path(exists=True))
@click.option("--dataset", "dataset_path", type=click.Path(exists=True))
@click.option("--provider-url", envvar="CLAIMSECT_PROVIDER_URL")
@click.option("--include-negated", is_flag=True, help="Also fetch negated-claim columns.")
@click.option("--batch-size", default=32, show_default=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
def ingest(scores_path, fetch, taxonomy_path, dataset_path, provider_url,
           include_negated, batch_size, out_path):
    """Validate a score file, or fetch scores from a provider, into canonical form."""
    if fetch:
        if not (taxonomy_path and dataset_path and provider_url):
            raise click.UsageError(
                "--fetch needs --taxonomy, --dataset, and --provider-url "
                "(or CLAIMSECT_PROVIDER_URL)"
            )
        taxonomy = _read_taxonomy(taxonomy_path)
        docs = _read_dataset(dataset_path)
        provider = ProviderConfig(
            url=provider_url, batch_size=batch_size, include_negated=include_negated
        )
        matrix = fetch_scores(provider, docs, taxonomy.claims, cache_path=out_path)
    else:
        if not scores_path:
            raise click.UsageError("provide --scores FILE or --fetch")
        matrix = _read_scores(scores_path)
        Path(out_path).write_bytes(matrix.export())
    click.echo(
        f"{len(matrix.doc_ids)} documents x {len(matrix.claim_ids)} claims "
        f"({matrix.score_kind}, range [{matrix.range_lo}, {matrix.range_hi}]) -> {out_path}"
    )


@cli.command()
@click.option("--taxonomy", "taxonomy_path", type=click.Path(exists=True), required=True)
@click.option("--scores", "scores_path", type=click.Path(exists=True))
def validate(taxonomy_path, scores_path):
    """Check a taxonomy file, and optionally its coverage by a score matrix."""
    taxonomy = _read_taxonomy(taxonomy_path)
    click.echo(
        f"taxonomy {taxonomy.taxonomy_id}: {len(taxonomy.claims)} claims, "
        f"{len(taxonomy.classes)} classes, task {taxonomy.task_kind}"
    )
    if scores_path:
        matrix = _read_scores(scores_path)
        problems = validate_against_scores(taxonomy, matrix)
        for d in problems:
            click.echo(f"  {d.kind}: claim {d.claim_id} needs column {d.column}")
        if problems:
            raise ValidationFailure(f"{len(problems)} discrepancies")
        click.echo("score matrix covers the taxonomy")


# ---------------------------------------------------------------------------
# tune
# ---------------------------------------------------------------------------


def _interactive_annotator(campaign: Campaign):
    def annotator(doc, claim, s_t: float) -> bool:
        click.echo("\n" + "-" * 72)
        click.echo(f"CLAIM: {claim.text}")
        click.echo(f"DOC [{doc.doc_id}] (score {s_t:.3f}):")
        click.echo(doc.text or "(no document text on file)")
        while True:
            answer = click.prompt(
                "entails? [y]es / [n]o / [u]ndo / [q]uit", default="", show_default=False
            ).strip().lower()
            if answer in ("y", "yes"):
                return True
            if answer in ("n", "no"):
                return False
            if answer in ("u", "undo"):
                raise UndoRequested()
            if answer in ("q", "quit"):
                raise QuitRequested()
            click.echo("please answer y, n, u, or q")

    return annotator


def _replay_annotator(campaign: Campaign, replay_dir: Path):
    answers: dict[tuple[str, str], bool] = {}
    for claim in campaign.taxonomy.claims:
        for entry in read_log(replay_dir / "logs" / f"{claim.claim_id}.jsonl"):
            answers[(claim.claim_id, entry.doc_id)] = entry.entails

    def annotator(doc, claim, s_t: float) -> bool:
        key = (claim.claim_id, doc.doc_id)
        if key not in answers:
            raise annotation.AnnotationError(
                f"replay log has no answer for claim {claim.claim_id} doc {doc.doc_id}"
            )
        return answers[key]

    return annotator


@cli.command()
@click.option("--taxonomy", "taxonomy_path", type=click.Path(exists=True), required=True)
@click.option("--scores", "scores_path", type=click.Path(exists=True), required=True)
@click.option("--dataset", "dataset_path", type=click.Path(exists=True))
@click.option("--out", "out_dir", type=click.Path(), required=True, help="Campaign directory.")
@click.option("--annotator", "annotator_kind",
              type=click.Choice(["interactive-terminal", "simulated", "replay"]),
              default="interactive-terminal", show_default=True)
@click.option("--replay-from", type=click.Path(exists=True), help="Campaign dir with logs to replay.")
@click.option("--p", default=0.7, show_default=True)
@click.option("--grid-size", default=1001, show_default=True)
@click.option("--ci-mass", default=0.95, show_default=True)
@click.option("--ci-width", default=0.20, show_default=True)
@click.option("--max-annotations", type=int, default=None)
@click.option("--cosine", is_flag=True, help="Scores are cosine similarities in [-1, 1].")
@click.option("--noise", default=0.0, show_default=True, help="Simulated annotator flip probability.")
@click.option("--seed", default=0, show_default=True)
@click.option("--jobs", default=1, show_default=True)
@click.option("--figures/--no-figures", default=True, show_default=True)
def tune(taxonomy_path, scores_path, dataset_path, out_dir, annotator_kind,
         replay_from, p, grid_size, ci_mass, ci_width, max_annotations, cosine,
         noise, seed, jobs, figures):
    """Tune one threshold per claim with a live annotation loop."""
    lo, hi = (-1.0, 1.0) if cosine else (0.0, 1.0)
    try:
        config = BisectionConfig(
            p=p, grid_size=grid_size, completion_ci_mass=ci_mass,
            completion_ci_width=ci_width, max_annotations=max_annotations,
            range_lo=lo, range_hi=hi,
        )
    except ValueError as exc:
        raise ValidationFailure(str(exc))

    taxonomy = _read_taxonomy(taxonomy_path)
    matrix = _read_scores(scores_path)
    problems = [
        d for d in validate_against_scores(taxonomy, matrix)
        if d.kind == "missing_column"
    ]
    if problems:
        raise ValidationFailure(
            "score matrix is missing columns: " + ", ".join(d.column for d in problems)
        )

    root = Path(out_dir)
    if (root / "campaign.json").exists():
        campaign = Campaign(root)
        click.echo(f"resuming campaign at {root}")
    else:
        campaign = Campaign.create(
            root, taxonomy_path=taxonomy_path, scores_path=scores_path,
            config=config, dataset_path=dataset_path,
        )

    if annotator_kind == "simulated":
        if not dataset_path:
            raise click.UsageError("--annotator simulated needs --dataset with gold labels")
        oracle = SimulatedAnnotator.from_documents(
            _read_dataset(dataset_path), noise=noise, seed=seed
        )
    elif annotator_kind == "replay":
        if not replay_from:
            raise click.UsageError("--annotator replay needs --replay-from DIR")
        oracle = _replay_annotator(campaign, Path(replay_from))
    else:
        oracle = _interactive_annotator(campaign)
        jobs = 1

    try:
        reports = campaign.run(oracle, jobs=jobs)
    except pba.SessionAbort:
        click.echo("annotation aborted; progress saved, rerun to resume")
        sys.exit(EXIT_OK)

    for r in reports:
        click.echo(
            f"{r.claim_id:30s} threshold {r.threshold:+.3f}  ci {r.ci_width:.3f}  "
            f"annots {r.annotations:3d}  {r.status}"
        )
    if figures:
        from . import plots

        fig_dir = root / "figures"
        for claim in campaign.taxonomy.claims:
            state = campaign.claim_state(claim.claim_id)
            plots.save_posterior_figure(
                state, fig_dir / f"posterior_{claim.claim_id}.png",
                title=f"{claim.claim_id}: {claim.text[:60]}",
            )
        click.echo(f"posterior figures -> {fig_dir}")
    click.echo(f"reports -> {root / 'reports.json'}")


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------


@cli.command("classify")
@click.option("--taxonomy", "taxonomy_path", type=click.Path(exists=True), required=True)
@click.option("--scores", "scores_path", type=click.Path(exists=True), required=True)
@click.option("--thresholds", "thresholds_path", type=click.Path(exists=True))
@click.option("--zero-shot", is_flag=True, help="Uniform threshold 0.5 for every claim.")
@click.option("--negation-filter", is_flag=True)
@click.option("--comparator", type=click.Choice([">", ">="]), default=">", show_default=True)
@click.option("--topic-predictions", type=click.Path(exists=True),
              help="Predictions file from a topic run (required for stance taxonomies).")
@click.option("--out", "out_path", type=click.Path(), required=True)
def classify_cmd(taxonomy_path, scores_path, thresholds_path, zero_shot,
                 negation_filter, comparator, topic_predictions, out_path):
    """Label documents with claims and classes."""
    taxonomy = _read_taxonomy(taxonomy_path)
    matrix = _read_scores(scores_path)
    if zero_shot:
        thresholds = zero_shot_thresholds(taxonomy)
    elif thresholds_path:
        thresholds = _read_thresholds(thresholds_path)
    else:
        raise click.UsageError("provide --thresholds FILE or --zero-shot")

    try:
        if taxonomy.task_kind == "multi_class_topic":
            topics = classify_topic(matrix, thresholds, taxonomy)
            records = [{"doc_id": d, "topic": topics[d]} for d in matrix.doc_ids]
        elif taxonomy.task_kind == "stance":
            if not topic_predictions:
                raise click.UsageError("stance classification needs --topic-predictions")
            doc_topic = {}
            for line in Path(topic_predictions).read_text(encoding="utf-8").splitlines():
                if line.strip():
                    rec = json.loads(line)
                    doc_topic[rec["doc_id"]] = rec["topic"]
            records = []
            for topic in sorted(set(doc_topic.values())):
                docs = [d for d in matrix.doc_ids if doc_topic.get(d) == topic]
                stances = classify_stance(
                    matrix, thresholds, taxonomy, topic, doc_ids=docs,
                    negation_filter=negation_filter, comparator=comparator,
                )
                records.extend(
                    {"doc_id": d, "topic": topic, "stance": stances[d]} for d in docs
                )
            order = {d: i for i, d in enumerate(matrix.doc_ids)}
            records.sort(key=lambda r: order[r["doc_id"]])
        else:
            labeling = detect_claims(
                matrix, thresholds, taxonomy,
                negation_filter=negation_filter, comparator=comparator,
            )
            classes = classify_multilabel(labeling, taxonomy)
            records = [
                {"doc_id": d, "claims": sorted(labeling[d]), "classes": sorted(classes[d])}
                for d in matrix.doc_ids
            ]
    except ValueError as exc:
        raise ValidationFailure(str(exc))

    with open(out_path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    click.echo(f"{len(records)} predictions -> {out_path}")


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------


def _metric_table(report: evaluate.MetricReport) -> str:
    rows = [f"{'Class':20s} {'P':>6s} {'R':>6s} {'F1':>6s} {'Support':>8s}"]
    for cls in sorted(report.per_class):
        m = report.per_class[cls]
        rows.append(
            f"{cls:20s} {m.precision:6.2f} {m.recall:6.2f} {m.f1:6.2f} {m.support:8d}"
        )
    w = report.weighted
    rows.append(
        f"{'Weighted avg':20s} {w.precision:6.2f} {w.recall:6.2f} {w.f1:6.2f} {w.support:8d}"
    )
    return "\n".join(rows)


@cli.command("eval")
@click.option("--predictions", "pred_path", type=click.Path(exists=True), required=True)
@click.option("--dataset", "dataset_path", type=click.Path(exists=True), required=True)
@click.option("--taxonomy", "taxonomy_path", type=click.Path(exists=True), required=True)
@click.option("--split", type=click.Choice(["train", "test", "all"]), default="all",
              show_default=True)
@click.option("--compare", "compare_path", type=click.Path(exists=True),
              help="Earlier metrics file; emits a percentage-point delta table.")
@click.option("--out", "out_path", type=click.Path(), help="Metrics JSON output.")
@click.option("--figures/--no-figures", default=True, show_default=True)
def eval_cmd(pred_path, dataset_path, taxonomy_path, split, compare_path, out_path, figures):
    """Weighted precision/recall/F1 of a predictions file against gold labels."""
    taxonomy = _read_taxonomy(taxonomy_path)
    docs = _read_dataset(dataset_path)
    gold = {
        d.doc_id: set(d.gold_classes or frozenset())
        for d in docs
        if d.gold_classes is not None and (split == "all" or d.split == split)
    }
    if not gold:
        raise ValidationFailure("no gold-labeled documents in the selected split")
    pred: dict[str, set[str]] = {}
    for line in Path(pred_path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        if "classes" in rec:
            pred[rec["doc_id"]] = set(rec["classes"])
        elif "stance" in rec:
            # a favor/against call maps to that side's stance class;
            # neutral predicts no stance class at all
            if rec["stance"] == "neutral":
                pred[rec["doc_id"]] = set()
            else:
                against, favor = taxonomy.stance_partition(rec["topic"])
                side = against if rec["stance"] == "against" else favor
                pred[rec["doc_id"]] = {side.class_id}
        elif "topic" in rec:
            pred[rec["doc_id"]] = {rec["topic"]}
    if taxonomy.task_kind == "stance":
        classes = sorted(taxonomy.class_ids())
        gold = {d: g & set(classes) for d, g in gold.items()}
    else:
        classes = sorted(taxonomy.class_ids())
        if taxonomy.task_kind == "multi_class_topic":
            gold = {d: g & set(classes) for d, g in gold.items()}
    report = evaluate.weighted_f1(pred, gold, classes)
    click.echo(_metric_table(report))

    payload = {
        "format": WIRE_FORMAT,
        "classes": {
            cls: {
                "precision": m.precision, "recall": m.recall,
                "f1": m.f1, "support": m.support,
            }
            for cls, m in report.per_class.items()
        },
        "weighted": {
            "precision": report.weighted.precision,
            "recall": report.weighted.recall,
            "f1": report.weighted.f1,
            "support": report.weighted.support,
        },
    }
    if out_path:
        Path(out_path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        if figures:
            from . import plots

            fig = Path(out_path).with_suffix(".png")
            plots.save_metrics_figure(report, fig)
            click.echo(f"metrics -> {out_path}, figure -> {fig}")

    if compare_path:
        earlier = json.loads(Path(compare_path).read_text(encoding="utf-8"))
        a = evaluate.MetricReport(
            per_class={
                cls: evaluate.ClassMetrics(
                    v["precision"], v["recall"], v["f1"], v["support"]
                )
                for cls, v in earlier["classes"].items()
            },
            weighted=evaluate.ClassMetrics(
                earlier["weighted"]["precision"], earlier["weighted"]["recall"],
                earlier["weighted"]["f1"], earlier["weighted"]["support"],
            ),
        )
        try:
            delta = evaluate.compare_runs(a, report)
        except evaluate.EvalError as exc:
            raise ValidationFailure(str(exc))
        click.echo("\nDelta vs earlier run (percentage points):")
        for cls in sorted(delta.per_class):
            d = delta.per_class[cls]
            click.echo(
                f"{cls:20s} P {d.precision:+.2f}  R {d.recall:+.2f}  F1 {d.f1:+.2f}"
            )
        w = delta.weighted
        click.echo(f"{'Weighted avg':20s} P {w.precision:+.2f}  R {w.recall:+.2f}  F1 {w.f1:+.2f}")


# ---------------------------------------------------------------------------
# experiment
# ---------------------------------------------------------------------------


@cli.group()
def experiment() -> None:
    """Reproducible experiment harnesses (CSV + figure outputs)."""


def _sim_tasks(matrix, taxonomy, docs, noise, seed):
    """SweepTasks for real data: oracle answers from gold labels, reference
    thresholds maximize oracle accuracy over the full column."""
    annotator = SimulatedAnnotator.from_documents(docs, noise=noise, seed=seed)
    docs_by_id = {d.doc_id: d for d in docs}
    tasks = []
    for claim in taxonomy.claims:
        column = matrix.column(claim.claim_id)
        pairs = [
            (s, annotation.simulate_answer(annotator, docs_by_id[d], claim))
            for d, s in column
        ]
        try:
            truth = evaluate.ground_truth_threshold(
                pairs, lo=matrix.range_lo, hi=matrix.range_hi
            )
        except evaluate.EvalError:
            continue  # single-label claims have no reference threshold

        def make_answer(c):
            return lambda doc_id, score: annotation.simulate_answer(
                annotator, docs_by_id[doc_id], c
            )

        tasks.append(
            evaluate.SweepTask(
                claim_id=claim.claim_id, column=column, truth=truth,
                annotator=make_answer(claim),
            )
        )
    return tasks


@experiment.command("p-sweep")
@click.option("--taxonomy", "taxonomy_path", type=click.Path(exists=True), required=True)
@click.option("--scores", "scores_path", type=click.Path(exists=True), required=True)
@click.option("--dataset", "dataset_path", type=click.Path(exists=True), required=True)
@click.option("--p", "p_values", default="0.6,0.7,0.8,0.9", show_default=True)
@click.option("--seeds", default=10, show_default=True)
@click.option("--noise", default=0.1, show_default=True)
@click.option("--max-steps", default=60, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
def p_sweep_cmd(taxonomy_path, scores_path, dataset_path, p_values, seeds,
                noise, max_steps, seed, out_dir):
    """Distance-to-reference trajectories for several annotator-correctness values."""
    taxonomy = _read_taxonomy(taxonomy_path)
    matrix = _read_scores(scores_path)
    docs = _read_dataset(dataset_path)
    ps = [float(x) for x in p_values.split(",")]

    def factory(run_seed: int):
        return _sim_tasks(matrix, taxonomy, docs, noise, seed=run_seed)

    report = evaluate.experiment_p_sweep(
        factory, ps, seeds=[seed + i for i in range(seeds)],
        max_steps=max_steps,
        range_lo=matrix.range_lo, range_hi=matrix.range_hi,
    )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "trajectories.csv").write_text(report.to_csv(), encoding="utf-8")
    from . import plots

    plots.save_trajectory_figure(report, out / "trajectories.png")
    click.echo(f"trajectories -> {out / 'trajectories.csv'} and trajectories.png")


@experiment.command("folds")
@click.option("--taxonomy", "taxonomy_path", type=click.Path(exists=True), required=True)
@click.option("--scores", "scores_path", type=click.Path(exists=True), required=True)
@click.option("--dataset", "dataset_path", type=click.Path(exists=True), required=True)
@click.option("--k", default=3, show_default=True)
@click.option("--p", default=0.7, show_default=True)
@click.option("--noise", default=0.0, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
def folds_cmd(taxonomy_path, scores_path, dataset_path, k, p, noise, seed, out_dir):
    """Threshold spread across k equal folds, per completion category."""
    taxonomy = _read_taxonomy(taxonomy_path)
    matrix = _read_scores(scores_path)
    docs = _read_dataset(dataset_path)
    annotator = SimulatedAnnotator.from_documents(docs, noise=noise, seed=seed)
    try:
        config = BisectionConfig(p=p, range_lo=matrix.range_lo, range_hi=matrix.range_hi)
        report = evaluate.experiment_folds(
            matrix, taxonomy, annotator, docs, k=k, seed=seed, config=config
        )
    except (ValueError, evaluate.EvalError) as exc:
        raise ValidationFailure(str(exc))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "folds.csv").write_text(report.to_csv(), encoding="utf-8")
    from . import plots

    plots.save_folds_figure(report, out / "folds.png")
    click.echo(f"{'Category':12s} {'N':>4s} {'Min':>6s} {'Max':>6s} {'Avg':>6s} {'Std':>6s}")
    for name in ("All", "Complete", "Early stop", "Mixed"):
        if name in report.categories:
            s = report.categories[name]
            click.echo(
                f"{name:12s} {s.n:4d} {s.min:6.2f} {s.max:6.2f} {s.avg:6.2f} {s.std:6.2f}"
            )
    click.echo(f"folds -> {out / 'folds.csv'} and folds.png")


@experiment.command("temp-scaling")
@click.option("--taxonomy", "taxonomy_path", type=click.Path(exists=True), required=True)
@click.option("--scores", "scores_path", type=click.Path(exists=True), required=True)
@click.option("--dataset", "dataset_path", type=click.Path(exists=True), required=True)
@click.option("--n", "n_values", default="5,10,20,40,80,160", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
def temp_scaling_cmd(taxonomy_path, scores_path, dataset_path, n_values, seed, out_dir):
    """Per-claim temperature-scaling calibration across sample sizes N."""
    taxonomy = _read_taxonomy(taxonomy_path)
    matrix = _read_scores(scores_path)
    docs = _read_dataset(dataset_path)
    ns = [int(x) for x in n_values.split(",")]
    results = evaluate.experiment_temp_scaling(matrix, taxonomy, docs, ns, seed=seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = ["claim_id,n,temperature,low_confidence,available_pos,available_neg"]
    for r in results:
        t = "" if r.temperature is None else f"{r.temperature:.6f}"
        lines.append(
            f"{r.claim_id},{r.n},{t},{str(r.low_confidence).lower()},"
            f"{r.available_pos},{r.available_neg}"
        )
    (out / "temp_scaling.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    from . import plots

    plots.save_temperature_figure(results, out / "temp_scaling.png")
    fitted = [r for r in results if r.temperature is not None]
    click.echo(
        f"{len(fitted)}/{len(results)} (claim, N) fits -> "
        f"{out / 'temp_scaling.csv'} and temp_scaling.png"
    )


# ---------------------------------------------------------------------------
# serve
# ---------------------------------------------------------------------------


@cli.command()
@click.option("--port", default=8722, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data-dir", envvar="CLAIMSECT_DATA_DIR", default="./claimsect-data",
              show_default=True)
@click.option("--serve-ui", "ui_dir", type=click.Path(exists=True), default=None,
              help="Directory of built frontend assets to serve at /ui.")
def serve(port, host, data_dir, ui_dir):
    """Run the annotation service."""
    import uvicorn

    from .service import create_app

    app = create_app(Path(data_dir), ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


def main() -> None:
    try:
        cli.main(standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.UsageError as exc:
        click.echo(exc.format_message(), err=True)
        if exc.ctx is not None:
            click.echo(exc.ctx.get_usage(), err=True)
        sys.exit(EXIT_USAGE)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)
    except click.Abort:
        sys.exit(EXIT_RUNTIME)
    except (TaxonomyError, ScoreError) as exc:
        click.echo(f"validation error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    except Exception as exc:  # runtime failures
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
