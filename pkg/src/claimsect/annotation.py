"""Annotation campaigns: durable multi-claim tuning runs plus the oracles.

A campaign lives in a directory:

    campaign.json        config + input file references
    logs/<claim_id>.jsonl   one annotation per line, fsynced per answer
    reports.json         threshold report per claim

State is never stored — any claim's session is rebuilt by replaying its log,
so a killed campaign resumes exactly where it stopped and an undo is just a
truncated log.  Simulated answers derive from document gold labels (every
claim supporting a gold class counts as entailed) with optional seeded flip
noise keyed by (seed, claim, doc) so replay and parallel order cannot change
an answer.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from . import WIRE_FORMAT, pba
from .pba import BisectionConfig, BisectionState, LogEntry, ThresholdReport
from .scores import Document, ScoreMatrix, ingest_scores, load_dataset
from .taxonomy import ClaimDef, Taxonomy, parse_taxonomy

# Campaign-level oracle: answers "does this document entail this claim?"
CampaignAnnotator = Callable[[Document, ClaimDef, float], bool]


class AnnotationError(RuntimeError):
    pass


class UndoRequested(Exception):
    """Control-flow signal from interactive annotators."""


class QuitRequested(Exception):
    """Control-flow signal from interactive annotators."""


@dataclass(frozen=True)
class SimulatedAnnotator:
    """Deterministic oracle backed by gold class labels.

    ``noise`` flips the noiseless answer with that probability, decided by a
    stable hash of (seed, claim_id, doc_id) — independent of answer order.
    """

    gold: dict[str, frozenset[str]]
    noise: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.noise <= 1.0:
            raise ValueError(f"noise must lie in [0, 1], got {self.noise}")

    @classmethod
    def from_documents(
        cls, docs: Sequence[Document], noise: float = 0.0, seed: int = 0
    ) -> "SimulatedAnnotator":
        gold = {}
        for d in docs:
            if d.gold_classes is None:
                raise AnnotationError(f"document {d.doc_id!r} has no gold labels")
            gold[d.doc_id] = d.gold_classes
        return cls(gold=gold, noise=noise, seed=seed)

    def __call__(self, doc: Document, claim: ClaimDef, s_t: float) -> bool:
        return simulate_answer(self, doc, claim)


def simulate_answer(
    annotator: SimulatedAnnotator, doc: Document, claim: ClaimDef
) -> bool:
    """Entailed iff any class the claim supports is among the doc's gold
    classes, then noise-flipped under the annotator's seed."""
    gold = doc.gold_classes
    if gold is None:
        gold = annotator.gold.get(doc.doc_id)
    if gold is None:
        raise AnnotationError(f"document {doc.doc_id!r} has no gold labels")
    answer = bool(claim.supported_classes() & gold)
    if annotator.noise > 0.0 and _stable_unit(
        annotator.seed, claim.claim_id, doc.doc_id
    ) < annotator.noise:
        answer = not answer
    return answer


def _stable_unit(seed: int, claim_id: str, doc_id: str) -> float:
    digest = hashlib.blake2b(
        f"{seed}:{claim_id}:{doc_id}".encode("utf-8"), digest_size=8
    ).digest()
    return int.from_bytes(digest, "big") / 2**64


# ---------------------------------------------------------------------------
# Durable per-claim logs
# ---------------------------------------------------------------------------


def _entry_to_json(entry: LogEntry) -> str:
    return json.dumps(
        {
            "step": entry.step,
            "doc_id": entry.doc_id,
            "s_t": entry.s_t,
            "entails": entry.entails,
            "median": entry.median,
            "ci_width": entry.ci_width,
        }
    )


def _entry_from_json(rec: dict) -> LogEntry:
    return LogEntry(
        step=rec["step"],
        doc_id=rec["doc_id"],
        s_t=rec["s_t"],
        entails=rec["entails"],
        median=rec.get("median", 0.0),
        ci_width=rec.get("ci_width", 0.0),
    )


def read_log(path: Path) -> list[LogEntry]:
    if not path.exists():
        return []
    entries = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line:
            continue
        rec = json.loads(line)
        if "format" in rec and "step" not in rec:
            continue  # header line
        entries.append(_entry_from_json(rec))
    return entries


def write_report_file(path: Path, reports: Sequence[ThresholdReport]) -> None:
    doc = {
        "format": WIRE_FORMAT,
        "reports": [
            {
                "claim_id": r.claim_id,
                "threshold": r.threshold,
                "ci_width": r.ci_width,
                "annotations": r.annotations,
                "status": r.status,
            }
            for r in reports
        ],
    }
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    os.replace(tmp, path)


def read_report_file(path: Path) -> list[ThresholdReport]:
    doc = json.loads(path.read_text(encoding="utf-8"))
    return [
        ThresholdReport(
            claim_id=r["claim_id"],
            threshold=r["threshold"],
            ci_width=r["ci_width"],
            annotations=r["annotations"],
            status=r["status"],
        )
        for r in doc["reports"]
    ]


class _ClaimLog:
    """Append-only annotation log with per-answer fsync."""

    def __init__(self, path: Path, claim_id: str):
        self.path = path
        self.claim_id = claim_id

    def entries(self) -> list[LogEntry]:
        return read_log(self.path)

    def append(self, entry: LogEntry) -> None:
        fresh = not self.path.exists() or self.path.stat().st_size == 0
        with open(self.path, "a", encoding="utf-8") as fh:
            if fresh:
                fh.write(
                    json.dumps({"format": WIRE_FORMAT, "claim_id": self.claim_id})
                    + "\n"
                )
            fh.write(_entry_to_json(entry) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def truncate_last(self) -> None:
        entries = self.entries()
        if not entries:
            raise AnnotationError(f"no annotations to undo for {self.claim_id!r}")
        tmp = self.path.with_suffix(".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(
                json.dumps({"format": WIRE_FORMAT, "claim_id": self.claim_id}) + "\n"
            )
            for e in entries[:-1]:
                fh.write(_entry_to_json(e) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, self.path)


# ---------------------------------------------------------------------------
# Campaign
# ---------------------------------------------------------------------------


class Campaign:
    """One tuning run over every claim of a taxonomy, recoverable from disk."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        manifest_path = self.root / "campaign.json"
        if not manifest_path.exists():
            raise AnnotationError(f"no campaign at {self.root}")
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        self.campaign_id = manifest["campaign_id"]
        self.taxonomy_path = Path(manifest["taxonomy_path"])
        self.scores_path = Path(manifest["scores_path"])
        self.dataset_path = (
            Path(manifest["dataset_path"]) if manifest.get("dataset_path") else None
        )
        cfg = manifest["config"]
        self.config = BisectionConfig(
            p=cfg["p"],
            grid_size=cfg.get("grid_size", 1001),
            completion_ci_mass=cfg.get("completion_ci_mass", 0.95),
            completion_ci_width=cfg.get("completion_ci_width", 0.20),
            max_annotations=cfg.get("max_annotations"),
            range_lo=cfg.get("range_lo", 0.0),
            range_hi=cfg.get("range_hi", 1.0),
        )
        self.taxonomy: Taxonomy = parse_taxonomy(self.taxonomy_path.read_bytes())
        self.matrix: ScoreMatrix = ingest_scores(self.scores_path.read_bytes())
        self.documents: dict[str, Document] = {}
        if self.dataset_path is not None:
            self.documents = {
                d.doc_id: d for d in load_dataset(self.dataset_path.read_bytes())
            }
        (self.root / "logs").mkdir(exist_ok=True)

    @classmethod
    def create(
        cls,
        root: str | Path,
        taxonomy_path: str | Path,
        scores_path: str | Path,
        config: BisectionConfig,
        dataset_path: str | Path | None = None,
        campaign_id: str | None = None,
    ) -> "Campaign":
        root = Path(root)
        if (root / "campaign.json").exists():
            raise AnnotationError(f"campaign already exists at {root}")
        root.mkdir(parents=True, exist_ok=True)
        (root / "logs").mkdir(exist_ok=True)
        # absolute input paths so resuming from another cwd still works
        manifest = {
            "format": WIRE_FORMAT,
            "campaign_id": campaign_id or root.name,
            "taxonomy_path": str(Path(taxonomy_path).resolve()),
            "scores_path": str(Path(scores_path).resolve()),
            "dataset_path": str(Path(dataset_path).resolve()) if dataset_path else None,
            "config": {
                "p": config.p,
                "grid_size": config.grid_size,
                "completion_ci_mass": config.completion_ci_mass,
                "completion_ci_width": config.completion_ci_width,
                "max_annotations": config.max_annotations,
                "range_lo": config.range_lo,
                "range_hi": config.range_hi,
            },
        }
        (root / "campaign.json").write_text(
            json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
        )
        return cls(root)

    # -- per-claim plumbing -------------------------------------------------

    def _log(self, claim_id: str) -> _ClaimLog:
        return _ClaimLog(self.root / "logs" / f"{claim_id}.jsonl", claim_id)

    def claim_state(self, claim_id: str) -> BisectionState:
        """Rebuild the engine state for one claim by replaying its log.

        A sparsity stop is not recorded in the log (only applied updates
        are), so a replayed state that is still running but has no viable
        candidate left is marked early_stop here, exactly as the live loop
        would have."""
        self.taxonomy.claim(claim_id)  # KeyError on unknown claim
        state = pba.replay(self.config, self._log(claim_id).entries())
        if (
            state.status == pba.RUNNING
            and pba.propose_next(state, self.matrix.column(claim_id)) is None
        ):
            state = pba.mark_early_stop(state)
        return state

    def document(self, doc_id: str) -> Document:
        if doc_id in self.documents:
            return self.documents[doc_id]
        return Document(doc_id=doc_id, text="")

    def undo_last(self, claim_id: str) -> BisectionState:
        """Drop the most recent annotation and return the replayed state."""
        self._log(claim_id).truncate_last()
        return self.claim_state(claim_id)

    # -- the campaign loop ----------------------------------------------------

    def run_claim(
        self, claim: ClaimDef, annotator: CampaignAnnotator
    ) -> ThresholdReport:
        log = self._log(claim.claim_id)
        column = self.matrix.column(claim.claim_id)
        state = pba.replay(self.config, log.entries())
        step = state.annotations_used
        while state.status == pba.RUNNING:
            proposal = pba.propose_next(state, column)
            if proposal is None:
                state = pba.mark_early_stop(state)
                break
            doc = self.document(proposal.doc_id)
            try:
                entails = annotator(doc, claim, proposal.score)
            except UndoRequested:
                if state.annotations_used == 0:
                    continue
                state = self.undo_last(claim.claim_id)
                step = state.annotations_used
                continue
            except QuitRequested as exc:
                raise pba.SessionAbort(log.entries(), exc) from exc
            state = pba.update(
                state, proposal.score, entails, doc_id=proposal.doc_id
            )
            if state.annotations_used == step + 1:
                step += 1
                log.append(
                    LogEntry(
                        step=step,
                        doc_id=proposal.doc_id,
                        s_t=proposal.score,
                        entails=entails,
                        median=state.median,
                        ci_width=state.ci_width,
                    )
                )
        return pba.finalize(state, claim_id=claim.claim_id)

    def run(
        self, annotator: CampaignAnnotator, jobs: int = 1
    ) -> list[ThresholdReport]:
        """Tune every claim in taxonomy order; reports are persisted after
        each claim so an aborted campaign resumes from its logs."""
        claims = list(self.taxonomy.claims)
        reports: dict[str, ThresholdReport] = {}
        if jobs <= 1:
            for claim in claims:
                reports[claim.claim_id] = self.run_claim(claim, annotator)
                self._flush_reports(claims, reports)
        else:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                futures = {
                    claim.claim_id: pool.submit(self.run_claim, claim, annotator)
                    for claim in claims
                }
                for claim in claims:
                    reports[claim.claim_id] = futures[claim.claim_id].result()
            self._flush_reports(claims, reports)
        return [reports[c.claim_id] for c in claims]

    def _flush_reports(
        self, claims: Sequence[ClaimDef], reports: dict[str, ThresholdReport]
    ) -> None:
        ordered = [reports[c.claim_id] for c in claims if c.claim_id in reports]
        write_report_file(self.root / "reports.json", ordered)

    def reports(self) -> list[ThresholdReport]:
        path = self.root / "reports.json"
        if not path.exists():
            return []
        return read_report_file(path)

    def thresholds(self) -> dict[str, float]:
        return {r.claim_id: r.threshold for r in self.reports()}


def run_campaign(
    campaign: Campaign, annotator: CampaignAnnotator, jobs: int = 1
) -> list[ThresholdReport]:
    return campaign.run(annotator, jobs=jobs)
