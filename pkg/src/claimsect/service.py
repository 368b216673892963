"""JSON-over-HTTP API for campaigns and live annotation sessions.

Sessions are addressed by (campaign, claim).  Every mutation carries the
version token the client last saw; a stale token gets 409 and the client
refetches, which makes retries and double-submits harmless.  Annotations
are appended to the campaign's per-claim log and fsynced before the
response goes out, so a crash loses at most an unacknowledged answer and a
restart replays the logs back to the last acknowledged state.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException
from fastapi.responses import RedirectResponse
from fastapi.staticfiles import StaticFiles

from . import WIRE_FORMAT, pba
from .annotation import AnnotationError, Campaign, read_report_file, write_report_file
from .classify import (
    classify_multilabel,
    classify_stance,
    classify_topic,
    detect_claims,
    zero_shot_thresholds,
)
from .pba import BisectionConfig, LogEntry
from .scores import ingest_scores
from .taxonomy import parse_taxonomy, validate_against_scores


class _Session:
    """Live engine state for one (campaign, claim), guarded by a lock.

    ``version`` is an event counter: it starts at the replayed annotation
    count and increments on every accepted mutation (post or undo).
    """

    def __init__(self, campaign: Campaign, claim_id: str):
        self.campaign = campaign
        self.claim = campaign.taxonomy.claim(claim_id)
        self.column = campaign.matrix.column(claim_id)
        self.state = campaign.claim_state(claim_id)
        self.version = self.state.annotations_used
        self.lock = threading.Lock()
        self.proposal: pba.Proposal | None = None

    def current_proposal(self) -> pba.Proposal | None:
        if self.state.status != pba.RUNNING:
            return None
        if self.proposal is None:
            self.proposal = pba.propose_next(self.state, self.column)
            if self.proposal is None:
                self.state = pba.mark_early_stop(self.state)
        return self.proposal

    def summary(self) -> dict:
        return {
            "format": WIRE_FORMAT,
            "claim_id": self.claim.claim_id,
            "status": self.state.status,
            "annotations_used": self.state.annotations_used,
            "version": self.version,
            "median": self.state.median,
            "ci_width": self.state.ci_width,
            "completion_ci_width": self.state.config.completion_ci_width,
            "posterior": pba.posterior_summary(self.state),
        }


class ServiceState:
    def __init__(self, data_dir: Path):
        self.data_dir = data_dir
        self.campaigns_dir = data_dir / "campaigns"
        self.campaigns_dir.mkdir(parents=True, exist_ok=True)
        self.sessions: dict[tuple[str, str], _Session] = {}
        self.lock = threading.Lock()

    def campaign(self, campaign_id: str) -> Campaign:
        root = self.campaigns_dir / campaign_id
        if not (root / "campaign.json").exists():
            raise HTTPException(404, f"no campaign {campaign_id!r}")
        return Campaign(root)

    def session(self, campaign_id: str, claim_id: str) -> _Session:
        key = (campaign_id, claim_id)
        with self.lock:
            if key not in self.sessions:
                campaign = self.campaign(campaign_id)
                try:
                    self.sessions[key] = _Session(campaign, claim_id)
                except KeyError:
                    raise HTTPException(404, f"no claim {claim_id!r}")
            return self.sessions[key]


def create_app(data_dir: str | Path, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="claimsect", version="0.1.0")
    svc = ServiceState(Path(data_dir))
    app.state.svc = svc

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok", "format": WIRE_FORMAT}

    @app.post("/campaigns", status_code=201)
    def create_campaign(body: dict = Body(...)) -> dict:
        campaign_id = body.get("campaign_id")
        if not campaign_id:
            raise HTTPException(422, "campaign_id is required")
        root = svc.campaigns_dir / campaign_id
        if (root / "campaign.json").exists():
            raise HTTPException(409, f"campaign {campaign_id!r} already exists")
        for field in ("taxonomy_path", "scores_path"):
            if field not in body:
                raise HTTPException(422, f"{field} is required")
            if not Path(body[field]).exists():
                raise HTTPException(422, f"{field}: no such file {body[field]!r}")
        try:
            taxonomy = parse_taxonomy(Path(body["taxonomy_path"]).read_bytes())
            matrix = ingest_scores(Path(body["scores_path"]).read_bytes())
        except ValueError as exc:
            raise HTTPException(422, str(exc))
        missing = validate_against_scores(taxonomy, matrix)
        hard_missing = [d for d in missing if d.kind == "missing_column"]
        if hard_missing:
            raise HTTPException(
                422,
                "score matrix is missing columns: "
                + ", ".join(d.column for d in hard_missing),
            )
        cfg_body = body.get("config", {})
        try:
            config = BisectionConfig(
                p=cfg_body.get("p", 0.7),
                grid_size=cfg_body.get("grid_size", 1001),
                completion_ci_mass=cfg_body.get("completion_ci_mass", 0.95),
                completion_ci_width=cfg_body.get("completion_ci_width", 0.20),
                max_annotations=cfg_body.get("max_annotations"),
                range_lo=cfg_body.get("range_lo", matrix.range_lo),
                range_hi=cfg_body.get("range_hi", matrix.range_hi),
            )
        except ValueError as exc:
            raise HTTPException(422, f"config: {exc}")
        Campaign.create(
            root,
            taxonomy_path=body["taxonomy_path"],
            scores_path=body["scores_path"],
            config=config,
            dataset_path=body.get("dataset_path"),
            campaign_id=campaign_id,
        )
        return {"format": WIRE_FORMAT, "campaign_id": campaign_id}

    @app.get("/campaigns")
    def list_campaigns() -> dict:
        out = []
        for child in sorted(svc.campaigns_dir.iterdir()):
            if (child / "campaign.json").exists():
                out.append(child.name)
        return {"format": WIRE_FORMAT, "campaigns": out}

    @app.get("/campaigns/{campaign_id}")
    def campaign_summary(campaign_id: str) -> dict:
        campaign = svc.campaign(campaign_id)
        claims = []
        for claim in campaign.taxonomy.claims:
            session = svc.session(campaign_id, claim.claim_id)
            with session.lock:
                status = session.state.status
                if status == pba.RUNNING and session.state.annotations_used == 0:
                    status = "pending"
                claims.append(
                    {
                        "claim_id": claim.claim_id,
                        "text": claim.text,
                        "status": status,
                        "annotations_used": session.state.annotations_used,
                        "median": session.state.median,
                        "ci_width": session.state.ci_width,
                    }
                )
        return {
            "format": WIRE_FORMAT,
            "campaign_id": campaign_id,
            "taxonomy_id": campaign.taxonomy.taxonomy_id,
            "claims": claims,
        }

    @app.get("/campaigns/{campaign_id}/sessions/{claim_id}/next")
    def next_item(campaign_id: str, claim_id: str) -> dict:
        session = svc.session(campaign_id, claim_id)
        with session.lock:
            proposal = session.current_proposal()
            if proposal is None:
                report = pba.finalize(session.state, claim_id=claim_id)
                return {
                    "format": WIRE_FORMAT,
                    "done": True,
                    "report": {
                        "claim_id": report.claim_id,
                        "threshold": report.threshold,
                        "ci_width": report.ci_width,
                        "annotations": report.annotations,
                        "status": report.status,
                    },
                    "version": session.version,
                }
            doc = session.campaign.document(proposal.doc_id)
            return {
                "format": WIRE_FORMAT,
                "done": False,
                "doc_id": proposal.doc_id,
                "doc_text": doc.text,
                "claim_id": claim_id,
                "claim_text": session.claim.text,
                "s_t": proposal.score,
                "version": session.version,
                "summary": session.summary(),
            }

    @app.post("/campaigns/{campaign_id}/sessions/{claim_id}/annotations")
    def post_annotation(campaign_id: str, claim_id: str, body: dict = Body(...)) -> dict:
        session = svc.session(campaign_id, claim_id)
        with session.lock:
            if session.state.status != pba.RUNNING:
                raise HTTPException(410, f"session is {session.state.status}")
            if body.get("version") != session.version:
                raise HTTPException(
                    409,
                    f"stale version {body.get('version')}, current {session.version}",
                )
            proposal = session.current_proposal()
            if proposal is None:
                raise HTTPException(410, "session just stopped; fetch next")
            if body.get("doc_id") != proposal.doc_id:
                raise HTTPException(
                    422,
                    f"doc_id {body.get('doc_id')!r} is not the proposed item "
                    f"{proposal.doc_id!r}",
                )
            entails = body.get("entails")
            if not isinstance(entails, bool):
                raise HTTPException(422, "entails must be a boolean")
            new_state = pba.update(
                session.state, proposal.score, entails, doc_id=proposal.doc_id
            )
            if new_state.annotations_used == session.state.annotations_used + 1:
                # durable before acknowledged
                session.campaign._log(claim_id).append(
                    LogEntry(
                        step=new_state.annotations_used,
                        doc_id=proposal.doc_id,
                        s_t=proposal.score,
                        entails=entails,
                        median=new_state.median,
                        ci_width=new_state.ci_width,
                    )
                )
            session.state = new_state
            session.proposal = None
            session.version += 1
            _persist_reports(session)
            return session.summary()

    @app.post("/campaigns/{campaign_id}/undo/{claim_id}")
    def undo(campaign_id: str, claim_id: str) -> dict:
        session = svc.session(campaign_id, claim_id)
        with session.lock:
            try:
                session.state = session.campaign.undo_last(claim_id)
            except AnnotationError as exc:
                raise HTTPException(409, str(exc))
            session.proposal = None
            session.version += 1
            _persist_reports(session)
            return session.summary()

    @app.get("/campaigns/{campaign_id}/reports")
    def reports(campaign_id: str) -> dict:
        campaign = svc.campaign(campaign_id)
        out = []
        for claim in campaign.taxonomy.claims:
            state = campaign.claim_state(claim.claim_id)
            status = state.status
            out.append(
                {
                    "claim_id": claim.claim_id,
                    "threshold": state.median,
                    "ci_width": state.ci_width,
                    "annotations": state.annotations_used,
                    "status": status,
                }
            )
        return {"format": WIRE_FORMAT, "reports": out}

    @app.post("/classify")
    def classify_route(body: dict = Body(...)) -> dict:
        for field in ("taxonomy_path", "scores_path"):
            if field not in body or not Path(body[field]).exists():
                raise HTTPException(422, f"{field} is required and must exist")
        try:
            taxonomy = parse_taxonomy(Path(body["taxonomy_path"]).read_bytes())
            matrix = ingest_scores(Path(body["scores_path"]).read_bytes())
            if body.get("zero_shot"):
                thresholds = zero_shot_thresholds(taxonomy)
            elif "thresholds" in body:
                thresholds = {k: float(v) for k, v in body["thresholds"].items()}
            elif "reports_path" in body:
                thresholds = {
                    r.claim_id: r.threshold
                    for r in read_report_file(Path(body["reports_path"]))
                }
            else:
                raise HTTPException(
                    422, "provide thresholds, reports_path, or zero_shot"
                )
            negation = bool(body.get("negation_filter"))
            labeling = detect_claims(
                matrix, thresholds, taxonomy, negation_filter=negation
            )
            if taxonomy.task_kind == "multi_class_topic":
                topics = classify_topic(matrix, thresholds, taxonomy)
                predictions = [
                    {"doc_id": d, "topic": topics[d]} for d in matrix.doc_ids
                ]
            elif taxonomy.task_kind == "stance":
                topic = body.get("topic")
                if not topic:
                    raise HTTPException(422, "stance taxonomy needs a topic")
                stances = classify_stance(
                    matrix, thresholds, taxonomy, topic, negation_filter=negation
                )
                predictions = [
                    {"doc_id": d, "topic": topic, "stance": stances[d]}
                    for d in matrix.doc_ids
                ]
            else:
                classes = classify_multilabel(labeling, taxonomy)
                predictions = [
                    {
                        "doc_id": d,
                        "claims": sorted(labeling[d]),
                        "classes": sorted(classes[d]),
                    }
                    for d in matrix.doc_ids
                ]
        except HTTPException:
            raise
        except ValueError as exc:
            raise HTTPException(422, str(exc))
        return {"format": WIRE_FORMAT, "predictions": predictions}

    def _persist_reports(session: _Session) -> None:
        campaign = session.campaign
        reports = []
        for claim in campaign.taxonomy.claims:
            key = (campaign.campaign_id, claim.claim_id)
            if key in svc.sessions:
                st = svc.sessions[key].state
            else:
                st = campaign.claim_state(claim.claim_id)
            reports.append(
                pba.ThresholdReport(
                    claim_id=claim.claim_id,
                    threshold=st.median,
                    ci_width=st.ci_width,
                    annotations=st.annotations_used,
                    status=st.status,
                )
            )
        write_report_file(campaign.root / "reports.json", reports)

    if ui_dir is not None:
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

        @app.get("/")
        def index() -> RedirectResponse:
            return RedirectResponse("/ui/")

    return app
