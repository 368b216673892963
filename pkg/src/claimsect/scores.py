"""Score-matrix ingest, storage, and the external scoring provider client.

Score files are JSONL: a header record ``{"score_kind": ..., "range": [lo,
hi]}`` followed by one ``{"doc_id", "claim_id", "score"}`` record per cell.
The matrix is dense — every (doc, claim) pair must have exactly one cell.
Values are kept at full float64 precision end to end because threshold
medians are compared directly against them.

The provider protocol is HTTP POST of ``{"pairs": [{doc_id, text, claim_id,
claim_text}]}`` answered by ``{"scores": [{doc_id, claim_id, score}]}``;
fetched cells are cached to a score file so re-runs stay offline.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import WIRE_FORMAT
from .taxonomy import ClaimDef, negated_column_id

SCORE_KINDS = {"entailment": (0.0, 1.0), "cosine": (-1.0, 1.0)}


class ScoreError(ValueError):
    """Malformed score or dataset file."""


class ProviderError(RuntimeError):
    """Provider kept failing after retries; ``pairs`` lists the casualties."""

    def __init__(self, msg: str, pairs: list[tuple[str, str]] | None = None):
        super().__init__(msg)
        self.pairs = pairs or []


class ProviderProtocolError(RuntimeError):
    """Provider answered, but the payload violates the wire contract."""


@dataclass(frozen=True)
class Document:
    doc_id: str
    text: str
    gold_classes: frozenset[str] | None = None
    split: str | None = None


class ScoreMatrix:
    """Dense document-by-claim score table with a declared value range."""

    def __init__(
        self,
        doc_ids: Sequence[str],
        claim_ids: Sequence[str],
        values: np.ndarray,
        score_kind: str = "entailment",
        range_lo: float | None = None,
        range_hi: float | None = None,
    ):
        if score_kind not in SCORE_KINDS:
            raise ScoreError(f"unknown score_kind {score_kind!r}")
        lo, hi = SCORE_KINDS[score_kind]
        self.range_lo = lo if range_lo is None else float(range_lo)
        self.range_hi = hi if range_hi is None else float(range_hi)
        if (self.range_lo, self.range_hi) != SCORE_KINDS[score_kind]:
            raise ScoreError(
                f"score_kind {score_kind} implies range {SCORE_KINDS[score_kind]}, "
                f"got [{self.range_lo}, {self.range_hi}]"
            )
        self.score_kind = score_kind
        self.doc_ids = tuple(doc_ids)
        self.claim_ids = tuple(claim_ids)
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (len(self.doc_ids), len(self.claim_ids)):
            raise ScoreError(
                f"value shape {values.shape} does not match "
                f"{len(self.doc_ids)} docs x {len(self.claim_ids)} claims"
            )
        if values.size and np.isnan(values).any():
            d, c = np.argwhere(np.isnan(values))[0]
            raise ScoreError(
                f"NaN score at ({self.doc_ids[d]}, {self.claim_ids[c]})"
            )
        if values.size and (
            values.min() < self.range_lo or values.max() > self.range_hi
        ):
            d, c = np.unravel_index(
                int(np.argmax(np.abs(values - np.clip(values, self.range_lo, self.range_hi)))),
                values.shape,
            )
            raise ScoreError(
                f"score {values[d, c]} at ({self.doc_ids[d]}, {self.claim_ids[c]}) "
                f"outside [{self.range_lo}, {self.range_hi}]"
            )
        self.values = values
        self._doc_index = {d: i for i, d in enumerate(self.doc_ids)}
        self._claim_index = {c: i for i, c in enumerate(self.claim_ids)}

    def has_claim(self, claim_id: str) -> bool:
        return claim_id in self._claim_index

    def score(self, doc_id: str, claim_id: str) -> float:
        return float(self.values[self._doc_index[doc_id], self._claim_index[claim_id]])

    def column(self, claim_id: str) -> list[tuple[str, float]]:
        """Column as (doc_id, score), ascending by score then doc_id."""
        if claim_id not in self._claim_index:
            raise ScoreError(f"unknown claim_id {claim_id!r}")
        col = self.values[:, self._claim_index[claim_id]]
        return sorted(zip(self.doc_ids, (float(v) for v in col)), key=lambda t: (t[1], t[0]))

    def subset(self, doc_ids: Sequence[str]) -> "ScoreMatrix":
        rows = [self._doc_index[d] for d in doc_ids]
        return ScoreMatrix(
            doc_ids,
            self.claim_ids,
            self.values[rows, :],
            score_kind=self.score_kind,
        )

    def export(self) -> bytes:
        """Canonical JSONL form; ingest(export(m)) reproduces values bit-exactly."""
        lines = [
            json.dumps(
                {
                    "format": WIRE_FORMAT,
                    "score_kind": self.score_kind,
                    "range": [self.range_lo, self.range_hi],
                }
            )
        ]
        for i, d in enumerate(self.doc_ids):
            for j, c in enumerate(self.claim_ids):
                lines.append(
                    json.dumps(
                        {"doc_id": d, "claim_id": c, "score": float(self.values[i, j])}
                    )
                )
        return ("\n".join(lines) + "\n").encode("utf-8")


def _parse_jsonl(source: bytes | str) -> list[dict]:
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    records = []
    for n, line in enumerate(source.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise ScoreError(f"line {n}: invalid JSON: {exc}") from exc
    return records


def ingest_scores(source: bytes | str, kind: str | None = None) -> ScoreMatrix:
    """Read a score file into a dense matrix, preserving first-appearance
    row/column order.  Out-of-range values, duplicate cells, and missing
    cells are errors, named by coordinate."""
    records = _parse_jsonl(source)
    if not records:
        raise ScoreError("score file is empty")
    header = records[0]
    if "score_kind" not in header:
        raise ScoreError("first record must be a header with score_kind and range")
    score_kind = header["score_kind"]
    if kind is not None and kind != score_kind:
        raise ScoreError(f"expected score_kind {kind!r}, file declares {score_kind!r}")
    if score_kind not in SCORE_KINDS:
        raise ScoreError(f"unknown score_kind {score_kind!r}")
    lo, hi = header.get("range", SCORE_KINDS[score_kind])
    if (float(lo), float(hi)) != SCORE_KINDS[score_kind]:
        raise ScoreError(
            f"declared range [{lo}, {hi}] does not match score_kind {score_kind}"
        )

    cells: dict[tuple[str, str], float] = {}
    doc_index: dict[str, int] = {}
    claim_index: dict[str, int] = {}
    for n, rec in enumerate(records[1:], start=2):
        for key in ("doc_id", "claim_id", "score"):
            if key not in rec:
                raise ScoreError(f"line {n}: missing field {key!r}")
        d, c, s = rec["doc_id"], rec["claim_id"], rec["score"]
        if not isinstance(s, (int, float)) or isinstance(s, bool):
            raise ScoreError(f"line {n}: score for ({d}, {c}) is not a number")
        s = float(s)
        if not lo <= s <= hi:
            raise ScoreError(
                f"line {n}: score {s} at ({d}, {c}) outside [{lo}, {hi}]"
            )
        if (d, c) in cells:
            raise ScoreError(f"line {n}: duplicate cell ({d}, {c})")
        doc_index.setdefault(d, len(doc_index))
        claim_index.setdefault(c, len(claim_index))
        cells[(d, c)] = s

    doc_ids = list(doc_index)
    claim_ids = list(claim_index)
    values = np.full((len(doc_ids), len(claim_ids)), np.nan)
    for (d, c), s in cells.items():
        values[doc_index[d], claim_index[c]] = s
    missing = np.argwhere(np.isnan(values))
    if len(missing):
        d, c = missing[0]
        raise ScoreError(
            f"matrix is not dense: no score for ({doc_ids[d]}, {claim_ids[c]}) "
            f"and {len(missing) - 1} more cells"
        )
    return ScoreMatrix(doc_ids, claim_ids, values, score_kind=score_kind)


def load_dataset(source: bytes | str) -> list[Document]:
    """Dataset JSONL: one {"doc_id", "text", "gold_classes"?, "split"?} per line."""
    docs: list[Document] = []
    seen: set[str] = set()
    for n, rec in enumerate(_parse_jsonl(source), start=1):
        if "doc_id" not in rec or "text" not in rec:
            raise ScoreError(f"dataset line {n}: needs doc_id and text")
        if rec["doc_id"] in seen:
            raise ScoreError(f"dataset line {n}: duplicate doc_id {rec['doc_id']!r}")
        seen.add(rec["doc_id"])
        gold = rec.get("gold_classes")
        split = rec.get("split")
        if split not in (None, "train", "test"):
            raise ScoreError(f"dataset line {n}: split must be train or test")
        docs.append(
            Document(
                doc_id=rec["doc_id"],
                text=rec["text"],
                gold_classes=None if gold is None else frozenset(gold),
                split=split,
            )
        )
    return docs


@dataclass(frozen=True)
class ProviderConfig:
    url: str
    batch_size: int = 32
    max_retries: int = 3
    backoff_base: float = 0.25
    timeout: float = 30.0
    include_negated: bool = False


def _provider_post(cfg: ProviderConfig, pairs: list[dict]) -> list[dict]:
    import requests

    last_exc: Exception | None = None
    for attempt in range(cfg.max_retries):
        try:
            resp = requests.post(
                cfg.url, json={"pairs": pairs}, timeout=cfg.timeout
            )
            if resp.status_code >= 500:
                last_exc = ProviderError(f"provider returned {resp.status_code}")
            else:
                resp.raise_for_status()
                body = resp.json()
                if not isinstance(body, dict) or "scores" not in body:
                    raise ProviderProtocolError(
                        "provider response missing 'scores' field"
                    )
                return body["scores"]
        except ProviderProtocolError:
            raise
        except Exception as exc:  # transport errors, 4xx, bad JSON
            last_exc = exc
        if attempt + 1 < cfg.max_retries:
            time.sleep(cfg.backoff_base * 2**attempt)
    raise ProviderError(
        f"provider failed after {cfg.max_retries} attempts: {last_exc}",
        pairs=[(p["doc_id"], p["claim_id"]) for p in pairs],
    )


def _read_cache(path: Path) -> dict[tuple[str, str], float]:
    if not path.exists():
        return {}
    cached = {}
    for rec in _parse_jsonl(path.read_bytes()):
        if "doc_id" in rec and "claim_id" in rec and "score" in rec:
            cached[(rec["doc_id"], rec["claim_id"])] = float(rec["score"])
    return cached


def fetch_scores(
    provider: ProviderConfig,
    docs: Sequence[Document],
    claims: Sequence[ClaimDef],
    cache_path: str | Path,
) -> ScoreMatrix:
    """Score every (doc, claim) pair through the provider, reading and
    appending a score-file cache so a complete cache needs no network."""
    cache_path = Path(cache_path)
    claim_texts: list[tuple[str, str]] = []
    for c in claims:
        claim_texts.append((c.claim_id, c.text))
        if provider.include_negated and c.negated_text is not None:
            claim_texts.append((negated_column_id(c.claim_id), c.negated_text))

    cached = _read_cache(cache_path)
    wanted = [
        {"doc_id": d.doc_id, "text": d.text, "claim_id": cid, "claim_text": ctext}
        for d in docs
        for cid, ctext in claim_texts
        if (d.doc_id, cid) not in cached
    ]

    fetched: dict[tuple[str, str], float] = {}
    for start in range(0, len(wanted), provider.batch_size):
        batch = wanted[start : start + provider.batch_size]
        for rec in _provider_post(provider, batch):
            for key in ("doc_id", "claim_id", "score"):
                if key not in rec:
                    raise ProviderProtocolError(
                        f"provider score record missing {key!r}"
                    )
            s = rec["score"]
            if not isinstance(s, (int, float)) or not 0.0 <= float(s) <= 1.0:
                raise ProviderProtocolError(
                    f"provider score {s!r} for ({rec['doc_id']}, {rec['claim_id']}) "
                    "outside [0, 1]"
                )
            fetched[(rec["doc_id"], rec["claim_id"])] = float(s)
        missing = [
            (p["doc_id"], p["claim_id"])
            for p in batch
            if (p["doc_id"], p["claim_id"]) not in fetched
        ]
        if missing:
            raise ProviderProtocolError(
                f"provider response missing scores for pairs: {missing[:5]}"
            )

    if fetched:
        _append_cache(cache_path, fetched)
        cached.update(fetched)

    doc_order = [d.doc_id for d in docs]
    claim_order = [cid for cid, _ in claim_texts]
    values = np.array(
        [[cached[(d, c)] for c in claim_order] for d in doc_order], dtype=np.float64
    )
    return ScoreMatrix(doc_order, claim_order, values, score_kind="entailment")


def _append_cache(path: Path, cells: dict[tuple[str, str], float]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fresh = not path.exists() or path.stat().st_size == 0
    with open(path, "a", encoding="utf-8") as fh:
        if fresh:
            fh.write(
                json.dumps(
                    {"format": WIRE_FORMAT, "score_kind": "entailment", "range": [0.0, 1.0]}
                )
                + "\n"
            )
        for (d, c), s in sorted(cells.items()):
            fh.write(json.dumps({"doc_id": d, "claim_id": c, "score": s}) + "\n")
        fh.flush()
        os.fsync(fh.fileno())
