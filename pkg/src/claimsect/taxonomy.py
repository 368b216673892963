"""Claim taxonomies: the declarative mapping from claims to classes.

A taxonomy file is JSON with top-level ``taxonomy_id``, ``task_kind``,
``claims`` and ``classes``.  Claims declare which classes they support (or
oppose); classes declare how member claims combine (``any_of`` / ``all_of``)
and may list absence claims whose detection vetoes the class.  Stance
taxonomies additionally tag every class with a ``stance`` polarity and the
``topic`` class it belongs to.

Score columns for negated claim variants are keyed ``<claim_id>__neg``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import WIRE_FORMAT

TASK_KINDS = ("multi_label", "multi_class_topic", "stance")
POLARITIES = ("supports", "opposes")
CLASS_MODES = ("any_of", "all_of")
STANCES = ("against", "favor")

NEGATED_SUFFIX = "__neg"


def negated_column_id(claim_id: str) -> str:
    return claim_id + NEGATED_SUFFIX


class TaxonomyError(ValueError):
    """Raised on malformed or inconsistent taxonomy files."""


@dataclass(frozen=True)
class ClassRef:
    class_id: str
    polarity: str  # supports | opposes


@dataclass(frozen=True)
class ClaimDef:
    claim_id: str
    text: str
    classes: tuple[ClassRef, ...]
    negated_text: str | None = None

    def supported_classes(self) -> set[str]:
        return {r.class_id for r in self.classes if r.polarity == "supports"}


@dataclass(frozen=True)
class ClassRule:
    class_id: str
    label: str
    mode: str  # any_of | all_of
    member_claims: tuple[str, ...]
    absence_claims: tuple[str, ...] = ()
    stance: str | None = None
    topic: str | None = None


@dataclass(frozen=True)
class Taxonomy:
    taxonomy_id: str
    task_kind: str
    claims: tuple[ClaimDef, ...]
    classes: tuple[ClassRule, ...]

    def claim(self, claim_id: str) -> ClaimDef:
        for c in self.claims:
            if c.claim_id == claim_id:
                return c
        raise KeyError(claim_id)

    def class_rule(self, class_id: str) -> ClassRule:
        for c in self.classes:
            if c.class_id == class_id:
                return c
        raise KeyError(class_id)

    def claim_ids(self) -> list[str]:
        return [c.claim_id for c in self.claims]

    def class_ids(self) -> list[str]:
        return [c.class_id for c in self.classes]

    def stance_partition(self, topic: str) -> tuple[ClassRule, ClassRule]:
        """(against, favor) class rules of a stance taxonomy for ``topic``."""
        against = [c for c in self.classes if c.topic == topic and c.stance == "against"]
        favor = [c for c in self.classes if c.topic == topic and c.stance == "favor"]
        if len(against) != 1 or len(favor) != 1:
            raise TaxonomyError(
                f"topic {topic!r} lacks an against/favor stance partition"
            )
        return against[0], favor[0]


@dataclass(frozen=True)
class Discrepancy:
    """A taxonomy/score-matrix mismatch found by validate_against_scores."""

    kind: str  # missing_column | missing_negated
    claim_id: str
    column: str


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise TaxonomyError(msg)


def parse_taxonomy(source: bytes | str) -> Taxonomy:
    """Parse and validate a taxonomy file; raises TaxonomyError on any
    schema or referential-integrity violation."""
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    try:
        raw = json.loads(source)
    except json.JSONDecodeError as exc:
        raise TaxonomyError(f"taxonomy is not valid JSON: {exc}") from exc
    _require(isinstance(raw, dict), "taxonomy root must be an object")
    for key in ("taxonomy_id", "task_kind", "claims", "classes"):
        _require(key in raw, f"taxonomy missing top-level field {key!r}")
    task_kind = raw["task_kind"]
    _require(
        task_kind in TASK_KINDS,
        f"task_kind must be one of {TASK_KINDS}, got {task_kind!r}",
    )

    declared_classes = set()
    for i, entry in enumerate(raw["classes"]):
        _require(isinstance(entry, dict), f"classes[{i}] must be an object")
        _require("class_id" in entry, f"classes[{i}] missing class_id")
        cid = entry["class_id"]
        _require(cid not in declared_classes, f"duplicate class_id {cid!r}")
        declared_classes.add(cid)

    claims: list[ClaimDef] = []
    members: dict[str, list[str]] = {cid: [] for cid in declared_classes}
    seen_claims: set[str] = set()
    for i, entry in enumerate(raw["claims"]):
        where = f"claims[{i}]"
        _require(isinstance(entry, dict), f"{where} must be an object")
        for key in ("claim_id", "text", "classes"):
            _require(key in entry, f"{where} missing field {key!r}")
        claim_id = entry["claim_id"]
        _require(isinstance(claim_id, str) and claim_id, f"{where}: empty claim_id")
        _require(claim_id not in seen_claims, f"duplicate claim_id {claim_id!r}")
        seen_claims.add(claim_id)
        text = entry["text"]
        _require(
            isinstance(text, str) and text.strip() != "",
            f"{where} ({claim_id}): text must be non-empty",
        )
        negated = entry.get("negated_text")
        if negated is not None:
            _require(
                isinstance(negated, str) and negated.strip() != "",
                f"{where} ({claim_id}): negated_text must be non-empty when given",
            )
        refs: list[ClassRef] = []
        _require(
            isinstance(entry["classes"], list) and entry["classes"],
            f"{where} ({claim_id}): classes must be a non-empty list",
        )
        for j, ref in enumerate(entry["classes"]):
            _require(isinstance(ref, dict), f"{where}.classes[{j}] must be an object")
            cid = ref.get("class_id")
            _require(
                cid in declared_classes,
                f"{where} ({claim_id}) references undeclared class {cid!r}",
            )
            polarity = ref.get("polarity", "supports")
            _require(
                polarity in POLARITIES,
                f"{where} ({claim_id}): polarity must be one of {POLARITIES}",
            )
            refs.append(ClassRef(class_id=cid, polarity=polarity))
            if polarity == "supports":
                members[cid].append(claim_id)
        claims.append(
            ClaimDef(
                claim_id=claim_id,
                text=text,
                negated_text=negated,
                classes=tuple(refs),
            )
        )

    classes: list[ClassRule] = []
    for i, entry in enumerate(raw["classes"]):
        where = f"classes[{i}]"
        cid = entry["class_id"]
        mode = entry.get("mode", "any_of")
        _require(mode in CLASS_MODES, f"{where} ({cid}): mode must be one of {CLASS_MODES}")
        member = tuple(members[cid])
        _require(member, f"class {cid!r} has no supporting claims")
        absence = tuple(entry.get("absence_claims", ()))
        for a in absence:
            _require(
                a in seen_claims,
                f"{where} ({cid}): absence claim {a!r} is not declared",
            )
        _require(
            not set(member) & set(absence),
            f"class {cid!r}: member and absence claims overlap",
        )
        stance = entry.get("stance")
        topic = entry.get("topic")
        if task_kind == "stance":
            _require(
                stance in STANCES,
                f"{where} ({cid}): stance taxonomy classes need stance in {STANCES}",
            )
            _require(
                isinstance(topic, str) and topic,
                f"{where} ({cid}): stance taxonomy classes need a topic id",
            )
        elif stance is not None:
            _require(stance in STANCES, f"{where} ({cid}): bad stance {stance!r}")
        classes.append(
            ClassRule(
                class_id=cid,
                label=entry.get("label", cid),
                mode=mode,
                member_claims=member,
                absence_claims=absence,
                stance=stance,
                topic=topic,
            )
        )

    return Taxonomy(
        taxonomy_id=raw["taxonomy_id"],
        task_kind=task_kind,
        claims=tuple(claims),
        classes=tuple(classes),
    )


def serialize_taxonomy(tax: Taxonomy) -> bytes:
    """Canonical file form; parse(serialize(t)) == t for valid taxonomies."""
    doc = {
        "format": WIRE_FORMAT,
        "taxonomy_id": tax.taxonomy_id,
        "task_kind": tax.task_kind,
        "claims": [
            {
                "claim_id": c.claim_id,
                "text": c.text,
                **({"negated_text": c.negated_text} if c.negated_text else {}),
                "classes": [
                    {"class_id": r.class_id, "polarity": r.polarity}
                    for r in c.classes
                ],
            }
            for c in tax.claims
        ],
        "classes": [
            {
                "class_id": c.class_id,
                "label": c.label,
                "mode": c.mode,
                **(
                    {"absence_claims": list(c.absence_claims)}
                    if c.absence_claims
                    else {}
                ),
                **({"stance": c.stance} if c.stance else {}),
                **({"topic": c.topic} if c.topic else {}),
            }
            for c in tax.classes
        ],
    }
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def validate_against_scores(tax: Taxonomy, matrix) -> list[Discrepancy]:
    """Report every taxonomy claim (and negated variant) without a score
    column.  An empty list means the matrix covers the taxonomy."""
    out: list[Discrepancy] = []
    for claim in tax.claims:
        if not matrix.has_claim(claim.claim_id):
            out.append(
                Discrepancy("missing_column", claim.claim_id, claim.claim_id)
            )
        if claim.negated_text is not None:
            neg = negated_column_id(claim.claim_id)
            if not matrix.has_claim(neg):
                out.append(Discrepancy("missing_negated", claim.claim_id, neg))
    return out
