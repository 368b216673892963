#!/usr/bin/env python3
"""Regenerate everything under sample_data/.

Taxonomy files transcribe the published claim inventories for the three
reference tasks (climate contrarianism, tweet topic/stance, depressive
symptoms).  The synthetic corpus is a small separable dataset with known
per-claim thresholds, used by the README walkthrough and the end-to-end
tests: positive documents score above the planted threshold, negatives
below, and negated-claim columns mirror that for the negation filter.

Usage: python3 scripts/generate_sample_data.py [OUT_DIR]
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

OUT = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent.parent / "sample_data"


def write_json(path: Path, doc: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    print(f"wrote {path}")


def write_jsonl(path: Path, records: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
    print(f"wrote {path} ({len(records)} records)")


# ---------------------------------------------------------------------------
# Climate contrarianism (multi-label).  Base claims carry negated variants;
# the *_extended file adds the recall-oriented extra claims.
# ---------------------------------------------------------------------------

CLIMATE_CLASSES = [
    ("1_1", "Ice/permafrost/snow cover isn't melting"),
    ("1_2", "We are heading into an ice age"),
    ("1_3", "The weather is cold"),
    ("1_4", "There is a hiatus in warming"),
    ("1_6", "Sea level rise is exaggerated"),
    ("1_7", "Extreme weather is not increasing"),
]

# (claim_id, class_id, text, negated_text or None, extended_only)
CLIMATE_CLAIMS = [
    ("1_1_0_0", "1_1", "The world's ice is not melting", "The world's ice is melting", False),
    ("1_1_0_1", "1_1", "The permafrost is not melting", "The permafrost is melting", False),
    ("1_1_0_2", "1_1", "The world's snow cover is not melting", "The world's snow cover is melting", False),
    ("1_1_0_3", "1_1", "Ice thickness is not decreasing", None, True),
    ("1_1_0_4", "1_1", "Snow cover is not decreasing", None, True),
    ("1_1_1_0", "1_1", "Antarctica is gaining ice", "Antarctica is losing ice", False),
    ("1_1_1_1", "1_1", "Antarctica's ice is not melting", "Antarctica's ice is melting", False),
    ("1_1_1_2", "1_1", "Antarctica is cooling", None, True),
    ("1_1_2_0", "1_1", "Greenland is gaining ice", "Greenland is losing ice", False),
    ("1_1_2_1", "1_1", "Greenland's ice is not melting", "Greenland's ice is melting", False),
    ("1_1_3_0", "1_1", "The Arctic sea ice is not vanishing", "The Arctic sea ice is vanishing", False),
    ("1_1_3_1", "1_1", "The Arctic sea ice is increasing", "The Arctic sea ice is decreasing", False),
    ("1_1_3_2", "1_1", "The Arctic is cooling", None, True),
    ("1_1_4_0", "1_1", "Glaciers are not vanishing", "Glaciers are vanishing", False),
    ("1_1_4_1", "1_1", "Glaciers are increasing", "Glaciers are decreasing", False),
    ("1_2_0_0", "1_2", "We are heading into an ice age", "We are not heading into an ice age", False),
    ("1_2_0_1", "1_2", "We are heading into a period of global cooling", "We are not heading into a period of global cooling", False),
    ("1_2_0_2", "1_2", "Global temperatures are cooling", None, True),
    ("1_3_0_0", "1_3", "The weather is cold therefore global warming is not happening", "The weather being cold is not proof that global warming is not happening", False),
    ("1_3_0_1", "1_3", "The weather is colder than in the past", "The weather is not colder than in the past", False),
    ("1_3_0_2", "1_3", "The weather is exceptionally cold therefore global warming is not happening", "The weather being exceptionally cold is proof that global warming is happening", False),
    ("1_3_0_3", "1_3", "It's snowing therefore global warming is not happening", "The fact that it's snowing is not proof that global warming is not happening", False),
    ("1_3_0_4", "1_3", "It's snowing more than in the past", "It's not snowing more than in the past", False),
    ("1_3_0_5", "1_3", "It's snowing an exceptional amount therefore global warming is not happening", "The fact that it's snowing an exceptional amount is proof that global warming is happening", False),
    ("1_3_0_6", "1_3", "It's snowing", None, True),
    ("1_3_0_7", "1_3", "The weather is cold", None, True),
    ("1_4_0_0", "1_4", "The climate has not warmed over the last few decades", "The climate has warmed over the last few decades", False),
    ("1_4_0_1", "1_4", "The climate has not changed over the last few decade", "The climate has changed over the last few decade", False),
    ("1_4_0_3", "1_4", "Global temperatures have not increased over the last few decades", None, True),
    ("1_4_0_4", "1_4", "Data does not show a rise in global temperatures", None, True),
    ("1_4_0_5", "1_4", "Temperature data from the last few decades contradicts global warming predictions", None, True),
    ("1_4_0_6", "1_4", "There has been a hiatus in global warming for the last few decades", None, True),
    ("1_6_0_0", "1_6", "The rise of sea level is exaggerated", "The rise of sea level is not exaggerated", False),
    ("1_6_0_1", "1_6", "The rise of sea level is not accelerating", "The rise of sea level is accelerating", False),
    ("1_6_0_2", "1_6", "Sea levels are not rising", "Sea levels are rising", False),
    ("1_6_0_3", "1_6", "The rise of sea level is normal", "The rise of sea level is not normal", False),
    ("1_6_0_4", "1_6", "Sea level rise is not related to climate change", "Sea level rise is related to climate change", False),
    ("1_6_0_5", "1_6", "Sea level rise is offset by other factors", None, True),
    ("1_7_0_0", "1_7", "Extreme weather is not increasing", "Extreme weather is increasing", False),
    ("1_7_0_1", "1_7", "Extreme weather has happened before", "Extreme weather has not happened before", False),
    ("1_7_0_2", "1_7", "Extreme weather is not linked to climate change", "Extreme weather is linked to climate change", False),
    ("1_7_0_3", "1_7", "Extreme weather has always existed", "Extreme weather has not always existed", False),
    ("1_7_0_4", "1_7", "The perceived increase in extreme weather is artificial", None, True),
    ("1_7_0_5", "1_7", "The perceived increase in extreme weather is due to improper metrics", None, True),
    ("1_7_0_6", "1_7", "The idea that extreme weather is increasing is wrong or unsupported", None, True),
    ("1_7_0_7", "1_7", "Extreme weather events are milder than in the past", None, True),
]


def climate_taxonomy(extended: bool) -> dict:
    claims = []
    for claim_id, class_id, text, negated, extra in CLIMATE_CLAIMS:
        if extra and not extended:
            continue
        entry = {
            "claim_id": claim_id,
            "text": text,
            "classes": [{"class_id": class_id, "polarity": "supports"}],
        }
        if negated:
            entry["negated_text"] = negated
        claims.append(entry)
    return {
        "taxonomy_id": "climate_contrarianism" + ("_extended" if extended else ""),
        "task_kind": "multi_label",
        "claims": claims,
        "classes": [
            {"class_id": cid, "label": label, "mode": "any_of"}
            for cid, label in CLIMATE_CLASSES
        ],
    }


# ---------------------------------------------------------------------------
# Tweet topics (multi-class) and stances (against/favor per topic)
# ---------------------------------------------------------------------------

TOPIC_CLASSES = [
    ("1", "Atheism"),
    ("2", "Climate change"),
    ("3", "Feminism"),
    ("4", "Hillary Clinton"),
    ("5", "Abortion"),
]

TOPIC_CLAIMS = {
    "1": [
        "This text is about atheism or religion",
        "This text is about atheism",
        "This text is about religion",
        "This text is about God",
        "This text is about the Bible",
    ],
    "2": [
        "This text is about climate change",
        "This text is about climate action",
        "This text is about global warming",
        "This text is about the climate movement",
        "This text is about the climate change scam",
    ],
    "3": [
        "This text is about feminism",
        "This text is about women's rights",
        "This text is about sexism",
        "This text is about women's privilege",
        "This text is about women's inferiority",
    ],
    "4": [
        "This text is about Hillary Clinton",
        "This text is about the Democratic presidential candidate",
        "This text is about the presidential election",
        "This text is about Bernie Sanders",
        "This text is about Donald Trump",
    ],
    "5": [
        "This text is about abortion",
        "This text is about reproductive rights",
        "This text is about murdering babies",
        "This text is about pregnancy",
        "This text is about foetus",
    ],
}


def topic_taxonomy() -> dict:
    claims = []
    for topic, texts in TOPIC_CLAIMS.items():
        for i, text in enumerate(texts):
            claims.append(
                {
                    "claim_id": f"{topic}_{i}",
                    "text": text,
                    "classes": [{"class_id": topic, "polarity": "supports"}],
                }
            )
    return {
        "taxonomy_id": "tweet_topics",
        "task_kind": "multi_class_topic",
        "claims": claims,
        "classes": [
            {"class_id": cid, "label": label, "mode": "any_of"}
            for cid, label in TOPIC_CLASSES
        ],
    }


STANCE_CLAIMS = {
    ("1", "against"): [
        "God exists",
        "We need religion",
        "We need God",
        "Jesus will save us",
        "Atheism is bad",
        "I believe in God",
        "I oppose atheism",
    ],
    ("1", "favor"): [
        "God does not exist",
        "Religion causes suffering",
        "Religion is a lie",
        "Atheism is the way to go",
        "I am an atheist",
        "I oppose religion",
    ],
    ("2", "against"): [
        "Climate change is not happening",
        "Humans are not causing climate change",
        "Climate change is not a problem",
        "Climate change is a hoax",
        "The climate movement is hypocritical",
        "I oppose the climate movement",
    ],
    ("2", "favor"): [
        "Climate change is happening",
        "Humans are causing climate change",
        "Climate change threatens our way of life",
        "Climate change is real",
        "The climate movement should be taken seriously",
        "I support the climate movement",
    ],
    ("3", "against"): [
        "Feminists have no humor",
        "Feminism is a threat to society",
        "Feminism is bullshit",
        "Feminism goes against the natural order of things",
        "Women have it easy",
        "I oppose feminism",
    ],
    ("3", "favor"): [
        "Women and men should be treated as equals",
        "Women have the same abilities as men",
        "We should fight for women's rights",
        "Men oppress women",
        "I am a feminist",
        "I support feminism",
    ],
    ("4", "against"): [
        "Hillary Clinton should not be president",
        "Hillary Clinton's policies are bad",
        "I oppose Hillary Clinton's candidacy",
        "I will not vote for Hillary Clinton",
    ],
    ("4", "favor"): [
        "Hillary Clinton would make a good president",
        "Hillary Clinton's policies are good",
        "I support Hillary Clinton's candidacy",
        "I will vote for Hillary Clinton",
    ],
    ("5", "against"): [
        "Abortion is child murder",
        "Abortion should be illegal",
        "Abortion is immoral",
        "Abortion is dangerous for women's health",
        "Abortion causes suffering",
        "Abortion clinics should be shut down",
        "I oppose abortion",
    ],
    ("5", "favor"): [
        "Abortion is not murder",
        "Access to abortion is a woman's right",
        "Access to abortion is important for women's health",
        "Women should have the option to get an abortion",
        "The right to abortion is good for society",
        "The right to abortion prevents suffering",
        "Restricting access to abortion amounts to restricting women's control over their own body",
        "I support the right to get an abortion",
    ],
}


def stance_taxonomy() -> dict:
    topic_labels = dict(TOPIC_CLASSES)
    claims, classes = [], []
    for (topic, stance), texts in STANCE_CLAIMS.items():
        class_id = f"{topic}{'A' if stance == 'against' else 'F'}"
        classes.append(
            {
                "class_id": class_id,
                "label": f"{topic_labels[topic]}, {'Against' if stance == 'against' else 'In favor'}",
                "mode": "any_of",
                "stance": stance,
                "topic": topic,
            }
        )
        for i, text in enumerate(texts, start=1):
            claims.append(
                {
                    "claim_id": f"{class_id}_{i}",
                    "text": text,
                    "classes": [{"class_id": class_id, "polarity": "supports"}],
                }
            )
    return {
        "taxonomy_id": "tweet_stances",
        "task_kind": "stance",
        "claims": claims,
        "classes": classes,
    }


# ---------------------------------------------------------------------------
# Depressive symptoms (multi-label over the BDI-II inventory statements)
# ---------------------------------------------------------------------------

BDI_SYMPTOMS = {
    ("1", "Sadness"): {
        "1": "I feel sad much of the time",
        "2": "I am sad all the time",
        "3": "I am so sad or unhappy that I can't stand it",
    },
    ("2", "Pessimism"): {
        "1": "I feel more discouraged about my future than I used to",
        "2": "I do not expect things to work out for me",
        "3": "I feel my future is hopeless and will only get worse",
    },
    ("3", "Past failures"): {
        "1": "I have failed more than I should have",
        "2": "As I look back, I see a lot of failures",
        "3": "I feel I am a total failure as a person",
    },
    ("4", "Loss of pleasure"): {
        "1": "I don't enjoy things as much as I used to",
        "2": "I get very little pleasure from the things I used to enjoy",
        "3": "I can't get any pleasure from the things I used to enjoy",
    },
    ("5", "Guilty feelings"): {
        "1": "I feel guilty over many things I have done or should have done",
        "2": "I feel quite guilty most of the time",
        "3": "I feel guilty all of the time",
    },
    ("6", "Punishment feelings"): {
        "1": "I feel I may be punished",
        "2": "I expect to be punished",
        "3": "I feel I am being punished",
    },
    ("7", "Self-dislike"): {
        "1": "I have lost confidence in myself",
        "2": "I am disappointed in myself",
        "3": "I dislike myself",
    },
    ("8", "Self-criticalness"): {
        "1": "I am more critical of myself than I used to be",
        "2": "I criticize myself for all of my faults",
        "3": "I blame myself for everything bad that happens",
    },
    ("9", "Suicidal ideation"): {
        "1": "I have thoughts of killing myself, but I would not carry them out",
        "2": "I would like to kill myself",
        "3": "I would kill myself if I had the chance",
    },
    ("10", "Crying"): {
        "1": "I cry more than I used to",
        "2": "I cry over every little thing",
        "3": "I feel like crying, but I can't",
    },
    ("11", "Agitation"): {
        "1": "I feel more restless or wound up than usual",
        "2": "I am so restless or agitated, it's hard to stay still",
        "3": "I am so restless or agitated that I have to keep moving or doing something",
    },
    ("12", "Loss of interest"): {
        "1": "I am less interested in other people or things than before",
        "2": "I have lost most of my interest in other people or things",
        "3": "It's hard to get interested in anything",
    },
    ("13", "Indecisiveness"): {
        "1": "I find it more difficult to make decisions than usual",
        "2": "I have much greater difficulty in making decisions than I used to",
        "3": "I have trouble making any decisions",
    },
    ("14", "Worthlessness"): {
        "1": "I don't consider myself as worthwhile and useful as I used to",
        "2": "I feel more worthless as compared to others",
        "3": "I feel utterly worthless",
    },
    ("15", "Loss of energy"): {
        "1": "I have less energy than I used to have",
        "2": "I don't have enough energy to do very much",
        "3": "I don't have enough energy to do anything",
    },
    ("16", "Changes in sleep pattern"): {
        "1a": "I sleep somewhat more than usual",
        "1b": "I sleep somewhat less than usual",
        "2a": "I sleep a lot more than usual",
        "2b": "I sleep a lot less than usual",
        "3a": "I sleep most of the day",
        "3b": "I wake up 1-2 hours early and can't get back to sleep",
    },
    ("17", "Irritability"): {
        "1": "I am more irritable than usual",
        "2": "I am much more irritable than usual",
        "3": "I am irritable all the time",
    },
    ("18", "Changes in appetite"): {
        "1a": "My appetite is somewhat less than usual",
        "1b": "My appetite is somewhat greater than usual",
        "2a": "My appetite is much less than before",
        "2b": "My appetite is much greater than usual",
        "3a": "I have no appetite at all",
        "3b": "I crave food all the time",
    },
    ("19", "Concentration difficulty"): {
        "1": "I can't concentrate as well as usual",
        "2": "It's hard to keep my mind on anything for very long",
        "3": "I find I can't concentrate on anything",
    },
    ("20", "Tiredness or fatigue"): {
        "1": "I get more tired or fatigued more easily than usual",
        "2": "I am too tired or fatigued to do a lot of the things I used to do",
        "3": "I am too tired or fatigued to do most of the things I used to do",
    },
    ("21", "Loss of interest in sex"): {
        "1": "I am less interested in sex than I used to be",
        "2": "I am much less interested in sex now",
        "3": "I have lost interest in sex completely",
    },
}


def bdi_taxonomy() -> dict:
    claims, classes = [], []
    for (class_id, label), leveled in BDI_SYMPTOMS.items():
        classes.append({"class_id": class_id, "label": label, "mode": "any_of"})
        for level, text in leveled.items():
            claims.append(
                {
                    "claim_id": f"{class_id}_{level}",
                    "text": text,
                    "classes": [{"class_id": class_id, "polarity": "supports"}],
                }
            )
    return {
        "taxonomy_id": "depressive_symptoms",
        "task_kind": "multi_label",
        "claims": claims,
        "classes": classes,
    }


# ---------------------------------------------------------------------------
# Synthetic separable corpus with planted thresholds
# ---------------------------------------------------------------------------

SYNTH_CLAIMS = [
    # (claim_id, class_id, planted threshold)
    ("frost_0", "frost", 0.62),
    ("frost_1", "frost", 0.45),
    ("flood_0", "flood", 0.71),
]


def synthetic_taxonomy() -> dict:
    return {
        "taxonomy_id": "synthetic_demo",
        "task_kind": "multi_label",
        "claims": [
            {
                "claim_id": cid,
                "text": f"synthetic claim {cid}",
                "negated_text": f"negated synthetic claim {cid}",
                "classes": [{"class_id": cls, "polarity": "supports"}],
            }
            for cid, cls, _ in SYNTH_CLAIMS
        ],
        "classes": [
            {"class_id": "frost", "label": "frost reports", "mode": "any_of"},
            {"class_id": "flood", "label": "flood reports", "mode": "any_of"},
        ],
    }


def synthetic_corpus(n_docs: int = 160, seed: int = 20240611):
    rng = np.random.default_rng(seed)
    class_ids = ["frost", "flood"]
    docs, cells = [], []
    for i in range(n_docs):
        doc_id = f"doc{i:04d}"
        gold = sorted(c for c in class_ids if rng.random() < 0.35)
        split = "train" if i % 2 == 0 else "test"
        docs.append(
            {
                "doc_id": doc_id,
                "text": f"synthetic document {i} mentioning {' and '.join(gold) or 'nothing'}",
                "gold_classes": gold,
                "split": split,
            }
        )
        for cid, cls, threshold in SYNTH_CLAIMS:
            positive = cls in gold
            margin = 0.02
            if positive:
                score = float(rng.uniform(threshold + margin, 1.0))
                neg_score = float(rng.uniform(0.0, 0.4))
            else:
                score = float(rng.uniform(0.0, threshold - margin))
                neg_score = float(rng.uniform(0.5, 1.0))
            cells.append({"doc_id": doc_id, "claim_id": cid, "score": round(score, 6)})
            cells.append(
                {"doc_id": doc_id, "claim_id": f"{cid}__neg", "score": round(neg_score, 6)}
            )
    header = {"format": "claimsect/v1", "score_kind": "entailment", "range": [0.0, 1.0]}
    return docs, [header] + cells


def main() -> None:
    tax_dir = OUT / "taxonomies"
    write_json(tax_dir / "climate.json", climate_taxonomy(extended=False))
    write_json(tax_dir / "climate_extended.json", climate_taxonomy(extended=True))
    write_json(tax_dir / "topic.json", topic_taxonomy())
    write_json(tax_dir / "stance.json", stance_taxonomy())
    write_json(tax_dir / "bdi.json", bdi_taxonomy())

    synth_dir = OUT / "synthetic"
    write_json(synth_dir / "taxonomy.json", synthetic_taxonomy())
    docs, score_lines = synthetic_corpus()
    write_jsonl(synth_dir / "dataset.jsonl", docs)
    write_jsonl(synth_dir / "scores.jsonl", score_lines)


if __name__ == "__main__":
    main()
