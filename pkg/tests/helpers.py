"""Shared test fixtures: tiny taxonomies, score files, independent oracles."""

from __future__ import annotations

import json

import numpy as np

from claimsect import pba
from claimsect.scores import ScoreMatrix


def oracle_update(masses, grid, s_t, entails, p):
    """Independent reference for the posterior update, in plain Python.

    Likelihood-times-prior with per-side renormalization: the side the
    answer points at ends up with total p, the other with q, relative
    masses within each side preserved.  Grid points equal to s_t belong to
    the upper side.
    """
    q = 1.0 - p
    below = [i for i, g in enumerate(grid) if g < s_t]
    above = [i for i, g in enumerate(grid) if g >= s_t]
    m_below = sum(masses[i] for i in below)
    m_above = sum(masses[i] for i in above)
    new = [0.0] * len(masses)
    if entails:
        for i in below:
            new[i] = masses[i] * (p / m_below)
        for i in above:
            new[i] = masses[i] * (q / m_above) if m_above > 0 else 0.0
    else:
        for i in above:
            new[i] = masses[i] * (p / m_above)
        for i in below:
            new[i] = masses[i] * (q / m_below) if m_below > 0 else 0.0
    return new


def oracle_median(grid, masses):
    """Smallest grid value with cumulative mass >= 0.5, by linear scan."""
    acc = 0.0
    for g, m in zip(grid, masses):
        acc += m
        if acc >= 0.5:
            return g
    return grid[-1]


def oracle_ci_width(grid, masses, target):
    """Smallest interval holding >= target mass, by exhaustive search."""
    n = len(grid)
    best = grid[-1] - grid[0]
    for i in range(n):
        acc = 0.0
        for j in range(i, n):
            acc += masses[j]
            if acc >= target:
                best = min(best, grid[j] - grid[i])
                break
    return best


def random_state(rng, config, n_updates=4):
    """A reproducible non-uniform posterior reached through real updates."""
    state = pba.init(config)
    for _ in range(n_updates):
        s = float(rng.uniform(config.range_lo, config.range_hi))
        entails = bool(rng.random() < 0.5)
        idx = int(np.searchsorted(state.grid, s, side="left"))
        m_below = float(state.masses[:idx].sum())
        root = m_below if entails else 1.0 - m_below
        if root <= 0 or root > config.p:
            continue
        state = pba.update(state, s, entails)
        if state.status != pba.RUNNING:
            break
    return state


def make_column(scores, prefix="d"):
    return sorted(
        ((f"{prefix}{i}", float(s)) for i, s in enumerate(scores)),
        key=lambda t: (t[1], t[0]),
    )


MINIMAL_TAXONOMY = {
    "taxonomy_id": "minimal",
    "task_kind": "multi_label",
    "claims": [
        {
            "claim_id": "c1",
            "text": "the weather is cold",
            "classes": [{"class_id": "k1", "polarity": "supports"}],
        }
    ],
    "classes": [{"class_id": "k1", "label": "cold weather", "mode": "any_of"}],
}


def taxonomy_bytes(doc=None):
    return json.dumps(doc or MINIMAL_TAXONOMY).encode("utf-8")


def score_file(cells, score_kind="entailment", rng=(0.0, 1.0)):
    """cells: iterable of (doc_id, claim_id, score)."""
    lines = [json.dumps({"score_kind": score_kind, "range": list(rng)})]
    lines += [
        json.dumps({"doc_id": d, "claim_id": c, "score": s}) for d, c, s in cells
    ]
    return ("\n".join(lines) + "\n").encode("utf-8")


def matrix_from_dict(columns: dict[str, dict[str, float]], score_kind="entailment"):
    """columns: claim_id -> {doc_id: score}; docs unioned and sorted."""
    doc_ids = sorted({d for col in columns.values() for d in col})
    claim_ids = list(columns)
    values = np.array(
        [[columns[c][d] for c in claim_ids] for d in doc_ids], dtype=float
    )
    return ScoreMatrix(doc_ids, claim_ids, values, score_kind=score_kind)
