"""Probabilistic bisection over a discretized threshold posterior.

The engine keeps a probability mass function over candidate threshold
locations on a fixed grid.  Each round it proposes the unannotated datapoint
whose score lies nearest the posterior median, asks a yes/no question about
it, and reweights the two sides of the queried score: the side the answer
points to ends up holding total mass ``p`` (the assumed annotator
correctness), the other side ``q = 1 - p``, with relative masses inside each
side preserved.  At the median this is the classic 2p/2q bisection update.

A side can only be *raised* to ``p`` if it currently holds less than ``p``;
a candidate score is therefore only proposable while the mass strictly below
it stays within ``[q, p]``.  When no unannotated datapoint satisfies that
band the session ends as an early stop (data sparsity).  The other terminal
states are ``complete`` (the smallest credible interval is narrow enough)
and ``capped`` (annotation budget exhausted).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

RUNNING = "running"
COMPLETE = "complete"
EARLY_STOP = "early_stop"
CAPPED = "capped"

TERMINAL_STATUSES = frozenset({COMPLETE, EARLY_STOP, CAPPED})

# A score column is an ascending list of (doc_id, score), ties by doc_id.
Column = Sequence[tuple[str, float]]
Annotator = Callable[[str, float], bool]


class SessionAbort(RuntimeError):
    """Annotator gave up mid-session; carries the partial annotation log."""

    def __init__(self, log: list["LogEntry"], cause: BaseException | str):
        super().__init__(f"annotation session aborted: {cause}")
        self.log = log
        self.cause = cause


@dataclass(frozen=True)
class BisectionConfig:
    """Hyperparameters of one threshold-tuning session.

    ``p`` is the probability that an answer points to the correct side of
    the threshold; it must exceed 0.5 for answers to carry information.
    ``completion_ci_mass`` / ``completion_ci_width`` define the completion
    criterion: the session is complete once the smallest interval holding
    ``completion_ci_mass`` of the posterior is at most ``completion_ci_width``
    wide.
    """

    p: float
    grid_size: int = 1001
    completion_ci_mass: float = 0.95
    completion_ci_width: float = 0.20
    max_annotations: int | None = None
    range_lo: float = 0.0
    range_hi: float = 1.0

    def __post_init__(self) -> None:
        if not 0.5 < self.p < 1.0:
            raise ValueError(f"p must lie strictly between 0.5 and 1, got {self.p}")
        if self.grid_size < 3:
            raise ValueError(f"grid_size must be at least 3, got {self.grid_size}")
        if self.range_hi <= self.range_lo:
            raise ValueError(
                f"score range is empty: [{self.range_lo}, {self.range_hi}]"
            )
        if not 0.0 < self.completion_ci_mass < 1.0:
            raise ValueError(
                f"completion_ci_mass must lie in (0, 1), got {self.completion_ci_mass}"
            )
        span = self.range_hi - self.range_lo
        if not 0.0 < self.completion_ci_width <= span:
            raise ValueError(
                f"completion_ci_width must lie in (0, {span}], "
                f"got {self.completion_ci_width}"
            )
        if self.max_annotations is not None and self.max_annotations < 1:
            raise ValueError(
                f"max_annotations must be positive, got {self.max_annotations}"
            )

    @property
    def q(self) -> float:
        return 1.0 - self.p


@dataclass(frozen=True)
class BisectionState:
    """Immutable snapshot of a session; ``update`` returns a new state."""

    config: BisectionConfig
    grid: np.ndarray          # grid_size candidate threshold locations
    masses: np.ndarray        # posterior mass per grid point, sums to 1
    median: float
    ci_width: float
    annotations_used: int
    status: str
    annotated_docs: frozenset[str] = field(default_factory=frozenset)


@dataclass(frozen=True)
class Proposal:
    doc_id: str
    score: float


@dataclass(frozen=True)
class LogEntry:
    """One annotation round; median/ci_width are the post-update values."""

    step: int
    doc_id: str
    s_t: float
    entails: bool
    median: float
    ci_width: float


@dataclass(frozen=True)
class ThresholdReport:
    claim_id: str | None
    threshold: float
    ci_width: float
    annotations: int
    status: str


def init(config: BisectionConfig) -> BisectionState:
    """Start a session with a uniform posterior over the score range."""
    grid = np.linspace(config.range_lo, config.range_hi, config.grid_size)
    masses = np.full(config.grid_size, 1.0 / config.grid_size)
    return BisectionState(
        config=config,
        grid=grid,
        masses=masses,
        median=_median(grid, masses),
        ci_width=_ci_width(grid, masses, config.completion_ci_mass),
        annotations_used=0,
        status=RUNNING,
    )


def _median(grid: np.ndarray, masses: np.ndarray) -> float:
    """Smallest grid value m with F(m) >= 0.5."""
    cdf = np.cumsum(masses)
    idx = int(np.searchsorted(cdf, 0.5, side="left"))
    return float(grid[min(idx, len(grid) - 1)])


def _ci_width(grid: np.ndarray, masses: np.ndarray, mass: float) -> float:
    """Width of the smallest grid interval holding at least ``mass``."""
    cdf = np.cumsum(masses)
    n = len(grid)
    best = float(grid[-1] - grid[0])
    i = 0
    for j in range(n):
        # advance i while the window [i, j] still holds enough mass without i
        while i < j:
            without_i = cdf[j] - cdf[i]
            if without_i >= mass:
                i += 1
            else:
                break
        window = cdf[j] - (cdf[i - 1] if i > 0 else 0.0)
        if window >= mass:
            best = min(best, float(grid[j] - grid[i]))
    return best


def mass_below(state: BisectionState, score: float) -> float:
    """Posterior mass strictly below ``score`` (grid point at the score
    counts as the upper side)."""
    idx = int(np.searchsorted(state.grid, score, side="left"))
    return float(state.masses[:idx].sum())


def propose_next(state: BisectionState, column: Column) -> Proposal | None:
    """Pick the next datapoint to annotate, or signal a stop with None.

    Candidates are unannotated datapoints whose below-mass M lies in
    [q, p] — outside that band one of the two possible answers would ask a
    side already holding more than ``p`` to be raised to ``p``, which the
    update cannot honor.  Among viable candidates the one nearest the
    median wins; ties break toward the smaller score, then doc_id.
    """
    if state.status != RUNNING:
        raise ValueError(f"cannot propose on a {state.status} session")
    pending = [(d, s) for d, s in column if d not in state.annotated_docs]
    if not pending:
        return None
    scores = np.array([s for _, s in pending])
    prefix = np.concatenate(([0.0], np.cumsum(state.masses)))
    below = prefix[np.searchsorted(state.grid, scores, side="left")]
    p, q = state.config.p, state.config.q
    viable = (below >= q) & (below <= p)
    if not viable.any():
        return None
    best = min(
        (
            (abs(s - state.median), s, d)
            for (d, s), ok in zip(pending, viable)
            if ok
        ),
    )
    return Proposal(doc_id=best[2], score=best[1])


def mark_early_stop(state: BisectionState) -> BisectionState:
    if state.status != RUNNING:
        return state
    return replace(state, status=EARLY_STOP)


def update(
    state: BisectionState,
    s_t: float,
    entails: bool,
    doc_id: str | None = None,
) -> BisectionState:
    """Apply one answer at score ``s_t`` and return the new state.

    An ``entails`` answer says the threshold lies below ``s_t``: the lower
    side is renormalized to total ``p``, the upper side to ``q``.  A
    not-entails answer does the mirror image.  If the side the answer points
    to already holds more than ``p`` (so honoring the answer would *shrink*
    it), the update is rejected and the state transitions to early_stop
    with the posterior untouched.
    """
    if state.status != RUNNING:
        raise ValueError(f"cannot update a {state.status} session")
    cfg = state.config
    if not cfg.range_lo <= s_t <= cfg.range_hi:
        raise ValueError(
            f"score {s_t} outside declared range [{cfg.range_lo}, {cfg.range_hi}]"
        )
    idx = int(np.searchsorted(state.grid, s_t, side="left"))
    m_below = float(state.masses[:idx].sum())
    m_above = float(state.masses[idx:].sum())
    root_side = m_below if entails else m_above
    if root_side <= 0.0 or root_side > cfg.p:
        return replace(state, status=EARLY_STOP)

    masses = state.masses.copy()
    if entails:
        masses[:idx] *= cfg.p / m_below
        if m_above > 0.0:
            masses[idx:] *= cfg.q / m_above
    else:
        masses[idx:] *= cfg.p / m_above
        if m_below > 0.0:
            masses[:idx] *= cfg.q / m_below

    median = _median(state.grid, masses)
    ci = _ci_width(state.grid, masses, cfg.completion_ci_mass)
    used = state.annotations_used + 1
    status = RUNNING
    if ci <= cfg.completion_ci_width:
        status = COMPLETE
    elif cfg.max_annotations is not None and used >= cfg.max_annotations:
        status = CAPPED
    annotated = state.annotated_docs
    if doc_id is not None:
        annotated = annotated | {doc_id}
    return replace(
        state,
        masses=masses,
        median=median,
        ci_width=ci,
        annotations_used=used,
        status=status,
        annotated_docs=annotated,
    )


def finalize(state: BisectionState, claim_id: str | None = None) -> ThresholdReport:
    """Turn a finished session into its threshold report."""
    if state.status == RUNNING:
        raise ValueError("cannot finalize a running session")
    return ThresholdReport(
        claim_id=claim_id,
        threshold=state.median,
        ci_width=state.ci_width,
        annotations=state.annotations_used,
        status=state.status,
    )


def run_session(
    config: BisectionConfig,
    column: Column,
    annotator: Annotator,
    claim_id: str | None = None,
) -> tuple[ThresholdReport, list[LogEntry]]:
    """Drive propose/answer/update until the session reaches a terminal
    state.  Replaying the returned log through ``update`` reproduces the
    final posterior bit for bit."""
    state = init(config)
    log: list[LogEntry] = []
    while state.status == RUNNING:
        proposal = propose_next(state, column)
        if proposal is None:
            state = mark_early_stop(state)
            break
        try:
            entails = annotator(proposal.doc_id, proposal.score)
        except Exception as exc:
            raise SessionAbort(log, exc) from exc
        state = update(state, proposal.score, entails, doc_id=proposal.doc_id)
        if state.annotations_used == len(log) + 1:
            log.append(
                LogEntry(
                    step=len(log) + 1,
                    doc_id=proposal.doc_id,
                    s_t=proposal.score,
                    entails=entails,
                    median=state.median,
                    ci_width=state.ci_width,
                )
            )
    return finalize(state, claim_id=claim_id), log


def replay(
    config: BisectionConfig,
    entries: Sequence[LogEntry],
) -> BisectionState:
    """Rebuild a session state from its annotation log."""
    state = init(config)
    for entry in entries:
        if state.status != RUNNING:
            raise ValueError(
                f"log continues past terminal status {state.status} at step {entry.step}"
            )
        state = update(state, entry.s_t, entry.entails, doc_id=entry.doc_id)
    return state


def posterior_summary(state: BisectionState, max_points: int = 101) -> dict:
    """Downsampled posterior for UI payloads: grid values plus binned mass."""
    n = len(state.grid)
    if n <= max_points:
        xs, ms = state.grid, state.masses
    else:
        edges = np.linspace(0, n, max_points + 1).astype(int)
        ms = np.add.reduceat(state.masses, edges[:-1])
        centers = (edges[:-1] + np.minimum(edges[1:], n) - 1) // 2
        xs = state.grid[centers]
    return {
        "x": [float(v) for v in xs],
        "mass": [float(v) for v in ms],
        "median": state.median,
        "ci_width": state.ci_width,
    }
