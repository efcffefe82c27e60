"""Snapshot pooling, weighting, and ensemble prediction.

A single anytime search run already produces a sequence of improving
hypotheses.  Instead of keeping only the last one, every candidate whose
cost is no larger than the best cost seen so far is admitted into a pool.
Pool members are then weighted by training coverage and description
length, and predictions are made by weighted vote with a 0.5 threshold.
"""

from __future__ import annotations

import enum
import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, List, Optional, Sequence, Tuple

from .costs import CostFunction, CostKey, cost_key, coverage, mdl_score
from .evaluator import Confusion, DEFAULT_MAX_ATOMS, least_model
from .learner import CandidateStream, TaskEvaluator, example_rows
from .logic import (
    Atom,
    DataError,
    Hypothesis,
    Program,
    ResourceLimitError,
    canonical_form,
)
from .parser import parse_hypothesis


@dataclass(frozen=True)
class Snapshot:
    """One admitted hypothesis with its training statistics.

    ``extension`` caches the target tuples derived during training so that
    prediction does not recompute models; it is excluded from equality.
    """

    hypothesis: Hypothesis
    cost: CostKey
    confusion: Confusion
    mdl: int
    coverage: float
    discovered_at: float
    extension: Optional[frozenset] = field(default=None, compare=False, repr=False)


class SnapshotPool:
    """Snapshots in admission order, plus the final best cost.

    The pool has set semantics over canonical hypothesis forms: re-admitting
    a hypothesis already present leaves the pool unchanged.
    """

    def __init__(self, snapshots: Sequence[Snapshot] = (),
                 best_cost: Optional[CostKey] = None,
                 candidates_seen: int = 0,
                 evaluation_errors: int = 0,
                 wall_time: float = 0.0,
                 exhausted: bool = True):
        self.snapshots: Tuple[Snapshot, ...] = tuple(snapshots)
        self.best_cost = best_cost
        self.candidates_seen = candidates_seen
        self.evaluation_errors = evaluation_errors
        self.wall_time = wall_time
        self.exhausted = exhausted

    def __len__(self) -> int:
        return len(self.snapshots)

    def __iter__(self) -> Iterator[Snapshot]:
        return iter(self.snapshots)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SnapshotPool):
            return NotImplemented
        return (self.snapshots == other.snapshots
                and self.best_cost == other.best_cost)

    def admitted_costs(self) -> list:
        return [s.cost for s in self.snapshots]


class PoolFilter(str, enum.Enum):
    FULL = "full"
    OPTIMAL_ONLY = "optimal"
    FINAL_ONLY = "final"

    def __str__(self) -> str:
        return self.value


def pool_admission(
    scored: Iterable[Snapshot],
    timeout: float,
    *,
    clock: Callable[[], float] = time.monotonic,
) -> SnapshotPool:
    """Admission loop over a stream of scored snapshots.

    While time remains, pull the next snapshot; admit it when its cost is
    no larger than the best cost seen so far, and tighten the best cost on
    strict improvement.  The clock is checked before each pull, so a
    non-positive timeout admits nothing.
    """
    start = clock()
    admitted: List[Snapshot] = []
    by_canon: dict = {}
    best: Optional[CostKey] = None
    it = iter(scored)
    exhausted = True
    while True:
        if clock() - start >= timeout:
            exhausted = False
            break
        try:
            snap = next(it)
        except StopIteration:
            break
        if best is None or snap.cost <= best:
            canon = canonical_form(snap.hypothesis)
            if canon not in by_canon:
                by_canon[canon] = snap
                admitted.append(snap)
        if best is None or snap.cost < best:
            best = snap.cost
    return SnapshotPool(admitted, best, exhausted=exhausted)


def collect_pool(
    stream: CandidateStream,
    background: Program,
    examples,
    cost_fn: CostFunction,
    timeout: float,
    *,
    evaluator: Optional[TaskEvaluator] = None,
    max_atoms: int = DEFAULT_MAX_ATOMS,
    clock: Callable[[], float] = time.monotonic,
) -> SnapshotPool:
    """Run the search stream for up to ``timeout`` seconds, pooling every
    candidate whose cost ties or improves the best seen so far."""
    if evaluator is None:
        evaluator = TaskEvaluator(background, stream.bias, max_atoms=max_atoms)
    pos_rows, neg_rows = example_rows(examples)
    start = clock()
    counters = {"seen": 0, "errors": 0}

    def scored() -> Iterator[Snapshot]:
        for hyp in stream:
            counters["seen"] += 1
            try:
                ext = evaluator.target_extension(hyp)
            except ResourceLimitError:
                counters["errors"] += 1
                continue
            conf = evaluator.confusion_rows(ext, pos_rows, neg_rows)
            yield Snapshot(
                hypothesis=hyp,
                cost=cost_key(cost_fn, conf, hyp.size),
                confusion=conf,
                mdl=mdl_score(conf, hyp.size),
                coverage=coverage(conf),
                discovered_at=clock() - start,
                extension=ext,
            )

    pool = pool_admission(scored(), timeout, clock=clock)
    if not pool.snapshots:
        raise DataError(
            "no snapshot collected: the stream yielded no scorable candidate "
            "within %.3fs (%d seen, %d failed evaluation)"
            % (timeout, counters["seen"], counters["errors"])
        )
    pool.candidates_seen = counters["seen"]
    pool.evaluation_errors = counters["errors"]
    pool.wall_time = clock() - start
    return pool


def filter_pool(pool: SnapshotPool, pool_filter: PoolFilter) -> SnapshotPool:
    """Restrict a pool: all members, only minimum-cost members, or only the
    earliest-discovered minimum-cost member (the plain search answer)."""
    if not pool.snapshots:
        raise DataError("cannot filter an empty snapshot pool")
    if pool_filter is PoolFilter.FULL:
        kept = pool.snapshots
    elif pool_filter is PoolFilter.OPTIMAL_ONLY:
        kept = tuple(s for s in pool.snapshots if s.cost == pool.best_cost)
    elif pool_filter is PoolFilter.FINAL_ONLY:
        for s in pool.snapshots:
            if s.cost == pool.best_cost:
                kept = (s,)
                break
    else:
        raise ValueError("unknown pool filter: %r" % (pool_filter,))
    return SnapshotPool(
        kept,
        pool.best_cost,
        candidates_seen=pool.candidates_seen,
        evaluation_errors=pool.evaluation_errors,
        wall_time=pool.wall_time,
        exhausted=pool.exhausted,
    )


def baseline_snapshot(pool: SnapshotPool) -> Snapshot:
    """The snapshot a plain single-answer search would have returned."""
    return filter_pool(pool, PoolFilter.FINAL_ONLY).snapshots[0]


@dataclass(frozen=True)
class WeightedEnsemble:
    pool: SnapshotPool
    weights: tuple
    alpha: float
    beta: float

    @property
    def snapshots(self) -> tuple:
        return self.pool.snapshots


def assign_weights(pool: SnapshotPool, alpha: float, beta: float) -> WeightedEnsemble:
    """Weight pool members by coverage^beta * exp(-alpha * mdl), normalized.

    Computed in log domain with a max shift so very large description
    lengths cannot underflow everything at once.  A member with zero
    coverage gets exactly zero weight.  If every raw weight is zero the
    weights fall back to uniform with a warning.
    """
    if not pool.snapshots:
        raise DataError("cannot weight an empty snapshot pool")
    if alpha < 0 or beta < 0:
        raise DataError("alpha and beta must be non-negative")
    logs = []
    for snap in pool.snapshots:
        if snap.coverage == 0.0:
            logs.append(-math.inf)
        else:
            logs.append(beta * math.log(snap.coverage) - alpha * snap.mdl)
    m = max(logs)
    if m == -math.inf:
        warnings.warn(
            "every snapshot has zero raw weight; falling back to uniform",
            RuntimeWarning,
        )
        n = len(pool.snapshots)
        return WeightedEnsemble(pool, (1.0 / n,) * n, alpha, beta)
    raws = [math.exp(lw - m) if lw != -math.inf else 0.0 for lw in logs]
    total = sum(raws)
    weights = tuple(r / total for r in raws)
    return WeightedEnsemble(pool, weights, alpha, beta)


def _member_extension(
    snap: Snapshot,
    background: Program,
    *,
    evaluator: Optional[TaskEvaluator] = None,
    max_atoms: int = DEFAULT_MAX_ATOMS,
) -> frozenset:
    if snap.extension is not None:
        return snap.extension
    if evaluator is not None:
        return evaluator.target_extension(snap.hypothesis)
    target = snap.hypothesis.target()
    model = least_model(background, snap.hypothesis, max_atoms=max_atoms)
    return model.extension(*target)


def ensemble_score(
    ensemble: WeightedEnsemble,
    background: Program,
    atom: Atom,
    *,
    evaluator: Optional[TaskEvaluator] = None,
) -> float:
    """Total weight of members entailing the atom."""
    row = tuple(t.name for t in atom.args)
    score = 0.0
    for snap, w in zip(ensemble.snapshots, ensemble.weights):
        if w == 0.0:
            continue
        if row in _member_extension(snap, background, evaluator=evaluator):
            score += w
    return score


def predict(
    ensemble: WeightedEnsemble,
    background: Program,
    atom: Atom,
    *,
    evaluator: Optional[TaskEvaluator] = None,
) -> int:
    """Predict 1 when the weighted vote reaches the 0.5 threshold."""
    return 1 if ensemble_score(ensemble, background, atom, evaluator=evaluator) >= 0.5 else 0


def predict_batch(
    ensemble: WeightedEnsemble,
    background: Program,
    atoms: Sequence[Atom],
    *,
    evaluator: Optional[TaskEvaluator] = None,
) -> list:
    """Predictions for a sequence of atoms, reusing member extensions."""
    exts = [
        _member_extension(s, background, evaluator=evaluator)
        for s in ensemble.snapshots
    ]
    out = []
    for atom in atoms:
        row = tuple(t.name for t in atom.args)
        score = 0.0
        for ext, w in zip(exts, ensemble.weights):
            if w and row in ext:
                score += w
        out.append(1 if score >= 0.5 else 0)
    return out


def coverage_cost_ratio(cov_min: float, cov_max: float, mdl_min: float,
                        mdl_max: float, alpha: float, beta: float) -> float:
    """Ratio of the coverage spread to the description-length spread in the
    weighting exponents: beta*ln(cov_max/cov_min) / (alpha*(mdl_max-mdl_min)).

    Values much above 1 mean the coverage term dominates the weights over
    the given ranges; values below 1 mean description length dominates.
    A zero mdl spread or zero alpha raises ZeroDivisionError.
    """
    if cov_min <= 0.0:
        raise DataError("coverage/cost ratio needs cov_min > 0")
    if cov_max < cov_min or mdl_max < mdl_min:
        raise DataError("coverage/cost ratio given an empty range")
    return beta * math.log(cov_max / cov_min) / (alpha * (mdl_max - mdl_min))


POOL_HEADER = "# snapshot pool v1"


def serialize_pool(pool: SnapshotPool) -> str:
    """Line-oriented text form: one snapshot per record.

    Fields are tab-separated: canonical hypothesis, cost function, cost
    values, confusion counts tp,tn,fp,fn, description length, and discovery
    time in seconds to three decimals.
    """
    lines = [POOL_HEADER]
    for s in pool.snapshots:
        lines.append(
            "\t".join(
                (
                    canonical_form(s.hypothesis),
                    s.cost.fn.value,
                    ",".join(str(v) for v in s.cost.values),
                    "%d,%d,%d,%d" % (s.confusion.tp, s.confusion.tn,
                                     s.confusion.fp, s.confusion.fn),
                    str(s.mdl),
                    "%.3f" % s.discovered_at,
                )
            )
        )
    return "\n".join(lines) + "\n"


def parse_pool(text: str) -> SnapshotPool:
    """Inverse of serialize_pool; extensions are left to be recomputed."""
    snapshots = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 6:
            raise DataError(
                "pool line %d has %d fields, expected 6" % (lineno, len(parts))
            )
        hyp_s, fn_s, values_s, conf_s, mdl_s, t_s = parts
        try:
            fn = CostFunction(fn_s)
        except ValueError:
            raise DataError("pool line %d: unknown cost function %r" % (lineno, fn_s))
        try:
            values = tuple(int(v) for v in values_s.split(","))
            tp, tn, fp, fn_count = (int(v) for v in conf_s.split(","))
            mdl = int(mdl_s)
            t = float(t_s)
        except ValueError as e:
            raise DataError("pool line %d is malformed: %s" % (lineno, e))
        hyp = parse_hypothesis(hyp_s)
        conf = Confusion(tp, tn, fp, fn_count)
        snapshots.append(
            Snapshot(
                hypothesis=hyp,
                cost=CostKey(fn, values),
                confusion=conf,
                mdl=mdl,
                coverage=coverage(conf),
                discovered_at=t,
            )
        )
    best = None
    for s in snapshots:
        if best is None or s.cost < best:
            best = s.cost
    return SnapshotPool(snapshots, best)
