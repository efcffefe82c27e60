"""Benchmark harness: splits, per-task runs, sweeps, and aggregation.

One run of one task trains a snapshot pool on the training split, weights
it, and scores the ensemble, the plain single-answer baseline, and the
bagging baseline on the test split.  Examples are split 7:2:1 per polarity
with largest-remainder rounding after a seeded shuffle, so trials vary by
split seed.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bagging import BagConfig, run_bagging, predict_bagged_batch
from .costs import CostFunction
from .ensemble import (
    PoolFilter,
    assign_weights,
    baseline_snapshot,
    collect_pool,
    filter_pool,
    predict_batch,
)
from .evaluator import DEFAULT_MAX_ATOMS
from .learner import CandidateStream, TaskEvaluator
from .logic import DataError, ExampleSet
from .parser import LoadedTask

DEFAULT_ALPHA = 0.0017
DEFAULT_BETA = 2.0
ALPHA_GRID = (0.0005, 0.001, 0.0013, 0.0017, 0.005, 0.03, 0.06)
SPLIT_RATIOS = (7, 2, 1)


def largest_remainder(n: int, ratios: Sequence[int] = SPLIT_RATIOS) -> tuple:
    """Apportion n into len(ratios) parts proportional to ratios.

    Floors are assigned first; leftover units go to the parts with the
    largest fractional remainders, earlier parts winning ties.
    """
    total = sum(ratios)
    quotas = [n * r / total for r in ratios]
    floors = [int(q) for q in quotas]
    leftover = n - sum(floors)
    order = sorted(
        range(len(ratios)),
        key=lambda i: (-(quotas[i] - floors[i]), i),
    )
    for i in order[:leftover]:
        floors[i] += 1
    return tuple(floors)


@dataclass(frozen=True)
class Split:
    train: ExampleSet
    valid: ExampleSet
    test: ExampleSet
    seed: int


def split_examples(examples: ExampleSet, seed: int) -> Split:
    """Stratified 7:2:1 split: each polarity is shuffled with PCG64(seed)
    and apportioned by largest remainder.  Every part must be non-empty
    for both polarities."""
    rng = np.random.Generator(np.random.PCG64(seed))

    def split_side(atoms: tuple) -> tuple:
        order = list(atoms)
        perm = rng.permutation(len(order))
        shuffled = [order[i] for i in perm]
        a, b, c = largest_remainder(len(order))
        return (
            shuffled[:a],
            shuffled[a:a + b],
            shuffled[a + b:],
        )

    pos_parts = split_side(examples.pos)
    neg_parts = split_side(examples.neg)
    for part_name, pp, np_ in zip(("train", "valid", "test"), pos_parts, neg_parts):
        if not pp or not np_:
            raise DataError(
                "too few examples: the %s split would lose a polarity "
                "(%d pos / %d neg)" % (part_name, len(pp), len(np_))
            )
    return Split(
        train=ExampleSet.from_atoms(pos_parts[0], neg_parts[0]),
        valid=ExampleSet.from_atoms(pos_parts[1], neg_parts[1]),
        test=ExampleSet.from_atoms(pos_parts[2], neg_parts[2]),
        seed=seed,
    )


def accuracy(predictions: Sequence[int], labels: Sequence[int]) -> float:
    if len(predictions) != len(labels):
        raise ValueError(
            "got %d predictions for %d labels" % (len(predictions), len(labels))
        )
    if not labels:
        raise ValueError("accuracy over an empty set is undefined")
    hits = sum(1 for p, y in zip(predictions, labels) if p == y)
    return hits / len(labels)


@dataclass(frozen=True)
class RunConfig:
    timeout: float = 10.0
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    pool_filter: PoolFilter = PoolFilter.FULL
    n_bags: int = 3
    bag_seeds: tuple = (43, 44, 45)
    max_atoms: int = DEFAULT_MAX_ATOMS
    stable_timing: bool = False


@dataclass
class PhaseTimings:
    phase1: float  # pool collection (search)
    phase2: float  # weighting
    phase3: float  # ensemble prediction
    bagging: float
    total: float = 0.0  # whole run, including splitting and scoring

    @property
    def snapshot_total(self) -> float:
        return self.phase1 + self.phase2 + self.phase3


@dataclass
class TaskResult:
    """Everything measured in one (task, cost function, seed) run."""

    task: str
    cost_fn: CostFunction
    seed: int
    acc_base: float
    acc_snap: float
    acc_bag: float
    acc_test_opt: float
    acc_test_worst: float
    overfit_gap: float
    snap_improvement: float
    overhead_pct: float
    pool_size: int
    candidates_seen: int
    timings: PhaseTimings = field(repr=False, default=None)
    work_units: tuple = field(repr=False, default=(0, 0, 0))

    def to_row(self) -> dict:
        return {
            "task": self.task,
            "cost_fn": self.cost_fn.value,
            "acc_base": self.acc_base,
            "acc_snap": self.acc_snap,
            "acc_bag": self.acc_bag,
            "acc_test_opt": self.acc_test_opt,
            "acc_test_worst": self.acc_test_worst,
            "overfit_gap": self.overfit_gap,
            "snap_improvement": self.snap_improvement,
            "overhead_pct": self.overhead_pct,
            "seed": self.seed,
        }


def _labels(examples: ExampleSet) -> tuple:
    atoms = list(examples.pos) + list(examples.neg)
    labels = [1] * len(examples.pos) + [0] * len(examples.neg)
    return atoms, labels


def run_task(
    task: LoadedTask,
    cost_fn: CostFunction,
    seed: int,
    config: RunConfig = RunConfig(),
) -> TaskResult:
    """One full run: snapshot pipeline, plain baseline, bagging baseline."""
    run_start = time.monotonic()
    split = split_examples(task.examples, seed)
    test_atoms, test_labels = _labels(split.test)

    evaluator = TaskEvaluator(task.background, task.bias, max_atoms=config.max_atoms)
    stream = CandidateStream(task.bias, evaluator=evaluator)

    t0 = time.monotonic()
    pool = collect_pool(
        stream,
        task.background,
        split.train,
        cost_fn,
        config.timeout,
        evaluator=evaluator,
    )
    t_phase1 = time.monotonic() - t0

    t0 = time.monotonic()
    working_pool = filter_pool(pool, config.pool_filter)
    ensemble = assign_weights(working_pool, config.alpha, config.beta)
    t_phase2 = time.monotonic() - t0

    t0 = time.monotonic()
    snap_preds = predict_batch(
        ensemble, task.background, test_atoms, evaluator=evaluator
    )
    t_phase3 = time.monotonic() - t0
    acc_snap = accuracy(snap_preds, test_labels)

    base_snap = baseline_snapshot(pool)
    base_rows = base_snap.extension
    base_preds = [
        1 if tuple(t.name for t in a.args) in base_rows else 0 for a in test_atoms
    ]
    acc_base = accuracy(base_preds, test_labels)

    member_accs = []
    for snap in pool.snapshots:
        rows = snap.extension
        preds = [
            1 if tuple(t.name for t in a.args) in rows else 0 for a in test_atoms
        ]
        member_accs.append(accuracy(preds, test_labels))
    acc_test_opt = max(member_accs)
    acc_test_worst = min(member_accs)

    bag_config = BagConfig(
        n_bags=config.n_bags,
        seeds=config.bag_seeds,
        per_bag_timeout=config.timeout,
        max_atoms=config.max_atoms,
    )
    bagged = run_bagging(
        task.background, split.train, task.bias, cost_fn, bag_config
    )
    bag_preds = predict_bagged_batch(bagged, task.background, test_atoms)
    acc_bag = accuracy(bag_preds, test_labels)

    timings = PhaseTimings(
        phase1=t_phase1,
        phase2=t_phase2,
        phase3=t_phase3,
        bagging=bagged.wall_time,
        total=time.monotonic() - run_start,
    )
    # deterministic work counters mirror the phase structure: candidates
    # evaluated, pool size, and member*atom prediction lookups
    work = (
        max(pool.candidates_seen, 1),
        len(pool),
        len(working_pool) * len(test_atoms),
    )
    if config.stable_timing:
        overhead_pct = 100.0 * (work[1] + work[2]) / work[0]
    else:
        overhead_pct = 100.0 * (t_phase2 + t_phase3) / max(t_phase1, 1e-9)

    return TaskResult(
        task=task.name,
        cost_fn=cost_fn,
        seed=seed,
        acc_base=acc_base,
        acc_snap=acc_snap,
        acc_bag=acc_bag,
        acc_test_opt=acc_test_opt,
        acc_test_worst=acc_test_worst,
        overfit_gap=acc_test_opt - acc_base,
        snap_improvement=acc_snap - acc_base,
        overhead_pct=overhead_pct,
        pool_size=len(pool),
        candidates_seen=pool.candidates_seen,
        timings=timings,
        work_units=work,
    )


def _run_row(args) -> TaskResult:
    task, cost_fn, seed, config = args
    return run_task(task, cost_fn, seed, config)


def bench(
    tasks: Sequence[LoadedTask],
    cost_fns: Sequence[CostFunction],
    seeds: Sequence[int],
    config: RunConfig = RunConfig(),
    jobs: int = 1,
) -> list:
    """Run every (task, cost function, seed) combination and sort results."""
    combos = [
        (task, fn, seed, config)
        for task in tasks
        for fn in cost_fns
        for seed in seeds
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_row, combos))
    else:
        results = [_run_row(c) for c in combos]
    results.sort(key=lambda r: (r.task, r.cost_fn.value, r.seed))
    return results


@dataclass
class SweepPoint:
    alpha: float
    mean_valid_acc: float
    n_runs: int


def sweep_alpha(
    tasks: Sequence[LoadedTask],
    cost_fns: Sequence[CostFunction],
    seeds: Sequence[int],
    config: RunConfig = RunConfig(),
    alphas: Sequence[float] = ALPHA_GRID,
) -> list:
    """Validation-accuracy sweep over the weighting strength alpha.

    Pools do not depend on alpha, so each (task, cost, seed) pool is
    collected once and re-weighted per grid point; accuracy is measured on
    the validation split and averaged across runs.
    """
    per_alpha = {a: [] for a in alphas}
    for task in tasks:
        for fn in cost_fns:
            for seed in seeds:
                split = split_examples(task.examples, seed)
                valid_atoms, valid_labels = _labels(split.valid)
                evaluator = TaskEvaluator(
                    task.background, task.bias, max_atoms=config.max_atoms
                )
                stream = CandidateStream(task.bias, evaluator=evaluator)
                pool = collect_pool(
                    stream,
                    task.background,
                    split.train,
                    fn,
                    config.timeout,
                    evaluator=evaluator,
                )
                working = filter_pool(pool, config.pool_filter)
                for a in alphas:
                    ens = assign_weights(working, a, config.beta)
                    preds = predict_batch(
                        ens, task.background, valid_atoms, evaluator=evaluator
                    )
                    per_alpha[a].append(accuracy(preds, valid_labels))
    out = []
    for a in alphas:
        accs = per_alpha[a]
        out.append(
            SweepPoint(alpha=a, mean_valid_acc=sum(accs) / len(accs), n_runs=len(accs))
        )
    return out
