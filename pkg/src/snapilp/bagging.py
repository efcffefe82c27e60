"""Bootstrap-aggregated baseline: independent searches on resampled data.

Each bag draws K examples with replacement from the combined positive and
negative multiset (not stratified), trains a plain search on it, and the
resulting hypotheses vote uniformly.  Bags share nothing: every bag gets a
fresh evaluator, so total wall time grows linearly with the bag count.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .costs import CostFunction
from .evaluator import DEFAULT_MAX_ATOMS, least_model
from .learner import TaskEvaluator, search
from .logic import (
    Atom,
    Bias,
    DataError,
    ExampleSet,
    Program,
    SnapilpError,
)

DEFAULT_BAG_SEEDS = (43, 44, 45)


@dataclass(frozen=True)
class ExampleBag:
    """A multiset of labeled examples; duplicates carry multiplicities."""

    pos: tuple  # ((atom, count), ...) sorted by atom string
    neg: tuple

    @property
    def total(self) -> int:
        return sum(k for _, k in self.pos) + sum(k for _, k in self.neg)

    def iter_pos(self):
        return iter(self.pos)

    def iter_neg(self):
        return iter(self.neg)


def bootstrap_sample(examples: ExampleSet, seed: int) -> ExampleBag:
    """Draw len(examples) atoms with replacement from the combined pool.

    Uses the PCG64 generator so the same seed draws the same bag on any
    platform.  Polarities are not balanced: a bag mirrors whatever the
    draw produced.
    """
    pool = [(a, 1) for a in examples.pos] + [(a, 0) for a in examples.neg]
    if not pool:
        raise DataError("cannot bootstrap from an empty example set")
    rng = np.random.Generator(np.random.PCG64(seed))
    idx = rng.integers(0, len(pool), size=len(pool))
    pos_counts: Counter = Counter()
    neg_counts: Counter = Counter()
    for i in idx:
        atom, is_pos = pool[i]
        (pos_counts if is_pos else neg_counts)[atom] += 1
    pos = tuple(sorted(pos_counts.items(), key=lambda kv: str(kv[0])))
    neg = tuple(sorted(neg_counts.items(), key=lambda kv: str(kv[0])))
    return ExampleBag(pos, neg)


@dataclass(frozen=True)
class BagConfig:
    n_bags: int = 3
    seeds: tuple = DEFAULT_BAG_SEEDS
    per_bag_timeout: float = 600.0
    max_atoms: int = DEFAULT_MAX_ATOMS

    def __post_init__(self):
        if self.n_bags < 1:
            raise DataError("bagging needs at least one bag")
        if len(self.seeds) != self.n_bags:
            raise DataError(
                "got %d seeds for %d bags" % (len(self.seeds), self.n_bags)
            )


@dataclass
class BaggedEnsemble:
    """Uniform-vote ensemble of per-bag search answers."""

    hypotheses: tuple
    seeds: tuple
    cost_fn: CostFunction
    outcomes: tuple
    wall_time: float
    extensions: Optional[tuple] = None  # cached per-member target rows


def run_bagging(
    background: Program,
    examples: ExampleSet,
    bias: Bias,
    cost_fn: CostFunction,
    config: BagConfig = BagConfig(),
    *,
    clock=time.monotonic,
) -> BaggedEnsemble:
    """Train one search per bag and bundle the answers.

    Bags are deliberately independent: each gets its own evaluator and
    caches, as if the runs had been launched separately.
    """
    start = clock()
    hypotheses = []
    outcomes = []
    extensions = []
    for bag_index, seed in enumerate(config.seeds):
        bag = bootstrap_sample(examples, seed)
        evaluator = TaskEvaluator(background, bias, max_atoms=config.max_atoms)
        try:
            outcome = search(
                background,
                bag,
                bias,
                cost_fn,
                config.per_bag_timeout,
                evaluator=evaluator,
            )
        except SnapilpError as e:
            raise SnapilpError(
                "bag %d (seed %d) failed: %s" % (bag_index, seed, e)
            ) from e
        hypotheses.append(outcome.final_hypothesis)
        outcomes.append(outcome)
        extensions.append(evaluator.target_extension(outcome.final_hypothesis))
    return BaggedEnsemble(
        hypotheses=tuple(hypotheses),
        seeds=tuple(config.seeds),
        cost_fn=cost_fn,
        outcomes=tuple(outcomes),
        wall_time=clock() - start,
        extensions=tuple(extensions),
    )


def _bag_extensions(ens: BaggedEnsemble, background: Program) -> tuple:
    if ens.extensions is not None:
        return ens.extensions
    exts = []
    for hyp in ens.hypotheses:
        target = hyp.target()
        model = least_model(background, hyp)
        exts.append(model.extension(*target))
    return tuple(exts)


def predict_bagged_batch(
    ens: BaggedEnsemble, background: Program, atoms: Sequence[Atom]
) -> list:
    """Uniform vote: predict 1 when at least half the bags entail the atom."""
    exts = _bag_extensions(ens, background)
    n = len(exts)
    out = []
    for atom in atoms:
        row = tuple(t.name for t in atom.args)
        votes = sum(1 for ext in exts if row in ext)
        out.append(1 if votes / n >= 0.5 else 0)
    return out


def predict_bagged(ens: BaggedEnsemble, background: Program, atom: Atom) -> int:
    return predict_bagged_batch(ens, background, [atom])[0]
