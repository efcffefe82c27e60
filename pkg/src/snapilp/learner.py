"""Hypothesis enumeration and anytime best-first cost search.

The candidate space is every non-empty set of at most max_clauses distinct
clauses drawn from the bias-bounded clause pool, visited in non-decreasing
hypothesis size with ties broken by canonical string order.  The stream is
deterministic: iterating it twice visits the same hypotheses in the same
order.

For spaces without recursion the evaluator memoizes each clause's derived
target tuples against the background model, so a multi-clause hypothesis
is evaluated by a set union instead of a fixpoint computation.
"""

from __future__ import annotations

import functools
import itertools
import time
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .costs import CostFunction, CostKey, cost_key
from .evaluator import (
    Confusion,
    DEFAULT_MAX_ATOMS,
    Model,
    least_model,
)
from .logic import (
    Atom,
    Bias,
    Clause,
    Hypothesis,
    Program,
    ResourceLimitError,
    SnapilpError,
    Var,
    canonical_clause,
    clause_sort_key,
)


@functools.lru_cache(maxsize=32)
def enumerate_clauses(bias: Bias) -> tuple:
    """All candidate clauses permitted by the bias, canonically deduplicated
    and sorted by (size, canonical string)."""
    target_name, target_arity = bias.target
    variables = [Var("V%d" % i) for i in range(bias.max_vars)]
    head = Atom(target_name, tuple(variables[:target_arity]))

    preds = list(bias.body_preds)
    if bias.allow_recursion:
        preds.append(bias.target)
    pool = []
    for name, arity in preds:
        for args in itertools.product(variables, repeat=arity):
            pool.append(Atom(name, args))

    head_vars = set(head.variables())
    seen = {}
    for k in range(1, bias.max_body + 1):
        for body in itertools.combinations(pool, k):
            body_vars = set()
            for lit in body:
                body_vars.update(lit.variables())
            if not head_vars <= body_vars:
                continue
            clause = Clause(head, body)
            canon = canonical_clause(clause)
            if canon not in seen:
                seen[canon] = clause
    return tuple(sorted(seen.values(), key=clause_sort_key))


class TaskEvaluator:
    """Evaluates hypotheses against one background program.

    The background model is computed once and reused as the seed for every
    candidate.  Per-clause target extensions are cached, which is sound
    whenever neither the hypothesis nor the background rules mention the
    target predicate in a rule body.
    """

    def __init__(self, background: Program, bias: Bias, *,
                 max_atoms: int = DEFAULT_MAX_ATOMS):
        self.background = background
        self.bias = bias
        self.max_atoms = max_atoms
        self.evaluations = 0
        self._base: Optional[Model] = None
        self._clause_ext: dict = {}
        self._bk_mentions_target = any(
            lit.signature == bias.target
            for rule in background.rules
            for lit in rule.body
        )

    @property
    def base(self) -> Model:
        if self._base is None:
            self._base = least_model(self.background, max_atoms=self.max_atoms)
        return self._base

    def _clause_extension(self, clause: Clause) -> frozenset:
        ext = self._clause_ext.get(clause)
        if ext is None:
            model = least_model(
                self.background,
                Hypothesis((clause,)),
                base=self.base,
                max_atoms=self.max_atoms,
            )
            ext = model.extension(*self.bias.target)
            self._clause_ext[clause] = ext
        return ext

    def target_extension(self, hyp: Hypothesis) -> frozenset:
        """Rows of the target predicate in the least model of B plus hyp."""
        self.evaluations += 1
        if hyp.is_empty():
            return self.base.extension(*self.bias.target)
        if self._bk_mentions_target or hyp.references_target_in_body():
            model = least_model(
                self.background, hyp, base=self.base, max_atoms=self.max_atoms
            )
            return model.extension(*self.bias.target)
        rows = set(self.base.extension(*self.bias.target))
        for clause in hyp.clauses:
            rows |= self._clause_extension(clause)
        return frozenset(rows)

    def confusion_rows(self, extension: frozenset,
                       pos_rows: Sequence, neg_rows: Sequence) -> Confusion:
        """Confusion from precomputed (row, multiplicity) example lists."""
        tp = tn = fp = fn = 0
        for row, k in pos_rows:
            if row in extension:
                tp += k
            else:
                fn += k
        for row, k in neg_rows:
            if row in extension:
                fp += k
            else:
                tn += k
        return Confusion(tp, tn, fp, fn)

    def confusion_for(self, hyp: Hypothesis, examples) -> Confusion:
        ext = self.target_extension(hyp)
        pos = [(tuple(t.name for t in a.args), k) for a, k in examples.iter_pos()]
        neg = [(tuple(t.name for t in a.args), k) for a, k in examples.iter_neg()]
        return self.confusion_rows(ext, pos, neg)


def example_rows(examples) -> tuple:
    """Convert an example container to ((row, mult), ...) lists for counting."""
    pos = tuple((tuple(t.name for t in a.args), k) for a, k in examples.iter_pos())
    neg = tuple((tuple(t.name for t in a.args), k) for a, k in examples.iter_neg())
    return pos, neg


class CandidateStream:
    """Deterministic, restartable enumeration of candidate hypotheses.

    With pruning enabled (the default) any clause whose body cannot be
    satisfied in the background model is dropped, since it derives nothing;
    note this also drops the degenerate candidates that are equivalent to
    the empty hypothesis.
    """

    def __init__(self, bias: Bias, *, evaluator: Optional[TaskEvaluator] = None,
                 prune: bool = True):
        self.bias = bias
        self.evaluator = evaluator
        self.prune = prune and evaluator is not None
        self._clauses: Optional[tuple] = None

    def clauses(self) -> tuple:
        if self._clauses is None:
            clauses = enumerate_clauses(self.bias)
            if self.prune:
                base = self.evaluator.base
                target = self.bias.target
                live = []
                for c in clauses:
                    dead = any(
                        lit.signature != target
                        and not base.extension(*lit.signature)
                        for lit in c.body
                    )
                    if not dead:
                        live.append(c)
                clauses = tuple(live)
            self._clauses = clauses
        return self._clauses

    def __iter__(self) -> Iterator[Hypothesis]:
        clauses = self.clauses()
        n = len(clauses)
        if n == 0:
            return
        sizes = [c.size for c in clauses]
        canons = [canonical_clause(c) for c in clauses]
        max_total = bias_max_size(self.bias)
        min_total = min(sizes)
        for total in range(min_total, max_total + 1):
            bucket = []

            def extend(start: int, left: int, slots: int, acc: tuple):
                for j in range(start, n):
                    s = sizes[j]
                    if s > left:
                        break  # sizes are non-decreasing along the list
                    if s == left:
                        bucket.append(acc + (j,))
                    elif slots > 1:
                        extend(j + 1, left - s, slots - 1, acc + (j,))

            extend(0, total, self.bias.max_clauses, ())
            bucket.sort(key=lambda combo: " ".join(canons[j] for j in combo))
            for combo in bucket:
                yield Hypothesis(tuple(clauses[j] for j in combo))


def bias_max_size(bias: Bias) -> int:
    return bias.max_clauses * (1 + bias.max_body)


@dataclass
class SearchOutcome:
    """Result of an anytime search run."""

    final_hypothesis: Hypothesis
    final_cost: CostKey
    confusion: Confusion
    candidates_evaluated: int
    evaluation_errors: int
    wall_time: float
    exhausted: bool


def search(
    background: Program,
    examples,
    bias: Bias,
    cost_fn: CostFunction,
    timeout: float,
    *,
    evaluator: Optional[TaskEvaluator] = None,
    prune: bool = True,
    max_atoms: int = DEFAULT_MAX_ATOMS,
    clock=time.monotonic,
) -> SearchOutcome:
    """Exhaust the candidate space (or run out of time) and return the
    lowest-cost hypothesis seen, first-discovered winning ties.

    At least one candidate is always evaluated, however small the timeout,
    so the outcome is never empty on a non-empty space.  A candidate whose
    evaluation trips the resource cap is recorded and skipped.
    """
    if evaluator is None:
        evaluator = TaskEvaluator(background, bias, max_atoms=max_atoms)
    stream = CandidateStream(bias, evaluator=evaluator, prune=prune)
    pos_rows, neg_rows = example_rows(examples)

    start = clock()
    best_key: Optional[CostKey] = None
    best_hyp: Optional[Hypothesis] = None
    best_conf: Optional[Confusion] = None
    seen = 0
    errors = 0
    exhausted = True
    for hyp in stream:
        if seen > 0 and clock() - start >= timeout:
            exhausted = False
            break
        seen += 1
        try:
            ext = evaluator.target_extension(hyp)
        except ResourceLimitError:
            errors += 1
            continue
        conf = evaluator.confusion_rows(ext, pos_rows, neg_rows)
        key = cost_key(cost_fn, conf, hyp.size)
        if best_key is None or key < best_key:
            best_key, best_hyp, best_conf = key, hyp, conf
    if best_hyp is None:
        raise SnapilpError(
            "search evaluated no candidate successfully "
            "(empty space or every evaluation hit the resource cap)"
        )
    return SearchOutcome(
        final_hypothesis=best_hyp,
        final_cost=best_key,
        confusion=best_conf,
        candidates_evaluated=seen,
        evaluation_errors=errors,
        wall_time=clock() - start,
        exhausted=exhausted,
    )
