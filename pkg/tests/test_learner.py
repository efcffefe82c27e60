"""Candidate enumeration order, search optimality, and resource handling."""

import dataclasses
import random

import pytest

from oracles import (
    naive_confusion,
    oracle_canon_clause,
    oracle_enumerate_clauses,
    oracle_enumerate_hypotheses,
)
from snapilp.costs import CostFunction
from snapilp.learner import (
    CandidateStream,
    TaskEvaluator,
    bias_max_size,
    enumerate_clauses,
    search,
)
from snapilp.logic import Bias, SnapilpError, canonical_form
from snapilp.parser import parse_examples, parse_hypothesis, parse_program

GENEROUS = 60.0


@pytest.fixture(scope="module")
def gp_space_counts(grandparent):
    """Confusion counts and size for every hypothesis in the space, by brute
    force, computed once and shared by the per-cost-function optimum checks."""
    bk, exs, bias = grandparent.background, grandparent.examples, grandparent.bias
    rows = []
    for hyp in oracle_enumerate_hypotheses(bias):
        tp, tn, fp, fn = naive_confusion(bk, hyp, exs)
        rows.append((tp, tn, fp, fn, hyp.size))
    return rows


def test_clause_pool_matches_reference_enumeration(grandparent):
    bias = grandparent.bias
    ours = enumerate_clauses(bias)
    reference = oracle_enumerate_clauses(bias)
    assert len(ours) == len(reference)
    assert {oracle_canon_clause(c) for c in ours} == {
        canon for canon, _ in reference
    }


def test_stream_covers_the_whole_space_exactly_once(grandparent):
    bias = grandparent.bias
    stream = CandidateStream(bias)
    drained = list(stream)
    again = list(stream)
    assert [canonical_form(h) for h in drained] == [
        canonical_form(h) for h in again
    ]
    reference = oracle_enumerate_hypotheses(bias)
    assert len(drained) == len(reference)
    assert {canonical_form(h) for h in drained} == {
        canonical_form(h) for h in reference
    }


def test_stream_contains_the_intended_rule(grandparent):
    bias = grandparent.bias
    want = canonical_form(
        parse_hypothesis("gp(X,Y) :- parent(X,Z), parent(Z,Y).")
    )
    assert want in {canonical_form(h) for h in CandidateStream(bias)}


def test_stream_visits_sizes_in_non_decreasing_order(grandparent):
    sizes = [h.size for h in CandidateStream(grandparent.bias)]
    assert sizes == sorted(sizes)
    assert sizes[0] == 2 and sizes[-1] == bias_max_size(grandparent.bias)


def test_tiny_bias_yields_only_minimal_candidates():
    bias = Bias(
        target=("q", 1), body_preds=(("r", 1),),
        max_clauses=1, max_body=1, max_vars=2,
    )
    drained = list(CandidateStream(bias))
    assert [h.size for h in drained] == [2]
    assert canonical_form(drained[0]) == canonical_form(
        parse_hypothesis("q(X) :- r(X).")
    )


def test_bias_max_size_formula(grandparent):
    assert bias_max_size(grandparent.bias) == 6
    bias = Bias(
        target=("q", 1), body_preds=(("r", 1),),
        max_clauses=3, max_body=2, max_vars=2,
    )
    assert bias_max_size(bias) == 9


def test_search_finds_reference_optimum_per_cost_function(
    grandparent, gp_space_counts
):
    bk, exs, bias = grandparent.background, grandparent.examples, grandparent.bias
    value_maps = {
        CostFunction.MDL: lambda tp, tn, fp, fn, size: (fp + fn + size,),
        CostFunction.ERROR_SIZE: lambda tp, tn, fp, fn, size: (fp + fn, size),
        CostFunction.LEX_FN_SIZE: lambda tp, tn, fp, fn, size: (fn, fp, size),
    }
    for fn, values_for in value_maps.items():
        outcome = search(bk, exs, bias, fn, GENEROUS)
        assert outcome.exhausted
        assert outcome.final_cost.values == min(
            values_for(*row) for row in gp_space_counts
        )
        assert outcome.evaluation_errors == 0


def test_search_error_size_optimum_is_the_two_hop_rule(grandparent):
    bk, exs, bias = grandparent.background, grandparent.examples, grandparent.bias
    outcome = search(bk, exs, bias, CostFunction.ERROR_SIZE, GENEROUS)
    assert outcome.final_cost.values == (0, 3)
    assert canonical_form(outcome.final_hypothesis) == canonical_form(
        parse_hypothesis("gp(X,Y) :- parent(X,Z), parent(Z,Y).")
    )
    assert outcome.confusion.errors == 0


def test_search_with_zero_timeout_still_scores_one_candidate(grandparent):
    bk, exs, bias = grandparent.background, grandparent.examples, grandparent.bias
    ev = TaskEvaluator(bk, bias)
    outcome = search(bk, exs, bias, CostFunction.MDL, 0.0, evaluator=ev)
    assert outcome.candidates_evaluated == 1
    assert not outcome.exhausted
    first = next(iter(CandidateStream(bias, evaluator=ev, prune=True)))
    assert canonical_form(outcome.final_hypothesis) == canonical_form(first)


def test_search_is_deterministic_apart_from_wall_time(grandparent):
    bk, exs, bias = grandparent.background, grandparent.examples, grandparent.bias
    a = search(bk, exs, bias, CostFunction.MDL, GENEROUS)
    b = search(bk, exs, bias, CostFunction.MDL, GENEROUS)
    fields = [
        f.name for f in dataclasses.fields(a) if f.name != "wall_time"
    ]
    assert [getattr(a, f) for f in fields] == [getattr(b, f) for f in fields]


def test_pruning_preserves_the_final_cost():
    bk = parse_program("edge(a,b). edge(b,c). edge(c,d).")
    exs = parse_examples("pos(conn(a,b)). pos(conn(b,c)). neg(conn(c,a)).")
    bias = Bias(
        target=("conn", 2),
        body_preds=(("edge", 2), ("mark", 1)),  # mark/1 never holds
        max_clauses=1, max_body=2, max_vars=3,
    )
    kept = search(bk, exs, bias, CostFunction.MDL, GENEROUS, prune=True)
    full = search(bk, exs, bias, CostFunction.MDL, GENEROUS, prune=False)
    assert kept.final_cost == full.final_cost
    assert kept.candidates_evaluated < full.candidates_evaluated

    ev = TaskEvaluator(bk, bias)
    pruned_pool = CandidateStream(bias, evaluator=ev, prune=True).clauses()
    assert all(
        lit.signature != ("mark", 1) for c in pruned_pool for lit in c.body
    )


def test_search_skips_candidates_over_the_atom_cap():
    facts = " ".join("p(c%d)." % i for i in range(60)) + " r(c0,c1)."
    bk = parse_program(facts)
    exs = parse_examples("pos(q(c0,c1)). neg(q(c1,c0)).")
    bias = Bias(
        target=("q", 2), body_preds=(("p", 1), ("r", 2)),
        max_clauses=1, max_body=2, max_vars=2,
    )
    outcome = search(
        bk, exs, bias, CostFunction.ERROR_SIZE, GENEROUS, max_atoms=1000
    )
    assert outcome.evaluation_errors >= 1
    assert outcome.final_cost.values == (0, 2)


def test_search_raises_when_every_candidate_is_uncomputable():
    facts = " ".join("p(c%d)." % i for i in range(60))
    bk = parse_program(facts)
    exs = parse_examples("pos(q(c0,c1)). neg(q(c1,c0)).")
    bias = Bias(
        target=("q", 2), body_preds=(("p", 1),),
        max_clauses=1, max_body=2, max_vars=2,
    )
    with pytest.raises(SnapilpError):
        search(bk, exs, bias, CostFunction.MDL, GENEROUS, max_atoms=1000)


def test_task_evaluator_counts_evaluations(grandparent):
    bk, bias = grandparent.background, grandparent.bias
    ev = TaskEvaluator(bk, bias)
    clauses = enumerate_clauses(bias)
    rng = random.Random(3)
    from snapilp.logic import Hypothesis

    before = ev.evaluations
    for _ in range(5):
        ev.target_extension(Hypothesis((rng.choice(clauses),)))
    assert ev.evaluations == before + 5
