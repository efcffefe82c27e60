"""Term/clause representation, canonical forms, and input validation."""

import random

import pytest

from snapilp.logic import (
    Atom,
    Bias,
    Clause,
    Const,
    DataError,
    EMPTY_HYPOTHESIS,
    ExampleSet,
    Program,
    Var,
    canonical_clause,
    canonical_form,
)
from snapilp.parser import parse_hypothesis, parse_program

from oracles import oracle_canon_clause, oracle_enumerate_clauses


def test_canonical_form_invariant_under_renaming():
    a = parse_hypothesis("gp(A,B) :- parent(A,C), parent(C,B).")
    b = parse_hypothesis("gp(X,Y) :- parent(X,Z), parent(Z,Y).")
    assert canonical_form(a) == canonical_form(b)
    assert a.size == b.size


def test_canonical_form_invariant_under_body_reordering():
    a = parse_hypothesis("gp(A,B) :- parent(A,C), parent(C,B).")
    b = parse_hypothesis("gp(A,B) :- parent(C,B), parent(A,C).")
    assert canonical_form(a) == canonical_form(b)


def test_canonical_form_invariant_under_clause_reordering():
    a = parse_hypothesis("p(X) :- q(X). p(X) :- r(X,Y).")
    b = parse_hypothesis("p(X) :- r(X,Y). p(X) :- q(X).")
    assert canonical_form(a) == canonical_form(b)
    assert a == b


def test_structurally_different_rules_have_different_strings():
    a = parse_hypothesis("gp(A,B) :- parent(A,C), parent(C,B).")
    b = parse_hypothesis("gp(A,B) :- parent(B,C), parent(C,A).")
    assert canonical_form(a) != canonical_form(b)


def test_no_canonical_collisions_over_a_tiny_clause_space():
    # every structurally distinct 1-clause hypothesis of a small bias gets
    # its own string; checked against an independently written canonicalizer
    bias = Bias(
        target=("gp", 2),
        body_preds=(("parent", 2),),
        max_clauses=1,
        max_body=2,
        max_vars=3,
    )
    oracle = oracle_enumerate_clauses(bias)
    package_strings = {canonical_clause(c) for _, c in oracle}
    assert len(package_strings) == len(oracle)
    # the two canonicalizers agree on which clauses are the same clause
    groups = {}
    for canon, clause in oracle:
        groups.setdefault(canonical_clause(clause), set()).add(canon)
    assert all(len(v) == 1 for v in groups.values())


def test_canonical_clause_agrees_with_oracle_on_random_renamings():
    rng = random.Random(7)
    base = parse_hypothesis("gp(A,B) :- parent(A,C), parent(C,B).").clauses[0]
    names = ["A", "B", "C", "X", "Y", "Z", "Foo", "Bar"]
    for _ in range(50):
        picked = rng.sample(names, 3)
        mapping = {Var("A"): Var(picked[0]), Var("B"): Var(picked[1]),
                   Var("C"): Var(picked[2])}

        def sub(atom):
            return Atom(atom.pred, tuple(mapping.get(t, t) for t in atom.args))

        body = list(base.body)
        rng.shuffle(body)
        renamed = Clause(sub(base.head), tuple(sub(b) for b in body))
        assert canonical_clause(renamed) == canonical_clause(base)
        assert oracle_canon_clause(renamed) == oracle_canon_clause(base)


def test_size_counts_atoms_of_the_canonical_form():
    cases = [
        "gp(A,B) :- parent(A,C), parent(C,B).",
        "p(X) :- q(X).",
        "p(X) :- q(X). p(X) :- r(X,Y), q(Y).",
    ]
    for text in cases:
        h = parse_hypothesis(text)
        # all predicates here take arguments, so atoms == open parens
        assert h.size == canonical_form(h).count("(")


def test_hypothesis_collapses_duplicate_clauses():
    h = parse_hypothesis("p(X) :- q(X). p(Y) :- q(Y).")
    assert len(h.clauses) == 1
    assert h.size == 2


def test_empty_hypothesis():
    assert EMPTY_HYPOTHESIS.is_empty()
    assert canonical_form(EMPTY_HYPOTHESIS) == ""
    assert EMPTY_HYPOTHESIS.size == 0
    with pytest.raises(DataError):
        EMPTY_HYPOTHESIS.target()


def test_hypothesis_target_and_recursion_probe():
    h = parse_hypothesis("path(A,B) :- edge(A,B). path(A,B) :- edge(A,C), path(C,B).")
    assert h.target() == ("path", 2)
    assert h.references_target_in_body()
    assert not parse_hypothesis("p(X) :- q(X).").references_target_in_body()


def test_program_from_clauses_dedupes_and_sorts():
    c1 = Clause(Atom("p", (Const("a"),)))
    c2 = Clause(Atom("p", (Const("a"),)))
    r = Clause(Atom("q", (Var("X"),)), (Atom("p", (Var("X"),)),))
    prog = Program.from_clauses([c1, r, c2])
    assert len(prog.facts) == 1
    assert len(prog.rules) == 1
    assert prog.predicates() == {("p", 1), ("q", 1)}
    assert prog.constants() == {"a"}


def test_example_set_rejects_contradictions():
    pos = [Atom("gp", (Const("a"), Const("c")))]
    with pytest.raises(DataError):
        ExampleSet.from_atoms(pos, pos)


def test_example_set_rejects_non_ground():
    with pytest.raises(DataError):
        ExampleSet.from_atoms([Atom("gp", (Var("X"), Const("c")))], [])


def test_example_set_target_rejects_mixed_predicates():
    exs = ExampleSet.from_atoms(
        [Atom("gp", (Const("a"), Const("c")))],
        [Atom("other", (Const("a"),))],
    )
    with pytest.raises(DataError):
        exs.target()


def test_bias_validation():
    with pytest.raises(DataError):
        Bias(target=("gp", 2), body_preds=(("parent", 2),),
             max_clauses=0, max_body=2, max_vars=3)
    with pytest.raises(DataError):
        Bias(target=("gp", 2), body_preds=(("parent", 2),),
             max_clauses=1, max_body=0, max_vars=3)
    with pytest.raises(DataError):
        Bias(target=("gp", 2), body_preds=(("parent", 2),),
             max_clauses=1, max_body=2, max_vars=1)
    with pytest.raises(DataError):
        Bias(target=("gp", 2), body_preds=(), max_clauses=1,
             max_body=2, max_vars=3)


def test_range_restriction_predicate():
    ok = parse_hypothesis("p(X) :- q(X,Y).").clauses[0]
    assert ok.is_range_restricted()
    bad = Clause(Atom("p", (Var("X"),)), (Atom("q", (Var("Y"),)),))
    assert not bad.is_range_restricted()


def _random_program_text(rng: random.Random) -> str:
    lines = []
    consts = ["c%d" % i for i in range(rng.randint(2, 6))]
    preds = [("p%d" % i, rng.randint(1, 2)) for i in range(rng.randint(2, 5))]
    for _ in range(rng.randint(1, 20)):
        name, arity = rng.choice(preds)
        args = ",".join(rng.choice(consts) for _ in range(arity))
        lines.append("%s(%s)." % (name, args))
    variables = ["X", "Y", "Z"]
    for _ in range(rng.randint(0, 4)):
        head_name, head_arity = rng.choice(preds)
        body = []
        body_vars = set()
        for _ in range(rng.randint(1, 3)):
            name, arity = rng.choice(preds)
            args = [rng.choice(variables) for _ in range(arity)]
            body_vars.update(args)
            body.append("%s(%s)" % (name, ",".join(args)))
        pool = sorted(body_vars) or consts
        head_args = ",".join(rng.choice(pool) for _ in range(head_arity))
        lines.append("%s(%s) :- %s." % (head_name, head_args, ",".join(body)))
    return "\n".join(lines) + "\n"


def _program_text(prog: Program) -> str:
    lines = [str(f) + "." for f in prog.facts]
    lines += [str(r) for r in prog.rules]
    return "\n".join(lines) + "\n"


def test_parse_print_parse_is_a_fixpoint_on_random_programs():
    rng = random.Random(20260815)
    for _ in range(120):
        prog = parse_program(_random_program_text(rng))
        printed = _program_text(prog)
        reparsed = parse_program(printed)
        assert reparsed == prog
        assert _program_text(reparsed) == printed
