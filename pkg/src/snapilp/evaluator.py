"""Bottom-up evaluation of Datalog programs.

The least Herbrand model is computed by semi-naive iteration: each round
only joins rule bodies against atoms derived in the previous round, with a
first-argument index on every relation.  A configurable cap on the total
number of derived atoms guards against runaway joins.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .logic import (
    Atom,
    Clause,
    Const,
    Hypothesis,
    Program,
    ResourceLimitError,
    Var,
    EMPTY_HYPOTHESIS,
)

DEFAULT_MAX_ATOMS = 10_000_000


class Model:
    """An immutable set of ground atoms grouped by predicate signature."""

    __slots__ = ("relations", "_count")

    def __init__(self, relations: dict):
        self.relations = {sig: frozenset(rows) for sig, rows in relations.items()}
        self._count = sum(len(r) for r in self.relations.values())

    @property
    def atom_count(self) -> int:
        return self._count

    def extension(self, pred: str, arity: int) -> frozenset:
        return self.relations.get((pred, arity), frozenset())

    def contains(self, atom: Atom) -> bool:
        rows = self.relations.get(atom.signature)
        if not rows:
            return False
        return tuple(t.name for t in atom.args) in rows

    def atoms(self) -> Iterator[Atom]:
        for sig in sorted(self.relations):
            pred, _ = sig
            for row in sorted(self.relations[sig]):
                yield Atom(pred, tuple(Const(c) for c in row))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Model):
            return NotImplemented
        mine = {sig: rows for sig, rows in self.relations.items() if rows}
        theirs = {sig: rows for sig, rows in other.relations.items() if rows}
        return mine == theirs

    def __hash__(self):
        return hash(frozenset((sig, rows) for sig, rows in self.relations.items() if rows))


@dataclass(frozen=True)
class Confusion:
    """Confusion counts of a hypothesis against labeled examples."""

    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @property
    def errors(self) -> int:
        return self.fp + self.fn


class _Store:
    """Mutable relation store with a first-argument index."""

    __slots__ = ("rows", "index", "count")

    def __init__(self):
        self.rows = {}
        self.index = {}
        self.count = 0

    def add(self, sig: tuple, row: tuple) -> bool:
        rel = self.rows.get(sig)
        if rel is None:
            rel = self.rows[sig] = set()
            self.index[sig] = {}
        if row in rel:
            return False
        rel.add(row)
        self.count += 1
        if row:
            self.index[sig].setdefault(row[0], []).append(row)
        return True

    def get(self, sig: tuple) -> set:
        return self.rows.get(sig, ())

    def first_arg(self, sig: tuple, value: str):
        idx = self.index.get(sig)
        if idx is None:
            return ()
        return idx.get(value, ())


def _compile_atom(atom: Atom) -> tuple:
    # each arg becomes ("v", name) or ("c", value) for fast matching
    return tuple(
        ("v", t.name) if isinstance(t, Var) else ("c", t.name) for t in atom.args
    )


class _CompiledRule:
    __slots__ = ("head_sig", "head_args", "body")

    def __init__(self, clause: Clause):
        self.head_sig = clause.head.signature
        self.head_args = _compile_atom(clause.head)
        self.body = [(lit.signature, _compile_atom(lit)) for lit in clause.body]


def _match(pattern: tuple, row: tuple, binding: dict) -> Optional[dict]:
    out = binding
    copied = False
    for (kind, key), value in zip(pattern, row):
        if kind == "c":
            if key != value:
                return None
        else:
            bound = out.get(key)
            if bound is None:
                if not copied:
                    out = dict(out)
                    copied = True
                out[key] = value
            elif bound != value:
                return None
    return out


def _candidate_rows(store: _Store, sig: tuple, pattern: tuple, binding: dict):
    if pattern:
        kind, key = pattern[0]
        first = key if kind == "c" else binding.get(key)
        if first is not None:
            return store.first_arg(sig, first)
    return store.get(sig)


def _fire_rule(rule: _CompiledRule, store: _Store, delta_pos: int, delta_rows):
    """Yield head rows derivable with body literal ``delta_pos`` restricted
    to ``delta_rows`` and all other literals over the full store."""

    def solve(i: int, binding: dict):
        if i == len(rule.body):
            yield tuple(
                key if kind == "c" else binding[key]
                for kind, key in rule.head_args
            )
            return
        sig, pattern = rule.body[i]
        if i == delta_pos:
            rows = delta_rows
        else:
            rows = _candidate_rows(store, sig, pattern, binding)
        for row in rows:
            if i == delta_pos and pattern:
                kind, key = pattern[0]
                first = key if kind == "c" else binding.get(key)
                if first is not None and row[0] != first:
                    continue
            b2 = _match(pattern, row, binding)
            if b2 is not None:
                yield from solve(i + 1, b2)

    yield from solve(0, {})


def least_model(
    background: Program,
    hypothesis: Hypothesis = EMPTY_HYPOTHESIS,
    *,
    base: Optional[Model] = None,
    max_atoms: int = DEFAULT_MAX_ATOMS,
) -> Model:
    """Least Herbrand model of background plus hypothesis clauses.

    When ``base`` is the model of the background alone, evaluation is
    seeded from it: the hypothesis clauses are fired once against the full
    base, then semi-naive rounds propagate anything new through all rules.
    Exceeding ``max_atoms`` derived atoms raises ResourceLimitError.
    """
    store = _Store()
    if base is not None:
        for sig, rows in base.relations.items():
            for row in rows:
                store.add(sig, row)
    else:
        for fact in background.facts:
            store.add(fact.signature, tuple(t.name for t in fact.args))

    rules = [_CompiledRule(c) for c in background.rules]
    hyp_rules = [_CompiledRule(c) for c in hypothesis.clauses]
    all_rules = rules + hyp_rules

    if base is not None:
        # base is already closed under the background rules; only the
        # hypothesis clauses can derive anything new from it
        seed_rules = hyp_rules
    else:
        seed_rules = all_rules

    def overflow():
        return ResourceLimitError(
            "model exceeded %d atoms during evaluation" % max_atoms
        )

    if store.count > max_atoms:
        raise overflow()

    # first pass: fire seed rules with every literal ranging over the store;
    # derivations are materialized per rule so adds never mutate a relation
    # while a join is still scanning it
    delta = []
    for rule in seed_rules:
        derived = list(_fire_rule(rule, store, delta_pos=-1, delta_rows=()))
        for head_row in derived:
            if store.add(rule.head_sig, head_row):
                delta.append((rule.head_sig, head_row))
        if store.count > max_atoms:
            raise overflow()

    while delta:
        delta_by_sig = {}
        for sig, row in delta:
            delta_by_sig.setdefault(sig, []).append(row)
        delta = []
        for rule in all_rules:
            for i, (sig, _pattern) in enumerate(rule.body):
                rows = delta_by_sig.get(sig)
                if not rows:
                    continue
                derived = list(_fire_rule(rule, store, i, rows))
                for head_row in derived:
                    if store.add(rule.head_sig, head_row):
                        delta.append((rule.head_sig, head_row))
                if store.count > max_atoms:
                    raise overflow()

    return Model(store.rows)


def entails(
    background: Program,
    hypothesis: Hypothesis,
    atom: Atom,
    *,
    base: Optional[Model] = None,
    max_atoms: int = DEFAULT_MAX_ATOMS,
) -> bool:
    """True when the atom is in the least model of background + hypothesis."""
    model = least_model(background, hypothesis, base=base, max_atoms=max_atoms)
    return model.contains(atom)


def confusion(
    background: Program,
    hypothesis: Hypothesis,
    examples,
    *,
    base: Optional[Model] = None,
    model: Optional[Model] = None,
    max_atoms: int = DEFAULT_MAX_ATOMS,
) -> Confusion:
    """Confusion counts from a single least-model computation.

    ``examples`` is anything with iter_pos()/iter_neg() yielding
    (atom, multiplicity) pairs, so bootstrap bags count duplicates.
    """
    if model is None:
        model = least_model(background, hypothesis, base=base, max_atoms=max_atoms)
    tp = tn = fp = fn = 0
    for atom, k in examples.iter_pos():
        if model.contains(atom):
            tp += k
        else:
            fn += k
    for atom, k in examples.iter_neg():
        if model.contains(atom):
            fp += k
        else:
            tn += k
    return Confusion(tp, tn, fp, fn)
