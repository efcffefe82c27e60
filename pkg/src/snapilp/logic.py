"""Core term and clause representation for function-free definite programs.

Programs are Datalog: no function symbols, facts are ground, and every rule
is range-restricted (each head variable occurs in the body).  Hypotheses are
finite sets of rules for a single target predicate, kept in a canonical
order so that structurally equal hypotheses compare and print identically.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


class SnapilpError(Exception):
    """Base class for errors raised by this package."""


class DataError(SnapilpError):
    """A task input is well-formed syntactically but semantically invalid."""


class ResourceLimitError(SnapilpError):
    """A configured resource cap (derived atoms, etc.) was exceeded."""


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self) -> str:
        return self.name


Term = Var | Const


@dataclass(frozen=True)
class Atom:
    """A predicate applied to a tuple of terms."""

    pred: str
    args: tuple

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def signature(self) -> tuple:
        return (self.pred, len(self.args))

    def is_ground(self) -> bool:
        return all(isinstance(a, Const) for a in self.args)

    def variables(self) -> Iterator[Var]:
        for a in self.args:
            if isinstance(a, Var):
                yield a

    def __str__(self) -> str:
        if not self.args:
            return self.pred
        return "%s(%s)" % (self.pred, ",".join(str(a) for a in self.args))


@dataclass(frozen=True)
class Clause:
    """A definite clause ``head :- body``.  An empty body makes it a fact."""

    head: Atom
    body: tuple = ()

    def is_fact(self) -> bool:
        return not self.body

    @property
    def size(self) -> int:
        return 1 + len(self.body)

    def variables(self) -> set:
        vs = set(self.head.variables())
        for lit in self.body:
            vs.update(lit.variables())
        return vs

    def is_range_restricted(self) -> bool:
        body_vars = set()
        for lit in self.body:
            body_vars.update(lit.variables())
        return all(v in body_vars for v in self.head.variables())

    def __str__(self) -> str:
        if not self.body:
            return str(self.head) + "."
        return "%s:-%s." % (self.head, ",".join(str(b) for b in self.body))


def _canonical_names() -> Iterator[str]:
    for ch in "ABCDEFGHIJKLMNOPQRSTUVWXYZ":
        yield ch
    i = 26
    while True:
        yield "V%d" % i
        i += 1


def _render_with(atom: Atom, mapping: dict, names: Sequence[str]) -> str:
    parts = []
    for t in atom.args:
        if isinstance(t, Var):
            if t not in mapping:
                mapping[t] = names[len(mapping)]
            parts.append(mapping[t])
        else:
            parts.append(t.name)
    if not parts:
        return atom.pred
    return "%s(%s)" % (atom.pred, ",".join(parts))


@functools.lru_cache(maxsize=None)
def canonical_clause(clause: Clause) -> str:
    """Canonical printed form of a clause, invariant under variable renaming
    and body literal reordering.

    Variables are renamed A, B, C, ... in first-occurrence order (head
    scanned first), and the smallest string over all body orderings is
    taken.  The permutation scan is exponential in the body length, which
    is fine for the small bodies a bias permits.
    """
    best = None
    names = list(itertools.islice(_canonical_names(), len(clause.variables())))
    for perm in itertools.permutations(clause.body):
        mapping = {}
        head_s = _render_with(clause.head, mapping, names)
        body_ss = [_render_with(b, mapping, names) for b in perm]
        s = head_s + "." if not body_ss else "%s:-%s." % (head_s, ",".join(body_ss))
        if best is None or s < best:
            best = s
    return best


def clause_sort_key(clause: Clause) -> tuple:
    return (clause.size, canonical_clause(clause))


@dataclass(frozen=True)
class Hypothesis:
    """A set of rules for one target predicate.

    Clauses are stored sorted by (size, canonical string), so two
    hypotheses built from the same clauses in any order are equal.
    """

    clauses: tuple = ()

    def __post_init__(self):
        # clauses that differ only by variable naming are one clause; keep
        # the first spelling so size never double-counts a renamed twin
        by_canon = {}
        for c in self.clauses:
            by_canon.setdefault(canonical_clause(c), c)
        ordered = tuple(sorted(by_canon.values(), key=clause_sort_key))
        object.__setattr__(self, "clauses", ordered)

    @property
    def size(self) -> int:
        """Total atom count across all clauses (heads included)."""
        return sum(c.size for c in self.clauses)

    def is_empty(self) -> bool:
        return not self.clauses

    def target(self) -> tuple:
        if not self.clauses:
            raise DataError("empty hypothesis has no target predicate")
        return self.clauses[0].head.signature

    def references_target_in_body(self) -> bool:
        tgt = self.target()
        return any(
            lit.signature == tgt for c in self.clauses for lit in c.body
        )

    def __str__(self) -> str:
        return canonical_form(self)


EMPTY_HYPOTHESIS = Hypothesis(())


def canonical_form(hyp: Hypothesis) -> str:
    """Canonical one-line rendering of a hypothesis."""
    if not hyp.clauses:
        return ""
    return " ".join(canonical_clause(c) for c in hyp.clauses)


@dataclass(frozen=True)
class Program:
    """Background knowledge: ground facts plus definite rules.

    Facts and rules are deduplicated and stored in a sorted order so that
    iteration is deterministic across processes.
    """

    facts: tuple = ()
    rules: tuple = ()

    @staticmethod
    def from_clauses(clauses: Iterable[Clause]) -> "Program":
        facts, rules = [], []
        for c in clauses:
            (facts if c.is_fact() else rules).append(c)
        fact_atoms = sorted({c.head for c in facts}, key=str)
        # str(c) breaks ties between rules that differ only in variable
        # names, so iteration order never depends on set insertion order
        rule_set = sorted(set(rules), key=lambda c: (clause_sort_key(c), str(c)))
        return Program(tuple(fact_atoms), tuple(rule_set))

    def predicates(self) -> set:
        sigs = {f.signature for f in self.facts}
        for r in self.rules:
            sigs.add(r.head.signature)
            sigs.update(lit.signature for lit in r.body)
        return sigs

    def constants(self) -> set:
        consts = {t.name for f in self.facts for t in f.args}
        for r in self.rules:
            for atom in (r.head, *r.body):
                consts.update(t.name for t in atom.args if isinstance(t, Const))
        return consts


@dataclass(frozen=True)
class ExampleSet:
    """Disjoint sets of ground positive and negative example atoms."""

    pos: tuple = ()
    neg: tuple = ()

    @staticmethod
    def from_atoms(pos: Iterable[Atom], neg: Iterable[Atom]) -> "ExampleSet":
        p = tuple(sorted(set(pos), key=str))
        n = tuple(sorted(set(neg), key=str))
        overlap = set(p) & set(n)
        if overlap:
            worst = min(overlap, key=str)
            raise DataError("atom labeled both positive and negative: %s" % worst)
        for a in itertools.chain(p, n):
            if not a.is_ground():
                raise DataError("example atom is not ground: %s" % a)
        return ExampleSet(p, n)

    @property
    def total(self) -> int:
        return len(self.pos) + len(self.neg)

    def iter_pos(self) -> Iterator[tuple]:
        for a in self.pos:
            yield a, 1

    def iter_neg(self) -> Iterator[tuple]:
        for a in self.neg:
            yield a, 1

    def target(self) -> tuple:
        sigs = {a.signature for a in itertools.chain(self.pos, self.neg)}
        if len(sigs) > 1:
            raise DataError(
                "examples mix predicates: %s" % ", ".join(
                    "%s/%d" % s for s in sorted(sigs))
            )
        if not sigs:
            raise DataError("example set is empty")
        return next(iter(sigs))


@dataclass(frozen=True)
class Bias:
    """Search-space bounds for hypothesis enumeration."""

    target: tuple
    body_preds: tuple
    max_clauses: int
    max_body: int
    max_vars: int
    allow_recursion: bool = False

    def __post_init__(self):
        name, arity = self.target
        if self.max_clauses < 1:
            raise DataError("max_clauses must be at least 1")
        if self.max_body < 1:
            raise DataError("max_body must be at least 1")
        if self.max_vars < arity:
            raise DataError(
                "max_vars (%d) is smaller than the target arity (%d)"
                % (self.max_vars, arity)
            )
        if not self.body_preds and not self.allow_recursion:
            raise DataError("bias declares no body predicates")
