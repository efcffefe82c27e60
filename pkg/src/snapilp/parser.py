"""Parsing for task inputs: background programs, examples, and bias files.

Programs and examples use a Prolog-like surface syntax with ``%`` line
comments.  Identifiers starting with an uppercase letter or underscore are
variables; everything else (lowercase identifiers, integers) is a constant.
The bias file is flat TOML.
"""

from __future__ import annotations

import os
import re
import sys
from dataclasses import dataclass
from typing import Iterator

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .logic import (
    Atom,
    Bias,
    Clause,
    Const,
    DataError,
    ExampleSet,
    Hypothesis,
    Program,
    SnapilpError,
    Var,
)


class ParseError(SnapilpError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__("line %d, column %d: %s" % (line, col, message))
        self.line = line
        self.col = col


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*)
  | (?P<implies>:-)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<comma>,)
  | (?P<period>\.)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<name>[a-z][A-Za-z0-9_]*|\d+)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> Iterator[_Token]:
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError("unexpected character %r" % text[pos], line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            yield _Token(kind, chunk, line, col)
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    yield _Token("eof", "", line, col)


class _Parser:
    def __init__(self, text: str):
        self.tokens = list(_tokenize(text))
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def take(self, kind: str) -> _Token:
        tok = self.tokens[self.i]
        if tok.kind != kind:
            raise ParseError(
                "expected %s but found %r" % (kind, tok.text or "end of input"),
                tok.line,
                tok.col,
            )
        self.i += 1
        return tok

    def atom(self) -> Atom:
        tok = self.take("name")
        args = []
        if self.peek().kind == "lparen":
            self.take("lparen")
            args.append(self.term())
            while self.peek().kind == "comma":
                self.take("comma")
                args.append(self.term())
            self.take("rparen")
        return Atom(tok.text, tuple(args))

    def term(self):
        tok = self.peek()
        if tok.kind == "var":
            self.take("var")
            return Var(tok.text)
        name = self.take("name")
        return Const(name.text)

    def clause(self) -> Clause:
        head = self.atom()
        body = []
        if self.peek().kind == "implies":
            self.take("implies")
            body.append(self.atom())
            while self.peek().kind == "comma":
                self.take("comma")
                body.append(self.atom())
        self.take("period")
        return Clause(head, tuple(body))

    def at_eof(self) -> bool:
        return self.peek().kind == "eof"


class _ArityTable:
    """Tracks predicate arities so a clash anywhere in one input is caught."""

    def __init__(self):
        self.seen = {}

    def check(self, atom: Atom, tok_line: int, tok_col: int):
        prev = self.seen.get(atom.pred)
        if prev is None:
            self.seen[atom.pred] = atom.arity
        elif prev != atom.arity:
            raise ParseError(
                "predicate %s used with arity %d but earlier with arity %d"
                % (atom.pred, atom.arity, prev),
                tok_line,
                tok_col,
            )


def parse_program(text: str) -> Program:
    """Parse background knowledge: ground facts and range-restricted rules."""
    p = _Parser(text)
    arities = _ArityTable()
    clauses = []
    while not p.at_eof():
        start = p.peek()
        c = p.clause()
        for atom in (c.head, *c.body):
            arities.check(atom, start.line, start.col)
        if c.is_fact() and not c.head.is_ground():
            raise ParseError("fact is not ground: %s" % c, start.line, start.col)
        if not c.is_fact() and not c.is_range_restricted():
            raise ParseError(
                "rule is not range-restricted (head variable missing from "
                "body): %s" % c,
                start.line,
                start.col,
            )
        clauses.append(c)
    return Program.from_clauses(clauses)


def parse_examples(text: str) -> ExampleSet:
    """Parse ``pos(atom).`` / ``neg(atom).`` lines into an example set.

    Duplicates collapse; an atom under both wrappers is an error, as is a
    non-ground atom or a wrapper other than pos/neg.
    """
    p = _Parser(text)
    arities = _ArityTable()
    pos, neg = [], []
    while not p.at_eof():
        start = p.peek()
        wrapper = p.take("name")
        if wrapper.text not in ("pos", "neg"):
            raise ParseError(
                "expected pos(...) or neg(...) wrapper, found %r" % wrapper.text,
                wrapper.line,
                wrapper.col,
            )
        p.take("lparen")
        inner = p.atom()
        p.take("rparen")
        p.take("period")
        if not inner.is_ground():
            raise ParseError(
                "example atom is not ground: %s" % inner, start.line, start.col
            )
        arities.check(inner, start.line, start.col)
        (pos if wrapper.text == "pos" else neg).append(inner)
    exs = ExampleSet.from_atoms(pos, neg)
    exs.target()
    return exs


def parse_hypothesis(text: str) -> Hypothesis:
    """Parse one or more rules into a hypothesis (used by pool files)."""
    p = _Parser(text)
    clauses = []
    while not p.at_eof():
        start = p.peek()
        c = p.clause()
        if not c.is_fact() and not c.is_range_restricted():
            raise ParseError("rule is not range-restricted: %s" % c, start.line, start.col)
        clauses.append(c)
    return Hypothesis(tuple(clauses))


_PRED_RE = re.compile(r"^([a-z][A-Za-z0-9_]*)/([0-9]+)$")

_BIAS_KEYS = {
    "target", "body", "max_clauses", "max_body", "max_vars", "allow_recursion",
}


def _parse_pred_indicator(s, what: str) -> tuple:
    if not isinstance(s, str):
        raise DataError("%s must be a string like \"pred/2\", got %r" % (what, s))
    m = _PRED_RE.match(s)
    if m is None:
        raise DataError("%s is not of the form name/arity: %r" % (what, s))
    name, arity = m.group(1), int(m.group(2))
    if arity < 1:
        raise DataError("%s has arity %d; predicates need at least one argument" % (what, arity))
    return (name, arity)


def parse_bias(text: str) -> Bias:
    """Parse a flat TOML bias file describing the hypothesis space."""
    try:
        table = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise DataError("bias file is not valid TOML: %s" % e) from e
    unknown = set(table) - _BIAS_KEYS
    if unknown:
        raise DataError("unknown bias keys: %s" % ", ".join(sorted(unknown)))
    missing = {"target", "body", "max_clauses", "max_body", "max_vars"} - set(table)
    if missing:
        raise DataError("bias file is missing keys: %s" % ", ".join(sorted(missing)))
    target = _parse_pred_indicator(table["target"], "target")
    body_raw = table["body"]
    if not isinstance(body_raw, list):
        raise DataError("body must be a list of \"pred/arity\" strings")
    body = tuple(_parse_pred_indicator(b, "body predicate") for b in body_raw)
    if len(set(body)) != len(body):
        raise DataError("body predicate list contains duplicates")
    if target in body:
        raise DataError(
            "target %s/%d also appears in body; use allow_recursion instead"
            % target
        )
    ints = {}
    for key in ("max_clauses", "max_body", "max_vars"):
        v = table[key]
        if not isinstance(v, int) or isinstance(v, bool):
            raise DataError("%s must be an integer, got %r" % (key, v))
        ints[key] = v
    rec = table.get("allow_recursion", False)
    if not isinstance(rec, bool):
        raise DataError("allow_recursion must be a boolean, got %r" % rec)
    return Bias(
        target=target,
        body_preds=body,
        max_clauses=ints["max_clauses"],
        max_body=ints["max_body"],
        max_vars=ints["max_vars"],
        allow_recursion=rec,
    )


@dataclass(frozen=True)
class LoadedTask:
    """A fully parsed task: background program, examples, and bias."""

    name: str
    background: Program
    examples: ExampleSet
    bias: Bias

    @staticmethod
    def from_texts(name: str, bk: str, exs: str, bias: str) -> "LoadedTask":
        program = parse_program(bk)
        examples = parse_examples(exs)
        b = parse_bias(bias)
        if examples.target() != b.target:
            et, bt = examples.target(), b.target
            raise DataError(
                "examples are for %s/%d but the bias target is %s/%d"
                % (et[0], et[1], bt[0], bt[1])
            )
        return LoadedTask(name, program, examples, b)


TASK_FILES = ("bk.pl", "exs.pl", "bias.toml")


def load_task_dir(path: str) -> LoadedTask:
    """Load a task from a directory holding bk.pl, exs.pl and bias.toml."""
    if not os.path.isdir(path):
        raise DataError("task directory does not exist: %s" % path)
    texts = []
    for fname in TASK_FILES:
        fpath = os.path.join(path, fname)
        if not os.path.isfile(fpath):
            raise DataError("task directory %s is missing %s" % (path, fname))
        with open(fpath, "r", encoding="utf-8") as fh:
            texts.append(fh.read())
    name = os.path.basename(os.path.normpath(path))
    return LoadedTask.from_texts(name, *texts)
