"""Bundled task generators: determinism, format, and label integrity."""

import pytest

from snapilp.logic import DataError
from snapilp.parser import load_task_dir
from snapilp.tasks import (
    BUNDLED_NAMES,
    bundled_files,
    export_task,
    grandparent_task,
    noisy_names,
    noisy_task,
    path_task,
    resolve_task,
)


def test_bundled_name_listing():
    assert BUNDLED_NAMES == (
        "grandparent", "path",
        "noisy0", "noisy1", "noisy2", "noisy3", "noisy4",
        "noisy5", "noisy6", "noisy7", "noisy8", "noisy9",
    )
    assert noisy_names() == BUNDLED_NAMES[2:]


@pytest.mark.parametrize("name", BUNDLED_NAMES)
def test_generators_are_text_deterministic(name):
    a = bundled_files(name)
    b = bundled_files(name)
    assert (a.bk, a.exs, a.bias) == (b.bk, b.exs, b.bias)
    task = a.load()
    assert task.name == name
    assert task.examples.pos and task.examples.neg


def test_unknown_bundled_name_raises():
    with pytest.raises(DataError, match="unknown bundled task"):
        bundled_files("noiseless")
    with pytest.raises(DataError):
        noisy_task(10)
    with pytest.raises(DataError):
        noisy_task(-1)


def test_grandparent_labels_match_the_parent_facts():
    task = grandparent_task().load()
    kids = {}
    for f in task.background.facts:
        a, b = (t.name for t in f.args)
        kids.setdefault(a, []).append(b)
    closure = {
        (a, c)
        for a, bs in kids.items()
        for b in bs
        for c in kids.get(b, ())
    }
    pos = {tuple(t.name for t in a.args) for a in task.examples.pos}
    neg = {tuple(t.name for t in a.args) for a in task.examples.neg}
    assert pos == closure
    assert not (neg & closure)
    assert len(pos) == len(neg)


def test_path_labels_match_reachability():
    task = path_task().load()
    edges = {
        tuple(t.name for t in f.args)
        for f in task.background.facts
        if f.pred == "edge"
    }
    reach = set(edges)
    changed = True
    while changed:
        changed = False
        for a, b in list(reach):
            for c, d in edges:
                if b == c and (a, d) not in reach:
                    reach.add((a, d))
                    changed = True
    pos = {tuple(t.name for t in a.args) for a in task.examples.pos}
    neg = {tuple(t.name for t in a.args) for a in task.examples.neg}
    assert pos == reach
    assert not (neg & reach)
    assert task.bias.allow_recursion


@pytest.mark.parametrize("index", range(10))
def test_noisy_labels_are_flipped_exactly_as_documented(index):
    task = noisy_task(index).load()
    edges, amber, azure = set(), set(), set()
    for f in task.background.facts:
        row = tuple(t.name for t in f.args)
        if f.pred == "edge":
            edges.add(row)
        elif f.pred == "amber":
            amber.add(row[0])
        elif f.pred == "azure":
            azure.add(row[0])

    # recompute the two-hop closure independently of the generator
    succ = {}
    for u, v in edges:
        succ.setdefault(u, set()).add(v)
    two_hop = {
        (u, w)
        for u, mids in succ.items()
        for m in mids
        for w in succ.get(m, ())
        if w != u
    }

    pos = {tuple(t.name for t in a.args) for a in task.examples.pos}
    neg = {tuple(t.name for t in a.args) for a in task.examples.neg}
    flips = pos - two_hop

    assert 0.15 <= len(flips) / len(pos) <= 0.25
    assert all(u in amber and v in azure for u, v in flips)
    assert not (neg & two_hop)

    # the tag groups carry no edges in either direction, so tag literals
    # and edge literals can never fire together
    tagged = amber | azure
    assert all(u not in tagged and v not in tagged for u, v in edges)

    # some negatives sit inside the tag block: the spill that punishes a
    # tag-pair clause
    spill = {p for p in neg if p[0] in amber and p[1] in azure}
    assert len(spill) > len(flips)


def test_export_round_trips_through_the_directory_format(tmp_path):
    for files in (grandparent_task(), noisy_task(0)):
        target = tmp_path / files.name
        export_task(files, str(target))
        assert sorted(p.name for p in target.iterdir()) == [
            "bias.toml", "bk.pl", "exs.pl"
        ]
        loaded = load_task_dir(str(target))
        direct = files.load()
        assert loaded.background == direct.background
        assert loaded.examples == direct.examples
        assert loaded.bias == direct.bias


def test_resolve_accepts_names_and_directories(tmp_path):
    by_name = resolve_task("path")
    assert by_name.name == "path"

    export_task(path_task(), str(tmp_path / "exported"))
    by_dir = resolve_task(str(tmp_path / "exported"))
    assert by_dir.background == by_name.background
    assert by_dir.examples == by_name.examples

    with pytest.raises(DataError, match="neither a directory nor a bundled"):
        resolve_task("no-such-task")
