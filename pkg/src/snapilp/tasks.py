"""Bundled desk-scale tasks.

Three kinds ship with the package:

  grandparent   clean family-tree task, no recursion
  path          graph reachability, needs a recursive rule
  noisy0..9     synthetic two-hop connectivity with label-flipped negatives

The noisy family is adversarial for the fn-first cost function.  A slice
of the negative pool is flipped into the positive set; flipped pairs are
not two-hop connected, but their endpoints are tagged (amber on sources,
azure on targets) so that exactly one attribute block covers all of them.
A cost that minimizes false negatives first must bolt that block onto the
true rule, and the block also covers many clean negatives ("spill"), which
hurts on held-out data.  Costs that weigh fp and fn equally keep the true
rule, because the spill always outweighs the flips.

All generators are deterministic: same name, same texts, on any platform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .logic import DataError
from .parser import LoadedTask, load_task_dir

import os


@dataclass(frozen=True)
class TaskFiles:
    """Raw file texts of one task, ready to write or parse."""

    name: str
    bk: str
    exs: str
    bias: str

    def load(self) -> LoadedTask:
        return LoadedTask.from_texts(self.name, self.bk, self.exs, self.bias)


def _fact_lines(pred: str, rows) -> list:
    return ["%s(%s)." % (pred, ",".join(row)) for row in sorted(rows)]


def _exs_lines(pos, neg, pred: str) -> str:
    lines = ["% positive and negative examples"]
    lines += ["pos(%s(%s))." % (pred, ",".join(r)) for r in sorted(pos)]
    lines += ["neg(%s(%s))." % (pred, ",".join(r)) for r in sorted(neg)]
    return "\n".join(lines) + "\n"


def grandparent_task() -> TaskFiles:
    """Three family trees; the target is the grandparent relation."""
    parent = []
    people = []
    for f in range(3):
        g = "g%d" % f
        people.append(g)
        for i in range(3):
            c = "c%d%d" % (f, i)
            people.append(c)
            parent.append((g, c))
            for j in range(2):
                d = "d%d%d%d" % (f, i, j)
                people.append(d)
                parent.append((c, d))
    gp_pairs = set()
    kids = {}
    for a, b in parent:
        kids.setdefault(a, []).append(b)
    for a, bs in kids.items():
        for b in bs:
            for c in kids.get(b, ()):
                gp_pairs.add((a, c))

    rng = np.random.Generator(np.random.PCG64(7))
    all_pairs = sorted(
        (x, y) for x in people for y in people if x != y and (x, y) not in gp_pairs
    )
    idx = rng.choice(len(all_pairs), size=len(gp_pairs), replace=False)
    neg = [all_pairs[i] for i in sorted(idx)]

    bk = "% parent facts for three families\n" + "\n".join(
        _fact_lines("parent", parent)
    ) + "\n"
    exs = _exs_lines(sorted(gp_pairs), neg, "gp")
    bias = (
        'target = "gp/2"\n'
        'body = ["parent/2"]\n'
        "max_clauses = 2\n"
        "max_body = 2\n"
        "max_vars = 3\n"
        "allow_recursion = false\n"
    )
    return TaskFiles("grandparent", bk, exs, bias)


def path_task() -> TaskFiles:
    """Reachability on a small DAG; the target needs a recursive clause."""
    edges = [
        ("n0", "n1"), ("n1", "n2"), ("n2", "n3"), ("n3", "n4"),
        ("n1", "n5"), ("n5", "n6"), ("n2", "n7"), ("n7", "n8"),
        ("n6", "n8"), ("n0", "n7"),
    ]
    # transitive closure
    reach = set(edges)
    changed = True
    while changed:
        changed = False
        for a, b in list(reach):
            for c, d in edges:
                if b == c and (a, d) not in reach:
                    reach.add((a, d))
                    changed = True
    nodes = sorted({x for e in edges for x in e})
    non_reach = sorted(
        (x, y) for x in nodes for y in nodes if x != y and (x, y) not in reach
    )
    rng = np.random.Generator(np.random.PCG64(11))
    idx = rng.choice(len(non_reach), size=len(reach), replace=False)
    neg = [non_reach[i] for i in sorted(idx)]

    bk = "% directed edges of a small acyclic graph\n" + "\n".join(
        _fact_lines("edge", edges)
    ) + "\n"
    exs = _exs_lines(sorted(reach), neg, "path")
    bias = (
        'target = "path/2"\n'
        'body = ["edge/2"]\n'
        "max_clauses = 2\n"
        "max_body = 2\n"
        "max_vars = 3\n"
        "allow_recursion = true\n"
    )
    return TaskFiles("path", bk, exs, bias)


def _two_paths(edges: set) -> set:
    out = {}
    for u, v in edges:
        out.setdefault(u, set()).add(v)
    pairs = set()
    for u, mids in out.items():
        for m in mids:
            for w in out.get(m, ()):
                if w != u:
                    pairs.add((u, w))
    return pairs


def _pick(rng, items: list, k: int) -> list:
    idx = rng.choice(len(items), size=k, replace=False)
    return [items[i] for i in sorted(idx)]


_NOISY_COUNT = 10


def noisy_task(index: int) -> TaskFiles:
    """Instance ``index`` of the noisy two-hop connectivity family.

    The target is two-hop reachability over a random digraph.  20% of the
    negative sample has its label flipped to positive.  The flipped pairs
    all run from one small node group to a disjoint second group, and the
    groups are published as unary tags (``amber`` on sources, ``azure`` on
    targets), so a tag-pair clause can reach zero false negatives on the
    training split - at the price of also covering the planted "spill"
    negatives sampled from the same tag block.  Instance parameters (graph
    size, sample size, spill factor) vary with the index so the severity
    of the induced overfitting varies across the family.
    """
    if not 0 <= index < _NOISY_COUNT:
        raise DataError("noisy task index must be in 0..%d" % (_NOISY_COUNT - 1))
    graph_n = 44 + 2 * index
    edge_count = int(round(2.7 * graph_n))
    spill_factor = 2.4 + 0.06 * index
    pos_count = 190 + 8 * index
    n_flips = int(round(0.2 * pos_count))

    # Retry only the raw graph draw: a sparse digraph occasionally yields
    # too few two-hop pairs to sample from.  Everything after the graph is
    # constructive and cannot fail.
    for attempt in range(40):
        rng = np.random.Generator(np.random.PCG64(40_000 + 101 * index + attempt))
        graph_nodes = ["m%03d" % i for i in range(graph_n)]
        graph_pairs = [(x, y) for x in graph_nodes for y in graph_nodes if x != y]
        edges = set(_pick(rng, graph_pairs, edge_count))
        if len(_two_paths(edges)) >= pos_count + 40:
            break
    else:
        raise DataError("could not draw a dense enough graph for noisy task %d" % index)

    # Shortcut edges parallel to a third of the positives keep the bare
    # single-edge clause reasonably accurate, so it anchors the admission
    # chain and weaker one- and two-literal variants never board the pool.
    n_edge_pos = int(round(0.35 * pos_count))
    shortcut_pool = sorted(_two_paths(edges) - edges)
    edges |= set(_pick(rng, shortcut_pool, n_edge_pos))
    two = _two_paths(edges)

    pos = set(_pick(rng, sorted(two & edges), n_edge_pos))
    pos |= set(_pick(rng, sorted(two - edges), pos_count - n_edge_pos))

    # Flipped pairs run between two extra node groups that carry no edges
    # at all.  The groups are disjoint, so of the four possible tag-pair
    # clauses only amber->azure covers a flip, and because the nodes are
    # isolated no clause mixing a tag with an edge literal covers anything.
    n_src = max(6, int(round(n_flips / 3.2)))
    n_dst = n_flips + 10
    src_group = ["m%03d" % i for i in range(graph_n, graph_n + n_src)]
    dst_group = ["m%03d" % i for i in range(graph_n + n_src, graph_n + n_src + n_dst)]
    grid = [(u, v) for u in src_group for v in dst_group]
    flips = set(_pick(rng, grid, n_flips))
    amber = {u for u, _ in flips}
    azure = {v for _, v in flips}

    # Negative sample: a quota of "spill" pairs from inside the tag block
    # (wrongly covered by any amber-azure clause) and plain pairs outside
    # it.  Both kinds are true negatives: neither is a two-hop pair.
    in_block = lambda p: p[0] in amber and p[1] in azure
    neg_count = pos_count - n_flips
    spill_cap = int(round(0.75 * neg_count))
    n_spill = min(int(round(spill_factor * n_flips)), spill_cap)
    spill_pool = sorted(
        p
        for p in ((u, v) for u in sorted(amber) for v in sorted(azure))
        if p not in flips
    )
    all_nodes = graph_nodes + src_group + dst_group
    plain_pool = sorted(
        (x, y)
        for x in all_nodes
        for y in all_nodes
        if x != y and (x, y) not in two and (x, y) not in flips and not in_block((x, y))
    )
    if len(spill_pool) < n_spill or len(plain_pool) < neg_count - n_spill:
        raise DataError("negative pools exhausted for noisy task %d" % index)
    negs = set(_pick(rng, spill_pool, n_spill))
    negs |= set(_pick(rng, plain_pool, neg_count - n_spill))

    name = "noisy%d" % index
    bk_lines = ["% random digraph with unary node tags"]
    bk_lines += _fact_lines("edge", edges)
    bk_lines += _fact_lines("amber", ((x,) for x in sorted(amber)))
    bk_lines += _fact_lines("azure", ((x,) for x in sorted(azure)))
    bk = "\n".join(bk_lines) + "\n"
    exs = _exs_lines(sorted(pos | flips), sorted(negs), "conn")
    bias = (
        'target = "conn/2"\n'
        'body = ["edge/2", "amber/1", "azure/1"]\n'
        "max_clauses = 2\n"
        "max_body = 2\n"
        "max_vars = 3\n"
        "allow_recursion = false\n"
    )
    return TaskFiles(name, bk, exs, bias)


def noisy_names() -> tuple:
    return tuple("noisy%d" % i for i in range(_NOISY_COUNT))


BUNDLED_NAMES = ("grandparent", "path") + tuple(
    "noisy%d" % i for i in range(_NOISY_COUNT)
)


def bundled_files(name: str) -> TaskFiles:
    if name == "grandparent":
        return grandparent_task()
    if name == "path":
        return path_task()
    if name.startswith("noisy"):
        suffix = name[len("noisy"):]
        if suffix.isdigit():
            return noisy_task(int(suffix))
    raise DataError(
        "unknown bundled task %r (available: %s)" % (name, ", ".join(BUNDLED_NAMES))
    )


def bundled_task(name: str) -> LoadedTask:
    return bundled_files(name).load()


def noisy_suite() -> list:
    return [bundled_task(n) for n in noisy_names()]


def bundled_suite() -> list:
    return [bundled_task(n) for n in BUNDLED_NAMES]


def export_task(files: TaskFiles, directory: str) -> None:
    """Write bk.pl / exs.pl / bias.toml for one task into a directory."""
    os.makedirs(directory, exist_ok=True)
    for fname, text in (
        ("bk.pl", files.bk),
        ("exs.pl", files.exs),
        ("bias.toml", files.bias),
    ):
        with open(os.path.join(directory, fname), "w", encoding="utf-8") as fh:
            fh.write(text)


def resolve_task(ref: str) -> LoadedTask:
    """A task argument is either a directory path or a bundled task name."""
    if os.path.isdir(ref):
        return load_task_dir(ref)
    if ref in BUNDLED_NAMES:
        return bundled_task(ref)
    raise DataError(
        "task %r is neither a directory nor a bundled task name "
        "(bundled: %s)" % (ref, ", ".join(BUNDLED_NAMES))
    )
