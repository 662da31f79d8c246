"""The BUILD supertree algorithm (Aho, Sagiv, Szymanski, Ullman).

Decides whether a set of rooted triples is consistent and, if so,
constructs the least-resolved tree displaying all of them: contracting
any inner edge of the output destroys the display of some input triple.

Determinism contract: at every recursion level the partition blocks are
ordered by their smallest label and children are attached in that order,
so identical inputs produce byte-identical trees.
"""

from __future__ import annotations

from typing import Iterable, Optional

from .trees import RootedTree
from .triples import Triple, TripleSet


class Inconsistent(Exception):
    """The triple set admits no displaying tree.

    Carries the recursion level at which the partition graph on >= 2
    labels stayed connected: ``labels`` is that level's label set and
    ``graph_edges`` the pair-graph induced by the triples alive there.
    """

    def __init__(self, labels: frozenset[str],
                 graph_edges: tuple[tuple[str, str], ...]):
        self.labels = labels
        self.graph_edges = graph_edges
        super().__init__(
            f"no tree on {sorted(labels)} displays the triples "
            f"(connected partition graph with {len(graph_edges)} edges)")

    def witness(self) -> dict:
        return {"labels": sorted(self.labels),
                "graph_edges": [list(e) for e in self.graph_edges]}


def _partition_graph(triples: Iterable[Triple], labels: set[str]):
    """Connected components of the graph joining a-b for each triple ab|c
    alive on ``labels``; neighbors explored in sorted order."""
    adj: dict[str, set[str]] = {lab: set() for lab in labels}
    edges: list[tuple[str, str]] = []
    for t in triples:
        if t.a in labels and t.b in labels and t.c in labels:
            adj[t.a].add(t.b)
            adj[t.b].add(t.a)
            edges.append((t.a, t.b))
    comps: list[list[str]] = []
    seen: set[str] = set()
    for start in sorted(labels):
        if start in seen:
            continue
        comp = []
        stack = [start]
        seen.add(start)
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in sorted(adj[v], reverse=True):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(sorted(comp))
    comps.sort(key=lambda c: c[0])
    return comps, sorted(set(edges))


def build(triples: Iterable[Triple], labels: Iterable[str]) -> RootedTree:
    """Construct a least-resolved tree on ``labels`` displaying every
    triple, or raise :class:`Inconsistent`.

    Every triple's labels must be drawn from ``labels``; the label set
    must be nonempty.
    """
    trip = list(triples)
    labs = sorted(set(labels))
    if not labs:
        raise ValueError("BUILD needs at least one label")
    for t in trip:
        if not t.labels() <= set(labs):
            raise ValueError(f"triple {t} uses labels outside the universe")

    parent: dict[int, Optional[int]] = {}
    leaf_labels: dict[int, str] = {}
    counter = [0]

    def fresh(par: Optional[int]) -> int:
        vid = counter[0]
        counter[0] += 1
        parent[vid] = par
        return vid

    def recurse(cur_labels: list[str], par: Optional[int]) -> None:
        if len(cur_labels) == 1:
            vid = fresh(par)
            leaf_labels[vid] = cur_labels[0]
            return
        if len(cur_labels) == 2:
            vid = fresh(par)
            for lab in cur_labels:
                leaf = fresh(vid)
                leaf_labels[leaf] = lab
            return
        comps, edges = _partition_graph(trip, set(cur_labels))
        if len(comps) == 1:
            raise Inconsistent(frozenset(cur_labels), tuple(edges))
        vid = fresh(par)
        for comp in comps:
            recurse(comp, vid)

    recurse(labs, None)
    return RootedTree(parent, leaf_labels)


def is_consistent(triples: Iterable[Triple] | TripleSet,
                  labels: Optional[Iterable[str]] = None) -> bool:
    """True iff some rooted tree displays every triple."""
    trip = list(triples)
    if labels is None:
        labs: set[str] = set()
        for t in trip:
            labs |= t.labels()
        if not labs:
            return True
        labels = labs
    try:
        build(trip, labels)
        return True
    except Inconsistent:
        return False


def is_unique_display_tree(triples: TripleSet,
                           labels: Optional[Iterable[str]] = None) -> bool:
    """True iff BUILD's output is binary, a sufficient condition for the
    displaying tree to be unique on the label universe (defaulting to the
    labels occurring in the triples).  Raises on inconsistent input."""
    labs = set(labels) if labels is not None else set(triples.labels)
    if not labs:
        raise ValueError("unique-display test needs a nonempty label universe")
    try:
        tree = build(triples, labs)
    except Inconsistent as exc:
        raise ValueError("triple set is inconsistent") from exc
    return tree.is_binary()
