"""Event-labeled gene trees and the observability axiom suite.

A gene tree couples a rooted topology on genes with an event label per
interior vertex (speciation ``s``, duplication ``d``, transfer ``t``), a
set of transfer edges (whose tails must be ``t``-labeled), and a total map
``sigma`` from genes to the species they reside in.

``check_observability`` evaluates the admission axioms:

* O1 -- every interior vertex has at least two children (total degree >= 3,
  root >= 2);
* O2 -- every transfer vertex keeps at least one transfer and one
  non-transfer out-edge;
* O3a -- every speciation has two children whose reachable species sets
  (transfer edges removed) are disjoint;
* O3b -- the two sides of every transfer edge reach disjoint species sets;
* O3A (restricted mode) -- all children of a speciation have pairwise
  disjoint reachable species sets.

Violations are report data, never exceptions: axiom checking admits or
rejects instances, it does not repair them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .trees import Edge, Forest, RootedTree, TreeError

SPECIATION = "s"
DUPLICATION = "d"
TRANSFER = "t"
EVENTS = (SPECIATION, DUPLICATION, TRANSFER)


class GeneTreeError(ValueError):
    """Structurally invalid gene tree."""


class GeneTree:
    """An event-labeled gene tree (topology, events, transfer edges, sigma).

    ``transfer_edges`` keeps input order; that order indexes the
    per-transfer-edge informative triple sets downstream.
    """

    __slots__ = ("tree", "events", "transfer_edges", "sigma", "_forest")

    def __init__(self, tree: RootedTree, events: Mapping[int, str],
                 transfer_edges: Iterable[Edge] = (),
                 sigma: Optional[Mapping[str, str]] = None):
        self.tree = tree
        self.events = dict(events)
        seen: list[Edge] = []
        for e in transfer_edges:
            e = (int(e[0]), int(e[1]))
            if e not in seen:
                seen.append(e)
        self.transfer_edges = tuple(seen)
        self.sigma = dict(sigma or {})
        self._forest: Optional[Forest] = None
        self._validate()

    def _validate(self) -> None:
        interior = {v for v in self.tree.vertices() if not self.tree.is_leaf(v)}
        if set(self.events) != interior:
            raise GeneTreeError("event labels must cover exactly the interior vertices")
        for v, ev in self.events.items():
            if ev not in EVENTS:
                raise GeneTreeError(f"unknown event {ev!r} at vertex {v}")
        for (u, v) in self.transfer_edges:
            if not self.tree.has_edge((u, v)):
                raise GeneTreeError(f"transfer edge {(u, v)} is not a tree edge")
            if self.events.get(u) != TRANSFER:
                raise GeneTreeError(
                    f"transfer edge {(u, v)} leaves a non-transfer vertex")
        if set(self.sigma) != set(self.tree.leaf_labels()):
            raise GeneTreeError("sigma must assign a species to every gene")

    # -- basic views -------------------------------------------------------

    @property
    def genes(self) -> frozenset[str]:
        return self.tree.leaf_labels()

    @property
    def species(self) -> frozenset[str]:
        return frozenset(self.sigma.values())

    def event_of(self, v: int) -> Optional[str]:
        return self.events.get(v)

    def is_binary(self) -> bool:
        return self.tree.is_binary()

    def forest(self) -> Forest:
        """The gene tree with its transfer edges removed (cached)."""
        if self._forest is None:
            self._forest = self.tree.remove_edges(self.transfer_edges)
        return self._forest

    def sigma_bar(self, x: int) -> frozenset[str]:
        """Species of the genes reachable from x once transfer edges are
        removed."""
        return frozenset(self.sigma[g] for g in self.forest().labels_below(x))

    def species_of_leaf_vertex(self, v: int) -> str:
        return self.sigma[self.tree.label_of(v)]

    # -- derived gene trees --------------------------------------------------

    def contract_edge(self, edge: Edge) -> "GeneTree":
        """Contract a non-transfer edge whose child is interior and not a
        transfer vertex; the child's children move up, the parent keeps
        its label."""
        u, v = edge
        if not self.tree.has_edge((u, v)):
            raise GeneTreeError(f"{edge} is not a tree edge")
        if edge in self.transfer_edges:
            raise GeneTreeError("cannot contract a transfer edge")
        if self.tree.is_leaf(v):
            raise GeneTreeError("cannot contract a leaf edge")
        if self.events[v] == TRANSFER:
            raise GeneTreeError(
                "cannot contract an edge whose child is a transfer vertex")
        parent = {w: self.tree.parent_of(w) for w in self.tree.vertices() if w != v}
        for c in self.tree.children_of(v):
            parent[c] = u
        labels = {w: self.tree.label_of(w) for w in self.tree.leaves()}
        names = {w: n for w, n in self.tree.names().items() if w != v}
        tree = RootedTree(parent, labels, names)
        events = {w: ev for w, ev in self.events.items() if w != v}
        return GeneTree(tree, events, self.transfer_edges, self.sigma)

    def __repr__(self) -> str:
        return (f"<GeneTree {len(self.tree)} vertices, "
                f"{len(self.transfer_edges)} transfer edge(s), "
                f"species {sorted(self.species)}>")


@dataclass(frozen=True)
class ObservabilityReport:
    """Per-axiom verdicts; empty violation tuples mean the axiom holds.

    ``o3A`` is None unless the restricted check was requested.
    ``multi_transfer_vertices`` flags transfer vertices with several
    flagged out-edges; the data model permits them, but they are unusual
    enough to surface.
    """

    o1: tuple[int, ...] = ()
    o2: tuple[int, ...] = ()
    o3a: tuple[int, ...] = ()
    o3b: tuple[Edge, ...] = ()
    o3A: Optional[tuple[int, ...]] = None
    multi_transfer_vertices: tuple[int, ...] = ()

    @property
    def ok(self) -> bool:
        extra = self.o3A if self.o3A is not None else ()
        return not (self.o1 or self.o2 or self.o3a or self.o3b or extra)

    def failed_axioms(self) -> tuple[str, ...]:
        out = []
        for name, vs in (("O1", self.o1), ("O2", self.o2), ("O3a", self.o3a),
                         ("O3b", self.o3b)):
            if vs:
                out.append(name)
        if self.o3A:
            out.append("O3A")
        return tuple(out)

    def as_dict(self) -> dict:
        d = {
            "O1": sorted(self.o1),
            "O2": sorted(self.o2),
            "O3a": sorted(self.o3a),
            "O3b": sorted(self.o3b),
        }
        if self.o3A is not None:
            d["O3A"] = sorted(self.o3A)
        return d


def check_observability(g: GeneTree, restricted: bool = False) -> ObservabilityReport:
    """Evaluate O1, O2, O3a, O3b (and O3A when ``restricted``)."""
    tree = g.tree
    o1 = []
    for v in tree.vertices():
        if tree.is_leaf(v):
            continue
        if len(tree.children_of(v)) < 2:
            o1.append(v)

    o2 = []
    multi = []
    flagged = set(g.transfer_edges)
    for v in tree.vertices():
        if g.event_of(v) != TRANSFER:
            continue
        outs = [(v, c) for c in tree.children_of(v)]
        n_flagged = sum(1 for e in outs if e in flagged)
        if n_flagged == 0 or n_flagged == len(outs):
            o2.append(v)
        if n_flagged >= 2:
            multi.append(v)

    o3a = []
    o3A: list[int] = []
    for v in tree.vertices():
        if g.event_of(v) != SPECIATION:
            continue
        kids = tree.children_of(v)
        sets = [g.sigma_bar(c) for c in kids]
        pairs_disjoint = [(i, j) for i in range(len(kids))
                          for j in range(i + 1, len(kids))
                          if not (sets[i] & sets[j])]
        if not pairs_disjoint:
            o3a.append(v)
        n_pairs = len(kids) * (len(kids) - 1) // 2
        if restricted and len(pairs_disjoint) < n_pairs:
            o3A.append(v)

    o3b = []
    for (u, v) in g.transfer_edges:
        if g.sigma_bar(u) & g.sigma_bar(v):
            o3b.append((u, v))

    return ObservabilityReport(
        o1=tuple(o1), o2=tuple(o2), o3a=tuple(o3a), o3b=tuple(o3b),
        o3A=tuple(o3A) if restricted else None,
        multi_transfer_vertices=tuple(multi))


@dataclass(frozen=True)
class PartitionReport:
    """Leaf-label blocks below the forest component roots and whether they
    partition the gene set.  A non-partition outcome signals an O2-style
    precondition failure on the input, not a crash."""

    blocks: tuple[frozenset[str], ...]
    is_partition: bool
    uncovered: frozenset[str] = field(default_factory=frozenset)
    unlabeled: tuple[int, ...] = ()


def component_partition(g: GeneTree) -> PartitionReport:
    """Leaf sets below the component roots of the transfer-free forest."""
    forest = g.forest()
    blocks = []
    unlabeled: list[int] = []
    covered: set[str] = set()
    overlap = False
    for r in forest.roots():
        below = forest.leaves_below(r)
        labs = set()
        for v in below:
            try:
                labs.add(g.tree.label_of(v))
            except TreeError:
                unlabeled.append(v)
        if labs & covered:
            overlap = True
        covered |= labs
        blocks.append(frozenset(labs))
    uncovered = frozenset(g.genes - covered)
    ok = not overlap and not uncovered and not unlabeled and all(blocks)
    return PartitionReport(
        blocks=tuple(sorted(blocks, key=lambda b: sorted(b))),
        is_partition=ok,
        uncovered=uncovered,
        unlabeled=tuple(sorted(unlabeled)))
