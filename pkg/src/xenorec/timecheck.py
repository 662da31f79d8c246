"""Time-consistency of a reconciliation map via constraint feasibility.

A map is time-consistent when real-valued time maps exist for both trees
such that (T1) speciations and leaves share the time of their image
vertex, and (T2) a duplication/transfer mapped to a species edge falls
strictly inside that edge's time interval.  Time maps grow strictly from
root to leaves in both trees, and the gene tree's order includes its
transfer edges.

The checker builds a constraint graph: T1 merges gene vertices with
their image vertices into equality classes; strict precedence arcs come
from every tree edge (both trees, planted root included) and from the
two inequalities of T2.  The map is feasible iff the class digraph is
acyclic; a witness assignment reads off longest-path levels, an
infeasibility verdict returns one offending cycle with per-arc
provenance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .events import DUPLICATION, SPECIATION, TRANSFER, GeneTree
from .reconcile import (PlantedSpeciesTree, ReconciliationMap,
                        ReconciliationError, validate_map)
from .trees import is_edge_locus

GENE = "gene"
SPECIES = "species"

ARC_GENE_EDGE = "gene-tree-edge"
ARC_SPECIES_EDGE = "species-tree-edge"
ARC_INTERVAL_TOP = "event-after-edge-top"
ARC_INTERVAL_BOTTOM = "event-before-edge-bottom"

Node = tuple[str, int]


@dataclass(frozen=True)
class ConstraintArc:
    """Strict precedence: time(src) < time(dst)."""

    src: Node
    dst: Node
    kind: str


@dataclass(frozen=True)
class TimeAssignment:
    """Witness time maps (larger numbers are later)."""

    tau_gene: dict[int, float]
    tau_species: dict[int, float]

    def satisfies(self, g: GeneTree, S: PlantedSpeciesTree,
                  mu: ReconciliationMap) -> bool:
        """Direct re-evaluation of the defining conditions."""
        for (u, v) in g.tree.edges():
            if not self.tau_gene[v] > self.tau_gene[u]:
                return False
        for (u, v) in S.tree.edges():
            if not self.tau_species[v] > self.tau_species[u]:
                return False
        for v in g.tree.vertices():
            ev = g.event_of(v)
            if ev in (SPECIATION, None):
                img = mu.images[v]
                if is_edge_locus(img):
                    return False
                if self.tau_gene[v] != self.tau_species[img]:
                    return False
            elif ev in (DUPLICATION, TRANSFER):
                img = mu.images[v]
                if not is_edge_locus(img):
                    return False
                top, bottom = img
                if not (self.tau_species[bottom] > self.tau_gene[v]
                        > self.tau_species[top]):
                    return False
        return True


@dataclass(frozen=True)
class Infeasible:
    """No time maps exist; ``cycle`` is one closed chain of strict arcs
    (endpoints quotiented by the T1 equalities)."""

    cycle: tuple[ConstraintArc, ...]


class ConstraintGraph:
    """Equality classes plus strict arcs between them."""

    def __init__(self, g: GeneTree, S: PlantedSpeciesTree,
                 mu: ReconciliationMap):
        self.nodes: list[Node] = (
            [(GENE, v) for v in g.tree.vertices()]
            + [(SPECIES, w) for w in S.tree.vertices()])
        self._parent: dict[Node, Node] = {n: n for n in self.nodes}
        self.arcs: list[ConstraintArc] = []

        for v in g.tree.vertices():
            ev = g.event_of(v)
            if ev == SPECIATION or ev is None:
                self._union((GENE, v), (SPECIES, mu.images[v]))
        for (u, v) in g.tree.edges():
            self.arcs.append(ConstraintArc((GENE, u), (GENE, v), ARC_GENE_EDGE))
        for (u, v) in S.tree.edges():
            self.arcs.append(ConstraintArc((SPECIES, u), (SPECIES, v),
                                           ARC_SPECIES_EDGE))
        for v in g.tree.vertices():
            if g.event_of(v) in (DUPLICATION, TRANSFER):
                top, bottom = mu.images[v]
                self.arcs.append(ConstraintArc((SPECIES, top), (GENE, v),
                                               ARC_INTERVAL_TOP))
                self.arcs.append(ConstraintArc((GENE, v), (SPECIES, bottom),
                                               ARC_INTERVAL_BOTTOM))

    def find(self, n: Node) -> Node:
        while self._parent[n] != n:
            self._parent[n] = self._parent[self._parent[n]]
            n = self._parent[n]
        return n

    def _union(self, a: Node, b: Node) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # deterministic representative: smaller tuple wins
            lo, hi = sorted((ra, rb))
            self._parent[hi] = lo

    def class_digraph(self):
        adj: dict[Node, list[tuple[Node, ConstraintArc]]] = {}
        for n in self.nodes:
            adj.setdefault(self.find(n), [])
        for arc in self.arcs:
            a, b = self.find(arc.src), self.find(arc.dst)
            adj[a].append((b, arc))
        for a in adj:
            adj[a].sort(key=lambda item: item[0])
        return adj


def _find_cycle(adj) -> Optional[list[ConstraintArc]]:
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {n: WHITE for n in adj}
    stack_arcs: list[ConstraintArc] = []
    path: list[Node] = []

    def dfs(n: Node) -> Optional[list[ConstraintArc]]:
        color[n] = GRAY
        path.append(n)
        for (m, arc) in adj[n]:
            if color[m] == GRAY:
                idx = path.index(m)
                return stack_arcs[idx:] + [arc]
            if color[m] == WHITE:
                stack_arcs.append(arc)
                found = dfs(m)
                if found is not None:
                    return found
                stack_arcs.pop()
        path.pop()
        color[n] = BLACK
        return None

    for n in sorted(adj):
        if color[n] == WHITE:
            found = dfs(n)
            if found is not None:
                return found
    return None


def check_time_consistency(
        g: GeneTree, S: PlantedSpeciesTree,
        mu: ReconciliationMap) -> Union[TimeAssignment, Infeasible]:
    """Decide feasibility of (T1)/(T2) for a validated map.

    The map must pass the plain reconciliation axioms first; an invalid
    map is a domain error, not an infeasibility verdict.
    """
    report = validate_map(g, S, mu, restricted=False)
    if not report.ok:
        raise ReconciliationError(
            f"time check needs a valid reconciliation map; failed "
            f"{report.failed_axioms()}")

    graph = ConstraintGraph(g, S, mu)
    adj = graph.class_digraph()
    cycle = _find_cycle(adj)
    if cycle is not None:
        return Infeasible(cycle=tuple(cycle))

    # longest-path levels over the class DAG (Kahn order)
    indeg = {n: 0 for n in adj}
    for n in adj:
        for (m, _) in adj[n]:
            indeg[m] += 1
    level = {n: 0 for n in adj}
    queue = sorted(n for n in adj if indeg[n] == 0)
    order: list[Node] = []
    while queue:
        n = queue.pop(0)
        order.append(n)
        for (m, _) in adj[n]:
            level[m] = max(level[m], level[n] + 1)
            indeg[m] -= 1
            if indeg[m] == 0:
                queue.append(m)
        queue.sort()

    tau_gene = {v: float(level[graph.find((GENE, v))])
                for v in g.tree.vertices()}
    tau_species = {w: float(level[graph.find((SPECIES, w))])
                   for w in S.tree.vertices()}
    return TimeAssignment(tau_gene=tau_gene, tau_species=tau_species)
