"""Rooted triples: display tests, extraction, and the informative sets.

A rooted triple ``ab|c`` states that a and b are closer to each other
than either is to c; a tree displays it when lca(a, b) lies strictly
below lca(a, b, c), and a forest displays it when one of its components
does.

The informative triples of an event-labeled gene tree combine

* ``R0`` -- triples displayed by the transfer-free forest, rooted at a
  speciation, over three pairwise distinct species, and
* ``R_i`` (one set per transfer edge ``(x, y)``) -- every combinatorial
  choice of a same-side pair against an opposite-side outgroup, again
  over pairwise distinct species.  These need not be displayed anywhere.

Mapping the union through sigma gives the species triple set whose
consistency decides species-tree existence.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Union

from .events import SPECIATION, GeneTree
from .trees import Forest, RootedTree

TreeLike = Union[RootedTree, Forest]


@dataclass(frozen=True, order=True)
class Triple:
    """Canonical rooted triple: the pair is stored sorted."""

    a: str
    b: str
    c: str

    @staticmethod
    def make(x: str, y: str, z: str) -> "Triple":
        if len({x, y, z}) != 3:
            raise ValueError(f"triple labels must be distinct: {x, y, z}")
        a, b = sorted((x, y))
        return Triple(a, b, z)

    def labels(self) -> frozenset[str]:
        return frozenset((self.a, self.b, self.c))

    def __str__(self) -> str:
        return f"{self.a} {self.b} | {self.c}"


class TripleSet:
    """An immutable set of triples over one label alphabet."""

    __slots__ = ("triples", "labels")

    def __init__(self, triples: Iterable[Triple]):
        self.triples = frozenset(triples)
        labs: set[str] = set()
        for t in self.triples:
            labs |= t.labels()
        self.labels = frozenset(labs)

    def __iter__(self) -> Iterator[Triple]:
        return iter(sorted(self.triples))

    def __len__(self) -> int:
        return len(self.triples)

    def __contains__(self, t: Triple) -> bool:
        return t in self.triples

    def __eq__(self, other) -> bool:
        if isinstance(other, TripleSet):
            return self.triples == other.triples
        return self.triples == other

    def __hash__(self) -> int:
        return hash(self.triples)

    def __or__(self, other: "TripleSet") -> "TripleSet":
        return TripleSet(self.triples | other.triples)

    def restrict_to(self, labels: Iterable[str]) -> "TripleSet":
        keep = set(labels)
        return TripleSet(t for t in self.triples if t.labels() <= keep)

    def __repr__(self) -> str:
        return "{" + ", ".join(str(t) for t in self) + "}"


def _lca_of_labels(obj: TreeLike, labels: Iterable[str]):
    if isinstance(obj, Forest):
        return obj.lca([obj.tree.vertex_of(lab) for lab in labels])
    return obj.lca_labels(labels)


def displays(obj: TreeLike, triple: Triple) -> bool:
    """True iff the tree (or one forest component) displays the triple."""
    tree = obj.tree if isinstance(obj, Forest) else obj
    for lab in (triple.a, triple.b, triple.c):
        if lab not in tree.leaf_labels():
            return False
    va, vb, vc = (tree.vertex_of(lab) for lab in (triple.a, triple.b, triple.c))
    if isinstance(obj, Forest):
        r = obj.component_root_of(va)
        if obj.component_root_of(vb) != r or obj.component_root_of(vc) != r:
            return False
    pair = tree.lca([va, vb])
    whole = tree.lca([va, vb, vc])
    return pair != whole and tree.is_ancestor(whole, pair)


def displayed_triples(obj: TreeLike) -> TripleSet:
    """All triples displayed by a tree or forest."""
    tree = obj.tree if isinstance(obj, Forest) else obj
    if isinstance(obj, Forest):
        groups = [sorted(obj.labels_below(r)) for r in obj.roots()]
    else:
        groups = [sorted(tree.leaf_labels())]
    found = []
    for labs in groups:
        for x, y, z in combinations(labs, 3):
            vx, vy, vz = tree.vertex_of(x), tree.vertex_of(y), tree.vertex_of(z)
            whole = tree.lca([vx, vy, vz])
            for (p, q, out_l, out_v) in (((vx, vy), (x, y), z, vz),
                                         ((vx, vz), (x, z), y, vy),
                                         ((vy, vz), (y, z), x, vx)):
                if tree.lca(list(p)) != whole:
                    found.append(Triple.make(q[0], q[1], out_l))
                    break
    return TripleSet(found)


@dataclass(frozen=True)
class InformativeTriples:
    """R0, the per-transfer-edge sets R_1..R_h (input order), and their
    union."""

    r0: TripleSet
    per_edge: tuple[TripleSet, ...]
    union: TripleSet


def iter_transfer_triples(g: GeneTree, edge_index: int) -> Iterator[Triple]:
    """Lazily yield the cross-pairs of transfer edge ``edge_index`` (base 0):
    a pair from one side with an outgroup from the other, all three species
    distinct.  The full set is cubic in the worst case, hence the iterator."""
    x, y = g.transfer_edges[edge_index]
    forest = g.forest()
    side_x = sorted(forest.labels_below(x))
    side_y = sorted(forest.labels_below(y))
    for pair_side, out_side in ((side_x, side_y), (side_y, side_x)):
        for a, b in combinations(pair_side, 2):
            if g.sigma[a] == g.sigma[b]:
                continue
            for c in out_side:
                if g.sigma[c] in (g.sigma[a], g.sigma[b]):
                    continue
                yield Triple.make(a, b, c)


def informative_triples(g: GeneTree) -> InformativeTriples:
    """The informative gene triples of an event-labeled gene tree."""
    forest = g.forest()
    r0 = []
    for t in displayed_triples(forest):
        if len({g.sigma[t.a], g.sigma[t.b], g.sigma[t.c]}) != 3:
            continue
        root = _lca_of_labels(forest, t.labels())
        if g.event_of(root) == SPECIATION:
            r0.append(t)
    per_edge = tuple(TripleSet(iter_transfer_triples(g, i))
                     for i in range(len(g.transfer_edges)))
    union = TripleSet(r0)
    for ts in per_edge:
        union = union | ts
    return InformativeTriples(r0=TripleSet(r0), per_edge=per_edge, union=union)


def species_triples(g: GeneTree) -> TripleSet:
    """Image of the informative triples under sigma, deduplicated."""
    out = []
    for t in informative_triples(g).union:
        out.append(Triple.make(g.sigma[t.a], g.sigma[t.b], g.sigma[t.c]))
    return TripleSet(out)
