"""Species-tree planting, reconciliation maps, and the end-to-end pipeline.

A reconciliation map sends every gene-tree vertex to a vertex or edge of
the *planted* species tree (an auxiliary root vertex and edge are grafted
above the original root so that events predating the first speciation
have somewhere to live).  The axioms:

* M1   -- leaves map to the species they reside in;
* M2.i -- speciations map exactly to the lca of their reachable species;
* M2.ii  -- duplications and transfers map to edges;
* M2.iii -- the two ends of a transfer edge have incomparable images;
* M2.iv  -- (restricted maps only) children of a speciation have pairwise
  incomparable images;
* M3   -- along every transfer-free ancestor pair, images are ordered:
  non-strictly when both events are duplication/transfer (M3.i),
  strictly otherwise (M3.ii).

``construct_map`` realizes the canonical assignment (leaf -> sigma,
speciation -> lca, dup/transfer -> the edge hanging that lca from its
parent).  ``validate_map`` is construction-agnostic so that hand-written
counterexample maps can be judged.  ``reconc_t`` chains species-triple
extraction, BUILD, planting, construction and validation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .build import Inconsistent, build
from .events import (DUPLICATION, SPECIATION, TRANSFER, GeneTree,
                     ObservabilityReport, check_observability)
from .trees import (ABOVE, BELOW, EQUAL, INCOMPARABLE, Edge, Locus,
                    RootedTree, TreeError, compare_loci, is_edge_locus,
                    locus_lower)
from .triples import TripleSet, species_triples

NO_SPECIES_TREE_MESSAGE = "There is no species tree for (T;t,σ)"


class ReconciliationError(ValueError):
    """Domain error in the reconciliation machinery."""


class ObservabilityError(ReconciliationError):
    """Input rejected before the pipeline; carries the axiom report."""

    def __init__(self, report: ObservabilityReport):
        self.report = report
        super().__init__(
            f"gene tree violates observability axioms: "
            f"{', '.join(report.failed_axioms())}")


class PlantedSpeciesTree:
    """A species tree with the extra root vertex and edge grafted on top."""

    __slots__ = ("tree", "planted_root", "inner_root")

    def __init__(self, tree: RootedTree, planted_root: int):
        kids = tree.children_of(planted_root)
        if tree.parent_of(planted_root) is not None or len(kids) != 1:
            raise ReconciliationError("planted root must be a unary root")
        self.tree = tree
        self.planted_root = planted_root
        self.inner_root = kids[0]

    @property
    def species(self) -> frozenset[str]:
        return self.tree.leaf_labels()

    @property
    def planted_edge(self) -> Edge:
        return (self.planted_root, self.inner_root)

    def lca_species(self, species: Iterable[str]) -> int:
        return self.tree.lca_labels(species)

    def edge_above(self, v: int) -> Edge:
        p = self.tree.parent_of(v)
        if p is None:
            raise ReconciliationError("the planted root has no edge above")
        return (p, v)

    def __repr__(self) -> str:
        return f"<PlantedSpeciesTree on {sorted(self.species)}>"


def plant(species_tree: RootedTree) -> PlantedSpeciesTree:
    """Add one vertex and one edge above the root.

    Rejects trees that already look planted (unary root): planting is not
    idempotent by design.
    """
    old_root = species_tree.root
    if len(species_tree.children_of(old_root)) == 1:
        raise ReconciliationError("tree already has a unary root; refusing to plant twice")
    new_root = max(species_tree.vertices()) + 1
    parent = {v: species_tree.parent_of(v) for v in species_tree.vertices()}
    parent[old_root] = new_root
    parent[new_root] = None
    labels = {v: species_tree.label_of(v) for v in species_tree.leaves()}
    names = species_tree.names()
    return PlantedSpeciesTree(RootedTree(parent, labels, names), new_root)


@dataclass(frozen=True)
class ReconciliationMap:
    """Total assignment of gene-tree vertices to species-tree loci."""

    images: Mapping[int, Locus]

    def image(self, v: int) -> Locus:
        return self.images[v]

    def image_kind(self, v: int) -> str:
        return "edge" if is_edge_locus(self.images[v]) else "vertex"

    def items(self):
        return sorted(self.images.items())


def construct_map(g: GeneTree, S: PlantedSpeciesTree) -> ReconciliationMap:
    """The canonical map: sigma on leaves, lca of reachable species on
    speciations, and for duplications/transfers the edge whose lower end
    is that lca (the planting guarantees the upper end exists)."""
    missing = g.species - S.species
    if missing:
        raise ReconciliationError(
            f"species absent from the species tree: {sorted(missing)}")
    images: dict[int, Locus] = {}
    for v in g.tree.vertices():
        if g.tree.is_leaf(v):
            images[v] = S.tree.vertex_of(g.species_of_leaf_vertex(v))
            continue
        bar = g.sigma_bar(v)
        if not bar:
            raise ReconciliationError(
                f"vertex {v} reaches no species; input violates the "
                f"component partition property")
        anchor = S.lca_species(bar)
        if g.event_of(v) == SPECIATION:
            images[v] = anchor
        else:
            images[v] = S.edge_above(anchor)
    return ReconciliationMap(images)


@dataclass(frozen=True)
class ValidationReport:
    """Violating vertices/edges/pairs per axiom; all-empty means valid.

    ``m2iv`` is None unless the restricted check was requested.  M3 is
    split: ``m3i`` collects ordered pairs of duplication/transfer vertices
    whose images are not <=-ordered, ``m3ii`` the remaining ancestor pairs
    whose images are not strictly ordered.
    """

    m1: tuple[int, ...] = ()
    m2i: tuple[int, ...] = ()
    m2ii: tuple[int, ...] = ()
    m2iii: tuple[Edge, ...] = ()
    m2iv: Optional[tuple[tuple[int, int, int], ...]] = None
    m3i: tuple[tuple[int, int], ...] = ()
    m3ii: tuple[tuple[int, int], ...] = ()

    @property
    def ok(self) -> bool:
        extra = self.m2iv if self.m2iv is not None else ()
        return not (self.m1 or self.m2i or self.m2ii or self.m2iii
                    or extra or self.m3i or self.m3ii)

    def failed_axioms(self) -> tuple[str, ...]:
        out = []
        for name, vs in (("M1", self.m1), ("M2.i", self.m2i),
                         ("M2.ii", self.m2ii), ("M2.iii", self.m2iii)):
            if vs:
                out.append(name)
        if self.m2iv:
            out.append("M2.iv")
        if self.m3i:
            out.append("M3.i")
        if self.m3ii:
            out.append("M3.ii")
        return tuple(out)


def _check_locus(S: PlantedSpeciesTree, locus: Locus) -> None:
    if is_edge_locus(locus):
        if not S.tree.has_edge(locus):  # type: ignore[arg-type]
            raise ReconciliationError(f"image {locus} is not a species-tree edge")
    elif not S.tree.has_vertex(locus):  # type: ignore[arg-type]
        raise ReconciliationError(f"image {locus} is not a species-tree vertex")


def validate_map(g: GeneTree, S: PlantedSpeciesTree, mu: ReconciliationMap,
                 restricted: bool = False) -> ValidationReport:
    """Judge an arbitrary total map against the axioms.

    Violations are data; only a non-total map or images outside the
    species tree raise.
    """
    for v in g.tree.vertices():
        if v not in mu.images:
            raise ReconciliationError(f"map is not total: vertex {v} unmapped")
        _check_locus(S, mu.images[v])

    stree = S.tree
    m1 = []
    for v in g.tree.leaves():
        want = stree.vertex_of(g.species_of_leaf_vertex(v))
        if mu.images[v] != want or is_edge_locus(mu.images[v]):
            m1.append(v)

    m2i = []
    m2ii = []
    for v in g.tree.vertices():
        ev = g.event_of(v)
        if ev == SPECIATION:
            bar = g.sigma_bar(v)
            if not bar or is_edge_locus(mu.images[v]) \
                    or mu.images[v] != S.lca_species(bar):
                m2i.append(v)
        elif ev in (DUPLICATION, TRANSFER):
            if not is_edge_locus(mu.images[v]):
                m2ii.append(v)

    m2iii = []
    for (x, y) in g.transfer_edges:
        if compare_loci(stree, mu.images[x], mu.images[y]) != INCOMPARABLE:
            m2iii.append((x, y))

    m2iv: Optional[list[tuple[int, int, int]]] = [] if restricted else None
    if restricted:
        for v in g.tree.vertices():
            if g.event_of(v) != SPECIATION:
                continue
            kids = g.tree.children_of(v)
            for i in range(len(kids)):
                for j in range(i + 1, len(kids)):
                    rel = compare_loci(stree, mu.images[kids[i]],
                                       mu.images[kids[j]])
                    if rel != INCOMPARABLE:
                        m2iv.append((v, kids[i], kids[j]))

    m3i = []
    m3ii = []
    forest = g.forest()
    verts = g.tree.vertices()
    for y in verts:
        if g.tree.is_leaf(y):
            continue
        for x in verts:
            if x == y or forest.order(x, y) != BELOW:
                continue
            rel = compare_loci(stree, mu.images[x], mu.images[y])
            both_dt = (g.event_of(x) in (DUPLICATION, TRANSFER)
                       and g.event_of(y) in (DUPLICATION, TRANSFER))
            if both_dt:
                if rel not in (EQUAL, BELOW):
                    m3i.append((x, y))
            else:
                if rel != BELOW:
                    m3ii.append((x, y))

    return ValidationReport(
        m1=tuple(m1), m2i=tuple(m2i), m2ii=tuple(m2ii), m2iii=tuple(m2iii),
        m2iv=tuple(m2iv) if m2iv is not None else None,
        m3i=tuple(m3i), m3ii=tuple(m3ii))


@dataclass(frozen=True)
class ReconcTResult:
    """Outcome of the pipeline: either a planted species tree with a valid
    map, or the BUILD inconsistency witness."""

    species_tree: Optional[PlantedSpeciesTree]
    map: Optional[ReconciliationMap]
    triples: TripleSet
    witness: Optional[dict] = None

    @property
    def ok(self) -> bool:
        return self.species_tree is not None

    @property
    def message(self) -> Optional[str]:
        return None if self.ok else NO_SPECIES_TREE_MESSAGE


def reconc_t(g: GeneTree, restricted: bool = False) -> ReconcTResult:
    """Decide species-tree existence and construct the witness pair.

    Admission: O1-O3 for binary inputs, plus O3A when restricted.
    Non-binary inputs are only decidable in restricted mode (consistency
    of the species triples characterizes restricted maps there; for
    plain maps on non-binary trees it characterizes nothing), so plain
    mode refuses them.
    """
    if not g.is_binary() and not restricted:
        raise ReconciliationError(
            "plain-mode inference requires a binary gene tree; rerun "
            "restricted for non-binary input")
    report = check_observability(g, restricted=restricted)
    if not report.ok:
        raise ObservabilityError(report)
    striples = species_triples(g)
    try:
        stree = build(striples, striples.labels | g.species)
    except Inconsistent as exc:
        return ReconcTResult(species_tree=None, map=None,
                             triples=striples, witness=exc.witness())
    planted = plant(stree)
    mu = construct_map(g, planted)
    check = validate_map(g, planted, mu, restricted=restricted)
    if not check.ok:
        raise ReconciliationError(
            f"constructed map failed validation ({check.failed_axioms()}); "
            f"this indicates a bug")
    return ReconcTResult(species_tree=planted, map=mu, triples=striples)


def lca_bound_holds(g: GeneTree, S: PlantedSpeciesTree,
                    mu: ReconciliationMap) -> bool:
    """Every image sits at or above the lca of the vertex's reachable
    species (edge images compared through their lower endpoint)."""
    for v in g.tree.vertices():
        bar = g.sigma_bar(v)
        if not bar:
            return False
        anchor = S.lca_species(bar)
        low = locus_lower(mu.images[v])
        if not S.tree.is_ancestor(anchor, low):
            return False
    return True


def lca_image_bound_holds(g: GeneTree, S: PlantedSpeciesTree,
                          mu: ReconciliationMap) -> bool:
    """For vertices v, w sharing a transfer-free component, the image of
    their forest lca sits at or above the species lca of their images
    (lower endpoints for edge images)."""
    forest = g.forest()
    for r, members in forest.components().items():
        for i, v in enumerate(members):
            for w in members[i + 1:]:
                anc = forest.lca([v, w])
                top = locus_lower(mu.images[anc])
                join = S.tree.lca([locus_lower(mu.images[v]),
                                   locus_lower(mu.images[w])])
                if not S.tree.is_ancestor(top, join):
                    return False
    return True
