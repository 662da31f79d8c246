"""Brute-force ground truth: exhaustive species-tree and map enumeration.

The decision pipeline claims that consistency of the informative species
triples characterizes the existence of a (restricted) reconciliation
map.  This module re-derives both sides by force: enumerate every
species-tree topology on the observed species (binary trees suffice for
existence, since displaying a triple set survives refinement) and test
each with the constructive map; optionally enumerate every axiom-shaped
map on micro instances.  Small label counts only, by design.
"""

from __future__ import annotations

from itertools import product
from typing import Iterator, Optional

from .build import is_consistent
from .events import DUPLICATION, SPECIATION, TRANSFER, GeneTree, check_observability
from .reconcile import (ObservabilityError, PlantedSpeciesTree,
                        ReconciliationError, ReconciliationMap, construct_map,
                        plant, validate_map)
from .trees import RootedTree
from .triples import species_triples

MAX_ENUM_LABELS = 8
MAX_ORACLE_SPECIES = 6


def double_factorial_count(n: int) -> int:
    """(2n-3)!! -- the number of rooted binary phylogenetic trees on n
    labels."""
    if n < 1:
        raise ValueError("need at least one label")
    if n <= 2:
        return 1
    out = 1
    k = 2 * n - 3
    while k > 1:
        out *= k
        k -= 2
    return out


def _binary_trees(labels: list[str]) -> Iterator[list]:
    """All rooted binary shapes as nested lists, by sequential leaf
    insertion into every edge plus the root-planting position."""
    if len(labels) == 1:
        yield labels[0]
        return
    first, rest = labels[0], labels[1:]

    def insert_everywhere(shape, leaf):
        # as a new root above the whole shape
        yield [shape, leaf]
        if isinstance(shape, list):
            left, right = shape
            for sub in insert_everywhere(left, leaf):
                yield [sub, right]
            for sub in insert_everywhere(right, leaf):
                yield [left, sub]

    shapes: list = [first]
    for leaf in rest:
        shapes = [s for old in shapes for s in insert_everywhere(old, leaf)]
    yield from shapes


def _set_partitions(items: list[str]) -> Iterator[list[list[str]]]:
    """Partitions into >= 2 nonempty blocks, deterministic order."""
    if len(items) < 2:
        return

    def parts(elems: list[str]) -> Iterator[list[list[str]]]:
        if not elems:
            yield []
            return
        head, tail = elems[0], elems[1:]
        for sub in parts(tail):
            for i in range(len(sub)):
                yield sub[:i] + [[head] + sub[i]] + sub[i + 1:]
            yield [[head]] + sub

    for p in parts(items):
        if len(p) >= 2:
            yield [sorted(block) for block in p]


def _all_trees(labels: list[str]) -> Iterator[list]:
    """All rooted phylogenetic shapes (multifurcations included)."""
    if len(labels) == 1:
        yield labels[0]
        return
    for partition in _set_partitions(labels):
        subgens = [list(_all_trees(sorted(block))) for block in partition]
        for choice in product(*subgens):
            yield list(choice)


def _shape_to_tree(shape) -> RootedTree:
    parent: dict[int, Optional[int]] = {}
    labels: dict[int, str] = {}
    counter = [0]

    def walk(node, par):
        vid = counter[0]
        counter[0] += 1
        parent[vid] = par
        if isinstance(node, str):
            labels[vid] = node
        else:
            for child in node:
                walk(child, vid)

    walk(shape, None)
    return RootedTree(parent, labels)


def enumerate_species_trees(labels, binary_only: bool = True) -> Iterator[RootedTree]:
    """Stream every rooted phylogenetic tree on ``labels``; duplicates-free
    up to isomorphism.  Hard cap at 8 labels."""
    labs = sorted(set(labels))
    if not 1 <= len(labs) <= MAX_ENUM_LABELS:
        raise ValueError(f"enumeration supports 1..{MAX_ENUM_LABELS} labels, "
                         f"got {len(labs)}")
    gen = _binary_trees(labs) if binary_only else _all_trees(labs)
    for shape in gen:
        yield _shape_to_tree(shape)


def exists_map_bruteforce(g: GeneTree, restricted: bool = False
                          ) -> tuple[bool, Optional[RootedTree]]:
    """Search every binary species tree on sigma(G) for one admitting a
    valid (restricted) map via the constructive assignment.

    Binary enumeration suffices for existence: a tree displaying the
    species triples refines to a binary one that still displays them,
    and the constructive map is then valid on it.
    """
    if len(g.species) > MAX_ORACLE_SPECIES:
        raise ValueError(f"oracle capped at {MAX_ORACLE_SPECIES} species")
    report = check_observability(g, restricted=restricted)
    if not report.ok:
        raise ObservabilityError(report)
    for stree in enumerate_species_trees(g.species, binary_only=True):
        planted = plant(stree)
        mu = construct_map(g, planted)
        if validate_map(g, planted, mu, restricted=restricted).ok:
            return True, stree
    return False, None


def check_theorem_equivalence(g: GeneTree, restricted: bool = False) -> bool:
    """Triple-set consistency must coincide with brute-force map
    existence; a False return certifies a bug on one side.

    Plain mode refuses non-binary gene trees: there the equivalence is
    simply not a theorem (valid maps can exist under inconsistent
    triples), so a plain-mode check would report spurious failures.
    """
    if not restricted and not g.is_binary():
        raise ValueError("plain-mode equivalence is only claimed for binary "
                         "gene trees; use restricted mode")
    consistent = is_consistent(species_triples(g), labels=g.species)
    exists, _ = exists_map_bruteforce(g, restricted=restricted)
    return consistent == exists


def enumerate_shaped_maps(g: GeneTree, S: PlantedSpeciesTree,
                          limit_vertices: int = 6) -> Iterator[ReconciliationMap]:
    """Every map with the M1/M2.i'/M2.ii shape: leaves at their species,
    speciations on vertices, duplications/transfers on edges.  Micro
    instances only."""
    verts = list(g.tree.vertices())
    if len(verts) > limit_vertices:
        raise ValueError(f"shaped-map enumeration capped at {limit_vertices} "
                         f"gene vertices")
    s_vertices = list(S.tree.vertices())
    s_edges = list(S.tree.edges())
    choices = []
    for v in verts:
        ev = g.event_of(v)
        if ev is None:
            choices.append([S.tree.vertex_of(g.species_of_leaf_vertex(v))])
        elif ev == SPECIATION:
            choices.append(s_vertices)
        else:
            choices.append(s_edges)
    for combo in product(*choices):
        yield ReconciliationMap(dict(zip(verts, combo)))


def exists_map_exhaustive(g: GeneTree, S: PlantedSpeciesTree,
                          restricted: bool = False,
                          limit_vertices: int = 6) -> bool:
    """Weaker, construction-independent oracle: does any axiom-shaped map
    to this particular species tree validate?"""
    for mu in enumerate_shaped_maps(g, S, limit_vertices=limit_vertices):
        if validate_map(g, S, mu, restricted=restricted).ok:
            return True
    return False
