"""Shared test utilities: canonical forms, instance harvesting, and an
independent re-implementation of the reconciliation axioms used to
cross-check the validator."""

from __future__ import annotations

import random
from itertools import combinations

from xenorec.events import (DUPLICATION, SPECIATION, TRANSFER, GeneTree,
                            check_observability)
from xenorec.reconcile import PlantedSpeciesTree, ReconciliationMap
from xenorec.simulate import (ScenarioConfig, SimulationError,
                              TimedSpeciesTree, Unobservable, observable_part,
                              simulate)
from xenorec.trees import RootedTree

SPECIES_POOL = ["A", "B", "C", "D", "E"]


def canonical_form(g: GeneTree):
    """Shape + events + transfer flags + sigma, independent of vertex ids
    and interior names."""
    tree = g.tree
    flagged = set(g.transfer_edges)

    def walk(v, flag):
        if tree.is_leaf(v):
            lab = tree.label_of(v)
            return ("leaf", lab, g.sigma[lab], flag)
        kids = tuple(sorted((walk(c, (v, c) in flagged)
                             for c in tree.children_of(v)), key=repr))
        return ("node", g.events[v], flag, kids)

    return walk(tree.root, False)


def gene_trees_equal(g1: GeneTree, g2: GeneTree) -> bool:
    return canonical_form(g1) == canonical_form(g2)


def random_timed_species_tree(rng: random.Random, n_species: int) -> TimedSpeciesTree:
    """Random binary topology by sequential joins, unit-scale lengths."""
    labels = SPECIES_POOL[:n_species]
    parent: dict[int, int | None] = {}
    leaf_labels: dict[int, str] = {}
    nodes = []
    for i, lab in enumerate(labels):
        parent[i] = None
        leaf_labels[i] = lab
        nodes.append(i)
    nxt = len(labels)
    while len(nodes) > 1:
        i = rng.randrange(len(nodes))
        a = nodes.pop(i)
        j = rng.randrange(len(nodes))
        b = nodes.pop(j)
        parent[a] = nxt
        parent[b] = nxt
        parent[nxt] = None
        nodes.append(nxt)
        nxt += 1
    tree = RootedTree(parent, leaf_labels)
    lengths = {v: 0.5 + rng.random() for v in tree.vertices()}
    return TimedSpeciesTree.from_branch_lengths(tree, lengths)


def harvest_instances(count: int, seed0: int = 0,
                      species_choices: tuple[int, ...] = (3, 3, 4, 4, 5),
                      max_genes: int = 8, hgt: float = 0.4,
                      dup: float = 0.3, loss: float = 0.3,
                      require_binary: bool = True,
                      require_transfer: bool = False) -> list[GeneTree]:
    """Seeded stream of observable gene trees within the size bounds."""
    out: list[GeneTree] = []
    seed = seed0
    guard = 0
    while len(out) < count:
        guard += 1
        if guard > 200 * count:
            raise RuntimeError("instance harvest is starving; relax filters")
        rng = random.Random(f"species:{seed}")
        sp = random_timed_species_tree(rng, rng.choice(species_choices))
        cfg = ScenarioConfig(dup_rate=dup, hgt_rate=hgt, loss_rate=loss,
                             seed=seed, max_genes=max_genes, max_retries=4)
        seed += 1
        try:
            hist = simulate(sp, cfg)
        except SimulationError:
            continue
        obs = observable_part(hist)
        if isinstance(obs, Unobservable):
            continue
        if len(obs.genes) > max_genes or len(obs.species) < 2:
            continue
        if require_binary and not obs.is_binary():
            continue
        if require_transfer and not obs.transfer_edges:
            continue
        out.append(obs)
    return out


def contract_to_nonbinary(g: GeneTree, rng: random.Random) -> GeneTree | None:
    """Contract random contractable edges until the tree goes non-binary
    while still passing the restricted observability axioms."""
    candidates = [(u, v) for (u, v) in g.tree.edges()
                  if (u, v) not in g.transfer_edges
                  and not g.tree.is_leaf(v)
                  and g.events[v] != TRANSFER]
    rng.shuffle(candidates)
    for (u, v) in candidates:
        try:
            cand = g.contract_edge((u, v))
        except Exception:
            continue
        if cand.is_binary():
            continue
        if check_observability(cand, restricted=True).ok:
            return cand
    return None


# -- independent axiom evaluation ------------------------------------------

def _ancestor_sets(tree: RootedTree) -> dict[int, frozenset[int]]:
    anc: dict[int, frozenset[int]] = {}
    for v in tree.preorder():
        p = tree.parent_of(v)
        anc[v] = frozenset([v]) if p is None else anc[p] | {v}
    return anc


def reference_failed_axioms(g: GeneTree, S: PlantedSpeciesTree,
                            mu: ReconciliationMap,
                            restricted: bool = False) -> set[str]:
    """Re-derive the axiom verdicts from their definitions, sharing no
    code with the validator.  Returns the set of failed axiom ids."""
    stree = S.tree
    anc = _ancestor_sets(stree)

    def below_eq(x: int, y: int) -> bool:  # x <= y in S
        return y in anc[x]

    def span(locus):
        if isinstance(locus, tuple):
            return locus[0], locus[1]
        return locus, locus

    def comparable(l1, l2) -> bool:
        e1, e2 = isinstance(l1, tuple), isinstance(l2, tuple)
        u1, v1 = span(l1)
        u2, v2 = span(l2)
        if not e1 and not e2:
            return below_eq(l1, l2) or below_eq(l2, l1)
        if e1 and e2:
            if l1 == l2:
                return True
            return below_eq(v1, v2) or below_eq(v2, v1)
        # one vertex, one edge: x < e iff x <= lower(e); e < x iff upper(e) <= ... x >= upper
        if e1:
            l1, l2 = l2, l1
            u2, v2 = u1, v1
        return below_eq(l1, v2) or below_eq(u2, l1)

    def strictly_below(l1, l2) -> bool:  # l1 < l2 in the mixed order
        e1, e2 = isinstance(l1, tuple), isinstance(l2, tuple)
        u1, v1 = span(l1)
        u2, v2 = span(l2)
        if not e1 and not e2:
            return l1 != l2 and below_eq(l1, l2)
        if e1 and e2:
            return l1 != l2 and below_eq(v1, v2)
        if not e1 and e2:
            return below_eq(l1, v2)
        return below_eq(u1, l2)

    failed: set[str] = set()
    tree = g.tree

    for v in tree.leaves():
        want = stree.vertex_of(g.sigma[tree.label_of(v)])
        if mu.images[v] != want:
            failed.add("M1")

    # reachable species without crossing transfer edges, recomputed here
    flagged = set(g.transfer_edges)

    def reach_species(x: int) -> set[str]:
        out: set[str] = set()
        stack = [x]
        while stack:
            v = stack.pop()
            kids = [c for c in tree.children_of(v) if (v, c) not in flagged]
            if not kids and tree.is_leaf(v):
                out.add(g.sigma[tree.label_of(v)])
            stack.extend(kids)
        return out

    def lca_of_species(species) -> int:
        vs = [stree.vertex_of(s) for s in species]
        common = anc[vs[0]]
        for v in vs[1:]:
            common = common & anc[v]
        # deepest common ancestor
        return max(common, key=lambda w: len(anc[w]))

    for v in tree.vertices():
        ev = g.events.get(v)
        if ev == SPECIATION:
            bar = reach_species(v)
            if not bar or mu.images[v] != lca_of_species(sorted(bar)):
                failed.add("M2.i")
        elif ev in (DUPLICATION, TRANSFER):
            if not isinstance(mu.images[v], tuple):
                failed.add("M2.ii")

    for (x, y) in g.transfer_edges:
        if comparable(mu.images[x], mu.images[y]):
            failed.add("M2.iii")

    if restricted:
        for v in tree.vertices():
            if g.events.get(v) != SPECIATION:
                continue
            kids = tree.children_of(v)
            for a, b in combinations(kids, 2):
                if comparable(mu.images[a], mu.images[b]):
                    failed.add("M2.iv")

    # ancestor pairs within transfer-free components: walk up from x
    for x in tree.vertices():
        y = x
        while True:
            p = tree.parent_of(y)
            if p is None or (p, y) in flagged:
                break
            y = p
            both_dt = (g.events.get(x) in (DUPLICATION, TRANSFER)
                       and g.events.get(y) in (DUPLICATION, TRANSFER))
            ix, iy = mu.images[x], mu.images[y]
            if both_dt:
                if not (ix == iy or strictly_below(ix, iy)):
                    failed.add("M3.i")
            else:
                if not strictly_below(ix, iy):
                    failed.add("M3.ii")
    return failed
