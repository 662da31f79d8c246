"""True evolutionary scenarios and their observable gene trees.

A scenario runs a birth/death/transfer process for gene lineages down a
time-calibrated species tree (ages decrease from root to leaves): at
every species vertex each resident lineage speciates into all child
branches, duplications copy a lineage in place, transfers copy it into a
contemporaneous incomparable branch, losses end it.  The full gene tree
retains loss leaves and per-event ages, so it certifies the biological
feasibility of whatever it projects to.

``observable_part`` restricts the full tree to extant genes, suppresses
single-child vertices, and keeps the surviving event labels.  An
observable edge is flagged as a transfer edge iff its first hop in the
full tree is a transfer hop, i.e. the visible tail is the transfer event
itself.  A transfer whose untransferred copy left no extant descendant
is therefore invisible: the lineage appears to descend vertically while
having switched species.  Axiom-violating projections come back as
``Unobservable`` with the report attached.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Union

from .events import GeneTree, ObservabilityReport, check_observability
from .trees import RootedTree, TreeError

EV_SPECIATION = "s"
EV_DUPLICATION = "d"
EV_TRANSFER = "t"
EV_EXTANT = "o"
EV_LOSS = "x"

STEM = None  # top endpoint of the branch above the species root


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class TimedSpeciesTree:
    """Species tree with strictly decreasing vertex ages (root oldest,
    leaves youngest)."""

    tree: RootedTree
    ages: dict[int, float]

    def __post_init__(self):
        for v in self.tree.vertices():
            p = self.tree.parent_of(v)
            if p is not None and not self.ages[p] > self.ages[v]:
                raise TreeError(
                    f"ages must strictly decrease root-to-leaf; edge {(p, v)}")
            if self.ages[v] < 0:
                raise TreeError("ages must be nonnegative")

    @staticmethod
    def from_branch_lengths(tree: RootedTree,
                            lengths: dict[int, float]) -> "TimedSpeciesTree":
        """``lengths[v]`` is the length of the edge above v (ignored for
        the root).  Ages are heights above the deepest leaf."""
        depth: dict[int, float] = {tree.root: 0.0}
        for v in tree.preorder():
            if v != tree.root:
                depth[v] = depth[tree.parent_of(v)] + lengths[v]
        height = max(depth[v] for v in tree.leaves())
        ages = {v: height - depth[v] for v in tree.vertices()}
        return TimedSpeciesTree(tree, ages)

    def branch_interval(self, branch: tuple[Optional[int], int]) -> tuple[float, float]:
        """(young, old) ages delimiting a branch; the stem is unbounded
        above."""
        top, bottom = branch
        young = self.ages[bottom]
        old = float("inf") if top is STEM else self.ages[top]
        return young, old

    def branches(self) -> list[tuple[int, int]]:
        return list(self.tree.edges())

    def branch_alive_at(self, branch: tuple[int, int], age: float) -> bool:
        young, old = self.branch_interval(branch)
        return young < age < old

    def incomparable_branches(self, branch: tuple[Optional[int], int],
                              age: float) -> list[tuple[int, int]]:
        """Branches alive at ``age`` and ancestrally unrelated to
        ``branch``, sorted by child endpoint."""
        _, mine = branch
        out = []
        for (u, v) in self.branches():
            if (u, v) == branch:
                continue
            if not self.branch_alive_at((u, v), age):
                continue
            if self.tree.is_ancestor(v, mine) or self.tree.is_ancestor(mine, v):
                continue
            out.append((u, v))
        return sorted(out, key=lambda e: e[1])


@dataclass
class HistoryNode:
    """One event of the full gene tree.

    ``branch`` is the species edge the event sits in (``(STEM, root)``
    above the first speciation) for duplications, transfers and losses;
    for speciations and extant genes it is the species vertex itself.
    """

    id: int
    parent: Optional[int]
    event: str
    age: float
    branch: Union[tuple[Optional[int], int], int]
    transfer_child: Optional[int] = None


@dataclass(frozen=True)
class ScenarioConfig:
    dup_rate: float
    hgt_rate: float
    loss_rate: float
    seed: int
    max_genes: int = 64
    max_retries: int = 50
    stem_length: Optional[float] = None

    def __post_init__(self):
        if min(self.dup_rate, self.hgt_rate, self.loss_rate) < 0:
            raise ValueError("rates must be nonnegative")


class TrueHistory:
    """Full gene tree of a scenario, losses included."""

    def __init__(self, species: TimedSpeciesTree,
                 nodes: dict[int, HistoryNode], root_id: int,
                 gene_names: Optional[dict[int, str]] = None):
        self.species = species
        self.nodes = dict(nodes)
        self.root_id = root_id
        self._children: dict[int, list[int]] = {i: [] for i in self.nodes}
        for n in self.nodes.values():
            if n.parent is not None:
                self._children[n.parent].append(n.id)
        for i in self._children:
            self._children[i].sort()
        self.gene_names = dict(gene_names) if gene_names else self._default_names()

    def _default_names(self) -> dict[int, str]:
        by_species: dict[str, list[int]] = {}
        for i in sorted(self.nodes):
            n = self.nodes[i]
            if n.event == EV_EXTANT:
                lab = self.species.tree.label_of(n.branch)  # type: ignore[arg-type]
                by_species.setdefault(lab, []).append(i)
        names = {}
        for lab in sorted(by_species):
            for k, i in enumerate(by_species[lab], start=1):
                names[i] = f"{lab.lower()}_{k}"
        return names

    def children(self, i: int) -> tuple[int, ...]:
        return tuple(self._children[i])

    def extant(self) -> tuple[int, ...]:
        return tuple(i for i in sorted(self.nodes)
                     if self.nodes[i].event == EV_EXTANT)

    def species_of_extant(self, i: int) -> str:
        return self.species.tree.label_of(self.nodes[i].branch)  # type: ignore[arg-type]

    def validate(self) -> None:
        """Check the scenario invariants: event ages sit inside their
        residing branch, speciations sit exactly at species vertices, and
        transfers join contemporaneous incomparable branches."""
        stree = self.species.tree
        for n in self.nodes.values():
            if n.event in (EV_SPECIATION, EV_EXTANT):
                if not stree.has_vertex(n.branch):  # type: ignore[arg-type]
                    raise SimulationError(f"node {n.id}: bad species vertex")
                if self.species.ages[n.branch] != n.age:  # type: ignore[index]
                    raise SimulationError(
                        f"node {n.id}: speciation age differs from vertex age")
            else:
                young, old = self.species.branch_interval(n.branch)  # type: ignore[arg-type]
                if not young < n.age < old:
                    raise SimulationError(
                        f"node {n.id}: age {n.age} outside branch interval")
            if n.event == EV_TRANSFER:
                if n.transfer_child is None or n.transfer_child not in self._children[n.id]:
                    raise SimulationError(f"node {n.id}: missing transfer child")
                target = self.nodes[n.transfer_child]
                tb = target.branch if target.event not in (EV_SPECIATION, EV_EXTANT) \
                    else (stree.parent_of(target.branch), target.branch)  # type: ignore[arg-type]
                young, old = self.species.branch_interval(tb)  # type: ignore[arg-type]
                if not young <= n.age <= old:
                    raise SimulationError(
                        f"node {n.id}: transfer target not contemporaneous")
                mine = n.branch[1]  # type: ignore[index]
                if stree.is_ancestor(tb[1], mine) or stree.is_ancestor(mine, tb[1]):
                    raise SimulationError(
                        f"node {n.id}: transfer target not incomparable")


@dataclass(frozen=True)
class Unobservable:
    """The scenario's extant projection fails the observability axioms."""

    report: ObservabilityReport
    gene_tree: Optional[GeneTree] = None


def simulate(species: TimedSpeciesTree, cfg: ScenarioConfig) -> TrueHistory:
    """Run the seeded process; resample on extinction or gene-count
    overflow, up to the retry bound."""
    for attempt in range(cfg.max_retries):
        rng = random.Random(f"{cfg.seed}:{attempt}")
        hist = _run_once(species, cfg, rng)
        if hist is None:
            continue
        n_extant = len(hist.extant())
        if 1 <= n_extant <= cfg.max_genes:
            return hist
    raise SimulationError(
        f"no surviving scenario within {cfg.max_retries} attempts "
        f"(seed {cfg.seed})")


def _run_once(species: TimedSpeciesTree, cfg: ScenarioConfig,
              rng: random.Random) -> Optional[TrueHistory]:
    stree = species.tree
    root_age = species.ages[stree.root]
    stem = cfg.stem_length
    if stem is None:
        stem = 0.5 * root_age if root_age > 0 else 1.0
    nodes: dict[int, HistoryNode] = {}
    counter = [0]

    def new_node(parent, event, age, branch) -> int:
        nid = counter[0]
        counter[0] += 1
        nodes[nid] = HistoryNode(id=nid, parent=parent, event=event,
                                 age=age, branch=branch)
        return nid

    total_rate = cfg.dup_rate + cfg.hgt_rate + cfg.loss_rate
    # lineages to advance: (branch, current age, parent node id)
    work: list[tuple[tuple[Optional[int], int], float, Optional[int]]] = []
    root_holder: list[int] = []

    def settle(branch, age, parent) -> None:
        """Advance one lineage from ``age`` inside ``branch`` until its
        next event, creating that event's node and queueing follow-ups."""
        while True:
            if len(nodes) > 20000:
                raise SimulationError("runaway scenario")
            bottom = branch[1]
            bottom_age = species.ages[bottom]
            wait = rng.expovariate(total_rate) if total_rate > 0 else float("inf")
            t = age - wait
            if t <= bottom_age:
                # reached the branch end: speciate or go extant
                if stree.is_leaf(bottom):
                    nid = new_node(parent, EV_EXTANT, bottom_age, bottom)
                else:
                    nid = new_node(parent, EV_SPECIATION, bottom_age, bottom)
                    for c in reversed(stree.children_of(bottom)):
                        work.append(((bottom, c), bottom_age, nid))
                if parent is None:
                    root_holder.append(nid)
                return
            r = rng.random() * total_rate
            if r < cfg.dup_rate:
                nid = new_node(parent, EV_DUPLICATION, t, branch)
                if parent is None:
                    root_holder.append(nid)
                work.append((branch, t, nid))
                work.append((branch, t, nid))
                return
            if r < cfg.dup_rate + cfg.loss_rate:
                nid = new_node(parent, EV_LOSS, t, branch)
                if parent is None:
                    root_holder.append(nid)
                return
            targets = species.incomparable_branches(branch, t)
            if not targets:
                # transfer with nowhere to go: the lineage just continues
                age = t
                continue
            nid = new_node(parent, EV_TRANSFER, t, branch)
            if parent is None:
                root_holder.append(nid)
            target = targets[rng.randrange(len(targets))]
            work.append((branch, t, nid))          # untransferred copy
            work.append(("TRANSFER", target, t, nid))  # type: ignore[arg-type]
            return

    try:
        work.append(((STEM, stree.root), root_age + stem, None))
        while work:
            item = work.pop()
            if item[0] == "TRANSFER":
                _, branch, age, parent = item  # type: ignore[misc]
                before = counter[0]
                settle(branch, age, parent)
                nodes[parent].transfer_child = before
            else:
                branch, age, parent = item
                settle(branch, age, parent)
    except SimulationError:
        return None

    if not root_holder:
        return None
    hist = TrueHistory(species, nodes, root_holder[0])
    if not hist.extant():
        return None
    return hist


def observable_part(history: TrueHistory) -> Union[GeneTree, Unobservable]:
    """Restrict the full tree to extant genes.

    Suppresses single-child vertices, keeps interior event labels, flags
    an edge as a transfer edge iff its first hop in the full tree leaves
    the visible transfer vertex through its transferred child.
    """
    extant = set(history.extant())
    if not extant:
        raise SimulationError("history has no extant genes")

    keeps: dict[int, bool] = {}
    stack: list[tuple[int, bool]] = [(history.root_id, False)]
    while stack:
        i, ready = stack.pop()
        kids = history.children(i)
        if kids and not ready:
            stack.append((i, True))
            stack.extend((c, False) for c in kids)
        elif kids:
            keeps[i] = any(keeps[c] for c in kids)
        else:
            keeps[i] = history.nodes[i].event == EV_EXTANT

    def kept_children(i: int) -> list[int]:
        return [c for c in history.children(i) if keeps[c]]

    # find the observable root: first vertex from the top with >= 2 kept
    # children, or the single extant gene
    cur = history.root_id
    if not keeps[cur]:
        raise SimulationError("history root has no extant descendants")
    while True:
        kids = kept_children(cur)
        if len(kids) >= 2 or history.nodes[cur].event == EV_EXTANT:
            break
        cur = kids[0]
    obs_root = cur

    parent: dict[int, Optional[int]] = {obs_root: None}
    labels: dict[int, str] = {}
    events: dict[int, str] = {}
    flags: list[tuple[int, int]] = []

    def attach(node_id: int, visible_parent: Optional[int],
               first_hop: Optional[int]) -> None:
        """Walk down from ``node_id``, suppressing unary vertices.
        ``first_hop`` remembers the child of the visible parent through
        which this path began, to decide the transfer flag."""
        kids = kept_children(node_id)
        n = history.nodes[node_id]
        if len(kids) == 1 and n.event != EV_EXTANT:
            attach(kids[0], visible_parent, first_hop)
            return
        if node_id != obs_root:
            parent[node_id] = visible_parent
            pnode = history.nodes[visible_parent]  # type: ignore[index]
            if pnode.event == EV_TRANSFER and first_hop == pnode.transfer_child:
                flags.append((visible_parent, node_id))  # type: ignore[arg-type]
        if n.event == EV_EXTANT:
            labels[node_id] = history.gene_names[node_id]
            return
        events[node_id] = n.event
        for c in kids:
            attach(c, node_id, c)

    if history.nodes[obs_root].event == EV_EXTANT:
        labels[obs_root] = history.gene_names[obs_root]
    else:
        events[obs_root] = history.nodes[obs_root].event
        for c in kept_children(obs_root):
            attach(c, obs_root, c)

    tree = RootedTree(parent, labels)
    sigma = {history.gene_names[i]: history.species_of_extant(i)
             for i in extant}
    gene_tree = GeneTree(tree, events, flags, sigma)
    report = check_observability(gene_tree)
    if not report.ok:
        return Unobservable(report=report, gene_tree=gene_tree)
    return gene_tree
