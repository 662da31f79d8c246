"""Rooted phylogenetic trees, forests, and the mixed vertex/edge order.

Vertices are opaque integer ids, stable across derived structures:
``restrict`` and ``remove_edges`` reuse the ids of the originating tree.
Children are reported sorted by id, so a parser that assigns ids in
document order round-trips child order for free.  All trees are immutable
after construction; every operation returns a new object.

Loci generalize positions in a tree: a locus is either a vertex id or a
directed edge ``(parent, child)``.  The partial order on loci extends the
ancestor order: for an edge e = (u, v), a vertex x lies strictly below e
iff x <= v, and strictly above iff u <= x; two edges compare through their
child endpoints.  Edges are never equal to vertices.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Mapping, Optional, Union

Edge = tuple[int, int]
Locus = Union[int, Edge]

EQUAL = "equal"
BELOW = "strictly-below"
ABOVE = "strictly-above"
INCOMPARABLE = "incomparable"


class TreeError(ValueError):
    """Structurally invalid tree, or a query outside the tree's domain."""


def is_edge_locus(locus: Locus) -> bool:
    return isinstance(locus, tuple)


class RootedTree:
    """A rooted tree with labeled leaves and optional vertex names.

    ``parent`` maps every vertex id to its parent id (``None`` for the
    root).  ``labels`` maps every leaf (childless vertex) to its label;
    labels must be unique.  ``names`` may carry display names for interior
    vertices (leaves are addressed by their label).
    """

    __slots__ = ("_parent", "_children", "_labels", "_names", "_root",
                 "_by_label", "_depth")

    def __init__(self, parent: Mapping[int, Optional[int]],
                 labels: Mapping[int, str],
                 names: Optional[Mapping[int, str]] = None):
        self._parent = dict(parent)
        roots = [v for v, p in self._parent.items() if p is None]
        if len(roots) != 1:
            raise TreeError(f"tree must have exactly one root, found {len(roots)}")
        self._root = roots[0]

        children: dict[int, list[int]] = {v: [] for v in self._parent}
        for v, p in self._parent.items():
            if p is None:
                continue
            if p not in self._parent:
                raise TreeError(f"parent {p} of vertex {v} is not a vertex")
            children[p].append(v)
        self._children = {v: tuple(sorted(cs)) for v, cs in children.items()}

        # connectivity + acyclicity: everything reachable from the root
        reach: set[int] = set()
        stack = [self._root]
        while stack:
            v = stack.pop()
            if v in reach:
                raise TreeError("parent relation contains a cycle")
            reach.add(v)
            stack.extend(children[v])
        if len(reach) != len(self._parent):
            raise TreeError("tree is not connected (cycle or orphan vertices)")

        leaves = {v for v, cs in self._children.items() if not cs}
        self._labels = dict(labels)
        if set(self._labels) != leaves:
            raise TreeError("labels must cover exactly the leaves")
        if len(set(self._labels.values())) != len(self._labels):
            raise TreeError("leaf labels must be unique")
        self._by_label = {lab: v for v, lab in self._labels.items()}
        self._names = dict(names) if names else {}

        self._depth: dict[int, int] = {self._root: 0}
        for v in self.preorder():
            if v != self._root:
                self._depth[v] = self._depth[self._parent[v]] + 1

    # -- basic structure -------------------------------------------------

    @property
    def root(self) -> int:
        return self._root

    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted(self._parent))

    def edges(self) -> tuple[Edge, ...]:
        """All edges as (parent, child), in preorder."""
        return tuple((self._parent[v], v) for v in self.preorder()
                     if v != self._root)

    def has_vertex(self, v: int) -> bool:
        return v in self._parent

    def has_edge(self, e: Edge) -> bool:
        u, v = e
        return v in self._parent and self._parent[v] == u

    def parent_of(self, v: int) -> Optional[int]:
        self._require(v)
        return self._parent[v]

    def children_of(self, v: int) -> tuple[int, ...]:
        self._require(v)
        return self._children[v]

    def is_leaf(self, v: int) -> bool:
        self._require(v)
        return not self._children[v]

    def leaves(self) -> tuple[int, ...]:
        return tuple(sorted(self._by_label.values()))

    def leaf_labels(self) -> frozenset[str]:
        return frozenset(self._by_label)

    def label_of(self, v: int) -> str:
        self._require(v)
        if v not in self._labels:
            raise TreeError(f"vertex {v} is not a leaf")
        return self._labels[v]

    def vertex_of(self, label: str) -> int:
        if label not in self._by_label:
            raise TreeError(f"no leaf labeled {label!r}")
        return self._by_label[label]

    def name_of(self, v: int) -> Optional[str]:
        """Display name: leaf label, explicit name, or None."""
        self._require(v)
        if v in self._labels:
            return self._labels[v]
        return self._names.get(v)

    def names(self) -> dict[int, str]:
        return dict(self._names)

    def __len__(self) -> int:
        return len(self._parent)

    def __repr__(self) -> str:
        return f"<RootedTree {len(self)} vertices on {sorted(self._by_label)}>"

    def _require(self, v: int) -> None:
        if v not in self._parent:
            raise TreeError(f"vertex {v} is not in the tree")

    # -- traversal and order ---------------------------------------------

    def preorder(self) -> Iterator[int]:
        stack = [self._root]
        while stack:
            v = stack.pop()
            yield v
            stack.extend(reversed(self._children[v]))

    def postorder(self) -> Iterator[int]:
        out = list(self.preorder())
        return iter(reversed(out))

    def depth_of(self, v: int) -> int:
        self._require(v)
        return self._depth[v]

    def is_ancestor(self, u: int, v: int) -> bool:
        """True iff u >= v (u on the root path of v, including u == v)."""
        self._require(u)
        self._require(v)
        while v is not None and self._depth[v] > self._depth[u]:
            v = self._parent[v]
        return v == u

    def lca(self, vertices: Iterable[int]) -> int:
        vs = list(vertices)
        if not vs:
            raise TreeError("lca of an empty set is undefined")
        for v in vs:
            self._require(v)
        a = vs[0]
        for b in vs[1:]:
            a = self._lca2(a, b)
        return a

    def _lca2(self, a: int, b: int) -> int:
        while self._depth[a] > self._depth[b]:
            a = self._parent[a]
        while self._depth[b] > self._depth[a]:
            b = self._parent[b]
        while a != b:
            a = self._parent[a]
            b = self._parent[b]
        return a

    def lca_labels(self, labels: Iterable[str]) -> int:
        return self.lca(self.vertex_of(lab) for lab in labels)

    def leaves_below(self, v: int) -> tuple[int, ...]:
        """Leaf ids in the subtree rooted at v (v itself if a leaf), sorted."""
        self._require(v)
        out = []
        stack = [v]
        while stack:
            x = stack.pop()
            if not self._children[x]:
                out.append(x)
            else:
                stack.extend(self._children[x])
        return tuple(sorted(out))

    def labels_below(self, v: int) -> frozenset[str]:
        return frozenset(self._labels[x] for x in self.leaves_below(v)
                         if x in self._labels)

    # -- shape predicates --------------------------------------------------

    def is_binary(self) -> bool:
        return all(len(self._children[v]) in (0, 2) for v in self._parent)

    def is_phylogenetic(self, planted_ok: bool = False) -> bool:
        """No interior vertex with a single child; the root may keep one
        child only when ``planted_ok`` is set."""
        for v, cs in self._children.items():
            if len(cs) == 1 and not (planted_ok and v == self._root):
                return False
        return True

    # -- derived trees -----------------------------------------------------

    def restrict(self, labels: Iterable[str], keep_root: bool = False) -> "RootedTree":
        """Restriction to a nonempty subset of leaf labels.

        Forms the minimal subtree spanning the chosen leaves, then
        suppresses single-child vertices.  Vertex ids are inherited from
        this tree.  With ``keep_root`` the original root survives as a
        single-child top vertex (planted semantics).
        """
        want = set(labels)
        if not want:
            raise TreeError("cannot restrict to an empty leaf set")
        missing = want - set(self._by_label)
        if missing:
            raise TreeError(f"labels not in tree: {sorted(missing)}")
        keep_leaves = {self._by_label[lab] for lab in want}

        # number of child branches of v leading to kept leaves
        branches: dict[int, int] = {v: 0 for v in self._parent}
        carries: dict[int, bool] = {v: False for v in self._parent}
        for v in self.postorder():
            if v in keep_leaves:
                carries[v] = True
            else:
                cnt = sum(1 for c in self._children[v] if carries[c])
                branches[v] = cnt
                carries[v] = cnt > 0

        top = self.lca(keep_leaves)
        kept = set(keep_leaves)
        kept.update(v for v in self._parent
                    if branches[v] >= 2 and self.is_ancestor(top, v))
        kept.add(top)
        if keep_root:
            kept.add(self._root)

        parent: dict[int, Optional[int]] = {}
        for v in kept:
            if v == self._root or (v == top and not keep_root):
                parent[v] = None
                continue
            p = self._parent[v]
            while p is not None and p not in kept:
                p = self._parent[p]
            parent[v] = p
        labels_out = {v: self._labels[v] for v in keep_leaves}
        names_out = {v: n for v, n in self._names.items() if v in kept}
        return RootedTree(parent, labels_out, names_out)

    def remove_edges(self, edges: Iterable[Edge]) -> "Forest":
        return Forest(self, edges)

    # -- isomorphism -------------------------------------------------------

    def _canonical(self, v: int):
        if not self._children[v]:
            return self._labels[v]
        return tuple(sorted((self._canonical(c) for c in self._children[v]),
                            key=repr))

    def isomorphic(self, other: "RootedTree") -> bool:
        """Equality up to vertex ids (leaf labels anchor the comparison)."""
        return self._canonical(self._root) == other._canonical(other.root)


class Forest:
    """A tree with a set of edges removed; vertex set unchanged.

    The within-component order agrees with the originating tree's order;
    vertices in different components are incomparable.  Component roots
    are the original root plus the child endpoint of every removed edge.
    """

    __slots__ = ("tree", "removed", "_comp")

    def __init__(self, tree: RootedTree, removed: Iterable[Edge]):
        self.tree = tree
        rem = []
        for e in removed:
            if not tree.has_edge(tuple(e)):
                raise TreeError(f"edge {e} is not in the tree")
            if tuple(e) not in rem:
                rem.append(tuple(e))
        self.removed = tuple(rem)
        cut = set(self.removed)
        self._comp: dict[int, int] = {}
        for r in sorted([tree.root] + [v for (_, v) in self.removed]):
            stack = [r]
            while stack:
                x = stack.pop()
                self._comp[x] = r
                for c in tree.children_of(x):
                    if (x, c) not in cut:
                        stack.append(c)

    def roots(self) -> tuple[int, ...]:
        return tuple(sorted(set(self._comp.values())))

    def component_root_of(self, v: int) -> int:
        self.tree._require(v)
        return self._comp[v]

    def same_component(self, u: int, v: int) -> bool:
        return self._comp[u] == self._comp[v]

    def components(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {r: [] for r in self.roots()}
        for v in self.tree.vertices():
            out[self._comp[v]].append(v)
        return {r: tuple(vs) for r, vs in out.items()}

    def children_of(self, v: int) -> tuple[int, ...]:
        cut = set(self.removed)
        return tuple(c for c in self.tree.children_of(v) if (v, c) not in cut)

    def is_forest_leaf(self, v: int) -> bool:
        return not self.children_of(v)

    def order(self, u: int, v: int) -> str:
        """Order of two vertices in the forest (EQUAL/BELOW/ABOVE/INCOMPARABLE)."""
        if not self.same_component(u, v):
            return INCOMPARABLE
        if u == v:
            return EQUAL
        if self.tree.is_ancestor(v, u):
            return BELOW
        if self.tree.is_ancestor(u, v):
            return ABOVE
        return INCOMPARABLE

    def leaves_below(self, x: int) -> tuple[int, ...]:
        """Forest leaves reachable from x without crossing removed edges
        (x itself when x has no remaining children), sorted by id."""
        self.tree._require(x)
        out = []
        stack = [x]
        while stack:
            v = stack.pop()
            cs = self.children_of(v)
            if not cs:
                out.append(v)
            else:
                stack.extend(cs)
        return tuple(sorted(out))

    def labels_below(self, x: int) -> frozenset[str]:
        """Labels of original leaves reachable from x in the forest."""
        return frozenset(self.tree._labels[v] for v in self.leaves_below(x)
                         if v in self.tree._labels)

    def lca(self, vertices: Iterable[int]) -> int:
        """lca within one component; vertices from several components
        have no common ancestor and raise."""
        vs = list(vertices)
        if not vs:
            raise TreeError("lca of an empty set is undefined")
        comps = {self._comp[v] for v in vs}
        if len(comps) > 1:
            raise TreeError("vertices span several forest components")
        a = self.tree.lca(vs)
        if self._comp[a] != comps.pop():
            raise TreeError("vertices span several forest components")
        return a


def _locus_span(tree: RootedTree, locus: Locus) -> tuple[int, int]:
    """(upper, lower) vertices delimiting a locus; a vertex spans itself."""
    if is_edge_locus(locus):
        u, v = locus  # type: ignore[misc]
        if not tree.has_edge((u, v)):
            raise TreeError(f"edge {locus} is not in the tree")
        return u, v
    tree._require(locus)  # type: ignore[arg-type]
    return locus, locus  # type: ignore[return-value]


def compare_loci(tree: RootedTree, a: Locus, b: Locus) -> str:
    """Compare two loci under the mixed vertex/edge ancestor order.

    A vertex x is strictly below an edge (u, v) iff x <= v, and strictly
    above iff u <= x; edges compare through their child endpoints.  A
    vertex never equals an edge.
    """
    a_up, a_lo = _locus_span(tree, a)
    b_up, b_lo = _locus_span(tree, b)
    a_is_edge = is_edge_locus(a)
    b_is_edge = is_edge_locus(b)

    if a == b and a_is_edge == b_is_edge:
        return EQUAL
    if a_is_edge and b_is_edge:
        # e <= f iff child(e) <= child(f)
        if tree.is_ancestor(b_lo, a_lo):
            return BELOW
        if tree.is_ancestor(a_lo, b_lo):
            return ABOVE
        return INCOMPARABLE
    if not a_is_edge and not b_is_edge:
        if tree.is_ancestor(b, a):  # type: ignore[arg-type]
            return BELOW
        if tree.is_ancestor(a, b):  # type: ignore[arg-type]
            return ABOVE
        return INCOMPARABLE
    if not a_is_edge and b_is_edge:
        if tree.is_ancestor(b_lo, a_up):
            return BELOW
        if tree.is_ancestor(a_lo, b_up):
            return ABOVE
        return INCOMPARABLE
    # a edge, b vertex
    flipped = compare_loci(tree, b, a)
    if flipped == BELOW:
        return ABOVE
    if flipped == ABOVE:
        return BELOW
    return flipped


def loci_comparable(tree: RootedTree, a: Locus, b: Locus) -> bool:
    return compare_loci(tree, a, b) != INCOMPARABLE


def locus_lower(locus: Locus) -> int:
    """Lower endpoint of a locus (the vertex itself, or an edge's child)."""
    return locus[1] if is_edge_locus(locus) else locus  # type: ignore[index,return-value]


def nested(spec, names: Optional[Mapping[str, str]] = None) -> RootedTree:
    """Build a tree from nested tuples of leaf labels, for tests and
    fixtures: ``nested((("a", "b"), "c"))`` is the caterpillar on a,b,c.
    Ids are assigned in preorder."""
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
        return vid

    walk(spec, None)
    return RootedTree(parent, labels)
