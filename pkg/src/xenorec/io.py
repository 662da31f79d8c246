"""File formats: the event-annotated Newick dialect, species trees,
triple lists, map documents and JSON reports.

Gene tree dialect (grammar in docs/FORMATS.md):

    document   := subtree ";"
    subtree    := leaf | internal
    internal   := "(" child ("," child)* ")" name? annotation
    child      := "#T"? subtree
    leaf       := name ("@" name)?
    annotation := "[&ev=" ("s"|"d"|"t") "]"
    name       := [A-Za-z0-9_.'-]+

Every interior vertex carries an event annotation; a ``#T`` prefix marks
the edge into that child as a transfer edge, which forces the parent's
event to be ``t``.  Leaves obtain their species inline (``gene@SPECIES``)
or from a sidecar TSV (``gene<TAB>species``); a conflicting double
assignment is an error.  Species trees are plain Newick with optional
interior names and branch lengths.

Parse and serialize round-trip to the identical abstract gene tree;
serialization emits children in stored order and only explicit names,
so canonical text is stable across runs.
"""

from __future__ import annotations

import json
import re
from typing import Optional, Union

from . import __version__
from .events import GeneTree, GeneTreeError, TRANSFER
from .reconcile import (PlantedSpeciesTree, ReconciliationMap,
                        ValidationReport)
from .simulate import TimedSpeciesTree
from .trees import Edge, Locus, RootedTree, is_edge_locus

NAME_RE = re.compile(r"[A-Za-z0-9_.'\-]+")
PLANTED_ROOT_NAME = "planted_root"


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        self.line = line
        self.col = col
        super().__init__(f"{message} (line {line}, column {col})")


class _Cursor:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _linecol(self, pos: Optional[int] = None) -> tuple[int, int]:
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def error(self, message: str, pos: Optional[int] = None) -> ParseError:
        line, col = self._linecol(pos)
        return ParseError(message, line, col)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, expected: str) -> None:
        self.skip_ws()
        if not self.text.startswith(expected, self.pos):
            raise self.error(f"expected {expected!r}")
        self.pos += len(expected)

    def try_take(self, expected: str) -> bool:
        self.skip_ws()
        if self.text.startswith(expected, self.pos):
            self.pos += len(expected)
            return True
        return False

    def name(self) -> str:
        self.skip_ws()
        m = NAME_RE.match(self.text, self.pos)
        if not m:
            raise self.error("expected a name")
        self.pos = m.end()
        return m.group()

    def number(self) -> float:
        self.skip_ws()
        m = re.match(r"[-+]?\d+(\.\d*)?([eE][-+]?\d+)?", self.text[self.pos:])
        if not m:
            raise self.error("expected a number")
        self.pos += m.end()
        return float(m.group())


def parse_gene_tree(text: str, sidecar: Optional[str] = None) -> GeneTree:
    """Parse the gene-tree dialect; ``sidecar`` is TSV text mapping genes
    to species."""
    side: dict[str, str] = {}
    if sidecar:
        for lineno, raw in enumerate(sidecar.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t") if "\t" in line else line.split()
            if len(parts) != 2:
                raise ParseError("sidecar lines must be 'gene<TAB>species'",
                                 lineno, 1)
            side[parts[0]] = parts[1]

    cur = _Cursor(text)
    parent: dict[int, Optional[int]] = {}
    labels: dict[int, str] = {}
    names: dict[int, str] = {}
    events: dict[int, str] = {}
    sigma: dict[str, str] = {}
    flags: list[tuple[Edge, int]] = []  # (edge, position of the #T marker)
    counter = [0]

    def fresh(par: Optional[int]) -> int:
        vid = counter[0]
        counter[0] += 1
        parent[vid] = par
        return vid

    def subtree(par: Optional[int]) -> int:
        if cur.peek() == "(":
            vid = fresh(par)
            cur.take("(")
            while True:
                flag_pos = cur.pos
                flagged = cur.try_take("#T")
                flag_pos = cur.pos - 2 if flagged else flag_pos
                child = subtree(vid)
                if flagged:
                    flags.append(((vid, child), flag_pos))
                if not cur.try_take(","):
                    break
            cur.take(")")
            if cur.peek() not in ("[", "", ";", ",", ")"):
                names[vid] = cur.name()
            ann_pos = cur.pos
            if not cur.try_take("[&ev="):
                raise cur.error("interior vertex lacks an [&ev=...] annotation",
                                ann_pos)
            ev = cur.name()
            if ev not in ("s", "d", "t"):
                raise cur.error(f"unknown event {ev!r}")
            cur.take("]")
            events[vid] = ev
            return vid
        name_pos = cur.pos
        gene = cur.name()
        vid = fresh(par)
        if gene in sigma or gene in labels.values():
            raise cur.error(f"duplicate gene name {gene!r}", name_pos)
        labels[vid] = gene
        species = None
        if cur.try_take("@"):
            species = cur.name()
        if gene in side:
            if species is not None and species != side[gene]:
                raise cur.error(
                    f"gene {gene!r}: inline species {species!r} conflicts "
                    f"with sidecar {side[gene]!r}", name_pos)
            species = side[gene]
        if species is None:
            raise cur.error(f"gene {gene!r} has no species (use gene@SPECIES "
                            f"or a sidecar)", name_pos)
        sigma[gene] = species
        return vid

    root = subtree(None)
    cur.take(";")
    cur.skip_ws()
    if cur.pos != len(cur.text):
        raise cur.error("trailing characters after ';'")

    for (u, v), pos in flags:
        if events.get(u) != TRANSFER:
            raise cur.error("transfer edge whose tail is not t-labeled", pos)
    tree = RootedTree(parent, labels, names)
    try:
        return GeneTree(tree, events, [e for e, _ in flags], sigma)
    except GeneTreeError as exc:
        raise ParseError(str(exc), 1, 1) from exc


def serialize_gene_tree(g: GeneTree) -> str:
    tree = g.tree
    flagged = set(g.transfer_edges)

    def walk(v: int) -> str:
        if tree.is_leaf(v):
            lab = tree.label_of(v)
            return f"{lab}@{g.sigma[lab]}"
        parts = []
        for c in tree.children_of(v):
            prefix = "#T" if (v, c) in flagged else ""
            parts.append(prefix + walk(c))
        name = tree.names().get(v, "")
        return f"({','.join(parts)}){name}[&ev={g.events[v]}]"

    return walk(tree.root) + ";"


def serialize_gene_tree_nhx(g: GeneTree) -> str:
    """NHX-flavored export: species as :S=, events as :ev=, transfer
    edges as :T=1."""
    tree = g.tree
    flagged = set(g.transfer_edges)

    def walk(v: int, edge_tag: str) -> str:
        if tree.is_leaf(v):
            lab = tree.label_of(v)
            return f"{lab}[&&NHX:S={g.sigma[lab]}{edge_tag}]"
        parts = []
        for c in tree.children_of(v):
            tag = ":T=1" if (v, c) in flagged else ""
            parts.append(walk(c, tag))
        return f"({','.join(parts)})[&&NHX:ev={g.events[v]}{edge_tag}]"

    return walk(tree.root, "") + ";"


def parse_species_tree(text: str) -> RootedTree:
    tree, _ = _parse_species(text)
    return tree


def parse_timed_species_tree(text: str) -> TimedSpeciesTree:
    """Species tree whose branch lengths calibrate vertex ages; absent
    lengths default to 1."""
    tree, lengths = _parse_species(text)
    filled = {v: lengths.get(v, 1.0) for v in tree.vertices()}
    return TimedSpeciesTree.from_branch_lengths(tree, filled)


def _parse_species(text: str) -> tuple[RootedTree, dict[int, float]]:
    cur = _Cursor(text)
    parent: dict[int, Optional[int]] = {}
    labels: dict[int, str] = {}
    names: dict[int, str] = {}
    lengths: dict[int, float] = {}
    counter = [0]

    def fresh(par: Optional[int]) -> int:
        vid = counter[0]
        counter[0] += 1
        parent[vid] = par
        return vid

    def subtree(par: Optional[int]) -> int:
        if cur.peek() == "(":
            vid = fresh(par)
            cur.take("(")
            while True:
                subtree(vid)
                if not cur.try_take(","):
                    break
            cur.take(")")
            if cur.peek() not in (":", ",", ")", ";", ""):
                names[vid] = cur.name()
            if cur.try_take(":"):
                lengths[vid] = cur.number()
            return vid
        pos = cur.pos
        lab = cur.name()
        vid = fresh(par)
        if lab in labels.values():
            raise cur.error(f"duplicate species name {lab!r}", pos)
        labels[vid] = lab
        if cur.try_take(":"):
            lengths[vid] = cur.number()
        return vid

    subtree(None)
    cur.take(";")
    cur.skip_ws()
    if cur.pos != len(cur.text):
        raise cur.error("trailing characters after ';'")
    return RootedTree(parent, labels, names), lengths


def serialize_species_tree(S: Union[RootedTree, PlantedSpeciesTree],
                           planted: bool = False) -> str:
    """Standard rooted Newick.  For a planted tree the auxiliary unary
    root is rendered only under ``planted=True``; otherwise the tree
    below it is emitted."""
    if isinstance(S, PlantedSpeciesTree):
        tree = S.tree
        top = S.planted_root if planted else S.inner_root
    else:
        tree = S
        top = tree.root

    def walk(v: int) -> str:
        if tree.is_leaf(v):
            return tree.label_of(v)
        inner = ",".join(walk(c) for c in tree.children_of(v))
        return f"({inner}){tree.names().get(v, '')}"

    return walk(top) + ";"


# -- vertex display names -------------------------------------------------


def gene_vertex_names(g: GeneTree) -> dict[int, str]:
    """Stable display names: leaf label, explicit name, or v<preorder>."""
    tree = g.tree
    out: dict[int, str] = {}
    for idx, v in enumerate(tree.preorder()):
        if tree.is_leaf(v):
            out[v] = tree.label_of(v)
        elif tree.name_of(v):
            out[v] = tree.name_of(v)  # type: ignore[assignment]
        else:
            out[v] = f"v{idx}"
    return out


def species_vertex_names(S: PlantedSpeciesTree) -> dict[int, str]:
    """Leaf label, explicit name, 'mrca:<leaves>' for unnamed interiors,
    and a reserved name for the planted root."""
    tree = S.tree
    out: dict[int, str] = {}
    for v in tree.preorder():
        if v == S.planted_root:
            out[v] = PLANTED_ROOT_NAME
        elif tree.is_leaf(v):
            out[v] = tree.label_of(v)
        elif tree.name_of(v):
            out[v] = tree.name_of(v)  # type: ignore[assignment]
        else:
            out[v] = "mrca:" + "+".join(sorted(tree.labels_below(v)))
    return out


def locus_json(S: PlantedSpeciesTree, locus: Locus):
    names = species_vertex_names(S)
    if is_edge_locus(locus):
        u, v = locus  # type: ignore[misc]
        return [names[u], names[v]]
    return names[locus]


def map_to_json(g: GeneTree, S: PlantedSpeciesTree,
                mu: ReconciliationMap) -> list[dict]:
    gnames = gene_vertex_names(g)
    entries = []
    for v in sorted(mu.images, key=lambda v: gnames[v]):
        entries.append({
            "gene_vertex": gnames[v],
            "image_kind": mu.image_kind(v),
            "image": locus_json(S, mu.images[v]),
        })
    return entries


def parse_map_document(text: str) -> tuple[PlantedSpeciesTree, dict[str, dict]]:
    """A map document bundles a species tree with a gene-vertex ->
    image assignment; images name species vertices (or edges as
    [parent, child]) by label, explicit name, or mrca:<leaves>."""
    doc = json.loads(text)
    if "species_tree" not in doc or "map" not in doc:
        raise ValueError("map document needs 'species_tree' and 'map' keys")
    from .reconcile import plant
    return plant(parse_species_tree(doc["species_tree"])), doc["map"]


def resolve_map(g: GeneTree, S: PlantedSpeciesTree,
                entries: dict[str, dict]) -> ReconciliationMap:
    """Resolve a parsed map document against concrete trees."""
    gnames = gene_vertex_names(g)
    g_by_name = {n: v for v, n in gnames.items()}
    s_by_name = {n: v for v, n in species_vertex_names(S).items()}
    images: dict[int, Locus] = {}
    for key, spec in entries.items():
        if key not in g_by_name:
            raise ValueError(f"unknown gene vertex {key!r}")
        kind = spec.get("kind", spec.get("image_kind"))
        at = spec.get("at", spec.get("image"))
        if kind == "vertex":
            if at not in s_by_name:
                raise ValueError(f"unknown species vertex {at!r}")
            images[g_by_name[key]] = s_by_name[at]
        elif kind == "edge":
            u, v = at
            if u not in s_by_name or v not in s_by_name:
                raise ValueError(f"unknown species edge {at!r}")
            images[g_by_name[key]] = (s_by_name[u], s_by_name[v])
        else:
            raise ValueError(f"image kind must be 'vertex' or 'edge', got {kind!r}")
    return ReconciliationMap(images)


# -- triple text ----------------------------------------------------------


def triples_to_text(triples) -> str:
    return "".join(f"{t}\n" for t in triples)


def parse_triples(text: str):
    from .triples import Triple, TripleSet
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "|" not in line:
            raise ParseError("triple lines look like 'a b | c'", lineno, 1)
        left, right = line.split("|", 1)
        pair = left.split()
        outg = right.split()
        if len(pair) != 2 or len(outg) != 1:
            raise ParseError("triple lines look like 'a b | c'", lineno, 1)
        out.append(Triple.make(pair[0], pair[1], outg[0]))
    return TripleSet(out)


# -- reports ---------------------------------------------------------------


def violations_json(g: GeneTree, S: PlantedSpeciesTree,
                    report: ValidationReport) -> list[dict]:
    gnames = gene_vertex_names(g)
    out: list[dict] = []
    for v in report.m1:
        out.append({"axiom": "M1", "at": gnames[v]})
    for v in report.m2i:
        out.append({"axiom": "M2.i", "at": gnames[v]})
    for v in report.m2ii:
        out.append({"axiom": "M2.ii", "at": gnames[v]})
    for (x, y) in report.m2iii:
        out.append({"axiom": "M2.iii", "at": [gnames[x], gnames[y]]})
    if report.m2iv:
        for (v, a, b) in report.m2iv:
            out.append({"axiom": "M2.iv", "at": gnames[v],
                        "children": [gnames[a], gnames[b]]})
    for (x, y) in report.m3i:
        out.append({"axiom": "M3.i", "at": [gnames[x], gnames[y]]})
    for (x, y) in report.m3ii:
        out.append({"axiom": "M3.ii", "at": [gnames[x], gnames[y]]})
    return out


def make_report(consistent: bool,
                species_tree: Optional[str],
                map_entries: Optional[list[dict]],
                violations: Optional[list[dict]] = None,
                witness: Optional[dict] = None,
                seed: Optional[int] = None,
                extra: Optional[dict] = None) -> dict:
    report = {
        "tool": "xenorec",
        "version": __version__,
        "seed": seed,
        "consistent": consistent,
        "species_tree": species_tree,
        "map": map_entries,
        "violations": violations if violations is not None else [],
        "witness": witness,
    }
    if extra:
        report.update(extra)
    return report


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
