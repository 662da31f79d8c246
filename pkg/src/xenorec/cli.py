"""Command-line interface.

Exit codes: 0 for success or a feasible/consistent verdict, 1 for a
negative mathematical result (inconsistent triples, no species tree,
invalid map, time-infeasible), 2 for input errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .build import is_consistent
from .events import check_observability
from .io import (ParseError, dump_json, gene_vertex_names, locus_json,
                 make_report, map_to_json, parse_gene_tree, parse_map_document,
                 parse_timed_species_tree, resolve_map, serialize_gene_tree,
                 serialize_gene_tree_nhx, serialize_species_tree,
                 species_vertex_names, triples_to_text, violations_json)
from .oracle import check_theorem_equivalence, exists_map_bruteforce
from .reconcile import (NO_SPECIES_TREE_MESSAGE, ObservabilityError,
                        ReconciliationError, construct_map, reconc_t,
                        validate_map)
from .simulate import ScenarioConfig, SimulationError, observable_part, simulate
from .timecheck import GENE, Infeasible, check_time_consistency
from .triples import informative_triples, species_triples

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2


def _read(path: str) -> str:
    return Path(path).read_text()


def _load_gene_tree(args):
    sidecar = _read(args.sidecar) if getattr(args, "sidecar", None) else None
    return parse_gene_tree(_read(args.gene), sidecar)


def cmd_validate(args) -> int:
    g = _load_gene_tree(args)
    report = check_observability(g, restricted=args.restricted)
    payload = {
        "ok": report.ok,
        "violations": {
            axiom: [gene_vertex_names(g).get(v, v) if not isinstance(v, tuple)
                    else [gene_vertex_names(g)[v[0]], gene_vertex_names(g)[v[1]]]
                    for v in vs]
            for axiom, vs in report.as_dict().items()
        },
        "multi_transfer_vertices": [gene_vertex_names(g)[v]
                                    for v in report.multi_transfer_vertices],
    }
    if args.json:
        sys.stdout.write(dump_json(payload))
    else:
        verdict = "pass" if report.ok else "fail"
        print(f"observability: {verdict}")
        for axiom, at in payload["violations"].items():
            if at:
                print(f"  {axiom}: {at}")
    return EXIT_OK


def cmd_triples(args) -> int:
    g = _load_gene_tree(args)
    info = informative_triples(g)
    striples = species_triples(g)
    if args.json:
        payload = {
            "r0": [str(t) for t in info.r0],
            "per_transfer_edge": [[str(t) for t in ts] for ts in info.per_edge],
            "union": [str(t) for t in info.union],
            "species": [str(t) for t in striples],
            "species_consistent": is_consistent(striples, labels=g.species),
        }
        sys.stdout.write(dump_json(payload))
    else:
        print("R0:")
        sys.stdout.write(triples_to_text(info.r0))
        for i, ts in enumerate(info.per_edge, start=1):
            print(f"R{i}:")
            sys.stdout.write(triples_to_text(ts))
        print("S:")
        sys.stdout.write(triples_to_text(striples))
    return EXIT_OK


def cmd_infer(args) -> int:
    g = _load_gene_tree(args)
    result = reconc_t(g, restricted=args.restricted)
    if not result.ok:
        report = make_report(consistent=False, species_tree=None,
                             map_entries=None, witness=result.witness)
        if args.json:
            sys.stdout.write(dump_json(report))
        print(NO_SPECIES_TREE_MESSAGE)
        return EXIT_NEGATIVE
    S, mu = result.species_tree, result.map
    newick = serialize_species_tree(S)
    report = make_report(consistent=True, species_tree=newick,
                         map_entries=map_to_json(g, S, mu))
    if args.json:
        sys.stdout.write(dump_json(report))
    else:
        print(f"species tree: {newick}")
        for entry in report["map"]:
            print(f"  {entry['gene_vertex']} -> {entry['image']}")
    return EXIT_OK


def cmd_reconcile(args) -> int:
    g = _load_gene_tree(args)
    S, entries = parse_map_document(_read(args.map))
    mu = resolve_map(g, S, entries)
    report = validate_map(g, S, mu, restricted=args.restricted)
    payload = make_report(consistent=report.ok,
                          species_tree=serialize_species_tree(S),
                          map_entries=map_to_json(g, S, mu),
                          violations=violations_json(g, S, report))
    if args.json:
        sys.stdout.write(dump_json(payload))
    else:
        print("map valid" if report.ok
              else f"map invalid: {', '.join(report.failed_axioms())}")
    return EXIT_OK if report.ok else EXIT_NEGATIVE


def cmd_timecheck(args) -> int:
    g = _load_gene_tree(args)
    if args.map:
        S, entries = parse_map_document(_read(args.map))
        mu = resolve_map(g, S, entries)
    else:
        result = reconc_t(g, restricted=args.restricted)
        if not result.ok:
            print(NO_SPECIES_TREE_MESSAGE)
            return EXIT_NEGATIVE
        S, mu = result.species_tree, result.map
    outcome = check_time_consistency(g, S, mu)
    gnames = gene_vertex_names(g)
    snames = species_vertex_names(S)

    def node_name(node):
        side, v = node
        return gnames[v] if side == GENE else snames[v]

    if isinstance(outcome, Infeasible):
        payload = {
            "feasible": False,
            "cycle": [{"from": node_name(arc.src), "to": node_name(arc.dst),
                       "kind": arc.kind} for arc in outcome.cycle],
        }
        if args.json:
            sys.stdout.write(dump_json(payload))
        else:
            print("time-infeasible; offending cycle:")
            for arc in payload["cycle"]:
                print(f"  {arc['from']} < {arc['to']}  [{arc['kind']}]")
        return EXIT_NEGATIVE
    payload = {
        "feasible": True,
        "tau_gene": {gnames[v]: t for v, t in outcome.tau_gene.items()},
        "tau_species": {snames[v]: t for v, t in outcome.tau_species.items()},
    }
    if args.json:
        sys.stdout.write(dump_json(payload))
    else:
        print("time-consistent")
    return EXIT_OK


def cmd_simulate(args) -> int:
    species = parse_timed_species_tree(_read(args.species))
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    instances = []
    n_observable = 0
    n_consistent = 0
    for k in range(args.count):
        cfg = ScenarioConfig(dup_rate=args.dup, hgt_rate=args.hgt,
                             loss_rate=args.loss, seed=args.seed + k,
                             stem_length=args.stem)
        hist = simulate(species, cfg)
        obs = observable_part(hist)
        entry = {"seed": cfg.seed, "extant_genes": len(hist.extant())}
        if hasattr(obs, "report"):
            entry["observable"] = False
            entry["failed_axioms"] = list(obs.report.failed_axioms())
        else:
            n_observable += 1
            fname = f"gene_{k:04d}.nwk"
            (outdir / fname).write_text(serialize_gene_tree(obs) + "\n")
            consistent = is_consistent(species_triples(obs), labels=obs.species)
            n_consistent += consistent
            entry.update({"observable": True, "file": fname,
                          "species_triples_consistent": consistent})
        instances.append(entry)
    provenance = {
        "tool": "xenorec",
        "version": __version__,
        "species_tree": serialize_species_tree(species.tree),
        "rates": {"dup": args.dup, "hgt": args.hgt, "loss": args.loss},
        "seed": args.seed,
        "count": args.count,
        "observable_fraction": n_observable / args.count if args.count else None,
        "consistent_fraction": (n_consistent / n_observable
                                if n_observable else None),
        "instances": instances,
    }
    (outdir / "scenario.json").write_text(dump_json(provenance))
    print(f"wrote {n_observable} observable gene tree(s) to {outdir}")
    return EXIT_OK


def cmd_build(args) -> int:
    from .build import Inconsistent, build
    from .io import parse_triples
    triples = parse_triples(_read(args.triples))
    labels = set(triples.labels) | set(args.labels or [])
    if not labels:
        print("input error: no labels (empty triple set needs --labels)",
              file=sys.stderr)
        return EXIT_INPUT
    try:
        tree = build(triples, labels)
    except Inconsistent as exc:
        if args.json:
            sys.stdout.write(dump_json({"consistent": False,
                                        "witness": exc.witness()}))
        else:
            print("inconsistent triple set")
        return EXIT_NEGATIVE
    newick = serialize_species_tree(tree)
    if args.json:
        sys.stdout.write(dump_json({"consistent": True, "tree": newick}))
    else:
        print(newick)
    return EXIT_OK


def cmd_oracle(args) -> int:
    g = parse_gene_tree(_read(args.gene),
                        _read(args.sidecar) if args.sidecar else None)
    equivalent = check_theorem_equivalence(g, restricted=args.restricted)
    consistent = is_consistent(species_triples(g), labels=g.species)
    exists, witness = exists_map_bruteforce(g, restricted=args.restricted)
    payload = {
        "equivalent": equivalent,
        "species_triples_consistent": consistent,
        "map_exists": exists,
        "witness_species_tree": serialize_species_tree(witness) if witness else None,
    }
    if args.json:
        sys.stdout.write(dump_json(payload))
    else:
        print(f"triples consistent: {consistent}; map exists: {exists}; "
              f"equivalence {'holds' if equivalent else 'FAILS'}")
    return EXIT_OK if equivalent else EXIT_NEGATIVE


def cmd_export(args) -> int:
    g = _load_gene_tree(args)
    text = serialize_gene_tree_nhx(g) if args.nhx else serialize_gene_tree(g)
    sys.stdout.write(text + "\n")
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="xenorec",
        description="Species-tree inference and reconciliation for "
                    "event-labeled gene trees with horizontal transfer.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def add_gene(p, with_restricted=True):
        p.add_argument("gene", help="gene tree file (event-annotated Newick)")
        p.add_argument("--sidecar", help="TSV gene-to-species mapping")
        if with_restricted:
            p.add_argument("--restricted", action="store_true",
                           help="enforce the restricted axioms (O3A / M2.iv)")
        p.add_argument("--json", action="store_true",
                       help="emit a JSON report on stdout")

    p = sub.add_parser("validate", help="observability axiom report")
    add_gene(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("triples", help="informative triples and species triples")
    add_gene(p, with_restricted=False)
    p.set_defaults(func=cmd_triples)

    p = sub.add_parser("infer", help="decide and construct species tree + map")
    add_gene(p)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("reconcile", help="validate a supplied map")
    add_gene(p)
    p.add_argument("map", help="map document (JSON with species_tree and map)")
    p.set_defaults(func=cmd_reconcile)

    p = sub.add_parser("timecheck", help="time-consistency of a map")
    add_gene(p)
    p.add_argument("--map", help="map document; defaults to the inferred map")
    p.set_defaults(func=cmd_timecheck)

    p = sub.add_parser("simulate", help="simulate true scenarios")
    p.add_argument("--species", required=True,
                   help="species tree with branch lengths")
    p.add_argument("--dup", type=float, required=True)
    p.add_argument("--hgt", type=float, required=True)
    p.add_argument("--loss", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--stem", type=float, default=None,
                   help="length of the branch above the species root")
    p.add_argument("--out", default="scenarios",
                   help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("build", help="least-resolved tree from a triple list")
    p.add_argument("triples", help="triple file, one 'a b | c' per line")
    p.add_argument("--labels", nargs="*",
                   help="extra labels beyond those in the triples")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("oracle", help="brute-force equivalence check")
    p.add_argument("--gene", required=True)
    p.add_argument("--sidecar")
    p.add_argument("--restricted", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("export", help="re-serialize a gene tree")
    add_gene(p, with_restricted=False)
    p.add_argument("--nhx", action="store_true",
                   help="NHX-tagged Newick instead of the native dialect")
    p.set_defaults(func=cmd_export)

    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, FileNotFoundError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ObservabilityError as exc:
        print(f"input rejected: {exc}", file=sys.stderr)
        for axiom, at in exc.report.as_dict().items():
            if at:
                print(f"  {axiom}: {at}", file=sys.stderr)
        return EXIT_INPUT
    except (ReconciliationError, SimulationError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
