import pytest

from helpers import harvest_instances
from xenorec.io import parse_species_tree, serialize_species_tree
from xenorec.reconcile import (ReconciliationError, ReconciliationMap,
                               construct_map, plant, reconc_t)
from xenorec.timecheck import (ARC_GENE_EDGE, ARC_INTERVAL_BOTTOM,
                               ARC_INTERVAL_TOP, ARC_SPECIES_EDGE, Infeasible,
                               TimeAssignment, check_time_consistency)

ARC_KINDS = {ARC_GENE_EDGE, ARC_SPECIES_EDGE, ARC_INTERVAL_TOP,
             ARC_INTERVAL_BOTTOM}


def test_worked_example_is_time_consistent(worked_example):
    res = reconc_t(worked_example)
    outcome = check_time_consistency(worked_example, res.species_tree, res.map)
    assert isinstance(outcome, TimeAssignment)
    assert outcome.satisfies(worked_example, res.species_tree, res.map)


def test_time_travel_infeasible_on_least_resolved(time_travel):
    res = reconc_t(time_travel)
    assert serialize_species_tree(res.species_tree) == "((A,B,C),D);"
    outcome = check_time_consistency(time_travel, res.species_tree, res.map)
    assert isinstance(outcome, Infeasible)
    assert len(outcome.cycle) >= 2
    # the cycle is certified: it closes up and every arc is a strict
    # constraint of a known kind
    for arc in outcome.cycle:
        assert arc.kind in ARC_KINDS
    srcs = [arc.src for arc in outcome.cycle]
    dsts = [arc.dst for arc in outcome.cycle]
    assert set(srcs) != set()
    # consecutive arcs chain through equality classes; endpoints close the loop
    from xenorec.timecheck import ConstraintGraph
    graph = ConstraintGraph(time_travel, res.species_tree, res.map)
    for i, arc in enumerate(outcome.cycle):
        nxt = outcome.cycle[(i + 1) % len(outcome.cycle)]
        assert graph.find(arc.dst) == graph.find(nxt.src)


def test_time_travel_feasible_on_refined_tree(time_travel, refined_species):
    S = plant(refined_species)
    mu = construct_map(time_travel, S)
    outcome = check_time_consistency(time_travel, S, mu)
    assert isinstance(outcome, TimeAssignment)
    assert outcome.satisfies(time_travel, S, mu)


def test_other_refinements_stay_infeasible(time_travel):
    for newick in ["(((A,C),B),D);", "(((B,C),A),D);"]:
        S = plant(parse_species_tree(newick))
        mu = construct_map(time_travel, S)
        assert isinstance(check_time_consistency(time_travel, S, mu),
                          Infeasible)


def test_witness_survives_monotone_transform(time_travel, refined_species):
    S = plant(refined_species)
    mu = construct_map(time_travel, S)
    outcome = check_time_consistency(time_travel, S, mu)
    assert isinstance(outcome, TimeAssignment)
    stretched = TimeAssignment(
        tau_gene={v: 3.0 * t + 1.0 for v, t in outcome.tau_gene.items()},
        tau_species={v: 3.0 * t + 1.0 for v, t in outcome.tau_species.items()})
    assert stretched.satisfies(time_travel, S, mu)


def test_unvalidated_map_is_domain_error(worked_example):
    res = reconc_t(worked_example)
    bad = dict(res.map.images)
    leaf = worked_example.tree.vertex_of("a")
    bad[leaf] = res.species_tree.tree.vertex_of("B")
    with pytest.raises(ReconciliationError):
        check_time_consistency(worked_example, res.species_tree,
                               ReconciliationMap(bad))


def test_hgt_free_always_feasible():
    for g in harvest_instances(25, seed0=9000, hgt=0.0, dup=0.5, loss=0.4):
        res = reconc_t(g)
        assert res.ok
        outcome = check_time_consistency(g, res.species_tree, res.map)
        assert isinstance(outcome, TimeAssignment)
        assert outcome.satisfies(g, res.species_tree, res.map)


def test_witnesses_recheck_on_simulated_instances(instance_pool):
    feasible = 0
    for g in instance_pool:
        res = reconc_t(g)
        if not res.ok:
            continue
        outcome = check_time_consistency(g, res.species_tree, res.map)
        if isinstance(outcome, TimeAssignment):
            feasible += 1
            assert outcome.satisfies(g, res.species_tree, res.map)
        else:
            for arc in outcome.cycle:
                assert arc.kind in ARC_KINDS
    assert feasible > 0
