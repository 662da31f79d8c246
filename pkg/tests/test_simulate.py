import pytest

from helpers import canonical_form, gene_trees_equal
from scenarios import feasible_no_tree_history, hidden_transfer_history
from xenorec.events import check_observability
from xenorec.io import (parse_gene_tree, parse_timed_species_tree,
                        serialize_gene_tree)
from xenorec.simulate import (ScenarioConfig, SimulationError, Unobservable,
                              observable_part, simulate)
from xenorec.triples import Triple, TripleSet, species_triples

SPECIES_4 = "(((A:1,B:1)ab:1,C:2)abc:1,D:3)r;"


@pytest.fixture(scope="module")
def sp4():
    return parse_timed_species_tree(SPECIES_4)


def test_zero_rates_reproduce_species_tree(sp4):
    cfg = ScenarioConfig(dup_rate=0, hgt_rate=0, loss_rate=0, seed=1)
    hist = simulate(sp4, cfg)
    hist.validate()
    obs = observable_part(hist)
    assert not isinstance(obs, Unobservable)
    assert obs.tree.isomorphic(
        parse_gene_tree("(((a_1@A,b_1@B)[&ev=s],c_1@C)[&ev=s],d_1@D)[&ev=s];").tree)
    assert set(obs.events.values()) == {"s"}
    assert obs.transfer_edges == ()
    assert check_observability(obs, restricted=True).ok


def test_seed_determinism(sp4):
    cfg = ScenarioConfig(dup_rate=0.4, hgt_rate=0.3, loss_rate=0.3, seed=42)
    a = observable_part(simulate(sp4, cfg))
    b = observable_part(simulate(sp4, cfg))
    assert serialize_gene_tree(a) == serialize_gene_tree(b)


def test_scenario_invariants_hold(sp4):
    for seed in range(25):
        cfg = ScenarioConfig(dup_rate=0.5, hgt_rate=0.4, loss_rate=0.4,
                             seed=seed)
        simulate(sp4, cfg).validate()


def test_observable_results_pass_axioms(sp4):
    observable = 0
    filtered = 0
    for seed in range(40):
        cfg = ScenarioConfig(dup_rate=0.4, hgt_rate=0.5, loss_rate=0.5,
                             seed=seed)
        res = observable_part(simulate(sp4, cfg))
        if isinstance(res, Unobservable):
            filtered += 1
            assert not res.report.ok
        else:
            observable += 1
            assert check_observability(res).ok
    assert observable > 0
    assert filtered > 0  # the filter does real work at these rates


def test_retry_bound_reported():
    sp = parse_timed_species_tree("(A:1,B:1);")
    cfg = ScenarioConfig(dup_rate=0, hgt_rate=0, loss_rate=50.0, seed=3,
                         max_retries=3)
    with pytest.raises(SimulationError):
        simulate(sp, cfg)


def test_gene_cap_respected(sp4):
    cfg = ScenarioConfig(dup_rate=0.6, hgt_rate=0.3, loss_rate=0.1, seed=9,
                         max_genes=6, max_retries=40)
    hist = simulate(sp4, cfg)
    assert 1 <= len(hist.extant()) <= 6


def test_handcrafted_scenario_matches_corpus(feasible_no_tree):
    hist = feasible_no_tree_history()
    hist.validate()
    obs = observable_part(hist)
    assert not isinstance(obs, Unobservable)
    assert gene_trees_equal(obs, feasible_no_tree)
    # the hidden transfer leaves no flagged edge, yet the species triples
    # contradict each other
    assert obs.transfer_edges == ()
    assert species_triples(obs) == TripleSet(
        [Triple.make("A", "B", "C"), Triple.make("B", "C", "A")])


def test_handcrafted_hidden_transfer_matches_corpus(hidden_transfer):
    hist = hidden_transfer_history()
    hist.validate()
    obs = observable_part(hist)
    assert not isinstance(obs, Unobservable)
    assert gene_trees_equal(obs, hidden_transfer)
    assert len(obs.transfer_edges) == 1
    assert check_observability(obs, restricted=True).ok


def test_true_history_retained_as_feasibility_witness(sp4):
    cfg = ScenarioConfig(dup_rate=0.3, hgt_rate=0.3, loss_rate=0.3, seed=4)
    hist = simulate(sp4, cfg)
    obs = observable_part(hist)
    assert not isinstance(obs, Unobservable)
    # the pair (history, observable tree) certifies feasibility: the
    # extant genes of the history are exactly the observable leaves
    assert {hist.gene_names[i] for i in hist.extant()} == set(obs.genes)


def test_restriction_of_full_tree_matches_observable(sp4):
    """Restricting the full history tree (losses as labeled stubs) to the
    extant genes reproduces the observable topology."""
    from xenorec.trees import RootedTree
    for seed in (0, 2, 3, 4, 7):
        cfg = ScenarioConfig(dup_rate=0.4, hgt_rate=0.4, loss_rate=0.4,
                             seed=seed)
        hist = simulate(sp4, cfg)
        obs = observable_part(hist)
        parent = {i: hist.nodes[i].parent for i in hist.nodes}
        labels = {}
        for i in sorted(hist.nodes):
            if not hist.children(i):
                labels[i] = hist.gene_names.get(i, f"loss{i}")
        full = RootedTree(parent, labels)
        restricted = full.restrict([hist.gene_names[i] for i in hist.extant()])
        if isinstance(obs, Unobservable):
            assert restricted.isomorphic(obs.gene_tree.tree)
        else:
            assert restricted.isomorphic(obs.tree)


def test_sigma_bar_excludes_transferred_species(worked_example):
    g = worked_example
    root_component = g.forest().component_root_of(g.tree.vertex_of("a"))
    assert g.sigma_bar(root_component) == {"A", "C", "D"}


def test_canonical_form_distinguishes_flags():
    g1 = parse_gene_tree("((x@A,#T(y@B,z@C)[&ev=s])[&ev=t],w@A)[&ev=s];")
    g2 = parse_gene_tree("((x@A,(y@B,z@C)[&ev=s])[&ev=d],w@A)[&ev=s];")
    assert canonical_form(g1) != canonical_form(g2)
