import random

import pytest

from helpers import harvest_instances
from xenorec.build import is_consistent
from xenorec.io import parse_gene_tree
from xenorec.oracle import (check_theorem_equivalence, double_factorial_count,
                            enumerate_species_trees, exists_map_bruteforce,
                            exists_map_exhaustive)
from xenorec.reconcile import construct_map, plant, reconc_t, validate_map
from xenorec.triples import species_triples


@pytest.mark.parametrize("n,count", [(1, 1), (2, 1), (3, 3), (4, 15),
                                     (5, 105), (6, 945)])
def test_binary_counts(n, count):
    labels = [f"S{i}" for i in range(n)]
    assert double_factorial_count(n) == count
    assert sum(1 for _ in enumerate_species_trees(labels)) == count


def test_all_tree_counts():
    # rooted phylogenetic trees (multifurcations allowed): 1, 1, 4, 26, 236
    for n, count in [(1, 1), (2, 1), (3, 4), (4, 26), (5, 236)]:
        labels = [f"S{i}" for i in range(n)]
        assert sum(1 for _ in enumerate_species_trees(
            labels, binary_only=False)) == count


def test_enumeration_no_duplicates():
    seen = set()
    for t in enumerate_species_trees("ABCDE", binary_only=False):
        key = repr(t._canonical(t.root))
        assert key not in seen
        seen.add(key)


def test_cap_enforced():
    with pytest.raises(ValueError):
        list(enumerate_species_trees([f"S{i}" for i in range(9)]))


def test_negative_instance_has_no_tree(feasible_no_tree):
    exists, witness = exists_map_bruteforce(feasible_no_tree)
    assert not exists and witness is None


def test_worked_example_has_tree(worked_example):
    exists, witness = exists_map_bruteforce(worked_example)
    assert exists
    from xenorec.triples import displays
    for t in species_triples(worked_example):
        assert displays(witness, t)


def test_equivalence_on_corpus(worked_example, feasible_no_tree,
                               hidden_transfer, nonbinary_counterexample):
    assert check_theorem_equivalence(worked_example)
    assert check_theorem_equivalence(feasible_no_tree)
    assert check_theorem_equivalence(hidden_transfer)
    assert check_theorem_equivalence(hidden_transfer, restricted=True)
    assert check_theorem_equivalence(nonbinary_counterexample, restricted=True)


def test_plain_mode_refuses_nonbinary(nonbinary_counterexample):
    with pytest.raises(ValueError):
        check_theorem_equivalence(nonbinary_counterexample)


def test_nonbinary_breaks_plain_equivalence(nonbinary_counterexample):
    """The guard exists for a reason: on the multifurcating
    counterexample a plain map exists although the species triples are
    inconsistent."""
    g = nonbinary_counterexample
    exists, _ = exists_map_bruteforce(g, restricted=False)
    assert exists
    assert not is_consistent(species_triples(g), labels=g.species)


def test_hgt_free_true_tree_among_witnesses():
    from helpers import random_timed_species_tree
    from xenorec.simulate import (ScenarioConfig, Unobservable,
                                  observable_part, simulate)
    found = 0
    seed = 0
    while found < 15 and seed < 400:
        rng = random.Random(f"oracle-hgtfree:{seed}")
        sp = random_timed_species_tree(rng, 2 + rng.randrange(3))
        cfg = ScenarioConfig(dup_rate=0.4, hgt_rate=0.0, loss_rate=0.3,
                             seed=seed, max_genes=8, max_retries=4)
        seed += 1
        try:
            obs = observable_part(simulate(sp, cfg))
        except Exception:
            continue
        if isinstance(obs, Unobservable) or len(obs.species) < 2:
            continue
        found += 1
        exists, _ = exists_map_bruteforce(obs)
        assert exists
        # the true species tree, restricted to the surviving species,
        # admits the constructed map as well
        true_restricted = sp.tree.restrict(obs.species)
        planted = plant(true_restricted)
        mu = construct_map(obs, planted)
        assert validate_map(obs, planted, mu).ok
    assert found == 15


def test_weak_oracle_agrees_with_constructive_map():
    """On micro instances, some axiom-shaped map to S validates iff the
    constructed map does."""
    pool = harvest_instances(40, seed0=777, max_genes=4)
    checked = 0
    for g in pool:
        if len(g.tree.vertices()) > 6 or len(g.species) > 3:
            continue
        checked += 1
        for S in enumerate_species_trees(g.species):
            planted = plant(S)
            constructed_ok = validate_map(
                g, planted, construct_map(g, planted)).ok
            any_ok = exists_map_exhaustive(g, planted)
            assert constructed_ok == any_ok
    assert checked >= 5


def test_equivalence_property_small(instance_pool):
    for g in instance_pool[:40]:
        assert check_theorem_equivalence(g)
