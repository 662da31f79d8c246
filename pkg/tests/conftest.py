import random
from pathlib import Path

import pytest

from xenorec.io import parse_gene_tree, parse_species_tree

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def load_gene(name: str):
    return parse_gene_tree((CORPUS / name).read_text())


@pytest.fixture(scope="session")
def worked_example():
    return load_gene("worked_example.nwk")


@pytest.fixture(scope="session")
def feasible_no_tree():
    return load_gene("feasible_no_tree.nwk")


@pytest.fixture(scope="session")
def hidden_transfer():
    return load_gene("hidden_transfer_binary.nwk")


@pytest.fixture(scope="session")
def nonbinary_counterexample():
    return load_gene("nonbinary_counterexample.nwk")


@pytest.fixture(scope="session")
def time_travel():
    return load_gene("time_travel.nwk")


@pytest.fixture(scope="session")
def refined_species():
    return parse_species_tree(
        (CORPUS / "time_travel_refined_species.nwk").read_text())


@pytest.fixture(scope="session")
def rng():
    return random.Random(20240811)


@pytest.fixture(scope="session")
def instance_pool():
    """Shared pool of simulated binary observable instances (kept small;
    the acceptance suite harvests its own larger pools)."""
    from helpers import harvest_instances
    return harvest_instances(60, seed0=5000)
