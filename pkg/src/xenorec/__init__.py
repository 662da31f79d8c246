"""xenorec: species-tree inference and reconciliation for event-labeled
gene trees with horizontal transfer.

The library decides whether a gene tree carrying speciation, duplication
and transfer labels admits a species tree and a valid (optionally
restricted) reconciliation map, constructs both when they exist, checks
time-consistency, simulates true evolutionary scenarios, and ships a
brute-force oracle that re-derives every decision by exhaustive
enumeration.
"""

__version__ = "0.1.0"

from .trees import (ABOVE, BELOW, EQUAL, INCOMPARABLE, Forest, RootedTree,
                    TreeError, compare_loci, nested)
from .events import (DUPLICATION, SPECIATION, TRANSFER, GeneTree,
                     GeneTreeError, ObservabilityReport, PartitionReport,
                     check_observability, component_partition)
from .triples import (InformativeTriples, Triple, TripleSet, displayed_triples,
                      displays, informative_triples, species_triples)
from .build import Inconsistent, build, is_consistent, is_unique_display_tree
from .reconcile import (NO_SPECIES_TREE_MESSAGE, ObservabilityError,
                        PlantedSpeciesTree, ReconcTResult, ReconciliationError,
                        ReconciliationMap, ValidationReport, construct_map,
                        plant, reconc_t, validate_map)
from .timecheck import (Infeasible, TimeAssignment, check_time_consistency)
from .simulate import (ScenarioConfig, SimulationError, TimedSpeciesTree,
                       TrueHistory, Unobservable, observable_part, simulate)
from .oracle import (check_theorem_equivalence, double_factorial_count,
                     enumerate_species_trees, exists_map_bruteforce,
                     exists_map_exhaustive)

__all__ = [
    "__version__",
    "ABOVE", "BELOW", "EQUAL", "INCOMPARABLE",
    "Forest", "RootedTree", "TreeError", "compare_loci", "nested",
    "DUPLICATION", "SPECIATION", "TRANSFER",
    "GeneTree", "GeneTreeError", "ObservabilityReport", "PartitionReport",
    "check_observability", "component_partition",
    "InformativeTriples", "Triple", "TripleSet",
    "displayed_triples", "displays", "informative_triples", "species_triples",
    "Inconsistent", "build", "is_consistent", "is_unique_display_tree",
    "NO_SPECIES_TREE_MESSAGE", "ObservabilityError", "PlantedSpeciesTree",
    "ReconcTResult", "ReconciliationError", "ReconciliationMap",
    "ValidationReport", "construct_map", "plant", "reconc_t", "validate_map",
    "Infeasible", "TimeAssignment", "check_time_consistency",
    "ScenarioConfig", "SimulationError", "TimedSpeciesTree", "TrueHistory",
    "Unobservable", "observable_part", "simulate",
    "check_theorem_equivalence", "double_factorial_count",
    "enumerate_species_trees", "exists_map_bruteforce",
    "exists_map_exhaustive",
]
