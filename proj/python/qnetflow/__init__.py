"""Flow-level quantum network simulator and entanglement-rate allocator."""

from qnetflow._core import (
    Allocation,
    App,
    Assignment,
    FeasiblePath,
    Link,
    Network,
    Node,
    NodeKind,
    PairDemand,
    Path,
    Rejection,
    RepeaterBound,
    TrafficClass,
    Violation,
    allocate,
    brute_force_optimal,
    build_grid,
    expand_app,
    feasible_paths,
    fidelity_generic,
    fidelity_perfect,
    generate_random,
    generate_workload,
    jain_index,
    k_shortest_paths,
    load_apps,
    load_network,
    max_intermediate_repeaters,
    path_fidelity,
    run_experiment,
    save_allocation,
    save_apps,
    save_network,
    verify_allocation,
    werner_weight,
)

__all__ = [
    "Allocation",
    "App",
    "Assignment",
    "FeasiblePath",
    "Link",
    "Network",
    "Node",
    "NodeKind",
    "PairDemand",
    "Path",
    "Rejection",
    "RepeaterBound",
    "TrafficClass",
    "Violation",
    "allocate",
    "brute_force_optimal",
    "build_grid",
    "expand_app",
    "feasible_paths",
    "fidelity_generic",
    "fidelity_perfect",
    "generate_random",
    "generate_workload",
    "jain_index",
    "k_shortest_paths",
    "load_apps",
    "load_network",
    "max_intermediate_repeaters",
    "path_fidelity",
    "run_experiment",
    "save_allocation",
    "save_apps",
    "save_network",
    "verify_allocation",
    "werner_weight",
]

__version__ = "0.1.0"
