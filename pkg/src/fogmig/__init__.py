"""fogmig: discrete-time simulator and planner for application component
migration in hybrid cloud/fog networks."""

from .feasibility import (FeasibilityReport, Violation,
                          check_access_link_utilization,
                          check_assignment_deployed,
                          check_chain_link_utilization, check_node_capacity,
                          check_vnf_capacity, is_feasible)
from .harness import (FeasibilityError, Metrics, RunConfig, RunRow, SweepError,
                      emit_results, run_simulation, sweep,
                      with_connected_vnfs, with_user_connections)
from .makespan import (MakespanReport, ProgressState, RequestMakespan,
                       Schedule, SimulationIncomplete, Slice,
                       advance_slot, aggregate_over_tree, communication_time,
                       incoming_traffic, migration_counts, migration_time,
                       processing_time, request_makespan)
from .model import (EndUser, FgEdge, Node, Request, Scenario, ScenarioError,
                    StructureTree, UserFlow, VnfType, build_structure_tree,
                    emit_scenario, immediate_predecessors, leaf, load_preset,
                    load_scenario, loop, par, parse_scenario, sel, seq,
                    topological_order)
from .network import MobilityTrace, NetworkModel, read_waypoints
from .planner import (AcmPlanner, Decision, ExhaustivePlanner,
                      NoMigrationPlanner, PlacementError, Planner,
                      PlannerError, PlannerState, RandomMigrationPlanner,
                      acm_step, candidate_cost, compare_planners,
                      exhaustive_step, initial_placement, make_planner,
                      no_migration_step, random_migration_step)

__version__ = "0.1.0"
