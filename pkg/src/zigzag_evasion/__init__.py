"""Evasion paths in time-varying sensor networks via zigzag limits of free components."""

from .errors import (ClearanceTooSmall, DomainError, DualityMismatch, EvasionError, IsoAssumptionViolated,
                     NonGenericScenario, ResourceBudgetExceeded, ScenarioValidationError)
from .evasion import (SectionReport, Verdict, build_ZC_homology, build_ZX, coarse_diagnostic, decide_evasion,
                      duality_check, refine_partition, stack_nerves)
from .freespace import free_components
from .geometry import (Change, Event, EventSchedule, Field, Intersection, Scenario, Trajectory, balls_intersect,
                       check_fence_coverage, clearance_at, detect_events, miniball, position_at)
from .io import dump_scenario, load_scenario, loads_scenario, scenario_from_dict, scenario_to_dict
from .oracle import GridWorld, build_gridworld, grid_reachability, path_space_components
from .simplicial import SimplicialComplex, betti, build_complex, induced_map, smith_normal_form
from .zigzag import (AbGroup, FiniteGroup, ZigzagAb, ZigzagSets, lim_sets, r1lim_ab, r1lim_finite, reduce_spans)

__version__ = "0.1.0"
