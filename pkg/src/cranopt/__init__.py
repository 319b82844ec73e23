"""Power-efficient resource allocation for massive-MIMO cloud RANs.

The package solves the joint user-association / RRH on-off / fronthaul
assignment / transmit-power problem with a two-step successive-convex scheme
built on geometric programming, and ships the max-SINR reference algorithm
plus an exhaustive oracle for validating it on small instances.
"""

from .errors import (CertifiedInfeasibleError, CranoptError,
                     DegenerateWeightsError, ExpansionPointError,
                     InstanceTooLargeError, InvalidAssociationError,
                     InvariantViolationError, ModelDomainError, ParseError,
                     StepInfeasibleError, UndefinedEnergyEfficiencyError)
from .gp import (GpProgram, GpSolution, Monomial, Posynomial,
                 agma_monomialize, eval_posynomial, gp_from_json, gp_to_json,
                 log_transform, solve)
from .rates import (Allocation, approx_rate, energy_efficiency, exact_rate,
                    exact_rate_matrix, interference, interference_matrix,
                    throughput, users_on_rrh, utility)
from .scenario import (FeasibilityReport, Scenario, ScenarioConfig,
                       channel_gain, generate_scenario, load_scenario,
                       save_scenario, validate_solution)
from .subproblems import (AgmaWeights, Step1Iterate, Step2Iterate,
                          build_bbu_assignment_gp, build_step1_gp,
                          build_step2_gp, compute_weights_step1,
                          dc_linearize_log_users, gamma_table)
from .solver import (Solution, SolverConfig, SolveTrace, outer_solve,
                     repair_feasibility, round_allocation, step1_solve,
                     step2_solve)
from .baseline import (PowerGrid, baseline_solve, brute_force_oracle,
                       max_sinr_association)

__version__ = "0.1.0"
