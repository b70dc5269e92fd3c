"""Opinion equilibria on social graphs and target selection for campaigns."""
from .campaign import (ALGORITHMS, CampaignResult, CampaignStep, evaluate_curve, greedy,
                       heuristic_degree, heuristic_free_degree, heuristic_min_s, heuristic_min_z,
                       heuristic_rwr, marginal_gain, objective, run_algorithm, rwr_scores)
from .equilibrium import SolverConfig, SolveStats, overall_opinion, solve, solve_exact, solve_power
from .graph import (AbsorbingSystem, SocialGraph, build_augmented, degree, free_degree,
                    load_edge_list, write_edge_list)
from .icampaign import (InvariantReport, icampaign_select, verify_invariant_general,
                        verify_invariant_special)
from .oracle import WalkEstimate, brute_force_optimal, monte_carlo_opinion, personal_cost

__version__ = "0.1.0"
