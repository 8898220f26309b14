"""Nash equilibria in stochastic multiplayer games with omega-regular objectives."""

from .endcomponents import (generic_ec_union, maximal_end_components, rabin_ec, streett_ec)
from .game import (Game, GameError, GameFormatError, coalition_view, is_subarena, make_game, parse_game,
                   restrict, serialize_game, validate_smg)
from .markov import (almost_sure_reach_set, induce_markov_chain, induce_mdp, mc_omega_payoff,
                     mdp_max_reach_value, mdp_omega_value, reach_probabilities_exact)
from .nash import (Certificate, EquilibriumWitness, ThresholdQuery, build_qualne_mdp, certify_positional,
                   certify_stationary, certify_zero_sum_equilibrium, ec_sweep_profile, emit_statne_smt,
                   gen_rabin_hardness_game, solve_posne, solve_qualne, solve_statne, synthesize_equilibrium,
                   verify_finite_state_profile)
from .objectives import Objective, accepts_limit_set, complement_objective
from .strategy import FiniteStateStrategy
from .zerosum import positive_value_set, punishment_strategy, qualitative_parity_solve, to_parity

__all__ = [
    "Certificate",
    "EquilibriumWitness",
    "FiniteStateStrategy",
    "Game",
    "GameError",
    "GameFormatError",
    "Objective",
    "ThresholdQuery",
    "accepts_limit_set",
    "almost_sure_reach_set",
    "build_qualne_mdp",
    "certify_positional",
    "certify_stationary",
    "certify_zero_sum_equilibrium",
    "coalition_view",
    "complement_objective",
    "ec_sweep_profile",
    "emit_statne_smt",
    "gen_rabin_hardness_game",
    "generic_ec_union",
    "induce_markov_chain",
    "induce_mdp",
    "is_subarena",
    "make_game",
    "maximal_end_components",
    "mc_omega_payoff",
    "mdp_max_reach_value",
    "mdp_omega_value",
    "parse_game",
    "positive_value_set",
    "punishment_strategy",
    "qualitative_parity_solve",
    "rabin_ec",
    "reach_probabilities_exact",
    "restrict",
    "serialize_game",
    "solve_posne",
    "solve_qualne",
    "solve_statne",
    "streett_ec",
    "synthesize_equilibrium",
    "to_parity",
    "validate_smg",
    "verify_finite_state_profile",
]
