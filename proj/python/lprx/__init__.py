"""Exact LP receivers for factor-graph models.

Rational results (objectives, LP coordinates) are returned as
``fractions.Fraction`` so integrality and equality tests stay exact.
"""

from ._lprx import (
    Model,
    ReceiverOutput,
    brute_force_optimum,
    chain_model,
    check_injectivity,
    cover_round_trip,
    decode_equalizer,
    dump_program,
    equality_triangle,
    exclusion_triangle,
    global_behaviour,
    hamming_7_4,
    hidden_chain_model,
    load_model,
    parse_model_json,
    random_cover_configuration,
    random_tree_model,
    repetition_model,
    run_receiver,
    run_sum_product,
    simulate_error_rates,
    verify_derived_constraints,
)

__all__ = [
    "Model",
    "ReceiverOutput",
    "brute_force_optimum",
    "chain_model",
    "check_injectivity",
    "cover_round_trip",
    "decode_equalizer",
    "dump_program",
    "equality_triangle",
    "exclusion_triangle",
    "global_behaviour",
    "hamming_7_4",
    "hidden_chain_model",
    "load_model",
    "parse_model_json",
    "random_cover_configuration",
    "random_tree_model",
    "repetition_model",
    "run_receiver",
    "run_sum_product",
    "simulate_error_rates",
    "verify_derived_constraints",
]
