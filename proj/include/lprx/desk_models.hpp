#pragma once

// Small fixed and randomly generated instances used by the tests, the CLI
// and the Python bindings.

#include "lprx/model.hpp"
#include "lprx/random.hpp"

#include <vector>

namespace lprx {

/// x1 = x2 over {0,1}; evidence weights h1 and h2 (linear domain).
FactorGraphModel repetition_model(std::vector<double> h1 = {1.0, 2.0}, std::vector<double> h2 = {1.0, 3.0});

/// Pairwise equality checks x1=x2, x2=x3, x1=x3; B = {000, 111}.
/// Evidence log h_i = (0, lambda_tilde[i]).
FactorGraphModel equality_triangle(std::vector<double> lambda_tilde = {0.0, 0.0, 0.0});

/// Pairwise exclusion checks (no two ones) on a 3-cycle; B = {000,100,010,001}.
/// Its local polytope has the all-half fractional vertex.
FactorGraphModel exclusion_triangle(std::vector<double> lambda_tilde = {0.0, 0.0, 0.0});

/// Path x0 - x1 - .. over `alphabet` symbols; consecutive pairs (a, b) are
/// allowed unless b = a + 1 mod alphabet. Every variable is observed with
/// uniform evidence.
FactorGraphModel chain_model(std::size_t length = 3, std::size_t alphabet = 3);

/// Ternary x0, binary hidden x1 = [x0 >= 1], ternary x2 tied to x1; x1 has no
/// evidence, and B projects injectively onto (x0, x2).
FactorGraphModel hidden_chain_model();

/// Random factor tree with at most `max_variables` variables (alphabets of
/// size 2 or 3, pairwise and occasional triple factors, evidence on a random
/// nonempty subset). Every behaviour covers each symbol at each position, so
/// B is never empty.
FactorGraphModel random_tree_model(std::uint64_t seed, std::size_t max_variables = 10);

/// Same structure and evidence set; log weights drawn i.i.d. N(0, scale^2).
FactorGraphModel randomize_evidence(const FactorGraphModel& model, Rng& rng, double scale = 1.0);

/// Log weights (-(y-1)^2/sigma2, -(y+1)^2/sigma2) of BPSK samples y.
std::vector<std::vector<double>> bpsk_log_weights(const std::vector<double>& received, double sigma2);

} // namespace lprx
