#pragma once

// Sum-product baseline on the same factor graph: log-domain messages,
// flooding schedule, evidence entered once as variable priors.

#include "lprx/model.hpp"

#include <vector>

namespace lprx {

struct SpSettings {
    std::size_t max_iterations = 100;
    double damping = 0.0;    ///< in [0, 1); weight of the previous message
    double tolerance = 1e-12; ///< L-infinity change of probability-domain messages

    /// Throws ValidationError on out-of-range fields.
    void validate() const;
};

struct SpOutput {
    std::vector<std::vector<double>> beliefs; ///< per variable, sums to 1
    Configuration decision;                   ///< belief argmax, ties to the lowest symbol
    bool converged = false;
    bool valid = false;                       ///< decision lies in B
    std::size_t iterations = 0;
};

SpOutput run_sum_product(const FactorGraphModel& model, const SpSettings& settings = {});
SpOutput run_sum_product(const FactorGraphModel& model, std::vector<EvidenceTable> evidence,
                         const SpSettings& settings = {});

/// Exact marginals by enumeration of B weighted by the global function.
/// Throws ValidationError when B is empty.
std::vector<std::vector<double>> brute_force_marginals(const FactorGraphModel& model,
                                                       std::uint64_t cap = kDefaultEnumerationCap);

} // namespace lprx
