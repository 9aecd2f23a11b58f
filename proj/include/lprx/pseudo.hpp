#pragma once

// Finite graph covers of a factor graph and the exact correspondence between
// valid cover configurations and rational points of the Q polytope.
//
// Copies are numbered 0..M-1. For factor j and scope position k (variable
// i = I_j[k]), permutations[j][k][l] is the copy of variable i wired to copy l
// of factor j, so the lifted local configuration of factor copy l is
// (x[i][permutations[j][k][l]])_k.

#include "lprx/lp.hpp"
#include "lprx/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lprx {

using Permutation = std::vector<std::size_t>;

struct GraphCover {
    std::size_t degree = 1;
    std::vector<std::vector<Permutation>> permutations; ///< [factor][scope position]
    /// One permutation per observed variable, in evidence-set order. Pendant
    /// wiring never affects validity or the pseudoconfiguration vector.
    std::vector<Permutation> pendant;

    friend bool operator==(const GraphCover&, const GraphCover&) = default;
};

/// labels[i][l]: symbol of copy l of variable i.
using CoverConfiguration = std::vector<std::vector<SymbolIndex>>;

struct CoverLift {
    GraphCover cover;
    CoverConfiguration labels;
};

/// All permutations the identity.
GraphCover identity_cover(const FactorGraphModel& model, std::size_t degree);

/// Throws ValidationError unless every permutation is a bijection of the right size.
void validate_cover(const FactorGraphModel& model, const GraphCover& cover);

/// True iff every lifted local configuration lies in its local behaviour.
/// Throws ValidationError on inconsistent dimensions or out-of-range symbols.
bool is_valid_cover_configuration(const FactorGraphModel& model, const GraphCover& cover,
                                  const CoverConfiguration& labels);

/// Integer symbol counts per variable and their normalization by M.
struct PseudoconfigurationVector {
    std::vector<std::vector<std::size_t>> counts;
    std::vector<std::vector<Rational>> normalized;
};

PseudoconfigurationVector pseudoconfiguration_vector(const FactorGraphModel& model, const CoverConfiguration& labels);

/// (g-bar, p) in Q layout: label frequencies per variable and lifted local
/// configuration frequencies per factor. Throws ValidationError if the
/// configuration is not valid on the cover; the result is checked against Q.
LpPoint cover_to_lp_point(const FactorGraphModel& model, const GraphCover& cover, const CoverConfiguration& labels);

/// Degree M = LCD of the p coordinates. Copies of variable i receive symbols in
/// increasing order with multiplicities M g_i; copies of factor j receive
/// tuples in catalog order with multiplicities M p_j; each class (i, j, a) is
/// wired by matching sorted copy lists. Throws ValidationError (listing the
/// violated rows) unless the point lies in Q.
CoverLift lp_point_to_cover(const FactorGraphModel& model, const LpPoint& q_point);

/// Uniform random permutations, then a backtracking search with random value
/// order for a valid labelling. Returns nullopt when none exists or the node
/// budget runs out.
std::optional<CoverLift> random_cover_configuration(const FactorGraphModel& model, std::size_t degree,
                                                    std::uint64_t seed, std::size_t node_budget = 1'000'000);

/// {"degree", "permutations": [{"factor", "variable", "perm"}], "pendant": [...],
///  "labels": {name: [symbols]}}
std::string cover_to_json(const FactorGraphModel& model, const CoverLift& lift);

} // namespace lprx
