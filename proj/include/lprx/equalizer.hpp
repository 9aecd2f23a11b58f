#pragma once

// Joint equalization and decoding of a binary linear code sent with BPSK over
// a causal intersymbol-interference channel. The receiver is posed both as a
// dedicated LP over check words and trellis edges and as a generic
// factor-graph model whose variables are the trellis edges.
//
// Indexing: symbol times i = 0..n-1, r_i = sum_t h_t M(c_{i-t}) + n_i, with
// M(0) = 1, M(1) = -1. The pre-block bits are pre[k] = c_{-1-k}, k < L.
// A trellis edge d = (d_0..d_L) = (c_i..c_{i-L}) has index sum_t d_t 2^t, so
// the all-zero edge is index 0 and ip(d) = bit 0 of the index.

#include "lprx/lp.hpp"
#include "lprx/model.hpp"
#include "lprx/receiver.hpp"
#include "lprx/sum_product.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lprx {

using Bits = std::vector<std::uint8_t>;

inline constexpr std::size_t kMaxCheckDegree = 8;

/// Binary m x n matrix stored by row supports.
class ParityCheckMatrix {
public:
    /// Supports are sorted on construction. Throws ValidationError on an empty
    /// row, an out-of-range column or a repeated column within a row.
    ParityCheckMatrix(std::size_t cols, std::vector<std::vector<std::size_t>> row_supports);

    static ParityCheckMatrix from_dense(const std::vector<std::vector<int>>& rows);

    std::size_t rows() const noexcept { return supports_.size(); }
    std::size_t cols() const noexcept { return cols_; }
    const std::vector<std::size_t>& support(std::size_t row) const { return supports_.at(row); }
    const std::vector<std::vector<std::size_t>>& supports() const noexcept { return supports_; }
    /// Checks touching column i, ascending.
    const std::vector<std::size_t>& checks_of(std::size_t col) const { return checks_of_.at(col); }
    std::vector<std::vector<int>> dense() const;
    /// H c = 0 over GF(2).
    bool is_codeword(const Bits& c) const;

    friend bool operator==(const ParityCheckMatrix& a, const ParityCheckMatrix& b)
    {
        return a.cols_ == b.cols_ && a.supports_ == b.supports_;
    }

private:
    std::size_t cols_;
    std::vector<std::vector<std::size_t>> supports_;
    std::vector<std::vector<std::size_t>> checks_of_;
};

/// alist text (1-based indices, zero padding tolerated). Errors carry line numbers.
ParityCheckMatrix parse_alist(std::string_view text);
std::string to_alist(const ParityCheckMatrix& h);
/// Rows of 0/1 characters, optionally separated by spaces; '#' starts a comment.
ParityCheckMatrix parse_dense_matrix(std::string_view text);
/// Picks the alist parser when the first token line has two integers, else dense.
ParityCheckMatrix load_parity_check_matrix(const std::string& path);

/// Three pairwise checks on three bits.
ParityCheckMatrix triangle_code();
ParityCheckMatrix hamming_7_4();
/// A (3,4)-regular code of length 20 with girth at least 6, fixed construction.
ParityCheckMatrix regular_ldpc_20();

/// Rows span the null space of H over GF(2); the rank is the code dimension.
std::vector<Bits> codeword_basis(const ParityCheckMatrix& h);
Bits encode(const std::vector<Bits>& basis, const Bits& message);

struct ChannelSpec {
    std::vector<double> taps; ///< h_0..h_L
    double sigma2 = 1.0;

    std::size_t memory() const { return taps.empty() ? 0 : taps.size() - 1; }
    double symbol_energy() const;
    /// sigma2 = E_s / 10^(snr_db/10).
    static ChannelSpec from_snr_db(std::vector<double> taps, double snr_db);
    /// Throws ValidationError unless there is at least one finite tap and sigma2 > 0.
    void validate() const;
};

class Trellis {
public:
    explicit Trellis(std::vector<double> taps);

    std::size_t memory() const noexcept { return memory_; }
    std::size_t num_edges() const noexcept { return outputs_.size(); }
    std::size_t num_states() const noexcept { return std::size_t{1} << memory_; }
    unsigned input(std::size_t edge) const { return static_cast<unsigned>(edge & 1u); }
    /// (d_1..d_L) as an integer with d_1 in bit 0.
    std::size_t start_state(std::size_t edge) const { return edge >> 1; }
    /// (d_0..d_{L-1}) as an integer with d_0 in bit 0.
    std::size_t end_state(std::size_t edge) const { return edge & (num_states() - 1); }
    double output(std::size_t edge) const { return outputs_.at(edge); }
    /// "d_0 d_1 .. d_L" as a bit string, e.g. "10".
    std::string label(std::size_t edge) const;
    const std::vector<double>& taps() const noexcept { return taps_; }

    /// Edge index for the bits (c_i, c_{i-1}, .., c_{i-L}).
    static std::size_t edge_index(std::span<const std::uint8_t> bits_newest_first);
    /// True iff op is injective on the edge set (checked exactly on doubles).
    bool output_injective() const;

private:
    std::vector<double> taps_;
    std::size_t memory_;
    std::vector<double> outputs_;
};

Trellis build_trellis(const ChannelSpec& channel);

/// Edge index per symbol time for a codeword and its pre-block bits.
std::vector<std::size_t> edge_sequence(const Bits& codeword, const Bits& pre_bits, std::size_t memory);

struct Transmission {
    Bits codeword;
    Bits pre_bits;
    std::vector<double> received;
};

struct TransmitOptions {
    /// Encoded as given when set; otherwise a uniform message is encoded.
    std::optional<Bits> codeword;
    std::optional<Bits> pre_bits;
    bool noise = true;
};

/// Noise n_i ~ N(0, sigma2 / 2), real. Deterministic in the seed.
Transmission simulate_transmission(const ParityCheckMatrix& h, const ChannelSpec& channel, std::uint64_t seed,
                                   const TransmitOptions& options = {});

/// Per-time edge log-likelihoods ll[i][d] = -(r_i - op(d))^2 / sigma2 and
/// their differences lambda_tilde[i][d] = ll[i][d] - ll[i][0] (entry 0 is 0).
struct BranchMetrics {
    std::vector<std::vector<double>> log_likelihood;
    std::vector<std::vector<double>> lambda_tilde;
};

BranchMetrics branch_metrics(const Trellis& trellis, const std::vector<double>& received, double sigma2);

/// Exact LP costs rat(ll[i][d]) - rat(ll[i][0]).
std::vector<std::vector<Rational>> rational_branch_costs(const BranchMetrics& metrics);

/// Even-weight words over the support of one check, lexicographic with the
/// first support position most significant.
std::vector<Bits> check_words(std::size_t degree);

/// Variables q(i,d) then w(j,b). Rows: w normalization per check, q
/// normalization per time, coupling per (time i, check j containing i) on the
/// ip = 0 edges, and flow conservation for times 0..n-2 and states 1..2^L-1.
LinearProgram build_explicit_equalizer_lp(const ParityCheckMatrix& h, const Trellis& trellis,
                                          const BranchMetrics& metrics);

/// Variables are the per-time trellis edges (alphabet of edge labels, all-zero
/// edge first). Factors 0..m-1 are the checks over the touched edge variables
/// with even input parity; factors m..m+n-2 link consecutive times by
/// end_state(d_i) = start_state(d_{i+1}) and exist only when L >= 1.
/// Evidence log h_i(d) = ll[i][d].
FactorGraphModel build_equalizer_model(const ParityCheckMatrix& h, const Trellis& trellis,
                                       const BranchMetrics& metrics);

/// Code-only model: one binary variable per bit, one even-parity factor per check.
FactorGraphModel code_model(const ParityCheckMatrix& h, const std::vector<std::vector<double>>& log_weights);

struct EqualizerDecision {
    OutcomeKind kind = OutcomeKind::Failure;
    Bits codeword;   ///< on failure: ip-mass hard decisions (mass of ip = 1 above 1/2)
    Bits pre_bits;   ///< empty on failure
    Rational objective;
    LinearProgram program;
    LpPoint point;
    std::size_t pivot_count = 0;
};

EqualizerDecision run_explicit_receiver(const ParityCheckMatrix& h, const Trellis& trellis,
                                        const BranchMetrics& metrics, const SolveOptions& options = {});

/// Decodes (codeword, pre bits) from an integral generic-model configuration.
void decode_edges(const Configuration& edges, std::size_t memory, Bits& codeword, Bits& pre_bits);

struct OracleResult {
    Bits codeword;
    Bits pre_bits;
    Rational objective; ///< sum_i rat(ll[i][d_i]) - rat(ll[i][0]), matching the explicit LP
};

/// Exhaustive search over codewords and pre-block patterns; ties go to the
/// lexicographically smallest (codeword, pre bits). Throws CapExceededError
/// when |C| 2^L exceeds `cap`.
OracleResult joint_ml_oracle(const ParityCheckMatrix& h, const Trellis& trellis, const BranchMetrics& metrics,
                             std::uint64_t cap = std::uint64_t{1} << 20);

/// Objective of a (codeword, pre bits) pair under the explicit LP cost.
Rational explicit_objective(const std::vector<std::vector<Rational>>& costs, const Bits& codeword,
                            const Bits& pre_bits, std::size_t memory);

struct ErrorRateRow {
    double snr_db = 0.0;
    std::size_t trials = 0;
    double wer = 0.0;
    double ber = 0.0;
    double failure_rate = 0.0;
    double ml_cert_rate = 0.0;
    double sp_lp_agreement = 0.0;
};

struct SimulationOptions {
    SpSettings sp;
    std::size_t workers = 0; ///< 0 selects the default pool size
};

/// Trial t at SNR point k uses seed derive_seed(seed, k * trials + t).
/// Failures count as word errors; bit errors on failure use the ip-mass decisions.
std::vector<ErrorRateRow> simulate_error_rates(const ParityCheckMatrix& h, const std::vector<double>& taps,
                                               const std::vector<double>& snr_db, std::size_t trials,
                                               std::uint64_t seed, const SimulationOptions& options = {});

} // namespace lprx
