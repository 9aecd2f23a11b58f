#include "lprx/equalizer.hpp"

#include "lprx/error.hpp"
#include "lprx/parallel.hpp"
#include "lprx/random.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace lprx {

// ---------------------------------------------------------------- matrices

ParityCheckMatrix::ParityCheckMatrix(std::size_t cols, std::vector<std::vector<std::size_t>> row_supports)
    : cols_(cols), supports_(std::move(row_supports)), checks_of_(cols)
{
    if (cols_ == 0) {
        throw ValidationError("parity-check matrix needs at least one column");
    }
    for (std::size_t j = 0; j < supports_.size(); ++j) {
        auto& row = supports_[j];
        if (row.empty()) {
            throw ValidationError("parity-check row " + std::to_string(j) + " is all zero");
        }
        std::sort(row.begin(), row.end());
        if (std::adjacent_find(row.begin(), row.end()) != row.end()) {
            throw ValidationError("parity-check row " + std::to_string(j) + " repeats a column");
        }
        if (row.back() >= cols_) {
            throw ValidationError("parity-check row " + std::to_string(j) + " has a column out of range");
        }
        for (std::size_t i : row) {
            checks_of_[i].push_back(j);
        }
    }
}

ParityCheckMatrix ParityCheckMatrix::from_dense(const std::vector<std::vector<int>>& rows)
{
    if (rows.empty()) {
        throw ValidationError("parity-check matrix has no rows");
    }
    const std::size_t n = rows.front().size();
    std::vector<std::vector<std::size_t>> supports;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        if (rows[j].size() != n) {
            throw ValidationError("parity-check row " + std::to_string(j) + " has the wrong length");
        }
        std::vector<std::size_t> support;
        for (std::size_t i = 0; i < n; ++i) {
            if (rows[j][i] != 0 && rows[j][i] != 1) {
                throw ValidationError("parity-check entries must be 0 or 1");
            }
            if (rows[j][i] == 1) {
                support.push_back(i);
            }
        }
        supports.push_back(std::move(support));
    }
    return ParityCheckMatrix(n, std::move(supports));
}

std::vector<std::vector<int>> ParityCheckMatrix::dense() const
{
    std::vector<std::vector<int>> out(rows(), std::vector<int>(cols_, 0));
    for (std::size_t j = 0; j < rows(); ++j) {
        for (std::size_t i : supports_[j]) {
            out[j][i] = 1;
        }
    }
    return out;
}

bool ParityCheckMatrix::is_codeword(const Bits& c) const
{
    if (c.size() != cols_) {
        return false;
    }
    for (const auto& row : supports_) {
        unsigned parity = 0;
        for (std::size_t i : row) {
            parity ^= c[i] & 1u;
        }
        if (parity != 0) {
            return false;
        }
    }
    return true;
}

namespace {

struct Token {
    long value;
    std::size_t line;
};

std::vector<std::vector<Token>> tokenize_lines(std::string_view text)
{
    std::vector<std::vector<Token>> lines;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream ls(line);
        std::vector<Token> tokens;
        std::string word;
        while (ls >> word) {
            std::size_t used = 0;
            long v = 0;
            try {
                v = std::stol(word, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != word.size()) {
                throw ParseError("line " + std::to_string(line_no) + ": expected an integer, got '" + word + "'");
            }
            tokens.push_back({v, line_no});
        }
        if (!tokens.empty()) {
            lines.push_back(std::move(tokens));
        }
    }
    return lines;
}

} // namespace

ParityCheckMatrix parse_alist(std::string_view text)
{
    const auto lines = tokenize_lines(text);
    std::vector<Token> flat;
    for (const auto& l : lines) {
        flat.insert(flat.end(), l.begin(), l.end());
    }
    std::size_t pos = 0;
    std::size_t last_line = lines.empty() ? 0 : lines.back().back().line;
    auto next = [&](const char* what) -> long {
        if (pos >= flat.size()) {
            throw ParseError("line " + std::to_string(last_line) + ": alist ended early, expected " + what);
        }
        return flat[pos++].value;
    };
    auto fail = [&](const std::string& msg) -> ParseError {
        const std::size_t line = pos == 0 ? 1 : flat[pos - 1].line;
        return ParseError("line " + std::to_string(line) + ": " + msg);
    };
    const long n = next("column count");
    const long m = next("row count");
    if (n <= 0 || m <= 0) {
        throw fail("alist dimensions must be positive");
    }
    const long max_col = next("max column degree");
    const long max_row = next("max row degree");
    if (max_col < 0 || max_row <= 0) {
        throw fail("alist maximum degrees are invalid");
    }
    std::vector<long> col_deg(static_cast<std::size_t>(n)), row_deg(static_cast<std::size_t>(m));
    for (auto& d : col_deg) {
        d = next("column degree");
        if (d < 0 || d > max_col) {
            throw fail("column degree out of range");
        }
    }
    for (auto& d : row_deg) {
        d = next("row degree");
        if (d < 1 || d > max_row) {
            throw fail("row degree out of range");
        }
    }
    // Column lists may be padded with zeros up to the maximum degree.
    auto read_list = [&](long degree, long max_degree, long limit, const char* what) {
        std::vector<std::size_t> out;
        long read = 0;
        while (read < max_degree) {
            if (read >= degree && (pos >= flat.size() || flat[pos].value != 0)) {
                break;
            }
            const long v = next(what);
            ++read;
            if (read <= degree) {
                if (v < 1 || v > limit) {
                    throw fail(std::string(what) + " index out of range");
                }
                out.push_back(static_cast<std::size_t>(v - 1));
            } else if (v != 0) {
                throw fail("nonzero padding in alist list");
            }
        }
        return out;
    };
    std::vector<std::set<std::size_t>> cols(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        auto list = read_list(col_deg[static_cast<std::size_t>(i)], max_col, m, "row");
        cols[static_cast<std::size_t>(i)] = {list.begin(), list.end()};
    }
    std::vector<std::vector<std::size_t>> rows(static_cast<std::size_t>(m));
    for (long j = 0; j < m; ++j) {
        rows[static_cast<std::size_t>(j)] = read_list(row_deg[static_cast<std::size_t>(j)], max_row, n, "column");
    }
    if (pos != flat.size()) {
        throw ParseError("line " + std::to_string(flat[pos].line) + ": trailing data after alist body");
    }
    for (std::size_t j = 0; j < rows.size(); ++j) {
        for (std::size_t i : rows[j]) {
            if (!cols[i].contains(j)) {
                throw ParseError("alist row and column lists disagree at row " + std::to_string(j + 1)
                                 + ", column " + std::to_string(i + 1));
            }
        }
    }
    std::size_t total = 0;
    for (const auto& c : cols) {
        total += c.size();
    }
    std::size_t row_total = 0;
    for (const auto& r : rows) {
        row_total += r.size();
    }
    if (total != row_total) {
        throw ParseError("alist row and column lists disagree in total weight");
    }
    return ParityCheckMatrix(static_cast<std::size_t>(n), std::move(rows));
}

std::string to_alist(const ParityCheckMatrix& h)
{
    std::size_t max_col = 0;
    std::size_t max_row = 0;
    for (std::size_t i = 0; i < h.cols(); ++i) {
        max_col = std::max(max_col, h.checks_of(i).size());
    }
    for (std::size_t j = 0; j < h.rows(); ++j) {
        max_row = std::max(max_row, h.support(j).size());
    }
    std::ostringstream out;
    out << h.cols() << ' ' << h.rows() << '\n' << max_col << ' ' << max_row << '\n';
    auto list = [&out](const std::vector<std::size_t>& v, std::size_t width) {
        for (std::size_t k = 0; k < width; ++k) {
            out << (k ? " " : "") << (k < v.size() ? v[k] + 1 : 0);
        }
        out << '\n';
    };
    for (std::size_t i = 0; i < h.cols(); ++i) {
        out << (i ? " " : "") << h.checks_of(i).size();
    }
    out << '\n';
    for (std::size_t j = 0; j < h.rows(); ++j) {
        out << (j ? " " : "") << h.support(j).size();
    }
    out << '\n';
    for (std::size_t i = 0; i < h.cols(); ++i) {
        list(h.checks_of(i), max_col);
    }
    for (std::size_t j = 0; j < h.rows(); ++j) {
        list(h.support(j), max_row);
    }
    return out.str();
}

ParityCheckMatrix parse_dense_matrix(std::string_view text)
{
    std::vector<std::vector<int>> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::vector<int> row;
        for (char ch : line) {
            if (ch == '0' || ch == '1') {
                row.push_back(ch - '0');
            } else if (ch != ' ' && ch != '\t' && ch != '\r' && ch != ',') {
                throw ParseError("line " + std::to_string(line_no) + ": unexpected character '" + ch
                                 + "' in dense matrix");
            }
        }
        if (row.empty()) {
            continue;
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ParseError("line " + std::to_string(line_no) + ": row length " + std::to_string(row.size())
                             + " differs from " + std::to_string(rows.front().size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw ParseError("dense matrix has no rows");
    }
    try {
        return ParityCheckMatrix::from_dense(rows);
    } catch (const ValidationError& e) {
        throw ParseError(e.what());
    }
}

ParityCheckMatrix load_parity_check_matrix(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path + ": cannot open");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    const bool alist_name = path.size() >= 6 && path.compare(path.size() - 6, 6, ".alist") == 0;
    try {
        return parse_alist(text);
    } catch (const Error& alist_error) {
        if (alist_name) {
            throw ParseError(path + ": " + alist_error.what());
        }
    }
    try {
        return parse_dense_matrix(text);
    } catch (const Error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

ParityCheckMatrix triangle_code()
{
    return ParityCheckMatrix(3, {{0, 1}, {1, 2}, {0, 2}});
}

ParityCheckMatrix hamming_7_4()
{
    return ParityCheckMatrix::from_dense({{1, 0, 1, 0, 1, 0, 1}, {0, 1, 1, 0, 0, 1, 1}, {0, 0, 0, 1, 1, 1, 1}});
}

ParityCheckMatrix regular_ldpc_20()
{
    // Array code: column 5a + b is the point (a, b) with a < 4, b < 5. Check
    // (k, c) of band k holds the points with b = c + k a mod 5. Two points
    // with a != a' lie on a common check of exactly one band, and points with
    // a == a' on none, so no two columns share two checks.
    constexpr std::size_t rows_per_band = 5;
    constexpr std::size_t groups = 4;
    std::vector<std::vector<std::size_t>> rows;
    for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t c = 0; c < rows_per_band; ++c) {
            std::vector<std::size_t> row;
            for (std::size_t a = 0; a < groups; ++a) {
                row.push_back(rows_per_band * a + (c + k * a) % rows_per_band);
            }
            rows.push_back(std::move(row));
        }
    }
    return ParityCheckMatrix(groups * rows_per_band, std::move(rows));
}

std::vector<Bits> codeword_basis(const ParityCheckMatrix& h)
{
    auto a = h.dense();
    const std::size_t m = a.size();
    const std::size_t n = h.cols();
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < m; ++c) {
        std::size_t p = r;
        while (p < m && a[p][c] == 0) {
            ++p;
        }
        if (p == m) {
            continue;
        }
        std::swap(a[p], a[r]);
        for (std::size_t k = 0; k < m; ++k) {
            if (k != r && a[k][c] == 1) {
                for (std::size_t t = 0; t < n; ++t) {
                    a[k][t] ^= a[r][t];
                }
            }
        }
        pivot_col.push_back(c);
        ++r;
    }
    std::vector<bool> is_pivot(n, false);
    for (std::size_t c : pivot_col) {
        is_pivot[c] = true;
    }
    std::vector<Bits> basis;
    for (std::size_t f = 0; f < n; ++f) {
        if (is_pivot[f]) {
            continue;
        }
        Bits v(n, 0);
        v[f] = 1;
        for (std::size_t k = 0; k < pivot_col.size(); ++k) {
            v[pivot_col[k]] = static_cast<std::uint8_t>(a[k][f]);
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

Bits encode(const std::vector<Bits>& basis, const Bits& message)
{
    if (message.size() != basis.size()) {
        throw ValidationError("message length does not match the code dimension");
    }
    if (basis.empty()) {
        throw ValidationError("encode needs a nonempty basis");
    }
    Bits c(basis.front().size(), 0);
    for (std::size_t k = 0; k < basis.size(); ++k) {
        if (message[k] & 1u) {
            for (std::size_t i = 0; i < c.size(); ++i) {
                c[i] ^= basis[k][i];
            }
        }
    }
    return c;
}

// ---------------------------------------------------------------- channel

double ChannelSpec::symbol_energy() const
{
    double e = 0.0;
    for (double t : taps) {
        e += t * t;
    }
    return e;
}

ChannelSpec ChannelSpec::from_snr_db(std::vector<double> taps, double snr_db)
{
    ChannelSpec spec{std::move(taps), 1.0};
    if (spec.taps.empty()) {
        throw ValidationError("channel needs at least one tap");
    }
    spec.sigma2 = spec.symbol_energy() / std::pow(10.0, snr_db / 10.0);
    spec.validate();
    return spec;
}

void ChannelSpec::validate() const
{
    if (taps.empty()) {
        throw ValidationError("channel needs at least one tap");
    }
    for (double t : taps) {
        if (!std::isfinite(t)) {
            throw ValidationError("channel taps must be finite");
        }
    }
    if (taps.size() > 16) {
        throw ValidationError("channel memory above 15 is not supported");
    }
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
        throw ValidationError("noise variance must be positive and finite");
    }
}

Trellis::Trellis(std::vector<double> taps) : taps_(std::move(taps))
{
    if (taps_.empty()) {
        throw ValidationError("channel needs at least one tap");
    }
    memory_ = taps_.size() - 1;
    outputs_.resize(std::size_t{2} << memory_);
    for (std::size_t e = 0; e < outputs_.size(); ++e) {
        double op = 0.0;
        for (std::size_t t = 0; t <= memory_; ++t) {
            op += ((e >> t) & 1u) ? -taps_[t] : taps_[t];
        }
        outputs_[e] = op;
    }
}

std::string Trellis::label(std::size_t edge) const
{
    std::string s;
    for (std::size_t t = 0; t <= memory_; ++t) {
        s += ((edge >> t) & 1u) ? '1' : '0';
    }
    return s;
}

std::size_t Trellis::edge_index(std::span<const std::uint8_t> bits_newest_first)
{
    std::size_t e = 0;
    for (std::size_t t = 0; t < bits_newest_first.size(); ++t) {
        e |= static_cast<std::size_t>(bits_newest_first[t] & 1u) << t;
    }
    return e;
}

bool Trellis::output_injective() const
{
    auto sorted = outputs_;
    std::sort(sorted.begin(), sorted.end());
    return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

Trellis build_trellis(const ChannelSpec& channel)
{
    channel.validate();
    return Trellis(channel.taps);
}

std::vector<std::size_t> edge_sequence(const Bits& codeword, const Bits& pre_bits, std::size_t memory)
{
    if (pre_bits.size() != memory) {
        throw ValidationError("pre-block bit count must equal the channel memory");
    }
    const auto n = static_cast<std::ptrdiff_t>(codeword.size());
    std::vector<std::size_t> edges(codeword.size());
    Bits window(memory + 1);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        for (std::size_t t = 0; t <= memory; ++t) {
            const std::ptrdiff_t time = i - static_cast<std::ptrdiff_t>(t);
            window[t] = time >= 0 ? codeword[static_cast<std::size_t>(time)]
                                  : pre_bits[static_cast<std::size_t>(-time - 1)];
        }
        edges[static_cast<std::size_t>(i)] = Trellis::edge_index(window);
    }
    return edges;
}

Transmission simulate_transmission(const ParityCheckMatrix& h, const ChannelSpec& channel, std::uint64_t seed,
                                   const TransmitOptions& options)
{
    channel.validate();
    const Trellis trellis(channel.taps);
    Rng rng(seed);
    Transmission tx;
    if (options.codeword) {
        if (!h.is_codeword(*options.codeword)) {
            throw ValidationError("supplied word is not a codeword of H");
        }
        tx.codeword = *options.codeword;
    } else {
        const auto basis = codeword_basis(h);
        if (basis.empty()) {
            tx.codeword.assign(h.cols(), 0);
        } else {
            Bits message(basis.size());
            for (auto& b : message) {
                b = rng.bit() ? 1 : 0;
            }
            tx.codeword = encode(basis, message);
        }
    }
    if (options.pre_bits) {
        if (options.pre_bits->size() != trellis.memory()) {
            throw ValidationError("pre-block bit count must equal the channel memory");
        }
        tx.pre_bits = *options.pre_bits;
    } else {
        tx.pre_bits.resize(trellis.memory());
        for (auto& b : tx.pre_bits) {
            b = rng.bit() ? 1 : 0;
        }
    }
    const auto edges = edge_sequence(tx.codeword, tx.pre_bits, trellis.memory());
    const double scale = std::sqrt(channel.sigma2 / 2.0);
    tx.received.resize(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        tx.received[i] = trellis.output(edges[i]);
        if (options.noise) {
            tx.received[i] += scale * rng.normal();
        }
    }
    return tx;
}

BranchMetrics branch_metrics(const Trellis& trellis, const std::vector<double>& received, double sigma2)
{
    if (!(sigma2 > 0.0)) {
        throw ValidationError("noise variance must be positive");
    }
    BranchMetrics m;
    m.log_likelihood.resize(received.size());
    m.lambda_tilde.resize(received.size());
    for (std::size_t i = 0; i < received.size(); ++i) {
        if (!std::isfinite(received[i])) {
            throw ValidationError("received samples must be finite");
        }
        auto& ll = m.log_likelihood[i];
        ll.resize(trellis.num_edges());
        for (std::size_t d = 0; d < ll.size(); ++d) {
            const double diff = received[i] - trellis.output(d);
            ll[d] = -(diff * diff) / sigma2;
        }
        auto& lt = m.lambda_tilde[i];
        lt.resize(ll.size());
        for (std::size_t d = 0; d < ll.size(); ++d) {
            lt[d] = ll[d] - ll[0];
        }
    }
    return m;
}

std::vector<std::vector<Rational>> rational_branch_costs(const BranchMetrics& metrics)
{
    std::vector<std::vector<Rational>> costs(metrics.log_likelihood.size());
    for (std::size_t i = 0; i < costs.size(); ++i) {
        const auto& ll = metrics.log_likelihood[i];
        const Rational base = rational_from_double(ll[0]);
        costs[i].reserve(ll.size());
        for (double v : ll) {
            costs[i].push_back(rational_from_double(v) - base);
        }
    }
    return costs;
}

// ---------------------------------------------------------------- programs

std::vector<Bits> check_words(std::size_t degree)
{
    if (degree == 0 || degree > kMaxCheckDegree) {
        throw ValidationError("check degree must lie in 1.." + std::to_string(kMaxCheckDegree));
    }
    std::vector<Bits> words;
    for (std::size_t v = 0; v < (std::size_t{1} << degree); ++v) {
        Bits w(degree);
        unsigned parity = 0;
        for (std::size_t k = 0; k < degree; ++k) {
            w[k] = static_cast<std::uint8_t>((v >> (degree - 1 - k)) & 1u);
            parity ^= w[k];
        }
        if (parity == 0) {
            words.push_back(std::move(w));
        }
    }
    return words;
}

namespace {

void require_dimensions(const ParityCheckMatrix& h, const BranchMetrics& metrics, const Trellis& trellis)
{
    if (metrics.log_likelihood.size() != h.cols()) {
        throw ValidationError("received length does not match the code length");
    }
    for (const auto& ll : metrics.log_likelihood) {
        if (ll.size() != trellis.num_edges()) {
            throw ValidationError("branch metrics do not match the trellis");
        }
    }
}

std::string label(const char* tag, std::size_t a)
{
    return std::string(tag) + "[" + std::to_string(a) + "]";
}

std::string label(const char* tag, const char* ka, std::size_t a, const char* kb, std::size_t b)
{
    return std::string(tag) + "[" + ka + "=" + std::to_string(a) + "," + kb + "=" + std::to_string(b) + "]";
}

} // namespace

LinearProgram build_explicit_equalizer_lp(const ParityCheckMatrix& h, const Trellis& trellis,
                                          const BranchMetrics& metrics)
{
    require_dimensions(h, metrics, trellis);
    const auto costs = rational_branch_costs(metrics);
    const std::size_t n = h.cols();
    const std::size_t edges = trellis.num_edges();
    LinearProgram lp;
    lp.name = "equalizer";
    std::vector<std::size_t> q_offset(n);
    for (std::size_t i = 0; i < n; ++i) {
        q_offset[i] = lp.num_variables();
        for (std::size_t d = 0; d < edges; ++d) {
            lp.add_variable({VarKind::EdgeMass, i, d}, d == 0 ? Rational(0) : costs[i][d]);
        }
    }
    std::vector<std::size_t> w_offset(h.rows());
    std::vector<std::vector<Bits>> words(h.rows());
    for (std::size_t j = 0; j < h.rows(); ++j) {
        words[j] = check_words(h.support(j).size());
        w_offset[j] = lp.num_variables();
        for (std::size_t b = 0; b < words[j].size(); ++b) {
            lp.add_variable({VarKind::CheckWord, j, b});
        }
    }
    for (std::size_t j = 0; j < h.rows(); ++j) {
        std::vector<Term> terms;
        for (std::size_t b = 0; b < words[j].size(); ++b) {
            terms.push_back({w_offset[j] + b, 1});
        }
        lp.add_constraint(std::move(terms), 1, label("wnorm", j));
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Term> terms;
        for (std::size_t d = 0; d < edges; ++d) {
            terms.push_back({q_offset[i] + d, 1});
        }
        lp.add_constraint(std::move(terms), 1, label("qnorm", i));
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j : h.checks_of(i)) {
            const auto& support = h.support(j);
            const auto k = static_cast<std::size_t>(std::find(support.begin(), support.end(), i) - support.begin());
            std::vector<Term> terms;
            for (std::size_t d = 0; d < edges; ++d) {
                if (trellis.input(d) == 0) {
                    terms.push_back({q_offset[i] + d, 1});
                }
            }
            for (std::size_t b = 0; b < words[j].size(); ++b) {
                if (words[j][b][k] == 0) {
                    terms.push_back({w_offset[j] + b, -1});
                }
            }
            lp.add_constraint(std::move(terms), 0, label("couple", "i", i, "j", j));
        }
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t s = 1; s < trellis.num_states(); ++s) {
            std::vector<Term> terms;
            for (std::size_t d = 0; d < edges; ++d) {
                if (trellis.end_state(d) == s) {
                    terms.push_back({q_offset[i] + d, 1});
                }
            }
            for (std::size_t d = 0; d < edges; ++d) {
                if (trellis.start_state(d) == s) {
                    terms.push_back({q_offset[i + 1] + d, -1});
                }
            }
            lp.add_constraint(std::move(terms), 0, label("flow", "i", i, "s", s));
        }
    }
    return lp;
}

FactorGraphModel build_equalizer_model(const ParityCheckMatrix& h, const Trellis& trellis,
                                       const BranchMetrics& metrics)
{
    require_dimensions(h, metrics, trellis);
    const std::size_t n = h.cols();
    const std::size_t edges = trellis.num_edges();
    std::vector<std::string> symbols;
    for (std::size_t d = 0; d < edges; ++d) {
        symbols.push_back(trellis.label(d));
    }
    std::vector<Alphabet> alphabets(n, Alphabet(symbols));
    std::vector<LocalBehaviour> behaviours;
    for (std::size_t j = 0; j < h.rows(); ++j) {
        const auto& support = h.support(j);
        if (support.size() > kMaxCheckDegree) {
            throw ValidationError("check degree above " + std::to_string(kMaxCheckDegree));
        }
        LocalBehaviour beh;
        beh.scope = support;
        Tuple t(support.size(), 0);
        // Mixed-radix count with the first position most significant.
        for (;;) {
            unsigned parity = 0;
            for (auto d : t) {
                parity ^= trellis.input(d);
            }
            if (parity == 0) {
                beh.allowed.push_back(t);
            }
            std::size_t k = t.size();
            while (k > 0 && ++t[k - 1] == edges) {
                t[k - 1] = 0;
                --k;
            }
            if (k == 0) {
                break;
            }
        }
        behaviours.push_back(std::move(beh));
    }
    if (trellis.memory() >= 1) {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            LocalBehaviour beh;
            beh.scope = {i, i + 1};
            for (std::size_t a = 0; a < edges; ++a) {
                for (std::size_t b = 0; b < edges; ++b) {
                    if (trellis.end_state(a) == trellis.start_state(b)) {
                        beh.allowed.push_back({a, b});
                    }
                }
            }
            behaviours.push_back(std::move(beh));
        }
    }
    std::vector<EvidenceTable> evidence;
    for (std::size_t i = 0; i < n; ++i) {
        evidence.push_back(EvidenceTable::from_log_weights(i, metrics.log_likelihood[i]));
    }
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) {
        names.push_back("d" + std::to_string(i));
    }
    return FactorGraphModel(std::move(alphabets), std::move(behaviours), std::move(evidence), std::move(names));
}

FactorGraphModel code_model(const ParityCheckMatrix& h, const std::vector<std::vector<double>>& log_weights)
{
    if (log_weights.size() != h.cols()) {
        throw ValidationError("one evidence vector per code bit is required");
    }
    std::vector<LocalBehaviour> behaviours;
    for (std::size_t j = 0; j < h.rows(); ++j) {
        const auto& support = h.support(j);
        if (support.size() < 2) {
            throw ValidationError("code-only model needs checks of degree at least 2");
        }
        LocalBehaviour beh;
        beh.scope = support;
        for (const auto& w : check_words(support.size())) {
            beh.allowed.emplace_back(w.begin(), w.end());
        }
        behaviours.push_back(std::move(beh));
    }
    std::vector<EvidenceTable> evidence;
    for (std::size_t i = 0; i < h.cols(); ++i) {
        evidence.push_back(EvidenceTable::from_log_weights(i, log_weights[i]));
    }
    std::vector<std::string> names;
    for (std::size_t i = 0; i < h.cols(); ++i) {
        names.push_back("c" + std::to_string(i));
    }
    return FactorGraphModel(std::vector<Alphabet>(h.cols(), Alphabet::binary()), std::move(behaviours),
                            std::move(evidence), std::move(names));
}

// ---------------------------------------------------------------- receivers

void decode_edges(const Configuration& edges, std::size_t memory, Bits& codeword, Bits& pre_bits)
{
    codeword.resize(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        codeword[i] = static_cast<std::uint8_t>(edges[i] & 1u);
    }
    pre_bits.assign(memory, 0);
    if (!edges.empty()) {
        for (std::size_t k = 0; k < memory; ++k) {
            pre_bits[k] = static_cast<std::uint8_t>((edges[0] >> (k + 1)) & 1u);
        }
    }
}

EqualizerDecision run_explicit_receiver(const ParityCheckMatrix& h, const Trellis& trellis,
                                        const BranchMetrics& metrics, const SolveOptions& options)
{
    EqualizerDecision out;
    out.program = build_explicit_equalizer_lp(h, trellis, metrics);
    auto result = solve(out.program, options);
    if (result.status != SolveStatus::Optimal) {
        throw ConstructionError("equalizer LP is " + std::string(status_name(result.status)));
    }
    out.point = std::move(result.point);
    out.objective = std::move(result.objective);
    out.pivot_count = result.pivot_count;
    const std::size_t n = h.cols();
    const std::size_t edges = trellis.num_edges();
    if (!is_integral(out.point)) {
        out.kind = OutcomeKind::Failure;
        out.codeword.assign(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            Rational mass;
            for (std::size_t d = 0; d < edges; ++d) {
                if (trellis.input(d) == 1) {
                    mass += out.point.values[i * edges + d];
                }
            }
            out.codeword[i] = mass > Rational(1, 2) ? 1 : 0;
        }
        return out;
    }
    Configuration path(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < edges; ++d) {
            if (out.point.values[i * edges + d] == 1) {
                path[i] = d;
            }
        }
    }
    decode_edges(path, trellis.memory(), out.codeword, out.pre_bits);
    if (!h.is_codeword(out.codeword) || edge_sequence(out.codeword, out.pre_bits, trellis.memory()) != path) {
        throw ConstructionError("integral equalizer vertex is not a consistent codeword path");
    }
    out.kind = OutcomeKind::Configuration;
    return out;
}

Rational explicit_objective(const std::vector<std::vector<Rational>>& costs, const Bits& codeword,
                            const Bits& pre_bits, std::size_t memory)
{
    const auto edges = edge_sequence(codeword, pre_bits, memory);
    Rational total;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        total += costs.at(i).at(edges[i]);
    }
    return total;
}

OracleResult joint_ml_oracle(const ParityCheckMatrix& h, const Trellis& trellis, const BranchMetrics& metrics,
                             std::uint64_t cap)
{
    require_dimensions(h, metrics, trellis);
    const auto basis = codeword_basis(h);
    const std::size_t k = basis.size();
    const std::size_t memory = trellis.memory();
    if (k + memory >= 63 || (std::uint64_t{1} << (k + memory)) > cap) {
        throw CapExceededError("joint ML search space 2^" + std::to_string(k + memory) + " exceeds the cap");
    }
    const auto costs = rational_branch_costs(metrics);
    std::optional<OracleResult> best;
    Bits message(k);
    Bits pre(memory);
    for (std::uint64_t u = 0; u < (std::uint64_t{1} << k); ++u) {
        for (std::size_t b = 0; b < k; ++b) {
            message[b] = static_cast<std::uint8_t>((u >> b) & 1u);
        }
        const Bits c = k == 0 ? Bits(h.cols(), 0) : encode(basis, message);
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << memory); ++v) {
            for (std::size_t b = 0; b < memory; ++b) {
                pre[b] = static_cast<std::uint8_t>((v >> b) & 1u);
            }
            Rational obj = explicit_objective(costs, c, pre, memory);
            if (!best || obj > best->objective
                || (obj == best->objective && std::tie(c, pre) < std::tie(best->codeword, best->pre_bits))) {
                best = OracleResult{c, pre, std::move(obj)};
            }
        }
    }
    return *best;
}

std::vector<ErrorRateRow> simulate_error_rates(const ParityCheckMatrix& h, const std::vector<double>& taps,
                                               const std::vector<double>& snr_db, std::size_t trials,
                                               std::uint64_t seed, const SimulationOptions& options)
{
    if (trials == 0) {
        throw ValidationError("trials must be at least 1");
    }
    if (snr_db.empty()) {
        throw ValidationError("at least one SNR point is required");
    }
    options.sp.validate();
    struct TrialResult {
        bool word_error = false;
        std::size_t bit_errors = 0;
        bool failure = false;
        bool agree = false;
    };
    std::vector<ErrorRateRow> rows;
    for (std::size_t p = 0; p < snr_db.size(); ++p) {
        const auto channel = ChannelSpec::from_snr_db(taps, snr_db[p]);
        const Trellis trellis = build_trellis(channel);
        std::vector<TrialResult> results(trials);
        parallel_for(
            trials,
            [&](std::size_t t) {
                const auto tx = simulate_transmission(h, channel, derive_seed(seed, p * trials + t));
                const auto metrics = branch_metrics(trellis, tx.received, channel.sigma2);
                const auto lp = run_explicit_receiver(h, trellis, metrics);
                auto& r = results[t];
                r.failure = lp.kind == OutcomeKind::Failure;
                r.word_error = r.failure || lp.codeword != tx.codeword;
                for (std::size_t i = 0; i < h.cols(); ++i) {
                    r.bit_errors += lp.codeword[i] != tx.codeword[i];
                }
                const auto model = build_equalizer_model(h, trellis, metrics);
                const auto sp = run_sum_product(model, options.sp);
                Bits sp_bits(h.cols());
                for (std::size_t i = 0; i < h.cols(); ++i) {
                    sp_bits[i] = static_cast<std::uint8_t>(sp.decision[i] & 1u);
                }
                r.agree = sp_bits == lp.codeword;
            },
            options.workers == 0 ? worker_count() : options.workers);
        ErrorRateRow row;
        row.snr_db = snr_db[p];
        row.trials = trials;
        std::size_t words = 0, bits = 0, failures = 0, agree = 0;
        for (const auto& r : results) {
            words += r.word_error;
            bits += r.bit_errors;
            failures += r.failure;
            agree += r.agree;
        }
        const double tr = static_cast<double>(trials);
        row.wer = static_cast<double>(words) / tr;
        row.ber = static_cast<double>(bits) / (tr * static_cast<double>(h.cols()));
        row.failure_rate = static_cast<double>(failures) / tr;
        row.ml_cert_rate = 1.0 - row.failure_rate;
        row.sp_lp_agreement = static_cast<double>(agree) / tr;
        rows.push_back(row);
    }
    return rows;
}

} // namespace lprx
