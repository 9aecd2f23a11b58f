#include "lprx/simplex.hpp"

#include "lprx/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>

namespace lprx {

std::string_view status_name(SolveStatus status)
{
    switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    }
    return "?";
}

bool is_integral(const LpPoint& point)
{
    return std::all_of(point.values.begin(), point.values.end(),
                       [](const Rational& v) { return v == 0 || v == 1; });
}

namespace {

// Sparse dictionary tableau. Row r reads  x_basis[r] + sum a_rc x_c = rhs[r]
// over the nonbasic columns, with the basic column's own entry kept as 1.
// Reduced costs d_c = c_c - c_B B^-1 A_c are stored densely; a column may
// enter when d_c > 0.
class Tableau {
public:
    struct Entry {
        std::uint32_t col;
        Rational value;
    };
    using Row = std::vector<Entry>;

    Tableau(const LinearProgram& lp, std::size_t pivot_limit) : n_(lp.num_variables()), pivot_limit_(pivot_limit)
    {
        const std::size_t m = lp.num_constraints();
        rows_.reserve(m);
        for (std::size_t r = 0; r < m; ++r) {
            const auto& con = lp.constraints[r];
            std::map<std::uint32_t, Rational> merged;
            for (const auto& t : con.terms) {
                merged[static_cast<std::uint32_t>(t.var)] += t.coeff;
            }
            const bool flip = sgn(con.rhs) < 0;
            Row row;
            for (auto& [col, value] : merged) {
                if (!is_zero(value)) {
                    row.push_back({col, flip ? Rational(-value) : std::move(value)});
                }
            }
            // Artificial column for this row, initially basic.
            row.push_back({static_cast<std::uint32_t>(n_ + r), Rational(1)});
            rows_.push_back(std::move(row));
            rhs_.push_back(flip ? Rational(-con.rhs) : con.rhs);
            basis_.push_back(n_ + r);
        }
        total_cols_ = n_ + m;
    }

    /// Phase I; returns false when the program is infeasible.
    bool find_feasible_basis()
    {
        reduced_.assign(total_cols_, Rational(0));
        objective_ = 0;
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            for (const auto& e : rows_[r]) {
                if (e.col < n_) {
                    reduced_[e.col] += e.value;
                }
            }
            objective_ -= rhs_[r];
        }
        if (iterate(/*allow_artificial=*/false) != Outcome::Optimal) {
            throw ConstructionError("phase I reported an unbounded ray");
        }
        if (sgn(objective_) < 0) {
            return false;
        }
        drive_out_artificials();
        return true;
    }

    /// Phase II; returns false when the objective is unbounded.
    bool optimize(const std::vector<Rational>& cost)
    {
        reduced_.assign(n_, Rational(0));
        for (std::size_t c = 0; c < n_; ++c) {
            reduced_[c] = cost[c];
        }
        objective_ = 0;
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            const Rational& cb = cost[basis_[r]];
            if (is_zero(cb)) {
                continue;
            }
            for (const auto& e : rows_[r]) {
                reduced_[e.col] -= cb * e.value;
            }
            objective_ += cb * rhs_[r];
        }
        return iterate(false) == Outcome::Optimal;
    }

    /// Pivots the given columns into the basis by elimination, replacing
    /// artificials only. Returns false unless the resulting basic solution is
    /// feasible with every remaining artificial at level zero.
    bool crash(const std::vector<std::size_t>& columns)
    {
        reduced_.assign(total_cols_, Rational(0));
        objective_ = 0;
        for (std::size_t col : columns) {
            for (std::size_t r = 0; r < rows_.size(); ++r) {
                if (basis_[r] >= n_ && find(rows_[r], col)) {
                    pivot(r, col);
                    break;
                }
            }
        }
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            if (sgn(rhs_[r]) < 0 || (basis_[r] >= n_ && sgn(rhs_[r]) != 0)) {
                return false;
            }
        }
        drive_out_artificials();
        return true;
    }

    LpPoint point() const
    {
        LpPoint p;
        p.values.assign(n_, Rational(0));
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            p.values[basis_[r]] = rhs_[r];
        }
        return p;
    }

    const Rational& objective() const { return objective_; }
    const std::vector<std::size_t>& basis() const { return basis_; }
    std::size_t pivots() const { return pivots_; }

private:
    enum class Outcome { Optimal, Unbounded };

    Outcome iterate(bool allow_artificial)
    {
        const std::size_t limit = allow_artificial ? total_cols_ : n_;
        for (;;) {
            std::optional<std::size_t> entering;
            for (std::size_t c = 0; c < limit; ++c) {
                if (sgn(reduced_[c]) > 0) {
                    entering = c;
                    break;
                }
            }
            if (!entering) {
                return Outcome::Optimal;
            }
            const auto leaving = ratio_test(*entering);
            if (!leaving) {
                return Outcome::Unbounded;
            }
            pivot(*leaving, *entering);
        }
    }

    static const Rational* find(const Row& row, std::size_t col)
    {
        auto it = std::lower_bound(row.begin(), row.end(), col,
                                   [](const Entry& e, std::size_t c) { return e.col < c; });
        return (it != row.end() && it->col == col) ? &it->value : nullptr;
    }

    // Minimum ratio; ties go to the row whose basic variable has the lowest index.
    std::optional<std::size_t> ratio_test(std::size_t col) const
    {
        std::optional<std::size_t> best;
        Rational best_ratio;
        Rational ratio;
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            const Rational* a = find(rows_[r], col);
            if (!a || sgn(*a) <= 0) {
                continue;
            }
            ratio = rhs_[r] / *a;
            if (!best || ratio < best_ratio || (ratio == best_ratio && basis_[r] < basis_[*best])) {
                best = r;
                best_ratio = ratio;
            }
        }
        return best;
    }

    void pivot(std::size_t r, std::size_t col)
    {
        if (pivot_limit_ != 0 && pivots_ >= pivot_limit_) {
            throw ConstructionError("simplex pivot limit reached");
        }
        ++pivots_;
        Row& prow = rows_[r];
        const Rational* piv = find(prow, col);
        if (*piv != 1) {
            const Rational inv = 1 / *piv;
            for (auto& e : prow) {
                e.value *= inv;
            }
            rhs_[r] *= inv;
        }
        Rational factor;
        Rational scratch;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (i == r) {
                continue;
            }
            const Rational* a = find(rows_[i], col);
            if (!a) {
                continue;
            }
            factor = *a;
            eliminate(rows_[i], prow, factor, scratch);
            scratch = factor * rhs_[r];
            rhs_[i] -= scratch;
        }
        if (col < reduced_.size() && !is_zero(reduced_[col])) {
            factor = reduced_[col];
            for (const auto& e : prow) {
                if (e.col < reduced_.size()) {
                    scratch = factor * e.value;
                    reduced_[e.col] -= scratch;
                }
            }
            scratch = factor * rhs_[r];
            objective_ += scratch;
        }
        basis_[r] = col;
    }

    // row -= factor * prow, merged over sorted columns; exact zeros are dropped.
    static void eliminate(Row& row, const Row& prow, const Rational& factor, Rational& scratch)
    {
        Row out;
        out.reserve(row.size() + prow.size());
        auto a = row.begin();
        auto b = prow.begin();
        while (a != row.end() || b != prow.end()) {
            if (b == prow.end() || (a != row.end() && a->col < b->col)) {
                out.push_back(std::move(*a));
                ++a;
            } else if (a == row.end() || b->col < a->col) {
                scratch = factor * b->value;
                out.push_back({b->col, Rational(-scratch)});
                ++b;
            } else {
                scratch = factor * b->value;
                a->value -= scratch;
                if (!is_zero(a->value)) {
                    out.push_back(std::move(*a));
                }
                ++a;
                ++b;
            }
        }
        row = std::move(out);
    }

    void drive_out_artificials()
    {
        for (std::size_t r = 0; r < rows_.size();) {
            if (basis_[r] < n_) {
                ++r;
                continue;
            }
            // Basic artificial at level zero: swap in any structural column,
            // or drop the row when it is a combination of the others.
            std::optional<std::size_t> col;
            for (const auto& e : rows_[r]) {
                if (e.col < n_) {
                    col = e.col;
                    break;
                }
            }
            if (col) {
                pivot(r, *col);
                ++r;
            } else {
                rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(r));
                rhs_.erase(rhs_.begin() + static_cast<std::ptrdiff_t>(r));
                basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
            }
        }
        for (auto& row : rows_) {
            std::erase_if(row, [this](const Entry& e) { return e.col >= n_; });
        }
        total_cols_ = n_;
    }

    std::size_t n_;
    std::size_t total_cols_ = 0;
    std::size_t pivot_limit_;
    std::vector<Row> rows_;
    std::vector<Rational> rhs_;
    std::vector<std::size_t> basis_;
    std::vector<Rational> reduced_;
    Rational objective_;
    std::size_t pivots_ = 0;
};

// Dense double-precision simplex used only to propose a basis. Dantzig
// pricing, with Bland's rule after a run of degenerate pivots.
class FloatTableau {
public:
    explicit FloatTableau(const LinearProgram& lp) : n_(lp.num_variables()), m_(lp.num_constraints())
    {
        width_ = n_ + m_ + 1;
        t_.assign(m_ * width_, 0.0);
        for (std::size_t r = 0; r < m_; ++r) {
            const auto& con = lp.constraints[r];
            const double rhs = con.rhs.get_d();
            const double sign = rhs < 0 ? -1.0 : 1.0;
            for (const auto& term : con.terms) {
                at(r, term.var) += sign * term.coeff;
            }
            at(r, n_ + r) = 1.0;
            at(r, width_ - 1) = sign * rhs;
            basis_.push_back(n_ + r);
        }
        active_.assign(m_, true);
    }

    std::optional<std::vector<std::size_t>> solve(const std::vector<Rational>& cost)
    {
        std::vector<double> phase1(n_ + m_, 0.0);
        for (std::size_t r = 0; r < m_; ++r) {
            phase1[n_ + r] = -1.0;
        }
        if (!run(phase1) || objective(phase1) < -1e-7) {
            return std::nullopt;
        }
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < n_) {
                continue;
            }
            std::size_t best = n_;
            double best_abs = 1e-7;
            for (std::size_t c = 0; c < n_; ++c) {
                if (std::abs(at(r, c)) > best_abs) {
                    best_abs = std::abs(at(r, c));
                    best = c;
                }
            }
            if (best < n_) {
                pivot(r, best);
            } else {
                active_[r] = false;
            }
        }
        std::vector<double> c2(n_ + m_, 0.0);
        for (std::size_t c = 0; c < n_; ++c) {
            c2[c] = cost[c].get_d();
        }
        if (!run(c2)) {
            return std::nullopt;
        }
        std::vector<std::size_t> out;
        for (std::size_t r = 0; r < m_; ++r) {
            if (active_[r] && basis_[r] < n_) {
                out.push_back(basis_[r]);
            }
        }
        return out;
    }

private:
    static constexpr double kPivotTol = 1e-9;
    static constexpr double kCostTol = 1e-9;

    double& at(std::size_t r, std::size_t c) { return t_[r * width_ + c]; }
    double at(std::size_t r, std::size_t c) const { return t_[r * width_ + c]; }

    double objective(const std::vector<double>& cost) const
    {
        double z = 0.0;
        for (std::size_t r = 0; r < m_; ++r) {
            if (active_[r]) {
                z += cost[basis_[r]] * at(r, width_ - 1);
            }
        }
        return z;
    }

    bool run(const std::vector<double>& cost)
    {
        const std::size_t limit = 50 * (n_ + m_) + 1000;
        std::size_t degenerate_run = 0;
        std::vector<double> y(n_, 0.0);
        for (std::size_t iter = 0; iter < limit; ++iter) {
            // Reduced costs of the structural columns; artificials never re-enter.
            for (std::size_t c = 0; c < n_; ++c) {
                y[c] = cost[c];
            }
            for (std::size_t r = 0; r < m_; ++r) {
                const double cb = cost[basis_[r]];
                if (!active_[r] || cb == 0.0) {
                    continue;
                }
                const double* row = &t_[r * width_];
                for (std::size_t c = 0; c < n_; ++c) {
                    y[c] -= cb * row[c];
                }
            }
            const bool bland = degenerate_run > 20;
            std::size_t entering = n_;
            double best = kCostTol;
            for (std::size_t c = 0; c < n_; ++c) {
                if (y[c] > best) {
                    entering = c;
                    if (bland) {
                        break;
                    }
                    best = y[c];
                }
            }
            if (entering == n_) {
                return true;
            }
            std::size_t leaving = m_;
            double ratio = 0.0;
            for (std::size_t r = 0; r < m_; ++r) {
                const double a = at(r, entering);
                if (!active_[r] || a <= kPivotTol) {
                    continue;
                }
                const double q = std::max(0.0, at(r, width_ - 1)) / a;
                if (leaving == m_ || q < ratio - 1e-12
                    || (q <= ratio + 1e-12 && (bland ? basis_[r] < basis_[leaving] : a > at(leaving, entering)))) {
                    leaving = r;
                    ratio = q;
                }
            }
            if (leaving == m_) {
                return false;
            }
            degenerate_run = ratio <= 1e-12 ? degenerate_run + 1 : 0;
            pivot(leaving, entering);
        }
        return false;
    }

    void pivot(std::size_t r, std::size_t col)
    {
        double* prow = &t_[r * width_];
        const double inv = 1.0 / prow[col];
        for (std::size_t c = 0; c < width_; ++c) {
            prow[c] *= inv;
        }
        prow[col] = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) {
                continue;
            }
            double* row = &t_[i * width_];
            const double f = row[col];
            if (f == 0.0) {
                continue;
            }
            for (std::size_t c = 0; c < width_; ++c) {
                row[c] -= f * prow[c];
            }
            row[col] = 0.0;
        }
        basis_[r] = col;
    }

    std::size_t n_;
    std::size_t m_;
    std::size_t width_;
    std::vector<double> t_;
    std::vector<std::size_t> basis_;
    std::vector<bool> active_;
};

} // namespace

SolveResult solve(const LinearProgram& program, const SolveOptions& options)
{
    if (program.cost.size() != program.num_variables()) {
        throw ValidationError("cost vector does not match the variable catalog");
    }
    SolveResult result;
    std::optional<Tableau> warm;
    if (options.warm_start && program.num_constraints() > 0) {
        if (auto hint = FloatTableau(program).solve(program.cost)) {
            warm.emplace(program, options.pivot_limit);
            result.warm_started = warm->crash(*hint);
            if (!result.warm_started) {
                warm.reset();
            }
        }
    }
    Tableau tableau = warm ? std::move(*warm) : Tableau(program, options.pivot_limit);
    if (!result.warm_started && !tableau.find_feasible_basis()) {
        result.status = SolveStatus::Infeasible;
        result.pivot_count = tableau.pivots();
        return result;
    }
    if (!tableau.optimize(program.cost)) {
        result.status = SolveStatus::Unbounded;
        result.pivot_count = tableau.pivots();
        return result;
    }
    result.status = SolveStatus::Optimal;
    result.point = tableau.point();
    result.objective = program.objective(result.point);
    if (result.objective != tableau.objective()) {
        throw ConstructionError("simplex objective bookkeeping diverged from cost . point");
    }
    result.basis = tableau.basis();
    result.pivot_count = tableau.pivots();
    return result;
}

} // namespace lprx
