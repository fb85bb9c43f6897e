#pragma once

// Investment portfolios X (rows: banks, columns: assets; rows sum to one) and
// the diversity / risk-exposure indices used as landscape coordinates.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "random.hpp"

namespace anwser {

class Portfolio {
public:
    Portfolio() = default;
    Portfolio(std::size_t n_banks, std::size_t n_assets, double fill = 0.0)
        : n_banks_(n_banks), n_assets_(n_assets), x_(n_banks * n_assets, fill) {}

    static Portfolio from_rows(const std::vector<std::vector<double>>& rows) {
        Portfolio p(rows.size(), rows.empty() ? 0 : rows.front().size());
        for (std::size_t n = 0; n < rows.size(); ++n)
            for (std::size_t m = 0; m < p.n_assets_; ++m) p(n, m) = rows[n].at(m);
        return p;
    }

    std::size_t n_banks() const { return n_banks_; }
    std::size_t n_assets() const { return n_assets_; }

    double& operator()(std::size_t n, std::size_t m) { return x_[n * n_assets_ + m]; }
    double operator()(std::size_t n, std::size_t m) const { return x_[n * n_assets_ + m]; }

    std::span<const double> row(std::size_t n) const {
        return {x_.data() + n * n_assets_, n_assets_};
    }

    /// Row sums within tol of one and entries in [0, 1].
    bool valid(double tol = 1e-12) const {
        for (std::size_t n = 0; n < n_banks_; ++n) {
            double s = 0.0;
            for (double v : row(n)) {
                if (v < -tol || v > 1.0 + tol) return false;
                s += v;
            }
            if (std::abs(s - 1.0) > tol) return false;
        }
        return true;
    }

    friend bool operator==(const Portfolio&, const Portfolio&) = default;

private:
    std::size_t n_banks_ = 0;
    std::size_t n_assets_ = 0;
    std::vector<double> x_;
};

struct PortfolioIndices {
    double delta = 0.0;
    double epsilon = 0.0;
};

/// Mean absolute difference between bank rows, averaged over assets.
/// Per column, the ordered-pair sum of |x_i - x_j| is 2 * sum_k x_(k) (2k - N + 1)
/// over the sorted column, so this runs in O(N M log N).
inline double diversity(const Portfolio& x) {
    const std::size_t n = x.n_banks();
    const std::size_t m = x.n_assets();
    if (n < 2 || m == 0) return 0.0;

    std::vector<double> col(n);
    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < n; ++i) col[i] = x(i, j);
        std::sort(col.begin(), col.end());
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            s += col[k] * (2.0 * static_cast<double>(k) - static_cast<double>(n) + 1.0);
        total += 2.0 * s;
    }
    const double nn = static_cast<double>(n);
    return total / (static_cast<double>(m) * nn * (nn - 1.0));
}

/// Deviation of the system-wide allocation from uniform, centred at N/M.
inline double risk_exposure(const Portfolio& x) {
    const std::size_t n = x.n_banks();
    const std::size_t m = x.n_assets();
    if (n == 0 || m == 0) return 0.0;
    const double centre = static_cast<double>(n) / static_cast<double>(m);
    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < n; ++i) col += x(i, j);
        total += std::abs(col - centre);
    }
    return total / static_cast<double>(n);
}

inline PortfolioIndices portfolio_indices(const Portfolio& x) {
    return {diversity(x), risk_exposure(x)};
}

enum class PortfolioKind { uniform, bank_unique, system_wide };

inline Portfolio named_portfolio(PortfolioKind kind, std::size_t n_banks, std::size_t n_assets,
                                 std::optional<std::size_t> target_asset = std::nullopt) {
    if (n_assets == 0) throw TooFewAssets("portfolio needs at least one asset");
    switch (kind) {
        case PortfolioKind::uniform:
            return Portfolio(n_banks, n_assets, 1.0 / static_cast<double>(n_assets));
        case PortfolioKind::bank_unique: {
            if (n_assets < n_banks)
                throw TooFewAssets("bank-unique specialization needs M >= N (M=" +
                                   std::to_string(n_assets) + ", N=" + std::to_string(n_banks) + ")");
            Portfolio p(n_banks, n_assets);
            for (std::size_t n = 0; n < n_banks; ++n) p(n, n) = 1.0;
            return p;
        }
        case PortfolioKind::system_wide: {
            const std::size_t m = target_asset.value_or(0);
            if (m >= n_assets) throw TooFewAssets("system-wide target asset out of range");
            Portfolio p(n_banks, n_assets);
            for (std::size_t n = 0; n < n_banks; ++n) p(n, m) = 1.0;
            return p;
        }
    }
    return {};
}

/// Two-asset portfolio with half the banks at X_n1 = mu + h and half at mu - h.
/// With h = delta (N-1)/N and mu = 1/2 +- epsilon/2 the indices hit the targets.
struct TwoGroupPlan {
    std::size_t n_banks = 0;
    double high = 0.5;  // X_n1 of the first group
    double low = 0.5;   // X_n1 of the second group

    /// Asset-1 fractions of the two distinct rows.
    std::array<double, 2> rows() const { return {high, low}; }
};

/// Largest delta reachable by a two-group portfolio at risk exposure epsilon.
inline double max_two_group_delta(std::size_t n_banks, double epsilon) {
    const double n = static_cast<double>(n_banks);
    return (1.0 - epsilon) * n / (2.0 * (n - 1.0));
}

inline TwoGroupPlan plan_two_group(std::size_t n_banks, double delta, double epsilon, bool upper) {
    if (n_banks < 2 || n_banks % 2 != 0)
        throw InfeasibleTargets("two-group portfolio needs an even number of banks");
    if (!(delta >= 0.0 && epsilon >= 0.0 && delta + epsilon <= 1.0 + 1e-12))
        throw InfeasibleTargets("need delta, epsilon >= 0 and delta + epsilon <= 1");

    const double n = static_cast<double>(n_banks);
    const double h = delta * (n - 1.0) / n;
    const double mu = upper ? 0.5 + 0.5 * epsilon : 0.5 - 0.5 * epsilon;
    constexpr double slack = 1e-12;
    if (mu + h > 1.0 + slack || mu - h < -slack)
        throw InfeasibleTargets("(delta, epsilon) = (" + std::to_string(delta) + ", " +
                                std::to_string(epsilon) + ") not reachable with N=" +
                                std::to_string(n_banks));
    return {n_banks, std::min(mu + h, 1.0), std::max(mu - h, 0.0)};
}

/// Materializes the plan with a shuffled group assignment.
inline Portfolio realize(const TwoGroupPlan& plan, Rng& rng) {
    std::vector<std::uint8_t> group(plan.n_banks, 0);
    std::fill(group.begin() + static_cast<std::ptrdiff_t>(plan.n_banks / 2), group.end(), 1);
    rng.shuffle(std::span<std::uint8_t>(group));

    Portfolio p(plan.n_banks, 2);
    for (std::size_t n = 0; n < plan.n_banks; ++n) {
        const double x1 = group[n] == 0 ? plan.high : plan.low;
        p(n, 0) = x1;
        p(n, 1) = 1.0 - x1;
    }
    return p;
}

/// Seeded M=2 portfolio hitting (delta, epsilon). The first draw of the
/// stream picks the sign of mu - 1/2, the rest shuffles the groups.
inline Portfolio construct_portfolio(std::size_t n_banks, double delta, double epsilon, Rng& rng) {
    const bool upper = rng.coin();
    Portfolio p = realize(plan_two_group(n_banks, delta, epsilon, upper), rng);
    const auto idx = portfolio_indices(p);
    if (std::abs(idx.delta - delta) > 1e-9 || std::abs(idx.epsilon - epsilon) > 1e-9)
        throw InfeasibleTargets("constructed portfolio misses its targets");
    return p;
}

inline Portfolio construct_portfolio(std::size_t n_banks, double delta, double epsilon,
                                     std::uint64_t seed) {
    Rng rng(seed);
    return construct_portfolio(n_banks, delta, epsilon, rng);
}

}  // namespace anwser
