#pragma once

// Exact two-bank, two-asset system: both banks hold assets a with
// l = b = theta a, e = (1-theta) a, c = gamma a, and the two asset price falls
// are independent two-sided exponentials with rate lambda.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "cascade.hpp"
#include "errors.hpp"
#include "landscape.hpp"
#include "quadrature.hpp"

namespace anwser::n2 {

struct AnalyticConfig {
    double theta = 0.1;
    double gamma = 0.05;
    double rate = 1.0;  // lambda
    double x11 = 1.0;   // bank 1's fraction in asset 1
    double x21 = 0.0;   // bank 2's fraction in asset 1
    LossRule rule = LossRule::capped_shortfall;

    /// Lambda = gamma lambda / (1 - theta).
    double scaled_rate() const { return gamma * rate / (1.0 - theta); }
    double threshold() const { return gamma / (1.0 - theta); }

    /// Relabels the banks so that x11 >= x21; all probabilities are invariant.
    AnalyticConfig canonical() const {
        AnalyticConfig c = *this;
        if (c.x11 < c.x21) std::swap(c.x11, c.x21);
        return c;
    }
};

struct FailureCountProbs {
    double p0 = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
};

/// (1-theta) (X v1 + (1-X) v2) > gamma: the bank's shock loss exceeds its capital.
inline HalfPlane bank_fails(const AnalyticConfig& c, double x) {
    const double k = 1.0 - c.theta;
    return {k * x, k * (1.0 - x), c.gamma};
}

inline Region no_failure_region(const AnalyticConfig& c) {
    return {{bank_fails(c, c.x11).complement(), bank_fails(c, c.x21).complement()}};
}

inline Region one_failure_region(const AnalyticConfig& c) {
    const auto f1 = bank_fails(c, c.x11);
    const auto f2 = bank_fails(c, c.x21);
    return {{f1, f2.complement()}, {f1.complement(), f2}};
}

inline Region two_failure_region(const AnalyticConfig& c) {
    return {{bank_fails(c, c.x11), bank_fails(c, c.x21)}};
}

/// Exactly one initial failure and the survivor fails after the transmitted
/// loss. Branches split at v1 = gamma/(1-theta); in canonical order bank 1 is
/// the failed one iff v1 is above the split. Under the capped rule the
/// transmitted loss is min(shortfall, theta), and min(s, theta) + L > gamma
/// is the intersection of s + L > gamma and theta + L > gamma.
inline Region contagion_region(const AnalyticConfig& config) {
    const auto c = config.canonical();
    const auto f1 = bank_fails(c, c.x11);
    const auto f2 = bank_fails(c, c.x21);
    const double g = c.threshold();
    const HalfPlane above_split{1.0, 0.0, g};

    // The survivor's own loss plus a full loan (theta) exceeds its capital.
    auto with_loan = [&](HalfPlane survivor) {
        return HalfPlane{survivor.a, survivor.b, c.gamma - c.theta};
    };
    // Failed bank's shortfall (loss - gamma) plus survivor's loss exceeds gamma.
    const HalfPlane with_shortfall{f1.a + f2.a, f1.b + f2.b, 2.0 * c.gamma};

    ConvexPiece bank1_failed{f1, f2.complement(), above_split, with_loan(f2)};
    ConvexPiece bank2_failed{f2, f1.complement(), above_split.complement(), with_loan(f1)};
    if (c.rule == LossRule::capped_shortfall) {
        bank1_failed.push_back(with_shortfall);
        bank2_failed.push_back(with_shortfall);
    }
    return {bank1_failed, bank2_failed};
}

namespace detail {

// u^2 exp(-Lambda/u), continuous at u = 0.
inline double tail_term(double u, double scaled_rate) {
    return u > 0.0 ? u * u * std::exp(-scaled_rate / u) : 0.0;
}

}  // namespace detail

/// Closed forms for p(|F_0| = 0, 1, 2). They hold for x11 >= x21, so the
/// config is canonicalized first; x = 1/2 is a removable singularity.
inline FailureCountProbs failure_count_probs_closed(const AnalyticConfig& config) {
    const auto c = config.canonical();
    const double lam = c.scaled_rate();
    const double x1 = c.x11;
    const double x2 = c.x21;
    const double d1 = 2.0 * x1 - 1.0;
    const double d2 = 2.0 * x2 - 1.0;

    const double lo1 = detail::tail_term(1.0 - x1, lam) / (2.0 * d1);  // (X11-1)^2 e^{Lambda/(X11-1)} / 2(2X11-1)
    const double hi1 = detail::tail_term(x1, lam) / (2.0 * d1);        // X11^2 e^{-Lambda/X11} / 2(2X11-1)
    const double lo2 = detail::tail_term(1.0 - x2, lam) / (2.0 * d2);
    const double hi2 = detail::tail_term(x2, lam) / (2.0 * d2);
    const double cross = ((x1 - 1.0) / d1 - (x2 - 1.0) / d2) * std::exp(-2.0 * lam);

    FailureCountProbs p;
    p.p2 = -lo1 + hi2 - 0.25 * cross;
    p.p1 = lo1 + hi1 - lo2 - hi2 + 0.5 * cross;
    p.p0 = -hi1 + lo2 - 0.25 * cross + 1.0;
    return p;
}

inline FailureCountProbs failure_count_probs_quadrature(const AnalyticConfig& config) {
    const auto c = config.canonical();
    return {region_probability(no_failure_region(c), c.rate).value,
            region_probability(one_failure_region(c), c.rate).value,
            region_probability(two_failure_region(c), c.rate).value};
}

/// Closed forms away from x = 1/2, quadrature within 1e-6 of it.
inline FailureCountProbs failure_count_probs(const AnalyticConfig& config) {
    constexpr double singular_tol = 1e-6;
    if (std::abs(2.0 * config.x11 - 1.0) <= singular_tol || std::abs(2.0 * config.x21 - 1.0) <= singular_tol)
        return failure_count_probs_quadrature(config);
    return failure_count_probs_closed(config);
}

/// p(|F_0| = 1, |F_1| = 2).
inline double contagion_probability(const AnalyticConfig& config) {
    if (config.x11 == config.x21) return 0.0;
    return region_probability(contagion_region(config), config.rate).value;
}

/// Canonical portfolio for landscape coordinates: x11 >= x21, x11 + x21 = 1 + epsilon.
inline std::pair<double, double> pair_from_indices(double delta, double epsilon) {
    if (!(delta >= 0.0 && epsilon >= 0.0 && delta + epsilon <= 1.0 + 1e-12))
        throw InfeasibleTargets("need delta, epsilon >= 0 and delta + epsilon <= 1");
    return {std::min(0.5 * (1.0 + epsilon + delta), 1.0), std::max(0.5 * (1.0 + epsilon - delta), 0.0)};
}

struct LandscapeParameters {
    double theta = 0.1;
    double gamma = 0.05;
    double rate = 1.0;
    LossRule rule = LossRule::capped_shortfall;
    double quantile = 0.999;
};

namespace detail {

// Smallest k with P(count <= k) >= q.
inline int discrete_quantile(const std::array<double, 3>& probs, double q) {
    long double cum = 0.0L;
    for (int k = 0; k < 3; ++k) {
        cum += probs[static_cast<std::size_t>(k)];
        if (cum >= static_cast<long double>(q) - 1e-15L) return k;
    }
    return 2;
}

}  // namespace detail

inline CellStats analytic_cell(const LandscapeParameters& params, double delta, double epsilon) {
    CellStats cell;
    cell.delta = delta;
    cell.epsilon = epsilon;
    if (delta + epsilon > 1.0 + 1e-12 || delta < 0.0 || epsilon < 0.0) {
        cell.status = CellStatus::infeasible;
        cell.message = "delta + epsilon > 1";
        return cell;
    }
    try {
        const auto [x11, x21] = pair_from_indices(delta, epsilon);
        const AnalyticConfig config{params.theta, params.gamma, params.rate, x11, x21, params.rule};
        const auto p = failure_count_probs(config);
        const double pc = contagion_probability(config);

        cell.p0 = p.p0;
        cell.p1 = p.p1;
        cell.p2 = p.p2;
        cell.pc = pc;

        const double mean_initial = p.p1 + 2.0 * p.p2;
        const double mean_final = (p.p1 - pc) + 2.0 * (p.p2 + pc);
        cell.a_mean = mean_final / mean_initial;
        const int q_initial = detail::discrete_quantile({p.p0, p.p1, p.p2}, params.quantile);
        const int q_final = detail::discrete_quantile({p.p0, p.p1 - pc, p.p2 + pc}, params.quantile);
        cell.a_q999 = quantile_ratio(static_cast<std::uint32_t>(q_final), static_cast<std::uint32_t>(q_initial));

        const double any = p.p1 + p.p2;
        cell.a_mean_conditioned = (p.p1 + pc + p.p2) / any;
        cell.a_q999_conditioned = (any - pc) / any >= params.quantile - 1e-15 ? 1.0 : 2.0;
    } catch (const Error& e) {
        cell.status = CellStatus::failed;
        cell.message = e.what();
    }
    return cell;
}

/// Exact landscape over the grid; cells outside delta + epsilon <= 1 are marked infeasible.
inline LandscapeTable analytic_landscape(const LandscapeParameters& params, const GridSpec& grid) {
    LandscapeTable table;
    for (const auto& [d, e] : grid.cells()) table.cells.push_back(analytic_cell(params, d, e));
    return table;
}

}  // namespace anwser::n2
