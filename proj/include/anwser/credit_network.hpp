#pragma once

// Interbank credit networks: generalized Barabasi-Albert generation, the
// degree-product loan weighting, and the density/concentration indices.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "balance_sheet.hpp"
#include "errors.hpp"
#include "network_types.hpp"
#include "random.hpp"

namespace anwser {

/// Growth with preferential attachment on total degree, then a fair coin
/// orients every undirected edge creditor -> debtor.
///
/// Starts from a clique of m+1 banks (m = round(kappa_target)); each later bank
/// links to m distinct existing banks drawn proportionally to their degree.
inline Adjacency generate_ba_network(std::size_t n_banks, double kappa_target, std::uint64_t seed) {
    if (n_banks < 2) throw InvalidDegree("need at least two banks");
    if (!(kappa_target >= 1.0 && kappa_target <= static_cast<double>(n_banks - 1)))
        throw InvalidDegree("kappa_target " + std::to_string(kappa_target) + " outside [1, N-1]");

    const auto m = static_cast<std::size_t>(std::lround(kappa_target));
    Rng rng(seed);
    Adjacency t;
    t.n_banks = n_banks;
    t.edges.reserve(m * n_banks);

    // One entry per edge endpoint: uniform picks from it are degree-proportional.
    std::vector<BankIndex> endpoints;
    endpoints.reserve(2 * m * n_banks);

    auto add_edge = [&](BankIndex u, BankIndex v) {
        if (rng.coin())
            t.edges.push_back({u, v});
        else
            t.edges.push_back({v, u});
        endpoints.push_back(u);
        endpoints.push_back(v);
    };

    const std::size_t seed_size = m + 1;
    for (BankIndex u = 0; u < seed_size; ++u)
        for (BankIndex v = u + 1; v < seed_size; ++v) add_edge(u, v);

    std::vector<BankIndex> targets;
    targets.reserve(m);
    for (BankIndex v = seed_size; v < n_banks; ++v) {
        targets.clear();
        while (targets.size() < m) {
            BankIndex u = endpoints[rng.index(endpoints.size())];
            if (std::find(targets.begin(), targets.end(), u) == targets.end()) targets.push_back(u);
        }
        for (BankIndex u : targets) add_edge(u, v);
    }

    std::sort(t.edges.begin(), t.edges.end());
    return t;
}

/// Every ordered pair of distinct banks lends to each other.
inline Adjacency complete_network(std::size_t n_banks) {
    Adjacency t;
    t.n_banks = n_banks;
    for (BankIndex i = 0; i < n_banks; ++i)
        for (BankIndex j = 0; j < n_banks; ++j)
            if (i != j) t.edges.push_back({i, j});
    return t;
}

namespace detail {

// log(k_out(creditor) * k_in(debtor)) per edge.
inline std::vector<double> log_degree_products(const Adjacency& t) {
    const auto kout = t.out_degree();
    const auto kin = t.in_degree();
    std::vector<double> x(t.edges.size());
    for (std::size_t i = 0; i < t.edges.size(); ++i) {
        const auto& e = t.edges[i];
        x[i] = std::log(static_cast<double>(kout[e.creditor]) * static_cast<double>(kin[e.debtor]));
    }
    return x;
}

inline LoanMatrix weigh(const Adjacency& t, const std::vector<double>& log_products, double r,
                        double total) {
    LoanMatrix w;
    w.n_banks = t.n_banks;
    w.edges = t.edges;
    w.weight.resize(t.edges.size());
    if (t.edges.empty()) return w;

    // Shift by the max exponent so large r cannot overflow.
    const double shift = r * *std::max_element(log_products.begin(), log_products.end());
    double norm = 0.0;
    for (std::size_t i = 0; i < w.weight.size(); ++i) {
        w.weight[i] = std::exp(r * log_products[i] - shift);
        norm += w.weight[i];
    }
    for (double& x : w.weight) x = x / norm * total;
    return w;
}

}  // namespace detail

/// w_{nn'} proportional to (k_out_n * k_in_n')^r over present edges, scaled to sum L.
inline LoanMatrix loan_matrix(const Adjacency& t, double r, double total) {
    if (t.edges.empty()) throw EmptyNetwork("loan matrix needs at least one edge");
    if (!(r >= 0.0)) throw ConfigError("heterogeneity exponent r must be >= 0");
    return detail::weigh(t, detail::log_degree_products(t), r, total);
}

/// Average out-degree E/N.
inline double average_degree(const Adjacency& t) {
    if (t.n_banks == 0) return 0.0;
    return static_cast<double>(t.edge_count()) / static_cast<double>(t.n_banks);
}

/// Share of total interbank lending held by the five largest lenders.
inline double top5_share(std::vector<double> loans) {
    double total = 0.0;
    for (double x : loans) total += x;
    if (!(total > 0.0)) throw ZeroLoans("top5_share of an all-zero loan vector");
    if (loans.size() <= 5) return 1.0;
    std::partial_sort(loans.begin(), loans.begin() + 5, loans.end(), std::greater<>());
    double top = 0.0;
    for (std::size_t i = 0; i < 5; ++i) top += loans[i];
    return top / total;
}

struct NetworkIndices {
    double kappa = 0.0;
    double rho5 = 0.0;

    bool valid(std::size_t n_banks) const {
        return kappa > 0.0 && kappa <= static_cast<double>(n_banks - 1) && rho5 >= 0.0 && rho5 <= 1.0;
    }
};

inline NetworkIndices network_indices(const LoanMatrix& w) {
    Adjacency t{w.n_banks, w.edges};
    return {average_degree(t), top5_share(interbank_totals(w).loans)};
}

/// Finds r with |rho5(r) - target| <= tolerance by bisection. The bracket
/// starts at [0, 4] and the upper end doubles up to 64.
inline double calibrate_r(const Adjacency& t, double rho5_target, double tolerance,
                          double total = 1.0) {
    if (!(tolerance > 0.0)) throw ConfigError("calibration tolerance must be > 0");
    if (t.edges.empty()) throw EmptyNetwork("cannot calibrate r on an empty network");

    const auto logs = detail::log_degree_products(t);
    auto rho5 = [&](double r) { return top5_share(interbank_totals(detail::weigh(t, logs, r, total)).loans); };

    const double at_zero = rho5(0.0);
    if (std::abs(at_zero - rho5_target) <= tolerance) return 0.0;
    if (rho5_target < at_zero)
        throw Unreachable("rho5 target " + std::to_string(rho5_target) + " below r=0 value " +
                          std::to_string(at_zero));

    constexpr double r_max = 64.0;
    double lo = 0.0;
    double hi = 4.0;
    double at_hi = rho5(hi);
    while (at_hi < rho5_target - tolerance && hi < r_max) {
        lo = hi;
        hi *= 2.0;
        at_hi = rho5(hi);
    }
    if (std::abs(at_hi - rho5_target) <= tolerance) return hi;
    if (at_hi < rho5_target)
        throw Unreachable("rho5 target " + std::to_string(rho5_target) + " not reached by r=64");

    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double value = rho5(mid);
        if (std::abs(value - rho5_target) <= tolerance) return mid;
        (value < rho5_target ? lo : hi) = mid;
    }
    throw Unreachable("rho5 bisection did not converge (target " + std::to_string(rho5_target) + ")");
}

/// Edge-list dump: one `creditor debtor weight` line per edge, 0-based indices.
inline std::string format_edge_list(const LoanMatrix& w) {
    std::string out;
    char buf[96];
    for (std::size_t i = 0; i < w.edges.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu %zu %.17g\n", w.edges[i].creditor, w.edges[i].debtor,
                      w.weight[i]);
        out += buf;
    }
    return out;
}

}  // namespace anwser
