#pragma once

// Bank balance sheets built from an interbank loan matrix and the system
// ratios theta (interbank loans / total assets) and gamma (equity / assets).

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "network_types.hpp"

namespace anwser {

struct BalanceSheet {
    double external_assets = 0.0;
    double interbank_loans = 0.0;
    double equity_capital = 0.0;
    double interbank_borrowings = 0.0;
    double deposits = 0.0;
    double total_assets = 0.0;
};

struct SystemParameters {
    double theta = 0.1;
    double gamma = 0.07;
    double total_interbank = 1.0;  // L

    /// Unit-average-asset normalization: L = theta * N so that sum(a_n) = N.
    static SystemParameters normalized(double theta, double gamma, std::size_t n_banks) {
        return {theta, gamma, theta * static_cast<double>(n_banks)};
    }

    void validate() const {
        if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("theta must lie in (0,1)");
        if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0,1)");
        if (!(theta + gamma < 1.0)) throw ConfigError("theta + gamma must be < 1");
        if (!(total_interbank > 0.0)) throw ConfigError("total interbank lending must be > 0");
    }
};

struct InterbankTotals {
    std::vector<double> loans;       // l_n, row sums of w
    std::vector<double> borrowings;  // b_n, column sums of w
};

inline InterbankTotals interbank_totals(const LoanMatrix& w) {
    InterbankTotals t{std::vector<double>(w.n_banks, 0.0), std::vector<double>(w.n_banks, 0.0)};
    for (std::size_t i = 0; i < w.edges.size(); ++i) {
        const auto& e = w.edges[i];
        if (e.creditor == e.debtor) continue;
        t.loans[e.creditor] += w.weight[i];
        t.borrowings[e.debtor] += w.weight[i];
    }
    return t;
}

/// External assets: net interbank borrowing is covered first, the rest of
/// (1-theta)/theta * L is spread in proportion to interbank lending.
inline std::vector<double> external_assets(const std::vector<double>& loans,
                                           const std::vector<double>& borrowings,
                                           const SystemParameters& params) {
    const double L = params.total_interbank;
    double net_borrowing = 0.0;
    for (std::size_t n = 0; n < loans.size(); ++n)
        net_borrowing += std::max(borrowings[n] - loans[n], 0.0);

    const double residual = (1.0 - params.theta) / params.theta * L - net_borrowing;
    if (residual < 0.0)
        throw InfeasibleTheta("external assets cannot cover net interbank borrowing (residual " +
                              std::to_string(residual) + ")");

    std::vector<double> e(loans.size());
    for (std::size_t n = 0; n < loans.size(); ++n)
        e[n] = std::max(borrowings[n] - loans[n], 0.0) + residual * loans[n] / L;
    return e;
}

/// Assembles the five balance-sheet quantities from a loan matrix.
inline std::vector<BalanceSheet> build_sheets(const LoanMatrix& w, const SystemParameters& params) {
    const auto totals = interbank_totals(w);
    const auto e = external_assets(totals.loans, totals.borrowings, params);

    std::vector<BalanceSheet> sheets(w.n_banks);
    for (std::size_t n = 0; n < w.n_banks; ++n) {
        auto& s = sheets[n];
        s.external_assets = e[n];
        s.interbank_loans = totals.loans[n];
        s.interbank_borrowings = totals.borrowings[n];
        s.total_assets = s.external_assets + s.interbank_loans;
        s.equity_capital = params.gamma * s.total_assets;
        s.deposits = s.total_assets - (s.equity_capital + s.interbank_borrowings);
        if (s.deposits < -1e-12)
            throw NegativeDeposits("bank " + std::to_string(n) + " has negative deposits " +
                                   std::to_string(s.deposits));
        s.deposits = std::max(s.deposits, 0.0);
    }
    return sheets;
}

}  // namespace anwser
