#pragma once

#include <vector>

#include "balance_sheet.hpp"
#include "credit_network.hpp"

namespace anwser {

/// A credit network together with the balance sheets it implies.
struct BankingSystem {
    LoanMatrix loans;
    std::vector<BalanceSheet> sheets;
    double r = 0.0;

    std::size_t size() const { return sheets.size(); }
};

/// loan_matrix -> interbank_totals -> external_assets -> equity and deposits.
/// Propagates InfeasibleTheta and NegativeDeposits.
inline BankingSystem build_system(const Adjacency& t, double r, const SystemParameters& params) {
    params.validate();
    BankingSystem sys;
    sys.r = r;
    sys.loans = loan_matrix(t, r, params.total_interbank);
    sys.sheets = build_sheets(sys.loans, params);
    return sys;
}

}  // namespace anwser
