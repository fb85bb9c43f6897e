#pragma once

// Price-shock triggered bankruptcy cascades over the interbank network.

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "balance_sheet.hpp"
#include "errors.hpp"
#include "network_types.hpp"
#include "portfolio.hpp"

namespace anwser {

/// What a creditor loses when one of its debtors fails.
enum class LossRule {
    full_loan,         // the whole loan w_nk
    capped_shortfall,  // w_nk * min(1, shortfall_k / b_k): the debtor's loss beyond its capital, pro rata
};

inline std::string to_string(LossRule r) {
    return r == LossRule::full_loan ? "full_loan" : "capped_shortfall";
}

/// Staged failure sets stored compactly: failed_at[n] is the first stage in
/// which bank n is bankrupt, or -1. F_j = { n : 0 <= failed_at[n] <= j }.
struct CascadeResult {
    std::vector<int> failed_at;
    std::vector<std::size_t> stage_sizes;  // |F_0|, |F_1|, ..., |F_inf|

    std::size_t stage_count() const { return stage_sizes.size(); }
    std::size_t initial_count() const { return stage_sizes.empty() ? 0 : stage_sizes.front(); }
    std::size_t final_count() const { return stage_sizes.empty() ? 0 : stage_sizes.back(); }

    std::vector<BankIndex> stage(std::size_t j) const {
        std::vector<BankIndex> s;
        for (std::size_t n = 0; n < failed_at.size(); ++n)
            if (failed_at[n] >= 0 && static_cast<std::size_t>(failed_at[n]) <= j) s.push_back(n);
        return s;
    }
    std::vector<BankIndex> final_set() const {
        return stage_sizes.empty() ? std::vector<BankIndex>{} : stage(stage_sizes.size() - 1);
    }
};

/// |F_inf| / |F_0|, undefined when nothing failed initially.
inline std::optional<double> reproduction_ratio(const CascadeResult& r) {
    if (r.initial_count() == 0) return std::nullopt;
    return static_cast<double>(r.final_count()) / static_cast<double>(r.initial_count());
}

/// Creditor lists per debtor, built once per loan matrix and reused across shocks.
class ExposureIndex {
public:
    struct Exposure {
        BankIndex creditor;
        double amount;
    };

    ExposureIndex() = default;
    explicit ExposureIndex(const LoanMatrix& w) : offsets_(w.n_banks + 1, 0) {
        for (const auto& e : w.edges) ++offsets_[e.debtor + 1];
        for (std::size_t k = 0; k < w.n_banks; ++k) offsets_[k + 1] += offsets_[k];
        entries_.resize(w.edges.size());
        auto fill = offsets_;
        for (std::size_t i = 0; i < w.edges.size(); ++i)
            entries_[fill[w.edges[i].debtor]++] = {w.edges[i].creditor, w.weight[i]};
    }

    std::span<const Exposure> creditors_of(BankIndex debtor) const {
        return {entries_.data() + offsets_[debtor], offsets_[debtor + 1] - offsets_[debtor]};
    }

    std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }

private:
    std::vector<std::size_t> offsets_;
    std::vector<Exposure> entries_;
};

/// e_n * sum_m X_nm v_m for every bank.
inline std::vector<double> portfolio_losses(std::span<const BalanceSheet> sheets, const Portfolio& x,
                                            std::span<const double> shock) {
    if (x.n_banks() != sheets.size() || x.n_assets() != shock.size())
        throw ConfigError("portfolio, balance sheet and shock dimensions disagree");
    std::vector<double> loss(sheets.size());
    for (std::size_t n = 0; n < sheets.size(); ++n) {
        double s = 0.0;
        const auto row = x.row(n);
        for (std::size_t m = 0; m < row.size(); ++m) s += row[m] * shock[m];
        loss[n] = sheets[n].external_assets * s;
    }
    return loss;
}

/// Banks whose shock loss strictly exceeds their equity capital.
inline std::vector<BankIndex> initial_failures(std::span<const BalanceSheet> sheets, const Portfolio& x,
                                               std::span<const double> shock) {
    const auto loss = portfolio_losses(sheets, x, shock);
    std::vector<BankIndex> failed;
    for (std::size_t n = 0; n < sheets.size(); ++n)
        if (sheets[n].equity_capital < loss[n]) failed.push_back(n);
    return failed;
}

namespace detail {

inline CascadeResult cascade_full_loan(std::span<const BalanceSheet> sheets, const ExposureIndex& exposures,
                                       std::vector<double> loss) {
    CascadeResult out;
    out.failed_at.assign(sheets.size(), -1);

    std::vector<BankIndex> frontier;
    for (std::size_t n = 0; n < sheets.size(); ++n)
        if (sheets[n].equity_capital < loss[n]) {
            out.failed_at[n] = 0;
            frontier.push_back(n);
        }
    if (frontier.empty()) return out;

    std::size_t failed = frontier.size();
    out.stage_sizes.push_back(failed);

    std::vector<BankIndex> touched;
    std::vector<BankIndex> next;
    for (int stage = 1;; ++stage) {
        touched.clear();
        for (BankIndex k : frontier)
            for (const auto& ex : exposures.creditors_of(k)) {
                loss[ex.creditor] += ex.amount;
                touched.push_back(ex.creditor);
            }
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

        next.clear();
        for (BankIndex n : touched)
            if (out.failed_at[n] < 0 && sheets[n].equity_capital < loss[n]) {
                out.failed_at[n] = stage;
                next.push_back(n);
            }
        if (next.empty()) break;
        failed += next.size();
        out.stage_sizes.push_back(failed);
        frontier.swap(next);
    }
    return out;
}

inline CascadeResult cascade_capped(std::span<const BalanceSheet> sheets, const ExposureIndex& exposures,
                                    const std::vector<double>& base, std::size_t max_rounds = 100000) {
    const std::size_t n_banks = sheets.size();
    CascadeResult out;
    out.failed_at.assign(n_banks, -1);

    std::vector<double> loss = base;
    std::size_t failed = 0;
    for (std::size_t n = 0; n < n_banks; ++n)
        if (sheets[n].equity_capital < loss[n]) {
            out.failed_at[n] = 0;
            ++failed;
        }
    if (failed == 0) return out;
    out.stage_sizes.push_back(failed);

    // Shortfalls feed back into losses; rounds repeat until the losses settle,
    // and a stage is recorded whenever a round bankrupts someone new.
    std::vector<double> next(n_banks);
    int stage = 0;
    for (std::size_t round = 0; round < max_rounds; ++round) {
        next = base;
        for (BankIndex k = 0; k < n_banks; ++k) {
            if (out.failed_at[k] < 0) continue;
            const double b = sheets[k].interbank_borrowings;
            if (!(b > 0.0)) continue;
            const double share = std::clamp((loss[k] - sheets[k].equity_capital) / b, 0.0, 1.0);
            if (share == 0.0) continue;
            for (const auto& ex : exposures.creditors_of(k)) next[ex.creditor] += ex.amount * share;
        }

        std::size_t added = 0;
        for (std::size_t n = 0; n < n_banks; ++n)
            if (out.failed_at[n] < 0 && sheets[n].equity_capital < next[n]) {
                out.failed_at[n] = stage + 1;
                ++added;
            }
        bool settled = added == 0;
        for (std::size_t n = 0; settled && n < n_banks; ++n)
            settled = next[n] - loss[n] <= 1e-15 * std::max(1.0, std::abs(next[n]));
        loss.swap(next);
        if (added > 0) {
            ++stage;
            failed += added;
            out.stage_sizes.push_back(failed);
        }
        if (settled) break;
    }
    return out;
}

}  // namespace detail

/// Iterates F_j = { n : c_n < e_n X_n.v + interbank losses from F_{j-1} }
/// from F_0 until F_j = F_{j-1}.
inline CascadeResult cascade(std::span<const BalanceSheet> sheets, const ExposureIndex& exposures,
                             const Portfolio& x, std::span<const double> shock,
                             LossRule rule = LossRule::full_loan) {
    auto loss = portfolio_losses(sheets, x, shock);
    if (rule == LossRule::full_loan) return detail::cascade_full_loan(sheets, exposures, std::move(loss));
    return detail::cascade_capped(sheets, exposures, loss);
}

inline CascadeResult cascade(std::span<const BalanceSheet> sheets, const LoanMatrix& w, const Portfolio& x,
                             std::span<const double> shock, LossRule rule = LossRule::full_loan) {
    return cascade(sheets, ExposureIndex(w), x, shock, rule);
}

}  // namespace anwser
