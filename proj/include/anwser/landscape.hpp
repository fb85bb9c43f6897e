#pragma once

// Risk landscape tables and the statistics that fill them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace anwser {

/// 1-based nearest rank ceil(q n), snapping q n to an integer when it is one
/// up to rounding (0.999 * 1000 must give 999, not 1000).
inline std::uint64_t nearest_rank(double q, std::uint64_t n) {
    const double x = q * static_cast<double>(n);
    const double r = std::round(x);
    const double k = std::abs(x - r) <= 1e-9 * std::max(1.0, x) ? r : std::ceil(x);
    return std::clamp<std::uint64_t>(static_cast<std::uint64_t>(k), 1, std::max<std::uint64_t>(n, 1));
}

/// Element at 0-based index ceil(q n) - 1 of the ascending sort.
inline double nearest_rank_quantile(std::vector<double> samples, double q) {
    if (samples.empty()) throw EmptyInput("quantile of an empty sample");
    if (!(q > 0.0 && q < 1.0)) throw ConfigError("quantile level must lie in (0,1)");
    const auto n = samples.size();
    const auto rank = static_cast<std::size_t>(nearest_rank(q, n));
    std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(rank - 1), samples.end());
    return samples[rank - 1];
}

/// Joint histogram of (|F_0|, |F_inf|) over Monte Carlo samples. Merging is
/// integer addition, so aggregation is independent of worker scheduling.
class FailureCounts {
public:
    using Key = std::pair<std::uint32_t, std::uint32_t>;

    void add(std::size_t initial, std::size_t final_count, std::uint64_t weight = 1) {
        counts_[{static_cast<std::uint32_t>(initial), static_cast<std::uint32_t>(final_count)}] += weight;
        total_ += weight;
    }

    void merge(const FailureCounts& other) {
        for (const auto& [k, c] : other.counts_) counts_[k] += c;
        total_ += other.total_;
    }

    std::uint64_t total() const { return total_; }
    const std::map<Key, std::uint64_t>& joint() const { return counts_; }

    std::uint64_t count(std::size_t initial, std::size_t final_count) const {
        auto it = counts_.find({static_cast<std::uint32_t>(initial), static_cast<std::uint32_t>(final_count)});
        return it == counts_.end() ? 0 : it->second;
    }

    std::uint64_t conditioned() const {
        std::uint64_t c = 0;
        for (const auto& [k, n] : counts_)
            if (k.first > 0) c += n;
        return c;
    }

    double mean_initial() const { return moment(true); }
    double mean_final() const { return moment(false); }

    /// Nearest-rank quantile of |F_0| (initial) or |F_inf| over all samples.
    std::uint32_t quantile(double q, bool initial) const {
        if (total_ == 0) throw EmptyInput("quantile of an empty histogram");
        std::map<std::uint32_t, std::uint64_t> marginal;
        for (const auto& [k, n] : counts_) marginal[initial ? k.first : k.second] += n;
        const auto rank = nearest_rank(q, total_);
        std::uint64_t cum = 0;
        for (const auto& [v, n] : marginal) {
            cum += n;
            if (cum >= rank) return v;
        }
        return marginal.rbegin()->first;
    }

    /// Per-sample |F_inf|/|F_0| over samples with |F_0| >= 1.
    std::vector<std::pair<double, std::uint64_t>> conditioned_ratios() const {
        std::vector<std::pair<double, std::uint64_t>> r;
        for (const auto& [k, n] : counts_)
            if (k.first > 0) r.emplace_back(static_cast<double>(k.second) / k.first, n);
        std::sort(r.begin(), r.end());
        return r;
    }

private:
    double moment(bool initial) const {
        if (total_ == 0) return 0.0;
        long double s = 0.0L;
        for (const auto& [k, n] : counts_) s += static_cast<long double>(initial ? k.first : k.second) * n;
        return static_cast<double>(s / total_);
    }

    std::map<Key, std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

enum class CellStatus { ok, not_enough_events, infeasible, failed };

inline std::string to_string(CellStatus s) {
    switch (s) {
        case CellStatus::ok: return "ok";
        case CellStatus::not_enough_events: return "not_enough_events";
        case CellStatus::infeasible: return "infeasible";
        case CellStatus::failed: return "failed";
    }
    return "failed";
}

inline CellStatus cell_status_from_string(const std::string& s) {
    if (s == "ok") return CellStatus::ok;
    if (s == "not_enough_events") return CellStatus::not_enough_events;
    if (s == "infeasible") return CellStatus::infeasible;
    if (s == "failed") return CellStatus::failed;
    throw ConfigError("unknown cell status '" + s + "'");
}

/// One (delta, epsilon) cell. a_mean and a_q999 are ratios of the mean and of
/// the 0.999 nearest-rank quantile of the failure counts |F_inf| and |F_0|.
struct CellStats {
    double delta = 0.0;
    double epsilon = 0.0;
    double a_mean = std::numeric_limits<double>::quiet_NaN();
    double a_q999 = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t n_conditioned = 0;
    std::uint64_t n_total = 0;
    std::uint64_t n_rejected = 0;
    CellStatus status = CellStatus::ok;

    // Extras, emitted in JSON only.
    double a_mean_conditioned = std::numeric_limits<double>::quiet_NaN();
    double a_q999_conditioned = std::numeric_limits<double>::quiet_NaN();
    double p0 = std::numeric_limits<double>::quiet_NaN();  // P(|F_0| = 0)
    double p1 = std::numeric_limits<double>::quiet_NaN();  // P(|F_0| = 1)
    double p2 = std::numeric_limits<double>::quiet_NaN();  // P(|F_0| = 2), N = 2 only
    double pc = std::numeric_limits<double>::quiet_NaN();  // P(|F_0| = 1, |F_1| = 2), N = 2 only
    std::string message;
};

struct LandscapeTable {
    std::vector<CellStats> cells;

    const CellStats* find(double delta, double epsilon, double tol = 1e-9) const {
        for (const auto& c : cells)
            if (std::abs(c.delta - delta) <= tol && std::abs(c.epsilon - epsilon) <= tol) return &c;
        return nullptr;
    }
};

/// Ratio of worst-case counts; a zero count at the quantile means nobody failed
/// there and is reported as 1.
inline double quantile_ratio(std::uint32_t final_q, std::uint32_t initial_q) {
    if (initial_q == 0) return 1.0;
    return static_cast<double>(final_q) / static_cast<double>(initial_q);
}

/// Fills the statistic columns from a failure-count histogram.
inline void summarize(CellStats& cell, const FailureCounts& counts, double q = 0.999) {
    cell.n_total = counts.total();
    cell.n_conditioned = counts.conditioned();
    if (counts.total() == 0) return;

    const double m0 = counts.mean_initial();
    cell.a_mean = m0 > 0.0 ? counts.mean_final() / m0 : std::numeric_limits<double>::quiet_NaN();
    cell.a_q999 = quantile_ratio(counts.quantile(q, false), counts.quantile(q, true));

    const auto ratios = counts.conditioned_ratios();
    if (!ratios.empty()) {
        long double s = 0.0L;
        std::uint64_t n = 0;
        for (const auto& [a, c] : ratios) {
            s += static_cast<long double>(a) * c;
            n += c;
        }
        cell.a_mean_conditioned = static_cast<double>(s / n);
        const auto rank = nearest_rank(q, n);
        std::uint64_t cum = 0;
        for (const auto& [a, c] : ratios) {
            cum += c;
            if (cum >= rank) {
                cell.a_q999_conditioned = a;
                break;
            }
        }
    }

    const double total = static_cast<double>(counts.total());
    std::uint64_t c0 = 0, c1 = 0, c2 = 0;
    for (const auto& [k, n] : counts.joint()) {
        if (k.first == 0) c0 += n;
        if (k.first == 1) c1 += n;
        if (k.first == 2) c2 += n;
    }
    cell.p0 = c0 / total;
    cell.p1 = c1 / total;
    cell.p2 = c2 / total;
    cell.pc = counts.count(1, 2) / total;
}

}  // namespace anwser

namespace anwser {

/// Rectangular (delta, epsilon) grid, `steps` inclusive points per axis.
struct GridSpec {
    double delta_min = 0.0, delta_max = 1.0;
    std::size_t delta_steps = 11;
    double epsilon_min = 0.0, epsilon_max = 1.0;
    std::size_t epsilon_steps = 11;

    static double point(double lo, double hi, std::size_t steps, std::size_t i) {
        if (steps <= 1) return lo;
        return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
    }

    /// Cells ordered epsilon-major, delta-minor.
    std::vector<std::pair<double, double>> cells() const {
        std::vector<std::pair<double, double>> out;
        for (std::size_t j = 0; j < epsilon_steps; ++j)
            for (std::size_t i = 0; i < delta_steps; ++i)
                out.emplace_back(point(delta_min, delta_max, delta_steps, i),
                                 point(epsilon_min, epsilon_max, epsilon_steps, j));
        return out;
    }
};

}  // namespace anwser
