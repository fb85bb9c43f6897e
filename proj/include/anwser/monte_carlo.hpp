#pragma once

// Monte Carlo risk landscapes. Every sample draws its portfolio, shock and
// (when needed) network from streams keyed by (master_seed, cell, sample,
// purpose), and results are aggregated as integer histograms, so tables are
// bit-identical for any thread count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "cascade.hpp"
#include "credit_network.hpp"
#include "errors.hpp"
#include "landscape.hpp"
#include "portfolio.hpp"
#include "random.hpp"
#include "shocks.hpp"
#include "system.hpp"

namespace anwser {

enum class NetworkKind { barabasi_albert, complete };

inline std::string to_string(NetworkKind k) { return k == NetworkKind::complete ? "complete" : "ba"; }

struct NetworkSpec {
    NetworkKind kind = NetworkKind::barabasi_albert;
    double kappa = 25.0;
    std::optional<double> rho5;   // calibrate r to this share; otherwise use r
    double r = 0.0;
    double rho5_tolerance = 0.01;
    std::size_t samples_per_network = 1;
};

struct ExperimentConfig {
    std::size_t n_banks = 500;
    std::size_t n_assets = 2;
    double theta = 0.1;
    double gamma = 0.07;
    NetworkSpec network;
    ShockDistribution shock = ShockDistribution::student_t(1.5, 1.0);
    LossRule loss_rule = LossRule::full_loan;
    std::uint64_t n_samples = 100000;
    std::uint64_t master_seed = 1;
    std::size_t threads = 1;
    double quantile = 0.999;
    std::uint64_t min_events = 100;
    std::size_t max_network_attempts = 1000;
    GridSpec grid;

    SystemParameters system() const { return SystemParameters::normalized(theta, gamma, n_banks); }

    void validate() const {
        system().validate();
        shock.validate();
        if (n_banks < 2) throw ConfigError("n_banks must be >= 2");
        if (n_assets != 2) throw ConfigError("portfolio synthesis supports n_assets = 2 only");
        if (n_banks % 2 != 0) throw ConfigError("n_banks must be even for two-group portfolios");
        if (n_samples < 1000) throw ConfigError("n_samples must be >= 1000 for the 0.999 quantile");
        if (network.samples_per_network == 0) throw ConfigError("samples_per_network must be >= 1");
        if (network.kind == NetworkKind::barabasi_albert &&
            !(network.kappa >= 1.0 && network.kappa <= static_cast<double>(n_banks - 1)))
            throw ConfigError("kappa must lie in [1, N-1]");
        if (network.rho5 && !(*network.rho5 > 0.0 && *network.rho5 <= 1.0))
            throw ConfigError("rho5 must lie in (0, 1]");
    }
};

/// Builds one feasible banking system for a network block, resampling the
/// network on feasibility failures. `rejected` counts discarded draws.
inline BankingSystem sample_system(const ExperimentConfig& config, std::uint64_t cell, std::uint64_t block,
                                   std::uint64_t& rejected) {
    const auto params = config.system();
    if (config.network.kind == NetworkKind::complete)
        return build_system(complete_network(config.n_banks), config.network.r, params);

    for (std::size_t attempt = 0; attempt < config.max_network_attempts; ++attempt) {
        const auto seed = derive_seed({config.master_seed, cell, block, static_cast<std::uint64_t>(Stream::network), attempt});
        const auto t = generate_ba_network(config.n_banks, config.network.kappa, seed);
        try {
            double r = config.network.r;
            if (config.network.rho5 && config.n_banks > 5)
                r = calibrate_r(t, *config.network.rho5, config.network.rho5_tolerance, params.total_interbank);
            return build_system(t, r, params);
        } catch (const InfeasibleTheta&) {
        } catch (const NegativeDeposits&) {
        } catch (const Unreachable&) {
        }
        ++rejected;
    }
    throw Error("no feasible network after " + std::to_string(config.max_network_attempts) + " attempts");
}

namespace detail {

struct ChunkResult {
    FailureCounts counts;
    std::uint64_t rejected = 0;
};

inline ChunkResult run_chunk(const ExperimentConfig& config, std::uint64_t cell, double delta, double epsilon,
                             std::uint64_t begin, std::uint64_t end, const BankingSystem* fixed_system) {
    ChunkResult out;
    std::optional<std::uint64_t> cached_block;
    BankingSystem cached;
    ExposureIndex exposures;
    if (fixed_system) exposures = ExposureIndex(fixed_system->loans);

    const std::size_t n = config.n_banks;
    std::vector<double> shock(config.n_assets);
    for (std::uint64_t i = begin; i < end; ++i) {
        Rng portfolio_rng(derive_seed({config.master_seed, cell, i, static_cast<std::uint64_t>(Stream::portfolio)}));
        const auto plan = plan_two_group(n, delta, epsilon, portfolio_rng.coin());
        Rng shock_rng(derive_seed({config.master_seed, cell, i, static_cast<std::uint64_t>(Stream::shock)}));
        for (double& v : shock) v = config.shock.draw(shock_rng);

        // e X.v > gamma (e + l) needs X.v > gamma, so no bank can fail here.
        double worst = -std::numeric_limits<double>::infinity();
        for (double x1 : plan.rows()) worst = std::max(worst, x1 * shock[0] + (1.0 - x1) * shock[1]);
        if (!(worst > config.gamma)) {
            out.counts.add(0, 0);
            continue;
        }

        const BankingSystem* sys = fixed_system;
        if (!sys) {
            const std::uint64_t block = i / config.network.samples_per_network;
            if (cached_block != block) {
                cached = sample_system(config, cell, block, out.rejected);
                exposures = ExposureIndex(cached.loans);
                cached_block = block;
            }
            sys = &cached;
        }
        const auto portfolio = realize(plan, portfolio_rng);
        const auto result = cascade(sys->sheets, exposures, portfolio, shock, config.loss_rule);
        out.counts.add(result.initial_count(), result.final_count());
    }
    return out;
}

}  // namespace detail

struct CellRun {
    CellStats stats;
    FailureCounts counts;
};

/// Monte Carlo statistics of one (delta, epsilon) cell.
inline CellRun run_cell_detailed(const ExperimentConfig& config, std::uint64_t cell_index, double delta,
                                 double epsilon) {
    CellRun run;
    auto& cell = run.stats;
    cell.delta = delta;
    cell.epsilon = epsilon;
    try {
        plan_two_group(config.n_banks, delta, epsilon, true);
    } catch (const InfeasibleTargets& e) {
        cell.status = CellStatus::infeasible;
        cell.message = e.what();
        return run;
    }

    std::optional<BankingSystem> fixed;
    if (config.network.kind == NetworkKind::complete) {
        std::uint64_t unused = 0;
        fixed = sample_system(config, cell_index, 0, unused);
    }

    constexpr std::uint64_t chunk = 4096;
    const std::uint64_t n_chunks = (config.n_samples + chunk - 1) / chunk;
    std::vector<detail::ChunkResult> results(n_chunks);
    std::atomic<std::uint64_t> next{0};
    std::mutex error_mutex;
    std::string error;

    auto worker = [&] {
        for (;;) {
            const auto c = next.fetch_add(1);
            if (c >= n_chunks) return;
            try {
                results[c] = detail::run_chunk(config, cell_index, delta, epsilon, c * chunk,
                                               std::min(config.n_samples, (c + 1) * chunk),
                                               fixed ? &*fixed : nullptr);
            } catch (const std::exception& e) {
                std::lock_guard lock(error_mutex);
                if (error.empty()) error = e.what();
                next.store(n_chunks);
            }
        }
    };

    const std::size_t threads = std::max<std::size_t>(1, std::min<std::size_t>(config.threads, n_chunks));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    if (!error.empty()) {
        cell.status = CellStatus::failed;
        cell.message = error;
        return run;
    }

    for (const auto& r : results) {
        run.counts.merge(r.counts);
        cell.n_rejected += r.rejected;
    }
    summarize(cell, run.counts, config.quantile);
    if (cell.n_conditioned < config.min_events) {
        cell.status = CellStatus::not_enough_events;
        cell.message = "only " + std::to_string(cell.n_conditioned) + " samples with initial failures";
    }
    return run;
}

inline CellStats run_cell(const ExperimentConfig& config, std::uint64_t cell_index, double delta, double epsilon) {
    return run_cell_detailed(config, cell_index, delta, epsilon).stats;
}

/// Runs every grid cell; a failing cell is marked, never aborts the table.
/// `progress` (optional) is called after each cell.
template <class Progress = void (*)(std::size_t, std::size_t, const CellStats&)>
LandscapeTable risk_landscape(const ExperimentConfig& config, Progress progress = nullptr) {
    config.validate();
    LandscapeTable table;
    const auto cells = config.grid.cells();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        table.cells.push_back(run_cell(config, i, cells[i].first, cells[i].second));
        if constexpr (std::is_pointer_v<Progress>) {
            if (progress) progress(i, cells.size(), table.cells.back());
        } else {
            progress(i, cells.size(), table.cells.back());
        }
    }
    return table;
}

}  // namespace anwser
