// anwser: risk landscapes, network dumps, heatmaps and manifest replay.
//
// Exit status: 0 success, 2 configuration or input error, 3 runtime error.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "anwser/anwser.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

std::size_t default_threads() {
    if (const char* env = std::getenv("ANWSER_THREADS")) {
        char* end = nullptr;
        const auto n = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && n > 0) return static_cast<std::size_t>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

struct LandscapeOptions {
    std::string config;
    std::optional<std::uint64_t> n_samples;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> grid;
    std::optional<std::string> method;
    std::optional<std::size_t> threads;
    std::string out = "landscape.csv";
    std::string format = "csv";
    bool quiet = false;
};

void write_outputs(const anwser::LandscapeTable& table, const anwser::RunManifest& manifest,
                   const LandscapeOptions& opt) {
    if (opt.format == "json") {
        anwser::write_text_file(opt.out, anwser::to_json(table, manifest).dump(2) + "\n");
    } else {
        anwser::write_text_file(opt.out, anwser::to_csv(table));
        anwser::write_text_file(opt.out + ".manifest.json", anwser::to_json(manifest).dump(2) + "\n");
    }
}

/// Runs the grid cell by cell, flushing whatever finished if something throws.
int run_landscape(anwser::ConfigValues values, const LandscapeOptions& opt) {
    using namespace anwser;
    if (opt.n_samples) set_value(values, "run", "n_samples", std::to_string(*opt.n_samples));
    if (opt.seed) set_value(values, "run", "seed", std::to_string(*opt.seed));
    if (opt.grid) set_grid_override(values, *opt.grid);
    if (opt.method) set_value(values, "run", "method", *opt.method);

    auto rc = resolve_config(values);
    auto& ex = rc.experiment;
    ex.threads = opt.threads ? *opt.threads : (ex.threads ? ex.threads : default_threads());
    if (ex.threads == 0) throw ConfigError("--threads must be >= 1");

    RunManifest manifest;
    manifest.config = rc.values;
    manifest.method = to_string(rc.method);
    manifest.master_seed = ex.master_seed;
    manifest.threads = ex.threads;
    manifest.shock = ex.shock;

    LandscapeTable table;
    const auto cells = ex.grid.cells();
    const auto start = std::chrono::steady_clock::now();
    bool any_failed = false;
    std::string fatal;
    try {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const auto [d, e] = cells[i];
            CellStats cell = rc.method == Method::analytic ? n2::analytic_cell(rc.analytic_parameters(), d, e)
                                                           : run_cell(ex, i, d, e);
            any_failed = any_failed || cell.status == CellStatus::failed;
            manifest.rejected_per_cell.push_back(cell.n_rejected);
            if (!opt.quiet)
                std::fprintf(stderr, "[%zu/%zu] delta=%.4g epsilon=%.4g A_mean=%.6g A_q999=%.6g %s\n", i + 1,
                             cells.size(), d, e, cell.a_mean, cell.a_q999, to_string(cell.status).c_str());
            if (cell.status == CellStatus::failed) std::fprintf(stderr, "  cell failed: %s\n", cell.message.c_str());
            table.cells.push_back(std::move(cell));
        }
    } catch (const std::exception& e) {
        fatal = e.what();
    }
    manifest.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    write_outputs(table, manifest, opt);
    if (!fatal.empty()) {
        std::fprintf(stderr, "error: %s (%zu of %zu cells written)\n", fatal.c_str(), table.cells.size(),
                     cells.size());
        return kRuntimeError;
    }
    return any_failed ? kRuntimeError : kOk;
}

anwser::ConfigValues manifest_config(const std::string& path) {
    const auto text = anwser::read_text_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw anwser::ConfigError(path + ": " + e.what());
    }
    if (j.contains("manifest")) j = j["manifest"];
    return anwser::manifest_from_json(j).config;
}

int dump_network(const std::string& config, std::optional<std::uint64_t> seed, const std::string& out,
                 std::optional<std::string> banks_out) {
    using namespace anwser;
    auto values = load_config_file(config);
    if (seed) set_value(values, "run", "seed", std::to_string(*seed));
    const auto rc = resolve_config(values, false);

    std::uint64_t rejected = 0;
    const auto system = sample_system(rc.experiment, 0, 0, rejected);
    write_text_file(out, format_edge_list(system.loans));

    const auto totals = interbank_totals(system.loans);
    std::string table = "index total_assets loans borrowings\n";
    char buf[128];
    for (std::size_t n = 0; n < system.sheets.size(); ++n) {
        std::snprintf(buf, sizeof buf, "%zu %.17g %.17g %.17g\n", n, system.sheets[n].total_assets, totals.loans[n],
                      totals.borrowings[n]);
        table += buf;
    }
    write_text_file(banks_out.value_or(out + ".banks"), table);
    std::fprintf(stderr, "%zu banks, %zu loans, r=%.6g, %llu rejected draws\n", system.sheets.size(),
                 system.loans.edges.size(), system.r, static_cast<unsigned long long>(rejected));
    return kOk;
}

int plot(const std::string& table_path, const std::string& out) {
    using namespace anwser;
    const auto table = parse_table(read_text_file(table_path));
    if (table.cells.empty()) throw ConfigError(table_path + ": table has no cells");
    write_text_file(out + "_mean.svg", render_heatmap_svg(table, Statistic::mean));
    write_text_file(out + "_q999.svg", render_heatmap_svg(table, Statistic::q999));
    return kOk;
}

template <class F>
int guarded(F&& f) {
    try {
        return f();
    } catch (const anwser::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kRuntimeError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Asset network systemic risk experiments"};
    app.set_version_flag("--version", std::string(anwser::kVersion));
    app.require_subcommand(1);

    LandscapeOptions lo;
    auto* landscape = app.add_subcommand("landscape", "Compute a risk landscape over the (delta, epsilon) grid");
    landscape->add_option("config", lo.config, "Experiment file")->required();
    landscape->add_option("--n-samples", lo.n_samples, "Samples per cell");
    landscape->add_option("--seed", lo.seed, "Master seed");
    landscape->add_option("--grid", lo.grid, "delta_min:delta_max:steps,eps_min:eps_max:steps");
    landscape->add_option("--method", lo.method, "mc or analytic")->check(CLI::IsMember({"mc", "analytic"}));
    landscape->add_option("--out", lo.out, "Output table path")->capture_default_str();
    landscape->add_option("--format", lo.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    landscape->add_option("--threads", lo.threads, "Worker threads (default: ANWSER_THREADS or all cores)");
    landscape->add_flag("--quiet", lo.quiet, "No per-cell progress");

    std::string dump_config, dump_out;
    std::optional<std::uint64_t> dump_seed;
    std::optional<std::string> dump_banks;
    auto* dump = app.add_subcommand("dump-network", "Write one sampled credit network as an edge list");
    dump->add_option("config", dump_config, "Experiment file")->required();
    dump->add_option("--seed", dump_seed, "Master seed");
    dump->add_option("--out", dump_out, "Edge list path")->required();
    dump->add_option("--banks", dump_banks, "Bank table path (default: OUT.banks)");

    std::string plot_table, plot_out;
    auto* plot_cmd = app.add_subcommand("plot", "Render heatmaps OUT_mean.svg and OUT_q999.svg from a table");
    plot_cmd->add_option("table", plot_table, "CSV or JSON table")->required();
    plot_cmd->add_option("--out", plot_out, "Output prefix")->required();

    LandscapeOptions ro;
    std::string replay_manifest;
    auto* replay = app.add_subcommand("replay", "Recompute a table from its manifest");
    replay->add_option("manifest", replay_manifest, "Manifest or JSON table")->required();
    replay->add_option("--out", ro.out, "Output table path")->required();
    replay->add_option("--format", ro.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    replay->add_option("--threads", ro.threads, "Worker threads");
    replay->add_flag("--quiet", ro.quiet, "No per-cell progress");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    if (*landscape) return guarded([&] { return run_landscape(anwser::load_config_file(lo.config), lo); });
    if (*dump) return guarded([&] { return dump_network(dump_config, dump_seed, dump_out, dump_banks); });
    if (*plot_cmd) return guarded([&] { return plot(plot_table, plot_out); });
    if (*replay) return guarded([&] { return run_landscape(manifest_config(replay_manifest), ro); });
    return kConfigError;
}
