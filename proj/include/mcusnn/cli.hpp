#pragma once

// Command-line front end. Each command returns a process exit status:
//   0 success, 1 bad input (config, arguments, metric preconditions),
//   2 memory budget violation, 3 I/O failure.

#include <filesystem>
#include <future>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mcusnn/bench.hpp"
#include "mcusnn/config.hpp"
#include "mcusnn/engine.hpp"
#include "mcusnn/memledger.hpp"
#include "mcusnn/report.hpp"

namespace mcusnn::cli {

enum Exit : int { kOk = 0, kInputError = 1, kBudgetError = 2, kIoError = 3 };

struct CommandOptions {
    std::string config_path;
    std::int64_t duration_ms = 1000;
    std::optional<Precision> precision;
    std::optional<std::uint64_t> seed;
    std::uint64_t budget_bytes = Budget{}.total;
    std::filesystem::path out_dir = ".";
    bool strict_table = false;
    std::optional<double> snn_power_w;
    std::optional<double> system_power_w;
    std::optional<double> wall_time_s;
};

namespace detail {

inline NetworkSpec load(const CommandOptions& o) {
    NetworkSpec spec = load_network(o.config_path);
    if (o.precision) spec.precision = *o.precision;
    if (o.seed) spec.seed = *o.seed;
    if (o.strict_table) spec = strip_symmetry_edges(std::move(spec));
    return spec;
}

inline void report_violation(std::ostream& err, const BudgetViolation& v) {
    err << "error: memory budget exceeded at phase " << phase_label(v.phase) << ": "
        << format_mb(static_cast<double>(v.shortfall)) << " (" << v.shortfall << " bytes) short\n";
}

inline void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create output directory '" + dir.string() + "'");
    }
}

/// Shared error mapping for all commands.
template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const BudgetExceeded& e) {
        report_violation(err, e.violation());
        return kBudgetError;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
}

inline std::optional<PowerInputs> power_inputs(const CommandOptions& o) {
    if (!o.snn_power_w && !o.system_power_w) return std::nullopt;
    // Without a measured wall time, assume the run kept pace with model time.
    return PowerInputs{o.snn_power_w, o.system_power_w,
                       o.wall_time_s.value_or(static_cast<double>(o.duration_ms) / 1000.0)};
}

}  // namespace detail

/// Runs one simulation and writes raster.csv, metrics.json and ramp_up.txt.
inline int cmd_run(const CommandOptions& o, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const NetworkSpec spec = detail::load(o);
        const RunReport report = run(spec, o.duration_ms, {Budget{o.budget_bytes}, {}});
        detail::ensure_dir(o.out_dir);
        write_file_atomic(o.out_dir / "raster.csv", raster_csv(report));
        write_file_atomic(o.out_dir / "metrics.json", dump(metrics_json(report, detail::power_inputs(o))));
        write_file_atomic(o.out_dir / "ramp_up.txt", render_ramp_up(report.memory));
        out << report.network << ": " << report.neurons << " neurons, " << report.synapses << " synapses, "
            << report.total_spikes() << " spikes in " << report.duration_ms << " ms (" << to_string(report.precision)
            << ")\n";
        return static_cast<int>(kOk);
    });
}

/// Runs the network at half and single precision with the same seed and
/// reports spike-count accuracy of half against single.
inline int cmd_compare(const CommandOptions& o, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        NetworkSpec half = detail::load(o);
        half.precision = Precision::Half;
        NetworkSpec single = half;
        single.precision = Precision::Single;
        const RunOptions ro{Budget{o.budget_bytes}, {}};

        auto single_job = std::async(std::launch::async, [&] { return run(single, o.duration_ms, ro); });
        const RunReport half_report = run(half, o.duration_ms, ro);
        const RunReport single_report = single_job.get();

        const double acc = accuracy(half_report.total_spikes(), single_report.total_spikes());
        detail::ensure_dir(o.out_dir);
        const Json half_metrics = metrics_json(half_report, detail::power_inputs(o));
        const Json single_metrics = metrics_json(single_report, detail::power_inputs(o));
        write_file_atomic(o.out_dir / "metrics_half.json", dump(half_metrics));
        write_file_atomic(o.out_dir / "metrics_single.json", dump(single_metrics));

        Json cmp;
        cmp["schema"] = "mcusnn.compare/1";
        cmp["network"] = half_report.network;
        cmp["seed"] = half_report.seed;
        cmp["model_time_ms"] = half_report.duration_ms;
        cmp["spikes_half"] = half_report.total_spikes();
        cmp["spikes_single"] = single_report.total_spikes();
        cmp["accuracy"] = acc;
        cmp["half"] = half_metrics;
        cmp["single"] = single_metrics;
        write_file_atomic(o.out_dir / "compare.json", dump(cmp));

        out << half_report.network << ": half " << half_report.total_spikes() << " spikes, single "
            << single_report.total_spikes() << " spikes, accuracy " << acc << "\n";
        return static_cast<int>(kOk);
    });
}

/// Prints the ramp-up table without simulating.
inline int cmd_plan(const CommandOptions& o, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const NetworkSpec spec = detail::load(o);
        const Budget budget{o.budget_bytes};
        const MemoryPlan plan = plan_memory(elaborate(spec), spec, budget);
        out << render_ramp_up(plan);
        const auto check = check_budget(plan, budget);
        if (!check.approved) {
            detail::report_violation(err, *check.violation);
            return static_cast<int>(kBudgetError);
        }
        out << "headroom: " << format_mb(static_cast<double>(check.headroom)) << " (" << check.headroom
            << " bytes)\n";
        return static_cast<int>(kOk);
    });
}

/// argv-level entry point used by the mcusnn executable.
inline int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Memory-budgeted spiking network simulator"};
    app.require_subcommand(1);

    CommandOptions o;
    std::string precision;
    const std::map<std::string, Precision> precisions{{"half", Precision::Half}, {"single", Precision::Single}};

    auto common = [&](CLI::App* sub, bool with_precision) {
        sub->add_option("config", o.config_path, "Network config file")->required();
        sub->add_option("--budget", o.budget_bytes, "Memory budget in bytes");
        sub->add_flag("--strict-table", o.strict_table, "Drop projections tagged 'symmetry'");
        if (with_precision) {
            sub->add_option("--precision", precision, "Synaptic storage precision")
                ->check(CLI::IsMember({"half", "single"}));
        }
    };
    auto simulation = [&](CLI::App* sub) {
        sub->add_option("--duration", o.duration_ms, "Model time in ms");
        sub->add_option("--seed", o.seed, "Override the config seed");
        sub->add_option("--out", o.out_dir, "Output directory");
        sub->add_option("--snn-power", o.snn_power_w, "Power drawn by the simulation (W)");
        sub->add_option("--system-power", o.system_power_w, "Power drawn by the whole system (W)");
        sub->add_option("--wall-time", o.wall_time_s, "Measured wall-clock time of the run (s)");
    };

    auto* run_cmd = app.add_subcommand("run", "Simulate and write raster.csv, metrics.json, ramp_up.txt");
    common(run_cmd, true);
    simulation(run_cmd);
    auto* compare_cmd = app.add_subcommand("compare", "Simulate at half and single precision and compare");
    common(compare_cmd, false);
    simulation(compare_cmd);
    auto* plan_cmd = app.add_subcommand("plan", "Print the memory ramp-up table");
    common(plan_cmd, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? static_cast<int>(kOk) : static_cast<int>(kInputError);
    }
    if (!precision.empty()) o.precision = precisions.at(precision);

    if (run_cmd->parsed()) return cmd_run(o, out, err);
    if (compare_cmd->parsed()) return cmd_compare(o, out, err);
    return cmd_plan(o, out, err);
}

}  // namespace mcusnn::cli
