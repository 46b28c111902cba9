#pragma once

// Output files of a run: raster.csv, metrics.json and ramp_up.txt.

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "mcusnn/bench.hpp"
#include "mcusnn/engine.hpp"
#include "mcusnn/memledger.hpp"

namespace mcusnn {

using Json = nlohmann::ordered_json;

inline constexpr const char* kMetricsSchema = "mcusnn.metrics/1";

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Writes to a sibling temporary and renames it over `path`, so readers never
/// observe a partially written file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw IoError("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "'");
    }
}

inline std::string raster_csv(const RunReport& r) {
    std::string out = "time_ms,neuron_id\n";
    out.reserve(out.size() + r.raster.size() * 12);
    for (const auto& s : r.raster) {
        out += std::to_string(s.time_ms);
        out += ',';
        out += std::to_string(s.neuron);
        out += '\n';
    }
    return out;
}

inline Json ledger_json(const MemoryPlan& plan) {
    Json rows = Json::array();
    for (const auto& e : plan.entries) {
        rows.push_back({{"phase", static_cast<int>(e.phase)},
                        {"label", phase_key(e.phase)},
                        {"size", e.size},
                        {"total_used", e.total_used},
                        {"total_available", e.total_available}});
    }
    return rows;
}

/// User-supplied power figures; the engine does not measure power.
struct PowerInputs {
    std::optional<double> snn_power_w;
    std::optional<double> system_power_w;
    double wall_time_s = 0.0;
};

inline Json metrics_json(const RunReport& r, const std::optional<PowerInputs>& power = std::nullopt) {
    const BenchResult b = summarize(r);
    Json j;
    j["schema"] = kMetricsSchema;
    j["network"] = r.network;
    j["precision"] = to_string(r.precision);
    j["seed"] = r.seed;
    j["neurons"] = b.neurons;
    j["synapses"] = b.synapses;
    j["model_time_ms"] = b.model_time_ms;
    j["spikes"] = b.spikes;
    j["rate_hz"] = b.rate_hz;

    Json groups = Json::array();
    for (const auto& g : r.groups) {
        groups.push_back(
            {{"name", g.name}, {"kind", to_string(g.kind)}, {"offset", g.offset}, {"size", g.size}, {"spikes", g.spikes}});
    }
    j["groups"] = std::move(groups);
    j["budget_bytes"] = r.memory.budget;
    j["ledger"] = ledger_json(r.memory);

    if (power && b.spikes > 0 && (power->snn_power_w || power->system_power_w)) {
        Json e;
        e["wall_time_s"] = power->wall_time_s;
        if (power->snn_power_w) {
            e["snn_power_w"] = *power->snn_power_w;
            e["snn_j_per_spike"] = energy_per_spike(*power->snn_power_w, power->wall_time_s, b.spikes);
        }
        if (power->system_power_w) {
            e["system_power_w"] = *power->system_power_w;
            e["system_j_per_spike"] = energy_per_spike(*power->system_power_w, power->wall_time_s, b.spikes);
        }
        j["energy_per_spike"] = std::move(e);
    }
    return j;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace mcusnn
