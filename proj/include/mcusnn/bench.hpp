#pragma once

// Synfire4 benchmark networks and the metrics reported for them.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcusnn/engine.hpp"
#include "mcusnn/model.hpp"

namespace mcusnn {

inline constexpr std::size_t kSynfireSegments = 4;
inline constexpr const char* kSymmetryTag = "symmetry";

struct SynfireShape {
    std::size_t stim_size;
    std::size_t exc_size;
    std::size_t inh_size;
    std::size_t exc_fan_in;  // onto excitatory targets
    std::size_t inh_fan_in;  // excitatory/stimulus onto inhibitory targets
    std::size_t local_inh_fan_in;
    double stim_rate_hz;
    std::int64_t stim_end_ms;
};

// The stimulus launches one wave; the recurrent edge then keeps it circulating.
inline constexpr SynfireShape kSynfire4Full{200, 200, 50, 60, 60, 25, 100.0, 50};
// Fan-ins scaled by 30/200 (excitatory sources) and 9/50 (inhibitory sources),
// rounded. Nine unit inputs cannot lift an RS neuron over threshold, so the
// mini network does not sustain a wave; the stronger stimulus makes segment 0
// respond at all.
inline constexpr SynfireShape kSynfire4Mini{30, 30, 9, 9, 9, 5, 400.0, 50};

inline constexpr float kExcWeight = 1.0f;
inline constexpr float kExcToInhWeight = 3.5f;
inline constexpr float kInhWeight = -2.0f;
inline constexpr int kFeedForwardDelayMs = 10;
inline constexpr int kInhibitoryDelayMs = 8;

struct SynfireOptions {
    /// Drop the segment-0 local inhibition edge, keeping the connection table
    /// exactly as tabulated.
    bool strict_table = false;
    std::uint64_t seed = 42;
    Precision precision = Precision::Half;
};

inline std::string exc_name(std::size_t i) { return "exc" + std::to_string(i); }
inline std::string inh_name(std::size_t i) { return "inh" + std::to_string(i); }

/// Four recurrently chained segments of (excitatory RS, inhibitory FS), driven
/// by one Poisson generator into segment 0.
inline NetworkSpec build_synfire(const SynfireShape& shape, const std::string& name, const SynfireOptions& opt) {
    NetworkSpec spec;
    spec.name = name;
    spec.seed = opt.seed;
    spec.precision = opt.precision;

    spec.groups.push_back({"stim", shape.stim_size, NeuronKind::PoissonGenerator, std::nullopt});
    for (std::size_t i = 0; i < kSynfireSegments; ++i) {
        spec.groups.push_back({exc_name(i), shape.exc_size, NeuronKind::Excitatory, IzhParams::regular_spiking()});
        spec.groups.push_back({inh_name(i), shape.inh_size, NeuronKind::Inhibitory, IzhParams::fast_spiking()});
    }

    auto drive = [&](const std::string& pre, std::size_t seg) {
        spec.projections.push_back({pre, exc_name(seg), shape.exc_fan_in, kExcWeight, kFeedForwardDelayMs, ""});
        spec.projections.push_back({pre, inh_name(seg), shape.inh_fan_in, kExcToInhWeight, kFeedForwardDelayMs, ""});
    };
    auto local_inhibition = [&](std::size_t seg, const std::string& tag) {
        spec.projections.push_back(
            {inh_name(seg), exc_name(seg), shape.local_inh_fan_in, kInhWeight, kInhibitoryDelayMs, tag});
    };

    drive("stim", 0);
    if (!opt.strict_table) local_inhibition(0, kSymmetryTag);
    for (std::size_t i = 0; i + 1 < kSynfireSegments; ++i) {
        drive(exc_name(i), i + 1);
        local_inhibition(i + 1, "");
    }
    drive(exc_name(kSynfireSegments - 1), 0);

    spec.stimuli.push_back({"stim", shape.stim_rate_hz, 0, shape.stim_end_ms});
    return spec;
}

inline NetworkSpec build_synfire4(const SynfireOptions& opt = {}) {
    return build_synfire(kSynfire4Full, "synfire4", opt);
}

inline NetworkSpec build_synfire4_mini(const SynfireOptions& opt = {}) {
    return build_synfire(kSynfire4Mini, "synfire4_mini", opt);
}

/// Removes projections carrying kSymmetryTag.
inline NetworkSpec strip_symmetry_edges(NetworkSpec spec) {
    std::erase_if(spec.projections, [](const ProjectionSpec& p) { return p.tag == kSymmetryTag; });
    return spec;
}

/// Sets every projection from an inhibitory group to weight 0.
inline NetworkSpec ablate_inhibition(NetworkSpec spec) {
    for (auto& p : spec.projections) {
        const auto g = spec.group_index(p.pre);
        if (g && spec.groups[*g].kind == NeuronKind::Inhibitory) p.weight = 0.0f;
    }
    return spec;
}

// ---------------------------------------------------------------------------
// metrics

inline double accuracy(std::uint64_t spikes_test, std::uint64_t spikes_ref) {
    if (spikes_ref == 0) throw std::domain_error("accuracy needs a reference run with at least one spike");
    const double diff = spikes_test > spikes_ref ? static_cast<double>(spikes_test - spikes_ref)
                                                 : static_cast<double>(spikes_ref - spikes_test);
    return 1.0 - diff / static_cast<double>(spikes_ref);
}

inline double energy_per_spike(double power_w, double duration_s, std::uint64_t spikes) {
    if (spikes == 0) throw std::domain_error("energy per spike needs at least one spike");
    if (power_w < 0.0) throw std::domain_error("power must be non-negative");
    return power_w * duration_s / static_cast<double>(spikes);
}

inline double firing_rate(std::uint64_t spikes, std::uint64_t neurons, double model_time_ms) {
    if (neurons == 0) throw std::domain_error("firing rate needs at least one neuron");
    if (!(model_time_ms > 0.0)) throw std::domain_error("firing rate needs a positive model time");
    return static_cast<double>(spikes) / static_cast<double>(neurons) / (model_time_ms / 1000.0);
}

struct EnergyPerSpike {
    double snn_j = 0.0;
    double system_j = 0.0;
};

struct BenchResult {
    std::size_t neurons = 0;
    std::size_t synapses = 0;
    std::int64_t model_time_ms = 0;
    std::uint64_t spikes = 0;
    double rate_hz = 0.0;
    std::optional<double> accuracy;
    std::optional<EnergyPerSpike> energy_per_spike;
};

inline BenchResult summarize(const RunReport& r) {
    BenchResult b;
    b.neurons = r.neurons;
    b.synapses = r.synapses;
    b.model_time_ms = r.duration_ms;
    b.spikes = r.total_spikes();
    b.rate_hz = firing_rate(b.spikes, b.neurons, static_cast<double>(b.model_time_ms));
    return b;
}

// ---------------------------------------------------------------------------
// raster analysis

/// Spikes per tick of neurons in [offset, offset + size).
inline std::vector<std::uint32_t> population_histogram(const std::vector<SpikeRecord>& raster, std::uint32_t offset,
                                                       std::size_t size, std::int64_t duration_ms) {
    std::vector<std::uint32_t> hist(static_cast<std::size_t>(duration_ms), 0);
    for (const auto& s : raster) {
        if (s.neuron >= offset && s.neuron < offset + size && s.time_ms < hist.size()) ++hist[s.time_ms];
    }
    return hist;
}

/// Burst onsets: ticks where the population's spike count reaches
/// `min_fraction` of its size, merged so that onsets closer than `refractory_ms`
/// belong to one burst.
inline std::vector<std::int64_t> burst_onsets(const std::vector<std::uint32_t>& hist, std::size_t size,
                                              double min_fraction = 0.1, std::int64_t refractory_ms = 20) {
    std::vector<std::int64_t> onsets;
    const double threshold = min_fraction * static_cast<double>(size);
    for (std::size_t t = 0; t < hist.size(); ++t) {
        if (static_cast<double>(hist[t]) < threshold) continue;
        const auto tick = static_cast<std::int64_t>(t);
        if (onsets.empty() || tick - onsets.back() >= refractory_ms) onsets.push_back(tick);
    }
    return onsets;
}

}  // namespace mcusnn
