#pragma once

// Clock-driven kernel. One tick is 1 ms of model time, integrated as two
// forward-Euler substeps of 0.5 ms. Synaptic input is impulsive: a spike
// through a delay-d synapse adds its weight to the target's input for exactly
// the tick t + d.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcusnn/connectivity.hpp"
#include "mcusnn/half.hpp"
#include "mcusnn/memledger.hpp"
#include "mcusnn/model.hpp"
#include "mcusnn/rng.hpp"

namespace mcusnn {

inline constexpr float kThresholdMv = 30.0f;
inline constexpr float kSubstepMs = 0.5f;
inline constexpr int kSubstepsPerTick = 2;
inline constexpr std::size_t kRingSlots = kMaxDelayMs;

struct NeuronState {
    float v = -65.0f;
    float u = -13.0f;

    friend bool operator==(const NeuronState&, const NeuronState&) = default;
};

struct StepResult {
    NeuronState state;
    bool fired = false;
};

/// Resting initial condition: v = c, u = b * c.
constexpr NeuronState initial_state(const IzhParams& p) { return {p.c, p.b * p.c}; }

/// One Euler substep of length h. u integrates against the pre-update v.
constexpr StepResult step_neuron(NeuronState s, const IzhParams& p, float input, float h = kSubstepMs) {
    const float v_old = s.v;
    s.v = v_old + h * (0.04f * v_old * v_old + 5.0f * v_old + 140.0f - s.u + input);
    s.u = s.u + h * (p.a * (p.b * v_old - s.u));
    if (s.v >= kThresholdMv) {
        s.v = p.c;
        s.u = s.u + p.d;
        return {s, true};
    }
    return {s, false};
}

/// A full 1 ms tick. Reports at most one spike even if both substeps cross.
constexpr StepResult advance_tick(NeuronState s, const IzhParams& p, float input) {
    bool fired = false;
    for (int k = 0; k < kSubstepsPerTick; ++k) {
        const auto r = step_neuron(s, p, input);
        s = r.state;
        fired = fired || r.fired;
    }
    return {s, fired};
}

constexpr double spike_probability(double rate_hz) { return std::min(rate_hz * 0.001, 1.0); }

/// Generator neurons of `group` that fire at tick t under stimulus
/// `stimulus_index`. Stateless: the draw for (seed, stimulus, neuron, tick)
/// never changes.
inline std::vector<std::uint32_t> poisson_spikes(const StimulusSpec& stim, std::size_t stimulus_index,
                                                 std::uint32_t first_id, std::size_t group_size, std::int64_t t,
                                                 std::uint64_t seed) {
    std::vector<std::uint32_t> fired;
    if (t < stim.start_ms || t >= stim.end_ms) return fired;
    const double p = spike_probability(stim.rate_hz);
    if (p <= 0.0) return fired;
    for (std::size_t i = 0; i < group_size; ++i) {
        const auto id = static_cast<std::uint32_t>(first_id + i);
        if (counter_uniform(seed, stimulus_index, id, static_cast<std::uint64_t>(t)) < p) fired.push_back(id);
    }
    return fired;
}

/// Per-neuron input accumulators for the next kRingSlots ticks.
class DelayRing {
public:
    explicit DelayRing(std::size_t neurons) : neurons_(neurons), slots_(neurons * kRingSlots, 0.0f) {}

    float& at(std::int64_t tick, std::uint32_t neuron) { return slots_[slot(tick) * neurons_ + neuron]; }
    float at(std::int64_t tick, std::uint32_t neuron) const { return slots_[slot(tick) * neurons_ + neuron]; }

    std::span<float> row(std::int64_t tick) { return {slots_.data() + slot(tick) * neurons_, neurons_}; }

    void clear(std::int64_t tick) {
        auto r = row(tick);
        std::fill(r.begin(), r.end(), 0.0f);
    }

    bool all_zero() const {
        return std::all_of(slots_.begin(), slots_.end(), [](float x) { return x == 0.0f; });
    }

private:
    static std::size_t slot(std::int64_t tick) { return static_cast<std::size_t>(tick % static_cast<std::int64_t>(kRingSlots)); }

    std::size_t neurons_;
    std::vector<float> slots_;
};

struct SpikeRecord {
    std::uint32_t time_ms = 0;
    std::uint32_t neuron = 0;

    friend bool operator==(const SpikeRecord&, const SpikeRecord&) = default;
};

struct GroupSummary {
    std::string name;
    NeuronKind kind = NeuronKind::Excitatory;
    std::uint32_t offset = 0;
    std::size_t size = 0;
    std::uint64_t spikes = 0;
};

struct RunReport {
    std::string network;
    Precision precision = Precision::Half;
    std::uint64_t seed = 0;
    std::int64_t duration_ms = 0;
    std::size_t neurons = 0;
    std::size_t synapses = 0;
    std::vector<SpikeRecord> raster;
    std::vector<GroupSummary> groups;
    std::vector<NeuronState> final_state;  // generator neurons keep their initial value
    MemoryPlan memory;

    std::uint64_t total_spikes() const { return raster.size(); }

    std::uint64_t spikes_of(NeuronKind kind) const {
        std::uint64_t n = 0;
        for (const auto& g : groups) {
            if (g.kind == kind) n += g.spikes;
        }
        return n;
    }
};

class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(const BudgetViolation& v, MemoryPlan plan)
        : std::runtime_error(std::string("memory budget exceeded at phase ") + phase_label(v.phase) + ": " +
                             std::to_string(v.shortfall) + " bytes (" + format_mb(static_cast<double>(v.shortfall)) +
                             ") short"),
          violation_(v),
          plan_(std::move(plan)) {}

    const BudgetViolation& violation() const noexcept { return violation_; }
    const MemoryPlan& plan() const noexcept { return plan_; }

private:
    BudgetViolation violation_;
    MemoryPlan plan_;
};

/// Runtime state of one network, with synaptic quantities held in `Storage`
/// (float or Half16). Neuron state and input accumulation stay in float.
template <class Storage>
class Simulator {
    using Traits = StorageTraits<Storage>;

public:
    Simulator(const NetworkSpec& spec, const ConnectionTable& table)
        : spec_(spec), ring_(table.neuron_count), offsets_(spec.group_offsets()) {
        const std::size_t n = table.neuron_count;
        state_.resize(n);
        params_.resize(n);
        generator_.assign(n, false);
        for (std::size_t g = 0; g < spec.groups.size(); ++g) {
            const auto& group = spec.groups[g];
            for (std::size_t i = 0; i < group.size; ++i) {
                const std::size_t id = offsets_[g] + i;
                if (group.params) {
                    params_[id] = *group.params;
                    state_[id] = initial_state(*group.params);
                } else {
                    generator_[id] = true;
                }
            }
        }

        const std::size_t m = table.size();
        wt_.reserve(m);
        max_wt_.reserve(m);
        wt_change_.assign(m, Traits::store(0.0f));
        post_.reserve(m);
        delay_.reserve(m);
        out_offset_.assign(n + 1, 0);
        for (const auto& s : table.synapses) {
            wt_.push_back(Traits::store(s.weight));
            max_wt_.push_back(Traits::store(s.weight));
            post_.push_back(s.post);
            delay_.push_back(s.delay_ms);
            ++out_offset_[s.pre + 1];
        }
        for (std::size_t i = 0; i < n; ++i) out_offset_[i + 1] += out_offset_[i];
    }

    std::int64_t now() const noexcept { return tick_; }
    const std::vector<NeuronState>& state() const noexcept { return state_; }
    const DelayRing& ring() const noexcept { return ring_; }
    std::span<const Storage> weights() const noexcept { return wt_; }
    std::span<const Storage> max_weights() const noexcept { return max_wt_; }
    std::span<const Storage> weight_changes() const noexcept { return wt_change_; }

    /// Adds every synapse of each pre neuron in `spikes` (ascending ids) into
    /// the ring slot t + delay.
    void deliver(std::span<const std::uint32_t> spikes, std::int64_t t) {
        for (const std::uint32_t pre : spikes) {
            for (std::uint32_t k = out_offset_[pre]; k < out_offset_[pre + 1]; ++k) {
                ring_.at(t + delay_[k], post_[k]) += Traits::load(wt_[k]);
            }
        }
    }

    /// Advances one tick and returns the ids that fired, ascending.
    const std::vector<std::uint32_t>& step() {
        const std::int64_t t = tick_;
        fired_.clear();

        // Consume and clear this tick's slot first, so a 64 ms delivery made
        // below lands in a clean slot.
        auto input = ring_.row(t);
        for (std::size_t id = 0; id < state_.size(); ++id) {
            if (generator_[id]) continue;
            const auto r = advance_tick(state_[id], params_[id], input[id]);
            state_[id] = r.state;
            if (r.fired) fired_.push_back(static_cast<std::uint32_t>(id));
        }
        ring_.clear(t);

        bool merged = false;
        for (std::size_t si = 0; si < spec_.stimuli.size(); ++si) {
            const auto& stim = spec_.stimuli[si];
            const std::size_t g = *spec_.group_index(stim.group);
            const auto ids = poisson_spikes(stim, si, offsets_[g], spec_.groups[g].size, t, spec_.seed);
            fired_.insert(fired_.end(), ids.begin(), ids.end());
            merged = merged || !ids.empty();
        }
        if (merged) {
            std::sort(fired_.begin(), fired_.end());
            fired_.erase(std::unique(fired_.begin(), fired_.end()), fired_.end());
        }

        deliver(fired_, t);
        ++tick_;
        return fired_;
    }

private:
    NetworkSpec spec_;
    DelayRing ring_;
    std::vector<std::uint32_t> offsets_;
    std::vector<NeuronState> state_;
    std::vector<IzhParams> params_;
    std::vector<bool> generator_;

    std::vector<Storage> wt_;
    std::vector<Storage> wt_change_;
    std::vector<Storage> max_wt_;
    std::vector<std::uint32_t> post_;
    std::vector<std::uint8_t> delay_;
    std::vector<std::uint32_t> out_offset_;  // CSR over pre neurons

    std::vector<std::uint32_t> fired_;
    std::int64_t tick_ = 0;
};

struct RunOptions {
    Budget budget{};
    LedgerCalibration calibration{};
};

template <class Storage>
RunReport simulate(const NetworkSpec& spec, const ConnectionTable& table, std::int64_t duration_ms,
                   MemoryPlan plan) {
    RunReport report;
    report.network = spec.name;
    report.precision = spec.precision;
    report.seed = spec.seed;
    report.duration_ms = duration_ms;
    report.neurons = table.neuron_count;
    report.synapses = table.size();
    report.memory = std::move(plan);

    const auto offsets = spec.group_offsets();
    std::vector<std::size_t> group_of(table.neuron_count);
    for (std::size_t g = 0; g < spec.groups.size(); ++g) {
        std::fill_n(group_of.begin() + offsets[g], spec.groups[g].size, g);
        report.groups.push_back({spec.groups[g].name, spec.groups[g].kind, offsets[g], spec.groups[g].size, 0});
    }

    Simulator<Storage> sim(spec, table);
    for (std::int64_t t = 0; t < duration_ms; ++t) {
        for (const std::uint32_t id : sim.step()) {
            report.raster.push_back({static_cast<std::uint32_t>(t), id});
            ++report.groups[group_of[id]].spikes;
        }
    }
    report.final_state = sim.state();
    return report;
}

/// Elaborates, plans memory against the budget, then runs for duration_ms
/// ticks at the precision requested by the network.
inline RunReport run(const NetworkSpec& spec, std::int64_t duration_ms, const RunOptions& options = {}) {
    if (duration_ms <= 0) throw std::invalid_argument("run duration must be positive");
    const ConnectionTable table = elaborate(spec);
    MemoryPlan plan = plan_memory(table, spec, options.budget, options.calibration);
    const auto check = check_budget(plan, options.budget);
    if (!check.approved) throw BudgetExceeded(*check.violation, std::move(plan));

    if (spec.precision == Precision::Half) return simulate<Half16>(spec, table, duration_ms, std::move(plan));
    return simulate<float>(spec, table, duration_ms, std::move(plan));
}

}  // namespace mcusnn
