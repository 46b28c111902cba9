#pragma once

// Analytic allocation ledger for the seven load phases of a simulation. Each
// phase is a sum of array sizes; every non-empty array also pays the
// allocator's per-allocation header.

#include <array>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "mcusnn/connectivity.hpp"
#include "mcusnn/model.hpp"

namespace mcusnn {

enum class Phase : std::uint8_t { Init = 1, RandomGen, ConnInfo, SynState, NeuronState, GroupState, AuxData };

inline constexpr std::array<Phase, 7> kAllPhases{Phase::Init,        Phase::RandomGen,  Phase::ConnInfo, Phase::SynState,
                                                 Phase::NeuronState, Phase::GroupState, Phase::AuxData};

inline const char* phase_label(Phase p) {
    switch (p) {
        case Phase::Init: return "1. Init.";
        case Phase::RandomGen: return "2. Random Gen.";
        case Phase::ConnInfo: return "3. Conn. Info";
        case Phase::SynState: return "4. Syn. State";
        case Phase::NeuronState: return "5. Neuron State";
        case Phase::GroupState: return "6. Group State";
        case Phase::AuxData: return "7. Auxiliary Data";
    }
    return "?";
}

inline const char* phase_key(Phase p) {
    switch (p) {
        case Phase::Init: return "Init";
        case Phase::RandomGen: return "RandomGen";
        case Phase::ConnInfo: return "ConnInfo";
        case Phase::SynState: return "SynState";
        case Phase::NeuronState: return "NeuronState";
        case Phase::GroupState: return "GroupState";
        case Phase::AuxData: return "AuxData";
    }
    return "?";
}

struct Budget {
    std::uint64_t total = 8'888'000;
};

/// Environment-dependent constants. The defaults were fitted to a reference
/// target's measured ramp-up for the 1,200- and 186-neuron benchmarks; none is
/// asserted by tests.
struct LedgerCalibration {
    std::uint64_t init_base_bytes = 189'367;        // runtime and code segments
    std::uint64_t init_per_neuron_bytes = 3'537;    // per-neuron setup tables
    std::uint64_t rng_state_bytes = 4;              // per generator neuron
    std::uint64_t group_state_bytes = 16'428;       // per group
    std::uint64_t raster_slots_per_neuron = 64;     // reserved spike records
    std::uint64_t allocation_overhead_bytes = 4;    // allocator header per array
};

// Field widths of the setup-time per-synapse record.
inline constexpr std::uint64_t kGroupIdBytes = 2;   // grpSrc, grpDest
inline constexpr std::uint64_t kDelayBytes = 1;
inline constexpr std::uint64_t kSpikeRecordBytes = 8;  // tick + neuron id
inline constexpr std::uint64_t kIndexBytes = 4;
inline constexpr std::uint64_t kAccumulatorBytes = 4;
inline constexpr std::uint64_t kNeuronScalarBytes = 4;  // v and u stay single precision

constexpr std::uint64_t scalar_bytes(Precision p) { return p == Precision::Half ? 2 : 4; }

struct LedgerEntry {
    Phase phase = Phase::Init;
    std::uint64_t size = 0;
    std::uint64_t total_used = 0;
    std::int64_t total_available = 0;  // negative once the budget is exceeded

    friend bool operator==(const LedgerEntry&, const LedgerEntry&) = default;
};

struct MemoryPlan {
    std::uint64_t budget = 0;
    std::vector<LedgerEntry> entries;

    std::uint64_t total_used() const { return entries.empty() ? 0 : entries.back().total_used; }
    const LedgerEntry& at(Phase p) const { return entries.at(static_cast<std::size_t>(p) - 1); }
};

namespace detail {

struct PhaseCost {
    std::uint64_t bytes = 0;
    const LedgerCalibration* cal;

    void array(std::uint64_t n) {
        if (n != 0) bytes += n + cal->allocation_overhead_bytes;
    }
};

}  // namespace detail

/// Per-phase byte costs for an elaborated network.
inline std::array<std::uint64_t, 7> phase_sizes(const ConnectionTable& table, const NetworkSpec& spec,
                                                const LedgerCalibration& cal = {}) {
    const std::uint64_t neurons = spec.neuron_count();
    const std::uint64_t synapses = table.size();
    const std::uint64_t scalar = scalar_bytes(spec.precision);
    std::uint64_t generators = 0;
    for (const auto& g : spec.groups) {
        if (g.kind == NeuronKind::PoissonGenerator) generators += g.size;
    }

    std::array<std::uint64_t, 7> out{};
    auto phase = [&](Phase p) -> std::uint64_t& { return out[static_cast<std::size_t>(p) - 1]; };

    phase(Phase::Init) = cal.init_base_bytes + cal.init_per_neuron_bytes * neurons;

    detail::PhaseCost rng{0, &cal};
    rng.array(generators * cal.rng_state_bytes);
    phase(Phase::RandomGen) = rng.bytes;

    // grpSrc, grpDest, delay, initWt, maxWt
    detail::PhaseCost conn{0, &cal};
    conn.array(synapses * (2 * kGroupIdBytes + kDelayBytes + 2 * scalar));
    phase(Phase::ConnInfo) = conn.bytes;

    // wt, wtChange, maxSynWt
    detail::PhaseCost syn{0, &cal};
    for (int i = 0; i < 3; ++i) syn.array(synapses * scalar);
    phase(Phase::SynState) = syn.bytes;

    detail::PhaseCost neuron{0, &cal};
    neuron.array(neurons * kNeuronScalarBytes);  // v
    neuron.array(neurons * kNeuronScalarBytes);  // u
    phase(Phase::NeuronState) = neuron.bytes;

    phase(Phase::GroupState) = cal.group_state_bytes * spec.groups.size();

    detail::PhaseCost aux{0, &cal};
    aux.array(neurons * kMaxDelayMs * kAccumulatorBytes);                      // delay rings
    aux.array(neurons * cal.raster_slots_per_neuron * kSpikeRecordBytes);      // raster reservation
    aux.array(synapses * kIndexBytes);                                         // outgoing synapse index
    if (neurons != 0) aux.array((neurons + 1) * kIndexBytes);                  // per-neuron offsets
    phase(Phase::AuxData) = aux.bytes;

    return out;
}

inline MemoryPlan plan_memory(const ConnectionTable& table, const NetworkSpec& spec, Budget budget = {},
                              const LedgerCalibration& cal = {}) {
    const auto sizes = phase_sizes(table, spec, cal);
    MemoryPlan plan;
    plan.budget = budget.total;
    std::uint64_t used = 0;
    for (Phase p : kAllPhases) {
        const std::uint64_t size = sizes[static_cast<std::size_t>(p) - 1];
        used += size;
        plan.entries.push_back(
            {p, size, used, static_cast<std::int64_t>(budget.total) - static_cast<std::int64_t>(used)});
    }
    return plan;
}

struct BudgetViolation {
    Phase phase = Phase::Init;
    std::uint64_t shortfall = 0;  // bytes over budget at that phase
};

struct BudgetCheck {
    bool approved = true;
    std::uint64_t headroom = 0;
    std::optional<BudgetViolation> violation;
};

/// Approves iff the final cumulative usage fits; otherwise reports the first
/// phase whose cumulative usage crosses the budget.
inline BudgetCheck check_budget(const MemoryPlan& plan, Budget budget) {
    BudgetCheck result;
    for (const auto& e : plan.entries) {
        if (e.total_used > budget.total) {
            result.approved = false;
            result.violation = BudgetViolation{e.phase, e.total_used - budget.total};
            return result;
        }
    }
    result.headroom = budget.total - plan.total_used();
    return result;
}

inline constexpr double kBytesPerMB = 1024.0 * 1024.0;

inline std::string format_mb(double bytes) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f MB", bytes / kBytesPerMB);
    return buf;
}

/// Three-column ramp-up table in MB with three decimals.
inline std::string render_ramp_up(const MemoryPlan& plan) {
    std::string out;
    char line[128];
    std::snprintf(line, sizeof line, "%-24s%14s%14s%18s\n", "Simulation load step", "Mem. Size", "Total Used",
                  "Total Available");
    out += line;
    std::snprintf(line, sizeof line, "%-24s%14s%14s%18s\n", "(Budget)", "", "",
                  format_mb(static_cast<double>(plan.budget)).c_str());
    out += line;
    for (const auto& e : plan.entries) {
        std::snprintf(line, sizeof line, "%-24s%14s%14s%18s\n", phase_label(e.phase),
                      format_mb(static_cast<double>(e.size)).c_str(),
                      format_mb(static_cast<double>(e.total_used)).c_str(),
                      format_mb(static_cast<double>(e.total_available)).c_str());
        out += line;
    }
    return out;
}

}  // namespace mcusnn
