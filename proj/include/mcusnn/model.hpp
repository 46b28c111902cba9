#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace mcusnn {

inline constexpr int kMaxDelayMs = 64;

enum class NeuronKind { Excitatory, Inhibitory, PoissonGenerator };
enum class Precision { Half, Single };

inline const char* to_string(NeuronKind k) {
    switch (k) {
        case NeuronKind::Excitatory: return "excitatory";
        case NeuronKind::Inhibitory: return "inhibitory";
        case NeuronKind::PoissonGenerator: return "poisson";
    }
    return "?";
}

inline const char* to_string(Precision p) { return p == Precision::Half ? "half" : "single"; }

/// Four-parameter Izhikevich neuron.
struct IzhParams {
    float a = 0.02f;
    float b = 0.2f;
    float c = -65.0f;
    float d = 8.0f;

    static constexpr IzhParams regular_spiking() { return {0.02f, 0.2f, -65.0f, 8.0f}; }
    static constexpr IzhParams fast_spiking() { return {0.1f, 0.2f, -65.0f, 2.0f}; }

    friend bool operator==(const IzhParams&, const IzhParams&) = default;
};

struct GroupSpec {
    std::string name;
    std::size_t size = 0;
    NeuronKind kind = NeuronKind::Excitatory;
    std::optional<IzhParams> params;  // absent for generators

    friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

/// Connects `fan_in` distinct pre neurons onto every post neuron.
struct ProjectionSpec {
    std::string pre;
    std::string post;
    std::size_t fan_in = 1;
    float weight = 0.0f;
    int delay_ms = 1;
    std::string tag;  // free-form label; "symmetry" marks optional structural edges

    friend bool operator==(const ProjectionSpec&, const ProjectionSpec&) = default;
};

/// Poisson drive for a generator group over the half-open window [start, end).
struct StimulusSpec {
    std::string group;
    double rate_hz = 0.0;
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;

    friend bool operator==(const StimulusSpec&, const StimulusSpec&) = default;
};

struct NetworkSpec {
    std::string name = "network";
    std::vector<GroupSpec> groups;
    std::vector<ProjectionSpec> projections;
    std::vector<StimulusSpec> stimuli;
    std::uint64_t seed = 1;
    Precision precision = Precision::Half;

    std::optional<std::size_t> group_index(const std::string& group_name) const {
        for (std::size_t i = 0; i < groups.size(); ++i) {
            if (groups[i].name == group_name) return i;
        }
        return std::nullopt;
    }

    /// Global id of the first neuron of each group; groups are laid out in
    /// declaration order.
    std::vector<std::uint32_t> group_offsets() const {
        std::vector<std::uint32_t> offsets;
        offsets.reserve(groups.size());
        std::uint32_t next = 0;
        for (const auto& g : groups) {
            offsets.push_back(next);
            next += static_cast<std::uint32_t>(g.size);
        }
        return offsets;
    }

    std::size_t neuron_count() const {
        std::size_t n = 0;
        for (const auto& g : groups) n += g.size;
        return n;
    }

    std::size_t synapse_count() const {
        std::size_t n = 0;
        for (const auto& p : projections) {
            if (auto post = group_index(p.post)) n += groups[*post].size * p.fan_in;
        }
        return n;
    }

    friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

enum class ConfigErrorKind { Syntax, UnknownReference, Invariant, NoGroups };

inline const char* to_string(ConfigErrorKind k) {
    switch (k) {
        case ConfigErrorKind::Syntax: return "syntax error";
        case ConfigErrorKind::UnknownReference: return "unknown reference";
        case ConfigErrorKind::Invariant: return "invalid network";
        case ConfigErrorKind::NoGroups: return "no groups";
    }
    return "error";
}

/// Raised by the parser and by validate(). line/column are 1-based, 0 when
/// the error is not tied to a source position.
class ConfigError : public std::runtime_error {
public:
    ConfigError(ConfigErrorKind kind, const std::string& message, std::size_t line = 0,
                std::size_t column = 0)
        : std::runtime_error(format(kind, message, line, column)),
          kind_(kind),
          line_(line),
          column_(column) {}

    ConfigErrorKind kind() const noexcept { return kind_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string format(ConfigErrorKind kind, const std::string& message, std::size_t line,
                              std::size_t column) {
        std::string out = to_string(kind);
        if (line != 0) {
            out += " at " + std::to_string(line) + ":" + std::to_string(column);
        }
        return out + ": " + message;
    }

    ConfigErrorKind kind_;
    std::size_t line_;
    std::size_t column_;
};

/// Checks every structural invariant of a network description. Throws
/// ConfigError on the first violation found.
inline void validate(const NetworkSpec& spec) {
    using K = ConfigErrorKind;
    if (spec.groups.empty()) {
        throw ConfigError(K::NoGroups, "network '" + spec.name + "' declares no groups");
    }

    std::unordered_set<std::string> seen;
    for (const auto& g : spec.groups) {
        if (!seen.insert(g.name).second) {
            throw ConfigError(K::Invariant, "duplicate group name '" + g.name + "'");
        }
        if (g.size < 1) {
            throw ConfigError(K::Invariant, "group '" + g.name + "' must have size >= 1");
        }
        const bool generator = g.kind == NeuronKind::PoissonGenerator;
        if (generator == g.params.has_value()) {
            throw ConfigError(K::Invariant, generator
                                                ? "generator group '" + g.name + "' takes no Izhikevich parameters"
                                                : "group '" + g.name + "' is missing Izhikevich parameters");
        }
        if (g.params) {
            if (!(g.params->a > 0.0f)) {
                throw ConfigError(K::Invariant, "group '" + g.name + "': parameter a must be > 0");
            }
            if (!(g.params->c < 30.0f)) {
                throw ConfigError(K::Invariant, "group '" + g.name + "': reset c must lie below the 30 mV threshold");
            }
        }
    }

    for (const auto& p : spec.projections) {
        const auto pre = spec.group_index(p.pre);
        if (!pre) throw ConfigError(K::UnknownReference, "projection source '" + p.pre + "' is not a declared group");
        const auto post = spec.group_index(p.post);
        if (!post) throw ConfigError(K::UnknownReference, "projection target '" + p.post + "' is not a declared group");

        const std::string edge = "'" + p.pre + " -> " + p.post + "'";
        const auto& pre_group = spec.groups[*pre];
        if (spec.groups[*post].kind == NeuronKind::PoissonGenerator) {
            throw ConfigError(K::Invariant, "projection " + edge + " targets a generator group");
        }
        if (p.fan_in < 1 || p.fan_in > pre_group.size) {
            throw ConfigError(K::Invariant, "projection " + edge + ": fan-in " + std::to_string(p.fan_in) +
                                                " must lie in 1.." + std::to_string(pre_group.size));
        }
        if (p.delay_ms < 1 || p.delay_ms > kMaxDelayMs) {
            throw ConfigError(K::Invariant, "projection " + edge + ": delay must lie in 1..64 ms");
        }
        const bool inhibitory = pre_group.kind == NeuronKind::Inhibitory;
        if ((inhibitory && p.weight > 0.0f) || (!inhibitory && p.weight < 0.0f)) {
            throw ConfigError(K::Invariant, "projection " + edge + ": weight sign does not match source kind " +
                                                to_string(pre_group.kind));
        }
    }

    for (const auto& s : spec.stimuli) {
        const auto g = spec.group_index(s.group);
        if (!g) throw ConfigError(K::UnknownReference, "stimulus target '" + s.group + "' is not a declared group");
        if (spec.groups[*g].kind != NeuronKind::PoissonGenerator) {
            throw ConfigError(K::Invariant, "stimulus target '" + s.group + "' is not a generator group");
        }
        if (!(s.rate_hz >= 0.0)) {
            throw ConfigError(K::Invariant, "stimulus on '" + s.group + "': rate must be >= 0");
        }
        if (s.start_ms >= s.end_ms) {
            throw ConfigError(K::Invariant, "stimulus on '" + s.group + "': window start must precede end");
        }
    }
}

}  // namespace mcusnn
