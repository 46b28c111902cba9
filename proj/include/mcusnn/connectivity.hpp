#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <tuple>
#include <vector>

#include "mcusnn/model.hpp"
#include "mcusnn/rng.hpp"

namespace mcusnn {

struct Synapse {
    std::uint32_t pre = 0;
    std::uint32_t post = 0;
    float weight = 0.0f;
    std::uint8_t delay_ms = 1;
    std::uint16_t projection = 0;

    friend bool operator==(const Synapse&, const Synapse&) = default;
};

/// Explicit synapse list. Sorted by (pre, projection, post), which is also
/// the order spikes are delivered in.
struct ConnectionTable {
    std::vector<Synapse> synapses;
    std::size_t neuron_count = 0;

    std::size_t size() const noexcept { return synapses.size(); }
    friend bool operator==(const ConnectionTable&, const ConnectionTable&) = default;
};

/// Expands every projection into concrete synapses. Each post neuron draws
/// exactly fan_in distinct pre neurons, uniformly without replacement. The
/// stream for a projection is keyed by (seed, "pre->post"), so adding or
/// removing one projection leaves the others' sampling untouched.
inline ConnectionTable elaborate(const NetworkSpec& spec) {
    validate(spec);

    ConnectionTable table;
    table.neuron_count = spec.neuron_count();
    table.synapses.reserve(spec.synapse_count());
    const auto offsets = spec.group_offsets();

    std::vector<std::uint32_t> pool;
    for (std::size_t pi = 0; pi < spec.projections.size(); ++pi) {
        const auto& proj = spec.projections[pi];
        const std::size_t pre_g = *spec.group_index(proj.pre);
        const std::size_t post_g = *spec.group_index(proj.post);
        const std::size_t pre_size = spec.groups[pre_g].size;
        const std::size_t post_size = spec.groups[post_g].size;

        std::uint64_t repeat = 0;
        for (std::size_t q = 0; q < pi; ++q) {
            repeat += spec.projections[q].pre == proj.pre && spec.projections[q].post == proj.post;
        }
        std::mt19937_64 rng(mix64(spec.seed ^ mix64(fnv1a(proj.pre + "->" + proj.post) + repeat)));
        pool.resize(pre_size);
        for (std::size_t post = 0; post < post_size; ++post) {
            std::iota(pool.begin(), pool.end(), 0u);
            // partial Fisher-Yates: the first fan_in slots become the sample
            for (std::size_t k = 0; k < proj.fan_in; ++k) {
                const auto j = k + static_cast<std::size_t>(uniform_below(rng, pre_size - k));
                std::swap(pool[k], pool[j]);
            }
            for (std::size_t k = 0; k < proj.fan_in; ++k) {
                table.synapses.push_back({offsets[pre_g] + pool[k], static_cast<std::uint32_t>(offsets[post_g] + post),
                                          proj.weight, static_cast<std::uint8_t>(proj.delay_ms),
                                          static_cast<std::uint16_t>(pi)});
            }
        }
    }

    std::sort(table.synapses.begin(), table.synapses.end(), [](const Synapse& x, const Synapse& y) {
        return std::tie(x.pre, x.projection, x.post) < std::tie(y.pre, y.projection, y.post);
    });
    return table;
}

}  // namespace mcusnn
