#include <gtest/gtest.h>

#include <set>

#include "mcusnn/bench.hpp"

using namespace mcusnn;

TEST(Metrics, FiringRate) {
    EXPECT_NEAR(firing_rate(27'364, 1'200, 1'000), 22.80, 0.005);
    EXPECT_NEAR(firing_rate(412, 186, 30'000), 0.0738, 0.00005);
    EXPECT_EQ(firing_rate(0, 100, 1'000), 0.0);
    EXPECT_THROW(firing_rate(1, 0, 1'000), std::domain_error);
    EXPECT_THROW(firing_rate(1, 1, 0), std::domain_error);
}

TEST(Metrics, Accuracy) {
    EXPECT_NEAR(accuracy(27'364, 26'694), 0.9749, 0.00005);
    EXPECT_EQ(accuracy(500, 500), 1.0);
    EXPECT_EQ(accuracy(0, 100), 0.0);
    EXPECT_EQ(accuracy(150, 100), 0.5);
    EXPECT_THROW(accuracy(10, 0), std::domain_error);
}

TEST(Metrics, EnergyPerSpike) {
    EXPECT_NEAR(energy_per_spike(0.030, 27.4, 27'364), 3.004e-5, 0.0005e-5);
    // the whole-system figure rounds to 80 uJ against the quoted 79 uJ
    EXPECT_NEAR(energy_per_spike(0.080, 27.4, 27'364) * 1e6, 80.0, 1.0);
    EXPECT_EQ(energy_per_spike(0.5, 3.0, 1), 1.5);
    EXPECT_THROW(energy_per_spike(0.1, 1.0, 0), std::domain_error);
    EXPECT_THROW(energy_per_spike(-0.1, 1.0, 5), std::domain_error);
}

TEST(Builders, Synfire4Shape) {
    const auto spec = build_synfire4();
    validate(spec);
    EXPECT_EQ(spec.neuron_count(), 1'200u);
    EXPECT_EQ(spec.groups.size(), 9u);
    EXPECT_EQ(spec.projections.size(), 14u);
    EXPECT_EQ(build_synfire4({.strict_table = true}).projections.size(), 13u);

    std::set<int> delays;
    for (const auto& p : spec.projections) delays.insert(p.delay_ms);
    EXPECT_EQ(delays, (std::set<int>{8, 10}));

    auto has = [&](const std::string& pre, const std::string& post) {
        for (const auto& p : spec.projections) {
            if (p.pre == pre && p.post == post) return true;
        }
        return false;
    };
    EXPECT_TRUE(has("exc3", "exc0"));
    EXPECT_TRUE(has("exc3", "inh0"));
    EXPECT_TRUE(has("inh0", "exc0"));
    EXPECT_FALSE(has("exc3", "exc1"));
}

TEST(Builders, Synfire4MiniShape) {
    const auto spec = build_synfire4_mini();
    validate(spec);
    EXPECT_EQ(spec.neuron_count(), 186u);
    std::size_t generators = 0, dynamics = 0;
    for (const auto& g : spec.groups) (g.kind == NeuronKind::PoissonGenerator ? generators : dynamics)++;
    EXPECT_EQ(generators, 1u);
    EXPECT_EQ(dynamics, 8u);
    // recorded value of the shipped configuration
    EXPECT_EQ(spec.synapse_count(), 2'355u);
}

TEST(Builders, StripAndAblate) {
    const auto stripped = strip_symmetry_edges(build_synfire4());
    EXPECT_EQ(stripped, build_synfire4({.strict_table = true}));

    const auto ablated = ablate_inhibition(build_synfire4());
    for (const auto& p : ablated.projections) {
        if (p.pre.rfind("inh", 0) == 0) {
            EXPECT_EQ(p.weight, 0.0f);
        } else {
            EXPECT_GT(p.weight, 0.0f);
        }
    }
}

TEST(Summary, RateIdentity) {
    const auto report = run(build_synfire4_mini(), 5'000);
    const auto b = summarize(report);
    EXPECT_EQ(b.neurons, 186u);
    EXPECT_EQ(b.spikes, report.total_spikes());
    EXPECT_EQ(b.rate_hz, static_cast<double>(b.spikes) / 186.0 / 5.0);
}

TEST(Analysis, BurstOnsets) {
    std::vector<std::uint32_t> hist(100, 0);
    hist[10] = 30;
    hist[11] = 50;
    hist[40] = 25;
    hist[45] = 3;
    const auto on = burst_onsets(hist, 200);
    EXPECT_EQ(on, (std::vector<std::int64_t>{10, 40}));
}

namespace {

const RunReport& full_run() {
    static const RunReport r = run(build_synfire4(), 1'000);
    return r;
}

std::vector<std::int64_t> exc_onsets(const RunReport& r, std::size_t segment) {
    const auto& g = r.groups[1 + 2 * segment];
    return burst_onsets(population_histogram(r.raster, g.offset, g.size, r.duration_ms), g.size);
}

}  // namespace

TEST(Synfire4, WavePropagatesWithFeedForwardLag) {
    const auto& r = full_run();
    const auto first = exc_onsets(r, 0);
    // first free-running wave, after the stimulus has stopped
    const auto start = std::find_if(first.begin(), first.end(), [](std::int64_t t) { return t >= kSynfire4Full.stim_end_ms; });
    ASSERT_NE(start, first.end());
    std::int64_t prev = *start;
    for (std::size_t seg = 1; seg < kSynfireSegments; ++seg) {
        const auto on = exc_onsets(r, seg);
        const auto next = std::find_if(on.begin(), on.end(), [&](std::int64_t t) { return t > prev; });
        ASSERT_NE(next, on.end());
        EXPECT_GE(*next - prev, 8) << "segment " << seg;
        EXPECT_LE(*next - prev, 12) << "segment " << seg;
        prev = *next;
    }
}

TEST(Synfire4, WaveReentersSegmentZero) {
    const auto& r = full_run();
    const auto on = exc_onsets(r, 0);
    const auto after = std::count_if(on.begin(), on.end(), [](std::int64_t t) { return t >= 60; });
    EXPECT_GE(after, 2);
}

TEST(Synfire4, HalfPrecisionStaysCloseToSingle) {
    auto single = build_synfire4({.precision = Precision::Single});
    const auto ref = run(single, 1'000);
    EXPECT_GE(accuracy(full_run().total_spikes(), ref.total_spikes()), 0.9);
}

TEST(Synfire4, InhibitionReducesExcitatoryActivity) {
    const auto ablated = run(ablate_inhibition(build_synfire4()), 1'000);
    EXPECT_GT(ablated.spikes_of(NeuronKind::Excitatory), full_run().spikes_of(NeuronKind::Excitatory));
}

TEST(Synfire4Mini, InhibitionReducesExcitatoryActivityAcrossSeeds) {
    for (std::uint64_t seed : {42ull, 1ull, 7ull}) {
        const auto spec = build_synfire4_mini({.seed = seed});
        const auto base = run(spec, 30'000);
        const auto ablated = run(ablate_inhibition(spec), 30'000);
        EXPECT_GT(ablated.spikes_of(NeuronKind::Excitatory), base.spikes_of(NeuronKind::Excitatory)) << seed;
    }
}
