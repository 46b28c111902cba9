#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "mcusnn/bench.hpp"
#include "mcusnn/config.hpp"
#include "mcusnn/connectivity.hpp"

using namespace mcusnn;

namespace {

ConfigError parse_error(const std::string& text) {
    try {
        parse_network(text);
    } catch (const ConfigError& e) {
        return e;
    }
    ADD_FAILURE() << "expected a ConfigError for:\n" << text;
    return ConfigError(ConfigErrorKind::Syntax, "none");
}

const char* kTwoGroups =
    "network demo seed=9 precision=single\n"
    "group stim size=10 type=poisson\n"
    "group exc0 size=200 type=RS\n"
    "project stim -> exc0 fanin=10 weight=1.0 delay=10\n"
    "stimulus stim rate=40 window=0:50\n";

}  // namespace

TEST(Parse, RegularSpikingDefaults) {
    const auto spec = parse_network("group exc0 size=200 type=RS\n");
    ASSERT_EQ(spec.groups.size(), 1u);
    const auto& g = spec.groups[0];
    EXPECT_EQ(g.size, 200u);
    EXPECT_EQ(g.kind, NeuronKind::Excitatory);
    ASSERT_TRUE(g.params);
    EXPECT_FLOAT_EQ(g.params->a, 0.02f);
    EXPECT_FLOAT_EQ(g.params->b, 0.2f);
    EXPECT_FLOAT_EQ(g.params->c, -65.0f);
    EXPECT_FLOAT_EQ(g.params->d, 8.0f);
}

TEST(Parse, FastSpikingDefaultsAndOverrides) {
    const auto spec = parse_network("group inh size=50 type=FS\ngroup x size=3 type=RS a=0.03 d=6 # custom\n");
    EXPECT_EQ(spec.groups[0].params, IzhParams::fast_spiking());
    EXPECT_EQ(spec.groups[0].kind, NeuronKind::Inhibitory);
    const IzhParams custom{0.03f, 0.2f, -65.0f, 6.0f};
    EXPECT_EQ(spec.groups[1].params, custom);
}

TEST(Parse, FullDocument) {
    const auto spec = parse_network(kTwoGroups);
    EXPECT_EQ(spec.name, "demo");
    EXPECT_EQ(spec.seed, 9u);
    EXPECT_EQ(spec.precision, Precision::Single);
    ASSERT_EQ(spec.projections.size(), 1u);
    EXPECT_EQ(spec.projections[0].pre, "stim");
    EXPECT_EQ(spec.projections[0].post, "exc0");
    EXPECT_EQ(spec.projections[0].fan_in, 10u);
    EXPECT_EQ(spec.projections[0].delay_ms, 10);
    ASSERT_EQ(spec.stimuli.size(), 1u);
    EXPECT_EQ(spec.stimuli[0].rate_hz, 40.0);
    EXPECT_EQ(spec.stimuli[0].start_ms, 0);
    EXPECT_EQ(spec.stimuli[0].end_ms, 50);
}

TEST(Parse, EmptyDocumentHasNoGroups) {
    EXPECT_EQ(parse_error("").kind(), ConfigErrorKind::NoGroups);
    EXPECT_EQ(parse_error("# only a comment\n\n   \n").kind(), ConfigErrorKind::NoGroups);
    EXPECT_EQ(parse_error("network n seed=1\n").kind(), ConfigErrorKind::NoGroups);
}

TEST(Parse, UnknownReferenceNamesTheGroup) {
    const auto e = parse_error("group a size=2 type=RS\nproject foo -> a fanin=1 weight=1 delay=1\n");
    EXPECT_EQ(e.kind(), ConfigErrorKind::UnknownReference);
    EXPECT_NE(std::string(e.what()).find("foo"), std::string::npos);

    EXPECT_EQ(parse_error("group a size=2 type=RS\nstimulus ghost rate=1 window=0:1\n").kind(),
              ConfigErrorKind::UnknownReference);
}

TEST(Parse, SyntaxErrorsCarryPosition) {
    auto e = parse_error("group a size=2 type=RS\ngroup b size=two type=RS\n");
    EXPECT_EQ(e.kind(), ConfigErrorKind::Syntax);
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 14u);

    e = parse_error("group a size=2 type=RS\nproject a a fanin=1 weight=1 delay=1\n");
    EXPECT_EQ(e.kind(), ConfigErrorKind::Syntax);
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 11u);

    EXPECT_EQ(parse_error("neuron a\n").kind(), ConfigErrorKind::Syntax);
    EXPECT_EQ(parse_error("group a size=2 type=LIF\n").kind(), ConfigErrorKind::Syntax);
    EXPECT_EQ(parse_error("group a size=2 type=RS size=3\n").kind(), ConfigErrorKind::Syntax);
    EXPECT_EQ(parse_error("group a size=2 type=RS colour=red\n").kind(), ConfigErrorKind::Syntax);
    EXPECT_EQ(parse_error("group a type=RS\n").kind(), ConfigErrorKind::Syntax);
    EXPECT_EQ(parse_error("group g size=2 type=poisson a=0.1\n").kind(), ConfigErrorKind::Syntax);
    EXPECT_EQ(parse_error("network n precision=double\ngroup a size=1 type=RS\n").kind(), ConfigErrorKind::Syntax);
    EXPECT_EQ(parse_error("group g size=2 type=poisson\nstimulus g rate=1 window=5\n").kind(),
              ConfigErrorKind::Syntax);
    EXPECT_EQ(parse_error("network a\nnetwork b\ngroup a size=1 type=RS\n").kind(), ConfigErrorKind::Syntax);
}

TEST(Parse, InvariantViolations) {
    auto kind = [](const std::string& t) { return parse_error(t).kind(); };
    const auto K = ConfigErrorKind::Invariant;
    EXPECT_EQ(kind("group a size=0 type=RS\n"), K);
    EXPECT_EQ(kind("group a size=1 type=RS\ngroup a size=1 type=FS\n"), K);
    EXPECT_EQ(kind("group a size=1 type=RS a=0\n"), K);
    EXPECT_EQ(kind("group a size=1 type=RS c=30\n"), K);
    EXPECT_EQ(kind("group a size=2 type=RS\ngroup b size=2 type=RS\nproject a -> b fanin=3 weight=1 delay=1\n"), K);
    EXPECT_EQ(kind("group a size=2 type=RS\ngroup b size=2 type=RS\nproject a -> b fanin=1 weight=1 delay=0\n"), K);
    EXPECT_EQ(kind("group a size=2 type=RS\ngroup b size=2 type=RS\nproject a -> b fanin=1 weight=1 delay=65\n"), K);
    EXPECT_EQ(kind("group a size=2 type=RS\ngroup b size=2 type=RS\nproject a -> b fanin=1 weight=-1 delay=1\n"), K);
    EXPECT_EQ(kind("group a size=2 type=FS\ngroup b size=2 type=RS\nproject a -> b fanin=1 weight=1 delay=1\n"), K);
    EXPECT_EQ(kind("group g size=2 type=poisson\ngroup b size=2 type=RS\nproject b -> g fanin=1 weight=1 delay=1\n"), K);
    EXPECT_EQ(kind("group g size=2 type=poisson\nstimulus g rate=-1 window=0:5\n"), K);
    EXPECT_EQ(kind("group g size=2 type=poisson\nstimulus g rate=1 window=5:5\n"), K);
    EXPECT_EQ(kind("group a size=2 type=RS\nstimulus a rate=1 window=0:5\n"), K);
}

TEST(Parse, ShippedConfigsMatchBuilders) {
    const auto full = load_network(MCUSNN_CONFIG_DIR "/synfire4.net");
    EXPECT_EQ(full, build_synfire4());
    const auto mini = load_network(MCUSNN_CONFIG_DIR "/synfire4_mini.net");
    EXPECT_EQ(mini, build_synfire4_mini());
}

TEST(Parse, FormatRoundTrip) {
    for (const auto& spec : {build_synfire4(), build_synfire4_mini(), build_synfire4({true, 5, Precision::Single})}) {
        EXPECT_EQ(parse_network(format_network(spec)), spec);
    }
}

TEST(Parse, MissingFileIsRuntimeError) {
    EXPECT_THROW(load_network("/nonexistent/none.net"), std::runtime_error);
}

// ---------------------------------------------------------------------------
// elaboration

TEST(Elaborate, Synfire4SynapseCount) {
    // 12,000 + 3,000 + 36,000 + 9,000 + 15,000 + 12,000 + 3,000
    const auto strict = build_synfire4({.strict_table = true});
    EXPECT_EQ(elaborate(strict).size(), 90'000u);
    // plus inh0 -> exc0: 200 x 25
    EXPECT_EQ(elaborate(build_synfire4()).size(), 95'000u);
}

TEST(Elaborate, SaturatedFanInConnectsEveryPre) {
    const auto spec = parse_network("group a size=10 type=RS\ngroup b size=1 type=RS\nproject a -> b fanin=10 weight=1 delay=3\n");
    const auto table = elaborate(spec);
    ASSERT_EQ(table.size(), 10u);
    std::set<std::uint32_t> pres;
    for (const auto& s : table.synapses) {
        EXPECT_EQ(s.post, 10u);
        EXPECT_EQ(s.delay_ms, 3);
        pres.insert(s.pre);
    }
    EXPECT_EQ(pres.size(), 10u);
    EXPECT_EQ(*pres.begin(), 0u);
    EXPECT_EQ(*pres.rbegin(), 9u);
}

TEST(Elaborate, Deterministic) {
    const auto spec = build_synfire4();
    EXPECT_EQ(elaborate(spec), elaborate(spec));
    auto reseeded = spec;
    reseeded.seed = 43;
    EXPECT_NE(elaborate(spec), elaborate(reseeded));
}

TEST(Elaborate, RemovingOneProjectionLeavesOthersUnchanged) {
    const auto with = elaborate(build_synfire4());
    const auto without = elaborate(build_synfire4({.strict_table = true}));
    std::multiset<std::tuple<std::uint32_t, std::uint32_t>> a, b;
    for (const auto& s : with.synapses) {
        if (s.weight > 0) a.insert({s.pre, s.post});
    }
    for (const auto& s : without.synapses) {
        if (s.weight > 0) b.insert({s.pre, s.post});
    }
    EXPECT_EQ(a, b);
}

TEST(Elaborate, SortedByPreThenProjection) {
    const auto table = elaborate(build_synfire4_mini());
    EXPECT_TRUE(std::is_sorted(table.synapses.begin(), table.synapses.end(), [](const Synapse& x, const Synapse& y) {
        return std::tie(x.pre, x.projection, x.post) < std::tie(y.pre, y.projection, y.post);
    }));
}

TEST(Elaborate, RejectsOversizedFanIn) {
    NetworkSpec spec;
    spec.groups = {{"a", 3, NeuronKind::Excitatory, IzhParams::regular_spiking()},
                   {"b", 3, NeuronKind::Excitatory, IzhParams::regular_spiking()}};
    spec.projections = {{"a", "b", 4, 1.0f, 1, ""}};
    EXPECT_THROW(elaborate(spec), ConfigError);
}

// Property: random networks obey exact fan-in with no duplicate pairs and the
// synapse-count identity.
TEST(Elaborate, FanInExactnessProperty) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        NetworkSpec spec;
        spec.seed = rng();
        const int groups = 2 + static_cast<int>(rng() % 4);
        for (int g = 0; g < groups; ++g) {
            spec.groups.push_back({"g" + std::to_string(g), 1 + rng() % 40, NeuronKind::Excitatory,
                                   IzhParams::regular_spiking()});
        }
        const int projections = 1 + static_cast<int>(rng() % 6);
        for (int p = 0; p < projections; ++p) {
            const auto& pre = spec.groups[rng() % groups];
            const auto& post = spec.groups[rng() % groups];
            spec.projections.push_back(
                {pre.name, post.name, 1 + rng() % pre.size, 0.5f, 1 + static_cast<int>(rng() % 64), ""});
        }
        const auto table = elaborate(spec);
        ASSERT_EQ(table.size(), spec.synapse_count());

        std::map<std::pair<std::uint16_t, std::uint32_t>, std::set<std::uint32_t>> in_edges;
        for (const auto& s : table.synapses) {
            const bool fresh = in_edges[{s.projection, s.post}].insert(s.pre).second;
            ASSERT_TRUE(fresh) << "duplicate pair";
        }
        const auto offsets = spec.group_offsets();
        for (std::size_t pi = 0; pi < spec.projections.size(); ++pi) {
            const auto& p = spec.projections[pi];
            const auto post_g = *spec.group_index(p.post);
            const auto pre_g = *spec.group_index(p.pre);
            for (std::size_t i = 0; i < spec.groups[post_g].size; ++i) {
                const auto& pres = in_edges[{static_cast<std::uint16_t>(pi), offsets[post_g] + i}];
                ASSERT_EQ(pres.size(), p.fan_in);
                for (auto pre : pres) {
                    ASSERT_GE(pre, offsets[pre_g]);
                    ASSERT_LT(pre, offsets[pre_g] + spec.groups[pre_g].size);
                }
            }
        }
    }
}

// Sampling is uniform: over many post neurons every pre is chosen about
// equally often.
TEST(Elaborate, SamplingIsRoughlyUniform) {
    const auto spec =
        parse_network("group a size=20 type=RS\ngroup b size=2000 type=RS\nproject a -> b fanin=5 weight=1 delay=1\n");
    std::vector<int> counts(20, 0);
    for (const auto& s : elaborate(spec).synapses) ++counts[s.pre];
    // each pre expected in 2000 * 5 / 20 = 500 draws, sd ~ 19.4
    for (int c : counts) {
        EXPECT_GT(c, 500 - 100);
        EXPECT_LT(c, 500 + 100);
    }
}
