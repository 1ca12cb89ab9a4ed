#include <gtest/gtest.h>

#include "chp/instance.hpp"

using namespace chp;

namespace {
const char *kMinimal = R"({"horizon": 4, "demand": [10, 20, 30, 20],
  "generators": [{"id": "g1", "p_min": 5, "p_max": 50, "cost_segments": [[20, 0]], "initial_on_duration": 2}]})";
}

TEST(Instance, MinimalRoundTrip)
{
    SystemInstance a = parse_instance(kMinimal);
    EXPECT_EQ(a.generators.size(), 1u);
    EXPECT_EQ(a.horizon, 4);
    EXPECT_FALSE(a.has_transmission());
    SystemInstance b = parse_instance(serialize_instance(a));
    EXPECT_EQ(a, b);
    EXPECT_EQ(serialize_instance(a), serialize_instance(b));
}

TEST(Instance, PminAbovePmaxNamesPeriod)
{
    std::string doc = R"({"horizon": 3, "demand": 10,
      "generators": [{"id": "g", "p_min": [1, 60, 1], "p_max": 50, "cost_segments": [[20, 0]]}]})";
    try {
        parse_instance(doc);
        FAIL();
    } catch (const DataError &e) {
        EXPECT_NE(std::string(e.what()).find("period 2"), std::string::npos) << e.what();
    }
}

TEST(Instance, MissingFieldAndMalformed)
{
    EXPECT_THROW(parse_instance("{not json"), DataError);
    EXPECT_THROW(parse_instance(R"({"horizon": 2, "demand": 1, "generators": [{"id": "g", "p_max": 5, "cost_segments": [[1,0]]}]})"),
                 DataError);
    EXPECT_THROW(parse_instance(R"({"horizon": 2, "demand": [1, 2, 3], "generators": []})"), DataError);
}

TEST(Instance, Defaults)
{
    SystemInstance a = parse_instance(kMinimal);
    const auto &g = a.generators[0];
    EXPECT_EQ(g.max_up, kUnbounded);
    EXPECT_EQ(g.mu_enforced, std::vector<int>(4, 1));
    EXPECT_EQ(g.md_enforced, std::vector<int>(4, 1));
}

TEST(Instance, Classify)
{
    GeneratorSpec g = make_simple_generator("g", 4, 20, 100, 10);
    EXPECT_EQ(classify(g), GeneratorClass::G1);
    g.su_ramp.assign(4, 50);
    EXPECT_EQ(classify(g), GeneratorClass::G2);
    g.max_up = 10;
    EXPECT_EQ(classify(g), GeneratorClass::G3);
    GeneratorSpec h = make_simple_generator("h", 4, 20, 100, 10);
    h.startup_states = {{"hot", 50, 1}, {"warm", 80, 4}, {"cold", 120, 8}};
    EXPECT_EQ(classify(h), GeneratorClass::G4);
    GeneratorSpec k = make_simple_generator("k", 4, 20, 100, 10);
    k.p_max[2] = 90;
    EXPECT_EQ(classify(k), GeneratorClass::G4);
    GeneratorSpec r = make_simple_generator("r", 4, 20, 100, 10);
    r.ramp_up.assign(4, 30);
    EXPECT_EQ(classify(r), GeneratorClass::G4);
}

TEST(Instance, ClassifyStableUnderRoundTrip)
{
    SystemInstance a = parse_instance(kMinimal);
    a.generators.push_back(make_simple_generator("g2", 4, 10, 40, 30));
    a.generators.back().su_ramp.assign(4, 20);
    a.generators.back().max_up = 3;
    SystemInstance b = parse_instance(serialize_instance(a));
    for (size_t i = 0; i < a.generators.size(); ++i) EXPECT_EQ(classify(a.generators[i]), classify(b.generators[i]));
}

TEST(Instance, StartupCostAt)
{
    GeneratorSpec g = make_simple_generator("g", 4, 20, 100, 10);
    g.startup_states = {{"cold", 100, 1}};
    EXPECT_EQ(startup_cost_at(g, 3), 100);
    g.startup_states = {{"hot", 50, 1}, {"warm", 80, 4}, {"cold", 120, 8}};
    EXPECT_EQ(startup_cost_at(g, 4), 80);
    EXPECT_EQ(startup_cost_at(g, 8), 120);
    g.min_down = 3;
    EXPECT_THROW(startup_cost_at(g, 2), std::invalid_argument);
    double prev = 0;
    for (int tau = 3; tau < 20; ++tau) {
        EXPECT_GE(startup_cost_at(g, tau), prev);
        prev = startup_cost_at(g, tau);
    }
}

TEST(Instance, InitialLock)
{
    GeneratorSpec g = make_simple_generator("g", 4, 20, 100, 10);
    g.min_up = 2;
    g.initial_on_duration = 1;
    EXPECT_EQ(initial_lock(g), 1);
    g.initial_on_duration = 5;
    EXPECT_EQ(initial_lock(g), 0);
    g.min_up = 4;
    g.initial_on_duration = 0;
    EXPECT_EQ(initial_lock(g), 4);
}

TEST(Instance, TransmissionBlock)
{
    std::string doc = R"({"horizon": 1, "demand": 10, "buses": [{"id": "a", "load_share": 0.5}, {"id": "b", "load_share": 0.5}],
      "lines": [{"id": "ab", "shift_factors": [0.5, -0.5], "limit": 3}],
      "generators": [{"id": "g", "bus": "a", "p_min": 0, "p_max": 50, "cost_segments": [[20, 0]]}]})";
    SystemInstance s = parse_instance(doc);
    EXPECT_TRUE(s.has_transmission());
    std::string bad = R"({"horizon": 1, "demand": 10, "buses": ["a"], "lines": [{"shift_factors": [0.5, 1], "limit": 3}],
      "generators": [{"id": "g", "p_min": 0, "p_max": 50, "cost_segments": [[20, 0]]}]})";
    EXPECT_THROW(parse_instance(bad), DataError);
}
