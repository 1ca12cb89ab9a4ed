#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "chp/hulls.hpp"
#include "chp/oracle.hpp"
#include "chp/simplex.hpp"
#include "test_util.hpp"

using namespace chp;
using chp::testing::integral;
using chp::testing::random_price;

namespace {

bool contains(const std::vector<std::pair<int, int>> &v, int a, int b)
{
    return std::find(v.begin(), v.end(), std::make_pair(a, b)) != v.end();
}

} // namespace

TEST(IndexSets, KbarWithMaxUp)
{
    GeneratorSpec g = make_simple_generator("g", 6, 10, 100, 20);
    g.min_up = 2;
    g.min_down = 2;
    g.max_up = 3;
    g.initial_on_duration = 1;
    auto s = build_index_sets(g);
    EXPECT_EQ(s.Kbar, (std::vector<int>{1, 2}));
    EXPECT_TRUE(contains(s.TK1, 1, 1));
    EXPECT_TRUE(contains(s.TK1, 1, 2));
}

TEST(IndexSets, KbarUnboundedMaxUp)
{
    GeneratorSpec g = make_simple_generator("g", 5, 10, 100, 20);
    g.min_up = 3;
    g.initial_on_duration = 1;
    auto s = build_index_sets(g);
    EXPECT_EQ(s.Kbar, (std::vector<int>{2, 3, 4, 5}));
}

TEST(IndexSets, RelaxedMinUpAdmitsSinglePeriod)
{
    GeneratorSpec g = make_simple_generator("g", 5, 10, 100, 20);
    g.min_up = 3;
    EXPECT_FALSE(contains(build_index_sets(g).TK2, 2, 2));
    g.mu_enforced = {1, 0, 1, 1, 1};
    EXPECT_TRUE(contains(build_index_sets(g).TK2, 2, 2));
}

TEST(IndexSets, InvariantsAndCoverage)
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 150; ++trial) {
        int T = 1 + trial % 6;
        GeneratorSpec g = random_generator(rng, "g", T, chp::testing::class_of(trial));
        auto s = build_index_sets(g);
        for (auto [t, k] : s.TK2) {
            int len = k - t + 1;
            if (k < T) EXPECT_GE(len, g.L_at(t));
            EXPECT_LE(len, g.max_up);
        }
        for (auto [k, t] : s.KT)
            if (k > 0 || g.initially_on()) EXPECT_GE(t - k - 1, g.l_at(t));
        // every maximal ON run of every feasible schedule is an interval of the sets
        for (long mask = 0; mask < (1L << T); ++mask) {
            std::vector<int> on(T);
            for (int t = 0; t < T; ++t) on[t] = (mask >> t) & 1;
            if (!schedule_feasible(g, on)) continue;
            for (int a = 1; a <= T; ++a) {
                if (!on[a - 1] || (a > 1 && on[a - 2])) continue;
                int b = a;
                while (b < T && on[b]) ++b;
                bool first = a == 1 && g.initially_on();
                EXPECT_TRUE(first ? contains(s.TK1, 1, b) : contains(s.TK2, a, b)) << "trial " << trial;
            }
        }
    }
}

TEST(ThreeBin, SinglePeriodFreeUnit)
{
    GeneratorSpec g = make_simple_generator("g", 1, 10, 100, 20);
    LinearModel m;
    auto h = build_3bin(m, g, "");
    int u = h.vars.at("u[1]");
    EXPECT_EQ(m.var(u).kind, VarKind::binary);
    EXPECT_GE(m.find_constraint("caplo[1]"), 0);
    EXPECT_GE(m.find_constraint("caphi[1]"), 0);
}

TEST(ThreeBin, MinUpRowsPresent)
{
    GeneratorSpec g = make_simple_generator("g", 5, 10, 100, 20);
    g.min_up = 3;
    LinearModel m;
    build_3bin(m, g, "");
    EXPECT_GE(m.find_constraint("minup[4]"), 0);
    EXPECT_GE(m.find_constraint("minup[5]"), 0);
}

TEST(ThreeBin, StartupStateIndicators)
{
    GeneratorSpec g = make_simple_generator("g", 4, 10, 100, 20);
    g.startup_states = {{"hot", 10, 1}, {"warm", 20, 2}, {"cold", 30, 3}};
    LinearModel m;
    auto h = build_3bin(m, g, "");
    EXPECT_TRUE(h.vars.count("delta[2][0]"));
    EXPECT_TRUE(h.vars.count("delta[2][2]"));
    EXPECT_GE(m.find_constraint("deltasum[2]"), 0);
}

TEST(ThreeBin, RejectsDurationDependentShutdown)
{
    GeneratorSpec g = make_simple_generator("g", 3, 10, 100, 20);
    g.shutdown_cost_fn = {{0, 30}, {2, 10}};
    LinearModel m;
    EXPECT_THROW(build_3bin(m, g, ""), ModelError);
}

TEST(Hulls, ClassMismatchRejected)
{
    GeneratorSpec g = make_simple_generator("g", 3, 10, 100, 20);
    g.su_ramp.assign(3, 50);
    ASSERT_EQ(classify(g), GeneratorClass::G2);
    LinearModel m;
    EXPECT_THROW(build_hull_D1(m, g, ""), ModelError);
    EXPECT_NO_THROW(build_hull_D2(m, g, "a:"));
    EXPECT_NO_THROW(build_hull_D3(m, g, "b:"));
}

TEST(Hulls, StartupFacetCapsOutput)
{
    GeneratorSpec g = make_simple_generator("g", 3, 10, 100, 20);
    g.su_ramp.assign(3, 40);
    auto sm = single_generator_model(g, Formulation::D2, {200, 200, 200});
    LinearModel m = fix_variables(sm.model, {{sm.h.vars.at("v[2]"), 1.0}});
    auto r = solve_lp(m);
    ASSERT_TRUE(r.ok());
    EXPECT_NEAR(r.primal[sm.h.vars.at("x[2]")], 40.0, 1e-7);
}

// Convex cost with a kink above the start-up ramp: the aggregated cost rows alone let a mix of a
// start-up period (capped at 60) and a running period (at 162) be charged at the kink.
TEST(Hulls, StartupSplitTightensConvexCost)
{
    GeneratorSpec g = make_simple_generator("g", 5, 46, 162, 0);
    g.su_ramp.assign(5, 60);
    g.min_down = 3;
    g.no_load.assign(5, 13.5);
    g.cost_segments.assign(5, {Segment{15.8, 170.7}, Segment{21.3, -210.7}});
    g.startup_states = {{"cold", 412.8, 1}};
    g.shutdown_cost_fn = {{0, 48.9}};
    g.initial_off_duration = 2;
    ASSERT_EQ(classify(g), GeneratorClass::G2);
    const std::vector<double> price{16.5, 17, 17.5, 31, 2.5};
    double en = enumerate_best_schedule(g, price, nullptr).net_cost;
    auto sm = single_generator_model(g, Formulation::D2, price);
    auto r = solve_lp(sm.model);
    ASSERT_TRUE(r.ok());
    EXPECT_NEAR(r.objective, en, 1e-6 * (1 + std::abs(en)));
    EXPECT_NEAR(en, -1224.7, 0.01);
}

TEST(Hulls, MaxUpCutsLongRun)
{
    GeneratorSpec g = make_simple_generator("g", 3, 10, 100, 20);
    g.max_up = 2;
    ASSERT_EQ(classify(g), GeneratorClass::G3);
    auto sm = single_generator_model(g, Formulation::D3, {0, 0, 0});
    std::vector<std::pair<int, double>> fix;
    for (int t = 1; t <= 3; ++t) fix.emplace_back(sm.h.vars.at("u[" + std::to_string(t) + "]"), 1.0);
    EXPECT_EQ(solve_lp(fix_variables(sm.model, fix)).status, SolveStatus::infeasible);
}

TEST(D4, StructureRows)
{
    GeneratorSpec g = make_simple_generator("g", 2, 10, 100, 20);
    LinearModel m;
    auto h = build_hull_D4(m, g, "");
    EXPECT_GE(m.find_constraint("wsum"), 0);
    EXPECT_GE(m.find_constraint("down[1]"), 0);

    GeneratorSpec s = make_simple_generator("s", 4, 10, 100, 20);
    s.sd_ramp.assign(4, 30);
    LinearModel m2;
    build_hull_D4(m2, s, "");
    for (auto [t, k] : build_index_sets(s).TK2)
        if (k < 4) EXPECT_GE(m2.find_constraint("sdy[" + std::to_string(t) + "][" + std::to_string(k) + "][" + std::to_string(k) + "]"), 0);
}

namespace {

// Solves the LP over formulation kind; checks status integrality and compares with the DP oracle.
void check_integral_optimum(const GeneratorSpec &g, Formulation kind, const std::vector<double> &price,
                            const ExtraObjective *ex, const std::string &what)
{
    auto sm = single_generator_model(g, kind, price, ex);
    auto r = solve_lp(sm.model);
    ASSERT_TRUE(r.ok()) << what;
    for (int j : sm.h.status_vars) EXPECT_TRUE(integral(r.primal[j])) << what << " var " << sm.model.var(j).name << "=" << r.primal[j];
    double dp = dp_self_schedule(g, price, nullptr, ex).net_cost;
    EXPECT_NEAR(r.objective, dp, 1e-6 * (1 + std::abs(dp))) << what;
}

} // namespace

TEST(Hulls, VertexIntegralityByClass)
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 90; ++trial) {
        int cls = trial % 3;
        int T = 1 + trial % 5;
        GeneratorSpec g = random_generator(rng, "g", T, chp::testing::class_of(cls));
        auto price = random_price(rng, T);
        ExtraObjective ex = chp::testing::random_extra(rng, T);
        Formulation f = cls == 0 ? Formulation::D1 : cls == 1 ? Formulation::D2 : Formulation::D3;
        check_integral_optimum(g, f, price, trial % 2 ? &ex : nullptr, "trial " + std::to_string(trial));
    }
}

TEST(D4, IntegralAndEqualsDp)
{
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        int T = 1 + trial % 6;
        GeneratorSpec g = random_generator(rng, "g", T, chp::testing::class_of(trial));
        auto price = random_price(rng, T);
        ExtraObjective ex = chp::testing::random_extra(rng, T);
        check_integral_optimum(g, Formulation::D4, price, trial % 2 ? &ex : nullptr, "trial " + std::to_string(trial));
    }
}

TEST(System, RowCounts)
{
    SystemInstance inst;
    inst.horizon = 2;
    inst.demand = {50, 60};
    inst.buses = {{"b1", 1.0}};
    inst.generators = {make_simple_generator("g1", 2, 10, 100, 20)};
    auto sm = build_system(inst, {Formulation::D1});
    EXPECT_EQ(sm.rows.size(), 2u);

    inst.buses = {{"b1", 0.5}, {"b2", 0.5}};
    inst.lines = {{"L1", {0.0, 0.4}, 30}};
    auto sm2 = build_system(inst, {Formulation::D4});
    EXPECT_EQ(sm2.rows.size(), 2u + 2u * 2u);
    // D4 balance coefficients touch q variables only
    const auto &row = sm2.model.constraint(sm2.rows[0].row);
    for (auto [j, c] : row.coeffs) EXPECT_EQ(sm2.model.var(j).name.rfind("g1:qw", 0) == 0 || sm2.model.var(j).name.rfind("g1:qy", 0) == 0, true);
}

TEST(System, HorizonMismatch)
{
    SystemInstance inst;
    inst.horizon = 3;
    inst.demand = {1, 1, 1};
    inst.buses = {{"b1", 1.0}};
    inst.generators = {make_simple_generator("g1", 2, 10, 100, 20)};
    EXPECT_THROW(build_system(inst, {Formulation::D1}), ModelError);
}

TEST(P3, IntegralScheduleFeasible)
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        int T = 2 + trial % 4;
        GeneratorSpec g = random_generator(rng, "g", T, chp::testing::class_of(trial));
        if (!g.constant_shutdown()) continue;
        auto price = random_price(rng, T);
        auto sm = single_generator_model(g, Formulation::ThreeBin, price, nullptr, {.binary = true});
        auto r = solve_mip(sm.model);
        ASSERT_TRUE(r.ok());
        auto hat = read_hat(sm.h, g, r.primal);
        EXPECT_TRUE(solve_lp(build_P3(g, hat)).ok()) << "trial " << trial;
    }
}

TEST(P3, FractionalBlipOutsideHull)
{
    // u = 0.5 for two periods then off: a half-weight run of length 2 < L = 3 cannot be mixed from feasible runs
    GeneratorSpec g = make_simple_generator("g", 4, 10, 100, 20);
    g.min_up = 3;
    g.min_down = 1;
    HatPoint hat;
    hat.u = {0.5, 0.5, 0, 0};
    hat.v = {0.5, 0, 0, 0};
    hat.e = {0, 0, 0.5, 0};
    hat.x = {5, 5, 0, 0};
    hat.f = {100, 100, 0, 0};
    EXPECT_EQ(solve_lp(build_P3(g, hat)).status, SolveStatus::infeasible);
}

TEST(P3, D3VertexOfG3Feasible)
{
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        int T = 2 + trial % 4;
        GeneratorSpec g = random_generator(rng, "g", T, GeneratorClass::G3);
        auto sm = single_generator_model(g, Formulation::D3, random_price(rng, T));
        auto r = solve_lp(sm.model);
        ASSERT_TRUE(r.ok());
        EXPECT_TRUE(solve_lp(build_P3(g, read_hat(sm.h, g, r.primal))).ok()) << "trial " << trial;
    }
}

TEST(D4, MappingMatchesThreeBinCost)
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 60; ++trial) {
        int T = 2 + trial % 5;
        GeneratorSpec g = random_generator(rng, "g", T, chp::testing::class_of(trial));
        if (!g.constant_shutdown() || g.multi_state()) continue;
        auto d4 = single_generator_model(g, Formulation::D4, random_price(rng, T));
        auto r = solve_lp(d4.model);
        ASSERT_TRUE(r.ok());
        auto hat = read_hat(d4.h, g, r.primal);
        LinearModel m;
        auto h3 = build_3bin(m, g, "", {.binary = false});
        std::vector<double> pt(m.num_vars(), 0.0);
        for (int t = 1; t <= T; ++t) {
            auto s = std::to_string(t);
            pt[h3.vars.at("x[" + s + "]")] = hat.x[t - 1];
            pt[h3.vars.at("u[" + s + "]")] = hat.u[t - 1];
            pt[h3.vars.at("v[" + s + "]")] = hat.v[t - 1];
            pt[h3.vars.at("e[" + s + "]")] = hat.e[t - 1];
            pt[h3.vars.at("f[" + s + "]")] = hat.f[t - 1];
        }
        EXPECT_LT(primal_violation(m, pt), 1e-6) << "trial " << trial;
        EXPECT_NEAR(h3.cost.eval(pt), d4.h.cost.eval(r.primal), 1e-6 * (1 + std::abs(h3.cost.eval(pt)))) << "trial " << trial;
    }
}
