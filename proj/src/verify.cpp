#include "chp/verify.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "chp/generate.hpp"
#include "chp/hulls.hpp"
#include "chp/oracle.hpp"

namespace chp {

namespace {

std::vector<double> random_price(std::mt19937_64 &rng, int T)
{
    std::uniform_int_distribution<int> d(0, 240);
    std::vector<double> p(T);
    for (auto &v : p) v = 0.25 * d(rng);
    return p;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::abs(b)); }

std::string where(const GeneratorSpec &g, int k)
{
    return g.id + " (" + to_string(classify(g)) + ") price #" + std::to_string(k);
}

} // namespace

std::vector<GeneratorSpec> probe_generators(std::uint64_t seed, int T, int per_class)
{
    std::mt19937_64 rng(seed);
    std::vector<GeneratorSpec> out;
    const GeneratorClass cls[] = {GeneratorClass::G1, GeneratorClass::G2, GeneratorClass::G3, GeneratorClass::G4};
    for (auto c : cls)
        for (int k = 0; k < per_class; ++k)
            out.push_back(random_generator(rng, std::string("probe_") + to_string(c) + "_" + std::to_string(k), T, c));
    return out;
}

CheckResult check_dp_vs_enumeration(const std::vector<GeneratorSpec> &gens, const VerifyOptions &opt)
{
    CheckResult res;
    res.suite = "dp-vs-enumeration";
    std::mt19937_64 rng(opt.seed);
    for (const auto &g : gens) {
        if (g.horizon() > 12) continue;
        for (int k = 0; k < opt.prices_per_generator; ++k) {
            auto p = random_price(rng, g.horizon());
            double dp = dp_self_schedule(g, p).net_cost, en = enumerate_best_schedule(g, p).net_cost;
            ++res.checks;
            if (!near(dp, en, opt.tol)) {
                std::ostringstream os;
                os << where(g, k) << ": dp " << dp << " enumeration " << en;
                res.fail(os.str());
            }
        }
    }
    return res;
}

CheckResult check_d4_duality(const std::vector<GeneratorSpec> &gens, const VerifyOptions &opt)
{
    CheckResult res;
    res.suite = "d4-vs-dp";
    std::mt19937_64 rng(opt.seed + 1);
    for (const auto &g : gens)
        for (int k = 0; k < opt.prices_per_generator; ++k) {
            auto p = random_price(rng, g.horizon());
            auto sm = single_generator_model(g, Formulation::D4, p);
            auto r = solve_lp(sm.model, opt.pricing.lp);
            double dp = dp_self_schedule(g, p).net_cost;
            ++res.checks;
            if (!r.ok() || !near(r.objective, dp, opt.tol)) {
                std::ostringstream os;
                os << where(g, k) << ": D4 " << (r.ok() ? r.objective : NAN) << " dp " << dp;
                res.fail(os.str());
            }
        }
    return res;
}

CheckResult check_vertex_integrality(const std::vector<GeneratorSpec> &gens, const VerifyOptions &opt)
{
    CheckResult res;
    res.suite = "hull-vertex-integrality";
    std::mt19937_64 rng(opt.seed + 2);
    BuildFlags flags{.drop_strampup = opt.corrupt_hull};
    for (const auto &g : gens) {
        std::vector<Formulation> kinds{Formulation::D4};
        if (classify(g) != GeneratorClass::G4 && g.constant_shutdown()) kinds.push_back(default_formulation(g));
        for (int k = 0; k < opt.prices_per_generator; ++k) {
            auto p = random_price(rng, g.horizon());
            double dp = dp_self_schedule(g, p).net_cost;
            for (auto f : kinds) {
                auto sm = single_generator_model(g, f, p, nullptr, flags);
                auto r = solve_lp(sm.model, opt.pricing.lp);
                ++res.checks;
                bool integral = r.ok();
                for (int j : sm.h.status_vars)
                    if (integral && std::abs(r.primal[j] - std::round(r.primal[j])) > opt.frac_tol) integral = false;
                if (!integral || !near(r.objective, dp, opt.tol)) {
                    std::ostringstream os;
                    os << where(g, k) << " " << to_string(f) << ": "
                       << (integral ? "objective " + std::to_string(r.objective) + " vs dp " + std::to_string(dp)
                                    : std::string("fractional vertex"));
                    res.fail(os.str());
                }
            }
        }
    }
    return res;
}

bool trace_non_increasing(const PricingRunReport &r, double rel_tol, std::string *why)
{
    if (r.trace.empty()) return true;
    const double tol = rel_tol * (1.0 + std::abs(r.trace.front().uplift));
    for (size_t i = 1; i < r.trace.size(); ++i)
        if (r.trace[i].uplift > r.trace[i - 1].uplift + tol) {
            if (why) {
                std::ostringstream os;
                os << r.algorithm << " step " << i << ": uplift " << r.trace[i - 1].uplift << " -> " << r.trace[i].uplift;
                *why = os.str();
            }
            return false;
        }
    return true;
}

CheckResult check_uplift_monotone(const SystemInstance &inst, const UcSolution &uc, const VerifyOptions &opt)
{
    CheckResult res;
    res.suite = "uplift-monotonicity";
    for (auto v : {IaVariant::IA1, IaVariant::IA2}) {
        auto ia = run_ia(inst, v, uc, opt.pricing);
        auto iac = run_complementary(inst, ia, uc, opt.pricing);
        for (const auto *r : {&ia, &iac}) {
            std::string why;
            ++res.checks;
            if (!trace_non_increasing(*r, 1e-6, &why)) res.fail(inst.name + ": " + why);
        }
    }
    return res;
}

} // namespace chp
