#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chp/instance.hpp"
#include "chp/pricing.hpp"

namespace chp {

struct CheckResult {
    std::string suite;
    long checks = 0;
    long failures = 0;
    std::string first_failure;
    bool ok() const { return failures == 0; }
    void fail(const std::string &msg)
    {
        if (failures++ == 0) first_failure = msg;
    }
};

struct VerifyOptions {
    std::uint64_t seed = 42;
    int prices_per_generator = 20;
    bool corrupt_hull = false;   // build D2/D3 without the start-up ramp facet
    double tol = 1e-6;           // relative objective tolerance
    double frac_tol = 1e-5;
    PricingOptions pricing;
};

/// A few random generators of every class, horizon T, used alongside instance generators.
std::vector<GeneratorSpec> probe_generators(std::uint64_t seed, int T, int per_class);

CheckResult check_dp_vs_enumeration(const std::vector<GeneratorSpec> &gens, const VerifyOptions &opt);
CheckResult check_d4_duality(const std::vector<GeneratorSpec> &gens, const VerifyOptions &opt);
/// LP over the class hull (D1/D2/D3 for G1-G3, D4 for all) must be integral and match the DP value.
CheckResult check_vertex_integrality(const std::vector<GeneratorSpec> &gens, const VerifyOptions &opt);
/// P1 uplift traces of IA1, IA2 and IAC never increase.
CheckResult check_uplift_monotone(const SystemInstance &inst, const UcSolution &uc, const VerifyOptions &opt);

/// Trace check shared with the acceptance suite.
bool trace_non_increasing(const PricingRunReport &r, double rel_tol, std::string *why = nullptr);

} // namespace chp
