#pragma once

#include <random>
#include <vector>

#include "chp/generate.hpp"
#include "chp/hulls.hpp"

namespace chp::testing {

inline std::vector<double> random_price(std::mt19937_64 &rng, int T, double lo = 0.0, double hi = 60.0)
{
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> p(T);
    for (auto &v : p) v = std::round(d(rng) * 4.0) / 4.0;
    return p;
}

inline GeneratorClass class_of(int i) { return static_cast<GeneratorClass>(i % 4); }

inline ExtraObjective random_extra(std::mt19937_64 &rng, int T)
{
    std::uniform_real_distribution<double> d(-50.0, 50.0);
    ExtraObjective ex;
    for (int t = 0; t < T; ++t) {
        ex.on.push_back(d(rng));
        ex.start.push_back(d(rng));
        ex.stop.push_back(d(rng));
    }
    return ex;
}

inline bool integral(double v, double tol = 1e-5) { return std::abs(v - std::round(v)) <= tol; }

} // namespace chp::testing
