#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "chp/instance.hpp"

namespace chp {

/// Number of generators requested per class.
struct ClassMix {
    int g1 = 0, g2 = 0, g3 = 0, g4 = 0;
    int total() const { return g1 + g2 + g3 + g4; }
};

/// Roughly a 50/1/8/41 percent G1-G4 mix scaled to n units, with at least one G4.
ClassMix default_mix(int n);

/// Random valid generator of the requested class; classify() of the result equals cls.
GeneratorSpec random_generator(std::mt19937_64 &rng, const std::string &id, int T, GeneratorClass cls);

struct InstanceOptions {
    int horizon = 6;
    ClassMix mix;
    int buses = 1;        // > 1 adds transmission lines
    int lines = 0;
    std::string name = "random";
};

/// Demand is the sum of one feasible self-schedule per unit, so the unit commitment is always feasible.
SystemInstance random_instance(std::uint64_t seed, const InstanceOptions &opt);

} // namespace chp
