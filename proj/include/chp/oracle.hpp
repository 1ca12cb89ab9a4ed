#pragma once

#include <vector>

#include "chp/hulls.hpp"
#include "chp/instance.hpp"

namespace chp {

struct Schedule {
    std::vector<int> on;      // per period
    std::vector<double> x;    // MW per period
};

struct ScheduleValue {
    Schedule schedule;
    double net_cost = 0.0;    // cost - price'x (+ extra terms)
    long scanned = 0;         // enumerator only: patterns examined
};

/** @brief Value functions of the self-scheduling DP. Index 0..T; entries outside the domain are +inf. */
struct DpTables {
    std::vector<double> V_down;    // last ON period k (k=0: off before period 1 when initially on)
    std::vector<double> V_up;      // restart at t
    double Phi = 0.0;
    std::vector<int> next_restart; // from V_down[k]: restart period, or -1 to stay off
    std::vector<int> next_stop;    // from V_up[t]: last ON period (T: on to the end)
    int first_stop = -1;           // initially on: chosen k in Kbar
    int first_restart = -1;        // initially off: chosen restart or -1
};

/// C(t,k) net of revenue. startup=false drops the start-up ramp (first interval of an initially-on unit).
/// Returns +inf if the interval cannot be dispatched. x_out receives the dispatch when finite.
double interval_dispatch_cost(const GeneratorSpec &g, int t, int k, const std::vector<double> &price, bool startup = true,
                              std::vector<double> *x_out = nullptr);

ScheduleValue dp_self_schedule(const GeneratorSpec &g, const std::vector<double> &price, DpTables *tables = nullptr,
                               const ExtraObjective *extra = nullptr);

/// Exhaustive search over on/off patterns; T <= 12.
ScheduleValue enumerate_best_schedule(const GeneratorSpec &g, const std::vector<double> &price,
                                      const ExtraObjective *extra = nullptr);

/// True if the on/off pattern obeys the duration rules and history of g.
bool schedule_feasible(const GeneratorSpec &g, const std::vector<int> &on);

} // namespace chp
