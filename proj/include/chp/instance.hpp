#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace chp {

/// Sentinel for an unbounded duration (max-up time, initial off time of a free unit).
inline constexpr int kUnbounded = 1 << 28;

struct Segment {
    double slope = 0.0;     // a_j ($/MWh)
    double intercept = 0.0; // b_j ($)
    bool operator==(const Segment &) const = default;
};

struct StartupState {
    std::string name;   // hot / warm / cold
    double cost = 0.0;  // F_s
    int min_off = 1;    // first down-time (hours) at which this state applies
    bool operator==(const StartupState &) const = default;
};

struct ShutdownStep {
    int min_duration = 0; // completed up-duration from which this cost applies
    double cost = 0.0;
    bool operator==(const ShutdownStep &) const = default;
};

/** @brief All physical and cost data of one generator; vectors are indexed by period 0..T-1. */
struct GeneratorSpec {
    std::string id;
    std::string bus;
    std::vector<double> p_min, p_max;
    std::vector<double> ramp_up, ramp_down;
    std::vector<double> su_ramp, sd_ramp;
    int min_up = 1;
    int min_down = 1;
    int max_up = kUnbounded;
    std::vector<int> mu_enforced, md_enforced;
    std::vector<double> no_load;
    std::vector<std::vector<Segment>> cost_segments;
    std::vector<StartupState> startup_states; // ordered by min_off
    std::vector<ShutdownStep> shutdown_cost_fn;
    int initial_on_duration = 0;
    int initial_off_duration = 0;

    int horizon() const { return static_cast<int>(p_max.size()); }

    bool operator==(const GeneratorSpec &) const = default;

    // 1-based period accessors
    double pmin(int t) const { return p_min[t - 1]; }
    double pmax(int t) const { return p_max[t - 1]; }
    double rup(int t) const { return ramp_up[t - 1]; }
    double rdown(int t) const { return ramp_down[t - 1]; }
    double surmp(int t) const { return su_ramp[t - 1]; }
    double sdrmp(int t) const { return sd_ramp[t - 1]; }
    double noload(int t) const { return no_load[t - 1]; }
    const std::vector<Segment> &segs(int t) const { return cost_segments[t - 1]; }
    int L_at(int t) const { return mu_enforced[t - 1] ? min_up : 1; }
    int l_at(int t) const { return md_enforced[t - 1] ? min_down : 1; }

    bool initially_on() const { return initial_on_duration > 0; }
    /// Off time before period 1 for an initially-off unit; unbounded for a free unit.
    int off_history() const
    {
        if (initial_on_duration > 0) return 0;
        return initial_off_duration > 0 ? initial_off_duration : kUnbounded;
    }
    bool multi_state() const { return startup_states.size() > 1; }
    bool constant_shutdown() const { return shutdown_cost_fn.size() <= 1; }
};

struct Line {
    std::string id;
    std::vector<double> shift_factors; // one per bus
    double limit = 0.0;
    bool operator==(const Line &) const = default;
};

struct Bus {
    std::string id;
    double load_share = 0.0;
    bool operator==(const Bus &) const = default;
};

struct SystemInstance {
    std::string name;
    int horizon = 0;
    std::vector<double> demand;
    std::vector<Bus> buses;
    std::vector<Line> lines; // empty: single-price mode
    std::vector<GeneratorSpec> generators;

    bool has_transmission() const { return !lines.empty(); }
    int bus_index(const std::string &id) const;
    bool operator==(const SystemInstance &) const = default;
};

enum class GeneratorClass { G1, G2, G3, G4 };

const char *to_string(GeneratorClass c);

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

SystemInstance parse_instance(const std::string &text);
SystemInstance load_instance(const std::string &path);
std::string serialize_instance(const SystemInstance &inst);

/// Checks the invariants of one generator; throws DataError with a field path.
void validate_generator(const GeneratorSpec &g, const std::string &path = "generator");
void validate_instance(const SystemInstance &inst);

GeneratorClass classify(const GeneratorSpec &g);

/// S'(tau). Throws if down_time is below the effective min-down (defaults to g.min_down).
double startup_cost_at(const GeneratorSpec &g, int down_time, std::optional<int> min_down = std::nullopt);
/// S(d) for a completed up-duration d.
double shutdown_cost_at(const GeneratorSpec &g, int up_duration);
/// t0 = [L - s0]^+
int initial_lock(const GeneratorSpec &g);

/// Builds a time-invariant single-segment generator; handy for tests and examples.
GeneratorSpec make_simple_generator(const std::string &id, int T, double pmin, double pmax, double slope);

} // namespace chp
