#include "chp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace chp {

using json = nlohmann::ordered_json;

namespace {

std::string fmt_path(const std::string &base, const std::string &field) { return base + "." + field; }

[[noreturn]] void fail(const std::string &path, const std::string &msg) { throw DataError(path + ": " + msg); }

double as_number(const json &j, const std::string &path)
{
    if (!j.is_number()) fail(path, "expected a number");
    double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "non-finite value");
    return v;
}

int as_int(const json &j, const std::string &path)
{
    double v = as_number(j, path);
    if (std::floor(v) != v) fail(path, "expected an integer");
    return static_cast<int>(v);
}

std::vector<double> broadcast(const json &j, int T, const std::string &path)
{
    if (j.is_array()) {
        if (static_cast<int>(j.size()) != T)
            fail(path, "length " + std::to_string(j.size()) + " does not match horizon " + std::to_string(T));
        std::vector<double> out;
        for (size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
        return out;
    }
    return std::vector<double>(T, as_number(j, path));
}

std::vector<int> broadcast_flag(const json &j, int T, const std::string &path)
{
    auto v = broadcast(j, T, path);
    std::vector<int> out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (v[i] != 0.0 && v[i] != 1.0) fail(path + "[" + std::to_string(i) + "]", "flag must be 0 or 1");
        out.push_back(static_cast<int>(v[i]));
    }
    return out;
}

Segment parse_segment(const json &j, const std::string &path)
{
    if (j.is_array() && j.size() == 2) return {as_number(j[0], path + "[0]"), as_number(j[1], path + "[1]")};
    if (j.is_object()) {
        if (!j.contains("slope")) fail(path, "missing required field 'slope'");
        return {as_number(j["slope"], path + ".slope"), j.contains("intercept") ? as_number(j["intercept"], path + ".intercept") : 0.0};
    }
    fail(path, "segment must be [slope, intercept] or {slope, intercept}");
}

std::vector<Segment> parse_segment_list(const json &j, const std::string &path)
{
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty list of segments");
    std::vector<Segment> out;
    for (size_t i = 0; i < j.size(); ++i) out.push_back(parse_segment(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

bool is_segment(const json &j)
{
    return j.is_object() || (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number());
}

json dump_series(const std::vector<double> &v)
{
    if (!v.empty() && std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; })) return v[0];
    return v;
}

json dump_flags(const std::vector<int> &v)
{
    if (!v.empty() && std::all_of(v.begin(), v.end(), [&](int x) { return x == v[0]; })) return v[0];
    return v;
}

json dump_segments(const std::vector<Segment> &s)
{
    json a = json::array();
    for (auto &seg : s) a.push_back(json::array({seg.slope, seg.intercept}));
    return a;
}

GeneratorSpec parse_generator(const json &j, int T, const std::string &path)
{
    if (!j.is_object()) fail(path, "generator must be an object");
    auto req = [&](const char *k) -> const json & {
        if (!j.contains(k)) fail(path, std::string("missing required field '") + k + "'");
        return j[k];
    };
    GeneratorSpec g;
    g.id = req("id").is_string() ? j["id"].get<std::string>() : std::to_string(as_int(j["id"], fmt_path(path, "id")));
    g.bus = j.contains("bus") ? j["bus"].get<std::string>() : std::string();
    g.p_min = broadcast(req("p_min"), T, fmt_path(path, "p_min"));
    g.p_max = broadcast(req("p_max"), T, fmt_path(path, "p_max"));
    double cap = *std::max_element(g.p_max.begin(), g.p_max.end());
    auto opt_series = [&](const char *k, double dflt) {
        return j.contains(k) ? broadcast(j[k], T, fmt_path(path, k)) : std::vector<double>(T, dflt);
    };
    g.ramp_up = opt_series("ramp_up", cap);
    g.ramp_down = opt_series("ramp_down", cap);
    g.su_ramp = opt_series("su_ramp", cap);
    g.sd_ramp = opt_series("sd_ramp", cap);
    g.no_load = opt_series("no_load", 0.0);
    g.min_up = j.contains("min_up") ? as_int(j["min_up"], fmt_path(path, "min_up")) : 1;
    g.min_down = j.contains("min_down") ? as_int(j["min_down"], fmt_path(path, "min_down")) : 1;
    if (j.contains("max_up") && !j["max_up"].is_null() && !(j["max_up"].is_string() && j["max_up"] == "inf"))
        g.max_up = as_int(j["max_up"], fmt_path(path, "max_up"));
    g.mu_enforced = j.contains("mu_enforced") ? broadcast_flag(j["mu_enforced"], T, fmt_path(path, "mu_enforced")) : std::vector<int>(T, 1);
    g.md_enforced = j.contains("md_enforced") ? broadcast_flag(j["md_enforced"], T, fmt_path(path, "md_enforced")) : std::vector<int>(T, 1);

    const json &cs = req("cost_segments");
    std::string cpath = fmt_path(path, "cost_segments");
    if (!cs.is_array() || cs.empty()) fail(cpath, "expected a non-empty array");
    if (is_segment(cs[0])) {
        g.cost_segments.assign(T, parse_segment_list(cs, cpath));
    } else {
        if (static_cast<int>(cs.size()) != T) fail(cpath, "per-period segment lists must have length " + std::to_string(T));
        for (int t = 0; t < T; ++t) g.cost_segments.push_back(parse_segment_list(cs[t], cpath + "[" + std::to_string(t) + "]"));
    }

    std::string spath = fmt_path(path, "startup_states");
    if (!j.contains("startup_states")) {
        g.startup_states = {{"cold", 0.0, 1}};
    } else if (j["startup_states"].is_number()) {
        g.startup_states = {{"cold", as_number(j["startup_states"], spath), 1}};
    } else if (j["startup_states"].is_array() && !j["startup_states"].empty()) {
        const json &a = j["startup_states"];
        for (size_t i = 0; i < a.size(); ++i) {
            std::string p = spath + "[" + std::to_string(i) + "]";
            if (!a[i].is_object() || !a[i].contains("cost")) fail(p, "expected {state, cost, min_off}");
            StartupState s;
            s.name = a[i].contains("state") ? a[i]["state"].get<std::string>() : "s" + std::to_string(i);
            s.cost = as_number(a[i]["cost"], p + ".cost");
            s.min_off = a[i].contains("min_off") ? as_int(a[i]["min_off"], p + ".min_off") : 1;
            g.startup_states.push_back(s);
        }
    } else {
        fail(spath, "expected a number or a non-empty array");
    }

    std::string dpath = fmt_path(path, "shutdown_cost_fn");
    if (!j.contains("shutdown_cost_fn")) {
        g.shutdown_cost_fn = {{0, 0.0}};
    } else if (j["shutdown_cost_fn"].is_number()) {
        g.shutdown_cost_fn = {{0, as_number(j["shutdown_cost_fn"], dpath)}};
    } else if (j["shutdown_cost_fn"].is_array() && !j["shutdown_cost_fn"].empty()) {
        const json &a = j["shutdown_cost_fn"];
        for (size_t i = 0; i < a.size(); ++i) {
            std::string p = dpath + "[" + std::to_string(i) + "]";
            if (!a[i].is_object() || !a[i].contains("cost")) fail(p, "expected {min_duration, cost}");
            g.shutdown_cost_fn.push_back({a[i].contains("min_duration") ? as_int(a[i]["min_duration"], p + ".min_duration") : 0,
                                          as_number(a[i]["cost"], p + ".cost")});
        }
    } else {
        fail(dpath, "expected a number or a non-empty array");
    }

    if (j.contains("initial_on_duration")) g.initial_on_duration = as_int(j["initial_on_duration"], fmt_path(path, "initial_on_duration"));
    if (j.contains("initial_off_duration")) g.initial_off_duration = as_int(j["initial_off_duration"], fmt_path(path, "initial_off_duration"));
    return g;
}

json dump_generator(const GeneratorSpec &g)
{
    json j;
    j["id"] = g.id;
    if (!g.bus.empty()) j["bus"] = g.bus;
    j["p_min"] = dump_series(g.p_min);
    j["p_max"] = dump_series(g.p_max);
    j["ramp_up"] = dump_series(g.ramp_up);
    j["ramp_down"] = dump_series(g.ramp_down);
    j["su_ramp"] = dump_series(g.su_ramp);
    j["sd_ramp"] = dump_series(g.sd_ramp);
    j["min_up"] = g.min_up;
    j["min_down"] = g.min_down;
    if (g.max_up < kUnbounded) j["max_up"] = g.max_up;
    j["mu_enforced"] = dump_flags(g.mu_enforced);
    j["md_enforced"] = dump_flags(g.md_enforced);
    j["no_load"] = dump_series(g.no_load);
    bool same = std::all_of(g.cost_segments.begin(), g.cost_segments.end(), [&](auto &s) { return s == g.cost_segments[0]; });
    if (same) {
        j["cost_segments"] = dump_segments(g.cost_segments[0]);
    } else {
        json a = json::array();
        for (auto &s : g.cost_segments) a.push_back(dump_segments(s));
        j["cost_segments"] = a;
    }
    json ss = json::array();
    for (auto &s : g.startup_states) ss.push_back(json{{"state", s.name}, {"cost", s.cost}, {"min_off", s.min_off}});
    j["startup_states"] = ss;
    json sd = json::array();
    for (auto &s : g.shutdown_cost_fn) sd.push_back(json{{"min_duration", s.min_duration}, {"cost", s.cost}});
    j["shutdown_cost_fn"] = sd;
    j["initial_on_duration"] = g.initial_on_duration;
    j["initial_off_duration"] = g.initial_off_duration;
    return j;
}

} // namespace

const char *to_string(GeneratorClass c)
{
    switch (c) {
    case GeneratorClass::G1: return "G1";
    case GeneratorClass::G2: return "G2";
    case GeneratorClass::G3: return "G3";
    default: return "G4";
    }
}

int SystemInstance::bus_index(const std::string &id) const
{
    for (size_t b = 0; b < buses.size(); ++b)
        if (buses[b].id == id) return static_cast<int>(b);
    return -1;
}

SystemInstance parse_instance(const std::string &text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception &e) {
        throw DataError(std::string("malformed document: ") + e.what());
    }
    if (!j.is_object()) throw DataError("malformed document: top level must be an object");
    SystemInstance inst;
    if (j.contains("name")) inst.name = j["name"].get<std::string>();
    if (!j.contains("horizon")) fail("horizon", "missing required field");
    inst.horizon = as_int(j["horizon"], "horizon");
    if (inst.horizon < 1) fail("horizon", "must be at least 1");
    const int T = inst.horizon;
    if (!j.contains("demand")) fail("demand", "missing required field");
    inst.demand = broadcast(j["demand"], T, "demand");

    if (j.contains("buses")) {
        const json &b = j["buses"];
        if (!b.is_array() || b.empty()) fail("buses", "expected a non-empty array");
        for (size_t i = 0; i < b.size(); ++i) {
            std::string p = "buses[" + std::to_string(i) + "]";
            if (b[i].is_string()) {
                inst.buses.push_back({b[i].get<std::string>(), i == 0 ? 1.0 : 0.0});
            } else if (b[i].is_object() && b[i].contains("id")) {
                inst.buses.push_back({b[i]["id"].get<std::string>(),
                                      b[i].contains("load_share") ? as_number(b[i]["load_share"], p + ".load_share") : 0.0});
            } else {
                fail(p, "expected a bus id or {id, load_share}");
            }
        }
    } else {
        inst.buses.push_back({"b1", 1.0});
    }

    if (j.contains("lines")) {
        const json &l = j["lines"];
        if (!l.is_array()) fail("lines", "expected an array");
        for (size_t i = 0; i < l.size(); ++i) {
            std::string p = "lines[" + std::to_string(i) + "]";
            if (!l[i].is_object()) fail(p, "expected an object");
            Line line;
            line.id = l[i].contains("id") ? l[i]["id"].get<std::string>() : "l" + std::to_string(i + 1);
            if (!l[i].contains("shift_factors")) fail(p, "missing required field 'shift_factors'");
            if (!l[i].contains("limit")) fail(p, "missing required field 'limit'");
            for (size_t k = 0; k < l[i]["shift_factors"].size(); ++k)
                line.shift_factors.push_back(as_number(l[i]["shift_factors"][k], p + ".shift_factors[" + std::to_string(k) + "]"));
            line.limit = as_number(l[i]["limit"], p + ".limit");
            inst.lines.push_back(line);
        }
    }

    if (!j.contains("generators") || !j["generators"].is_array()) fail("generators", "missing required array");
    for (size_t i = 0; i < j["generators"].size(); ++i) {
        const json &gj = j["generators"][i];
        std::string p = "generators[" + std::to_string(i) + "]";
        if (gj.contains("horizon") && as_int(gj["horizon"], p + ".horizon") != T) fail(p + ".horizon", "inconsistent horizon");
        GeneratorSpec g = parse_generator(gj, T, p);
        if (g.bus.empty()) g.bus = inst.buses.front().id;
        inst.generators.push_back(std::move(g));
    }
    validate_instance(inst);
    return inst;
}

SystemInstance load_instance(const std::string &path)
{
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_instance(ss.str());
}

std::string serialize_instance(const SystemInstance &inst)
{
    json j;
    if (!inst.name.empty()) j["name"] = inst.name;
    j["horizon"] = inst.horizon;
    j["demand"] = inst.demand;
    json b = json::array();
    for (auto &bus : inst.buses) b.push_back(json{{"id", bus.id}, {"load_share", bus.load_share}});
    j["buses"] = b;
    json l = json::array();
    for (auto &line : inst.lines) l.push_back(json{{"id", line.id}, {"shift_factors", line.shift_factors}, {"limit", line.limit}});
    j["lines"] = l;
    json g = json::array();
    for (auto &gen : inst.generators) g.push_back(dump_generator(gen));
    j["generators"] = g;
    return j.dump(2) + "\n";
}

void validate_generator(const GeneratorSpec &g, const std::string &path)
{
    const int T = g.horizon();
    if (T < 1) fail(path, "empty horizon");
    auto len = [&](size_t n, const char *f) {
        if (static_cast<int>(n) != T) fail(fmt_path(path, f), "length does not match horizon");
    };
    len(g.p_min.size(), "p_min");
    len(g.ramp_up.size(), "ramp_up");
    len(g.ramp_down.size(), "ramp_down");
    len(g.su_ramp.size(), "su_ramp");
    len(g.sd_ramp.size(), "sd_ramp");
    len(g.no_load.size(), "no_load");
    len(g.mu_enforced.size(), "mu_enforced");
    len(g.md_enforced.size(), "md_enforced");
    len(g.cost_segments.size(), "cost_segments");
    for (int t = 1; t <= T; ++t) {
        std::string per = " in period " + std::to_string(t);
        std::string ix = "[" + std::to_string(t - 1) + "]";
        if (g.pmin(t) < 0) fail(fmt_path(path, "p_min") + ix, "negative" + per);
        if (g.pmin(t) > g.pmax(t)) fail(fmt_path(path, "p_min") + ix, "p_min > p_max" + per);
        if (g.pmax(t) <= 0) fail(fmt_path(path, "p_max") + ix, "must be positive" + per);
        if (g.rup(t) < 0 || g.rdown(t) < 0) fail(fmt_path(path, "ramp_up") + ix, "negative ramp" + per);
        if (g.surmp(t) < g.pmin(t)) fail(fmt_path(path, "su_ramp") + ix, "start-up ramp below p_min" + per);
        if (g.sdrmp(t) < g.pmin(t)) fail(fmt_path(path, "sd_ramp") + ix, "shut-down ramp below p_min" + per);
        const auto &s = g.segs(t);
        if (s.empty()) fail(fmt_path(path, "cost_segments") + ix, "no segments" + per);
        for (size_t k = 1; k < s.size(); ++k)
            if (!(s[k].slope > s[k - 1].slope)) fail(fmt_path(path, "cost_segments") + ix, "slopes must be strictly increasing" + per);
    }
    if (g.min_up < 1) fail(fmt_path(path, "min_up"), "must be >= 1");
    if (g.min_down < 1) fail(fmt_path(path, "min_down"), "must be >= 1");
    if (g.max_up < g.min_up) fail(fmt_path(path, "max_up"), "must be >= min_up");
    if (g.startup_states.empty()) fail(fmt_path(path, "startup_states"), "empty");
    for (size_t s = 0; s < g.startup_states.size(); ++s) {
        const auto &st = g.startup_states[s];
        std::string p = fmt_path(path, "startup_states") + "[" + std::to_string(s) + "]";
        if (st.cost < 0) fail(p, "negative cost");
        if (st.min_off < 1) fail(p, "min_off must be >= 1");
        if (s > 0 && st.min_off <= g.startup_states[s - 1].min_off) fail(p, "min_off must be strictly increasing");
        if (s > 0 && st.cost < g.startup_states[s - 1].cost) fail(p, "start-up cost must be non-decreasing in down-time");
    }
    if (g.shutdown_cost_fn.empty()) fail(fmt_path(path, "shutdown_cost_fn"), "empty");
    for (size_t s = 0; s < g.shutdown_cost_fn.size(); ++s) {
        std::string p = fmt_path(path, "shutdown_cost_fn") + "[" + std::to_string(s) + "]";
        if (g.shutdown_cost_fn[s].cost < 0) fail(p, "negative cost");
        if (s > 0 && g.shutdown_cost_fn[s].min_duration <= g.shutdown_cost_fn[s - 1].min_duration)
            fail(p, "min_duration must be strictly increasing");
    }
    if (g.initial_on_duration < 0 || g.initial_off_duration < 0) fail(fmt_path(path, "initial_on_duration"), "negative");
    if (g.initial_on_duration > 0 && g.initial_off_duration > 0)
        fail(fmt_path(path, "initial_on_duration"), "unit cannot be initially on and initially off");
    if (g.initial_on_duration > g.max_up) fail(fmt_path(path, "initial_on_duration"), "already exceeds max_up");
}

void validate_instance(const SystemInstance &inst)
{
    const int T = inst.horizon;
    if (static_cast<int>(inst.demand.size()) != T) fail("demand", "length does not match horizon");
    if (inst.buses.empty()) fail("buses", "empty");
    double share = 0;
    for (size_t b = 0; b < inst.buses.size(); ++b) {
        if (inst.buses[b].load_share < 0) fail("buses[" + std::to_string(b) + "].load_share", "negative");
        share += inst.buses[b].load_share;
        for (size_t c = 0; c < b; ++c)
            if (inst.buses[c].id == inst.buses[b].id) fail("buses[" + std::to_string(b) + "]", "duplicate bus id");
    }
    if (std::abs(share - 1.0) > 1e-9) fail("buses", "load shares must sum to 1");
    for (size_t l = 0; l < inst.lines.size(); ++l) {
        std::string p = "lines[" + std::to_string(l) + "]";
        if (inst.lines[l].shift_factors.size() != inst.buses.size()) fail(p + ".shift_factors", "row width must equal bus count");
        if (inst.lines[l].limit < 0) fail(p + ".limit", "negative");
    }
    for (size_t i = 0; i < inst.generators.size(); ++i) {
        const auto &g = inst.generators[i];
        std::string p = "generators[" + std::to_string(i) + "]";
        if (g.horizon() != T) fail(p, "inconsistent horizon");
        validate_generator(g, p);
        if (inst.bus_index(g.bus) < 0) fail(p + ".bus", "unknown bus '" + g.bus + "'");
        for (size_t k = 0; k < i; ++k)
            if (inst.generators[k].id == g.id) fail(p + ".id", "duplicate generator id");
    }
}

GeneratorClass classify(const GeneratorSpec &g)
{
    auto invariant = [](const auto &v) { return std::all_of(v.begin(), v.end(), [&](const auto &x) { return x == v[0]; }); };
    bool ok = invariant(g.p_min) && invariant(g.p_max) && invariant(g.ramp_up) && invariant(g.ramp_down) &&
              invariant(g.su_ramp) && invariant(g.sd_ramp) && invariant(g.no_load) && invariant(g.cost_segments);
    ok = ok && g.startup_states.size() == 1 && g.constant_shutdown();
    ok = ok && std::all_of(g.mu_enforced.begin(), g.mu_enforced.end(), [](int f) { return f == 1; });
    ok = ok && std::all_of(g.md_enforced.begin(), g.md_enforced.end(), [](int f) { return f == 1; });
    if (!ok) return GeneratorClass::G4;
    double gap = g.p_max[0] - g.p_min[0];
    if (g.ramp_up[0] < gap || g.ramp_down[0] < gap || g.sd_ramp[0] < g.p_max[0]) return GeneratorClass::G4;
    if (g.max_up < kUnbounded) return GeneratorClass::G3;
    return g.su_ramp[0] >= g.p_max[0] ? GeneratorClass::G1 : GeneratorClass::G2;
}

double startup_cost_at(const GeneratorSpec &g, int down_time, std::optional<int> min_down)
{
    int floor_ = min_down ? *min_down : g.min_down;
    if (down_time < floor_ || down_time < 1)
        throw std::invalid_argument("down_time " + std::to_string(down_time) + " below min-down " + std::to_string(floor_));
    double c = g.startup_states.front().cost;
    for (const auto &s : g.startup_states)
        if (down_time >= s.min_off) c = s.cost;
    return c;
}

double shutdown_cost_at(const GeneratorSpec &g, int up_duration)
{
    double c = g.shutdown_cost_fn.front().cost;
    for (const auto &s : g.shutdown_cost_fn)
        if (up_duration >= s.min_duration) c = s.cost;
    return c;
}

int initial_lock(const GeneratorSpec &g) { return std::max(g.min_up - g.initial_on_duration, 0); }

GeneratorSpec make_simple_generator(const std::string &id, int T, double pmin, double pmax, double slope)
{
    GeneratorSpec g;
    g.id = id;
    g.bus = "b1";
    g.p_min.assign(T, pmin);
    g.p_max.assign(T, pmax);
    g.ramp_up.assign(T, pmax);
    g.ramp_down.assign(T, pmax);
    g.su_ramp.assign(T, pmax);
    g.sd_ramp.assign(T, pmax);
    g.mu_enforced.assign(T, 1);
    g.md_enforced.assign(T, 1);
    g.no_load.assign(T, 0.0);
    g.cost_segments.assign(T, {Segment{slope, 0.0}});
    g.startup_states = {{"cold", 0.0, 1}};
    g.shutdown_cost_fn = {{0, 0.0}};
    return g;
}

} // namespace chp
