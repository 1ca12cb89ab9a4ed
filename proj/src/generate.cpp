#include "chp/generate.hpp"

#include <algorithm>
#include <cmath>

#include "chp/oracle.hpp"

namespace chp {

ClassMix default_mix(int n)
{
    ClassMix m;
    m.g4 = std::max(1, static_cast<int>(std::lround(0.41 * n)));
    m.g3 = static_cast<int>(std::lround(0.08 * n));
    m.g2 = n >= 20 ? static_cast<int>(std::lround(0.01 * n)) : 0;
    m.g1 = std::max(0, n - m.g4 - m.g3 - m.g2);
    return m;
}

namespace {

double r1(double v) { return std::round(v * 10.0) / 10.0; }

struct Rng {
    std::mt19937_64 &eng;
    double uni(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng); }
    int pick(int a, int b) { return std::uniform_int_distribution<int>(a, b)(eng); }
    bool coin(double p = 0.5) { return uni(0.0, 1.0) < p; }
};

GeneratorSpec base_generator(Rng &r, const std::string &id, int T)
{
    double pmax = std::round(r.uni(50, 200));
    double pmin = std::round(pmax * r.uni(0.2, 0.5));
    GeneratorSpec g = make_simple_generator(id, T, pmin, pmax, 0.0);
    int nseg = r.pick(1, 3);
    std::vector<Segment> segs;
    double a = r1(r.uni(10, 30)), b = r1(r.uni(0, 200));
    double bp = pmin;
    for (int j = 0; j < nseg; ++j) {
        if (j > 0) {
            double da = r1(r.uni(1, 10));
            bp += (pmax - bp) * r.uni(0.2, 0.6);
            a += da;
            b = r1(b - da * bp);
        }
        segs.push_back({a, b});
    }
    g.cost_segments.assign(T, segs);
    g.no_load.assign(T, r1(r.uni(0, 100)));
    g.min_up = std::min(r.pick(1, 3), T);
    g.min_down = std::min(r.pick(1, 3), T);
    g.startup_states = {{"cold", r1(r.uni(0, 500)), 1}};
    g.shutdown_cost_fn = {{0, r1(r.uni(0, 50))}};
    switch (r.pick(0, 2)) {
    case 0: g.initial_on_duration = r.pick(1, 4); break;
    case 1: g.initial_off_duration = r.pick(1, 4); break;
    default: break;
    }
    return g;
}

void make_su_limited(Rng &r, GeneratorSpec &g)
{
    double pmin = g.p_min[0], pmax = g.p_max[0];
    double su = std::round(pmin + (pmax - pmin) * r.uni(0.0, 0.8));
    g.su_ramp.assign(g.horizon(), std::min(su, pmax - 1));
}

void add_g4_features(Rng &r, GeneratorSpec &g)
{
    const int T = g.horizon();
    bool any = false;
    while (!any) {
        double pmin = g.p_min[0], pmax = g.p_max[0];
        if (r.coin(0.4)) { // ramp limited
            double ru = std::max(1.0, std::round((pmax - pmin) * r.uni(0.2, 0.8)));
            g.ramp_up.assign(T, ru);
            g.ramp_down.assign(T, r.coin() ? ru : std::max(1.0, std::round((pmax - pmin) * r.uni(0.2, 0.9))));
            any = true;
        }
        if (r.coin(0.4)) {
            g.sd_ramp.assign(T, std::round(pmin + (pmax - pmin) * r.uni(0.0, 0.8)));
            any = true;
        }
        if (r.coin(0.3)) make_su_limited(r, g);
        if (r.coin(0.3)) { // time-varying capacity
            for (int t = 0; t < T; ++t) g.p_max[t] = std::max(pmin + 1, std::round(pmax * r.uni(0.85, 1.0)));
            for (int t = 0; t < T; ++t) g.su_ramp[t] = std::min(g.su_ramp[t], g.p_max[t]);
            for (int t = 0; t < T; ++t) g.sd_ramp[t] = std::min(g.sd_ramp[t], g.p_max[t]);
            any = true;
        }
        if (r.coin(0.4)) { // hot/warm/cold
            double hot = r1(r.uni(0, 200));
            int l = g.min_down;
            g.startup_states = {{"hot", hot, 1}, {"warm", r1(hot + r.uni(0, 150)), l + r.pick(1, 2)}};
            if (r.coin()) g.startup_states.push_back({"cold", r1(g.startup_states[1].cost + r.uni(0, 150)), g.startup_states[1].min_off + r.pick(1, 2)});
            any = true;
        }
        if (r.coin(0.25) && (g.min_up > 1 || g.min_down > 1)) { // relaxed min-up/down periods
            for (int t = 0; t < T; ++t) {
                if (r.coin(0.3)) g.mu_enforced[t] = 0;
                if (r.coin(0.3)) g.md_enforced[t] = 0;
            }
            any = true;
        }
        if (r.coin(0.2)) {
            double s = g.shutdown_cost_fn[0].cost;
            g.shutdown_cost_fn = {{0, r1(s + r.uni(10, 60))}, {r.pick(2, 3), s}};
            any = true;
        }
        if (r.coin(0.2)) {
            g.no_load.assign(T, 0);
            for (int t = 0; t < T; ++t) g.no_load[t] = r1(r.uni(0, 100));
            any = true;
        }
    }
}

Line random_line(Rng &r, const std::string &id, int nb)
{
    Line l;
    l.id = id;
    l.shift_factors.assign(nb, 0.0);
    for (int b = 1; b < nb; ++b) l.shift_factors[b] = std::round(r.uni(-0.6, 0.6) * 100.0) / 100.0;
    return l;
}

} // namespace

GeneratorSpec random_generator(std::mt19937_64 &rng, const std::string &id, int T, GeneratorClass cls)
{
    Rng r{rng};
    for (;;) {
        GeneratorSpec g = base_generator(r, id, T);
        switch (cls) {
        case GeneratorClass::G1: break;
        case GeneratorClass::G2: make_su_limited(r, g); break;
        case GeneratorClass::G3:
            if (r.coin()) make_su_limited(r, g);
            g.max_up = r.pick(std::max(g.min_up, 2), std::max(T, g.min_up + 1));
            g.initial_on_duration = std::min(g.initial_on_duration, g.max_up);
            break;
        case GeneratorClass::G4:
            add_g4_features(r, g);
            if (r.coin(0.2)) {
                g.max_up = r.pick(std::max(g.min_up, 2), std::max(T, g.min_up + 1));
                g.initial_on_duration = std::min(g.initial_on_duration, g.max_up);
            }
            break;
        }
        if (classify(g) != cls) continue;
        validate_generator(g, id);
        return g;
    }
}

SystemInstance random_instance(std::uint64_t seed, const InstanceOptions &opt)
{
    std::mt19937_64 rng(seed);
    Rng r{rng};
    SystemInstance inst;
    inst.name = opt.name;
    inst.horizon = opt.horizon;
    const int T = opt.horizon;
    const int nb = std::max(1, opt.buses);
    for (int b = 0; b < nb; ++b) inst.buses.push_back({"b" + std::to_string(b + 1), 0.0});
    double share_left = 1.0;
    for (int b = 0; b < nb; ++b) {
        double s = b + 1 == nb ? share_left : std::round(share_left * r.uni(0.2, 0.7) * 100.0) / 100.0;
        inst.buses[b].load_share = s;
        share_left -= s;
    }
    double sum = 0;
    for (int b = 0; b + 1 < nb; ++b) sum += inst.buses[b].load_share;
    inst.buses.back().load_share = 1.0 - sum;

    int n = 0;
    auto add = [&](GeneratorClass c, int count) {
        for (int k = 0; k < count; ++k) {
            GeneratorSpec g = random_generator(rng, "G" + std::to_string(++n), T, c);
            g.bus = inst.buses[r.pick(0, nb - 1)].id;
            inst.generators.push_back(std::move(g));
        }
    };
    add(GeneratorClass::G1, opt.mix.g1);
    add(GeneratorClass::G2, opt.mix.g2);
    add(GeneratorClass::G3, opt.mix.g3);
    add(GeneratorClass::G4, opt.mix.g4);

    // One self-schedule per unit defines a feasible demand. Each unit sees its own price path,
    // so no single uniform price supports the resulting commitment.
    std::vector<double> price(T);
    double level = r.uni(20, 45);
    for (int t = 0; t < T; ++t) price[t] = r1(level + r.uni(-8, 12));
    inst.demand.assign(T, 0.0);
    std::vector<std::vector<double>> inj(nb, std::vector<double>(T, 0.0));
    for (auto &g : inst.generators) {
        std::vector<double> own(T);
        for (int t = 0; t < T; ++t) own[t] = r1(price[t] + r.uni(-15, 15));
        ScheduleValue sv = dp_self_schedule(g, own);
        int b = inst.bus_index(g.bus);
        for (int t = 0; t < T; ++t) {
            // Integer limits give integer vertex dispatch; strip solver noise only.
            double x = std::round(sv.schedule.x[t] * 1e6) / 1e6;
            inst.demand[t] += x;
            inj[b][t] += x;
        }
    }
    for (int t = 0; t < T; ++t) inst.demand[t] = std::round(inst.demand[t] * 1e6) / 1e6;

    for (int l = 0; l < opt.lines && nb > 1; ++l) {
        Line ln = random_line(r, "L" + std::to_string(l + 1), nb);
        double peak = 0.0;
        for (int t = 0; t < T; ++t) {
            double f = 0.0;
            for (int b = 0; b < nb; ++b) f += ln.shift_factors[b] * (inj[b][t] - inst.buses[b].load_share * inst.demand[t]);
            peak = std::max(peak, std::abs(f));
        }
        ln.limit = std::round(peak * r.uni(1.0, 1.3) + 5.0);
        inst.lines.push_back(std::move(ln));
    }
    validate_instance(inst);
    return inst;
}

} // namespace chp
