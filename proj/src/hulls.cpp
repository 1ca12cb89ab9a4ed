#include "chp/hulls.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace chp {

const char *to_string(Formulation f)
{
    switch (f) {
    case Formulation::ThreeBin: return "3bin";
    case Formulation::D1: return "D1";
    case Formulation::D2: return "D2";
    case Formulation::D3: return "D3";
    case Formulation::D4: return "D4";
    }
    return "?";
}

namespace {

std::string idx(const std::string &sym, int a) { return sym + "[" + std::to_string(a) + "]"; }
std::string idx(const std::string &sym, int a, int b)
{
    return sym + "[" + std::to_string(a) + "][" + std::to_string(b) + "]";
}

// Status before period 1, extended backwards so that the window rows can be written uniformly.
struct History {
    bool on = false;
    int s0 = 0;
    int d0 = kUnbounded;

    explicit History(const GeneratorSpec &g) : on(g.initially_on()), s0(g.initial_on_duration), d0(g.off_history()) {}

    double u(int j) const
    {
        if (on) return j >= 1 - s0 ? 1.0 : 0.0;
        if (d0 >= kUnbounded) return 0.0;
        return j < 1 - d0 ? 1.0 : 0.0;
    }
    double v(int j) const { return on && j == 1 - s0 ? 1.0 : 0.0; }
    double e(int j) const { return !on && d0 < kUnbounded && j == 1 - d0 ? 1.0 : 0.0; }
};

// Skips rows without variables; those only involve history constants.
void add_row(LinearModel &m, const LinExpr &expr, Sense s, double rhs, const std::string &tag)
{
    LinExpr e = expr;
    e.compact();
    if (e.terms.empty()) return;
    m.add_constraint(e, s, rhs, tag);
}

struct Families {
    bool strampup = false;
    bool maxup = false;
    bool ramps = false;
    bool delta = false;
    bool linking = false;
};

FormulationHandle build_status_model(LinearModel &m, const GeneratorSpec &g, const std::string &prefix, Formulation kind,
                                     Families fam, bool binary)
{
    if (!g.constant_shutdown())
        throw ModelError(g.id + ": duration-dependent shut-down cost needs the interval formulation");
    const int T = g.horizon();
    const History hist(g);
    const VarKind vk = binary ? VarKind::binary : VarKind::continuous;

    FormulationHandle h;
    h.kind = kind;
    h.gen_id = g.id;
    h.prefix = prefix;
    std::vector<int> xv(T + 1), uv(T + 1), vv(T + 1), ev(T + 1), fv(T + 1);
    auto var = [&](const std::string &name, double lo, double hi, VarKind k) {
        int j = m.add_variable(prefix + name, lo, hi, k);
        h.vars[name] = j;
        return j;
    };
    for (int t = 1; t <= T; ++t) {
        uv[t] = var(idx("u", t), 0, 1, vk);
        vv[t] = var(idx("v", t), 0, t == 1 && hist.on ? 0 : 1, vk);
        ev[t] = var(idx("e", t), 0, t == 1 && !hist.on ? 0 : 1, vk);
        xv[t] = var(idx("x", t), 0, g.pmax(t), VarKind::continuous);
        fv[t] = var(idx("f", t), -kInf, kInf, VarKind::continuous);
        h.status_vars.insert(h.status_vars.end(), {uv[t], vv[t], ev[t]});
    }
    auto U = [&](int j) { return j >= 1 ? LinExpr().add(uv[j], 1.0) : LinExpr(hist.u(j)); };
    auto V = [&](int j) { return j >= 1 ? LinExpr().add(vv[j], 1.0) : LinExpr(hist.v(j)); };
    auto E = [&](int j) { return j >= 1 ? LinExpr().add(ev[j], 1.0) : LinExpr(hist.e(j)); };
    auto tag = [&](const std::string &fam_name, int t) { return prefix + idx(fam_name, t); };

    for (int t = 1; t <= T; ++t) {
        LinExpr r = U(t);
        r.add(U(t - 1), -1.0).add(V(t), -1.0).add(E(t), 1.0);
        add_row(m, r, Sense::eq, 0.0, tag("logic", t));
    }

    const int L = g.min_up, l = g.min_down;
    for (int t = 1; t <= T; ++t) {
        LinExpr r;
        for (int j = t - L + 1; j <= t; ++j) {
            double kappa = j >= 1 ? g.mu_enforced[j - 1] : 1.0;
            if (kappa != 0.0) r.add(V(j), kappa);
        }
        r.add(U(t), -1.0);
        r.compact();
        if (r.terms.size() == 1 && r.constant == 0.0) continue; // -u <= 0 is a bound
        add_row(m, r, Sense::le, 0.0, tag("minup", t));
    }
    // Window rows also for tau <= 0 where history says the unit was on.
    for (int tau = std::min(0, 1 - l); tau <= T - 1; ++tau) {
        if (tau <= 0 && hist.u(tau) == 0.0) continue;
        LinExpr r;
        for (int j = std::max(tau + 1, 1); j <= std::min(tau + l, T); ++j)
            if (g.md_enforced[j - 1]) r.add(V(j), 1.0);
        if (r.terms.empty()) continue;
        r.add(U(tau), 1.0);
        add_row(m, r, Sense::le, 1.0, tag("mindown", tau));
    }

    for (int t = 1; t <= T; ++t) {
        add_row(m, LinExpr().add(xv[t], 1.0).add(uv[t], -g.pmin(t)), Sense::ge, 0.0, tag("caplo", t));
        add_row(m, LinExpr().add(xv[t], 1.0).add(uv[t], -g.pmax(t)), Sense::le, 0.0, tag("caphi", t));
        const auto &sg = g.segs(t);
        for (size_t j = 0; j < sg.size(); ++j)
            add_row(m, LinExpr().add(fv[t], 1.0).add(xv[t], -sg[j].slope).add(uv[t], -sg[j].intercept), Sense::ge, 0.0,
                    prefix + idx("cost", t, static_cast<int>(j)));
    }

    if (fam.strampup)
        for (int t = 1; t <= T; ++t) {
            if (g.surmp(t) >= g.pmax(t) || (t == 1 && hist.on)) continue;
            add_row(m, LinExpr().add(xv[t], 1.0).add(uv[t], -g.pmax(t)).add(vv[t], g.pmax(t) - g.surmp(t)), Sense::le, 0.0,
                    tag("strampup", t));
            // With several cost segments the facet alone leaves the cost epigraph loose: output in a start-up
            // period is capped at the start-up ramp, and the convex cost must be charged on each part separately.
            const auto &sg = g.segs(t);
            if (sg.size() < 2) continue;
            int xs = var(idx("xs", t), 0, g.surmp(t), VarKind::continuous);
            int fs = var(idx("fs", t), -kInf, kInf, VarKind::continuous);
            const double lo = std::min(g.pmin(t), g.surmp(t));
            add_row(m, LinExpr().add(xs, 1.0).add(vv[t], -lo), Sense::ge, 0.0, tag("splo", t));
            add_row(m, LinExpr().add(xs, 1.0).add(vv[t], -g.surmp(t)), Sense::le, 0.0, tag("sphi", t));
            add_row(m, LinExpr().add(xv[t], 1.0).add(xs, -1.0).add(uv[t], -g.pmin(t)).add(vv[t], g.pmin(t)), Sense::ge, 0.0,
                    tag("rnlo", t));
            add_row(m, LinExpr().add(xv[t], 1.0).add(xs, -1.0).add(uv[t], -g.pmax(t)).add(vv[t], g.pmax(t)), Sense::le, 0.0,
                    tag("rnhi", t));
            for (size_t j = 0; j < sg.size(); ++j) {
                add_row(m, LinExpr().add(fs, 1.0).add(xs, -sg[j].slope).add(vv[t], -sg[j].intercept), Sense::ge, 0.0,
                        prefix + idx("spcost", t, static_cast<int>(j)));
                add_row(m,
                        LinExpr()
                            .add(fv[t], 1.0)
                            .add(fs, -1.0)
                            .add(xv[t], -sg[j].slope)
                            .add(xs, sg[j].slope)
                            .add(uv[t], -sg[j].intercept)
                            .add(vv[t], sg[j].intercept),
                        Sense::ge, 0.0, prefix + idx("rncost", t, static_cast<int>(j)));
            }
        }

    if (fam.maxup && g.max_up < kUnbounded)
        for (int t = 1; t <= T; ++t) {
            LinExpr r;
            for (int j = t - g.max_up + 1; j <= t; ++j) r.add(V(j), 1.0);
            r.add(U(t), -1.0);
            r.compact();
            if (r.constant >= 1.0) continue;
            add_row(m, r, Sense::ge, 0.0, tag("maxup", t));
        }

    if (fam.ramps)
        for (int t = 1; t <= T; ++t) {
            if (t == 1) {
                if (!hist.on)
                    add_row(m, LinExpr().add(xv[1], 1.0).add(vv[1], -g.surmp(1)), Sense::le, 0.0, tag("rampup", 1));
                continue;
            }
            add_row(m, LinExpr().add(xv[t], 1.0).add(xv[t - 1], -1.0).add(uv[t - 1], -g.rup(t)).add(vv[t], -g.surmp(t)),
                    Sense::le, 0.0, tag("rampup", t));
            add_row(m,
                    LinExpr().add(xv[t - 1], 1.0).add(xv[t], -1.0).add(uv[t], -g.rdown(t)).add(ev[t], -g.sdrmp(t - 1)),
                    Sense::le, 0.0, tag("rampdn", t));
        }

    if (fam.linking)
        for (int t = 1; t <= T; ++t) {
            add_row(m, LinExpr(V(t)).add(U(t), -1.0), Sense::le, 0.0, tag("vu", t));
            add_row(m, LinExpr(E(t)).add(U(t), 1.0), Sense::le, 1.0, tag("eu", t));
            add_row(m, LinExpr(V(t)).add(U(t - 1), 1.0), Sense::le, 1.0, tag("vuprev", t));
            add_row(m, LinExpr(E(t)).add(U(t - 1), -1.0), Sense::le, 0.0, tag("euprev", t));
        }

    LinExpr cost;
    const double S = g.shutdown_cost_fn.empty() ? 0.0 : g.shutdown_cost_fn.front().cost;
    const auto &st = g.startup_states;
    if (fam.delta && st.size() > 1) {
        for (int t = 1; t <= T; ++t) {
            LinExpr sum;
            for (size_t s = 0; s < st.size(); ++s) {
                int d = var(idx("delta", t, static_cast<int>(s)), 0, 1, VarKind::continuous);
                sum.add(d, 1.0);
                cost.add(d, st[s].cost);
                if (s + 1 == st.size()) continue;
                int lo = s == 0 ? 1 : st[s].min_off;
                int hi = st[s + 1].min_off - 1;
                LinExpr r;
                r.add(d, 1.0);
                for (int j = lo; j <= hi; ++j) r.add(E(t - j), -1.0);
                add_row(m, r, Sense::le, 0.0, prefix + idx("delta", t, static_cast<int>(s)));
            }
            sum.add(vv[t], -1.0);
            add_row(m, sum, Sense::eq, 0.0, tag("deltasum", t));
        }
    } else {
        for (int t = 1; t <= T; ++t) cost.add(vv[t], st.empty() ? 0.0 : st.front().cost);
    }

    for (int t = 1; t <= T; ++t) {
        cost.add(ev[t], S).add(uv[t], g.noload(t)).add(fv[t], 1.0);
        h.x.push_back(LinExpr().add(xv[t], 1.0));
        h.u.push_back(LinExpr().add(uv[t], 1.0));
        h.v.push_back(LinExpr().add(vv[t], 1.0));
        h.e.push_back(LinExpr().add(ev[t], 1.0));
        h.energy.push_back(LinExpr().add(fv[t], 1.0).add(uv[t], g.noload(t)));
    }
    h.cost = cost.compact();
    return h;
}

void require_class(const GeneratorSpec &g, std::initializer_list<GeneratorClass> ok, Formulation f)
{
    GeneratorClass c = classify(g);
    if (std::find(ok.begin(), ok.end(), c) == ok.end())
        throw ModelError(g.id + ": class " + to_string(c) + " does not admit " + to_string(f));
}

} // namespace

IntervalIndexSets build_index_sets(const GeneratorSpec &g)
{
    IntervalIndexSets s;
    const int T = g.horizon();
    const int Lbar = g.max_up;
    s.initially_on = g.initially_on();
    std::set<int> down, up;
    if (s.initially_on) {
        s.t0 = std::min(initial_lock(g), T);
        int kmax = Lbar >= kUnbounded ? T : std::min(Lbar - g.initial_on_duration, T);
        for (int k = s.t0; k <= kmax; ++k) {
            s.Kbar.push_back(k);
            if (k >= 1) s.TK1.emplace_back(1, k);
            if (k < T) down.insert(k);
        }
    } else {
        // Off before period 1: a single w_0 feeds the OFF node 0, whose down-time counts from the history.
        s.Kbar.push_back(0);
        down.insert(0);
    }
    const int d0 = g.off_history();
    // Up nodes spawn down nodes at k >= t, down nodes spawn up nodes at t >= k+2, so one sweep in time suffices.
    for (int tau = 0; tau <= T; ++tau) {
        if (up.count(tau)) {
            int t = tau;
            int hi = Lbar >= kUnbounded ? T : std::min(t + Lbar - 1, T);
            for (int k = std::min(t + g.L_at(t) - 1, T); k <= hi; ++k) {
                s.TK2.emplace_back(t, k);
                if (k < T) down.insert(k);
            }
        }
        if (down.count(tau)) {
            int k = tau;
            for (int t = k + 1; t <= T; ++t) {
                long gap = (!s.initially_on && k == 0) ? static_cast<long>(t) + d0 - 1 : t - k - 1;
                if (gap >= g.l_at(t)) {
                    s.KT.emplace_back(k, t);
                    up.insert(t);
                }
            }
        }
    }
    s.theta_domain.assign(down.begin(), down.end());
    s.restarts.assign(up.begin(), up.end());
    return s;
}

FormulationHandle build_3bin(LinearModel &m, const GeneratorSpec &g, const std::string &prefix, BuildFlags flags)
{
    Families fam{.strampup = flags.strengthen, .maxup = true, .ramps = true, .delta = true, .linking = true};
    return build_status_model(m, g, prefix, Formulation::ThreeBin, fam, flags.binary);
}

FormulationHandle build_hull_D1(LinearModel &m, const GeneratorSpec &g, const std::string &prefix, BuildFlags flags)
{
    require_class(g, {GeneratorClass::G1}, Formulation::D1);
    return build_status_model(m, g, prefix, Formulation::D1, {}, flags.binary);
}

FormulationHandle build_hull_D2(LinearModel &m, const GeneratorSpec &g, const std::string &prefix, BuildFlags flags)
{
    require_class(g, {GeneratorClass::G2}, Formulation::D2);
    return build_status_model(m, g, prefix, Formulation::D2, {.strampup = !flags.drop_strampup}, flags.binary);
}

FormulationHandle build_hull_D3(LinearModel &m, const GeneratorSpec &g, const std::string &prefix, BuildFlags flags)
{
    Families fam{.strampup = !flags.drop_strampup, .maxup = true};
    if (classify(g) == GeneratorClass::G4) fam.ramps = fam.delta = fam.linking = true;
    return build_status_model(m, g, prefix, Formulation::D3, fam, flags.binary);
}

FormulationHandle build_hull_D4(LinearModel &m, const GeneratorSpec &g, const std::string &prefix, BuildFlags flags)
{
    const int T = g.horizon();
    const IntervalIndexSets S = build_index_sets(g);
    const VarKind vk = flags.binary ? VarKind::binary : VarKind::continuous;
    const bool on = S.initially_on;

    FormulationHandle h;
    h.kind = Formulation::D4;
    h.gen_id = g.id;
    h.prefix = prefix;
    h.x.assign(T, {});
    h.u.assign(T, {});
    h.v.assign(T, {});
    h.e.assign(T, {});
    h.energy.assign(T, {});
    auto var = [&](const std::string &name, double lo, double hi, VarKind k) {
        int j = m.add_variable(prefix + name, lo, hi, k);
        h.vars[name] = j;
        return j;
    };
    std::map<int, LinExpr> down_in, down_out, up_in, up_out;
    LinExpr cost;

    // One ON interval [a,b] weighted by lam; first marks a TK1 interval (no start-up ramp).
    auto add_interval = [&](int a, int b, int lam, bool first) {
        const std::string key = idx(first ? "w" : "y", a, b);
        std::vector<int> q(T + 1), phi(T + 1);
        for (int s = a; s <= b; ++s) {
            q[s] = var(idx("q" + key, s), 0, g.pmax(s), VarKind::continuous);
            phi[s] = var(idx("phi" + key, s), -kInf, kInf, VarKind::continuous);
            auto tg = [&](const std::string &f) { return prefix + f + key + "[" + std::to_string(s) + "]"; };
            add_row(m, LinExpr().add(q[s], 1.0).add(lam, -g.pmin(s)), Sense::ge, 0.0, tg("lo"));
            add_row(m, LinExpr().add(q[s], 1.0).add(lam, -g.pmax(s)), Sense::le, 0.0, tg("hi"));
            if (s == a && !first && g.surmp(s) < g.pmax(s))
                add_row(m, LinExpr().add(q[s], 1.0).add(lam, -g.surmp(s)), Sense::le, 0.0, tg("su"));
            if (s == b && b < T && g.sdrmp(s) < g.pmax(s))
                add_row(m, LinExpr().add(q[s], 1.0).add(lam, -g.sdrmp(s)), Sense::le, 0.0, tg("sd"));
            if (s > a) {
                if (g.rup(s) < g.pmax(s) - g.pmin(s - 1))
                    add_row(m, LinExpr().add(q[s], 1.0).add(q[s - 1], -1.0).add(lam, -g.rup(s)), Sense::le, 0.0, tg("ru"));
                if (g.rdown(s) < g.pmax(s - 1) - g.pmin(s))
                    add_row(m, LinExpr().add(q[s - 1], 1.0).add(q[s], -1.0).add(lam, -g.rdown(s)), Sense::le, 0.0, tg("rd"));
            }
            const auto &sg = g.segs(s);
            for (size_t j = 0; j < sg.size(); ++j)
                add_row(m, LinExpr().add(phi[s], 1.0).add(q[s], -sg[j].slope).add(lam, -(sg[j].intercept + g.noload(s))),
                        Sense::ge, 0.0, tg("c" + std::to_string(j)));
            h.x[s - 1].add(q[s], 1.0);
            h.u[s - 1].add(lam, 1.0);
            h.energy[s - 1].add(phi[s], 1.0);
            cost.add(phi[s], 1.0);
        }
    };

    LinExpr wsum;
    for (int k : S.Kbar) {
        int w = var(idx("w", k), 0, 1, vk);
        h.status_vars.push_back(w);
        wsum.add(w, 1.0);
        if (k < T) {
            if (on) cost.add(w, shutdown_cost_at(g, k + g.initial_on_duration));
            down_in[k].add(w, 1.0);
        }
        if (k >= 1) add_interval(1, k, w, true);
    }
    add_row(m, wsum, Sense::eq, 1.0, prefix + "wsum");
    for (auto [t, k] : S.TK2) {
        int y = var(idx("y", t, k), 0, 1, vk);
        h.status_vars.push_back(y);
        if (k < T) {
            cost.add(y, shutdown_cost_at(g, k - t + 1));
            down_in[k].add(y, 1.0);
        }
        up_out[t].add(y, 1.0);
        add_interval(t, k, y, false);
    }
    const int d0 = g.off_history();
    for (auto [k, t] : S.KT) {
        int z = var(idx("z", k, t), 0, 1, vk);
        h.status_vars.push_back(z);
        bool virt = !on && k == 0;
        long gap = virt ? static_cast<long>(t) + d0 - 1 : t - k - 1;
        cost.add(z, startup_cost_at(g, static_cast<int>(std::min<long>(gap, kUnbounded)), 1));
        down_out[k].add(z, 1.0);
        up_in[t].add(z, 1.0);
        h.v[t - 1].add(z, 1.0);
    }
    for (int k : S.theta_domain) {
        int th = var(idx("theta", k), 0, 1, vk);
        h.status_vars.push_back(th);
        down_out[k].add(th, 1.0);
        LinExpr r = down_out[k];
        r.add(down_in[k], -1.0);
        bool virt = !on && k == 0;
        add_row(m, r, Sense::eq, 0.0, prefix + idx("down", k));
        if (!virt && k + 1 <= T) h.e[k].add(down_out[k], 1.0);
    }
    for (int t : S.restarts) {
        LinExpr r = up_out[t];
        r.add(up_in[t], -1.0);
        add_row(m, r, Sense::eq, 0.0, prefix + idx("up", t));
    }
    for (auto *vec : {&h.x, &h.u, &h.v, &h.e, &h.energy})
        for (auto &ex : *vec) ex.compact();
    h.cost = cost.compact();
    return h;
}

Formulation default_formulation(const GeneratorSpec &g)
{
    switch (classify(g)) {
    case GeneratorClass::G1: return Formulation::D1;
    case GeneratorClass::G2: return Formulation::D2;
    default: return Formulation::D3;
    }
}

FormulationHandle build_formulation(LinearModel &m, const GeneratorSpec &g, Formulation kind, const std::string &prefix,
                                    BuildFlags flags)
{
    switch (kind) {
    case Formulation::ThreeBin: return build_3bin(m, g, prefix, flags);
    case Formulation::D1: return build_hull_D1(m, g, prefix, flags);
    case Formulation::D2: return build_hull_D2(m, g, prefix, flags);
    case Formulation::D3: return build_hull_D3(m, g, prefix, flags);
    case Formulation::D4: return build_hull_D4(m, g, prefix, flags);
    }
    throw ModelError("unknown formulation");
}

SingleModel single_generator_model(const GeneratorSpec &g, Formulation kind, const std::vector<double> &price,
                                   const ExtraObjective *extra, BuildFlags flags)
{
    SingleModel sm;
    sm.h = build_formulation(sm.model, g, kind, "", flags);
    LinExpr obj = sm.h.cost;
    const int T = g.horizon();
    for (int t = 0; t < T; ++t) {
        obj.add(sm.h.x[t], -price.at(t));
        if (!extra) continue;
        if (!extra->on.empty()) obj.add(sm.h.u[t], extra->on[t]);
        if (!extra->start.empty()) obj.add(sm.h.v[t], extra->start[t]);
        if (!extra->stop.empty()) obj.add(sm.h.e[t], extra->stop[t]);
        if (!extra->gen.empty()) obj.add(sm.h.x[t], extra->gen[t]);
    }
    sm.model.set_objective(obj.compact());
    return sm;
}

double system_coef(const SystemInstance &inst, const SystemRow &r, int gen)
{
    if (r.kind == RowKind::balance) return 1.0;
    int b = inst.bus_index(inst.generators[gen].bus);
    double sf = inst.lines[r.line].shift_factors[b];
    return r.kind == RowKind::line_pos ? sf : -sf;
}

SystemModel build_system(const SystemInstance &inst, const std::vector<Formulation> &kinds, BuildFlags flags)
{
    const int T = inst.horizon;
    if (kinds.size() != inst.generators.size()) throw ModelError("one formulation per generator required");
    SystemModel sm;
    LinExpr obj;
    for (size_t i = 0; i < inst.generators.size(); ++i) {
        const auto &g = inst.generators[i];
        if (g.horizon() != T) throw ModelError(g.id + ": horizon mismatch");
        sm.gens.push_back(build_formulation(sm.model, g, kinds[i], g.id + ":", flags));
        obj.add(sm.gens.back().cost);
    }
    sm.model.set_objective(obj.compact());
    auto add = [&](SystemRow r, Sense s, const std::string &tag) {
        LinExpr e;
        for (size_t i = 0; i < inst.generators.size(); ++i)
            e.add(sm.gens[i].x[r.t - 1], system_coef(inst, r, static_cast<int>(i)));
        r.row = sm.model.add_constraint(e.compact(), s, r.rhs, tag);
        sm.rows.push_back(r);
    };
    for (int t = 1; t <= T; ++t)
        add({.kind = RowKind::balance, .t = t, .rhs = inst.demand[t - 1]}, Sense::eq, idx("sys:bal", t));
    for (size_t l = 0; l < inst.lines.size(); ++l) {
        const auto &ln = inst.lines[l];
        for (int t = 1; t <= T; ++t) {
            double load_flow = 0.0;
            for (size_t b = 0; b < inst.buses.size(); ++b)
                load_flow += ln.shift_factors[b] * inst.buses[b].load_share * inst.demand[t - 1];
            int li = static_cast<int>(l);
            add({.kind = RowKind::line_pos, .t = t, .line = li, .rhs = ln.limit + load_flow}, Sense::le,
                "sys:line[" + ln.id + "]+" + idx("", t));
            add({.kind = RowKind::line_neg, .t = t, .line = li, .rhs = ln.limit - load_flow}, Sense::le,
                "sys:line[" + ln.id + "]-" + idx("", t));
        }
    }
    return sm;
}

HatPoint read_hat(const FormulationHandle &h, const GeneratorSpec &g, const std::vector<double> &sol)
{
    HatPoint p;
    const int T = g.horizon();
    for (int t = 0; t < T; ++t) {
        p.x.push_back(h.x[t].eval(sol));
        p.u.push_back(h.u[t].eval(sol));
        p.v.push_back(h.v[t].eval(sol));
        p.e.push_back(h.e[t].eval(sol));
        p.f.push_back(h.energy[t].eval(sol) - g.no_load[t] * p.u.back());
    }
    return p;
}

LinearModel build_P3(const GeneratorSpec &g, const HatPoint &hat, double tol)
{
    LinearModel m;
    FormulationHandle h = build_hull_D4(m, g, "");
    const int T = g.horizon();
    auto pin = [&](const LinExpr &ex, double val, const std::string &name, int t) {
        double eps = tol * (1.0 + std::abs(val));
        LinExpr e = ex;
        e.compact();
        if (e.terms.empty()) {
            // Expression is a constant (no interval covers it); keep the test honest with an infeasible row.
            if (std::abs(e.constant - val) > eps) {
                int z = m.add_variable("infeasible" + idx(name, t), 0, 0);
                m.add_constraint(LinExpr().add(z, 1.0), Sense::eq, 1.0, idx("map" + name, t));
            }
            return;
        }
        m.add_constraint(e, Sense::le, val + eps, idx("map" + name + "+", t));
        m.add_constraint(e, Sense::ge, val - eps, idx("map" + name + "-", t));
    };
    for (int t = 1; t <= T; ++t) {
        pin(h.x[t - 1], hat.x[t - 1], "x", t);
        pin(LinExpr(h.energy[t - 1]).add(h.u[t - 1], -g.noload(t)), hat.f[t - 1], "f", t);
        pin(h.u[t - 1], hat.u[t - 1], "u", t);
        pin(h.v[t - 1], hat.v[t - 1], "v", t);
        pin(h.e[t - 1], hat.e[t - 1], "e", t);
    }
    m.set_objective(Terms{}, 1.0);
    return m;
}

} // namespace chp
