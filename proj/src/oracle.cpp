#include "chp/oracle.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "chp/simplex.hpp"

namespace chp {

double interval_dispatch_cost(const GeneratorSpec &g, int t, int k, const std::vector<double> &price, bool startup,
                              std::vector<double> *x_out)
{
    const int T = g.horizon();
    if (t < 1 || k < t || k > T) throw std::invalid_argument("interval outside horizon");
    LinearModel m;
    std::vector<int> x(k + 1), phi(k + 1);
    LinExpr obj;
    for (int s = t; s <= k; ++s) {
        double hi = g.pmax(s);
        if (s == t && startup) hi = std::min(hi, g.surmp(s));
        if (s == k && k < T) hi = std::min(hi, g.sdrmp(s));
        if (hi < g.pmin(s)) return kInf;
        x[s] = m.add_variable("x" + std::to_string(s), g.pmin(s), hi);
        phi[s] = m.add_variable("phi" + std::to_string(s), -kInf, kInf);
        for (const auto &sg : g.segs(s))
            m.add_constraint(LinExpr().add(phi[s], 1.0).add(x[s], -sg.slope), Sense::ge, sg.intercept + g.noload(s),
                             "c" + std::to_string(s) + "_" + std::to_string(m.num_constraints()));
        if (s > t) {
            m.add_constraint(LinExpr().add(x[s], 1.0).add(x[s - 1], -1.0), Sense::le, g.rup(s), "ru" + std::to_string(s));
            m.add_constraint(LinExpr().add(x[s - 1], 1.0).add(x[s], -1.0), Sense::le, g.rdown(s), "rd" + std::to_string(s));
        }
        obj.add(phi[s], 1.0).add(x[s], -price[s - 1]);
    }
    m.set_objective(obj);
    SolveResult r = solve_lp(m);
    if (r.status == SolveStatus::infeasible) return kInf;
    if (!r.ok()) throw std::runtime_error("interval dispatch LP failed: " + std::string(to_string(r.status)));
    if (x_out) {
        x_out->assign(T, 0.0);
        for (int s = t; s <= k; ++s) (*x_out)[s - 1] = r.primal[x[s]];
    }
    return r.objective;
}

namespace {

double coef(const std::vector<double> &v, int t) { return v.empty() ? 0.0 : v[t - 1]; }

// Effective price: extra terms on x shift the price.
std::vector<double> effective_price(const std::vector<double> &price, const ExtraObjective *extra)
{
    std::vector<double> p = price;
    if (extra && !extra->gen.empty())
        for (size_t t = 0; t < p.size(); ++t) p[t] -= extra->gen[t];
    return p;
}

struct IntervalCache {
    const GeneratorSpec &g;
    std::vector<double> price;
    const ExtraObjective *extra;
    std::map<std::tuple<int, int, bool>, double> memo;

    double operator()(int t, int k, bool startup)
    {
        auto key = std::make_tuple(t, k, startup);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        double c = interval_dispatch_cost(g, t, k, price, startup);
        if (c < kInf && extra && !extra->on.empty())
            for (int s = t; s <= k; ++s) c += extra->on[s - 1];
        memo.emplace(key, c);
        return c;
    }
};

} // namespace

ScheduleValue dp_self_schedule(const GeneratorSpec &g, const std::vector<double> &price, DpTables *tables,
                               const ExtraObjective *extra)
{
    const int T = g.horizon();
    if (static_cast<int>(price.size()) != T) throw std::invalid_argument("price length differs from horizon");
    const int Lbar = g.max_up;
    const bool on0 = g.initially_on();
    const int s0 = g.initial_on_duration;
    const long d0 = g.off_history();
    IntervalCache C{g, effective_price(price, extra), extra, {}};
    const std::vector<double> none;
    const auto &beta = extra ? extra->start : none;
    const auto &eta = extra ? extra->stop : none;

    DpTables tb;
    tb.V_down.assign(T + 1, kInf);
    tb.V_up.assign(T + 2, kInf);
    tb.next_restart.assign(T + 1, -1);
    tb.next_stop.assign(T + 2, -1);

    // Backward in time: V_up[t] needs V_down[k>=t], V_down[k] needs V_up[t>=k+2].
    for (int tau = T; tau >= 1; --tau) {
        if (tau <= T - 1) {
            int k = tau;
            double best = 0.0;
            for (int t = k + 2; t <= T; ++t) {
                if (t - k - 1 < g.l_at(t) || tb.V_up[t] == kInf) continue;
                double c = startup_cost_at(g, t - k - 1, 1) + coef(beta, t) + tb.V_up[t];
                if (c < best) {
                    best = c;
                    tb.next_restart[k] = t;
                }
            }
            tb.V_down[k] = best;
        }
        int t = tau;
        int hi = Lbar >= kUnbounded ? T - 1 : std::min(t + Lbar - 1, T - 1);
        double best = kInf;
        for (int k = t + g.L_at(t) - 1; k <= hi; ++k) {
            double c = C(t, k, true);
            if (c == kInf) continue;
            c += shutdown_cost_at(g, k - t + 1) + coef(eta, k + 1) + tb.V_down[k];
            if (c < best) {
                best = c;
                tb.next_stop[t] = k;
            }
        }
        if (T - t + 1 <= Lbar) {
            double c = C(t, T, true);
            if (c < best) {
                best = c;
                tb.next_stop[t] = T;
            }
        }
        tb.V_up[t] = best;
    }

    if (on0) {
        // k = 0 shuts down before period 1.
        int t0 = std::min(initial_lock(g), T);
        int kmax = Lbar >= kUnbounded ? T : std::min(Lbar - s0, T);
        double down0 = 0.0;
        int restart0 = -1;
        for (int t = 2; t <= T; ++t) {
            if (t - 1 < g.l_at(t) || tb.V_up[t] == kInf) continue;
            double c = startup_cost_at(g, t - 1, 1) + coef(beta, t) + tb.V_up[t];
            if (c < down0) {
                down0 = c;
                restart0 = t;
            }
        }
        tb.V_down[0] = down0;
        tb.next_restart[0] = restart0;
        double best = kInf;
        for (int k = t0; k <= kmax; ++k) {
            double c = k >= 1 ? C(1, k, false) : 0.0;
            if (c == kInf) continue;
            if (k < T) c += shutdown_cost_at(g, k + s0) + coef(eta, k + 1) + tb.V_down[k];
            if (c < best) {
                best = c;
                tb.first_stop = k;
            }
        }
        if (best == kInf) throw std::runtime_error(g.id + ": no feasible schedule for the initial ON run");
        tb.Phi = best;
    } else {
        double best = 0.0;
        for (int t = 1; t <= T; ++t) {
            long gap = t + d0 - 1;
            if (gap < g.l_at(t) || tb.V_up[t] == kInf) continue;
            double c = startup_cost_at(g, static_cast<int>(std::min<long>(gap, kUnbounded)), 1) + coef(beta, t) + tb.V_up[t];
            if (c < best) {
                best = c;
                tb.first_restart = t;
            }
        }
        tb.Phi = best;
    }

    ScheduleValue out;
    out.net_cost = tb.Phi;
    out.schedule.on.assign(T, 0);
    out.schedule.x.assign(T, 0.0);
    const auto pe = effective_price(price, extra);
    auto fill = [&](int a, int b, bool su) {
        std::vector<double> xs;
        interval_dispatch_cost(g, a, b, pe, su, &xs);
        for (int s = a; s <= b; ++s) {
            out.schedule.on[s - 1] = 1;
            out.schedule.x[s - 1] = xs[s - 1];
        }
    };
    int restart = -1;
    if (on0) {
        int k = tb.first_stop;
        if (k >= 1) fill(1, k, false);
        if (k < T) restart = tb.next_restart[k];
    } else {
        restart = tb.first_restart;
    }
    while (restart > 0) {
        int k = tb.next_stop[restart];
        fill(restart, k, true);
        restart = k < T ? tb.next_restart[k] : -1;
    }
    if (tables) *tables = std::move(tb);
    return out;
}

namespace {

struct Run {
    int a, b;
};

std::vector<Run> runs_of(const std::vector<int> &on)
{
    std::vector<Run> r;
    const int T = static_cast<int>(on.size());
    for (int t = 1; t <= T; ++t) {
        if (!on[t - 1]) continue;
        int b = t;
        while (b < T && on[b]) ++b;
        r.push_back({t, b});
        t = b;
    }
    return r;
}

} // namespace

bool schedule_feasible(const GeneratorSpec &g, const std::vector<int> &on)
{
    const int T = g.horizon();
    if (static_cast<int>(on.size()) != T) return false;
    const bool on0 = g.initially_on();
    const int s0 = g.initial_on_duration;
    const long d0 = g.off_history();
    auto runs = runs_of(on);
    int last_on = 0; // 0: before period 1
    bool have_prev = on0;
    size_t i = 0;
    if (on0) {
        int k = (!runs.empty() && runs[0].a == 1) ? runs[0].b : 0;
        if (k < std::min(initial_lock(g), T)) return false;
        if (g.max_up < kUnbounded && k + s0 > g.max_up) return false;
        last_on = k;
        if (k >= 1) i = 1;
    }
    for (; i < runs.size(); ++i) {
        auto [a, b] = runs[i];
        long gap = have_prev ? a - last_on - 1 : a + d0 - 1;
        if (gap < g.l_at(a)) return false;
        int len = b - a + 1;
        if (b < T && len < g.L_at(a)) return false;
        if (len > g.max_up) return false;
        last_on = b;
        have_prev = true;
    }
    return true;
}

ScheduleValue enumerate_best_schedule(const GeneratorSpec &g, const std::vector<double> &price, const ExtraObjective *extra)
{
    const int T = g.horizon();
    if (T > 12) throw std::invalid_argument("enumeration limited to T <= 12");
    const bool on0 = g.initially_on();
    const int s0 = g.initial_on_duration;
    const long d0 = g.off_history();
    const std::vector<double> pe = effective_price(price, extra);
    const std::vector<double> none;
    const auto &alpha = extra ? extra->on : none;
    const auto &beta = extra ? extra->start : none;
    const auto &eta = extra ? extra->stop : none;

    ScheduleValue best;
    best.net_cost = kInf;
    for (long mask = 0; mask < (1L << T); ++mask) {
        ++best.scanned;
        std::vector<int> on(T);
        for (int t = 0; t < T; ++t) on[t] = (mask >> t) & 1;
        if (!schedule_feasible(g, on)) continue;
        double cost = 0.0;
        std::vector<double> x(T, 0.0);
        auto runs = runs_of(on);
        bool have_prev = on0;
        int last_on = 0;
        if (on0 && (runs.empty() || runs[0].a != 1)) {
            cost += shutdown_cost_at(g, s0) + coef(eta, 1);
        }
        for (size_t i = 0; i < runs.size() && cost < kInf; ++i) {
            auto [a, b] = runs[i];
            bool initial = on0 && a == 1;
            if (!initial) {
                long gap = have_prev ? a - last_on - 1 : a + d0 - 1;
                cost += startup_cost_at(g, static_cast<int>(std::min<long>(gap, kUnbounded)), 1) + coef(beta, a);
            }
            std::vector<double> xs;
            double c = interval_dispatch_cost(g, a, b, pe, !initial, &xs);
            if (c == kInf) {
                cost = kInf;
                break;
            }
            cost += c;
            for (int s = a; s <= b; ++s) {
                x[s - 1] = xs[s - 1];
                cost += coef(alpha, s);
            }
            if (b < T) cost += shutdown_cost_at(g, initial ? b + s0 : b - a + 1) + coef(eta, b + 1);
            have_prev = true;
            last_on = b;
        }
        if (cost < best.net_cost - 1e-12) {
            best.net_cost = cost;
            best.schedule.on = on;
            best.schedule.x = x;
        }
    }
    return best;
}

} // namespace chp
