#include "chp/pricing.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <thread>

#include "chp/oracle.hpp"
#include "json.hpp"

namespace chp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int hardware_threads()
{
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

/// Runs f(i) for i in [0,n) on up to `threads` threads.
template <class F>
void parallel_for(int n, int threads, F f)
{
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    f(i);
                } catch (...) {
                    if (!failed.exchange(true)) err = std::current_exception();
                }
            }
        });
    for (auto &th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

bool is_g4(const GeneratorSpec &g) { return classify(g) == GeneratorClass::G4; }

bool near_integer(double v, double tol) { return std::abs(v - std::round(v)) <= tol; }

double row_rhs_dot(const std::vector<SystemRow> &rows, const std::vector<double> &gamma)
{
    double s = 0.0;
    for (size_t r = 0; r < rows.size(); ++r) s += gamma[r] * rows[r].rhs;
    return s;
}

std::vector<double> row_duals(const SystemModel &sm, const SolveResult &res)
{
    std::vector<double> y;
    y.reserve(sm.rows.size());
    for (const auto &r : sm.rows) y.push_back(res.dual.at(r.row));
    return y;
}

std::vector<std::string> ids_of(const SystemInstance &inst, const std::vector<bool> &mask)
{
    std::vector<std::string> out;
    for (size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) out.push_back(inst.generators[i].id);
    return out;
}

struct P1State {
    const SystemInstance &inst;
    const UcSolution &uc;
    const PricingOptions &opt;
    std::vector<bool> in_gamma;
    SystemModel sm;
    SolveResult res;
    std::vector<double> gamma;
    PricingRunReport rep;
    Clock::time_point start = Clock::now();

    P1State(const SystemInstance &i, const UcSolution &u, const PricingOptions &o, std::string tag)
        : inst(i), uc(u), opt(o), in_gamma(i.generators.size(), false)
    {
        rep.algorithm = std::move(tag);
        rep.z_qip = uc.objective;
        rep.z_qip_bound = uc.best_bound;
        for (size_t k = 0; k < inst.generators.size(); ++k)
            if (needs_interval_model(inst.generators[k])) in_gamma[k] = true;
        rep.gamma_initial = ids_of(inst, in_gamma);
    }

    void solve(const std::string &stage, const std::vector<std::string> &added)
    {
        auto t0 = Clock::now();
        sm = build_pricing_lp(inst, in_gamma);
        res = solve_lp(sm.model, opt.lp);
        if (!res.ok()) throw SolveError("P1 " + std::string(to_string(res.status)));
        gamma = row_duals(sm, res);
        ++rep.p1_solves;
        rep.trace.push_back({stage, added, res.objective, compute_uplift(uc.objective, res.objective), seconds_since(t0)});
    }

    bool upgrade(const std::vector<int> &gens, const std::string &stage)
    {
        if (gens.empty()) return false;
        std::vector<std::string> added;
        for (int k : gens) {
            in_gamma[k] = true;
            added.push_back(inst.generators[k].id);
        }
        solve(stage, added);
        return true;
    }

    bool capped()
    {
        if (rep.p1_solves < opt.max_p1_solves) return false;
        rep.iteration_cap = true;
        return true;
    }

    /// Inner loop: upgrade generators with fractional P2 solutions until none are left.
    bool inner()
    {
        bool changed = false;
        while (!capped()) {
            LagrangianResult p2 = lagrangian_value(inst, in_gamma, gamma, opt);
            std::vector<int> flagged;
            for (size_t k = 0; k < p2.fractional.size(); ++k)
                if (p2.fractional[k]) flagged.push_back(static_cast<int>(k));
            if (!upgrade(flagged, "inner")) break;
            changed = true;
        }
        return changed;
    }

    /// Outer loop: P1-fractional generators whose point lies outside the interval hull.
    bool outer()
    {
        bool changed = false;
        while (!capped()) {
            std::vector<int> cand;
            for (size_t k = 0; k < inst.generators.size(); ++k) {
                if (in_gamma[k] || !is_g4(inst.generators[k])) continue;
                for (int j : sm.gens[k].status_vars)
                    if (!near_integer(res.primal[j], opt.frac_tol)) {
                        cand.push_back(static_cast<int>(k));
                        break;
                    }
            }
            std::vector<char> outside(cand.size(), 0);
            parallel_for(static_cast<int>(cand.size()), hardware_threads(), [&](int c) {
                int k = cand[c];
                const auto &g = inst.generators[k];
                HatPoint hat = read_hat(sm.gens[k], g, res.primal);
                outside[c] = solve_lp(build_P3(g, hat, opt.p3_tol), opt.lp).status == SolveStatus::infeasible;
            });
            std::vector<int> up;
            for (size_t c = 0; c < cand.size(); ++c)
                if (outside[c]) up.push_back(cand[c]);
            if (!upgrade(up, "outer")) break;
            changed = true;
        }
        return changed;
    }

    /// Alternates the two loops; stops after both run without an upgrade at the same price.
    void run_loops(bool inner_first)
    {
        bool inner_turn = inner_first;
        int idle = 0;
        while (idle < 2 && !rep.iteration_cap) {
            bool changed = inner_turn ? inner() : outer();
            idle = changed ? 1 : idle + 1;
            inner_turn = !inner_turn;
        }
    }

    PricingRunReport finish()
    {
        LagrangianResult p2 = lagrangian_value(inst, in_gamma, gamma, opt);
        LagrangianResult dp = lagrangian_oracle(inst, gamma);
        rep.price = make_price(inst, sm.rows, gamma);
        rep.z_c = p2.z_c;
        rep.z_c_oracle = dp.z_c;
        rep.uplift = compute_uplift(uc.objective, dp.z_c);
        rep.uplift_p2 = compute_uplift(uc.objective, p2.z_c);
        rep.fractional_flags = p2.flags();
        rep.gamma = ids_of(inst, in_gamma);
        rep.wall_time = seconds_since(start);
        return rep;
    }
};

void ensure_dims(const SystemInstance &inst, const std::vector<SystemRow> &rows, const std::vector<double> &gamma)
{
    if (gamma.size() != rows.size())
        throw ModelError("price vector has " + std::to_string(gamma.size()) + " entries, " + std::to_string(rows.size()) +
                         " system rows expected");
    (void)inst;
}

} // namespace

double compute_uplift(double z_qip_upper, double z_c_at_gamma) { return z_qip_upper - z_c_at_gamma; }

double price_difference(const PriceVector &a, const PriceVector &b)
{
    if (a.bus.size() != b.bus.size()) throw ModelError("price_difference: period count mismatch");
    double s = 0.0;
    long n = 0;
    for (size_t t = 0; t < a.bus.size(); ++t) {
        if (a.bus[t].size() != b.bus[t].size()) throw ModelError("price_difference: bus count mismatch");
        for (size_t k = 0; k < a.bus[t].size(); ++k, ++n) s += std::abs(a.bus[t][k] - b.bus[t][k]);
    }
    return n == 0 ? 0.0 : s / static_cast<double>(n);
}

std::vector<SystemRow> system_rows(const SystemInstance &inst)
{
    std::vector<SystemRow> rows;
    const int T = inst.horizon;
    for (int t = 1; t <= T; ++t) rows.push_back({.kind = RowKind::balance, .t = t, .rhs = inst.demand[t - 1]});
    for (size_t l = 0; l < inst.lines.size(); ++l) {
        const auto &ln = inst.lines[l];
        for (int t = 1; t <= T; ++t) {
            double load_flow = 0.0;
            for (size_t b = 0; b < inst.buses.size(); ++b)
                load_flow += ln.shift_factors[b] * inst.buses[b].load_share * inst.demand[t - 1];
            int li = static_cast<int>(l);
            rows.push_back({.kind = RowKind::line_pos, .t = t, .line = li, .rhs = ln.limit + load_flow});
            rows.push_back({.kind = RowKind::line_neg, .t = t, .line = li, .rhs = ln.limit - load_flow});
        }
    }
    return rows;
}

PriceVector make_price(const SystemInstance &inst, const std::vector<SystemRow> &rows, const std::vector<double> &duals)
{
    ensure_dims(inst, rows, duals);
    PriceVector p;
    p.rows = duals;
    const size_t nb = std::max<size_t>(1, inst.buses.size());
    p.bus.assign(inst.horizon, std::vector<double>(nb, 0.0));
    for (size_t r = 0; r < rows.size(); ++r) {
        const auto &row = rows[r];
        for (size_t b = 0; b < nb; ++b) {
            double a = 1.0;
            if (row.kind != RowKind::balance) {
                double sf = inst.lines[row.line].shift_factors[b];
                a = row.kind == RowKind::line_pos ? sf : -sf;
            }
            p.bus[row.t - 1][b] += duals[r] * a;
        }
    }
    return p;
}

std::vector<double> generator_price(const SystemInstance &inst, const std::vector<SystemRow> &rows,
                                    const std::vector<double> &gamma, int gen)
{
    std::vector<double> p(inst.horizon, 0.0);
    for (size_t r = 0; r < rows.size(); ++r) p[rows[r].t - 1] += gamma[r] * system_coef(inst, rows[r], gen);
    return p;
}

bool needs_interval_model(const GeneratorSpec &g) { return !g.constant_shutdown(); }

Formulation pricing_formulation(const GeneratorSpec &g, bool in_gamma)
{
    if (in_gamma || needs_interval_model(g)) return Formulation::D4;
    return default_formulation(g);
}

std::vector<bool> gamma_mask(const SystemInstance &inst, const std::vector<std::string> &ids)
{
    std::vector<bool> m(inst.generators.size(), false);
    for (size_t i = 0; i < m.size(); ++i)
        m[i] = std::find(ids.begin(), ids.end(), inst.generators[i].id) != ids.end();
    return m;
}

SystemModel build_pricing_lp(const SystemInstance &inst, const std::vector<bool> &in_gamma)
{
    std::vector<Formulation> kinds;
    for (size_t i = 0; i < inst.generators.size(); ++i)
        kinds.push_back(pricing_formulation(inst.generators[i], in_gamma.at(i)));
    return build_system(inst, kinds);
}

std::vector<Formulation> uc_formulations(const SystemInstance &inst)
{
    std::vector<Formulation> kinds;
    for (const auto &g : inst.generators) kinds.push_back(is_g4(g) ? Formulation::D4 : default_formulation(g));
    return kinds;
}

UcSolution solve_uc(const SystemInstance &inst, const PricingOptions &opt)
{
    SystemModel sm = build_system(inst, uc_formulations(inst), {.binary = true});
    SolveResult r = solve_mip(sm.model, opt.mip);
    if (!r.has_incumbent) {
        if (r.status == SolveStatus::infeasible) throw SolveError("commitment problem infeasible");
        throw SolveError(std::string("commitment MIP stopped without incumbent: ") + to_string(r.status));
    }
    UcSolution uc;
    uc.objective = r.objective;
    uc.best_bound = r.best_bound;
    uc.primal = r.primal;
    uc.nodes = r.nodes;
    uc.elapsed = r.elapsed;
    for (const auto &h : sm.gens) {
        std::vector<int> on;
        std::vector<double> x;
        for (size_t t = 0; t < h.u.size(); ++t) {
            on.push_back(static_cast<int>(std::lround(h.u[t].eval(r.primal))));
            x.push_back(h.x[t].eval(r.primal));
        }
        uc.on.push_back(std::move(on));
        uc.x.push_back(std::move(x));
    }
    return uc;
}

int LagrangianResult::flags() const { return static_cast<int>(std::count(fractional.begin(), fractional.end(), true)); }

LagrangianResult lagrangian_value(const SystemInstance &inst, const std::vector<bool> &in_gamma,
                                  const std::vector<double> &gamma, const PricingOptions &opt)
{
    const auto rows = system_rows(inst);
    ensure_dims(inst, rows, gamma);
    const int n = static_cast<int>(inst.generators.size());
    LagrangianResult out;
    out.value.assign(n, 0.0);
    out.x.assign(n, {});
    out.fractional.assign(n, false);
    parallel_for(n, hardware_threads(), [&](int i) {
        const auto &g = inst.generators[i];
        SingleModel m = single_generator_model(g, pricing_formulation(g, in_gamma[i]), generator_price(inst, rows, gamma, i));
        SolveResult r = solve_lp(m.model, opt.lp);
        if (!r.ok()) throw SolveError(g.id + ": P2 " + to_string(r.status));
        out.value[i] = r.objective;
        for (const auto &xe : m.h.x) out.x[i].push_back(xe.eval(r.primal));
        if (!in_gamma[i] && is_g4(g))
            for (int j : m.h.status_vars)
                if (!near_integer(r.primal[j], opt.frac_tol)) out.fractional[i] = true;
    });
    out.z_c = row_rhs_dot(rows, gamma);
    for (double v : out.value) out.z_c += v;
    return out;
}

LagrangianResult lagrangian_oracle(const SystemInstance &inst, const std::vector<double> &gamma)
{
    const auto rows = system_rows(inst);
    ensure_dims(inst, rows, gamma);
    const int n = static_cast<int>(inst.generators.size());
    LagrangianResult out;
    out.value.assign(n, 0.0);
    out.x.assign(n, {});
    out.fractional.assign(n, false);
    parallel_for(n, hardware_threads(), [&](int i) {
        ScheduleValue sv = dp_self_schedule(inst.generators[i], generator_price(inst, rows, gamma, i));
        out.value[i] = sv.net_cost;
        out.x[i] = sv.schedule.x;
    });
    out.z_c = row_rhs_dot(rows, gamma);
    for (double v : out.value) out.z_c += v;
    return out;
}

PricingRunReport compute_lmp(const SystemInstance &inst, const UcSolution &uc, const PricingOptions &opt)
{
    auto t0 = Clock::now();
    SystemModel sm = build_system(inst, uc_formulations(inst), {.binary = true});
    std::vector<std::pair<int, double>> fix;
    for (const auto &h : sm.gens)
        for (int j : h.status_vars) fix.emplace_back(j, std::round(uc.primal.at(j)));
    SolveResult r = solve_lp(fix_variables(sm.model, fix), opt.lp);
    if (!r.ok()) throw SolveError(std::string("fixed-commitment dispatch ") + to_string(r.status));
    std::vector<double> beta = row_duals(sm, r);

    PricingRunReport rep;
    rep.algorithm = "lmp";
    rep.z_qip = uc.objective;
    rep.z_qip_bound = uc.best_bound;
    rep.price = make_price(inst, sm.rows, beta);
    LagrangianResult dp = lagrangian_oracle(inst, beta);
    rep.z_c = rep.z_c_oracle = dp.z_c;
    rep.uplift = rep.uplift_p2 = compute_uplift(uc.objective, dp.z_c);
    rep.price_diff = 0.0;
    rep.wall_time = seconds_since(t0);
    return rep;
}

PricingRunReport run_tlp(const SystemInstance &inst, const UcSolution &uc, const PricingOptions &opt)
{
    P1State s(inst, uc, opt, "tlp");
    s.solve("P1", {});
    return s.finish();
}

PricingRunReport run_ia(const SystemInstance &inst, IaVariant variant, const UcSolution &uc, const PricingOptions &opt)
{
    P1State s(inst, uc, opt, variant == IaVariant::IA1 ? "ia1" : "ia2");
    s.solve("P1", {});
    s.run_loops(variant == IaVariant::IA1);
    return s.finish();
}

PricingRunReport run_complementary(const SystemInstance &inst, const PricingRunReport &base, const UcSolution &uc,
                                   const PricingOptions &opt)
{
    std::string tag = base.algorithm == "ia2" ? "iac2" : "iac1";
    P1State s(inst, uc, opt, tag);
    s.rep.trace = base.trace;
    s.rep.p1_solves = base.p1_solves;
    std::vector<bool> mask = gamma_mask(inst, base.gamma);
    for (size_t k = 0; k < mask.size(); ++k) s.in_gamma[k] = s.in_gamma[k] || mask[k];
    s.solve("iac", {});

    int accepted = 0;
    while (accepted < opt.iac.n_stop && seconds_since(s.start) < opt.iac.time_limit && !s.capped()) {
        std::vector<int> cand;
        for (size_t k = 0; k < inst.generators.size(); ++k)
            if (!s.in_gamma[k] && is_g4(inst.generators[k])) cand.push_back(static_cast<int>(k));
        if (cand.empty()) break;
        int M = opt.iac.workers > 0 ? opt.iac.workers : std::min<int>(static_cast<int>(cand.size()), hardware_threads());
        M = std::max(1, std::min<int>(M, static_cast<int>(cand.size())));

        // contiguous groups; each worker tries its generators one at a time on a private copy of Gamma
        std::vector<std::vector<int>> found(M);
        const double base_obj = s.res.objective;
        parallel_for(M, M, [&](int w) {
            size_t lo = cand.size() * w / M, hi = cand.size() * (w + 1) / M;
            std::vector<bool> mine = s.in_gamma;
            double obj = base_obj;
            for (size_t c = lo; c < hi; ++c) {
                if (seconds_since(s.start) >= opt.iac.time_limit) break;
                int k = cand[c];
                mine[k] = true;
                SolveResult r = solve_lp(build_pricing_lp(inst, mine).model, opt.lp);
                if (r.ok() && r.objective > obj + opt.improve_tol * (1.0 + std::abs(obj))) {
                    found[w].push_back(k);
                    obj = r.objective;
                } else {
                    mine[k] = false;
                }
            }
        });
        std::vector<int> up;
        for (const auto &f : found)
            for (int k : f)
                if (accepted + static_cast<int>(up.size()) < opt.iac.n_stop) up.push_back(k);
        std::sort(up.begin(), up.end());
        if (!s.upgrade(up, "iac")) break;
        accepted += static_cast<int>(up.size());
        s.run_loops(tag == "iac1");
    }
    return s.finish();
}

PricingRunReport run_opt(const SystemInstance &inst, const UcSolution &uc, const PricingOptions &opt)
{
    P1State s(inst, uc, opt, "opt");
    for (size_t k = 0; k < inst.generators.size(); ++k)
        if (is_g4(inst.generators[k])) s.in_gamma[k] = true;
    s.solve("P", {});
    return s.finish();
}

namespace {

using ojson = nlohmann::ordered_json;

ojson num_or_null(double v)
{
    if (std::isnan(v)) return nullptr;
    return v;
}

} // namespace

std::string report_json(const PricingRunReport &r, bool timings)
{
    ojson j;
    j["algorithm"] = r.algorithm;
    j["z_qip"] = r.z_qip;
    j["z_qip_bound"] = r.z_qip_bound;
    j["z_c"] = r.z_c;
    j["z_c_oracle"] = r.z_c_oracle;
    j["uplift"] = r.uplift;
    j["uplift_p2"] = r.uplift_p2;
    j["price_diff"] = num_or_null(r.price_diff);
    j["fractional_flags"] = r.fractional_flags;
    j["p1_solves"] = r.p1_solves;
    j["iteration_cap"] = r.iteration_cap;
    j["gamma"] = r.gamma;
    j["gamma_initial"] = r.gamma_initial;
    j["row_prices"] = r.price.rows;
    j["bus_prices"] = r.price.bus;
    ojson tr = ojson::array();
    for (const auto &it : r.trace) {
        ojson e;
        e["stage"] = it.stage;
        e["added"] = it.added;
        e["p1_objective"] = it.p1_objective;
        e["uplift"] = it.uplift;
        if (timings) e["seconds"] = it.elapsed;
        tr.push_back(e);
    }
    j["trace"] = tr;
    if (timings) j["seconds"] = r.wall_time;
    return j.dump(2);
}

std::string report_table(const std::vector<PricingRunReport> &reports, bool timings)
{
    double best = kInf;
    for (const auto &r : reports) best = std::min(best, r.uplift);
    const double ref = reports.empty() ? 0.0 : reports.front().uplift;
    std::ostringstream os;
    os << std::left << std::setw(10) << "Algorithm" << std::right << std::setw(18) << "Solution" << std::setw(14) << "Uplift"
       << std::setw(10) << "Time" << std::setw(10) << "Save" << std::setw(9) << "Optimal" << std::setw(10) << "Diff"
       << std::setw(7) << "|Gam|" << '\n';
    os << std::fixed;
    for (const auto &r : reports) {
        os << std::left << std::setw(10) << r.algorithm << std::right << std::setprecision(2) << std::setw(18) << r.z_c
           << std::setw(14) << r.uplift;
        if (timings) os << std::setw(10) << std::setprecision(3) << r.wall_time;
        else os << std::setw(10) << "-";
        std::string save = "-";
        if (&r != &reports.front() && std::abs(ref) > 1e-6 * (1.0 + std::abs(r.z_qip))) {
            std::ostringstream s;
            s << std::fixed << std::setprecision(1) << 100.0 * (ref - r.uplift) / std::abs(ref) << '%';
            save = s.str();
        }
        os << std::setw(10) << save;
        os << std::setw(9) << (r.uplift <= best + 1e-5 * (1.0 + std::abs(best)) ? "yes" : "no");
        if (std::isnan(r.price_diff)) os << std::setw(10) << "-";
        else os << std::setw(10) << std::setprecision(3) << r.price_diff;
        os << std::setw(7) << r.gamma.size() << '\n';
    }
    return os.str();
}

} // namespace chp
