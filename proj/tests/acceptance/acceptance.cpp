// Acceptance suite: one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "chp/generate.hpp"
#include "chp/oracle.hpp"
#include "chp/pricing.hpp"
#include "chp/verify.hpp"
#include "json.hpp"

using namespace chp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct CaseRun {
    std::string name;
    SystemInstance inst;
    UcSolution uc;
    PricingRunReport lmp, tlp, ia1, ia2, iac1, iac2, opt;
};

double rel(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

std::string fmt(double v)
{
    std::ostringstream os;
    os << v;
    return os.str();
}

std::vector<double> random_price(std::mt19937_64 &rng, int T)
{
    std::uniform_int_distribution<int> d(0, 240);
    std::vector<double> p(T);
    for (auto &v : p) v = 0.25 * d(rng);
    return p;
}

ExtraObjective random_extra(std::mt19937_64 &rng, int T)
{
    std::uniform_real_distribution<double> d(-50, 50);
    ExtraObjective e;
    for (int t = 0; t < T; ++t) {
        e.on.push_back(std::round(d(rng)));
        e.start.push_back(std::round(d(rng)));
        e.stop.push_back(std::round(d(rng)));
    }
    return e;
}

// 1. LP optima over the class hulls and D4 are integral and match brute force.
Outcome hull_integrality()
{
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1001);
    const GeneratorClass cls[] = {GeneratorClass::G1, GeneratorClass::G2, GeneratorClass::G3, GeneratorClass::G4};
    long lps = 0, bad = 0;
    std::string first;
    for (auto c : cls)
        for (int k = 0; k < 200; ++k) {
            int T = 1 + k % 5;
            GeneratorSpec g = random_generator(rng, "g", T, c);
            auto price = random_price(rng, T);
            ExtraObjective ex = random_extra(rng, T);
            const ExtraObjective *pe = k % 2 ? &ex : nullptr;
            double en = enumerate_best_schedule(g, price, pe).net_cost;
            std::vector<Formulation> kinds{Formulation::D4};
            if (c != GeneratorClass::G4) kinds.push_back(default_formulation(g));
            for (auto f : kinds) {
                auto sm = single_generator_model(g, f, price, pe);
                auto r = solve_lp(sm.model);
                ++lps;
                bool ok = r.ok() && rel(r.objective, en) <= 1e-6;
                for (int j : sm.h.status_vars)
                    if (ok && std::abs(r.primal[j] - std::round(r.primal[j])) > 1e-5) ok = false;
                if (!ok && bad++ == 0)
                    first = std::string(to_string(c)) + " " + to_string(f) + " #" + std::to_string(k) + " lp " +
                            fmt(r.objective) + " enum " + fmt(en);
            }
        }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Outcome o;
    o.pass = bad == 0 && secs < 300;
    o.detail = std::to_string(lps) + " LPs over 800 generators, " + std::to_string(bad) + " failures, " + fmt(std::round(secs)) +
               " s";
    if (bad) o.detail += "; first: " + first;
    return o;
}

// 2. DP value equals the D4 LP value.
Outcome dp_lp_duality()
{
    std::mt19937_64 rng(2002);
    int bad = 0;
    double worst = 0;
    for (int k = 0; k < 200; ++k) {
        int T = 1 + k % 8;
        GeneratorSpec g = random_generator(rng, "g", T, static_cast<GeneratorClass>(k % 4));
        auto price = random_price(rng, T);
        double dp = dp_self_schedule(g, price).net_cost;
        auto r = solve_lp(single_generator_model(g, Formulation::D4, price).model);
        double d = r.ok() ? rel(r.objective, dp) : kInf;
        worst = std::max(worst, d);
        if (d > 1e-6) ++bad;
    }
    return {bad == 0, "200 pairs, " + std::to_string(bad) + " mismatches, worst relative gap " + fmt(worst)};
}

std::vector<const PricingRunReport *> ia_runs(const CaseRun &c) { return {&c.ia1, &c.ia2, &c.iac1, &c.iac2}; }

// 3. -sum Z^i(gamma) from the DP equals Z_C(gamma) - gamma'p at every IA termination.
Outcome lagrangian_identity(const std::vector<CaseRun> &runs)
{
    int checks = 0, bad = 0;
    double worst = 0;
    std::string first;
    for (const auto &c : runs)
        for (const auto *r : ia_runs(c)) {
            ++checks;
            auto rows = system_rows(c.inst);
            LagrangianResult dp = lagrangian_oracle(c.inst, r->price.rows);
            double gp = 0;
            for (size_t k = 0; k < rows.size(); ++k) gp += r->price.rows[k] * rows[k].rhs;
            double lhs = 0;
            for (double v : dp.value) lhs += v;
            double err = std::abs(lhs - (r->z_c - gp)) / (1.0 + std::abs(r->z_c));
            worst = std::max(worst, err);
            if (err > 1e-5 || r->fractional_flags != 0) {
                if (bad++ == 0) first = c.name + " " + r->algorithm;
            }
        }
    Outcome o{bad == 0, std::to_string(checks) + " terminations, worst scaled error " + fmt(worst)};
    if (bad) o.detail += ", " + std::to_string(bad) + " failures (first " + first + ")";
    return o;
}

// 4. Uplift trace never increases.
Outcome monotonicity(const std::vector<CaseRun> &runs)
{
    int checks = 0, bad = 0;
    long steps = 0;
    std::string first;
    for (const auto &c : runs)
        for (const auto *r : ia_runs(c)) {
            ++checks;
            steps += static_cast<long>(r->trace.size());
            std::string why;
            if (!trace_non_increasing(*r, 1e-6, &why) && bad++ == 0) first = c.name + " " + why;
        }
    Outcome o{bad == 0, std::to_string(checks) + " traces, " + std::to_string(steps) + " P1 solves"};
    if (bad) o.detail += ", " + std::to_string(bad) + " violations (first " + first + ")";
    return o;
}

// 5. Some IA variant (or its IAC continuation) reaches OPT's uplift.
Outcome exactness(const std::vector<CaseRun> &runs)
{
    int bad = 0;
    std::string first;
    int via_iac = 0;
    for (const auto &c : runs) {
        double tol = 1e-5 * (1.0 + std::abs(c.opt.uplift));
        bool ia = std::abs(c.ia1.uplift - c.opt.uplift) <= tol || std::abs(c.ia2.uplift - c.opt.uplift) <= tol;
        bool iac = std::abs(c.iac1.uplift - c.opt.uplift) <= tol || std::abs(c.iac2.uplift - c.opt.uplift) <= tol;
        if (!ia && iac) ++via_iac;
        if (!ia && !iac && bad++ == 0) first = c.name + " ia1 " + fmt(c.ia1.uplift) + " opt " + fmt(c.opt.uplift);
    }
    Outcome o{bad == 0, std::to_string(runs.size()) + " instances, " + std::to_string(via_iac) + " needed IAC"};
    if (bad) o.detail += ", " + std::to_string(bad) + " misses (first " + first + ")";
    return o;
}

// 6. uplift(LMP) >= uplift(TLP) >= uplift(IA) >= uplift(OPT).
Outcome ordering(const std::vector<CaseRun> &runs)
{
    int bad = 0;
    std::string first;
    for (const auto &c : runs) {
        double tol = 1e-5 * (1.0 + std::abs(c.opt.uplift));
        double ia = std::min(c.ia1.uplift, c.ia2.uplift);
        bool ok = c.lmp.uplift >= c.tlp.uplift - tol && c.tlp.uplift >= ia - tol && ia >= c.opt.uplift - tol;
        if (!ok && bad++ == 0)
            first = c.name + ": " + fmt(c.lmp.uplift) + ", " + fmt(c.tlp.uplift) + ", " + fmt(ia) + ", " + fmt(c.opt.uplift);
    }
    Outcome o{bad == 0, std::to_string(runs.size()) + " instances"};
    if (bad) o.detail += ", " + std::to_string(bad) + " violations (first " + first + ")";
    return o;
}

// 7. Uplift arithmetic on two reference cases.
Outcome arithmetic()
{
    double c1 = compute_uplift(39986855.0, 39986726.0), c2 = compute_uplift(55311277.0, 55309361.0);
    return {c1 == 129.0 && c2 == 1916.0, "C1 " + fmt(c1) + ", C2 " + fmt(c2)};
}

// 8. Exported LPs re-solved by HiGHS; complementary slackness of every embedded solve.
Outcome solver_soundness(const std::vector<CaseRun> &runs, const fs::path &work, const std::string &python,
                         const std::string &script)
{
    fs::remove_all(work);
    fs::create_directories(work);
    nlohmann::ordered_json manifest = nlohmann::ordered_json::array();
    int n = 0;
    double worst_cs = 0;
    auto add = [&](const LinearModel &m, const std::string &tag) {
        SolveResult r = solve_lp(m);
        std::string file = "m" + std::to_string(n++) + "_" + tag + ".lp";
        write_lp_file(m, (work / file).string());
        nlohmann::ordered_json e;
        e["file"] = file;
        e["status"] = r.ok() ? "optimal" : to_string(r.status);
        e["objective"] = r.ok() ? r.objective : 0.0;
        manifest.push_back(e);
        if (r.ok()) worst_cs = std::max(worst_cs, complementary_slackness_violation(m, r));
        return r;
    };
    for (const auto &c : runs) {
        const auto &inst = c.inst;
        std::vector<bool> none(inst.generators.size(), false);
        SystemModel p1 = build_pricing_lp(inst, none);
        SolveResult r1 = add(p1.model, c.name + "_P1");
        add(build_pricing_lp(inst, gamma_mask(inst, c.ia1.gamma)).model, c.name + "_P1final");
        add(build_pricing_lp(inst, gamma_mask(inst, c.opt.gamma)).model, c.name + "_P");
        auto rows = system_rows(inst);
        for (size_t i = 0; i < inst.generators.size(); ++i) {
            const auto &g = inst.generators[i];
            auto price = generator_price(inst, rows, c.opt.price.rows, static_cast<int>(i));
            add(single_generator_model(g, pricing_formulation(g, false), price).model, c.name + "_P2_" + g.id);
            if (classify(g) == GeneratorClass::G4 && r1.ok())
                add(build_P3(g, read_hat(p1.gens[i], g, r1.primal)), c.name + "_P3_" + g.id);
        }
    }
    std::ofstream(work / "manifest.json") << manifest.dump(1);

    std::string cmd = python + " \"" + script + "\" \"" + work.string() + "\" --tol 1e-6 2>&1";
    std::string out;
    FILE *pipe = popen(cmd.c_str(), "r");
    int rc = -1;
    if (pipe) {
        char buf[512];
        while (fgets(buf, sizeof buf, pipe)) out += buf;
        rc = pclose(pipe);
    }
    while (!out.empty() && out.back() == '\n') out.pop_back();
    std::string last = out.substr(out.find_last_of('\n') == std::string::npos ? 0 : out.find_last_of('\n') + 1);
    Outcome o;
    o.pass = rc == 0 && worst_cs <= 1e-6;
    o.detail = std::to_string(n) + " LPs; reference: " + (last.empty() ? "no output" : last) +
               "; worst complementary slackness " + fmt(worst_cs);
    return o;
}

// 9. OPT's uplift is the minimum of Z' - Z_C over a price grid.
Outcome grid_search()
{
    const std::uint64_t seeds[] = {901, 902, 903, 904, 905};
    const int horizons[] = {1, 2, 2, 3, 3};
    const double step = 0.25, margin = 2.0;
    int bad = 0;
    std::ostringstream det;
    for (int c = 0; c < 5; ++c) {
        const int T = horizons[c];
        auto inst = random_instance(seeds[c], {.horizon = T, .mix = {1, 0, 1, 2}, .name = "grid"});
        auto uc = solve_uc(inst);
        auto opt = run_opt(inst, uc);
        auto lmp = compute_lmp(inst, uc);
        // box spans the LMP and OPT prices plus a margin, snapped to the lattice
        std::vector<double> lo(T);
        std::vector<int> per(T);
        long total = 1;
        for (int t = 0; t < T; ++t) {
            double a = std::min(lmp.price.rows[t], opt.price.rows[t]) - margin;
            double b = std::max(lmp.price.rows[t], opt.price.rows[t]) + margin;
            lo[t] = std::floor(a / step) * step;
            per[t] = static_cast<int>(std::ceil((b - lo[t]) / step)) + 1;
            total *= per[t];
        }
        double best = kInf;
        std::vector<double> g(T);
        for (long idx = 0; idx < total; ++idx) {
            long r = idx;
            for (int t = 0; t < T; ++t) {
                g[t] = lo[t] + step * static_cast<double>(r % per[t]);
                r /= per[t];
            }
            best = std::min(best, compute_uplift(uc.objective, lagrangian_oracle(inst, g).z_c));
        }
        double slack = 0;
        for (int t = 0; t < T; ++t) {
            double cap = inst.demand[t];
            for (const auto &gen : inst.generators) cap += gen.p_max[t];
            slack += step * cap;
        }
        bool ok = best >= opt.uplift - 1e-6 * (1.0 + std::abs(uc.objective)) && best <= opt.uplift + slack;
        if (!ok) ++bad;
        det << " T=" << T << ":" << fmt(opt.uplift) << "/" << fmt(best) << " (" << total << " pts)";
    }
    return {bad == 0, "U_opt/grid min:" + det.str()};
}

CaseRun run_case(const fs::path &file)
{
    CaseRun c;
    c.inst = load_instance(file.string());
    c.name = file.stem().string();
    c.uc = solve_uc(c.inst);
    c.lmp = compute_lmp(c.inst, c.uc);
    c.tlp = run_tlp(c.inst, c.uc);
    c.ia1 = run_ia(c.inst, IaVariant::IA1, c.uc);
    c.ia2 = run_ia(c.inst, IaVariant::IA2, c.uc);
    c.iac1 = run_complementary(c.inst, c.ia1, c.uc);
    c.iac2 = run_complementary(c.inst, c.ia2, c.uc);
    c.opt = run_opt(c.inst, c.uc);
    return c;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"acceptance criteria"};
    std::string corpus = CHP_CORPUS_DIR, python = CHP_PYTHON, script = CHP_CROSSCHECK;
    std::string work = (fs::temp_directory_path() / "chp_acceptance_lp").string();
    std::vector<int> only;
    app.add_option("--corpus", corpus, "instance directory");
    app.add_option("--work", work, "directory for exported LP files");
    app.add_option("--python", python, "python interpreter with highspy");
    app.add_option("--only", only, "criteria to run");
    CLI11_PARSE(app, argc, argv);
    auto want = [&](int k) { return only.empty() || std::find(only.begin(), only.end(), k) != only.end(); };

    std::vector<CaseRun> runs;
    bool need_corpus = want(3) || want(4) || want(5) || want(6) || want(8);
    if (need_corpus) {
        std::vector<fs::path> files;
        for (const auto &e : fs::directory_iterator(corpus))
            if (e.path().extension() == ".json") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto &f : files) runs.push_back(run_case(f));
        std::cout << "corpus: " << runs.size() << " instances from " << corpus << "\n";
        if (runs.size() < 20) std::cout << "note: corpus has fewer than 20 instances\n";
    }

    bool all = true;
    auto report = [&](int k, const std::string &title, const Outcome &o) {
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << k << " (" << title << "): " << o.detail << std::endl;
        all = all && o.pass;
    };
    if (want(1)) report(1, "hull integrality", hull_integrality());
    if (want(2)) report(2, "DP = D4 LP", dp_lp_duality());
    if (want(3)) report(3, "Lagrangian identity", lagrangian_identity(runs));
    if (want(4)) report(4, "uplift monotonicity", monotonicity(runs));
    if (want(5)) report(5, "IA exactness", exactness(runs));
    if (want(6)) report(6, "uplift ordering", ordering(runs));
    if (want(7)) report(7, "uplift arithmetic", arithmetic());
    if (want(8)) report(8, "solver soundness", solver_soundness(runs, work, python, script));
    if (want(9)) report(9, "grid-search price oracle", grid_search());
    return all ? 0 : 1;
}
