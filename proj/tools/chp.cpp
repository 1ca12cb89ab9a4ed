// Command-line front end: solve, verify, gen.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "chp/generate.hpp"
#include "chp/pricing.hpp"
#include "chp/verify.hpp"

using namespace chp;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kSolve = 3, kVerify = 4 };

void env_override(const char *name, double &target)
{
    const char *v = std::getenv(name);
    if (!v || !*v) return;
    char *end = nullptr;
    double d = std::strtod(v, &end);
    if (end == v || *end) throw DataError(std::string(name) + ": not a number: " + v);
    target = d;
}

void apply_env(PricingOptions &o)
{
    env_override("CHP_FRAC_TOL", o.frac_tol);
    env_override("CHP_P3_TOL", o.p3_tol);
    env_override("CHP_MIP_GAP", o.mip.mip_gap);
    env_override("CHP_FEAS_TOL", o.lp.feasibility_tol);
    env_override("CHP_OPT_TOL", o.lp.optimality_tol);
    o.mip.feasibility_tol = o.lp.feasibility_tol;
    o.mip.optimality_tol = o.lp.optimality_tol;
}

void write_file(const fs::path &p, const std::string &text)
{
    std::ofstream out(p);
    if (!out) throw DataError(p.string() + ": cannot write");
    out << text;
}

struct SolveArgs {
    std::string instance;
    std::string algorithm = "all";
    std::string out;
    bool dump_lp = false;
    bool timings = false;
};

int cmd_solve(const SolveArgs &a, PricingOptions opt)
{
    static const std::vector<std::string> known{"lmp", "tlp", "ia1", "ia2", "iac1", "iac2", "opt", "all"};
    if (std::find(known.begin(), known.end(), a.algorithm) == known.end()) {
        std::cerr << "unknown algorithm: " << a.algorithm << '\n';
        return kUsage;
    }
    SystemInstance inst = load_instance(a.instance);
    UcSolution uc = solve_uc(inst, opt);

    std::vector<std::string> algs;
    if (a.algorithm == "all") algs = {"lmp", "tlp", "ia1", "ia2", "iac1", "iac2", "opt"};
    else algs = {a.algorithm};

    std::vector<PricingRunReport> reps;
    std::map<std::string, PricingRunReport> ia;
    PricingRunReport lmp = compute_lmp(inst, uc, opt);
    for (const auto &name : algs) {
        PricingRunReport r;
        if (name == "lmp") r = lmp;
        else if (name == "tlp") r = run_tlp(inst, uc, opt);
        else if (name == "opt") r = run_opt(inst, uc, opt);
        else {
            IaVariant v = name.back() == '1' ? IaVariant::IA1 : IaVariant::IA2;
            std::string base = v == IaVariant::IA1 ? "ia1" : "ia2";
            if (!ia.count(base)) ia[base] = run_ia(inst, v, uc, opt);
            r = name.rfind("iac", 0) == 0 ? run_complementary(inst, ia[base], uc, opt) : ia[base];
        }
        r.price_diff = price_difference(r.price, lmp.price);
        reps.push_back(std::move(r));
    }

    std::string table = report_table(reps, a.timings);
    std::cout << "instance " << (inst.name.empty() ? a.instance : inst.name) << ": Z'_QIP " << uc.objective << " (bound "
              << uc.best_bound << ")\n"
              << table;
    if (!a.out.empty()) {
        fs::create_directories(a.out);
        for (const auto &r : reps) write_file(fs::path(a.out) / ("report_" + r.algorithm + ".json"), report_json(r, a.timings) + "\n");
        write_file(fs::path(a.out) / "table.txt", table);
    }
    if (a.dump_lp) {
        fs::path dir = a.out.empty() ? fs::path(".") : fs::path(a.out);
        fs::create_directories(dir);
        std::vector<std::string> gamma;
        for (const auto &r : reps)
            if (r.algorithm != "lmp" && r.algorithm != "opt") gamma = r.gamma;
        write_lp_file(build_pricing_lp(inst, gamma_mask(inst, gamma)).model, (dir / "p1_final.lp").string());
        std::vector<bool> all(inst.generators.size());
        for (size_t i = 0; i < all.size(); ++i) all[i] = classify(inst.generators[i]) == GeneratorClass::G4;
        write_lp_file(build_pricing_lp(inst, all).model, (dir / "p.lp").string());
    }
    return kOk;
}

struct VerifyArgs {
    std::vector<std::string> instances;
    int probes = 3;
    int horizon = 5;
    bool skip_pricing = false;
};

int cmd_verify(const VerifyArgs &a, VerifyOptions vo)
{
    std::vector<SystemInstance> insts;
    for (const auto &p : a.instances) insts.push_back(load_instance(p));
    std::vector<GeneratorSpec> gens = probe_generators(vo.seed, a.horizon, a.probes);
    for (const auto &inst : insts)
        for (const auto &g : inst.generators) gens.push_back(g);

    std::vector<CheckResult> results{check_dp_vs_enumeration(gens, vo), check_d4_duality(gens, vo),
                                     check_vertex_integrality(gens, vo)};
    if (!a.skip_pricing) {
        CheckResult mono;
        mono.suite = "uplift-monotonicity";
        for (const auto &inst : insts) {
            UcSolution uc = solve_uc(inst, vo.pricing);
            CheckResult r = check_uplift_monotone(inst, uc, vo);
            mono.checks += r.checks;
            if (!r.ok()) mono.fail(r.first_failure);
        }
        results.push_back(mono);
    }
    bool ok = true;
    for (const auto &r : results) {
        std::cout << (r.ok() ? "PASS " : "FAIL ") << r.suite << ": " << r.checks << " checks, " << r.failures << " failures";
        if (!r.ok()) std::cout << " (first: " << r.first_failure << ")";
        std::cout << '\n';
        ok = ok && r.ok();
    }
    return ok ? kOk : kVerify;
}

struct GenArgs {
    std::uint64_t seed = 1;
    int gens = 10;
    int horizon = 6;
    std::vector<int> mix;
    int buses = 1;
    int lines = 0;
    std::string out;
    std::string name;
};

int cmd_gen(const GenArgs &a)
{
    InstanceOptions io;
    io.horizon = a.horizon;
    io.buses = a.buses;
    io.lines = a.lines;
    io.name = a.name.empty() ? "gen_" + std::to_string(a.seed) : a.name;
    if (a.mix.empty()) io.mix = default_mix(a.gens);
    else if (a.mix.size() == 4) io.mix = {a.mix[0], a.mix[1], a.mix[2], a.mix[3]};
    else {
        std::cerr << "--mix needs four counts (G1,G2,G3,G4)\n";
        return kUsage;
    }
    std::string text = serialize_instance(random_instance(a.seed, io)) + "\n";
    if (a.out.empty()) std::cout << text;
    else write_file(a.out, text);
    return kOk;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Convex hull pricing for unit commitment"};
    app.require_subcommand(1);

    PricingOptions opt;
    auto add_solver_flags = [&](CLI::App *c) {
        c->add_option("--frac-tol", opt.frac_tol, "fractionality tolerance");
        c->add_option("--mip-gap", opt.mip.mip_gap, "relative MIP gap");
        c->add_option("--mip-time-limit", opt.mip.time_limit, "seconds");
        c->add_option("--iac-workers", opt.iac.workers, "IAC worker count (0: automatic)");
        c->add_option("--iac-nstop", opt.iac.n_stop, "stop IAC after this many accepted upgrades");
        c->add_option("--iac-time-limit", opt.iac.time_limit, "seconds");
    };

    SolveArgs sa;
    auto *solve = app.add_subcommand("solve", "price one instance");
    solve->add_option("--instance", sa.instance, "instance file")->required();
    solve->add_option("--algorithm", sa.algorithm, "lmp, tlp, ia1, ia2, iac1, iac2, opt or all");
    solve->add_option("--out", sa.out, "directory for report files");
    solve->add_flag("--dump-lp", sa.dump_lp, "write p1_final.lp and p.lp");
    solve->add_flag("--timings", sa.timings, "include wall times in reports");
    add_solver_flags(solve);

    VerifyArgs va;
    VerifyOptions vo;
    auto *verify = app.add_subcommand("verify", "run the oracle cross-check suites");
    verify->add_option("--instance", va.instances, "instance files")->expected(0, -1);
    verify->add_option("--seed", vo.seed, "seed for probe generators and prices");
    verify->add_option("--probes", va.probes, "random probe generators per class");
    verify->add_option("--horizon", va.horizon, "probe generator horizon");
    verify->add_option("--prices", vo.prices_per_generator, "random prices per generator");
    verify->add_flag("--skip-pricing", va.skip_pricing, "skip the uplift monotonicity suite");
    verify->add_flag("--corrupt-hull", vo.corrupt_hull, "drop the start-up ramp facet (negative control)")->group("");
    add_solver_flags(verify);

    GenArgs ga;
    auto *gen = app.add_subcommand("gen", "write a random instance");
    gen->add_option("--seed", ga.seed, "random seed");
    gen->add_option("--gens", ga.gens, "generator count (default class mix)");
    gen->add_option("--horizon", ga.horizon, "periods");
    gen->add_option("--mix", ga.mix, "counts of G1,G2,G3,G4")->delimiter(',');
    gen->add_option("--buses", ga.buses, "bus count");
    gen->add_option("--lines", ga.lines, "line count (needs buses > 1)");
    gen->add_option("--name", ga.name, "instance name");
    gen->add_option("--out", ga.out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        apply_env(opt);
        if (solve->parsed()) return cmd_solve(sa, opt);
        if (verify->parsed()) {
            vo.pricing = opt;
            vo.frac_tol = opt.frac_tol;
            return cmd_verify(va, vo);
        }
        if (gen->parsed()) return cmd_gen(ga);
    } catch (const DataError &e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const ModelError &e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const SolveError &e) {
        std::cerr << "solve failure: " << e.what() << '\n';
        return kSolve;
    }
    return kUsage;
}
