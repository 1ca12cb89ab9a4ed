#pragma once

#include <limits>
#include <string>
#include <vector>

#include "chp/hulls.hpp"
#include "chp/instance.hpp"
#include "chp/simplex.hpp"

namespace chp {

/// Row duals of the system constraints (balance rows first, then line rows) plus the derived bus prices.
struct PriceVector {
    std::vector<double> rows;                    // one per SystemRow, in build_system order
    std::vector<std::vector<double>> bus;        // [t][b], $/MWh
};

struct IacOptions {
    int workers = 0;                             // 0: |G4 \ Gamma| capped at hardware threads
    int n_stop = std::numeric_limits<int>::max();
    double time_limit = 1e30;                    // seconds
};

struct PricingOptions {
    SolverOptions lp;
    SolverOptions mip;
    double frac_tol = 1e-5;
    double p3_tol = 1e-6;
    double improve_tol = 1e-6;                   // IAC acceptance, relative
    int max_p1_solves = 500;
    IacOptions iac;
    PricingOptions() { mip.mip_gap = 1e-6; }
};

/// Incumbent of the commitment MIP shared by every algorithm on one instance.
struct UcSolution {
    double objective = 0.0;                      // Z'_QIP
    double best_bound = 0.0;
    std::vector<std::vector<int>> on;            // [gen][t]
    std::vector<std::vector<double>> x;          // [gen][t]
    std::vector<double> primal;                  // of the model built by uc_formulations
    long nodes = 0;
    double elapsed = 0.0;
};

/// Commitment MIP over the exact per-generator models (D1/D2/D3 for G1-G3, D4 for G4, all binary).
UcSolution solve_uc(const SystemInstance &inst, const PricingOptions &opt = {});
std::vector<Formulation> uc_formulations(const SystemInstance &inst);

struct IterationRecord {
    std::string stage;                           // "P1", "inner", "outer", "iac"
    std::vector<std::string> added;              // generators moved to D4 before this solve
    double p1_objective = 0.0;
    double uplift = 0.0;                         // Z'_QIP - P1 objective
    double elapsed = 0.0;
};

struct PricingRunReport {
    std::string algorithm;
    PriceVector price;
    double z_qip = 0.0;
    double z_qip_bound = 0.0;
    double z_c = 0.0;                            // from the last P2 evaluation
    double z_c_oracle = 0.0;                     // same price, per-generator DP
    double uplift = 0.0;                         // Z'_QIP - z_c_oracle, paid at the posted price
    double uplift_p2 = 0.0;                      // Z'_QIP - z_c; overstates it while P2 has relaxed units
    int fractional_flags = 0;                    // in the last P2 evaluation
    std::vector<std::string> gamma;              // generators on D4
    std::vector<std::string> gamma_initial;      // forced to D4 (duration-dependent shut-down cost)
    std::vector<IterationRecord> trace;
    int p1_solves = 0;
    bool iteration_cap = false;
    double price_diff = std::numeric_limits<double>::quiet_NaN(); // vs LMP
    double wall_time = 0.0;
};

/// Bus prices from row duals.
PriceVector make_price(const SystemInstance &inst, const std::vector<SystemRow> &rows, const std::vector<double> &duals);

/// Per-period output price seen by generator gen.
std::vector<double> generator_price(const SystemInstance &inst, const std::vector<SystemRow> &rows,
                                    const std::vector<double> &gamma, int gen);

/// Rows of build_system for inst, without building any generator model.
std::vector<SystemRow> system_rows(const SystemInstance &inst);

double compute_uplift(double z_qip_upper, double z_c_at_gamma);

/// Average absolute deviation over periods and buses.
double price_difference(const PriceVector &a, const PriceVector &b);

struct LagrangianResult {
    double z_c = 0.0;
    std::vector<double> value;                   // per generator: min of cost - price'x over its model
    std::vector<std::vector<double>> x;
    std::vector<bool> fractional;                // only set for G4 generators outside Gamma
    int flags() const;
};

/// P2: every generator's LP over its current model (D4 when in_gamma).
LagrangianResult lagrangian_value(const SystemInstance &inst, const std::vector<bool> &in_gamma,
                                  const std::vector<double> &gamma, const PricingOptions &opt = {});

/// Same price, every generator solved exactly by the self-scheduling DP.
LagrangianResult lagrangian_oracle(const SystemInstance &inst, const std::vector<double> &gamma);

/// Row-dual LMP at the fixed incumbent commitment; uplift evaluated with the DP oracle.
PricingRunReport compute_lmp(const SystemInstance &inst, const UcSolution &uc, const PricingOptions &opt = {});

/// P1 with the class formulations only.
PricingRunReport run_tlp(const SystemInstance &inst, const UcSolution &uc, const PricingOptions &opt = {});

enum class IaVariant { IA1, IA2 };

PricingRunReport run_ia(const SystemInstance &inst, IaVariant variant, const UcSolution &uc, const PricingOptions &opt = {});

PricingRunReport run_complementary(const SystemInstance &inst, const PricingRunReport &base, const UcSolution &uc,
                                   const PricingOptions &opt = {});

/// P: D4 for every G4 generator.
PricingRunReport run_opt(const SystemInstance &inst, const UcSolution &uc, const PricingOptions &opt = {});

/// Formulation used in P1 for generator i.
Formulation pricing_formulation(const GeneratorSpec &g, bool in_gamma);

/// P1 (or P when every G4 generator is in Gamma) as a continuous system model.
SystemModel build_pricing_lp(const SystemInstance &inst, const std::vector<bool> &in_gamma);
std::vector<bool> gamma_mask(const SystemInstance &inst, const std::vector<std::string> &ids);

/// True if the generator cannot be modelled by the 3-bin families and starts on D4.
bool needs_interval_model(const GeneratorSpec &g);

std::string report_json(const PricingRunReport &r, bool timings = false);
/// Aligned comparison table; the first report is the reference for "Save".
std::string report_table(const std::vector<PricingRunReport> &reports, bool timings = false);

} // namespace chp
