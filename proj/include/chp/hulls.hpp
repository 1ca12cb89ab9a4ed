#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "chp/algebra.hpp"
#include "chp/instance.hpp"

namespace chp {

enum class Formulation {
    ThreeBin, // binary 3-bin model
    D1,
    D2,
    D3,       // for G4 units: the full 3-bin rows relaxed, plus the D2/D3 families
    D4        // extended interval formulation
};

const char *to_string(Formulation f);

/** @brief Interval index sets of the extended formulation. Periods are 1-based; k=0 is "off from period 1". */
struct IntervalIndexSets {
    bool initially_on = false;
    int t0 = 0;                                // first allowed shutdown lock, clipped to T
    std::vector<int> Kbar;                     // w_k domain; {0} when initially off
    std::vector<std::pair<int, int>> TK1;      // [1,k], k in Kbar, k >= 1
    std::vector<std::pair<int, int>> TK2;      // [t,k] ON after a restart at t
    std::vector<std::pair<int, int>> KT;       // [k,t]: last on at k, restart at t (k=0 virtual when initially off)
    std::vector<int> theta_domain;             // OFF nodes (last on at k)
    std::vector<int> restarts;                 // periods with an incoming z
};

/** @brief Per-generator view of a formulation inside a model. Per-period vectors are indexed t-1. */
struct FormulationHandle {
    Formulation kind = Formulation::D1;
    std::string gen_id;
    std::string prefix;
    std::vector<LinExpr> x, u, v, e;
    std::vector<LinExpr> energy;   // generation cost incl. no-load per period (f + G u, or sum of phi)
    LinExpr cost;                  // g or g'
    std::vector<int> status_vars;  // u,v,e or w,y,z,theta
    std::map<std::string, int> vars;
};

IntervalIndexSets build_index_sets(const GeneratorSpec &g);

struct BuildFlags {
    bool binary = false;          // mark status variables binary
    bool strengthen = false;      // 3-bin only: add the start-up ramp facet family
    bool drop_strampup = false;   // negative control: omit the start-up ramp facet from D2/D3
};

FormulationHandle build_3bin(LinearModel &m, const GeneratorSpec &g, const std::string &prefix, BuildFlags flags = {.binary = true});
FormulationHandle build_hull_D1(LinearModel &m, const GeneratorSpec &g, const std::string &prefix, BuildFlags flags = {});
FormulationHandle build_hull_D2(LinearModel &m, const GeneratorSpec &g, const std::string &prefix, BuildFlags flags = {});
FormulationHandle build_hull_D3(LinearModel &m, const GeneratorSpec &g, const std::string &prefix, BuildFlags flags = {});
FormulationHandle build_hull_D4(LinearModel &m, const GeneratorSpec &g, const std::string &prefix, BuildFlags flags = {});
FormulationHandle build_formulation(LinearModel &m, const GeneratorSpec &g, Formulation kind, const std::string &prefix,
                                    BuildFlags flags = {});

/// The tightest published formulation for the generator's class (D1/D2/D3, D3 as relaxation for G4).
Formulation default_formulation(const GeneratorSpec &g);

/// Optional per-period coefficients added to the objective on u, v, e and x.
struct ExtraObjective {
    std::vector<double> on, start, stop, gen;
};

/// Single-generator model: cost - price'x (+ extra terms).
struct SingleModel {
    LinearModel model;
    FormulationHandle h;
};
SingleModel single_generator_model(const GeneratorSpec &g, Formulation kind, const std::vector<double> &price,
                                   const ExtraObjective *extra = nullptr, BuildFlags flags = {});

enum class RowKind { balance, line_pos, line_neg };

struct SystemRow {
    int row = -1;
    RowKind kind = RowKind::balance;
    int t = 0;     // 1-based
    int line = -1;
    double rhs = 0;
};

struct SystemModel {
    LinearModel model;
    std::vector<FormulationHandle> gens;
    std::vector<SystemRow> rows;
};

/// Coefficient of generator i's output in system row r.
double system_coef(const SystemInstance &inst, const SystemRow &r, int gen);

SystemModel build_system(const SystemInstance &inst, const std::vector<Formulation> &kinds, BuildFlags flags = {});

/// A 3-bin point of one generator (per-period vectors, index t-1).
struct HatPoint {
    std::vector<double> x, f, u, v, e;
};
HatPoint read_hat(const FormulationHandle &h, const GeneratorSpec &g, const std::vector<double> &sol);

/// Feasibility model: D4 rows plus the interval-to-3-bin mapping pinned at hat.
LinearModel build_P3(const GeneratorSpec &g, const HatPoint &hat, double tol = 1e-6);

} // namespace chp
