#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "chp/algebra.hpp"

namespace chp {

/// A required solve ended without an optimal (or incumbent) solution.
class SolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Branching { most_fractional, pseudo_cost };

struct SolverOptions {
    double feasibility_tol = 1e-7;
    double optimality_tol = 1e-7;
    double mip_gap = 1e-3;
    long iteration_limit = 5'000'000;
    double time_limit = 1e30; // seconds
    Branching branching = Branching::most_fractional;
    int bland_threshold = 1000;   // consecutive degenerate pivots before Bland's rule
    long node_limit = 1'000'000;
    double integrality_tol = 1e-6;
};

enum class SolveStatus { optimal, infeasible, unbounded, iteration_limit, time_limit };

const char *to_string(SolveStatus s);

/// Basis statuses for structural then logical variables (0 basic, 1 lower, 2 upper, 3 free at zero).
struct Basis {
    std::vector<signed char> status;
};

struct SolveResult {
    SolveStatus status = SolveStatus::infeasible;
    std::vector<double> primal;        // per variable
    std::vector<double> dual;          // per constraint (LP only)
    std::vector<double> reduced_cost;  // per variable (LP only)
    double objective = 0.0;
    double best_bound = 0.0;           // MIP: proven lower bound
    bool has_incumbent = false;
    long iterations = 0;
    long nodes = 0;
    double elapsed = 0.0;
    std::shared_ptr<Basis> basis;
    bool ok() const { return status == SolveStatus::optimal; }
};

/// Bounded primal simplex; binaries are treated as [0,1] boxes.
SolveResult solve_lp(const LinearModel &model, const SolverOptions &opts = {}, const Basis *warm = nullptr);

/// Best-bound branch-and-bound over binaries.
SolveResult solve_mip(const LinearModel &model, const SolverOptions &opts = {});

/// |a-b| <= tol*(1+max(|a|,|b|))
bool close(double a, double b, double tol);

/// Largest complementary-slackness violation of an LP solution, each scaled by 1+|rhs|.
double complementary_slackness_violation(const LinearModel &model, const SolveResult &res);
/// Largest bound or row violation of a primal point.
double primal_violation(const LinearModel &model, const std::vector<double> &x);

} // namespace chp
