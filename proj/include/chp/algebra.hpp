#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace chp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { continuous, binary };
enum class Sense { le, eq, ge };

struct VarRef {
    int index = -1;
    std::string name;
    double lower = 0.0;
    double upper = kInf;
    VarKind kind = VarKind::continuous;
};

using Terms = std::vector<std::pair<int, double>>;

/** @brief Sparse affine expression sum(coef * var) + constant. */
struct LinExpr {
    Terms terms;
    double constant = 0.0;

    LinExpr() = default;
    LinExpr(double c) : constant(c) {}

    LinExpr &add(int var, double coef)
    {
        if (coef != 0.0) terms.emplace_back(var, coef);
        return *this;
    }
    LinExpr &add(const LinExpr &o, double scale = 1.0)
    {
        for (auto &[v, c] : o.terms) add(v, c * scale);
        constant += o.constant * scale;
        return *this;
    }
    /// Merges duplicate variables and drops zeros; order by variable index.
    LinExpr &compact();
    double eval(const std::vector<double> &x) const;
};

struct Constraint {
    Terms coeffs;
    Sense sense = Sense::le;
    double rhs = 0.0;
    std::string tag;
};

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/** @brief Sparse LP/MIP in minimization form. */
class LinearModel {
public:
    int add_variable(const std::string &name, double lower, double upper, VarKind kind = VarKind::continuous);
    /// Adds a row; duplicate coefficients are merged. Returns the row index.
    int add_constraint(const Terms &coeffs, Sense sense, double rhs, const std::string &tag);
    /// Adds expr (sense) rhs moving the expression constant to the right-hand side.
    int add_constraint(const LinExpr &expr, Sense sense, double rhs, const std::string &tag);
    void set_objective(const Terms &coeffs, double constant);
    void set_objective(const LinExpr &expr);
    void add_objective(const LinExpr &expr);

    int num_vars() const { return static_cast<int>(vars_.size()); }
    int num_constraints() const { return static_cast<int>(rows_.size()); }
    const VarRef &var(int j) const { return vars_.at(j); }
    VarRef &var_mut(int j) { return vars_.at(j); }
    const std::vector<VarRef> &variables() const { return vars_; }
    const Constraint &constraint(int i) const { return rows_.at(i); }
    const std::vector<Constraint> &constraints() const { return rows_; }
    const Terms &objective() const { return obj_; }
    double objective_constant() const { return obj_const_; }
    /// Row index for a tag, or -1.
    int find_constraint(const std::string &tag) const;
    bool has_binaries() const;

private:
    std::vector<VarRef> vars_;
    std::vector<Constraint> rows_;
    std::unordered_map<std::string, int> tags_;
    Terms obj_;
    double obj_const_ = 0.0;
};

inline LinearModel new_model() { return LinearModel{}; }

/// CPLEX LP format, byte-identical for identical models.
std::string export_lp_text(const LinearModel &model);
void write_lp_file(const LinearModel &model, const std::string &path);

/// Copy of model with the given variables pinned; throws if a value is out of bounds.
LinearModel fix_variables(const LinearModel &model, const std::vector<std::pair<int, double>> &assignments);

} // namespace chp
