#include "chp/algebra.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

namespace chp {

LinExpr &LinExpr::compact()
{
    std::map<int, double> acc;
    for (auto &[v, c] : terms) acc[v] += c;
    terms.clear();
    for (auto &[v, c] : acc)
        if (c != 0.0) terms.emplace_back(v, c);
    return *this;
}

double LinExpr::eval(const std::vector<double> &x) const
{
    double s = constant;
    for (auto &[v, c] : terms) s += c * x[v];
    return s;
}

int LinearModel::add_variable(const std::string &name, double lower, double upper, VarKind kind)
{
    if (std::isnan(lower) || std::isnan(upper) || lower > upper) throw ModelError("variable " + name + ": invalid bounds");
    if (kind == VarKind::binary && (lower < 0.0 || upper > 1.0)) throw ModelError("binary " + name + ": bounds outside [0,1]");
    VarRef v;
    v.index = num_vars();
    v.name = name;
    v.lower = lower;
    v.upper = upper;
    v.kind = kind;
    vars_.push_back(std::move(v));
    return vars_.back().index;
}

int LinearModel::add_constraint(const Terms &coeffs, Sense sense, double rhs, const std::string &tag)
{
    if (tags_.count(tag)) throw ModelError("duplicate constraint tag " + tag);
    if (!std::isfinite(rhs)) throw ModelError("constraint " + tag + ": non-finite rhs");
    LinExpr e;
    for (auto &[v, c] : coeffs) {
        if (v < 0 || v >= num_vars()) throw ModelError("constraint " + tag + ": unknown variable");
        if (!std::isfinite(c)) throw ModelError("constraint " + tag + ": non-finite coefficient");
        e.add(v, c);
    }
    e.compact();
    Constraint r;
    r.coeffs = std::move(e.terms);
    r.sense = sense;
    r.rhs = rhs;
    r.tag = tag;
    rows_.push_back(std::move(r));
    tags_.emplace(tag, num_constraints() - 1);
    return num_constraints() - 1;
}

int LinearModel::add_constraint(const LinExpr &expr, Sense sense, double rhs, const std::string &tag)
{
    return add_constraint(expr.terms, sense, rhs - expr.constant, tag);
}

void LinearModel::set_objective(const Terms &coeffs, double constant)
{
    LinExpr e;
    for (auto &[v, c] : coeffs) {
        if (v < 0 || v >= num_vars()) throw ModelError("objective: unknown variable");
        e.add(v, c);
    }
    e.compact();
    obj_ = std::move(e.terms);
    obj_const_ = constant;
}

void LinearModel::set_objective(const LinExpr &expr) { set_objective(expr.terms, expr.constant); }

void LinearModel::add_objective(const LinExpr &expr)
{
    LinExpr e;
    e.terms = obj_;
    e.constant = obj_const_;
    e.add(expr);
    set_objective(e);
}

int LinearModel::find_constraint(const std::string &tag) const
{
    auto it = tags_.find(tag);
    return it == tags_.end() ? -1 : it->second;
}

bool LinearModel::has_binaries() const
{
    return std::any_of(vars_.begin(), vars_.end(), [](const VarRef &v) { return v.kind == VarKind::binary; });
}

namespace {

// %.17g round-trips doubles; integers print without exponent.
std::string num(double v)
{
    char buf[40];
    if (v == std::floor(v) && std::abs(v) < 1e15)
        std::snprintf(buf, sizeof buf, "%.0f", v);
    else
        std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// LP names may not contain brackets or colons in every reader; map them.
std::string lp_name(const std::string &s)
{
    std::string out;
    for (char ch : s) {
        if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.')
            out += ch;
        else
            out += '_';
    }
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0])) || out[0] == '.') out = "n" + out;
    return out;
}

void write_terms(std::string &out, const Terms &t, const std::vector<std::string> &names)
{
    if (t.empty()) {
        out += " 0 " + names.front();
        return;
    }
    int col = 0;
    for (auto &[v, c] : t) {
        out += (c < 0 ? " - " : " + ");
        out += num(std::abs(c)) + " " + names[v];
        if (++col % 8 == 0) out += "\n ";
    }
}

} // namespace

std::string export_lp_text(const LinearModel &m)
{
    std::vector<std::string> names;
    for (int j = 0; j < m.num_vars(); ++j) names.push_back("x" + std::to_string(j) + "_" + lp_name(m.var(j).name));
    if (names.empty()) names.push_back("dummy");
    std::string out = "\\ generated by chp\nMinimize\n obj:";
    write_terms(out, m.objective(), names);
    if (m.objective_constant() != 0.0) out += (m.objective_constant() < 0 ? " - " : " + ") + num(std::abs(m.objective_constant()));
    out += "\nSubject To\n";
    for (int i = 0; i < m.num_constraints(); ++i) {
        const auto &r = m.constraint(i);
        out += " r" + std::to_string(i) + "_" + lp_name(r.tag) + ":";
        write_terms(out, r.coeffs, names);
        out += r.sense == Sense::le ? " <= " : r.sense == Sense::ge ? " >= " : " = ";
        out += num(r.rhs) + "\n";
    }
    out += "Bounds\n";
    for (int j = 0; j < m.num_vars(); ++j) {
        const auto &v = m.var(j);
        if (v.lower == -kInf && v.upper == kInf)
            out += " " + names[j] + " free\n";
        else if (v.lower == v.upper)
            out += " " + names[j] + " = " + num(v.lower) + "\n";
        else {
            out += " " + (v.lower == -kInf ? std::string("-inf") : num(v.lower)) + " <= " + names[j];
            if (v.upper < kInf) out += " <= " + num(v.upper);
            out += "\n";
        }
    }
    bool any_bin = false;
    for (int j = 0; j < m.num_vars(); ++j)
        if (m.var(j).kind == VarKind::binary) {
            if (!any_bin) out += "Binaries\n";
            any_bin = true;
            out += " " + names[j] + "\n";
        }
    out += "End\n";
    return out;
}

void write_lp_file(const LinearModel &model, const std::string &path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ModelError("cannot write " + path);
    f << export_lp_text(model);
}

LinearModel fix_variables(const LinearModel &model, const std::vector<std::pair<int, double>> &assignments)
{
    LinearModel out = model;
    for (auto &[j, val] : assignments) {
        if (j < 0 || j >= out.num_vars()) throw ModelError("fix_variables: unknown variable");
        VarRef &v = out.var_mut(j);
        if (val < v.lower || val > v.upper)
            throw ModelError("fix_variables: value " + num(val) + " outside bounds of " + v.name);
        v.lower = v.upper = val;
    }
    return out;
}

} // namespace chp
