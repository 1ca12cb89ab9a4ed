#include "chp/simplex.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace chp {

const char *to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::iteration_limit: return "iteration_limit";
    default: return "time_limit";
    }
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b))); }

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

enum : signed char { BASIC = 0, AT_LB = 1, AT_UB = 2, AT_ZERO = 3 };

// Column-compressed structural matrix plus bounds of structural and logical variables.
// Row i reads a_i x - s_i = 0 with s_i bounded by the row sense.
struct LpForm {
    int m = 0, n = 0;
    std::vector<int> cbeg, rind;
    std::vector<double> val;
    std::vector<double> c;
    std::vector<double> lo, up;
    double obj_const = 0.0;
};

LpForm make_form(const LinearModel &model)
{
    LpForm f;
    f.m = model.num_constraints();
    f.n = model.num_vars();
    std::vector<int> cnt(f.n + 1, 0);
    for (const auto &r : model.constraints())
        for (auto &[v, c] : r.coeffs) cnt[v + 1]++;
    f.cbeg.assign(f.n + 1, 0);
    for (int j = 0; j < f.n; ++j) f.cbeg[j + 1] = f.cbeg[j] + cnt[j + 1];
    f.rind.resize(f.cbeg[f.n]);
    f.val.resize(f.cbeg[f.n]);
    std::vector<int> fill(f.cbeg.begin(), f.cbeg.end() - 1);
    for (int i = 0; i < f.m; ++i)
        for (auto &[v, c] : model.constraint(i).coeffs) {
            f.rind[fill[v]] = i;
            f.val[fill[v]++] = c;
        }
    f.c.assign(f.n, 0.0);
    for (auto &[v, c] : model.objective()) f.c[v] += c;
    f.obj_const = model.objective_constant();
    f.lo.resize(f.n + f.m);
    f.up.resize(f.n + f.m);
    for (int j = 0; j < f.n; ++j) {
        f.lo[j] = model.var(j).lower;
        f.up[j] = model.var(j).upper;
    }
    for (int i = 0; i < f.m; ++i) {
        const auto &r = model.constraint(i);
        f.lo[f.n + i] = r.sense == Sense::le ? -kInf : r.rhs;
        f.up[f.n + i] = r.sense == Sense::ge ? kInf : r.rhs;
    }
    return f;
}

class Simplex {
public:
    Simplex(const LpForm &f, const std::vector<double> &lo, const std::vector<double> &up, const SolverOptions &o)
        : F(f), lo_(lo), up_(up), opt(o), m(f.m), n(f.n), N(f.n + f.m)
    {
    }

    SolveStatus run(const Basis *warm, Clock::time_point start);

    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> d;
    std::vector<signed char> st;
    long iters = 0;

private:
    const LpForm &F;
    const std::vector<double> &lo_, &up_;
    const SolverOptions &opt;
    int m, n, N;
    std::vector<int> head;
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    struct Eta {
        int r;
        double piv;
        std::vector<int> idx;
        std::vector<double> val;
    };
    std::vector<Eta> etas;
    Eigen::VectorXd work;

    template <class Fn> void for_col(int j, Fn fn) const
    {
        if (j < n) {
            for (int p = F.cbeg[j]; p < F.cbeg[j + 1]; ++p) fn(F.rind[p], F.val[p]);
        } else {
            fn(j - n, -1.0);
        }
    }

    double dot_col(int j, const std::vector<double> &v) const
    {
        if (j >= n) return -v[j - n];
        double s = 0;
        for (int p = F.cbeg[j]; p < F.cbeg[j + 1]; ++p) s += F.val[p] * v[F.rind[p]];
        return s;
    }

    double ptol(double bound) const { return opt.feasibility_tol * (1.0 + 1e-3 * std::abs(bound)); }

    void slack_basis();
    bool factor();
    void ftran(std::vector<double> &v);
    void btran(std::vector<double> &v);
    void compute_xb();
    void place_nonbasic(int j);
    double infeasibility(std::vector<double> *cb);
};

void Simplex::place_nonbasic(int j)
{
    if (st[j] == BASIC) return;
    bool fl = lo_[j] > -kInf, fu = up_[j] < kInf;
    if (st[j] == AT_LB && !fl) st[j] = fu ? AT_UB : AT_ZERO;
    if (st[j] == AT_UB && !fu) st[j] = fl ? AT_LB : AT_ZERO;
    if (st[j] == AT_ZERO && (fl || fu)) st[j] = fl ? AT_LB : AT_UB;
    x[j] = st[j] == AT_LB ? lo_[j] : st[j] == AT_UB ? up_[j] : 0.0;
}

void Simplex::slack_basis()
{
    st.assign(N, AT_LB);
    head.resize(m);
    for (int j = 0; j < n; ++j) place_nonbasic(j);
    for (int i = 0; i < m; ++i) {
        head[i] = n + i;
        st[n + i] = BASIC;
    }
}

bool Simplex::factor()
{
    etas.clear();
    if (m == 0) return true;
    std::vector<Eigen::Triplet<double>> trip;
    for (int r = 0; r < m; ++r) for_col(head[r], [&](int i, double a) { trip.emplace_back(i, r, a); });
    Eigen::SparseMatrix<double> B(m, m);
    B.setFromTriplets(trip.begin(), trip.end());
    B.makeCompressed();
    lu.analyzePattern(B);
    lu.factorize(B);
    if (lu.info() != Eigen::Success) return false;
    // Reject numerically singular factors: |det| underflow is a poor test, so probe a solve.
    Eigen::VectorXd probe = Eigen::VectorXd::Ones(m);
    Eigen::VectorXd sol = lu.solve(probe);
    return sol.allFinite();
}

void Simplex::ftran(std::vector<double> &v)
{
    if (m == 0) return;
    work = Eigen::Map<Eigen::VectorXd>(v.data(), m);
    Eigen::VectorXd z = lu.solve(work);
    for (int i = 0; i < m; ++i) v[i] = z[i];
    for (const auto &e : etas) {
        double zr = v[e.r] / e.piv;
        if (zr == 0.0) continue;
        v[e.r] = zr;
        for (size_t k = 0; k < e.idx.size(); ++k) v[e.idx[k]] -= e.val[k] * zr;
    }
}

void Simplex::btran(std::vector<double> &v)
{
    if (m == 0) return;
    for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
        double s = 0;
        for (size_t k = 0; k < it->idx.size(); ++k) s += it->val[k] * v[it->idx[k]];
        v[it->r] = (v[it->r] - s) / it->piv;
    }
    work = Eigen::Map<Eigen::VectorXd>(v.data(), m);
    Eigen::VectorXd z = lu.transpose().solve(work);
    for (int i = 0; i < m; ++i) v[i] = z[i];
}

void Simplex::compute_xb()
{
    std::vector<double> rhs(m, 0.0);
    for (int j = 0; j < N; ++j)
        if (st[j] != BASIC && x[j] != 0.0) for_col(j, [&](int i, double a) { rhs[i] -= a * x[j]; });
    ftran(rhs);
    for (int r = 0; r < m; ++r) x[head[r]] = rhs[r];
}

// Sum of bound violations of basic variables; optionally fills the phase-1 cost of the basis.
double Simplex::infeasibility(std::vector<double> *cb)
{
    double s = 0;
    if (cb) cb->assign(m, 0.0);
    for (int r = 0; r < m; ++r) {
        int j = head[r];
        if (x[j] < lo_[j] - ptol(lo_[j])) {
            s += lo_[j] - x[j];
            if (cb) (*cb)[r] = -1.0;
        } else if (x[j] > up_[j] + ptol(up_[j])) {
            s += x[j] - up_[j];
            if (cb) (*cb)[r] = 1.0;
        }
    }
    return s;
}

SolveStatus Simplex::run(const Basis *warm, Clock::time_point start)
{
    x.assign(N, 0.0);
    bool warm_ok = false;
    if (warm && static_cast<int>(warm->status.size()) == N) {
        st = warm->status;
        head.clear();
        for (int j = 0; j < N; ++j)
            if (st[j] == BASIC) head.push_back(j);
        if (static_cast<int>(head.size()) == m) {
            for (int j = 0; j < N; ++j) place_nonbasic(j);
            warm_ok = factor();
        }
    }
    if (!warm_ok) {
        slack_basis();
        if (!factor()) return SolveStatus::iteration_limit;
    }
    compute_xb();

    const int refactor_every = 64;
    long degenerate = 0;
    bool bland = false;
    bool ref_phase1 = false;
    double ref_obj = kInf;
    int since_factor = 0;
    int final_checks = 0;
    std::vector<double> cb(m), alpha(m), col(m);
    d.assign(N, 0.0);

    while (true) {
        if (iters >= opt.iteration_limit) return SolveStatus::iteration_limit;
        if ((iters & 127) == 0 && seconds_since(start) > opt.time_limit) return SolveStatus::time_limit;
        if (since_factor >= refactor_every) {
            if (!factor()) {
                slack_basis();
                if (!factor()) return SolveStatus::iteration_limit;
            }
            compute_xb();
            since_factor = 0;
        }

        double infeas = infeasibility(&cb);
        bool phase1 = infeas > 0;
        if (!phase1)
            for (int r = 0; r < m; ++r) cb[r] = head[r] < n ? F.c[head[r]] : 0.0;
        y = cb;
        btran(y);

        // pricing
        int q = -1;
        double best = 0;
        for (int j = 0; j < N; ++j) {
            if (st[j] == BASIC) continue;
            if (lo_[j] == up_[j]) continue;
            double cj = (!phase1 && j < n) ? F.c[j] : 0.0;
            double dj = cj - dot_col(j, y);
            d[j] = dj;
            bool elig = (st[j] == AT_LB && dj < -opt.optimality_tol) || (st[j] == AT_UB && dj > opt.optimality_tol) ||
                        (st[j] == AT_ZERO && std::abs(dj) > opt.optimality_tol);
            if (!elig) continue;
            if (bland) {
                q = j;
                break;
            }
            if (std::abs(dj) > best) {
                best = std::abs(dj);
                q = j;
            }
        }

        if (q < 0) {
            // Confirm on a fresh factorization before declaring the outcome.
            if (since_factor > 0 && final_checks < 3) {
                ++final_checks;
                since_factor = refactor_every;
                continue;
            }
            if (phase1) return SolveStatus::infeasible;
            for (int r = 0; r < m; ++r) d[head[r]] = 0.0;
            return SolveStatus::optimal;
        }

        std::fill(col.begin(), col.end(), 0.0);
        for_col(q, [&](int i, double a) { col[i] = a; });
        alpha = col;
        ftran(alpha);
        const double dir = d[q] < 0 ? 1.0 : -1.0;

        // ratio test
        double range = (lo_[q] > -kInf && up_[q] < kInf) ? up_[q] - lo_[q] : kInf;
        int leave = -1;
        double theta = kInf;
        double leave_target = 0;
        auto limit_of = [&](int r, double &target, double &rate) -> bool {
            rate = -dir * alpha[r];
            if (std::abs(alpha[r]) < 1e-9) return false;
            int j = head[r];
            double xb = x[j];
            bool below = xb < lo_[j] - ptol(lo_[j]);
            bool above = xb > up_[j] + ptol(up_[j]);
            if (rate > 0) {
                if (above) return false;
                target = below ? lo_[j] : up_[j];
            } else {
                if (below) return false;
                target = above ? up_[j] : lo_[j];
            }
            return std::abs(target) < kInf;
        };
        if (bland) {
            for (int r = 0; r < m; ++r) {
                double target, rate;
                if (!limit_of(r, target, rate)) continue;
                double ratio = std::max((target - x[head[r]]) / rate, 0.0);
                if (ratio < theta - 1e-12 || (ratio <= theta + 1e-12 && leave >= 0 && head[r] < head[leave])) {
                    theta = std::min(theta, ratio);
                    leave = r;
                    leave_target = target;
                }
            }
        } else {
            double relaxed = kInf;
            for (int r = 0; r < m; ++r) {
                double target, rate;
                if (!limit_of(r, target, rate)) continue;
                double tol = ptol(target);
                double rr = rate > 0 ? (target + tol - x[head[r]]) / rate : (target - tol - x[head[r]]) / rate;
                relaxed = std::min(relaxed, rr);
            }
            double biggest = 0;
            for (int r = 0; r < m; ++r) {
                double target, rate;
                if (!limit_of(r, target, rate)) continue;
                double ratio = (target - x[head[r]]) / rate;
                if (ratio <= relaxed && std::abs(alpha[r]) > biggest) {
                    biggest = std::abs(alpha[r]);
                    leave = r;
                    theta = std::max(ratio, 0.0);
                    leave_target = target;
                }
            }
        }

        bool flip = range < kInf && range <= theta;
        if (flip) {
            theta = range;
            leave = -1;
        }
        if (leave < 0 && !flip) {
            if (!phase1) return SolveStatus::unbounded;
            // Phase 1 cannot be unbounded; this is numerical drift.
            if (final_checks++ > 5) return SolveStatus::iteration_limit;
            since_factor = refactor_every;
            continue;
        }

        ++iters;
        // Stalling is measured on the objective so that tiny steps, which can cycle too, count.
        // Once Bland's rule is on it stays on for the phase.
        double cur = infeas;
        if (!phase1) {
            cur = 0;
            for (int r = 0; r < m; ++r) cur += cb[r] * x[head[r]];
            for (int j = 0; j < n; ++j)
                if (st[j] != BASIC) cur += F.c[j] * x[j];
        }
        if (phase1 != ref_phase1) {
            ref_phase1 = phase1;
            ref_obj = cur;
            degenerate = 0;
            bland = false;
        } else if (cur < ref_obj - 1e-9 * (1.0 + std::abs(ref_obj))) {
            ref_obj = cur;
            degenerate = 0;
        } else if (++degenerate > opt.bland_threshold) {
            bland = true;
        }

        if (theta > 0) {
            x[q] += dir * theta;
            for (int r = 0; r < m; ++r)
                if (alpha[r] != 0.0) x[head[r]] -= dir * alpha[r] * theta;
        }
        if (flip) {
            st[q] = dir > 0 ? AT_UB : AT_LB;
            x[q] = dir > 0 ? up_[q] : lo_[q];
            continue;
        }
        int jl = head[leave];
        x[jl] = leave_target;
        st[jl] = (leave_target == lo_[jl]) ? AT_LB : AT_UB;
        st[q] = BASIC;
        head[leave] = q;
        Eta e;
        e.r = leave;
        e.piv = alpha[leave];
        for (int i = 0; i < m; ++i)
            if (i != leave && std::abs(alpha[i]) > 1e-14) {
                e.idx.push_back(i);
                e.val.push_back(alpha[i]);
            }
        etas.push_back(std::move(e));
        ++since_factor;
        final_checks = 0;
    }
}

SolveResult finish_lp(const LpForm &f, Simplex &s, SolveStatus status, Clock::time_point start)
{
    SolveResult res;
    res.status = status;
    res.iterations = s.iters;
    res.elapsed = seconds_since(start);
    if (status != SolveStatus::optimal) return res;
    res.primal.assign(s.x.begin(), s.x.begin() + f.n);
    res.dual = s.y;
    res.reduced_cost.assign(s.d.begin(), s.d.begin() + f.n);
    for (int j = 0; j < f.n; ++j)
        if (s.st[j] == BASIC) res.reduced_cost[j] = 0.0;
    double obj = f.obj_const;
    for (int j = 0; j < f.n; ++j) obj += f.c[j] * res.primal[j];
    res.objective = obj;
    res.best_bound = obj;
    res.basis = std::make_shared<Basis>(Basis{s.st});
    return res;
}

SolveResult solve_form(const LpForm &f, const std::vector<double> &lo, const std::vector<double> &up, const SolverOptions &opts,
                       const Basis *warm, Clock::time_point start)
{
    for (int j = 0; j < f.n + f.m; ++j)
        if (lo[j] > up[j] + opts.feasibility_tol) {
            SolveResult r;
            r.status = SolveStatus::infeasible;
            return r;
        }
    Simplex s(f, lo, up, opts);
    SolveStatus st = s.run(warm, start);
    return finish_lp(f, s, st, start);
}

} // namespace

SolveResult solve_lp(const LinearModel &model, const SolverOptions &opts, const Basis *warm)
{
    auto start = Clock::now();
    LpForm f = make_form(model);
    return solve_form(f, f.lo, f.up, opts, warm, start);
}

namespace {

struct Node {
    double bound;
    long order;
    std::vector<std::tuple<int, double, double>> fixes;
    std::shared_ptr<Basis> warm;
};

struct NodeCmp {
    bool operator()(const Node &a, const Node &b) const
    {
        if (a.bound != b.bound) return a.bound > b.bound;
        return a.order > b.order;
    }
};

} // namespace

SolveResult solve_mip(const LinearModel &model, const SolverOptions &opts)
{
    auto start = Clock::now();
    LpForm f = make_form(model);
    std::vector<int> bins;
    for (int j = 0; j < f.n; ++j)
        if (model.var(j).kind == VarKind::binary) bins.push_back(j);

    SolveResult best;
    best.status = SolveStatus::infeasible;
    double incumbent = kInf;
    long nodes = 0, iters = 0, order = 0;
    std::vector<double> pc_up(f.n, 0.0), pc_dn(f.n, 0.0);
    std::vector<int> pc_nu(f.n, 0), pc_nd(f.n, 0);

    auto solve_node = [&](const std::vector<std::tuple<int, double, double>> &fixes, const Basis *warm) {
        std::vector<double> lo = f.lo, up = f.up;
        for (auto &[j, l, u] : fixes) {
            lo[j] = l;
            up[j] = u;
        }
        SolveResult r = solve_form(f, lo, up, opts, warm, start);
        iters += r.iterations;
        ++nodes;
        return r;
    };
    auto fractional = [&](const std::vector<double> &x) {
        std::vector<int> fr;
        for (int j : bins)
            if (std::abs(x[j] - std::round(x[j])) > opts.integrality_tol) fr.push_back(j);
        return fr;
    };
    auto accept = [&](const SolveResult &r) {
        if (r.objective < incumbent) {
            incumbent = r.objective;
            best = r;
            for (int j : bins) best.primal[j] = std::round(best.primal[j]);
            best.has_incumbent = true;
        }
    };
    auto gap_closed = [&](double bound) { return incumbent < kInf && incumbent - bound <= opts.mip_gap * std::max(1.0, std::abs(incumbent)); };

    SolveResult root = solve_node({}, nullptr);
    if (root.status == SolveStatus::infeasible || root.status == SolveStatus::unbounded) {
        root.nodes = nodes;
        root.elapsed = seconds_since(start);
        return root;
    }
    if (!root.ok()) {
        root.nodes = nodes;
        return root;
    }
    if (fractional(root.primal).empty()) {
        accept(root);
        best.best_bound = root.objective;
        best.status = SolveStatus::optimal;
        best.nodes = nodes;
        best.iterations = iters;
        best.elapsed = seconds_since(start);
        return best;
    }

    // Dive from the root: fix the least fractional binary to its rounding until integral or infeasible.
    {
        std::vector<std::tuple<int, double, double>> fixes;
        SolveResult cur = root;
        for (size_t step = 0; step <= bins.size() && seconds_since(start) < opts.time_limit; ++step) {
            auto fr = fractional(cur.primal);
            if (fr.empty()) {
                accept(cur);
                break;
            }
            int pick = fr[0];
            double dist = 1;
            for (int j : fr) {
                double dj = std::abs(cur.primal[j] - std::round(cur.primal[j]));
                if (dj < dist) {
                    dist = dj;
                    pick = j;
                }
            }
            double v = std::round(cur.primal[pick]);
            fixes.emplace_back(pick, v, v);
            SolveResult nxt = solve_node(fixes, cur.basis.get());
            if (!nxt.ok()) {
                fixes.back() = {pick, 1 - v, 1 - v};
                nxt = solve_node(fixes, cur.basis.get());
                if (!nxt.ok()) break;
            }
            cur = std::move(nxt);
        }
    }

    std::priority_queue<Node, std::vector<Node>, NodeCmp> open;
    open.push(Node{root.objective, order++, {}, root.basis});
    double global_bound = root.objective;
    bool limit_hit = false;

    while (!open.empty()) {
        global_bound = open.top().bound;
        if (gap_closed(global_bound)) break;
        if (nodes >= opts.node_limit || seconds_since(start) > opts.time_limit) {
            limit_hit = true;
            break;
        }
        Node nd = open.top();
        open.pop();
        SolveResult r = (nd.fixes.empty()) ? root : solve_node(nd.fixes, nd.warm.get());
        if (!r.ok()) continue;
        if (incumbent < kInf && gap_closed(r.objective)) continue;
        auto fr = fractional(r.primal);
        if (fr.empty()) {
            accept(r);
            continue;
        }
        // record pseudo-costs from the last fix
        if (!nd.fixes.empty()) {
            auto [j, l, u] = nd.fixes.back();
            (void)u;
            double gain = std::max(r.objective - nd.bound, 0.0);
            if (l > 0.5) {
                pc_up[j] += gain;
                pc_nu[j]++;
            } else {
                pc_dn[j] += gain;
                pc_nd[j]++;
            }
        }
        int pick = fr[0];
        double score = -1;
        for (int j : fr) {
            double fj = r.primal[j] - std::floor(r.primal[j]);
            double s;
            if (opts.branching == Branching::pseudo_cost && pc_nu[j] > 0 && pc_nd[j] > 0) {
                double up = pc_up[j] / pc_nu[j] * (1 - fj), dn = pc_dn[j] / pc_nd[j] * fj;
                s = std::max(up, 1e-6) * std::max(dn, 1e-6);
            } else {
                s = 0.5 - std::abs(fj - 0.5);
                if (opts.branching == Branching::pseudo_cost) s *= 1e-9;
            }
            if (s > score) {
                score = s;
                pick = j;
            }
        }
        for (double v : {0.0, 1.0}) {
            Node ch{r.objective, order++, nd.fixes, r.basis};
            ch.fixes.emplace_back(pick, v, v);
            open.push(std::move(ch));
        }
    }
    if (open.empty()) global_bound = incumbent;
    global_bound = std::min(global_bound, incumbent);

    best.nodes = nodes;
    best.iterations = iters;
    best.elapsed = seconds_since(start);
    best.best_bound = global_bound;
    if (!best.has_incumbent) {
        best.status = limit_hit ? SolveStatus::time_limit : SolveStatus::infeasible;
        return best;
    }
    best.objective = incumbent;
    best.status = limit_hit ? SolveStatus::time_limit : SolveStatus::optimal;
    best.dual.clear();
    best.reduced_cost.clear();
    return best;
}

double primal_violation(const LinearModel &model, const std::vector<double> &x)
{
    double worst = 0;
    for (int j = 0; j < model.num_vars(); ++j) {
        worst = std::max(worst, model.var(j).lower - x[j]);
        worst = std::max(worst, x[j] - model.var(j).upper);
    }
    for (const auto &r : model.constraints()) {
        double a = 0;
        for (auto &[v, c] : r.coeffs) a += c * x[v];
        if (r.sense != Sense::ge) worst = std::max(worst, a - r.rhs);
        if (r.sense != Sense::le) worst = std::max(worst, r.rhs - a);
    }
    return worst;
}

double complementary_slackness_violation(const LinearModel &model, const SolveResult &res)
{
    double worst = 0;
    for (int i = 0; i < model.num_constraints(); ++i) {
        const auto &r = model.constraint(i);
        double a = 0;
        for (auto &[v, c] : r.coeffs) a += c * res.primal[v];
        double y = res.dual[i];
        double scale = 1.0 + std::abs(r.rhs);
        // sign convention under minimization: >= rows y >= 0, <= rows y <= 0
        if (r.sense == Sense::ge) worst = std::max(worst, -y / scale);
        if (r.sense == Sense::le) worst = std::max(worst, y / scale);
        if (r.sense != Sense::eq) worst = std::max(worst, std::abs(y * (a - r.rhs)) / scale);
    }
    for (int j = 0; j < model.num_vars(); ++j) {
        const auto &v = model.var(j);
        double dj = res.reduced_cost[j];
        double xj = res.primal[j];
        double scale = 1.0 + std::abs(xj);
        if (std::abs(dj) <= 1e-9) continue;
        if (dj > 0) worst = std::max(worst, std::abs(dj * (xj - v.lower)) / scale);
        if (dj < 0) worst = std::max(worst, std::abs(dj * (v.upper - xj)) / scale);
    }
    return worst;
}

} // namespace chp
