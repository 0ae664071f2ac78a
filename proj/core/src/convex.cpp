#include "relayplan/convex.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace relayplan {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Original-space evaluation, shared by check_kkt, dump_program, phase 1, and
// the pre-solve feasibility checks.

double eval_affine(const Affine& f, const std::vector<double>& x) {
    double v = f.constant;
    for (const auto& t : f.terms) v += t.coeff * x[static_cast<size_t>(t.index)];
    return v;
}

struct ConViolation {
    std::string name;
    double value = -kInf;  // constraint function g, feasible when < 0
};

// Largest g over all constraints at x; log-domain breaches count as +1.
ConViolation worst_violation(const ConvexProgram& prog, const std::vector<double>& x) {
    ConViolation worst;
    auto consider = [&](const std::string& name, double g) {
        if (g > worst.value) worst = {name, g};
    };
    for (const auto& c : prog.affine_cons) consider(c.name, eval_affine(c.expr, x));
    for (const auto& c : prog.sq_cons) {
        double s = -eval_affine(c.rhs, x);
        for (const auto& r : c.lhs) {
            const double v = eval_affine(r, x);
            s += v * v;
        }
        consider(c.name, s);
    }
    for (const auto& c : prog.norm_cons) {
        double rr = 0.0;
        for (const auto& r : c.lhs) {
            const double v = eval_affine(r, x);
            rr += v * v;
        }
        consider(c.name, std::sqrt(rr) - eval_affine(c.rhs, x));
    }
    for (const auto& c : prog.log_cons) {
        double s = eval_affine(c.rhs, x);
        bool domain = true;
        for (const auto& t : c.lhs) {
            const double v = eval_affine(t.arg, x);
            if (v <= kLogMarginMin) {
                domain = false;
                break;
            }
            s -= t.weight * std::log(v);
        }
        consider(c.name, domain ? s : 1.0);
    }
    for (int j = 0; j < prog.num_vars(); ++j) {
        const auto ju = static_cast<size_t>(j);
        const std::string nm =
            prog.var_names.empty() ? "x[" + std::to_string(j) + "]" : prog.var_names[ju];
        if (prog.lower[ju] > -kInf) consider("lower bound " + nm, prog.lower[ju] - x[ju]);
        if (prog.upper[ju] < kInf) consider("upper bound " + nm, x[ju] - prog.upper[ju]);
    }
    for (const auto& t : prog.objective.logs) {
        if (t.weight > 0.0 && eval_affine(t.arg, x) <= kLogMarginMin)
            consider("objective log domain", 1.0);
    }
    for (const auto& t : prog.objective.reciprocals) {
        if (t.weight > 0.0 && x[static_cast<size_t>(t.index)] <= 0.0)
            consider("objective reciprocal domain", 1.0);
    }
    return worst;
}

void validate_program(const ConvexProgram& prog) {
    const size_t n = prog.lower.size();
    if (prog.upper.size() != n) throw std::invalid_argument("convex: bound size mismatch");
    if (!prog.var_names.empty() && prog.var_names.size() != n)
        throw std::invalid_argument("convex: var_names size mismatch");
    for (size_t j = 0; j < n; ++j) {
        if (std::isnan(prog.lower[j]) || std::isnan(prog.upper[j]))
            throw std::invalid_argument("convex: NaN bound");
        if (!(prog.lower[j] < prog.upper[j]))
            throw std::invalid_argument("convex: empty or zero-width box");
    }
    if (!prog.initial_point.empty() && prog.initial_point.size() != n)
        throw std::invalid_argument("convex: initial point size mismatch");
}

// Seed clamped strictly inside the box, or a box midpoint when absent.
std::vector<double> start_point(const ConvexProgram& prog) {
    const int n = prog.num_vars();
    std::vector<double> x(static_cast<size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        const auto ju = static_cast<size_t>(j);
        const double lo = prog.lower[ju], hi = prog.upper[ju];
        double v;
        if (!prog.initial_point.empty()) {
            v = prog.initial_point[ju];
        } else if (lo > -kInf && hi < kInf) {
            v = 0.5 * (lo + hi);
        } else if (lo > -kInf) {
            v = lo + 1.0;
        } else if (hi < kInf) {
            v = hi - 1.0;
        } else {
            v = 0.0;
        }
        if (lo > -kInf && hi < kInf) {
            const double eps = std::min(1e-9 * std::max(1.0, hi - lo), 0.45 * (hi - lo));
            v = std::clamp(v, lo + eps, hi - eps);
        } else if (lo > -kInf) {
            v = std::max(v, lo + 1e-9 * std::max(1.0, std::abs(lo)));
        } else if (hi < kInf) {
            v = std::min(v, hi - 1e-9 * std::max(1.0, std::abs(hi)));
        }
        x[ju] = v;
    }
    return x;
}

// ---------------------------------------------------------------------------
// Scaled model. Variables are substituted x = D*xs with D = max(1, |x0|) and
// each constraint is divided by a magnitude anchor taken at the start point,
// so the barrier works on O(1) quantities regardless of the caller's units.

struct DAff {
    VectorXd a;
    std::vector<int> nz;
    double b = 0.0;

    double val(const VectorXd& x) const {
        double v = b;
        for (int i : nz) v += a[i] * x[i];
        return v;
    }
};

struct SparseAccum {
    VectorXd v;
    std::vector<char> mark;
    std::vector<int> idx;

    void init(int n) {
        v = VectorXd::Zero(n);
        mark.assign(static_cast<size_t>(n), 0);
        idx.clear();
    }
    void reset() {
        for (int i : idx) {
            v[i] = 0.0;
            mark[static_cast<size_t>(i)] = 0;
        }
        idx.clear();
    }
    void touch(int i) {
        if (!mark[static_cast<size_t>(i)]) {
            mark[static_cast<size_t>(i)] = 1;
            idx.push_back(i);
        }
    }
    void add(double c, const DAff& d) {
        for (int i : d.nz) {
            touch(i);
            v[i] += c * d.a[i];
        }
    }
    double inf_norm() const {
        double s = 0.0;
        for (int i : idx) s = std::max(s, std::abs(v[i]));
        return s;
    }
};

struct AffBlock {
    DAff e;  // g = e(xs) <= 0
    double scale = 1.0;
};
struct SqBlock {
    std::vector<DAff> rows;  // g = sum rows^2 - rhs <= 0
    DAff rhs;
    double scale = 1.0;
};
struct NormBlock {
    std::vector<DAff> rows;  // g = |rows| - t <= 0, cone barrier on t^2 - |r|^2
    DAff t;
    double scale = 1.0;
};
struct LogBlock {
    std::vector<std::pair<double, DAff>> terms;  // g = rhs - sum w*ln(arg) <= 0
    DAff rhs;
    double scale = 1.0;
};

struct ObjModel {
    DAff affine;
    std::vector<std::pair<double, DAff>> logs;
    std::vector<std::pair<double, int>> recips;  // weight already divided by D_j
    std::vector<std::pair<double, std::vector<DAff>>> sqn;
    std::vector<std::pair<double, std::vector<DAff>>> cbn;
    double scale = 1.0;  // original f = scale * scaled f
};

struct Model {
    int n = 0;
    VectorXd dscale;
    VectorXd lo, hi;
    ObjModel obj;
    std::vector<AffBlock> aff;
    std::vector<SqBlock> sq;
    std::vector<NormBlock> nrm;
    std::vector<LogBlock> lg;
};

DAff densify(const Affine& f, const VectorXd& dscale) {
    const int n = static_cast<int>(dscale.size());
    DAff d;
    d.a = VectorXd::Zero(n);
    d.b = f.constant;
    std::vector<char> seen(static_cast<size_t>(n), 0);
    for (const auto& t : f.terms) {
        if (t.index < 0 || t.index >= n)
            throw std::invalid_argument("convex: variable index out of range");
        d.a[t.index] += t.coeff * dscale[t.index];
        if (!seen[static_cast<size_t>(t.index)]) {
            seen[static_cast<size_t>(t.index)] = 1;
            d.nz.push_back(t.index);
        }
    }
    return d;
}

void scale_daff(DAff& d, double s) {
    for (int i : d.nz) d.a[i] /= s;
    d.b /= s;
}

double sq_g(const SqBlock& c, const VectorXd& x) {
    double s = -c.rhs.val(x);
    for (const auto& r : c.rows) {
        const double v = r.val(x);
        s += v * v;
    }
    return s;
}

double norm_val(const NormBlock& c, const VectorXd& x) {
    double rr = 0.0;
    for (const auto& r : c.rows) {
        const double v = r.val(x);
        rr += v * v;
    }
    return std::sqrt(rr);
}

double log_g(const LogBlock& c, const VectorXd& x, bool& domain_ok) {
    double s = c.rhs.val(x);
    for (const auto& [w, arg] : c.terms) {
        const double v = arg.val(x);
        if (v <= kLogMarginMin) {
            domain_ok = false;
            return kInf;
        }
        s -= w * std::log(v);
    }
    return s;
}

bool strictly_feasible(const Model& m, const VectorXd& x) {
    for (int j = 0; j < m.n; ++j)
        if (!(x[j] > m.lo[j] && x[j] < m.hi[j])) return false;
    for (const auto& [w, arg] : m.obj.logs) {
        (void)w;
        if (arg.val(x) <= kLogMarginMin) return false;
    }
    for (const auto& [w, j] : m.obj.recips) {
        (void)w;
        if (x[j] <= 0.0) return false;
    }
    for (const auto& c : m.aff)
        if (c.e.val(x) >= 0.0) return false;
    for (const auto& c : m.sq)
        if (sq_g(c, x) >= 0.0) return false;
    for (const auto& c : m.nrm) {
        const double t = c.t.val(x);
        if (!(t > 0.0) || norm_val(c, x) >= t) return false;
    }
    for (const auto& c : m.lg) {
        bool ok = true;
        if (log_g(c, x, ok) >= 0.0 || !ok) return false;
    }
    return true;
}

// Scaled objective in minimization form, F = -f / obj.scale.
double obj_f_min(const Model& m, const VectorXd& x) {
    double F = -m.obj.affine.val(x);
    for (const auto& [w, arg] : m.obj.logs) F -= w * std::log(arg.val(x));
    for (const auto& [w, j] : m.obj.recips) F += w / x[j];
    for (const auto& [w, rows] : m.obj.sqn) {
        double rr = 0.0;
        for (const auto& r : rows) {
            const double v = r.val(x);
            rr += v * v;
        }
        F += w * rr;
    }
    for (const auto& [w, rows] : m.obj.cbn) {
        double rr = 0.0;
        for (const auto& r : rows) {
            const double v = r.val(x);
            rr += v * v;
        }
        F += w * rr * std::sqrt(rr);
    }
    return F;
}

void rank1(MatrixXd& H, double c, const SparseAccum& v) {
    for (int i : v.idx) {
        const double ci = c * v.v[i];
        for (int j : v.idx) H(i, j) += ci * v.v[j];
    }
}

void rank1_daff(MatrixXd& H, double c, const DAff& d) {
    for (int i : d.nz) {
        const double ci = c * d.a[i];
        for (int j : d.nz) H(i, j) += ci * d.a[j];
    }
}

// Gradient of the scaled minimization objective, added into g.
void obj_grad_add(const Model& m, const VectorXd& x, SparseAccum& acc, VectorXd& g) {
    for (int i : m.obj.affine.nz) g[i] -= m.obj.affine.a[i];
    for (const auto& [w, arg] : m.obj.logs) {
        const double v = arg.val(x);
        for (int i : arg.nz) g[i] -= (w / v) * arg.a[i];
    }
    for (const auto& [w, j] : m.obj.recips) g[j] -= w / (x[j] * x[j]);
    for (const auto& [w, rows] : m.obj.sqn)
        for (const auto& r : rows) {
            const double v = r.val(x);
            for (int i : r.nz) g[i] += 2.0 * w * v * r.a[i];
        }
    for (const auto& [w, rows] : m.obj.cbn) {
        acc.reset();
        double rr = 0.0;
        for (const auto& r : rows) {
            const double v = r.val(x);
            rr += v * v;
            acc.add(v, r);
        }
        const double nr = std::sqrt(rr);
        for (int i : acc.idx) g[i] += 3.0 * w * nr * acc.v[i];
    }
}

void obj_hess_add(const Model& m, const VectorXd& x, SparseAccum& acc, MatrixXd& H) {
    for (const auto& [w, arg] : m.obj.logs) {
        const double v = arg.val(x);
        rank1_daff(H, w / (v * v), arg);
    }
    for (const auto& [w, j] : m.obj.recips) H(j, j) += 2.0 * w / (x[j] * x[j] * x[j]);
    for (const auto& [w, rows] : m.obj.sqn)
        for (const auto& r : rows) rank1_daff(H, 2.0 * w, r);
    for (const auto& [w, rows] : m.obj.cbn) {
        acc.reset();
        double rr = 0.0;
        for (const auto& r : rows) {
            const double v = r.val(x);
            rr += v * v;
            acc.add(v, r);
        }
        const double nr = std::sqrt(rr);
        if (nr > 0.0) {
            for (const auto& r : rows) rank1_daff(H, 3.0 * w * nr, r);
            rank1(H, 3.0 * w / nr, acc);
        }
    }
}

// One scalar inequality c(x) <= 0: value, gradient support, and report scale.
struct CRow {
    double c = 0.0;
    double scale = 1.0;
    std::vector<int> idx;
    std::vector<double> val;

    void set(double cv, double sc, const SparseAccum& acc) {
        c = cv;
        scale = sc;
        idx.assign(acc.idx.begin(), acc.idx.end());
        val.clear();
        val.reserve(idx.size());
        for (int i : idx) val.push_back(acc.v[i]);
    }
    void set_single(double cv, int j, double a) {
        c = cv;
        scale = 1.0;
        idx.assign(1, j);
        val.assign(1, a);
    }
    double dot(const VectorXd& z) const {
        double s = 0.0;
        for (size_t k = 0; k < idx.size(); ++k) s += val[k] * z[idx[k]];
        return s;
    }
};

size_t count_rows(const Model& m) {
    size_t k = m.aff.size() + m.sq.size() + m.nrm.size() + m.lg.size();
    for (int j = 0; j < m.n; ++j) {
        if (m.lo[j] > -kInf) ++k;
        if (m.hi[j] < kInf) ++k;
    }
    return k;
}

// Values and gradients of every inequality at x, in block order: affine,
// squared-norm, cone, log-sum, then finite variable bounds (lo before hi).
void eval_rows(const Model& m, const VectorXd& x, SparseAccum& acc, std::vector<CRow>& rows) {
    size_t k = 0;
    for (const auto& c : m.aff) {
        acc.reset();
        acc.add(1.0, c.e);
        rows[k++].set(c.e.val(x), c.scale, acc);
    }
    for (const auto& c : m.sq) {
        acc.reset();
        for (const auto& r : c.rows) acc.add(2.0 * r.val(x), r);
        acc.add(-1.0, c.rhs);
        rows[k++].set(sq_g(c, x), c.scale, acc);
    }
    for (const auto& c : m.nrm) {
        const double nr = norm_val(c, x);
        const double inr = 1.0 / std::max(nr, 1e-12);
        acc.reset();
        for (const auto& r : c.rows) acc.add(r.val(x) * inr, r);
        acc.add(-1.0, c.t);
        rows[k++].set(nr - c.t.val(x), c.scale, acc);
    }
    for (const auto& c : m.lg) {
        bool ok = true;
        const double g = log_g(c, x, ok);
        acc.reset();
        acc.add(1.0, c.rhs);
        for (const auto& [w, arg] : c.terms) acc.add(-w / arg.val(x), arg);
        rows[k++].set(g, c.scale, acc);
    }
    for (int j = 0; j < m.n; ++j) {
        if (m.lo[j] > -kInf) rows[k++].set_single(m.lo[j] - x[j], j, -1.0);
        if (m.hi[j] < kInf) rows[k++].set_single(x[j] - m.hi[j], j, 1.0);
    }
}

// Dual and centrality residuals r_d = grad F + J^T lam, r_c = -lam*c - mu;
// returns the merit 0.5*|r|^2.
double pd_residual(const Model& m, const VectorXd& x, const std::vector<CRow>& rows,
                   const VectorXd& lam, double mu, SparseAccum& acc, VectorXd& rd,
                   VectorXd& rc) {
    rd.setZero(m.n);
    obj_grad_add(m, x, acc, rd);
    rc.resize(static_cast<Eigen::Index>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const CRow& r = rows[i];
        for (size_t t = 0; t < r.idx.size(); ++t) rd[r.idx[t]] += lam[ii] * r.val[t];
        rc[ii] = -lam[ii] * r.c - mu;
    }
    return 0.5 * (rd.squaredNorm() + rc.squaredNorm());
}

// Condensed system matrix W + J^T diag(lam/(-c)) J, W the Lagrangian Hessian.
void pd_matrix(const Model& m, const VectorXd& x, const std::vector<CRow>& rows,
               const VectorXd& lam, SparseAccum& acc, MatrixXd& M) {
    M.setZero(m.n, m.n);
    obj_hess_add(m, x, acc, M);

    size_t k = m.aff.size();
    for (const auto& c : m.sq) {
        const double l = lam[static_cast<Eigen::Index>(k++)];
        for (const auto& r : c.rows) rank1_daff(M, 2.0 * l, r);
    }
    for (const auto& c : m.nrm) {
        const double l = lam[static_cast<Eigen::Index>(k++)];
        const double nr = std::max(norm_val(c, x), 1e-12);
        acc.reset();
        for (const auto& r : c.rows) acc.add(r.val(x) / nr, r);
        for (const auto& r : c.rows) rank1_daff(M, l / nr, r);
        rank1(M, -l / nr, acc);
    }
    for (const auto& c : m.lg) {
        const double l = lam[static_cast<Eigen::Index>(k++)];
        for (const auto& [w, arg] : c.terms) {
            const double v = arg.val(x);
            rank1_daff(M, l * w / (v * v), arg);
        }
    }
    for (size_t i = 0; i < rows.size(); ++i) {
        const CRow& r = rows[i];
        const double w = lam[static_cast<Eigen::Index>(i)] / std::max(-r.c, 1e-300);
        for (size_t a = 0; a < r.idx.size(); ++a) {
            const double ca = w * r.val[a];
            for (size_t b = 0; b < r.idx.size(); ++b) M(r.idx[a], r.idx[b]) += ca * r.val[b];
        }
    }
}

// ---------------------------------------------------------------------------
// KKT residuals in original units at the iterate multipliers; the objective
// normalization is undone so the numbers are comparable to check_kkt on the
// caller's program.

struct KktSnapshot {
    double stationarity = 0.0;
    double feasibility = 0.0;
    double complementarity = 0.0;
    Multipliers mult;
};

KktSnapshot kkt_pd(const Model& m, const VectorXd& x, const VectorXd& lam, SparseAccum& acc,
                   std::vector<CRow>& rows, VectorXd& rd) {
    eval_rows(m, x, acc, rows);

    KktSnapshot out;
    rd.setZero(m.n);
    obj_grad_add(m, x, acc, rd);
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const CRow& r = rows[i];
        for (size_t t = 0; t < r.idx.size(); ++t) rd[r.idx[t]] += lam[ii] * r.val[t];
    }

    const double sf = m.obj.scale;
    for (int j = 0; j < m.n; ++j)
        out.stationarity = std::max(out.stationarity, sf * std::abs(rd[j]) / m.dscale[j]);

    size_t k = 0;
    auto take = [&](std::vector<double>& dst, size_t count) {
        for (size_t i = 0; i < count; ++i, ++k) {
            const CRow& r = rows[k];
            const double l = lam[static_cast<Eigen::Index>(k)];
            dst.push_back(l * sf / r.scale);
            out.complementarity = std::max(out.complementarity, sf * std::abs(l * r.c));
            out.feasibility = std::max(out.feasibility, r.scale * r.c);
        }
    };
    take(out.mult.affine, m.aff.size());
    take(out.mult.sq, m.sq.size());
    take(out.mult.norm, m.nrm.size());
    take(out.mult.logsum, m.lg.size());
    for (int j = 0; j < m.n; ++j) {
        double lo = 0.0, hi = 0.0;
        if (m.lo[j] > -kInf) {
            const CRow& r = rows[k];
            const double l = lam[static_cast<Eigen::Index>(k++)];
            lo = l * sf / m.dscale[j];
            out.complementarity = std::max(out.complementarity, sf * std::abs(l * r.c));
        }
        if (m.hi[j] < kInf) {
            const CRow& r = rows[k];
            const double l = lam[static_cast<Eigen::Index>(k++)];
            hi = l * sf / m.dscale[j];
            out.complementarity = std::max(out.complementarity, sf * std::abs(l * r.c));
        }
        out.mult.lo.push_back(lo);
        out.mult.hi.push_back(hi);
    }
    out.feasibility = std::max(out.feasibility, 0.0);
    return out;
}

// ---------------------------------------------------------------------------

Model build_model(const ConvexProgram& prog, const std::vector<double>& x0) {
    const int n = prog.num_vars();
    Model m;
    m.n = n;
    m.dscale = VectorXd::Ones(n);
    for (int j = 0; j < n; ++j)
        m.dscale[j] = std::max(1.0, std::abs(x0[static_cast<size_t>(j)]));

    m.lo.resize(n);
    m.hi.resize(n);
    VectorXd xs(n);
    for (int j = 0; j < n; ++j) {
        const auto ju = static_cast<size_t>(j);
        m.lo[j] = prog.lower[ju] / m.dscale[j];
        m.hi[j] = prog.upper[ju] / m.dscale[j];
        xs[j] = x0[ju] / m.dscale[j];
    }

    SparseAccum acc;
    acc.init(n);

    m.obj.affine = densify(prog.objective.affine, m.dscale);
    for (const auto& t : prog.objective.logs) {
        if (t.weight < 0.0) throw std::invalid_argument("convex: negative log weight");
        if (t.weight == 0.0) continue;
        m.obj.logs.emplace_back(t.weight, densify(t.arg, m.dscale));
    }
    for (const auto& t : prog.objective.reciprocals) {
        if (t.weight < 0.0) throw std::invalid_argument("convex: negative reciprocal weight");
        if (t.weight == 0.0) continue;
        if (t.index < 0 || t.index >= n)
            throw std::invalid_argument("convex: variable index out of range");
        if (!(prog.lower[static_cast<size_t>(t.index)] > 0.0))
            throw std::invalid_argument("convex: reciprocal variable needs a positive lower bound");
        m.obj.recips.emplace_back(t.weight / m.dscale[t.index], t.index);
    }
    auto densify_rows = [&](const std::vector<Affine>& rows) {
        std::vector<DAff> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(densify(r, m.dscale));
        return out;
    };
    for (const auto& t : prog.objective.squared_norms) {
        if (t.weight < 0.0) throw std::invalid_argument("convex: negative squared-norm weight");
        if (t.weight == 0.0) continue;
        m.obj.sqn.emplace_back(t.weight, densify_rows(t.arg));
    }
    for (const auto& t : prog.objective.cubed_norms) {
        if (t.weight < 0.0) throw std::invalid_argument("convex: negative cubed-norm weight");
        if (t.weight == 0.0) continue;
        m.obj.cbn.emplace_back(t.weight, densify_rows(t.arg));
    }

    // Objective anchor from grad F at the start point.
    acc.reset();
    for (int i : m.obj.affine.nz) {
        acc.touch(i);
        acc.v[i] -= m.obj.affine.a[i];
    }
    for (const auto& [w, arg] : m.obj.logs) acc.add(-w / std::max(arg.val(xs), 1e-12), arg);
    for (const auto& [w, j] : m.obj.recips) {
        acc.touch(j);
        acc.v[j] -= w / std::max(xs[j] * xs[j], 1e-12);
    }
    for (const auto& [w, rows] : m.obj.sqn)
        for (const auto& r : rows) acc.add(2.0 * w * r.val(xs), r);
    for (const auto& [w, rows] : m.obj.cbn) {
        double rr = 0.0;
        for (const auto& r : rows) rr += r.val(xs) * r.val(xs);
        const double nr = std::sqrt(rr);
        for (const auto& r : rows) acc.add(3.0 * w * nr * r.val(xs), r);
    }
    const double sf = std::max(1.0, acc.inf_norm());
    m.obj.scale = sf;
    scale_daff(m.obj.affine, sf);
    for (auto& term : m.obj.logs) term.first /= sf;
    for (auto& term : m.obj.recips) term.first /= sf;
    for (auto& term : m.obj.sqn) term.first /= sf;
    for (auto& term : m.obj.cbn) term.first /= sf;

    // Constraint anchors: s = max(1, |g(xs)|, |grad g(xs)|_inf).
    for (const auto& c : prog.affine_cons) {
        AffBlock b;
        b.e = densify(c.expr, m.dscale);
        acc.reset();
        acc.add(1.0, b.e);
        b.scale = std::max({1.0, std::abs(b.e.val(xs)), acc.inf_norm()});
        scale_daff(b.e, b.scale);
        m.aff.push_back(std::move(b));
    }
    for (const auto& c : prog.sq_cons) {
        SqBlock b;
        b.rows = densify_rows(c.lhs);
        b.rhs = densify(c.rhs, m.dscale);
        acc.reset();
        for (const auto& r : b.rows) acc.add(2.0 * r.val(xs), r);
        acc.add(-1.0, b.rhs);
        b.scale = std::max({1.0, std::abs(sq_g(b, xs)), acc.inf_norm()});
        const double rs = std::sqrt(b.scale);
        for (auto& r : b.rows) scale_daff(r, rs);
        scale_daff(b.rhs, b.scale);
        m.sq.push_back(std::move(b));
    }
    for (const auto& c : prog.norm_cons) {
        NormBlock b;
        b.rows = densify_rows(c.lhs);
        b.t = densify(c.rhs, m.dscale);
        const double nr = norm_val(b, xs);
        acc.reset();
        const double inr = 1.0 / std::max(nr, 1e-12);
        for (const auto& r : b.rows) acc.add(r.val(xs) * inr, r);
        acc.add(-1.0, b.t);
        b.scale = std::max({1.0, std::abs(nr - b.t.val(xs)), acc.inf_norm()});
        for (auto& r : b.rows) scale_daff(r, b.scale);
        scale_daff(b.t, b.scale);
        m.nrm.push_back(std::move(b));
    }
    for (const auto& c : prog.log_cons) {
        LogBlock b;
        b.rhs = densify(c.rhs, m.dscale);
        for (const auto& t : c.lhs) {
            if (t.weight < 0.0) throw std::invalid_argument("convex: negative log weight");
            if (t.weight == 0.0) continue;
            b.terms.emplace_back(t.weight, densify(t.arg, m.dscale));
        }
        bool ok = true;
        const double g = log_g(b, xs, ok);
        acc.reset();
        acc.add(1.0, b.rhs);
        for (const auto& [w, arg] : b.terms)
            acc.add(-w / std::max(arg.val(xs), kLogMarginMin), arg);
        b.scale = std::max({1.0, ok ? std::abs(g) : 1.0, acc.inf_norm()});
        for (auto& term : b.terms) term.first /= b.scale;
        scale_daff(b.rhs, b.scale);
        m.lg.push_back(std::move(b));
    }
    return m;
}

double initial_mu(const Model& m, const VectorXd& x) {
    double sum = 0.0;
    int cnt = 0;
    auto take = [&](double slack) {
        sum += std::min(slack, 10.0);
        ++cnt;
    };
    for (int j = 0; j < m.n; ++j) {
        if (m.lo[j] > -kInf) take(x[j] - m.lo[j]);
        if (m.hi[j] < kInf) take(m.hi[j] - x[j]);
    }
    for (const auto& c : m.aff) take(-c.e.val(x));
    for (const auto& c : m.sq) take(-sq_g(c, x));
    for (const auto& c : m.nrm) take(c.t.val(x) - norm_val(c, x));
    for (const auto& c : m.lg) {
        bool ok = true;
        take(-log_g(c, x, ok));
    }
    if (cnt == 0) return 1.0;
    return std::clamp(sum / cnt, 1e-3, 10.0);
}

struct CenterOut {
    int iters = 0;
    bool stalled = false;
    bool met = false;
};

// Scratch buffers reused across centering rounds.
struct PdWork {
    std::vector<CRow> rows, trial;
    VectorXd rd, rc, rd_t, rc_t, lam_t, u, dlam, dx, rhs;
    MatrixXd M;
};

// Damped Newton on the perturbed KKT system at fixed mu, moving x and the
// multipliers jointly. The condensed step solves
//   (W + J^T diag(lam/(-c)) J) dx = -(grad F + sum_i (mu/(-c_i)) grad c_i)
// and recovers dlam row-wise, which corrects r_c exactly in the linear model.
// The merit is the squared residual norm; unlike the barrier value it stays
// numerically meaningful all the way down to machine-precision residuals.
CenterOut pd_center(const Model& m, VectorXd& x, VectorXd& lam, double mu, double dtol,
                    double ctol, int budget, SparseAccum& acc, PdWork& w) {
    CenterOut out;
    const int cap = std::min(budget, 150);
    const size_t nrows = w.rows.size();
    const size_t aff_end = m.aff.size();
    const size_t box_begin = aff_end + m.sq.size() + m.nrm.size() + m.lg.size();
    double best_theta = kInf;
    int since_best = 0;
    // Damping learned from the line search: steps that survive only after many
    // halvings mean the Newton model overshoots its trust region, so the next
    // direction is shortened; clean steps let the damping decay back to zero.
    double damp = 0.0;
    for (; out.iters < cap; ++out.iters) {
        eval_rows(m, x, acc, w.rows);
        const double theta = pd_residual(m, x, w.rows, lam, mu, acc, w.rd, w.rc);
        const double rdn = w.rd.lpNorm<Eigen::Infinity>();
        const double rcn = nrows ? w.rc.lpNorm<Eigen::Infinity>() : 0.0;
        if (rdn <= dtol && rcn <= ctol) {
            out.met = true;
            return out;
        }
        // A plateaued residual means this round cannot center further; hand
        // control back so the mu schedule reshapes the system.
        if (theta < 0.81 * best_theta) {
            best_theta = theta;
            since_best = 0;
        } else if (++since_best >= 15) {
            return out;
        }

        pd_matrix(m, x, w.rows, lam, acc, w.M);
        w.rhs = -w.rd;
        for (size_t i = 0; i < nrows; ++i) {
            const CRow& r = w.rows[i];
            const double wi = w.rc[static_cast<Eigen::Index>(i)] / std::max(-r.c, 1e-300);
            for (size_t t = 0; t < r.idx.size(); ++t) w.rhs[r.idx[t]] += wi * r.val[t];
        }

        // The linearized step corrects r_c exactly, so the predicted merit
        // slope is rd.d(rd) - |rc|^2; a non-negative value means the
        // factorization lost the curvature and needs more regularization.
        w.u.resize(static_cast<Eigen::Index>(nrows));
        w.dlam.resize(static_cast<Eigen::Index>(nrows));
        const double maxdiag = std::max(1.0, w.M.diagonal().maxCoeff());
        const double base = 1e-13 * maxdiag;
        damp = std::min(damp, 1e-5 * maxdiag);
        bool descent = false;
        for (int attempt = 0; attempt < 6 && !descent; ++attempt) {
            // Attempt 0 applies the learned damping, attempt 1 retries clean,
            // and later attempts escalate from the clean base; a stale damping
            // value therefore costs one factorization instead of the round.
            const double reg = attempt == 0 ? std::max(base, damp)
                                            : base * std::pow(1e4, attempt - 1);
            MatrixXd Mr = w.M;
            Mr.diagonal().array() += reg;
            w.dx = Eigen::LDLT<MatrixXd>(Mr).solve(w.rhs);
            if (!w.dx.allFinite()) continue;
            VectorXd drd = w.M * w.dx;
            for (size_t i = 0; i < nrows; ++i) {
                const auto ii = static_cast<Eigen::Index>(i);
                const CRow& r = w.rows[i];
                w.u[ii] = r.dot(w.dx);
                w.dlam[ii] = (w.rc[ii] - lam[ii] * w.u[ii]) / std::min(r.c, -1e-300);
                const double jw = lam[ii] / std::max(-r.c, 1e-300);
                for (size_t t = 0; t < r.idx.size(); ++t)
                    drd[r.idx[t]] += (w.dlam[ii] - jw * w.u[ii]) * r.val[t];
            }
            descent = w.rd.dot(drd) - w.rc.squaredNorm() < 0.0;
        }
        if (!descent) {
            out.stalled = true;
            ++out.iters;
            return out;
        }

        // Exact fraction-to-boundary for linear rows and multipliers; the
        // nonlinear rows are handled by rejection inside the backtracking.
        double s = 1.0;
        for (size_t i = 0; i < nrows; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            if ((i < aff_end || i >= box_begin) && w.u[ii] > 0.0)
                s = std::min(s, 0.995 * -w.rows[i].c / w.u[ii]);
            if (w.dlam[ii] < 0.0) s = std::min(s, 0.995 * lam[ii] / -w.dlam[ii]);
        }
        const double s0 = s;

        bool accepted = false;
        int halvings = 0;
        for (; s > 1e-10; s *= 0.5, ++halvings) {
            const VectorXd xt = x + s * w.dx;
            if (!strictly_feasible(m, xt)) continue;
            w.lam_t = lam + s * w.dlam;
            eval_rows(m, xt, acc, w.trial);
            const double theta_t = pd_residual(m, xt, w.trial, w.lam_t, mu, acc, w.rd_t, w.rc_t);
            if (theta_t < (1.0 - 1e-4 * s) * theta) {
                x = xt;
                lam = w.lam_t;
                accepted = true;
                break;
            }
        }
        if (std::getenv("RELAYPLAN_NEWTON_TRACE"))
            std::fprintf(stderr,
                         "  newton it=%d theta=%.3e rd=%.3e rc=%.3e |dx|=%.3e s=%.3e s0=%.3e "
                         "h=%d damp=%.1e\n",
                         out.iters, theta, rdn, rcn, w.dx.lpNorm<Eigen::Infinity>(), s, s0,
                         halvings, damp);
        if (!accepted) {
            out.stalled = true;
            ++out.iters;
            return out;
        }
        if (halvings >= 6)
            damp = std::min(damp == 0.0 ? 1e3 * base : 30.0 * damp, 1e-5 * maxdiag);
        else if (halvings >= 3)
            damp = std::min(damp == 0.0 ? 1e2 * base : 5.0 * damp, 1e-5 * maxdiag);
        else if (halvings <= 1)
            damp *= 0.1;
        if (x.lpNorm<Eigen::Infinity>() > 1e12 || lam.lpNorm<Eigen::Infinity>() > 1e14) {
            out.stalled = true;
            ++out.iters;
            return out;
        }
    }
    return out;
}

SolveReport infeasible_report(const std::vector<double>& x, const ConViolation& worst) {
    SolveReport rep;
    rep.status = SolveStatus::infeasible;
    rep.x = x;
    rep.kkt_feasibility = worst.value;
    std::ostringstream msg;
    msg << "no strictly feasible point; worst constraint '" << worst.name << "' at "
        << worst.value;
    rep.message = msg.str();
    return rep;
}

SolveReport solve_impl(const ConvexProgram& prog, double tol, int max_iter, bool phase1_allowed);

// Phase 1: minimize a shared slack s added to every constraint. The relaxed
// start is strictly feasible by construction, so the recursion terminates.
bool find_interior(const ConvexProgram& prog, double tol, int max_iter,
                   std::vector<double>& x0, ConViolation& worst) {
    for (const auto& t : prog.objective.logs) {
        if (t.weight > 0.0 && eval_affine(t.arg, x0) <= 2.0 * kLogMarginMin) return false;
    }
    for (const auto& c : prog.log_cons) {
        for (const auto& t : c.lhs)
            if (t.weight > 0.0 && eval_affine(t.arg, x0) <= 2.0 * kLogMarginMin) return false;
    }

    ConvexProgram p1 = prog;
    p1.objective = Objective{};
    const int s_idx = p1.add_block("slack", 1, -1.0, std::max(1.0, worst.value) * 2.0 + 1.0);
    p1.objective.affine = Affine::of_var(s_idx, -1.0);
    for (auto& c : p1.affine_cons) c.expr.add(s_idx, -1.0);
    for (auto& c : p1.sq_cons) c.rhs.add(s_idx, 1.0);
    for (auto& c : p1.norm_cons) c.rhs.add(s_idx, 1.0);
    for (auto& c : p1.log_cons) c.rhs.add(s_idx, -1.0);
    p1.initial_point = x0;
    p1.initial_point.push_back(std::max(0.0, worst.value) + 1.0);

    const SolveReport rep = solve_impl(p1, std::min(tol, 1e-6), max_iter, false);
    if (rep.x.size() != p1.lower.size()) return false;
    std::vector<double> cand(rep.x.begin(), rep.x.end() - 1);
    const ConViolation v = worst_violation(prog, cand);
    if (v.value >= 0.0) {
        worst = v;
        return false;
    }
    x0 = cand;
    return true;
}

SolveReport solve_impl(const ConvexProgram& prog, double tol, int max_iter, bool phase1_allowed) {
    validate_program(prog);
    if (!(tol > 0.0)) throw std::invalid_argument("convex: tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("convex: max_iter must be positive");

    std::vector<double> x0 = start_point(prog);
    ConViolation worst = worst_violation(prog, x0);
    if (worst.value >= 0.0) {
        if (!phase1_allowed || !find_interior(prog, tol, max_iter, x0, worst))
            return infeasible_report(x0, worst);
    }

    Model m = build_model(prog, x0);
    VectorXd xs(m.n);
    for (int j = 0; j < m.n; ++j) xs[j] = x0[static_cast<size_t>(j)] / m.dscale[j];

    SparseAccum acc;
    acc.init(m.n);
    PdWork work;
    work.rows.resize(count_rows(m));
    work.trial.resize(count_rows(m));

    double mu = initial_mu(m, xs);
    int newton_total = 0;
    int stalls = 0;
    int unmet = 0;
    if (std::getenv("RELAYPLAN_SOLVER_TRACE"))
        std::fprintf(stderr, "solve n=%d rows=%zu tol=%.1e mu0=%.3e\n", m.n, work.rows.size(),
                     tol, mu);

    // Multipliers start on the central path of the initial mu.
    VectorXd lam(static_cast<Eigen::Index>(work.rows.size()));
    eval_rows(m, xs, acc, work.rows);
    for (size_t i = 0; i < work.rows.size(); ++i)
        lam[static_cast<Eigen::Index>(i)] = mu / std::max(-work.rows[i].c, 1e-12);

    // A centered point at mu has per-row complementarity within ctol of mu, so
    // one round that meets (dtol, ctol) at mu_target puts every KKT residual
    // strictly under tol. The target sits just below tol to keep the final mu
    // hop gentle, and mu never drops past it.
    const double mu_target = 0.9 * tol / m.obj.scale;

    SolveReport rep;
    rep.status = SolveStatus::max_iterations;
    KktSnapshot best;
    VectorXd best_x = xs;
    double best_worst = kInf;

    while (true) {
        const bool at_target = mu <= mu_target;
        const double dtol = std::max(0.05 * mu, 0.25 * tol / m.obj.scale);
        const double ctol = 0.05 * mu;
        const CenterOut c =
            pd_center(m, xs, lam, mu, dtol, ctol, max_iter - newton_total, acc, work);
        newton_total += c.iters;
        stalls = c.stalled ? stalls + 1 : 0;
        if (c.met || c.stalled)
            unmet = 0;
        else if (at_target)
            ++unmet;

        const KktSnapshot k = kkt_pd(m, xs, lam, acc, work.rows, work.rd);
        const double w = std::max({k.stationarity, k.feasibility, k.complementarity});
        if (std::getenv("RELAYPLAN_SOLVER_TRACE"))
            std::fprintf(stderr,
                         "round mu=%.3e iters=%d met=%d stalled=%d stat=%.3e feas=%.3e "
                         "compl=%.3e\n",
                         mu, c.iters, c.met ? 1 : 0, c.stalled ? 1 : 0, k.stationarity,
                         k.feasibility, k.complementarity);
        if (w < best_worst) {
            best_worst = w;
            best = k;
            best_x = xs;
        }
        if (best_worst <= tol) {
            rep.status = SolveStatus::optimal;
            break;
        }
        if (newton_total >= max_iter) {
            rep.message = "newton budget exhausted";
            break;
        }
        if (stalls >= 6) {
            rep.message = "line search stalled";
            break;
        }
        if (unmet >= 3) {
            rep.message = "centering stagnated";
            break;
        }
        mu = std::max(0.15 * mu, std::min(mu, mu_target));
    }

    rep.x.resize(static_cast<size_t>(m.n));
    for (int j = 0; j < m.n; ++j) rep.x[static_cast<size_t>(j)] = best_x[j] * m.dscale[j];
    rep.objective = -m.obj.scale * obj_f_min(m, best_x);
    rep.kkt_stationarity = best.stationarity;
    rep.kkt_feasibility = best.feasibility;
    rep.kkt_complementarity = best.complementarity;
    rep.multipliers = std::move(best.mult);
    rep.iterations = newton_total;
    if (rep.status == SolveStatus::optimal && rep.message.empty()) rep.message = "converged";
    return rep;
}

std::string format_affine(const Affine& f, const std::vector<std::string>& names) {
    std::ostringstream os;
    bool first = true;
    for (const auto& t : f.terms) {
        if (!first) os << " + ";
        first = false;
        os << t.coeff << "*";
        if (!names.empty() && t.index < static_cast<int>(names.size()))
            os << names[static_cast<size_t>(t.index)];
        else
            os << "x" << t.index;
    }
    if (first || f.constant != 0.0) {
        if (!first) os << " + ";
        os << f.constant;
    }
    return os.str();
}

}  // namespace

int ConvexProgram::add_block(const std::string& name, int size, double lo, double hi) {
    const int off = num_vars();
    for (int i = 0; i < size; ++i) {
        lower.push_back(lo);
        upper.push_back(hi);
        var_names.push_back(size == 1 ? name : name + "[" + std::to_string(i) + "]");
    }
    return off;
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal:
            return "optimal";
        case SolveStatus::infeasible:
            return "infeasible";
        case SolveStatus::max_iterations:
            return "max_iterations";
    }
    return "unknown";
}

SolveReport solve(const ConvexProgram& prog, double tol, int max_iter) {
    return solve_impl(prog, tol, max_iter, true);
}

KktResiduals check_kkt(const ConvexProgram& prog, const std::vector<double>& x,
                       const Multipliers& mult) {
    validate_program(prog);
    const size_t n = static_cast<size_t>(prog.num_vars());
    if (x.size() != n) throw std::invalid_argument("convex: point size mismatch");
    auto pick = [](const std::vector<double>& v, size_t i, size_t expect) {
        if (v.empty()) return 0.0;
        if (v.size() != expect) throw std::invalid_argument("convex: multiplier size mismatch");
        return v[i];
    };

    KktResiduals res;
    std::vector<double> L(n, 0.0);

    // grad of the minimized objective -f.
    for (const auto& t : prog.objective.affine.terms)
        L[static_cast<size_t>(t.index)] -= t.coeff;
    for (const auto& t : prog.objective.logs) {
        if (t.weight == 0.0) continue;
        const double v = std::max(eval_affine(t.arg, x), 1e-300);
        for (const auto& lt : t.arg.terms)
            L[static_cast<size_t>(lt.index)] -= (t.weight / v) * lt.coeff;
    }
    for (const auto& t : prog.objective.reciprocals) {
        if (t.weight == 0.0) continue;
        const double v = x[static_cast<size_t>(t.index)];
        L[static_cast<size_t>(t.index)] -= t.weight / std::max(v * v, 1e-300);
    }
    for (const auto& t : prog.objective.squared_norms) {
        for (const auto& r : t.arg) {
            const double v = eval_affine(r, x);
            for (const auto& lt : r.terms)
                L[static_cast<size_t>(lt.index)] += 2.0 * t.weight * v * lt.coeff;
        }
    }
    for (const auto& t : prog.objective.cubed_norms) {
        double rr = 0.0;
        for (const auto& r : t.arg) {
            const double v = eval_affine(r, x);
            rr += v * v;
        }
        const double nr = std::sqrt(rr);
        for (const auto& r : t.arg) {
            const double v = eval_affine(r, x);
            for (const auto& lt : r.terms)
                L[static_cast<size_t>(lt.index)] += 3.0 * t.weight * nr * v * lt.coeff;
        }
    }

    auto track = [&](double lam, double g) {
        res.feasibility = std::max(res.feasibility, g);
        res.complementarity = std::max(res.complementarity, std::abs(lam * g));
    };

    for (size_t i = 0; i < prog.affine_cons.size(); ++i) {
        const auto& c = prog.affine_cons[i];
        const double lam = pick(mult.affine, i, prog.affine_cons.size());
        const double g = eval_affine(c.expr, x);
        for (const auto& t : c.expr.terms) L[static_cast<size_t>(t.index)] += lam * t.coeff;
        track(lam, g);
    }
    for (size_t i = 0; i < prog.sq_cons.size(); ++i) {
        const auto& c = prog.sq_cons[i];
        const double lam = pick(mult.sq, i, prog.sq_cons.size());
        double g = -eval_affine(c.rhs, x);
        for (const auto& r : c.lhs) {
            const double v = eval_affine(r, x);
            g += v * v;
            for (const auto& t : r.terms)
                L[static_cast<size_t>(t.index)] += lam * 2.0 * v * t.coeff;
        }
        for (const auto& t : c.rhs.terms) L[static_cast<size_t>(t.index)] -= lam * t.coeff;
        track(lam, g);
    }
    for (size_t i = 0; i < prog.norm_cons.size(); ++i) {
        const auto& c = prog.norm_cons[i];
        const double lam = pick(mult.norm, i, prog.norm_cons.size());
        double rr = 0.0;
        for (const auto& r : c.lhs) {
            const double v = eval_affine(r, x);
            rr += v * v;
        }
        const double nr = std::sqrt(rr);
        const double inr = 1.0 / std::max(nr, 1e-12);
        for (const auto& r : c.lhs) {
            const double v = eval_affine(r, x);
            for (const auto& t : r.terms)
                L[static_cast<size_t>(t.index)] += lam * v * inr * t.coeff;
        }
        for (const auto& t : c.rhs.terms) L[static_cast<size_t>(t.index)] -= lam * t.coeff;
        track(lam, nr - eval_affine(c.rhs, x));
    }
    for (size_t i = 0; i < prog.log_cons.size(); ++i) {
        const auto& c = prog.log_cons[i];
        const double lam = pick(mult.logsum, i, prog.log_cons.size());
        double g = eval_affine(c.rhs, x);
        for (const auto& t : c.lhs) {
            if (t.weight == 0.0) continue;
            const double v = eval_affine(t.arg, x);
            g -= t.weight * std::log(std::max(v, 1e-300));
            for (const auto& lt : t.arg.terms)
                L[static_cast<size_t>(lt.index)] -=
                    lam * (t.weight / std::max(v, 1e-300)) * lt.coeff;
        }
        for (const auto& t : c.rhs.terms) L[static_cast<size_t>(t.index)] += lam * t.coeff;
        track(lam, g);
    }
    for (size_t j = 0; j < n; ++j) {
        if (prog.lower[j] > -kInf) {
            const double lam = pick(mult.lo, j, n);
            L[j] -= lam;
            track(lam, prog.lower[j] - x[j]);
        }
        if (prog.upper[j] < kInf) {
            const double lam = pick(mult.hi, j, n);
            L[j] += lam;
            track(lam, x[j] - prog.upper[j]);
        }
    }

    for (size_t j = 0; j < n; ++j)
        res.stationarity = std::max(res.stationarity, std::abs(L[j]));
    res.feasibility = std::max(res.feasibility, 0.0);
    return res;
}

std::string dump_program(const ConvexProgram& prog) {
    std::ostringstream os;
    const int n = prog.num_vars();
    os << "convex program: " << n << " vars, " << prog.affine_cons.size() << " affine, "
       << prog.sq_cons.size() << " squared-norm, " << prog.norm_cons.size() << " norm, "
       << prog.log_cons.size() << " log-sum\n";
    for (int j = 0; j < n; ++j) {
        const auto ju = static_cast<size_t>(j);
        os << "  var ";
        if (!prog.var_names.empty())
            os << prog.var_names[ju];
        else
            os << "x" << j;
        os << " in [" << prog.lower[ju] << ", " << prog.upper[ju] << "]\n";
    }
    os << "maximize " << format_affine(prog.objective.affine, prog.var_names);
    for (const auto& t : prog.objective.logs)
        os << " + " << t.weight << "*ln(" << format_affine(t.arg, prog.var_names) << ")";
    for (const auto& t : prog.objective.reciprocals) {
        os << " - " << t.weight << "/";
        if (!prog.var_names.empty())
            os << prog.var_names[static_cast<size_t>(t.index)];
        else
            os << "x" << t.index;
    }
    for (const auto& t : prog.objective.squared_norms)
        os << " - " << t.weight << "*|" << t.arg.size() << " rows|^2";
    for (const auto& t : prog.objective.cubed_norms)
        os << " - " << t.weight << "*|" << t.arg.size() << " rows|^3";
    os << "\n";
    for (const auto& c : prog.affine_cons)
        os << "  s.t. [" << c.name << "] " << format_affine(c.expr, prog.var_names) << " <= 0\n";
    for (const auto& c : prog.sq_cons)
        os << "  s.t. [" << c.name << "] |" << c.lhs.size() << " rows|^2 <= "
           << format_affine(c.rhs, prog.var_names) << "\n";
    for (const auto& c : prog.norm_cons)
        os << "  s.t. [" << c.name << "] |" << c.lhs.size() << " rows| <= "
           << format_affine(c.rhs, prog.var_names) << "\n";
    for (const auto& c : prog.log_cons) {
        os << "  s.t. [" << c.name << "] ";
        bool first = true;
        for (const auto& t : c.lhs) {
            if (!first) os << " + ";
            first = false;
            os << t.weight << "*ln(" << format_affine(t.arg, prog.var_names) << ")";
        }
        os << " >= " << format_affine(c.rhs, prog.var_names) << "\n";
    }
    return os.str();
}

}  // namespace relayplan
