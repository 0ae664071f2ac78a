#pragma once

#include <string>
#include <vector>

namespace relayplan {

// One linear term coeff * x[index].
struct LinTerm {
    int index = 0;
    double coeff = 0.0;
};

struct Affine {
    std::vector<LinTerm> terms;
    double constant = 0.0;

    Affine& add(int index, double coeff) {
        terms.push_back({index, coeff});
        return *this;
    }
    static Affine of_constant(double c) {
        Affine a;
        a.constant = c;
        return a;
    }
    static Affine of_var(int index, double coeff = 1.0, double constant = 0.0) {
        Affine a;
        a.constant = constant;
        a.add(index, coeff);
        return a;
    }
};

struct LogTerm {
    double weight = 0.0;  // >= 0
    Affine arg;           // kept >= margin_min by the solver
};

// Convex penalties subtracted from the maximized objective; weights >= 0.
struct ReciprocalTerm {
    double weight = 0.0;
    int index = 0;  // variable must have a positive lower bound
};

struct SquaredNormTerm {
    double weight = 0.0;
    std::vector<Affine> arg;
};

struct CubedNormTerm {
    double weight = 0.0;
    std::vector<Affine> arg;
};

// maximize affine + sum w*log(affine) - penalties (all concave).
struct Objective {
    Affine affine;
    std::vector<LogTerm> logs;
    std::vector<ReciprocalTerm> reciprocals;
    std::vector<SquaredNormTerm> squared_norms;
    std::vector<CubedNormTerm> cubed_norms;
};

// Constraint atoms, each convex as written.
struct AffineLeq {  // expr <= 0
    Affine expr;
    std::string name;
};
struct SquaredNormLeq {  // |lhs|^2 <= rhs
    std::vector<Affine> lhs;
    Affine rhs;
    std::string name;
};
struct NormLeq {  // |lhs| <= rhs
    std::vector<Affine> lhs;
    Affine rhs;
    std::string name;
};
struct LogSumGeq {  // sum w*log(arg) >= rhs
    std::vector<LogTerm> lhs;
    Affine rhs;
    std::string name;
};

inline constexpr double kLogMarginMin = 1e-12;

struct ConvexProgram {
    std::vector<double> lower, upper;     // per-variable box bounds (+-inf allowed)
    std::vector<std::string> var_names;   // one entry per scalar variable
    Objective objective;
    std::vector<AffineLeq> affine_cons;
    std::vector<SquaredNormLeq> sq_cons;
    std::vector<NormLeq> norm_cons;
    std::vector<LogSumGeq> log_cons;
    std::vector<double> initial_point;    // optional strictly feasible seed

    int num_vars() const { return static_cast<int>(lower.size()); }
    // Returns the offset of a contiguous block of `size` scalars.
    int add_block(const std::string& name, int size, double lo, double hi);
};

enum class SolveStatus { optimal, infeasible, max_iterations };

const char* to_string(SolveStatus s);

// Multipliers follow constraint-list order; box multipliers are per variable.
struct Multipliers {
    std::vector<double> affine, sq, norm, logsum, lo, hi;
};

struct SolveReport {
    SolveStatus status = SolveStatus::max_iterations;
    std::vector<double> x;
    double objective = 0.0;
    double kkt_stationarity = 0.0;
    double kkt_feasibility = 0.0;
    double kkt_complementarity = 0.0;
    Multipliers multipliers;
    int iterations = 0;
    std::string message;
};

// Deterministic interior-point solve; on status == optimal every KKT
// residual is <= tol. max_iter caps the total Newton step count. Logs are
// natural-base: builders fold any 1/ln(2) factors into the weights.
SolveReport solve(const ConvexProgram& prog, double tol, int max_iter = 400);

struct KktResiduals {
    double stationarity = 0.0;
    double feasibility = 0.0;
    double complementarity = 0.0;
};

// Independent residual evaluation (separate gradient assembly from solve).
KktResiduals check_kkt(const ConvexProgram& prog, const std::vector<double>& x,
                       const Multipliers& mult);

// Human-readable listing of variables, objective atoms, and constraints.
std::string dump_program(const ConvexProgram& prog);

}  // namespace relayplan
