#pragma once

#include <utility>

#include "relayplan/alpha_opt.hpp"
#include "relayplan/sca.hpp"

namespace relayplan {

// prop: optimize alpha, powers, and trajectory.
// ben1: fixed alpha, optimize powers and trajectory.
// ben2: fixed straight-line trajectory, optimize alpha and powers.
enum class AoMode { prop, ben1, ben2 };

const char* to_string(AoMode m);
AoMode ao_mode_from_string(const std::string& s);

struct AoConfig {
    int max_iterations = 50;
    double conv_tol = 0.01;  // on the reported efficiency, bits/J
    AoMode mode = AoMode::prop;
    double ben1_alpha = 0.5;
};

struct AoIterationRecord {
    int iter = 0;
    double phi = 0.0;  // efficiency after this iteration, bits/J
    double alpha = 0.0;
    double obj_alpha = 0.0;  // subproblem objectives, bits/s
    double obj_power = 0.0;
    double obj_traj = 0.0;
    std::string status;
};

struct AoTrace {
    std::vector<AoIterationRecord> records;
    bool converged = false;
    std::string stop_reason;
};

// Straight-line trajectory, alpha = 0.5, covert-feasible source power,
// maximal relay power. Throws ValidationError when no alpha makes the
// straight line speed-feasible.
Solution initialize(const Scenario& scn, AoMode mode, double ben1_alpha = 0.5);

std::pair<Solution, AoTrace> ao_solve(const Scenario& scn, const AoConfig& cfg);

struct Evaluation {
    double csee = 0.0;     // bits/J
    double acsr_lb = 0.0;  // bits/s
    double energy = 0.0;   // J
    double acsr_phase1 = 0.0;             // phi1 * sum r1
    double acsr_phase2_clamped = 0.0;     // phi2 * sum [r2]+
    double acsr_phase2_unclamped = 0.0;   // phi2 * sum r2
    double min_dep_worst = 1.0;           // over active phase-1 slots
    double covert_slack_worst = 0.0;      // most negative = worst
    RateBreakdown rates;
};

// Recomputes every reported quantity from scratch; the end-to-end oracle
// for trace phi values.
Evaluation evaluate(const Scenario& scn, const Solution& sol);

}  // namespace relayplan
