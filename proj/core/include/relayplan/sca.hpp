#pragma once

#include "relayplan/channel.hpp"
#include "relayplan/convex.hpp"
#include "relayplan/energy.hpp"
#include "relayplan/rates.hpp"

namespace relayplan {

// First-order expansions around the previous iterate, stored in absolute
// form: value(vars) = *_const + *_slope * var (or gradient dot for points).
// K over-estimates the eavesdropper log-rate; B and F under-estimate their
// squared-distance targets; C, D, E bound the slack-variable logs.
struct Linearizations {
    // K(n) = k_const[i] + k_slope[i]*p_relay(n), per phase-2 slot i
    std::vector<double> k_const, k_slope;
    // B(n) = b_const[i] + b_grad_a[i].(q(n)-q_l(n)) + b_grad_b[i].(q(n-1)-q_l(n-1)), per leg i=n-1
    std::vector<double> b_const;
    std::vector<Vec2> b_grad_a, b_grad_b;
    // C(n) = c_const[i] + c_slope[i]*nu(n), per phase-1 slot i
    std::vector<double> c_const, c_slope;
    // D(n) = d_const[i] + d_slope[i]*kappa(n), per phase-2 slot i
    std::vector<double> d_const, d_slope;
    // E(n) = e_const[i] + e_slope[i]*varpi(n), per phase-2 slot i
    std::vector<double> e_const, e_slope;
    // F(n) = f_const[i] + f_grad[i].(q(n)-q_l(n)), per phase-2 slot i
    std::vector<double> f_const;
    std::vector<Vec2> f_grad;
};

// Throws std::domain_error when a phase-2 waypoint coincides with the
// estimated eavesdropper position (the F gradient is undefined there).
Linearizations linearize_terms(const Solution& expansion, const Scenario& scn);

struct SlackSeeds {
    std::vector<double> lambda;    // N
    std::vector<double> nu;        // N1
    std::vector<double> kappa;     // N2
    std::vector<double> varpi;     // N2
    std::vector<double> vartheta;  // N1
};

// Tight (equality) slack values at a trajectory.
SlackSeeds seed_slacks(const Trajectory& traj, const Scenario& scn);

struct PowerSubproblemSolution {
    PowerSchedule powers;
    double omega2 = 0.0;  // bits/s
    double objective = 0.0;  // omega2 - phi*E_sum, bits/s
    SolveReport report;
};

// Transmit-power step: maximize omega2 - phi*E_sum at fixed trajectory.
PowerSubproblemSolution solve_power_subproblem(const Trajectory& traj, double alpha,
                                               const Solution& prev,
                                               const Scenario& scn, double phi_l);

struct TrajectorySubproblemSolution {
    Trajectory trajectory;
    std::vector<double> lambda, nu, kappa, varpi, vartheta;
    double omega3 = 0.0;
    double objective = 0.0;  // omega3 - phi*E_sum_surrogate, bits/s
    SolveReport report;
};

// Trajectory step: maximize omega3 - phi*E_sum_surrogate at fixed powers.
// On solver infeasibility the slacks are reseeded tight and the solve retried
// once; persistent infeasibility surfaces in report.status.
TrajectorySubproblemSolution solve_trajectory_subproblem(const PowerSchedule& powers,
                                                         double alpha,
                                                         const Solution& prev,
                                                         const Scenario& scn,
                                                         double phi_l);

}  // namespace relayplan
