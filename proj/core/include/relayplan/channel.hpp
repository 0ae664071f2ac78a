#pragma once

#include "relayplan/scenario.hpp"

namespace relayplan {

// Per-slot channel power gains along a trajectory, with the robust
// worst-case substitutions already applied where the optimizer needs them.
struct GainSet {
    std::vector<double> g_sr;     // N1: source -> relay
    std::vector<double> g_rw_wc;  // N1: relay -> warden, worst case (lower bound)
    std::vector<double> g_rd;     // N2: relay -> destination
    std::vector<double> g_re_wc;  // N2: relay -> eavesdropper, worst case (upper bound)
    double g_sw_mean = 0.0;       // source -> warden, Rayleigh mean
    double g_sw_wc = 0.0;         // source -> warden, worst case (upper bound)
};

// Line-of-sight air-to-ground gain beta0/(dist^2 + H^2).
double a2g_gain(Vec2 q_uav, Vec2 q_ground, double altitude, double beta0);

// Rayleigh mean ground-to-ground gain beta0/dist^eta.
// Throws std::domain_error when q_a == q_b.
double g2g_mean_gain(Vec2 q_a, Vec2 q_b, double beta0, double eta);

// Worst-case S->W gain over the warden uncertainty disc.
// Throws std::domain_error when the disc contains the source.
double worst_case_sw_gain(const Scenario& scn);

// Worst-case (largest-detection) R->W gain: distance inflated by r_warden.
double worst_case_rw_gain(Vec2 q_uav, const Scenario& scn);

// Worst-case (largest-leak) R->E gain: distance deflated by r_eaves, clamped at 0.
double worst_case_re_gain(Vec2 q_uav, const Scenario& scn);

// Evaluates every per-slot gain at waypoints[1..N].
GainSet gain_set(const Trajectory& traj, const Scenario& scn);

}  // namespace relayplan
