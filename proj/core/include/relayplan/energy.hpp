#pragma once

#include "relayplan/scenario.hpp"

namespace relayplan {

// Legs shorter than this make the induced-power surrogate term diverge.
inline constexpr double kMinLegLength = 1e-3;  // m

struct LegDistances {
    std::vector<double> d;  // N legs, d[n-1] = |waypoints[n] - waypoints[n-1]|
};

LegDistances leg_distances(const Trajectory& traj);

// E(alpha) = a1*x + b1/x + c1*x^2 + d1/x^2 + a2*y + b2/y + c2*y^2 + d2/y^2
// with x = alpha, y = 1-alpha. All coefficients nonnegative.
struct AlphaEnergyCoeffs {
    double a1 = 0.0, b1 = 0.0, c1 = 0.0, d1 = 0.0;
    double a2 = 0.0, b2 = 0.0, c2 = 0.0, d2 = 0.0;
};

double propulsion_power_exact(double speed, const RotorParams& rotor);

// Surrogate that replaces the induced term with p1*v0/speed; dominates the
// exact model at every speed > 0. Throws std::domain_error at speed = 0.
double propulsion_power_approx(double speed, const RotorParams& rotor);

// Total propulsion energy under the surrogate model.
// Throws std::domain_error when any leg is shorter than kMinLegLength.
double e_sum(const Trajectory& traj, const PhasePlan& plan, const RotorParams& rotor);

AlphaEnergyCoeffs alpha_energy_coeffs(const LegDistances& distances, const Scenario& scn);

double alpha_energy_eval(const AlphaEnergyCoeffs& c, double alpha);

// Analytic dE/dalpha; strictly increasing on (0,1).
// Throws std::domain_error outside (0,1).
double de_sum_dalpha(const AlphaEnergyCoeffs& c, double alpha);

// Reported efficiency (acsr_lb * period) / energy, bits/J.
double csee(double acsr_lb, double energy, double period);

}  // namespace relayplan
