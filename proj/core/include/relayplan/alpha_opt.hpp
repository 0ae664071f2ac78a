#pragma once

#include <utility>

#include "relayplan/energy.hpp"
#include "relayplan/scenario.hpp"

namespace relayplan {

// Inputs of the switching-factor search. rho2 aggregates unclamped phase-2
// rates and may be negative; rho1 is always nonnegative.
struct PdsaCoefficients {
    double rho1 = 0.0;  // mean phase-1 slot rate, bits/s
    double rho2 = 0.0;  // mean phase-2 slot rate, bits/s (unclamped)
    double beta1 = 0.0;
    double beta2 = 0.0;
    double alpha_hat1 = 0.0;  // root of -phi*E'(a) + rho1 = 0
    double alpha_hat2 = 0.0;  // rho2/(rho1+rho2)
    double alpha_hat3 = 0.0;  // root of -phi*E'(a) - rho2 = 0
};

enum class PdsaCase {
    case_i,          // alpha_hat1, balanced side
    case_ii,         // alpha_hat2
    case_iii,        // alpha_hat3 over alpha_hat2
    case_iv,         // beta1
    case_v,          // alpha_hat3 past beta1
    mirror_lo,       // alpha_hat1 <= beta1 -> beta1
    mirror_hi,       // (1-beta2)*rho1 <= beta2*rho2 -> 1-beta2
    mirror_ii,       // alpha_hat2 in the clamped interval
    mirror_iii,      // alpha_hat3 over alpha_hat2
    mirror_iv,       // beta1 >= alpha_hat3
    mirror_v,        // alpha_hat3 inside
    mirror_clamp,    // alpha_hat3 beyond 1-beta2 -> 1-beta2
    phi_zero_flat,   // phi = 0 and a flat min(...) objective
    phi_zero_balance,  // phi = 0, interior balance point
    rho2_nonpositive   // rho2 <= 0: clamp(alpha_hat3)
};

const char* to_string(PdsaCase c);

struct PdsaDiagnostics {
    PdsaCase case_taken = PdsaCase::case_i;
    double lambda1 = 0.0, lambda2 = 0.0, lambda3 = 0.0, lambda4 = 0.0;
    double stationarity_residual = 0.0;
};

// Extracts rates, margins, and bisection roots at the current iterate.
// Throws std::domain_error when the bisection bracket carries no sign change
// (possible only with zero-length-phase coefficient degeneracies).
PdsaCoefficients pdsa_coeffs(const Trajectory& traj, const PowerSchedule& powers,
                             const Scenario& scn, double phi_l);

// Same candidate extraction from already-aggregated rates and margins;
// lets synthetic instances bypass trajectory construction.
PdsaCoefficients pdsa_coeffs_from_parts(const AlphaEnergyCoeffs& energy, double rho1,
                                        double rho2, double beta1, double beta2,
                                        double phi_l);

// min(alpha*rho1, (1-alpha)*rho2) - phi*E(alpha): the subproblem objective.
double pdsa_objective(const PdsaCoefficients& c, const AlphaEnergyCoeffs& energy,
                      double phi_l, double alpha);

// Case analysis over the KKT system. Throws ValidationError when
// beta1 + beta2 >= 1 (empty feasible interval).
std::pair<double, PdsaDiagnostics> pdsa_alpha(const PdsaCoefficients& c,
                                              const AlphaEnergyCoeffs& energy,
                                              double phi_l);

// Dense grid argmax of the same objective; ties broken toward smaller alpha.
double alpha_grid_oracle(const PdsaCoefficients& c, const AlphaEnergyCoeffs& energy,
                         double phi_l, double step);

}  // namespace relayplan
