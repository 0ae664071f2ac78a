#include "relayplan/energy.hpp"

#include <cmath>

namespace relayplan {

LegDistances leg_distances(const Trajectory& traj) {
    LegDistances legs;
    legs.d.reserve(traj.waypoints.size() - 1);
    for (size_t n = 1; n < traj.waypoints.size(); ++n)
        legs.d.push_back(norm(traj.waypoints[n] - traj.waypoints[n - 1]));
    return legs;
}

double propulsion_power_exact(double speed, const RotorParams& rotor) {
    if (speed < 0.0) throw std::domain_error("propulsion_power_exact: speed < 0");
    const double v2 = speed * speed;
    const double blade = rotor.p0 * (1.0 + 3.0 * v2 / (rotor.u_tip * rotor.u_tip));
    // sqrt(1+x^2) - x written as 1/(sqrt(1+x^2)+x) to dodge cancellation.
    const double x = v2 / (2.0 * rotor.v0 * rotor.v0);
    const double induced = rotor.p1 * std::sqrt(1.0 / (std::sqrt(1.0 + x * x) + x));
    const double parasite = 0.5 * rotor.d0 * rotor.rho_air * rotor.rotor_solidity *
                            rotor.disc_area * v2 * speed;
    return blade + induced + parasite;
}

double propulsion_power_approx(double speed, const RotorParams& rotor) {
    if (speed <= 0.0) throw std::domain_error("propulsion_power_approx: speed <= 0");
    const double v2 = speed * speed;
    const double blade = rotor.p0 * (1.0 + 3.0 * v2 / (rotor.u_tip * rotor.u_tip));
    const double induced = rotor.p1 * rotor.v0 / speed;
    const double parasite = 0.5 * rotor.d0 * rotor.rho_air * rotor.rotor_solidity *
                            rotor.disc_area * v2 * speed;
    return blade + induced + parasite;
}

double e_sum(const Trajectory& traj, const PhasePlan& plan, const RotorParams& rotor) {
    const LegDistances legs = leg_distances(traj);
    double total = 0.0;
    for (size_t i = 0; i < legs.d.size(); ++i) {
        const double d = legs.d[i];
        if (d < kMinLegLength)
            throw std::domain_error("e_sum: leg shorter than the minimum length");
        const double delta =
            static_cast<int>(i) < plan.n1 ? plan.delta1 : plan.delta2;
        total += delta * propulsion_power_approx(d / delta, rotor);
    }
    return total;
}

AlphaEnergyCoeffs alpha_energy_coeffs(const LegDistances& distances,
                                      const Scenario& scn) {
    double sum_d2_1 = 0.0, sum_inv_1 = 0.0, sum_d3_1 = 0.0;
    double sum_d2_2 = 0.0, sum_inv_2 = 0.0, sum_d3_2 = 0.0;
    for (size_t i = 0; i < distances.d.size(); ++i) {
        const double d = distances.d[i];
        if (d < kMinLegLength)
            throw std::domain_error(
                "alpha_energy_coeffs: leg shorter than the minimum length");
        const bool phase1 = static_cast<int>(i) < scn.n1;
        (phase1 ? sum_d2_1 : sum_d2_2) += d * d;
        (phase1 ? sum_inv_1 : sum_inv_2) += 1.0 / d;
        (phase1 ? sum_d3_1 : sum_d3_2) += d * d * d;
    }
    const RotorParams& r = scn.rotor;
    const double T = scn.period;
    const double parasite = 0.5 * r.d0 * r.rho_air * r.rotor_solidity * r.disc_area;

    AlphaEnergyCoeffs c;
    c.a1 = r.p0 * T;
    c.b1 = 3.0 * r.p0 * scn.n1 * sum_d2_1 / (r.u_tip * r.u_tip * T);
    c.c1 = r.p1 * r.v0 * T * T * sum_inv_1 / (static_cast<double>(scn.n1) * scn.n1);
    c.d1 = parasite * static_cast<double>(scn.n1) * scn.n1 * sum_d3_1 / (T * T);
    c.a2 = r.p0 * T;
    c.b2 = 3.0 * r.p0 * scn.n2 * sum_d2_2 / (r.u_tip * r.u_tip * T);
    c.c2 = r.p1 * r.v0 * T * T * sum_inv_2 / (static_cast<double>(scn.n2) * scn.n2);
    c.d2 = parasite * static_cast<double>(scn.n2) * scn.n2 * sum_d3_2 / (T * T);
    return c;
}

double alpha_energy_eval(const AlphaEnergyCoeffs& c, double alpha) {
    const double x = alpha, y = 1.0 - alpha;
    return c.a1 * x + c.b1 / x + c.c1 * x * x + c.d1 / (x * x) +
           c.a2 * y + c.b2 / y + c.c2 * y * y + c.d2 / (y * y);
}

double de_sum_dalpha(const AlphaEnergyCoeffs& c, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("de_sum_dalpha: alpha outside (0,1)");
    const double x = alpha, y = 1.0 - alpha;
    return c.a1 - c.b1 / (x * x) + 2.0 * c.c1 * x - 2.0 * c.d1 / (x * x * x) -
           c.a2 + c.b2 / (y * y) - 2.0 * c.c2 * y + 2.0 * c.d2 / (y * y * y);
}

double csee(double acsr_lb, double energy, double period) {
    if (!(energy > 0.0)) throw std::domain_error("csee: energy must be > 0");
    return acsr_lb * period / energy;
}

}  // namespace relayplan
