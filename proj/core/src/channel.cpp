#include "relayplan/channel.hpp"

#include <cmath>

namespace relayplan {

double a2g_gain(Vec2 q_uav, Vec2 q_ground, double altitude, double beta0) {
    const double d = norm(q_uav - q_ground);
    return beta0 / (d * d + altitude * altitude);
}

double g2g_mean_gain(Vec2 q_a, Vec2 q_b, double beta0, double eta) {
    const double d = norm(q_a - q_b);
    if (d <= 0.0) throw std::domain_error("g2g_mean_gain: coincident endpoints");
    return beta0 / std::pow(d, eta);
}

double worst_case_sw_gain(const Scenario& scn) {
    const double d = norm(scn.q_src - scn.q_warden_est);
    if (d <= scn.r_warden)
        throw std::domain_error("worst_case_sw_gain: warden ball contains source");
    return scn.beta0 / std::pow(d - scn.r_warden, scn.eta);
}

double worst_case_rw_gain(Vec2 q_uav, const Scenario& scn) {
    const double d = norm(q_uav - scn.q_warden_est) + scn.r_warden;
    return scn.beta0 / (d * d + scn.altitude * scn.altitude);
}

double worst_case_re_gain(Vec2 q_uav, const Scenario& scn) {
    const double d = std::max(norm(q_uav - scn.q_eaves_est) - scn.r_eaves, 0.0);
    return scn.beta0 / (d * d + scn.altitude * scn.altitude);
}

GainSet gain_set(const Trajectory& traj, const Scenario& scn) {
    GainSet g;
    g.g_sr.reserve(scn.n1);
    g.g_rw_wc.reserve(scn.n1);
    g.g_rd.reserve(scn.n2);
    g.g_re_wc.reserve(scn.n2);
    for (int slot = 1; slot <= scn.n1; ++slot) {
        const Vec2 q = traj.waypoints[slot];
        g.g_sr.push_back(a2g_gain(q, scn.q_src, scn.altitude, scn.beta0));
        g.g_rw_wc.push_back(worst_case_rw_gain(q, scn));
    }
    for (int slot = scn.n1 + 1; slot <= scn.n_total(); ++slot) {
        const Vec2 q = traj.waypoints[slot];
        g.g_rd.push_back(a2g_gain(q, scn.q_dst, scn.altitude, scn.beta0));
        g.g_re_wc.push_back(worst_case_re_gain(q, scn));
    }
    g.g_sw_mean = g2g_mean_gain(scn.q_src, scn.q_warden_est, scn.beta0, scn.eta);
    g.g_sw_wc = worst_case_sw_gain(scn);
    return g;
}

}  // namespace relayplan
