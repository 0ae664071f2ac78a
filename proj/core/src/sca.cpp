#include "relayplan/sca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace relayplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sqr(double v) { return v * v; }

void require_expansion_shape(const Solution& ex, const Scenario& scn) {
    if (static_cast<int>(ex.trajectory.waypoints.size()) != scn.n_total() + 1)
        throw std::invalid_argument("expansion trajectory does not match the slot counts");
    if (static_cast<int>(ex.powers.p_src.size()) != scn.n1 ||
        static_cast<int>(ex.powers.p_relay.size()) != scn.n2)
        throw std::invalid_argument("expansion powers do not match the slot counts");
}

}  // namespace

Linearizations linearize_terms(const Solution& expansion, const Scenario& scn) {
    require_expansion_shape(expansion, scn);
    const auto& w = expansion.trajectory.waypoints;
    const int n1 = scn.n1, n2 = scn.n2, n = scn.n_total();
    const double bw = scn.bandwidth;
    const double s2 = scn.noise;
    const double wlog = bw / std::numbers::ln2;

    const GainSet gains = gain_set(expansion.trajectory, scn);
    const SlackSeeds tight = seed_slacks(expansion.trajectory, scn);
    const double jden = scn.jam_power_eff() * scn.sic_level + s2;

    Linearizations lin;

    for (int i = 0; i < n2; ++i) {
        const auto iu = static_cast<size_t>(i);
        const double g = gains.g_re_wc[iu];
        const double pl = expansion.powers.p_relay[iu];
        const double ks = wlog * g / (s2 + pl * g);
        lin.k_slope.push_back(ks);
        lin.k_const.push_back(bw * std::log2(1.0 + pl * g / s2) - ks * pl);
    }

    for (int i = 0; i < n; ++i) {
        const auto iu = static_cast<size_t>(i);
        const Vec2 dq = w[iu + 1] - w[iu];
        lin.b_const.push_back(dot(dq, dq));
        lin.b_grad_a.push_back(2.0 * dq);
        lin.b_grad_b.push_back(-2.0 * dq);
    }

    for (int i = 0; i < n1; ++i) {
        const double nul = tight.nu[static_cast<size_t>(i)];
        const double slope = wlog / nul;
        lin.c_slope.push_back(slope);
        lin.c_const.push_back(bw * std::log2(nul * jden) - slope * nul);
    }

    for (int i = 0; i < n2; ++i) {
        const auto iu = static_cast<size_t>(i);
        const double kl = tight.kappa[iu];
        const double dslope = wlog / kl;
        lin.d_slope.push_back(dslope);
        lin.d_const.push_back(bw * std::log2(kl * s2) - dslope * kl);

        const double vl = tight.varpi[iu];
        const double den = vl * s2 + expansion.powers.p_relay[iu] * scn.beta0;
        const double eslope = wlog * s2 / den;
        lin.e_slope.push_back(eslope);
        lin.e_const.push_back(bw * std::log2(den) - eslope * vl);

        const Vec2 dq = w[static_cast<size_t>(n1 + 1 + i)] - scn.q_eaves_est;
        const double nd = norm(dq);
        if (nd == 0.0)
            throw std::domain_error(
                "waypoint coincides with the estimated eavesdropper position");
        const double root = nd - scn.r_eaves;
        lin.f_const.push_back(root * root);
        lin.f_grad.push_back((2.0 * root / nd) * dq);
    }
    return lin;
}

SlackSeeds seed_slacks(const Trajectory& traj, const Scenario& scn) {
    if (static_cast<int>(traj.waypoints.size()) != scn.n_total() + 1)
        throw std::invalid_argument("trajectory does not match the slot counts");
    const auto& w = traj.waypoints;
    const double h2 = sqr(scn.altitude);

    SlackSeeds s;
    const LegDistances dist = leg_distances(traj);
    for (double d : dist.d) s.lambda.push_back(std::max(d, kMinLegLength));
    for (int i = 0; i < scn.n1; ++i) {
        const Vec2 q = w[static_cast<size_t>(i + 1)];
        s.nu.push_back(dot(q - scn.q_src, q - scn.q_src) + h2);
        s.vartheta.push_back(sqr(norm(q - scn.q_warden_est) + scn.r_warden) + h2);
    }
    for (int i = 0; i < scn.n2; ++i) {
        const Vec2 q = w[static_cast<size_t>(scn.n1 + 1 + i)];
        s.kappa.push_back(dot(q - scn.q_dst, q - scn.q_dst) + h2);
        s.varpi.push_back(sqr(std::max(norm(q - scn.q_eaves_est) - scn.r_eaves, 0.0)) + h2);
    }
    return s;
}

PowerSubproblemSolution solve_power_subproblem(const Trajectory& traj, double alpha,
                                               const Solution& prev, const Scenario& scn,
                                               double phi_l) {
    const PhasePlan plan = phase_plan(scn, alpha);
    Solution ex = prev;
    ex.trajectory = traj;
    require_expansion_shape(ex, scn);
    const GainSet gains = gain_set(traj, scn);
    const Linearizations lin = linearize_terms(ex, scn);

    const int n1 = scn.n1, n2 = scn.n2;
    const double s2 = scn.noise;
    const double jden = scn.jam_power_eff() * scn.sic_level + s2;
    const double wlog = scn.bandwidth / std::numbers::ln2;

    ConvexProgram prog;
    const int ps = prog.add_block("p_src", n1, 0.0, scn.p_src_max);
    const int pr = prog.add_block("p_relay", n2, 0.0, scn.p_relay_max);
    const int w2 = prog.add_block("omega2", 1, -kInf, kInf);
    prog.objective.affine = Affine::of_var(w2, 1.0);

    // Per-slot covert power caps on the source.
    std::vector<double> cap_p(static_cast<size_t>(n1));
    for (int i = 0; i < n1; ++i) {
        const auto iu = static_cast<size_t>(i);
        cap_p[iu] = scn.epsilon_covert * scn.p_jam_max * gains.g_rw_wc[iu] / gains.g_sw_wc;
        AffineLeq c;
        c.expr = Affine::of_var(ps + i, 1.0 / cap_p[iu], -1.0);
        c.name = "covert[" + std::to_string(i + 1) + "]";
        prog.affine_cons.push_back(std::move(c));
    }

    {
        LogSumGeq r1;
        r1.name = "rate_phase1";
        for (int i = 0; i < n1; ++i)
            r1.lhs.push_back(
                {plan.phi1 * wlog,
                 Affine::of_var(ps + i, gains.g_sr[static_cast<size_t>(i)] / jden, 1.0)});
        r1.rhs = Affine::of_var(w2, 1.0);
        prog.log_cons.push_back(std::move(r1));
    }
    {
        LogSumGeq r2;
        r2.name = "rate_phase2";
        Affine rhs = Affine::of_var(w2, 1.0);
        for (int i = 0; i < n2; ++i) {
            const auto iu = static_cast<size_t>(i);
            r2.lhs.push_back(
                {plan.phi2 * wlog, Affine::of_var(pr + i, gains.g_rd[iu] / s2, 1.0)});
            rhs.add(pr + i, plan.phi2 * lin.k_slope[iu]);
            rhs.constant += plan.phi2 * lin.k_const[iu];
        }
        r2.rhs = std::move(rhs);
        prog.log_cons.push_back(std::move(r2));
    }

    // Strictly interior seed at the previous powers.
    prog.initial_point.assign(prog.lower.size(), 0.0);
    for (int i = 0; i < n1; ++i) {
        const auto iu = static_cast<size_t>(i);
        const double hi = std::min(scn.p_src_max, cap_p[iu]) * (1.0 - 1e-6);
        const double lo = std::min(hi * 0.5, scn.p_src_max * 1e-9);
        prog.initial_point[static_cast<size_t>(ps + i)] =
            std::clamp(prev.powers.p_src[iu], lo, hi);
    }
    for (int i = 0; i < n2; ++i) {
        const double hi = scn.p_relay_max * (1.0 - 1e-6);
        prog.initial_point[static_cast<size_t>(pr + i)] =
            std::clamp(prev.powers.p_relay[static_cast<size_t>(i)], scn.p_relay_max * 1e-9, hi);
    }
    {
        double v1 = 0.0, v2 = 0.0;
        for (int i = 0; i < n1; ++i) {
            const auto iu = static_cast<size_t>(i);
            const double p = prog.initial_point[static_cast<size_t>(ps + i)];
            v1 += plan.phi1 * scn.bandwidth * std::log2(1.0 + p * gains.g_sr[iu] / jden);
        }
        for (int i = 0; i < n2; ++i) {
            const auto iu = static_cast<size_t>(i);
            const double p = prog.initial_point[static_cast<size_t>(pr + i)];
            v2 += plan.phi2 * (scn.bandwidth * std::log2(1.0 + p * gains.g_rd[iu] / s2) -
                               (lin.k_const[iu] + lin.k_slope[iu] * p));
        }
        const double vmin = std::min(v1, v2);
        prog.initial_point[static_cast<size_t>(w2)] = vmin - 1e-6 * (1.0 + std::abs(vmin));
    }

    PowerSubproblemSolution out;
    out.report = solve(prog, scn.solver_tol, 1200);

    out.powers.p_src.resize(static_cast<size_t>(n1));
    out.powers.p_relay.resize(static_cast<size_t>(n2));
    for (int i = 0; i < n1; ++i) {
        // Clamped a hair inside the covert cap so the following trajectory
        // step starts strictly feasible.
        const auto iu = static_cast<size_t>(i);
        const double v = out.report.x[static_cast<size_t>(ps + i)];
        out.powers.p_src[iu] =
            std::clamp(v, 0.0, std::min(scn.p_src_max, cap_p[iu] * (1.0 - 1e-9)));
    }
    for (int i = 0; i < n2; ++i)
        out.powers.p_relay[static_cast<size_t>(i)] =
            std::clamp(out.report.x[static_cast<size_t>(pr + i)], 0.0, scn.p_relay_max);
    out.omega2 = out.report.x[static_cast<size_t>(w2)];
    out.objective = out.omega2 - phi_l * e_sum(traj, plan, scn.rotor);
    return out;
}

namespace {

// Variable layout of the trajectory program. Waypoints 0 and N are fixed.
struct TrajLayout {
    int q0 = 0;                   // 2*(N-1) interior waypoint coordinates
    std::vector<int> la;          // N lambda vars
    std::vector<int> nu;          // N1
    std::vector<int> ka, vp;      // N2 each
    std::vector<int> vt, mm;      // N1 each, -1 where the source is silent
    int w3 = 0;
};

struct TrajBuild {
    ConvexProgram prog;
    TrajLayout lay;
    std::vector<double> cap_theta;  // per phase-1 slot, 0 where silent
};

// Affine form of waypoint coordinate (axis 0 = x, 1 = y); endpoints fold to
// constants.
Affine q_coord(const TrajLayout& lay, const Scenario& scn, int wp, int axis) {
    const int n = scn.n_total();
    if (wp == 0) return Affine::of_constant(axis == 0 ? scn.q_start.x : scn.q_start.y);
    if (wp == n) return Affine::of_constant(axis == 0 ? scn.q_end.x : scn.q_end.y);
    return Affine::of_var(lay.q0 + 2 * (wp - 1) + axis);
}

Affine sub(const Affine& a, const Affine& b) {
    Affine r = a;
    for (const auto& t : b.terms) r.add(t.index, -t.coeff);
    r.constant -= b.constant;
    return r;
}

std::vector<Affine> leg_rows(const TrajLayout& lay, const Scenario& scn, int leg) {
    return {sub(q_coord(lay, scn, leg + 1, 0), q_coord(lay, scn, leg, 0)),
            sub(q_coord(lay, scn, leg + 1, 1), q_coord(lay, scn, leg, 1))};
}

std::vector<Affine> offset_rows(const TrajLayout& lay, const Scenario& scn, int wp,
                                Vec2 anchor) {
    Affine x = q_coord(lay, scn, wp, 0);
    x.constant -= anchor.x;
    Affine y = q_coord(lay, scn, wp, 1);
    y.constant -= anchor.y;
    return {x, y};
}

TrajBuild build_trajectory_program(const PowerSchedule& powers, const PhasePlan& plan,
                                   const Solution& prev, const Scenario& scn, double phi_l,
                                   const Linearizations& lin, bool centered) {
    const int n1 = scn.n1, n2 = scn.n2, n = scn.n_total();
    const auto& wl = prev.trajectory.waypoints;
    const double s2 = scn.noise;
    const double h2 = sqr(scn.altitude);
    const double jden = scn.jam_power_eff() * scn.sic_level + s2;
    const double wlog = scn.bandwidth / std::numbers::ln2;
    const double parasite = 0.5 * scn.rotor.d0 * scn.rotor.rho_air * scn.rotor.rotor_solidity *
                            scn.rotor.disc_area;
    const SlackSeeds tight = seed_slacks(prev.trajectory, scn);

    TrajBuild b;
    ConvexProgram& prog = b.prog;
    TrajLayout& lay = b.lay;

    lay.q0 = prog.add_block("q", 2 * (n - 1), -kInf, kInf);
    for (int i = 0; i < n; ++i) {
        const double dk = i < n1 ? plan.delta1 : plan.delta2;
        lay.la.push_back(prog.add_block("lambda[" + std::to_string(i + 1) + "]", 1,
                                        kMinLegLength, dk * scn.v_max));
    }
    for (int i = 0; i < n1; ++i)
        lay.nu.push_back(prog.add_block("nu[" + std::to_string(i + 1) + "]", 1, 0.5 * h2, kInf));
    for (int i = 0; i < n2; ++i) {
        const std::string tag = std::to_string(n1 + 1 + i);
        lay.ka.push_back(prog.add_block("kappa[" + tag + "]", 1, 0.5 * h2, kInf));
        lay.vp.push_back(prog.add_block("varpi[" + tag + "]", 1, h2 * (1.0 - 1e-3), kInf));
    }
    b.cap_theta.assign(static_cast<size_t>(n1), 0.0);
    const double g_sw_wc = worst_case_sw_gain(scn);
    for (int i = 0; i < n1; ++i) {
        const auto iu = static_cast<size_t>(i);
        if (powers.p_src[iu] > 0.0) {
            const std::string tag = std::to_string(i + 1);
            lay.vt.push_back(prog.add_block("vartheta[" + tag + "]", 1, h2, kInf));
            lay.mm.push_back(prog.add_block("wdist[" + tag + "]", 1, 0.0, kInf));
            b.cap_theta[iu] = scn.epsilon_covert * scn.beta0 * scn.p_jam_max /
                              (powers.p_src[iu] * g_sw_wc);
        } else {
            lay.vt.push_back(-1);
            lay.mm.push_back(-1);
        }
    }
    lay.w3 = prog.add_block("omega3", 1, -kInf, kInf);

    // Objective: omega3 minus the propulsion-energy surrogate.
    prog.objective.affine = Affine::of_var(lay.w3, 1.0);
    prog.objective.affine.constant = -phi_l * scn.period * scn.rotor.p0;
    for (int i = 0; i < n; ++i) {
        const double dk = i < n1 ? plan.delta1 : plan.delta2;
        const auto rows = leg_rows(lay, scn, i);
        prog.objective.squared_norms.push_back(
            {phi_l * 3.0 * scn.rotor.p0 / (dk * sqr(scn.rotor.u_tip)), rows});
        prog.objective.cubed_norms.push_back({phi_l * parasite / sqr(dk), rows});
        prog.objective.reciprocals.push_back(
            {phi_l * sqr(dk) * scn.rotor.p1 * scn.rotor.v0, lay.la[static_cast<size_t>(i)]});
    }

    // Leg bounds and speed limits.
    for (int i = 0; i < n; ++i) {
        const auto iu = static_cast<size_t>(i);
        const double dk = i < n1 ? plan.delta1 : plan.delta2;
        const std::string tag = std::to_string(i + 1);

        Affine bexpr = Affine::of_constant(lin.b_const[iu] -
                                           dot(lin.b_grad_a[iu], wl[iu + 1]) -
                                           dot(lin.b_grad_b[iu], wl[iu]));
        Affine qa_x = q_coord(lay, scn, i + 1, 0), qa_y = q_coord(lay, scn, i + 1, 1);
        Affine qb_x = q_coord(lay, scn, i, 0), qb_y = q_coord(lay, scn, i, 1);
        auto fold = [&bexpr](const Affine& coord, double coeff) {
            for (const auto& t : coord.terms) bexpr.add(t.index, coeff * t.coeff);
            bexpr.constant += coeff * coord.constant;
        };
        fold(qa_x, lin.b_grad_a[iu].x);
        fold(qa_y, lin.b_grad_a[iu].y);
        fold(qb_x, lin.b_grad_b[iu].x);
        fold(qb_y, lin.b_grad_b[iu].y);
        prog.sq_cons.push_back({{Affine::of_var(lay.la[iu])}, bexpr, "leg_bound[" + tag + "]"});

        prog.sq_cons.push_back({leg_rows(lay, scn, i),
                                Affine::of_constant(sqr(dk * scn.v_max + 1e-10)),
                                "speed[" + tag + "]"});
    }

    // Slack definitions tying distances to the rate and covert surrogates.
    for (int i = 0; i < n1; ++i) {
        const auto iu = static_cast<size_t>(i);
        const int wp = i + 1;
        const std::string tag = std::to_string(wp);
        prog.sq_cons.push_back({offset_rows(lay, scn, wp, scn.q_src),
                                Affine::of_var(lay.nu[iu], 1.0, -h2), "nu_def[" + tag + "]"});
        if (lay.vt[iu] >= 0) {
            prog.norm_cons.push_back({offset_rows(lay, scn, wp, scn.q_warden_est),
                                      Affine::of_var(lay.mm[iu]), "warden_dist[" + tag + "]"});
            prog.sq_cons.push_back({{Affine::of_var(lay.mm[iu], 1.0, scn.r_warden)},
                                    Affine::of_var(lay.vt[iu], 1.0, -h2),
                                    "vartheta_def[" + tag + "]"});
            AffineLeq cov;
            cov.expr = Affine::of_var(lay.vt[iu], 1.0 / b.cap_theta[iu], -1.0);
            cov.name = "covert[" + tag + "]";
            prog.affine_cons.push_back(std::move(cov));
        }
    }
    for (int i = 0; i < n2; ++i) {
        const auto iu = static_cast<size_t>(i);
        const int wp = n1 + 1 + i;
        const std::string tag = std::to_string(wp);
        prog.sq_cons.push_back({offset_rows(lay, scn, wp, scn.q_dst),
                                Affine::of_var(lay.ka[iu], 1.0, -h2),
                                "kappa_def[" + tag + "]"});
        // varpi <= F + H^2 with F affine around the expansion waypoint.
        Affine cap = Affine::of_var(lay.vp[iu], 1.0,
                                    -(lin.f_const[iu] + h2 -
                                      dot(lin.f_grad[iu], wl[static_cast<size_t>(wp)])));
        Affine qx = q_coord(lay, scn, wp, 0), qy = q_coord(lay, scn, wp, 1);
        for (const auto& t : qx.terms) cap.add(t.index, -lin.f_grad[iu].x * t.coeff);
        cap.constant -= lin.f_grad[iu].x * qx.constant;
        for (const auto& t : qy.terms) cap.add(t.index, -lin.f_grad[iu].y * t.coeff);
        cap.constant -= lin.f_grad[iu].y * qy.constant;
        prog.affine_cons.push_back({std::move(cap), "varpi_cap[" + tag + "]"});
    }

    // Rate lower bounds.
    {
        LogSumGeq r1;
        r1.name = "rate_phase1";
        Affine rhs = Affine::of_var(lay.w3, 1.0);
        for (int i = 0; i < n1; ++i) {
            const auto iu = static_cast<size_t>(i);
            r1.lhs.push_back({plan.phi1 * wlog,
                              Affine::of_var(lay.nu[iu], jden,
                                             powers.p_src[iu] * scn.beta0)});
            rhs.add(lay.nu[iu], plan.phi1 * lin.c_slope[iu]);
            rhs.constant += plan.phi1 * lin.c_const[iu];
        }
        r1.rhs = std::move(rhs);
        prog.log_cons.push_back(std::move(r1));
    }
    {
        LogSumGeq r2;
        r2.name = "rate_phase2";
        Affine rhs = Affine::of_var(lay.w3, 1.0);
        for (int i = 0; i < n2; ++i) {
            const auto iu = static_cast<size_t>(i);
            r2.lhs.push_back({plan.phi2 * wlog,
                              Affine::of_var(lay.ka[iu], s2,
                                             powers.p_relay[iu] * scn.beta0)});
            r2.lhs.push_back({plan.phi2 * wlog, Affine::of_var(lay.vp[iu], s2)});
            rhs.add(lay.ka[iu], plan.phi2 * lin.d_slope[iu]);
            rhs.add(lay.vp[iu], plan.phi2 * lin.e_slope[iu]);
            rhs.constant += plan.phi2 * (lin.d_const[iu] + lin.e_const[iu]);
        }
        r2.rhs = std::move(rhs);
        prog.log_cons.push_back(std::move(r2));
    }

    // Strictly interior seed around the expansion point. The centered retry
    // backs every slack off to interval midpoints.
    std::vector<double>& x0 = prog.initial_point;
    x0.assign(prog.lower.size(), 0.0);
    for (int wp = 1; wp < n; ++wp) {
        x0[static_cast<size_t>(lay.q0 + 2 * (wp - 1))] = wl[static_cast<size_t>(wp)].x;
        x0[static_cast<size_t>(lay.q0 + 2 * (wp - 1) + 1)] = wl[static_cast<size_t>(wp)].y;
    }
    for (int i = 0; i < n; ++i) {
        const auto iu = static_cast<size_t>(i);
        const double dk = i < n1 ? plan.delta1 : plan.delta2;
        const double top = std::min(tight.lambda[iu], dk * scn.v_max);
        double seed = centered ? 0.5 * (kMinLegLength + top) : top * (1.0 - 1e-6);
        if (seed <= kMinLegLength) seed = 0.5 * (kMinLegLength + top);
        x0[static_cast<size_t>(lay.la[iu])] = seed;
    }
    const double slack_up = centered ? 1e-3 : 1e-6;
    for (int i = 0; i < n1; ++i) {
        const auto iu = static_cast<size_t>(i);
        x0[static_cast<size_t>(lay.nu[iu])] = tight.nu[iu] * (1.0 + slack_up);
        if (lay.vt[iu] >= 0) {
            const double lo_t = tight.vartheta[iu];
            const double hi_t = b.cap_theta[iu];
            double seed_t = lo_t * (1.0 + slack_up);
            if (seed_t >= hi_t) seed_t = 0.5 * (lo_t + hi_t);
            x0[static_cast<size_t>(lay.vt[iu])] = seed_t;
            const double dist = norm(prev.trajectory.waypoints[iu + 1] - scn.q_warden_est);
            const double m_max = std::sqrt(std::max(seed_t - h2, 0.0)) - scn.r_warden;
            x0[static_cast<size_t>(lay.mm[iu])] = 0.5 * (dist + m_max);
        }
    }
    for (int i = 0; i < n2; ++i) {
        const auto iu = static_cast<size_t>(i);
        x0[static_cast<size_t>(lay.ka[iu])] = tight.kappa[iu] * (1.0 + slack_up);
        const double lo_v = h2 * (1.0 - 1e-3);
        double seed_v = tight.varpi[iu] * (1.0 - slack_up);
        if (seed_v <= lo_v) seed_v = 0.5 * (lo_v + tight.varpi[iu]);
        x0[static_cast<size_t>(lay.vp[iu])] = seed_v;
    }
    {
        double v1 = 0.0;
        for (int i = 0; i < n1; ++i) {
            const auto iu = static_cast<size_t>(i);
            const double nu = x0[static_cast<size_t>(lay.nu[iu])];
            v1 += plan.phi1 *
                  (scn.bandwidth * std::log2(jden * nu + powers.p_src[iu] * scn.beta0) -
                   (lin.c_const[iu] + lin.c_slope[iu] * nu));
        }
        double v2 = 0.0;
        for (int i = 0; i < n2; ++i) {
            const auto iu = static_cast<size_t>(i);
            const double ka = x0[static_cast<size_t>(lay.ka[iu])];
            const double vp = x0[static_cast<size_t>(lay.vp[iu])];
            v2 += plan.phi2 *
                  (scn.bandwidth * std::log2(s2 * ka + powers.p_relay[iu] * scn.beta0) +
                   scn.bandwidth * std::log2(s2 * vp) -
                   (lin.d_const[iu] + lin.d_slope[iu] * ka) -
                   (lin.e_const[iu] + lin.e_slope[iu] * vp));
        }
        const double vmin = std::min(v1, v2);
        x0[static_cast<size_t>(lay.w3)] =
            vmin - std::max(centered ? 1e-3 : 1e-6, 1e-6 * std::abs(vmin));
    }
    return b;
}

TrajectorySubproblemSolution extract_trajectory(const TrajBuild& b, const SolveReport& rep,
                                                const Scenario& scn, double phi_l) {
    (void)phi_l;
    const int n1 = scn.n1, n2 = scn.n2, n = scn.n_total();
    TrajectorySubproblemSolution out;
    out.report = rep;

    out.trajectory.waypoints.resize(static_cast<size_t>(n + 1));
    out.trajectory.waypoints.front() = scn.q_start;
    out.trajectory.waypoints.back() = scn.q_end;
    for (int wp = 1; wp < n; ++wp)
        out.trajectory.waypoints[static_cast<size_t>(wp)] = {
            rep.x[static_cast<size_t>(b.lay.q0 + 2 * (wp - 1))],
            rep.x[static_cast<size_t>(b.lay.q0 + 2 * (wp - 1) + 1)]};

    for (int i = 0; i < n; ++i)
        out.lambda.push_back(rep.x[static_cast<size_t>(b.lay.la[static_cast<size_t>(i)])]);
    const SlackSeeds tight = seed_slacks(out.trajectory, scn);
    for (int i = 0; i < n1; ++i) {
        const auto iu = static_cast<size_t>(i);
        out.nu.push_back(rep.x[static_cast<size_t>(b.lay.nu[iu])]);
        out.vartheta.push_back(b.lay.vt[iu] >= 0 ? rep.x[static_cast<size_t>(b.lay.vt[iu])]
                                                 : tight.vartheta[iu]);
    }
    for (int i = 0; i < n2; ++i) {
        const auto iu = static_cast<size_t>(i);
        out.kappa.push_back(rep.x[static_cast<size_t>(b.lay.ka[iu])]);
        out.varpi.push_back(rep.x[static_cast<size_t>(b.lay.vp[iu])]);
    }
    out.omega3 = rep.x[static_cast<size_t>(b.lay.w3)];
    out.objective = rep.objective;
    return out;
}

}  // namespace

TrajectorySubproblemSolution solve_trajectory_subproblem(const PowerSchedule& powers,
                                                         double alpha, const Solution& prev,
                                                         const Scenario& scn, double phi_l) {
    const PhasePlan plan = phase_plan(scn, alpha);
    if (static_cast<int>(powers.p_src.size()) != scn.n1 ||
        static_cast<int>(powers.p_relay.size()) != scn.n2)
        throw std::invalid_argument("power schedule does not match the slot counts");
    Solution ex = prev;
    ex.powers = powers;
    require_expansion_shape(ex, scn);

    // Fully pinned geometry: no leg can exceed the minimum length, so the
    // expansion point is already the only feasible trajectory.
    bool pinned = true;
    for (int i = 0; i < scn.n_total() && pinned; ++i) {
        const double dk = i < scn.n1 ? plan.delta1 : plan.delta2;
        if (dk * scn.v_max > 2.0 * kMinLegLength) pinned = false;
    }
    const Linearizations lin = linearize_terms(ex, scn);
    if (pinned) {
        TrajectorySubproblemSolution out;
        out.trajectory = prev.trajectory;
        const SlackSeeds tight = seed_slacks(prev.trajectory, scn);
        out.lambda = tight.lambda;
        out.nu = tight.nu;
        out.kappa = tight.kappa;
        out.varpi = tight.varpi;
        out.vartheta = tight.vartheta;
        const GainSet gains = gain_set(prev.trajectory, scn);
        const RateBreakdown rb = rate_breakdown(gains, powers, scn, plan);
        double sum1 = 0.0, sum2 = 0.0;
        for (double r : rb.r1_per_slot) sum1 += r;
        for (double r : rb.r2_per_slot) sum2 += r;
        out.omega3 = std::min(plan.phi1 * sum1, plan.phi2 * sum2);
        out.objective = out.omega3 - phi_l * e_sum(prev.trajectory, plan, scn.rotor);
        out.report.status = SolveStatus::optimal;
        out.report.message = "pinned trajectory";
        return out;
    }

    TrajBuild first = build_trajectory_program(powers, plan, ex, scn, phi_l, lin, false);
    SolveReport rep = solve(first.prog, scn.solver_tol, 2400);
    if (rep.status != SolveStatus::infeasible)
        return extract_trajectory(first, rep, scn, phi_l);

    TrajBuild retry = build_trajectory_program(powers, plan, ex, scn, phi_l, lin, true);
    rep = solve(retry.prog, scn.solver_tol, 2400);
    return extract_trajectory(retry, rep, scn, phi_l);
}

}  // namespace relayplan
