#include "relayplan/ao.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace relayplan {

namespace {

// Straight line with the legs padded to at least twice the minimum length;
// short spans zigzag perpendicular to the route so every leg stays usable
// by the induced-power surrogate.
Trajectory straight_line(const Scenario& scn) {
    const int n = scn.n_total();
    const Vec2 span = scn.q_end - scn.q_start;
    const double step = norm(span) / n;
    Vec2 perp{0.0, 1.0};
    if (step > 0.0) {
        const Vec2 dir = (1.0 / (step * n)) * span;
        perp = {-dir.y, dir.x};
    }
    double h = 0.0;
    const double want = 2.0 * kMinLegLength;
    if (step < want) h = std::sqrt(want * want - step * step) * (1.0 + 1e-9);

    Trajectory traj;
    traj.waypoints.reserve(static_cast<size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        Vec2 q = scn.q_start + (static_cast<double>(i) / n) * span;
        if (i % 2 == 1 && i != n) q = q + h * perp;
        traj.waypoints.push_back(q);
    }
    return traj;
}

double unclamped_acsr(const Evaluation& ev) {
    return std::min(ev.acsr_phase1, ev.acsr_phase2_unclamped);
}

}  // namespace

const char* to_string(AoMode m) {
    switch (m) {
        case AoMode::prop: return "prop";
        case AoMode::ben1: return "ben1";
        case AoMode::ben2: return "ben2";
    }
    return "?";
}

AoMode ao_mode_from_string(const std::string& s) {
    if (s == "prop") return AoMode::prop;
    if (s == "ben1") return AoMode::ben1;
    if (s == "ben2") return AoMode::ben2;
    throw std::invalid_argument("unknown mode: " + s);
}

Solution initialize(const Scenario& scn, AoMode mode, double ben1_alpha) {
    Solution sol;
    sol.trajectory = straight_line(scn);

    const LegDistances dist = leg_distances(sol.trajectory);
    double dmax1 = 0.0, dmax2 = 0.0;
    for (int i = 0; i < scn.n1; ++i) dmax1 = std::max(dmax1, dist.d[static_cast<size_t>(i)]);
    for (int i = scn.n1; i < scn.n_total(); ++i)
        dmax2 = std::max(dmax2, dist.d[static_cast<size_t>(i)]);
    const double beta1 = scn.n1 * dmax1 / (scn.period * scn.v_max);
    const double beta2 = scn.n2 * dmax2 / (scn.period * scn.v_max);
    if (beta1 + beta2 >= 1.0)
        throw ValidationError(
            "no switching factor makes the straight-line start speed-feasible");
    if (mode == AoMode::ben1) {
        if (!(ben1_alpha > 0.0 && ben1_alpha < 1.0) || ben1_alpha < beta1 ||
            ben1_alpha > 1.0 - beta2)
            throw ValidationError(
                "fixed switching factor is speed-infeasible for the straight-line start");
        sol.alpha = ben1_alpha;
    } else {
        sol.alpha = std::clamp(0.5, beta1, 1.0 - beta2);
    }

    const GainSet gains = gain_set(sol.trajectory, scn);
    sol.powers.p_src.resize(static_cast<size_t>(scn.n1));
    for (int i = 0; i < scn.n1; ++i) {
        const auto iu = static_cast<size_t>(i);
        const double cap =
            scn.epsilon_covert * scn.p_jam_max * gains.g_rw_wc[iu] / gains.g_sw_wc;
        sol.powers.p_src[iu] = std::min(scn.p_src_max, cap * (1.0 - 1e-9));
    }
    sol.powers.p_relay.assign(static_cast<size_t>(scn.n2), scn.p_relay_max);

    const Evaluation ev = evaluate(scn, sol);
    sol.csee = ev.csee;
    sol.acsr_lb = ev.acsr_lb;
    sol.energy = ev.energy;
    sol.iterations = 0;
    sol.phi_history.clear();
    return sol;
}

Evaluation evaluate(const Scenario& scn, const Solution& sol) {
    const PhasePlan plan = phase_plan(scn, sol.alpha);
    const GainSet gains = gain_set(sol.trajectory, scn);

    Evaluation ev;
    ev.rates = rate_breakdown(gains, sol.powers, scn, plan);
    ev.acsr_lb = ev.rates.acsr_lb;
    ev.energy = e_sum(sol.trajectory, plan, scn.rotor);
    ev.csee = csee(ev.acsr_lb, ev.energy, scn.period);

    double s1 = 0.0;
    for (double r : ev.rates.r1_per_slot) s1 += r;
    ev.acsr_phase1 = plan.phi1 * s1;
    double s2c = 0.0, s2u = 0.0;
    for (double r : ev.rates.r2_per_slot) {
        s2c += std::max(r, 0.0);
        s2u += r;
    }
    ev.acsr_phase2_clamped = plan.phi2 * s2c;
    ev.acsr_phase2_unclamped = plan.phi2 * s2u;

    ev.min_dep_worst = 1.0;
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < scn.n1; ++i) {
        const auto iu = static_cast<size_t>(i);
        const double p = sol.powers.p_src[iu];
        const double cap = scn.epsilon_covert * scn.p_jam_max * gains.g_rw_wc[iu];
        worst = std::min(worst, 1.0 - p * gains.g_sw_wc / cap);
        if (p > 0.0) {
            try {
                const MinDep md = min_dep(
                    {p, gains.g_sw_wc, gains.g_rw_wc[iu], scn.p_jam_max, scn.noise});
                ev.min_dep_worst = std::min(ev.min_dep_worst, md.value);
            } catch (const std::domain_error&) {
                ev.min_dep_worst = 0.0;
            }
        }
    }
    ev.covert_slack_worst = worst;
    return ev;
}

std::pair<Solution, AoTrace> ao_solve(const Scenario& scn, const AoConfig& cfg) {
    Solution sol = initialize(scn, cfg.mode, cfg.ben1_alpha);
    AoTrace trace;
    Evaluation ev = evaluate(scn, sol);
    double prev_csee = ev.csee;

    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        // Dinkelbach weight for every subproblem of this iteration; built on
        // the unclamped bound so the subproblem surrogates are tight at the
        // expansion point.
        const double phi_dink = ev.energy > 0.0 ? unclamped_acsr(ev) / ev.energy : 0.0;
        AoIterationRecord rec;
        rec.iter = iter;
        std::string status;
        auto note = [&status](const std::string& s) {
            if (!status.empty()) status += "; ";
            status += s;
        };

        // A block whose solve ended cleanly is accepted outright; a truncated
        // solve is accepted only when it still improves the efficiency, and
        // keeps the previous block value otherwise so the recorded trace stays
        // non-decreasing and the next iteration can re-expand and recover.
        Evaluation cur = ev;
        auto accept = [&](const char* name, bool clean) {
            const Evaluation cand = evaluate(scn, sol);
            if (clean || cand.csee >= cur.csee) {
                cur = cand;
                return true;
            }
            note(std::string(name) + ": reverted");
            return false;
        };

        const AlphaEnergyCoeffs ecoef = alpha_energy_coeffs(leg_distances(sol.trajectory), scn);
        try {
            const PdsaCoefficients c = pdsa_coeffs(sol.trajectory, sol.powers, scn, phi_dink);
            if (cfg.mode != AoMode::ben1) {
                sol.alpha = pdsa_alpha(c, ecoef, phi_dink).first;
                accept("alpha", true);
            }
            rec.obj_alpha = pdsa_objective(c, ecoef, phi_dink, sol.alpha);
        } catch (const ValidationError&) {
            note("alpha: interval empty");
        } catch (const std::domain_error&) {
            note("alpha: degenerate energy");
        }

        const PowerSubproblemSolution pw =
            solve_power_subproblem(sol.trajectory, sol.alpha, sol, scn, phi_dink);
        const bool pw_clean = pw.report.status == SolveStatus::optimal;
        if (!pw_clean) note(std::string("power: ") + to_string(pw.report.status));
        const PowerSchedule pw_prev = sol.powers;
        sol.powers = pw.powers;
        if (!accept("power", pw_clean)) sol.powers = pw_prev;
        rec.obj_power = pw.objective;

        if (cfg.mode != AoMode::ben2) {
            const TrajectorySubproblemSolution ts =
                solve_trajectory_subproblem(sol.powers, sol.alpha, sol, scn, phi_dink);
            if (ts.report.status == SolveStatus::infeasible) {
                note("trajectory: infeasible");
            } else {
                const bool ts_clean = ts.report.status == SolveStatus::optimal;
                if (!ts_clean) note(std::string("trajectory: ") + to_string(ts.report.status));
                const Trajectory tr_prev = sol.trajectory;
                sol.trajectory = ts.trajectory;
                if (!accept("trajectory", ts_clean)) sol.trajectory = tr_prev;
                rec.obj_traj = ts.objective;
            }
        }
        if (status.empty()) status = "ok";

        ev = cur;
        rec.phi = ev.csee;
        rec.alpha = sol.alpha;
        rec.status = status;
        trace.records.push_back(rec);
        sol.phi_history.push_back(ev.csee);

        // conv_tol is dimensionless: the test is relative to the current
        // efficiency so it is invariant to the bandwidth scale.
        const double delta = ev.csee - prev_csee;
        prev_csee = ev.csee;
        if (std::abs(delta) <= cfg.conv_tol * std::max(std::abs(ev.csee), 1e-300)) {
            trace.converged = true;
            trace.stop_reason = "converged";
            break;
        }
    }
    if (!trace.converged) trace.stop_reason = "max iterations reached";

    sol.iterations = static_cast<int>(trace.records.size());
    sol.csee = ev.csee;
    sol.acsr_lb = ev.acsr_lb;
    sol.energy = ev.energy;
    return {sol, trace};
}

}  // namespace relayplan
