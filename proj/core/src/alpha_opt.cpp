#include "relayplan/alpha_opt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "relayplan/channel.hpp"
#include "relayplan/rates.hpp"

namespace relayplan {

namespace {

constexpr double kAlphaLo = 1e-6;
constexpr double kAlphaHi = 1.0 - 1e-6;

// Root of a strictly decreasing h on [lo, hi], clamped to the nearer end
// when the root lies outside. |interval| <= 1e-10 at exit.
template <typename F>
double bisect_decreasing(F h, double lo, double hi) {
    if (h(lo) <= 0.0) return lo;
    if (h(hi) >= 0.0) return hi;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (h(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

void require_interval(double beta1, double beta2) {
    if (beta1 + beta2 >= 1.0)
        throw ValidationError("switching-factor interval is empty: beta1 + beta2 >= 1");
}

}  // namespace

const char* to_string(PdsaCase c) {
    switch (c) {
        case PdsaCase::case_i:
            return "case_i";
        case PdsaCase::case_ii:
            return "case_ii";
        case PdsaCase::case_iii:
            return "case_iii";
        case PdsaCase::case_iv:
            return "case_iv";
        case PdsaCase::case_v:
            return "case_v";
        case PdsaCase::mirror_lo:
            return "mirror_lo";
        case PdsaCase::mirror_hi:
            return "mirror_hi";
        case PdsaCase::mirror_ii:
            return "mirror_ii";
        case PdsaCase::mirror_iii:
            return "mirror_iii";
        case PdsaCase::mirror_iv:
            return "mirror_iv";
        case PdsaCase::mirror_v:
            return "mirror_v";
        case PdsaCase::mirror_clamp:
            return "mirror_clamp";
        case PdsaCase::phi_zero_flat:
            return "phi_zero_flat";
        case PdsaCase::phi_zero_balance:
            return "phi_zero_balance";
        case PdsaCase::rho2_nonpositive:
            return "rho2_nonpositive";
    }
    return "unknown";
}

PdsaCoefficients pdsa_coeffs(const Trajectory& traj, const PowerSchedule& powers,
                             const Scenario& scn, double phi_l) {
    if (static_cast<int>(powers.p_src.size()) != scn.n1 ||
        static_cast<int>(powers.p_relay.size()) != scn.n2)
        throw std::invalid_argument("power schedule does not match the slot counts");

    const GainSet gains = gain_set(traj, scn);
    const LegDistances dist = leg_distances(traj);
    const AlphaEnergyCoeffs en = alpha_energy_coeffs(dist, scn);
    const double p_jam = scn.jam_power_eff();

    double rho1 = 0.0;
    for (int i = 0; i < scn.n1; ++i) {
        const auto iu = static_cast<size_t>(i);
        rho1 += r1_sec_slot(powers.p_src[iu], gains.g_sr[iu], p_jam, scn.sic_level, scn.noise,
                            scn.bandwidth);
    }
    rho1 /= scn.n1;

    double rho2 = 0.0;
    for (int i = 0; i < scn.n2; ++i) {
        const auto iu = static_cast<size_t>(i);
        rho2 += r2_sec_slot(powers.p_relay[iu], gains.g_rd[iu], gains.g_re_wc[iu], scn.noise,
                            scn.bandwidth);
    }
    rho2 /= scn.n2;

    double dmax1 = 0.0, dmax2 = 0.0;
    for (int i = 0; i < scn.n1; ++i) dmax1 = std::max(dmax1, dist.d[static_cast<size_t>(i)]);
    for (int i = scn.n1; i < scn.n_total(); ++i)
        dmax2 = std::max(dmax2, dist.d[static_cast<size_t>(i)]);
    const double beta1 = scn.n1 * dmax1 / (scn.period * scn.v_max);
    const double beta2 = scn.n2 * dmax2 / (scn.period * scn.v_max);

    return pdsa_coeffs_from_parts(en, rho1, rho2, beta1, beta2, phi_l);
}

PdsaCoefficients pdsa_coeffs_from_parts(const AlphaEnergyCoeffs& en, double rho1, double rho2,
                                        double beta1, double beta2, double phi_l) {
    PdsaCoefficients c;
    c.rho1 = rho1;
    c.rho2 = rho2;
    c.beta1 = beta1;
    c.beta2 = beta2;
    c.alpha_hat2 = (rho1 + rho2) != 0.0 ? rho2 / (rho1 + rho2) : 0.5;

    if (phi_l > 0.0) {
        // Poles of E' at 0 and 1 guarantee the sign change when the
        // reciprocal coefficients are positive; checked defensively.
        if (!(de_sum_dalpha(en, kAlphaLo) < 0.0 && de_sum_dalpha(en, kAlphaHi) > 0.0))
            throw std::domain_error(
                "energy derivative does not change sign on the bisection bracket");
        c.alpha_hat1 = bisect_decreasing(
            [&](double a) { return rho1 - phi_l * de_sum_dalpha(en, a); }, kAlphaLo, kAlphaHi);
        c.alpha_hat3 = bisect_decreasing(
            [&](double a) { return -rho2 - phi_l * de_sum_dalpha(en, a); }, kAlphaLo, kAlphaHi);
    } else {
        // phi = 0 limits of the roots: E' drops out of both equations.
        c.alpha_hat1 = kAlphaHi;
        c.alpha_hat3 = kAlphaLo;
    }
    return c;
}

double pdsa_objective(const PdsaCoefficients& c, const AlphaEnergyCoeffs& energy, double phi_l,
                      double alpha) {
    const double rate = std::min(alpha * c.rho1, (1.0 - alpha) * c.rho2);
    return rate - phi_l * alpha_energy_eval(energy, alpha);
}

std::pair<double, PdsaDiagnostics> pdsa_alpha(const PdsaCoefficients& c,
                                              const AlphaEnergyCoeffs& energy, double phi_l) {
    require_interval(c.beta1, c.beta2);
    const double lo = c.beta1;
    const double hi = 1.0 - c.beta2;

    PdsaDiagnostics diag;
    double alpha;

    if (phi_l <= 0.0) {
        // Piecewise-linear objective min(a*rho1, (1-a)*rho2).
        if (c.rho2 < 0.0) {
            alpha = hi;  // the active (1-a)*rho2 branch rises with a
            diag.case_taken = PdsaCase::phi_zero_balance;
        } else if (c.rho1 == 0.0 || c.rho2 == 0.0) {
            alpha = lo;  // flat objective, smallest optimum by convention
            diag.case_taken = PdsaCase::phi_zero_flat;
        } else {
            alpha = std::clamp(c.alpha_hat2, lo, hi);
            diag.case_taken = PdsaCase::phi_zero_balance;
        }
    } else if (c.rho2 <= 0.0) {
        // The min is always the phase-2 branch; stationarity is h3 = 0.
        alpha = std::clamp(c.alpha_hat3, lo, hi);
        diag.case_taken = PdsaCase::rho2_nonpositive;
    } else if (c.alpha_hat1 > lo && c.alpha_hat1 < hi) {
        if (c.alpha_hat1 * c.rho1 <= (1.0 - c.alpha_hat1) * c.rho2) {
            alpha = c.alpha_hat1;
            diag.case_taken = PdsaCase::case_i;
        } else if (c.alpha_hat2 > lo && c.alpha_hat2 < c.alpha_hat1) {
            if (c.alpha_hat2 >= c.alpha_hat3) {
                alpha = c.alpha_hat2;
                diag.case_taken = PdsaCase::case_ii;
            } else {
                alpha = c.alpha_hat3;
                diag.case_taken = PdsaCase::case_iii;
            }
        } else if (lo >= c.alpha_hat3) {
            alpha = lo;
            diag.case_taken = PdsaCase::case_iv;
        } else {
            alpha = c.alpha_hat3;
            diag.case_taken = PdsaCase::case_v;
        }
    } else if (c.alpha_hat1 <= lo) {
        alpha = lo;
        diag.case_taken = PdsaCase::mirror_lo;
    } else if (hi * c.rho1 <= c.beta2 * c.rho2) {
        alpha = hi;
        diag.case_taken = PdsaCase::mirror_hi;
    } else if (c.alpha_hat2 >= lo && c.alpha_hat2 < hi) {
        if (c.alpha_hat2 >= c.alpha_hat3) {
            alpha = c.alpha_hat2;
            diag.case_taken = PdsaCase::mirror_ii;
        } else {
            // Clamped to keep alpha feasible; when the clamp binds the
            // objective is still rising at hi, so hi is the exact argmax.
            alpha = std::min(c.alpha_hat3, hi);
            diag.case_taken = PdsaCase::mirror_iii;
        }
    } else if (lo >= c.alpha_hat3) {
        alpha = lo;
        diag.case_taken = PdsaCase::mirror_iv;
    } else if (c.alpha_hat3 <= hi) {
        alpha = c.alpha_hat3;
        diag.case_taken = PdsaCase::mirror_v;
    } else {
        alpha = hi;
        diag.case_taken = PdsaCase::mirror_clamp;
    }

    // Multiplier reconstruction, complementarity first: the inactive rate
    // branch forces its multiplier to zero, a tie solves lambda2 from the
    // stationarity equation, and edge multipliers absorb the remainder.
    const double ep = de_sum_dalpha(energy, std::clamp(alpha, 1e-12, 1.0 - 1e-12));
    const double u1 = alpha * c.rho1;
    const double u2 = (1.0 - alpha) * c.rho2;
    const double w1 = std::min(u1, u2);
    const double tie_tol = 1e-9 * (1.0 + std::abs(w1));
    const bool act1 = u1 - w1 <= tie_tol;
    const bool act2 = u2 - w1 <= tie_tol;
    double l2;
    if (act1 && act2) {
        const double denom = c.rho1 + c.rho2;
        l2 = denom != 0.0 ? std::clamp((c.rho1 - phi_l * ep) / denom, 0.0, 1.0) : 0.5;
    } else if (act2) {
        l2 = 1.0;
    } else {
        l2 = 0.0;
    }
    diag.lambda1 = 1.0 - l2;
    diag.lambda2 = l2;
    const double r = -phi_l * ep + c.rho1 - l2 * (c.rho1 + c.rho2);
    if (alpha <= lo + 1e-12 && r < 0.0) diag.lambda3 = -r;
    if (alpha >= hi - 1e-12 && r > 0.0) diag.lambda4 = r;
    diag.stationarity_residual = std::abs(r + diag.lambda3 - diag.lambda4);
    return {alpha, diag};
}

double alpha_grid_oracle(const PdsaCoefficients& c, const AlphaEnergyCoeffs& energy,
                         double phi_l, double step) {
    require_interval(c.beta1, c.beta2);
    const double lo = c.beta1;
    const double hi = 1.0 - c.beta2;
    if (!(step > 0.0 && step < hi - lo))
        throw std::invalid_argument("grid step must lie in (0, interval width)");

    double best_a = lo;
    double best_v = pdsa_objective(c, energy, phi_l, lo);
    for (long i = 1;; ++i) {
        const double a = lo + static_cast<double>(i) * step;
        if (a >= hi) break;
        const double v = pdsa_objective(c, energy, phi_l, a);
        if (v > best_v) {
            best_v = v;
            best_a = a;
        }
    }
    const double v_hi = pdsa_objective(c, energy, phi_l, hi);
    if (v_hi > best_v) best_a = hi;
    return best_a;
}

}  // namespace relayplan
