#pragma once

#include <cstdint>

#include "relayplan/scenario.hpp"

namespace relayplan {

// Inputs of the warden's radiometer test for one phase-1 slot.
struct DetectorEnv {
    double p_src = 0.0;      // source transmit power under H1
    double g_sw_mean = 0.0;  // S->W mean gain (worst-case variant substitutable)
    double g_rw = 0.0;       // R->W gain (worst-case variant substitutable)
    double p_jam_max = 0.0;  // peak of the uniform jamming power
    double noise = 0.0;      // sigma^2
};

// z1 < z2 iff detection is degenerate; z3 = z1 + z2 - noise.
struct ThresholdBreakpoints {
    double z1 = 0.0;
    double z2 = 0.0;
    double z3 = 0.0;
};

ThresholdBreakpoints threshold_breakpoints(const DetectorEnv& env);

double false_alarm_prob(double tau, const DetectorEnv& env);
double miss_detect_prob(double tau, const DetectorEnv& env);
// false_alarm_prob + miss_detect_prob; piecewise linear with 4 breakpoints.
double dep(double tau, const DetectorEnv& env);

struct MinDep {
    double value = 0.0;
    double tau_lo = 0.0;  // minimizing interval [tau_lo, tau_hi)
    double tau_hi = 0.0;
};

// Throws std::domain_error when p_src*g_sw_mean >= p_jam_max*g_rw
// (the warden achieves zero error and covertness is impossible).
MinDep min_dep(const DetectorEnv& env);

struct CovertCheck {
    bool ok = false;
    double slack = 0.0;  // epsilon*p_jam_max*g_rw_wc - p_src*g_sw_wc, watts
};

CovertCheck covert_ok(double p_src, double g_sw_wc, double g_rw_wc,
                      double p_jam_max, double epsilon);

// mean_gain mirrors the closed forms' averaged H1 statistic and is the
// asserted mode; exact_fading draws the Rayleigh factor per trial and is
// diagnostic only.
enum class McDepMode { mean_gain, exact_fading };

struct CovertMcConfig {
    std::int64_t samples = 1000000;
    std::uint64_t seed = 0;
    McDepMode mode = McDepMode::mean_gain;
};

struct McEstimate {
    double value = 0.0;
    double se = 0.0;
};

// Empirical P(D1|H0) + P(D0|H1). Chunked counter-derived sub-seeds: the
// result is bit-identical for a fixed seed regardless of chunk scheduling.
McEstimate mc_dep(double tau, const DetectorEnv& env, const CovertMcConfig& cfg);

}  // namespace relayplan
