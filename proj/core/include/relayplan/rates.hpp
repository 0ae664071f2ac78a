#pragma once

#include <cstdint>

#include "relayplan/channel.hpp"
#include "relayplan/detector.hpp"

namespace relayplan {

struct RateBreakdown {
    std::vector<double> r1_per_slot;     // N1
    std::vector<double> rd_per_slot;     // N2
    std::vector<double> re_ub_per_slot;  // N2
    std::vector<double> r2_per_slot;     // N2, NOT clamped
    double acsr_lb = 0.0;                // bits/s, phase-2 terms clamped per slot
};

// Deterministic phase-1 rate lower bound B*log2(1 + p*g/(p_jam_eff*sic + noise)).
double r1_sec_slot(double p_src, double g_sr, double p_jam_eff, double sic,
                   double noise, double bandwidth);

// Phase-2 secrecy rate against the worst-case eavesdropper gain, unclamped.
double r2_sec_slot(double p_relay, double g_rd, double g_re_wc, double noise,
                   double bandwidth);

// min(phi1*sum r1, phi2*sum max(r2,0)).
double acsr_lower_bound(const std::vector<double>& r1_per_slot,
                        const std::vector<double>& r2_per_slot,
                        const PhasePlan& plan);

RateBreakdown rate_breakdown(const GainSet& gains, const PowerSchedule& powers,
                             const Scenario& scn, const PhasePlan& plan);

// Expectation of the exact phase-1 rate over the residual self-interference
// fading |h|^2 ~ Exp(mean sic), jamming power held at p_jam_eff. Jensen says
// the estimate dominates r1_sec_slot; equality (zero variance) at sic = 0.
McEstimate mc_r1_exact(double p_src, double g_sr, double p_jam_eff, double sic,
                       double noise, double bandwidth, std::int64_t samples,
                       std::uint64_t seed);

}  // namespace relayplan
