#include "relayplan/rates.hpp"

#include <cmath>

#include "relayplan/sampling.hpp"

namespace relayplan {

double r1_sec_slot(double p_src, double g_sr, double p_jam_eff, double sic,
                   double noise, double bandwidth) {
    return bandwidth * std::log2(1.0 + p_src * g_sr / (p_jam_eff * sic + noise));
}

double r2_sec_slot(double p_relay, double g_rd, double g_re_wc, double noise,
                   double bandwidth) {
    return bandwidth * (std::log2(1.0 + p_relay * g_rd / noise) -
                        std::log2(1.0 + p_relay * g_re_wc / noise));
}

double acsr_lower_bound(const std::vector<double>& r1_per_slot,
                        const std::vector<double>& r2_per_slot,
                        const PhasePlan& plan) {
    double sum1 = 0.0;
    for (double r : r1_per_slot) sum1 += r;
    double sum2 = 0.0;
    for (double r : r2_per_slot) sum2 += std::max(r, 0.0);
    return std::min(plan.phi1 * sum1, plan.phi2 * sum2);
}

RateBreakdown rate_breakdown(const GainSet& gains, const PowerSchedule& powers,
                             const Scenario& scn, const PhasePlan& plan) {
    RateBreakdown b;
    b.r1_per_slot.reserve(gains.g_sr.size());
    for (size_t i = 0; i < gains.g_sr.size(); ++i) {
        b.r1_per_slot.push_back(r1_sec_slot(powers.p_src[i], gains.g_sr[i],
                                            scn.jam_power_eff(), scn.sic_level,
                                            scn.noise, scn.bandwidth));
    }
    b.rd_per_slot.reserve(gains.g_rd.size());
    b.re_ub_per_slot.reserve(gains.g_rd.size());
    b.r2_per_slot.reserve(gains.g_rd.size());
    for (size_t i = 0; i < gains.g_rd.size(); ++i) {
        const double p = powers.p_relay[i];
        b.rd_per_slot.push_back(
            scn.bandwidth * std::log2(1.0 + p * gains.g_rd[i] / scn.noise));
        b.re_ub_per_slot.push_back(
            scn.bandwidth * std::log2(1.0 + p * gains.g_re_wc[i] / scn.noise));
        b.r2_per_slot.push_back(b.rd_per_slot[i] - b.re_ub_per_slot[i]);
    }
    b.acsr_lb = acsr_lower_bound(b.r1_per_slot, b.r2_per_slot, plan);
    return b;
}

namespace {

struct ChunkMoments {
    double sum = 0.0;
    double sum_sq = 0.0;
};

ChunkMoments mc_r1_chunk(double p_src, double g_sr, double p_jam_eff, double sic,
                         double noise, double bandwidth, std::uint64_t seed,
                         std::int64_t count) {
    Rng rng(seed);
    ChunkMoments m;
    for (std::int64_t i = 0; i < count; ++i) {
        // |h|^2 ~ Exp(mean sic); sic = 0 collapses the draw to zero.
        const double h2 = sic > 0.0 ? -sic * std::log(rng.next_double_pos()) : 0.0;
        const double rate =
            bandwidth * std::log2(1.0 + p_src * g_sr / (p_jam_eff * h2 + noise));
        m.sum += rate;
        m.sum_sq += rate * rate;
    }
    return m;
}

}  // namespace

McEstimate mc_r1_exact(double p_src, double g_sr, double p_jam_eff, double sic,
                       double noise, double bandwidth, std::int64_t samples,
                       std::uint64_t seed) {
    const std::int64_t chunks = (samples + kMcChunkSize - 1) / kMcChunkSize;
    double sum = 0.0, sum_sq = 0.0;
    for (std::int64_t c = 0; c < chunks; ++c) {
        const std::int64_t count =
            std::min<std::int64_t>(kMcChunkSize, samples - c * kMcChunkSize);
        const auto m =
            mc_r1_chunk(p_src, g_sr, p_jam_eff, sic, noise, bandwidth,
                        chunk_seed(seed, static_cast<std::uint64_t>(c)), count);
        sum += m.sum;
        sum_sq += m.sum_sq;
    }
    const double n = static_cast<double>(samples);
    const double mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - mean * mean);
    const double se = samples > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    return {mean, se};
}

}  // namespace relayplan
