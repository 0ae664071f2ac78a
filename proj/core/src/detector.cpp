#include "relayplan/detector.hpp"

#include <atomic>
#include <cmath>
#include <future>
#include <thread>
#include <vector>

#include "relayplan/sampling.hpp"

namespace relayplan {

ThresholdBreakpoints threshold_breakpoints(const DetectorEnv& env) {
    ThresholdBreakpoints z;
    z.z1 = env.p_jam_max * env.g_rw + env.noise;
    z.z2 = env.p_src * env.g_sw_mean + env.noise;
    z.z3 = z.z1 + z.z2 - env.noise;
    return z;
}

double false_alarm_prob(double tau, const DetectorEnv& env) {
    const auto z = threshold_breakpoints(env);
    if (tau < env.noise) return 1.0;
    if (tau < z.z1) return 1.0 - (tau - env.noise) / (env.p_jam_max * env.g_rw);
    return 0.0;
}

double miss_detect_prob(double tau, const DetectorEnv& env) {
    const auto z = threshold_breakpoints(env);
    if (tau < z.z2) return 0.0;
    if (tau < z.z3) return (tau - z.z2) / (env.p_jam_max * env.g_rw);
    return 1.0;
}

double dep(double tau, const DetectorEnv& env) {
    return false_alarm_prob(tau, env) + miss_detect_prob(tau, env);
}

MinDep min_dep(const DetectorEnv& env) {
    const auto z = threshold_breakpoints(env);
    const double signal = env.p_src * env.g_sw_mean;
    const double jam = env.p_jam_max * env.g_rw;
    if (signal >= jam)
        throw std::domain_error(
            "min_dep: degenerate detection, p_src*g_sw_mean >= p_jam_max*g_rw");
    return {1.0 - signal / jam, z.z2, z.z1};
}

CovertCheck covert_ok(double p_src, double g_sw_wc, double g_rw_wc,
                      double p_jam_max, double epsilon) {
    const double cap = epsilon * p_jam_max * g_rw_wc;
    const double slack = cap - p_src * g_sw_wc;
    return {slack >= 0.0, slack};
}

namespace {

struct ErrorCounts {
    std::int64_t false_alarms = 0;
    std::int64_t misses = 0;
};

// One chunk of trials. The H0 statistic is jam + noise; the H1 statistic
// adds the covert signal, averaged over fading unless the diagnostic exact
// mode draws the Rayleigh factor per trial.
ErrorCounts mc_dep_chunk(double tau, const DetectorEnv& env, McDepMode mode,
                         std::uint64_t seed, std::int64_t count) {
    Rng rng(seed);
    ErrorCounts c;
    for (std::int64_t i = 0; i < count; ++i) {
        const double jam0 = env.p_jam_max * rng.next_double() * env.g_rw;
        if (jam0 + env.noise > tau) ++c.false_alarms;
        const double jam1 = env.p_jam_max * rng.next_double() * env.g_rw;
        double signal = env.p_src * env.g_sw_mean;
        if (mode == McDepMode::exact_fading)
            signal *= -std::log(rng.next_double_pos());
        if (jam1 + signal + env.noise <= tau) ++c.misses;
    }
    return c;
}

}  // namespace

McEstimate mc_dep(double tau, const DetectorEnv& env, const CovertMcConfig& cfg) {
    const std::int64_t samples = cfg.samples;
    const std::int64_t chunks = (samples + kMcChunkSize - 1) / kMcChunkSize;

    std::vector<ErrorCounts> counts(static_cast<size_t>(chunks));
    auto run_chunk = [&](std::int64_t c) {
        const std::int64_t count =
            std::min<std::int64_t>(kMcChunkSize, samples - c * kMcChunkSize);
        counts[static_cast<size_t>(c)] = mc_dep_chunk(
            tau, env, cfg.mode, chunk_seed(cfg.seed, static_cast<std::uint64_t>(c)),
            count);
    };

    const unsigned workers = std::min<unsigned>(
        std::max(1u, std::thread::hardware_concurrency()),
        static_cast<unsigned>(chunks));
    if (workers > 1) {
        std::atomic<std::int64_t> next{0};
        std::vector<std::future<void>> futures;
        futures.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            futures.push_back(std::async(std::launch::async, [&] {
                for (std::int64_t c; (c = next.fetch_add(1)) < chunks;) run_chunk(c);
            }));
        }
        for (auto& f : futures) f.get();
    } else {
        for (std::int64_t c = 0; c < chunks; ++c) run_chunk(c);
    }

    ErrorCounts total;
    for (const auto& c : counts) {
        total.false_alarms += c.false_alarms;
        total.misses += c.misses;
    }

    const double n = static_cast<double>(samples);
    const double p_fa = static_cast<double>(total.false_alarms) / n;
    const double p_md = static_cast<double>(total.misses) / n;
    const double var = p_fa * (1.0 - p_fa) / n + p_md * (1.0 - p_md) / n;
    return {p_fa + p_md, std::sqrt(var)};
}

}  // namespace relayplan
