#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <vector>

#include "doctest.h"
#include "relayplan/detector.hpp"
#include "test_util.hpp"

using namespace relayplan;
using testutil::rel_diff;

namespace {

// Constructed nondegenerate radiometer environment.
DetectorEnv make_env() {
    return {0.05, 1e-8, 2e-7, 1.0, 1e-12};
}

}  // namespace

TEST_CASE("threshold breakpoints") {
    const DetectorEnv env = make_env();
    const auto z = threshold_breakpoints(env);
    CHECK(z.z1 == env.p_jam_max * env.g_rw + env.noise);
    CHECK(z.z2 == env.p_src * env.g_sw_mean + env.noise);
    CHECK(rel_diff(z.z3, z.z1 + z.z2 - env.noise) <= 1e-15);
    CHECK(z.z3 >= z.z1);
    CHECK(z.z3 >= z.z2);
    CHECK(z.z2 < z.z1);
}

TEST_CASE("false alarm probability branches") {
    const DetectorEnv env = make_env();
    const auto z = threshold_breakpoints(env);
    const double jam = env.p_jam_max * env.g_rw;

    CHECK(false_alarm_prob(0.5 * env.noise, env) == 1.0);
    CHECK(false_alarm_prob(env.noise, env) == 1.0);
    CHECK(rel_diff(false_alarm_prob(env.noise + 0.5 * jam, env), 0.5) <= 1e-12);
    CHECK(rel_diff(false_alarm_prob(env.noise + 0.25 * jam, env), 0.75) <= 1e-12);
    CHECK(false_alarm_prob(z.z1, env) == 0.0);
    CHECK(false_alarm_prob(2.0 * z.z1, env) == 0.0);
}

TEST_CASE("miss detection probability branches") {
    const DetectorEnv env = make_env();
    const auto z = threshold_breakpoints(env);
    const double jam = env.p_jam_max * env.g_rw;

    CHECK(miss_detect_prob(0.5 * z.z2, env) == 0.0);
    CHECK(miss_detect_prob(z.z2, env) == 0.0);
    CHECK(rel_diff(miss_detect_prob(z.z2 + 0.5 * jam, env), 0.5) <= 1e-12);
    CHECK(miss_detect_prob(z.z3, env) == 1.0);
    CHECK(miss_detect_prob(2.0 * z.z3, env) == 1.0);
}

TEST_CASE("dep piecewise structure") {
    const DetectorEnv env = make_env();
    const auto z = threshold_breakpoints(env);
    const double plateau = 1.0 - env.p_src * env.g_sw_mean / (env.p_jam_max * env.g_rw);

    CHECK(dep(0.0, env) == 1.0);
    CHECK(dep(0.5 * env.noise, env) == 1.0);
    CHECK(rel_diff(dep(z.z2, env), plateau) <= 1e-12);
    CHECK(rel_diff(dep(0.5 * (z.z2 + z.z1), env), plateau) <= 1e-12);
    CHECK(rel_diff(dep(z.z1 * (1.0 - 1e-9), env), plateau) <= 1e-7);
    CHECK(dep(z.z3, env) == 1.0);
    CHECK(dep(10.0 * z.z3, env) == 1.0);

    // Continuous, bounded, monotone segments.
    double prev = dep(0.0, env);
    const int pts = 4000;
    for (int i = 1; i <= pts; ++i) {
        const double tau = 1.2 * z.z3 * i / pts;
        const double v = dep(tau, env);
        CHECK(v >= 0.0);
        CHECK(v <= 2.0);
        if (tau <= z.z2) CHECK(v <= prev + 1e-12);
        if (tau >= z.z1) CHECK(v >= prev - 1e-12);
        prev = v;
    }
}

TEST_CASE("min_dep matches the dense grid") {
    const DetectorEnv env = make_env();
    const auto z = threshold_breakpoints(env);
    const MinDep md = min_dep(env);

    CHECK(rel_diff(md.value, 0.9975) <= 1e-12);
    CHECK(md.tau_lo == z.z2);
    CHECK(md.tau_hi == z.z1);

    const int pts = 100000;
    double best = 2.0;
    double best_tau = 0.0;
    for (int i = 0; i <= pts; ++i) {
        const double tau = 1.2 * z.z3 * i / pts;
        const double v = dep(tau, env);
        if (v < best) {
            best = v;
            best_tau = tau;
        }
    }
    CHECK(std::fabs(best - md.value) <= 1e-9);
    CHECK(best_tau >= md.tau_lo - 1e-15);
    CHECK(best_tau < md.tau_hi);
}

TEST_CASE("min_dep edge cases") {
    DetectorEnv env = make_env();

    env.p_src = 0.0;
    const MinDep silent = min_dep(env);
    CHECK(silent.value == 1.0);
    CHECK(silent.tau_lo == env.noise);

    env.p_src = 0.05;
    env.g_sw_mean = 2e-7 / 0.05;
    CHECK_THROWS_AS(min_dep(env), std::domain_error);
    env.g_sw_mean = 2.0 * 2e-7 / 0.05;
    CHECK_THROWS_AS(min_dep(env), std::domain_error);

    // Covert boundary: signal = epsilon * jam.
    env = make_env();
    env.p_src = 0.01 * env.p_jam_max * env.g_rw / env.g_sw_mean;
    CHECK(rel_diff(min_dep(env).value, 0.99) <= 1e-12);
}

TEST_CASE("covert_ok slack arithmetic") {
    const double g_sw = 3e-8, g_rw = 1e-7, pj = 1.0, eps = 0.01;
    const CovertCheck free_slot = covert_ok(0.0, g_sw, g_rw, pj, eps);
    CHECK(free_slot.ok);
    CHECK(rel_diff(free_slot.slack, eps * pj * g_rw) <= 1e-12);

    const double boundary = eps * pj * g_rw / g_sw;
    CHECK(covert_ok(boundary, g_sw, g_rw, pj, eps).ok);
    CHECK(std::fabs(covert_ok(boundary, g_sw, g_rw, pj, eps).slack) <= 1e-24);
    CHECK_FALSE(covert_ok(boundary + 1e-6, g_sw, g_rw, pj, eps).ok);

    // Covert feasibility implies detector quality.
    const DetectorEnv env{boundary, g_sw, g_rw, pj, 1e-12};
    CHECK(min_dep(env).value >= 1.0 - eps - 1e-12);
}

TEST_CASE("mc_dep limits are exact") {
    const DetectorEnv env = make_env();
    const auto z = threshold_breakpoints(env);
    const CovertMcConfig cfg{100000, 2, McDepMode::mean_gain};

    const McEstimate lo = mc_dep(0.0, env, cfg);
    CHECK(lo.value == 1.0);
    CHECK(lo.se == 0.0);

    const McEstimate hi = mc_dep(10.0 * z.z3, env, cfg);
    CHECK(hi.value == 1.0);
    CHECK(hi.se == 0.0);
}

TEST_CASE("mc_dep agrees with the closed form at interior thresholds") {
    const DetectorEnv env = make_env();
    const auto z = threshold_breakpoints(env);
    const CovertMcConfig cfg{200000, 2, McDepMode::mean_gain};

    for (const double tau : {0.5 * (env.noise + z.z2), 0.5 * (z.z2 + z.z1),
                             0.5 * (z.z1 + z.z3)}) {
        const McEstimate est = mc_dep(tau, env, cfg);
        CHECK(est.se > 0.0);
        CHECK(std::fabs(est.value - dep(tau, env)) <= 3.5 * est.se);
    }
}

TEST_CASE("mc_dep is deterministic for a fixed seed") {
    const DetectorEnv env = make_env();
    const auto z = threshold_breakpoints(env);
    const double tau = 0.7 * z.z1;

    const CovertMcConfig cfg{150000, 77, McDepMode::mean_gain};
    const McEstimate a = mc_dep(tau, env, cfg);
    const McEstimate b = mc_dep(tau, env, cfg);
    CHECK(a.value == b.value);
    CHECK(a.se == b.se);

    const CovertMcConfig other{150000, 78, McDepMode::mean_gain};
    CHECK(mc_dep(tau, env, other).value != a.value);
}

TEST_CASE("exact-fading diagnostic mode stays in range") {
    const DetectorEnv env = make_env();
    const auto z = threshold_breakpoints(env);
    const CovertMcConfig cfg{50000, 5, McDepMode::exact_fading};
    const McEstimate est = mc_dep(0.5 * (z.z2 + z.z1), env, cfg);
    CHECK(est.value >= 0.0);
    CHECK(est.value <= 2.0);
}
