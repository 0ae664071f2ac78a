#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "relayplan/ao.hpp"
#include "relayplan/channel.hpp"
#include "test_util.hpp"

using namespace relayplan;
using testutil::disc_point;
using testutil::rel_diff;

namespace {

Scenario warden_at(Vec2 q_warden, double r_warden) {
    Scenario scn = default_scenario();
    scn.q_warden_est = q_warden;
    scn.r_warden = r_warden;
    return scn;
}

}  // namespace

TEST_CASE("a2g gain") {
    CHECK(rel_diff(a2g_gain({350.0, 350.0}, {350.0, 350.0}, 75.0, 1e-3),
                   1.777777777777778e-07) <= 1e-12);
    CHECK(rel_diff(a2g_gain({350.0, 350.0}, {200.0, 500.0}, 75.0, 1e-3),
                   1.9753086419753086e-08) <= 1e-12);

    const double g1 = a2g_gain({0.0, 0.0}, {0.0, 0.0}, 75.0, 1e-3);
    const double g2 = a2g_gain({0.0, 0.0}, {0.0, 0.0}, 150.0, 1e-3);
    CHECK(rel_diff(g1, 4.0 * g2) <= 1e-12);

    double prev = a2g_gain({0.0, 0.0}, {0.0, 0.0}, 75.0, 1e-3);
    for (double d = 10.0; d <= 500.0; d += 10.0) {
        const double g = a2g_gain({d, 0.0}, {0.0, 0.0}, 75.0, 1e-3);
        CHECK(g < prev);
        prev = g;
    }
}

TEST_CASE("g2g mean gain") {
    CHECK(rel_diff(g2g_mean_gain({0.0, 0.0}, {1.0, 0.0}, 1e-3, 2.1), 1e-3) <= 1e-12);
    CHECK(rel_diff(g2g_mean_gain({200.0, 500.0}, {350.0, 350.0}, 1e-3, 2.1),
                   1.3005494223756551e-08) <= 1e-12);
    CHECK(rel_diff(g2g_mean_gain({3.0, 4.0}, {0.0, 0.0}, 1e-3, 2.0),
                   a2g_gain({3.0, 4.0}, {0.0, 0.0}, 1e-9, 1e-3) * 1.0) <= 1e-9);
    CHECK_THROWS_AS(g2g_mean_gain({5.0, 5.0}, {5.0, 5.0}, 1e-3, 2.1),
                    std::domain_error);
}

TEST_CASE("worst-case source-to-warden gain") {
    Scenario scn = warden_at({350.0, 350.0}, 15.0);
    CHECK(rel_diff(worst_case_sw_gain(scn), 1.517084852544664e-08) <= 1e-12);

    scn.r_warden = 0.0;
    CHECK(rel_diff(worst_case_sw_gain(scn),
                   g2g_mean_gain(scn.q_src, scn.q_warden_est, scn.beta0, scn.eta)) <=
          1e-12);

    const Scenario table2 = default_scenario();
    CHECK(rel_diff(worst_case_sw_gain(table2), 2.972133363585413e-08) <= 1e-12);

    scn.r_warden = 300.0;
    CHECK_THROWS_AS(worst_case_sw_gain(scn), std::domain_error);
}

TEST_CASE("worst-case relay-to-warden gain") {
    Scenario scn = warden_at({350.0, 350.0}, 15.0);
    CHECK(rel_diff(worst_case_rw_gain({350.0, 350.0}, scn),
                   1.7094017094017095e-07) <= 1e-12);

    Scenario zero = scn;
    zero.r_warden = 0.0;
    CHECK(rel_diff(worst_case_rw_gain({120.0, 40.0}, zero),
                   a2g_gain({120.0, 40.0}, zero.q_warden_est, zero.altitude,
                            zero.beta0)) <= 1e-12);

    double prev = worst_case_rw_gain({100.0, 100.0}, zero);
    for (double r = 5.0; r <= 50.0; r += 5.0) {
        Scenario grown = scn;
        grown.r_warden = r;
        const double g = worst_case_rw_gain({100.0, 100.0}, grown);
        CHECK(g < prev);
        prev = g;
    }
}

TEST_CASE("worst-case relay-to-eavesdropper gain") {
    Scenario scn = default_scenario();
    scn.q_eaves_est = {0.0, 0.0};
    scn.r_eaves = 15.0;
    CHECK(rel_diff(worst_case_re_gain({100.0, 0.0}, scn), 7.782101167315175e-08) <=
          1e-12);

    CHECK(rel_diff(worst_case_re_gain({10.0, 0.0}, scn), 1e-3 / 5625.0) <= 1e-12);

    Scenario zero = scn;
    zero.r_eaves = 0.0;
    CHECK(rel_diff(worst_case_re_gain({100.0, 0.0}, zero),
                   a2g_gain({100.0, 0.0}, zero.q_eaves_est, zero.altitude,
                            zero.beta0)) <= 1e-12);
}

TEST_CASE("robust bounds dominate sampled disc positions") {
    const Scenario scn = default_scenario();
    const Vec2 q_uav{310.0, 320.0};
    const double g_sw_wc = worst_case_sw_gain(scn);
    const double g_rw_wc = worst_case_rw_gain(q_uav, scn);
    const double g_re_wc = worst_case_re_gain(q_uav, scn);

    Rng rng(19);
    for (int i = 0; i < 10000; ++i) {
        const Vec2 w = disc_point(rng, scn.q_warden_est, scn.r_warden);
        CHECK(g2g_mean_gain(scn.q_src, w, scn.beta0, scn.eta) <= g_sw_wc + 1e-12);
        CHECK(a2g_gain(q_uav, w, scn.altitude, scn.beta0) >= g_rw_wc - 1e-12);
        const Vec2 e = disc_point(rng, scn.q_eaves_est, scn.r_eaves);
        CHECK(a2g_gain(q_uav, e, scn.altitude, scn.beta0) <= g_re_wc + 1e-12);
    }
}

TEST_CASE("gain_set evaluates per-slot gains at waypoints 1..N") {
    const Scenario scn = default_scenario();
    const Trajectory traj = initialize(scn, AoMode::prop).trajectory;
    const GainSet gains = gain_set(traj, scn);

    REQUIRE(gains.g_sr.size() == static_cast<size_t>(scn.n1));
    REQUIRE(gains.g_rw_wc.size() == static_cast<size_t>(scn.n1));
    REQUIRE(gains.g_rd.size() == static_cast<size_t>(scn.n2));
    REQUIRE(gains.g_re_wc.size() == static_cast<size_t>(scn.n2));

    for (int i = 0; i < scn.n1; ++i) {
        const Vec2 q = traj.waypoints[static_cast<size_t>(i + 1)];
        CHECK(rel_diff(gains.g_sr[static_cast<size_t>(i)],
                       a2g_gain(q, scn.q_src, scn.altitude, scn.beta0)) <= 1e-12);
        CHECK(rel_diff(gains.g_rw_wc[static_cast<size_t>(i)],
                       worst_case_rw_gain(q, scn)) <= 1e-12);
    }
    for (int i = 0; i < scn.n2; ++i) {
        const Vec2 q = traj.waypoints[static_cast<size_t>(scn.n1 + i + 1)];
        CHECK(rel_diff(gains.g_rd[static_cast<size_t>(i)],
                       a2g_gain(q, scn.q_dst, scn.altitude, scn.beta0)) <= 1e-12);
        CHECK(rel_diff(gains.g_re_wc[static_cast<size_t>(i)],
                       worst_case_re_gain(q, scn)) <= 1e-12);
    }
    CHECK(rel_diff(gains.g_sw_mean, g2g_mean_gain(scn.q_src, scn.q_warden_est,
                                                  scn.beta0, scn.eta)) <= 1e-12);
    CHECK(rel_diff(gains.g_sw_wc, worst_case_sw_gain(scn)) <= 1e-12);
    CHECK(gains.g_sw_wc >= gains.g_sw_mean);
}
