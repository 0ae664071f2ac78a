#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <vector>

#include "doctest.h"
#include "relayplan/ao.hpp"
#include "relayplan/rates.hpp"
#include "test_util.hpp"

using namespace relayplan;
using testutil::rel_diff;

TEST_CASE("phase-1 deterministic rate bound") {
    CHECK(rel_diff(r1_sec_slot(0.05, 1e-7, 1.0, 1e-11, 1e-12, 1.0),
                   8.83145120379228) <= 1e-12);
    CHECK(r1_sec_slot(0.0, 1e-7, 1.0, 1e-11, 1e-12, 1.0) == 0.0);

    // Perfect SIC collapses the residual-interference term.
    const double perfect = r1_sec_slot(0.05, 1e-7, 1.0, 0.0, 1e-12, 1.0);
    CHECK(rel_diff(perfect, std::log2(1.0 + 0.05 * 1e-7 / 1e-12)) <= 1e-12);

    // Bandwidth scales linearly.
    CHECK(rel_diff(r1_sec_slot(0.05, 1e-7, 1.0, 1e-11, 1e-12, 3.0),
                   3.0 * 8.83145120379228) <= 1e-12);

    double prev = 0.0;
    for (double p = 0.01; p <= 1.0; p += 0.01) {
        const double r = r1_sec_slot(p, 1e-7, 1.0, 1e-11, 1e-12, 1.0);
        CHECK(r > prev);
        prev = r;
    }
    prev = r1_sec_slot(0.05, 1e-7, 1.0, 0.0, 1e-12, 1.0);
    for (double sic = 1e-12; sic <= 1e-9; sic *= 2.0) {
        const double r = r1_sec_slot(0.05, 1e-7, 1.0, sic, 1e-12, 1.0);
        CHECK(r < prev);
        prev = r;
    }
}

TEST_CASE("phase-2 secrecy rate") {
    CHECK(rel_diff(r2_sec_slot(0.8, 3e-8, 5e-9, 1e-12, 1.0), 2.584661983078707) <=
          1e-12);
    CHECK(r2_sec_slot(0.8, 4e-9, 4e-9, 1e-12, 1.0) == 0.0);
    CHECK(r2_sec_slot(0.0, 3e-8, 5e-9, 1e-12, 1.0) == 0.0);

    // Worse eavesdropper channel than destination channel: negative, unclamped.
    CHECK(r2_sec_slot(0.8, 5e-9, 3e-8, 1e-12, 1.0) < 0.0);

    // Log-ratio limit at g_rd = 2*g_re.
    CHECK(std::fabs(r2_sec_slot(1e6, 2e-9, 1e-9, 1e-12, 1.0) - 1.0) <= 2e-9);

    // Robust bound is conservative: shrinking g_re never decreases r2.
    double prev = r2_sec_slot(0.8, 3e-8, 3e-8, 1e-12, 1.0);
    for (double g = 2e-8; g >= 1e-10; g *= 0.5) {
        const double r = r2_sec_slot(0.8, 3e-8, g, 1e-12, 1.0);
        CHECK(r >= prev);
        prev = r;
    }
}

TEST_CASE("average rate lower bound") {
    PhasePlan plan;
    plan.alpha = 0.5;
    plan.n1 = 4;
    plan.n2 = 4;
    plan.phi1 = 0.5 / 4.0;
    plan.phi2 = 0.5 / 4.0;

    const std::vector<double> zeros(4, 0.0);
    CHECK(acsr_lower_bound(zeros, zeros, plan) == 0.0);

    // Equal phase totals at alpha = 0.5 give half the mean slot rate.
    const std::vector<double> r1{1.0, 2.0, 3.0, 2.0};
    const std::vector<double> r2{2.0, 2.0, 2.0, 2.0};
    CHECK(rel_diff(acsr_lower_bound(r1, r2, plan), 0.5 * 2.0) <= 1e-12);

    // Negative phase-2 entries clamp per slot.
    const std::vector<double> mixed{5.0, -3.0, 1.0, -2.0};
    CHECK(rel_diff(acsr_lower_bound(r1, mixed, plan), plan.phi2 * 6.0) <= 1e-12);

    // Independent re-summation on random rates; min structure holds.
    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> a(4), b(4);
        for (auto& v : a) v = 10.0 * rng.next_double();
        for (auto& v : b) v = 10.0 * rng.next_double() - 3.0;
        double s1 = 0.0, s2 = 0.0;
        for (double v : a) s1 += v;
        for (double v : b) s2 += std::max(v, 0.0);
        const double got = acsr_lower_bound(a, b, plan);
        const double want = std::min(plan.phi1 * s1, plan.phi2 * s2);
        CHECK(rel_diff(got, want) <= 1e-12);
        CHECK(got <= plan.phi1 * s1 + 1e-15);
        CHECK(got <= plan.phi2 * s2 + 1e-15);
        const bool attains = rel_diff(got, plan.phi1 * s1) <= 1e-12 ||
                             rel_diff(got, plan.phi2 * s2) <= 1e-12;
        CHECK(attains);
    }
}

TEST_CASE("rate_breakdown composes the per-slot closed forms") {
    const Scenario scn = default_scenario();
    const Solution sol = initialize(scn, AoMode::prop);
    const GainSet gains = gain_set(sol.trajectory, scn);
    const PhasePlan plan = phase_plan(scn, sol.alpha);
    const RateBreakdown rb = rate_breakdown(gains, sol.powers, scn, plan);

    REQUIRE(rb.r1_per_slot.size() == static_cast<size_t>(scn.n1));
    REQUIRE(rb.r2_per_slot.size() == static_cast<size_t>(scn.n2));
    for (int i = 0; i < scn.n1; ++i) {
        const auto iu = static_cast<size_t>(i);
        const double want =
            r1_sec_slot(sol.powers.p_src[iu], gains.g_sr[iu], scn.jam_power_eff(),
                        scn.sic_level, scn.noise, scn.bandwidth);
        CHECK(rel_diff(rb.r1_per_slot[iu], want) <= 1e-12);
        CHECK(rb.r1_per_slot[iu] >= 0.0);
    }
    for (int i = 0; i < scn.n2; ++i) {
        const auto iu = static_cast<size_t>(i);
        const double want =
            r2_sec_slot(sol.powers.p_relay[iu], gains.g_rd[iu], gains.g_re_wc[iu],
                        scn.noise, scn.bandwidth);
        CHECK(rel_diff(rb.r2_per_slot[iu], want) <= 1e-12);
        CHECK(rel_diff(rb.r2_per_slot[iu],
                       rb.rd_per_slot[iu] - rb.re_ub_per_slot[iu]) <= 1e-9);
        CHECK(rb.rd_per_slot[iu] >= 0.0);
    }
    CHECK(rel_diff(rb.acsr_lb,
                   acsr_lower_bound(rb.r1_per_slot, rb.r2_per_slot, plan)) <=
          1e-12);
}

TEST_CASE("exact-rate Monte-Carlo collapses at perfect SIC") {
    const double closed = r1_sec_slot(0.05, 1e-7, 1.0, 0.0, 1e-12, 1.0);
    const McEstimate est = mc_r1_exact(0.05, 1e-7, 1.0, 0.0, 1e-12, 1.0, 4096, 3);
    CHECK(rel_diff(est.value, closed) <= 1e-12);
    CHECK(est.se <= 1e-8 * closed);
}

TEST_CASE("Jensen bound holds under residual interference") {
    struct Config {
        double p, g, pj, sic;
    };
    const Config configs[] = {{0.05, 1e-7, 1.0, 1e-11},
                              {0.3, 5e-8, 2.0, 1e-10},
                              {0.9, 2e-7, 0.5, 3e-11}};
    int k = 0;
    for (const auto& c : configs) {
        const double closed = r1_sec_slot(c.p, c.g, c.pj, c.sic, 1e-12, 1.0);
        const McEstimate est = mc_r1_exact(c.p, c.g, c.pj, c.sic, 1e-12, 1.0,
                                           100000, chunk_seed(2, 400 + k++));
        CHECK(est.se > 0.0);
        CHECK(est.value >= closed - 3.0 * est.se);
    }
}

TEST_CASE("Monte-Carlo standard error scales as inverse root samples") {
    const McEstimate small = mc_r1_exact(0.05, 1e-7, 1.0, 1e-11, 1e-12, 1.0,
                                         100000, 9);
    const McEstimate big = mc_r1_exact(0.05, 1e-7, 1.0, 1e-11, 1e-12, 1.0,
                                       200000, 9);
    const double ratio = small.se / big.se;
    CHECK(ratio >= std::sqrt(2.0) * 0.8);
    CHECK(ratio <= std::sqrt(2.0) * 1.2);
}

TEST_CASE("mc_r1_exact is deterministic for a fixed seed") {
    const McEstimate a = mc_r1_exact(0.05, 1e-7, 1.0, 1e-11, 1e-12, 1.0, 70000, 4);
    const McEstimate b = mc_r1_exact(0.05, 1e-7, 1.0, 1e-11, 1e-12, 1.0, 70000, 4);
    CHECK(a.value == b.value);
    CHECK(a.se == b.se);
}
