#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <vector>

#include "doctest.h"
#include "relayplan/energy.hpp"
#include "test_util.hpp"

using namespace relayplan;
using testutil::rel_diff;

namespace {

RotorParams rotor() {
    return default_scenario().rotor;
}

double blade_term(double v, const RotorParams& r) {
    return r.p0 * (1.0 + 3.0 * v * v / (r.u_tip * r.u_tip));
}

double induced_exact_term(double v, const RotorParams& r) {
    const double q = v * v / (2.0 * r.v0 * r.v0);
    return r.p1 * std::sqrt(std::sqrt(1.0 + q * q) - q);
}

double parasite_term(double v, const RotorParams& r) {
    return 0.5 * r.d0 * r.rho_air * r.rotor_solidity * r.disc_area * v * v * v;
}

Trajectory two_leg_line(Vec2 a, Vec2 m, Vec2 b) {
    Trajectory t;
    t.waypoints = {a, m, b};
    return t;
}

}  // namespace

TEST_CASE("exact propulsion power") {
    const RotorParams r = rotor();
    CHECK(rel_diff(propulsion_power_exact(0.0, r), r.p0 + r.p1) <= 1e-15);
    CHECK(rel_diff(propulsion_power_exact(10.0, r), 126.02907406639233) <= 1e-12);
    CHECK(rel_diff(propulsion_power_exact(30.0, r), 356.28397511565674) <= 1e-12);

    // Induced term identity at v = v0*sqrt(2).
    const double v = r.v0 * std::sqrt(2.0);
    const double induced =
        propulsion_power_exact(v, r) - blade_term(v, r) - parasite_term(v, r);
    CHECK(rel_diff(induced, r.p1 * 0.6435942529055827) <= 1e-12);

    // Term-by-term re-derivation across the speed range.
    for (int i = 0; i <= 600; ++i) {
        const double s = 0.1 * i;
        const double want =
            blade_term(s, r) + induced_exact_term(s, r) + parasite_term(s, r);
        CHECK(rel_diff(propulsion_power_exact(s, r), want) <= 1e-12);
    }
}

TEST_CASE("surrogate propulsion power") {
    const RotorParams r = rotor();
    CHECK(rel_diff(propulsion_power_approx(10.0, r), 126.47964161666667) <= 1e-12);
    CHECK_THROWS_AS(propulsion_power_approx(0.0, r), std::domain_error);

    // Dominates the exact model on the asserted grid.
    for (int i = 0; i < 1191; ++i) {
        const double v = 0.5 + 0.05 * i;
        CHECK(propulsion_power_approx(v, r) > propulsion_power_exact(v, r));
    }

    // Asymptotic agreement.
    CHECK(std::fabs(propulsion_power_approx(60.0, r) /
                        propulsion_power_exact(60.0, r) -
                    1.0) <= 1e-5);
    CHECK(std::fabs(propulsion_power_approx(200.0, r) /
                        propulsion_power_exact(200.0, r) -
                    1.0) <= 1e-7);
}

TEST_CASE("total surrogate energy") {
    Scenario scn = default_scenario();
    scn.n1 = 1;
    scn.n2 = 1;
    const RotorParams r = scn.rotor;

    // Uniform speed: constant integrand.
    const Trajectory uniform = two_leg_line({0, 0}, {40, 0}, {80, 0});
    const PhasePlan even = phase_plan(scn, 0.5);
    const double v = 40.0 / even.delta1;
    CHECK(rel_diff(e_sum(uniform, even, r), scn.period * propulsion_power_approx(v, r)) <=
          1e-12);

    // Direct slot-by-slot recomputation at a skewed split.
    const Trajectory skewed = two_leg_line({0, 0}, {30, 0}, {100, 20});
    const PhasePlan plan = phase_plan(scn, 0.3);
    const double d2 = std::hypot(70.0, 20.0);
    const double want = plan.delta1 * propulsion_power_approx(30.0 / plan.delta1, r) +
                        plan.delta2 * propulsion_power_approx(d2 / plan.delta2, r);
    CHECK(rel_diff(e_sum(skewed, plan, r), want) <= 1e-12);

    // Halving every leg: blade and parasite speed terms fall, induced rises.
    const Trajectory halved = two_leg_line({0, 0}, {15, 0}, {50, 10});
    const LegDistances big = leg_distances(skewed);
    const LegDistances small = leg_distances(halved);
    for (int leg = 0; leg < 2; ++leg) {
        const auto lu = static_cast<size_t>(leg);
        CHECK(rel_diff(small.d[lu], 0.5 * big.d[lu]) <= 1e-12);
        const double delta = leg == 0 ? plan.delta1 : plan.delta2;
        const double vb = big.d[lu] / delta, vs = small.d[lu] / delta;
        CHECK(blade_term(vs, r) < blade_term(vb, r));
        CHECK(parasite_term(vs, r) < parasite_term(vb, r));
        CHECK(r.p1 * r.v0 / vs > r.p1 * r.v0 / vb);
    }

    // Degenerate legs are rejected.
    const Trajectory stuck = two_leg_line({0, 0}, {0, 0}, {80, 0});
    CHECK_THROWS_AS(e_sum(stuck, even, r), std::domain_error);
}

TEST_CASE("energy coefficient extraction") {
    Scenario scn = default_scenario();
    scn.n1 = 1;
    scn.n2 = 1;
    const RotorParams r = scn.rotor;
    const double d1 = 40.0, d2 = 60.0;
    const Trajectory traj = two_leg_line({0, 0}, {d1, 0}, {d1 + d2, 0});
    const LegDistances dist = leg_distances(traj);
    const AlphaEnergyCoeffs c = alpha_energy_coeffs(dist, scn);

    // Symbolic forms for one leg per phase.
    const double T = scn.period;
    CHECK(rel_diff(c.a1, r.p0 * T) <= 1e-12);
    CHECK(rel_diff(c.a2, r.p0 * T) <= 1e-12);
    CHECK(rel_diff(c.b1, 3.0 * r.p0 * d1 * d1 / (r.u_tip * r.u_tip * T)) <= 1e-12);
    CHECK(rel_diff(c.b2, 3.0 * r.p0 * d2 * d2 / (r.u_tip * r.u_tip * T)) <= 1e-12);
    CHECK(rel_diff(c.c1, r.p1 * r.v0 * T * T / d1) <= 1e-12);
    CHECK(rel_diff(c.c2, r.p1 * r.v0 * T * T / d2) <= 1e-12);
    const double drag = 0.5 * r.d0 * r.rho_air * r.rotor_solidity * r.disc_area;
    CHECK(rel_diff(c.d1, drag * d1 * d1 * d1 / (T * T)) <= 1e-12);
    CHECK(rel_diff(c.d2, drag * d2 * d2 * d2 / (T * T)) <= 1e-12);

    // Cross-evaluation against e_sum.
    Rng rng(29);
    for (int i = 0; i < 5; ++i) {
        const double a = 0.1 + 0.8 * rng.next_double();
        CHECK(rel_diff(alpha_energy_eval(c, a),
                       e_sum(traj, phase_plan(scn, a), r)) <= 1e-9);
    }

    // Doubling the period: a doubles, b halves, c quadruples, d quarters.
    Scenario longer = scn;
    longer.period = 2.0 * T;
    const AlphaEnergyCoeffs c2 = alpha_energy_coeffs(dist, longer);
    CHECK(rel_diff(c2.a1, 2.0 * c.a1) <= 1e-12);
    CHECK(rel_diff(c2.b1, 0.5 * c.b1) <= 1e-12);
    CHECK(rel_diff(c2.c1, 4.0 * c.c1) <= 1e-12);
    CHECK(rel_diff(c2.d1, 0.25 * c.d1) <= 1e-12);

    // Degenerate legs make the induced coefficient diverge.
    const Trajectory stuck = two_leg_line({0, 0}, {0, 0}, {0, 0});
    CHECK_THROWS_AS(alpha_energy_coeffs(leg_distances(stuck), scn),
                    std::domain_error);
}

TEST_CASE("energy derivative in the switching factor") {
    AlphaEnergyCoeffs sym;
    sym.a1 = sym.a2 = 1000.0;
    sym.b1 = sym.b2 = 400.0;
    sym.c1 = sym.c2 = 50.0;
    sym.d1 = sym.d2 = 60.0;
    CHECK(std::fabs(de_sum_dalpha(sym, 0.5)) <= 1e-9);

    AlphaEnergyCoeffs c;
    c.a1 = 1200.0;
    c.b1 = 300.0;
    c.c1 = 80.0;
    c.d1 = 45.0;
    c.a2 = 900.0;
    c.b2 = 500.0;
    c.c2 = 20.0;
    c.d2 = 65.0;

    Rng rng(31);
    for (int i = 0; i < 20; ++i) {
        const double a = 0.05 + 0.9 * rng.next_double();
        const double h = 1e-6;
        const double fd =
            (alpha_energy_eval(c, a + h) - alpha_energy_eval(c, a - h)) / (2.0 * h);
        CHECK(rel_diff(de_sum_dalpha(c, a), fd) <= 1e-5);
    }

    double prev = de_sum_dalpha(c, 1e-3);
    for (int i = 1; i <= 1000; ++i) {
        const double a = 1e-3 + (1.0 - 2e-3) * i / 1000.0;
        const double d = de_sum_dalpha(c, a);
        CHECK(d > prev);
        prev = d;
    }

    // Convexity: second finite difference nonnegative.
    const double h = 1e-4;
    for (int i = 1; i < 100; ++i) {
        const double a = i / 100.0;
        if (a - h <= 0.0 || a + h >= 1.0) continue;
        const double second = alpha_energy_eval(c, a - h) -
                              2.0 * alpha_energy_eval(c, a) +
                              alpha_energy_eval(c, a + h);
        CHECK(second >= -1e-9);
    }

    CHECK_THROWS_AS(de_sum_dalpha(c, 0.0), std::domain_error);
    CHECK_THROWS_AS(de_sum_dalpha(c, 1.0), std::domain_error);
}

TEST_CASE("efficiency ratio") {
    CHECK(csee(0.0, 500.0, 100.0) == 0.0);
    const double base = csee(2.0, 500.0, 100.0);
    CHECK(rel_diff(base, 0.4) <= 1e-15);
    CHECK(rel_diff(csee(2.0, 1000.0, 100.0), 0.5 * base) <= 1e-15);
    CHECK_THROWS_AS(csee(2.0, 0.0, 100.0), std::domain_error);
}
