#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "relayplan/ao.hpp"
#include "relayplan/energy.hpp"
#include "relayplan/scenario.hpp"
#include "test_util.hpp"

using namespace relayplan;
using testutil::rel_diff;
using nlohmann::json;

TEST_CASE("default scenario carries the published parameter set") {
    const Scenario scn = default_scenario();
    CHECK(scn.q_src.x == 200.0);
    CHECK(scn.q_src.y == 500.0);
    CHECK(scn.q_dst.x == 500.0);
    CHECK(scn.q_dst.y == 200.0);
    CHECK(scn.q_warden_est.x == 350.0);
    CHECK(scn.q_warden_est.y == 450.0);
    CHECK(scn.q_eaves_est.x == 350.0);
    CHECK(scn.q_eaves_est.y == 200.0);
    CHECK(scn.r_warden == 15.0);
    CHECK(scn.r_eaves == 15.0);
    CHECK(scn.q_start.x == 0.0);
    CHECK(scn.q_start.y == 350.0);
    CHECK(scn.q_end.x == 700.0);
    CHECK(scn.q_end.y == 350.0);
    CHECK(scn.altitude == 75.0);
    CHECK(scn.period == 100.0);
    CHECK(scn.n1 == 50);
    CHECK(scn.n2 == 50);
    CHECK(scn.p_src_max == 1.0);
    CHECK(scn.p_relay_max == 1.0);
    CHECK(scn.p_jam_max == 1.0);
    CHECK(rel_diff(scn.noise, 1e-12) <= 1e-14);
    CHECK(rel_diff(scn.beta0, 1e-3) <= 1e-14);
    CHECK(scn.eta == 2.1);
    CHECK(scn.sic_level == 1e-11);
    CHECK(scn.bandwidth == 1.0);
    CHECK(scn.epsilon_covert == 0.01);
    CHECK(scn.v_max == 50.0);
    CHECK(scn.rotor.p0 == 79.8563);
    CHECK(scn.rotor.p1 == 88.6279);
    CHECK(scn.rotor.u_tip == 120.0);
    CHECK(scn.rotor.v0 == 4.03);
    CHECK(scn.rotor.d0 == 0.6);
    CHECK(scn.rotor.rho_air == 1.225);
    CHECK(scn.rotor.rotor_solidity == 0.05);
    CHECK(scn.rotor.disc_area == 0.503);
    CHECK(scn.conv_tol == 0.01);
    CHECK(scn.solver_tol == 1e-7);
    CHECK(scn.jam_power_in_rate == JamPowerInRate::max);
    CHECK(scn.jam_power_eff() == 1.0);
    CHECK_NOTHROW(validate_scenario(scn));
}

TEST_CASE("serialize/load round-trip is the identity") {
    Scenario scn = default_scenario();
    scn.n1 = 3;
    scn.bandwidth = 5.0;
    scn.jam_power_in_rate = JamPowerInRate::mean;
    const std::string text = serialize_scenario(scn);
    const Scenario back = load_scenario(text);
    CHECK(serialize_scenario(back) == text);
    CHECK(back.n1 == 3);
    CHECK(back.bandwidth == 5.0);
    CHECK(back.jam_power_in_rate == JamPowerInRate::mean);
    CHECK(back.jam_power_eff() == 0.5);
    CHECK(back.q_warden_est.y == scn.q_warden_est.y);
    CHECK(back.rotor.disc_area == scn.rotor.disc_area);
}

TEST_CASE("dB alternatives convert as 10^(dB/10)") {
    json doc = json::parse(serialize_scenario(default_scenario()));
    doc.erase("noise");
    doc.erase("beta0");
    doc["noise_db"] = -120.0;
    doc["beta0_db"] = -30.0;
    const Scenario scn = load_scenario(doc.dump());
    CHECK(rel_diff(scn.noise, 1e-12) <= 1e-14);
    CHECK(rel_diff(scn.beta0, 1e-3) <= 1e-14);
}

TEST_CASE("omitted optional fields take their defaults") {
    json doc = json::parse(serialize_scenario(default_scenario()));
    doc.erase("bandwidth");
    doc.erase("conv_tol");
    doc.erase("solver_tol");
    doc.erase("jam_power_in_rate");
    const Scenario scn = load_scenario(doc.dump());
    CHECK(scn.bandwidth == 1.0);
    CHECK(scn.conv_tol == 0.01);
    CHECK(scn.solver_tol == 1e-7);
    CHECK(scn.jam_power_in_rate == JamPowerInRate::max);
}

TEST_CASE("unknown fields are rejected") {
    json doc = json::parse(serialize_scenario(default_scenario()));
    doc["bogus"] = 1;
    CHECK_THROWS_AS(load_scenario(doc.dump()), ParseError);
}

TEST_CASE("malformed document is a parse error") {
    CHECK_THROWS_AS(load_scenario("{not json"), ParseError);
    CHECK_THROWS_AS(load_scenario("[1,2]"), ParseError);
}

TEST_CASE("warden ball containing the source fails validation") {
    json doc = json::parse(serialize_scenario(default_scenario()));
    doc["r_warden"] = 200.0;
    try {
        load_scenario(doc.dump());
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("warden ball contains source") !=
              std::string::npos);
    }

    Scenario scn = default_scenario();
    scn.q_warden_est = scn.q_src;
    scn.r_warden = 15.0;
    CHECK_THROWS_AS(validate_scenario(scn), ValidationError);
}

TEST_CASE("phase_plan splits the period") {
    const Scenario scn = default_scenario();

    const PhasePlan even = phase_plan(scn, 0.5);
    CHECK(even.delta1 == 1.0);
    CHECK(even.delta2 == 1.0);
    CHECK(even.phi1 == 0.01);
    CHECK(even.phi2 == 0.01);
    CHECK(even.n1 == 50);
    CHECK(even.n2 == 50);

    Scenario half = scn;
    half.period = 50.0;
    const PhasePlan skew = phase_plan(half, 0.4);
    CHECK(rel_diff(skew.delta1, 0.4) <= 1e-15);
    CHECK(rel_diff(skew.delta2, 0.6) <= 1e-15);

    CHECK_THROWS_AS(phase_plan(scn, 0.0), std::domain_error);
    CHECK_THROWS_AS(phase_plan(scn, 1.0), std::domain_error);

    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const double a = 1e-6 + (1.0 - 2e-6) * rng.next_double();
        const PhasePlan p = phase_plan(scn, a);
        CHECK(rel_diff(p.delta1 * scn.n1 + p.delta2 * scn.n2, scn.period) <= 1e-9);
        CHECK(p.phi1 > 0.0);
        CHECK(p.phi2 > 0.0);
    }
}

TEST_CASE("validate_solution reports constructed violations") {
    const Scenario scn = default_scenario();
    const Solution good = initialize(scn, AoMode::prop);
    CHECK(validate_solution(scn, good).feasible(1e-9));

    SUBCASE("source power above the cap") {
        Solution bad = good;
        bad.powers.p_src[2] = 2.0 * scn.p_src_max;
        const ValidationReport rep = validate_solution(scn, bad);
        CHECK_FALSE(rep.feasible(1e-9));
        bool found = false;
        for (const auto& row : rep.rows) {
            if (row.name == "p_src_cap" && row.slot == 3) {
                found = true;
                CHECK(rel_diff(row.slack, -scn.p_src_max) <= 1e-12);
            }
        }
        CHECK(found);
    }

    SUBCASE("speed cap flagged at every slot") {
        Scenario slow = scn;
        slow.v_max = 1.0;
        const ValidationReport rep = validate_solution(slow, good);
        int flagged = 0;
        for (const auto& row : rep.rows)
            if ((row.name == "speed_phase1" || row.name == "speed_phase2") &&
                row.slack < 0.0)
                ++flagged;
        CHECK(flagged == scn.n_total());
    }

    SUBCASE("moved start point") {
        Solution bad = good;
        bad.trajectory.waypoints[0].x += 3.0;
        const ValidationReport rep = validate_solution(scn, bad);
        bool found = false;
        for (const auto& row : rep.rows)
            if (row.name == "start_point") {
                found = true;
                CHECK(row.slack < -2.9);
            }
        CHECK(found);
    }

    SUBCASE("covert violation is a relative slack") {
        Solution bad = good;
        bad.powers.p_src.assign(static_cast<size_t>(scn.n1), scn.p_src_max);
        const ValidationReport rep = validate_solution(scn, bad);
        bool found = false;
        for (const auto& row : rep.rows)
            if (row.name == "covert" && row.slack < -0.5) found = true;
        CHECK(found);
    }

    SUBCASE("shrinking powers never worsens power slacks") {
        Solution shrunk = good;
        for (auto& p : shrunk.powers.p_src) p *= 0.5;
        for (auto& p : shrunk.powers.p_relay) p *= 0.5;
        const ValidationReport before = validate_solution(scn, good);
        const ValidationReport after = validate_solution(scn, shrunk);
        REQUIRE(before.rows.size() == after.rows.size());
        for (size_t i = 0; i < before.rows.size(); ++i) {
            const auto& b = before.rows[i];
            const auto& a = after.rows[i];
            if (b.name == "p_src_cap" || b.name == "p_relay_cap" ||
                b.name == "covert")
                CHECK(a.slack >= b.slack - 1e-15);
        }
    }
}

TEST_CASE("shipped default scenario file matches the built-in") {
    const Scenario from_file =
        load_scenario_file(RELAYPLAN_SOURCE_DIR "/scenarios/default.json");
    CHECK(serialize_scenario(from_file) == serialize_scenario(default_scenario()));
}
