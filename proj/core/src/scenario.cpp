#include "relayplan/scenario.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "relayplan/channel.hpp"
#include "json.hpp"

namespace relayplan {

namespace {

using json = nlohmann::ordered_json;

double require_finite(double v, const std::string& name) {
    if (!std::isfinite(v)) throw ValidationError(name + " is not finite");
    return v;
}

double get_number(const json& j, const std::string& key) {
    if (!j.contains(key)) throw ParseError("missing field: " + key);
    const auto& v = j.at(key);
    if (!v.is_number()) throw ParseError("field is not a number: " + key);
    return v.get<double>();
}

int get_count(const json& j, const std::string& key) {
    if (!j.contains(key)) throw ParseError("missing field: " + key);
    const auto& v = j.at(key);
    if (!v.is_number_integer()) throw ParseError("field is not an integer: " + key);
    return v.get<int>();
}

Vec2 get_vec2(const json& j, const std::string& key) {
    if (!j.contains(key)) throw ParseError("missing field: " + key);
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ParseError("field is not an [x, y] pair: " + key);
    return {v[0].get<double>(), v[1].get<double>()};
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "q_src", "q_dst", "q_warden_est", "q_eaves_est", "r_warden", "r_eaves",
        "q_start", "q_end", "altitude", "period", "n1", "n2", "p_src_max",
        "p_relay_max", "p_jam_max", "noise", "noise_db", "beta0", "beta0_db",
        "eta", "sic_level", "bandwidth", "epsilon_covert", "v_max", "rotor",
        "conv_tol", "solver_tol", "jam_power_in_rate"};
    return keys;
}

const std::set<std::string>& known_rotor_keys() {
    static const std::set<std::string> keys = {"p0", "p1", "u_tip", "v0", "d0",
                                               "rho_air", "rotor_solidity", "disc_area"};
    return keys;
}

}  // namespace

double ValidationReport::worst_slack() const {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& row : rows) worst = std::min(worst, row.slack);
    return worst;
}

Scenario default_scenario() {
    Scenario scn;
    scn.q_src = {200.0, 500.0};
    scn.q_dst = {500.0, 200.0};
    scn.q_warden_est = {350.0, 450.0};
    scn.q_eaves_est = {350.0, 200.0};
    scn.r_warden = 15.0;
    scn.r_eaves = 15.0;
    scn.q_start = {0.0, 350.0};
    scn.q_end = {700.0, 350.0};
    scn.altitude = 75.0;
    scn.period = 100.0;
    scn.n1 = 50;
    scn.n2 = 50;
    scn.p_src_max = 1.0;
    scn.p_relay_max = 1.0;
    scn.p_jam_max = 1.0;
    scn.noise = db_to_linear(-120.0);
    scn.beta0 = db_to_linear(-30.0);
    scn.eta = 2.1;
    scn.sic_level = 1e-11;
    scn.bandwidth = 1.0;
    scn.epsilon_covert = 0.01;
    scn.v_max = 50.0;
    scn.rotor.p0 = 79.8563;
    scn.rotor.p1 = 88.6279;
    scn.rotor.u_tip = 120.0;
    scn.rotor.v0 = 4.03;
    scn.rotor.d0 = 0.6;
    scn.rotor.rho_air = 1.225;
    scn.rotor.rotor_solidity = 0.05;
    scn.rotor.disc_area = 0.503;
    scn.conv_tol = 0.01;
    scn.solver_tol = 1e-7;
    scn.jam_power_in_rate = JamPowerInRate::max;
    return scn;
}

void validate_scenario(const Scenario& scn) {
    for (auto [v, name] : {std::pair<Vec2, const char*>{scn.q_src, "q_src"},
                           {scn.q_dst, "q_dst"},
                           {scn.q_warden_est, "q_warden_est"},
                           {scn.q_eaves_est, "q_eaves_est"},
                           {scn.q_start, "q_start"},
                           {scn.q_end, "q_end"}}) {
        require_finite(v.x, std::string(name) + ".x");
        require_finite(v.y, std::string(name) + ".y");
    }
    if (scn.n1 < 1) throw ValidationError("n1 must be >= 1");
    if (scn.n2 < 1) throw ValidationError("n2 must be >= 1");
    if (!(require_finite(scn.period, "period") > 0.0))
        throw ValidationError("period must be > 0");
    if (!(require_finite(scn.altitude, "altitude") > 0.0))
        throw ValidationError("altitude must be > 0");
    if (!(scn.epsilon_covert > 0.0 && scn.epsilon_covert < 1.0))
        throw ValidationError("epsilon_covert must lie in (0,1)");
    if (scn.p_src_max < 0.0) throw ValidationError("p_src_max must be >= 0");
    if (scn.p_relay_max < 0.0) throw ValidationError("p_relay_max must be >= 0");
    if (scn.p_jam_max < 0.0) throw ValidationError("p_jam_max must be >= 0");
    if (!(require_finite(scn.v_max, "v_max") > 0.0))
        throw ValidationError("v_max must be > 0");
    if (!(require_finite(scn.noise, "noise") > 0.0))
        throw ValidationError("noise must be > 0");
    if (!(require_finite(scn.beta0, "beta0") > 0.0))
        throw ValidationError("beta0 must be > 0");
    if (!(require_finite(scn.eta, "eta") > 0.0))
        throw ValidationError("eta must be > 0");
    if (scn.sic_level < 0.0) throw ValidationError("sic_level must be >= 0");
    if (!(require_finite(scn.bandwidth, "bandwidth") > 0.0))
        throw ValidationError("bandwidth must be > 0");
    if (scn.r_warden < 0.0) throw ValidationError("r_warden must be >= 0");
    if (scn.r_eaves < 0.0) throw ValidationError("r_eaves must be >= 0");
    if (!(scn.conv_tol > 0.0)) throw ValidationError("conv_tol must be > 0");
    if (!(scn.solver_tol > 0.0)) throw ValidationError("solver_tol must be > 0");

    for (auto [v, name] : {std::pair<double, const char*>{scn.rotor.p0, "rotor.p0"},
                           {scn.rotor.p1, "rotor.p1"},
                           {scn.rotor.u_tip, "rotor.u_tip"},
                           {scn.rotor.v0, "rotor.v0"},
                           {scn.rotor.d0, "rotor.d0"},
                           {scn.rotor.rho_air, "rotor.rho_air"},
                           {scn.rotor.rotor_solidity, "rotor.rotor_solidity"},
                           {scn.rotor.disc_area, "rotor.disc_area"}}) {
        if (!(require_finite(v, name) > 0.0))
            throw ValidationError(std::string(name) + " must be > 0");
    }

    if (norm(scn.q_src - scn.q_warden_est) <= scn.r_warden)
        throw ValidationError("warden ball contains source");
}

Scenario load_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("scenario parse error: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("scenario document must be an object");

    for (const auto& item : j.items()) {
        if (!known_keys().count(item.key()))
            throw ParseError("unknown field: " + item.key());
    }
    if (j.contains("noise") && j.contains("noise_db"))
        throw ParseError("give either noise or noise_db, not both");
    if (j.contains("beta0") && j.contains("beta0_db"))
        throw ParseError("give either beta0 or beta0_db, not both");

    Scenario scn;
    scn.q_src = get_vec2(j, "q_src");
    scn.q_dst = get_vec2(j, "q_dst");
    scn.q_warden_est = get_vec2(j, "q_warden_est");
    scn.q_eaves_est = get_vec2(j, "q_eaves_est");
    scn.r_warden = get_number(j, "r_warden");
    scn.r_eaves = get_number(j, "r_eaves");
    scn.q_start = get_vec2(j, "q_start");
    scn.q_end = get_vec2(j, "q_end");
    scn.altitude = get_number(j, "altitude");
    scn.period = get_number(j, "period");
    scn.n1 = get_count(j, "n1");
    scn.n2 = get_count(j, "n2");
    scn.p_src_max = get_number(j, "p_src_max");
    scn.p_relay_max = get_number(j, "p_relay_max");
    scn.p_jam_max = get_number(j, "p_jam_max");
    scn.noise = j.contains("noise_db") ? db_to_linear(get_number(j, "noise_db"))
                                       : get_number(j, "noise");
    scn.beta0 = j.contains("beta0_db") ? db_to_linear(get_number(j, "beta0_db"))
                                       : get_number(j, "beta0");
    scn.eta = get_number(j, "eta");
    scn.sic_level = get_number(j, "sic_level");
    scn.bandwidth = j.contains("bandwidth") ? get_number(j, "bandwidth") : 1.0;
    scn.epsilon_covert = get_number(j, "epsilon_covert");
    scn.v_max = get_number(j, "v_max");
    scn.conv_tol = j.contains("conv_tol") ? get_number(j, "conv_tol") : 0.01;
    scn.solver_tol = j.contains("solver_tol") ? get_number(j, "solver_tol") : 1e-7;

    if (j.contains("jam_power_in_rate")) {
        const auto& v = j.at("jam_power_in_rate");
        if (!v.is_string()) throw ParseError("jam_power_in_rate must be a string");
        const std::string s = v.get<std::string>();
        if (s == "max")
            scn.jam_power_in_rate = JamPowerInRate::max;
        else if (s == "mean")
            scn.jam_power_in_rate = JamPowerInRate::mean;
        else
            throw ParseError("jam_power_in_rate must be \"max\" or \"mean\"");
    }

    if (!j.contains("rotor")) throw ParseError("missing field: rotor");
    const auto& r = j.at("rotor");
    if (!r.is_object()) throw ParseError("rotor must be an object");
    for (const auto& item : r.items()) {
        if (!known_rotor_keys().count(item.key()))
            throw ParseError("unknown rotor field: " + item.key());
    }
    scn.rotor.p0 = get_number(r, "p0");
    scn.rotor.p1 = get_number(r, "p1");
    scn.rotor.u_tip = get_number(r, "u_tip");
    scn.rotor.v0 = get_number(r, "v0");
    scn.rotor.d0 = get_number(r, "d0");
    scn.rotor.rho_air = get_number(r, "rho_air");
    scn.rotor.rotor_solidity = get_number(r, "rotor_solidity");
    scn.rotor.disc_area = get_number(r, "disc_area");

    validate_scenario(scn);
    return scn;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("scenario not found: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& scn) {
    json j;
    auto put_vec2 = [&](const char* key, Vec2 v) { j[key] = {v.x, v.y}; };
    put_vec2("q_src", scn.q_src);
    put_vec2("q_dst", scn.q_dst);
    put_vec2("q_warden_est", scn.q_warden_est);
    put_vec2("q_eaves_est", scn.q_eaves_est);
    j["r_warden"] = scn.r_warden;
    j["r_eaves"] = scn.r_eaves;
    put_vec2("q_start", scn.q_start);
    put_vec2("q_end", scn.q_end);
    j["altitude"] = scn.altitude;
    j["period"] = scn.period;
    j["n1"] = scn.n1;
    j["n2"] = scn.n2;
    j["p_src_max"] = scn.p_src_max;
    j["p_relay_max"] = scn.p_relay_max;
    j["p_jam_max"] = scn.p_jam_max;
    j["noise"] = scn.noise;
    j["beta0"] = scn.beta0;
    j["eta"] = scn.eta;
    j["sic_level"] = scn.sic_level;
    j["bandwidth"] = scn.bandwidth;
    j["epsilon_covert"] = scn.epsilon_covert;
    j["v_max"] = scn.v_max;
    j["rotor"] = {{"p0", scn.rotor.p0},
                  {"p1", scn.rotor.p1},
                  {"u_tip", scn.rotor.u_tip},
                  {"v0", scn.rotor.v0},
                  {"d0", scn.rotor.d0},
                  {"rho_air", scn.rotor.rho_air},
                  {"rotor_solidity", scn.rotor.rotor_solidity},
                  {"disc_area", scn.rotor.disc_area}};
    j["conv_tol"] = scn.conv_tol;
    j["solver_tol"] = scn.solver_tol;
    j["jam_power_in_rate"] =
        scn.jam_power_in_rate == JamPowerInRate::max ? "max" : "mean";
    return j.dump(2) + "\n";
}

PhasePlan phase_plan(const Scenario& scn, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("alpha must lie in (0,1)");
    PhasePlan plan;
    plan.alpha = alpha;
    plan.n1 = scn.n1;
    plan.n2 = scn.n2;
    plan.delta1 = alpha * scn.period / scn.n1;
    plan.delta2 = (1.0 - alpha) * scn.period / scn.n2;
    plan.phi1 = alpha / scn.n1;
    plan.phi2 = (1.0 - alpha) / scn.n2;
    return plan;
}

ValidationReport validate_solution(const Scenario& scn, const Solution& sol) {
    ValidationReport report;
    const int n1 = scn.n1, n2 = scn.n2, n = scn.n_total();

    const bool structure_ok =
        sol.trajectory.waypoints.size() == static_cast<size_t>(n + 1) &&
        sol.powers.p_src.size() == static_cast<size_t>(n1) &&
        sol.powers.p_relay.size() == static_cast<size_t>(n2);
    report.rows.push_back({"structure", structure_ok ? 0.0 : -1.0, -1});
    if (!structure_ok) return report;

    report.rows.push_back(
        {"alpha_range", std::min(sol.alpha, 1.0 - sol.alpha), -1});
    if (!(sol.alpha > 0.0 && sol.alpha < 1.0)) return report;

    const PhasePlan plan = phase_plan(scn, sol.alpha);
    const auto& wp = sol.trajectory.waypoints;

    report.rows.push_back({"start_point", -norm(wp[0] - scn.q_start), -1});
    report.rows.push_back({"end_point", -norm(wp[n] - scn.q_end), -1});

    for (int slot = 1; slot <= n; ++slot) {
        const double leg = norm(wp[slot] - wp[slot - 1]);
        const double cap = (slot <= n1 ? plan.delta1 : plan.delta2) * scn.v_max;
        report.rows.push_back(
            {slot <= n1 ? "speed_phase1" : "speed_phase2", cap - leg, slot});
    }

    for (int i = 0; i < n1; ++i) {
        const double p = sol.powers.p_src[i];
        report.rows.push_back({"p_src_nonneg", p, i + 1});
        report.rows.push_back({"p_src_cap", scn.p_src_max - p, i + 1});
    }
    for (int i = 0; i < n2; ++i) {
        const double p = sol.powers.p_relay[i];
        report.rows.push_back({"p_relay_nonneg", p, n1 + 1 + i});
        report.rows.push_back({"p_relay_cap", scn.p_relay_max - p, n1 + 1 + i});
    }

    // Covert cap with worst-case gains, reported as a relative slack since
    // the raw watt-scale products sit many orders below 1.
    const double g_sw_wc = worst_case_sw_gain(scn);
    for (int i = 0; i < n1; ++i) {
        const double g_rw_wc = worst_case_rw_gain(wp[i + 1], scn);
        const double cap = scn.epsilon_covert * scn.p_jam_max * g_rw_wc;
        const double lhs = sol.powers.p_src[i] * g_sw_wc;
        report.rows.push_back({"covert", (cap - lhs) / cap, i + 1});
    }

    if (sol.energy > 0.0) {
        const double expected = sol.acsr_lb * scn.period / sol.energy;
        const double scale = std::max({std::abs(sol.csee), std::abs(expected), 1e-300});
        report.rows.push_back(
            {"csee_consistency", 1e-6 - std::abs(sol.csee - expected) / scale, -1});
    }
    return report;
}

}  // namespace relayplan
