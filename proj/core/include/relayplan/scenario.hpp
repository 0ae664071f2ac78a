#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace relayplan {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// Rotary-wing propulsion constants. All strictly positive.
struct RotorParams {
    double p0 = 0.0;              // blade profile power, W
    double p1 = 0.0;              // induced power in hover, W
    double u_tip = 0.0;           // rotor tip speed, m/s
    double v0 = 0.0;              // mean induced velocity in hover, m/s
    double d0 = 0.0;              // fuselage drag ratio
    double rho_air = 0.0;         // air density, kg/m^3
    double rotor_solidity = 0.0;  // s
    double disc_area = 0.0;       // A, m^2
};

// How the jamming power enters the deterministic phase-1 rate bound.
enum class JamPowerInRate { max, mean };

struct Scenario {
    Vec2 q_src;             // ground source
    Vec2 q_dst;             // ground destination
    Vec2 q_warden_est;      // estimated warden position
    Vec2 q_eaves_est;       // estimated eavesdropper position
    double r_warden = 0.0;  // warden position uncertainty radius, m
    double r_eaves = 0.0;   // eavesdropper position uncertainty radius, m
    Vec2 q_start;           // relay take-off position
    Vec2 q_end;             // relay landing position
    double altitude = 0.0;  // fixed flight altitude H, m
    double period = 0.0;    // mission period T, s
    int n1 = 0;             // phase-1 slot count
    int n2 = 0;             // phase-2 slot count
    double p_src_max = 0.0;
    double p_relay_max = 0.0;
    double p_jam_max = 0.0;       // peak jamming power
    double noise = 0.0;           // sigma^2, linear W
    double beta0 = 0.0;           // channel gain at 1 m, linear
    double eta = 0.0;             // ground-to-ground path-loss exponent
    double sic_level = 0.0;       // residual self-interference psi
    double bandwidth = 1.0;       // Hz
    double epsilon_covert = 0.0;  // covertness tolerance
    double v_max = 0.0;           // m/s
    RotorParams rotor;
    double conv_tol = 0.01;    // outer-loop convergence accuracy
    double solver_tol = 1e-7;  // convex-solve KKT accuracy
    JamPowerInRate jam_power_in_rate = JamPowerInRate::max;

    int n_total() const { return n1 + n2; }
    // Jamming power used inside the deterministic phase-1 rate bound.
    double jam_power_eff() const {
        return jam_power_in_rate == JamPowerInRate::max ? p_jam_max : 0.5 * p_jam_max;
    }
};

// Time split between the two phases for a given switching factor.
struct PhasePlan {
    double alpha = 0.0;
    double delta1 = 0.0;  // phase-1 slot duration, s
    double delta2 = 0.0;  // phase-2 slot duration, s
    double phi1 = 0.0;    // alpha/N1
    double phi2 = 0.0;    // (1-alpha)/N2
    int n1 = 0;
    int n2 = 0;
};

// N+1 waypoints; waypoints[0] = q_start, waypoints[N] = q_end.
// Slot n is flown over leg waypoints[n-1] -> waypoints[n].
struct Trajectory {
    std::vector<Vec2> waypoints;
};

struct PowerSchedule {
    std::vector<double> p_src;    // N1 entries, slots 1..N1
    std::vector<double> p_relay;  // N2 entries, slots N1+1..N
};

struct Solution {
    Trajectory trajectory;
    PowerSchedule powers;
    double alpha = 0.5;
    double csee = 0.0;     // bits/J
    double acsr_lb = 0.0;  // bits/s
    double energy = 0.0;   // J
    int iterations = 0;
    std::vector<double> phi_history;  // bits/J per outer iteration
};

// One constraint row: slack >= 0 means satisfied; slot -1 means aggregate.
struct ConstraintSlack {
    std::string name;
    double slack = 0.0;
    int slot = -1;
};

struct ValidationReport {
    std::vector<ConstraintSlack> rows;
    double worst_slack() const;
    bool feasible(double tol = 1e-9) const { return worst_slack() >= -tol; }
};

Scenario default_scenario();

// Throws ValidationError naming the violated invariant.
void validate_scenario(const Scenario& scn);

Scenario load_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);
std::string serialize_scenario(const Scenario& scn);

// Throws std::domain_error when alpha is outside (0,1).
PhasePlan phase_plan(const Scenario& scn, double alpha);

ValidationReport validate_solution(const Scenario& scn, const Solution& sol);

}  // namespace relayplan
