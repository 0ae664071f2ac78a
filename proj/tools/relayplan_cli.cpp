#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "relayplan/ao.hpp"
#include "relayplan/sampling.hpp"

namespace {

using namespace relayplan;

// Exit code carried through main's single catch site.
struct CliError {
    int code = 1;
    std::string message;
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Cell-safe: the only CSV metacharacter our strings can carry is a comma.
std::string cell(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    return s;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CliError{1, "cannot write: " + path};
    return out;
}

Scenario load_scenario_arg(const std::string& path) {
    if (path.empty()) return default_scenario();
    if (!std::filesystem::exists(path)) throw CliError{2, "scenario not found: " + path};
    return load_scenario_file(path);
}

// ----- solve ---------------------------------------------------------------

void write_solution_csv(std::ostream& out, const Scenario& scn, const Solution& sol,
                        double phi0) {
    out << "record,slot,phase,x,y,p_src,p_relay,value\n";
    const int n1 = scn.n1, n = scn.n_total();
    for (int i = 0; i <= n; ++i) {
        const Vec2 q = sol.trajectory.waypoints[static_cast<size_t>(i)];
        const char* phase = i == 0 ? "start" : (i <= n1 ? "phase1" : "phase2");
        out << "waypoint," << i << ',' << phase << ',' << num(q.x) << ',' << num(q.y)
            << ',';
        if (i >= 1 && i <= n1) out << num(sol.powers.p_src[static_cast<size_t>(i - 1)]);
        out << ',';
        if (i > n1) out << num(sol.powers.p_relay[static_cast<size_t>(i - n1 - 1)]);
        out << ",\n";
    }
    out << "alpha,,,,,,," << num(sol.alpha) << '\n';
    out << "phi,0,,,,,," << num(phi0) << '\n';
    for (size_t i = 0; i < sol.phi_history.size(); ++i)
        out << "phi," << (i + 1) << ",,,,,," << num(sol.phi_history[i]) << '\n';
}

void write_trace_csv(std::ostream& out, const AoTrace& trace, double phi0,
                     double alpha0) {
    out << "iter,phi,alpha,obj_alpha,obj_power,obj_traj,status\n";
    out << "0," << num(phi0) << ',' << num(alpha0) << ",,,,init\n";
    for (const auto& r : trace.records) {
        out << r.iter << ',' << num(r.phi) << ',' << num(r.alpha) << ','
            << num(r.obj_alpha) << ',' << num(r.obj_power) << ',' << num(r.obj_traj)
            << ',' << cell(r.status) << '\n';
    }
}

void write_trajectory_svg(std::ostream& out, const Scenario& scn, const Solution& sol) {
    double lo_x = scn.q_start.x, hi_x = lo_x, lo_y = scn.q_start.y, hi_y = lo_y;
    auto grow = [&](Vec2 q, double r) {
        lo_x = std::min(lo_x, q.x - r);
        hi_x = std::max(hi_x, q.x + r);
        lo_y = std::min(lo_y, q.y - r);
        hi_y = std::max(hi_y, q.y + r);
    };
    for (Vec2 q : sol.trajectory.waypoints) grow(q, 0.0);
    grow(scn.q_src, 0.0);
    grow(scn.q_dst, 0.0);
    grow(scn.q_warden_est, scn.r_warden);
    grow(scn.q_eaves_est, scn.r_eaves);
    const double pad = 0.05 * std::max(hi_x - lo_x, hi_y - lo_y) + 1.0;
    lo_x -= pad, hi_x += pad, lo_y -= pad, hi_y += pad;

    const double w = 800.0;
    const double scale = w / (hi_x - lo_x);
    const double h = (hi_y - lo_y) * scale;
    // World y grows upward; SVG y grows downward.
    auto px = [&](Vec2 q) { return (q.x - lo_x) * scale; };
    auto py = [&](Vec2 q) { return h - (q.y - lo_y) * scale; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << num(w) << ' '
        << num(h) << "\">\n";
    auto disc = [&](Vec2 q, double r, const char* color) {
        out << "  <circle cx=\"" << num(px(q)) << "\" cy=\"" << num(py(q)) << "\" r=\""
            << num(r * scale) << "\" fill=\"" << color << "\" fill-opacity=\"0.25\" "
            << "stroke=\"" << color << "\"/>\n";
    };
    auto mark = [&](Vec2 q, const char* color, const char* label) {
        out << "  <circle cx=\"" << num(px(q)) << "\" cy=\"" << num(py(q))
            << "\" r=\"4\" fill=\"" << color << "\"/>\n";
        out << "  <text x=\"" << num(px(q) + 6.0) << "\" y=\"" << num(py(q) - 6.0)
            << "\" font-size=\"12\">" << label << "</text>\n";
    };
    disc(scn.q_warden_est, std::max(scn.r_warden, 1.0), "#c0392b");
    disc(scn.q_eaves_est, std::max(scn.r_eaves, 1.0), "#8e44ad");
    auto polyline = [&](int from, int to, const char* color) {
        out << "  <polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"2\" points=\"";
        for (int i = from; i <= to; ++i) {
            const Vec2 q = sol.trajectory.waypoints[static_cast<size_t>(i)];
            if (i > from) out << ' ';
            out << num(px(q)) << ',' << num(py(q));
        }
        out << "\"/>\n";
    };
    polyline(0, scn.n1, "#2980b9");
    polyline(scn.n1, scn.n_total(), "#27ae60");
    mark(scn.q_src, "#2c3e50", "S");
    mark(scn.q_dst, "#2c3e50", "D");
    mark(scn.q_warden_est, "#c0392b", "W");
    mark(scn.q_eaves_est, "#8e44ad", "E");
    mark(scn.q_start, "#7f8c8d", "start");
    mark(scn.q_end, "#7f8c8d", "end");
    out << "</svg>\n";
}

int run_solve(const std::string& scenario_path, const std::string& mode_name,
              const std::string& out_path, const std::string& trace_path,
              const std::string& svg_path, int max_iters, double ben1_alpha) {
    const Scenario scn = load_scenario_arg(scenario_path);
    AoConfig cfg;
    cfg.mode = ao_mode_from_string(mode_name);
    cfg.max_iterations = max_iters;
    cfg.conv_tol = scn.conv_tol;
    cfg.ben1_alpha = ben1_alpha;

    const Solution init = initialize(scn, cfg.mode, cfg.ben1_alpha);
    const auto [sol, trace] = ao_solve(scn, cfg);

    {
        auto out = open_out(out_path);
        write_solution_csv(out, scn, sol, init.csee);
    }
    {
        auto out = open_out(trace_path.empty() ? out_path + ".trace.csv" : trace_path);
        write_trace_csv(out, trace, init.csee, init.alpha);
    }
    if (!svg_path.empty()) {
        auto out = open_out(svg_path);
        write_trajectory_svg(out, scn, sol);
    }

    std::printf("mode=%s csee=%s acsr_lb=%s energy=%s alpha=%s iterations=%d "
                "converged=%s reason=\"%s\"\n",
                mode_name.c_str(), num(sol.csee).c_str(), num(sol.acsr_lb).c_str(),
                num(sol.energy).c_str(), num(sol.alpha).c_str(), sol.iterations,
                trace.converged ? "yes" : "no", trace.stop_reason.c_str());

    const ValidationReport report = validate_solution(scn, sol);
    if (!report.feasible(1e-9)) {
        for (const auto& row : report.rows) {
            if (row.slack < -1e-9)
                std::fprintf(stderr, "constraint violated: %s slot %d slack %s\n",
                             row.name.c_str(), row.slot, num(row.slack).c_str());
        }
        return 1;
    }
    return 0;
}

// ----- sweep ---------------------------------------------------------------

struct SweepPoint {
    AoMode mode;
    double value = 0.0;
};

struct SweepRow {
    std::string mode, param, value;
    std::string csee, acsr_lb, energy, alpha, iterations;
    std::string status;
};

void apply_sweep_param(Scenario& scn, AoConfig& cfg, const std::string& param,
                       double v) {
    if (param == "epsilon_covert") {
        scn.epsilon_covert = v;
    } else if (param == "period") {
        scn.period = v;
    } else if (param == "p_jam_max") {
        scn.p_jam_max = v;
    } else if (param == "r_uncertainty") {
        scn.r_warden = v;
        scn.r_eaves = v;
    } else if (param == "alpha_fixed") {
        cfg.ben1_alpha = v;
    } else {
        throw CliError{1, "unknown sweep parameter: " + param};
    }
}

SweepRow run_sweep_point(const Scenario& base, const std::string& param,
                         const SweepPoint& pt, int max_iters) {
    SweepRow row;
    row.mode = to_string(pt.mode);
    row.param = param;
    row.value = num(pt.value);
    try {
        Scenario scn = base;
        AoConfig cfg;
        cfg.mode = pt.mode;
        cfg.max_iterations = max_iters;
        apply_sweep_param(scn, cfg, param, pt.value);
        validate_scenario(scn);
        cfg.conv_tol = scn.conv_tol;
        const auto [sol, trace] = ao_solve(scn, cfg);
        row.csee = num(sol.csee);
        row.acsr_lb = num(sol.acsr_lb);
        row.energy = num(sol.energy);
        row.alpha = num(sol.alpha);
        row.iterations = std::to_string(sol.iterations);
        row.status = trace.converged ? "ok" : cell(trace.stop_reason);
    } catch (const std::exception& e) {
        row.status = cell(e.what());
    }
    return row;
}

int run_sweep(const std::string& scenario_path, const std::string& param,
              const std::vector<double>& values, const std::string& modes_arg,
              const std::string& out_path, int max_iters, unsigned jobs) {
    const Scenario base = load_scenario_arg(scenario_path);
    if (values.empty()) throw CliError{1, "sweep needs at least one value"};
    bool inc = true, dec = true;
    for (size_t i = 1; i < values.size(); ++i) {
        inc = inc && values[i] > values[i - 1];
        dec = dec && values[i] < values[i - 1];
    }
    if (!inc && !dec) throw CliError{1, "sweep values must be strictly monotone"};

    std::vector<AoMode> modes;
    std::stringstream ss(modes_arg);
    for (std::string tok; std::getline(ss, tok, ',');) {
        if (!tok.empty()) modes.push_back(ao_mode_from_string(tok));
    }
    if (modes.empty()) throw CliError{1, "sweep needs at least one mode"};

    std::vector<SweepPoint> points;
    for (AoMode m : modes)
        for (double v : values) points.push_back({m, v});

    // Points run in a pool; rows land in spec order regardless of finish order.
    std::vector<SweepRow> rows(points.size());
    std::atomic<size_t> cursor{0};
    auto drain = [&] {
        for (size_t i; (i = cursor.fetch_add(1)) < points.size();)
            rows[i] = run_sweep_point(base, param, points[i], max_iters);
    };
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(points.size()));
    std::vector<std::thread> workers;
    for (unsigned t = 1; t < jobs; ++t) workers.emplace_back(drain);
    drain();
    for (auto& t : workers) t.join();

    auto out = open_out(out_path);
    out << "mode,param,value,csee,acsr_lb,energy,alpha,iterations,status\n";
    for (const auto& r : rows) {
        out << r.mode << ',' << r.param << ',' << r.value << ',' << r.csee << ','
            << r.acsr_lb << ',' << r.energy << ',' << r.alpha << ',' << r.iterations
            << ',' << r.status << '\n';
    }
    return 0;
}

// ----- verify --------------------------------------------------------------

struct VerifyCheck {
    std::string name;
    double value = 0.0;      // measured quantity
    double reference = 0.0;  // what it is compared against
    double residual = 0.0;
    double bound = 0.0;
    bool pass = false;
};

int finish_verify(const std::string& suite, const std::vector<VerifyCheck>& checks,
                  const std::string& out_path) {
    auto out = open_out(out_path);
    out << "suite,check,value,reference,residual,bound,pass\n";
    const VerifyCheck* first_fail = nullptr;
    for (const auto& c : checks) {
        out << suite << ',' << cell(c.name) << ',' << num(c.value) << ','
            << num(c.reference) << ',' << num(c.residual) << ',' << num(c.bound) << ','
            << (c.pass ? "pass" : "fail") << '\n';
        if (!c.pass && !first_fail) first_fail = &c;
    }
    if (first_fail) {
        std::fprintf(stderr, "verify %s failed: %s (residual %s, bound %s)\n",
                     suite.c_str(), first_fail->name.c_str(),
                     num(first_fail->residual).c_str(), num(first_fail->bound).c_str());
        return 1;
    }
    std::printf("verify %s: %zu checks passed\n", suite.c_str(), checks.size());
    return 0;
}

int verify_dep(const Scenario& scn, std::uint64_t seed, const std::string& out_path) {
    const Solution init = initialize(scn, AoMode::prop);
    const GainSet gains = gain_set(init.trajectory, scn);
    const DetectorEnv env{init.powers.p_src[0], gains.g_sw_wc, gains.g_rw_wc[0],
                          scn.p_jam_max, scn.noise};
    const ThresholdBreakpoints z = threshold_breakpoints(env);

    std::vector<VerifyCheck> checks;
    auto out = open_out(out_path);
    out << "tau,dep_closed,dep_mc,se,residual,bound,pass\n";
    bool all_pass = true;
    double first_fail_tau = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double tau = 1.2 * z.z3 * i / 99.0;
        const double closed = dep(tau, env);
        CovertMcConfig cfg;
        cfg.samples = 1000000;
        cfg.seed = chunk_seed(seed, static_cast<std::uint64_t>(i));
        const McEstimate mc = mc_dep(tau, env, cfg);
        const double resid = std::abs(closed - mc.value);
        const double bound = 3.0 * mc.se;
        const bool pass = resid <= bound;
        out << num(tau) << ',' << num(closed) << ',' << num(mc.value) << ','
            << num(mc.se) << ',' << num(resid) << ',' << num(bound) << ','
            << (pass ? "pass" : "fail") << '\n';
        if (!pass && all_pass) {
            all_pass = false;
            first_fail_tau = tau;
        }
    }
    if (!all_pass) {
        std::fprintf(stderr, "verify dep failed at tau=%s\n", num(first_fail_tau).c_str());
        return 1;
    }
    std::printf("verify dep: 100 grid points passed\n");
    return 0;
}

int verify_jensen(const Scenario& scn, std::uint64_t seed, const std::string& out_path) {
    std::vector<VerifyCheck> checks;
    Rng rng(seed);
    for (int k = 0; k < 10; ++k) {
        const double p_src = 0.001 + 0.5 * rng.next_double();
        const double g_sr = std::pow(10.0, -9.0 + 3.0 * rng.next_double());
        const double p_jam = 0.5 + 1.5 * rng.next_double();
        // Config 0 pins sic = 0: the bound must be exact there.
        const double sic =
            k == 0 ? 0.0 : std::pow(10.0, -12.0 + 2.0 * rng.next_double());
        const double bound_rate =
            r1_sec_slot(p_src, g_sr, p_jam, sic, scn.noise, scn.bandwidth);
        const McEstimate mc =
            mc_r1_exact(p_src, g_sr, p_jam, sic, scn.noise, scn.bandwidth, 100000,
                        chunk_seed(seed, 100 + static_cast<std::uint64_t>(k)));
        VerifyCheck c;
        c.name = "config_" + std::to_string(k);
        c.value = mc.value;
        c.reference = bound_rate;
        c.residual = bound_rate - mc.value;
        c.bound = k == 0 ? 1e-12 * std::max(1.0, std::abs(bound_rate)) : 3.0 * mc.se;
        c.pass = c.residual <= c.bound;
        checks.push_back(c);
    }
    return finish_verify("jensen", checks, out_path);
}

int verify_energy_bound(const Scenario& scn, const std::string& out_path) {
    std::vector<VerifyCheck> checks;
    for (int i = 0; i <= 1190; ++i) {
        const double v = 0.5 + 0.05 * i;
        const double exact = propulsion_power_exact(v, scn.rotor);
        const double approx = propulsion_power_approx(v, scn.rotor);
        VerifyCheck c;
        c.name = "v_" + num(v);
        c.value = approx;
        c.reference = exact;
        c.residual = exact - approx;  // <= 0 when the surrogate dominates
        c.bound = 0.0;
        c.pass = approx >= exact;
        checks.push_back(c);
    }
    return finish_verify("energy-bound", checks, out_path);
}

// Random but representative: rates of a few bits/s, energies of a few kJ,
// Dinkelbach weights around their ratio.
struct PdsaInstance {
    AlphaEnergyCoeffs energy;
    double rho1 = 0.0, rho2 = 0.0, beta1 = 0.0, beta2 = 0.0, phi = 0.0;
};

PdsaInstance random_pdsa_instance(Rng& rng) {
    PdsaInstance in;
    in.energy.a1 = 1e3 * (0.5 + rng.next_double());
    in.energy.b1 = 1e3 * (0.1 + rng.next_double());
    in.energy.c1 = 1e2 * rng.next_double();
    in.energy.d1 = 1e2 * (0.1 + rng.next_double());
    in.energy.a2 = 1e3 * (0.5 + rng.next_double());
    in.energy.b2 = 1e3 * (0.1 + rng.next_double());
    in.energy.c2 = 1e2 * rng.next_double();
    in.energy.d2 = 1e2 * (0.1 + rng.next_double());
    in.rho1 = 10.0 * rng.next_double();
    in.rho2 = 12.0 * rng.next_double() - 1.0;
    in.beta1 = 0.3 * rng.next_double();
    in.beta2 = 0.3 * rng.next_double();
    in.phi = 1e-3 * (0.1 + rng.next_double());
    return in;
}

int verify_pdsa(std::uint64_t seed, const std::string& out_path) {
    std::vector<VerifyCheck> checks;
    Rng rng(seed);
    for (int k = 0; k < 50; ++k) {
        const PdsaInstance in = random_pdsa_instance(rng);
        const PdsaCoefficients c = pdsa_coeffs_from_parts(in.energy, in.rho1, in.rho2,
                                                          in.beta1, in.beta2, in.phi);
        const auto [alpha, diag] = pdsa_alpha(c, in.energy, in.phi);
        const double obj = pdsa_objective(c, in.energy, in.phi, alpha);
        const double grid_alpha = alpha_grid_oracle(c, in.energy, in.phi, 1e-4);
        const double grid_obj = pdsa_objective(c, in.energy, in.phi, grid_alpha);

        VerifyCheck objc;
        objc.name = "instance_" + std::to_string(k);
        objc.value = obj;
        objc.reference = grid_obj;
        objc.residual = grid_obj - obj;
        objc.bound = 1e-4 * (1.0 + std::abs(grid_obj));
        objc.pass = objc.residual <= objc.bound;
        checks.push_back(objc);

        VerifyCheck kkt;
        kkt.name = "instance_" + std::to_string(k) + "_kkt";
        kkt.value = alpha;
        kkt.reference = 0.0;
        kkt.residual = diag.stationarity_residual;
        kkt.bound = 1e-6 * (1.0 + in.rho1 + std::abs(in.rho2));
        kkt.pass = kkt.residual <= kkt.bound;
        checks.push_back(kkt);
    }
    return finish_verify("pdsa", checks, out_path);
}

int verify_linearization(const Scenario& scn, std::uint64_t seed,
                         const std::string& out_path) {
    const Solution ex = initialize(scn, AoMode::prop);
    const Linearizations lin = linearize_terms(ex, scn);
    const GainSet gains = gain_set(ex.trajectory, scn);
    const SlackSeeds tight = seed_slacks(ex.trajectory, scn);
    const auto& w = ex.trajectory.waypoints;
    const double bw = scn.bandwidth;
    const double s2 = scn.noise;
    const double jden = scn.jam_power_eff() * scn.sic_level + s2;
    const int n1 = scn.n1, n2 = scn.n2, n = scn.n_total();

    std::vector<VerifyCheck> checks;
    auto tangency = [&checks](const std::string& name, double lin_value,
                              double target) {
        VerifyCheck c;
        c.name = "tangency_" + name;
        c.value = lin_value;
        c.reference = target;
        c.residual = std::abs(lin_value - target) / std::max(1.0, std::abs(target));
        c.bound = 1e-9;
        c.pass = c.residual <= c.bound;
        checks.push_back(c);
    };

    double worst_tan_k = 0.0, worst_tan_b = 0.0, worst_tan_c = 0.0;
    double worst_tan_d = 0.0, worst_tan_e = 0.0, worst_tan_f = 0.0;
    auto track = [](double& worst, double lin_value, double target) {
        worst = std::max(worst, std::abs(lin_value - target) /
                                    std::max(1.0, std::abs(target)));
    };
    for (int i = 0; i < n2; ++i) {
        const auto iu = static_cast<size_t>(i);
        const double pl = ex.powers.p_relay[iu];
        track(worst_tan_k, lin.k_const[iu] + lin.k_slope[iu] * pl,
              bw * std::log2(1.0 + pl * gains.g_re_wc[iu] / s2));
        track(worst_tan_d, lin.d_const[iu] + lin.d_slope[iu] * tight.kappa[iu],
              bw * std::log2(tight.kappa[iu] * s2));
        track(worst_tan_e, lin.e_const[iu] + lin.e_slope[iu] * tight.varpi[iu],
              bw * std::log2(tight.varpi[iu] * s2 + pl * scn.beta0));
        const Vec2 q = w[static_cast<size_t>(n1 + 1 + i)];
        const double root = norm(q - scn.q_eaves_est) - scn.r_eaves;
        track(worst_tan_f, lin.f_const[iu], root * root);
    }
    for (int i = 0; i < n; ++i) {
        const auto iu = static_cast<size_t>(i);
        const Vec2 dq = w[iu + 1] - w[iu];
        track(worst_tan_b, lin.b_const[iu], dot(dq, dq));
    }
    for (int i = 0; i < n1; ++i) {
        const auto iu = static_cast<size_t>(i);
        track(worst_tan_c, lin.c_const[iu] + lin.c_slope[iu] * tight.nu[iu],
              bw * std::log2(tight.nu[iu] * jden));
    }
    tangency("K", worst_tan_k, 0.0);
    tangency("B", worst_tan_b, 0.0);
    tangency("C", worst_tan_c, 0.0);
    tangency("D", worst_tan_d, 0.0);
    tangency("E", worst_tan_e, 0.0);
    tangency("F", worst_tan_f, 0.0);

    Rng rng(seed);
    double worst_k = 0.0, worst_b = 0.0, worst_f = 0.0;
    for (int t = 0; t < 10000; ++t) {
        const int j2 = static_cast<int>(rng.next_u64() % static_cast<unsigned>(n2));
        const auto j2u = static_cast<size_t>(j2);
        const double p = scn.p_relay_max * rng.next_double();
        const double target_k = bw * std::log2(1.0 + p * gains.g_re_wc[j2u] / s2);
        const double lin_k = lin.k_const[j2u] + lin.k_slope[j2u] * p;
        worst_k = std::max(worst_k, (target_k - lin_k) / (1.0 + std::abs(target_k)));

        const int leg = static_cast<int>(rng.next_u64() % static_cast<unsigned>(n));
        const auto legu = static_cast<size_t>(leg);
        const Vec2 da{200.0 * (rng.next_double() - 0.5), 200.0 * (rng.next_double() - 0.5)};
        const Vec2 db{200.0 * (rng.next_double() - 0.5), 200.0 * (rng.next_double() - 0.5)};
        const Vec2 qa = w[legu + 1] + da;
        const Vec2 qb = w[legu] + db;
        const double target_b = dot(qa - qb, qa - qb);
        const double lin_b = lin.b_const[legu] + dot(lin.b_grad_a[legu], da) +
                             dot(lin.b_grad_b[legu], db);
        worst_b = std::max(worst_b, (lin_b - target_b) / (1.0 + std::abs(target_b)));

        const Vec2 df{600.0 * (rng.next_double() - 0.5), 600.0 * (rng.next_double() - 0.5)};
        const Vec2 qf = w[static_cast<size_t>(n1 + 1 + j2)] + df;
        const double root = norm(qf - scn.q_eaves_est) - scn.r_eaves;
        const double target_f = root * root;
        const double lin_f = lin.f_const[j2u] + dot(lin.f_grad[j2u], df);
        worst_f = std::max(worst_f, (lin_f - target_f) / (1.0 + std::abs(target_f)));
    }
    auto bound_check = [&checks](const std::string& name, double worst) {
        VerifyCheck c;
        c.name = "bound_" + name;
        c.value = worst;
        c.reference = 0.0;
        c.residual = worst;
        c.bound = 1e-9;
        c.pass = worst <= 1e-9;
        checks.push_back(c);
    };
    bound_check("K_over", worst_k);
    bound_check("B_under", worst_b);
    bound_check("F_under", worst_f);
    return finish_verify("linearization", checks, out_path);
}

int run_verify(const std::string& suite, const std::string& scenario_path,
               std::uint64_t seed, std::string out_path) {
    const Scenario scn = load_scenario_arg(scenario_path);
    if (out_path.empty()) out_path = "verify_" + suite + ".csv";
    if (suite == "dep") return verify_dep(scn, seed, out_path);
    if (suite == "jensen") return verify_jensen(scn, seed, out_path);
    if (suite == "energy-bound") return verify_energy_bound(scn, out_path);
    if (suite == "pdsa") return verify_pdsa(seed, out_path);
    if (suite == "linearization") return verify_linearization(scn, seed, out_path);
    throw CliError{1, "unknown verify suite: " + suite};
}

// ----- oracle-alpha --------------------------------------------------------

int run_oracle_alpha(const std::string& scenario_path, double step, double phi_arg,
                     const std::string& out_path) {
    const Scenario scn = load_scenario_arg(scenario_path);
    const Solution init = initialize(scn, AoMode::prop);
    const double phi = phi_arg >= 0.0 ? phi_arg : init.csee;
    const PdsaCoefficients c = pdsa_coeffs(init.trajectory, init.powers, scn, phi);
    const AlphaEnergyCoeffs energy =
        alpha_energy_coeffs(leg_distances(init.trajectory), scn);

    auto out = open_out(out_path);
    out << "record,alpha,objective\n";
    const double lo = c.beta1, hi = 1.0 - c.beta2;
    for (double a = lo; a <= hi + 1e-15; a += step) {
        const double al = std::min(a, hi);
        out << "grid," << num(al) << ',' << num(pdsa_objective(c, energy, phi, al))
            << '\n';
        if (al >= hi) break;
    }
    const auto [alpha, diag] = pdsa_alpha(c, energy, phi);
    out << "pick," << num(alpha) << ',' << num(pdsa_objective(c, energy, phi, alpha))
        << '\n';
    std::printf("pick alpha=%s case=%s\n", num(alpha).c_str(),
                to_string(diag.case_taken));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"UAV relay covert-and-secure efficiency planner"};
    app.require_subcommand(1);

    std::string scenario_path, trace_path, svg_path;
    std::string solve_out = "solution.csv", sweep_out = "sweep.csv";
    std::string verify_out, oracle_out = "alpha_grid.csv", print_out;
    std::string mode_name = "prop";
    std::string modes_arg = "prop";
    std::string param, suite;
    std::vector<double> values;
    std::uint64_t seed = 2;
    int max_iters = 50;
    unsigned jobs = 0;
    double ben1_alpha = 0.5;
    double step = 1e-3;
    double phi_arg = -1.0;

    auto* solve_cmd = app.add_subcommand("solve", "Run the planner on one scenario");
    solve_cmd->add_option("--scenario", scenario_path, "Scenario file")->required();
    solve_cmd->add_option("--mode", mode_name, "prop|ben1|ben2");
    solve_cmd->add_option("--out", solve_out, "Solution CSV path");
    solve_cmd->add_option("--trace", trace_path, "Trace CSV path (default <out>.trace.csv)");
    solve_cmd->add_option("--svg", svg_path, "Optional trajectory SVG path");
    solve_cmd->add_option("--max-iters", max_iters, "Outer iteration cap");
    solve_cmd->add_option("--alpha", ben1_alpha, "Fixed switching factor for ben1");

    auto* sweep_cmd = app.add_subcommand("sweep", "Parameter sweep over repeated solves");
    sweep_cmd->add_option("--scenario", scenario_path, "Scenario file")->required();
    sweep_cmd->add_option("--param", param,
                          "epsilon_covert|period|p_jam_max|r_uncertainty|alpha_fixed")
        ->required();
    sweep_cmd->add_option("--values", values, "Comma-separated sweep values")
        ->required()
        ->delimiter(',');
    sweep_cmd->add_option("--mode", modes_arg, "Comma-separated mode subset");
    sweep_cmd->add_option("--out", sweep_out, "Sweep CSV path");
    sweep_cmd->add_option("--seed", seed, "Run seed (recorded for reproducibility)");
    sweep_cmd->add_option("--max-iters", max_iters, "Outer iteration cap per point");
    sweep_cmd->add_option("--jobs", jobs, "Worker threads (0 = hardware)");

    auto* verify_cmd = app.add_subcommand("verify", "Run an oracle verification suite");
    verify_cmd->add_option("--suite", suite, "dep|jensen|energy-bound|pdsa|linearization")
        ->required();
    verify_cmd->add_option("--scenario", scenario_path, "Scenario file (default built-in)");
    verify_cmd->add_option("--seed", seed, "Oracle RNG seed");
    verify_cmd->add_option("--out", verify_out, "Report CSV path");

    auto* oracle_cmd =
        app.add_subcommand("oracle-alpha", "Dump the switching-factor objective grid");
    oracle_cmd->add_option("--scenario", scenario_path, "Scenario file (default built-in)");
    oracle_cmd->add_option("--step", step, "Grid step");
    oracle_cmd->add_option("--phi", phi_arg, "Dinkelbach weight (default: initial efficiency)");
    oracle_cmd->add_option("--out", oracle_out, "Grid CSV path");

    auto* scn_cmd = app.add_subcommand("scenario", "Scenario utilities");
    auto* print_cmd = scn_cmd->add_subcommand("print-default", "Print the built-in scenario");
    print_cmd->add_option("--out", print_out, "Write to a file instead of stdout");
    scn_cmd->require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed())
            return run_solve(scenario_path, mode_name, solve_out, trace_path, svg_path,
                             max_iters, ben1_alpha);
        if (sweep_cmd->parsed())
            return run_sweep(scenario_path, param, values, modes_arg, sweep_out,
                             max_iters, jobs);
        if (verify_cmd->parsed()) return run_verify(suite, scenario_path, seed, verify_out);
        if (oracle_cmd->parsed())
            return run_oracle_alpha(scenario_path, step, phi_arg, oracle_out);
        if (print_cmd->parsed()) {
            const std::string text = serialize_scenario(default_scenario());
            if (print_out.empty()) {
                std::fputs(text.c_str(), stdout);
            } else {
                auto out = open_out(print_out);
                out << text;
            }
            return 0;
        }
    } catch (const CliError& e) {
        std::fprintf(stderr, "%s\n", e.message.c_str());
        return e.code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    }
    return 0;
}
