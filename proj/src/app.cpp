#include "borel/app.hpp"

#include "borel/formal.hpp"
#include "borel/harry_dym.hpp"
#include "borel/oracle.hpp"
#include "borel/problem_io.hpp"
#include "borel/transforms.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace borel {

namespace {

using Json = nlohmann::ordered_json;
using Overrides = std::map<std::string, std::string>;

const std::vector<std::string> kSolverKeys = {"nu",        "max_iters", "tol",    "ball_factor",
                                              "time_quad_order", "epsilon_guard", "grid_nodes", "p_max",
                                              "time_nodes", "theta"};

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json cplx_json(cplx z) { return Json::array({num(z.real()), num(z.imag())}); }

double to_num(const std::string& key, const std::string& v) {
    char* end = nullptr;
    double d = std::strtod(v.c_str(), &end);
    if (v.empty() || *end != '\0') throw InvalidProblem("--set " + key + ": not a number: " + v);
    return d;
}

int to_int(const std::string& key, const std::string& v) {
    double d = to_num(key, v);
    if (d != std::floor(d)) throw InvalidProblem("--set " + key + ": not an integer: " + v);
    return static_cast<int>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "on") return true;
    if (v == "0" || v == "false" || v == "off") return false;
    throw InvalidProblem("--set " + key + ": not a boolean: " + v);
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_num(key, item));
    if (out.empty()) throw InvalidProblem("--set " + key + ": empty list");
    return out;
}

double get(const Overrides& o, const std::string& key, double def) {
    auto it = o.find(key);
    return it == o.end() ? def : to_num(key, it->second);
}

int get_int(const Overrides& o, const std::string& key, int def) {
    auto it = o.find(key);
    return it == o.end() ? def : to_int(key, it->second);
}

std::vector<double> get_list(const Overrides& o, const std::string& key, std::vector<double> def) {
    auto it = o.find(key);
    return it == o.end() ? def : to_list(key, it->second);
}

/// Collects artifacts in write order; the manifest is derived from them.
class Output {
public:
    explicit Output(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    void write(const std::string& name, const std::string& content) {
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
        f << content;
        files_.emplace_back(name, content);
    }

    void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

    const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

private:
    std::filesystem::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

Json estimate_json(const ContractionEstimate& e) {
    Json terms = Json::array();
    for (const auto& t : e.terms) terms.push_back({{"label", t.label}, {"power", t.power}, {"kappa", num(t.kappa)}});
    return {{"nu", num(e.nu)},
            {"F0_norm", num(e.F0_norm)},
            {"ball_sum", num(e.ball_sum)},
            {"ball_margin", num(e.ball_margin)},
            {"lipschitz", num(e.lipschitz)},
            {"contract_margin", num(e.contract_margin)},
            {"ball_ok", e.ball_ok},
            {"contract_ok", e.contract_ok},
            {"terms", terms}};
}

Json report_json(const SolveReport& r) {
    auto arr = [](const std::vector<double>& v) {
        Json a = Json::array();
        for (double x : v) a.push_back(num(x));
        return a;
    };
    return {{"converged", r.converged},
            {"iters", r.iters},
            {"nu", num(r.nu)},
            {"theta", num(r.theta)},
            {"norms", arr(r.norms)},
            {"diffs", arr(r.diffs)},
            {"contraction_ratios", arr(r.contraction_ratios)},
            {"ball_ok", r.ball_ok},
            {"contract_ok", r.contract_ok},
            {"residual", num(r.residual)},
            {"epsilon_ok", r.epsilon_ok},
            {"max_abs_f", num(r.max_abs_f)},
            {"warnings", r.warnings},
            {"estimate", estimate_json(r.estimate)}};
}

Json config_json(const SolveConfig& c) {
    return {{"nu", num(c.nu)},
            {"max_iters", c.max_iters},
            {"tol", num(c.tol)},
            {"ball_factor", num(c.ball_factor)},
            {"time_quad_order", c.time_quad_order},
            {"epsilon_guard", c.epsilon_guard},
            {"grid_nodes", c.grid_nodes},
            {"p_max", num(c.p_max)},
            {"time_nodes", c.time_nodes},
            {"theta", c.theta ? num(*c.theta) : Json(nullptr)}};
}

Json rationals(const std::vector<Rational>& v) {
    Json a = Json::array();
    for (const auto& r : v) a.push_back(to_string(r));
    return a;
}

Json alpha_json(const std::map<std::string, std::vector<Rational>>& table) {
    Json j = Json::object();
    for (const auto& [k, v] : table) j[k] = rationals(v);
    return j;
}

void require_convergence(const SolveReport& r) {
    if (!r.converged)
        throw NumericalFailure("Picard iteration did not converge in " + std::to_string(r.iters) + " iterations");
}

/// Solution on the ray plus the effective configuration.
struct Solved {
    Solution sol;
    SolveConfig config;
};

Solved solve_with(const PDEProblem& p, const Overrides& o) {
    Solved s;
    s.config = solve_config_from(o);
    s.sol = solve(p, s.config);
    return s;
}

// ---- commands --------------------------------------------------------------

std::string cmd_check(const ParsedProblem& pp, Output& out, int& code) {
    const auto& p = pp.problem;
    auto violations = validate_constraint(p);
    auto cone = check_cone_condition(p.symbol, p.sector.phi);
    Json jv = Json::array();
    for (const auto& v : violations) jv.push_back({{"term", v.term}, {"weight", v.weight}, {"message", v.message}});
    Json j = {{"name", p.name},
              {"d", p.d},
              {"n", p.n},
              {"m", p.m},
              {"terms", p.terms.size()},
              {"from_raw", pp.from_raw},
              {"constraint_ok", violations.empty()},
              {"violations", jv},
              {"cone", {{"ok", cone.ok}, {"C", num(cone.C)}, {"R", num(cone.R)},
                        {"worst_ray", num(cone.worst_ray)}, {"worst_component", cone.worst_component},
                        {"message", cone.message}}},
              {"alpha_r", to_string(p.alpha_r)},
              {"alpha_q", alpha_json(p.alpha_q)}};
    std::string scaled_msg;
    if (p.setting) {
        Json s;
        try {
            auto margins = check_scaled_setting(p);
            Json jm = Json::object();
            for (const auto& [k, v] : margins) jm[k] = to_string(v);
            s = {{"ok", true}, {"margins", jm}};
            if (auto w = setting2_omega(p)) s["omega"] = to_string(*w);
        } catch (const InvalidProblem& e) {
            s = {{"ok", false}, {"message", e.what()}};
            scaled_msg = e.what();
        }
        j["scaled_setting"] = s;
    }
    out.write_json("check.json", j);

    std::ostringstream sum;
    sum << "problem " << p.name << ": n = " << p.n << ", m = " << p.m << ", " << p.terms.size() << " terms\n";
    if (violations.empty()) {
        sum << "constraint: ok\n";
    } else {
        for (const auto& v : violations) sum << "constraint violation: " << v.term << ": " << v.message << '\n';
    }
    sum << "cone condition: " << (cone.ok ? "ok" : "FAILED") << " (C = " << fmt(cone.C) << ", R = " << fmt(cone.R)
        << ")\n";
    if (p.setting) sum << "scaled setting: " << (scaled_msg.empty() ? "ok" : scaled_msg) << '\n';
    if (!violations.empty() || !cone.ok || !scaled_msg.empty()) code = 1;
    return sum.str();
}

std::string cmd_normalize(const ParsedProblem& pp, Output& out) {
    std::ostringstream s;
    write_problem(s, pp.problem);
    out.write("normalized.prob", s.str());
    std::ostringstream sum;
    sum << "normalized " << (pp.from_raw ? "raw equation" : "problem") << " to m = " << pp.problem.m << " with "
        << pp.problem.terms.size() << " terms\n";
    return sum.str();
}

std::string cmd_series(const ParsedProblem& pp, const Overrides& o, Output& out) {
    int K = get_int(o, "K", 6);
    int kt = get_int(o, "kt", 4);
    auto r = formal_series_solve(pp.problem, K, kt);
    std::ostringstream txt;
    for (std::size_t c = 0; c < r.components.size(); ++c)
        txt << "# component " << c << '\n' << serialize(r.components[c]);
    out.write("series.txt", txt.str());
    out.write_json("series.json", {{"requested", r.requested},
                                   {"achieved", r.achieved},
                                   {"complete", r.complete},
                                   {"kt", kt},
                                   {"exponents", rationals(r.exponents)},
                                   {"note", r.note}});
    std::ostringstream sum;
    sum << "formal series: " << r.achieved << " of " << r.requested << " orders"
        << (r.complete ? " (complete)" : "") << '\n';
    if (!r.note.empty()) sum << r.note << '\n';
    return sum.str();
}

std::string cmd_solve(const ParsedProblem& pp, const Overrides& o, Output& out) {
    auto s = solve_with(pp.problem, o);
    out.write("solve_report.json", solve_report_json(s.sol.report, s.config));
    std::ostringstream csv;
    for (std::size_t c = 0; c < s.sol.F.size(); ++c) write_csv(csv, s.sol.F[c], "F" + std::to_string(c));
    out.write("borel_F.csv", csv.str());
    require_convergence(s.sol.report);
    std::ostringstream sum;
    const auto& r = s.sol.report;
    sum << "converged in " << r.iters << " iterations, nu = " << fmt(r.nu) << ", residual = " << fmt(r.residual)
        << '\n';
    for (const auto& w : r.warnings) sum << "warning: " << w << '\n';
    return sum.str();
}

std::string cmd_resum(const ParsedProblem& pp, const Overrides& o, Output& out) {
    auto s = solve_with(pp.problem, o);
    require_convergence(s.sol.report);
    auto xs = get_list(o, "x", {5, 10, 20});
    auto ts = get_list(o, "t", {0.25 * pp.problem.horizon, 0.5 * pp.problem.horizon, pp.problem.horizon});
    double arg = get(o, "x_arg", 0.0);
    for (double t : ts)
        if (t < 0 || t > pp.problem.horizon) throw InvalidProblem("resum time outside [0, horizon]: " + fmt(t));
    std::ostringstream csv;
    csv << "component,x,x_arg,t,re,im,tail_estimate\n";
    for (std::size_t c = 0; c < s.sol.F.size(); ++c)
        for (double t : ts)
            for (double x : xs) {
                auto r = laplace_ray_at(s.sol.F[c], std::polar(x, arg), t);
                csv << c << ',' << fmt(x) << ',' << fmt(arg) << ',' << fmt(t) << ',' << fmt(r.value.real()) << ','
                    << fmt(r.value.imag()) << ',' << fmt(r.tail_estimate) << '\n';
            }
    out.write("resum.csv", csv.str());
    std::ostringstream sum;
    sum << "resummed " << s.sol.F.size() * xs.size() * ts.size() << " values\n";
    return sum.str();
}

std::string cmd_accelerate(const ParsedProblem& pp, const Overrides& o, Output& out, int& code) {
    if (!o.count("certificate_nu"))
        throw InvalidProblem(
            "acceleration refused: no exponential growth certificate (pass --set certificate_nu=<nu>)");
    double nu = get(o, "certificate_nu", 0.0);
    if (!(nu >= 0.0)) throw InvalidProblem("certificate_nu must be non-negative");
    auto s = solve_with(pp.problem, o);
    require_convergence(s.sol.report);
    AccelerationSpec spec;
    spec.n = get_int(o, "n", pp.problem.n);
    if (spec.n < 2) throw InvalidProblem("acceleration needs n >= 2");
    auto p_grid = get_list(o, "p", {0.25, 0.5, 1, 2});
    auto check_x = get_list(o, "check_x", {2, 4, 8});
    int it = static_cast<int>(s.sol.F[0].nt()) - 1;
    auto r = accelerate(s.sol.F[0], it, nu, p_grid, check_x, spec);
    std::ostringstream csv;
    csv << "p,re,im,kernel_error\n";
    for (std::size_t i = 0; i < r.p.size(); ++i)
        csv << fmt(r.p[i]) << ',' << fmt(r.g1[i].real()) << ',' << fmt(r.g1[i].imag()) << ','
            << fmt(r.kernel_error[i]) << '\n';
    out.write("accelerate.csv", csv.str());
    Json rows = Json::array();
    double worst = 0.0;
    bool finite = std::isfinite(r.kernel_error_max);
    for (const auto& row : r.identity_check) {
        double diff = std::abs(row.lhs - row.rhs);
        if (!std::isfinite(diff)) finite = false;
        else worst = std::max(worst, diff);
        rows.push_back({{"x", num(row.x)}, {"lhs", cplx_json(row.lhs)}, {"rhs", cplx_json(row.rhs)}, {"diff", num(diff)}});
    }
    out.write_json("identity.json", {{"n", spec.n},
                                     {"t", num(s.sol.F[0].times()[it])},
                                     {"certificate_nu", num(nu)},
                                     {"kernel_error_max", num(r.kernel_error_max)},
                                     {"max_identity_diff", num(worst)},
                                     {"all_finite", finite},
                                     {"rows", rows}});
    std::ostringstream sum;
    sum << "accelerated at " << r.p.size() << " points (n = " << spec.n << "), identity max diff " << fmt(worst)
        << '\n';
    if (!finite) {
        sum << "some points lie outside the range where the growth certificate makes the kernel integral converge\n";
        code = 2;
    }
    return sum.str();
}

bool same_series(const RamifiedSeries& a, const RamifiedSeries& b, double tol) {
    std::set<Rational> keys;
    for (const auto& [e, c] : a.terms()) keys.insert(e);
    for (const auto& [e, c] : b.terms()) keys.insert(e);
    for (const auto& e : keys) {
        TPoly ca = a.terms().count(e) ? a.terms().at(e) : TPoly{};
        TPoly cb = b.terms().count(e) ? b.terms().at(e) : TPoly{};
        if (!tpoly_is_zero(tpoly_add(ca, tpoly_scale(cb, -1.0)), tol)) return false;
    }
    return true;
}

void require_harry_dym(const PDEProblem& p, const PDEProblem& ref, int N) {
    auto fail = [&](const std::string& what) {
        throw InvalidProblem("problem is not the Harry-Dym f-equation for N = " + std::to_string(N) + ": " + what);
    };
    if (p.n != ref.n || p.m != ref.m || p.d != ref.d) fail("dimensions differ");
    if (p.terms.size() != ref.terms.size()) fail("term count differs");
    std::map<std::pair<int, std::string>, const NonlinearTerm*> by_label;
    for (const auto& t : ref.terms) by_label[{t.component, t.label()}] = &t;
    for (const auto& t : p.terms) {
        auto it = by_label.find({t.component, t.label()});
        if (it == by_label.end()) fail("unexpected term " + t.label());
        if (!same_series(t.coeff, it->second->coeff, 1e-12)) fail("coefficient of " + t.label() + " differs");
    }
    if (!same_series(p.forcing.at(0), ref.forcing.at(0), 1e-12)) fail("forcing differs");
    if (!p.setting) fail("missing [setting]");
}

std::string cmd_harry_dym(const ParsedProblem& pp, const Overrides& o, Output& out, int& code) {
    int N = get_int(o, "N", 3);
    if (N < 1 || N > 12) throw InvalidProblem("N must lie in 1..12");
    const auto& p = pp.problem;
    auto ref = harry_dym_problem(N, p.sector.phi);
    require_harry_dym(p, ref, N);

    int n_struct = std::max(N, 6);
    auto coeffs = harry_dym_series(n_struct);
    Json series = Json::array();
    bool structure_all = true;
    for (int n = 0; n <= n_struct; ++n) {
        std::string bad;
        bool ok = harry_dym_structure_ok(coeffs.H_exact[n], n, &bad);
        structure_all = structure_all && ok;
        series.push_back({{"n", n}, {"H", coeffs.H_exact[n].to_string({"z"})}, {"structure_ok", ok},
                          {"offending", bad}});
    }
    Json residuals = Json::array();
    bool residual_all = true;
    for (int k = 1; k <= N; ++k) {
        auto r = harry_dym_residual(k);
        bool ok = r.structure_ok && r.lowest_degree == k + 1 && r.highest_degree <= 4 * k + 1;
        residual_all = residual_all && ok;
        residuals.push_back({{"N", k}, {"lowest_degree", r.lowest_degree}, {"highest_degree", r.highest_degree},
                             {"structure_ok", r.structure_ok}, {"offending", r.offending}});
    }

    Json j = {{"N", N},
              {"series", series},
              {"structure_ok", structure_all},
              {"residuals", residuals},
              {"residual_ok", residual_all},
              {"alpha_q", alpha_json(p.alpha_q)},
              {"alpha_matches_derived", p.alpha_q == derive_alpha_table(ref)}};

    std::ostringstream sum;
    sum << "Harry-Dym N = " << N << ": structure " << (structure_all ? "ok" : "FAILED") << " for n <= " << n_struct
        << ", residual degrees " << (residual_all ? "ok" : "FAILED") << '\n';

    bool scaled_ok = true;
    if (get_int(o, "scaled", 1) != 0) {
        SolveConfig base;
        base.grid_nodes = 256;
        base.time_nodes = 12;
        auto cfg = solve_config_from(o, base);
        double T = get(o, "T", 0.1);
        auto zeta = get_list(o, "zeta", {4, 5, 6, 8, 10, 12, 16});
        auto hs = harry_dym_scaled(N, T, zeta, cfg, get_int(o, "theta_degree", 3));
        std::ostringstream csv;
        csv << "zeta,G0_numeric,G0_ode,diff\n";
        for (std::size_t i = 0; i < hs.zeta.size(); ++i)
            csv << fmt(hs.zeta[i]) << ',' << fmt(hs.G0_numeric[i]) << ',' << fmt(hs.G0_ode[i]) << ','
                << fmt(hs.G0_numeric[i] - hs.G0_ode[i]) << '\n';
        out.write("g0.csv", csv.str());
        Json reports = Json::array();
        for (const auto& r : hs.theta.reports) reports.push_back({{"converged", r.converged}, {"iters", r.iters},
                                                                  {"nu", num(r.nu)}, {"residual", num(r.residual)}});
        j["scaled"] = {{"T", num(T)},
                       {"zeta", hs.zeta},
                       {"theta_nodes", hs.theta.theta_nodes},
                       {"theta_fit_residual", num(hs.theta.fit_residual)},
                       {"f_exponent_fit", num(hs.f_exponent_fit)},
                       {"f_exponent_expected", to_string(hs.f_exponent_expected)},
                       {"exponents", rationals(hs.exponents)},
                       {"lattice_7k_minus_1", hs.lattice_7k_minus_1},
                       {"lattice_7k_plus_1", hs.lattice_7k_plus_1},
                       {"G0_max_diff", num(hs.G0_max_diff)},
                       {"sector_z", num(hs.sector_z)},
                       {"sector_z_limit", num(hs.sector_z_limit)},
                       {"solves", reports}};
        scaled_ok = hs.lattice_7k_minus_1;
        sum << "scaled exponents:";
        for (const auto& e : hs.exponents) sum << ' ' << to_string(e);
        sum << "\nlattice (7k-1)/9: " << (hs.lattice_7k_minus_1 ? "yes" : "no")
            << ", lattice (7k+1)/9: " << (hs.lattice_7k_plus_1 ? "yes" : "no") << '\n'
            << "G0 against its ODE: max diff " << fmt(hs.G0_max_diff) << '\n'
            << "|arg z| bound " << fmt(hs.sector_z) << " (limit " << fmt(hs.sector_z_limit) << ")\n";
    }
    out.write_json("harry_dym.json", j);
    if (!structure_all || !residual_all || !scaled_ok) code = 2;
    return sum.str();
}

std::string cmd_oracle(const ParsedProblem& pp, const Overrides& o, Output& out, int& code) {
    const auto& p = pp.problem;
    auto s = solve_with(p, o);
    require_convergence(s.sol.report);
    OracleConfig oc;
    oc.x_min = get(o, "x_min", oc.x_min);
    oc.x_max = get(o, "x_max", oc.x_max);
    oc.h = get(o, "h", oc.h);
    oc.dt = get(o, "dt", oc.dt);
    oc.t_end = get(o, "t_end", std::min(1.0, p.horizon));
    oc.richardson = get_int(o, "richardson", 1) != 0;
    double lo = get(o, "window_lo", 5.0), hi = get(o, "window_hi", 20.0);
    double tol = get(o, "oracle_tol", 1e-5);
    int stride = get_int(o, "stride", 10);
    if (stride < 1) throw InvalidProblem("stride must be positive");
    if (oc.x_min <= p.sector.rho) throw InvalidProblem("oracle x_min must exceed rho");
    if (lo < oc.x_min || hi > oc.x_max || lo >= hi) throw InvalidProblem("comparison window outside [x_min, x_max]");

    auto res = oracle_integrate(p, oc, borel_boundary(s.sol.F[0], oc));
    std::ostringstream csv;
    csv << "x,t,borel_re,borel_im,oracle_re,oracle_im,abs_diff\n";
    double worst = 0.0, fmax = 0.0;
    for (std::size_t k = 0; k < res.times.size(); ++k)
        for (std::size_t i = 0; i < res.x.size(); ++i) {
            double x = res.x[i];
            if (x < lo - 1e-9 || x > hi + 1e-9 || i % stride != 0) continue;
            cplx fb = laplace_ray_at(s.sol.F[0], x, res.times[k]).value;
            cplx fo = res.values[k][i];
            double d = std::abs(fb - fo);
            worst = std::max(worst, d);
            fmax = std::max(fmax, std::abs(fb));
            csv << fmt(x) << ',' << fmt(res.times[k]) << ',' << fmt(fb.real()) << ',' << fmt(fb.imag()) << ','
                << fmt(fo.real()) << ',' << fmt(fo.imag()) << ',' << fmt(d) << '\n';
        }
    out.write("oracle_compare.csv", csv.str());
    bool ok = worst <= tol;
    out.write_json("oracle_compare.json", {{"window", {lo, hi}},
                                           {"times", res.times},
                                           {"h", num(oc.h)},
                                           {"dt", num(oc.dt)},
                                           {"richardson", oc.richardson},
                                           {"stride", stride},
                                           {"steps", res.steps},
                                           {"max_abs_diff", num(worst)},
                                           {"max_abs_f", num(fmax)},
                                           {"tolerance", num(tol)},
                                           {"agree", ok}});
    if (!ok) code = 2;
    std::ostringstream sum;
    sum << "oracle vs Borel on [" << fmt(lo) << ", " << fmt(hi) << "]: max diff " << fmt(worst) << " (tolerance "
        << fmt(tol) << ") " << (ok ? "agree" : "DISAGREE") << '\n';
    return sum.str();
}

}  // namespace

const std::vector<std::string>& run_commands() {
    static const std::vector<std::string> c = {"check", "normalize", "series", "solve-borel",
                                               "resum", "accelerate", "harry-dym", "oracle-compare"};
    return c;
}

std::vector<std::string> override_keys(const std::string& command) {
    std::vector<std::string> k;
    if (command == "series") return {"K", "kt"};
    if (command == "check" || command == "normalize") return {};
    k = kSolverKeys;
    if (command == "resum") k.insert(k.end(), {"x", "t", "x_arg"});
    if (command == "accelerate") k.insert(k.end(), {"certificate_nu", "n", "p", "check_x"});
    if (command == "harry-dym") k.insert(k.end(), {"N", "T", "zeta", "theta_degree", "scaled"});
    if (command == "oracle-compare")
        k.insert(k.end(), {"x_min", "x_max", "h", "dt", "t_end", "richardson", "window_lo", "window_hi", "oracle_tol", "stride"});
    return k;
}

SolveConfig solve_config_from(const Overrides& o, const SolveConfig& base) {
    SolveConfig c = base;
    c.nu = get(o, "nu", c.nu);
    c.max_iters = get_int(o, "max_iters", c.max_iters);
    c.tol = get(o, "tol", c.tol);
    c.ball_factor = get(o, "ball_factor", c.ball_factor);
    c.time_quad_order = get_int(o, "time_quad_order", c.time_quad_order);
    if (auto it = o.find("epsilon_guard"); it != o.end()) c.epsilon_guard = to_bool(it->first, it->second);
    c.grid_nodes = get_int(o, "grid_nodes", c.grid_nodes);
    c.p_max = get(o, "p_max", c.p_max);
    c.time_nodes = get_int(o, "time_nodes", c.time_nodes);
    if (o.count("theta")) c.theta = get(o, "theta", 0.0);
    if (c.grid_nodes < 16 || c.time_nodes < 2 || c.max_iters < 1 || !(c.p_max > 0))
        throw InvalidProblem("solver settings out of range");
    return c;
}

std::string solve_report_json(const SolveReport& report, const SolveConfig& config) {
    Json j = {{"report", report_json(report)}, {"config", config_json(config)}};
    return j.dump(2) + "\n";
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned int i = 0; i < len; ++i) {
        s += hex[md[i] >> 4];
        s += hex[md[i] & 15];
    }
    return s;
}

int threads_from_env() {
    const char* v = std::getenv("BORELSUM_THREADS");
    if (!v || !*v) return 1;
    char* end = nullptr;
    long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1 || n > 256) throw InvalidProblem(std::string("BORELSUM_THREADS invalid: ") + v);
    return static_cast<int>(n);
}

RunResult run(const RunConfig& config) {
    RunResult result;
    const auto& cmds = run_commands();
    if (std::find(cmds.begin(), cmds.end(), config.command) == cmds.end()) {
        result.exit_code = 1;
        result.summary = "unknown command: " + config.command + "\n";
        return result;
    }
    std::optional<Output> out;
    try {
        out.emplace(config.output_dir);
    } catch (const std::exception& e) {
        result.exit_code = 1;
        result.summary = std::string("cannot create output directory: ") + e.what() + "\n";
        return result;
    }

    int threads = 1;
    std::string summary = "command: " + config.command + "\n";
    try {
        threads = threads_from_env();
        set_thread_count(threads);
        auto keys = override_keys(config.command);
        for (const auto& [k, v] : config.overrides)
            if (std::find(keys.begin(), keys.end(), k) == keys.end())
                throw InvalidProblem("unknown --set key for " + config.command + ": " + k);
        auto pp = parse_problem(config.problem_path);
        int code = 0;
        const auto& c = config.command;
        const auto& o = config.overrides;
        if (c == "check") summary += cmd_check(pp, *out, code);
        else if (c == "normalize") summary += cmd_normalize(pp, *out);
        else if (c == "series") summary += cmd_series(pp, o, *out);
        else if (c == "solve-borel") summary += cmd_solve(pp, o, *out);
        else if (c == "resum") summary += cmd_resum(pp, o, *out);
        else if (c == "accelerate") summary += cmd_accelerate(pp, o, *out, code);
        else if (c == "harry-dym") summary += cmd_harry_dym(pp, o, *out, code);
        else summary += cmd_oracle(pp, o, *out, code);
        result.exit_code = code;
    } catch (const InvalidProblem& e) {
        result.exit_code = 1;
        summary += std::string("error: ") + e.what() + "\n";
    } catch (const NumericalFailure& e) {
        result.exit_code = 2;
        summary += std::string("numerical failure: ") + e.what() + "\n";
    } catch (const std::exception& e) {
        result.exit_code = 2;
        summary += std::string("failure: ") + e.what() + "\n";
    }
    summary += "exit code: " + std::to_string(result.exit_code) + "\n";

    try {
        out->write("summary.txt", summary);
        Json files = Json::array();
        for (const auto& [name, content] : out->files())
            files.push_back({{"name", name}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
        Json manifest = {{"command", config.command},
                         {"problem", std::filesystem::path(config.problem_path).filename().string()},
                         {"overrides", config.overrides},
                         {"threads", threads},
                         {"exit_code", result.exit_code},
                         {"files", files}};
        out->write_json("manifest.json", manifest);
        for (const auto& f : out->files()) result.artifacts.push_back(f.first);
    } catch (const std::exception& e) {
        summary += std::string("cannot write artifacts: ") + e.what() + "\n";
        if (result.exit_code == 0) result.exit_code = 2;
    }
    result.summary = summary;
    return result;
}

}  // namespace borel
