// smelab: command-line driver for the radial, solver, continuation and analysis modules.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "smelab/config.hpp"
#include "smelab/continuation.hpp"
#include "smelab/corpus.hpp"
#include "smelab/errors.hpp"
#include "smelab/io.hpp"
#include "smelab/operators.hpp"
#include "smelab/radial.hpp"
#include "smelab/solver.hpp"

using nlohmann::json;
using namespace sme;
namespace fs = std::filesystem;

namespace {

constexpr int kUsage = 1;
constexpr int kNumerical = 2;

struct Run {
    Config cfg;
    fs::path out;
    std::string hash;
    std::uint64_t seed = 0;
    Params params;
};

Run prepare(const Config& cfg, int default_n) {
    Run r;
    r.cfg = cfg;
    r.out = cfg.get("out", "smelab_out");
    r.hash = cfg.hash_hex();
    r.seed = std::uint64_t(cfg.get_int("seed", 12345));
    r.params = Params(cfg.get_int("m", 2), cfg.get_int("n", default_n));
    fs::create_directories(r.out);
    return r;
}

json header(const Run& r, const std::string& command) {
    return {{"command", command},
            {"config_hash", r.hash},
            {"seed", r.seed},
            {"m", r.params.m},
            {"n", r.params.n},
            {"config", r.cfg.entries()}};
}

std::vector<std::string> csv_meta(const Run& r) {
    return {"config_hash: " + r.hash, "seed: " + std::to_string(r.seed)};
}

std::string csv_preamble(const Run& r) {
    std::string s;
    for (const auto& line : csv_meta(r)) s += "# " + line + "\n";
    return s;
}

void write_json(const Run& r, const std::string& name, const json& j) {
    write_text((r.out / name).string(), j.dump(2) + "\n");
}

// Wall-clock data lives in its own file so the result files stay bit-identical across runs.
void write_run_meta(const Run& r, const std::string& command, double seconds) {
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    write_json(r, "run_meta.json",
               {{"command", command}, {"config_hash", r.hash}, {"timestamp", stamp}, {"wall_seconds", seconds}});
}

void write_plot_stub(const Run& r, const std::string& body) {
    write_text((r.out / "plot.gp").string(), "# gnuplot script stub; run `gnuplot plot.gp` inside this directory\n"
                                             "# config_hash: " + r.hash + "\n"
                                             "set datafile separator ','\nset key autotitle columnhead\n" + body);
}

GridPtr grid_from(const Config& cfg, const std::string& default_domain, double default_h) {
    return Grid2D::make(Domain::parse(cfg.get("grid.domain", default_domain)), cfg.get_double("grid.h", default_h));
}

json outcome_json(const SolveOutcome& o) {
    return {{"converged", o.converged},
            {"iterations", o.iterations},
            {"newton_iterations", o.newton_iterations},
            {"residual", o.residual},
            {"residual_kind", o.residual_kind},
            {"divergence_residual", o.divergence_residual},
            {"picard_residual", o.picard_residual},
            {"last_increment", o.last_increment},
            {"min_u", o.min_u},
            {"max_grad", o.max_grad},
            {"floor_active", o.floor_active},
            {"floor_clamped", o.floor_clamped},
            {"newton_fallback", o.newton_fallback},
            {"history", o.history},
            {"newton_history", o.newton_history}};
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) v.push_back(parse_real(tok));
    return v;
}

// ---------------------------------------------------------------- radial

int cmd_radial(const Config& cfg) {
    Run r = prepare(cfg, 2);
    const Params& p = r.params;
    json j = header(r, "radial");
    RadialProfile prof;
    if (p.n == 1) {
        const double xmax = cfg.get_double("radial.xmax", 2.0);
        prof = integrate_n1(p, xmax, cfg.get_double("radial.step", 1e-3), cfg.get_double("radial.slope_cap", 1e6));
        double drift = 0.0, cosh_err = 0.0;
        for (std::size_t i = 0; i < prof.size(); ++i) {
            drift = std::max(drift, std::abs(conserved_quantity(p, prof.u[i], prof.s[i]) - 1.0));
            if (p.m == 2) cosh_err = std::max(cosh_err, std::abs(prof.u[i] - std::cosh(prof.r[i])));
        }
        j["x_end"] = prof.stop_x;
        j["hit_slope_cap"] = prof.hit_slope_cap;
        j["conserved_drift"] = drift;
        if (p.m == 2) j["cosh_max_error"] = cosh_err;
    } else {
        const double rmax = cfg.get_double("radial.rmax", 50.0);
        prof = integrate_exterior(p, rmax, step_control_from(cfg));
        const SlopeSup sup = slope_sup(prof);
        const double a = p.cone_slope();
        j["beta"] = sup.beta;
        j["beta_r"] = sup.r_at;
        j["beta_at_last_sample"] = sup.at_last_sample;
        j["cone_slope"] = a;
        j["asymptote_gap"] = prof.u.back() / prof.r.back() - a;
        j["r_max"] = prof.r.back();
        if (sup.at_last_sample) j["warning"] = "supremum at the last sample; increase radial.rmax";
        if (p.m + p.n - 1 >= 7)
            j["beta_identity"] = {{"expected", a}, {"pass", std::abs(sup.beta - a) < 0.01}};
    }
    j["samples"] = prof.size();
    j["step"] = prof.step;
    j["error_estimate"] = prof.error_estimate;
    write_profile_csv((r.out / "profile.csv").string(), prof, csv_meta(r));
    write_json(r, "summary.json", j);
    write_plot_stub(r, "set xlabel 'r'\nplot 'profile.csv' using 1:2 with lines\n");
    std::cout << j.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------- solve

int cmd_solve(const Config& cfg) {
    Run r = prepare(cfg, 2);
    if (r.params.n != 2) throw PreconditionError("solve: the grid solver needs n = 2");
    const GridPtr g = grid_from(cfg, "disk:r=1", 1.0 / 64);
    const std::string bspec = cfg.get("boundary", "constant:1.5");
    const BoundaryData bd = boundary_from_spec(bspec, g, r.params);
    const SolveConfig sc = solve_config_from(cfg);
    const SolveOutcome o = solve_dirichlet(bd, r.params, sc);

    json j = header(r, "solve");
    j["grid"] = g->describe();
    j["boundary"] = bd.label();
    j["outcome"] = outcome_json(o);
    if (bspec.rfind("cone", 0) == 0) {
        std::string kind;
        const auto opts = spec_options(bspec, kind);
        auto num = [&](const char* key, double def) { return opts.count(key) ? parse_real(opts.at(key)) : def; };
        const double slope = num("slope", r.params.cone_slope());
        const Point c{num("cx", 0.0), num("cy", 0.0)};
        double err = 0.0;
        for (std::size_t k : g->interior())
            err = std::max(err, std::abs(o.u[k] - slope * distance(g->coords(k), c)));
        j["max_error_vs_cone"] = err;
        j["max_error_over_h"] = err / g->h();
    }
    if (bspec.rfind("constant", 0) == 0) {
        const double K = bd.min();
        j["min_u_over_K"] = o.min_u / K;
        j["half_bound_holds"] = o.min_u >= 0.5 * K;
        j["max_principle_threshold"] = max_principle_threshold(r.params, g->domain().diameter(), o.min_u);
    }
    write_field_csv((r.out / "solution.csv").string(), o.u, csv_meta(r));
    write_json(r, "outcome.json", j);
    write_plot_stub(r, "set view map\nsplot 'solution.csv' using 1:2:3 with points palette pt 5 ps 0.5\n");
    std::cout << "converged=" << o.converged << " iterations=" << o.iterations << " residual=" << fmt(o.residual)
              << " min_u=" << fmt(o.min_u) << "\n";
    return 0;
}

// ---------------------------------------------------------------- continue

int cmd_continue(const Config& cfg) {
    Run r = prepare(cfg, 2);
    if (r.params.n != 2) throw PreconditionError("continue: the grid solver needs n = 2");
    const GridPtr g = grid_from(cfg, "disk:r=1", 1.0 / 64);
    const BoundaryData phi1 = boundary_from_spec(cfg.get("boundary", "constant:2.2"), g, r.params);
    const std::string fam = cfg.get("continue.family", "linear");
    BoundaryFamily family;
    if (fam == "linear") family = BoundaryFamily::linear(phi1);
    else if (fam == "constant") family = BoundaryFamily::constant(phi1);
    else throw ParseError("continue.family must be linear or constant");

    const double beta = slope_sup(integrate_exterior(r.params, cfg.get_double("radial.rmax", 50.0))).beta;
    const Classification cls = classify_boundary_data(phi1, r.params, beta, cfg.get_double("continue.eps0", 0.0));
    const ContinuationReport rep =
        continuation_run(family, r.params, solve_config_from(cfg), schedule_from(cfg));

    std::string cand_csv;
    if (rep.singular) {
        cand_csv = "candidate.csv";
        write_field_csv((r.out / cand_csv).string(), rep.singular->field, csv_meta(r));
    }
    json j = header(r, "continue");
    j["grid"] = g->describe();
    j["beta"] = beta;
    j["phi1_class"] = {{"kind", to_string(cls.kind)},
                       {"positivity_margin", cls.positivity_margin},
                       {"smallness_bound", cls.smallness_bound}};
    j["report"] = json::parse(to_json(rep, cand_csv));
    write_json(r, "report.json", j);
    write_text((r.out / "records.csv").string(), csv_preamble(r) + records_csv(rep));
    write_plot_stub(r, "set xlabel 'lambda'\nset logscale y\nplot 'records.csv' using 1:4 with points\n");
    if (rep.bracket)
        std::cout << "bracket [" << fmt(rep.bracket->first) << ", " << fmt(rep.bracket->second) << "]\n";
    else
        std::cout << "no bracket\n";
    for (const auto& d : rep.diagnostics) std::cout << "diagnostic: " << d << "\n";
    return 0;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const Config& cfg) {
    Run r = prepare(cfg, 2);
    const SolveConfig sc = solve_config_from(cfg);
    VerifyOptions opt;
    opt.seed = r.seed;
    opt.trials = cfg.get_int("verify.trials", opt.trials);
    opt.eps = cfg.get_double("verify.eps", opt.eps);
    opt.theta = cfg.get_double("verify.theta", opt.theta);
    const auto coarse = build_corpus(cfg.get_double("verify.h_coarse", 1.0 / 32), sc);
    const auto fine = build_corpus(cfg.get_double("verify.h_fine", 1.0 / 64), sc);
    const VerificationReport rep = verify_corpus(coarse, fine, opt);
    json j = header(r, "verify");
    j["report"] = json::parse(to_json(rep));
    j["eps0_hat"] = std::min(measured_eps0(coarse), measured_eps0(fine));
    write_json(r, "verify.json", j);
    write_text((r.out / "verify.csv").string(), csv_preamble(r) + to_csv(rep));
    write_plot_stub(r, "plot 'verify.csv' using 0:4 with points\n");
    std::size_t failed = 0;
    for (const auto& c : rep.checks)
        if (!c.pass) {
            ++failed;
            std::cout << "FAIL " << c.name << " " << c.field << "\n";
        }
    std::cout << rep.checks.size() - failed << "/" << rep.checks.size() << " checks pass\n";
    return 0;
}

// ---------------------------------------------------------------- blowup

int cmd_blowup(const Config& cfg) {
    Run r = prepare(cfg, 2);
    const GridPtr g = grid_from(cfg, "disk:r=1", 1.0 / 64);
    ScalarField u;
    const std::string field = cfg.get("blowup.field", "cone");
    if (field == "cone") {
        const double a = r.params.cone_slope();
        u = ScalarField::from_function(g, [a](double x, double y) { return a * std::hypot(x, y); });
    } else {
        u = read_field_csv(field, g);
    }
    const std::string x0s = cfg.get("blowup.x0", "argmin");
    Point x0;
    if (x0s == "argmin") {
        x0 = g->coords(u.argmin_interior());
    } else {
        const auto v = parse_list(x0s);
        if (v.size() != 2) throw ParseError("blowup.x0 must be 'argmin' or 'x,y'");
        x0 = {v[0], v[1]};
    }
    const auto scales = parse_list(cfg.get("blowup.scales", "0.8,0.4,0.2,0.1"));
    const BlowupSequence bs =
        blowup_sequence(u, x0, scales, cfg.get_double("blowup.ref_h", 1.0 / 32), cfg.get_bool("blowup.centered", false));
    const double threshold = cfg.get_double("blowup.threshold", 3.0 * g->h());
    const SingularSet ss = singular_set(u, threshold);

    json j = header(r, "blowup");
    j["field"] = field;
    j["x0"] = {x0.x, x0.y};
    j["scales"] = scales;
    json ratios = json::array(), diffs = json::array(), skipped = json::array();
    for (double v : bs.slope_ratio) ratios.push_back(std::isfinite(v) ? json(v) : json(nullptr));
    for (double v : bs.successive_diff) diffs.push_back(std::isfinite(v) ? json(v) : json(nullptr));
    for (bool b : bs.skipped) skipped.push_back(b);
    j["slope_ratio"] = ratios;
    j["successive_diff"] = diffs;
    j["skipped"] = skipped;
    double max_diff = 0.0;
    for (double v : bs.successive_diff)
        if (std::isfinite(v)) max_diff = std::max(max_diff, v);
    j["max_successive_diff"] = max_diff;
    j["singular_set"] = {{"threshold", threshold},
                         {"nodes", ss.nodes.size()},
                         {"box_sizes", ss.box_sizes},
                         {"box_counts", ss.box_counts},
                         {"dimension", ss.dimension ? json(*ss.dimension) : json(nullptr)}};
    write_json(r, "blowup.json", j);

    std::ostringstream slopes, boxes;
    slopes << csv_preamble(r) << "scale,slope_ratio,skipped\n";
    for (std::size_t i = 0; i < scales.size(); ++i)
        slopes << fmt(scales[i]) << ',' << fmt(bs.slope_ratio[i]) << ',' << int(bs.skipped[i]) << '\n';
    boxes << csv_preamble(r) << "log_inv_size,log_count\n";
    for (std::size_t i = 0; i < ss.box_sizes.size(); ++i)
        if (ss.box_counts[i] > 0)
            boxes << fmt(-std::log(ss.box_sizes[i])) << ',' << fmt(std::log(ss.box_counts[i])) << '\n';
    write_text((r.out / "slopes.csv").string(), slopes.str());
    write_text((r.out / "boxcount.csv").string(), boxes.str());
    write_plot_stub(r, "set multiplot layout 1,2\nset logscale x\nplot 'slopes.csv' using 1:2 with linespoints\n"
                       "unset logscale x\nplot 'boxcount.csv' using 1:2 with linespoints\nunset multiplot\n");
    std::cout << "slope ratios:";
    for (double v : bs.slope_ratio) std::cout << " " << fmt(v);
    std::cout << "\nmax successive diff " << fmt(max_diff) << "\n";
    return 0;
}

const char* kConfigHelp = R"(Settings (config file keys; --set key=value overrides, shortcuts below win last):
  m = 2, n = 2 (radial) / 2 (grid), seed = 12345, out = smelab_out
  [grid]     domain = disk:r=1 | annulus:r_in=0.2,r_out=1 | rect:x0=..,y0=..,x1=..,y1=.. | ellipse:a=..,b=..
             h = 1/64
  boundary = constant:1.5 | cone[:slope=..,cx=..,cy=..] | linear:c=..,ax=..,ay=.. | exterior:lambda=..,cx=..,cy=.. | csv:path
  [radial]   rmax = 50, xmax = 2 (n = 1), step = 1e-3, adaptive = false, tol = 1e-11, launch_u = 1e-4,
             switch_slope = 10, slope_cap = 1e6
  [solve]    delta = 1e-3, tol_residual = 1e-8, max_outer_iters = 400, damping = 0.5, linear_tol = 1e-12,
             linear_max_iters = 2000, newton_polish = true, handoff_residual = 1e-4, newton_max_iters = 12,
             floor_stall_iters = 0
  [continue] family = linear | constant, samples = 8, max_bisections = 12, bracket_tol = 0.01,
             delta_levels = 7, delta_fraction = 0.1, collar_eta = 0.1, singular_threshold = 3h,
             floor_stall_iters = 30, extract_singular = true, eps0 = 0 (smallness test off)
  [verify]   h_coarse = 1/32, h_fine = 1/64, trials = 10, eps = 0.5, theta = 0.5
  [blowup]   field = cone | path.csv, x0 = argmin | x,y, scales = 0.8,0.4,0.2,0.1, ref_h = 1/32,
             centered = false, threshold = 3h
Exit codes: 0 success (non-convergence is reported, not an error), 1 usage error, 2 numerical failure.)";

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"smelab: numerical lab for the symmetric minimal surface equation"};
    app.footer(kConfigHelp);
    app.require_subcommand(1);
    app.set_help_flag("--help", "print this help and exit");  // frees -h; --h is the grid spacing

    std::string config_path;
    std::vector<std::string> sets;
    std::map<std::string, std::string> shortcuts;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key=value config file with [sections]");
        sub->add_option("--set", sets, "override a setting, e.g. --set solve.damping=0.7");
        for (const auto& [flag, key] : std::vector<std::pair<std::string, std::string>>{
                 {"--m", "m"}, {"--n", "n"}, {"--seed", "seed"}, {"--out", "out"}})
            sub->add_option_function<std::string>(flag, [&shortcuts, key](const std::string& v) { shortcuts[key] = v; },
                                                  "sets '" + key + "'");
    };
    auto grid_opts = [&](CLI::App* sub) {
        for (const auto& [flag, key] : std::vector<std::pair<std::string, std::string>>{
                 {"--domain", "grid.domain"}, {"--h", "grid.h"}, {"--boundary", "boundary"}})
            sub->add_option_function<std::string>(flag, [&shortcuts, key](const std::string& v) { shortcuts[key] = v; },
                                                  "sets '" + key + "'");
    };

    CLI::App* radial = app.add_subcommand("radial", "integrate the n = 1 profile or the exterior profile");
    common(radial);
    radial->add_option_function<std::string>("--rmax", [&](const std::string& v) { shortcuts["radial.rmax"] = v; },
                                             "sets 'radial.rmax'");
    radial->add_option_function<std::string>("--xmax", [&](const std::string& v) { shortcuts["radial.xmax"] = v; },
                                             "sets 'radial.xmax'");
    CLI::App* solve = app.add_subcommand("solve", "Dirichlet solve on a 2-D domain");
    common(solve);
    grid_opts(solve);
    CLI::App* cont = app.add_subcommand("continue", "continuation in lambda with singular-limit extraction");
    common(cont);
    grid_opts(cont);
    CLI::App* verify = app.add_subcommand("verify", "estimate checks over the built-in corpus");
    common(verify);
    CLI::App* blowup = app.add_subcommand("blowup", "blow-up rescalings and singular-set dimension");
    common(blowup);
    grid_opts(blowup);
    blowup->add_option_function<std::string>("--field", [&](const std::string& v) { shortcuts["blowup.field"] = v; },
                                             "sets 'blowup.field' (cone or a field CSV on --domain/--h)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    const auto t0 = std::chrono::steady_clock::now();
    std::string name;
    try {
        Config cfg = config_path.empty() ? Config{} : Config::load(config_path);
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw ParseError("--set expects key=value, got '" + s + "'");
            cfg.set(s.substr(0, eq), s.substr(eq + 1));
        }
        for (const auto& [k, v] : shortcuts) cfg.set(k, v);

        int rc = 0;
        if (*radial) name = "radial", rc = cmd_radial(cfg);
        else if (*solve) name = "solve", rc = cmd_solve(cfg);
        else if (*cont) name = "continue", rc = cmd_continue(cfg);
        else if (*verify) name = "verify", rc = cmd_verify(cfg);
        else if (*blowup) name = "blowup", rc = cmd_blowup(cfg);
        Run meta;
        meta.out = cfg.get("out", "smelab_out");
        meta.hash = cfg.hash_hex();
        write_run_meta(meta, name, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        return rc;
    } catch (const ParseError& e) {
        std::cerr << "smelab: " << e.what() << "\n";
        return kUsage;
    } catch (const PreconditionError& e) {
        std::cerr << "smelab: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "smelab: numerical failure: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "smelab: " << e.what() << "\n";
        return kNumerical;
    }
}
