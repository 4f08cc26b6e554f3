#include "collapse/config.hpp"
#include "collapse/output.hpp"
#include "collapse/selfcheck.hpp"
#include "collapse/stats.hpp"
#include "collapse/svg.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace collapse;

namespace {

constexpr const char* kUsage = R"(usage: collapse-lab <subcommand> [options]

subcommands:
  trajectory        integrate one trajectory, write CSV (and SVG for N in {2,3})
  ensemble          run a Monte Carlo ensemble, write the JSON result document
  scan              two-level scan over initial conditions x = b_1^2(0)
  gradcheck         finite-difference audit of the sphere gradient
  martingale-check  self-test of the Born-exact reference process

options:
  --config FILE     configuration file (TOML-compatible subset)
  --key=value       override any config key, e.g. --run.trials=50000
  --out DIR         output directory (required for file-writing subcommands)
  --svg             also write an SVG rendering (trajectory, scan)
  --help            show this message
)";

struct CliArgs {
    std::string subcommand;
    std::string config_path;
    std::string out_dir;
    bool svg = false;
    std::vector<std::string> overrides;
};

CliArgs parse_args(int argc, char** argv) {
    if (argc < 2) throw std::invalid_argument("missing subcommand");
    CliArgs args;
    args.subcommand = argv[1];
    for (int i = 2; i < argc; ++i) {
        const std::string a = argv[i];
        auto take_value = [&](const std::string& name) {
            if (a.size() > name.size() + 1 && a.compare(0, name.size() + 1, name + "=") == 0)
                return a.substr(name.size() + 1);
            if (a == name) {
                if (i + 1 >= argc) throw std::invalid_argument(name + " requires a value");
                return std::string(argv[++i]);
            }
            return std::string();
        };
        if (a == "--help" || a == "-h") {
            std::fputs(kUsage, stdout);
            std::exit(0);
        } else if (a == "--svg") {
            args.svg = true;
        } else if (a.rfind("--config", 0) == 0 && (a == "--config" || a[8] == '=')) {
            args.config_path = take_value("--config");
        } else if (a.rfind("--out", 0) == 0 && (a == "--out" || a[5] == '=')) {
            args.out_dir = take_value("--out");
        } else if (a.rfind("--", 0) == 0 && a.find('=') != std::string::npos &&
                   a.find('.') != std::string::npos) {
            args.overrides.push_back(a.substr(2));
        } else {
            throw std::invalid_argument("unknown option '" + a + "'");
        }
    }
    return args;
}

fs::path require_out_dir(const CliArgs& args) {
    if (args.out_dir.empty())
        throw std::invalid_argument("this subcommand requires --out DIR");
    fs::path dir(args.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() +
                                     "': " + ec.message());
    return dir;
}

int cmd_trajectory(const RunConfig& cfg, const CliArgs& args) {
    if (!cfg.has_init())
        throw std::invalid_argument("trajectory: an initial state ([init] section) is required");
    const Index n = cfg.dimension();
    if (args.svg && !svg_supported_dimension(n))
        throw std::invalid_argument("SVG supported for N in {2,3}");
    const fs::path out = require_out_dir(args);

    const DynamicsConfig dyn = cfg.make_dynamics(n);
    const BPoint b0 = cfg.initial_bpoint();
    TrialRng rng(cfg.seed, 0);
    const Trajectory traj = run_trajectory(dyn, b0, rng, /*record=*/true);

    write_file(out / "trajectory.csv", trajectory_csv(traj));
    if (args.svg) write_file(out / "trajectory.svg", trajectory_svg(traj));

    if (traj.outcome.collapsed())
        std::printf("trajectory: collapsed at vertex %lld, t = %s (%zu recorded states)\n",
                    static_cast<long long>(*traj.outcome.vertex_index),
                    format_number(*traj.outcome.collapse_time).c_str(), traj.times.size());
    else
        std::printf("trajectory: censored at t_max = %s (%zu recorded states)\n",
                    format_number(dyn.t_max).c_str(), traj.times.size());
    return 0;
}

int cmd_ensemble(const RunConfig& cfg, const CliArgs& args) {
    if (cfg.trials < 1) throw std::invalid_argument("ensemble: run.trials must be >= 1");
    if (!cfg.has_init())
        throw std::invalid_argument("ensemble: an initial state ([init] section) is required");
    const fs::path out = require_out_dir(args);

    const Index n = cfg.dimension();
    const DynamicsConfig dyn = cfg.make_dynamics(n);
    const EnsembleInit init = cfg.model == Model::martingale
                                  ? EnsembleInit{cfg.initial_simplex()}
                                  : EnsembleInit{cfg.initial_bpoint()};
    const EnsembleResult er =
        run_ensemble(cfg.model, dyn, init, cfg.trials, cfg.seed, cfg.ci_level, 0);

    write_file(out / "result.json", ensemble_json(cfg, er.stats));

    const CollapseStats& s = er.stats;
    std::printf("ensemble: model=%s trials=%llu censored=%llu failed=%llu\n",
                to_string(cfg.model).c_str(), static_cast<unsigned long long>(s.trials),
                static_cast<unsigned long long>(s.censored),
                static_cast<unsigned long long>(s.failed));
    for (Index i = 0; i < n; ++i)
        std::printf("  vertex %lld: freq=%.6f born=%.6f ci=[%.6f, %.6f]\n",
                    static_cast<long long>(i), s.frequencies[i], s.born[i], s.ci_low[i],
                    s.ci_high[i]);
    std::printf("  chi_square=%s dof=%d p_value=%s\n", format_number(s.chi_square).c_str(),
                s.chi_square_dof, format_number(s.p_value).c_str());
    if (s.chi_square_flagged)
        std::fprintf(stderr,
                     "warning: censored fraction exceeds 1%%; chi-square comparison is "
                     "computed over collapsed trials only\n");
    return 0;
}

int cmd_scan(const RunConfig& cfg, const CliArgs& args) {
    if (cfg.trials_per_point < 1)
        throw std::invalid_argument("scan: scan.trials_per_point must be >= 1");
    if (cfg.has_init() && cfg.dimension() != 2)
        throw std::invalid_argument("scan: requires a two-level (N = 2) configuration");
    const fs::path out = require_out_dir(args);

    const DynamicsConfig dyn = cfg.make_dynamics(2);
    const ScanResult scan = symmetry_scan(cfg.model, dyn, cfg.grid, cfg.trials_per_point,
                                          cfg.seed, cfg.ci_level, 0);

    write_file(out / "scan.csv", scan_csv(scan));
    write_file(out / "scan_residuals.csv", scan_residuals_csv(scan));
    write_file(out / "scan_fit.json", scan_fit_json(scan));
    if (args.svg) write_file(out / "scan.svg", scan_svg(scan));

    std::printf("scan: model=%s points=%zu trials_per_point=%llu\n",
                to_string(cfg.model).c_str(), scan.grid.size(),
                static_cast<unsigned long long>(cfg.trials_per_point));
    std::printf("  linear fit: slope=%.6f intercept=%.6f max_abs_residual=%.6f\n",
                scan.fit.slope, scan.fit.intercept, scan.fit.max_abs_residual);
    Scalar worst = 0.0;
    for (std::size_t i = 0; i < scan.grid.size(); ++i)
        worst = std::max(worst, scan.symmetry_residuals[i]);
    std::printf("  worst symmetry residual: %.6f\n", worst);
    return 0;
}

int cmd_gradcheck(const RunConfig& cfg, const CliArgs& args) {
    const GradCheckReport report =
        gradcheck_run(cfg.gradcheck_dims, cfg.gradcheck_samples, cfg.seed);
    std::printf("gradcheck: samples=%llu max_rel_error=%s tolerance=%s -> %s\n",
                static_cast<unsigned long long>(report.samples),
                format_number(report.max_rel_error).c_str(),
                format_number(report.tolerance).c_str(), report.pass() ? "PASS" : "FAIL");
    if (!args.out_dir.empty()) {
        const fs::path out = require_out_dir(args);
        JsonWriter w;
        w.begin_object();
        w.field("samples", report.samples);
        w.field("max_rel_error", report.max_rel_error);
        w.field("tolerance", report.tolerance);
        w.field("pass", std::string(report.pass() ? "true" : "false"));
        w.end_object();
        write_file(out / "gradcheck.json", w.str() + "\n");
    }
    return report.pass() ? 0 : 1;
}

int cmd_martingale_check(const RunConfig& cfg, const CliArgs& args) {
    std::vector<Vec> starts;
    if (cfg.simplex) {
        starts.push_back(*cfg.simplex);
    } else {
        starts.push_back((Vec(2) << 0.3, 0.7).finished());
        starts.push_back((Vec(3) << 0.2, 0.3, 0.5).finished());
    }
    const MartingaleCheckReport report =
        martingale_check_run(starts, cfg.h, cfg.sigma, cfg.collapse_eps, cfg.t_max,
                             /*drift_samples=*/100000, cfg.trials, cfg.seed, cfg.ci_level, 0);

    std::printf("martingale-check: drift over %llu one-step samples -> %s\n",
                static_cast<unsigned long long>(report.drift.samples),
                report.drift.pass ? "PASS" : "FAIL");
    for (Index i = 0; i < report.drift.mean.size(); ++i)
        std::printf("  coord %lld: mean=%.3e (3*SE=%.3e)\n", static_cast<long long>(i),
                    report.drift.mean[i], 3.0 * report.drift.std_error[i]);
    for (const auto& a : report.absorption) {
        std::printf("absorption from (");
        for (Index i = 0; i < a.p0.size(); ++i)
            std::printf("%s%.3f", i ? ", " : "", a.p0[i]);
        std::printf("): trials=%llu censored=%llu clamped_fraction=%.3e -> %s\n",
                    static_cast<unsigned long long>(a.stats.trials),
                    static_cast<unsigned long long>(a.stats.censored), a.clamped_fraction,
                    a.pass ? "PASS" : "FAIL");
        for (Index i = 0; i < a.p0.size(); ++i)
            std::printf("  vertex %lld: freq=%.6f target=%.6f ci=[%.6f, %.6f]\n",
                        static_cast<long long>(i), a.stats.frequencies[i], a.p0[i],
                        a.stats.ci_low[i], a.stats.ci_high[i]);
    }
    const bool pass = report.pass();
    std::printf("martingale-check: %s\n", pass ? "PASS" : "FAIL");

    if (!args.out_dir.empty()) {
        const fs::path out = require_out_dir(args);
        JsonWriter w;
        w.begin_object();
        w.field("drift_samples", report.drift.samples);
        w.field("drift_mean", report.drift.mean);
        w.field("drift_std_error", report.drift.std_error);
        w.field("pass", std::string(pass ? "true" : "false"));
        w.end_object();
        write_file(out / "martingale_check.json", w.str() + "\n");
    }
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CliArgs args;
    try {
        args = parse_args(argc, argv);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n\n%s", e.what(), kUsage);
        return 2;
    }

    try {
        const RunConfig cfg = load_run_config(args.config_path, args.overrides);
        cfg.validate();
        if (args.subcommand == "trajectory") return cmd_trajectory(cfg, args);
        if (args.subcommand == "ensemble") return cmd_ensemble(cfg, args);
        if (args.subcommand == "scan") return cmd_scan(cfg, args);
        if (args.subcommand == "gradcheck") return cmd_gradcheck(cfg, args);
        if (args.subcommand == "martingale-check") return cmd_martingale_check(cfg, args);
        std::fprintf(stderr, "error: unknown subcommand '%s'\n\n%s", args.subcommand.c_str(),
                     kUsage);
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
