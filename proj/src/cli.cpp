#include "nls/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "nls/convergence.hpp"
#include "nls/diag_csv.hpp"
#include "nls/errors.hpp"
#include "nls/morawetz.hpp"
#include "nls/presets.hpp"
#include "nls/run_config.hpp"
#include "nls/snapshot.hpp"
#include "nls/spectral.hpp"

namespace nls {

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
};

RunConfig load_config(const CommonArgs& args) {
    RunConfig cfg = parse_config_file(args.config_path);
    for (const std::string& ov : args.overrides) apply_override(cfg, ov);
    if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
    fs::create_directories(cfg.output_dir);
    return cfg;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (fs::path(cfg.output_dir) / name).string();
}

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

GroundState solve_for(const RunConfig& cfg) {
    return solve_ground_state(cfg.build_grid(), cfg.ground_state_tol());
}

int cmd_ground_state(const CommonArgs& args) {
    const RunConfig cfg = load_config(args);
    const GroundState q = solve_for(cfg);
    write_snapshot(q.field, out_path(cfg, "ground_state.nls"), SnapshotKind::ground_state);
    const PohozaevReport rep = pohozaev_report(q);
    std::ofstream out(out_path(cfg, "ground_state_report.csv"));
    out << "# schema: nlslab-ground-state-v1\n";
    out << "residual,mass,grad_sq,energy,grad_ratio,iterations\n";
    out << fmt17(q.residual) << "," << fmt17(q.mass) << "," << fmt17(q.grad_sq) << ","
        << fmt17(q.energy) << "," << fmt17(rep.grad_ratio) << "," << q.residual_history.size()
        << "\n";
    std::cout << "ground state: mass " << fmt17(q.mass) << ", residual " << fmt17(q.residual)
              << ", grad ratio " << fmt17(rep.grad_ratio) << " (target " << 0.5 * cfg.dimension
              << ")\n";
    return 0;
}

int cmd_evolve(const CommonArgs& args) {
    const RunConfig cfg = load_config(args);
    std::optional<GroundState> q;
    if (preset_needs_ground_state(cfg.preset)) q = solve_for(cfg);
    EvolutionConfig ecfg = cfg.evolution;
    ecfg.mu = cfg.mu;
    const ComplexField u0 = make_initial_field(cfg, q ? &*q : nullptr);
    const Trajectory traj = run_evolution(u0, ecfg, q ? &*q : nullptr);

    write_diagnostics(traj.records, out_path(cfg, "diagnostics.csv"), cfg.dimension);
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "snap_%06zu.nls", i);
        write_snapshot(traj.snapshots[i], out_path(cfg, name));
    }
    const char* term = traj.termination == Termination::horizon_reached ? "horizon_reached"
                       : traj.termination == Termination::blowup_detected ? "blowup_detected"
                                                                          : "step_underflow";
    const double drift =
        std::abs(traj.records.back().mass - traj.records.front().mass) / traj.records.front().mass;
    std::cout << "evolve: " << traj.records.size() << " records to t = "
              << fmt17(traj.times.back()) << ", termination " << term << ", mass drift "
              << fmt17(drift) << "\n";

    // Modulation-derived diagnostics, logged when tracking was active.
    std::size_t tracked = 0;
    for (const auto& r : traj.records) tracked += r.lambda.has_value() ? 1 : 0;
    if (tracked == traj.records.size() && tracked >= 2) {
        std::cout << "  cascade ratio (int lambda^3 / sup lambda) = "
                  << fmt17(cascade_ratio(traj)) << "\n";
        if (traj.termination == Termination::blowup_detected && tracked >= 20) {
            const BlowupReport rep = estimate_blowup(traj);
            std::cout << "  blowup estimate: T = " << fmt17(rep.t_estimate) << ", exponent "
                      << fmt17(rep.rate_exponent) << ", log-log score "
                      << fmt17(rep.loglog_score) << "\n";
        }
    }
    return 0;
}

int cmd_transform(const CommonArgs& args, const std::string& map, double lambda,
                  const std::vector<double>& x0, const std::vector<double>& xi,
                  double gamma, double t) {
    const RunConfig cfg = load_config(args);
    std::optional<GroundState> q;
    if (preset_needs_ground_state(cfg.preset)) q = solve_for(cfg);
    const ComplexField u0 = make_initial_field(cfg, q ? &*q : nullptr);

    auto to_vec = [&](const std::vector<double>& v) {
        if (v.size() > static_cast<std::size_t>(cfg.dimension))
            throw ConfigError("transform: vector parameter has more entries than dimensions");
        Vec3 out = kZeroVec;
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
        return out;
    };

    ComplexField result(u0.grid());
    if (map == "group" || map == "inverse-group") {
        GroupElement g;
        g.lambda = lambda;
        g.x0 = to_vec(x0);
        g.xi0 = to_vec(xi);
        g.gamma0 = gamma;
        if (map == "inverse-group") g = inverse(g);
        result = apply_group(g, u0);
    } else if (map == "galilean") {
        result = galilean_boost(u0, to_vec(xi), t);
    } else if (map == "pseudoconformal") {
        result = pseudoconformal(u0, t);
    } else {
        throw ConfigError("transform: unknown map '" + map +
                          "' (group | inverse-group | galilean | pseudoconformal)");
    }
    write_snapshot(result, out_path(cfg, "transformed.nls"));
    std::cout << "transform: " << map << " applied, mass " << fmt17(mass(result)) << " (input "
              << fmt17(mass(u0)) << ")\n";
    return 0;
}

int cmd_morawetz_check(const CommonArgs& args) {
    const RunConfig cfg = load_config(args);
    if (cfg.cutoff)
        throw ConfigError(
            "morawetz-check: the derivative identity requires the identity truncation; "
            "remove morawetz.cutoff");
    std::optional<GroundState> q;
    if (preset_needs_ground_state(cfg.preset)) q = solve_for(cfg);
    const ComplexField u0 = make_initial_field(cfg, q ? &*q : nullptr);
    const Grid grid = u0.grid();
    const double R = cfg.morawetz_radius > 0.0 ? cfg.morawetz_radius : grid.half_width() / 8.0;
    const MorawetzWeights w = build_weights(R, grid);

    const MorawetzRhs rhs = morawetz_rhs(u0, w, cfg.mu);
    const double scale =
        std::max({std::abs(rhs.gradient_term), std::abs(rhs.momentum_term),
                  std::abs(rhs.mass_term), std::abs(rhs.nonlinear_term)});

    std::vector<double> deltas = cfg.sample_times;
    if (deltas.empty()) deltas = {0.02, 0.01};

    std::ofstream out(out_path(cfg, "morawetz_terms.csv"));
    out << "# schema: nlslab-morawetz-check-v1\n";
    out << "delta,fd_dMdt,gradient_term,momentum_term,mass_term,nonlinear_term,rhs_total,"
           "abs_error,error_over_scale\n";
    std::cout << "morawetz-check: M(0) = " << fmt17(interaction_morawetz(u0, w)) << ", rhs total "
              << fmt17(rhs.total) << "\n";
    for (double delta : deltas) {
        if (!(delta > 0.0)) throw ConfigError("morawetz-check: deltas must be positive");
        EvolutionConfig ecfg = cfg.evolution;
        ecfg.mu = cfg.mu;
        ecfg.dt0 = std::min(ecfg.dt0, delta / 64.0);
        ecfg.t_end = std::max(ecfg.t_end, 2.0 * delta);
        const ComplexField up = evolve_to(u0, delta, ecfg);
        ComplexField conj0(grid, 0.0);
        for (std::size_t i = 0; i < grid.size(); ++i) conj0[i] = std::conj(u0[i]);
        ComplexField um = evolve_to(conj0, delta, ecfg);
        for (std::size_t i = 0; i < grid.size(); ++i) um[i] = std::conj(um[i]);
        const double fd =
            (interaction_morawetz(up, w) - interaction_morawetz(um, w)) / (2.0 * delta);
        const double err = std::abs(fd - rhs.total);
        out << fmt17(delta) << "," << fmt17(fd) << "," << fmt17(rhs.gradient_term) << ","
            << fmt17(rhs.momentum_term) << "," << fmt17(rhs.mass_term) << ","
            << fmt17(rhs.nonlinear_term) << "," << fmt17(rhs.total) << "," << fmt17(err) << ","
            << fmt17(err / scale) << "\n";
        std::cout << "  delta " << delta << ": fd " << fmt17(fd) << ", error/scale "
                  << fmt17(err / scale) << "\n";
    }
    return 0;
}

int cmd_virial_check(const CommonArgs& args) {
    const RunConfig cfg = load_config(args);
    std::optional<GroundState> q;
    if (preset_needs_ground_state(cfg.preset)) q = solve_for(cfg);
    EvolutionConfig ecfg = cfg.evolution;
    ecfg.mu = cfg.mu;
    const ComplexField u0 = make_initial_field(cfg, q ? &*q : nullptr);
    const Trajectory traj = run_evolution(u0, ecfg, q ? &*q : nullptr);
    const VirialReport rep = virial_check(traj);

    const double target = 16.0 * traj.records.front().energy;
    std::ofstream out(out_path(cfg, "virial.csv"));
    out << "# schema: nlslab-virial-v1\n";
    out << "t,variance,second_difference,target_16E\n";
    for (std::size_t i = 1; i + 1 < traj.records.size(); ++i)
        out << fmt17(traj.records[i].t) << "," << fmt17(traj.records[i].variance) << ","
            << fmt17(rep.second_differences[i - 1]) << "," << fmt17(target) << "\n";
    write_diagnostics(traj.records, out_path(cfg, "diagnostics.csv"), cfg.dimension);
    std::cout << "virial-check: 16 E = " << fmt17(target) << ", max relative error "
              << fmt17(rep.max_rel_error) << "\n";
    return 0;
}

int cmd_fit(const CommonArgs& args) {
    const RunConfig cfg = load_config(args);
    const GroundState q = solve_for(cfg);
    const ComplexField f = make_initial_field(cfg, &q);
    const FitResult fit = fit_to_ground_state(f, q);

    std::ofstream out(out_path(cfg, "fit.csv"));
    out << "# schema: nlslab-fit-v1\n";
    out << "lambda";
    for (int a = 0; a < cfg.dimension; ++a) out << ",x0_" << a;
    for (int a = 0; a < cfg.dimension; ++a) out << ",xi0_" << a;
    out << ",gamma,distance,iterations,converged\n";
    out << fmt17(fit.g.lambda);
    for (int a = 0; a < cfg.dimension; ++a) out << "," << fmt17(fit.g.x0[a]);
    for (int a = 0; a < cfg.dimension; ++a) out << "," << fmt17(fit.g.xi0[a]);
    out << "," << fmt17(fit.g.gamma0) << "," << fmt17(fit.distance) << "," << fit.iterations
        << "," << (fit.converged ? 1 : 0) << "\n";
    std::cout << "fit: distance " << fmt17(fit.distance) << " in " << fit.iterations
              << " sweeps (lambda " << fmt17(fit.g.lambda) << ")\n";
    return 0;
}

int cmd_converge_demo(const CommonArgs& args) {
    const RunConfig cfg = load_config(args);
    if (cfg.sample_times.empty())
        throw ConfigError("converge-demo: sample_times must be nonempty");
    if (cfg.mu != -1) throw ConfigError("converge-demo: requires mu = -1");
    const GroundState q = solve_for(cfg);
    const ComplexField u0 = make_initial_field(cfg, &q);

    EvolutionConfig ecfg = cfg.evolution;
    ecfg.mu = cfg.mu;

    std::vector<double> times = cfg.sample_times;
    std::sort(times.begin(), times.end());

    std::vector<DiagnosticRecord> records;
    std::ofstream conv(out_path(cfg, "convergence.csv"));
    conv << "# schema: nlslab-convergence-v1\n";
    conv << "t,distance,running_infimum,lambda";
    for (int a = 0; a < cfg.dimension; ++a) conv << ",x0_" << a;
    for (int a = 0; a < cfg.dimension; ++a) conv << ",xi0_" << a;
    conv << ",gamma\n";

    ComplexField u = u0;
    double inf_so_far = std::numeric_limits<double>::infinity();
    for (double t : times) {
        u = evolve_to(u, t, ecfg);
        const FitResult fit = fit_to_ground_state(u, q);
        inf_so_far = std::min(inf_so_far, fit.distance);

        conv << fmt17(t) << "," << fmt17(fit.distance) << "," << fmt17(inf_so_far) << ","
             << fmt17(fit.g.lambda);
        for (int a = 0; a < cfg.dimension; ++a) conv << "," << fmt17(fit.g.x0[a]);
        for (int a = 0; a < cfg.dimension; ++a) conv << "," << fmt17(fit.g.xi0[a]);
        conv << "," << fmt17(fit.g.gamma0) << "\n";

        const ConservedQuantities c = conserved_quantities(u, cfg.mu);
        DiagnosticRecord rec;
        rec.t = t;
        rec.mass = c.mass;
        rec.energy = c.energy;
        rec.momentum = c.momentum;
        rec.grad_sq = c.grad_sq;
        rec.linf = lp_norm(u, std::numeric_limits<double>::infinity());
        rec.variance = variance(u, kZeroVec).value;
        rec.lambda = fit.g.lambda;
        rec.x_center = fit.g.x0;
        rec.xi = fit.g.xi0;
        rec.gamma = fit.g.gamma0;
        rec.fit_distance = fit.distance;
        records.push_back(rec);
        std::cout << "  t " << fmt17(t) << ": distance " << fmt17(fit.distance) << "\n";
    }
    write_diagnostics(records, out_path(cfg, "diagnostics.csv"), cfg.dimension);
    std::cout << "converge-demo: running infimum " << fmt17(inf_so_far) << "\n";
    return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Pseudospectral laboratory for the mass-critical nonlinear Schrodinger equation"};
    app.require_subcommand(1);

    CommonArgs common;
    std::string map = "group";
    double lambda = 1.0, gamma = 0.0, t_param = 1.0;
    std::vector<double> x0_param, xi_param;

    auto add_common = [&common](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "config file path")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", common.out_dir, "output directory (overrides config)");
        sub->add_option("--override", common.overrides, "key=value config override (repeatable)");
    };

    int (*handler)(const CommonArgs&) = nullptr;
    CLI::App* ground = app.add_subcommand("ground-state", "solve and certify the ground state");
    add_common(ground);
    ground->callback([&handler]() { handler = cmd_ground_state; });

    CLI::App* evolve = app.add_subcommand("evolve", "evolve a preset and record diagnostics");
    add_common(evolve);
    evolve->callback([&handler]() { handler = cmd_evolve; });

    CLI::App* transform = app.add_subcommand("transform", "apply a symmetry map to a snapshot");
    add_common(transform);
    transform->add_option("--map", map, "group | inverse-group | galilean | pseudoconformal");
    transform->add_option("--lambda", lambda, "scale parameter");
    transform->add_option("--x0", x0_param, "translation vector");
    transform->add_option("--xi", xi_param, "frequency vector");
    transform->add_option("--gamma", gamma, "phase");
    transform->add_option("--t", t_param, "time parameter (galilean / pseudoconformal)");

    CLI::App* morawetz = app.add_subcommand("morawetz-check", "dM/dt identity experiment");
    add_common(morawetz);
    morawetz->callback([&handler]() { handler = cmd_morawetz_check; });

    CLI::App* virial = app.add_subcommand("virial-check", "variance second-difference vs 16E");
    add_common(virial);
    virial->callback([&handler]() { handler = cmd_virial_check; });

    CLI::App* fit = app.add_subcommand("fit", "fit group parameters against the ground state");
    add_common(fit);
    fit->callback([&handler]() { handler = cmd_fit; });

    CLI::App* conv = app.add_subcommand("converge-demo", "sequential-convergence experiment");
    add_common(conv);
    conv->callback([&handler]() { handler = cmd_converge_demo; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (transform->parsed())
            return cmd_transform(common, map, lambda, x0_param, xi_param, gamma, t_param);
        if (handler != nullptr) return handler(common);
        std::cerr << app.help() << std::endl;
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << std::endl;
        return 2;
    }
}

}  // namespace nls
