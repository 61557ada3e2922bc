// Command-line driver: classify | simulate | flux | diagnose | sweep | oracle.
// Exit codes: 0 success, 1 configuration/usage error, 2 ran but not steady.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "coagstat/config.hpp"
#include "coagstat/diagnostics.hpp"
#include "coagstat/flux.hpp"
#include "coagstat/flux_oracle.hpp"
#include "coagstat/kernels.hpp"
#include "coagstat/lattice_state.hpp"
#include "coagstat/solver.hpp"
#include "coagstat/truncation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace coag;

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void warn_kernel(const RunConfig& cfg) {
    for (const auto& w : cfg.kernel_warnings()) std::cerr << "warning: " << w << "\n";
}

void write_timeseries(const TimeSeries& series, int d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "t,total_number";
    for (int j = 1; j <= d; ++j) out << ",mass_" << j;
    out << ",residual,dt\n";
    for (const auto& row : series.rows) {
        out << fmt17(row.t) << ',' << fmt17(row.total);
        for (double m : row.mass) out << ',' << fmt17(m);
        out << ',' << fmt17(row.residual) << ',' << fmt17(row.dt) << "\n";
    }
}

int cmd_classify(const RunConfig& cfg) {
    json out;
    try {
        Envelope env = classify(cfg.kernel, cfg.seed);
        out["gamma"] = env.gamma;
        out["p"] = env.p;
        out["c1"] = env.c1;
        out["c2"] = env.c2;
        out["exists"] = existence_predicate(env) ? "yes" : "no";
    } catch (const UnclassifiableKernel& e) {
        out["classified"] = false;
        out["reason"] = e.what();
    }
    std::cout << out.dump() << "\n";
    return 0;
}

int cmd_simulate(const RunConfig& cfg, const std::string& out_dir) {
    warn_kernel(cfg);
    Source src = cfg.source();
    TruncatedKernel kernel(cfg.kernel, cfg.truncation, cfg.seed);
    ClusterDistribution zero(cfg.dimension, 2.0 * cfg.truncation.M);

    fs::create_directories(out_dir);
    SnapshotCallback on_snapshot;
    if (cfg.output.snapshot_interval > 0)
        on_snapshot = [&](double t, const ClusterDistribution& state) {
            char name[64];
            std::snprintf(name, sizeof name, "snapshot_t%.6g.txt", t);
            save_snapshot(state, cfg.truncation.M, t, out_dir + "/" + name);
        };

    SteadyResult res = evolve_to_steady(zero, cfg.solver, kernel, src,
                                        cfg.output.snapshot_interval, on_snapshot);
    save_snapshot(res.state, cfg.truncation.M, res.t_final, out_dir + "/snapshot_final.txt");
    write_timeseries(res.series, cfg.dimension, out_dir + "/timeseries.csv");

    json summary;
    summary["converged"] = res.converged;
    summary["residual"] = res.residual;
    summary["t_final"] = res.t_final;
    summary["steps"] = res.steps;
    summary["total_number"] = res.state.total_number();
    summary["support_size"] = res.state.support_size();
    summary["max_total_number"] = res.max_total_number;
    summary["mass_beyond_cutoff"] = res.mass_beyond_cutoff;
    summary["snapshot"] = out_dir + "/snapshot_final.txt";
    std::cout << summary.dump() << "\n";
    return res.converged ? 0 : 2;
}

int cmd_flux(const RunConfig& cfg, const std::string& snapshot_path,
             std::vector<double> radii) {
    Snapshot snap = load_snapshot(snapshot_path);
    if (snap.state.dim() != cfg.dimension)
        throw ConfigError("snapshot dimension does not match the configuration");
    Source src = cfg.source();
    TruncationParams params = cfg.truncation;
    params.M = snap.M;  // the snapshot records the cutoff it was produced with
    TruncatedKernel kernel(cfg.kernel, params, cfg.seed);
    if (radii.empty()) radii = cfg.diagnostics.radii;
    if (radii.empty()) radii = default_flux_radii(src.reach(), params.M);

    FluxReport rep = flux_identity_check(snap.state, kernel, src, radii);
    const int d = cfg.dimension;
    std::cout << "R";
    for (int j = 1; j <= d; ++j) std::cout << ",A_" << j;
    for (int j = 1; j <= d; ++j) std::cout << ",expected_" << j;
    std::cout << ",rel_err,beyond_cutoff\n";
    for (std::size_t i = 0; i < rep.radii.size(); ++i) {
        std::cout << fmt17(rep.radii[i]);
        for (double a : rep.A[i]) std::cout << ',' << fmt17(a);
        for (double e : rep.expected[i]) std::cout << ',' << fmt17(e);
        double worst = 0;
        for (double e : rep.rel_err[i]) worst = std::max(worst, e);
        std::cout << ',' << fmt17(worst) << ',' << (rep.beyond_cutoff[i] ? 1 : 0) << "\n";
    }
    std::cerr << "max_rel_err=" << fmt17(rep.max_rel_err) << "\n";
    return 0;
}

int cmd_diagnose(const RunConfig& cfg, const std::string& snapshot_path) {
    Snapshot snap = load_snapshot(snapshot_path);
    if (snap.state.dim() != cfg.dimension)
        throw ConfigError("snapshot dimension does not match the configuration");
    Source src = cfg.source();
    const double M = snap.M;
    json out;

    std::vector<double> zs = cfg.diagnostics.z_grid;
    if (zs.empty()) zs = default_fit_grid(src.reach(), M);
    try {
        ExponentFit fit = fit_tail_exponent(snap.state, cfg.diagnostics.window_b, zs);
        out["tail_fit"] = {{"slope", fit.slope},     {"intercept", fit.intercept},
                           {"r_squared", fit.r_squared}, {"z_min", fit.z_min},
                           {"z_max", fit.z_max},     {"points", fit.points}};
    } catch (const std::invalid_argument& e) {
        out["tail_fit"] = {{"error", e.what()}};
    }

    Moments m = moments(snap.state, src);
    json loc = json::array();
    if (m.injection_total > 0) {
        std::vector<double> theta(m.injection);
        for (double& v : theta) v /= m.injection_total;
        out["theta"] = theta;
        std::vector<double> rads = cfg.diagnostics.localization_radii;
        if (rads.empty()) rads = {M / 8.0, 3.0 * M / 8.0};
        for (double R : rads) {
            json row;
            row["R"] = R;
            try {
                row["ratio"] = localization_ratio(snap.state, R, cfg.diagnostics.band,
                                                  cfg.diagnostics.eps_angle, theta);
            } catch (const EmptyBandError& e) {
                row["error"] = e.what();
            }
            loc.push_back(row);
        }
    }
    out["localization"] = loc;
    out["total_number"] = m.total_number;
    out["injection_total"] = m.injection_total;
    std::cout << out.dump() << "\n";
    return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& out_dir) {
    if (!cfg.sweep.present) throw ConfigError("sweep requires a `sweep` configuration section");
    warn_kernel(cfg);
    SweepResult res = existence_sweep(cfg.kernel, cfg.source(), cfg.sweep.eps_list,
                                      cfg.sweep.M_list, cfg.solver,
                                      cfg.diagnostics.tail_radius);
    fs::create_directories(out_dir);
    std::ofstream csv(out_dir + "/sweep.csv");
    csv << "epsilon,M,converged,total_number,tail_count,residual,t_final\n";
    bool all_converged = true;
    for (const auto& c : res.cells) {
        csv << fmt17(c.epsilon) << ',' << fmt17(c.M) << ',' << (c.converged ? 1 : 0) << ','
            << fmt17(c.total_number) << ',' << fmt17(c.tail_count) << ',' << fmt17(c.residual)
            << ',' << fmt17(c.t_final) << "\n";
        all_converged = all_converged && c.converged;
    }
    json summary;
    summary["verdict"] = to_string(res.verdict);
    summary["cells"] = res.cells.size();
    summary["tail_radius"] = res.tail_radius;
    summary["csv"] = out_dir + "/sweep.csv";
    std::cout << summary.dump() << "\n";
    return all_converged ? 0 : 2;
}

int cmd_oracle(double gamma, int d, std::vector<double> ts, double tol, double c0) {
    if (ts.empty()) ts = {1.0, 2.0, 4.0};
    RayAnsatz ansatz{gamma, c0, d};
    RayKernel G = [gamma](double r, double rho) { return std::pow(r + rho, gamma); };
    try {
        std::vector<QuadResult> rows;
        for (double t : ts) rows.push_back(flux_integral(ansatz, G, t, tol));
        std::cout << "t,J,quad_err\n";
        for (std::size_t i = 0; i < ts.size(); ++i)
            std::cout << fmt17(ts[i]) << ',' << fmt17(rows[i].value) << ','
                      << fmt17(rows[i].error) << "\n";
    } catch (const NonIntegrableFlux& e) {
        json out;
        out["integrable"] = "no";
        out["gamma"] = gamma;
        out["reason"] = e.what();
        std::cout << out.dump() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stationary injection solutions of the multicomponent coagulation equation"};
    app.require_subcommand(1);

    std::string config_path, snapshot_path, out_override;
    std::vector<double> radii;

    auto* classify_cmd = app.add_subcommand("classify", "kernel envelope and existence check");
    classify_cmd->add_option("--config", config_path, "run configuration (JSON)")->required();

    auto* simulate_cmd = app.add_subcommand("simulate", "integrate to the steady state");
    simulate_cmd->add_option("--config", config_path)->required();
    simulate_cmd->add_option("--out", out_override, "output directory override");

    auto* flux_cmd = app.add_subcommand("flux", "flux constancy report for a snapshot");
    flux_cmd->add_option("--config", config_path)->required();
    flux_cmd->add_option("--snapshot", snapshot_path)->required();
    flux_cmd->add_option("--radii", radii, "surface radii")->delimiter(',');

    auto* diagnose_cmd = app.add_subcommand("diagnose", "tail exponent and localization");
    diagnose_cmd->add_option("--config", config_path)->required();
    diagnose_cmd->add_option("--snapshot", snapshot_path)->required();

    auto* sweep_cmd = app.add_subcommand("sweep", "existence probe over (epsilon, M)");
    sweep_cmd->add_option("--config", config_path)->required();
    sweep_cmd->add_option("--out", out_override);

    double o_gamma = 0, o_tol = 1e-8, o_c0 = 1.0;
    int o_d = 1;
    std::vector<double> o_ts;
    auto* oracle_cmd = app.add_subcommand("oracle", "constant-flux quadrature oracle");
    oracle_cmd->add_option("--gamma", o_gamma, "ray kernel homogeneity")->required();
    oracle_cmd->add_option("--d", o_d, "number of species");
    oracle_cmd->add_option("--t", o_ts, "surface scales")->delimiter(',');
    oracle_cmd->add_option("--tol", o_tol, "quadrature tolerance");
    oracle_cmd->add_option("--c0", o_c0, "ansatz amplitude");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help();
        return 1;
    }

    try {
        if (oracle_cmd->parsed()) return cmd_oracle(o_gamma, o_d, o_ts, o_tol, o_c0);
        RunConfig cfg = load_config(config_path);
        if (!out_override.empty()) cfg.output.directory = out_override;
        if (classify_cmd->parsed()) return cmd_classify(cfg);
        if (simulate_cmd->parsed()) return cmd_simulate(cfg, cfg.output.directory);
        if (flux_cmd->parsed()) return cmd_flux(cfg, snapshot_path, radii);
        if (diagnose_cmd->parsed()) return cmd_diagnose(cfg, snapshot_path);
        if (sweep_cmd->parsed()) return cmd_sweep(cfg, cfg.output.directory);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const SnapshotFormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
