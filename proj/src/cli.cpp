#include "cavsq/cli.hpp"

#include "cavsq/design.hpp"
#include "cavsq/exact_oracle.hpp"
#include "cavsq/feedback_analytic.hpp"
#include "cavsq/parallel.hpp"
#include "cavsq/raman.hpp"
#include "cavsq/serialize.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

namespace cavsq
{

namespace
{
namespace fs = std::filesystem;
using nlohmann::json;

struct RunContext
{
    std::string command;
    std::vector<std::string> args;
    fs::path out_dir = ".";
    json config = json::object();
    std::optional<std::uint64_t> seed;
    std::vector<std::string> outputs;
};

std::ofstream open_output(RunContext& ctx, std::string const& name)
{
    fs::create_directories(ctx.out_dir);
    auto const path = ctx.out_dir / name;
    std::ofstream file(path, std::ios::binary);
    if (!file)
        throw std::runtime_error("cannot write " + path.string());
    ctx.outputs.push_back(name);
    return file;
}

void write_manifest(RunContext const& ctx, double wall_seconds)
{
    json manifest = {{"command", ctx.command},
                     {"argv", ctx.args},
                     {"config", ctx.config},
                     {"seed", ctx.seed ? json(*ctx.seed) : json(nullptr)},
                     {"tool_version", kToolVersion},
                     {"schema_version", kSchemaVersion},
                     {"wall_time_s", wall_seconds},
                     {"outputs", ctx.outputs}};
    fs::create_directories(ctx.out_dir);
    std::ofstream file(ctx.out_dir / (ctx.command + ".manifest.json"), std::ios::binary);
    file << manifest.dump(2) << '\n';
}

std::vector<double> make_grid(double lo, double hi, int points, bool log_grid)
{
    if (points < 1 || !(lo > 0) || !(hi >= lo))
        throw std::invalid_argument("grid needs 0 < min <= max and at least one point");
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
    {
        double const frac = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        grid[static_cast<std::size_t>(i)]
            = log_grid ? std::exp(std::log(lo) + frac * (std::log(hi) - std::log(lo)))
                       : lo + frac * (hi - lo);
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

//---------------------------------------------------------------------------//
struct Fig2Args
{
    double spin = 1e4;
    std::vector<double> etas;
    double qmin = 0.1;
    double qmax = 1000;
    int qpoints = 200;
    bool log_grid = false;
    unsigned workers = 1;
};

int run_fig2(Fig2Args const& a, RunContext& ctx, std::ostream& out)
{
    auto const spec = EnsembleSpec::from_spin(a.spin);
    std::vector<double> etas = a.etas.empty() ? std::vector<double>{0.001, 0.01, 0.1, 1.0}
                                              : a.etas;
    auto const grid = make_grid(a.qmin, a.qmax, a.qpoints, a.log_grid);
    ctx.config = {{"S", a.spin}, {"eta", etas},         {"qmin", a.qmin},
                  {"qmax", a.qmax}, {"qpoints", a.qpoints}, {"log_grid", a.log_grid}};

    std::vector<std::vector<Fig2Point>> curves(etas.size());
    parallel_for(etas.size(), a.workers,
                 [&](std::size_t i) { curves[i] = fig2_curve(spec, etas[i], grid); });

    auto file = open_output(ctx, "fig2.csv");
    CsvWriter csv(file, {"eta", "Q", "sigma_min_sq", "sigma_curv_sq", "sigma_ideal_sq"});
    for (auto const& curve : curves)
    {
        for (auto const& p : curve)
        {
            csv.cell(p.eta).cell(p.q).cell(p.sigma_min_sq).cell(p.sigma_curv_sq)
                .cell(p.sigma_ideal_sq);
            csv.end_row();
        }
    }
    for (std::size_t i = 0; i < etas.size(); ++i)
    {
        auto best = std::min_element(curves[i].begin(), curves[i].end(),
                                     [](auto const& x, auto const& y) {
                                         return x.sigma_min_sq < y.sigma_min_sq;
                                     });
        out << "eta=" << format_double(etas[i]) << " grid minimum sigma^2="
            << format_double(best->sigma_min_sq) << " at Q=" << format_double(best->q) << '\n';
    }
    return 0;
}

//---------------------------------------------------------------------------//
struct OracleArgs
{
    double smax = 200;
    double tol = 1e-10;
    unsigned workers = 1;
};

double rel_err(double a, double b)
{
    double const scale = std::max(std::abs(a), std::abs(b));
    return scale == 0 ? 0.0 : std::abs(a - b) / scale;
}

int run_validate_oracle(OracleArgs const& a, RunContext& ctx, std::ostream& out)
{
    ctx.config = {{"smax", a.smax}, {"tol", a.tol}};
    std::vector<double> spins;
    for (double s : {0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0, 200.0})
        if (s <= a.smax)
            spins.push_back(s);
    if (spins.empty())
        throw std::invalid_argument("--smax excludes every grid spin");

    struct Row
    {
        double s, q, vy_c, vy_o, e_vy, w_c, w_o, e_w;
        bool pass;
    };
    constexpr std::size_t n_q = 5;
    std::vector<Row> rows(spins.size() * n_q);
    parallel_for(rows.size(), a.workers, [&](std::size_t i) {
        double const s = spins[i / n_q];
        double const qs[n_q] = {0.0, 0.1, 1.0, 5.0, 0.5 * s};
        double const q = qs[i % n_q];
        auto const spec = EnsembleSpec::from_spin(s);
        auto const closed = analytic_moments(spec, q);
        auto const oracle = oracle_moments_sum(spec, q);
        Row r{s, q, closed.var_y, oracle.var_y, rel_err(closed.var_y, oracle.var_y),
              closed.cov_w, oracle.cov_w, rel_err(closed.cov_w, oracle.cov_w), false};
        r.pass = r.e_vy <= a.tol && r.e_w <= a.tol;
        rows[i] = r;
    });

    auto file = open_output(ctx, "validate_oracle.csv");
    CsvWriter csv(file, {"S", "Q", "var_y_closed", "var_y_oracle", "rel_err", "cov_closed",
                         "cov_oracle", "rel_err", "pass"});
    std::size_t passed = 0;
    double worst = 0;
    for (auto const& r : rows)
    {
        csv.cell(r.s).cell(r.q).cell(r.vy_c).cell(r.vy_o).cell(r.e_vy).cell(r.w_c)
            .cell(r.w_o).cell(r.e_w).cell(r.pass);
        csv.end_row();
        passed += r.pass ? 1 : 0;
        worst = std::max({worst, r.e_vy, r.e_w});
    }
    out << "validate-oracle: " << passed << "/" << rows.size()
        << " grid points pass, max rel_err " << format_double(worst) << " (tol "
        << format_double(a.tol) << ")\n";
    return passed == rows.size() ? 0 : 2;
}

//---------------------------------------------------------------------------//
struct RamanArgs
{
    double spin = 1000;
    double r = 0.1;
    std::size_t traj = 10000;
    int steps = 64;
    std::optional<std::uint64_t> seed;
    std::string mode = "auto";
    unsigned workers = 1;
    bool lag_csv = false;
};

int run_raman_mc(RamanArgs const& a, RunContext& ctx, std::ostream& out)
{
    if (!a.seed)
        throw CLI::RequiredError("--seed");
    auto const spec = EnsembleSpec::from_spin(a.spin);
    auto const process = RamanProcess::make(spec, a.r);
    McOptions opts;
    opts.n_traj = a.traj;
    opts.time_steps = a.steps;
    opts.seed = *a.seed;
    opts.mode = mc_mode_from_string(a.mode);
    opts.workers = a.workers;
    ctx.seed = a.seed;
    ctx.config = {{"S", a.spin},   {"r", a.r},       {"traj", a.traj},
                  {"steps", a.steps}, {"mode", a.mode}};

    auto const stats = sample_trajectories(process, spec, opts);
    auto const analytic = correlation_integrals(a.r);
    json j = to_json(stats);
    j["S"] = a.spin;
    j["r"] = a.r;
    j["seed"] = *a.seed;
    j["analytic"] = {{"c_bar_sq", analytic.c_bar_sq}, {"c_bar_final", analytic.c_bar_final}};
    {
        auto file = open_output(ctx, "raman_mc.json");
        file << j.dump(2) << '\n';
    }
    if (a.lag_csv)
    {
        auto file = open_output(ctx, "raman_lags.csv");
        CsvWriter csv(file, {"lag_over_t", "corr", "std_error", "target"});
        for (auto const& l : stats.lags)
        {
            csv.cell(l.lag_fraction).cell(l.value).cell(l.std_error)
                .cell(std::exp(-2.0 * a.r * l.lag_fraction));
            csv.end_row();
        }
    }
    out << "raman-mc: " << stats.n_trajectories << " trajectories (" << to_string(stats.mode_used)
        << "), c_bar_sq=" << format_double(stats.c_bar_sq) << " +/- "
        << format_double(stats.c_bar_sq_se) << " (analytic " << format_double(analytic.c_bar_sq)
        << ")\n";
    return 0;
}

//---------------------------------------------------------------------------//
struct DesignArgs
{
    std::string config;
    std::optional<double> q;
    double eps_max = 1e-5;
};

int run_design(DesignArgs const& a, RunContext& ctx, std::ostream& out)
{
    auto const cfg = load_config(a.config);
    ctx.config = to_json(cfg);
    ctx.config["eps_max"] = a.eps_max;
    if (a.q)
        ctx.config["q_target"] = *a.q;

    DesignTargets targets;
    targets.q = a.q;
    if (!targets.q && cfg.p0)
        targets.q = shearing_strength(cfg.ensemble(), cfg.params(), *cfg.p0);
    targets.pulse_time = cfg.t_s;
    targets.thresholds.max_excited_pop = a.eps_max;
    auto const rep = design_report(cfg.ensemble(), cfg.params(), targets);
    json j = to_json(rep);
    j["config"] = to_json(cfg);
    {
        auto file = open_output(ctx, "design_report.json");
        file << j.dump(2) << '\n';
    }
    out << "design: " << to_string(rep.classification.regime)
        << "-limited, recommended Q=" << format_double(rep.q_recommended)
        << ", kappa*t >= " << format_double(rep.kappa_t_min) << '\n';
    return 0;
}

//---------------------------------------------------------------------------//
struct SweepArgs
{
    double smin = 1e2, smax = 1e6;
    int spoints = 9;
    double etamin = 1e-4, etamax = 10;
    int etapoints = 11;
    unsigned workers = 1;
};

int run_sweep(SweepArgs const& a, RunContext& ctx, std::ostream& out)
{
    ctx.config = {{"smin", a.smin},     {"smax", a.smax},     {"spoints", a.spoints},
                  {"etamin", a.etamin}, {"etamax", a.etamax}, {"etapoints", a.etapoints}};
    auto spins = make_grid(a.smin, a.smax, a.spoints, true);
    for (auto& s : spins)
        s = std::max(1.0, std::round(2.0 * s) / 2.0);
    auto const etas = make_grid(a.etamin, a.etamax, a.etapoints, true);
    auto const rows = design_sweep(spins, etas, a.workers);

    auto file = open_output(ctx, "sweep.csv");
    CsvWriter csv(file, {"S", "eta", "s_eta5", "regime", "q_curv", "sigma_curv_sq", "q_scatt",
                         "sigma_scatt_sq", "q_full_opt", "sigma_full_min", "rule_agrees"});
    std::size_t agree = 0;
    for (auto const& r : rows)
    {
        csv.cell(r.spin).cell(r.eta).cell(r.classification.s_eta5)
            .cell(std::string(to_string(r.classification.regime)))
            .cell(r.curvature.q_curv).cell(r.curvature.sigma_curv_sq)
            .cell(r.scattering.q_scatt).cell(r.scattering.sigma_sq)
            .cell(r.full.q).cell(r.full.sigma_min_sq).cell(r.rule_agrees);
        csv.end_row();
        agree += r.rule_agrees ? 1 : 0;
    }
    out << "sweep: " << rows.size() << " grid points, S*eta^5 rule agrees on " << agree << '\n';
    return 0;
}
}  // namespace

int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Cavity-feedback spin squeezing toolkit", "cavsq"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    std::string out_dir = ".";
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", out_dir, "Output directory");
    };

    Fig2Args fig2;
    auto* fig2_cmd = app.add_subcommand("fig2", "Minimum variance vs shearing strength");
    fig2_cmd->add_option("--S", fig2.spin, "Total spin S")->capture_default_str();
    fig2_cmd->add_option("--eta", fig2.etas, "Single-atom cooperativity (repeatable)")
        ->take_all();
    fig2_cmd->add_option("--qmin", fig2.qmin, "Smallest Q")->capture_default_str();
    fig2_cmd->add_option("--qmax", fig2.qmax, "Largest Q")->capture_default_str();
    fig2_cmd->add_option("--qpoints", fig2.qpoints, "Q grid points per eta")->capture_default_str();
    fig2_cmd->add_flag("--log-grid", fig2.log_grid, "Log-spaced Q grid");
    fig2_cmd->add_option("--workers", fig2.workers, "Worker threads (0: all cores)")->capture_default_str();
    add_common(fig2_cmd);

    OracleArgs oracle;
    auto* oracle_cmd = app.add_subcommand("validate-oracle",
                                          "Closed forms vs brute-force Dicke sums");
    oracle_cmd->add_option("--smax", oracle.smax, "Largest S in the grid")->capture_default_str();
    oracle_cmd->add_option("--tol", oracle.tol, "Relative tolerance; exit 2 above it")->capture_default_str();
    oracle_cmd->add_option("--workers", oracle.workers, "Worker threads (0: all cores)")->capture_default_str();
    add_common(oracle_cmd);

    RamanArgs raman;
    std::uint64_t seed_value = 0;
    auto* raman_cmd = app.add_subcommand("raman-mc", "Monte Carlo of Raman-flipped S_z");
    raman_cmd->add_option("--S", raman.spin, "Total spin S")->capture_default_str();
    raman_cmd->add_option("--r", raman.r, "Scattered photons per atom / 2")->capture_default_str();
    raman_cmd->add_option("--traj", raman.traj, "Number of trajectories")->capture_default_str();
    raman_cmd->add_option("--steps", raman.steps, "Time steps per pulse")->capture_default_str();
    auto* seed_opt = raman_cmd->add_option("--seed", seed_value, "Base seed")->required();
    raman_cmd->add_option("--mode", raman.mode, "Per-atom jumps or Gaussian aggregate")
        ->check(CLI::IsMember({"auto", "exact", "gaussian"}))
        ->capture_default_str();
    raman_cmd->add_option("--workers", raman.workers, "Worker threads (0: all cores)")->capture_default_str();
    raman_cmd->add_flag("--lag-csv", raman.lag_csv, "Also write per-lag correlations");
    add_common(raman_cmd);

    DesignArgs design;
    double q_target = 0;
    auto* design_cmd = app.add_subcommand("design", "Operating point from a config file");
    design_cmd->add_option("--config", design.config, "Parameter file")->required();
    auto* q_opt = design_cmd->add_option("--q", q_target, "Target shearing strength (default: from p0 in the config, else the optimum)");
    design_cmd->add_option("--eps-max", design.eps_max, "Excited-state population ceiling")->capture_default_str();
    add_common(design_cmd);

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Regime scan over (S, eta)");
    sweep_cmd->add_option("--smin", sweep.smin, "Smallest S")->capture_default_str();
    sweep_cmd->add_option("--smax", sweep.smax, "Largest S")->capture_default_str();
    sweep_cmd->add_option("--spoints", sweep.spoints, "Log-spaced S values")->capture_default_str();
    sweep_cmd->add_option("--etamin", sweep.etamin, "Smallest eta")->capture_default_str();
    sweep_cmd->add_option("--etamax", sweep.etamax, "Largest eta")->capture_default_str();
    sweep_cmd->add_option("--etapoints", sweep.etapoints, "Log-spaced eta values")->capture_default_str();
    sweep_cmd->add_option("--workers", sweep.workers, "Worker threads (0: all cores)")->capture_default_str();
    add_common(sweep_cmd);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try
    {
        app.parse(reversed);
    }
    catch (CLI::CallForHelp const&)
    {
        out << app.help();
        return 0;
    }
    catch (CLI::CallForVersion const&)
    {
        out << kToolVersion << '\n';
        return 0;
    }
    catch (CLI::ParseError const& e)
    {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    RunContext ctx;
    ctx.args = args;
    ctx.out_dir = out_dir;
    auto const start = std::chrono::steady_clock::now();
    int code = 0;
    try
    {
        if (fig2_cmd->parsed())
        {
            ctx.command = "fig2";
            code = run_fig2(fig2, ctx, out);
        }
        else if (oracle_cmd->parsed())
        {
            ctx.command = "validate-oracle";
            code = run_validate_oracle(oracle, ctx, out);
        }
        else if (raman_cmd->parsed())
        {
            ctx.command = "raman-mc";
            if (seed_opt->count())
                raman.seed = seed_value;
            code = run_raman_mc(raman, ctx, out);
        }
        else if (design_cmd->parsed())
        {
            ctx.command = "design";
            if (q_opt->count())
                design.q = q_target;
            code = run_design(design, ctx, out);
        }
        else if (sweep_cmd->parsed())
        {
            ctx.command = "sweep";
            code = run_sweep(sweep, ctx, out);
        }
    }
    catch (std::exception const& e)
    {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    double const wall
        = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(ctx, wall);
    return code;
}

}  // namespace cavsq
