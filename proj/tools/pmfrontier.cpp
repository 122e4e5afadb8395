// pmfrontier: run, validate, and summarize porous-medium front experiments.
//
//   pmfrontier run <config>       parse, gate-check, execute, write artifacts
//   pmfrontier validate <config>  parse and gate-check only
//   pmfrontier report <dir>       reprint the summary of a finished experiment
//
// Exit status 0 iff every check passed. PMFRONTIER_OUT overrides the
// configured output directory.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pmf/config.hpp"
#include "pmf/dispatch.hpp"

namespace {

const char* kConfigReference = R"(config file reference (key = value lines, '#' comments):

[model]
  kind            tumor | fisher-kpp | custom
  m               diffusion exponent, dimensionless, > 1
  p_m             pressure threshold where G vanishes (pressure units; derived for fisher-kpp)
  p_h             a priori pressure bound >= p_m (pressure units; default p_m)
  custom_g_table  comma list of P:G knots, e.g. 0:1,0.5:0.5,1:0 (custom only)

[grid]
  kind            radial | cartesian2d
  n_dim           spatial dimension of the radial Laplacian, >= 2
  h               cell size (length units)
  extent          max radius / half-width (length units; exact multiple of h)
  guard_band      outer cells that must stay vacuum, >= 2 (cells)
  cfl_safety      explicit-step safety factor in (0, 1]

[initial]
  kind            barrier-sub | barrier-sup | barenblatt | table
  alpha0, beta0   sub-barrier level/curvature (pressure, pressure/length^2)
  lambda0, kappa0 super-barrier level/curvature (pressure, pressure/length^2)
  c               barenblatt profile constant (dimensionless)
  t0              barenblatt start time (time units)
  path            CSV with per-cell densities (table initial data)

[experiment]
  kind            simulate | barriers | sandwich-sub | sandwich-sup | decay |
                  pme-converge | frontier-diag
  t_end           end time (time units)
  snapshot_count  uniform snapshots including endpoints
  snapshot_times  explicit comma list overriding snapshot_count (time units)
  dt_ode          barrier ODE integrator step (time units)
  fit_radius      ball radius for decay fits (length units)
  fit_t_lo/hi     fit window (time units; 0 = experiment default)
  refine          extra half-h refinement levels
  output_dir      artifact directory
  tol_upper       allowed excess of P over p_m (pressure units)
  sandwich_ratio_max  required violation shrink factor under h -> h/2
  decay_exp_lo/hi acceptance band for the decay exponent
  darcy_median_max    allowed median |V - |grad P|| / |V|
  ab_margin_factor    allowed negative margin as a multiple of p_m
  support_r0      coverage ball for T0 detection (length units; <0 = measured)
)";

int do_validate(const std::string& path, bool quiet) {
    std::ifstream f(path);
    if (!f) {
        std::cerr << "cannot open config: " << path << "\n";
        return 2;
    }
    std::stringstream ss;
    ss << f.rdbuf();
    pmf::ParseResult parsed = pmf::parse_config(ss.str());
    if (!parsed.ok()) {
        for (const pmf::ConfigError& e : parsed.errors) std::cerr << e.str() << "\n";
        return 1;
    }
    if (!quiet)
        std::cout << "config ok: " << parsed.config->experiment_name() << " experiment, "
                  << parsed.config->model.kind_name() << " model\n";
    return 0;
}

int do_run(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        std::cerr << "cannot open config: " << path << "\n";
        return 2;
    }
    std::stringstream ss;
    ss << f.rdbuf();
    pmf::ParseResult parsed = pmf::parse_config(ss.str());
    if (!parsed.ok()) {
        for (const pmf::ConfigError& e : parsed.errors) std::cerr << e.str() << "\n";
        return 1;
    }
    pmf::DispatchResult result = pmf::dispatch(*parsed.config);
    for (const std::string& line : result.check_lines) std::cout << line << "\n";
    std::cout << "artifacts: " << result.output_dir.string() << "\n";
    return result.status;
}

int do_report(const std::string& dir) {
    std::filesystem::path summary = std::filesystem::path(dir) / "summary.txt";
    std::ifstream f(summary);
    if (!f) {
        std::cerr << "no summary at " << summary.string() << "\n";
        return 2;
    }
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    std::cout << text;
    return text.find("overall: PASS") != std::string::npos ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pmfrontier: porous-medium reaction-diffusion front laboratory"};
    app.footer(kConfigReference);
    app.require_subcommand(1);

    std::string config_path, report_dir;
    bool quiet = false;

    CLI::App* run_cmd = app.add_subcommand("run", "execute an experiment config");
    run_cmd->add_option("config", config_path, "config file")->required();

    CLI::App* val_cmd = app.add_subcommand("validate", "parse and gate-check a config");
    val_cmd->add_option("config", config_path, "config file")->required();
    val_cmd->add_flag("-q,--quiet", quiet, "suppress the ok line");

    CLI::App* rep_cmd = app.add_subcommand("report", "print the summary of a finished run");
    rep_cmd->add_option("dir", report_dir, "experiment output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return do_run(config_path);
        if (val_cmd->parsed()) return do_validate(config_path, quiet);
        return do_report(report_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
