#include "pmf/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pmf/frontier.hpp"
#include "pmf/io.hpp"
#include "pmf/verify.hpp"

namespace pmf {

namespace {

class Checks {
  public:
    void add(const std::string& name, bool pass, const std::string& detail) {
        lines_.push_back(std::string(pass ? "PASS  " : "FAIL  ") + name + ": " + detail);
        all_pass_ = all_pass_ && pass;
    }
    bool all_pass() const { return all_pass_; }
    const std::vector<std::string>& lines() const { return lines_; }

  private:
    std::vector<std::string> lines_;
    bool all_pass_ = true;
};

std::vector<double> snapshot_schedule(const RunConfig& c, double t0) {
    if (!c.snapshot_times.empty()) return c.snapshot_times;
    int count = std::max(2, c.snapshot_count);
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i)
        out[i] = t0 + (c.t_end - t0) * static_cast<double>(i) / (count - 1);
    out.back() = c.t_end;
    return out;
}

Field load_table_field(const RunConfig& c) {
    std::ifstream f(c.table_path);
    if (!f) throw std::runtime_error("table initial data: cannot open " + c.table_path);
    Field field = Field::zeros(c.grid);
    std::string line;
    std::getline(f, line);  // header
    std::size_t i = 0;
    while (std::getline(f, line) && i < field.rho.size()) {
        std::size_t comma = line.find(',');
        if (comma == std::string::npos) continue;
        std::size_t second = line.find(',', comma + 1);
        std::string v = second == std::string::npos ? line.substr(comma + 1)
                                                    : line.substr(comma + 1, second - comma - 1);
        field.rho[i++] = std::stod(v);
    }
    if (i != field.rho.size())
        throw std::runtime_error("table initial data: expected " +
                                 std::to_string(field.rho.size()) + " cells, got " +
                                 std::to_string(i));
    return field;
}

Field build_initial(const RunConfig& c, double* t0) {
    *t0 = 0.0;
    switch (c.initial) {
        case InitialKind::BarrierSub: {
            Barrier b = make_sub_barrier(c.sub_params(), 0.0, c.dt_ode);
            Field f = Field::zeros(c.grid);
            for (int i = 0; i < c.grid.total_cells(); ++i)
                f.rho[static_cast<std::size_t>(i)] = density_from_pressure(
                    b.value(0.0, c.grid.center_distance(i)), c.model.m);
            return f;
        }
        case InitialKind::BarrierSup: {
            const LVSupParams sup = c.sup_params();
            Field f = Field::zeros(c.grid);
            for (int i = 0; i < c.grid.total_cells(); ++i) {
                double r = c.grid.center_distance(i);
                double q = c.alpha0 > 0.0
                               ? std::max(c.alpha0 - c.beta0 * r * r, 0.0)
                               : std::max(sup.lambda0 - sup.kappa0 * r * r, 0.0);
                f.rho[static_cast<std::size_t>(i)] = density_from_pressure(q, c.model.m);
            }
            return f;
        }
        case InitialKind::Barenblatt: {
            *t0 = c.bb_t0;
            return barenblatt_field(c.grid, c.model.m, c.bb_c, c.bb_t0);
        }
        case InitialKind::Table:
            return load_table_field(c);
    }
    throw std::logic_error("build_initial: bad kind");
}

void write_radial_snapshot(const std::filesystem::path& dir, int index, const Field& f,
                           const ModelSpec& spec) {
    Csv csv;
    std::vector<double> r(f.rho.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = f.geom.center_distance(static_cast<int>(i));
    csv.add("r", r);
    csv.add("rho", f.rho);
    csv.add("P", pressure_field(f, spec));
    char name[32];
    std::snprintf(name, sizeof(name), "snapshot_%03d.csv", index);
    write_text_file(dir / name, csv.to_string());
}

// dense-matrix text format for Cartesian fields: header line with the
// geometry, then row-major values
void write_cartesian_snapshot(const std::filesystem::path& dir, int index, const Field& f) {
    std::string out = "# cartesian2d h=" + format_float(f.geom.h) +
                      " extent=" + format_float(f.geom.extent) +
                      " side=" + std::to_string(f.geom.side()) + " t=" + format_float(f.t) + "\n";
    int n = f.geom.side();
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (i) out += ' ';
            out += format_float(f.rho[static_cast<std::size_t>(j) * n + i]);
        }
        out += '\n';
    }
    char name[32];
    std::snprintf(name, sizeof(name), "snapshot_%03d.txt", index);
    write_text_file(dir / name, out);
}

void write_snapshots(const std::filesystem::path& dir, const RunResult& rr,
                     const ModelSpec& spec) {
    for (std::size_t k = 0; k < rr.snapshots.size(); ++k) {
        const Field& f = rr.snapshots[k];
        if (f.geom.kind == GridKind::RadialND)
            write_radial_snapshot(dir, static_cast<int>(k), f, spec);
        else
            write_cartesian_snapshot(dir, static_cast<int>(k), f);
    }
    Csv diag;
    diag.add("t", rr.diag.times);
    diag.add("mass", rr.diag.mass);
    diag.add("max_rho", rr.diag.max_rho);
    diag.add("support_radius", rr.diag.support_radius);
    write_text_file(dir / "diagnostics.csv", diag.to_string());
}

void write_trajectory(const std::filesystem::path& path, const LVTrajectory& traj) {
    Csv csv;
    std::vector<double> first(traj.size()), second(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        first[i] = traj.states[i].first;
        second[i] = traj.states[i].second;
    }
    csv.add("t", traj.times);
    csv.add("first", first);
    csv.add("second", second);
    write_text_file(path, csv.to_string());
}

double median_finite(std::vector<double> v) {
    v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return !std::isfinite(x); }),
            v.end());
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

// ---------------------------------------------------------------------------

void run_barriers(const RunConfig& c, const std::filesystem::path& dir, Checks& checks,
                  Report& report) {
    if (c.initial == InitialKind::BarrierSub) {
        LVSubParams lv = c.sub_params();
        GateCheck gate = check_gate_sub(lv);
        report.set("gate_margin_lower", gate.margin_lower);
        report.set("gate_margin_upper", gate.margin_upper);
        LVTrajectory traj = integrate_sub(lv, c.t_end, c.dt_ode);
        write_trajectory(dir / "trajectory.csv", traj);

        Csv bounds;
        std::vector<double> f1u, f2l, bl, bh, gl, gh;
        for (double t : traj.times) {
            SubBounds b = closed_form_bounds_sub(lv, t);
            f1u.push_back(b.f1_upper);
            f2l.push_back(b.f2_lower);
            bl.push_back(b.beta_low);
            bh.push_back(b.beta_high);
            gl.push_back(b.gap_low);
            gh.push_back(b.gap_high);
        }
        bounds.add("t", traj.times);
        bounds.add("f1_upper", f1u);
        bounds.add("f2_lower", f2l);
        bounds.add("beta_low", bl);
        bounds.add("beta_high", bh);
        bounds.add("gap_low", gl);
        bounds.add("gap_high", gh);
        write_text_file(dir / "bounds.csv", bounds.to_string());

        double viol = worst_band_violation_sub(lv, traj);
        report.set("band_violation", viol);
        checks.add("bands", viol <= 1e-6 * lv.p_m,
                   "worst closed-form band violation " + format_float(viol));

        if (c.t_end >= 100.0) {
            std::vector<double> gap(traj.size());
            for (std::size_t i = 0; i < traj.size(); ++i)
                gap[i] = lv.p_m - traj.states[i].first;
            double lo = c.fit_t_lo > 0.0 ? c.fit_t_lo : c.t_end / 100.0;
            double hi = c.fit_t_hi > 0.0 ? c.fit_t_hi : c.t_end;
            RateFit fit = fit_power_law(traj.times, gap, lo, hi);
            report.set("decay_exponent", fit.exponent);
            report.set("decay_residual_rms", fit.residual_rms);
            checks.add("ode_decay_rate",
                       fit.exponent >= c.decay_exp_lo && fit.exponent <= c.decay_exp_hi,
                       "exponent " + format_float(fit.exponent));
        }
    } else if (c.initial == InitialKind::BarrierSup) {
        LVSupParams lv = c.sup_params();
        GateCheck gate = check_gate_sup(lv);
        report.set("gate_margin_lower", gate.margin_lower);
        report.set("gate_margin_upper", gate.margin_upper);
        LVTrajectory traj = integrate_sup(lv, c.t_end, c.dt_ode);
        write_trajectory(dir / "trajectory.csv", traj);

        Csv bounds;
        std::vector<double> rl, rh, kl, kh, gl, gh;
        for (double t : traj.times) {
            SupBounds b = closed_form_bounds_sup(lv, t);
            rl.push_back(b.ratio_low);
            rh.push_back(b.ratio_high);
            kl.push_back(b.kappa_low);
            kh.push_back(b.kappa_high);
            gl.push_back(b.gap_low);
            gh.push_back(b.gap_high);
        }
        bounds.add("t", traj.times);
        bounds.add("ratio_low", rl);
        bounds.add("ratio_high", rh);
        bounds.add("kappa_low", kl);
        bounds.add("kappa_high", kh);
        bounds.add("gap_low", gl);
        bounds.add("gap_high", gh);
        write_text_file(dir / "bounds.csv", bounds.to_string());

        double viol = worst_band_violation_sup(lv, traj);
        report.set("band_violation_rel", viol);
        checks.add("bands", viol <= 1e-6, "worst relative band violation " + format_float(viol));
    } else {
        throw std::runtime_error("barriers experiment needs a barrier initial kind");
    }
}

void run_sandwich_sub(const RunConfig& c, const std::filesystem::path& dir, Checks& checks,
                      Report& report) {
    SandwichSubConfig sc;
    sc.spec = c.model;
    sc.lv = c.sub_params();
    sc.geom = c.grid;
    sc.t_end = c.t_end;
    sc.snapshot_count = c.snapshot_count;
    sc.cfl_safety = c.cfl_safety;
    sc.guard_band = c.guard_band;
    sc.dt_ode = c.dt_ode;

    auto write_violations = [&](const SandwichSubResult& res, const std::string& tag) {
        report.set(tag + "_max_lower_violation", res.report.max_lower_violation);
        report.set(tag + "_max_upper_violation", res.report.max_upper_violation);
        report.set(tag + "_tolerance_used", res.report.tolerance_used);
    };

    if (c.refine > 0) {
        SandwichPairResult pair = experiment_sandwich_sub_refined(sc);
        write_violations(pair.coarse, "coarse");
        write_violations(pair.fine, "fine");
        report.set("c_tol", pair.c_tol);
        report.set("refinement_ratio", pair.refinement_ratio);
        checks.add("lower_sandwich",
                   pair.coarse.report.max_lower_violation <= pair.coarse.report.tolerance_used,
                   "Q - P_num <= tol_h, violation " +
                       format_float(pair.coarse.report.max_lower_violation));
        checks.add("upper_sandwich", pair.coarse.report.max_upper_violation <= c.tol_upper,
                   "P_num - p_m max " + format_float(pair.coarse.report.max_upper_violation));
        checks.add("refinement", pair.refinement_ratio <= c.sandwich_ratio_max,
                   "violation ratio h/2 over h = " + format_float(pair.refinement_ratio));
        checks.add("support_monotone",
                   worst_support_shrink(pair.coarse.run, support_eps(c.model)) == 0,
                   "interior erosion cells");
        write_snapshots(dir, pair.coarse.run, c.model);
    } else {
        SandwichSubResult res = experiment_sandwich_sub(sc);
        write_violations(res, "single");
        checks.add("lower_sandwich",
                   res.report.max_lower_violation <= res.report.tolerance_used,
                   "violation " + format_float(res.report.max_lower_violation));
        checks.add("upper_sandwich", res.report.max_upper_violation <= c.tol_upper,
                   "P_num - p_m max " + format_float(res.report.max_upper_violation));
        checks.add("support_monotone", worst_support_shrink(res.run, support_eps(c.model)) == 0,
                   "interior erosion cells");
        write_snapshots(dir, res.run, c.model);
    }
}

void run_sandwich_sup(const RunConfig& c, const std::filesystem::path& dir, Checks& checks,
                      Report& report) {
    SandwichSupConfig sc;
    sc.spec = c.model;
    sc.lv = c.sup_params();
    if (c.alpha0 > 0.0) sc.sub_lv = c.sub_params();
    sc.geom = c.grid;
    sc.t_end = c.t_end;
    sc.snapshot_count = c.snapshot_count;
    sc.cfl_safety = c.cfl_safety;
    sc.guard_band = c.guard_band;
    sc.dt_ode = c.dt_ode;

    SandwichSupResult res = experiment_sandwich_sup(sc);
    double tol_h = res.report.tolerance_used;
    report.set("max_upper_violation", res.report.max_upper_violation);
    report.set("max_lower_violation", res.report.max_lower_violation);
    report.set("tolerance_used", tol_h);
    report.set("max_support_excess", res.max_support_excess);
    report.set("max_analytic_excess", res.max_analytic_excess);
    report.set("min_gap_slack", res.min_gap_slack);

    checks.add("upper_barrier", res.report.max_upper_violation <= tol_h,
               "P_num - Q_sup max " + format_float(res.report.max_upper_violation));
    checks.add("support_bound", res.max_support_excess <= c.grid.h,
               "excess over sqrt(lambda/kappa) " + format_float(res.max_support_excess));
    checks.add("support_bound_exponential", res.max_analytic_excess <= c.grid.h,
               "excess over R(t) " + format_float(res.max_analytic_excess));
    checks.add("gap_floor", res.min_gap_slack >= -tol_h,
               "min (lambda - max P) " + format_float(res.min_gap_slack));
    if (sc.sub_lv) {
        report.set("min_lower_radius_slack", res.min_lower_radius_slack);
        checks.add("lower_radius", res.min_lower_radius_slack >= 0.0,
                   "support vs sub-barrier radius slack " +
                       format_float(res.min_lower_radius_slack));
    }
    checks.add("support_monotone", worst_support_shrink(res.run, support_eps(c.model)) == 0,
               "interior erosion cells");
    write_snapshots(dir, res.run, c.model);
}

void run_decay(const RunConfig& c, const std::filesystem::path& dir, Checks& checks,
               Report& report) {
    DecayConfig dc;
    dc.spec = c.model;
    dc.lv = c.sub_params();
    dc.geom = c.grid;
    dc.t_end = c.t_end;
    dc.snapshot_count = c.snapshot_count;
    dc.fit_radius = c.fit_radius;
    dc.fit_t_lo = c.fit_t_lo > 0.0 ? c.fit_t_lo : c.t_end / 20.0;
    dc.fit_t_hi = c.fit_t_hi > 0.0 ? c.fit_t_hi : c.t_end;
    dc.cfl_safety = c.cfl_safety;
    dc.guard_band = c.guard_band;

    DecayResult res = experiment_decay_rate(dc);
    Csv csv;
    csv.add("t", res.times);
    csv.add("gap", res.gap);
    write_text_file(dir / "decay_series.csv", csv.to_string());
    report.set("exponent", res.fit.exponent);
    report.set("intercept", res.fit.intercept);
    report.set("residual_rms", res.fit.residual_rms);
    report.set("fit_t_lo", res.fit.t_lo);
    report.set("fit_t_hi", res.fit.t_hi);
    checks.add("decay_exponent",
               res.fit.exponent >= c.decay_exp_lo && res.fit.exponent <= c.decay_exp_hi,
               "exponent " + format_float(res.fit.exponent) + " in [" +
                   format_float(c.decay_exp_lo) + ", " + format_float(c.decay_exp_hi) + "]");
    checks.add("fit_window_decade", res.fit.t_hi >= 10.0 * res.fit.t_lo,
               "window [" + format_float(res.fit.t_lo) + ", " + format_float(res.fit.t_hi) + "]");
    checks.add("support_monotone", worst_support_shrink(res.run, support_eps(c.model)) == 0,
               "interior erosion cells");
}

void run_pme_converge(const RunConfig& c, const std::filesystem::path& dir, Checks& checks,
                      Report& report) {
    PmeConvergenceConfig pc;
    pc.n_dim = c.grid.n_dim;
    pc.m = c.model.m;
    pc.c = c.bb_c;
    pc.t0 = c.bb_t0;
    pc.t1 = c.t_end;
    pc.h = c.grid.h;
    pc.levels = std::max(2, c.refine + 2);
    pc.extent = c.grid.extent;
    pc.cfl_safety = c.cfl_safety;
    pc.guard_band = c.guard_band;

    PmeConvergenceResult res = experiment_pme_convergence(pc);
    Csv csv;
    std::vector<double> hs, l1, li, lii;
    for (const PmeErrorRow& row : res.rows) {
        hs.push_back(row.h);
        l1.push_back(row.err_l1);
        li.push_back(row.err_linf);
        lii.push_back(row.err_linf_interior);
    }
    csv.add("h", hs);
    csv.add("err_l1", l1);
    csv.add("err_linf", li);
    csv.add("err_linf_interior", lii);
    write_text_file(dir / "errors.csv", csv.to_string());
    report.set("order_l1", res.order_l1);
    report.set("order_linf_interior", res.order_linf_interior);
    report.set("l1_monotone", res.l1_monotone);
    checks.add("l1_order", res.order_l1 >= 0.9, "order " + format_float(res.order_l1));
    checks.add("interior_linf_order", res.order_linf_interior >= 1.8,
               "order " + format_float(res.order_linf_interior));
    checks.add("l1_monotone", res.l1_monotone, "errors decrease with h");
}

void run_simulate_or_diag(const RunConfig& c, const std::filesystem::path& dir, Checks& checks,
                          Report& report) {
    double t0 = 0.0;
    Field initial = build_initial(c, &t0);
    SolveConfig sc;
    sc.spec = c.model;
    sc.geom = c.grid;
    sc.cfl_safety = c.cfl_safety;
    sc.guard_band = c.guard_band;
    sc.t_end = c.t_end;
    sc.snapshot_times = snapshot_schedule(c, t0);
    RunResult rr = run(sc, std::move(initial));
    write_snapshots(dir, rr, c.model);

    double eps = support_eps(c.model);
    checks.add("support_monotone", worst_support_shrink(rr, eps) == 0, "interior erosion cells");
    if (c.experiment == ExperimentKind::Simulate) return;

    // frontier diagnostics on the finished run (radial only)
    if (c.grid.kind != GridKind::RadialND)
        throw std::runtime_error("frontier-diag requires a radial grid");
    FrontSeries fs = front_series(rr.snapshots, c.model, eps);
    Csv csv;
    csv.add("t", fs.times);
    csv.add("radius", fs.radius);
    csv.add("velocity", fs.velocity);
    csv.add("grad_P_front", fs.grad_p_front);
    csv.add("darcy_rel_err", fs.darcy_rel_err);
    write_text_file(dir / "front_series.csv", csv.to_string());

    double r0 = c.support_r0 > 0.0 ? c.support_r0 : rr.diag.support_radius.front();
    DiagnosticsReport diag;
    diag.t0 = detect_t0(rr.snapshots, r0, eps);
    double t_lo = c.fit_t_lo > 0.0 ? c.fit_t_lo : (t0 + 0.25 * (c.t_end - t0));
    double t_hi = c.fit_t_hi > 0.0 ? c.fit_t_hi : c.t_end;
    auto [lip_space, lip_time] = lipschitz_norms(rr.snapshots, c.model, t_lo, t_hi, c.grid.extent);
    diag.lipschitz_space = lip_space;
    diag.lipschitz_time = lip_time;
    diag.ab_min_margin = std::numeric_limits<double>::infinity();
    for (const Field& f : rr.snapshots)
        if (f.t >= t_lo && f.t <= t_hi && f.t > 0.0)
            diag.ab_min_margin = std::min(diag.ab_min_margin, ab_check(f, c.model, eps));
    NondegeneracyFit nd = nondegeneracy_fit(rr.snapshots.back(), c.model, eps, 8, 4);
    diag.nondegeneracy_slope = nd.slope;
    diag.nondegeneracy_min_ratio = nd.min_ratio;
    diag.cone_violation = cone_monotonicity_check(rr.snapshots.back(), c.model, r0);

    report.set("t0", diag.t0 ? format_float(*diag.t0) : std::string("not reached"));
    report.set("ab_min_margin", diag.ab_min_margin);
    report.set("lipschitz_space", diag.lipschitz_space);
    report.set("lipschitz_time", diag.lipschitz_time);
    report.set("nondegeneracy_slope", diag.nondegeneracy_slope);
    report.set("nondegeneracy_min_ratio", diag.nondegeneracy_min_ratio);
    report.set("cone_violation", diag.cone_violation);
    double darcy_median = median_finite(fs.darcy_rel_err);
    report.set("darcy_median_rel_err", darcy_median);

    checks.add("ab_margin", diag.ab_min_margin >= c.ab_margin_factor * c.model.p_m,
               "min margin " + format_float(diag.ab_min_margin));
    checks.add("cone_monotone", diag.cone_violation <= 1e-12,
               "worst outward increase " + format_float(diag.cone_violation));
    checks.add("nondegeneracy", !nd.degenerate && nd.slope > 0.0,
               "slope " + format_float(nd.slope) + ", min ratio " + format_float(nd.min_ratio));
    checks.add("darcy_median", std::isfinite(darcy_median) && darcy_median <= c.darcy_median_max,
               "median rel err " + format_float(darcy_median));
}

}  // namespace

DispatchResult dispatch(const RunConfig& config) {
    DispatchResult result;
    std::string out_dir = config.output_dir;
    if (const char* env = std::getenv("PMFRONTIER_OUT")) out_dir = env;
    result.output_dir = out_dir;
    std::filesystem::create_directories(result.output_dir);

    Checks checks;
    Report report;
    report.set("experiment", config.experiment_name());
    report.set("model", config.model.kind_name());

    try {
        switch (config.experiment) {
            case ExperimentKind::Barriers:
                run_barriers(config, result.output_dir, checks, report);
                break;
            case ExperimentKind::SandwichSub:
                run_sandwich_sub(config, result.output_dir, checks, report);
                break;
            case ExperimentKind::SandwichSup:
                run_sandwich_sup(config, result.output_dir, checks, report);
                break;
            case ExperimentKind::Decay:
                run_decay(config, result.output_dir, checks, report);
                break;
            case ExperimentKind::PmeConverge:
                run_pme_converge(config, result.output_dir, checks, report);
                break;
            case ExperimentKind::Simulate:
            case ExperimentKind::FrontierDiag:
                run_simulate_or_diag(config, result.output_dir, checks, report);
                break;
        }
    } catch (const std::exception& e) {
        checks.add("execution", false, e.what());
        report.set("failure", e.what());
    }

    result.pass = checks.all_pass();
    result.status = result.pass ? 0 : 1;
    result.check_lines = checks.lines();
    report.set("pass", result.pass);
    report.write(result.output_dir / "report.json");

    std::string summary = "pmfrontier experiment: " + config.experiment_name() + "\n";
    summary += "output: " + result.output_dir.string() + "\n\n";
    for (const std::string& line : checks.lines()) summary += line + "\n";
    summary += std::string("\noverall: ") + (result.pass ? "PASS" : "FAIL") + "\n";
    write_text_file(result.output_dir / "summary.txt", summary);
    return result;
}

}  // namespace pmf
