#include "pmf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pmf {

namespace {

std::vector<double> uniform_times(double t0, double t1, int count) {
    if (count < 2) return {t1};
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i)
        out[i] = t0 + (t1 - t0) * static_cast<double>(i) / (count - 1);
    out.back() = t1;
    return out;
}

Field field_from_pressure_profile(const GridGeom& geom, const ModelSpec& spec,
                                  const Barrier& b, double t) {
    Field f = Field::zeros(geom, t);
    for (int i = 0; i < geom.total_cells(); ++i) {
        double r = geom.center_distance(i);
        f.rho[static_cast<std::size_t>(i)] = density_from_pressure(b.value(t, r), spec.m);
    }
    return f;
}

}  // namespace

// ---------------------------------------------------------------------------
// Barenblatt
// ---------------------------------------------------------------------------

double barenblatt_alpha(int n, double m) {
    return n / (n * (m - 1.0) + 2.0);
}

double barenblatt_k(int n, double m) {
    return barenblatt_alpha(n, m) * (m - 1.0) / (2.0 * m * n);
}

BarenblattValue barenblatt(int n, double m, double c, double r, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("barenblatt: t must be positive");
    if (!(c > 0.0)) throw std::invalid_argument("barenblatt: c must be positive");
    double a = barenblatt_alpha(n, m);
    double k = barenblatt_k(n, m);
    double core = c - k * r * r * std::pow(t, -2.0 * a / n);
    if (core <= 0.0) return {0.0, 0.0};
    double rho = std::pow(t, -a) * std::pow(core, 1.0 / (m - 1.0));
    // P = m/(m-1) rho^(m-1) = m/(m-1) t^(-a(m-1)) core
    double p = m / (m - 1.0) * std::pow(t, -a * (m - 1.0)) * core;
    return {rho, p};
}

double barenblatt_support_radius(int n, double m, double c, double t) {
    double a = barenblatt_alpha(n, m);
    return std::sqrt(c / barenblatt_k(n, m)) * std::pow(t, a / n);
}

Field barenblatt_field(const GridGeom& geom, double m, double c, double t) {
    Field f = Field::zeros(geom, t);
    for (int i = 0; i < geom.total_cells(); ++i) {
        double r = geom.center_distance(i);
        f.rho[static_cast<std::size_t>(i)] = barenblatt(geom.n_dim, m, c, r, t).rho;
    }
    return f;
}

// ---------------------------------------------------------------------------
// Sandwiches
// ---------------------------------------------------------------------------

SandwichSubResult experiment_sandwich_sub(const SandwichSubConfig& config) {
    SandwichSubResult result{{}, {}, make_sub_barrier(config.lv, config.t_end, config.dt_ode)};

    SolveConfig sc;
    sc.spec = config.spec;
    sc.geom = config.geom;
    sc.cfl_safety = config.cfl_safety;
    sc.guard_band = config.guard_band;
    sc.t_end = config.t_end;
    sc.snapshot_times = uniform_times(0.0, config.t_end, config.snapshot_count);
    result.run = run(sc, field_from_pressure_profile(config.geom, config.spec,
                                                     result.barrier, 0.0));

    double lower = -std::numeric_limits<double>::infinity();
    double upper = -std::numeric_limits<double>::infinity();
    for (const Field& snap : result.run.snapshots) {
        std::vector<double> p = pressure_field(snap, config.spec);
        for (int i = 0; i < snap.geom.total_cells(); ++i) {
            double q = result.barrier.value(snap.t, snap.geom.center_distance(i));
            lower = std::max(lower, q - p[static_cast<std::size_t>(i)]);
            upper = std::max(upper, p[static_cast<std::size_t>(i)] - config.spec.p_m);
        }
    }
    result.report.max_lower_violation = lower;
    result.report.max_upper_violation = upper;
    result.report.tolerance_used = config.c_tol * config.geom.h;
    return result;
}

SandwichPairResult experiment_sandwich_sub_refined(const SandwichSubConfig& config) {
    SandwichPairResult pair;
    pair.coarse = experiment_sandwich_sub(config);

    SandwichSubConfig fine = config;
    fine.geom = config.geom.kind == GridKind::RadialND
                    ? GridGeom::radial(config.geom.n_dim, config.geom.h / 2.0, config.geom.extent)
                    : GridGeom::cartesian2d(config.geom.h / 2.0, config.geom.extent);
    pair.c_tol = std::max(2.0 * pair.coarse.report.max_lower_violation / config.geom.h, 0.0);
    fine.c_tol = pair.c_tol;
    pair.fine = experiment_sandwich_sub(fine);

    pair.coarse.report.tolerance_used = pair.c_tol * config.geom.h;
    pair.fine.report.tolerance_used = pair.c_tol * fine.geom.h;
    // below roundoff scale there is no violation to shrink
    double denom = pair.coarse.report.max_lower_violation;
    pair.refinement_ratio = denom > 1e-12 * config.spec.p_m
                                ? pair.fine.report.max_lower_violation / denom
                                : 0.0;
    return pair;
}

double support_bound_radius(const LVSupParams& lv, double t) {
    double rate = 0.5 * (lv.Dg * lv.p_m * (lv.m - 1.0) + 4.0 * lv.kappa0);
    return std::sqrt(lv.lambda0 / lv.kappa0) * std::exp(rate * t);
}

SandwichSupResult experiment_sandwich_sup(const SandwichSupConfig& config) {
    SandwichSupResult result;
    result.barrier = make_sup_barrier(config.lv, config.t_end, config.dt_ode);
    if (config.sub_lv)
        result.sub_barrier = make_sub_barrier(*config.sub_lv, config.t_end, config.dt_ode);

    // initial data: the sub-barrier profile when given, otherwise the
    // super-barrier profile itself; either is <= the super-barrier at t = 0
    const Barrier& init_from = result.sub_barrier ? *result.sub_barrier : result.barrier;
    Field initial = field_from_pressure_profile(config.geom, config.spec, init_from, 0.0);
    for (int i = 0; i < config.geom.total_cells(); ++i) {
        double q = result.barrier.value(0.0, config.geom.center_distance(i));
        if (pressure_from_density(initial.rho[static_cast<std::size_t>(i)], config.spec.m) >
            q + 1e-12)
            throw std::invalid_argument("sandwich_sup: initial data above the super-barrier");
    }

    SolveConfig sc;
    sc.spec = config.spec;
    sc.geom = config.geom;
    sc.cfl_safety = config.cfl_safety;
    sc.guard_band = config.guard_band;
    sc.t_end = config.t_end;
    sc.snapshot_times = uniform_times(0.0, config.t_end, config.snapshot_count);
    result.run = run(sc, std::move(initial));

    double eps = support_eps(config.spec);
    double upper = -std::numeric_limits<double>::infinity();
    double lower = result.sub_barrier ? -std::numeric_limits<double>::infinity() : 0.0;
    double support_excess = -1e300, analytic_excess = -1e300;
    double lower_slack = 1e300, gap_slack = 1e300;
    for (const Field& snap : result.run.snapshots) {
        std::vector<double> p = pressure_field(snap, config.spec);
        double max_p = 0.0;
        for (int i = 0; i < snap.geom.total_cells(); ++i) {
            double r = snap.geom.center_distance(i);
            double pv = p[static_cast<std::size_t>(i)];
            upper = std::max(upper, pv - result.barrier.value(snap.t, r));
            if (result.sub_barrier)
                lower = std::max(lower, result.sub_barrier->value(snap.t, r) - pv);
            max_p = std::max(max_p, pv);
        }
        double r_num = support_radius(snap, eps);
        support_excess = std::max(support_excess,
                                  r_num - result.barrier.support_radius(snap.t));
        analytic_excess = std::max(analytic_excess,
                                   r_num - support_bound_radius(config.lv, snap.t));
        if (result.sub_barrier)
            lower_slack = std::min(lower_slack,
                                   r_num - (result.sub_barrier->support_radius(snap.t) -
                                            snap.geom.h));
        gap_slack = std::min(gap_slack, result.barrier.traj.at(snap.t).first - max_p);
    }
    result.report.max_upper_violation = upper;
    result.report.max_lower_violation = lower;
    result.report.tolerance_used = config.c_tol * config.geom.h;
    result.max_support_excess = support_excess;
    result.max_analytic_excess = analytic_excess;
    result.min_lower_radius_slack = result.sub_barrier ? lower_slack : 0.0;
    result.min_gap_slack = gap_slack;
    return result;
}

// ---------------------------------------------------------------------------
// Decay rate
// ---------------------------------------------------------------------------

void decay_gap_series(const std::vector<Field>& snapshots, const ModelSpec& spec,
                      double radius, std::vector<double>& t, std::vector<double>& gap) {
    t.clear();
    gap.clear();
    for (const Field& f : snapshots) {
        std::vector<double> p = pressure_field(f, spec);
        double worst = 0.0;
        for (int i = 0; i < f.geom.total_cells(); ++i) {
            if (f.geom.center_distance(i) > radius) continue;
            worst = std::max(worst, spec.p_m - p[static_cast<std::size_t>(i)]);
        }
        t.push_back(f.t);
        gap.push_back(worst);
    }
}

DecayResult experiment_decay_rate(const DecayConfig& config) {
    DecayResult result;
    Barrier barrier = make_sub_barrier(config.lv, config.t_end,
                                       std::min(1e-2, config.t_end / 200.0));

    SolveConfig sc;
    sc.spec = config.spec;
    sc.geom = config.geom;
    sc.cfl_safety = config.cfl_safety;
    sc.guard_band = config.guard_band;
    sc.t_end = config.t_end;
    sc.snapshot_times = uniform_times(0.0, config.t_end, config.snapshot_count);
    result.run = run(sc, field_from_pressure_profile(config.geom, config.spec, barrier, 0.0));

    decay_gap_series(result.run.snapshots, config.spec, config.fit_radius, result.times,
                     result.gap);
    result.fit = fit_power_law(result.times, result.gap, config.fit_t_lo, config.fit_t_hi);
    return result;
}

// ---------------------------------------------------------------------------
// PME validation
// ---------------------------------------------------------------------------

PmeConvergenceResult experiment_pme_convergence(const PmeConvergenceConfig& config) {
    if (config.levels < 2)
        throw std::invalid_argument("pme_convergence: needs at least 2 levels");
    double rho_max0 =
        barenblatt(config.n_dim, config.m, config.c, 0.0, config.t0).rho;
    ModelSpec spec = ModelSpec::pme(config.m, 2.0 * pressure_from_density(rho_max0, config.m));

    double front_t1 =
        barenblatt_support_radius(config.n_dim, config.m, config.c, config.t1);
    if (front_t1 + config.guard_band * config.h >= config.extent)
        throw std::invalid_argument("pme_convergence: extent too small for the final front");

    PmeConvergenceResult result;
    double h = config.h;
    for (int level = 0; level < config.levels; ++level, h /= 2.0) {
        GridGeom geom = GridGeom::radial(config.n_dim, h, config.extent);
        SolveConfig sc;
        sc.spec = spec;
        sc.geom = geom;
        sc.cfl_safety = config.cfl_safety;
        sc.guard_band = config.guard_band;
        sc.t_end = config.t1;
        sc.snapshot_times = {0.5 * (config.t0 + config.t1), config.t1};
        RunResult rr = run(sc, barenblatt_field(geom, config.m, config.c, config.t0));
        result.worst_support_shrink =
            std::max(result.worst_support_shrink, worst_support_shrink(rr, support_eps(spec)));
        const Field& num = rr.snapshots.back();

        PmeErrorRow row{h, 0.0, 0.0, 0.0};
        double n_dim = static_cast<double>(config.n_dim);
        double area = 2.0 * std::pow(M_PI, 0.5 * n_dim) / std::tgamma(0.5 * n_dim);
        for (int i = 0; i < geom.cells; ++i) {
            double r = geom.radius(i);
            double exact = barenblatt(config.n_dim, config.m, config.c, r, config.t1).rho;
            double err = std::abs(num.rho[static_cast<std::size_t>(i)] - exact);
            double shell = (std::pow((i + 1) * h, n_dim) - std::pow(i * h, n_dim)) / n_dim;
            row.err_l1 += err * area * shell;
            row.err_linf = std::max(row.err_linf, err);
            if (r <= config.interior_fraction * front_t1)
                row.err_linf_interior = std::max(row.err_linf_interior, err);
        }
        result.rows.push_back(row);
    }

    std::vector<double> hs, e1, ei;
    result.l1_monotone = true;
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        hs.push_back(result.rows[i].h);
        e1.push_back(result.rows[i].err_l1);
        ei.push_back(result.rows[i].err_linf_interior);
        if (i > 0 && result.rows[i].err_l1 >= result.rows[i - 1].err_l1)
            result.l1_monotone = false;
    }
    auto ols_order = [&](const std::vector<double>& err) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        double n = static_cast<double>(hs.size());
        for (std::size_t i = 0; i < hs.size(); ++i) {
            double x = std::log(hs[i]);
            double y = std::log(err[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        return (sxy - sx * sy / n) / (sxx - sx * sx / n);
    };
    result.order_l1 = ols_order(e1);
    result.order_linf_interior = ols_order(ei);
    return result;
}

// ---------------------------------------------------------------------------
// Support monotonicity
// ---------------------------------------------------------------------------

int support_shrink_violations(const Field& a, const Field& b, double eps) {
    if (a.rho.size() != b.rho.size())
        throw std::invalid_argument("support_shrink_violations: size mismatch");
    const GridGeom& g = a.geom;
    int violations = 0;
    auto masked = [&](int i) { return a.rho[static_cast<std::size_t>(i)] > eps; };
    for (int i = 0; i < g.total_cells(); ++i) {
        if (!masked(i) || b.rho[static_cast<std::size_t>(i)] > 0.0) continue;
        bool boundary = false;
        if (g.kind == GridKind::RadialND) {
            boundary = (i + 1 >= g.cells || !masked(i + 1)) || (i > 0 && !masked(i - 1));
        } else {
            int n = g.side();
            int x = i % n, y = i / n;
            boundary = x == 0 || x + 1 == n || y == 0 || y + 1 == n || !masked(i - 1) ||
                       !masked(i + 1) || !masked(i - n) || !masked(i + n);
        }
        if (!boundary) ++violations;
    }
    return violations;
}

int worst_support_shrink(const RunResult& result, double eps) {
    int worst = 0;
    for (std::size_t k = 0; k + 1 < result.snapshots.size(); ++k)
        worst = std::max(worst,
                         support_shrink_violations(result.snapshots[k],
                                                   result.snapshots[k + 1], eps));
    return worst;
}

}  // namespace pmf
