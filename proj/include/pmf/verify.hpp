#ifndef PMF_VERIFY_HPP
#define PMF_VERIFY_HPP

/// Experiment harness composing barriers + solver + frontier into the
/// theorem-level checks: comparison sandwiches against both barriers, the
/// local decay rate of p_m - P, support-expansion bounds, and validation of
/// the scheme against the closed-form Barenblatt profile of the plain porous
/// medium equation.

#include <optional>
#include <vector>

#include "pmf/frontier.hpp"
#include "pmf/lv_barriers.hpp"
#include "pmf/model.hpp"
#include "pmf/rate_fit.hpp"
#include "pmf/solver.hpp"

namespace pmf {

// ---------------------------------------------------------------------------
// Barenblatt self-similar profile of d_t rho = Lap(rho^m)
// ---------------------------------------------------------------------------

struct BarenblattValue {
    double rho;
    double p;
};

/// rho(r, t) = t^-a (c - k r^2 t^(-2a/n))_+^(1/(m-1)) with
/// a = n/(n(m-1)+2), k = a(m-1)/(2mn); requires t > 0.
BarenblattValue barenblatt(int n, double m, double c, double r, double t);
double barenblatt_support_radius(int n, double m, double c, double t);
double barenblatt_alpha(int n, double m);  // the similarity exponent a
double barenblatt_k(int n, double m);

/// Field sampled from the profile at absolute time t.
Field barenblatt_field(const GridGeom& geom, double m, double c, double t);

// ---------------------------------------------------------------------------
// Comparison sandwiches
// ---------------------------------------------------------------------------

struct SandwichReport {
    double max_lower_violation = 0.0;  // max over space-time of (barrier - P_num)
    double max_upper_violation = 0.0;  // max of (P_num - p_m), or (P_num - barrier) for sup runs
    double tolerance_used = 0.0;       // tol_h = c_tol * h
};

struct SandwichSubConfig {
    ModelSpec spec;
    LVSubParams lv;
    GridGeom geom;
    double t_end = 20.0;
    int snapshot_count = 41;  // uniform in [0, t_end]
    double cfl_safety = 0.2;
    int guard_band = 4;
    double dt_ode = 1e-3;
    double c_tol = 50.0;  // tol_h = c_tol * h; recalibrated by the refined variant
};

struct SandwichSubResult {
    SandwichReport report;
    RunResult run;
    Barrier barrier;
};

/// Tumor-type run started from the sub-barrier profile; checks
/// Q - tol_h <= P_num <= p_m + tol_h at every snapshot cell.
SandwichSubResult experiment_sandwich_sub(const SandwichSubConfig& config);

struct SandwichPairResult {
    SandwichSubResult coarse;
    SandwichSubResult fine;      // h/2
    double c_tol = 0.0;          // 2 * coarse violation / h
    double refinement_ratio = 0.0;  // fine violation / coarse violation
};

/// Runs the sandwich at h and h/2, calibrates c_tol from the coarse run.
SandwichPairResult experiment_sandwich_sub_refined(const SandwichSubConfig& config);

struct SandwichSupConfig {
    ModelSpec spec;
    LVSupParams lv;
    std::optional<LVSubParams> sub_lv;  // initial data and lower radius check
    GridGeom geom;
    double t_end = 10.0;
    int snapshot_count = 21;
    double cfl_safety = 0.2;
    int guard_band = 4;
    double dt_ode = 1e-3;
    double c_tol = 50.0;
};

struct SandwichSupResult {
    SandwichReport report;
    RunResult run;
    Barrier barrier;                    // super-barrier
    std::optional<Barrier> sub_barrier;
    double max_support_excess = 0.0;    // max of (r_num - sqrt(lambda/kappa))
    double max_analytic_excess = 0.0;   // max of (r_num - R(t)), R from the rate band
    double min_lower_radius_slack = 0.0;  // min of (r_num - (sqrt(alpha/beta) - h))
    double min_gap_slack = 0.0;         // min of (lambda(t) - max_cell P_num)
};

/// Run with initial data below the super-barrier; checks P_num <= barrier and
/// the exponential support bound R(t) = sqrt(l0/k0) exp(((Dg p_m (m-1) + 4 k0)/2) t).
SandwichSupResult experiment_sandwich_sup(const SandwichSupConfig& config);

/// Closed-form exponential support bound of the sup run.
double support_bound_radius(const LVSupParams& lv, double t);

// ---------------------------------------------------------------------------
// Decay rate
// ---------------------------------------------------------------------------

/// (t, max over B_radius of (p_m - P)) extracted from snapshots.
void decay_gap_series(const std::vector<Field>& snapshots, const ModelSpec& spec,
                      double radius, std::vector<double>& t, std::vector<double>& gap);

struct DecayConfig {
    ModelSpec spec;
    LVSubParams lv;
    GridGeom geom;
    double t_end = 400.0;
    int snapshot_count = 81;
    double fit_radius = 1.0;
    double fit_t_lo = 20.0;
    double fit_t_hi = 400.0;
    double cfl_safety = 0.2;
    int guard_band = 4;
};

struct DecayResult {
    RateFit fit;
    std::vector<double> times;
    std::vector<double> gap;
    RunResult run;
};

/// Long tumor run from the sub-barrier profile; power-law fit of
/// max_{B_R}(p_m - P) against (1+t) over the configured window.
DecayResult experiment_decay_rate(const DecayConfig& config);

// ---------------------------------------------------------------------------
// PME validation against Barenblatt
// ---------------------------------------------------------------------------

struct PmeErrorRow {
    double h;
    double err_l1;
    double err_linf;
    double err_linf_interior;
};

struct PmeConvergenceConfig {
    int n_dim = 2;
    double m = 2.0;
    double c = 0.25;              // Barenblatt profile constant
    double t0 = 1.0;
    double t1 = 2.0;
    double h = 0.05;              // coarsest level
    int levels = 3;               // h, h/2, h/4, ...
    double extent = 4.0;
    double cfl_safety = 0.2;
    int guard_band = 4;
    double interior_fraction = 0.6;  // interior mask: r <= fraction * front radius
};

struct PmeConvergenceResult {
    std::vector<PmeErrorRow> rows;
    double order_l1 = 0.0;             // OLS slope of log err vs log h
    double order_linf_interior = 0.0;
    bool l1_monotone = false;
    int worst_support_shrink = 0;      // across the snapshots of every level
};

/// Zero-reaction run from Barenblatt data at t0 to t1 on a refinement ladder,
/// with errors measured against the closed form at t1.
PmeConvergenceResult experiment_pme_convergence(const PmeConvergenceConfig& config);

// ---------------------------------------------------------------------------
// Support monotonicity
// ---------------------------------------------------------------------------

/// Cells inside the support at snapshot `a` but at exact zero in snapshot `b`,
/// excluding cells touching the support boundary of `a` (1-cell erosion
/// tolerance).
int support_shrink_violations(const Field& a, const Field& b, double eps);

/// Worst interior erosion count across all consecutive snapshot pairs.
int worst_support_shrink(const RunResult& result, double eps);

}  // namespace pmf

#endif  // PMF_VERIFY_HPP
