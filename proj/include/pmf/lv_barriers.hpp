#ifndef PMF_LV_BARRIERS_HPP
#define PMF_LV_BARRIERS_HPP

/// Lotka-Volterra ODE systems whose solutions parametrize the quadratic
/// space-time barriers (first(t) - second(t)*|x|^2)_+ used to sandwich the
/// pressure of the reaction-diffusion equation. The Sub system drives the
/// growing sub-solution (alpha, beta); the Sup system drives the shrinking
/// super-solution (lambda, kappa). Both come with closed-form bound bands
/// that every trajectory must respect.

#include <cstddef>
#include <vector>

#include "pmf/model.hpp"

namespace pmf {

enum class BarrierKind { Sub, Sup };

struct LVSubParams {
    double p_m;    // pressure threshold
    double m;      // diffusion exponent
    int n;         // spatial dimension, >= 2
    double dg;     // inf of -G' over [0, p_m]
    double alpha0; // initial interior level
    double beta0;  // initial curvature
};

struct LVSupParams {
    double p_m;
    double m;
    int n;
    double Dg;      // sup of -G' over [0, p_m]
    double lambda0;
    double kappa0;
};

struct GateCheck {
    bool pass;
    double margin_lower;  // slack of the first strict inequality
    double margin_upper;  // slack of the second strict inequality
};

/// Gate ini1: p_m - (2n/dg) b0 > a0 > p_m - ((2n(m-1)+4)/(dg(m-1))) b0.
GateCheck check_gate_sub(const LVSubParams& p);

/// Gate lowini: p_m - l0 - (2n/Dg) k0 > 0 > p_m - 2 l0 - ((2n(m-1)+4)/(Dg(m-1))) k0.
GateCheck check_gate_sup(const LVSupParams& p);

struct LVState {
    double first;
    double second;
};

LVState rhs_sub(const LVSubParams& p, LVState s);
LVState rhs_sup(const LVSupParams& p, LVState s);

struct LVTrajectory {
    BarrierKind kind = BarrierKind::Sub;
    double dt = 0.0;
    std::vector<double> times;
    std::vector<LVState> states;

    double t_end() const { return times.empty() ? 0.0 : times.back(); }
    /// Linear interpolation; throws std::domain_error outside [0, t_end].
    LVState at(double t) const;
    std::size_t size() const { return times.size(); }
};

/// Closed-form bands for the Sub system at time t:
///   f1_upper   upper bound on f1 = alpha + (2n/dg) beta       (< p_m)
///   f2_lower   lower bound on f2 = alpha + ((2n(m-1)+4)/(dg(m-1))) beta
///   beta_low/high    band for beta(t)
///   gap_low/high     band for p_m - alpha(t)
struct SubBounds {
    double f1_upper;
    double f2_lower;
    double beta_low;
    double beta_high;
    double gap_low;
    double gap_high;
};
SubBounds closed_form_bounds_sub(const LVSubParams& p, double t);

/// Closed-form bands for the Sup system at time t:
///   ratio_low/high   band for lambda/kappa; rates Dg(m-1)l0 and Dg(m-1)p_m + 4 k0
///   kappa_low/high   band for kappa(t)
///   gap_low/high     band for p_m - lambda(t)
struct SupBounds {
    double ratio_low;
    double ratio_high;
    double kappa_low;
    double kappa_high;
    double gap_low;
    double gap_high;
};
SupBounds closed_form_bounds_sup(const LVSupParams& p, double t);

/// Fixed-step RK4 over [0, t_end]. Requires the gate to pass, dt <= min(1e-2,
/// t_end/100) for t_end > 0, and t_end <= 1e4. The returned trajectory is
/// checked against the qualitative invariants (monotone components, bound
/// sandwich, increasing first/second ratio); a breach throws std::runtime_error
/// naming the first failing sample.
LVTrajectory integrate_sub(const LVSubParams& p, double t_end, double dt = 1e-3);
LVTrajectory integrate_sup(const LVSupParams& p, double t_end, double dt = 1e-3);

/// Quadratic barrier Q(x, t) = (first(t) - second(t) |x|^2)_+ over a trajectory.
struct Barrier {
    BarrierKind kind = BarrierKind::Sub;
    double p_m = 0.0;
    double m = 0.0;
    int n = 0;
    double rate = 0.0;  // dg (Sub) or Dg (Sup)
    LVTrajectory traj;

    double value(double t, double r) const;
    double support_radius(double t) const;  // sqrt(first/second)
};

Barrier make_sub_barrier(const LVSubParams& p, double t_end, double dt = 1e-3);
Barrier make_sup_barrier(const LVSupParams& p, double t_end, double dt = 1e-3);

/// Pointwise PDE residual of the barrier in its positivity set:
///   d_t Q - (m-1) Q Lap Q - |grad Q|^2 - (m-1) Q G(Q),
/// with the time derivative taken from the ODE right-hand side and the exact
/// spatial derivatives of the quadratic. Sub barriers must give <= 0, Sup
/// barriers >= 0 (up to roundoff). Throws std::domain_error when the barrier
/// value at (t, r) is not above 1e-9.
double barrier_residual(const Barrier& b, const ModelSpec& spec, double t, double r);

/// (t_i, sqrt(first_i/second_i)) for every trajectory sample.
std::vector<std::pair<double, double>> support_radius_series(const Barrier& b);

/// Space-constant super-solution level for the linear reaction G(P) = p_m - P
/// with initial level p_h >= p_m: solves df/dt = (m-1) f (p_m - f), f(0) = p_h,
/// decreasing to p_m. Bounds any solution started below p_h from above.
double flat_super_solution_level(double p_m, double m, double p_h, double t);

/// Worst positive violation of the closed-form bands over all trajectory
/// samples (f1/f2 logistic bounds, beta band, p_m - alpha band). Zero or a
/// roundoff-scale positive value means the trajectory sits inside the bands.
double worst_band_violation_sub(const LVSubParams& p, const LVTrajectory& traj);

/// Same for the Sup system (ratio band, kappa band, p_m - lambda band).
double worst_band_violation_sup(const LVSupParams& p, const LVTrajectory& traj);

}  // namespace pmf

#endif  // PMF_LV_BARRIERS_HPP
