#ifndef PMF_FRONTIER_HPP
#define PMF_FRONTIER_HPP

/// Free-boundary extraction and the boundary diagnostics the theory
/// quantifies: front position and velocity, Darcy consistency of the front
/// speed against the boundary pressure gradient, the Aronson-Benilan margin,
/// Lipschitz norms, the linear non-degeneracy slope near the front, first
/// full-coverage time of the initial support ball, and radial monotonicity
/// outside it.

#include <optional>
#include <utility>
#include <vector>

#include "pmf/model.hpp"
#include "pmf/rate_fit.hpp"
#include "pmf/solver.hpp"

namespace pmf {

/// Outermost cell center with rho > eps, plus h/2; zero for vacuum fields.
/// For Cartesian2D fields the distance is measured from the origin.
double support_radius(const Field& field, double eps);

/// Flat indices of support cells with at least one vacuum 4-neighbor (the
/// cell-boundary contour of the support mask). For radial fields this is the
/// front cell alone; grid-rim cells count their outside as vacuum.
std::vector<int> support_boundary_cells(const Field& field, double eps);

/// Centered differences of radius in time, one-sided at the endpoints.
/// Throws std::invalid_argument with fewer than 2 samples.
std::vector<double> front_velocity(const std::vector<double>& times,
                                   const std::vector<double>& radius);

/// Magnitude of the one-sided 3-point pressure gradient measured just inside
/// the front of a radial field. The outermost `skip_cells` cells are excluded:
/// an explicit front advances through a ~4-cell activation layer whose values
/// sit far below the similarity profile, and the stencil must start behind
/// it. Throws std::runtime_error when fewer than 10 cells are inside
/// (unresolved front).
double front_pressure_gradient(const Field& field, const ModelSpec& spec, double eps,
                               int skip_cells = 4);

struct FrontSeries {
    std::vector<double> times;
    std::vector<double> radius;
    std::vector<double> velocity;
    std::vector<double> grad_p_front;
    std::vector<double> darcy_rel_err;  // NaN where flagged (vacuum / unresolved)
};

/// Builds the whole series from radial snapshots; darcy_rel_err compares
/// |velocity| against grad_p_front with |V - |grad P|| / max(|V|, floor).
FrontSeries front_series(const std::vector<Field>& snapshots, const ModelSpec& spec,
                         double eps, double velocity_floor = 1e-8);

/// Minimum over interior support cells of Lap_h P + G(P) + 1/((m-1) t).
/// Radial fields, t > 0. Cells within `margin_cells` of the front are
/// excluded: the bound is distributional and the discrete Laplacian picks up
/// the pressure kink plus the front activation layer, which reaches ~4-5
/// cells at any resolution.
double ab_check(const Field& field, const ModelSpec& spec, double eps, int margin_cells = 6);

/// (max |grad_h P|, max |dP/dt|) over snapshots with t inside [t_lo, t_hi]
/// and cells within distance region_radius of the origin.
std::pair<double, double> lipschitz_norms(const std::vector<Field>& snapshots,
                                          const ModelSpec& spec, double t_lo, double t_hi,
                                          double region_radius);

/// Power-law fit of max_{B_r0} |grad_h rho| against (1+t) over the window.
RateFit lipschitz_decay_fit(const std::vector<Field>& snapshots, double r0, double t_lo,
                            double t_hi);

struct NondegeneracyFit {
    double slope = 0.0;      // least-squares slope of P against inward distance
    double min_ratio = 0.0;  // min of P/eps over the sampled cells (certified witness)
    bool degenerate = true;  // min_ratio collapses relative to the innermost ratio
};

/// Fits P against inward distance over `cells_inside` cells behind the front
/// of a radial field, skipping the outermost `skip_cells` first (0 for
/// analytic profiles; 4 for solver snapshots, clearing the activation layer).
NondegeneracyFit nondegeneracy_fit(const Field& field, const ModelSpec& spec, double eps,
                                   int cells_inside = 8, int skip_cells = 0);

/// First snapshot time at which every cell of B_r0 is inside the support,
/// linearly interpolated between the bracketing snapshots via coverage
/// fraction. Empty optional when never reached.
std::optional<double> detect_t0(const std::vector<Field>& snapshots, double r0, double eps);

/// Worst violation max over cells with r > r0 of (P_{i+1} - P_i)_+ for radial
/// fields; for Cartesian2D, the worst outward increase of P along the four
/// axis rays beyond r0.
double cone_monotonicity_check(const Field& field, const ModelSpec& spec, double r0);

struct DiagnosticsReport {
    double ab_min_margin = 0.0;
    double lipschitz_space = 0.0;
    double lipschitz_time = 0.0;
    double nondegeneracy_slope = 0.0;
    double nondegeneracy_min_ratio = 0.0;
    double cone_violation = 0.0;
    std::optional<double> t0;  // empty: not reached
};

}  // namespace pmf

#endif  // PMF_FRONTIER_HPP
