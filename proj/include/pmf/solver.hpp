#ifndef PMF_SOLVER_HPP
#define PMF_SOLVER_HPP

/// Explicit finite-difference solver for d_t rho = Lap(rho^m) + rho g(rho) on
/// cell-centered radially symmetric n-D grids and 2-D Cartesian grids. The
/// scheme applies the stencil to rho^m in conservative form, is positivity
/// preserving, and is monotone in the data under the CFL bound, so discrete
/// solutions inherit the comparison principle the barrier checks rely on.

#include <vector>

#include "pmf/model.hpp"

namespace pmf {

enum class GridKind { RadialND, Cartesian2D };

struct GridGeom {
    GridKind kind = GridKind::RadialND;
    int n_dim = 2;        // spatial dimension of the radial Laplacian
    double h = 0.0;       // cell size
    double extent = 0.0;  // max radius (radial) or half-width (cartesian)
    int cells = 0;        // extent / h, exact

    /// Radial grid with cell centers r_i = (i + 1/2) h, i = 0..cells-1.
    static GridGeom radial(int n_dim, double h, double extent);
    /// Square grid on [-extent, extent]^2, (2*cells)^2 cells, centers
    /// x_i = -extent + (i + 1/2) h.
    static GridGeom cartesian2d(double h, double extent);

    int total_cells() const;
    int side() const { return kind == GridKind::Cartesian2D ? 2 * cells : cells; }
    double radius(int i) const { return (i + 0.5) * h; }  // radial center
    double coord(int i) const { return -extent + (i + 0.5) * h; }
    /// Distance of a cell center from the origin.
    double center_distance(int flat_index) const;
};

struct Field {
    GridGeom geom;
    double t = 0.0;
    std::vector<double> rho;

    static Field zeros(const GridGeom& geom, double t = 0.0);
};

/// Discrete Laplacian of rho^m: 5-point stencil (Cartesian2D, zero ghosts) or
/// conservative face-flux form (1/r^{n-1}) d_r (r^{n-1} d_r u) with a zero-flux
/// face at r = 0 (RadialND).
std::vector<double> laplacian_of_power(const Field& field, double m);

/// CFL-limited step size: cfl_safety * min(diffusion bound, reaction bound),
/// where the diffusion bound is h^2 / (2 * dim_factor * max m rho^(m-1)) and
/// the reaction bound is 1 / sup |d(rho g)/drho|. Vacuum fields get
/// cfl_safety * h^2 so callers never see zero.
double stable_dt(const Field& field, const ModelSpec& spec, double cfl_safety);

/// Forward-Euler update rho + dt (Lap rho^m + rho g). Negative values in
/// [-1e-13, 0) are clamped to zero; anything below that, or NaN, throws a
/// std::runtime_error (instability). With guard_band > 0, support reaching the
/// outermost guard_band cells aborts with "domain too small".
Field step(const Field& field, const ModelSpec& spec, double dt, int guard_band = 0);

struct SolveConfig {
    ModelSpec spec;
    GridGeom geom;
    double cfl_safety = 0.2;
    double t_end = 0.0;                  // absolute; run starts at initial.t
    std::vector<double> snapshot_times;  // sorted, within [initial.t, t_end]
    int guard_band = 2;
};

struct RunDiagnostics {
    std::vector<double> times;
    std::vector<double> mass;
    std::vector<double> max_rho;
    std::vector<double> support_radius;
};

struct RunResult {
    std::vector<Field> snapshots;
    RunDiagnostics diag;
};

/// Integrates from initial.t to t_end, recomputing stable_dt each step and
/// shortening steps to land exactly on every snapshot time.
RunResult run(const SolveConfig& config, Field initial);

std::vector<double> pressure_field(const Field& field, const ModelSpec& spec);

/// Integral of rho over the domain (radial weights include the sphere area).
double total_mass(const Field& field);

}  // namespace pmf

#endif  // PMF_SOLVER_HPP
