#include "pmf/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pmf {

namespace {

constexpr double kNegativeClampTol = 1e-13;

double int_pow(double x, int e) {
    double v = 1.0;
    for (int i = 0; i < e; ++i) v *= x;
    return v;
}

// rho^m with the common exponents inlined; std::pow(0, m) is exactly 0.
inline double density_power(double rho, double m) {
    if (m == 2.0) return rho * rho;
    if (m == 3.0) return rho * rho * rho;
    return rho > 0.0 ? std::pow(rho, m) : 0.0;
}

inline double density_power_dm1(double rho, double m) {  // rho^(m-1)
    if (m == 2.0) return rho;
    if (m == 3.0) return rho * rho;
    return rho > 0.0 ? std::pow(rho, m - 1.0) : 0.0;
}

bool reaction_is_zero(const ModelSpec& spec) {
    if (spec.kind != ModelKind::Custom) return false;
    for (double g : spec.custom_g.g)
        if (g != 0.0) return false;
    return true;
}

// sup over [0, rho_h] of |d(rho g(rho))/drho| = |G(P) + (m-1) P G'(P)|, the
// reaction time-scale entering stable_dt. Closed forms for the built-ins; for
// tables the expression is linear per segment, so knots carry the extrema.
double reaction_slope_bound(const ModelSpec& spec) {
    switch (spec.kind) {
        case ModelKind::TumorGrowth:
            // d(rho g)/drho = p_m - m P(rho), monotone in rho
            return std::max(spec.p_m, spec.m * spec.p_h - spec.p_m);
        case ModelKind::FisherKPP: {
            double rho_h = density_from_pressure(spec.p_h, spec.m);
            return std::max(1.0, 2.0 * rho_h - 1.0);
        }
        case ModelKind::Custom: {
            const GTable& t = spec.custom_g;
            double worst = 0.0;
            for (std::size_t s = 0; s + 1 < t.p.size(); ++s) {
                double slope = (t.g[s + 1] - t.g[s]) / (t.p[s + 1] - t.p[s]);
                for (double p : {t.p[s], std::min(t.p[s + 1], spec.p_h)}) {
                    if (p > spec.p_h) continue;
                    double g = t.g[s] + slope * (p - t.p[s]);
                    worst = std::max(worst, std::abs(g + (spec.m - 1.0) * p * slope));
                }
            }
            return worst;
        }
    }
    throw std::logic_error("reaction_slope_bound: bad kind");
}

// Finite-volume face weights: flux r^(n-1) du/dr through the faces at i*h and
// (i+1)*h, divided by the exact shell volume (r_{i+1/2}^n - r_{i-1/2}^n)/n.
// For n = 2 this is the familiar midpoint form; the exact volume keeps the
// operator consistent at the axis cell for n >= 3.
struct RadialStencil {
    std::vector<double> w_minus;
    std::vector<double> w_plus;

    explicit RadialStencil(const GridGeom& g) {
        w_minus.resize(g.cells);
        w_plus.resize(g.cells);
        int n = g.n_dim;
        for (int i = 0; i < g.cells; ++i) {
            double shell = (int_pow((i + 1) * g.h, n) - int_pow(i * g.h, n)) / n;
            w_minus[i] = int_pow(i * g.h, n - 1) / (shell * g.h);  // zero face at r = 0
            w_plus[i] = int_pow((i + 1) * g.h, n - 1) / (shell * g.h);
        }
    }
};

// Outer faces are zero-flux (copy ghost). Valid runs keep a vacuum guard band
// at the rim, where a copy ghost and a zero ghost agree exactly; the copy
// ghost additionally makes the constant states exact discrete equilibria.
void laplacian_radial(const GridGeom& g, const std::vector<double>& u,
                      const RadialStencil& st, std::vector<double>& out) {
    int n = g.cells;
    for (int i = 0; i < n; ++i) {
        double u_left = (i > 0) ? u[i - 1] : u[0];  // zero-flux face at r = 0
        double u_right = (i + 1 < n) ? u[i + 1] : u[i];
        out[i] = st.w_plus[i] * (u_right - u[i]) - st.w_minus[i] * (u[i] - u_left);
    }
}

void laplacian_cartesian(const GridGeom& g, const std::vector<double>& u,
                         std::vector<double>& out) {
    int n = g.side();
    double inv_h2 = 1.0 / (g.h * g.h);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            int idx = j * n + i;
            double c = u[idx];
            double w = (i > 0) ? u[idx - 1] : c;
            double e = (i + 1 < n) ? u[idx + 1] : c;
            double s = (j > 0) ? u[idx - n] : c;
            double nn = (j + 1 < n) ? u[idx + n] : c;
            out[idx] = (w + e + s + nn - 4.0 * c) * inv_h2;
        }
    }
}

int guard_breach_index(const Field& f, int guard_band, double eps) {
    const GridGeom& g = f.geom;
    if (g.kind == GridKind::RadialND) {
        for (int i = std::max(0, g.cells - guard_band); i < g.cells; ++i)
            if (f.rho[i] > eps) return i;
        return -1;
    }
    int n = g.side();
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            bool in_band = i < guard_band || j < guard_band || i >= n - guard_band ||
                           j >= n - guard_band;
            if (in_band && f.rho[j * n + i] > eps) return j * n + i;
        }
    }
    return -1;
}

void require_same_geom(const GridGeom& a, const GridGeom& b, const char* who) {
    if (a.kind != b.kind || a.n_dim != b.n_dim || a.h != b.h || a.extent != b.extent)
        throw std::invalid_argument(std::string(who) + ": field geometry mismatch");
}

}  // namespace

GridGeom GridGeom::radial(int n_dim, double h, double extent) {
    if (n_dim < 2) throw std::invalid_argument("grid: n_dim must be >= 2");
    if (!(h > 0.0) || !(extent > 0.0))
        throw std::invalid_argument("grid: h and extent must be positive");
    double cells_real = extent / h;
    int cells = static_cast<int>(std::lround(cells_real));
    if (cells < 1 || std::abs(cells * h - extent) > 1e-12 * extent)
        throw std::invalid_argument("grid: extent must be an exact multiple of h");
    return {GridKind::RadialND, n_dim, h, extent, cells};
}

GridGeom GridGeom::cartesian2d(double h, double extent) {
    GridGeom g = radial(2, h, extent);
    g.kind = GridKind::Cartesian2D;
    return g;
}

int GridGeom::total_cells() const {
    return kind == GridKind::Cartesian2D ? side() * side() : cells;
}

double GridGeom::center_distance(int flat_index) const {
    if (kind == GridKind::RadialND) return radius(flat_index);
    int n = side();
    double x = coord(flat_index % n);
    double y = coord(flat_index / n);
    return std::hypot(x, y);
}

Field Field::zeros(const GridGeom& geom, double t) {
    Field f;
    f.geom = geom;
    f.t = t;
    f.rho.assign(static_cast<std::size_t>(geom.total_cells()), 0.0);
    return f;
}

std::vector<double> laplacian_of_power(const Field& field, double m) {
    if (m < 1.0) throw std::invalid_argument("laplacian_of_power: m must be >= 1");
    std::vector<double> u(field.rho.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = density_power(field.rho[i], m);
    std::vector<double> out(u.size());
    if (field.geom.kind == GridKind::RadialND) {
        RadialStencil st(field.geom);
        laplacian_radial(field.geom, u, st, out);
    } else {
        laplacian_cartesian(field.geom, u, out);
    }
    return out;
}

double stable_dt(const Field& field, const ModelSpec& spec, double cfl_safety) {
    if (!(cfl_safety > 0.0) || cfl_safety > 1.0)
        throw std::invalid_argument("stable_dt: cfl_safety must be in (0, 1]");
    double h2 = field.geom.h * field.geom.h;
    double max_rho = 0.0;
    for (double v : field.rho) max_rho = std::max(max_rho, v);
    if (max_rho <= 0.0) return cfl_safety * h2;  // vacuum floor

    double dim_factor =
        field.geom.kind == GridKind::Cartesian2D ? 2.0 : static_cast<double>(field.geom.n_dim);
    double diff_scale = 2.0 * dim_factor * spec.m * density_power_dm1(max_rho, spec.m);
    double dt = h2 / diff_scale;
    double react = reaction_slope_bound(spec);
    if (react > 0.0) dt = std::min(dt, 1.0 / react);
    return cfl_safety * dt;
}

Field step(const Field& field, const ModelSpec& spec, double dt, int guard_band) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    if (dt > stable_dt(field, spec, 1.0) * (1.0 + 1e-12))
        throw std::invalid_argument("step: dt exceeds the stable bound");

    std::vector<double> lap = laplacian_of_power(field, spec.m);
    Field next;
    next.geom = field.geom;
    next.t = field.t + dt;
    next.rho.resize(field.rho.size());

    const bool zero_g = reaction_is_zero(spec);
    const ModelKind kind = spec.kind;
    const double m = spec.m;
    const double p_m = spec.p_m;
    const double press_coef = m / (m - 1.0);
    const double rho_cap = density_from_pressure(spec.p_h, m) + 1e-9;

    for (std::size_t i = 0; i < field.rho.size(); ++i) {
        double rho = field.rho[i];
        double g;
        if (zero_g) {
            g = 0.0;
        } else if (kind == ModelKind::TumorGrowth) {
            g = p_m - press_coef * density_power_dm1(rho, m);
        } else if (kind == ModelKind::FisherKPP) {
            g = 1.0 - rho;
        } else {
            g = eval_reaction(spec, rho);
        }
        double v = rho + dt * (lap[i] + rho * g);
        if (std::isnan(v) || v < -kNegativeClampTol || v > rho_cap)
            throw std::runtime_error("step: instability at cell " + std::to_string(i) +
                                     " (value " + std::to_string(v) + ")");
        next.rho[i] = v < 0.0 ? 0.0 : v;
    }
    if (guard_band > 0) {
        int idx = guard_breach_index(next, guard_band, support_eps(spec));
        if (idx >= 0)
            throw std::runtime_error("step: domain too small (support entered guard band at cell " +
                                     std::to_string(idx) + ", t = " + std::to_string(next.t) + ")");
    }
    return next;
}

RunResult run(const SolveConfig& config, Field initial) {
    config.spec.validate();
    require_same_geom(config.geom, initial.geom, "run");
    if (config.t_end < initial.t)
        throw std::invalid_argument("run: t_end before initial time");
    for (std::size_t i = 0; i < config.snapshot_times.size(); ++i) {
        double s = config.snapshot_times[i];
        if (s < initial.t - 1e-12 || s > config.t_end + 1e-12)
            throw std::invalid_argument("run: snapshot time outside [t0, t_end]");
        if (i > 0 && s < config.snapshot_times[i - 1])
            throw std::invalid_argument("run: snapshot times must be sorted");
    }
    double rho_cap = density_from_pressure(config.spec.p_h, config.spec.m) + 1e-9;
    for (double v : initial.rho)
        if (v < 0.0 || v > rho_cap)
            throw std::invalid_argument("run: initial data outside [0, rho_h]");

    RunResult result;
    double eps = support_eps(config.spec);
    auto emit = [&](const Field& f) {
        result.diag.times.push_back(f.t);
        result.diag.mass.push_back(total_mass(f));
        result.diag.max_rho.push_back(*std::max_element(f.rho.begin(), f.rho.end()));
        double sr = 0.0;
        for (std::size_t i = 0; i < f.rho.size(); ++i)
            if (f.rho[i] > eps)
                sr = std::max(sr, f.geom.center_distance(static_cast<int>(i)) + 0.5 * f.geom.h);
        result.diag.support_radius.push_back(sr);
        result.snapshots.push_back(f);
    };

    Field current = std::move(initial);
    std::size_t next_snap = 0;
    while (next_snap < config.snapshot_times.size() &&
           config.snapshot_times[next_snap] <= current.t + 1e-12) {
        emit(current);
        ++next_snap;
    }
    while (current.t < config.t_end - 1e-12) {
        double dt = stable_dt(current, config.spec, config.cfl_safety);
        double limit = config.t_end;
        if (next_snap < config.snapshot_times.size())
            limit = std::min(limit, config.snapshot_times[next_snap]);
        dt = std::min(dt, limit - current.t);
        current = step(current, config.spec, dt, config.guard_band);
        while (next_snap < config.snapshot_times.size() &&
               current.t >= config.snapshot_times[next_snap] - 1e-12) {
            current.t = config.snapshot_times[next_snap];  // cancel roundoff drift
            emit(current);
            ++next_snap;
        }
    }
    if (config.snapshot_times.empty()) emit(current);
    return result;
}

std::vector<double> pressure_field(const Field& field, const ModelSpec& spec) {
    std::vector<double> p(field.rho.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = pressure_from_density(field.rho[i], spec.m);
    return p;
}

double total_mass(const Field& field) {
    const GridGeom& g = field.geom;
    if (g.kind == GridKind::Cartesian2D) {
        double sum = 0.0;
        for (double v : field.rho) sum += v;
        return sum * g.h * g.h;
    }
    // surface area of the unit (n-1)-sphere: 2 pi^(n/2) / Gamma(n/2); the cell
    // weight is the exact shell volume, matching the stencil's conservation
    double n = static_cast<double>(g.n_dim);
    double area = 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
    double sum = 0.0;
    for (int i = 0; i < g.cells; ++i) {
        double shell = (int_pow((i + 1) * g.h, g.n_dim) - int_pow(i * g.h, g.n_dim)) / n;
        sum += field.rho[i] * shell;
    }
    return area * sum;
}

}  // namespace pmf
