#include "pmf/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pmf {

namespace {

// Outermost cell index with rho > eps; -1 for vacuum. Radial fields.
int front_cell(const Field& f, double eps) {
    for (int i = f.geom.cells - 1; i >= 0; --i)
        if (f.rho[i] > eps) return i;
    return -1;
}

void require_radial(const Field& f, const char* who) {
    if (f.geom.kind != GridKind::RadialND)
        throw std::invalid_argument(std::string(who) + ": radial field required");
}

// Discrete radial Laplacian of an arbitrary cell scalar (zero-flux at r = 0,
// zero ghost outside).
std::vector<double> radial_laplacian(const GridGeom& g, const std::vector<double>& u) {
    Field tmp;
    tmp.geom = g;
    tmp.rho = u;
    return laplacian_of_power(tmp, 1.0);
}

}  // namespace

double support_radius(const Field& field, double eps) {
    if (field.geom.kind == GridKind::RadialND) {
        int i = front_cell(field, eps);
        return i < 0 ? 0.0 : field.geom.radius(i) + 0.5 * field.geom.h;
    }
    double r = 0.0;
    for (std::size_t i = 0; i < field.rho.size(); ++i)
        if (field.rho[i] > eps)
            r = std::max(r, field.geom.center_distance(static_cast<int>(i)) + 0.5 * field.geom.h);
    return r;
}

std::vector<int> support_boundary_cells(const Field& field, double eps) {
    std::vector<int> out;
    const GridGeom& g = field.geom;
    auto masked = [&](int i) { return field.rho[static_cast<std::size_t>(i)] > eps; };
    if (g.kind == GridKind::RadialND) {
        for (int i = 0; i < g.cells; ++i) {
            if (!masked(i)) continue;
            if (i + 1 >= g.cells || !masked(i + 1)) out.push_back(i);
        }
        return out;
    }
    int n = g.side();
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            int idx = j * n + i;
            if (!masked(idx)) continue;
            bool boundary = i == 0 || i + 1 == n || j == 0 || j + 1 == n || !masked(idx - 1) ||
                            !masked(idx + 1) || !masked(idx - n) || !masked(idx + n);
            if (boundary) out.push_back(idx);
        }
    }
    return out;
}

std::vector<double> front_velocity(const std::vector<double>& times,
                                   const std::vector<double>& radius) {
    if (times.size() != radius.size()) throw std::invalid_argument("front_velocity: size mismatch");
    if (times.size() < 2) throw std::invalid_argument("front_velocity: needs >= 2 snapshots");
    std::size_t n = times.size();
    std::vector<double> v(n);
    v[0] = (radius[1] - radius[0]) / (times[1] - times[0]);
    v[n - 1] = (radius[n - 1] - radius[n - 2]) / (times[n - 1] - times[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i)
        v[i] = (radius[i + 1] - radius[i - 1]) / (times[i + 1] - times[i - 1]);
    return v;
}

double front_pressure_gradient(const Field& field, const ModelSpec& spec, double eps,
                               int skip_cells) {
    require_radial(field, "front_pressure_gradient");
    int i_f = front_cell(field, eps);
    int base = i_f - skip_cells;
    if (i_f < 9 || base < 2)
        throw std::runtime_error("front_pressure_gradient: unresolved front");
    std::vector<double> p = pressure_field(field, spec);
    double h = field.geom.h;
    return std::abs((3.0 * p[base] - 4.0 * p[base - 1] + p[base - 2]) / (2.0 * h));
}

FrontSeries front_series(const std::vector<Field>& snapshots, const ModelSpec& spec,
                         double eps, double velocity_floor) {
    if (snapshots.size() < 3) throw std::invalid_argument("front_series: needs >= 3 snapshots");
    FrontSeries s;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const Field& f : snapshots) {
        s.times.push_back(f.t);
        s.radius.push_back(support_radius(f, eps));
        int i_f = front_cell(f, eps);
        s.grad_p_front.push_back(i_f >= 9 ? front_pressure_gradient(f, spec, eps) : nan);
    }
    s.velocity = front_velocity(s.times, s.radius);
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        if (std::isnan(s.grad_p_front[i]) || s.radius[i] == 0.0) {
            s.darcy_rel_err.push_back(nan);
        } else {
            double v = std::abs(s.velocity[i]);
            s.darcy_rel_err.push_back(std::abs(v - s.grad_p_front[i]) /
                                      std::max(v, velocity_floor));
        }
    }
    return s;
}

double ab_check(const Field& field, const ModelSpec& spec, double eps, int margin_cells) {
    require_radial(field, "ab_check");
    if (!(field.t > 0.0)) throw std::invalid_argument("ab_check: t must be positive");
    std::vector<double> p = pressure_field(field, spec);
    std::vector<double> lap = radial_laplacian(field.geom, p);
    double bound = 1.0 / ((spec.m - 1.0) * field.t);

    int n = field.geom.cells;
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        // interior cells only: everything within margin_cells is in the support
        bool interior = true;
        for (int j = std::max(0, i - margin_cells); j <= std::min(n - 1, i + margin_cells); ++j)
            if (!(field.rho[j] > eps)) interior = false;
        if (!interior) continue;
        worst = std::min(worst, lap[i] + eval_g(spec, std::min(p[i], spec.p_h)) + bound);
    }
    if (!std::isfinite(worst)) throw std::runtime_error("ab_check: no interior support cells");
    return worst;
}

std::pair<double, double> lipschitz_norms(const std::vector<Field>& snapshots,
                                          const ModelSpec& spec, double t_lo, double t_hi,
                                          double region_radius) {
    std::vector<const Field*> window;
    for (const Field& f : snapshots)
        if (f.t >= t_lo - 1e-12 && f.t <= t_hi + 1e-12) window.push_back(&f);
    if (window.size() < 2) throw std::invalid_argument("lipschitz_norms: empty window");

    double max_grad = 0.0, max_dt = 0.0;
    std::vector<double> prev_p;
    double prev_t = 0.0;
    for (const Field* f : window) {
        std::vector<double> p = pressure_field(*f, spec);
        const GridGeom& g = f->geom;
        if (g.kind == GridKind::RadialND) {
            for (int i = 1; i + 1 < g.cells; ++i) {
                if (g.radius(i) > region_radius) break;
                max_grad = std::max(max_grad, std::abs(p[i + 1] - p[i - 1]) / (2.0 * g.h));
            }
        } else {
            int n = g.side();
            for (int j = 1; j + 1 < n; ++j) {
                for (int i = 1; i + 1 < n; ++i) {
                    int idx = j * n + i;
                    if (g.center_distance(idx) > region_radius) continue;
                    double gx = (p[idx + 1] - p[idx - 1]) / (2.0 * g.h);
                    double gy = (p[idx + n] - p[idx - n]) / (2.0 * g.h);
                    max_grad = std::max(max_grad, std::hypot(gx, gy));
                }
            }
        }
        if (!prev_p.empty()) {
            double dt = f->t - prev_t;
            for (std::size_t i = 0; i < p.size(); ++i) {
                if (f->geom.center_distance(static_cast<int>(i)) > region_radius) continue;
                max_dt = std::max(max_dt, std::abs(p[i] - prev_p[i]) / dt);
            }
        }
        prev_p = std::move(p);
        prev_t = f->t;
    }
    return {max_grad, max_dt};
}

RateFit lipschitz_decay_fit(const std::vector<Field>& snapshots, double r0, double t_lo,
                            double t_hi) {
    if (!(t_lo > 0.0) || t_hi < 10.0 * t_lo)
        throw std::invalid_argument("lipschitz_decay_fit: window must span a decade");
    std::vector<double> ts, ys;
    for (const Field& f : snapshots) {
        if (f.t < t_lo - 1e-12 || f.t > t_hi + 1e-12) continue;
        const GridGeom& g = f.geom;
        double max_grad = 0.0;
        if (g.kind == GridKind::RadialND) {
            for (int i = 1; i + 1 < g.cells && g.radius(i) <= r0; ++i)
                max_grad = std::max(max_grad, std::abs(f.rho[i + 1] - f.rho[i - 1]) / (2.0 * g.h));
        } else {
            int n = g.side();
            for (int j = 1; j + 1 < n; ++j)
                for (int i = 1; i + 1 < n; ++i) {
                    int idx = j * n + i;
                    if (g.center_distance(idx) > r0) continue;
                    double gx = (f.rho[idx + 1] - f.rho[idx - 1]) / (2.0 * g.h);
                    double gy = (f.rho[idx + n] - f.rho[idx - n]) / (2.0 * g.h);
                    max_grad = std::max(max_grad, std::hypot(gx, gy));
                }
        }
        ts.push_back(f.t);
        ys.push_back(max_grad);
    }
    return fit_power_law(ts, ys, t_lo, t_hi);
}

NondegeneracyFit nondegeneracy_fit(const Field& field, const ModelSpec& spec, double eps,
                                   int cells_inside, int skip_cells) {
    require_radial(field, "nondegeneracy_fit");
    cells_inside = std::clamp(cells_inside, 5, 10);
    int i_f = front_cell(field, eps) - skip_cells;
    if (i_f + 1 < cells_inside) throw std::runtime_error("nondegeneracy_fit: unresolved front");
    std::vector<double> p = pressure_field(field, spec);
    double edge = field.geom.radius(i_f + skip_cells) + 0.5 * field.geom.h;

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    double min_ratio = std::numeric_limits<double>::infinity();
    double inner_ratio = 0.0;
    for (int j = i_f - cells_inside + 1; j <= i_f; ++j) {
        double dist = edge - field.geom.radius(j);
        double ratio = p[j] / dist;
        min_ratio = std::min(min_ratio, ratio);
        if (j == i_f - cells_inside + 1) inner_ratio = ratio;  // deepest sampled cell
        sx += dist;
        sy += p[j];
        sxx += dist * dist;
        sxy += dist * p[j];
    }
    double n = cells_inside;
    double slope = (sxy - sx * sy / n) / (sxx - sx * sx / n);

    NondegeneracyFit fit;
    fit.slope = slope;
    fit.min_ratio = min_ratio;
    fit.degenerate = !(min_ratio > 0.25 * inner_ratio);
    return fit;
}

std::optional<double> detect_t0(const std::vector<Field>& snapshots, double r0, double eps) {
    if (snapshots.empty()) throw std::invalid_argument("detect_t0: no snapshots");
    auto coverage = [&](const Field& f) {
        int total = 0, covered = 0;
        for (std::size_t i = 0; i < f.rho.size(); ++i) {
            if (f.geom.center_distance(static_cast<int>(i)) > r0) continue;
            ++total;
            if (f.rho[i] > eps) ++covered;
        }
        if (total == 0) throw std::invalid_argument("detect_t0: ball smaller than one cell");
        return std::pair<int, int>(covered, total);
    };
    auto [c_prev, total] = coverage(snapshots.front());
    if (c_prev == total) return snapshots.front().t;
    for (std::size_t k = 1; k < snapshots.size(); ++k) {
        auto [c, tot] = coverage(snapshots[k]);
        if (c == tot) {
            double t0 = snapshots[k - 1].t;
            double t1 = snapshots[k].t;
            double frac = c > c_prev ? static_cast<double>(tot - c_prev) / (c - c_prev) : 1.0;
            return t0 + frac * (t1 - t0);
        }
        c_prev = c;
    }
    return std::nullopt;
}

double cone_monotonicity_check(const Field& field, const ModelSpec& spec, double r0) {
    std::vector<double> p = pressure_field(field, spec);
    double worst = 0.0;
    const GridGeom& g = field.geom;
    if (g.kind == GridKind::RadialND) {
        for (int i = 0; i + 1 < g.cells; ++i)
            if (g.radius(i) > r0) worst = std::max(worst, p[i + 1] - p[i]);
        return worst;
    }
    // axis rays of the Cartesian grid, outward from the first cell beyond r0
    int n = g.side();
    auto scan = [&](int start, int stride) {
        int idx = start;
        for (int k = 0; k + 1 < n / 2; ++k, idx += stride) {
            if (g.center_distance(idx) <= r0) continue;
            worst = std::max(worst, p[idx + stride] - p[idx]);
        }
    };
    for (int row : {n / 2 - 1, n / 2}) {
        scan(row * n + n / 2, 1);        // +x
        scan(row * n + n / 2 - 1, -1);   // -x
        scan((n / 2) * n + row, n);      // +y
        scan((n / 2 - 1) * n + row, -n); // -y
    }
    return worst;
}

}  // namespace pmf
