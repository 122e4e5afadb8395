#include "pmf/lv_barriers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pmf {

namespace {

void check_positive(double v, const char* name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string("lv: ") + name + " must be positive");
}

void validate_sub(const LVSubParams& p) {
    check_positive(p.p_m, "p_m");
    if (!(p.m > 1.0)) throw std::invalid_argument("lv: m must exceed 1");
    if (p.n < 2) throw std::invalid_argument("lv: n must be >= 2");
    check_positive(p.dg, "dg");
    check_positive(p.alpha0, "alpha0");
    check_positive(p.beta0, "beta0");
}

void validate_sup(const LVSupParams& p) {
    check_positive(p.p_m, "p_m");
    if (!(p.m > 1.0)) throw std::invalid_argument("lv: m must exceed 1");
    if (p.n < 2) throw std::invalid_argument("lv: n must be >= 2");
    check_positive(p.Dg, "Dg");
    check_positive(p.lambda0, "lambda0");
    check_positive(p.kappa0, "kappa0");
}

// second-component coefficient (2n(m-1)+4)/(c(m-1)) shared by both systems
double wide_coef(double n, double m, double c) {
    return (2.0 * n * (m - 1.0) + 4.0) / (c * (m - 1.0));
}

double logistic_upper(double p_m, double rate, double x0, double t) {
    // solution bound of xdot <= rate x (p_m - x) with x0 < p_m
    double e = std::exp(-p_m * rate * t);
    return p_m * x0 / ((p_m - x0) * e + x0);
}

double logistic_lower(double p_m, double rate, double x0, double t) {
    // solution bound of xdot >= rate x (p_m - x) with x0 > p_m, decreasing
    // toward p_m from above
    double e = std::exp(-p_m * rate * t);
    return p_m * x0 / (x0 - (x0 - p_m) * e);
}

template <typename Rhs>
LVTrajectory rk4(BarrierKind kind, LVState y0, double t_end, double dt, Rhs rhs) {
    if (!(t_end >= 0.0)) throw std::invalid_argument("lv: t_end must be >= 0");
    if (t_end > 1e4) throw std::invalid_argument("lv: t_end capped at 1e4");
    LVTrajectory traj;
    traj.kind = kind;
    traj.dt = dt;
    if (t_end == 0.0) {
        traj.times = {0.0};
        traj.states = {y0};
        return traj;
    }
    if (!(dt > 0.0) || dt > std::min(1e-2, t_end / 100.0) * (1.0 + 1e-12))
        throw std::invalid_argument("lv: dt must be in (0, min(1e-2, t_end/100)]");

    auto n_steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    traj.times.reserve(n_steps + 1);
    traj.states.reserve(n_steps + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(y0);
    LVState y = y0;
    for (std::size_t i = 0; i < n_steps; ++i) {
        double t = static_cast<double>(i) * dt;
        double step = std::min(dt, t_end - t);
        LVState k1 = rhs(y);
        LVState k2 = rhs({y.first + 0.5 * step * k1.first, y.second + 0.5 * step * k1.second});
        LVState k3 = rhs({y.first + 0.5 * step * k2.first, y.second + 0.5 * step * k2.second});
        LVState k4 = rhs({y.first + step * k3.first, y.second + step * k3.second});
        y.first += step / 6.0 * (k1.first + 2.0 * k2.first + 2.0 * k3.first + k4.first);
        y.second += step / 6.0 * (k1.second + 2.0 * k2.second + 2.0 * k3.second + k4.second);
        traj.times.push_back(i + 1 == n_steps ? t_end : (static_cast<double>(i + 1) * dt));
        traj.states.push_back(y);
    }
    return traj;
}

[[noreturn]] void invariant_breach(const char* what, std::size_t i, double t) {
    throw std::runtime_error("lv: trajectory invariant breach (" + std::string(what) +
                             ") at sample " + std::to_string(i) + ", t = " + std::to_string(t) +
                             "; dt too large or parameter error");
}

// Qualitative theorems for the trajectories; per-step monotonicity allows
// roundoff stagnation near the fixed point.
void check_sub_invariants(const LVSubParams& p, const LVTrajectory& traj) {
    double tol = 1e-12 * p.p_m;
    double band_tol = 1e-6 * p.p_m;
    double wide = wide_coef(p.n, p.m, p.dg);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const LVState& s = traj.states[i];
        double t = traj.times[i];
        if (!(s.first < p.p_m) || !(s.first >= p.alpha0 - tol))
            invariant_breach("alpha range", i, t);
        if (!(s.second > 0.0) || !(s.second <= p.beta0 + tol))
            invariant_breach("beta range", i, t);
        if (p.p_m - 2.0 * p.n / p.dg * s.second - s.first < -band_tol)
            invariant_breach("sandwich upper", i, t);
        if (s.first - (p.p_m - wide * s.second) < -band_tol)
            invariant_breach("sandwich lower", i, t);
        if (i > 0) {
            const LVState& q = traj.states[i - 1];
            if (s.first < q.first - tol) invariant_breach("alpha monotone", i, t);
            if (s.second > q.second + tol) invariant_breach("beta monotone", i, t);
            double prev_ratio = q.first / q.second;
            if (s.first / s.second < prev_ratio * (1.0 - 1e-12))
                invariant_breach("ratio monotone", i, t);
        }
    }
}

void check_sup_invariants(const LVSupParams& p, const LVTrajectory& traj) {
    double tol = 1e-12 * p.p_m;
    double band_tol = 1e-6 * p.p_m;
    double wide = wide_coef(p.n, p.m, p.Dg);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const LVState& s = traj.states[i];
        double t = traj.times[i];
        if (!(s.first < p.p_m) || !(s.first >= p.lambda0 - tol))
            invariant_breach("lambda range", i, t);
        if (!(s.second > 0.0) || !(s.second <= p.kappa0 + tol))
            invariant_breach("kappa range", i, t);
        if (p.p_m - s.first - 2.0 * p.n / p.Dg * s.second < -band_tol)
            invariant_breach("chain upper", i, t);
        if (p.p_m - 2.0 * s.first - wide * s.second > band_tol)
            invariant_breach("chain lower", i, t);
        if (i > 0) {
            const LVState& q = traj.states[i - 1];
            if (s.first < q.first - tol) invariant_breach("lambda monotone", i, t);
            if (s.second > q.second + tol) invariant_breach("kappa monotone", i, t);
        }
    }
}

}  // namespace

GateCheck check_gate_sub(const LVSubParams& p) {
    validate_sub(p);
    double lower = (p.p_m - 2.0 * p.n / p.dg * p.beta0) - p.alpha0;
    double upper = p.alpha0 - (p.p_m - wide_coef(p.n, p.m, p.dg) * p.beta0);
    return {lower > 0.0 && upper > 0.0, lower, upper};
}

GateCheck check_gate_sup(const LVSupParams& p) {
    validate_sup(p);
    double lower = p.p_m - p.lambda0 - 2.0 * p.n / p.Dg * p.kappa0;
    double upper = -(p.p_m - 2.0 * p.lambda0 - wide_coef(p.n, p.m, p.Dg) * p.kappa0);
    return {lower > 0.0 && upper > 0.0, lower, upper};
}

LVState rhs_sub(const LVSubParams& p, LVState s) {
    double c = (p.m - 1.0) * p.dg;
    return {c * s.first * (p.p_m - s.first - 2.0 * p.n / p.dg * s.second),
            c * s.second * (p.p_m - s.first - wide_coef(p.n, p.m, p.dg) * s.second)};
}

LVState rhs_sup(const LVSupParams& p, LVState s) {
    double c = p.Dg * (p.m - 1.0);
    return {c * s.first * (p.p_m - s.first - 2.0 * p.n / p.Dg * s.second),
            c * s.second * (p.p_m - 2.0 * s.first - wide_coef(p.n, p.m, p.Dg) * s.second)};
}

LVState LVTrajectory::at(double t) const {
    if (times.empty()) throw std::domain_error("lv: empty trajectory");
    if (t < times.front() - 1e-12 || t > times.back() + 1e-12)
        throw std::domain_error("lv: time outside trajectory range");
    t = std::clamp(t, times.front(), times.back());
    auto it = std::lower_bound(times.begin(), times.end(), t);
    std::size_t i = static_cast<std::size_t>(it - times.begin());
    if (i == 0) return states.front();
    double t0 = times[i - 1], t1 = times[i];
    double w = (t1 > t0) ? (t - t0) / (t1 - t0) : 0.0;
    const LVState& a = states[i - 1];
    const LVState& b = states[i];
    return {a.first + w * (b.first - a.first), a.second + w * (b.second - a.second)};
}

SubBounds closed_form_bounds_sub(const LVSubParams& p, double t) {
    if (!check_gate_sub(p).pass) throw std::invalid_argument("lv: gate ini1 violated");
    double rate = (p.m - 1.0) * p.dg;
    double narrow = 2.0 * p.n / p.dg;
    double wide = wide_coef(p.n, p.m, p.dg);
    double f10 = p.alpha0 + narrow * p.beta0;
    double f20 = p.alpha0 + wide * p.beta0;
    SubBounds b;
    b.f1_upper = logistic_upper(p.p_m, rate, f10, t);
    b.f2_lower = logistic_lower(p.p_m, rate, f20, t);
    // d/dt(alpha/beta) = 4 alpha with alpha0 <= alpha <= p_m, so the ratio
    // sits between 4 alpha0 t + alpha0/beta0 and 4 p_m t + alpha0/beta0
    b.beta_low = p.alpha0 / (4.0 * p.p_m * t + p.alpha0 / p.beta0);
    b.beta_high = p.p_m / (4.0 * p.alpha0 * t + p.alpha0 / p.beta0);
    b.gap_low = (p.p_m - b.f1_upper) + narrow * b.beta_low;
    b.gap_high = (p.p_m - b.f2_lower) + wide * b.beta_high;
    return b;
}

SupBounds closed_form_bounds_sup(const LVSupParams& p, double t) {
    if (!check_gate_sup(p).pass) throw std::invalid_argument("lv: gate lowini violated");
    double rate = p.Dg * (p.m - 1.0);
    double narrow = 2.0 * p.n / p.Dg;
    double slow = rate * p.lambda0;                // exponent of the slow side
    double fast = rate * p.p_m + 4.0 * p.kappa0;   // exponent of the fast side
    double g10 = p.lambda0 + narrow * p.kappa0;
    SupBounds b;
    b.ratio_low = p.lambda0 / p.kappa0 * std::exp(slow * t);
    b.ratio_high = p.lambda0 / p.kappa0 * std::exp(fast * t);
    b.kappa_low = p.kappa0 * std::exp(-fast * t);
    b.kappa_high = p.kappa0 * p.p_m / p.lambda0 * std::exp(-slow * t);
    b.gap_low = (p.p_m - logistic_upper(p.p_m, rate, g10, t)) + narrow * b.kappa_low;
    // Gronwall on u = p_m - lambda: udot <= -rate lambda0 u + rate narrow
    // p_m kappa(t) with kappa <= kappa_high, so u <= (u0 + 2n(m-1) p_m^2
    // kappa0 / lambda0 * t) exp(-slow t)
    b.gap_high = (p.p_m - p.lambda0 +
                  2.0 * p.n * (p.m - 1.0) * p.p_m * p.p_m * p.kappa0 / p.lambda0 * t) *
                 std::exp(-slow * t);
    return b;
}

LVTrajectory integrate_sub(const LVSubParams& p, double t_end, double dt) {
    GateCheck gate = check_gate_sub(p);
    if (!gate.pass)
        throw std::invalid_argument("lv: gate ini1 violated (margins " +
                                    std::to_string(gate.margin_lower) + ", " +
                                    std::to_string(gate.margin_upper) + ")");
    LVTrajectory traj = rk4(BarrierKind::Sub, {p.alpha0, p.beta0}, t_end, dt,
                            [&](LVState s) { return rhs_sub(p, s); });
    check_sub_invariants(p, traj);
    return traj;
}

LVTrajectory integrate_sup(const LVSupParams& p, double t_end, double dt) {
    GateCheck gate = check_gate_sup(p);
    if (!gate.pass)
        throw std::invalid_argument("lv: gate lowini violated (margins " +
                                    std::to_string(gate.margin_lower) + ", " +
                                    std::to_string(gate.margin_upper) + ")");
    LVTrajectory traj = rk4(BarrierKind::Sup, {p.lambda0, p.kappa0}, t_end, dt,
                            [&](LVState s) { return rhs_sup(p, s); });
    check_sup_invariants(p, traj);
    return traj;
}

double Barrier::value(double t, double r) const {
    LVState s = traj.at(t);
    return std::max(s.first - s.second * r * r, 0.0);
}

double Barrier::support_radius(double t) const {
    LVState s = traj.at(t);
    return std::sqrt(s.first / s.second);
}

Barrier make_sub_barrier(const LVSubParams& p, double t_end, double dt) {
    return {BarrierKind::Sub, p.p_m, p.m, p.n, p.dg, integrate_sub(p, t_end, dt)};
}

Barrier make_sup_barrier(const LVSupParams& p, double t_end, double dt) {
    return {BarrierKind::Sup, p.p_m, p.m, p.n, p.Dg, integrate_sup(p, t_end, dt)};
}

double barrier_residual(const Barrier& b, const ModelSpec& spec, double t, double r) {
    LVState s = b.traj.at(t);
    double q = s.first - s.second * r * r;
    if (q <= 1e-9) throw std::domain_error("barrier_residual: point outside positivity set");

    LVState ds;
    if (b.kind == BarrierKind::Sub) {
        ds = rhs_sub({b.p_m, b.m, b.n, b.rate, s.first, s.second}, s);
    } else {
        ds = rhs_sup({b.p_m, b.m, b.n, b.rate, s.first, s.second}, s);
    }
    double dq_dt = ds.first - ds.second * r * r;
    double lap_q = -2.0 * b.n * s.second;
    double grad_q_sq = 4.0 * s.second * s.second * r * r;
    return dq_dt - (b.m - 1.0) * q * lap_q - grad_q_sq - (b.m - 1.0) * q * eval_g(spec, q);
}

double flat_super_solution_level(double p_m, double m, double p_h, double t) {
    if (!(p_h >= p_m)) throw std::invalid_argument("lv: flat super level needs p_h >= p_m");
    if (p_h == p_m) return p_m;
    return logistic_lower(p_m, m - 1.0, p_h, t);
}

double worst_band_violation_sub(const LVSubParams& p, const LVTrajectory& traj) {
    double narrow = 2.0 * p.n / p.dg;
    double wide = wide_coef(p.n, p.m, p.dg);
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const LVState& s = traj.states[i];
        SubBounds b = closed_form_bounds_sub(p, traj.times[i]);
        double f1 = s.first + narrow * s.second;
        double f2 = s.first + wide * s.second;
        double gap = p.p_m - s.first;
        worst = std::max({worst, f1 - b.f1_upper, b.f2_lower - f2, b.beta_low - s.second,
                          s.second - b.beta_high, b.gap_low - gap, gap - b.gap_high});
    }
    return worst;
}

double worst_band_violation_sup(const LVSupParams& p, const LVTrajectory& traj) {
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const LVState& s = traj.states[i];
        SupBounds b = closed_form_bounds_sup(p, traj.times[i]);
        double ratio = s.first / s.second;
        double gap = p.p_m - s.first;
        // the ratio band spans many orders of magnitude: violations measured
        // relative to the band value
        worst = std::max({worst, (b.ratio_low - ratio) / b.ratio_low,
                          (ratio - b.ratio_high) / b.ratio_high,
                          (b.kappa_low - s.second) / b.kappa_low,
                          (s.second - b.kappa_high) / b.kappa_high,
                          (b.gap_low - gap) / b.gap_low, (gap - b.gap_high) / b.gap_high});
    }
    return worst;
}

std::vector<std::pair<double, double>> support_radius_series(const Barrier& b) {
    std::vector<std::pair<double, double>> out;
    out.reserve(b.traj.size());
    for (std::size_t i = 0; i < b.traj.size(); ++i) {
        const LVState& s = b.traj.states[i];
        out.emplace_back(b.traj.times[i], std::sqrt(s.first / s.second));
    }
    return out;
}

}  // namespace pmf
