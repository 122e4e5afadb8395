#include "pmf/rate_fit.hpp"

#include <cmath>
#include <stdexcept>

namespace pmf {

namespace {

RateFit ols_log(FitKind kind, const std::vector<double>& t, const std::vector<double>& y,
                double t_lo, double t_hi) {
    if (t.size() != y.size()) throw std::invalid_argument("fit: size mismatch");
    if (!(t_hi > t_lo)) throw std::invalid_argument("fit: empty window");

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo || t[i] > t_hi) continue;
        if (!(y[i] > 0.0)) throw std::invalid_argument("fit: nonpositive y in window");
        xs.push_back(kind == FitKind::PowerLaw ? std::log1p(t[i]) : t[i]);
        ys.push_back(std::log(y[i]));
    }
    if (xs.size() < 10) throw std::invalid_argument("fit: fewer than 10 points in window");

    double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit: degenerate abscissa");

    RateFit fit;
    fit.kind = kind;
    fit.exponent = sxy / sxx;
    fit.intercept = my - fit.exponent * mx;
    fit.t_lo = t_lo;
    fit.t_hi = t_hi;
    fit.points = static_cast<int>(xs.size());
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double r = ys[i] - (fit.intercept + fit.exponent * xs[i]);
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / n);
    return fit;
}

}  // namespace

RateFit fit_power_law(const std::vector<double>& t, const std::vector<double>& y,
                      double t_lo, double t_hi) {
    return ols_log(FitKind::PowerLaw, t, y, t_lo, t_hi);
}

RateFit fit_exponential(const std::vector<double>& t, const std::vector<double>& y,
                        double t_lo, double t_hi) {
    return ols_log(FitKind::Exponential, t, y, t_lo, t_hi);
}

}  // namespace pmf
