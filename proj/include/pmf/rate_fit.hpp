#ifndef PMF_RATE_FIT_HPP
#define PMF_RATE_FIT_HPP

/// Ordinary least squares fits on log-transformed series, used for every
/// decay-rate and expansion-rate claim. PowerLaw fits log y against log(1+t);
/// Exponential fits log y against t.

#include <vector>

namespace pmf {

enum class FitKind { PowerLaw, Exponential };

struct RateFit {
    FitKind kind = FitKind::PowerLaw;
    double exponent = 0.0;  // slope: power-law exponent or exponential rate
    double intercept = 0.0;
    double residual_rms = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    int points = 0;

    /// True when the model class explains the data to within tol RMS.
    bool clean(double tol = 1e-6) const { return residual_rms <= tol; }
};

/// Fits y ~ exp(intercept) (1+t)^exponent over samples with t in [t_lo, t_hi].
/// Requires >= 10 points in the window, all with y > 0; throws
/// std::invalid_argument otherwise.
RateFit fit_power_law(const std::vector<double>& t, const std::vector<double>& y,
                      double t_lo, double t_hi);

/// Fits y ~ exp(intercept) exp(exponent t) over the window; same preconditions.
RateFit fit_exponential(const std::vector<double>& t, const std::vector<double>& y,
                        double t_lo, double t_hi);

}  // namespace pmf

#endif  // PMF_RATE_FIT_HPP
