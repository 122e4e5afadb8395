#include "pmf/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pmf {

namespace {

constexpr int kMonotonicitySamples = 2048;
constexpr int kConstantSamples = 20000;

double table_slope(const GTable& t, std::size_t seg) {
    return (t.g[seg + 1] - t.g[seg]) / (t.p[seg + 1] - t.p[seg]);
}

// Index of the table segment containing p (clamped to the end segments).
std::size_t table_segment(const GTable& t, double p) {
    auto it = std::upper_bound(t.p.begin(), t.p.end(), p);
    std::size_t i = static_cast<std::size_t>(it - t.p.begin());
    if (i == 0) return 0;
    if (i >= t.p.size()) return t.p.size() - 2;
    return i - 1;
}

double table_eval(const GTable& t, double p) {
    std::size_t s = table_segment(t, p);
    return t.g[s] + table_slope(t, s) * (p - t.p[s]);
}

}  // namespace

double pressure_from_density(double rho, double m) {
    if (rho < 0.0) throw std::invalid_argument("pressure_from_density: rho < 0");
    if (m <= 1.0) throw std::invalid_argument("pressure_from_density: m <= 1");
    return m / (m - 1.0) * std::pow(rho, m - 1.0);
}

double density_from_pressure(double p, double m) {
    if (p < 0.0) throw std::invalid_argument("density_from_pressure: P < 0");
    if (m <= 1.0) throw std::invalid_argument("density_from_pressure: m <= 1");
    return std::pow((m - 1.0) * p / m, 1.0 / (m - 1.0));
}

ModelSpec ModelSpec::tumor(double m, double p_m, double p_h) {
    ModelSpec s;
    s.kind = ModelKind::TumorGrowth;
    s.m = m;
    s.p_m = p_m;
    s.rho_m = density_from_pressure(p_m, m);
    s.p_h = p_h > 0.0 ? p_h : p_m;
    s.validate();
    return s;
}

ModelSpec ModelSpec::fisher_kpp(double m) {
    ModelSpec s;
    s.kind = ModelKind::FisherKPP;
    s.m = m;
    s.rho_m = 1.0;
    s.p_m = pressure_from_density(1.0, m);
    s.p_h = s.p_m;
    s.validate();
    return s;
}

ModelSpec ModelSpec::custom(double m, GTable table, double p_m, double p_h) {
    ModelSpec s;
    s.kind = ModelKind::Custom;
    s.m = m;
    s.p_m = p_m;
    s.rho_m = density_from_pressure(p_m, m);
    s.p_h = p_h;
    s.custom_g = std::move(table);
    s.validate();
    return s;
}

ModelSpec ModelSpec::pme(double m, double p_h) {
    GTable zero;
    zero.p = {0.0, p_h};
    zero.g = {0.0, 0.0};
    return custom(m, std::move(zero), p_h, p_h);
}

void ModelSpec::validate() const {
    if (m <= 1.0) throw std::invalid_argument("model: m must exceed 1");
    if (p_m <= 0.0) throw std::invalid_argument("model: p_m must be positive");
    if (rho_m <= 0.0) throw std::invalid_argument("model: rho_m must be positive");
    if (p_h < p_m) throw std::invalid_argument("model: p_h must be >= p_m");

    double p_check = pressure_from_density(rho_m, m);
    if (std::abs(p_check - p_m) > 1e-12 * p_m)
        throw std::invalid_argument("model: p_m inconsistent with rho_m");

    if (kind == ModelKind::Custom) {
        const GTable& t = custom_g;
        if (t.p.size() < 2 || t.p.size() != t.g.size())
            throw std::invalid_argument("model: custom table needs >= 2 knots");
        for (std::size_t i = 0; i + 1 < t.p.size(); ++i) {
            if (!(t.p[i + 1] > t.p[i]))
                throw std::invalid_argument("model: custom table P not increasing");
            if (t.g[i + 1] > t.g[i] + 1e-15)
                throw std::invalid_argument("model: custom table G not non-increasing");
        }
        if (t.p.front() > 0.0 || t.p.back() < p_h)
            throw std::invalid_argument("model: custom table must cover [0, p_h]");
    }

    if (std::abs(eval_g(*this, p_m)) > 1e-12)
        throw std::invalid_argument("model: G(p_m) must vanish");

    // Sampled monotonicity of G over [0, p_h].
    double prev = eval_g(*this, 0.0);
    for (int i = 1; i <= kMonotonicitySamples; ++i) {
        double p = p_h * static_cast<double>(i) / kMonotonicitySamples;
        double g = eval_g(*this, p);
        if (g > prev + 1e-12 * std::max(1.0, std::abs(prev)))
            throw std::invalid_argument("model: G increases on [0, p_h]");
        prev = g;
    }
}

std::string ModelSpec::kind_name() const {
    switch (kind) {
        case ModelKind::TumorGrowth: return "tumor";
        case ModelKind::FisherKPP: return "fisher-kpp";
        case ModelKind::Custom: return "custom";
    }
    return "?";
}

double eval_g(const ModelSpec& spec, double p) {
    if (p < 0.0 || p > spec.p_h * (1.0 + 1e-12))
        throw std::domain_error("eval_g: P outside [0, p_h]");
    switch (spec.kind) {
        case ModelKind::TumorGrowth:
            return spec.p_m - p;
        case ModelKind::FisherKPP:
            return 1.0 - density_from_pressure(p, spec.m);
        case ModelKind::Custom:
            return table_eval(spec.custom_g, p);
    }
    throw std::logic_error("eval_g: bad kind");
}

double eval_g_prime(const ModelSpec& spec, double p) {
    if (p < 0.0 || p > spec.p_h * (1.0 + 1e-12))
        throw std::domain_error("eval_g_prime: P outside [0, p_h]");
    switch (spec.kind) {
        case ModelKind::TumorGrowth:
            return -1.0;
        case ModelKind::FisherKPP: {
            // G(P) = 1 - ((m-1)P/m)^(1/(m-1))
            // G'(P) = -(1/m) ((m-1)P/m)^((2-m)/(m-1))
            double e = (2.0 - spec.m) / (spec.m - 1.0);
            if (p == 0.0) {
                if (e < 0.0)
                    throw std::domain_error("eval_g_prime: derivative unbounded at P=0");
                if (e == 0.0) return -1.0 / spec.m;
                return 0.0;
            }
            return -std::pow((spec.m - 1.0) * p / spec.m, e) / spec.m;
        }
        case ModelKind::Custom:
            return table_slope(spec.custom_g, table_segment(spec.custom_g, p));
    }
    throw std::logic_error("eval_g_prime: bad kind");
}

double eval_reaction(const ModelSpec& spec, double rho) {
    double p = pressure_from_density(rho, spec.m);
    if (p > spec.p_h) {
        if (p > spec.p_h + 1e-9)
            throw std::domain_error("eval_reaction: pressure beyond p_h");
        p = spec.p_h;
    }
    if (spec.kind == ModelKind::FisherKPP) return 1.0 - rho;
    return eval_g(spec, p);
}

StructuralConstants structural_constants(const ModelSpec& spec, int n_dim) {
    if (n_dim < 2) throw std::invalid_argument("structural_constants: n_dim >= 2");
    StructuralConstants out;

    switch (spec.kind) {
        case ModelKind::TumorGrowth:
            out.slope_min = 1.0;
            out.slope_max = 1.0;
            out.cross_sup = spec.p_m / 2.0;
            return out;
        case ModelKind::FisherKPP: {
            // -G'(P) = (1/m) ((m-1)P/m)^((2-m)/(m-1)): monotone in P, value 1/m
            // at P = p_m, so the inf/sup land on the interval ends.
            double m = spec.m;
            double at_pm = 1.0 / m;
            if (m == 2.0) {
                out.slope_min = 0.5;
                out.slope_max = 0.5;
            } else if (m < 2.0) {
                // increasing from 0: infimum degenerates
                out.slope_min = std::nullopt;
                out.slope_max = at_pm;
            } else {
                // decreasing from +inf
                out.slope_min = at_pm;
                out.slope_max = std::nullopt;
            }
            // sup of P*(-G'(P)) on (0, p_m/2]; the power of P is 1/(m-1) > 0 so
            // the sup sits at P = p_m/2 for every m > 1.
            double half = spec.p_m / 2.0;
            out.cross_sup = half / m * std::pow((m - 1.0) * half / m, (2.0 - m) / (m - 1.0));
            return out;
        }
        case ModelKind::Custom: {
            double lo = std::numeric_limits<double>::infinity();
            double hi = 0.0;
            double cross = 0.0;
            for (int i = 0; i <= kConstantSamples; ++i) {
                double p = spec.p_m * static_cast<double>(i) / kConstantSamples;
                double s = -eval_g_prime(spec, p);
                lo = std::min(lo, s);
                hi = std::max(hi, s);
                if (p <= spec.p_m / 2.0) cross = std::max(cross, p * s);
            }
            if (lo > 0.0) out.slope_min = lo;
            if (hi > 0.0) out.slope_max = hi;  // piecewise-linear: always finite
            if (cross > 0.0) out.cross_sup = cross;
            return out;
        }
    }
    throw std::logic_error("structural_constants: bad kind");
}

}  // namespace pmf
