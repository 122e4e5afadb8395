#ifndef PMF_MODEL_HPP
#define PMF_MODEL_HPP

/// Reaction nonlinearities for the porous-medium reaction-diffusion equation
///   d_t rho = Lap(rho^m) + rho * g(rho),
/// expressed in the pressure variable P = m/(m-1) * rho^(m-1) as G(P) = g(rho).
/// Built-in models: tumor growth G(P) = p_m - P, and Fisher-KPP g(rho) = 1 - rho.
/// Custom models are monotone piecewise-linear tables of G over P.

#include <optional>
#include <string>
#include <vector>

namespace pmf {

enum class ModelKind { TumorGrowth, FisherKPP, Custom };

/// Piecewise-linear table of G(P). Knots must be strictly increasing in P and
/// non-increasing in G.
struct GTable {
    std::vector<double> p;
    std::vector<double> g;
};

struct ModelSpec {
    ModelKind kind = ModelKind::TumorGrowth;
    double m = 2.0;      // diffusion exponent, > 1
    double p_m = 1.0;    // pressure threshold where G vanishes
    double rho_m = 0.5;  // density threshold, p_m = m/(m-1) * rho_m^(m-1)
    double p_h = 1.0;    // a priori pressure bound, >= p_m
    GTable custom_g;     // Custom only

    static ModelSpec tumor(double m, double p_m = 1.0,
                           double p_h = -1.0 /* default: p_m */);
    static ModelSpec fisher_kpp(double m);
    static ModelSpec custom(double m, GTable table, double p_m, double p_h);
    /// Zero-reaction model (plain porous medium equation) on [0, p_h].
    static ModelSpec pme(double m, double p_h);

    /// Throws std::invalid_argument when any structural invariant fails
    /// (m <= 1, p_m/rho_m mismatch, G(p_m) != 0, non-monotone table, ...).
    void validate() const;

    std::string kind_name() const;
};

double pressure_from_density(double rho, double m);
double density_from_pressure(double p, double m);

/// G(P) for P in [0, p_h]; throws std::domain_error outside.
double eval_g(const ModelSpec& spec, double p);

/// dG/dP. Throws std::domain_error at P = 0 when the derivative is unbounded
/// there (Fisher-KPP with m > 2).
double eval_g_prime(const ModelSpec& spec, double p);

/// g(rho) = G(P(rho)) for the solver's reaction term; clamps pressures within
/// 1e-9 of p_h back onto the table range before rejecting.
double eval_reaction(const ModelSpec& spec, double rho);

/// Slope bounds of -G' used by the barrier constructions, each absent when the
/// corresponding hypothesis fails:
///   slope_min  = inf over [0,p_m] of -G'    (absent: infimum not positive)
///   slope_max  = sup over [0,p_m] of -G'    (absent: unbounded)
///   cross_sup  = sup over 0<=P1<=P2<=p_m/2 of -P1*G'(P2)  (absent: unbounded)
struct StructuralConstants {
    std::optional<double> slope_min;
    std::optional<double> slope_max;
    std::optional<double> cross_sup;
};

StructuralConstants structural_constants(const ModelSpec& spec, int n_dim);

/// Density threshold below which a cell counts as vacuum.
inline double support_eps(const ModelSpec& spec) { return 1e-10 * spec.rho_m; }

}  // namespace pmf

#endif  // PMF_MODEL_HPP
