#ifndef PMF_CONFIG_HPP
#define PMF_CONFIG_HPP

/// Plain-text experiment configuration: `key = value` lines grouped into
/// [model] / [grid] / [initial] / [experiment] sections, '#' comments.
/// Parsing is strict: unknown sections or keys are errors, and every physical
/// parameter passes its module gate before any compute starts.

#include <optional>
#include <string>
#include <vector>

#include "pmf/lv_barriers.hpp"
#include "pmf/model.hpp"
#include "pmf/solver.hpp"

namespace pmf {

enum class InitialKind { BarrierSub, BarrierSup, Barenblatt, Table };
enum class ExperimentKind {
    Simulate,
    Barriers,
    SandwichSub,
    SandwichSup,
    Decay,
    PmeConverge,
    FrontierDiag
};

struct RunConfig {
    ModelSpec model;

    GridGeom grid;
    int guard_band = 4;
    double cfl_safety = 0.2;

    InitialKind initial = InitialKind::BarrierSub;
    double alpha0 = 0.0;  // barrier-sub (also the lower sandwich of barrier-sup runs)
    double beta0 = 0.0;
    double lambda0 = 0.0;  // barrier-sup
    double kappa0 = 0.0;
    double bb_c = 0.0;   // barenblatt profile constant
    double bb_t0 = 1.0;  // barenblatt start time
    std::string table_path;

    ExperimentKind experiment = ExperimentKind::Simulate;
    double t_end = 0.0;
    int snapshot_count = 21;
    std::vector<double> snapshot_times;  // optional explicit list
    double dt_ode = 1e-3;
    double fit_radius = 1.0;
    double fit_t_lo = 0.0;  // 0: chosen by the experiment
    double fit_t_hi = 0.0;
    int refine = 0;  // extra half-h levels for refinement-backed experiments
    std::string output_dir = "out";

    // pass/fail thresholds (defaults match the standard checks)
    double tol_upper = 1e-9;
    double sandwich_ratio_max = 0.6;
    double decay_exp_lo = -1.15;
    double decay_exp_hi = -0.85;
    double darcy_median_max = 0.2;
    double ab_margin_factor = -0.02;  // times p_m
    double support_r0 = -1.0;         // < 0: measured from snapshot 0

    // derived at validation time
    std::optional<double> dg;  // slope_min of the model
    std::optional<double> Dg;  // slope_max

    LVSubParams sub_params() const;
    LVSupParams sup_params() const;

    std::string experiment_name() const;
    std::string initial_name() const;
};

struct ConfigError {
    int line;  // 0 when not tied to a line
    std::string key;
    std::string reason;

    std::string str() const;
};

struct ParseResult {
    std::optional<RunConfig> config;
    std::vector<ConfigError> errors;

    bool ok() const { return config.has_value(); }
};

ParseResult parse_config(const std::string& text);

/// Canonical text form; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const RunConfig& config);

}  // namespace pmf

#endif  // PMF_CONFIG_HPP
