#include "pmf/config.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "pmf/io.hpp"

namespace pmf {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct RawEntry {
    int line;
    std::string value;
    bool used = false;
};

using Section = std::map<std::string, RawEntry>;

const std::vector<std::string> kSections = {"model", "grid", "initial", "experiment"};

// key vocabulary per section; unknown keys are hard errors
const std::map<std::string, std::vector<std::string>> kKeys = {
    {"model", {"kind", "m", "p_m", "p_h", "custom_g_table"}},
    {"grid", {"kind", "n_dim", "h", "extent", "guard_band", "cfl_safety"}},
    {"initial", {"kind", "alpha0", "beta0", "lambda0", "kappa0", "c", "t0", "path"}},
    {"experiment",
     {"kind", "t_end", "snapshot_count", "snapshot_times", "dt_ode", "fit_radius", "fit_t_lo",
      "fit_t_hi", "refine", "output_dir", "tol_upper", "sandwich_ratio_max", "decay_exp_lo",
      "decay_exp_hi", "darcy_median_max", "ab_margin_factor", "support_r0"}},
};

class Parser {
  public:
    explicit Parser(const std::string& text) { split(text); }

    std::vector<ConfigError>& errors() { return errors_; }

    bool has(const std::string& section, const std::string& key) {
        auto s = sections_.find(section);
        return s != sections_.end() && s->second.count(key) > 0;
    }

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) {
        RawEntry* e = find(section, key);
        return e ? e->value : fallback;
    }

    double get_double(const std::string& section, const std::string& key, double fallback) {
        RawEntry* e = find(section, key);
        if (!e) return fallback;
        try {
            std::size_t pos = 0;
            double v = std::stod(e->value, &pos);
            if (pos != e->value.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            fail(e->line, key, "not a number: '" + e->value + "'");
            return fallback;
        }
    }

    int get_int(const std::string& section, const std::string& key, int fallback) {
        double v = get_double(section, key, fallback);
        if (v != std::floor(v)) fail(line_of(section, key), key, "not an integer");
        return static_cast<int>(v);
    }

    std::vector<double> get_list(const std::string& section, const std::string& key) {
        RawEntry* e = find(section, key);
        std::vector<double> out;
        if (!e) return out;
        std::stringstream ss(e->value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            try {
                out.push_back(std::stod(item));
            } catch (const std::exception&) {
                fail(e->line, key, "bad list entry: '" + item + "'");
            }
        }
        return out;
    }

    int line_of(const std::string& section, const std::string& key) {
        auto s = sections_.find(section);
        if (s == sections_.end()) return 0;
        auto e = s->second.find(key);
        return e == s->second.end() ? 0 : e->second.line;
    }

    void fail(int line, const std::string& key, const std::string& reason) {
        errors_.push_back({line, key, reason});
    }

  private:
    RawEntry* find(const std::string& section, const std::string& key) {
        auto s = sections_.find(section);
        if (s == sections_.end()) return nullptr;
        auto e = s->second.find(key);
        if (e == s->second.end()) return nullptr;
        e->second.used = true;
        return &e->second;
    }

    void split(const std::string& text) {
        std::stringstream ss(text);
        std::string line;
        std::string section;
        int line_no = 0;
        while (std::getline(ss, line)) {
            ++line_no;
            std::size_t hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') {
                    fail(line_no, line, "malformed section header");
                    continue;
                }
                section = trim(line.substr(1, line.size() - 2));
                if (std::find(kSections.begin(), kSections.end(), section) == kSections.end()) {
                    fail(line_no, section, "unknown section");
                    section.clear();
                }
                continue;
            }
            std::size_t eq = line.find('=');
            if (eq == std::string::npos) {
                fail(line_no, line, "expected 'key = value'");
                continue;
            }
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (section.empty()) {
                fail(line_no, key, "key outside any section");
                continue;
            }
            const auto& vocab = kKeys.at(section);
            if (std::find(vocab.begin(), vocab.end(), key) == vocab.end()) {
                fail(line_no, key, "unknown key in [" + section + "]");
                continue;
            }
            if (sections_[section].count(key)) {
                fail(line_no, key, "duplicate key");
                continue;
            }
            sections_[section][key] = {line_no, value, false};
        }
    }

    std::map<std::string, Section> sections_;
    std::vector<ConfigError> errors_;
};

GTable parse_g_table(const std::string& text, Parser& p, int line) {
    // comma list of P:G knots, e.g. "0:1,0.5:0.5,1:0"
    GTable t;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        std::size_t colon = item.find(':');
        if (colon == std::string::npos) {
            p.fail(line, "custom_g_table", "knot '" + item + "' is not P:G");
            return t;
        }
        try {
            t.p.push_back(std::stod(item.substr(0, colon)));
            t.g.push_back(std::stod(item.substr(colon + 1)));
        } catch (const std::exception&) {
            p.fail(line, "custom_g_table", "bad knot '" + item + "'");
            return t;
        }
    }
    return t;
}

}  // namespace

std::string ConfigError::str() const {
    std::string out = "line " + std::to_string(line) + ": " + key + ": " + reason;
    return out;
}

LVSubParams RunConfig::sub_params() const {
    return {model.p_m, model.m, grid.n_dim, dg.value_or(0.0), alpha0, beta0};
}

LVSupParams RunConfig::sup_params() const {
    return {model.p_m, model.m, grid.n_dim, Dg.value_or(0.0), lambda0, kappa0};
}

std::string RunConfig::experiment_name() const {
    switch (experiment) {
        case ExperimentKind::Simulate: return "simulate";
        case ExperimentKind::Barriers: return "barriers";
        case ExperimentKind::SandwichSub: return "sandwich-sub";
        case ExperimentKind::SandwichSup: return "sandwich-sup";
        case ExperimentKind::Decay: return "decay";
        case ExperimentKind::PmeConverge: return "pme-converge";
        case ExperimentKind::FrontierDiag: return "frontier-diag";
    }
    return "?";
}

std::string RunConfig::initial_name() const {
    switch (initial) {
        case InitialKind::BarrierSub: return "barrier-sub";
        case InitialKind::BarrierSup: return "barrier-sup";
        case InitialKind::Barenblatt: return "barenblatt";
        case InitialKind::Table: return "table";
    }
    return "?";
}

ParseResult parse_config(const std::string& text) {
    Parser p(text);
    RunConfig c;

    // ---- model ----
    std::string model_kind = p.get_string("model", "kind", "tumor");
    double m = p.get_double("model", "m", 2.0);
    double p_m = p.get_double("model", "p_m", 1.0);
    double p_h = p.get_double("model", "p_h", -1.0);
    if (!p.errors().empty()) return {std::nullopt, p.errors()};
    try {
        if (model_kind == "tumor") {
            c.model = ModelSpec::tumor(m, p_m, p_h);
        } else if (model_kind == "fisher-kpp") {
            if (p.has("model", "p_m"))
                p.fail(p.line_of("model", "p_m"), "p_m", "derived as m/(m-1) for fisher-kpp");
            c.model = ModelSpec::fisher_kpp(m);
        } else if (model_kind == "custom") {
            if (!p.has("model", "custom_g_table")) {
                p.fail(0, "custom_g_table", "required for custom models");
            } else {
                GTable t = parse_g_table(p.get_string("model", "custom_g_table", ""), p,
                                         p.line_of("model", "custom_g_table"));
                if (p.errors().empty())
                    c.model = ModelSpec::custom(m, std::move(t), p_m, p_h > 0 ? p_h : p_m);
            }
        } else {
            p.fail(p.line_of("model", "kind"), "kind",
                   "unknown model kind '" + model_kind + "' (tumor|fisher-kpp|custom)");
        }
    } catch (const std::exception& e) {
        p.fail(p.line_of("model", "kind"), "model", e.what());
    }
    if (!p.errors().empty()) return {std::nullopt, p.errors()};

    StructuralConstants sc = structural_constants(c.model, 2);
    c.dg = sc.slope_min;
    c.Dg = sc.slope_max;

    // ---- grid ----
    std::string grid_kind = p.get_string("grid", "kind", "radial");
    int n_dim = p.get_int("grid", "n_dim", 2);
    double h = p.get_double("grid", "h", 0.02);
    double extent = p.get_double("grid", "extent", 8.0);
    c.guard_band = p.get_int("grid", "guard_band", 4);
    c.cfl_safety = p.get_double("grid", "cfl_safety", 0.2);
    if (!p.errors().empty()) return {std::nullopt, p.errors()};
    try {
        if (grid_kind == "radial") {
            c.grid = GridGeom::radial(n_dim, h, extent);
        } else if (grid_kind == "cartesian2d") {
            c.grid = GridGeom::cartesian2d(h, extent);
        } else {
            p.fail(p.line_of("grid", "kind"), "kind",
                   "unknown grid kind '" + grid_kind + "' (radial|cartesian2d)");
        }
        if (c.guard_band < 2) p.fail(p.line_of("grid", "guard_band"), "guard_band", "must be >= 2");
        if (!(c.cfl_safety > 0.0 && c.cfl_safety <= 1.0))
            p.fail(p.line_of("grid", "cfl_safety"), "cfl_safety", "must be in (0, 1]");
    } catch (const std::exception& e) {
        p.fail(p.line_of("grid", "kind"), "grid", e.what());
    }
    if (!p.errors().empty()) return {std::nullopt, p.errors()};

    // ---- initial ----
    std::string init_kind = p.get_string("initial", "kind", "barrier-sub");
    c.alpha0 = p.get_double("initial", "alpha0", 0.0);
    c.beta0 = p.get_double("initial", "beta0", 0.0);
    c.lambda0 = p.get_double("initial", "lambda0", 0.0);
    c.kappa0 = p.get_double("initial", "kappa0", 0.0);
    c.bb_c = p.get_double("initial", "c", 0.0);
    c.bb_t0 = p.get_double("initial", "t0", 1.0);
    c.table_path = p.get_string("initial", "path", "");
    if (init_kind == "barrier-sub") {
        c.initial = InitialKind::BarrierSub;
    } else if (init_kind == "barrier-sup") {
        c.initial = InitialKind::BarrierSup;
    } else if (init_kind == "barenblatt") {
        c.initial = InitialKind::Barenblatt;
    } else if (init_kind == "table") {
        c.initial = InitialKind::Table;
    } else {
        p.fail(p.line_of("initial", "kind"), "kind", "unknown initial kind '" + init_kind + "'");
    }
    if (!p.errors().empty()) return {std::nullopt, p.errors()};

    // ---- experiment ----
    std::string exp_kind = p.get_string("experiment", "kind", "simulate");
    static const std::map<std::string, ExperimentKind> exp_map = {
        {"simulate", ExperimentKind::Simulate},
        {"barriers", ExperimentKind::Barriers},
        {"sandwich-sub", ExperimentKind::SandwichSub},
        {"sandwich-sup", ExperimentKind::SandwichSup},
        {"decay", ExperimentKind::Decay},
        {"pme-converge", ExperimentKind::PmeConverge},
        {"frontier-diag", ExperimentKind::FrontierDiag},
    };
    auto it = exp_map.find(exp_kind);
    if (it == exp_map.end()) {
        p.fail(p.line_of("experiment", "kind"), "kind",
               "unknown experiment kind '" + exp_kind + "'");
    } else {
        c.experiment = it->second;
    }
    c.t_end = p.get_double("experiment", "t_end", 20.0);
    c.snapshot_count = p.get_int("experiment", "snapshot_count", 21);
    c.snapshot_times = p.get_list("experiment", "snapshot_times");
    c.dt_ode = p.get_double("experiment", "dt_ode", 1e-3);
    c.fit_radius = p.get_double("experiment", "fit_radius", 1.0);
    c.fit_t_lo = p.get_double("experiment", "fit_t_lo", 0.0);
    c.fit_t_hi = p.get_double("experiment", "fit_t_hi", 0.0);
    c.refine = p.get_int("experiment", "refine", 0);
    c.output_dir = p.get_string("experiment", "output_dir", "out");
    c.tol_upper = p.get_double("experiment", "tol_upper", 1e-9);
    c.sandwich_ratio_max = p.get_double("experiment", "sandwich_ratio_max", 0.6);
    c.decay_exp_lo = p.get_double("experiment", "decay_exp_lo", -1.15);
    c.decay_exp_hi = p.get_double("experiment", "decay_exp_hi", -0.85);
    c.darcy_median_max = p.get_double("experiment", "darcy_median_max", 0.2);
    c.ab_margin_factor = p.get_double("experiment", "ab_margin_factor", -0.02);
    c.support_r0 = p.get_double("experiment", "support_r0", -1.0);
    if (!p.errors().empty()) return {std::nullopt, p.errors()};

    // ---- gates: every theorem hypothesis checked before compute ----
    bool needs_sup = c.initial == InitialKind::BarrierSup ||
                     c.experiment == ExperimentKind::SandwichSup;
    bool needs_sub = c.initial == InitialKind::BarrierSub ||
                     c.experiment == ExperimentKind::SandwichSub ||
                     c.experiment == ExperimentKind::Decay ||
                     (needs_sup && c.alpha0 > 0.0);
    if (needs_sub) {
        if (!c.dg) {
            p.fail(0, "model", "slope-min hypothesis fails: inf of -G' not positive");
        } else {
            GateCheck gate = check_gate_sub(c.sub_params());
            if (gate.margin_lower <= 0.0)
                p.fail(p.line_of("initial", "alpha0"), "alpha0",
                       "ini1 lower gate violated: p_m - (2n/d_g) beta0 <= alpha0 (margin " +
                           format_float(gate.margin_lower) + ")");
            if (gate.margin_upper <= 0.0)
                p.fail(p.line_of("initial", "alpha0"), "alpha0",
                       "ini1 upper gate violated: alpha0 <= p_m - ((2n(m-1)+4)/(d_g(m-1))) beta0 "
                       "(margin " +
                           format_float(gate.margin_upper) + ")");
        }
    }
    if (needs_sup) {
        if (!c.Dg) {
            p.fail(0, "model", "slope-max hypothesis fails: sup of -G' unbounded");
        } else {
            GateCheck gate = check_gate_sup(c.sup_params());
            if (gate.margin_lower <= 0.0)
                p.fail(p.line_of("initial", "lambda0"), "lambda0",
                       "lowini lower gate violated (margin " + format_float(gate.margin_lower) +
                           ")");
            if (gate.margin_upper <= 0.0)
                p.fail(p.line_of("initial", "lambda0"), "lambda0",
                       "lowini upper gate violated (margin " + format_float(gate.margin_upper) +
                           ")");
        }
    }
    if (c.initial == InitialKind::Barenblatt && !(c.bb_c > 0.0))
        p.fail(p.line_of("initial", "c"), "c", "barenblatt profile needs c > 0");
    if (c.initial == InitialKind::Table && c.table_path.empty())
        p.fail(0, "path", "table initial data needs a path");
    for (double s : c.snapshot_times)
        if (s < 0.0 || s > c.t_end)
            p.fail(p.line_of("experiment", "snapshot_times"), "snapshot_times",
                   "time outside [0, t_end]");

    if (!p.errors().empty()) return {std::nullopt, p.errors()};
    return {c, {}};
}

std::string serialize_config(const RunConfig& c) {
    std::string out;
    out += "[model]\n";
    out += "kind = " + c.model.kind_name() + "\n";
    out += "m = " + format_float(c.model.m) + "\n";
    if (c.model.kind != ModelKind::FisherKPP)
        out += "p_m = " + format_float(c.model.p_m) + "\n";
    out += "p_h = " + format_float(c.model.p_h) + "\n";
    if (c.model.kind == ModelKind::Custom) {
        out += "custom_g_table = ";
        for (std::size_t i = 0; i < c.model.custom_g.p.size(); ++i) {
            if (i) out += ",";
            out += format_float(c.model.custom_g.p[i]) + ":" + format_float(c.model.custom_g.g[i]);
        }
        out += "\n";
    }
    out += "\n[grid]\n";
    out += std::string("kind = ") +
           (c.grid.kind == GridKind::RadialND ? "radial" : "cartesian2d") + "\n";
    out += "n_dim = " + std::to_string(c.grid.n_dim) + "\n";
    out += "h = " + format_float(c.grid.h) + "\n";
    out += "extent = " + format_float(c.grid.extent) + "\n";
    out += "guard_band = " + std::to_string(c.guard_band) + "\n";
    out += "cfl_safety = " + format_float(c.cfl_safety) + "\n";
    out += "\n[initial]\n";
    out += "kind = " + c.initial_name() + "\n";
    switch (c.initial) {
        case InitialKind::BarrierSub:
            out += "alpha0 = " + format_float(c.alpha0) + "\n";
            out += "beta0 = " + format_float(c.beta0) + "\n";
            break;
        case InitialKind::BarrierSup:
            out += "lambda0 = " + format_float(c.lambda0) + "\n";
            out += "kappa0 = " + format_float(c.kappa0) + "\n";
            if (c.alpha0 > 0.0) {
                out += "alpha0 = " + format_float(c.alpha0) + "\n";
                out += "beta0 = " + format_float(c.beta0) + "\n";
            }
            break;
        case InitialKind::Barenblatt:
            out += "c = " + format_float(c.bb_c) + "\n";
            out += "t0 = " + format_float(c.bb_t0) + "\n";
            break;
        case InitialKind::Table:
            out += "path = " + c.table_path + "\n";
            break;
    }
    out += "\n[experiment]\n";
    out += "kind = " + c.experiment_name() + "\n";
    out += "t_end = " + format_float(c.t_end) + "\n";
    out += "snapshot_count = " + std::to_string(c.snapshot_count) + "\n";
    if (!c.snapshot_times.empty()) {
        out += "snapshot_times = ";
        for (std::size_t i = 0; i < c.snapshot_times.size(); ++i) {
            if (i) out += ",";
            out += format_float(c.snapshot_times[i]);
        }
        out += "\n";
    }
    out += "dt_ode = " + format_float(c.dt_ode) + "\n";
    out += "fit_radius = " + format_float(c.fit_radius) + "\n";
    out += "fit_t_lo = " + format_float(c.fit_t_lo) + "\n";
    out += "fit_t_hi = " + format_float(c.fit_t_hi) + "\n";
    out += "refine = " + std::to_string(c.refine) + "\n";
    out += "output_dir = " + c.output_dir + "\n";
    out += "tol_upper = " + format_float(c.tol_upper) + "\n";
    out += "sandwich_ratio_max = " + format_float(c.sandwich_ratio_max) + "\n";
    out += "decay_exp_lo = " + format_float(c.decay_exp_lo) + "\n";
    out += "decay_exp_hi = " + format_float(c.decay_exp_hi) + "\n";
    out += "darcy_median_max = " + format_float(c.darcy_median_max) + "\n";
    out += "ab_margin_factor = " + format_float(c.ab_margin_factor) + "\n";
    out += "support_r0 = " + format_float(c.support_r0) + "\n";
    return out;
}

}  // namespace pmf
