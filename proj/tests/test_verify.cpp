#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "pmf/verify.hpp"

using namespace pmf;

TEST_CASE("barenblatt closed form: exponents, support, positivity clamp") {
    CHECK(barenblatt_alpha(2, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(barenblatt_k(2, 2.0) == doctest::Approx(1.0 / 16.0).epsilon(1e-15));

    // center value: rho(0, t) = t^-a * c^(1/(m-1))
    BarenblattValue center = barenblatt(2, 2.0, 0.25, 0.0, 1.0);
    CHECK(center.rho == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(center.p == doctest::Approx(2.0 * 0.25).epsilon(1e-14));

    double edge = barenblatt_support_radius(2, 2.0, 0.25, 1.0);
    CHECK(edge == doctest::Approx(std::sqrt(0.25 * 16.0)).epsilon(1e-14));
    CHECK(barenblatt(2, 2.0, 0.25, edge + 0.01, 1.0).rho == 0.0);
    CHECK(barenblatt(2, 2.0, 0.25, edge - 0.01, 1.0).rho > 0.0);

    CHECK_THROWS_AS(barenblatt(2, 2.0, 0.25, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("barenblatt mass is conserved in time") {
    GridGeom g = GridGeom::radial(2, 0.01, 8.0);
    double m1 = total_mass(barenblatt_field(g, 2.0, 0.25, 1.0));
    double m3 = total_mass(barenblatt_field(g, 2.0, 0.25, 3.0));
    CHECK(std::abs(m3 - m1) <= 1e-3 * m1);
}

TEST_CASE("barenblatt profile satisfies the discrete equation to O(h^2) inside") {
    // residual = Lap_h(rho^m) - d_t rho, time derivative from the closed form
    auto interior_residual = [](double h, double t) {
        GridGeom g = GridGeom::radial(2, h, 6.0);
        Field f = barenblatt_field(g, 2.0, 1.0, t);
        std::vector<double> lap = laplacian_of_power(f, 2.0);
        double dt = 1e-6;
        double front = barenblatt_support_radius(2, 2.0, 1.0, t);
        double worst = 0.0;
        for (int i = 0; i < g.cells; ++i) {
            double r = g.radius(i);
            if (r > 0.6 * front) continue;
            double drho = (barenblatt(2, 2.0, 1.0, r, t + dt).rho -
                           barenblatt(2, 2.0, 1.0, r, t - dt).rho) /
                          (2.0 * dt);
            worst = std::max(worst, std::abs(lap[i] - drho));
        }
        return worst;
    };
    for (double t : {1.0, 2.0, 4.0}) {
        double e1 = interior_residual(0.04, t);
        double e2 = interior_residual(0.02, t);
        CHECK(e2 <= 0.35 * e1);  // order ~2 with slack
    }
}

TEST_CASE("power-law fit: exact, constant, noisy, and error paths") {
    std::vector<double> t, y4, yc, yn, ye;
    for (int i = 0; i <= 400; ++i) {
        double ti = 0.5 + i * 0.25;
        t.push_back(ti);
        y4.push_back(4.0 / (1.0 + ti));
        yc.push_back(2.5);
        yn.push_back(1.0 / (1.0 + ti) * (1.0 + 0.01 * std::sin(ti)));
        ye.push_back(std::exp(-0.5 * ti));
    }
    RateFit f4 = fit_power_law(t, y4, 1.0, 100.0);
    CHECK(f4.exponent == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(f4.intercept == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK(f4.residual_rms <= 1e-9);
    CHECK(f4.clean());

    CHECK(fit_power_law(t, yc, 1.0, 100.0).exponent == doctest::Approx(0.0).epsilon(1e-12));

    RateFit fn = fit_power_law(t, yn, 1.0, 100.0);
    CHECK(fn.exponent == doctest::Approx(-1.0).epsilon(0.01));
    CHECK(fn.residual_rms > 1e-9);

    // exponential data misfits the power-law class: flagged by the residual
    RateFit fe = fit_power_law(t, ye, 1.0, 100.0);
    CHECK(!fe.clean(1e-3));

    std::vector<double> bad = y4;
    bad[100] = 0.0;
    CHECK_THROWS_AS(fit_power_law(t, bad, 1.0, 100.0), std::invalid_argument);
    CHECK_THROWS_AS(fit_power_law(t, y4, 1.0, 1.5), std::invalid_argument);  // < 10 points
}

TEST_CASE("exponential fit") {
    std::vector<double> t, y, yc;
    for (int i = 0; i <= 200; ++i) {
        t.push_back(0.05 * i);
        y.push_back(2.0 * std::exp(-0.7 * 0.05 * i));
        yc.push_back(3.0);
    }
    RateFit f = fit_exponential(t, y, 0.0, 10.0);
    CHECK(f.exponent == doctest::Approx(-0.7).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(fit_exponential(t, yc, 0.0, 10.0).exponent == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("decay gap series + synthetic power law recovers the exponent") {
    ModelSpec spec = ModelSpec::tumor(2.0, 1.0);
    GridGeom g = GridGeom::radial(2, 0.1, 4.0);
    std::vector<Field> snaps;
    for (int k = 0; k <= 60; ++k) {
        double t = 1.0 + 2.0 * k;
        Field f = Field::zeros(g, t);
        double p = spec.p_m - 0.3 / (1.0 + t);
        for (int i = 0; i < g.cells; ++i) f.rho[i] = density_from_pressure(p, spec.m);
        snaps.push_back(f);
    }
    std::vector<double> t, gap;
    decay_gap_series(snaps, spec, 1.0, t, gap);
    RateFit fit = fit_power_law(t, gap, 1.0, 121.0);
    CHECK(fit.exponent == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("quick sub sandwich: initial equality and barrier containment") {
    SandwichSubConfig config;
    config.spec = ModelSpec::tumor(2.0, 1.0);
    config.lv = {1.0, 2.0, 2, 1.0, 0.5, 0.1};
    config.geom = GridGeom::radial(2, 0.05, 6.0);
    config.t_end = 3.0;
    config.snapshot_count = 7;

    SandwichSubResult res = experiment_sandwich_sub(config);
    // data starts exactly on the barrier
    std::vector<double> p0 = pressure_field(res.run.snapshots.front(), config.spec);
    for (int i = 0; i < config.geom.cells; ++i) {
        double q = res.barrier.value(0.0, config.geom.radius(i));
        CHECK(std::abs(p0[i] - q) <= 1e-12);
    }
    CHECK(res.report.max_upper_violation <= 1e-9);
    CHECK(res.report.max_lower_violation <= 50.0 * config.geom.h);
    CHECK(res.report.max_lower_violation >= -1e-12);  // t = 0 snapshot pins it at ~0
    CHECK(worst_support_shrink(res.run, support_eps(config.spec)) == 0);
}

TEST_CASE("quick sup sandwich: support stays inside both envelopes") {
    SandwichSupConfig config;
    config.spec = ModelSpec::tumor(2.0, 1.0);
    config.lv = {1.0, 2.0, 2, 1.0, 0.7, 0.05};
    config.sub_lv = LVSubParams{1.0, 2.0, 2, 1.0, 0.5, 0.1};
    config.geom = GridGeom::radial(2, 0.05, 6.0);
    config.t_end = 2.0;
    config.snapshot_count = 5;

    SandwichSupResult res = experiment_sandwich_sup(config);
    CHECK(res.report.max_lower_violation <= 50.0 * config.geom.h);
    CHECK(res.report.max_upper_violation <= 50.0 * config.geom.h);
    CHECK(res.max_support_excess <= config.geom.h);
    CHECK(res.max_analytic_excess <= config.geom.h);
    CHECK(res.min_lower_radius_slack >= 0.0);
    CHECK(res.min_gap_slack >= -50.0 * config.geom.h);

    // R(t) formula: sqrt(14) e^{0.6 t} for these parameters
    CHECK(support_bound_radius(config.lv, 1.0) ==
          doctest::Approx(std::sqrt(14.0) * std::exp(0.6)).epsilon(1e-12));
}

TEST_CASE("initial data above the super-barrier is rejected") {
    SandwichSupConfig config;
    config.spec = ModelSpec::tumor(2.0, 1.0);
    config.lv = {1.0, 2.0, 2, 1.0, 0.7, 0.05};
    // sub-barrier with alpha0 above lambda0 pokes through the super-barrier
    config.sub_lv = LVSubParams{1.0, 2.0, 2, 1.0, 0.75, 0.2};
    config.geom = GridGeom::radial(2, 0.05, 6.0);
    config.t_end = 1.0;
    CHECK_THROWS_AS(experiment_sandwich_sup(config), std::invalid_argument);
}

TEST_CASE("pme convergence harness is deterministic and orders make sense") {
    PmeConvergenceConfig config;
    config.n_dim = 2;
    config.m = 2.0;
    config.c = 0.25;
    config.t0 = 1.0;
    config.t1 = 1.5;
    config.h = 0.08;
    config.levels = 2;
    config.extent = 4.0;

    PmeConvergenceResult a = experiment_pme_convergence(config);
    PmeConvergenceResult b = experiment_pme_convergence(config);
    REQUIRE(a.rows.size() == 2);
    CHECK(std::memcmp(&a.rows[0], &b.rows[0], sizeof(PmeErrorRow)) == 0);  // determinism
    CHECK(std::memcmp(&a.rows[1], &b.rows[1], sizeof(PmeErrorRow)) == 0);
    CHECK(a.rows[1].err_l1 < a.rows[0].err_l1);
    CHECK(a.order_l1 >= 0.8);

    PmeConvergenceConfig tight = config;
    tight.extent = 2.0;  // final front would hit the guard band
    CHECK_THROWS_AS(experiment_pme_convergence(tight), std::invalid_argument);
}

TEST_CASE("runs are bit-reproducible") {
    ModelSpec spec = ModelSpec::tumor(2.0, 1.0);
    GridGeom g = GridGeom::radial(2, 0.05, 6.0);
    auto make = [&]() {
        SandwichSubConfig config;
        config.spec = spec;
        config.lv = {1.0, 2.0, 2, 1.0, 0.5, 0.1};
        config.geom = g;
        config.t_end = 1.0;
        config.snapshot_count = 3;
        return experiment_sandwich_sub(config);
    };
    SandwichSubResult r1 = make();
    SandwichSubResult r2 = make();
    REQUIRE(r1.run.snapshots.size() == r2.run.snapshots.size());
    for (std::size_t k = 0; k < r1.run.snapshots.size(); ++k)
        CHECK(std::memcmp(r1.run.snapshots[k].rho.data(), r2.run.snapshots[k].rho.data(),
                          r1.run.snapshots[k].rho.size() * sizeof(double)) == 0);
    CHECK(r1.report.max_lower_violation == r2.report.max_lower_violation);
}
