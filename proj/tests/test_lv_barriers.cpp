#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pmf/lv_barriers.hpp"
#include "pmf/rate_fit.hpp"

using namespace pmf;

namespace {

const LVSubParams kSub{1.0, 2.0, 2, 1.0, 0.5, 0.1};
const LVSupParams kSup{1.0, 2.0, 2, 1.0, 0.7, 0.05};

}  // namespace

TEST_CASE("sub gate: margins and failure modes") {
    GateCheck ok = check_gate_sub(kSub);
    CHECK(ok.pass);
    CHECK(ok.margin_lower == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(ok.margin_upper == doctest::Approx(0.3).epsilon(1e-12));

    LVSubParams high = kSub;
    high.alpha0 = 0.65;  // above p_m - (2n/dg) beta0 = 0.6
    CHECK(!check_gate_sub(high).pass);

    LVSubParams thin = kSub;
    thin.beta0 = 0.05;  // alpha0 = 0.5 < p_m - wide*beta0 = 0.6
    GateCheck bad = check_gate_sub(thin);
    CHECK(!bad.pass);
    CHECK(bad.margin_lower > 0.0);
    CHECK(bad.margin_upper < 0.0);

    LVSubParams neg = kSub;
    neg.beta0 = -0.1;
    CHECK_THROWS_AS(check_gate_sub(neg), std::invalid_argument);
}

TEST_CASE("sup gate") {
    GateCheck ok = check_gate_sup(kSup);
    CHECK(ok.pass);
    CHECK(ok.margin_lower == doctest::Approx(1.0 - 0.7 - 0.2).epsilon(1e-12));
    CHECK(ok.margin_upper == doctest::Approx(-(1.0 - 1.4 - 0.4)).epsilon(1e-12));

    LVSupParams low = kSup;
    low.lambda0 = 0.95;  // 1 - 0.95 - 0.2 < 0
    CHECK(!check_gate_sup(low).pass);
}

TEST_CASE("sub right-hand side: hand-substituted values") {
    LVState eq = rhs_sub(kSub, {1.0, 0.0});
    CHECK(eq.first == 0.0);
    CHECK(eq.second == 0.0);

    LVState mid = rhs_sub(kSub, {0.5, 0.1});
    CHECK(mid.first == doctest::Approx(0.05).epsilon(1e-14));
    CHECK(mid.second == doctest::Approx(-0.03).epsilon(1e-14));

    // alpha-axis invariance: alpha = 0 stays put, beta follows its own logistic
    LVState axis = rhs_sub(kSub, {0.0, 0.2});
    CHECK(axis.first == 0.0);
    double wide = (2.0 * 2 * 1.0 + 4.0) / (1.0 * 1.0);
    CHECK(axis.second == doctest::Approx(1.0 * 0.2 * (1.0 - wide * 0.2)).epsilon(1e-14));
}

TEST_CASE("sup right-hand side: hand-substituted values") {
    LVState eq = rhs_sup(kSup, {1.0, 0.0});
    CHECK(eq.first == 0.0);
    CHECK(eq.second == 0.0);

    LVState mid = rhs_sup(kSup, {0.7, 0.05});
    CHECK(mid.first == doctest::Approx(0.07).epsilon(1e-13));
    CHECK(mid.second == doctest::Approx(-0.04).epsilon(1e-13));

    // kappa = 0: pure logistic in lambda
    LVState axis = rhs_sup(kSup, {0.4, 0.0});
    CHECK(axis.first == doctest::Approx(1.0 * 0.4 * (1.0 - 0.4)).epsilon(1e-14));
    CHECK(axis.second == 0.0);
}

TEST_CASE("integrate: degenerate horizon and dt preconditions") {
    LVTrajectory single = integrate_sub(kSub, 0.0);
    CHECK(single.size() == 1);
    CHECK(single.states[0].first == 0.5);
    CHECK(single.states[0].second == 0.1);

    CHECK_THROWS_AS(integrate_sub(kSub, 10.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(integrate_sub(kSub, 2e4, 1e-3), std::invalid_argument);

    LVSubParams bad = kSub;
    bad.alpha0 = 0.65;
    CHECK_THROWS_WITH_AS(integrate_sub(bad, 1.0), doctest::Contains("ini1"),
                         std::invalid_argument);
}

TEST_CASE("RK4 refinement order is at least 3.5") {
    auto final_state = [&](double dt) { return integrate_sub(kSub, 10.0, dt).states.back(); };
    LVState a = final_state(8e-3);
    LVState b = final_state(4e-3);
    LVState c = final_state(2e-3);
    double err_ab = std::abs(a.first - b.first) + std::abs(a.second - b.second);
    double err_bc = std::abs(b.first - c.first) + std::abs(b.second - c.second);
    double order = std::log2(err_ab / err_bc);
    CHECK(order >= 3.5);
}

TEST_CASE("closed-form bounds, sub: t = 0 and asymptotics") {
    SubBounds b0 = closed_form_bounds_sub(kSub, 0.0);
    CHECK(b0.beta_low == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(b0.beta_high == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(b0.f1_upper < kSub.p_m);
    CHECK(b0.f1_upper == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(b0.f2_lower == doctest::Approx(1.3).epsilon(1e-12));
    CHECK(b0.gap_low > 0.0);
    CHECK(b0.gap_high > 0.0);

    // dominant terms: t * gap_low -> (2n/dg) alpha0 / (4 p_m), t * gap_high ->
    // wide * p_m / (4 alpha0); the ratio stays bounded
    for (double t : {1e5, 2e5}) {
        SubBounds b = closed_form_bounds_sub(kSub, t);
        CHECK(t * b.gap_low == doctest::Approx(4.0 * 0.5 / 4.0).epsilon(1e-3));
        CHECK(t * b.gap_high == doctest::Approx(8.0 / (4.0 * 0.5)).epsilon(1e-3));
        CHECK(b.gap_high / b.gap_low < 10.0);
        CHECK(b.f1_upper <= kSub.p_m);  // equality once the exponential underflows
    }
    // strictly below p_m while the exponential is representable
    for (double t : {1.0, 10.0, 30.0}) CHECK(closed_form_bounds_sub(kSub, t).f1_upper < kSub.p_m);
}

TEST_CASE("closed-form bounds, sup: exponents are the stated rates") {
    SupBounds b0 = closed_form_bounds_sup(kSup, 0.0);
    CHECK(b0.ratio_low == doctest::Approx(14.0).epsilon(1e-12));
    CHECK(b0.ratio_high == doctest::Approx(14.0).epsilon(1e-12));

    // slow rate Dg(m-1)lambda0 = 0.7, fast rate Dg(m-1)p_m + 4 kappa0 = 1.2
    SupBounds b1 = closed_form_bounds_sup(kSup, 1.0);
    CHECK(b1.ratio_low / b0.ratio_low == doctest::Approx(std::exp(0.7)).epsilon(1e-12));
    CHECK(b1.ratio_high / b0.ratio_high == doctest::Approx(std::exp(1.2)).epsilon(1e-12));
    CHECK(b1.kappa_low / b0.kappa_low == doctest::Approx(std::exp(-1.2)).epsilon(1e-12));
    CHECK(b1.kappa_high / b0.kappa_high == doctest::Approx(std::exp(-0.7)).epsilon(1e-12));

    // kappa_high is monotone decreasing
    double prev = closed_form_bounds_sup(kSup, 0.0).kappa_high;
    for (double t = 0.5; t <= 5.0; t += 0.5) {
        double cur = closed_form_bounds_sup(kSup, t).kappa_high;
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("sub trajectory lies inside the closed-form bands") {
    LVTrajectory traj = integrate_sub(kSub, 100.0, 1e-3);
    CHECK(worst_band_violation_sub(kSub, traj) <= 1e-6 * kSub.p_m);

    // ratio alpha/beta strictly increasing sample to sample
    for (std::size_t i = 1; i < traj.size(); ++i)
        CHECK(traj.states[i].first / traj.states[i].second >
              traj.states[i - 1].first / traj.states[i - 1].second);
}

TEST_CASE("sup trajectory lies inside the closed-form bands") {
    LVTrajectory traj = integrate_sup(kSup, 10.0, 1e-3);
    CHECK(worst_band_violation_sup(kSup, traj) <= 1e-6);

    // kappa(10) inside the exponential band quoted for this example
    LVState end = traj.states.back();
    CHECK(end.second >= 0.05 * std::exp(-12.0));
    CHECK(end.second <= 0.05 / 0.7 * std::exp(-7.0));
}

TEST_CASE("decay-rate fits at the ODE level") {
    LVTrajectory traj = integrate_sub(kSub, 1000.0, 1e-2);
    std::vector<double> gap(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) gap[i] = kSub.p_m - traj.states[i].first;
    RateFit fit = fit_power_law(traj.times, gap, 10.0, 1000.0);
    CHECK(fit.exponent >= -1.15);
    CHECK(fit.exponent <= -0.85);

    LVTrajectory sup_traj = integrate_sup(kSup, 10.0, 1e-3);
    std::vector<double> kappa(sup_traj.size());
    for (std::size_t i = 0; i < sup_traj.size(); ++i) kappa[i] = sup_traj.states[i].second;
    RateFit efit = fit_exponential(sup_traj.times, kappa, 1.0, 10.0);
    CHECK(efit.exponent >= -1.2);
    CHECK(efit.exponent <= -0.7);
}

TEST_CASE("barrier evaluation and support radius") {
    Barrier b = make_sub_barrier(kSub, 1.0);
    CHECK(b.value(0.0, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(b.value(0.0, 3.0) == 0.0);  // positive-part clamp
    CHECK(b.support_radius(0.0) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
    CHECK_THROWS_AS(b.value(2.0, 0.0), std::domain_error);

    auto series = support_radius_series(b);
    CHECK(series.front().second == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
    for (std::size_t i = 1; i < series.size(); ++i)
        CHECK(series[i].second > series[i - 1].second);
}

TEST_CASE("sup support radius stays below the rate-band envelope") {
    Barrier b = make_sup_barrier(kSup, 10.0);
    auto series = support_radius_series(b);
    for (const auto& [t, r] : series)
        CHECK(r <= std::sqrt(14.0) * std::exp(0.6 * t) * (1.0 + 1e-9));
}

TEST_CASE("barrier residual signs at random interior points") {
    ModelSpec tumor = ModelSpec::tumor(2.0, 1.0);
    Barrier sub = make_sub_barrier(kSub, 10.0);
    Barrier sup = make_sup_barrier(kSup, 10.0);

    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> tdist(0.0, 10.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int checked = 0;
    for (int i = 0; i < 2000; ++i) {
        double t = tdist(rng);
        double r = u01(rng) * sub.support_radius(t);
        if (sub.value(t, r) <= 1e-9) continue;
        CHECK(barrier_residual(sub, tumor, t, r) <= 1e-8 * tumor.p_m);
        ++checked;
    }
    CHECK(checked > 1500);
    for (int i = 0; i < 2000; ++i) {
        double t = tdist(rng);
        double r = u01(rng) * sup.support_radius(t);
        if (sup.value(t, r) <= 1e-9) continue;
        CHECK(barrier_residual(sup, tumor, t, r) >= -1e-8 * tumor.p_m);
    }

    // tumor G makes the sub chain an equality at r = 0
    CHECK(barrier_residual(sub, tumor, 3.0, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
    // outside the positivity set the residual is not defined
    CHECK_THROWS_AS(barrier_residual(sub, tumor, 0.0, 10.0), std::domain_error);
}

TEST_CASE("flat super-solution level for the linear reaction") {
    double p_m = 1.0, m = 2.0, p_h = 1.5;
    CHECK(flat_super_solution_level(p_m, m, p_h, 0.0) == doctest::Approx(p_h).epsilon(1e-14));
    CHECK(flat_super_solution_level(p_m, m, p_h, 50.0) == doctest::Approx(p_m).epsilon(1e-12));
    CHECK(flat_super_solution_level(p_m, m, p_m, 3.0) == p_m);

    // closed form of the gap: f - p_m = p_m E / (p_h/(p_h-p_m) - E)
    for (double t : {0.5, 1.0, 2.0, 5.0}) {
        double e = std::exp(-(m - 1.0) * p_m * t);
        double expected = p_m * e / (p_h / (p_h - p_m) - e);
        CHECK(flat_super_solution_level(p_m, m, p_h, t) - p_m ==
              doctest::Approx(expected).epsilon(1e-12));
    }

    // independent oracle: explicit Euler on df/dt = (m-1) f (p_m - f)
    double f = p_h, dt = 1e-5;
    for (int i = 0; i < 200000; ++i) f += dt * (m - 1.0) * f * (p_m - f);
    CHECK(flat_super_solution_level(p_m, m, p_h, 2.0) == doctest::Approx(f).epsilon(1e-4));

    CHECK_THROWS_AS(flat_super_solution_level(1.0, 2.0, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("sub residual for tumor equals its closed form everywhere") {
    // exact expansion for G(Q) = dg (p_m - Q): residual = -(m-1) dg beta r^2 Q
    ModelSpec tumor = ModelSpec::tumor(2.0, 1.0);
    Barrier sub = make_sub_barrier(kSub, 5.0);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> tdist(0.0, 5.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        double t = tdist(rng);
        double r = u01(rng) * sub.support_radius(t);
        double q = sub.value(t, r);
        if (q <= 1e-9) continue;
        LVState s = sub.traj.at(t);
        double expected = -(2.0 - 1.0) * kSub.dg * s.second * r * r * q;
        CHECK(barrier_residual(sub, tumor, t, r) == doctest::Approx(expected).epsilon(1e-10));
    }
}
