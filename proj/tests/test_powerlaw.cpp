#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "gazeforage/powerlaw.hpp"
#include "gazeforage/rng.hpp"
#include "gazeforage/synth.hpp"

using namespace gazeforage;
using Catch::Matchers::WithinAbs;

namespace {

StepSeries pareto_series(double mu, double x_min, std::size_t n, std::uint64_t seed) {
    StepSeries s;
    s.steps.reserve(n);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i)
        s.steps.push_back(sample_step(mu, x_min, std::nullopt, rng.uniform()));
    return s;
}

// Geometric ratio-2 bins with halving integer counts: the density
// count/width is exactly proportional to center^-2, so the log-log
// regression must return slope -2 to rounding error.
Histogram exact_inverse_square_hist() {
    Histogram h;
    h.scale = HistScale::logarithmic;
    for (int i = 0; i <= 10; ++i) h.edges.push_back(std::pow(2.0, double(i)));
    for (int i = 0; i < 10; ++i) h.counts.push_back(std::uint64_t(1) << (10 - i));
    return h;
}

}  // namespace

TEST_CASE("fit_mle closed form: tail all at x_min*e gives mu = 2 exactly") {
    StepSeries s;
    for (int i = 0; i < 100; ++i) s.steps.push_back(3.0 * std::numbers::e);
    const PowerLawFit fit = fit_mle(s, 3.0);
    CHECK_THAT(fit.mu, WithinAbs(2.0, 1e-12));
    CHECK(fit.n_tail == 100);
    CHECK(fit.method == FitMethod::mle);
    CHECK(fit.ks_stat >= 0.0);
    CHECK(fit.ks_stat <= 1.0);
}

TEST_CASE("fit_mle rejects empty and degenerate tails") {
    StepSeries s;
    s.steps = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(fit_mle(s, 10.0), EmptyTail);

    StepSeries flat;
    for (int i = 0; i < 50; ++i) flat.steps.push_back(5.0);
    // All tail values equal the cutoff: sum of log-ratios is zero and the
    // estimator diverges.
    CHECK_THROWS_AS(fit_mle(flat, 5.0), DegenerateTail);
}

TEST_CASE("fit_mle recovers mu=2 within 0.02 on 1e5 Pareto samples") {
    const StepSeries s = pareto_series(2.0, 1.0, 100000, 2024);
    const PowerLawFit fit = fit_mle(s, 1.0);
    CHECK_THAT(fit.mu, WithinAbs(2.0, 0.02));
    CHECK(fit.n_tail == 100000);
    CHECK(fit.ks_stat < 0.01);
}

TEST_CASE("fit_mle is exactly scale equivariant under a power-of-two factor") {
    const StepSeries s = pareto_series(2.5, 1.0, 5000, 77);
    StepSeries scaled;
    for (double v : s.steps) scaled.steps.push_back(v * 4.0);
    CHECK(fit_mle(s, 1.0).mu == fit_mle(scaled, 4.0).mu);
}

TEST_CASE("loglog regression on the exact inverse-square histogram") {
    const Histogram h = exact_inverse_square_hist();
    const PowerLawFit fit = fit_loglog_regression(h, 1.0);
    CHECK_THAT(fit.mu, WithinAbs(2.0, 1e-6));
    CHECK(fit.method == FitMethod::loglog_regression);
    CHECK(fit.n_tail == 2046);  // 2 + 4 + ... + 1024
}

TEST_CASE("loglog regression needs at least three non-empty tail bins") {
    Histogram h = exact_inverse_square_hist();
    // Only the last two bins sit above this cutoff.
    CHECK_THROWS_AS(fit_loglog_regression(h, 300.0), InsufficientTailBins);

    h.counts.assign(h.counts.size(), 0);
    h.counts[0] = h.counts[5] = 10;
    CHECK_THROWS_AS(fit_loglog_regression(h, 1.0), InsufficientTailBins);
}

TEST_CASE("loglog regression lands within 0.25 on 1e6 sampled points") {
    const StepSeries s = pareto_series(2.0, 1.0, 1000000, 4242);
    double hi = 0.0;
    for (double v : s.steps) hi = std::max(hi, v);
    HistogramSpec spec;
    spec.scale = HistScale::logarithmic;
    spec.range_lo = 1.0;
    spec.range_hi = hi;
    spec.bins_per_decade = 20;
    const Histogram h = histogram(s.steps, spec);
    const PowerLawFit fit = fit_loglog_regression(h, 1.0);
    CHECK(fit.mu > 1.75);
    CHECK(fit.mu < 2.25);
}

TEST_CASE("regression and MLE agree within 0.3 on clean power-law data") {
    const StepSeries s = pareto_series(2.2, 1.0, 200000, 99);
    double hi = 0.0;
    for (double v : s.steps) hi = std::max(hi, v);
    HistogramSpec spec;
    spec.scale = HistScale::logarithmic;
    spec.range_lo = 1.0;
    spec.range_hi = hi;
    spec.bins_per_decade = 20;
    const PowerLawFit reg = fit_loglog_regression(histogram(s.steps, spec), 1.0);
    const PowerLawFit mle = fit_mle(s, 1.0);
    CHECK(std::abs(reg.mu - mle.mu) < 0.3);
}

TEST_CASE("select_xmin: single candidate is returned as-is") {
    const StepSeries s = pareto_series(2.0, 1.0, 1000, 5);
    const std::vector<double> one{1.5};
    CHECK(select_xmin(s, one) == 1.5);
}

TEST_CASE("select_xmin on pure Pareto data stays near the true cutoff") {
    const StepSeries s = pareto_series(2.0, 1.0, 20000, 31);
    const std::vector<double> candidates{1.0, 2.0, 4.0};
    const double chosen = select_xmin(s, candidates);
    CHECK(chosen <= 2.0);
    const PowerLawFit fit = fit_mle(s, chosen);
    const auto ci = bootstrap_ci(s, chosen, 200, 0.95, 7);
    CHECK(ci.first <= 2.0);
    CHECK(2.0 <= ci.second);
    CHECK(std::abs(fit.mu - 2.0) < 0.05);
}

TEST_CASE("select_xmin finds the crossover of a uniform-body + Pareto-tail mixture") {
    Rng rng(606);
    StepSeries s;
    for (int i = 0; i < 5000; ++i) s.steps.push_back(rng.uniform(0.0, 5.0));
    for (int i = 0; i < 5000; ++i)
        s.steps.push_back(sample_step(2.5, 5.0, std::nullopt, rng.uniform()));
    const std::vector<double> candidates = default_xmin_candidates(s);
    const double chosen = select_xmin(s, candidates);
    CHECK(chosen >= 4.0);
    CHECK(chosen <= 8.0);

    // By construction the winner has the smallest KS distance on the grid.
    const double winner_ks = fit_mle(s, chosen).ks_stat;
    std::size_t viable = 0;
    for (double c : candidates) {
        std::size_t tail = 0;
        for (double v : s.steps) tail += v >= c;
        if (tail < 50) continue;
        ++viable;
        CHECK(winner_ks <= fit_mle(s, c).ks_stat + 1e-12);
    }
    CHECK(viable >= 10);
}

TEST_CASE("select_xmin rejects candidates leaving thin tails") {
    const StepSeries s = pareto_series(2.0, 1.0, 60, 8);
    const std::vector<double> too_deep{1e9};
    CHECK_THROWS_AS(select_xmin(s, too_deep), NoViableCandidate);
}

TEST_CASE("bootstrap_ci is deterministic, validates B, and brackets the truth") {
    const StepSeries s = pareto_series(2.0, 1.0, 100000, 1234);
    CHECK_THROWS_AS(bootstrap_ci(s, 1.0, 1, 0.95, 9), InvalidBootstrap);
    CHECK_THROWS_AS(bootstrap_ci(s, 1.0, 200, 1.5, 9), InvalidBootstrap);

    const auto ci_a = bootstrap_ci(s, 1.0, 200, 0.95, 9);
    const auto ci_b = bootstrap_ci(s, 1.0, 200, 0.95, 9);
    CHECK(ci_a == ci_b);
    CHECK(ci_a.first <= 2.0);
    CHECK(2.0 <= ci_a.second);
    CHECK(ci_a.second - ci_a.first < 0.05);

    const auto ci_c = bootstrap_ci(s, 1.0, 200, 0.95, 10);
    CHECK(ci_a != ci_c);  // different seed, different resamples
}

TEST_CASE("classify matches the reference slopes and boundary rules") {
    CHECK(classify_mu(2.38) == WalkRegime::Levy);
    CHECK(classify_mu(3.49) == WalkRegime::GaussianLike);
    CHECK(classify_mu(1.0) == WalkRegime::Ballistic);
    CHECK(classify_mu(0.5) == WalkRegime::Ballistic);
    CHECK(classify_mu(3.0) == WalkRegime::Levy);
    CHECK(classify_mu(3.0 + 1e-9) == WalkRegime::GaussianLike);
    CHECK(classify_mu(1.0 + 1e-9) == WalkRegime::Levy);
}

TEST_CASE("fit JSON carries the documented fields") {
    const StepSeries s = pareto_series(2.0, 1.0, 1000, 3);
    PowerLawFit fit = fit_mle(s, 1.0);
    fit.ci = {1.9, 2.1};
    const nlohmann::json j = fit_to_json(fit);
    CHECK(j.at("method") == "mle");
    CHECK(j.at("x_min") == 1.0);
    CHECK(j.at("n_tail") == 1000);
    CHECK(j.at("regime") == "levy");
    CHECK(j.at("ci").at(0) == 1.9);
    CHECK(j.at("ci").at(1) == 2.1);
    CHECK(j.at("ks").get<double>() >= 0.0);
    CHECK(j.at("mu").get<double>() == fit.mu);

    fit.ci.reset();
    CHECK(fit_to_json(fit).at("ci").is_null());
}
