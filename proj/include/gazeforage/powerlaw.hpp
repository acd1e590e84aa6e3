#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gazeforage/errors.hpp"
#include "gazeforage/rng.hpp"
#include "gazeforage/stats.hpp"

namespace gazeforage {

enum class FitMethod { loglog_regression, mle };

// Regime boundaries follow the Levy-walk definition: the density exponent mu
// must exceed 1 for the walk to be normalizable and stay at or below 3 for
// the variance to diverge.
enum class WalkRegime { Ballistic, Levy, GaussianLike };

struct PowerLawFit {
    double mu = 0.0;      // density exponent, positive
    double x_min = 0.0;   // lower cutoff of the fitted tail
    FitMethod method = FitMethod::mle;
    std::size_t n_tail = 0;
    double ks_stat = 0.0;
    std::optional<std::pair<double, double>> ci;
};

inline WalkRegime classify_mu(double mu) {
    if (!std::isfinite(mu) || mu <= 0.0) throw Error("classify: mu must be finite and positive");
    if (mu <= 1.0) return WalkRegime::Ballistic;
    if (mu <= 3.0) return WalkRegime::Levy;
    return WalkRegime::GaussianLike;
}

inline WalkRegime classify(const PowerLawFit& fit) { return classify_mu(fit.mu); }

inline std::string to_string(WalkRegime r) {
    switch (r) {
        case WalkRegime::Ballistic: return "ballistic";
        case WalkRegime::Levy: return "levy";
        default: return "gaussian_like";
    }
}

inline std::string to_string(FitMethod m) {
    return m == FitMethod::mle ? "mle" : "loglog_regression";
}

namespace detail {

inline std::vector<double> tail_values(std::span<const double> steps, double x_min) {
    if (!(x_min > 0.0) || !std::isfinite(x_min)) throw Error("x_min must be positive and finite");
    std::vector<double> tail;
    for (double s : steps)
        if (s >= x_min && std::isfinite(s)) tail.push_back(s);
    return tail;
}

// Sup distance between the empirical CDF of a sorted tail and the fitted
// Pareto CDF F(l) = 1 - (l/x_min)^(1-mu).
inline double ks_distance(const std::vector<double>& sorted_tail, double x_min, double mu) {
    const double n = static_cast<double>(sorted_tail.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted_tail.size(); ++i) {
        const double f = 1.0 - std::pow(sorted_tail[i] / x_min, 1.0 - mu);
        d = std::max(d, std::abs(f - double(i) / n));
        d = std::max(d, std::abs(f - double(i + 1) / n));
    }
    return std::min(d, 1.0);
}

inline double hill_mu(std::span<const double> tail, double x_min, double& sum_log_out) {
    double sum_log = 0.0;
    for (double s : tail) sum_log += std::log(s / x_min);
    sum_log_out = sum_log;
    return 1.0 + static_cast<double>(tail.size()) / sum_log;
}

}  // namespace detail

// Continuous power-law MLE (Hill-type): mu = 1 + n / sum(ln(l_i / x_min)) over
// the tail l_i >= x_min. DegenerateTail fires when every tail value equals
// x_min, where the log-sum vanishes and the exponent is unidentifiable.
inline PowerLawFit fit_mle(const StepSeries& steps, double x_min) {
    std::vector<double> tail = detail::tail_values(steps.steps, x_min);
    if (tail.size() < 2) throw EmptyTail(x_min);

    double sum_log = 0.0;
    const double mu = detail::hill_mu(tail, x_min, sum_log);
    if (!(sum_log > 0.0)) throw DegenerateTail();

    std::sort(tail.begin(), tail.end());
    PowerLawFit fit;
    fit.mu = mu;
    fit.x_min = x_min;
    fit.method = FitMethod::mle;
    fit.n_tail = tail.size();
    fit.ks_stat = detail::ks_distance(tail, x_min, mu);
    return fit;
}

// OLS on (log bin-centre, log density) over the non-empty bins at or beyond
// x_min. Density means count / bin-width: geometric bins widen with l, so
// regressing raw counts would flatten the slope by exactly one. mu is the
// negated slope of the density fit.
namespace detail {

// Non-empty bins whose geometric-mean center sits at or above the cutoff —
// the exact set the regression runs on.
inline std::vector<std::size_t> regression_bins(const Histogram& hist, double x_min) {
    if (hist.scale != HistScale::logarithmic)
        throw Error("loglog regression requires a logarithmic histogram");
    if (!(x_min > 0.0) || !std::isfinite(x_min)) throw Error("x_min must be positive and finite");
    std::vector<std::size_t> used;
    for (std::size_t i = 0; i < hist.counts.size(); ++i)
        if (hist.counts[i] > 0 && bin_center(hist, i) >= x_min) used.push_back(i);
    return used;
}

}  // namespace detail

// (ln bin-center, ln density) pairs the regression fits; exposed so plots can
// draw the identical point set.
inline std::vector<std::pair<double, double>> regression_points(const Histogram& hist,
                                                                double x_min) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i : detail::regression_bins(hist, x_min))
        pts.emplace_back(std::log(bin_center(hist, i)),
                         std::log(double(hist.counts[i]) / bin_width(hist, i)));
    return pts;
}

inline PowerLawFit fit_loglog_regression(const Histogram& hist, double x_min) {
    const std::vector<std::size_t> used = detail::regression_bins(hist, x_min);
    if (used.size() < 3) throw InsufficientTailBins(used.size());

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::uint64_t n_tail = 0;
    for (std::size_t i : used) {
        const double x = std::log(bin_center(hist, i));
        const double y = std::log(double(hist.counts[i]) / bin_width(hist, i));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        n_tail += hist.counts[i];
    }
    const double n = static_cast<double>(used.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

    PowerLawFit fit;
    fit.mu = -slope;
    fit.x_min = x_min;
    fit.method = FitMethod::loglog_regression;
    fit.n_tail = static_cast<std::size_t>(n_tail);

    // Goodness of fit from the binned CDF: compare cumulative counts at bin
    // upper edges against the fitted Pareto CDF anchored at the first used
    // bin's lower edge. A non-normalizable fit (mu <= 1) scores worst.
    if (fit.mu > 1.0) {
        const double x0 = hist.edges[used.front()];
        std::uint64_t cum = 0;
        double d = 0.0;
        for (std::size_t i = used.front(); i <= used.back(); ++i) {
            cum += hist.counts[i];
            const double f = 1.0 - std::pow(hist.edges[i + 1] / x0, 1.0 - fit.mu);
            d = std::max(d, std::abs(f - double(cum) / double(n_tail)));
        }
        fit.ks_stat = std::min(d, 1.0);
    } else {
        fit.ks_stat = 1.0;
    }
    return fit;
}

// Clauset-style cutoff selection: among the candidates that keep a tail of at
// least min_tail samples, pick the one whose MLE fit has the smallest KS
// distance; ties go to the smaller candidate (larger tail).
inline double select_xmin(const StepSeries& steps, std::span<const double> candidates,
                          std::size_t min_tail = 50) {
    std::vector<double> sorted(candidates.begin(), candidates.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    double best_x = 0.0, best_ks = 2.0;
    for (double cand : sorted) {
        if (!(cand > 0.0) || !std::isfinite(cand)) continue;
        std::vector<double> tail = detail::tail_values(steps.steps, cand);
        if (tail.size() < min_tail) continue;
        double sum_log = 0.0;
        const double mu = detail::hill_mu(tail, cand, sum_log);
        if (!(sum_log > 0.0)) continue;
        std::sort(tail.begin(), tail.end());
        const double ks = detail::ks_distance(tail, cand, mu);
        if (ks < best_ks) {
            best_ks = ks;
            best_x = cand;
        }
    }
    if (best_ks > 1.0) throw NoViableCandidate();
    return best_x;
}

// Default candidate grid: the 50th..99th percentiles of the positive steps.
inline std::vector<double> default_xmin_candidates(const StepSeries& steps) {
    std::vector<double> pos;
    for (double s : steps.steps)
        if (s > 0.0 && std::isfinite(s)) pos.push_back(s);
    std::sort(pos.begin(), pos.end());
    std::vector<double> cands;
    if (pos.empty()) return cands;
    for (int p = 50; p <= 99; ++p) {
        const double idx = double(p) / 100.0 * double(pos.size() - 1);
        const std::size_t i = static_cast<std::size_t>(idx);
        const double frac = idx - double(i);
        const double q = i + 1 < pos.size() ? pos[i] * (1.0 - frac) + pos[i + 1] * frac : pos[i];
        if (cands.empty() || q > cands.back()) cands.push_back(q);
    }
    return cands;
}

// Percentile bootstrap for the MLE exponent. Resample b draws its own RNG
// stream from (seed, b), so intervals are reproducible and resamples could
// run in any order.
inline std::pair<double, double> bootstrap_ci(const StepSeries& steps, double x_min, int B,
                                              double level, std::uint64_t seed) {
    if (B < 100) throw InvalidBootstrap("B must be >= 100, got " + std::to_string(B));
    if (!(level > 0.0 && level < 1.0)) throw InvalidBootstrap("level must be in (0, 1)");

    const std::vector<double> tail = detail::tail_values(steps.steps, x_min);
    if (tail.size() < 2) throw EmptyTail(x_min);
    const std::size_t n = tail.size();

    std::vector<double> mus(static_cast<std::size_t>(B));
    for (int b = 0; b < B; ++b) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
        double sum_log = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum_log += std::log(tail[rng.index(n)] / x_min);
        mus[static_cast<std::size_t>(b)] =
            sum_log > 0.0 ? 1.0 + double(n) / sum_log : std::numeric_limits<double>::infinity();
    }
    std::sort(mus.begin(), mus.end());

    const auto quantile = [&](double q) {
        const double idx = q * double(mus.size() - 1);
        const std::size_t i = static_cast<std::size_t>(idx);
        const double frac = idx - double(i);
        return i + 1 < mus.size() ? mus[i] * (1.0 - frac) + mus[i + 1] * frac : mus[i];
    };
    const double alpha = (1.0 - level) / 2.0;
    return {quantile(alpha), quantile(1.0 - alpha)};
}

inline nlohmann::json fit_to_json(const PowerLawFit& fit) {
    nlohmann::json j{{"mu", fit.mu},
                     {"x_min", fit.x_min},
                     {"method", to_string(fit.method)},
                     {"n_tail", fit.n_tail},
                     {"ks", fit.ks_stat},
                     {"regime", to_string(classify(fit))}};
    if (fit.ci)
        j["ci"] = {fit.ci->first, fit.ci->second};
    else
        j["ci"] = nullptr;
    return j;
}

}  // namespace gazeforage
