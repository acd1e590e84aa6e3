#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gazeforage/powerlaw.hpp"
#include "gazeforage/stats.hpp"
#include "gazeforage/svg.hpp"
#include "gazeforage/types.hpp"

namespace gazeforage {

struct AnalyzeOptions {
    std::optional<double> x_min;  // shared cutoff for both fits; auto-selected when absent
    int bins_per_decade = 20;
    double linear_bin_px = 1.0;
    std::size_t min_tail = 50;
    int bootstrap_resamples = 0;  // 0 disables the CI
    double ci_level = 0.95;
    std::uint64_t seed = 0;
};

// One step series analyzed end to end: histograms on both scales plus both
// estimators. A fit that cannot run (degenerate data, thin tail) is reported
// as absent with its reason rather than aborting the whole analysis.
struct StepAnalysis {
    std::size_t n_steps = 0;
    std::size_t n_zero = 0;  // zero-length steps; excluded from fits, log undefined
    double x_min_used = 0.0;
    Histogram linear_hist;
    std::optional<Histogram> log_hist;
    std::optional<PowerLawFit> regression;
    std::optional<PowerLawFit> mle;
    std::string regression_error;
    std::string mle_error;
};

struct TurnAnalysis {
    std::size_t n_turns = 0;
    Histogram hist;
};

inline StepAnalysis analyze_steps(const StepSeries& steps, double screen_diag_px,
                                  const AnalyzeOptions& opt) {
    StepAnalysis out;
    out.n_steps = steps.steps.size();
    double lo_pos = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double s : steps.steps) {
        if (s == 0.0) ++out.n_zero;
        if (s > 0.0) lo_pos = std::min(lo_pos, s);
        hi = std::max(hi, s);
    }

    HistogramSpec linear_spec;
    linear_spec.scale = HistScale::linear;
    linear_spec.range_lo = 0.0;
    linear_spec.range_hi = std::max(std::ceil(std::max(screen_diag_px, hi)), 1.0);
    linear_spec.bin_width = opt.linear_bin_px;
    out.linear_hist = histogram(steps.steps, linear_spec);

    if (!std::isfinite(lo_pos) || hi <= lo_pos) {
        out.regression_error = out.mle_error = "no positive step-length spread";
        return out;
    }

    HistogramSpec log_spec;
    log_spec.scale = HistScale::logarithmic;
    log_spec.range_lo = lo_pos;
    log_spec.range_hi = hi;
    log_spec.bins_per_decade = opt.bins_per_decade;
    out.log_hist = histogram(steps.steps, log_spec);

    if (opt.x_min) {
        out.x_min_used = *opt.x_min;
    } else {
        try {
            out.x_min_used = select_xmin(steps, default_xmin_candidates(steps), opt.min_tail);
        } catch (const Error&) {
            out.x_min_used = lo_pos;  // thin data: fit the whole positive range
        }
    }

    try {
        PowerLawFit fit = fit_mle(steps, out.x_min_used);
        if (opt.bootstrap_resamples > 0)
            fit.ci = bootstrap_ci(steps, out.x_min_used, opt.bootstrap_resamples, opt.ci_level,
                                  opt.seed);
        out.mle = fit;
    } catch (const Error& e) {
        out.mle_error = e.what();
    }
    try {
        out.regression = fit_loglog_regression(*out.log_hist, out.x_min_used);
    } catch (const Error& e) {
        out.regression_error = e.what();
    }
    return out;
}

inline TurnAnalysis analyze_turns(const TurnSeries& turns) {
    TurnAnalysis out;
    out.n_turns = turns.angles.size();
    HistogramSpec spec;
    spec.scale = HistScale::linear;
    spec.range_lo = -std::numbers::pi;
    spec.range_hi = std::numbers::pi;
    spec.bin_width = std::numbers::pi / 36.0;  // 5 degree bins
    out.hist = histogram(turns.angles, spec);
    return out;
}

// --- JSON serialization (full round-trip precision via nlohmann) ---

inline nlohmann::json histogram_to_json(const Histogram& h) {
    return {{"scale", h.scale == HistScale::linear ? "linear" : "logarithmic"},
            {"edges", h.edges},
            {"counts", h.counts},
            {"overflow", h.overflow}};
}

inline nlohmann::json step_analysis_to_json(const StepAnalysis& a) {
    nlohmann::json j{{"n_steps", a.n_steps},
                     {"n_zero_steps", a.n_zero},
                     {"x_min", a.x_min_used},
                     {"hist_linear", histogram_to_json(a.linear_hist)}};
    j["hist_log"] = a.log_hist ? histogram_to_json(*a.log_hist) : nlohmann::json(nullptr);
    j["fit_regression"] = a.regression ? fit_to_json(*a.regression) : nlohmann::json(nullptr);
    j["fit_mle"] = a.mle ? fit_to_json(*a.mle) : nlohmann::json(nullptr);
    if (!a.regression_error.empty()) j["fit_regression_error"] = a.regression_error;
    if (!a.mle_error.empty()) j["fit_mle_error"] = a.mle_error;
    return j;
}

inline nlohmann::json turn_analysis_to_json(const TurnAnalysis& a) {
    return {{"n_turns", a.n_turns}, {"hist", histogram_to_json(a.hist)}};
}

// SVG plots for one analyzed step/turn group.
inline std::string steps_linear_svg(const StepAnalysis& a, const std::string& title) {
    return histogram_svg(a.linear_hist, title, "step length (px)");
}

inline std::optional<std::string> steps_loglog_svg(const StepAnalysis& a,
                                                   const std::string& title) {
    if (!a.log_hist || !a.regression) return std::nullopt;
    const auto pts = regression_points(*a.log_hist, a.x_min_used);
    double sx = 0, sy = 0;
    for (const auto& [x, y] : pts) { sx += x; sy += y; }
    const double slope = -a.regression->mu;
    const double intercept = sy / double(pts.size()) - slope * sx / double(pts.size());
    return loglog_svg(pts, slope, intercept, a.regression->mu, title);
}

inline std::string turns_svg(const TurnAnalysis& a, const std::string& title) {
    return histogram_svg(a.hist, title, "turning angle (rad)");
}

}  // namespace gazeforage
