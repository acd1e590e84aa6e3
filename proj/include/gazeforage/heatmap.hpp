#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gazeforage/errors.hpp"

namespace gazeforage {

enum class Normalization { probability, unit_range, raw };

inline std::string to_string(Normalization n) {
    switch (n) {
        case Normalization::probability: return "probability";
        case Normalization::unit_range: return "unit_range";
        default: return "raw";
    }
}

inline Normalization normalization_from_string(const std::string& s) {
    if (s == "probability") return Normalization::probability;
    if (s == "unit_range") return Normalization::unit_range;
    if (s == "raw") return Normalization::raw;
    throw Error("unknown normalization '" + s + "'");
}

struct Heatmap {
    int width = 112;
    int height = 112;
    std::vector<double> values;  // row-major, non-negative
    Normalization normalization = Normalization::raw;

    double& at(int row, int col) { return values[static_cast<std::size_t>(row) * width + col]; }
    double at(int row, int col) const {
        return values[static_cast<std::size_t>(row) * width + col];
    }
};

struct LossWeights {
    double alpha = 0.4;  // BCE
    double beta = 0.3;   // MSE
    double gamma = 0.3;  // KL
};

namespace detail {

inline void check_dims(const Heatmap& a, const Heatmap& b) {
    if (a.width != b.width || a.height != b.height)
        throw DimensionMismatch(a.width, a.height, b.width, b.height);
}

inline double value_sum(const Heatmap& h) {
    double s = 0.0;
    for (double v : h.values) s += v;
    return s;
}

inline double value_max(const Heatmap& h) {
    double m = 0.0;
    for (double v : h.values) m = std::max(m, v);
    return m;
}

}  // namespace detail

inline Heatmap normalize(const Heatmap& h, Normalization mode) {
    Heatmap out = h;
    out.normalization = mode;
    if (mode == Normalization::raw) return out;
    const double denom =
        mode == Normalization::probability ? detail::value_sum(h) : detail::value_max(h);
    if (!(denom > 0.0)) throw AllZeroMap();
    for (double& v : out.values) v /= denom;
    return out;
}

// Sum of isotropic Gaussians, one per gaze point. sigma is in full-resolution
// screen pixels; kernels are evaluated at output-cell centres mapped back to
// screen coordinates, which keeps the map consistent under any output size.
// Dense evaluation, no kernel cutoff.
inline Heatmap build_heatmap(std::span<const std::pair<double, double>> points,
                             std::pair<int, int> screen, double sigma_px, int out_w = 112,
                             int out_h = 112) {
    if (points.empty()) throw NoPoints();
    if (!(sigma_px > 0.0) || !std::isfinite(sigma_px)) throw InvalidSigma(sigma_px);
    if (screen.first <= 0 || screen.second <= 0 || out_w <= 0 || out_h <= 0)
        throw Error("heatmap dimensions must be positive");

    Heatmap h;
    h.width = out_w;
    h.height = out_h;
    h.values.assign(static_cast<std::size_t>(out_w) * out_h, 0.0);

    const double sx = double(screen.first) / double(out_w);
    const double sy = double(screen.second) / double(out_h);
    const double inv_two_sigma2 = 1.0 / (2.0 * sigma_px * sigma_px);

    for (int r = 0; r < out_h; ++r) {
        const double cy = (double(r) + 0.5) * sy;
        for (int c = 0; c < out_w; ++c) {
            const double cx = (double(c) + 0.5) * sx;
            double acc = 0.0;
            for (const auto& [px, py] : points) {
                const double dx = cx - px;
                const double dy = cy - py;
                acc += std::exp(-(dx * dx + dy * dy) * inv_two_sigma2);
            }
            h.at(r, c) = acc;
        }
    }
    return normalize(h, Normalization::probability);
}

// KL(H || H_hat) in nats. Both maps get epsilon added cell-wise and are
// renormalized first, so zero cells are safe and identical maps give exactly
// zero.
inline double kl_divergence(const Heatmap& h_true, const Heatmap& h_pred,
                            double epsilon = 1e-8) {
    detail::check_dims(h_true, h_pred);
    if (h_true.normalization != Normalization::probability ||
        h_pred.normalization != Normalization::probability)
        throw NormalizationMismatch("kl_divergence expects probability-normalized maps");
    if (!(epsilon > 0.0)) throw Error("epsilon must be positive");

    const double n = static_cast<double>(h_true.values.size());
    const double zt = detail::value_sum(h_true) + epsilon * n;
    const double zp = detail::value_sum(h_pred) + epsilon * n;
    double kl = 0.0;
    for (std::size_t i = 0; i < h_true.values.size(); ++i) {
        const double p = (h_true.values[i] + epsilon) / zt;
        const double q = (h_pred.values[i] + epsilon) / zp;
        kl += p * std::log(p / q);
    }
    return std::max(kl, 0.0);
}

// Mean binary cross-entropy in nats; predictions clamped to [eps, 1-eps].
inline double bce(const Heatmap& h_true, const Heatmap& h_pred) {
    detail::check_dims(h_true, h_pred);
    if (h_true.normalization != Normalization::unit_range ||
        h_pred.normalization != Normalization::unit_range)
        throw NormalizationMismatch("bce expects unit_range-normalized maps");

    constexpr double eps = 1e-7;
    double acc = 0.0;
    for (std::size_t i = 0; i < h_true.values.size(); ++i) {
        const double t = h_true.values[i];
        const double p = std::clamp(h_pred.values[i], eps, 1.0 - eps);
        acc -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
    }
    return acc / static_cast<double>(h_true.values.size());
}

inline double mse(const Heatmap& h_true, const Heatmap& h_pred) {
    detail::check_dims(h_true, h_pred);
    if (h_true.normalization != h_pred.normalization)
        throw NormalizationMismatch("mse expects maps with matching normalization");
    double acc = 0.0;
    for (std::size_t i = 0; i < h_true.values.size(); ++i) {
        const double d = h_true.values[i] - h_pred.values[i];
        acc += d * d;
    }
    return acc / static_cast<double>(h_true.values.size());
}

// alpha*BCE + beta*MSE + gamma*KL. BCE and MSE run on unit-range copies, KL
// on probability copies; inputs may be in any normalization mode.
inline double composite_loss(const Heatmap& h_true, const Heatmap& h_pred,
                             const LossWeights& w = {}) {
    detail::check_dims(h_true, h_pred);
    if (!(w.alpha >= 0.0 && w.beta >= 0.0 && w.gamma >= 0.0) ||
        (w.alpha == 0.0 && w.beta == 0.0 && w.gamma == 0.0))
        throw Error("loss weights must be non-negative with at least one positive");

    const Heatmap tu = normalize(h_true, Normalization::unit_range);
    const Heatmap pu = normalize(h_pred, Normalization::unit_range);
    const Heatmap tp = normalize(h_true, Normalization::probability);
    const Heatmap pp = normalize(h_pred, Normalization::probability);
    return w.alpha * bce(tu, pu) + w.beta * mse(tu, pu) + w.gamma * kl_divergence(tp, pp);
}

inline double pearson_map(const Heatmap& h_true, const Heatmap& h_pred) {
    detail::check_dims(h_true, h_pred);
    const double n = static_cast<double>(h_true.values.size());
    double mt = 0, mp = 0;
    for (std::size_t i = 0; i < h_true.values.size(); ++i) {
        mt += h_true.values[i];
        mp += h_pred.values[i];
    }
    mt /= n;
    mp /= n;
    double stt = 0, spp = 0, stp = 0;
    for (std::size_t i = 0; i < h_true.values.size(); ++i) {
        const double a = h_true.values[i] - mt;
        const double b = h_pred.values[i] - mp;
        stt += a * a;
        spp += b * b;
        stp += a * b;
    }
    if (stt == 0.0 || spp == 0.0) throw DegenerateVariance();
    return stp / std::sqrt(stt * spp);
}

}  // namespace gazeforage
