#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "gazeforage/errors.hpp"
#include "gazeforage/format.hpp"
#include "gazeforage/types.hpp"

namespace gazeforage {

struct SourceTag {
    std::string subject_id;
    std::string image_id;
};

// Euclidean step lengths with provenance kept as (tag, run-length) ranges so
// pooled series still know where each segment came from.
struct StepSeries {
    struct Provenance {
        SourceTag tag;
        std::size_t count = 0;
    };
    std::vector<double> steps;
    std::vector<Provenance> provenance;
};

// Signed turning angles in (-pi, pi]; 0 = straight, +pi = exact reversal.
struct TurnSeries {
    std::vector<double> angles;
};

enum class HistScale { linear, logarithmic };

struct Histogram {
    std::vector<double> edges;          // strictly increasing, counts.size() + 1
    std::vector<std::uint64_t> counts;  // half-open bins [edges[i], edges[i+1])
    HistScale scale = HistScale::linear;
    std::uint64_t overflow = 0;         // out-of-range or non-finite inputs

    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (auto c : counts) t += c;
        return t;
    }
};

struct HistogramSpec {
    HistScale scale = HistScale::linear;
    double range_lo = 0.0;
    double range_hi = 1.0;
    double bin_width = 1.0;     // linear scale
    int bins_per_decade = 20;   // logarithmic scale
};

// Geometric mean for log bins (the natural centre on log axes), midpoint for
// linear bins.
inline double bin_center(const Histogram& h, std::size_t i) {
    const double lo = h.edges[i], hi = h.edges[i + 1];
    return h.scale == HistScale::logarithmic ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
}

inline double bin_width(const Histogram& h, std::size_t i) {
    return h.edges[i + 1] - h.edges[i];
}

inline StepSeries step_lengths(const Trajectory& traj) {
    if (traj.samples.size() < 2) throw TooFewSamples(traj.samples.size(), 2);
    StepSeries out;
    out.steps.reserve(traj.samples.size() - 1);
    for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i) {
        if (traj.has_gap_after(i)) continue;
        const auto& a = traj.samples[i];
        const auto& b = traj.samples[i + 1];
        out.steps.push_back(std::hypot(b.x_px - a.x_px, b.y_px - a.y_px));
    }
    out.provenance.push_back({{traj.subject_id, traj.image_id}, out.steps.size()});
    return out;
}

// Signed angle from v1 to v2: atan2 of cross and dot products. The exact
// reversal lands on +pi (atan2 can return -pi for a signed-zero cross, which
// we fold back). Triples with a zero-length displacement are skipped: the
// turn is undefined there and counting it as 0 would inflate the straight
// spike.
inline TurnSeries turning_angles(const Trajectory& traj) {
    if (traj.samples.size() < 3) throw TooFewSamples(traj.samples.size(), 3);
    TurnSeries out;
    out.angles.reserve(traj.samples.size() - 2);
    for (std::size_t i = 0; i + 2 < traj.samples.size(); ++i) {
        if (traj.has_gap_after(i) || traj.has_gap_after(i + 1)) continue;
        const auto& a = traj.samples[i];
        const auto& b = traj.samples[i + 1];
        const auto& c = traj.samples[i + 2];
        const double v1x = b.x_px - a.x_px, v1y = b.y_px - a.y_px;
        const double v2x = c.x_px - b.x_px, v2y = c.y_px - b.y_px;
        if ((v1x == 0.0 && v1y == 0.0) || (v2x == 0.0 && v2y == 0.0)) continue;
        const double cross = v1x * v2y - v1y * v2x;
        const double dot = v1x * v2x + v1y * v2y;
        double angle = std::atan2(cross, dot);
        if (angle == -std::numbers::pi) angle = std::numbers::pi;
        out.angles.push_back(angle);
    }
    return out;
}

namespace detail {

inline std::size_t locate_bin(const std::vector<double>& edges, std::size_t guess, double v) {
    // Guard against rounding in the closed-form index: nudge until the
    // half-open bin really contains v.
    const std::size_t last = edges.size() - 2;
    std::size_t i = guess > last ? last : guess;
    while (i > 0 && v < edges[i]) --i;
    while (i < last && v >= edges[i + 1]) ++i;
    return i;
}

}  // namespace detail

// Bins are half-open except the last, which includes its upper edge (so a
// turn of exactly +pi is binned, not overflowed). Values outside the range
// land in the overflow tally, never silently dropped; counts + overflow
// always equals the input length.
inline Histogram histogram(std::span<const double> values, const HistogramSpec& spec) {
    if (!std::isfinite(spec.range_lo) || !std::isfinite(spec.range_hi) ||
        !(spec.range_lo < spec.range_hi))
        throw InvalidRange("need finite range_lo < range_hi");

    Histogram h;
    h.scale = spec.scale;
    if (spec.scale == HistScale::linear) {
        if (!(spec.bin_width > 0.0)) throw InvalidRange("bin_width must be positive");
        const std::size_t k = static_cast<std::size_t>(
            std::ceil((spec.range_hi - spec.range_lo) / spec.bin_width));
        h.edges.resize(k + 1);
        for (std::size_t i = 0; i <= k; ++i) h.edges[i] = spec.range_lo + double(i) * spec.bin_width;
    } else {
        if (!(spec.range_lo > 0.0)) throw NonPositiveLogRange();
        if (spec.bins_per_decade < 1) throw InvalidRange("bins_per_decade must be >= 1");
        const double decades = std::log10(spec.range_hi / spec.range_lo);
        const std::size_t k = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(decades * spec.bins_per_decade)));
        h.edges.resize(k + 1);
        for (std::size_t i = 0; i <= k; ++i)
            h.edges[i] = spec.range_lo * std::pow(10.0, double(i) / spec.bins_per_decade);
    }
    h.counts.assign(h.edges.size() - 1, 0);

    for (double v : values) {
        if (!(v >= h.edges.front()) || v > h.edges.back()) {
            ++h.overflow;  // also catches NaN
            continue;
        }
        if (v == h.edges.back()) {
            ++h.counts.back();
            continue;
        }
        std::size_t guess;
        if (spec.scale == HistScale::linear)
            guess = static_cast<std::size_t>((v - spec.range_lo) / spec.bin_width);
        else
            guess = static_cast<std::size_t>(std::log10(v / spec.range_lo) *
                                             spec.bins_per_decade);
        ++h.counts[detail::locate_bin(h.edges, guess, v)];
    }
    return h;
}

inline StepSeries pool_steps(std::span<const StepSeries> series) {
    StepSeries out;
    std::size_t total = 0;
    for (const auto& s : series) total += s.steps.size();
    out.steps.reserve(total);
    for (const auto& s : series) {
        out.steps.insert(out.steps.end(), s.steps.begin(), s.steps.end());
        out.provenance.insert(out.provenance.end(), s.provenance.begin(), s.provenance.end());
    }
    return out;
}

inline void histogram_to_csv(const Histogram& h, std::ostream& out) {
    out << "bin_lo,bin_hi,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        out << format_double(h.edges[i]) << ',' << format_double(h.edges[i + 1]) << ','
            << h.counts[i] << '\n';
}

}  // namespace gazeforage
