#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gazeforage/errors.hpp"
#include "gazeforage/format.hpp"
#include "gazeforage/stats.hpp"

namespace gazeforage {

// Minimal deterministic SVG builder: fixed canvas, fixed-precision
// coordinates, no timestamps, so identical inputs yield identical bytes.
class SvgDoc {
  public:
    SvgDoc(int width, int height) : width_(width), height_(height) {}

    void rect(double x, double y, double w, double h, const std::string& fill) {
        body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
                 "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"/>\n";
    }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              const std::string& extra = "") {
        body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
                 "\" y2=\"" + num(y2) + "\" stroke=\"" + stroke + "\"" + extra + "/>\n";
    }

    void circle(double cx, double cy, double r, const std::string& fill) {
        body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
                 "\" fill=\"" + fill + "\"/>\n";
    }

    void text(double x, double y, const std::string& s, int size = 12,
              const std::string& anchor = "start") {
        body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" +
                 std::to_string(size) + "\" font-family=\"monospace\" text-anchor=\"" + anchor +
                 "\">" + escape(s) + "</text>\n";
    }

    std::string str() const {
        return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
               std::to_string(width_) + "\" height=\"" + std::to_string(height_) +
               "\" viewBox=\"0 0 " + std::to_string(width_) + " " + std::to_string(height_) +
               "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body_ + "</svg>\n";
    }

  private:
    static std::string num(double v) { return format_double(v, 2); }

    static std::string escape(const std::string& s) {
        std::string out;
        for (char c : s) {
            if (c == '&') out += "&amp;";
            else if (c == '<') out += "&lt;";
            else if (c == '>') out += "&gt;";
            else out += c;
        }
        return out;
    }

    int width_, height_;
    std::string body_;
};

namespace detail {

struct PlotFrame {
    static constexpr double left = 70, right = 620, top = 40, bottom = 430;
    double x_lo, x_hi, y_lo, y_hi;

    double px(double x) const { return left + (x - x_lo) / (x_hi - x_lo) * (right - left); }
    double py(double y) const { return bottom - (y - y_lo) / (y_hi - y_lo) * (bottom - top); }

    void draw_axes(SvgDoc& doc, const std::string& x_label, const std::string& y_label,
                   const std::string& title) const {
        doc.line(left, bottom, right, bottom, "black");
        doc.line(left, bottom, left, top, "black");
        for (int i = 0; i <= 4; ++i) {
            const double fx = x_lo + (x_hi - x_lo) * i / 4.0;
            const double fy = y_lo + (y_hi - y_lo) * i / 4.0;
            doc.line(px(fx), bottom, px(fx), bottom + 5, "black");
            doc.text(px(fx), bottom + 20, format_double(fx, 2), 11, "middle");
            doc.line(left - 5, py(fy), left, py(fy), "black");
            doc.text(left - 8, py(fy) + 4, format_double(fy, 2), 11, "end");
        }
        doc.text((left + right) / 2.0, bottom + 40, x_label, 12, "middle");
        doc.text(left, top - 18, y_label, 12);
        doc.text((left + right) / 2.0, top - 18, title, 14, "middle");
    }
};

}  // namespace detail

// Bar chart of histogram counts on linear axes.
inline std::string histogram_svg(const Histogram& hist, const std::string& title,
                                 const std::string& x_label) {
    if (hist.counts.empty()) throw InvalidRange("histogram has no bins");
    SvgDoc doc(640, 480);
    double max_count = 1.0;
    for (auto c : hist.counts) max_count = std::max(max_count, double(c));
    detail::PlotFrame frame{hist.edges.front(), hist.edges.back(), 0.0, max_count * 1.05};
    frame.draw_axes(doc, x_label, "count", title);
    for (std::size_t i = 0; i < hist.counts.size(); ++i) {
        if (hist.counts[i] == 0) continue;
        const double x0 = frame.px(hist.edges[i]);
        const double x1 = frame.px(hist.edges[i + 1]);
        const double y = frame.py(double(hist.counts[i]));
        doc.rect(x0, y, std::max(x1 - x0 - 0.5, 0.5), frame.py(0.0) - y, "#4878a8");
    }
    return doc.str();
}

// Scatter of (ln x, ln density) points with the fitted line overlaid and the
// exponent annotated.
inline std::string loglog_svg(std::span<const std::pair<double, double>> log_points,
                              double slope, double intercept, double mu,
                              const std::string& title) {
    if (log_points.empty()) throw InvalidRange("no points for log-log plot");
    double x_lo = log_points[0].first, x_hi = x_lo, y_lo = log_points[0].second, y_hi = y_lo;
    for (const auto& [x, y] : log_points) {
        x_lo = std::min(x_lo, x); x_hi = std::max(x_hi, x);
        y_lo = std::min(y_lo, y); y_hi = std::max(y_hi, y);
    }
    if (x_hi == x_lo) { x_lo -= 1.0; x_hi += 1.0; }
    if (y_hi == y_lo) { y_lo -= 1.0; y_hi += 1.0; }
    const double pad_x = 0.05 * (x_hi - x_lo), pad_y = 0.05 * (y_hi - y_lo);
    SvgDoc doc(640, 480);
    detail::PlotFrame frame{x_lo - pad_x, x_hi + pad_x, y_lo - pad_y, y_hi + pad_y};
    frame.draw_axes(doc, "ln step length", "ln density", title);
    doc.line(frame.px(x_lo), frame.py(slope * x_lo + intercept), frame.px(x_hi),
             frame.py(slope * x_hi + intercept), "#c03028", " stroke-width=\"1.5\"");
    for (const auto& [x, y] : log_points) doc.circle(frame.px(x), frame.py(y), 3, "#4878a8");
    doc.text(detail::PlotFrame::right - 10, detail::PlotFrame::top + 20,
             "slope = " + format_double(slope, 3) + ", mu = " + format_double(mu, 3), 12, "end");
    return doc.str();
}

}  // namespace gazeforage
