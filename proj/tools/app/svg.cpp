#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace psocp::app {

namespace {

constexpr double kWidth = 780;
constexpr double kHeight = 480;
constexpr double kLeft = 80;
constexpr double kRight = 230;
constexpr double kTop = 40;
constexpr double kBottom = 60;

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!(lo <= hi)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-300 || hi - lo <= 1e-12 * std::max(std::abs(lo), std::abs(hi))) {
            const double pad = std::max(1.0, std::abs(lo)) * 0.5;
            lo -= pad;
            hi += pad;
        }
    }
};

// Ticks at 1, 2 or 5 times a power of ten, about five per axis.
std::vector<double> ticks(double lo, double hi) {
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) break;
    }
    std::vector<double> out;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) {
        out.push_back(v);
    }
    return out;
}

}  // namespace

std::string render_svg(const Figure& fig) {
    Range xr;
    Range yr;
    for (const auto& s : fig.series) {
        for (size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xr.add(s.x[i]);
            yr.add(s.y[i]);
        }
    }
    xr.finish();
    yr.finish();

    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    if (fig.equal_axes) {
        // Widen the narrower range so one unit has the same length on both axes.
        const double per_px = std::max((xr.hi - xr.lo) / pw, (yr.hi - yr.lo) / ph);
        const double xc = 0.5 * (xr.lo + xr.hi);
        const double yc = 0.5 * (yr.lo + yr.hi);
        xr.lo = xc - 0.5 * per_px * pw;
        xr.hi = xc + 0.5 * per_px * pw;
        yr.lo = yc - 0.5 * per_px * ph;
        yr.hi = yc + 0.5 * per_px * ph;
    }
    auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

    std::ostringstream out;
    out << R"(<?xml version="1.0" encoding="UTF-8"?>)" << '\n'
        << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << kWidth << R"(" height=")"
        << kHeight << R"(" viewBox="0 0 )" << kWidth << ' ' << kHeight << R"(">)" << '\n'
        << R"(<rect width="100%" height="100%" fill="white"/>)" << '\n'
        << R"(<g font-family="sans-serif" font-size="12">)" << '\n';

    out << R"(<text x=")" << num(kLeft + pw / 2) << R"(" y="24" text-anchor="middle" font-size="15">)"
        << escape(fig.title) << "</text>\n";

    for (double v : ticks(xr.lo, xr.hi)) {
        out << R"(<line x1=")" << num(px(v)) << R"(" y1=")" << num(kTop) << R"(" x2=")"
            << num(px(v)) << R"(" y2=")" << num(kTop + ph) << R"(" stroke="#e0e0e0"/>)" << '\n'
            << R"(<text x=")" << num(px(v)) << R"(" y=")" << num(kTop + ph + 18)
            << R"(" text-anchor="middle">)" << tick_label(v) << "</text>\n";
    }
    for (double v : ticks(yr.lo, yr.hi)) {
        out << R"(<line x1=")" << num(kLeft) << R"(" y1=")" << num(py(v)) << R"(" x2=")"
            << num(kLeft + pw) << R"(" y2=")" << num(py(v)) << R"(" stroke="#e0e0e0"/>)" << '\n'
            << R"(<text x=")" << num(kLeft - 6) << R"(" y=")" << num(py(v) + 4)
            << R"(" text-anchor="end">)" << tick_label(v) << "</text>\n";
    }
    out << R"(<rect x=")" << num(kLeft) << R"(" y=")" << num(kTop) << R"(" width=")" << num(pw)
        << R"(" height=")" << num(ph) << R"(" fill="none" stroke="black"/>)" << '\n';
    out << R"(<text x=")" << num(kLeft + pw / 2) << R"(" y=")" << num(kHeight - 16)
        << R"(" text-anchor="middle">)" << escape(fig.x_label) << "</text>\n";
    out << R"(<text x="18" y=")" << num(kTop + ph / 2) << R"(" text-anchor="middle" transform="rotate(-90 18 )"
        << num(kTop + ph / 2) << ")\">" << escape(fig.y_label) << "</text>\n";

    double legend_y = kTop + 10;
    for (const auto& s : fig.series) {
        const size_t n = std::min(s.x.size(), s.y.size());
        if (s.markers) {
            for (size_t i = 0; i < n; ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                out << R"(<circle cx=")" << num(px(s.x[i])) << R"(" cy=")" << num(py(s.y[i]))
                    << R"(" r="2.5" fill="none" stroke=")" << s.color << R"("/>)" << '\n';
            }
        } else {
            // Break the polyline at non-finite points.
            std::ostringstream pts;
            auto flush = [&] {
                if (pts.tellp() > 0) {
                    out << R"(<polyline fill="none" stroke=")" << s.color
                        << R"(" stroke-width="1.5")" << (s.dashed ? R"( stroke-dasharray="6 4")" : "")
                        << R"( points=")" << pts.str() << R"("/>)" << '\n';
                }
                pts.str("");
                pts.clear();
            };
            for (size_t i = 0; i < n; ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                    flush();
                    continue;
                }
                pts << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
            }
            flush();
        }
        if (s.label.empty()) continue;
        const double lx = kLeft + pw + 12;
        if (s.markers) {
            out << R"(<circle cx=")" << num(lx + 12) << R"(" cy=")" << num(legend_y)
                << R"(" r="3" fill="none" stroke=")" << s.color << R"("/>)" << '\n';
        } else {
            out << R"(<line x1=")" << num(lx) << R"(" y1=")" << num(legend_y) << R"(" x2=")"
                << num(lx + 24) << R"(" y2=")" << num(legend_y) << R"(" stroke=")" << s.color
                << R"(" stroke-width="1.5")" << (s.dashed ? R"( stroke-dasharray="6 4")" : "")
                << "/>\n";
        }
        out << R"(<text x=")" << num(lx + 30) << R"(" y=")" << num(legend_y + 4) << R"(">)"
            << escape(s.label) << "</text>\n";
        legend_y += 18;
    }
    out << "</g>\n</svg>\n";
    return out.str();
}

}  // namespace psocp::app
