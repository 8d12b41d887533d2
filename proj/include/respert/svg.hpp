#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "respert/errors.hpp"

namespace respert {

/// Five-number summary drawn as a box (quartiles, median) with whiskers
/// spanning the full data range.
struct BoxGlyph {
  double lo = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double hi = 0.0;
  bool valid = false;
};

/// One x-position of a box plot: the two per-hypothesis glyphs side by side.
struct BoxPairColumn {
  int n = 0;
  BoxGlyph first;   // null hypothesis
  BoxGlyph second;  // alternative hypothesis
};

namespace svg_detail {

constexpr double kWidth = 860.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 78.0;
constexpr double kRight = 830.0;
constexpr double kTop = 26.0;
constexpr double kBottom = 430.0;

inline std::string f2(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

inline std::string g4(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

inline void open_document(std::ostream& os) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"860\" height=\"480\" "
        "viewBox=\"0 0 860 480\" font-family=\"sans-serif\" font-size=\"13\">\n"
     << "<rect width=\"860\" height=\"480\" fill=\"white\"/>\n";
}

inline void close_document(std::ostream& os) {
  os << "</svg>\n";
  if (!os) throw IoError("failed writing svg");
}

inline void axes(std::ostream& os) {
  os << "<line x1=\"" << f2(kLeft) << "\" y1=\"" << f2(kBottom) << "\" x2=\"" << f2(kRight)
     << "\" y2=\"" << f2(kBottom) << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << f2(kLeft) << "\" y1=\"" << f2(kTop) << "\" x2=\"" << f2(kLeft)
     << "\" y2=\"" << f2(kBottom) << "\" stroke=\"black\"/>\n";
}

inline void y_tick(std::ostream& os, double ypix, const std::string& label) {
  os << "<line x1=\"" << f2(kLeft - 5) << "\" y1=\"" << f2(ypix) << "\" x2=\"" << f2(kLeft)
     << "\" y2=\"" << f2(ypix) << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << f2(kLeft - 9) << "\" y=\"" << f2(ypix + 4)
     << "\" text-anchor=\"end\">" << label << "</text>\n";
}

inline void x_tick(std::ostream& os, double xpix, const std::string& label) {
  os << "<line x1=\"" << f2(xpix) << "\" y1=\"" << f2(kBottom) << "\" x2=\"" << f2(xpix)
     << "\" y2=\"" << f2(kBottom + 5) << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << f2(xpix) << "\" y=\"" << f2(kBottom + 20)
     << "\" text-anchor=\"middle\">" << label << "</text>\n";
}

inline void axis_titles(std::ostream& os, const std::string& x_title, const std::string& y_title) {
  os << "<text x=\"" << f2((kLeft + kRight) / 2) << "\" y=\"" << f2(kHeight - 12)
     << "\" text-anchor=\"middle\">" << x_title << "</text>\n";
  os << "<text x=\"18\" y=\"" << f2((kTop + kBottom) / 2)
     << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << f2((kTop + kBottom) / 2)
     << ")\">" << y_title << "</text>\n";
}

struct LinearScale {
  double lo = 0.0, hi = 1.0, pix_lo = 0.0, pix_hi = 1.0;
  double operator()(double v) const {
    if (hi == lo) return (pix_lo + pix_hi) / 2.0;
    return pix_lo + (v - lo) / (hi - lo) * (pix_hi - pix_lo);
  }
};

}  // namespace svg_detail

/// Distance time series as a line, with a vertical marker at every step that
/// created a cross-community edge. Output bytes depend only on the inputs.
inline void svg_timeseries(const std::vector<std::pair<int, double>>& series,
                           const std::vector<int>& event_ns, std::ostream& os) {
  using namespace svg_detail;
  open_document(os);
  double xlo = 0.0, xhi = 1.0, ylo = 0.0, yhi = 1.0;
  if (!series.empty()) {
    xlo = series.front().first;
    xhi = series.back().first;
    yhi = 0.0;
    for (const auto& [n, d] : series) yhi = std::max(yhi, d);
    if (xhi == xlo) xhi = xlo + 1;
    if (yhi == 0.0) yhi = 1.0;
    yhi *= 1.05;
  }
  LinearScale sx{xlo, xhi, kLeft, kRight};
  LinearScale sy{ylo, yhi, kBottom, kTop};

  for (int n : event_ns) {
    os << "<line x1=\"" << f2(sx(n)) << "\" y1=\"" << f2(kTop) << "\" x2=\"" << f2(sx(n))
       << "\" y2=\"" << f2(kBottom) << "\" stroke=\"#4878b0\" stroke-width=\"1\"/>\n";
  }
  if (!series.empty()) {
    os << "<polyline fill=\"none\" stroke=\"#c03030\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (i) os << ' ';
      os << f2(sx(series[i].first)) << ',' << f2(sy(series[i].second));
    }
    os << "\"/>\n";
  }
  axes(os);
  for (int i = 0; i <= 4; ++i) {
    const double v = ylo + (yhi - ylo) * i / 4.0;
    y_tick(os, sy(v), g4(v));
    const double x = xlo + (xhi - xlo) * i / 4.0;
    x_tick(os, sx(x), g4(x));
  }
  axis_titles(os, "n", "distance per growth step");
  close_document(os);
}

/// Box plots of the normalized statistic, two glyphs per size: solid for the
/// null batch, dashed red for the alternative. A logarithmic axis only shows
/// positive values; anything at or below zero is clamped to the axis floor.
inline void svg_box_pairs(const std::vector<BoxPairColumn>& columns, bool log_y,
                          std::ostream& os) {
  using namespace svg_detail;
  open_document(os);

  double lo = 0.0, hi = 1.0;
  bool any = false;
  double min_positive = 0.0;
  for (const BoxPairColumn& c : columns) {
    for (const BoxGlyph* g : {&c.first, &c.second}) {
      if (!g->valid) continue;
      if (!any) {
        lo = g->lo;
        hi = g->hi;
        any = true;
      } else {
        lo = std::min(lo, g->lo);
        hi = std::max(hi, g->hi);
      }
      for (double v : {g->lo, g->q1, g->median, g->q3, g->hi}) {
        if (v > 0.0 && (min_positive == 0.0 || v < min_positive)) min_positive = v;
      }
    }
  }
  const bool use_log = log_y && any && min_positive > 0.0 && hi > 0.0;
  double floor_value = min_positive / 2.0;
  auto transform = [&](double v) {
    if (!use_log) return v;
    return std::log10(std::max(v, floor_value));
  };
  double tlo = any ? transform(use_log ? floor_value : lo) : 0.0;
  double thi = any ? transform(hi) : 1.0;
  if (thi == tlo) thi = tlo + 1.0;
  const double pad = 0.04 * (thi - tlo);
  tlo -= pad;
  thi += pad;
  LinearScale sy{tlo, thi, kBottom, kTop};

  const double slot = (kRight - kLeft) / std::max<std::size_t>(columns.size(), 1);
  const double box_w = std::min(34.0, slot / 4.0);

  auto draw_glyph = [&](double cx, const BoxGlyph& g, const char* stroke, const char* dash) {
    if (!g.valid) return;
    auto Y = [&](double v) { return sy(transform(v)); };
    os << "<line x1=\"" << f2(cx) << "\" y1=\"" << f2(Y(g.lo)) << "\" x2=\"" << f2(cx)
       << "\" y2=\"" << f2(Y(g.q1)) << "\" stroke=\"" << stroke << "\"" << dash << "/>\n";
    os << "<line x1=\"" << f2(cx) << "\" y1=\"" << f2(Y(g.q3)) << "\" x2=\"" << f2(cx)
       << "\" y2=\"" << f2(Y(g.hi)) << "\" stroke=\"" << stroke << "\"" << dash << "/>\n";
    for (double w : {g.lo, g.hi}) {
      os << "<line x1=\"" << f2(cx - box_w / 3) << "\" y1=\"" << f2(Y(w)) << "\" x2=\""
         << f2(cx + box_w / 3) << "\" y2=\"" << f2(Y(w)) << "\" stroke=\"" << stroke << "\""
         << dash << "/>\n";
    }
    os << "<rect x=\"" << f2(cx - box_w / 2) << "\" y=\"" << f2(Y(g.q3)) << "\" width=\""
       << f2(box_w) << "\" height=\"" << f2(std::max(0.0, Y(g.q1) - Y(g.q3)))
       << "\" fill=\"none\" stroke=\"" << stroke << "\"" << dash << "/>\n";
    os << "<line x1=\"" << f2(cx - box_w / 2) << "\" y1=\"" << f2(Y(g.median)) << "\" x2=\""
       << f2(cx + box_w / 2) << "\" y2=\"" << f2(Y(g.median)) << "\" stroke=\"" << stroke
       << "\"" << dash << "/>\n";
  };

  for (std::size_t i = 0; i < columns.size(); ++i) {
    const double center = kLeft + slot * (static_cast<double>(i) + 0.5);
    draw_glyph(center - box_w * 0.7, columns[i].first, "black", "");
    draw_glyph(center + box_w * 0.7, columns[i].second, "#c03030",
               " stroke-dasharray=\"5,3\"");
    x_tick(os, center, std::to_string(columns[i].n));
  }
  axes(os);
  for (int i = 0; i <= 4; ++i) {
    const double t = tlo + (thi - tlo) * i / 4.0;
    const double v = use_log ? std::pow(10.0, t) : t;
    y_tick(os, sy(t), g4(v));
  }
  axis_titles(os, "n", use_log ? "normalized statistic (log scale)" : "normalized statistic");
  close_document(os);
}

}  // namespace respert
