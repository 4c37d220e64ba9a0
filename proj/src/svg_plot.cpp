#include "lumped_pid/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace lumped_pid {

namespace {

constexpr double kWidth = 800.0;
constexpr double kPanelHeight = 160.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 30.0;
constexpr double kGap = 30.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_svg_plot(std::ostream& os, const SimTrace& trace, const std::vector<std::string>& columns,
                    const std::string& title) {
  const double height = kMarginTop + columns.size() * (kPanelHeight + kGap);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(height)
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) os << "<text x=\"" << num(kWidth / 2) << "\" y=\"18\" text-anchor=\"middle\">" << escape(title) << "</text>\n";
  if (trace.empty()) {
    os << "</svg>\n";
    return;
  }
  const auto t = trace.time();
  const double t0 = t.front();
  const double t1 = t.back() > t0 ? t.back() : t0 + 1.0;
  const double plot_w = kWidth - kMarginLeft - kMarginRight;

  for (std::size_t p = 0; p < columns.size(); ++p) {
    const auto y = trace.column(columns[p]);
    double lo = INFINITY, hi = -INFINITY;
    for (double v : y)
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    if (!std::isfinite(lo)) lo = hi = 0.0;
    if (hi - lo < 1e-300) {
      lo -= 1.0;
      hi += 1.0;
    }
    const double top = kMarginTop + p * (kPanelHeight + kGap);
    auto sx = [&](double tv) { return kMarginLeft + (tv - t0) / (t1 - t0) * plot_w; };
    auto sy = [&](double yv) { return top + (hi - yv) / (hi - lo) * kPanelHeight; };

    os << "<rect x=\"" << num(kMarginLeft) << "\" y=\"" << num(top) << "\" width=\"" << num(plot_w) << "\" height=\""
       << num(kPanelHeight) << "\" fill=\"none\" stroke=\"#888\"/>\n";
    os << "<text x=\"" << num(kMarginLeft - 5) << "\" y=\"" << num(top + 10) << "\" text-anchor=\"end\">" << num(hi)
       << "</text>\n";
    os << "<text x=\"" << num(kMarginLeft - 5) << "\" y=\"" << num(top + kPanelHeight) << "\" text-anchor=\"end\">"
       << num(lo) << "</text>\n";
    os << "<text x=\"" << num(kMarginLeft + 5) << "\" y=\"" << num(top - 4) << "\">" << escape(columns[p])
       << "</text>\n";

    bool open = false;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (!std::isfinite(y[i])) {
        if (open) os << "\"/>\n";
        open = false;
        continue;
      }
      if (!open) {
        os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1\" points=\"";
        open = true;
      }
      os << num(sx(t[i])) << ',' << num(sy(y[i])) << ' ';
    }
    if (open) os << "\"/>\n";
  }
  const double bottom = kMarginTop + columns.size() * (kPanelHeight + kGap) - kGap + 14;
  os << "<text x=\"" << num(kMarginLeft) << "\" y=\"" << num(bottom) << "\">t = " << num(t0) << " s</text>\n";
  os << "<text x=\"" << num(kWidth - kMarginRight) << "\" y=\"" << num(bottom) << "\" text-anchor=\"end\">t = "
     << num(t1) << " s</text>\n";
  os << "</svg>\n";
}

}  // namespace lumped_pid
