#include "harness/svg_chart.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <map>

namespace mmrev::harness {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 480;
constexpr double kLeft = 70;
constexpr double kRight = 160;
constexpr double kTop = 40;
constexpr double kBottom = 60;

const char* color_for(policies::PolicyId p) {
  switch (p) {
    case policies::PolicyId::kOptWait:
      return "#1f77b4";
    case policies::PolicyId::kRl:
      return "#d62728";
    case policies::PolicyId::kMapRl:
      return "#2ca02c";
    case policies::PolicyId::kMapWait:
      return "#ff7f0e";
  }
  return "#000000";
}

struct Scale {
  double lo;
  double hi;
  double px_lo;
  double px_hi;
  double operator()(double v) const {
    return hi == lo ? 0.5 * (px_lo + px_hi) : px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
  }
};

std::string polyline(const std::vector<std::pair<double, double>>& pts, const Scale& x,
                     const Scale& y) {
  std::string out;
  for (const auto& [a, b] : pts) out += fmt::format("{:.2f},{:.2f} ", x(a), y(b));
  return out;
}

}  // namespace

std::string render_svg(const ExperimentSpec& spec, const SweepResult& result) {
  double y_lo = std::numeric_limits<double>::infinity();
  double y_hi = -y_lo;
  std::map<policies::PolicyId, std::vector<std::pair<double, double>>> series;
  std::map<double, double> optimum;
  for (const SweepRow& r : result.rows) {
    series[r.policy].emplace_back(r.value, r.revenue_per_job);
    optimum[r.value] = r.theta_star;
    y_lo = std::min({y_lo, r.revenue_per_job, r.theta_star});
    y_hi = std::max({y_hi, r.revenue_per_job, r.theta_star});
  }
  if (!std::isfinite(y_lo)) {
    y_lo = 0.0;
    y_hi = 1.0;
  }
  const double pad = 0.05 * std::max(1e-9, y_hi - y_lo);
  const Scale x{spec.grid.front(), spec.grid.back(), kLeft, kWidth - kRight};
  const Scale y{y_lo - pad, y_hi + pad, kHeight - kBottom, kTop};

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      kWidth, kHeight);
  svg += fmt::format(
      "<text x=\"{:.1f}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      "Revenue per job vs {} (alpha={}, beta={})</text>\n",
      0.5 * (kLeft + kWidth - kRight), to_string(spec.variable), spec.base.alpha(),
      spec.base.beta());

  // axes and ticks
  svg += fmt::format(
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n"
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{3}\" stroke=\"black\"/>\n",
      kLeft, kHeight - kBottom, kWidth - kRight, kTop);
  for (int k = 0; k <= 5; ++k) {
    const double xv = x.lo + (x.hi - x.lo) * k / 5.0;
    const double yv = y.lo + (y.hi - y.lo) * k / 5.0;
    svg += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.3g}</text>\n", x(xv),
        kHeight - kBottom + 18, xv);
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.3g}</text>\n",
                       kLeft - 6, y(yv) + 4, yv);
    svg += fmt::format(
        "<line x1=\"{0}\" y1=\"{1:.1f}\" x2=\"{2}\" y2=\"{1:.1f}\" stroke=\"#dddddd\"/>\n", kLeft,
        y(yv), kWidth - kRight);
  }
  svg += fmt::format(
      "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n"
      "<text x=\"18\" y=\"{:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1f})\">"
      "revenue per job</text>\n",
      0.5 * (kLeft + kWidth - kRight), kHeight - 18, to_string(spec.variable),
      0.5 * (kTop + kHeight - kBottom), 0.5 * (kTop + kHeight - kBottom));

  std::vector<std::pair<double, double>> opt(optimum.begin(), optimum.end());
  svg += fmt::format(
      "<polyline fill=\"none\" stroke=\"black\" stroke-dasharray=\"6,4\" points=\"{}\"/>\n",
      polyline(opt, x, y));

  double legend_y = kTop + 10;
  for (policies::PolicyId p : spec.policies) {
    const auto it = series.find(p);
    if (it == series.end()) continue;
    const char* c = color_for(p);
    svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n",
                       c, polyline(it->second, x, y));
    for (const auto& [a, b] : it->second) {
      svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", x(a), y(b),
                         c);
    }
    svg += fmt::format(
        "<line x1=\"{0}\" y1=\"{1:.1f}\" x2=\"{2}\" y2=\"{1:.1f}\" stroke=\"{3}\" "
        "stroke-width=\"2\"/><text x=\"{4}\" y=\"{5:.1f}\">{6}</text>\n",
        kWidth - kRight + 12, legend_y, kWidth - kRight + 36, c, kWidth - kRight + 42,
        legend_y + 4, policies::to_string(p));
    legend_y += 18;
  }
  svg += fmt::format(
      "<line x1=\"{0}\" y1=\"{1:.1f}\" x2=\"{2}\" y2=\"{1:.1f}\" stroke=\"black\" "
      "stroke-dasharray=\"6,4\"/><text x=\"{3}\" y=\"{4:.1f}\">theta* (analytical)</text>\n",
      kWidth - kRight + 12, legend_y, kWidth - kRight + 36, kWidth - kRight + 42, legend_y + 4);
  svg += "</svg>\n";
  return svg;
}

}  // namespace mmrev::harness
