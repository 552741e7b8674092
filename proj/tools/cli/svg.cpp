#include "svg.hpp"

#include <algorithm>
#include <cstdio>

namespace physattn::cli {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 50.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (const char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string header(const std::string& title) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n" +
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + "<text x=\"" + num(kWidth / 2) +
         "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" + escape(title) +
         "</text>\n";
}

std::string text(double x, double y, const std::string& s, const char* anchor = "middle") {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor +
         "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(s) + "</text>\n";
}

std::string line(double x1, double y1, double x2, double y2) {
  return "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
         "\" stroke=\"black\"/>\n";
}

}  // namespace

std::string line_plot(const std::string& title, const std::string& x_label, const std::vector<double>& x,
                      const std::vector<Series>& series) {
  std::string out = header(title);
  const double left = kMargin;
  const double right = kWidth - 120.0;
  const double top = kMargin;
  const double bottom = kHeight - kMargin;
  out += line(left, bottom, right, bottom);
  out += line(left, top, left, bottom);
  out += text((left + right) / 2, kHeight - 12, x_label);
  out += text(left - 8, bottom + 4, "0", "end");
  out += text(left - 8, top + 4, "1", "end");

  double x_lo = x.empty() ? 0.0 : *std::min_element(x.begin(), x.end());
  double x_hi = x.empty() ? 1.0 : *std::max_element(x.begin(), x.end());
  if (x_hi == x_lo) {
    x_lo -= 0.5;
    x_hi += 0.5;
  }
  auto px = [&](double v) { return left + (v - x_lo) / (x_hi - x_lo) * (right - left); };
  auto py = [&](double v) { return bottom - v * (bottom - top); };
  for (const double v : x) {
    out += line(px(v), bottom, px(v), bottom + 4);
    out += text(px(v), bottom + 16, num(v));
  }

  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    const auto [lo_it, hi_it] = std::minmax_element(s.y.begin(), s.y.end());
    const double lo = s.y.empty() ? 0.0 : *lo_it;
    const double hi = s.y.empty() ? 0.0 : *hi_it;
    std::string points;
    for (std::size_t i = 0; i < s.y.size() && i < x.size(); ++i) {
      const double norm = hi > lo ? (s.y[i] - lo) / (hi - lo) : 0.5;
      if (!points.empty()) points += ' ';
      points += num(px(x[i])) + "," + num(py(norm));
    }
    out += "<polyline data-series=\"" + escape(s.name) + "\" fill=\"none\" stroke=\"" + escape(s.color) +
           "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
    const double ly = top + 16.0 * static_cast<double>(k);
    out += "<rect x=\"" + num(right + 16) + "\" y=\"" + num(ly - 8) + "\" width=\"10\" height=\"10\" fill=\"" +
           escape(s.color) + "\"/>\n";
    out += text(right + 32, ly + 1, s.name, "start");
  }
  out += "</svg>\n";
  return out;
}

std::string bar_chart(const std::string& title, const std::vector<std::string>& panels,
                      const std::vector<BarGroup>& groups) {
  std::string out = header(title);
  if (panels.empty()) return out + "</svg>\n";
  const double panel_width = (kWidth - kMargin) / static_cast<double>(panels.size());
  const double top = kMargin;
  const double bottom = kHeight - kMargin;

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const double left = kMargin / 2 + panel_width * static_cast<double>(p) + 10.0;
    const double right = left + panel_width - 20.0;
    out += line(left, bottom, right, bottom);
    out += text((left + right) / 2, top - 8, panels[p]);

    double peak = 0.0;
    for (const BarGroup& g : groups) {
      if (p < g.values.size() && g.values[p]) peak = std::max(peak, *g.values[p]);
    }
    const double slot = groups.empty() ? 0.0 : (right - left) / static_cast<double>(groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i) {
      const double cx = left + slot * (static_cast<double>(i) + 0.5);
      out += text(cx, bottom + 14, groups[i].label);
      const auto& value = p < groups[i].values.size() ? groups[i].values[p] : std::nullopt;
      if (!value) {
        out += text(cx, bottom - 6, "diverged");
        continue;
      }
      const double h = peak > 0.0 ? *value / peak * (bottom - top - 20.0) : 0.0;
      out += "<rect data-group=\"" + escape(groups[i].label) + "\" x=\"" + num(cx - slot * 0.35) + "\" y=\"" +
             num(bottom - h) + "\" width=\"" + num(slot * 0.7) + "\" height=\"" + num(h) +
             "\" fill=\"steelblue\"/>\n";
      out += text(cx, bottom - h - 4, num(*value));
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace physattn::cli
