#include "subdyadic/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace subdyadic::plot {

namespace {

constexpr double kPanelW = 560, kPanelH = 300, kHeatH = 360, kMargin = 60;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

struct Axis {
  double lo, hi;
  bool log;
  double map(double v, double a, double b) const {
    const double t = log ? (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo)) : (v - lo) / (hi - lo);
    return a + t * (b - a);
  }
};

Axis make_axis(const std::vector<const std::vector<double>*>& data, bool log) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto* v : data)
    for (double x : *v) {
      if (!std::isfinite(x) || (log && x <= 0.0)) continue;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  if (!std::isfinite(lo)) lo = log ? 1.0 : 0.0, hi = log ? 10.0 : 1.0;
  if (hi <= lo) {
    const double pad = log ? 2.0 : std::max(1.0, std::abs(lo)) * 0.1;
    lo = log ? lo / pad : lo - pad;
    hi = log ? hi * pad : hi + pad;
  } else if (!log) {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  return {lo, hi, log};
}

void panel(std::string& out, const LinePanel& p, double top) {
  const double x0 = kMargin, x1 = kPanelW - 20, y0 = top + kPanelH - 40, y1 = top + 30;
  std::vector<const std::vector<double>*> xs, ys;
  for (const auto& s : p.series) {
    xs.push_back(&s.x);
    ys.push_back(&s.y);
  }
  const Axis ax = make_axis(xs, p.log_x), ay = make_axis(ys, p.log_y);
  out += "<text x=\"" + num(kPanelW / 2) + "\" y=\"" + num(top + 18) +
         "\" text-anchor=\"middle\" font-size=\"14\">" + esc(p.title) + "</text>\n";
  out += "<rect x=\"" + num(x0) + "\" y=\"" + num(y1) + "\" width=\"" + num(x1 - x0) + "\" height=\"" +
         num(y0 - y1) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = ax.log ? std::pow(10.0, std::log10(ax.lo) + k * (std::log10(ax.hi) - std::log10(ax.lo)) / 4)
                             : ax.lo + k * (ax.hi - ax.lo) / 4;
    const double fy = ay.log ? std::pow(10.0, std::log10(ay.lo) + k * (std::log10(ay.hi) - std::log10(ay.lo)) / 4)
                             : ay.lo + k * (ay.hi - ay.lo) / 4;
    out += "<text x=\"" + num(ax.map(fx, x0, x1)) + "\" y=\"" + num(y0 + 16) +
           "\" text-anchor=\"middle\" font-size=\"10\">" + num(fx) + "</text>\n";
    out += "<text x=\"" + num(x0 - 4) + "\" y=\"" + num(ay.map(fy, y0, y1) + 3) +
           "\" text-anchor=\"end\" font-size=\"10\">" + num(fy) + "</text>\n";
  }
  out += "<text x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(y0 + 32) +
         "\" text-anchor=\"middle\" font-size=\"11\">" + esc(p.xlabel) + "</text>\n";
  out += "<text x=\"14\" y=\"" + num((y0 + y1) / 2) + "\" font-size=\"11\" transform=\"rotate(-90 14 " +
         num((y0 + y1) / 2) + ")\" text-anchor=\"middle\">" + esc(p.ylabel) + "</text>\n";
  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const auto& s = p.series[k];
    const char* color = kColors[k % std::size(kColors)];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if ((ax.log && s.x[i] <= 0) || (ay.log && s.y[i] <= 0)) continue;
      const double px = ax.map(s.x[i], x0, x1), py = ay.map(s.y[i], y0, y1);
      pts += num(px) + "," + num(py) + " ";
      out += "<circle cx=\"" + num(px) + "\" cy=\"" + num(py) + "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
    }
    out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>\n";
    if (k < 12)
      out += "<text x=\"" + num(x1 - 4) + "\" y=\"" + num(y1 + 12 + 12.0 * k) + "\" text-anchor=\"end\" font-size=\"9\" fill=\"" +
             color + "\">" + esc(s.label) + "</text>\n";
  }
}

std::string header(double w, double h) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) +
         "\" height=\"" + num(h) + "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

// Blue (low) to red (high).
std::string ramp(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(40 + 215 * t));
  const int g = static_cast<int>(std::lround(90 + 120 * (1 - std::abs(2 * t - 1))));
  const int b = static_cast<int>(std::lround(255 - 215 * t));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string render(const std::vector<LinePanel>& panels) {
  std::string out = header(kPanelW, kPanelH * std::max<std::size_t>(panels.size(), 1));
  for (std::size_t i = 0; i < panels.size(); ++i) panel(out, panels[i], kPanelH * static_cast<double>(i));
  out += "</svg>\n";
  return out;
}

namespace {

void heatmap(std::string& out, const Heatmap& m, double top) {
  const double W = kPanelW, H = kHeatH;
  const double x0 = kMargin, x1 = W - 90, y0 = top + H - 50, y1 = top + 30;
  out += "<text x=\"" + num(W / 2) + "\" y=\"" + num(top + 18) + "\" text-anchor=\"middle\" font-size=\"14\">" + esc(m.title) + "</text>\n";
  const std::size_t nx = m.x.size(), ny = m.y.size();
  if (nx == 0 || ny == 0 || m.values.size() != nx * ny) return;
  auto edges = [](const std::vector<double>& c) {
    std::vector<double> e(c.size() + 1);
    for (std::size_t i = 1; i < c.size(); ++i) e[i] = 0.5 * (c[i - 1] + c[i]);
    const double h0 = c.size() > 1 ? c[1] - c[0] : 0.1, h1 = c.size() > 1 ? c.back() - c[c.size() - 2] : 0.1;
    e.front() = c.front() - 0.5 * h0;
    e.back() = c.back() + 0.5 * h1;
    return e;
  };
  const auto ex = edges(m.x), ey = edges(m.y);
  const Axis ax{ex.front(), ex.back(), false}, ay{ey.front(), ey.back(), false};
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : m.values)
    if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
  if (!(hi > lo)) hi = lo + 1.0;
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const double v = m.values[j * nx + i];
      if (!std::isfinite(v)) continue;
      const double px = ax.map(ex[i], x0, x1), qx = ax.map(ex[i + 1], x0, x1);
      const double py = ay.map(ey[j + 1], y0, y1), qy = ay.map(ey[j], y0, y1);
      out += "<rect x=\"" + num(px) + "\" y=\"" + num(py) + "\" width=\"" + num(qx - px) + "\" height=\"" +
             num(qy - py) + "\" fill=\"" + ramp((v - lo) / (hi - lo)) + "\"><title>" + num(v) + "</title></rect>\n";
    }
  out += "<rect x=\"" + num(x0) + "\" y=\"" + num(y1) + "\" width=\"" + num(x1 - x0) + "\" height=\"" +
         num(y0 - y1) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (std::size_t i = 0; i < nx; ++i)
    out += "<text x=\"" + num(ax.map(m.x[i], x0, x1)) + "\" y=\"" + num(y0 + 14) +
           "\" text-anchor=\"middle\" font-size=\"10\">" + num(m.x[i]) + "</text>\n";
  for (std::size_t j = 0; j < ny; ++j)
    out += "<text x=\"" + num(x0 - 4) + "\" y=\"" + num(ay.map(m.y[j], y0, y1) + 3) +
           "\" text-anchor=\"end\" font-size=\"10\">" + num(m.y[j]) + "</text>\n";
  out += "<text x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(y0 + 32) + "\" text-anchor=\"middle\" font-size=\"11\">" +
         esc(m.xlabel) + "</text>\n";
  out += "<text x=\"14\" y=\"" + num((y0 + y1) / 2) + "\" font-size=\"11\" transform=\"rotate(-90 14 " +
         num((y0 + y1) / 2) + ")\" text-anchor=\"middle\">" + esc(m.ylabel) + "</text>\n";
  std::string pts;
  for (std::size_t i = 0; i < m.overlay.x.size() && i < m.overlay.y.size(); ++i) {
    const double x = std::clamp(m.overlay.x[i], ax.lo, ax.hi), y = std::clamp(m.overlay.y[i], ay.lo, ay.hi);
    pts += num(ax.map(x, x0, x1)) + "," + num(ay.map(y, y0, y1)) + " ";
  }
  if (!pts.empty())
    out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"black\" stroke-width=\"2\" stroke-dasharray=\"6,3\"/>\n" +
           std::string("<text x=\"") + num(x1 - 4) + "\" y=\"" + num(y1 + 12) +
           "\" text-anchor=\"end\" font-size=\"10\">" + esc(m.overlay.label) + "</text>\n";
  // colour bar
  for (int k = 0; k < 20; ++k) {
    const double t = k / 19.0;
    out += "<rect x=\"" + num(W - 70) + "\" y=\"" + num(y0 - (k + 1) * (y0 - y1) / 20) + "\" width=\"16\" height=\"" +
           num((y0 - y1) / 20 + 0.5) + "\" fill=\"" + ramp(t) + "\"/>\n";
  }
  out += "<text x=\"" + num(W - 50) + "\" y=\"" + num(y0) + "\" font-size=\"10\">" + num(lo) + "</text>\n";
  out += "<text x=\"" + num(W - 50) + "\" y=\"" + num(y1 + 8) + "\" font-size=\"10\">" + num(hi) + "</text>\n";
  out += "<text x=\"" + num(W - 62) + "\" y=\"" + num(y1 - 8) + "\" font-size=\"10\" text-anchor=\"middle\">" +
         esc(m.value_label) + "</text>\n";
}

}  // namespace

std::string render(const Heatmap& map) { return render(std::vector<Heatmap>{map}); }

std::string render(const std::vector<Heatmap>& maps) {
  std::string out = header(kPanelW, kHeatH * std::max<std::size_t>(maps.size(), 1));
  for (std::size_t i = 0; i < maps.size(); ++i) heatmap(out, maps[i], kHeatH * static_cast<double>(i));
  out += "</svg>\n";
  return out;
}

}  // namespace subdyadic::plot
