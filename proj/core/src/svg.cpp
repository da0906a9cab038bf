#include "mixest/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mixest::svg {

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string fmt_px(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct LogAxis {
  double lo = 0.0, hi = 1.0;  // log10 range
  double map(double value, double px_lo, double px_hi) const {
    const double t = (std::log10(value) - lo) / (hi - lo);
    return px_lo + t * (px_hi - px_lo);
  }
  std::vector<double> ticks() const {
    std::vector<double> out;
    const int k_lo = static_cast<int>(std::floor(lo));
    const int k_hi = static_cast<int>(std::ceil(hi));
    for (int k = k_lo; k <= k_hi; ++k) {
      const double v = std::pow(10.0, k);
      if (std::log10(v) >= lo - 1e-9 && std::log10(v) <= hi + 1e-9) out.push_back(v);
    }
    if (out.size() < 3) {
      out.clear();
      for (int k = k_lo - 1; k <= k_hi; ++k) {
        for (const double mult : {1.0, 2.0, 5.0}) {
          const double v = mult * std::pow(10.0, k);
          const double lv = std::log10(v);
          if (lv >= lo - 1e-9 && lv <= hi + 1e-9) out.push_back(v);
        }
      }
      std::sort(out.begin(), out.end());
    }
    return out;
  }
};

// Viridis anchors sampled at t = 0, 1/8, ..., 1.
const int kViridis[9][3] = {{68, 1, 84},    {71, 44, 122},  {59, 81, 139},
                            {44, 113, 142}, {33, 144, 141}, {39, 173, 129},
                            {92, 200, 99},  {170, 220, 50}, {253, 231, 37}};

std::string viridis(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const double s = t * 8.0;
  const int i = std::min(static_cast<int>(s), 7);
  const double f = s - i;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                static_cast<int>(std::lround(kViridis[i][0] + f * (kViridis[i + 1][0] - kViridis[i][0]))),
                static_cast<int>(std::lround(kViridis[i][1] + f * (kViridis[i + 1][1] - kViridis[i][1]))),
                static_cast<int>(std::lround(kViridis[i][2] + f * (kViridis[i + 1][2] - kViridis[i][2]))));
  return buf;
}

}  // namespace

std::string render_log_log(const LinePlot& plot) {
  const double ml = 72.0, mr = 24.0, mt = 48.0, mb = 56.0;
  const double px_l = ml, px_r = plot.width - mr;
  const double px_t = mt, px_b = plot.height - mb;

  // Cleaned copies: positive finite points only.
  struct Clean {
    const Series* src;
    std::vector<std::pair<double, double>> pts;
    std::vector<double> band;
    std::string color;
  };
  std::vector<Clean> clean;
  int color_idx = 0;
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = 0.0;
  double y_lo = std::numeric_limits<double>::infinity(), y_hi = 0.0;
  for (const Series& s : plot.series) {
    Clean c;
    c.src = &s;
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      const auto [x, y] = s.points[i];
      if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) continue;
      c.pts.emplace_back(x, y);
      c.band.push_back(i < s.band.size() && std::isfinite(s.band[i])
                           ? std::max(s.band[i], 0.0)
                           : 0.0);
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      const double hi_edge = y + c.band.back();
      const double lo_edge = std::max(y - c.band.back(), y / 10.0);
      y_lo = std::min(y_lo, lo_edge);
      y_hi = std::max(y_hi, hi_edge);
    }
    if (c.pts.empty()) continue;
    c.color = kPalette[color_idx % kPaletteSize];
    ++color_idx;
    clean.push_back(std::move(c));
  }

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot.width
      << "\" height=\"" << plot.height << "\" viewBox=\"0 0 " << plot.width
      << " " << plot.height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  out << "<text x=\"" << plot.width / 2 << "\" y=\"28\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << escape(plot.title)
      << "</text>\n";

  if (clean.empty()) {
    out << "<text x=\"" << plot.width / 2 << "\" y=\"" << plot.height / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << "no positive data</text>\n</svg>\n";
    return out.str();
  }

  LogAxis ax{std::log10(x_lo), std::log10(x_hi)};
  LogAxis ay{std::log10(y_lo), std::log10(y_hi)};
  if (ax.hi - ax.lo < 1e-9) {
    ax.lo -= 0.5;
    ax.hi += 0.5;
  }
  if (ay.hi - ay.lo < 1e-9) {
    ay.lo -= 0.5;
    ay.hi += 0.5;
  }
  const double pad_x = 0.02 * (ax.hi - ax.lo), pad_y = 0.04 * (ay.hi - ay.lo);
  ax.lo -= pad_x;
  ax.hi += pad_x;
  ay.lo -= pad_y;
  ay.hi += pad_y;

  // Grid and ticks.
  for (const double v : ax.ticks()) {
    const double x = ax.map(v, px_l, px_r);
    out << "<line x1=\"" << fmt_px(x) << "\" y1=\"" << fmt_px(px_t) << "\" x2=\""
        << fmt_px(x) << "\" y2=\"" << fmt_px(px_b)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << fmt_px(x) << "\" y=\"" << fmt_px(px_b + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(v) << "</text>\n";
  }
  for (const double v : ay.ticks()) {
    const double y = px_b - (std::log10(v) - ay.lo) / (ay.hi - ay.lo) * (px_b - px_t);
    out << "<line x1=\"" << fmt_px(px_l) << "\" y1=\"" << fmt_px(y) << "\" x2=\""
        << fmt_px(px_r) << "\" y2=\"" << fmt_px(y)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << fmt_px(px_l - 6) << "\" y=\"" << fmt_px(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(v) << "</text>\n";
  }
  out << "<rect x=\"" << fmt_px(px_l) << "\" y=\"" << fmt_px(px_t) << "\" width=\""
      << fmt_px(px_r - px_l) << "\" height=\"" << fmt_px(px_b - px_t)
      << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  out << "<text x=\"" << (px_l + px_r) / 2 << "\" y=\"" << plot.height - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << escape(plot.x_label) << "</text>\n";
  out << "<text x=\"20\" y=\"" << (px_t + px_b) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
      << "transform=\"rotate(-90 20 " << fmt_px((px_t + px_b) / 2) << ")\">"
      << escape(plot.y_label) << "</text>\n";

  const auto map_y = [&](double v) {
    return px_b - (std::log10(v) - ay.lo) / (ay.hi - ay.lo) * (px_b - px_t);
  };

  for (const Clean& c : clean) {
    const bool has_band =
        std::any_of(c.band.begin(), c.band.end(), [](double b) { return b > 0.0; });
    if (has_band) {
      std::ostringstream poly;
      for (std::size_t i = 0; i < c.pts.size(); ++i) {
        poly << fmt_px(ax.map(c.pts[i].first, px_l, px_r)) << ","
             << fmt_px(map_y(c.pts[i].second + c.band[i])) << " ";
      }
      for (std::size_t i = c.pts.size(); i-- > 0;) {
        const double lo_edge =
            std::max(c.pts[i].second - c.band[i], c.pts[i].second / 10.0);
        poly << fmt_px(ax.map(c.pts[i].first, px_l, px_r)) << ","
             << fmt_px(map_y(lo_edge)) << " ";
      }
      out << "<polygon points=\"" << poly.str() << "\" fill=\"" << c.color
          << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
    }
    std::ostringstream line;
    for (const auto& [x, y] : c.pts) {
      line << fmt_px(ax.map(x, px_l, px_r)) << "," << fmt_px(map_y(y)) << " ";
    }
    out << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\""
        << c.color << "\" stroke-width=\"1.8\"";
    if (c.src->dashed) out << " stroke-dasharray=\"7 4\"";
    out << "/>\n";
  }

  // Legend, top-right inside the plot frame.
  double ly = px_t + 16;
  for (const Clean& c : clean) {
    const double lx = px_r - 210;
    out << "<line x1=\"" << fmt_px(lx) << "\" y1=\"" << fmt_px(ly - 4)
        << "\" x2=\"" << fmt_px(lx + 26) << "\" y2=\"" << fmt_px(ly - 4)
        << "\" stroke=\"" << c.color << "\" stroke-width=\"2\"";
    if (c.src->dashed) out << " stroke-dasharray=\"7 4\"";
    out << "/>\n";
    out << "<text x=\"" << fmt_px(lx + 32) << "\" y=\"" << fmt_px(ly)
        << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << escape(c.src->label) << "</text>\n";
    ly += 17;
  }

  out << "</svg>\n";
  return out.str();
}

std::string render_heatmap(const Heatmap& map) {
  if (map.values.size() == 0) throw std::invalid_argument("render_heatmap: empty grid");
  const int rows = static_cast<int>(map.values.rows());
  const int cols = static_cast<int>(map.values.cols());
  const int cell = std::max(map.cell_px, 1);
  const int ml = 16, mt = 40, mb = 16, mr = 16;
  const int width = ml + cols * cell + mr;
  const int height = mt + rows * cell + mb;

  const double vmax = map.values.maxCoeff();
  const double vmin = std::max(map.values.minCoeff(), 0.0);
  const double span = std::max(vmax - vmin, 1e-300);

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << escape(map.title)
      << "</text>\n";
  for (int b = 0; b < rows; ++b) {
    // Row 0 is the bottom of the domain box; SVG y grows downward.
    const int y = mt + (rows - 1 - b) * cell;
    for (int a = 0; a < cols; ++a) {
      const double v = std::max(map.values(b, a), 0.0);
      const double t = std::pow((v - vmin) / span, 0.25);
      out << "<rect x=\"" << ml + a * cell << "\" y=\"" << y << "\" width=\""
          << cell << "\" height=\"" << cell << "\" fill=\"" << viridis(t)
          << "\"/>\n";
    }
  }
  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << cols * cell
      << "\" height=\"" << rows * cell
      << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace mixest::svg
