#pragma once

// Dependency-free SVG 1.1 charts: line chart, scatter panels, heatmap.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "simrag/error.hpp"

namespace simrag::svg {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape_text(std::string_view s) {
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

class Document {
 public:
  Document(double width, double height) : width_(width), height_(height) {}

  void rect(double x, double y, double w, double h, std::string_view fill,
            std::string_view extra = {}) {
    body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
             "\" height=\"" + num(h) + "\" fill=\"" + std::string(fill) + "\"";
    if (!extra.empty()) body_ += " " + std::string(extra);
    body_ += "/>\n";
  }

  void line(double x1, double y1, double x2, double y2, std::string_view stroke,
            std::string_view extra = {}) {
    body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
             num(y2) + "\" stroke=\"" + std::string(stroke) + "\"";
    if (!extra.empty()) body_ += " " + std::string(extra);
    body_ += "/>\n";
  }

  void circle(double cx, double cy, double r, std::string_view fill, std::string_view cls) {
    body_ += "<circle class=\"" + std::string(cls) + "\" cx=\"" + num(cx) + "\" cy=\"" + num(cy) +
             "\" r=\"" + num(r) + "\" fill=\"" + std::string(fill) + "\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, std::string_view stroke) {
    if (pts.size() < 2) return;
    body_ += "<polyline fill=\"none\" stroke=\"" + std::string(stroke) + "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) body_ += ' ';
      body_ += num(pts[i].first) + "," + num(pts[i].second);
    }
    body_ += "\"/>\n";
  }

  void text(double x, double y, std::string_view content, double size = 12,
            std::string_view anchor = "middle", std::string_view extra = {}) {
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + num(size) +
             "\" text-anchor=\"" + std::string(anchor) + "\" font-family=\"sans-serif\"";
    if (!extra.empty()) body_ += " " + std::string(extra);
    body_ += ">" + escape_text(content) + "</text>\n";
  }

  std::string str() const {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           num(width_) + "\" height=\"" + num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " +
           num(height_) + "\">\n" + body_ + "</svg>\n";
  }

 private:
  double width_, height_;
  std::string body_;
};

/// Linear map from data range to pixel range.
struct Axis {
  double lo, hi, px_lo, px_hi;
  double operator()(double v) const {
    if (hi == lo) return (px_lo + px_hi) / 2;
    return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
  }
};

struct LinePoint {
  double x;
  std::optional<double> y;  ///< empty for a failed cell
};

/// One series of points, failed points drawn as gaps. y axis is fixed to
/// the correlation range of the data, padded and capped at 1.
inline std::string line_chart(const std::vector<LinePoint>& points, std::string_view title,
                              std::string_view x_label, std::string_view y_label) {
  if (points.empty()) throw Error(ErrorCategory::data, "line chart needs at least one point");
  const double W = 640, H = 420, L = 70, R = 20, T = 40, B = 60;
  double xmin = points.front().x, xmax = points.front().x;
  double ymin = 1.0, ymax = 0.0;
  for (const auto& p : points) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    if (p.y) {
      ymin = std::min(ymin, *p.y);
      ymax = std::max(ymax, *p.y);
    }
  }
  if (ymin > ymax) ymin = 0, ymax = 1;
  ymin = std::floor(ymin * 10 - 0.5) / 10;
  ymax = std::min(1.0, std::ceil(ymax * 10 + 0.5) / 10);
  if (ymin >= ymax) ymin = ymax - 0.1;
  if (xmin == xmax) xmin -= 0.5, xmax += 0.5;

  Axis ax{xmin, xmax, L, W - R};
  Axis ay{ymin, ymax, H - B, T};
  Document d(W, H);
  d.rect(0, 0, W, H, "white");
  d.text(W / 2, 24, title, 15);
  d.line(L, H - B, W - R, H - B, "black");
  d.line(L, T, L, H - B, "black");
  for (int i = 0; i <= 5; ++i) {
    const double yv = ymin + (ymax - ymin) * i / 5;
    d.line(L - 4, ay(yv), W - R, ay(yv), "#dddddd");
    d.text(L - 8, ay(yv) + 4, num(yv), 10, "end");
  }
  for (const auto& p : points) d.text(ax(p.x), H - B + 16, num(p.x), 10);
  d.text(W / 2, H - 16, x_label, 12);
  d.text(18, H / 2, y_label, 12, "middle", "transform=\"rotate(-90 18 " + num(H / 2) + ")\"");

  std::vector<std::pair<double, double>> run;
  for (const auto& p : points) {
    if (!p.y) {
      d.polyline(run, "#1f77b4");
      run.clear();
      continue;
    }
    run.emplace_back(ax(p.x), ay(*p.y));
  }
  d.polyline(run, "#1f77b4");
  for (const auto& p : points) {
    if (p.y) d.circle(ax(p.x), ay(*p.y), 4, "#1f77b4", "point");
  }
  return d.str();
}

struct ScatterPanel {
  std::string title;
  std::vector<double> x;  ///< reference scores
  std::vector<double> y;  ///< model scores
};

/// Panels laid out in rows of up to four, both axes spanning [0, 4], with the
/// identity line drawn dashed.
inline std::string scatter_panels(const std::vector<ScatterPanel>& panels, std::string_view title) {
  if (panels.empty()) throw Error(ErrorCategory::data, "scatter plot needs at least one panel");
  const double P = 220, pad = 40, top = 40;
  const std::size_t cols = std::min<std::size_t>(4, panels.size());
  const std::size_t rows = (panels.size() + cols - 1) / cols;
  const double W = cols * (P + pad) + pad, H = top + rows * (P + pad + 20) + pad;
  Document d(W, H);
  d.rect(0, 0, W, H, "white");
  d.text(W / 2, 24, title, 15);
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const auto& p = panels[i];
    const double ox = pad + static_cast<double>(i % cols) * (P + pad);
    const double oy = top + 20 + static_cast<double>(i / cols) * (P + pad + 20);
    Axis ax{0, 4, ox, ox + P}, ay{0, 4, oy + P, oy};
    d.rect(ox, oy, P, P, "none", "stroke=\"black\" class=\"panel\"");
    d.line(ax(0), ay(0), ax(4), ay(4), "#888888", "stroke-dasharray=\"4 3\"");
    for (int t = 0; t <= 4; ++t) {
      d.text(ax(t), oy + P + 14, std::to_string(t), 9);
      d.text(ox - 6, ay(t) + 3, std::to_string(t), 9, "end");
    }
    d.text(ox + P / 2, oy - 6, p.title, 11);
    for (std::size_t j = 0; j < std::min(p.x.size(), p.y.size()); ++j) {
      d.circle(ax(p.x[j]), ay(p.y[j]), 3, "#d62728", "point");
    }
  }
  return d.str();
}

/// White-to-blue ramp over r in [-1, 1].
inline std::string heat_colour(double r) {
  const double t = std::clamp((r + 1.0) / 2.0, 0.0, 1.0);
  const int red = static_cast<int>(std::lround(255 * (1 - t) + 20 * t));
  const int green = static_cast<int>(std::lround(255 * (1 - t) + 90 * t));
  const int blue = static_cast<int>(std::lround(255 * (1 - t) + 160 * t));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", red, green, blue);
  return buf;
}

/// values[row][col]; empty optional marks a failed cell.
inline std::string heatmap(const std::vector<std::string>& row_labels,
                           const std::vector<std::string>& col_labels,
                           const std::vector<std::vector<std::optional<double>>>& values,
                           std::string_view title, std::string_view row_axis,
                           std::string_view col_axis) {
  if (values.empty() || col_labels.empty()) {
    throw Error(ErrorCategory::data, "heatmap needs at least one cell");
  }
  const double C = 56, Rh = 30, L = 90, T = 50;
  const double W = L + C * col_labels.size() + 30, H = T + Rh * values.size() + 60;
  Document d(W, H);
  d.rect(0, 0, W, H, "white");
  d.text(W / 2, 24, title, 15);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double y = T + Rh * i;
    d.text(L - 8, y + Rh / 2 + 4, row_labels[i], 10, "end");
    for (std::size_t j = 0; j < values[i].size(); ++j) {
      const double x = L + C * j;
      if (values[i][j]) {
        const double r = *values[i][j];
        d.rect(x, y, C, Rh, heat_colour(r), "class=\"cell\" stroke=\"white\"");
        d.text(x + C / 2, y + Rh / 2 + 4, num(r), 10, "middle",
               r > 0.3 ? "fill=\"white\"" : "fill=\"black\"");
      } else {
        d.rect(x, y, C, Rh, "#bbbbbb", "class=\"cell failed\" stroke=\"white\"");
        d.text(x + C / 2, y + Rh / 2 + 4, "failed", 9);
      }
    }
  }
  for (std::size_t j = 0; j < col_labels.size(); ++j) {
    d.text(L + C * j + C / 2, T + Rh * values.size() + 16, col_labels[j], 10);
  }
  d.text(L + C * col_labels.size() / 2, H - 14, col_axis, 12);
  d.text(16, T + Rh * values.size() / 2, row_axis, 12, "middle",
         "transform=\"rotate(-90 16 " + num(T + Rh * values.size() / 2) + ")\"");
  return d.str();
}

}  // namespace simrag::svg
