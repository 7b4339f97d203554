#include "parnms/svg_chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

namespace pnms {

namespace {

constexpr double kWidth = 720, kHeight = 460;
constexpr double kLeft = 80, kRight = 170, kTop = 50, kBottom = 60;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  if (v != 0 && (std::fabs(v) >= 1e5 || std::fabs(v) < 1e-2)) {
    std::snprintf(buf, sizeof buf, "%.1e", v);
  } else {
    std::snprintf(buf, sizeof buf, "%g", v);
  }
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo, hi;
  bool log;
  double px_lo, px_hi;

  double map(double v) const {
    const double a = log ? std::log10(lo) : lo;
    const double b = log ? std::log10(hi) : hi;
    const double t = ((log ? std::log10(v) : v) - a) / (b - a);
    return px_lo + t * (px_hi - px_lo);
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      for (double e = std::floor(std::log10(lo)); e <= std::ceil(std::log10(hi)); e += 1) {
        const double v = std::pow(10.0, e);
        if (v >= lo * (1 - 1e-9) && v <= hi * (1 + 1e-9)) out.push_back(v);
      }
      if (out.size() < 2) out = {lo, hi};
      return out;
    }
    for (int i = 0; i <= 5; ++i) out.push_back(lo + (hi - lo) * i / 5.0);
    return out;
  }
};

Axis make_axis(std::vector<double> values, bool log, double px_lo, double px_hi) {
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  if (log) {
    if (lo == hi) {
      lo /= 2;
      hi *= 2;
    }
  } else {
    if (lo > 0) lo = 0;
    if (lo == hi) hi = lo + 1;
  }
  return {lo, hi, log, px_lo, px_hi};
}

}  // namespace

ChartKind parse_chart_kind(const std::string& name) {
  if (name == "latency_vs_n") return ChartKind::latency_vs_n;
  if (name == "latency_vs_k") return ChartKind::latency_vs_k;
  if (name == "map_reduce_split") return ChartKind::map_reduce_split;
  throw ConfigError("unknown chart kind '" + name + "'");
}

std::string render_line_chart(const ChartSpec& spec, std::span<const Series> series) {
  std::vector<Series> clean;
  std::vector<double> xs, ys;
  for (const auto& s : series) {
    Series c{s.name, {}, s.dashed};
    for (auto [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if ((spec.log_x && x <= 0) || (spec.log_y && y <= 0)) continue;
      c.points.emplace_back(x, y);
      xs.push_back(x);
      ys.push_back(y);
    }
    std::sort(c.points.begin(), c.points.end());
    clean.push_back(std::move(c));
  }
  if (xs.empty()) throw SchemaError("nothing to plot");

  const Axis ax = make_axis(xs, spec.log_x, kLeft, kWidth - kRight);
  const Axis ay = make_axis(ys, spec.log_y, kHeight - kBottom, kTop);

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
         escape(spec.title) + "</text>\n";

  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  svg += "<rect x=\"" + num(x0) + "\" y=\"" + num(y1) + "\" width=\"" + num(x1 - x0) + "\" height=\"" +
         num(y0 - y1) + "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : ax.ticks()) {
    const double px = ax.map(t);
    svg += "<line x1=\"" + num(px) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(px) + "\" y2=\"" + num(y1) +
           "\" stroke=\"#ddd\"/>\n";
    svg += "<text x=\"" + num(px) + "\" y=\"" + num(y0 + 16) + "\" text-anchor=\"middle\">" + label(t) + "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double py = ay.map(t);
    svg += "<line x1=\"" + num(x0) + "\" y1=\"" + num(py) + "\" x2=\"" + num(x1) + "\" y2=\"" + num(py) +
           "\" stroke=\"#ddd\"/>\n";
    svg += "<text x=\"" + num(x0 - 6) + "\" y=\"" + num(py + 4) + "\" text-anchor=\"end\">" + label(t) + "</text>\n";
  }
  svg += "<text x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(kHeight - 18) + "\" text-anchor=\"middle\">" +
         escape(spec.x_label) + "</text>\n";
  svg += "<text transform=\"translate(20," + num((y0 + y1) / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         escape(spec.y_label) + "</text>\n";

  for (std::size_t i = 0; i < clean.size(); ++i) {
    const std::string color = kPalette[i % std::size(kPalette)];
    const std::string dash = clean[i].dashed ? " stroke-dasharray=\"6,4\"" : "";
    std::string pts;
    for (auto [x, y] : clean[i].points) pts += num(ax.map(x)) + "," + num(ay.map(y)) + " ";
    svg += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\"" + dash + " points=\"" + pts +
           "\"/>\n";
    for (auto [x, y] : clean[i].points) {
      svg += "<circle cx=\"" + num(ax.map(x)) + "\" cy=\"" + num(ay.map(y)) + "\" r=\"3\" fill=\"" + color +
             "\"/>\n";
    }
    const double ly = kTop + 10 + 20.0 * static_cast<double>(i);
    svg += "<line x1=\"" + num(x1 + 15) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(x1 + 40) + "\" y2=\"" + num(ly) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"" + dash + "/>\n";
    svg += "<text x=\"" + num(x1 + 46) + "\" y=\"" + num(ly + 4) + "\">" + escape(clean[i].name) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string render_bench_chart(std::span<const BenchRecord> records, ChartKind kind) {
  if (records.empty()) throw SchemaError("benchmark CSV has no records");

  std::map<std::size_t, std::vector<const BenchRecord*>> by_workers;
  for (const auto& r : records) by_workers[r.workers].push_back(&r);

  std::vector<Series> series;
  ChartSpec spec;
  switch (kind) {
    case ChartKind::latency_vs_n:
      spec = {"NMS latency vs detections", "detections (n)", "total latency (ms)", true, true};
      for (const auto& [w, rs] : by_workers) {
        Series s{std::to_string(w) + (w == 1 ? " worker" : " workers"), {}, false};
        for (const auto* r : rs) s.points.emplace_back(static_cast<double>(r->n), r->total_ms);
        series.push_back(std::move(s));
      }
      break;
    case ChartKind::latency_vs_k:
      spec = {"NMS latency vs partition count", "partitions per row (k)", "total latency (ms)", true, false};
      for (const auto& [w, rs] : by_workers) {
        Series s{std::to_string(w) + (w == 1 ? " worker" : " workers"), {}, false};
        for (const auto* r : rs) s.points.emplace_back(static_cast<double>(r->k), r->total_ms);
        series.push_back(std::move(s));
      }
      break;
    case ChartKind::map_reduce_split:
      spec = {"Map / reduce latency split", "detections (n)", "latency (ms)", true, true};
      for (const auto& [w, rs] : by_workers) {
        Series map_s{"map, w=" + std::to_string(w), {}, false};
        Series red_s{"reduce, w=" + std::to_string(w), {}, true};
        for (const auto* r : rs) {
          map_s.points.emplace_back(static_cast<double>(r->n), r->map_ms);
          red_s.points.emplace_back(static_cast<double>(r->n), r->reduce_ms);
        }
        series.push_back(std::move(map_s));
        series.push_back(std::move(red_s));
      }
      break;
  }
  return render_line_chart(spec, series);
}

}  // namespace pnms
