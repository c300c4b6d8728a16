#include "portsym/harness.hpp"
#include "portsym/model_io.hpp"

#include <cmath>
#include <cstdio>

namespace portsym {
namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
const char* const kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// Rounds a span up to 1, 2 or 5 times a power of ten.
double nice_step(double span, int ticks) {
  const double raw = span / ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) return m * mag;
  return 10.0 * mag;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<PlotSeries>& series, const std::string& title) {
  int max_task = 1;
  double max_y = 1.0;
  for (const auto& s : series)
    for (const auto& p : s.points) {
      max_task = std::max(max_task, p.task);
      max_y = std::max(max_y, p.cumulative_samples + p.standard_error);
    }
  const double ystep = nice_step(max_y, 5);
  const double ytop = std::ceil(max_y / ystep) * ystep;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto X = [&](double task) { return kLeft + (max_task > 1 ? (task - 1) / (max_task - 1) : 0.5) * pw; };
  auto Y = [&](double v) { return kTop + ph - v / ytop * ph; };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" +
                    fmt(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty())
    svg += "<text x=\"" + fmt(kLeft + pw / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
           escape(title) + "</text>\n";
  for (double v = 0; v <= ytop + 1e-9; v += ystep) {
    svg += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(Y(v)) + "\" x2=\"" + fmt(kLeft + pw) + "\" y2=\"" +
           fmt(Y(v)) + "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + fmt(kLeft - 6) + "\" y=\"" + fmt(Y(v) + 4) + "\" text-anchor=\"end\">" +
           std::to_string(long(std::lround(v))) + "</text>\n";
  }
  for (int t = 1; t <= max_task; ++t)
    svg += "<text x=\"" + fmt(X(t)) + "\" y=\"" + fmt(kTop + ph + 18) + "\" text-anchor=\"middle\">" +
           std::to_string(t) + "</text>\n";
  svg += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" + fmt(pw) + "\" height=\"" + fmt(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + fmt(kLeft + pw / 2) + "\" y=\"" + fmt(kHeight - 10) +
         "\" text-anchor=\"middle\">Number of tasks</text>\n";
  svg += "<text transform=\"translate(16 " + fmt(kTop + ph / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">Cumulative samples</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const std::string colour = kColours[i % std::size(kColours)];
    std::string band, line;
    for (const auto& p : s.points) band += fmt(X(p.task)) + "," + fmt(Y(p.cumulative_samples + p.standard_error)) + " ";
    for (auto it = s.points.rbegin(); it != s.points.rend(); ++it)
      band += fmt(X(it->task)) + "," + fmt(Y(std::max(0.0, it->cumulative_samples - it->standard_error))) + " ";
    for (const auto& p : s.points) line += fmt(X(p.task)) + "," + fmt(Y(p.cumulative_samples)) + " ";
    svg += "<polygon class=\"band\" points=\"" + band + "\" fill=\"" + colour + "\" fill-opacity=\"0.25\" stroke=\"none\"/>\n";
    svg += "<polyline class=\"curve\" points=\"" + line + "\" fill=\"none\" stroke=\"" + colour +
           "\" stroke-width=\"2\"/>\n";
    const double ly = kTop + 20 + 20 * double(i);
    svg += "<line x1=\"" + fmt(kLeft + pw + 12) + "\" y1=\"" + fmt(ly) + "\" x2=\"" + fmt(kLeft + pw + 32) +
           "\" y2=\"" + fmt(ly) + "\" stroke=\"" + colour + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fmt(kLeft + pw + 38) + "\" y=\"" + fmt(ly + 4) + "\">" + escape(s.label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void render_plot(const std::vector<PlotSeries>& series, const std::filesystem::path& path) {
  for (const auto& s : series)
    if (s.points.empty()) throw std::invalid_argument("render_plot: series '" + s.label + "' has no points");
  if (series.empty()) throw std::invalid_argument("render_plot: no series");
  write_text_file(path, render_svg(series));
}

void render_plot(const std::vector<CurvePoint>& points, const std::filesystem::path& path) {
  render_plot(std::vector<PlotSeries>{{"samples", points}}, path);
}

}  // namespace portsym
