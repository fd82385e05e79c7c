#include "liegram/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace liegram {

std::string format_number(double x) {
  if (x == 0.0) return "0";  // folds -0
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.12g", x);
  return buf.data();
}

namespace {

std::string xml_escape(const std::string& in) {
  std::string out;
  for (char c : in) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

double round12(double x) {
  if (!std::isfinite(x)) return x;
  return std::strtod(format_number(x).c_str(), nullptr);
}

void write_trace_csv(std::ostream& out, std::span<const ScenarioTrace> traces) {
  out << kTraceHeader << '\n';
  for (const auto& tr : traces) {
    for (const auto& r : tr.rows) {
      out << tr.scenario << ',' << r.t << ',' << format_number(r.log_det_P) << ',' << format_number(r.min_eig_P) << ','
          << format_number(r.min_eig_J) << ',' << r.rank_Wo << ',' << format_number(r.record.temporal) << ','
          << format_number(r.record.spatial) << '\n';
    }
  }
}

std::string render_log_det_svg(std::span<const ScenarioTrace> traces) {
  constexpr double width = 720, height = 440;
  constexpr double left = 70, right = 180, top = 30, bottom = 50;
  constexpr std::array<const char*, 6> colors = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  double tmax = 1, ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
  for (const auto& tr : traces) {
    for (const auto& r : tr.rows) {
      tmax = std::max(tmax, static_cast<double>(r.t));
      ymin = std::min(ymin, r.log_det_P);
      ymax = std::max(ymax, r.log_det_P);
    }
  }
  if (!std::isfinite(ymin)) ymin = 0, ymax = 1;
  if (ymax - ymin < 1e-12) ymin -= 0.5, ymax += 0.5;
  const double pw = width - left - right, ph = height - top - bottom;
  auto sx = [&](double t) { return left + pw * t / tmax; };
  auto sy = [&](double y) { return top + ph * (ymax - y) / (ymax - ymin); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
    << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double y = ymin + (ymax - ymin) * k / 4.0;
    s << "<text x=\"" << left - 6 << "\" y=\"" << format_number(sy(y) + 4) << "\" text-anchor=\"end\">"
      << format_number(round12(std::round(y * 100) / 100)) << "</text>\n";
    const double t = tmax * k / 4.0;
    s << "<text x=\"" << format_number(sx(t)) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
      << format_number(std::round(t)) << "</text>\n";
  }
  s << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">t</text>\n";
  s << "<text x=\"16\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 16 " << top + ph / 2
    << ")\" text-anchor=\"middle\">log det P</text>\n";

  for (std::size_t k = 0; k < traces.size(); ++k) {
    const auto& tr = traces[k];
    const char* color = colors[k % colors.size()];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < tr.rows.size(); ++i) {
      if (i > 0) s << ' ';
      s << format_number(sx(static_cast<double>(tr.rows[i].t))) << ',' << format_number(sy(tr.rows[i].log_det_P));
    }
    s << "\"/>\n";
    const double ly = top + 10 + 18.0 * static_cast<double>(k);
    s << "<line x1=\"" << left + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 40 << "\" y2=\"" << ly
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << left + pw + 46 << "\" y=\"" << ly + 4 << "\">" << xml_escape(tr.scenario) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace liegram
