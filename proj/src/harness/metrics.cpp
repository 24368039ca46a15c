#include "bt/harness/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "bt/common.hpp"

namespace bt::harness {

const std::vector<std::string>& metrics_columns() {
  static const std::vector<std::string> cols = {
      "env_steps",          "mean_return",     "median_return", "first_goal_step",
      "extra_action_usage", "flight_fraction", "unique_states", "mean_episode_length",
      "intrinsic_error",    "wall_time_s"};
  return cols;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<double> column(const RunRecord& r, std::size_t c) {
  std::vector<double> out;
  out.reserve(r.rows.size());
  for (const auto& row : r.rows) {
    const double vals[] = {static_cast<double>(row.env_steps), row.mean_return,
                           row.median_return, static_cast<double>(row.first_goal_step),
                           row.extra_action_usage, row.flight_fraction, row.unique_states,
                           row.mean_episode_length, row.intrinsic_error, row.wall_time_s};
    out.push_back(vals[c]);
  }
  return out;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
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

}  // namespace

void write_metrics_csv(std::ostream& out, const RunRecord& record) {
  const auto& cols = metrics_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << '\n';
  for (const auto& row : record.rows) {
    out << row.env_steps << ',' << num(row.mean_return) << ',' << num(row.median_return) << ','
        << row.first_goal_step << ',' << num(row.extra_action_usage) << ','
        << num(row.flight_fraction) << ',' << num(row.unique_states) << ','
        << num(row.mean_episode_length) << ',' << num(row.intrinsic_error) << ','
        << num(row.wall_time_s) << '\n';
  }
}

RunRecord read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("metrics.csv is empty");
  RunRecord record;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != metrics_columns().size()) throw ValidationError("metrics.csv: bad row");
    EvalRow r;
    r.env_steps = std::stoll(f[0]);
    r.mean_return = std::stod(f[1]);
    r.median_return = std::stod(f[2]);
    r.first_goal_step = std::stoll(f[3]);
    r.extra_action_usage = std::stod(f[4]);
    r.flight_fraction = std::stod(f[5]);
    r.unique_states = std::stod(f[6]);
    r.mean_episode_length = std::stod(f[7]);
    r.intrinsic_error = std::stod(f[8]);
    r.wall_time_s = std::stod(f[9]);
    record.append(r);
  }
  return record;
}

std::string render_svg(const std::string& title, const std::vector<double>& x,
                       const std::vector<Series>& series) {
  constexpr double kW = 640, kH = 360, kL = 60, kR = 20, kT = 40, kB = 40;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!x.empty()) {
    x0 = *std::min_element(x.begin(), x.end());
    x1 = *std::max_element(x.begin(), x.end());
  }
  bool first = true;
  for (const auto& s : series) {
    for (double v : s.values) {
      if (first) {
        y0 = y1 = v;
        first = false;
      }
      y0 = std::min(y0, v);
      y1 = std::max(y1, v);
    }
  }
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  auto px = [&](double v) { return kL + (v - x0) / (x1 - x0) * (kW - kL - kR); };
  auto py = [&](double v) { return kH - kB - (v - y0) / (y1 - y0) * (kH - kT - kB); };
  char buf[128];
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">"
      << xml_escape(title) << "</text>\n";
  std::snprintf(buf, sizeof buf, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n",
                kL, kH - kB, kW - kR, kH - kB);
  out << buf;
  std::snprintf(buf, sizeof buf, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n",
                kL, kT, kL, kH - kB);
  out << buf;
  out << "<text x=\"" << kL << "\" y=\"" << kH - 12 << "\" font-family=\"sans-serif\" font-size=\"10\">"
      << num(x0) << "</text>\n"
      << "<text x=\"" << kW - kR << "\" y=\"" << kH - 12
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << num(x1)
      << " env_steps</text>\n"
      << "<text x=\"" << kL - 4 << "\" y=\"" << kH - kB
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << num(y0)
      << "</text>\n"
      << "<text x=\"" << kL - 4 << "\" y=\"" << kT + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << num(y1)
      << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    out << "<polyline fill=\"none\" stroke=\"" << kColors[i % 4] << "\" stroke-width=\"1.5\" "
        << "data-series=\"" << xml_escape(s.name) << "\" points=\"";
    for (std::size_t j = 0; j < s.values.size() && j < x.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", j ? " " : "", px(x[j]), py(s.values[j]));
      out << buf;
    }
    out << "\"/>\n";
    out << "<text x=\"" << kW - kR << "\" y=\"" << kT + 12 * i
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\" fill=\""
        << kColors[i % 4] << "\">" << xml_escape(s.name) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void emit_metrics(const RunRecord& record, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
  auto write = [&](const std::string& name, const std::string& content) {
    const fs::path p = fs::path(out_dir) / name;
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write '" + p.string() + "'");
    f << content;
    if (!f) throw IoError("failed writing '" + p.string() + "'");
  };
  std::ostringstream csv;
  write_metrics_csv(csv, record);
  write("metrics.csv", csv.str());

  const auto x = column(record, 0);
  const auto& cols = metrics_columns();
  for (std::size_t c = 1; c < cols.size(); ++c) {
    std::vector<Series> series{{cols[c], column(record, c)}};
    if (cols[c] == "extra_action_usage") {
      series.push_back({"moving_average_20", moving_average(series[0].values, 20)});
    }
    write(cols[c] + ".svg", render_svg(cols[c], x, series));
  }
}

}  // namespace bt::harness
