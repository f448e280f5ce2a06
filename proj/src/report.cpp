#include "p2stc/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "p2stc/version.hpp"

namespace p2stc {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_fixed(double v, int digits = 2) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("csv: bad number '" + s + "'");
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  std::size_t pos = 0;
  const auto v = std::stoull(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("csv: bad count '" + s + "'");
  return v;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::vector<CsvRow> to_rows(const SimResult& result) {
  std::vector<CsvRow> rows;
  for (const auto& p : result.points) {
    const auto ci = p.ber_ci();
    rows.push_back(CsvRow{result.id, result.beta_label, p.eb_n0_db, p.counts.frames, p.counts.bit_errors,
                          p.counts.frame_errors, p.ber(), p.fer(), ci.low, ci.high});
  }
  return rows;
}

std::string write_csv(const std::vector<CsvRow>& rows) {
  std::string out(kCsvHeader);
  out.push_back('\n');
  for (const auto& r : rows) {
    if (r.config_id.find_first_of(",\n") != std::string::npos)
      throw std::invalid_argument("csv: config-id may not contain ',' or newlines");
    out += r.config_id + ',' + r.beta + ',' + fmt_double(r.eb_n0_db) + ',' + std::to_string(r.frames) + ',' +
           std::to_string(r.bit_errors) + ',' + std::to_string(r.frame_errors) + ',' + fmt_double(r.ber) + ',' +
           fmt_double(r.fer) + ',' + fmt_double(r.ci_low) + ',' + fmt_double(r.ci_high) + '\n';
  }
  return out;
}

std::vector<CsvRow> parse_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw std::invalid_argument("csv: missing or unexpected header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 10) throw std::invalid_argument("csv: expected 10 fields, got " + std::to_string(f.size()));
    rows.push_back(CsvRow{f[0], f[1], to_double(f[2]), to_u64(f[3]), to_u64(f[4]), to_u64(f[5]), to_double(f[6]),
                          to_double(f[7]), to_double(f[8]), to_double(f[9])});
  }
  return rows;
}

std::string render_svg(const std::vector<CsvRow>& rows) {
  constexpr double kW = 640, kH = 480, kLeft = 70, kRight = 160, kTop = 20, kBottom = 50;
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;

  // Series keep first-appearance order.
  std::vector<std::string> ids;
  std::map<std::string, std::vector<const CsvRow*>> series;
  double xmin = 0, xmax = 1, ymin_exp = -6;
  bool have_x = false;
  double min_pos = 1.0;
  for (const auto& r : rows) {
    if (!series.count(r.config_id)) ids.push_back(r.config_id);
    series[r.config_id].push_back(&r);
    if (!have_x) {
      xmin = xmax = r.eb_n0_db;
      have_x = true;
    }
    xmin = std::min(xmin, r.eb_n0_db);
    xmax = std::max(xmax, r.eb_n0_db);
    if (r.ber > 0) min_pos = std::min(min_pos, r.ber);
    if (r.fer > 0) min_pos = std::min(min_pos, r.fer);
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (min_pos < 1.0) ymin_exp = std::floor(std::log10(min_pos));
  if (ymin_exp > -1) ymin_exp = -1;

  auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return kTop + (std::log10(y) / ymin_exp) * ph; };

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\" viewBox=\"0 0 "
     << kW << ' ' << kH << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int e = 0; e >= static_cast<int>(ymin_exp); --e) {
    const double y = sy(std::pow(10.0, e));
    os << "<line x1=\"" << kLeft << "\" y1=\"" << fmt_fixed(y) << "\" x2=\"" << kLeft + pw << "\" y2=\"" << fmt_fixed(y)
       << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt_fixed(y + 4) << "\" font-size=\"11\" text-anchor=\"end\">1e"
       << e << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double x = xmin + (xmax - xmin) * k / 4.0;
    os << "<text x=\"" << fmt_fixed(sx(x)) << "\" y=\"" << kTop + ph + 16 << "\" font-size=\"11\" text-anchor=\"middle\">"
       << fmt_fixed(x, 1) << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 12 << "\" font-size=\"12\" text-anchor=\"middle\">Eb/N0 (dB)</text>\n";
  os << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << kTop + ph / 2 << ")\">BER (solid) / FER (dashed)</text>\n";

  for (std::size_t k = 0; k < ids.size(); ++k) {
    const char* color = kColors[k % (sizeof kColors / sizeof *kColors)];
    for (int which = 0; which < 2; ++which) {
      std::string pts;
      for (const auto* r : series[ids[k]]) {
        const double v = which == 0 ? r->ber : r->fer;
        if (v <= 0) continue;
        if (!pts.empty()) pts.push_back(' ');
        pts += fmt_fixed(sx(r->eb_n0_db)) + ',' + fmt_fixed(sy(v));
      }
      if (pts.empty()) continue;
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
         << (which == 1 ? " stroke-dasharray=\"5,3\"" : "") << " points=\"" << pts << "\"/>\n";
    }
    const double ly = kTop + 14 + 18.0 * static_cast<double>(k);
    os << "<line x1=\"" << kLeft + pw + 10 << "\" y1=\"" << fmt_fixed(ly) << "\" x2=\"" << kLeft + pw + 30 << "\" y2=\""
       << fmt_fixed(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << kLeft + pw + 34 << "\" y=\"" << fmt_fixed(ly + 4) << "\" font-size=\"11\">"
       << xml_escape(ids[k]) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << contents;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void emit_outputs(const std::vector<SimResult>& results, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<CsvRow> rows;
  for (const auto& r : results) {
    auto part = to_rows(r);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  write_file(out_dir / "results.csv", write_csv(rows));
  write_file(out_dir / "plot.svg", render_svg(rows));

  nlohmann::json meta;
  meta["version"] = kVersion;
  meta["scenarios"] = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json m;
    m["id"] = r.id;
    m["seed"] = r.seed;
    m["scenario_hash"] = r.scenario_hash;
    m["wall_seconds"] = r.wall_seconds;
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : r.points)
      pts.push_back({{"eb_n0_db", p.eb_n0_db}, {"frames", p.counts.frames},
                     {"stop", p.stopped_on_errors ? "min_frame_errors" : "max_frames"}});
    m["points"] = std::move(pts);
    meta["scenarios"].push_back(std::move(m));
  }
  write_file(out_dir / "metadata.json", meta.dump(2) + "\n");
}

}  // namespace p2stc
