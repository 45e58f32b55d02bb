#include "aoa/io.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace aoa::io {

namespace {

[[noreturn]] void parse_error(std::size_t line, std::size_t column, const std::string& what) {
  throw Error(ErrorKind::kUsage,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
}

}  // namespace

MeasurementFile parse_measurements(std::string_view text, int dim, bool degrees) {
  if (dim != 2 && dim != 3) throw Error(ErrorKind::kUsage, "dimension must be 2 or 3");
  const std::size_t fields = dim == 2 ? 3 : 5;
  const double scale = degrees ? std::numbers::pi / 180.0 : 1.0;

  MeasurementFile out;
  out.dim = dim;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    std::vector<double> values;
    std::size_t col = 0;
    bool comment = false;
    while (col < line.size()) {
      if (line[col] == ' ' || line[col] == '\t') {
        ++col;
        continue;
      }
      if (values.empty() && line[col] == '#') {
        comment = true;
        break;
      }
      std::size_t stop = col;
      while (stop < line.size() && line[stop] != ' ' && line[stop] != '\t') ++stop;
      const std::string_view token = line.substr(col, stop - col);
      double v = 0.0;
      const char* first = token.data();
      if (*first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), v);
      if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(v)) {
        parse_error(line_no, col + 1, "expected a finite number, got '" + std::string(token) + "'");
      }
      if (values.size() == fields) {
        parse_error(line_no, col + 1,
                    "too many fields (expected " + std::to_string(fields) + ")");
      }
      values.push_back(v);
      col = stop;
    }
    if (comment || values.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (values.size() != fields) {
      parse_error(line_no, line.size() + 1,
                  "expected " + std::to_string(fields) + " fields, found " +
                      std::to_string(values.size()));
    }
    out.sensors.emplace_back(values.begin(), values.begin() + dim);
    out.meas.azimuth.push_back(values[dim] * scale);
    if (dim == 3) out.meas.elevation.push_back(values[4] * scale);
    if (end == text.size()) break;
  }
  if (out.sensors.size() < 3) {
    throw Error(ErrorKind::kUsage, "measurement file needs at least 3 sensors, found " +
                                       std::to_string(out.sensors.size()));
  }
  return out;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string format_measurements(const MeasurementFile& file) {
  std::ostringstream os;
  os << (file.dim == 2 ? "# x y azimuth\n" : "# x y z azimuth elevation\n");
  for (std::size_t i = 0; i < file.sensors.size(); ++i) {
    for (double c : file.sensors[i]) os << format_double(c) << ' ';
    os << format_double(file.meas.azimuth[i]);
    if (file.dim == 3) os << ' ' << format_double(file.meas.elevation[i]);
    os << '\n';
  }
  return os.str();
}

std::string csv_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_campaign_csv(std::ostream& os, const std::vector<mc::McSummary>& summaries) {
  os << kCampaignHeader << '\n';
  for (const auto& s : summaries) {
    for (const auto& c : s.cells) {
      os << csv_field(c.scenario) << ',' << c.n << ',' << csv_field(mc::to_string(c.estimator))
         << ',' << format_double(c.bias) << ',' << format_double(c.rmse) << ','
         << format_double(c.rcrlb) << ',' << c.runs_completed << ',' << c.runs_failed << ','
         << c.base_seed << '\n';
    }
  }
}

void write_runs_csv(std::ostream& os, const std::vector<mc::McSummary>& summaries) {
  os << "scenario,n,estimator,run,seed,ok,c0,c1,c2,error\n";
  for (const auto& s : summaries) {
    for (const auto& r : s.runs) {
      os << csv_field(s.scenario) << ',' << r.n << ',' << csv_field(mc::to_string(r.estimator))
         << ',' << r.run << ',' << r.seed << ',' << (r.estimate ? 1 : 0);
      for (std::size_t k = 0; k < 3; ++k) {
        os << ',';
        if (r.estimate && k < r.estimate->size()) os << format_double((*r.estimate)[k]);
      }
      os << ',' << csv_field(r.error) << '\n';
    }
  }
}

void write_bench_csv(std::ostream& os, const std::vector<mc::BenchRow>& rows) {
  os << kBenchHeader << '\n';
  for (const auto& r : rows) {
    os << csv_field(r.scenario) << ',' << r.n << ',' << csv_field(mc::to_string(r.estimator)) << ','
       << format_double(r.median_seconds) << ',' << format_double(r.ratio_to_first) << '\n';
  }
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    any = true;
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw Error(ErrorKind::kUsage, "unterminated quoted CSV field");
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace aoa::io
