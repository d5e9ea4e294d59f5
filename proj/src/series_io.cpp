#include "vrabi/series_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "vrabi/errors.hpp"

namespace vrabi {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& raw, const std::string& where) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ValidationError(where + ": '" + s + "' is not a finite number");
  return v;
}

}  // namespace

ExperimentSeries parse_series(std::istream& in, TimeConvention convention, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(source + ": empty file, expected header t_us,p_g[,sigma]");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM
  const auto head = split(trim(line));
  std::vector<std::string> names;
  for (const auto& h : head) names.push_back(trim(h));
  const bool with_sigma = names == std::vector<std::string>{"t_us", "p_g", "sigma"};
  if (!with_sigma && names != std::vector<std::string>{"t_us", "p_g"})
    throw ValidationError(source + ": row 1: missing header, expected t_us,p_g[,sigma] but found '" + trim(line) + "'");

  ExperimentSeries series;
  series.convention = convention;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const std::string where = source + ": row " + std::to_string(row);
    const auto cells = split(line);
    if (cells.size() != names.size())
      throw ValidationError(where + ": expected " + std::to_string(names.size()) + " columns, found " +
                            std::to_string(cells.size()));
    ExperimentPoint p{parse_cell(cells[0], where), parse_cell(cells[1], where),
                      with_sigma ? parse_cell(cells[2], where) : 0.0};
    if (p.t_us < 0.0) throw ValidationError(where + ": negative time");
    if (!series.points.empty() && !(p.t_us > series.points.back().t_us))
      throw ValidationError(where + ": times must be strictly ascending");
    if (p.p_g < 0.0 || p.p_g > 1.0) throw ValidationError(where + ": p_g = " + trim(cells[1]) + " lies outside [0,1]");
    if (p.sigma < 0.0) throw ValidationError(where + ": sigma must be >= 0");
    series.points.push_back(p);
  }
  if (series.points.empty()) throw ValidationError(source + ": no data rows");
  return series;
}

ExperimentSeries ingest_series(const std::filesystem::path& path, TimeConvention convention) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return parse_series(in, convention, path.string());
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit_series(std::ostream& out, const ExperimentSeries& series) {
  const bool sigma = std::any_of(series.points.begin(), series.points.end(),
                                 [](const ExperimentPoint& p) { return p.sigma != 0.0; });
  CsvWriter w(out, sigma ? std::vector<std::string>{"t_us", "p_g", "sigma"} : std::vector<std::string>{"t_us", "p_g"});
  for (const auto& p : series.points)
    w.row(sigma ? std::vector<double>{p.t_us, p.p_g, p.sigma} : std::vector<double>{p.t_us, p.p_g});
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) { row({}, values); }

void CsvWriter::row(const std::vector<std::string>& labels, const std::vector<double>& values) {
  if (labels.size() + values.size() != columns_) throw std::logic_error("CsvWriter: column count mismatch");
  bool first = true;
  for (const auto& l : labels) {
    out_ << (first ? "" : ",") << l;
    first = false;
  }
  for (double v : values) {
    out_ << (first ? "" : ",") << format_number(v);
    first = false;
  }
  out_ << '\n';
}

}  // namespace vrabi
