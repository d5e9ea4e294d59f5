#pragma once

// CSV boundary: `t_us,p_g[,sigma]` in, tidy columns out. Numbers are written
// with 17 significant digits so that a read-back is exact.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "vrabi/fitting.hpp"

namespace vrabi {

/// `source` prefixes error messages, e.g. the file name.
ExperimentSeries parse_series(std::istream& in, TimeConvention convention, const std::string& source = "<input>");
ExperimentSeries ingest_series(const std::filesystem::path& path, TimeConvention convention);

/// Writes the header and one row per point; the sigma column appears only when
/// some sigma is nonzero.
void emit_series(std::ostream& out, const ExperimentSeries& series);

std::string format_number(double v);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  /// Leading text cells followed by numbers.
  void row(const std::vector<std::string>& labels, const std::vector<double>& values);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

}  // namespace vrabi
