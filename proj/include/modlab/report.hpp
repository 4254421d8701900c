#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "modlab/config.hpp"

namespace modlab {

struct ReportRow {
  std::string experiment;
  std::size_t d = 0;
  std::optional<int> j;
  std::string metric;
  double estimate = 0.0;
  double se = 0.0;
  std::optional<double> analytic;
  std::optional<double> bound_rhs;
  std::optional<bool> pass;
  std::uint64_t seed = 0;
};

struct ReportMeta {
  std::string version;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

std::string library_version();

// Columns: experiment,d,j,metric,estimate,se,analytic,bound_rhs,pass,seed.
// Numbers carry 17 significant digits; absent values are empty (CSV) or null (JSON).
std::string format_report(const std::vector<ReportRow>& rows, ReportFormat format, const ReportMeta& meta);

// Throws std::invalid_argument on empty rows (nothing is written) and
// std::runtime_error naming the path on IO failure.
void emit_report(const std::vector<ReportRow>& rows, ReportFormat format, const ReportMeta& meta,
                 const std::string& path);

}  // namespace modlab
