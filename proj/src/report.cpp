#include "modlab/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

namespace modlab {

std::string library_version() { return MODLAB_VERSION; }

namespace {

std::string num(double v, bool json) {
  if (std::isfinite(v)) return fmt::format("{:.17g}", v);
  if (json) return "null";
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) out += fmt::format("\\u{:04x}", c);
        else out += static_cast<char>(c);
    }
  }
  return out + "\"";
}

}  // namespace

std::string format_report(const std::vector<ReportRow>& rows, ReportFormat format, const ReportMeta& meta) {
  std::string out;
  if (format == ReportFormat::Csv) {
    out += fmt::format("# modlab {}\n# config_hash {:016x}\n# seed {}\n# workers {}\n", meta.version,
                       meta.config_hash, meta.seed, meta.workers);
    out += "experiment,d,j,metric,estimate,se,analytic,bound_rhs,pass,seed\n";
    for (const auto& r : rows) {
      out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", csv_field(r.experiment), r.d,
                         r.j ? std::to_string(*r.j) : "", csv_field(r.metric), num(r.estimate, false),
                         num(r.se, false), r.analytic ? num(*r.analytic, false) : "",
                         r.bound_rhs ? num(*r.bound_rhs, false) : "",
                         r.pass ? (*r.pass ? "true" : "false") : "", r.seed);
    }
    return out;
  }
  out += "{\n";
  out += fmt::format("  \"meta\": {{\"version\": {}, \"config_hash\": \"{:016x}\", \"seed\": {}, \"workers\": {}}},\n",
                     json_string(meta.version), meta.config_hash, meta.seed, meta.workers);
  out += "  \"rows\": [\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out += fmt::format(
        "    {{\"experiment\": {}, \"d\": {}, \"j\": {}, \"metric\": {}, \"estimate\": {}, \"se\": {}, "
        "\"analytic\": {}, \"bound_rhs\": {}, \"pass\": {}, \"seed\": {}}}{}\n",
        json_string(r.experiment), r.d, r.j ? std::to_string(*r.j) : "null", json_string(r.metric),
        num(r.estimate, true), num(r.se, true), r.analytic ? num(*r.analytic, true) : "null",
        r.bound_rhs ? num(*r.bound_rhs, true) : "null", r.pass ? (*r.pass ? "true" : "false") : "null", r.seed,
        i + 1 < rows.size() ? "," : "");
  }
  out += "  ]\n}\n";
  return out;
}

void emit_report(const std::vector<ReportRow>& rows, ReportFormat format, const ReportMeta& meta,
                 const std::string& path) {
  if (rows.empty()) throw std::invalid_argument("emit_report: no rows to write");
  const std::string text = format_report(rows, format, meta);
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  if (ec) throw std::runtime_error(fmt::format("cannot create directory for '{}': {}", path, ec.message()));
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
  f << text;
  f.close();
  if (!f) throw std::runtime_error(fmt::format("write to '{}' failed", path));
}

}  // namespace modlab
