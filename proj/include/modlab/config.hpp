#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "modlab/datamodels.hpp"
#include "modlab/modulators.hpp"

namespace modlab {

enum class ExperimentKind {
  Conditions,
  DensityBound,
  CdfLipschitz,
  StableCounterexample,
  Polya,
  MatrixNormal,
  WishartOracle,
};

enum class ReportFormat { Csv, Json };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Conditions;
  std::optional<std::uint64_t> seed;
  std::size_t reps = 10000;
  unsigned workers = 1;
  std::string output;  // empty: <kind>.<format>
  ReportFormat format = ReportFormat::Csv;

  DataModelSpec model;
  ModulatorSpec modulator;
  std::vector<std::size_t> schedule;

  int j = 1;
  int k = 2;
  int l = 2;
  double t = 1.0;
  std::optional<std::vector<double>> y_grid;
  std::size_t grid_points = 201;
  std::vector<std::pair<double, double>> pairs;
  std::vector<double> cdf_y;
  double margin = 0.01;
  double t_max = 5.0;
  double t_step = 0.01;
  std::vector<double> polya_t;

  bool operator==(const ExperimentConfig&) const = default;
};

// Parses the sectioned key = value format; throws ConfigError with a line number.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& c);

// Applies "section.key=value".
void apply_override(ExperimentConfig& c, const std::string& assignment);

// Throws ConfigError when the config cannot be run.
void validate(const ExperimentConfig& c);

ExperimentConfig default_config(ExperimentKind kind);

std::string to_string(ExperimentKind k);
ExperimentKind parse_kind(const std::string& s);
std::string to_string(ReportFormat f);
ReportFormat parse_format(const std::string& s);

// FNV-1a over the canonical serialization.
std::uint64_t config_hash(const ExperimentConfig& c);

}  // namespace modlab
