#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "modlab/config.hpp"
#include "modlab/errors.hpp"
#include "modlab/report.hpp"
#include "modlab/runner.hpp"

namespace {

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::string out_dir;
  std::string format;
  std::vector<std::string> sets;
  bool print_config = false;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--seed", f.seed, "Root seed (overrides the config)");
  app->add_option("--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
  app->add_option("--out-dir", f.out_dir, "Directory for the report file");
  app->add_option("--format", f.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--set", f.sets, "Override a key, section.key=value (repeatable)");
  app->add_flag("--print-config", f.print_config, "Print the effective config and exit");
}

int execute(modlab::ExperimentConfig cfg, const CommonFlags& f) {
  for (const auto& s : f.sets) modlab::apply_override(cfg, s);
  if (f.seed) cfg.seed = *f.seed;
  if (f.workers) cfg.workers = *f.workers;
  if (!f.format.empty()) cfg.format = modlab::parse_format(f.format);
  if (f.print_config) {
    std::cout << modlab::serialize_config(cfg);
    return 0;
  }
  modlab::validate(cfg);

  const auto result = modlab::run_experiment(cfg);
  const auto path = modlab::report_path(cfg, f.out_dir);
  modlab::emit_report(result.rows, cfg.format, modlab::report_meta(cfg), path);

  for (const auto& r : result.rows)
    if (r.pass && !*r.pass)
      fmt::print(stderr, "FAIL d={} metric={} estimate={:.6g} se={:.3g}\n", r.d, r.metric, r.estimate, r.se);
  fmt::print("{}: {} rows, {} assertions, {} failed -> {}\n", modlab::to_string(cfg.kind), result.rows.size(),
             result.asserted, result.failed, path);
  return result.all_pass() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo laboratory for random linear modulation in high dimension"};
  app.require_subcommand(1);
  app.set_version_flag("--version", modlab::library_version());

  CommonFlags run_flags;
  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  add_common(run, run_flags);

  const std::vector<modlab::ExperimentKind> kinds = {
      modlab::ExperimentKind::Conditions,   modlab::ExperimentKind::DensityBound,
      modlab::ExperimentKind::CdfLipschitz, modlab::ExperimentKind::StableCounterexample,
      modlab::ExperimentKind::Polya,        modlab::ExperimentKind::MatrixNormal,
      modlab::ExperimentKind::WishartOracle};
  std::vector<CommonFlags> kind_flags(kinds.size());
  std::vector<std::string> kind_configs(kinds.size());
  std::vector<CLI::App*> kind_apps;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    auto* sub = app.add_subcommand(modlab::to_string(kinds[i]),
                                   fmt::format("Run a {} experiment from defaults and overrides",
                                               modlab::to_string(kinds[i])));
    sub->add_option("--config", kind_configs[i], "Start from this config file")->check(CLI::ExistingFile);
    add_common(sub, kind_flags[i]);
    kind_apps.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return execute(modlab::load_config(config_path), run_flags);
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      if (!kind_apps[i]->parsed()) continue;
      auto cfg = kind_configs[i].empty() ? modlab::default_config(kinds[i]) : modlab::load_config(kind_configs[i]);
      if (cfg.kind != kinds[i])
        throw modlab::ConfigError(0, fmt::format("config kind '{}' does not match subcommand '{}'",
                                                 modlab::to_string(cfg.kind), modlab::to_string(kinds[i])));
      return execute(cfg, kind_flags[i]);
    }
  } catch (const modlab::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 1;
}
