#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "modlab/config.hpp"
#include "modlab/errors.hpp"
#include "modlab/gram.hpp"
#include "modlab/modulators.hpp"
#include "modlab/report.hpp"
#include "modlab/runner.hpp"
#include "modlab/verify.hpp"

namespace py = pybind11;
using namespace modlab;

namespace {

using Overrides = std::vector<std::string>;

// Model and modulator specs are built from "key=value" strings so the Python
// side uses the same names and validation as config files.
ExperimentConfig with_overrides(const std::string& section, const Overrides& kv) {
  auto c = default_config(ExperimentKind::Conditions);
  for (const auto& s : kv) apply_override(c, section + "." + s);
  return c;
}

DataModelSpec model_spec(const Overrides& kv) {
  auto m = with_overrides("model", kv).model;
  validate(m);
  return m;
}

ModulatorSpec mod_spec(const Overrides& kv) {
  auto m = with_overrides("modulator", kv).modulator;
  validate(m);
  return m;
}

py::object opt(const std::optional<double>& v) { return v ? py::object(py::float_(*v)) : py::none(); }

py::dict row_dict(const ReportRow& r) {
  py::dict d;
  d["experiment"] = r.experiment;
  d["d"] = r.d;
  d["j"] = r.j ? py::object(py::int_(*r.j)) : py::none();
  d["metric"] = r.metric;
  d["estimate"] = r.estimate;
  d["se"] = r.se;
  d["analytic"] = opt(r.analytic);
  d["bound_rhs"] = opt(r.bound_rhs);
  d["pass"] = r.pass ? py::object(py::bool_(*r.pass)) : py::none();
  d["seed"] = r.seed;
  return d;
}

}  // namespace

PYBIND11_MODULE(_modlab, m) {
  m.doc() = "Bindings for the modlab C++ library";
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("version", &library_version);

  m.def(
      "canonical_config", [](const std::string& text) { return serialize_config(parse_config(text)); },
      py::arg("text"));
  m.def(
      "config_hash", [](const std::string& text) { return config_hash(parse_config(text)); }, py::arg("text"));

  m.def(
      "run_config",
      [](const std::string& text, const Overrides& overrides) {
        auto c = parse_config(text);
        for (const auto& s : overrides) apply_override(c, s);
        validate(c);
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run_experiment(c);
        }
        py::list rows;
        for (const auto& x : r.rows) rows.append(row_dict(x));
        py::dict out;
        out["rows"] = rows;
        out["asserted"] = r.asserted;
        out["failed"] = r.failed;
        out["report"] = format_report(r.rows, c.format, report_meta(c));
        out["report_name"] = report_path(c);
        return out;
      },
      py::arg("text"), py::arg("overrides") = Overrides{});

  m.def(
      "moments",
      [](const Overrides& kv, std::size_t d) {
        const auto s = moments(model_spec(kv), d);
        py::dict out;
        out["e_norm2"] = opt(s.e_norm2);
        out["var_norm2"] = opt(s.var_norm2);
        out["e_cross2"] = opt(s.e_cross2);
        out["var_norm2_lower"] = opt(s.var_norm2_lower);
        return out;
      },
      py::arg("model"), py::arg("d"));
  m.def(
      "sample",
      [](const Overrides& kv, std::size_t d, std::uint64_t seed, const std::vector<std::uint64_t>& path) {
        return sample(model_spec(kv), d, RngStream{seed, path});
      },
      py::arg("model"), py::arg("d"), py::arg("seed"), py::arg("path") = std::vector<std::uint64_t>{});

  m.def(
      "psi", [](const Overrides& kv, double s) { return psi(mod_spec(kv), s); }, py::arg("modulator"),
      py::arg("s"));
  m.def(
      "v_inverse_moment", [](const Overrides& kv, int k) { return v_inverse_moment(mod_spec(kv), k); },
      py::arg("modulator"), py::arg("k"));
  m.def(
      "polya_residual",
      [](const Overrides& kv, const std::vector<double>& grid) {
        const auto r = polya_residual(mod_spec(kv), grid);
        return py::make_tuple(r.max_residual, r.argmax_t);
      },
      py::arg("modulator"), py::arg("t_grid"));
  m.def(
      "quant_constant", [](const Overrides& kv, double sigma, int j) { return quant_constant(mod_spec(kv), sigma, j); },
      py::arg("modulator"), py::arg("sigma"), py::arg("j"));

  m.def(
      "gram_rate",
      [](const Overrides& kv, std::size_t d, int j, std::size_t reps, std::uint64_t seed) {
        const auto r = gram_rate(model_spec(kv), d, j, reps, RngStream{seed, {}});
        return py::make_tuple(r.value, r.se, r.exact);
      },
      py::arg("model"), py::arg("d"), py::arg("j"), py::arg("reps") = 10000, py::arg("seed") = 1);
  m.def("wishart_det_invsqrt_exact", &wishart_det_invsqrt_exact, py::arg("d"), py::arg("k"), py::arg("sigma") = 1.0);
  m.def("stable_variance_closed_form", &stable_variance_closed_form, py::arg("alpha"), py::arg("sigma"),
        py::arg("t"));
}
