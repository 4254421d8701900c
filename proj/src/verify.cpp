#include "modlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

namespace modlab {

void ConvergenceTrace::sort() {
  std::stable_sort(rows.begin(), rows.end(), [](const TraceRow& a, const TraceRow& b) { return a.d < b.d; });
}

bool ConvergenceTrace::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const TraceRow& r) { return r.pass.value_or(true); });
}

namespace {

bool within(double est, double se, double analytic, double margin = 0.0) {
  return std::abs(est - analytic) <= 3.0 * se + margin + 1e-12 * std::max(1.0, std::abs(analytic));
}

double log_beta(double a, double b) { return log_gamma(a) + log_gamma(b) - log_gamma(a + b); }

}  // namespace

std::optional<double> det_invsqrt_exact(const DataModelSpec& model, std::size_t d, int k) {
  if (k < 1) return std::nullopt;
  if (model.family == DataFamily::GaussianProfile && model.profile == Profile::Isotropic &&
      d > static_cast<std::size_t>(k))
    return wishart_det_invsqrt_exact(d, k, model.sigma);
  if (model.family == DataFamily::SphereBingham && model.bingham_c == 0.0) {
    const DataModel m(model, d);
    const double r = m.radius();
    if (k == 1) return 1.0 / r;
    if (k == 2 && d > 2) {
      // c^2 = (theta'theta~)^2 ~ Beta(1/2, (d-1)/2); det = r^4 (1 - c^2)
      const double dd = static_cast<double>(d);
      return std::exp(log_beta(0.5, 0.5 * (dd - 2.0)) - log_beta(0.5, 0.5 * (dd - 1.0))) / (r * r);
    }
  }
  return std::nullopt;
}

ConditionsReport check_conditions(const DataModelSpec& model, std::span<const std::size_t> schedule,
                                  std::size_t reps, const RngStream& stream, int det_k, const Exec& exec) {
  if (schedule.empty()) throw std::invalid_argument("check_conditions requires a nonempty schedule");
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (schedule[i] <= schedule[i - 1]) throw std::invalid_argument("schedule must be strictly increasing");

  ConditionsReport out;
  const double s2 = model.sigma * model.sigma;
  std::vector<double> c1_stat, c2_stat;
  std::optional<std::pair<double, double>> prev_det;

  for (std::size_t idx = 0; idx < schedule.size(); ++idx) {
    const std::size_t d = schedule[idx];
    const DataModel m(model, d);
    const MomentSheet sheet = m.moments();
    const bool assert_here = d >= kMinAssertDim;
    auto flag = [&](bool ok) { return assert_here ? std::optional<bool>(ok) : std::nullopt; };

    struct Acc {
      HigherMoments norm2;
      StreamingMoments cross2;
      void merge(const Acc& o) {
        norm2.merge(o.norm2);
        cross2.merge(o.cross2);
      }
    };
    const auto acc = run_blocks(derive_stream(stream, {idx, 0}), reps, exec, Acc{},
                                [&](Rng& rng, Acc& a, std::size_t n) {
                                  std::vector<double> x(d), xt(d);
                                  for (std::size_t r = 0; r < n; ++r) {
                                    a.norm2.add(m.draw(rng, x));
                                    a.norm2.add(m.draw(rng, xt));
                                    double c = 0.0;
                                    for (std::size_t i = 0; i < d; ++i) c += x[i] * xt[i];
                                    a.cross2.add(c * c);
                                  }
                                });

    const double n = static_cast<double>(acc.norm2.count());
    const double e_est = acc.norm2.mean();
    const double e_se = n >= 2 ? std::sqrt(acc.norm2.variance() / n) : 0.0;
    TraceRow e_row{d, std::nullopt, "e_norm2", e_est, e_se, sheet.e_norm2, std::nullopt, std::nullopt};
    if (sheet.e_norm2) e_row.pass = flag(within(e_est, e_se, *sheet.e_norm2));
    out.trace.rows.push_back(e_row);

    const double v_est = acc.norm2.variance();
    const double v_se = acc.norm2.variance_se();
    // The SE of a sample variance needs finite eighth moments; t data with nu <= 8 lacks them.
    const bool v_se_valid = !(model.family == DataFamily::StudentT && model.nu <= 8.0);
    TraceRow v_row{d, std::nullopt, "var_norm2", v_est, v_se, sheet.var_norm2, std::nullopt, std::nullopt};
    if (sheet.var_norm2 && v_se_valid) v_row.pass = flag(within(v_est, v_se, *sheet.var_norm2));
    out.trace.rows.push_back(v_row);
    if (sheet.var_norm2_lower) {
      out.trace.rows.push_back({d, std::nullopt, "var_norm2_lower_bound", v_est, v_se, sheet.var_norm2_lower,
                                std::nullopt, flag(v_est >= *sheet.var_norm2_lower - 3.0 * v_se)});
    }

    const double c_est = acc.cross2.mean();
    const double c_se = acc.cross2.standard_error();
    TraceRow c_row{d, std::nullopt, "var_cross", c_est, c_se, sheet.e_cross2, std::nullopt, std::nullopt};
    if (sheet.e_cross2) c_row.pass = flag(within(c_est, c_se, *sheet.e_cross2));
    out.trace.rows.push_back(c_row);

    const double bias = e_est - s2;
    c1_stat.push_back(v_est + bias * bias);
    c2_stat.push_back(c_est);

    if (det_k >= 1 && d >= static_cast<std::size_t>(det_k)) {
      const auto det = det_invsqrt_moment(model, d, det_k, reps, derive_stream(stream, {idx, 1}), exec);
      const auto exact = det_invsqrt_exact(model, d, det_k);
      bool ok = std::isfinite(det.estimate) && det.excluded == 0;
      if (exact) ok = ok && within(det.estimate, det.se, *exact);
      // Nonincreasing in d.
      if (prev_det)
        ok = ok && det.estimate <= prev_det->first + 3.0 * std::hypot(det.se, prev_det->second);
      prev_det = std::make_pair(det.estimate, det.se);
      out.trace.rows.push_back({d, det_k, "det_invsqrt", det.estimate, det.se, exact, std::nullopt, flag(ok)});
    }
  }

  if (schedule.size() >= 2) {
    auto vanishing = [](const std::vector<double>& s) { return s.back() <= 0.5 * s.front() || s.back() <= 1e-12; };
    out.c1_vanishing = vanishing(c1_stat);
    out.c2_vanishing = vanishing(c2_stat);
  }
  out.trace.sort();
  return out;
}

namespace {

struct GridAcc {
  std::vector<StreamingMoments> m;
  std::size_t singular = 0;
  void merge(const GridAcc& o) {
    for (std::size_t i = 0; i < m.size(); ++i) m[i].merge(o.m[i]);
    singular += o.singular;
  }
};

PowerEstimates collect(const GridAcc& acc, std::span<const double> y_grid, const RngStream& stream) {
  PowerEstimates out;
  out.y.assign(y_grid.begin(), y_grid.end());
  out.singular = acc.singular;
  for (const auto& m : acc.m) out.values.push_back(to_report(m, stream, acc.singular));
  return out;
}

// Projections Xi'X_i, i = 1..j, for one modulator draw shared by all j columns.
void draw_projections(const DataModel& m, const ModulatorSpec& mod, Rng& rng, std::size_t j,
                      std::vector<double>& xi, std::vector<double>& x, std::vector<double>& proj) {
  const std::size_t d = m.dim();
  const double v = sample_v(mod, rng);
  for (std::size_t i = 0; i < d; ++i) xi[i] = v * rng.normal();
  for (std::size_t c = 0; c < j; ++c) {
    m.draw(rng, x);
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += xi[i] * x[i];
    proj[c] = s;
  }
}

}  // namespace

PowerEstimates estimate_density_power(const DataModelSpec& model, const ModulatorSpec& mod, std::size_t d,
                                      int j, std::span<const double> y_grid, std::size_t reps,
                                      const RngStream& stream, const Exec& exec) {
  if (j < 1 || d < static_cast<std::size_t>(j)) throw std::invalid_argument("estimate_density_power requires 1 <= j <= d");
  if (y_grid.empty()) throw std::invalid_argument("estimate_density_power requires a nonempty y grid");
  validate(mod);
  const DataModel m(model, d);
  const std::size_t k = static_cast<std::size_t>(j);
  GridAcc proto{std::vector<StreamingMoments>(y_grid.size()), 0};
  const auto acc = run_blocks(stream, reps, exec, proto, [&](Rng& rng, GridAcc& a, std::size_t n) {
    std::vector<double> buf(k * d), n2(k);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < k; ++c) n2[c] = m.draw(rng, std::span<double>(buf.data() + c * d, d));
      const GramMatrix g = build_gram(buf, k, d, n2);
      const double v = sample_v(mod, rng);
      if (g.singular()) {
        ++a.singular;
        continue;
      }
      for (std::size_t i = 0; i < y_grid.size(); ++i) a.m[i].add(density_power_term(g, v, y_grid[i]));
    }
  });
  return collect(acc, y_grid, stream);
}

PowerEstimates estimate_cdf_power(const DataModelSpec& model, const ModulatorSpec& mod, std::size_t d, int j,
                                  std::span<const double> y_grid, std::size_t reps, const RngStream& stream,
                                  const Exec& exec) {
  if (j < 1) throw std::invalid_argument("estimate_cdf_power requires j >= 1");
  if (y_grid.empty()) throw std::invalid_argument("estimate_cdf_power requires a nonempty y grid");
  validate(mod);
  const DataModel m(model, d);
  const std::size_t k = static_cast<std::size_t>(j);
  GridAcc proto{std::vector<StreamingMoments>(y_grid.size()), 0};
  const auto acc = run_blocks(stream, reps, exec, proto, [&](Rng& rng, GridAcc& a, std::size_t n) {
    std::vector<double> xi(d), x(d), proj(k);
    for (std::size_t r = 0; r < n; ++r) {
      draw_projections(m, mod, rng, k, xi, x, proj);
      const double mx = *std::max_element(proj.begin(), proj.end());
      for (std::size_t i = 0; i < y_grid.size(); ++i) a.m[i].add(mx <= y_grid[i] ? 1.0 : 0.0);
    }
  });
  return collect(acc, y_grid, stream);
}

double quant_constant(const ModulatorSpec& mod, double sigma, int j) {
  const double jj = j;
  return std::pow(2.0, -0.5 * (jj - 2.0)) * std::pow(kPi, -0.5 * jj) * std::pow(jj, 1.25) *
         std::pow(sigma, -(jj + 1.0)) * v_inverse_moment(mod, j);
}

BoundReport verify_density_bound(const DataModelSpec& model, const ModulatorSpec& mod, std::size_t d, int j,
                                 std::span<const double> y_grid, std::size_t reps, const RngStream& stream,
                                 const Exec& exec) {
  BoundReport rep;
  rep.d = d;
  rep.j = j;
  rep.c_j = quant_constant(mod, model.sigma, j);
  const auto rate = gram_rate(model, d, j, reps, derive_stream(stream, {1}), exec);
  rep.rate = rate.value;
  rep.rate_se = rate.se;
  rep.rate_exact = rate.exact;
  rep.rhs = rep.c_j * std::pow(std::max(0.0, rate.value), 0.25);

  const auto est = estimate_density_power(model, mod, d, j, y_grid, reps, derive_stream(stream, {0}), exec);
  rep.singular = est.singular;
  const MixtureLimit lim{mod, model.sigma};
  rep.lhs = -1.0;
  for (std::size_t i = 0; i < y_grid.size(); ++i) {
    const double gap = std::abs(est.values[i].estimate - limit_density_power(lim, j, y_grid[i]));
    rep.max_se = std::max(rep.max_se, est.values[i].se);
    if (gap > rep.lhs) {
      rep.lhs = gap;
      rep.lhs_se = est.values[i].se;
      rep.argmax_y = y_grid[i];
    }
  }
  rep.pass = rep.singular == 0 && rep.lhs <= rep.rhs + 3.0 * rep.max_se + 1e-12;
  return rep;
}

LipschitzReport verify_cdf_lipschitz(const DataModelSpec& model, const ModulatorSpec& mod, std::size_t d, int j,
                                     std::span<const std::pair<double, double>> pairs, std::size_t reps,
                                     const RngStream& stream, const Exec& exec) {
  if (j < 1) throw std::invalid_argument("verify_cdf_lipschitz requires j >= 1");
  for (const auto& [a, y] : pairs)
    if (!(y >= a)) throw std::invalid_argument("verify_cdf_lipschitz requires y >= a in every pair");
  validate(mod);
  LipschitzReport rep;
  rep.d = d;
  rep.j = j;
  rep.c_j = quant_constant(mod, model.sigma, j);
  const auto rate = gram_rate(model, d, j, reps, derive_stream(stream, {1}), exec);
  rep.rate = rate.value;
  rep.rate_exact = rate.exact;

  const DataModel m(model, d);
  const std::size_t k = static_cast<std::size_t>(j);
  GridAcc proto{std::vector<StreamingMoments>(pairs.size()), 0};
  const auto acc = run_blocks(derive_stream(stream, {0}), reps, exec, proto,
                              [&](Rng& rng, GridAcc& acc, std::size_t n) {
                                std::vector<double> xi(d), x(d), proj(k);
                                for (std::size_t r = 0; r < n; ++r) {
                                  draw_projections(m, mod, rng, k, xi, x, proj);
                                  const auto [lo, hi] = std::minmax_element(proj.begin(), proj.end());
                                  for (std::size_t p = 0; p < pairs.size(); ++p)
                                    acc.m[p].add(*lo > pairs[p].first && *hi <= pairs[p].second ? 1.0 : 0.0);
                                }
                              });

  const double sigma = model.sigma;
  const double rate4 = std::pow(std::max(0.0, rate.value), 0.25);
  rep.pass = true;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [a, y] = pairs[p];
    LipschitzRow row;
    row.a = a;
    row.y = y;
    row.estimate = acc.m[p].mean();
    row.se = acc.m[p].standard_error();
    row.limit = a == y ? 0.0 : expect_over_v(mod, [&](double v) {
      return std::pow(normal_cdf(y / (sigma * v)) - normal_cdf(a / (sigma * v)), j);
    });
    row.lhs = std::abs(row.estimate - row.limit);
    row.rhs = rep.c_j * std::pow(y - a, j) * rate4;
    row.pass = row.lhs <= row.rhs + 3.0 * row.se + 1e-12;
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(row);
  }
  return rep;
}

VarianceReport cf_variance(const DataModelSpec& model, const ModulatorSpec& mod, std::size_t d, double t,
                           std::size_t reps, const RngStream& stream, const Exec& exec) {
  const auto mean = collapsed_cf_mean(model, mod, d, t, reps, derive_stream(stream, {0}), exec);
  const auto sq = collapsed_cf_sqmean(model, mod, d, t, reps, derive_stream(stream, {1}), exec);
  VarianceReport r;
  r.mean = mean.estimate;
  r.mean_se = mean.se;
  r.sqmean = sq.estimate;
  r.sqmean_se = sq.se;
  r.variance = sq.estimate - mean.estimate * mean.estimate;
  r.se = std::hypot(sq.se, 2.0 * mean.estimate * mean.se);
  return r;
}

double stable_variance_closed_form(double alpha, double sigma, double t) {
  const double base = std::pow(sigma, alpha) * std::pow(std::abs(t), alpha);
  return std::exp(-std::pow(2.0, 0.5 * alpha) * base) - std::exp(-2.0 * base);
}

VarianceReport stable_variance_limit(const DataModelSpec& model, double alpha, std::size_t d, double t,
                                     std::size_t reps, const RngStream& stream, const Exec& exec) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("stable_variance_limit requires 0 < alpha < 2");
  const ModulatorSpec mod{ModFamily::Stable, 0.0, alpha};
  auto r = cf_variance(model, mod, d, t, reps, stream, exec);
  r.limit = stable_variance_closed_form(alpha, model.sigma, t);
  return r;
}

MatrixNormalReport matrix_normal_test(const DataModelSpec& model, std::size_t d, std::size_t k, std::size_t l,
                                      std::size_t reps, const RngStream& stream, const Exec& exec,
                                      const MatrixNormalThresholds& th) {
  if (k < 1 || l < 1) throw std::invalid_argument("matrix_normal_test requires k, l >= 1");
  const DataModel m(model, d);
  const std::size_t cells = k * l;
  const bool want_ks = k == 1 && l == 1;

  struct Acc {
    CoMoments co;
    std::vector<HigherMoments> hm;
    std::vector<double> samples;
    void merge(const Acc& o) {
      co.merge(o.co);
      for (std::size_t i = 0; i < hm.size(); ++i) hm[i].merge(o.hm[i]);
      samples.insert(samples.end(), o.samples.begin(), o.samples.end());
    }
  };
  Acc proto{CoMoments(cells), std::vector<HigherMoments>(cells), {}};
  const auto acc = run_blocks(stream, reps, exec, proto, [&](Rng& rng, Acc& a, std::size_t n) {
    std::vector<double> xi(l * d), x(k * d), y(cells);
    for (std::size_t r = 0; r < n; ++r) {
      for (auto& v : xi) v = rng.normal();
      for (std::size_t c = 0; c < k; ++c) m.draw(rng, std::span<double>(x.data() + c * d, d));
      for (std::size_t row = 0; row < l; ++row)
        for (std::size_t c = 0; c < k; ++c) {
          double s = 0.0;
          for (std::size_t i = 0; i < d; ++i) s += xi[row * d + i] * x[c * d + i];
          y[row * k + c] = s;
        }
      a.co.add(y);
      for (std::size_t i = 0; i < cells; ++i) a.hm[i].add(y[i]);
      if (want_ks) a.samples.push_back(y[0]);
    }
  });

  MatrixNormalReport rep;
  rep.d = d;
  rep.k = k;
  rep.l = l;
  rep.asserted = d >= kMinAssertDim;
  const double sigma = model.sigma, s2 = sigma * sigma;
  bool ok = true;
  for (std::size_t i = 0; i < cells; ++i) {
    const auto& h = acc.hm[i];
    EntryStats e;
    e.row = i / k;
    e.col = i % k;
    e.mean = h.mean();
    e.mean_se = std::sqrt(h.variance() / static_cast<double>(h.count()));
    e.variance = h.variance();
    e.variance_se = h.variance_se();
    e.excess_kurtosis = h.excess_kurtosis();
    ok = ok && std::abs(e.mean) <= th.mean * sigma && std::abs(e.variance - s2) <= th.variance * s2 &&
         std::abs(e.excess_kurtosis) <= th.kurtosis;
    rep.entries.push_back(e);
  }
  for (std::size_t a = 0; a < cells; ++a)
    for (std::size_t b = a + 1; b < cells; ++b) {
      const double c = acc.co.correlation(a, b);
      ok = ok && std::abs(c) <= th.corr;
      rep.correlations.push_back({a, b, c});
    }
  if (want_ks) {
    rep.ks = ks_distance(acc.samples, [sigma](double y) { return normal_cdf(y / sigma); });
    ok = ok && *rep.ks <= th.ks;
  }
  rep.pass = rep.asserted && ok;
  return rep;
}

namespace {

class GaussianConditional : public ConditionalLaw {
 public:
  explicit GaussianConditional(double var) : sd_(std::sqrt(var)) {}
  double pdf(double y) const override { return normal_pdf(y / sd_) / sd_; }
  double cdf(double y) const override { return normal_cdf(y / sd_); }

 private:
  double sd_;
};

// Y = R theta_1 with R = r ||xi|| and theta uniform on the sphere in R^d.
class SphereConditional : public ConditionalLaw {
 public:
  SphereConditional(std::size_t d, double scale) : d_(static_cast<double>(d)), scale_(scale) {
    log_norm_ = log_gamma(0.5 * d_) - log_gamma(0.5 * (d_ - 1.0)) - 0.5 * std::log(kPi) - std::log(scale_);
  }
  double pdf(double y) const override {
    const double u = y / scale_;
    if (std::abs(u) >= 1.0) return d_ == 3.0 && std::abs(u) == 1.0 ? std::exp(log_norm_) : 0.0;
    return std::exp(log_norm_ + 0.5 * (d_ - 3.0) * std::log1p(-u * u));
  }
  double cdf(double y) const override {
    const double u = y / scale_;
    if (u <= -1.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double half = 0.5 * boost::math::ibeta(0.5, 0.5 * (d_ - 1.0), u * u);
    return u >= 0.0 ? 0.5 + half : 0.5 - half;
  }

 private:
  double d_, scale_, log_norm_;
};

}  // namespace

std::unique_ptr<ConditionalLaw> conditional_exact_law(const DataModelSpec& model, std::span<const double> xi) {
  double n2 = 0.0;
  for (double v : xi) n2 += v * v;
  if (n2 == 0.0) throw std::invalid_argument("conditional_exact_law requires a nonzero xi");
  const std::size_t d = xi.size();
  if (model.family == DataFamily::GaussianProfile) {
    const DataModel m(model, d);
    double var = 0.0;
    for (std::size_t i = 0; i < d; ++i) var += m.lambdas()[i] * xi[i] * xi[i];
    return std::make_unique<GaussianConditional>(var);
  }
  if (model.family == DataFamily::SphereBingham && model.bingham_c == 0.0) {
    const DataModel m(model, d);
    return std::make_unique<SphereConditional>(d, m.radius() * std::sqrt(n2));
  }
  return nullptr;
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_distance requires samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    dmax = std::max({dmax, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return dmax;
}

}  // namespace modlab
