#include "modlab/gram.hpp"

#include <cmath>
#include <stdexcept>

namespace modlab {

const CholeskyFactor& GramMatrix::factor() const {
  if (!factor_) throw SingularGram("Gram matrix is singular");
  return *factor_;
}

double GramMatrix::logdet() const {
  if (!factor_) throw SingularGram("Gram matrix is singular");
  return logdet_;
}

double GramMatrix::quad_inv_ones() const {
  if (!factor_) throw SingularGram("Gram matrix is singular");
  return qio_;
}

GramMatrix build_gram(std::span<const double> columns, std::size_t k, std::size_t d,
                      std::span<const double> diag) {
  if (k < 1 || d < 1) throw std::invalid_argument("build_gram requires k >= 1 and d >= 1");
  if (columns.size() != k * d) throw std::invalid_argument("build_gram: column buffer size mismatch");
  if (!diag.empty() && diag.size() != k) throw std::invalid_argument("build_gram: diag size mismatch");
  SymMatrix a(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double* xi = columns.data() + i * d;
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      if (i == j && !diag.empty()) {
        s = diag[i];
      } else {
        const double* xj = columns.data() + j * d;
        for (std::size_t p = 0; p < d; ++p) s += xi[p] * xj[p];
      }
      a.set(i, j, s);
    }
  }
  GramMatrix g(std::move(a));
  if (d >= k) {
    try {
      g.factor_ = cholesky(g.a_);
      g.logdet_ = modlab::logdet(*g.factor_);
      g.qio_ = modlab::quad_inv_ones(*g.factor_);
    } catch (const NotPositiveDefinite&) {
      g.factor_.reset();
    }
  }
  return g;
}

GramMatrix build_gram(const std::vector<std::vector<double>>& columns) {
  if (columns.empty()) throw std::invalid_argument("build_gram requires k >= 1");
  const std::size_t d = columns.front().size();
  std::vector<double> buf;
  buf.reserve(columns.size() * d);
  for (const auto& c : columns) {
    if (c.size() != d) throw std::invalid_argument("build_gram: columns differ in length");
    buf.insert(buf.end(), c.begin(), c.end());
  }
  return build_gram(buf, columns.size(), d);
}

double density_power_term(const GramMatrix& g, double v, double y) {
  if (g.singular()) throw SingularGram("density_power_term on a singular Gram matrix");
  if (!(v > 0.0)) throw std::invalid_argument("density_power_term requires v > 0");
  const double k = static_cast<double>(g.order());
  const double log_term = -0.5 * k * std::log(2.0 * kPi) - k * std::log(v) - 0.5 * g.logdet() -
                          0.5 * y * y * g.quad_inv_ones() / (v * v);
  return std::exp(log_term);
}

namespace {

// Draws k columns into buf and their squared norms into n2.
void draw_columns(const DataModel& m, Rng& rng, std::size_t k, std::vector<double>& buf,
                  std::vector<double>& n2) {
  const std::size_t d = m.dim();
  buf.resize(k * d);
  n2.resize(k);
  for (std::size_t i = 0; i < k; ++i) n2[i] = m.draw(rng, std::span<double>(buf.data() + i * d, d));
}

}  // namespace

EstimateReport collapsed_cf_mean(const DataModelSpec& model, const ModulatorSpec& mod, std::size_t d,
                                 double t, std::size_t reps, const RngStream& stream, const Exec& exec) {
  if (reps < 2) throw std::invalid_argument("collapsed_cf_mean requires reps >= 2");
  validate(mod);
  const DataModel m(model, d);
  const double t2 = t * t;
  auto acc = run_blocks(stream, reps, exec, StreamingMoments{},
                        [&](Rng& rng, StreamingMoments& a, std::size_t n) {
                          std::vector<double> x(d);
                          for (std::size_t r = 0; r < n; ++r) a.add(psi(mod, t2 * m.draw(rng, x)));
                        });
  return to_report(acc, stream);
}

EstimateReport collapsed_cf_sqmean(const DataModelSpec& model, const ModulatorSpec& mod, std::size_t d,
                                   double t, std::size_t reps, const RngStream& stream, const Exec& exec) {
  if (reps < 2) throw std::invalid_argument("collapsed_cf_sqmean requires reps >= 2");
  validate(mod);
  const DataModel m(model, d);
  const double t2 = t * t;
  auto acc = run_blocks(stream, reps, exec, StreamingMoments{},
                        [&](Rng& rng, StreamingMoments& a, std::size_t n) {
                          std::vector<double> x(d), xt(d);
                          for (std::size_t r = 0; r < n; ++r) {
                            m.draw(rng, x);
                            m.draw(rng, xt);
                            double s = 0.0;
                            for (std::size_t i = 0; i < d; ++i) {
                              const double e = x[i] - xt[i];
                              s += e * e;
                            }
                            a.add(psi(mod, t2 * s));
                          }
                        });
  return to_report(acc, stream);
}

std::optional<double> gram_rate_exact(const MomentSheet& m, double sigma, int j) {
  if (j < 1) throw std::invalid_argument("gram_rate requires j >= 1");
  if (!m.e_norm2 || !m.var_norm2) return std::nullopt;
  const double jj = j;
  const double bias = *m.e_norm2 - sigma * sigma;
  double rate = jj * (*m.var_norm2 + bias * bias);
  if (j > 1) {
    if (!m.e_cross2) return std::nullopt;
    rate += jj * (jj - 1.0) * *m.e_cross2;
  }
  return rate;
}

std::optional<double> gram_rate_literal(const MomentSheet& m, double sigma, int j) {
  if (!m.e_norm2 || !m.var_norm2) return std::nullopt;
  const double bias = *m.e_norm2 - sigma * sigma;
  return static_cast<double>(j) * (*m.var_norm2 + bias * bias);
}

EstimateReport frobenius_gap_mc(const DataModelSpec& model, std::size_t d, int j, std::size_t reps,
                                const RngStream& stream, const Exec& exec) {
  if (j < 1) throw std::invalid_argument("frobenius_gap_mc requires j >= 1");
  const DataModel m(model, d);
  const double s2 = model.sigma * model.sigma;
  const std::size_t k = static_cast<std::size_t>(j);
  auto acc = run_blocks(stream, reps, exec, StreamingMoments{},
                        [&](Rng& rng, StreamingMoments& a, std::size_t n) {
                          std::vector<double> buf, n2;
                          for (std::size_t r = 0; r < n; ++r) {
                            draw_columns(m, rng, k, buf, n2);
                            const auto g = build_gram(buf, k, d, n2);
                            const double f = frob_dist_to_scaled_identity(g.matrix(), s2);
                            a.add(f * f);
                          }
                        });
  return to_report(acc, stream);
}

RateValue gram_rate(const DataModelSpec& model, std::size_t d, int j, std::size_t reps,
                    const RngStream& stream, const Exec& exec) {
  if (auto r = gram_rate_exact(moments(model, d), model.sigma, j)) return {*r, 0.0, true};
  const auto est = frobenius_gap_mc(model, d, j, reps, stream, exec);
  return {est.estimate, est.se, false};
}

EstimateReport det_invsqrt_moment(const DataModelSpec& model, std::size_t d, int k, std::size_t reps,
                                  const RngStream& stream, const Exec& exec) {
  if (k < 1) throw std::invalid_argument("det_invsqrt_moment requires k >= 1");
  if (d < static_cast<std::size_t>(k))
    throw std::invalid_argument("det_invsqrt_moment requires d >= k");
  const DataModel m(model, d);
  const std::size_t kk = static_cast<std::size_t>(k);
  struct Acc {
    StreamingMoments m;
    std::size_t singular = 0;
    void merge(const Acc& o) {
      m.merge(o.m);
      singular += o.singular;
    }
  };
  auto acc = run_blocks(stream, reps, exec, Acc{}, [&](Rng& rng, Acc& a, std::size_t n) {
    std::vector<double> buf, n2;
    for (std::size_t r = 0; r < n; ++r) {
      draw_columns(m, rng, kk, buf, n2);
      const auto g = build_gram(buf, kk, d, n2);
      if (g.singular()) {
        ++a.singular;
        continue;
      }
      a.m.add(std::exp(-0.5 * g.logdet()));
    }
  });
  return to_report(acc.m, stream, acc.singular);
}

double wishart_det_invsqrt_exact(std::size_t d, int k, double sigma) {
  if (k < 1) throw std::invalid_argument("wishart_det_invsqrt_exact requires k >= 1");
  if (d <= static_cast<std::size_t>(k)) throw std::domain_error("wishart_det_invsqrt_exact requires d >= k + 1");
  const double dd = static_cast<double>(d), kk = k;
  double lg = 0.0;
  for (int i = 1; i <= k; ++i) lg += log_gamma(0.5 * (dd - i)) - log_gamma(0.5 * (dd - i + 1));
  return std::exp(-0.5 * kk * std::log(2.0) + 0.5 * kk * std::log(dd) - kk * std::log(sigma) + lg);
}

}  // namespace modlab
