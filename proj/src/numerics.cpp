#include "modlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace modlab {

SymMatrix::SymMatrix(std::size_t k) : k_(k), a_(k * k, 0.0) {
  if (k == 0) throw std::invalid_argument("SymMatrix order must be >= 1");
}

SymMatrix::SymMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : SymMatrix(rows.size()) {
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != k_) throw std::invalid_argument("SymMatrix rows must be square");
    std::size_t j = 0;
    for (double v : row) a_[i * k_ + j++] = v;
    ++i;
  }
  for (std::size_t r = 0; r < k_; ++r)
    for (std::size_t c = 0; c < r; ++c)
      if (a_[r * k_ + c] != a_[c * k_ + r])
        throw std::invalid_argument("SymMatrix input is not symmetric");
}

SymMatrix SymMatrix::identity(std::size_t k, double scale) {
  SymMatrix m(k);
  for (std::size_t i = 0; i < k; ++i) m.a_[i * k + i] = scale;
  return m;
}

void SymMatrix::set(std::size_t i, std::size_t j, double v) {
  a_[i * k_ + j] = v;
  a_[j * k_ + i] = v;
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < k_; ++i) t += a_[i * k_ + i];
  return t;
}

CholeskyFactor cholesky(const SymMatrix& a) {
  const std::size_t k = a.order();
  double maxdiag = 0.0;
  for (std::size_t i = 0; i < k; ++i) maxdiag = std::max(maxdiag, std::abs(a(i, i)));
  const double tol = static_cast<double>(k) * std::numeric_limits<double>::epsilon() * maxdiag;

  CholeskyFactor f;
  f.k_ = k;
  f.l_.assign(k * k, 0.0);
  auto& l = f.l_;
  for (std::size_t j = 0; j < k; ++j) {
    double s = a(j, j);
    for (std::size_t p = 0; p < j; ++p) s -= l[j * k + p] * l[j * k + p];
    if (!(s > tol)) throw NotPositiveDefinite(j);
    const double ljj = std::sqrt(s);
    l[j * k + j] = ljj;
    for (std::size_t i = j + 1; i < k; ++i) {
      double t = a(i, j);
      for (std::size_t p = 0; p < j; ++p) t -= l[i * k + p] * l[j * k + p];
      l[i * k + j] = t / ljj;
    }
  }
  return f;
}

double logdet(const CholeskyFactor& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.order(); ++i) s += std::log(f(i, i));
  return 2.0 * s;
}

void cholesky_solve(const CholeskyFactor& f, std::span<double> b) {
  const std::size_t k = f.order();
  for (std::size_t i = 0; i < k; ++i) {
    double t = b[i];
    for (std::size_t p = 0; p < i; ++p) t -= f(i, p) * b[p];
    b[i] = t / f(i, i);
  }
  for (std::size_t i = k; i-- > 0;) {
    double t = b[i];
    for (std::size_t p = i + 1; p < k; ++p) t -= f(p, i) * b[p];
    b[i] = t / f(i, i);
  }
}

double quad_inv_ones(const CholeskyFactor& f) {
  // 1'A^{-1}1 = ||L^{-1}1||^2, one triangular solve suffices.
  const std::size_t k = f.order();
  std::vector<double> w(k, 1.0);
  double q = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double t = w[i];
    for (std::size_t p = 0; p < i; ++p) t -= f(i, p) * w[p];
    w[i] = t / f(i, i);
    q += w[i] * w[i];
  }
  return q;
}

double frob_dist_to_scaled_identity(const SymMatrix& a, double s) {
  const std::size_t k = a.order();
  // Scaled sum of squares so tiny entries do not underflow.
  double scale = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) scale = std::max(scale, std::abs(a(i, j) - (i == j ? s : 0.0)));
  if (scale == 0.0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const double e = (a(i, j) - (i == j ? s : 0.0)) / scale;
      acc += e * e;
    }
  return scale * std::sqrt(acc);
}

namespace {

// Stirling series for z >= 15, Bernoulli terms through B_16.
double stirling_lgamma(double z) {
  static constexpr double c[] = {1.0 / 12.0,          -1.0 / 360.0,        1.0 / 1260.0,
                                 -1.0 / 1680.0,       1.0 / 1188.0,        -691.0 / 360360.0,
                                 1.0 / 156.0,         -3617.0 / 122400.0};
  const double iz = 1.0 / z;
  const double iz2 = iz * iz;
  double series = 0.0;
  for (int i = 7; i >= 0; --i) series = series * iz2 + c[i];
  series *= iz;
  return (z - 0.5) * std::log(z) - z + 0.91893853320467274178 + series;
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error("log_gamma requires finite x > 0");
  if (x >= 15.0) return stirling_lgamma(x);
  double prod = 1.0;
  double z = x;
  while (z < 15.0) {
    prod *= z;
    z += 1.0;
  }
  return stirling_lgamma(z) - std::log(prod);
}

double normal_pdf(double x) { return 0.39894228040143267794 * std::exp(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

}  // namespace modlab
