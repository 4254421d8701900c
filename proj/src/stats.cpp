#include "modlab/stats.hpp"

namespace modlab {

void StreamingMoments::merge(const StreamingMoments& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double delta = o.mean_ - mean_;
  mean_ += delta * nb / n;
  m2_ += o.m2_ + delta * delta * na * nb / n;
  n_ += o.n_;
}

void HigherMoments::add(double x) {
  const double n1 = static_cast<double>(n_);
  ++n_;
  const double n = static_cast<double>(n_);
  const double delta = x - mean_;
  const double dn = delta / n;
  const double dn2 = dn * dn;
  const double term1 = delta * dn * n1;
  mean_ += dn;
  m4_ += term1 * dn2 * (n * n - 3 * n + 3) + 6 * dn2 * m2_ - 4 * dn * m3_;
  m3_ += term1 * dn * (n - 2) - 3 * dn * m2_;
  m2_ += term1;
}

void HigherMoments::merge(const HigherMoments& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double d = o.mean_ - mean_;
  const double d2 = d * d, d3 = d2 * d, d4 = d2 * d2;
  const double m2 = m2_ + o.m2_ + d2 * na * nb / n;
  const double m3 = m3_ + o.m3_ + d3 * na * nb * (na - nb) / (n * n) +
                    3.0 * d * (na * o.m2_ - nb * m2_) / n;
  const double m4 = m4_ + o.m4_ + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                    6.0 * d2 * (na * na * o.m2_ + nb * nb * m2_) / (n * n) +
                    4.0 * d * (na * o.m3_ - nb * m3_) / n;
  mean_ += d * nb / n;
  m2_ = m2;
  m3_ = m3;
  m4_ = m4;
  n_ += o.n_;
}

double HigherMoments::excess_kurtosis() const {
  if (n_ < 2 || m2_ == 0.0) return 0.0;
  return static_cast<double>(n_) * m4_ / (m2_ * m2_) - 3.0;
}

double HigherMoments::variance_se() const {
  if (n_ < 4) return 0.0;
  const double n = static_cast<double>(n_);
  const double mu2 = m2_ / n, mu4 = m4_ / n;
  return std::sqrt(std::max(0.0, (mu4 - mu2 * mu2 * (n - 3) / (n - 1)) / n));
}

void CoMoments::add(std::span<const double> x) {
  ++n_;
  const double n = static_cast<double>(n_);
  std::vector<double> delta(m_);
  for (std::size_t i = 0; i < m_; ++i) {
    delta[i] = x[i] - mean_[i];
    mean_[i] += delta[i] / n;
  }
  for (std::size_t i = 0; i < m_; ++i)
    for (std::size_t j = 0; j < m_; ++j) c_[i * m_ + j] += delta[i] * (x[j] - mean_[j]);
}

void CoMoments::merge(const CoMoments& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
  const double n = na + nb;
  for (std::size_t i = 0; i < m_; ++i)
    for (std::size_t j = 0; j < m_; ++j)
      c_[i * m_ + j] += o.c_[i * m_ + j] +
                        (o.mean_[i] - mean_[i]) * (o.mean_[j] - mean_[j]) * na * nb / n;
  for (std::size_t i = 0; i < m_; ++i) mean_[i] += (o.mean_[i] - mean_[i]) * nb / n;
  n_ += o.n_;
}

double CoMoments::correlation(std::size_t i, std::size_t j) const {
  const double vi = c_[i * m_ + i], vj = c_[j * m_ + j];
  if (vi <= 0.0 || vj <= 0.0) return 0.0;
  return c_[i * m_ + j] / std::sqrt(vi * vj);
}

EstimateReport to_report(const StreamingMoments& m, const RngStream& lineage, std::size_t excluded) {
  EstimateReport r;
  r.estimate = m.mean();
  r.se = m.standard_error();
  r.reps = m.count();
  r.excluded = excluded;
  r.lineage = lineage;
  return r;
}

}  // namespace modlab
