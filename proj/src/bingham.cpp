#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "modlab/datamodels.hpp"

namespace modlab {

std::vector<double> bingham_diagonal(double c, double beta, std::size_t d) {
  if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in [0, 1)");
  std::vector<double> s(d, 0.0);
  const double m = c * std::pow(static_cast<double>(d), 0.5 * (beta - 1.0));
  const std::size_t paired = d - d % 2;
  for (std::size_t i = 0; i < paired; ++i) s[i] = (i % 2 == 0) ? m : -m;
  return s;
}

BinghamSampler::BinghamSampler(std::vector<double> eigenvalues) {
  if (eigenvalues.size() < 2) throw std::invalid_argument("Bingham sampler needs d >= 2");
  const double top = *std::max_element(eigenvalues.begin(), eigenvalues.end());
  a_.resize(eigenvalues.size());
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] = top - eigenvalues[i];
  init();
}

BinghamSampler::BinghamSampler(const SymMatrix& s) {
  const std::size_t d = s.order();
  if (d < 2) throw std::invalid_argument("Bingham sampler needs d >= 2");
  Eigen::MatrixXd m(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = s(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  const auto& ev = es.eigenvalues();
  const double top = ev.maxCoeff();
  a_.resize(d);
  rotation_.resize(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    a_[i] = top - ev(i);
    for (std::size_t j = 0; j < d; ++j) rotation_[j * d + i] = es.eigenvectors()(j, i);
  }
  init();
}

void BinghamSampler::init() {
  const std::size_t d = a_.size();
  const double dd = static_cast<double>(d);
  uniform_ = std::all_of(a_.begin(), a_.end(), [](double v) { return v == 0.0; });
  inv_sqrt_omega_.assign(d, 1.0);
  if (uniform_) return;

  // b solves sum_i 1/(b + 2 a_i) = 1 on (0, d).
  auto f = [&](double b) {
    double s = 0.0;
    for (double a : a_) s += 1.0 / (b + 2.0 * a);
    return s - 1.0;
  };
  double lo = 0.0, hi = dd;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= 0.0) break;
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  b_ = 0.5 * (lo + hi);
  for (std::size_t i = 0; i < d; ++i) inv_sqrt_omega_[i] = 1.0 / std::sqrt(1.0 + 2.0 * a_[i] / b_);
  log_bound_ = -0.5 * (dd - b_) + 0.5 * dd * std::log(dd / b_);
}

std::size_t BinghamSampler::draw(Rng& rng, std::span<double> out) const {
  const std::size_t d = a_.size();
  if (out.size() != d) throw std::invalid_argument("Bingham draw: output length mismatch");
  const double dd = static_cast<double>(d);
  std::vector<double> y(d);
  std::size_t tries = 0;
  for (;;) {
    ++tries;
    double nrm2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      y[i] = rng.normal() * inv_sqrt_omega_[i];
      nrm2 += y[i] * y[i];
    }
    const double inv = 1.0 / std::sqrt(nrm2);
    for (auto& v : y) v *= inv;
    if (uniform_) break;

    double z = 0.0;
    for (std::size_t i = 0; i < d; ++i) z += a_[i] * y[i] * y[i];
    const double log_ratio = -z + 0.5 * dd * std::log1p(2.0 * z / b_) - log_bound_;
    const std::size_t total = counters_->proposals.fetch_add(1) + 1;
    if (std::log(rng.uniform_open()) < log_ratio) {
      counters_->accepted.fetch_add(1);
      break;
    }
    if (tries >= kFailureWindow ||
        (total >= kFailureWindow &&
         static_cast<double>(counters_->accepted.load()) < kMinAcceptance * static_cast<double>(total))) {
      throw SamplerFailure(fmt::format(
          "Bingham rejection sampler acceptance below {:g}: {} accepted of {} proposals "
          "(d={}, b={:.6g}, max shifted eigenvalue={:.6g})",
          kMinAcceptance, counters_->accepted.load(), total, d, b_,
          *std::max_element(a_.begin(), a_.end())));
    }
  }
  if (uniform_) {
    counters_->proposals.fetch_add(1);
    counters_->accepted.fetch_add(1);
  }

  if (rotation_.empty()) {
    std::copy(y.begin(), y.end(), out.begin());
  } else {
    for (std::size_t r = 0; r < d; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) s += rotation_[r * d + c] * y[c];
      out[r] = s;
    }
  }
  return tries;
}

double BinghamSampler::acceptance_rate() const {
  const auto p = proposals();
  return p ? static_cast<double>(accepted()) / static_cast<double>(p) : 1.0;
}

std::vector<double> sample_bingham(const SymMatrix& s, Rng& rng) {
  BinghamSampler sampler(s);
  std::vector<double> out(s.order());
  sampler.draw(rng, out);
  return out;
}

}  // namespace modlab
