#include "modlab/datamodels.hpp"

#include <cmath>
#include <numeric>

namespace modlab {

namespace {

double sum_sq(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double uniform_moment(double lo, double hi, int p) {
  // E U^p for U ~ U[lo, hi].
  if (hi == lo) return std::pow(lo, p);
  return (std::pow(hi, p + 1) - std::pow(lo, p + 1)) / ((p + 1) * (hi - lo));
}

}  // namespace

void validate(const DataModelSpec& s) {
  if (!(s.sigma > 0.0) || !std::isfinite(s.sigma)) throw std::invalid_argument("sigma must be > 0");
  if (!(s.beta >= 0.0 && s.beta < 1.0)) throw std::invalid_argument("beta must lie in [0, 1)");
  if (s.family == DataFamily::StudentT && !(s.nu > 4.0))
    throw std::invalid_argument("StudentT data requires nu > 4");
  if (s.family == DataFamily::LaplaceData && !(s.nu > 0.0))
    throw std::invalid_argument("Laplace data requires nu > 0");
  if (s.profile == Profile::Power && !(s.power_r > -0.5))
    throw std::invalid_argument("power profile requires r > -1/2");
}

std::vector<double> eigen_profile(Profile profile, std::size_t d, double sigma, double r) {
  if (d < 2) throw std::invalid_argument("eigen_profile requires d >= 2");
  const double s2 = sigma * sigma;
  const double dd = static_cast<double>(d);
  std::vector<double> lam(d);
  switch (profile) {
    case Profile::Isotropic:
      std::fill(lam.begin(), lam.end(), s2 / dd);
      break;
    case Profile::LogHarmonic: {
      if (d < 3) throw std::invalid_argument("log-harmonic profile requires d >= 3");
      const double ld = std::log(dd);
      for (std::size_t j = 0; j < d; ++j) lam[j] = s2 / (ld * static_cast<double>(j + 1));
      break;
    }
    case Profile::Power: {
      if (!(r > -0.5)) throw std::invalid_argument("power profile requires r > -1/2");
      const double scale = (r + 1.0) * s2 * std::pow(dd, -(r + 1.0));
      for (std::size_t j = 0; j < d; ++j) lam[j] = scale * std::pow(static_cast<double>(j + 1), r);
      break;
    }
  }
  return lam;
}

DataModel::DataModel(const DataModelSpec& spec, std::size_t d) : spec_(spec), d_(d) {
  validate(spec);
  if (d < 2) throw std::invalid_argument("data models require d >= 2");
  const double dd = static_cast<double>(d);
  const double sigma = spec.sigma;
  radius_ = spec.radius_rule == RadiusRule::Constant ? sigma : sigma * (1.0 + spec.radius_rate / dd);
  switch (spec.family) {
    case DataFamily::SphereBingham:
    case DataFamily::DilatedBingham:
      bingham_ = std::make_shared<BinghamSampler>(bingham_diagonal(spec.bingham_c, spec.beta, d));
      break;
    case DataFamily::HypercubeRandomSide:
      side_mid_ = sigma * std::sqrt(12.0 / dd);
      break;
    case DataFamily::GaussianProfile:
      lambda_ = eigen_profile(spec.profile, d, sigma, spec.power_r);
      break;
    case DataFamily::StudentT:
      lambda_ = eigen_profile(spec.profile, d, sigma, spec.power_r);
      for (auto& l : lambda_) l *= (spec.nu - 2.0) / spec.nu;
      break;
    case DataFamily::LaplaceData:
      lambda_ = eigen_profile(spec.profile, d, sigma, spec.power_r);
      for (auto& l : lambda_) l /= spec.nu;
      break;
    case DataFamily::BallUniform:
      break;
  }
  sqrt_lambda_.resize(lambda_.size());
  for (std::size_t i = 0; i < lambda_.size(); ++i) sqrt_lambda_[i] = std::sqrt(lambda_[i]);
}

double DataModel::draw(Rng& rng, std::span<double> out) const {
  if (out.size() != d_) throw std::invalid_argument("DataModel::draw: output length mismatch");
  const double dd = static_cast<double>(d_);
  const double sigma = spec_.sigma;
  switch (spec_.family) {
    case DataFamily::SphereBingham: {
      bingham_->draw(rng, out);
      for (auto& v : out) v *= radius_;
      return radius_ * radius_;
    }
    case DataFamily::DilatedBingham: {
      bingham_->draw(rng, out);
      double r = sigma;
      if (spec_.radial_law == RadialLaw::Uniform) {
        const double delta = sigma / std::sqrt(dd);
        r = sigma - delta + 2.0 * delta * rng.uniform();
      }
      for (auto& v : out) v *= r;
      return r * r;
    }
    case DataFamily::BallUniform: {
      double n2 = 0.0;
      for (auto& v : out) {
        v = rng.normal();
        n2 += v * v;
      }
      const double r = radius_ * std::pow(rng.uniform(), 1.0 / dd);
      const double scale = r / std::sqrt(n2);
      for (auto& v : out) v *= scale;
      return r * r;
    }
    case DataFamily::HypercubeRandomSide: {
      double side = side_mid_;
      if (spec_.side_law == SideLaw::Uniform) {
        const double h = side_mid_ / std::sqrt(dd);
        side = side_mid_ - h + 2.0 * h * rng.uniform();
      }
      double n2 = 0.0;
      for (auto& v : out) {
        v = side * (rng.uniform() - 0.5);
        n2 += v * v;
      }
      return n2;
    }
    case DataFamily::GaussianProfile:
    case DataFamily::StudentT:
    case DataFamily::LaplaceData: {
      double mult = 1.0;
      if (spec_.family == DataFamily::StudentT)
        mult = std::sqrt(spec_.nu / rng.chi_squared(spec_.nu));
      else if (spec_.family == DataFamily::LaplaceData)
        mult = std::sqrt(rng.chi_squared(spec_.nu));
      double n2 = 0.0;
      for (std::size_t i = 0; i < d_; ++i) {
        out[i] = mult * sqrt_lambda_[i] * rng.normal();
        n2 += out[i] * out[i];
      }
      return n2;
    }
  }
  return 0.0;
}

std::vector<double> DataModel::draw(Rng& rng) const {
  std::vector<double> x(d_);
  draw(rng, x);
  return x;
}

MomentSheet DataModel::moments() const {
  MomentSheet m;
  m.d = d_;
  const double dd = static_cast<double>(d_);
  const double sigma = spec_.sigma;
  const double nu = spec_.nu;
  switch (spec_.family) {
    case DataFamily::SphereBingham: {
      const double r2 = radius_ * radius_;
      m.e_norm2 = r2;
      m.var_norm2 = 0.0;
      if (bingham_->is_uniform()) m.e_cross2 = r2 * r2 / dd;
      break;
    }
    case DataFamily::DilatedBingham: {
      double er2 = sigma * sigma, er4 = er2 * er2;
      if (spec_.radial_law == RadialLaw::Uniform) {
        const double delta = sigma / std::sqrt(dd);
        er2 = uniform_moment(sigma - delta, sigma + delta, 2);
        er4 = uniform_moment(sigma - delta, sigma + delta, 4);
      }
      m.e_norm2 = er2;
      m.var_norm2 = er4 - er2 * er2;
      if (bingham_->is_uniform()) m.e_cross2 = er2 * er2 / dd;
      break;
    }
    case DataFamily::BallUniform: {
      const double r2 = radius_ * radius_;
      m.e_norm2 = r2 * dd / (dd + 2.0);
      m.var_norm2 = r2 * r2 * (dd / (dd + 4.0) - dd * dd / ((dd + 2.0) * (dd + 2.0)));
      m.e_cross2 = r2 * r2 * dd / ((dd + 2.0) * (dd + 2.0));
      break;
    }
    case DataFamily::HypercubeRandomSide: {
      double el2 = side_mid_ * side_mid_, el4 = el2 * el2;
      if (spec_.side_law == SideLaw::Uniform) {
        const double h = side_mid_ / std::sqrt(dd);
        el2 = uniform_moment(side_mid_ - h, side_mid_ + h, 2);
        el4 = uniform_moment(side_mid_ - h, side_mid_ + h, 4);
      }
      // Given L: E||X||^2 = d L^2/12, Var = d L^4/180.
      const double mean = dd * el2 / 12.0;
      m.e_norm2 = mean;
      m.var_norm2 = el4 * (dd / 180.0 + dd * dd / 144.0) - mean * mean;
      m.e_cross2 = dd * el2 * el2 / 144.0;
      break;
    }
    case DataFamily::GaussianProfile: {
      const double tr = std::accumulate(lambda_.begin(), lambda_.end(), 0.0);
      const double tr2 = sum_sq(lambda_);
      m.e_norm2 = tr;
      m.var_norm2 = 2.0 * tr2;
      m.e_cross2 = tr2;
      break;
    }
    case DataFamily::StudentT: {
      const double tr = std::accumulate(lambda_.begin(), lambda_.end(), 0.0);
      const double tr2 = sum_sq(lambda_);
      m.e_norm2 = nu * tr / (nu - 2.0);
      m.e_cross2 = nu * nu * tr2 / ((nu - 2.0) * (nu - 2.0));
      m.var_norm2 = nu * nu * ((tr * tr + 2.0 * tr2) / ((nu - 2.0) * (nu - 4.0)) -
                               tr * tr / ((nu - 2.0) * (nu - 2.0)));
      m.var_norm2_lower = nu * tr * tr / ((nu - 4.0) * (nu - 2.0) * (nu - 2.0));
      break;
    }
    case DataFamily::LaplaceData: {
      const double tr = std::accumulate(lambda_.begin(), lambda_.end(), 0.0);
      const double tr2 = sum_sq(lambda_);
      m.e_norm2 = nu * tr;
      m.var_norm2 = 2.0 * nu * tr * tr + 2.0 * (nu * nu + 2.0 * nu) * tr2;
      m.e_cross2 = nu * nu * tr2;
      break;
    }
  }
  return m;
}

std::vector<double> sample(const DataModelSpec& spec, std::size_t d, const RngStream& stream) {
  DataModel model(spec, d);
  Rng rng(stream);
  return model.draw(rng);
}

MomentSheet moments(const DataModelSpec& spec, std::size_t d) { return DataModel(spec, d).moments(); }

std::string to_string(DataFamily f) {
  switch (f) {
    case DataFamily::SphereBingham: return "sphere-bingham";
    case DataFamily::BallUniform: return "ball-uniform";
    case DataFamily::DilatedBingham: return "dilated-bingham";
    case DataFamily::HypercubeRandomSide: return "hypercube";
    case DataFamily::GaussianProfile: return "gaussian-profile";
    case DataFamily::StudentT: return "student-t";
    case DataFamily::LaplaceData: return "laplace";
  }
  return "?";
}

std::string to_string(Profile p) {
  switch (p) {
    case Profile::LogHarmonic: return "log-harmonic";
    case Profile::Power: return "power";
    case Profile::Isotropic: return "isotropic";
  }
  return "?";
}

}  // namespace modlab
