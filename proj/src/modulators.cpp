#include "modlab/modulators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "modlab/errors.hpp"
#include "modlab/numerics.hpp"

namespace modlab {

namespace {

constexpr double kQuadTol = 1e-12;

// Boost's integrators are not const-callable in every release; one per thread.
boost::math::quadrature::sinh_sinh<double>& line_rule() {
  thread_local boost::math::quadrature::sinh_sinh<double> rule;
  return rule;
}

boost::math::quadrature::tanh_sinh<double>& interval_rule() {
  thread_local boost::math::quadrature::tanh_sinh<double> rule;
  return rule;
}

// log density of log Q for Q ~ chi^2_nu, evaluated at w = log q.
double log_chi2_logscale(double w, double nu) {
  return 0.5 * nu * w - 0.5 * std::exp(w) - 0.5 * nu * std::log(2.0) - log_gamma(0.5 * nu);
}

// log K(u) for the Kanter representation S = K(U) E^{-(1-a)/a}.
double log_kanter(double u, double a) {
  return std::log(std::sin(a * u)) - std::log(std::sin(u)) / a +
         (1.0 - a) / a * std::log(std::sin((1.0 - a) * u));
}

double stable_a(const ModulatorSpec& s) { return 0.5 * s.cf_index; }

}  // namespace

void validate(const ModulatorSpec& s) {
  switch (s.family) {
    case ModFamily::Gaussian:
      break;
    case ModFamily::StudentT:
      if (!(s.nu > 0.0)) throw std::invalid_argument("StudentT modulator requires nu > 0");
      break;
    case ModFamily::Laplace:
      if (!(s.nu >= 2.0)) throw std::invalid_argument("Laplace modulator requires nu >= 2");
      break;
    case ModFamily::Stable:
      if (!(s.cf_index > 0.0 && s.cf_index < 2.0))
        throw std::invalid_argument("Stable modulator requires 0 < cf_index < 2");
      break;
  }
}

double psi(const ModulatorSpec& spec, double s) {
  if (!(s >= 0.0)) throw std::domain_error("psi requires s >= 0");
  switch (spec.family) {
    case ModFamily::Gaussian:
      return std::exp(-0.5 * s);
    case ModFamily::Laplace:
      return std::pow(1.0 + s / spec.nu, -0.5 * spec.nu);
    case ModFamily::Stable:
      return std::exp(-std::pow(s, 0.5 * spec.cf_index));
    case ModFamily::StudentT:
      if (s == 0.0) return 1.0;
      return expect_over_v(spec, [s](double v) { return std::exp(-0.5 * s * v * v); });
  }
  return 0.0;
}

double sample_positive_stable(double a, Rng& rng) {
  const double u = kPi * rng.uniform_open();
  const double e = rng.exponential();
  return std::exp(log_kanter(u, a) - (1.0 - a) / a * std::log(e));
}

double sample_v(const ModulatorSpec& spec, Rng& rng) {
  switch (spec.family) {
    case ModFamily::Gaussian:
      return 1.0;
    case ModFamily::StudentT:
      return std::sqrt(spec.nu / rng.chi_squared(spec.nu));
    case ModFamily::Laplace:
      return std::sqrt(rng.chi_squared(spec.nu) / spec.nu);
    case ModFamily::Stable:
      return std::sqrt(2.0 * sample_positive_stable(stable_a(spec), rng));
  }
  return 1.0;
}

double v_inverse_moment(const ModulatorSpec& spec, int k) {
  if (k < 1) throw std::invalid_argument("v_inverse_moment requires k >= 1");
  const double kk = k;
  switch (spec.family) {
    case ModFamily::Gaussian:
      return 1.0;
    case ModFamily::StudentT: {
      const double nu = spec.nu;
      return std::exp(-0.5 * kk * std::log(0.5 * nu) + log_gamma(0.5 * (nu + kk)) - log_gamma(0.5 * nu));
    }
    case ModFamily::Laplace: {
      const double nu = spec.nu;
      if (kk >= nu)
        throw MomentDivergence("E(V^-k) diverges for the Laplace modulator when k >= nu");
      return std::exp(0.5 * kk * std::log(0.5 * nu) + log_gamma(0.5 * (nu - kk)) - log_gamma(0.5 * nu));
    }
    case ModFamily::Stable: {
      const double a = stable_a(spec);
      return std::exp(-0.5 * kk * std::log(2.0) + log_gamma(1.0 + kk / (2.0 * a)) - log_gamma(1.0 + 0.5 * kk));
    }
  }
  return 1.0;
}

double expect_over_v(const ModulatorSpec& spec, const std::function<double(double)>& h) {
  validate(spec);
  switch (spec.family) {
    case ModFamily::Gaussian:
      return h(1.0);
    case ModFamily::StudentT:
    case ModFamily::Laplace: {
      const double nu = spec.nu;
      const bool t = spec.family == ModFamily::StudentT;
      auto f = [&](double w) {
        const double lw = log_chi2_logscale(w, nu);
        if (lw < -745.0) return 0.0;
        const double v = t ? std::exp(0.5 * (std::log(nu) - w)) : std::exp(0.5 * (w - std::log(nu)));
        return h(v) * std::exp(lw);
      };
      return line_rule().integrate(f, kQuadTol);
    }
    case ModFamily::Stable: {
      const double a = stable_a(spec);
      const double rho = (1.0 - a) / a;
      auto outer = [&](double u) {
        const double lk = log_kanter(u, a);
        auto inner = [&](double w) {
          // e = exp(w); weight e^{-e} de = exp(w - e^w) dw
          const double lw = w - std::exp(w);
          if (lw < -745.0) return 0.0;
          const double v = std::exp(0.5 * (std::log(2.0) + lk - rho * w));
          return h(v) * std::exp(lw);
        };
        return line_rule().integrate(inner, kQuadTol);
      };
      return interval_rule().integrate(outer, 0.0, kPi, kQuadTol) / kPi;
    }
  }
  return 0.0;
}

double v_quantile(const ModulatorSpec& spec, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("v_quantile requires 0 < p < 1");
  validate(spec);
  switch (spec.family) {
    case ModFamily::Gaussian:
      return 1.0;
    case ModFamily::StudentT: {
      boost::math::chi_squared_distribution<double> chi(spec.nu);
      return std::sqrt(spec.nu / boost::math::quantile(chi, 1.0 - p));
    }
    case ModFamily::Laplace: {
      boost::math::chi_squared_distribution<double> chi(spec.nu);
      return std::sqrt(boost::math::quantile(chi, p) / spec.nu);
    }
    case ModFamily::Stable: {
      const double a = stable_a(spec);
      // P(V <= v) = P(S <= v^2/2) = (1/pi) int_0^pi exp(-(K(u)/s)^{a/(1-a)}) du
      auto cdf = [&](double v) {
        const double ls = std::log(0.5 * v * v);
        auto g = [&](double u) {
          return std::exp(-std::exp(a / (1.0 - a) * (log_kanter(u, a) - ls)));
        };
        return interval_rule().integrate(g, 0.0, kPi, 1e-10) / kPi;
      };
      double lo = -20.0, hi = 20.0;  // bracket in log v
      while (cdf(std::exp(hi)) < p) hi *= 2.0;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (cdf(std::exp(mid)) < p ? lo : hi) = mid;
      }
      return std::exp(0.5 * (lo + hi));
    }
  }
  return 1.0;
}

double limit_density_power(const MixtureLimit& lim, int j, double y) {
  if (j < 1) throw std::invalid_argument("limit_density_power requires j >= 1");
  if (!(lim.sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  if (lim.mod.family == ModFamily::Laplace && j >= lim.mod.nu)
    throw MomentDivergence("Laplace modulator: density power requires j < nu");
  const double jj = j;
  const double s2 = lim.sigma * lim.sigma;
  const double c = std::pow(2.0 * kPi * s2, -0.5 * jj);
  if (lim.mod.family == ModFamily::Gaussian) return c * std::exp(-0.5 * jj * y * y / s2);
  return c * expect_over_v(lim.mod, [&](double v) {
           return std::exp(-jj * std::log(v) - 0.5 * jj * y * y / (s2 * v * v));
         });
}

double limit_cdf_power(const MixtureLimit& lim, int j, double y) {
  if (j < 1) throw std::invalid_argument("limit_cdf_power requires j >= 1");
  if (!(lim.sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  if (lim.mod.family == ModFamily::Gaussian) return std::pow(normal_cdf(y / lim.sigma), j);
  if (y == 0.0) return std::pow(0.5, j);
  return expect_over_v(lim.mod, [&](double v) { return std::pow(normal_cdf(y / (lim.sigma * v)), j); });
}

PolyaResult polya_residual(const ModulatorSpec& spec, std::span<const double> t_grid) {
  if (t_grid.empty()) throw std::invalid_argument("polya_residual requires a nonempty grid");
  PolyaResult r{-1.0, 0.0};
  for (double t : t_grid) {
    const double s = t * t;
    const double half = psi(spec, 0.5 * s);
    const double res = std::abs(psi(spec, s) - half * half);
    if (res > r.max_residual) r = {res, t};
  }
  return r;
}

PolyaResult polya_stable_peak(double cf_index) {
  if (!(cf_index > 0.0 && cf_index < 2.0)) throw std::invalid_argument("cf_index must lie in (0, 2)");
  const double c = std::pow(2.0, 1.0 - 0.5 * cf_index);
  const double x = std::log(c) / (c - 1.0);
  return {std::exp(-x) - std::exp(-c * x), std::pow(x, 1.0 / cf_index)};
}

std::vector<double> default_y_grid(const MixtureLimit& lim, std::size_t points) {
  if (points < 2) throw std::invalid_argument("grid needs at least two points");
  const double half = 5.0 * lim.sigma * v_quantile(lim.mod, 0.99);
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = -half + 2.0 * half * static_cast<double>(i) / static_cast<double>(points - 1);
  return g;
}

std::string to_string(ModFamily f) {
  switch (f) {
    case ModFamily::Gaussian: return "gaussian";
    case ModFamily::StudentT: return "student-t";
    case ModFamily::Laplace: return "laplace";
    case ModFamily::Stable: return "stable";
  }
  return "?";
}

}  // namespace modlab
