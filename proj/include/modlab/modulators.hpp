#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "modlab/rng.hpp"

namespace modlab {

enum class ModFamily { Gaussian, StudentT, Laplace, Stable };

// Spherically symmetric modulator Xi = V Z with Z standard normal.
// Stable is parameterized by its characteristic-function index: the CF is
// exp(-||u||^cf_index). The positive-stable mixing index is a = cf_index / 2.
struct ModulatorSpec {
  ModFamily family = ModFamily::Gaussian;
  double nu = 6.0;
  double cf_index = 1.0;

  bool operator==(const ModulatorSpec&) const = default;
};

void validate(const ModulatorSpec& spec);

struct MixtureLimit {
  ModulatorSpec mod;
  double sigma = 1.0;
};

// Schoenberg function: E exp(i u'Xi) = psi(||u||^2).
double psi(const ModulatorSpec& spec, double s);

double sample_v(const ModulatorSpec& spec, Rng& rng);

// Standard positive stable S_a with E exp(-t S_a) = exp(-t^a), 0 < a < 1.
double sample_positive_stable(double a, Rng& rng);

// Exact E(V^{-k}). Throws MomentDivergence for Laplace with k >= nu.
double v_inverse_moment(const ModulatorSpec& spec, int k);

// E h(V) by deterministic quadrature over the mixing law.
double expect_over_v(const ModulatorSpec& spec, const std::function<double(double)>& h);

// Quantile of V; used to size the default y grid.
double v_quantile(const ModulatorSpec& spec, double p);

// E_V [f_{N(0, sigma^2 V^2)}(y)]^j
double limit_density_power(const MixtureLimit& lim, int j, double y);
// E_V [F_{N(0, sigma^2 V^2)}(y)]^j
double limit_cdf_power(const MixtureLimit& lim, int j, double y);

struct PolyaResult {
  double max_residual = 0.0;
  double argmax_t = 0.0;
};

// max over the grid of |psi(t^2) - psi(t^2/2)^2|.
PolyaResult polya_residual(const ModulatorSpec& spec, std::span<const double> t_grid);

// Exact maximizer of the stable residual exp(-x) - exp(-c x), x = t^cf, c = 2^{1-cf/2}.
PolyaResult polya_stable_peak(double cf_index);

std::vector<double> default_y_grid(const MixtureLimit& lim, std::size_t points = 201);

std::string to_string(ModFamily f);

}  // namespace modlab
