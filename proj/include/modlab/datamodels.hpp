#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "modlab/numerics.hpp"
#include "modlab/rng.hpp"

namespace modlab {

enum class DataFamily {
  SphereBingham,
  BallUniform,
  DilatedBingham,
  HypercubeRandomSide,
  GaussianProfile,
  StudentT,
  LaplaceData,
};

enum class Profile { LogHarmonic, Power, Isotropic };
enum class RadiusRule { Constant, InverseD };  // r = sigma, or r = sigma (1 + rate/d)
enum class RadialLaw { Constant, Uniform };    // R = sigma, or R ~ U[sigma - sigma/sqrt(d), sigma + sigma/sqrt(d)]
enum class SideLaw { Deterministic, Uniform };

struct DataModelSpec {
  DataFamily family = DataFamily::SphereBingham;
  double sigma = 1.0;

  RadiusRule radius_rule = RadiusRule::Constant;
  double radius_rate = 0.0;

  // Bingham parameter: diagonal with entries +-c d^{(beta-1)/2}, trace zero.
  double bingham_c = 0.0;
  double beta = 0.0;

  RadialLaw radial_law = RadialLaw::Uniform;
  SideLaw side_law = SideLaw::Deterministic;

  Profile profile = Profile::Isotropic;
  double power_r = 0.0;
  double nu = 6.0;

  bool operator==(const DataModelSpec&) const = default;
};

void validate(const DataModelSpec& spec);

struct MomentSheet {
  std::size_t d = 0;
  std::optional<double> e_norm2;    // E||X||^2
  std::optional<double> var_norm2;  // Var ||X||^2
  std::optional<double> e_cross2;   // E (X'X~)^2
  // Lower bound on Var ||X||^2 quoted for the t family; kept apart from the exact value.
  std::optional<double> var_norm2_lower;
};

// lambda_1..lambda_d of the Gaussian covariance profile.
std::vector<double> eigen_profile(Profile profile, std::size_t d, double sigma, double r = 0.0);

// Diagonal of the alternating Bingham rule at dimension d.
std::vector<double> bingham_diagonal(double c, double beta, std::size_t d);

// Bingham sampler for density proportional to exp(theta' S theta) on the unit
// sphere, by rejection from an angular central Gaussian envelope.
class BinghamSampler {
 public:
  // S given by its eigenvalues, eigenvectors the coordinate axes.
  explicit BinghamSampler(std::vector<double> eigenvalues);
  // General symmetric S.
  explicit BinghamSampler(const SymMatrix& s);

  std::size_t dim() const { return a_.size(); }
  double envelope_b() const { return b_; }
  bool is_uniform() const { return uniform_; }

  // Writes a unit vector into out and returns the number of proposals used.
  std::size_t draw(Rng& rng, std::span<double> out) const;

  // Cumulative counts over every draw made through this sampler.
  std::size_t proposals() const { return counters_->proposals.load(); }
  std::size_t accepted() const { return counters_->accepted.load(); }
  double acceptance_rate() const;

  static constexpr std::size_t kFailureWindow = 1000000;
  static constexpr double kMinAcceptance = 1e-4;

 private:
  void init();

  struct Counters {
    std::atomic<std::size_t> proposals{0};
    std::atomic<std::size_t> accepted{0};
  };

  std::vector<double> a_;          // eigenvalues of lambda_max I - S, all >= 0
  std::vector<double> inv_sqrt_omega_;
  std::vector<double> rotation_;   // row-major eigenvectors, empty when diagonal
  double b_ = 0.0;
  double log_bound_ = 0.0;
  bool uniform_ = false;
  std::shared_ptr<Counters> counters_ = std::make_shared<Counters>();
};

std::vector<double> sample_bingham(const SymMatrix& s, Rng& rng);

// A family realized at one dimension, with per-d quantities cached.
// Draws are reentrant; distinct threads must use distinct Rng objects.
class DataModel {
 public:
  DataModel(const DataModelSpec& spec, std::size_t d);

  std::size_t dim() const { return d_; }
  const DataModelSpec& spec() const { return spec_; }

  // One draw into out (length d). Returns ||x||^2. Radial families return the
  // exact squared radius that was used to scale the draw.
  double draw(Rng& rng, std::span<double> out) const;
  std::vector<double> draw(Rng& rng) const;

  MomentSheet moments() const;

  // Radius for sphere and ball families.
  double radius() const { return radius_; }
  // Diagonal covariance of the Gaussian core for profile, t and Laplace families.
  const std::vector<double>& lambdas() const { return lambda_; }
  // Nominal side length for the hypercube family.
  double side_mid() const { return side_mid_; }
  const BinghamSampler* bingham() const { return bingham_.get(); }

 private:
  DataModelSpec spec_;
  std::size_t d_;
  double radius_ = 0.0;
  double side_mid_ = 0.0;
  std::vector<double> lambda_;
  std::vector<double> sqrt_lambda_;
  std::shared_ptr<BinghamSampler> bingham_;
};

std::vector<double> sample(const DataModelSpec& spec, std::size_t d, const RngStream& stream);
MomentSheet moments(const DataModelSpec& spec, std::size_t d);

std::string to_string(DataFamily f);
std::string to_string(Profile p);

}  // namespace modlab
