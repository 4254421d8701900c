#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "modlab/datamodels.hpp"
#include "modlab/gram.hpp"
#include "modlab/modulators.hpp"
#include "modlab/stats.hpp"

namespace modlab {

// Assertions are switched off below this dimension; rows are still reported.
inline constexpr std::size_t kMinAssertDim = 32;

struct TraceRow {
  std::size_t d = 0;
  std::optional<int> j;
  std::string metric;
  double estimate = 0.0;
  double se = 0.0;
  std::optional<double> analytic;
  std::optional<double> bound_rhs;
  std::optional<bool> pass;  // empty when not asserted
};

struct ConvergenceTrace {
  std::vector<TraceRow> rows;
  // Rows sorted by d, stable within equal d.
  void sort();
  bool all_pass() const;
};

struct ConditionsReport {
  ConvergenceTrace trace;
  // Verdicts need at least two schedule points.
  std::optional<bool> c1_vanishing;  // E(||X||^2 - sigma^2)^2 shrinks along the schedule
  std::optional<bool> c2_vanishing;  // E(X'X~)^2 shrinks along the schedule
};

// Closed forms of E[(det A_{d,k})^{-1/2}] where known: isotropic Gaussian data,
// and the uniform sphere for k <= 2.
std::optional<double> det_invsqrt_exact(const DataModelSpec& model, std::size_t d, int k);

ConditionsReport check_conditions(const DataModelSpec& model, std::span<const std::size_t> schedule,
                                  std::size_t reps, const RngStream& stream, int det_k = 2,
                                  const Exec& exec = {});

struct PowerEstimates {
  std::vector<double> y;
  std::vector<EstimateReport> values;
  std::size_t singular = 0;
};

PowerEstimates estimate_density_power(const DataModelSpec& model, const ModulatorSpec& mod, std::size_t d,
                                      int j, std::span<const double> y_grid, std::size_t reps,
                                      const RngStream& stream, const Exec& exec = {});

PowerEstimates estimate_cdf_power(const DataModelSpec& model, const ModulatorSpec& mod, std::size_t d,
                                  int j, std::span<const double> y_grid, std::size_t reps,
                                  const RngStream& stream, const Exec& exec = {});

// 2^{-(j-2)/2} pi^{-j/2} j^{5/4} sigma^{-(j+1)} E(V^{-j})
double quant_constant(const ModulatorSpec& mod, double sigma, int j);

struct BoundReport {
  std::size_t d = 0;
  int j = 0;
  double lhs = 0.0;
  double lhs_se = 0.0;  // SE at the maximizing grid point
  double max_se = 0.0;  // largest SE over the grid
  double argmax_y = 0.0;
  double rhs = 0.0;
  double c_j = 0.0;
  double rate = 0.0;
  double rate_se = 0.0;
  bool rate_exact = false;
  std::size_t singular = 0;
  bool pass = false;
};

BoundReport verify_density_bound(const DataModelSpec& model, const ModulatorSpec& mod, std::size_t d, int j,
                                 std::span<const double> y_grid, std::size_t reps, const RngStream& stream,
                                 const Exec& exec = {});

struct LipschitzRow {
  double a = 0.0;
  double y = 0.0;
  double estimate = 0.0;
  double se = 0.0;
  double limit = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

struct LipschitzReport {
  std::size_t d = 0;
  int j = 0;
  double c_j = 0.0;
  double rate = 0.0;
  bool rate_exact = false;
  std::vector<LipschitzRow> rows;
  bool pass = false;
};

LipschitzReport verify_cdf_lipschitz(const DataModelSpec& model, const ModulatorSpec& mod, std::size_t d, int j,
                                     std::span<const std::pair<double, double>> pairs, std::size_t reps,
                                     const RngStream& stream, const Exec& exec = {});

struct VarianceReport {
  double mean = 0.0, mean_se = 0.0;
  double sqmean = 0.0, sqmean_se = 0.0;
  double variance = 0.0, se = 0.0;
  std::optional<double> limit;
};

// Var_Xi phi_{Y|Xi}(t) = E psi(t^2 ||X - X~||^2) - [E psi(t^2 ||X||^2)]^2.
VarianceReport cf_variance(const DataModelSpec& model, const ModulatorSpec& mod, std::size_t d, double t,
                           std::size_t reps, const RngStream& stream, const Exec& exec = {});

// exp(-2^{alpha/2} sigma^alpha |t|^alpha) - exp(-2 sigma^alpha |t|^alpha)
double stable_variance_closed_form(double alpha, double sigma, double t);

VarianceReport stable_variance_limit(const DataModelSpec& model, double alpha, std::size_t d, double t,
                                     std::size_t reps, const RngStream& stream, const Exec& exec = {});

struct EntryStats {
  std::size_t row = 0, col = 0;
  double mean = 0.0, mean_se = 0.0;
  double variance = 0.0, variance_se = 0.0;
  double excess_kurtosis = 0.0;
};

struct CorrStats {
  std::size_t a = 0, b = 0;  // flattened entry indices, row-major l x k
  double corr = 0.0;
};

struct MatrixNormalReport {
  std::size_t d = 0, k = 0, l = 0;
  std::vector<EntryStats> entries;
  std::vector<CorrStats> correlations;
  std::optional<double> ks;  // k = l = 1 only
  bool asserted = false;
  bool pass = false;
};

struct MatrixNormalThresholds {
  double corr = 0.05;
  double variance = 0.02;  // relative to sigma^2
  double kurtosis = 0.05;
  double mean = 0.02;      // relative to sigma
  double ks = 0.01;
};

MatrixNormalReport matrix_normal_test(const DataModelSpec& model, std::size_t d, std::size_t k, std::size_t l,
                                      std::size_t reps, const RngStream& stream, const Exec& exec = {},
                                      const MatrixNormalThresholds& th = {});

// Exact law of Y = xi'X given xi.
class ConditionalLaw {
 public:
  virtual ~ConditionalLaw() = default;
  virtual double pdf(double y) const = 0;
  virtual double cdf(double y) const = 0;
};

// Empty for families without a closed form.
std::unique_ptr<ConditionalLaw> conditional_exact_law(const DataModelSpec& model, std::span<const double> xi);

// sup_y |F_n(y) - F(y)|
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

}  // namespace modlab
