#pragma once

#include <optional>
#include <span>
#include <vector>

#include "modlab/datamodels.hpp"
#include "modlab/modulators.hpp"
#include "modlab/numerics.hpp"
#include "modlab/stats.hpp"

namespace modlab {

// A = X'X for k columns of length d, with its factorization when A is
// numerically positive definite.
class GramMatrix {
 public:
  std::size_t order() const { return a_.order(); }
  const SymMatrix& matrix() const { return a_; }
  bool singular() const { return !factor_.has_value(); }
  const CholeskyFactor& factor() const;
  double logdet() const;
  double quad_inv_ones() const;

 private:
  friend GramMatrix build_gram(std::span<const double> columns, std::size_t k, std::size_t d,
                               std::span<const double> diag);
  explicit GramMatrix(SymMatrix a) : a_(std::move(a)) {}
  SymMatrix a_;
  std::optional<CholeskyFactor> factor_;
  double logdet_ = 0.0;
  double qio_ = 0.0;
};

GramMatrix build_gram(const std::vector<std::vector<double>>& columns);
// columns stored back to back: column i occupies [i*d, (i+1)*d).
// When diag is nonempty it supplies the squared norms, e.g. exact radii from a sampler.
GramMatrix build_gram(std::span<const double> columns, std::size_t k, std::size_t d,
                      std::span<const double> diag = {});

// (2 pi)^{-k/2} v^{-k} det(A)^{-1/2} exp(-y^2 1'A^{-1}1 / (2 v^2)); throws SingularGram.
double density_power_term(const GramMatrix& g, double v, double y);

EstimateReport collapsed_cf_mean(const DataModelSpec& model, const ModulatorSpec& mod, std::size_t d,
                                 double t, std::size_t reps, const RngStream& stream,
                                 const Exec& exec = {});
EstimateReport collapsed_cf_sqmean(const DataModelSpec& model, const ModulatorSpec& mod, std::size_t d,
                                   double t, std::size_t reps, const RngStream& stream,
                                   const Exec& exec = {});

struct RateValue {
  double value = 0.0;
  double se = 0.0;
  bool exact = false;
};

// j E(||X||^2 - sigma^2)^2 + j(j-1) E[(X'X~)^2] from exact moments, if available.
std::optional<double> gram_rate_exact(const MomentSheet& m, double sigma, int j);
// The same quantity with [E(X'X~)]^2 in the cross term; zero-mean families make it j E(||X||^2 - sigma^2)^2.
std::optional<double> gram_rate_literal(const MomentSheet& m, double sigma, int j);
// Exact when the moment sheet allows, otherwise Monte Carlo over reps draws.
RateValue gram_rate(const DataModelSpec& model, std::size_t d, int j, std::size_t reps,
                    const RngStream& stream, const Exec& exec = {});

// Direct Monte Carlo of E ||A_{d,j} - sigma^2 I||_F^2.
EstimateReport frobenius_gap_mc(const DataModelSpec& model, std::size_t d, int j, std::size_t reps,
                                const RngStream& stream, const Exec& exec = {});

EstimateReport det_invsqrt_moment(const DataModelSpec& model, std::size_t d, int k, std::size_t reps,
                                  const RngStream& stream, const Exec& exec = {});

// 2^{-k/2} d^{k/2} sigma^{-k} prod_{i=1..k} Gamma((d-i)/2) / Gamma((d-i+1)/2)
double wishart_det_invsqrt_exact(std::size_t d, int k, double sigma);

}  // namespace modlab
