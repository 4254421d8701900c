#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "modlab/errors.hpp"

namespace modlab {

// Dense symmetric k x k matrix, row-major, both triangles stored.
class SymMatrix {
 public:
  explicit SymMatrix(std::size_t k);
  SymMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static SymMatrix identity(std::size_t k, double scale = 1.0);

  std::size_t order() const { return k_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * k_ + j]; }
  // Writes both (i,j) and (j,i).
  void set(std::size_t i, std::size_t j, double v);
  double trace() const;
  const std::vector<double>& data() const { return a_; }

  bool operator==(const SymMatrix&) const = default;

 private:
  std::size_t k_;
  std::vector<double> a_;
};

class CholeskyFactor {
 public:
  std::size_t order() const { return k_; }
  double operator()(std::size_t i, std::size_t j) const { return l_[i * k_ + j]; }

 private:
  friend CholeskyFactor cholesky(const SymMatrix& a);
  std::size_t k_ = 0;
  std::vector<double> l_;
};

// Throws NotPositiveDefinite when a pivot drops below k * eps * max diagonal.
CholeskyFactor cholesky(const SymMatrix& a);

double logdet(const CholeskyFactor& f);

// 1' A^{-1} 1 through forward and back substitution.
double quad_inv_ones(const CholeskyFactor& f);

// Solves A x = b in place.
void cholesky_solve(const CholeskyFactor& f, std::span<double> b);

// ||a - s I||_F
double frob_dist_to_scaled_identity(const SymMatrix& a, double s);

double log_gamma(double x);

inline constexpr double kEulerGamma = 0.57721566490153286061;
inline constexpr double kPi = 3.14159265358979323846;

double normal_pdf(double x);
double normal_cdf(double x);

}  // namespace modlab
