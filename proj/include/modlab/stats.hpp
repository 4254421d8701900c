#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "modlab/rng.hpp"

namespace modlab {

// Welford accumulator; merge uses the Chan et al. pairwise update.
class StreamingMoments {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }
  void merge(const StreamingMoments& o);

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double m2() const { return m2_; }
  double variance() const { return n_ >= 2 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double standard_error() const {
    return n_ >= 2 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Central moments through order four (Pebay 2008 update and merge).
class HigherMoments {
 public:
  void add(double x);
  void merge(const HigherMoments& o);

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ >= 2 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  // Sample excess kurtosis n*M4/M2^2 - 3.
  double excess_kurtosis() const;
  // Standard error of the unbiased variance, from the fourth central moment.
  double variance_se() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0, m2_ = 0.0, m3_ = 0.0, m4_ = 0.0;
};

// Means and co-moment matrix of m jointly observed variables.
class CoMoments {
 public:
  CoMoments() = default;
  explicit CoMoments(std::size_t m) : m_(m), mean_(m, 0.0), c_(m * m, 0.0) {}

  void add(std::span<const double> x);
  void merge(const CoMoments& o);

  std::size_t count() const { return n_; }
  double mean(std::size_t i) const { return mean_[i]; }
  double covariance(std::size_t i, std::size_t j) const {
    return n_ >= 2 ? c_[i * m_ + j] / static_cast<double>(n_ - 1) : 0.0;
  }
  double correlation(std::size_t i, std::size_t j) const;

 private:
  std::size_t m_ = 0;
  std::size_t n_ = 0;
  std::vector<double> mean_;
  std::vector<double> c_;
};

// A Monte Carlo estimate with its seed lineage.
struct EstimateReport {
  double estimate = 0.0;
  double se = 0.0;
  std::size_t reps = 0;
  std::size_t excluded = 0;  // replicates dropped as singular
  RngStream lineage;
};

EstimateReport to_report(const StreamingMoments& m, const RngStream& lineage, std::size_t excluded = 0);

struct Exec {
  unsigned workers = 1;
};

// Replicates are cut into blocks of this size. Block b draws from
// derive_stream(stream, {b}), so results do not depend on the worker count.
inline constexpr std::size_t kBlockSize = 1024;

// Runs body(rng, acc, n) once per block with n replicates, then merges the
// per-block accumulators in block order.
template <class Acc, class Body>
Acc run_blocks(const RngStream& stream, std::size_t reps, const Exec& exec, const Acc& proto, Body&& body) {
  const std::size_t nblocks = (reps + kBlockSize - 1) / kBlockSize;
  std::vector<Acc> accs(nblocks, proto);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto work = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= nblocks) return;
      try {
        Rng rng(derive_stream(stream, {static_cast<std::uint64_t>(b)}));
        const std::size_t n = std::min(kBlockSize, reps - b * kBlockSize);
        body(rng, accs[b], n);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(nblocks);
      }
    }
  };

  const unsigned nthreads =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, exec.workers), nblocks));
  if (nthreads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  Acc total = proto;
  for (auto& a : accs) total.merge(a);
  return total;
}

}  // namespace modlab
