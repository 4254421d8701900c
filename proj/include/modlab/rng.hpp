#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace modlab {

// A seed lineage. The generator for a stream is std::mt19937_64 seeded by
// std::seed_seq over the 32-bit words
//   lo(root), hi(root), path.size(), lo(p0), hi(p0), lo(p1), hi(p1), ...
// Both std::mt19937_64 and std::seed_seq are fully specified by the standard,
// so sequences are reproducible across platforms.
struct RngStream {
  std::uint64_t root = 0;
  std::vector<std::uint64_t> path;

  bool operator==(const RngStream&) const = default;
};

RngStream derive_stream(const RngStream& parent, std::initializer_list<std::uint64_t> label);
RngStream derive_stream(const RngStream& parent, const std::vector<std::uint64_t>& label);

// Draws from one stream. Variates come from Boost.Random distributions, whose
// algorithms are fixed by the library rather than by the standard library vendor.
class Rng {
 public:
  explicit Rng(const RngStream& s);

  std::uint64_t bits() { return eng_(); }
  // Uniform on [0, 1).
  double uniform() { return unif_(eng_); }
  // Uniform on (0, 1).
  double uniform_open() {
    double u;
    do u = unif_(eng_);
    while (u == 0.0);
    return u;
  }
  double normal() { return norm_(eng_); }
  double exponential() { return expo_(eng_); }
  double chi_squared(double nu) {
    boost::random::gamma_distribution<double> g(0.5 * nu, 2.0);
    return g(eng_);
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  boost::random::uniform_01<double> unif_;
  boost::random::normal_distribution<double> norm_;
  boost::random::exponential_distribution<double> expo_;
};

}  // namespace modlab
