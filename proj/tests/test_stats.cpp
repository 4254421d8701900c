#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "modlab/stats.hpp"

using namespace modlab;

TEST(StreamingMoments, FixedSample) {
  StreamingMoments m;
  for (double x : {1.0, 2.0, 3.0, 4.0}) m.add(x);
  EXPECT_EQ(m.count(), 4u);
  EXPECT_EQ(m.mean(), 2.5);
  EXPECT_DOUBLE_EQ(m.variance(), 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.variance(), m.m2() / 3.0);
}

TEST(StreamingMoments, ConstantSampleHasExactlyZeroSpread) {
  StreamingMoments a, b;
  for (int i = 0; i < 1000; ++i) a.add(0.3989422804014327);
  for (int i = 0; i < 77; ++i) b.add(0.3989422804014327);
  a.merge(b);
  EXPECT_EQ(a.mean(), 0.3989422804014327);
  EXPECT_EQ(a.variance(), 0.0);
  EXPECT_EQ(a.standard_error(), 0.0);
}

TEST(StreamingMoments, MergeEqualsConcatenation) {
  Rng r(RngStream{17, {}});
  std::vector<double> xs(1000000);
  for (auto& x : xs) x = r.normal() + 0.5;
  StreamingMoments all;
  for (double x : xs) all.add(x);
  // Uneven split into several parts, merged in order.
  const std::size_t cuts[] = {0, 1, 333333, 500000, 999999, 1000000};
  StreamingMoments merged;
  for (int p = 0; p + 1 < 6; ++p) {
    StreamingMoments part;
    for (std::size_t i = cuts[p]; i < cuts[p + 1]; ++i) part.add(xs[i]);
    merged.merge(part);
  }
  EXPECT_EQ(merged.count(), all.count());
  EXPECT_LE(std::abs(merged.mean() - all.mean()) / std::abs(all.mean()), 1e-12);
  EXPECT_LE(std::abs(merged.variance() - all.variance()) / all.variance(), 1e-12);
}

TEST(StreamingMoments, MergeWithEmpty) {
  StreamingMoments a, e;
  a.add(1.0);
  a.add(3.0);
  a.merge(e);
  EXPECT_EQ(a.mean(), 2.0);
  e.merge(a);
  EXPECT_EQ(e.mean(), 2.0);
  EXPECT_EQ(e.variance(), 2.0);
}

TEST(HigherMoments, MatchesTwoPassFormulas) {
  Rng r(RngStream{23, {}});
  std::vector<double> xs(50000);
  for (auto& x : xs) x = r.exponential();
  HigherMoments h, a, b;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    h.add(xs[i]);
    (i < 20000 ? a : b).add(xs[i]);
  }
  a.merge(b);
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double m2 = 0, m4 = 0;
  for (double x : xs) {
    m2 += (x - mean) * (x - mean);
    m4 += std::pow(x - mean, 4);
  }
  const double n = xs.size();
  const double kurt = n * m4 / (m2 * m2) - 3.0;
  for (const auto* m : {&h, &a}) {
    EXPECT_NEAR(m->mean(), mean, 1e-12);
    EXPECT_NEAR(m->variance(), m2 / (n - 1), 1e-10);
    EXPECT_NEAR(m->excess_kurtosis(), kurt, 1e-9);
  }
  // Exponential excess kurtosis is 6.
  EXPECT_NEAR(h.excess_kurtosis(), 6.0, 1.0);
}

TEST(CoMoments, CorrelationOfLinearlyRelatedVariables) {
  Rng r(RngStream{29, {}});
  CoMoments a(3), b(3);
  for (int i = 0; i < 20000; ++i) {
    const double x = r.normal(), e = r.normal();
    const double v[3] = {x, 2.0 * x + 1.0, x + e};
    (i % 3 ? a : b).add(v);
  }
  a.merge(b);
  EXPECT_NEAR(a.correlation(0, 1), 1.0, 1e-12);
  EXPECT_NEAR(a.correlation(0, 2), 1.0 / std::sqrt(2.0), 0.02);
  EXPECT_NEAR(a.covariance(1, 1), 4.0, 0.15);
}

TEST(RunBlocks, IndependentOfWorkerCount) {
  auto body = [](Rng& rng, StreamingMoments& a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) a.add(rng.normal());
  };
  const RngStream s{5, {1, 2}};
  const auto one = run_blocks(s, 10000, Exec{1}, StreamingMoments{}, body);
  const auto four = run_blocks(s, 10000, Exec{4}, StreamingMoments{}, body);
  EXPECT_EQ(one.count(), 10000u);
  EXPECT_EQ(one.mean(), four.mean());
  EXPECT_EQ(one.m2(), four.m2());
}

TEST(RunBlocks, PropagatesExceptions) {
  auto body = [](Rng&, StreamingMoments&, std::size_t) { throw std::runtime_error("boom"); };
  EXPECT_THROW(run_blocks(RngStream{1, {}}, 5000, Exec{2}, StreamingMoments{}, body), std::runtime_error);
}
