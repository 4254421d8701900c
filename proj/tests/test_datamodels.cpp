#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "modlab/datamodels.hpp"
#include "modlab/errors.hpp"
#include "modlab/stats.hpp"

using namespace modlab;

namespace {

DataModelSpec sphere(double sigma = 1.0) {
  DataModelSpec s;
  s.family = DataFamily::SphereBingham;
  s.sigma = sigma;
  return s;
}

DataModelSpec gaussian(Profile p, double r = 0.0) {
  DataModelSpec s;
  s.family = DataFamily::GaussianProfile;
  s.profile = p;
  s.power_r = r;
  return s;
}

struct NormStats {
  HigherMoments norm2;
  StreamingMoments cross2;
};

// Monte Carlo of ||X||^2 and (X'X~)^2 over n pairs.
NormStats simulate(const DataModel& m, std::size_t n, std::uint64_t seed) {
  Rng rng(RngStream{seed, {}});
  std::vector<double> x(m.dim()), y(m.dim());
  NormStats s;
  for (std::size_t i = 0; i < n; ++i) {
    s.norm2.add(m.draw(rng, x));
    m.draw(rng, y);
    const double c = std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
    s.cross2.add(c * c);
  }
  return s;
}

// Asymptotic Kolmogorov tail P(K > t).
double kolmogorov_tail(double t) {
  if (t < 0.2) return 1.0;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) p += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * t * t);
  return std::clamp(p, 0.0, 1.0);
}

double two_sample_ks_p(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double dmax = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    dmax = std::max(dmax, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  const double ne = double(a.size()) * b.size() / (a.size() + b.size());
  return kolmogorov_tail((std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * dmax);
}

}  // namespace

TEST(Sample, SphereDrawHasExactRadius) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto x = sample(sphere(), 5, RngStream{seed, {}});
    ASSERT_EQ(x.size(), 5u);
    const double n = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
    EXPECT_NEAR(n, 1.0, 1e-12);
  }
}

TEST(Sample, DrawReturnsSquaredNormOfTheDraw) {
  for (auto fam : {DataFamily::BallUniform, DataFamily::HypercubeRandomSide, DataFamily::StudentT,
                   DataFamily::LaplaceData, DataFamily::DilatedBingham}) {
    DataModelSpec s;
    s.family = fam;
    s.sigma = 1.3;
    DataModel m(s, 40);
    Rng rng(RngStream{4, {}});
    std::vector<double> x(40);
    for (int i = 0; i < 20; ++i) {
      const double r2 = m.draw(rng, x);
      EXPECT_NEAR(r2, std::inner_product(x.begin(), x.end(), x.begin(), 0.0), 1e-12 * r2) << to_string(fam);
    }
  }
}

TEST(Sample, HypercubeStaysInsideTheCube) {
  DataModelSpec s;
  s.family = DataFamily::HypercubeRandomSide;
  for (auto law : {SideLaw::Deterministic, SideLaw::Uniform}) {
    s.side_law = law;
    DataModel m(s, 30);
    const double half = 0.5 * m.side_mid() * (1.0 + 1.0 / std::sqrt(30.0));
    Rng rng(RngStream{8, {}});
    for (int i = 0; i < 200; ++i)
      for (double v : m.draw(rng)) ASSERT_LE(std::abs(v), half);
  }
}

TEST(Sample, IsotropicGaussianNormMoments) {
  DataModel m(gaussian(Profile::Isotropic), 1000);
  const auto s = simulate(m, 10000, 12);
  EXPECT_NEAR(s.norm2.mean(), 1.0, 3.0 * std::sqrt(s.norm2.variance() / 10000));
  EXPECT_NEAR(s.norm2.variance(), 2.0 / 1000, 3.0 * s.norm2.variance_se());
}

TEST(Sample, HypercubeDeterministicSideAtTwelve) {
  DataModelSpec s;
  s.family = DataFamily::HypercubeRandomSide;
  DataModel m(s, 12);
  EXPECT_DOUBLE_EQ(m.side_mid(), 1.0);
  const auto sheet = m.moments();
  EXPECT_NEAR(*sheet.e_norm2, 1.0, 1e-15);
  EXPECT_NEAR(*sheet.var_norm2, 1.0 / 15.0, 1e-15);
  const auto mc = simulate(m, 100000, 13);
  EXPECT_NEAR(mc.norm2.mean(), 1.0, 3.0 * std::sqrt(mc.norm2.variance() / 100000));
  EXPECT_NEAR(mc.norm2.variance(), 1.0 / 15.0, 3.0 * mc.norm2.variance_se());
}

TEST(Sample, RejectsTinyDimension) {
  EXPECT_THROW(DataModel(sphere(), 1), std::invalid_argument);
}

TEST(Moments, UniformSphere) {
  const auto m = moments(sphere(), 10);
  EXPECT_EQ(*m.e_norm2, 1.0);
  EXPECT_EQ(*m.var_norm2, 0.0);
  EXPECT_NEAR(*m.e_cross2, 0.1, 1e-15);
}

TEST(Moments, PowerProfileFlat) {
  const auto m = moments(gaussian(Profile::Power, 0.0), 100);
  EXPECT_NEAR(*m.e_norm2, 1.0, 1e-13);
  EXPECT_NEAR(*m.var_norm2, 0.02, 1e-15);
  EXPECT_NEAR(*m.e_cross2, 0.01, 1e-15);
}

TEST(Moments, StudentTLowerBoundLimit) {
  DataModelSpec s;
  s.family = DataFamily::StudentT;
  s.nu = 6.0;
  const auto m = moments(s, 1000000);
  EXPECT_NEAR(*m.var_norm2_lower, 1.0 / 12.0, 1e-6);
  // The exact variance tends to 2/(nu-4) = 1, above the bound.
  EXPECT_GT(*m.var_norm2, *m.var_norm2_lower);
  EXPECT_NEAR(*m.var_norm2, 1.0, 1e-5);
}

TEST(Moments, SheetInvariants) {
  for (auto fam : {DataFamily::SphereBingham, DataFamily::BallUniform, DataFamily::DilatedBingham,
                   DataFamily::HypercubeRandomSide, DataFamily::GaussianProfile, DataFamily::StudentT,
                   DataFamily::LaplaceData})
    for (std::size_t d : {2u, 7u, 64u, 1000u}) {
      DataModelSpec s;
      s.family = fam;
      const auto m = moments(s, d);
      if (m.var_norm2) EXPECT_GE(*m.var_norm2, 0.0) << to_string(fam) << " d=" << d;
      if (m.e_cross2) EXPECT_GE(*m.e_cross2, 0.0) << to_string(fam) << " d=" << d;
    }
}

TEST(Moments, CrossMomentIsFrobeniusOfCovariance) {
  DataModel m(gaussian(Profile::LogHarmonic), 50);
  double f = 0.0;
  for (double l : m.lambdas()) f += l * l;
  EXPECT_NEAR(*m.moments().e_cross2, f, 1e-15);
}

TEST(Moments, MonteCarloAgreesForExactFamilies) {
  // Pairs are within 3 SE. StudentT uses nu = 12 so the fourth moment of ||X||^2 exists.
  std::vector<DataModelSpec> specs;
  specs.push_back(sphere(1.5));
  {
    DataModelSpec s;
    s.family = DataFamily::BallUniform;
    specs.push_back(s);
    s.family = DataFamily::DilatedBingham;
    specs.push_back(s);
    s.family = DataFamily::HypercubeRandomSide;
    s.side_law = SideLaw::Uniform;
    specs.push_back(s);
    s.family = DataFamily::StudentT;
    s.nu = 12.0;
    specs.push_back(s);
    s.family = DataFamily::LaplaceData;
    s.nu = 3.0;
    specs.push_back(s);
  }
  specs.push_back(gaussian(Profile::Power, 1.0));
  std::uint64_t seed = 100;
  for (const auto& s : specs) {
    DataModel m(s, 20);
    const auto sheet = m.moments();
    const std::size_t n = 100000;
    const auto mc = simulate(m, n, seed++);
    const double se_mean = std::sqrt(mc.norm2.variance() / n);
    EXPECT_NEAR(mc.norm2.mean(), *sheet.e_norm2, 3.0 * se_mean + 1e-14) << to_string(s.family);
    EXPECT_NEAR(mc.norm2.variance(), *sheet.var_norm2, 3.0 * mc.norm2.variance_se() + 1e-14) << to_string(s.family);
    EXPECT_NEAR(mc.cross2.mean(), *sheet.e_cross2, 3.0 * mc.cross2.standard_error()) << to_string(s.family);
  }
}

TEST(Moments, VarianceNonincreasingAlongDoubling) {
  std::vector<DataModelSpec> specs{sphere(), gaussian(Profile::Isotropic)};
  DataModelSpec ball;
  ball.family = DataFamily::BallUniform;
  specs.push_back(ball);
  for (const auto& s : specs) {
    double prev = INFINITY;
    for (std::size_t d = 16; d <= 1024; d *= 2) {
      const double v = *moments(s, d).var_norm2;
      EXPECT_LE(v, prev) << to_string(s.family) << " d=" << d;
      prev = v;
    }
  }
}

TEST(Moments, StudentTViolatesFirstCondition) {
  DataModelSpec s;
  s.family = DataFamily::StudentT;
  s.nu = 6.0;
  DataModel m(s, 2048);
  const auto mc = simulate(m, 20000, 77);
  EXPECT_GT(mc.norm2.variance(), 1.0 / 12.0 - 0.02);
}

TEST(EigenProfile, Examples) {
  for (double l : eigen_profile(Profile::Power, 4, 1.0, 0.0)) EXPECT_DOUBLE_EQ(l, 0.25);
  const auto lh = eigen_profile(Profile::LogHarmonic, 10000, 1.0);
  const double tr = std::accumulate(lh.begin(), lh.end(), 0.0);
  EXPECT_LE(std::abs(tr - (kEulerGamma + std::log(1e4)) / std::log(1e4)), 1e-4);
  const auto p1 = eigen_profile(Profile::Power, 100, 1.0, 1.0);
  EXPECT_NEAR(std::accumulate(p1.begin(), p1.end(), 0.0), 1.01, 1e-13);
  EXPECT_THROW(eigen_profile(Profile::Power, 10, 1.0, -0.5), std::invalid_argument);
  EXPECT_THROW(eigen_profile(Profile::LogHarmonic, 2, 1.0), std::invalid_argument);
  for (double l : lh) EXPECT_GT(l, 0.0);
}

TEST(Bingham, DiagonalRuleHasZeroTrace) {
  for (std::size_t d : {2u, 3u, 9u, 100u, 1001u}) {
    const auto s = bingham_diagonal(0.7, 0.5, d);
    double tr = 0.0, f = 0.0;
    for (double v : s) {
      tr += v;
      f += v * v;
    }
    EXPECT_LE(std::abs(tr), 1e-12 * std::sqrt(f)) << d;
    // ||S||_F = O(d^{beta/2}): at most c d^{beta/2}.
    EXPECT_LE(std::sqrt(f), 0.7 * std::pow(double(d), 0.25) + 1e-12);
  }
}

TEST(Bingham, ZeroMatrixIsUniform) {
  BinghamSampler b(std::vector<double>(8, 0.0));
  EXPECT_TRUE(b.is_uniform());
  Rng rng(RngStream{21, {}});
  std::vector<double> x(8);
  StreamingMoments m;
  for (int i = 0; i < 100000; ++i) {
    b.draw(rng, x);
    m.add(x[0] * x[0]);
  }
  EXPECT_NEAR(m.mean(), 0.125, 3.0 * m.standard_error());
  EXPECT_EQ(b.acceptance_rate(), 1.0);
}

TEST(Bingham, MatchesQuadratureOracleInThreeDimensions) {
  // E(theta' S theta) for S = diag(c, -c, 0) on the 2-sphere by a midpoint grid in (z, phi).
  const double c = 1.0;
  const int nz = 800, nphi = 800;
  double num = 0.0, den = 0.0;
  for (int a = 0; a < nz; ++a) {
    const double z = -1.0 + (a + 0.5) * 2.0 / nz;
    const double rho = std::sqrt(1.0 - z * z);
    for (int b = 0; b < nphi; ++b) {
      const double phi = (b + 0.5) * 2.0 * kPi / nphi;
      const double x = rho * std::cos(phi), y = rho * std::sin(phi);
      const double q = c * x * x - c * y * y;
      const double w = std::exp(q);
      num += q * w;
      den += w;
    }
  }
  const double oracle = num / den;
  EXPECT_GT(oracle, 0.0);

  BinghamSampler b(std::vector<double>{c, -c, 0.0});
  Rng rng(RngStream{31, {}});
  std::vector<double> x(3);
  StreamingMoments m;
  for (int i = 0; i < 200000; ++i) {
    b.draw(rng, x);
    m.add(c * x[0] * x[0] - c * x[1] * x[1]);
  }
  EXPECT_NEAR(m.mean(), oracle, 3.0 * m.standard_error());
  EXPECT_GT(b.acceptance_rate(), 0.3);
}

TEST(Bingham, TiltTowardPositiveAxisInEightDimensions) {
  std::vector<double> s(8, 0.0);
  s[0] = 0.5;
  s[1] = -0.5;
  BinghamSampler b(s);
  Rng rng(RngStream{32, {}});
  std::vector<double> x(8);
  StreamingMoments m;
  for (int i = 0; i < 50000; ++i) {
    b.draw(rng, x);
    m.add(0.5 * x[0] * x[0] - 0.5 * x[1] * x[1]);
  }
  EXPECT_GT(m.mean(), 3.0 * m.standard_error());
}

TEST(Bingham, ShiftInvariance) {
  std::vector<double> s{1.5, -1.5, 0.5, -0.5, 0.0, 0.0};
  std::vector<double> shifted(s);
  for (auto& v : shifted) v -= 5.0;
  BinghamSampler b1(s), b2(shifted);
  Rng r1(RngStream{41, {}}), r2(RngStream{42, {}});
  std::vector<double> x(6), t1, t2;
  for (int i = 0; i < 10000; ++i) {
    b1.draw(r1, x);
    t1.push_back(x[0]);
    b2.draw(r2, x);
    t2.push_back(x[0]);
  }
  EXPECT_GT(two_sample_ks_p(t1, t2), 0.01);
}

TEST(Bingham, KsHelperDetectsShift) {
  std::vector<double> a, b;
  Rng r(RngStream{1, {}});
  for (int i = 0; i < 2000; ++i) {
    a.push_back(r.normal());
    b.push_back(r.normal() + 0.3);
  }
  EXPECT_LT(two_sample_ks_p(a, b), 1e-6);
}

TEST(Bingham, AntipodalSymmetry) {
  BinghamSampler b(bingham_diagonal(2.0, 0.5, 16));
  Rng rng(RngStream{51, {}});
  std::vector<double> x(16);
  StreamingMoments m;
  for (int i = 0; i < 50000; ++i) {
    b.draw(rng, x);
    m.add(x[0]);
  }
  EXPECT_LE(std::abs(m.mean()), 3.0 * m.standard_error());
}

TEST(Bingham, GeneralMatrixMatchesDiagonalAfterRotation) {
  // S = R diag(1, -1) R' with a 45 degree rotation: (theta1 + theta2)^2 / 2 carries the +1 direction.
  const SymMatrix s{{0.0, 1.0}, {1.0, 0.0}};
  Rng rng(RngStream{61, {}});
  StreamingMoments m;
  for (int i = 0; i < 50000; ++i) {
    const auto t = sample_bingham(s, rng);
    EXPECT_NEAR(t[0] * t[0] + t[1] * t[1], 1.0, 1e-12);
    m.add(2.0 * t[0] * t[1]);
  }
  // Oracle on the circle: E cos(2phi') under density exp(cos 2phi') = I1(1)/I0(1).
  const double oracle = 0.5651591039924850 / 1.2660658777520082;
  EXPECT_NEAR(m.mean(), oracle, 3.0 * m.standard_error());
}

TEST(Bingham, ExtremeConcentrationStillSamples) {
  std::vector<double> s(4, 0.0);
  s[0] = 200.0;
  s[1] = -200.0;
  BinghamSampler b(s);
  Rng rng(RngStream{71, {}});
  std::vector<double> x(4);
  for (int i = 0; i < 100; ++i) b.draw(rng, x);
  EXPECT_GT(b.acceptance_rate(), 1e-4);
}

TEST(Validate, RejectsBadSpecs) {
  DataModelSpec s;
  s.sigma = 0.0;
  EXPECT_THROW(validate(s), std::invalid_argument);
  s = {};
  s.beta = 1.0;
  EXPECT_THROW(validate(s), std::invalid_argument);
  s = {};
  s.family = DataFamily::StudentT;
  s.nu = 4.0;
  EXPECT_THROW(validate(s), std::invalid_argument);
  s = {};
  s.profile = Profile::Power;
  s.power_r = -0.6;
  EXPECT_THROW(validate(s), std::invalid_argument);
}
