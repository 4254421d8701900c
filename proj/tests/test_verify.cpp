#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "modlab/numerics.hpp"
#include "modlab/verify.hpp"

using namespace modlab;

namespace {

DataModelSpec sphere() {
  DataModelSpec s;
  s.family = DataFamily::SphereBingham;
  return s;
}

DataModelSpec iso_gaussian() {
  DataModelSpec s;
  s.family = DataFamily::GaussianProfile;
  s.profile = Profile::Isotropic;
  return s;
}

DataModelSpec ball() {
  DataModelSpec s;
  s.family = DataFamily::BallUniform;
  return s;
}

const TraceRow* find(const ConvergenceTrace& t, std::size_t d, const std::string& metric) {
  for (const auto& r : t.rows)
    if (r.d == d && r.metric == metric) return &r;
  return nullptr;
}

}  // namespace

TEST(CheckConditions, SphereHasZeroNormVariance) {
  const std::size_t sched[] = {16, 64, 256};
  const auto rep = check_conditions(sphere(), sched, 2000, RngStream{1, {}});
  for (std::size_t d : sched) {
    const auto* v = find(rep.trace, d, "var_norm2");
    ASSERT_NE(v, nullptr);
    EXPECT_EQ(v->estimate, 0.0);
    const auto* c = find(rep.trace, d, "var_cross");
    ASSERT_NE(c, nullptr);
    EXPECT_DOUBLE_EQ(*c->analytic, 1.0 / d);
    EXPECT_NEAR(c->estimate, 1.0 / d, 3.0 * c->se);
  }
  // d = 16 rows are reported without a verdict.
  EXPECT_FALSE(find(rep.trace, 16, "var_cross")->pass.has_value());
  EXPECT_TRUE(find(rep.trace, 64, "var_cross")->pass.value());
  EXPECT_TRUE(rep.trace.all_pass());
  EXPECT_TRUE(*rep.c1_vanishing);
  EXPECT_TRUE(*rep.c2_vanishing);
}

TEST(CheckConditions, RowsSortedByDimension) {
  const std::size_t sched[] = {32, 64};
  const auto rep = check_conditions(ball(), sched, 500, RngStream{2, {}});
  for (std::size_t i = 1; i < rep.trace.rows.size(); ++i) EXPECT_LE(rep.trace.rows[i - 1].d, rep.trace.rows[i].d);
  // det_invsqrt rows are present for every scheduled d.
  EXPECT_NE(find(rep.trace, 32, "det_invsqrt"), nullptr);
  EXPECT_NE(find(rep.trace, 64, "det_invsqrt"), nullptr);
}

TEST(CheckConditions, LogHarmonicMeanNorm) {
  DataModelSpec s = iso_gaussian();
  s.profile = Profile::LogHarmonic;
  const std::size_t sched[] = {100, 1000, 10000};
  const auto rep = check_conditions(s, sched, 200, RngStream{3, {}}, 0);
  for (std::size_t d : sched) {
    double h = 0.0;
    for (std::size_t i = 1; i <= d; ++i) h += 1.0 / double(i);
    const auto* e = find(rep.trace, d, "e_norm2");
    EXPECT_NEAR(*e->analytic, h / std::log(double(d)), 1e-12);
  }
  EXPECT_LT(*find(rep.trace, 10000, "e_norm2")->analytic, *find(rep.trace, 100, "e_norm2")->analytic);
}

TEST(CheckConditions, StudentTNotVanishing) {
  DataModelSpec s;
  s.family = DataFamily::StudentT;
  s.nu = 6.0;
  const std::size_t sched[] = {256, 2048};
  const auto rep = check_conditions(s, sched, 5000, RngStream{4, {}}, 0);
  for (std::size_t d : sched) EXPECT_GE(find(rep.trace, d, "var_norm2")->estimate, 1.0 / 12.0 - 0.02);
  EXPECT_FALSE(*rep.c1_vanishing);
  EXPECT_TRUE(find(rep.trace, 2048, "var_norm2_lower_bound")->pass.value());
}

TEST(DetInvSqrtExact, ClosedForms) {
  EXPECT_NEAR(*det_invsqrt_exact(iso_gaussian(), 16, 2), 8.0 / 7.0, 1e-13);
  EXPECT_EQ(*det_invsqrt_exact(sphere(), 64, 1), 1.0);
  EXPECT_FALSE(det_invsqrt_exact(ball(), 64, 2).has_value());
  // Sphere, k = 2: E(1 - c^2)^{-1/2} with c^2 ~ Beta(1/2, (d-1)/2), by midpoint quadrature in c.
  const std::size_t d = 40;
  const int n = 2000000;
  double acc = 0.0;
  const double lognorm = log_gamma(0.5 * d) - log_gamma(0.5 * (d - 1)) - 0.5 * std::log(kPi);
  for (int i = 0; i < n; ++i) {
    const double c = -1.0 + (i + 0.5) * 2.0 / n;
    acc += std::exp(lognorm + 0.5 * (d - 3.0) * std::log1p(-c * c)) / std::sqrt(1.0 - c * c);
  }
  EXPECT_NEAR(*det_invsqrt_exact(sphere(), d, 2), acc * 2.0 / n, 1e-8);
}

TEST(DensityPower, SphereIsExactForSingleColumn) {
  const double ys[] = {0.0, 1.0, 2.0};
  for (std::size_t d : {8u, 64u}) {
    const auto est = estimate_density_power(sphere(), ModulatorSpec{}, d, 1, ys, 1000, RngStream{5, {}});
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_NEAR(est.values[i].estimate, normal_pdf(ys[i]), 1e-12);
      EXPECT_EQ(est.values[i].se, 0.0);
    }
    EXPECT_EQ(est.singular, 0u);
  }
}

TEST(DensityPower, OracleConsistencyWithConditionalLaw) {
  // Average of the exact conditional density over xi draws vs the collapsed Gram estimator.
  const std::size_t d = 64;
  const double ys[] = {0.0, 1.0};
  const auto est = estimate_density_power(iso_gaussian(), ModulatorSpec{}, d, 1, ys, 10000, RngStream{6, {}});
  Rng rng(RngStream{7, {}});
  std::vector<double> xi(d);
  StreamingMoments acc[2];
  for (int r = 0; r < 10000; ++r) {
    for (auto& v : xi) v = rng.normal();
    const auto law = conditional_exact_law(iso_gaussian(), xi);
    for (int i = 0; i < 2; ++i) acc[i].add(law->pdf(ys[i]));
  }
  for (int i = 0; i < 2; ++i)
    EXPECT_NEAR(est.values[i].estimate, acc[i].mean(),
                3.0 * std::hypot(est.values[i].se, acc[i].standard_error()))
        << ys[i];
}

TEST(DensityPower, BallWithStudentModulator) {
  const ModulatorSpec t{ModFamily::StudentT, 6.0, 1.0};
  const double ys[] = {1.0};
  const auto est = estimate_density_power(ball(), t, 512, 1, ys, 50000, RngStream{8, {}});
  EXPECT_NEAR(est.values[0].estimate, limit_density_power({t, 1.0}, 1, 1.0), 3.0 * est.values[0].se + 1e-6);
}

TEST(CdfPower, Examples) {
  const double ys[] = {0.0, 1.0};
  const auto est = estimate_cdf_power(sphere(), ModulatorSpec{}, 1024, 2, ys, 100000, RngStream{9, {}});
  EXPECT_NEAR(est.values[1].estimate, normal_cdf(1.0) * normal_cdf(1.0), 3.0 * est.values[1].se);
  const double y0[] = {0.0};
  const auto half = estimate_cdf_power(sphere(), ModulatorSpec{}, 256, 1, y0, 20000, RngStream{10, {}});
  EXPECT_NEAR(half.values[0].estimate, 0.5, 3.0 * half.values[0].se);
  const ModulatorSpec st{ModFamily::StudentT, 6.0, 1.0};
  const double far[] = {10.0 * v_quantile(st, 0.99)};
  const auto tail = estimate_cdf_power(ball(), st, 64, 2, far, 5000, RngStream{11, {}});
  EXPECT_GE(tail.values[0].estimate, 0.999);
}

TEST(CdfPower, MonotoneAlongGrid) {
  std::vector<double> ys;
  for (int i = -20; i <= 20; ++i) ys.push_back(0.15 * i);
  const auto est = estimate_cdf_power(ball(), ModulatorSpec{ModFamily::Laplace, 4.0, 1.0}, 128, 2, ys, 20000,
                                      RngStream{12, {}});
  for (std::size_t i = 1; i < ys.size(); ++i)
    EXPECT_GE(est.values[i].estimate,
              est.values[i - 1].estimate - 3.0 * std::hypot(est.values[i].se, est.values[i - 1].se));
}

TEST(QuantConstant, Values) {
  const ModulatorSpec g{};
  EXPECT_NEAR(quant_constant(g, 1.0, 2), std::pow(2.0, 1.25) / kPi, 1e-15);
  EXPECT_NEAR(quant_constant(g, 1.0, 2), 0.7570728, 1e-7);
  EXPECT_NEAR(quant_constant(g, 1.0, 1), std::sqrt(2.0 / kPi), 1e-14);
  // Recompute 2^{-(j-2)/2} pi^{-j/2} j^{5/4} sigma^{-(j+1)} E V^{-j} by hand for a t modulator.
  const ModulatorSpec t{ModFamily::StudentT, 7.0, 1.0};
  for (int j = 1; j <= 4; ++j) {
    const double ref = std::pow(2.0, -(j - 2) / 2.0) * std::pow(kPi, -j / 2.0) * std::pow(j, 1.25) *
                       std::pow(1.5, -(j + 1)) * v_inverse_moment(t, j);
    EXPECT_NEAR(quant_constant(t, 1.5, j), ref, 1e-12 * ref);
  }
}

TEST(DensityBound, SphereSingleColumnNeverFails) {
  std::vector<double> grid;
  for (int i = -10; i <= 10; ++i) grid.push_back(0.5 * i);
  for (std::size_t d : {32u, 100u, 300u}) {
    const auto b = verify_density_bound(sphere(), ModulatorSpec{}, d, 1, grid, 500, RngStream{d, {}});
    EXPECT_EQ(b.rate, 0.0);
    EXPECT_EQ(b.rhs, 0.0);
    EXPECT_LE(b.lhs, 1e-12);
    EXPECT_TRUE(b.pass);
  }
}

TEST(DensityBound, SphereTwoColumns) {
  const auto grid = default_y_grid({ModulatorSpec{}, 1.0});
  const auto b = verify_density_bound(sphere(), ModulatorSpec{}, 256, 2, grid, 20000, RngStream{13, {}});
  EXPECT_NEAR(b.c_j, std::pow(2.0, 1.25) / kPi, 1e-15);
  EXPECT_NEAR(b.rhs, b.c_j * std::pow(2.0 / 256, 0.25), 1e-12);
  EXPECT_TRUE(b.pass);
  EXPECT_GE(b.rhs, 0.0);
}

TEST(DensityBound, StableModulatorOnGaussianData) {
  const ModulatorSpec st{ModFamily::Stable, 6.0, 1.0};
  const auto grid = default_y_grid({st, 1.0}, 41);
  const auto b = verify_density_bound(iso_gaussian(), st, 512, 1, grid, 20000, RngStream{14, {}});
  EXPECT_NEAR(b.c_j, std::sqrt(2.0 / kPi) * std::sqrt(2.0 / kPi), 1e-12);
  EXPECT_TRUE(b.pass);
}

TEST(CdfLipschitz, Examples) {
  const std::pair<double, double> sphere_pairs[] = {{-1.0, 1.0}, {0.5, 0.5}};
  const auto s = verify_cdf_lipschitz(sphere(), ModulatorSpec{}, 256, 1, sphere_pairs, 20000, RngStream{15, {}});
  EXPECT_EQ(s.rate, 0.0);
  EXPECT_NEAR(s.rows[0].lhs, 0.0, 3.0 * s.rows[0].se);
  EXPECT_EQ(s.rows[1].estimate, 0.0);
  EXPECT_EQ(s.rows[1].rhs, 0.0);
  EXPECT_TRUE(s.pass);

  const std::pair<double, double> ball_pairs[] = {{0.0, 1.0}};
  const auto b = verify_cdf_lipschitz(ball(), ModulatorSpec{}, 256, 1, ball_pairs, 20000, RngStream{16, {}});
  EXPECT_NEAR(b.c_j, 0.797885, 1e-6);
  EXPECT_NEAR(b.rows[0].rhs, b.c_j * std::pow(b.rate, 0.25), 1e-12);
  EXPECT_TRUE(b.pass);
}

TEST(StableVariance, ClosedFormAndEstimates) {
  EXPECT_NEAR(stable_variance_closed_form(1.0, 1.0, 1.0), std::exp(-std::sqrt(2.0)) - std::exp(-2.0), 1e-15);
  EXPECT_NEAR(stable_variance_closed_form(1.0, 1.0, 1.0), 0.1077815, 1e-7);
  EXPECT_EQ(stable_variance_closed_form(1.0, 1.0, 0.0), 0.0);
  const auto r = stable_variance_limit(sphere(), 1.0, 512, 1.0, 20000, RngStream{17, {}});
  EXPECT_NEAR(r.variance, *r.limit, 0.01 + 3.0 * r.se);
  const auto z = stable_variance_limit(sphere(), 1.0, 512, 0.0, 1000, RngStream{18, {}});
  EXPECT_EQ(z.variance, 0.0);
}

TEST(StableVariance, GaussianModulatorCollapses) {
  const auto r = cf_variance(sphere(), ModulatorSpec{}, 512, 1.0, 20000, RngStream{19, {}});
  EXPECT_LE(std::abs(r.variance), 3.0 * r.se + 2.0 / 512);
}

TEST(MatrixNormal, SphereAtHighDimension) {
  const auto rep = matrix_normal_test(sphere(), 1024, 2, 2, 20000, RngStream{20, {}});
  EXPECT_TRUE(rep.asserted);
  EXPECT_EQ(rep.entries.size(), 4u);
  EXPECT_EQ(rep.correlations.size(), 6u);
  for (const auto& c : rep.correlations) EXPECT_LE(std::abs(c.corr), 0.05);
  for (const auto& e : rep.entries) EXPECT_NEAR(e.variance, 1.0, 0.05);
}

TEST(MatrixNormal, TinyDimensionReportsWithoutVerdict) {
  const auto rep = matrix_normal_test(sphere(), 2, 2, 2, 1000, RngStream{21, {}});
  EXPECT_FALSE(rep.asserted);
  EXPECT_FALSE(rep.entries.empty());
}

TEST(MatrixNormal, SingleEntryKs) {
  const auto rep = matrix_normal_test(sphere(), 1024, 1, 1, 20000, RngStream{22, {}});
  ASSERT_TRUE(rep.ks.has_value());
  EXPECT_LE(*rep.ks, 0.02);
}

TEST(ConditionalLaw, Examples) {
  const std::vector<double> e1{1, 0, 0, 0};
  EXPECT_NEAR(conditional_exact_law(iso_gaussian(), e1)->pdf(0.0), std::sqrt(2.0 / kPi), 1e-14);
  const std::vector<double> e3{0, 1, 0};
  const auto s3 = conditional_exact_law(sphere(), e3);
  for (double y : {-0.9, 0.0, 0.3, 0.99}) EXPECT_NEAR(s3->pdf(y), 0.5, 1e-14);
  EXPECT_NEAR(s3->cdf(0.5), 0.75, 1e-14);
  const std::vector<double> e2{0.6, 0.8};
  EXPECT_NEAR(conditional_exact_law(sphere(), e2)->pdf(0.0), 1.0 / kPi, 1e-14);
  EXPECT_NEAR(conditional_exact_law(sphere(), e2)->cdf(0.5), 0.5 + std::asin(0.5) / kPi, 1e-14);
  EXPECT_EQ(conditional_exact_law(ball(), e2), nullptr);
  const std::vector<double> zero{0, 0};
  EXPECT_THROW(conditional_exact_law(sphere(), zero), std::invalid_argument);
}

TEST(ConditionalLaw, SphereDensityIntegratesToCdf) {
  const std::vector<double> xi{1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  const auto law = conditional_exact_law(sphere(), xi);
  const double lim = std::sqrt(2.0);
  const int n = 20000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += law->pdf(-lim + (i + 0.5) * 2.0 * lim / n);
  EXPECT_NEAR(s * 2.0 * lim / n, 1.0, 1e-6);
  EXPECT_NEAR(law->cdf(0.3) - law->cdf(-0.3), [&] {
    double a = 0.0;
    for (int i = 0; i < n; ++i) a += law->pdf(-0.3 + (i + 0.5) * 0.6 / n);
    return a * 0.6 / n;
  }(), 1e-8);
}

TEST(ConditionalLaw, SphereProjectionsMatchLaw) {
  // Sampled xi'X against the exact CDF, sphere at d = 5.
  const std::vector<double> xi{0.3, -1.2, 0.5, 0.0, 2.0};
  const auto law = conditional_exact_law(sphere(), xi);
  DataModel m(sphere(), 5);
  Rng rng(RngStream{23, {}});
  std::vector<double> ys;
  for (int r = 0; r < 20000; ++r) {
    const auto x = m.draw(rng);
    double y = 0.0;
    for (int i = 0; i < 5; ++i) y += x[i] * xi[i];
    ys.push_back(y);
  }
  // 1.63 / sqrt(n) is the 1% critical value.
  EXPECT_LE(ks_distance(ys, [&](double y) { return law->cdf(y); }), 1.63 / std::sqrt(20000.0));
}

TEST(KsDistance, HandComputed) {
  // Uniform CDF on [0,1]: samples 0.1, 0.5, 0.9 give sup max(1/3-0.1, 0.5-1/3, 2/3-0.5, 0.9-2/3, 1-0.9).
  const auto u = [](double y) { return std::clamp(y, 0.0, 1.0); };
  EXPECT_NEAR(ks_distance({0.9, 0.1, 0.5}, u), 0.9 - 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(ks_distance({0.5}, u), 0.5, 1e-15);
  EXPECT_THROW(ks_distance({}, u), std::invalid_argument);
}

TEST(ConvergenceTrace, SortIsStable) {
  ConvergenceTrace t;
  t.rows.push_back({64, std::nullopt, "a", 0, 0, {}, {}, {}});
  t.rows.push_back({16, std::nullopt, "b", 0, 0, {}, {}, true});
  t.rows.push_back({64, std::nullopt, "c", 0, 0, {}, {}, false});
  t.rows.push_back({16, std::nullopt, "d", 0, 0, {}, {}, {}});
  t.sort();
  EXPECT_EQ(t.rows[0].metric, "b");
  EXPECT_EQ(t.rows[1].metric, "d");
  EXPECT_EQ(t.rows[2].metric, "a");
  EXPECT_EQ(t.rows[3].metric, "c");
  EXPECT_FALSE(t.all_pass());
}
