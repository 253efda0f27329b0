#include <gtest/gtest.h>

#include "hn/hn.hpp"

using namespace hn;

namespace {

MeasureSpec line_measure() { return corpus::hyperplane({1, 1}, 0, Poly2::constant(2, 1), kPi); }
MeasureSpec axes_measure() {
  return corpus::product({Dirac{0, kPi}, Lebesgue{1}}) + corpus::product({Lebesgue{1}, Dirac{0, kPi}});
}
MeasureSpec gaussian() { return corpus::density(2, "exp(-t1^2-t2^2)"); }

std::vector<double> doubling(double r0, int count) {
  std::vector<double> r;
  for (int k = 0; k < count; ++k) r.push_back(r0 * std::pow(2.0, k));
  return r;
}

HerglotzParams params(MeasureSpec mu) {
  HerglotzParams p;
  p.b.assign(static_cast<size_t>(mu.dim), 0.0);
  p.mu = std::move(mu);
  return p;
}

}  // namespace

TEST(LowerGrowth, LineRatiosAreConstant) {
  GrowthReport r = lower_growth(line_measure(), doubling(1, 7));
  for (double v : r.lower_ratio) EXPECT_NEAR(v, 2 * kPi, 1e-9);
  EXPECT_EQ(r.lower, GrowthOutcome::Pass);
}

TEST(LowerGrowth, Examples) {
  EXPECT_EQ(lower_growth(corpus::lebesgue(2), doubling(1, 6)).lower, GrowthOutcome::Pass);
  EXPECT_EQ(lower_growth(axes_measure(), doubling(1, 6)).lower, GrowthOutcome::Pass);
  GrowthReport g = lower_growth(gaussian(), doubling(1, 7));
  EXPECT_EQ(g.lower, GrowthOutcome::Fail);
  EXPECT_NEAR(g.masses.back(), kPi, 1e-8);
}

TEST(LowerGrowth, RadiiValidation) {
  EXPECT_THROW(lower_growth(line_measure(), doubling(1, 5)), Error);
  EXPECT_THROW(lower_growth(line_measure(), {1, 2, 4, 8, 16, 33}), Error);
  EXPECT_THROW(lower_growth(corpus::lebesgue(3), doubling(1, 6)), Error);
}

TEST(LowerGrowth, MassesNondecreasing) {
  for (auto& mu : {line_measure(), axes_measure(), gaussian(), corpus::powerlaw(0.5, {0, 1, 1, 0})}) {
    GrowthReport r = lower_growth(mu, doubling(0.5, 7));
    for (size_t k = 1; k < r.masses.size(); ++k) EXPECT_GE(r.masses[k], r.masses[k - 1] - 1e-12);
  }
}

TEST(LowerGrowth, CsvColumns) {
  GrowthReport r = lower_growth(line_measure(), doubling(1, 6));
  const std::string csv = r.csv(2);
  EXPECT_EQ(csv.rfind("R,mass,ratio,bound_rhs\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
}

TEST(UpperBound, Examples) {
  std::vector<CubeSample> s;
  for (double y : {0.25, 1.0, 4.0, 16.0})
    for (double tx : {-3.0, 0.0, 2.0}) s.push_back({{tx, 0.5}, y});
  for (auto& mu : {line_measure(), axes_measure(), corpus::lebesgue(2), gaussian()}) {
    const double M = upper_bound_fit(mu, s);
    EXPECT_TRUE(std::isfinite(M));
    EXPECT_GT(M, 0.0);
  }
  EXPECT_EQ(upper_bound_fit(MeasureSpec{2, {}}, s), 0.0);
}

TEST(UpperBound, AtomsBlowUpAtSmallScales) {
  MeasureSpec atoms = corpus::product({Dirac{0, 1}, Dirac{0, 1}});
  EXPECT_GT(upper_bound_fit(atoms, {{{0, 0}, 1e-3}}), 1e3);
}

TEST(UpperBound, ScaleEquivariant) {
  std::vector<CubeSample> s{{{0, 0}, 1.0}, {{1, -1}, 2.0}, {{0.5, 0}, 0.25}};
  const double M = upper_bound_fit(line_measure(), s);
  for (double c : {0.5, 3.0}) EXPECT_NEAR(upper_bound_fit(scaled(line_measure(), c), s), c * M, 1e-9 * c * M);
}

TEST(UpperBound, LineMeasureSatisfiesBoundWithFittedConstant) {
  std::vector<CubeSample> s;
  for (double y : {0.5, 2.0, 8.0}) s.push_back({{1.0, 1.0}, y});
  const double M = upper_bound_fit(line_measure(), s);
  for (auto& c : s) EXPECT_LE(cube_mass(line_measure(), c.tau, c.y, {}), cube_bound(M, 2, c.tau, c.y) * (1 + 1e-12));
}

TEST(ConjectureProbe, Examples) {
  auto v = conjecture_probe(line_measure(), doubling(1, 4));
  for (double x : v) EXPECT_NEAR(x, 2 * kPi, 1e-9);
  MeasureSpec r3 = corpus::hyperplane(
      {1, 2, 1}, 0, poly2_from_json(json::parse(R"J({"(2,0,0)":"2","(1,1,0)":"2","(0,2,0)":"1"})J"), 3), kPi);
  for (double x : conjecture_probe(r3, doubling(1, 3))) EXPECT_GT(x, 0.0);
  EXPECT_THROW(conjecture_probe(corpus::lebesgue(1), {1}), Error);
}

TEST(RepresentationBound, FiniteOnCorpus) {
  auto zs = random_upper_points(2, 10, 5);
  for (auto& mu : {line_measure(), axes_measure(), corpus::lebesgue(2)}) {
    const double M = representation_bound_fit(params(mu), zs);
    EXPECT_TRUE(std::isfinite(M));
    EXPECT_GT(M, 0.0);
  }
  // -1/(z1 + z2) at z = (i, i): |q| = 1/2, weight sqrt(2) / 3
  EXPECT_NEAR(representation_bound_fit(params(line_measure()), {{kI, kI}}), 0.5 * std::sqrt(2.0) / 3, 1e-9);
}
