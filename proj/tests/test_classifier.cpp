#include <gtest/gtest.h>

#include "hn/hn.hpp"
#include "oracles.hpp"

using namespace hn;

namespace {

MeasureSpec line_measure() { return corpus::hyperplane({1, 1}, 0, Poly2::constant(2, 1), kPi); }
MeasureSpec axes_measure() {
  return corpus::product({Dirac{0, kPi}, Lebesgue{1}}) + corpus::product({Lebesgue{1}, Dirac{0, kPi}});
}
MeasureSpec slope_measure() {
  return corpus::hyperplane({1, 2}, 0, poly2_from_json(json::parse(R"J({"(0,0)":"1","(2,0)":"1"})J"), 2), kPi);
}
MeasureSpec r3_measure() {
  return corpus::hyperplane({1, 2, 1}, 0,
                            poly2_from_json(json::parse(R"J({"(2,0,0)":"2","(1,1,0)":"2","(0,2,0)":"1"})J"), 3), kPi);
}
MeasureSpec atoms() { return corpus::product({Dirac{0, 1}, Dirac{0, 1}}); }
MeasureSpec gaussian() { return corpus::density(2, "exp(-t1^2-t2^2)"); }

}  // namespace

TEST(NevanlinnaResidual, Examples) {
  EXPECT_LT(std::abs(nevanlinna_residual(line_measure(), {kI, kI}, 0, 1)), 1e-6);
  EXPECT_NEAR(std::abs(nevanlinna_residual(atoms(), {kI, kI}, 0, 1) - 1.0), 0.0, 1e-12);
  EXPECT_LT(std::abs(nevanlinna_residual(corpus::lebesgue(2), {{0.4, 0.7}, {-1, 1.5}}, 0, 1)), 1e-8);
}

TEST(NevanlinnaResidual, IndexValidation) {
  EXPECT_THROW(nevanlinna_residual(line_measure(), {kI, kI}, 1, 0), Error);
  EXPECT_THROW(nevanlinna_residual(line_measure(), {kI, kI}, 0, 2), Error);
}

TEST(NevanlinnaResidual, CorpusSeparatesAtTwentyPoints) {
  const auto zs2 = random_upper_points(2, 20, 42);
  for (auto& mu : {line_measure(), axes_measure(), corpus::lebesgue(2), slope_measure(),
                   corpus::powerlaw(0.5, {0, 1, 1, 0}), corpus::density(2, "1/(1+(t1+t2)^2)")})
    EXPECT_LT(max_nevanlinna_residual(mu, zs2), 1e-5);
  EXPECT_LT(max_nevanlinna_residual(r3_measure(), random_upper_points(3, 20, 42)), 1e-5);
  for (auto& mu : {atoms(), corpus::powerlaw(0, {1, 0, 0, 1}), gaussian()})
    EXPECT_GT(max_nevanlinna_residual(mu, zs2), 1e-2);
}

TEST(Classify, OneDimensionIsAlwaysNevanlinna) {
  EXPECT_EQ(classify_by_residual(corpus::density(1, "exp(-t1^2)")).outcome, Outcome::Nevanlinna);
}

TEST(Classify, VerdictJsonIsStable) {
  Verdict v = classify_by_residual(atoms());
  EXPECT_EQ(v.outcome, Outcome::NotNevanlinna);
  EXPECT_EQ(verdict_to_json(v).dump(), verdict_to_json(classify_by_residual(atoms())).dump());
}

TEST(Pluriharmonic, Examples) {
  const std::vector<double> x{0, 0}, y{1, 1};
  EXPECT_LT(std::abs(pluriharmonic_residual(line_measure(), x, y, 0, 1, 1e-2)), 1e-4);
  EXPECT_GE(std::abs(pluriharmonic_residual(atoms(), x, y, 0, 1, 1e-2)), 0.01);
  EXPECT_LT(std::abs(pluriharmonic_residual(corpus::lebesgue(2), x, y, 0, 1, 1e-2)), 1e-6);
  EXPECT_THROW(pluriharmonic_residual(line_measure(), x, y, 0, 1, 0.3), Error);
}

TEST(Pluriharmonic, SecondOrderConvergence) {
  const std::vector<double> x{0.2, -0.1}, y{0.9, 1.2};
  const double r1 = std::abs(pluriharmonic_residual(line_measure(), x, y, 0, 1, 0.1));
  const double r2 = std::abs(pluriharmonic_residual(line_measure(), x, y, 0, 1, 0.05));
  EXPECT_GT(r1 / r2, 3.0);
  EXPECT_LT(r1 / r2, 5.0);
}

TEST(PowerLaw, Rule) {
  EXPECT_EQ(classify_powerlaw({0.5, {0, 1, 1, 0}}).outcome, Outcome::Nevanlinna);
  Verdict v = classify_powerlaw({0.0, {1, 0, 0, 1}});
  EXPECT_EQ(v.outcome, Outcome::NotNevanlinna);
  EXPECT_NEAR(v.residuals[0].value, 2.0, 1e-15);
  EXPECT_EQ(classify_powerlaw({0.25, {std::sqrt(2.0), 1, 1, 0}}).outcome, Outcome::Nevanlinna);
  // alpha = 0 only needs a11 + a22 = a12 + a21
  EXPECT_EQ(classify_powerlaw({0.0, {2, 1, 0, 0}}).outcome, Outcome::NotNevanlinna);
  EXPECT_EQ(classify_powerlaw({0.0, {2, 3, 0, 1}}).outcome, Outcome::Nevanlinna);
}

// The structural rule and the quadrature residual agree on a parameter grid.
TEST(PowerLaw, RuleAgreesWithResidual) {
  const double r = std::sqrt(0.5);
  for (double al : {-0.5, -0.25, 0.0, 0.25, 0.5})
    for (std::array<double, 4> a : {std::array<double, 4>{0, 1, 1, 0}, {1, 0, 0, 1}, {r, 1, 1, r}, {1, 1, 1, 1}, {0, 2, 1, 0}}) {
      PowerLaw2D p{al, a};
      EXPECT_EQ(classify_powerlaw(p).outcome, classify_by_residual(corpus::powerlaw(al, a)).outcome)
          << "alpha " << al << " a " << a[0] << "," << a[1] << "," << a[2] << "," << a[3];
    }
}

TEST(PowerLaw, FourierExamples) {
  EXPECT_LT(std::abs(powerlaw_fourier(0, 1, 1) - cplx(0, -1)), 1e-15);
  EXPECT_LT(std::abs(powerlaw_fourier(0.5, 1, 1) - std::polar(std::sqrt(kPi) / 2, -3 * kPi / 4)), 1e-15);
  EXPECT_THROW(powerlaw_fourier(0.5, 1, 0), Error);
}

TEST(PowerLaw, FourierAgainstRegularizedIntegral) {
  for (double al : {-0.25, 0.5})
    for (double xi : {-2.0, 1.0}) {
      cplx ref = oracle::fourier_halfline(al, xi);
      EXPECT_LT(std::abs(powerlaw_fourier(al, 1, xi) - ref), 1e-4) << al << " " << xi;
      // mirror image: x_-^alpha at xi equals x_+^alpha at -xi
      EXPECT_LT(std::abs(powerlaw_fourier(al, -1, xi) - oracle::fourier_halfline(al, -xi)), 1e-4);
    }
}

TEST(ProductRule, Examples) {
  MeasureSpec leb = corpus::lebesgue(1), atom = corpus::product({Dirac{0, kPi}});
  EXPECT_EQ(product_rule_check(leb, atom).outcome, Outcome::Nevanlinna);
  EXPECT_EQ(product_rule_check(atom, atom).outcome, Outcome::NotNevanlinna);
  EXPECT_EQ(product_rule_check(corpus::lebesgue(1, 2.0), leb).outcome, Outcome::Nevanlinna);
}

TEST(Finiteness, Examples) {
  const std::vector<double> radii{16, 32, 64, 128};
  EXPECT_EQ(finiteness_check(gaussian(), radii).outcome, Outcome::NotNevanlinna);
  EXPECT_EQ(finiteness_check(atoms(), radii).outcome, Outcome::NotNevanlinna);
  EXPECT_NE(finiteness_check(line_measure(), radii).outcome, Outcome::NotNevanlinna);
  EXPECT_EQ(finiteness_check(MeasureSpec{2, {}}, radii).outcome, Outcome::Inconclusive);
}
