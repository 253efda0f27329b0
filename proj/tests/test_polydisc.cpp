#include <gtest/gtest.h>

#include "hn/hn.hpp"
#include "oracles.hpp"

using namespace hn;

namespace {

MeasureSpec line_measure() { return corpus::hyperplane({1, 1}, 0, Poly2::constant(2, 1), kPi); }

TorusMeasureSpec beta(int k, int n = 2) { return {n, {BetaProduct{k, 1.0}}}; }
TorusMeasureSpec pushed_line() { return {2, {Pushforward{line_measure()}}}; }
TorusMeasureSpec atom() { return {2, {TorusAtom{{kPi / 3, kPi / 5}, 1.0}}}; }
TorusMeasureSpec density(const std::string& f) { return {2, {TorusDensity{Expr::parse(f)}}}; }

HerglotzParams params(double a, std::vector<double> b, MeasureSpec mu) { return {a, std::move(b), std::move(mu)}; }

TestFunction tf(const std::string& s) {
  TestFunction f;
  f.psi = Expr::parse(s);
  return f;
}

}  // namespace

TEST(Cayley, Examples) {
  EXPECT_EQ(cayley(kI), cplx(0));
  EXPECT_LT(std::abs(cayley_inv(0.0) - kI), 1e-16);
  EXPECT_THROW(cayley(cplx(1, -1)), Error);
  Rng rng(2);
  for (int k = 0; k < 50; ++k) {
    cplx z(rng.uniform(-5, 5), rng.uniform(0.01, 5));
    EXPECT_LT(std::abs(cayley(z)), 1.0);
    EXPECT_LT(std::abs(cayley_inv(cayley(z)) - z), 1e-12 * (1 + std::abs(z)));
  }
}

TEST(Cayley, BoundaryAngles) {
  EXPECT_DOUBLE_EQ(boundary_angle(0.0), kPi);
  for (double t : {-3.0, -0.2, 0.7, 12.0}) EXPECT_NEAR(boundary_point(boundary_angle(t)), t, 1e-12 * (1 + t * t));
}

TEST(Fourier, BetaCoefficients) {
  TorusFourier F(beta(0), 3);
  EXPECT_EQ(F({2, 0}), cplx(1));
  EXPECT_EQ(F({-3, 0}), cplx(1));
  EXPECT_EQ(F({0, 1}), cplx(0));
}

TEST(Fourier, DensityAgainstMidpointOracle) {
  const std::string f = "1 + 0.5*cos(s1 - 2*s2) + 0.3*sin(3*s1)*cos(s2)";
  TorusFourier F(density(f), 4);
  auto fn = [](double a, double b) { return 1 + 0.5 * std::cos(a - 2 * b) + 0.3 * std::sin(3 * a) * std::cos(b); };
  for (int j1 = -4; j1 <= 4; ++j1)
    for (int j2 = -4; j2 <= 4; ++j2) {
      EXPECT_LT(std::abs(F({j1, j2}) - oracle::torus_coefficient(fn, j1, j2, 64)), 1e-12) << j1 << "," << j2;
      EXPECT_LT(F.aliasing({j1, j2}), 1e-12);
    }
}

TEST(Fourier, PushedLineAgainstClosedForm) {
  TorusFourier F(pushed_line(), 3);
  for (int j1 = -3; j1 <= 3; ++j1)
    for (int j2 = -3; j2 <= 3; ++j2)
      EXPECT_LT(std::abs(F({j1, j2}) - oracle::line_pushforward_coefficient(j1, j2)), 1e-8) << j1 << "," << j2;
}

TEST(Fourier, BoundedByMass) {
  for (auto nu : {pushed_line(), density("1 + 0.9*cos(s1+s2)"), atom(), beta(1)}) {
    TorusFourier F(nu, 4);
    const double m = F({0, 0}).real();
    for (int j1 = -4; j1 <= 4; ++j1)
      for (int j2 = -4; j2 <= 4; ++j2) EXPECT_LE(std::abs(F({j1, j2})), m + 1e-9);
  }
}

TEST(RPCheck, Examples) {
  EXPECT_EQ(rp_check(beta(0), 8).outcome, Outcome::RP);
  EXPECT_EQ(rp_check(beta(1), 8).outcome, Outcome::RP);
  EXPECT_EQ(rp_check(pushed_line(), 8).outcome, Outcome::RP);
  Verdict v = rp_check(atom(), 2);
  EXPECT_EQ(v.outcome, Outcome::NotRP);
  EXPECT_NEAR(v.residuals[0].value, 1.0, 1e-15);
  EXPECT_EQ(rp_check(density("1 + 0.5*cos(s1+s2)"), 4).outcome, Outcome::RP);
  EXPECT_EQ(rp_check(density("1 + 0.5*cos(s1-s2)"), 4).outcome, Outcome::NotRP);
}

TEST(RPCheck, CoefficientTable) {
  std::vector<CoefficientRow> table;
  rp_check(atom(), 1, {}, 1e-5, &table);
  EXPECT_EQ(table.size(), 2u);  // (1,-1) and (-1,1)
}

TEST(RPCheck, ForwardCorrespondenceOnCorpus) {
  const std::vector<HerglotzParams> ps = {
      params(0, {0, 0}, line_measure()),
      params(1, {0.5, 0}, corpus::product({Dirac{0, kPi}, Lebesgue{1}}) + corpus::product({Lebesgue{1}, Dirac{0, kPi}})),
      params(0, {0, 0}, corpus::lebesgue(2)),
      params(0, {0, 2}, corpus::hyperplane({1, 2}, 0, poly2_from_json(json::parse(R"J({"(0,0)":"1","(2,0)":"1"})J"), 2), kPi))};
  for (auto& p : ps) EXPECT_EQ(rp_check(params_to_rp(p).nu, 6).outcome, Outcome::RP);
}

TEST(Restriction, BetaSlots) {
  auto r = restriction_Mk(beta(0), 0);
  EXPECT_EQ(r.d, 1.0);
  EXPECT_EQ(r.residual, 0.0);
  EXPECT_EQ(restriction_Mk(beta(0), 1).d, 0.0);
  EXPECT_EQ(restriction_Mk(pushed_line(), 0).d, 0.0);
  EXPECT_EQ(restriction_Mk(pushed_line(), 1).d, 0.0);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      auto rr = restriction_Mk(beta(j, 3), k);
      EXPECT_EQ(rr.d, j == k ? 1.0 : 0.0);
      EXPECT_EQ(rr.residual, 0.0);
    }
}

TEST(Params, ToTorus) {
  RPParams r = params_to_rp(params(0, {1, 0}, MeasureSpec{2, {}}));
  EXPECT_EQ(r.A, 0.0);
  ASSERT_EQ(r.nu.terms.size(), 1u);
  EXPECT_EQ(std::get<BetaProduct>(r.nu.terms[0]).k, 0);
  RPParams c = params_to_rp(params(3.5, {0, 0}, MeasureSpec{2, {}}));
  EXPECT_EQ(c.A, 3.5);
  EXPECT_TRUE(c.nu.empty());
  RPParams l = params_to_rp(params(0, {0, 0}, line_measure()));
  ASSERT_EQ(l.nu.terms.size(), 1u);
  EXPECT_TRUE(std::holds_alternative<Pushforward>(l.nu.terms[0]));
}

TEST(Params, FromTorus) {
  HerglotzParams p = rp_to_params({0, beta(1)});
  EXPECT_EQ(p.a, 0.0);
  EXPECT_EQ(p.b, (std::vector<double>{0, 1}));
  EXPECT_TRUE(p.mu.empty());
  HerglotzParams c = rp_to_params({2.5, {2, {}}});
  EXPECT_EQ(c.a, 2.5);
  EXPECT_EQ(c.b, (std::vector<double>{0, 0}));
}

TEST(Params, RoundTripPreservesParameters) {
  HerglotzParams p = params(-0.75, {0.5, 2}, line_measure());
  HerglotzParams back = rp_to_params(params_to_rp(p));
  EXPECT_EQ(back.a, p.a);
  EXPECT_EQ(back.b, p.b);
  const TestFunction psi = tf("exp(-t1^2)/(1+t2^2)");
  EXPECT_NEAR(pair(back.mu, psi, {}).value, pair(p.mu, psi, {}).value, 1e-5);
}

// A torus density pulled back to R^2 and pushed forward again keeps its coefficients.
TEST(Params, DensityRoundTripThroughHalfPlane) {
  TorusMeasureSpec nu = density("1 + 0.5*cos(s1+s2)");
  HerglotzParams p = rp_to_params({0, nu});
  TorusFourier direct(nu, 2), again(params_to_rp(p).nu, 2);
  for (int j1 = -2; j1 <= 2; ++j1)
    for (int j2 = -2; j2 <= 2; ++j2) EXPECT_LT(std::abs(direct({j1, j2}) - again({j1, j2})), 1e-5) << j1 << "," << j2;
}

TEST(Mass, TwoWays) {
  // torus-side midpoint rule vs the half-plane growth integral
  EXPECT_NEAR(torus_mass(pushed_line()), growth_norm(line_measure(), {}).value / (kPi * kPi), 1e-5);
  EXPECT_NEAR(torus_mass(pushed_line()), 0.5, 1e-5);
  EXPECT_NEAR(torus_mass(beta(0)), 1.0, 1e-12);
}

TEST(TorusValidation, Rejections) {
  EXPECT_THROW(density("cos(s1)").validate(), Error);
  EXPECT_THROW((TorusMeasureSpec{2, {BetaProduct{2, 1.0}}}.validate()), Error);
  EXPECT_THROW((TorusMeasureSpec{2, {TorusAtom{{0.1}, 1.0}}}.validate()), Error);
}
