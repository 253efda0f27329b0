#include <gtest/gtest.h>

#include "hn/hn.hpp"
#include "oracles.hpp"

using namespace hn;

namespace {

Poly2 poly(const char* text, int n) { return poly2_from_json(json::parse(text), n); }

Poly2 r3_density() { return poly(R"J({"(2,0,0)":"2","(1,1,0)":"2","(0,2,0)":"1"})J", 3); }
Poly2 planar() { return poly(R"J({"(2,0)":"2","(1,1)":"2","(0,2)":"1"})J", 2); }

MeasureSpec line_measure() { return corpus::hyperplane({1, 1}, 0, Poly2::constant(2, 1), kPi); }
MeasureSpec axes_measure() {
  return corpus::product({Dirac{0, kPi}, Lebesgue{1}}) + corpus::product({Lebesgue{1}, Dirac{0, kPi}});
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;  // sentinel: nothing thrown
}

}  // namespace

TEST(HyperplaneValidate, ThreeVariableExample) {
  Verdict v = validate({{1, 2, 1}, 0, r3_density()});
  EXPECT_EQ(v.outcome, Outcome::Nevanlinna);
  EXPECT_NE(v.notes.find("growth integral"), std::string::npos);
}

// The growth integral over the plane x1 + 2 x2 + x3 = 0, parametrized by (x1, x2).
TEST(HyperplaneValidate, GrowthIntegralAgainstIteratedOracle) {
  const double ref = oracle::integral_R2([](double a, double b) {
    const double c = -(a + 2 * b);
    return (2 * a * a + 2 * a * b + b * b) / ((1 + a * a) * (1 + b * b) * (1 + c * c));
  });
  EXPECT_NEAR(ref, 1.25 * kPi * kPi, 1e-8);
  EXPECT_NEAR(growth_norm(corpus::hyperplane({1, 2, 1}, 0, r3_density(), 1.0), {}).value, ref, 1e-8 * ref);
}

TEST(HyperplaneValidate, Rejections) {
  EXPECT_EQ(code_of([] { validate({{1, 1, 0}, 0, poly(R"J({"(0,0,2)":"1"})J", 3)}); }),
            ErrorCode::RejectedDependsOnInactiveVariable);
  EXPECT_EQ(code_of([] { validate({{1, 1}, 0, poly(R"J({"(3,0)":"1"})J", 2)}); }), ErrorCode::RejectedDegree);
  EXPECT_EQ(code_of([] { validate({{1, 1}, 0, poly(R"J({"(2,0)":"-1"})J", 2)}); }), ErrorCode::RejectedNegative);
}

TEST(HyperplaneValidate, PerfectSquareOnBoundaryAccepted) {
  // (x1 - x2)^2 restricted to x1 + x2 = 0 is 4 x1^2: PSD with a zero eigenvalue in the homogenized form.
  EXPECT_EQ(validate({{1, 1}, 0, poly(R"J({"(2,0)":"1","(1,1)":"-2","(0,2)":"1"})J", 2)}).outcome,
            Outcome::Nevanlinna);
}

TEST(HyperplaneMeasure, LineMeasure) {
  MeasureSpec mu = to_measure({{1, 1}, 0, Poly2::constant(2, 1)}, kPi);
  EXPECT_EQ(measure_to_json(mu).dump(), measure_to_json(line_measure()).dump());
  EXPECT_NEAR(cube_mass(mu, {0, 0}, 1.0, {}), 2 * kPi, 1e-12);
}

TEST(HyperplaneMeasure, ZeroDensity) { EXPECT_TRUE(to_measure({{1, 1}, 0, Poly2(2)}, 1.0).empty()); }

TEST(HyperplaneMeasure, OutputsSatisfyNevanlinnaCondition) {
  const std::vector<HyperplaneData> hs = {{{1, 2, 1}, 0, r3_density()},
                                          {{1, 1}, 0.5, Poly2::constant(2, 1)},
                                          {{2, 1}, -1, poly(R"J({"(0,0)":"1","(2,0)":"3"})J", 2)},
                                          {{1, 3}, 0, poly(R"J({"(1,0)":"2","(2,0)":"1","(0,0)":"1"})J", 2)}};
  for (auto& h : hs) {
    MeasureSpec mu = to_measure(h, kPi);
    EXPECT_LT(max_nevanlinna_residual(mu, random_upper_points(h.dim(), 3, 9)), 1e-5);
  }
}

TEST(Extremal, Examples) {
  EXPECT_TRUE(is_extremal(poly(R"J({"(2,0)":"1"})J", 2), 2));
  EXPECT_FALSE(is_extremal(planar(), 2));
  EXPECT_TRUE(is_extremal(Poly2::constant(2, 7), 2));
  EXPECT_TRUE(is_extremal(poly(R"J({"(2,0)":"1","(1,0)":"-2","(0,0)":"1"})J", 2), 2));
  EXPECT_FALSE(is_extremal(poly(R"J({"(2,0)":"1","(0,0)":"1"})J", 2), 2));
  EXPECT_FALSE(is_extremal(poly(R"J({"(2,0)":"-1"})J", 2), 2));
}

TEST(Decompose, PlanarExampleSumsExactly) {
  auto parts = decompose_extremal(planar());
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_TRUE(verify_decomposition(planar(), parts));
  Poly2 s(2);
  for (auto& p : parts) s += p;
  EXPECT_TRUE(s == planar());
}

TEST(Decompose, BothHandDecompositionsAccepted) {
  // x1^2 + (x1 + x2)^2, exact
  std::vector<Poly2> a = {poly(R"J({"(2,0)":"1"})J", 2), poly(R"J({"(2,0)":"1","(1,1)":"2","(0,2)":"1"})J", 2)};
  EXPECT_TRUE(verify_decomposition(planar(), a));
  // (sqrt2 x1 + x2/sqrt2)^2 + x2^2/2, float path
  const double r = std::sqrt(2.0);
  std::vector<Poly2f> b = {Poly2f::square_of_affine({r, 1 / r, 0.0}), 0.5 * Poly2f::square_of_affine({0.0, 1.0, 0.0})};
  EXPECT_TRUE(verify_decomposition(planar().cast<double>(), b));
  // a wrong split is refused
  std::vector<Poly2> c = {poly(R"J({"(2,0)":"2"})J", 2), poly(R"J({"(0,2)":"1"})J", 2)};
  EXPECT_FALSE(verify_decomposition(planar(), c));
}

TEST(Decompose, Constant) {
  auto parts = decompose_extremal(Poly2::constant(2, 5));
  ASSERT_EQ(parts.size(), 1u);
  EXPECT_TRUE(parts[0] == Poly2::constant(2, 5));
}

TEST(Decompose, NegativeRejected) {
  EXPECT_EQ(code_of([] { decompose_extremal(poly(R"J({"(2,0)":"1","(0,2)":"-1"})J", 2)); }), ErrorCode::NotDecomposable);
  EXPECT_EQ(code_of([] { decompose_extremal(poly(R"J({"(1,0)":"1"})J", 2)); }), ErrorCode::NotDecomposable);
}

// Exact sums, and the part count matches extremality, over random PSD quadratics.
TEST(Decompose, RandomNonnegativeQuadratics) {
  Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 2;
    Poly2 p(n);
    const int squares = 1 + trial % 3;
    for (int k = 0; k < squares; ++k) {
      std::vector<Rational> w;
      for (int l = 0; l <= n; ++l) w.emplace_back(static_cast<int>(rng.uniform(-4, 4)), 1 + static_cast<int>(rng.uniform(0, 3)));
      p += Poly2::square_of_affine(w);
    }
    if (p.is_zero()) continue;
    auto parts = decompose_extremal(p);
    EXPECT_TRUE(verify_decomposition(p, parts));
    if (is_extremal(p, n)) EXPECT_EQ(parts.size(), 1u);
    else EXPECT_GE(parts.size(), 2u);
  }
}

TEST(MixedNormal, Examples) {
  EXPECT_EQ(mixed_normal_restriction(line_measure(), {1, -1}, 0), 0.0);
  EXPECT_EQ(mixed_normal_restriction(corpus::lebesgue(2), {2, -3}, 1), 0.0);
  EXPECT_EQ(mixed_normal_restriction(axes_measure(), {1, -1}, 0), 0.0);
  EXPECT_THROW(mixed_normal_restriction(line_measure(), {1, 1}, 0), Error);
  EXPECT_THROW(mixed_normal_restriction(line_measure(), {0, -1}, 0), Error);
}

TEST(MixedNormal, NonNevanlinnaLineIsCharged) {
  // an atom at the origin sits on every line through it
  MeasureSpec diag = corpus::product({Dirac{0, 1}, Dirac{0, 1}});
  EXPECT_GT(mixed_normal_restriction(diag, {1, -1}, 0), 0.0);
}

TEST(MixedNormal, CorpusAtRandomNormals) {
  Rng rng(17);
  const std::vector<MeasureSpec> corpus_measures = {
      line_measure(), axes_measure(), corpus::lebesgue(2), corpus::powerlaw(0.5, {0, 1, 1, 0}),
      corpus::density(2, "1/(1+(t1+t2)^2)"),
      corpus::hyperplane({1, 2}, 0, poly(R"J({"(0,0)":"1","(2,0)":"1"})J", 2), kPi)};
  for (auto& mu : corpus_measures)
    for (int k = 0; k < 10; ++k) {
      std::vector<double> nrm{rng.uniform(0.1, 3), -rng.uniform(0.1, 3)};
      if (k % 2) std::swap(nrm[0], nrm[1]);
      EXPECT_EQ(mixed_normal_restriction(mu, nrm, rng.uniform(-2, 2)), 0.0);
    }
  MeasureSpec r3 = corpus::hyperplane({1, 2, 1}, 0, r3_density(), kPi);
  for (int k = 0; k < 10; ++k) {
    std::vector<double> nrm{rng.uniform(-3, 3), rng.uniform(0.1, 3), -rng.uniform(0.1, 3)};
    EXPECT_EQ(mixed_normal_restriction(r3, nrm, rng.uniform(-2, 2)), 0.0);
  }
}
