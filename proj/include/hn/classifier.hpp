#pragma once

// Diagnostics deciding whether a measure is a Nevanlinna measure.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "hn/kernels.hpp"
#include "hn/measure.hpp"
#include "hn/verdict.hpp"

namespace hn {

inline constexpr double kResidualTol = 1e-5;

// Integral of 1/((t_j1 - z_j1)^2 (t_j2 - conj z_j2)^2) prod_{l != j1,j2} (1/(t_l - z_l) - 1/(t_l - conj z_l)).
// Indices are 0-based.
inline cplx nevanlinna_residual(const MeasureSpec& mu, const UpperPoint& z, int j1, int j2, const QuadConfig& q = {}) {
  check_upper(z);
  const int n = mu.dim;
  require(static_cast<int>(z.size()) == n, ErrorCode::Invalid, "point has wrong dimension");
  require(0 <= j1 && j1 < j2 && j2 < n, ErrorCode::Invalid, "need 0 <= j1 < j2 < n");
  std::vector<Fn1> f;
  for (int l = 0; l < n; ++l) {
    if (l == j1) f.push_back(fn::cauchy_sq(z[static_cast<size_t>(l)]));
    else if (l == j2) f.push_back(fn::cauchy_sq(std::conj(z[static_cast<size_t>(l)])));
    else f.push_back(fn::cauchy_diff(z[static_cast<size_t>(l)]));
  }
  Estimate e = integrate(mu, Integrand::product(1.0, std::move(f)), q);
  if (!std::isfinite(e.value.real()) || !std::isfinite(e.value.imag()))
    throw Error(ErrorCode::NonConvergent, "residual integral did not converge");
  return e.value;
}

inline std::vector<UpperPoint> random_upper_points(int n, int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<UpperPoint> out;
  for (int k = 0; k < count; ++k) {
    UpperPoint z;
    for (int l = 0; l < n; ++l) {
      double re = rng.uniform(-2.0, 2.0);
      double im = rng.uniform(0.3, 2.0);
      z.emplace_back(re, im);
    }
    out.push_back(z);
  }
  return out;
}

// Largest residual modulus over the given points and all index pairs.
inline double max_nevanlinna_residual(const MeasureSpec& mu, const std::vector<UpperPoint>& zs, const QuadConfig& q = {}) {
  double worst = 0.0;
  for (auto& z : zs)
    for (int j1 = 0; j1 < mu.dim; ++j1)
      for (int j2 = j1 + 1; j2 < mu.dim; ++j2) worst = std::max(worst, std::abs(nevanlinna_residual(mu, z, j1, j2, q)));
  return worst;
}

inline Verdict classify_by_residual(const MeasureSpec& mu, const QuadConfig& q = {}, int points = 4,
                                    std::uint64_t seed = 42, double tol = kResidualTol) {
  Verdict v;
  if (mu.dim < 2) {
    growth_norm(mu, q);
    v.outcome = Outcome::Nevanlinna;
    v.note("dimension 1: every measure with finite growth integral qualifies");
    return v;
  }
  std::vector<UpperPoint> zs = {UpperPoint(static_cast<size_t>(mu.dim), kI)};
  for (auto& z : random_upper_points(mu.dim, points - 1, seed)) zs.push_back(z);
  double r = max_nevanlinna_residual(mu, zs, q);
  v.residuals.push_back({"nevanlinna_condition", r, tol});
  v.outcome = v.from_residuals();
  return v;
}

// Mixed Wirtinger derivative d/dz_k d/dconj(z_j) of the Poisson extension by central differences.
inline cplx pluriharmonic_residual(const MeasureSpec& mu, const std::vector<double>& x, const std::vector<double>& y,
                                   int k, int j, double h, const QuadConfig& q = {}) {
  require(k != j, ErrorCode::Invalid, "need k != j");
  double ymin = *std::min_element(y.begin(), y.end());
  require(h > 0 && h < ymin / 4, ErrorCode::StepTooLarge, "step must be below min(y)/4");
  auto u = [&](int ax, double da, int bx, double db, bool ay, bool by) {
    std::vector<double> xx = x, yy = y;
    (ay ? yy : xx)[static_cast<size_t>(ax)] += da;
    (by ? yy : xx)[static_cast<size_t>(bx)] += db;
    return poisson_extension(mu, xx, yy, q);
  };
  auto mixed = [&](bool ky, bool jy) {
    return (u(k, h, j, h, ky, jy) - u(k, h, j, -h, ky, jy) - u(k, -h, j, h, ky, jy) + u(k, -h, j, -h, ky, jy)) /
           (4 * h * h);
  };
  double xx = mixed(false, false), xy = mixed(false, true), yx = mixed(true, false), yy = mixed(true, true);
  return 0.25 * cplx(xx + yy, xy - yx);
}

struct PowerLawClass {
  double alpha = 0.0;
  std::array<double, 4> a{};
  cplx A, B;

  explicit PowerLawClass(const PowerLaw2D& p) : alpha(p.alpha), a(p.a) {
    cplx e = std::polar(1.0, kPi * (alpha + 1.0));
    A = a[0] + a[1] * e + a[2] * std::conj(e) + a[3];
    B = std::conj(A);
  }
};

inline Verdict classify_powerlaw(const PowerLaw2D& p, double tol = 1e-9) {
  PowerLawClass c(p);
  Verdict v;
  v.residuals.push_back({"|A|", std::abs(c.A), tol});
  v.outcome = v.from_residuals();
  if (std::abs(p.alpha) > 0.5) v.note("|alpha| > 1/2 admits no nonzero Nevanlinna coefficients");
  return v;
}

// Fourier transform (kernel e^{-i x xi}) of x_+^alpha (side = +1) or x_-^alpha (side = -1).
inline cplx powerlaw_fourier(double alpha, int side, double xi) {
  require(xi != 0, ErrorCode::Domain, "xi must be nonzero");
  require(alpha > -1 && alpha < 1, ErrorCode::Domain, "alpha must lie in (-1, 1)");
  const double sg = xi > 0 ? 1.0 : -1.0;
  const double phase = -side * kPi * (alpha + 1.0) * sg / 2.0;
  return std::polar(std::tgamma(alpha + 1.0) * std::pow(std::abs(xi), -1.0 - alpha), phase);
}

// Structural test: every term is a constant multiple of Lebesgue measure.
inline bool is_lebesgue_multiple(const MeasureSpec& mu) {
  if (mu.empty()) return false;
  for (auto& term : mu.terms) {
    if (auto* d = std::get_if<DensityTerm>(&term)) {
      if (!d->f.is_constant()) return false;
    } else if (auto* p = std::get_if<ProductTerm>(&term)) {
      for (auto& f : p->factors)
        if (!std::holds_alternative<Lebesgue>(f)) return false;
    } else {
      return false;
    }
  }
  return true;
}

// Product-form terms of mu, or nullopt when some term does not factor over coordinates.
inline std::optional<std::vector<ProductTerm>> as_products(const MeasureSpec& mu) {
  std::vector<ProductTerm> out;
  for (auto& term : mu.terms) {
    if (auto* p = std::get_if<ProductTerm>(&term)) out.push_back(*p);
    else if (auto* pl = std::get_if<PowerLaw2D>(&term))
      for (auto& t : powerlaw_products(*pl)) out.push_back(t);
    else if (auto* d = std::get_if<DensityTerm>(&term)) {
      auto ps = density_products(*d, mu.dim);
      if (!ps) return std::nullopt;
      for (auto& t : *ps) out.push_back(t);
    } else {
      return std::nullopt;
    }
  }
  return out;
}

inline std::optional<MeasureSpec> tensor(const MeasureSpec& f1, const MeasureSpec& f2) {
  auto p1 = as_products(f1), p2 = as_products(f2);
  if (!p1 || !p2) return std::nullopt;
  MeasureSpec out{f1.dim + f2.dim, {}};
  for (auto& a : *p1)
    for (auto& b : *p2) {
      ProductTerm t;
      t.factors = a.factors;
      t.factors.insert(t.factors.end(), b.factors.begin(), b.factors.end());
      t.weight = a.weight * b.weight;
      out.terms.emplace_back(std::move(t));
    }
  return out;
}

inline Verdict product_rule_check(const MeasureSpec& f1, const MeasureSpec& f2, const QuadConfig& q = {},
                                  double tol = kResidualTol) {
  require(!f1.empty() && !f2.empty(), ErrorCode::Invalid, "product factors must be nonzero");
  auto passes = [&](const MeasureSpec& f) {
    if (f.dim == 1) return true;
    return classify_by_residual(f, q, 4, 42, tol).outcome == Outcome::Nevanlinna;
  };
  const bool leb1 = is_lebesgue_multiple(f1), leb2 = is_lebesgue_multiple(f2);
  const bool structural = (leb1 && passes(f2)) || (leb2 && passes(f1));
  Verdict v;
  v.note(std::string("lebesgue factor: ") + (leb1 ? "first" : leb2 ? "second" : "none"));
  auto prod = tensor(f1, f2);
  if (!prod) {
    v.note("product not representable as a product-term sum; residual not computed");
    v.outcome = Outcome::Inconclusive;
    return v;
  }
  double r = max_nevanlinna_residual(*prod, {UpperPoint(static_cast<size_t>(prod->dim), kI)}, q);
  v.residuals.push_back({"nevanlinna_condition", r, tol});
  Outcome byres = v.from_residuals();
  if (structural && byres == Outcome::Nevanlinna) v.outcome = Outcome::Nevanlinna;
  else if (!structural && byres == Outcome::NotNevanlinna) v.outcome = Outcome::NotNevanlinna;
  else {
    v.outcome = Outcome::Inconclusive;
    v.note("structural rule and residual disagree");
  }
  return v;
}

// Flags nonzero measures whose cube masses settle to a finite limit.
inline Verdict finiteness_check(const MeasureSpec& mu, const std::vector<double>& radii, const QuadConfig& q = {},
                                double rel_tol = 1e-6, double mass_tol = 1e-9) {
  require(mu.dim >= 2, ErrorCode::Invalid, "finiteness check needs n >= 2");
  require(radii.size() >= 2, ErrorCode::Invalid, "need at least two radii");
  Verdict v;
  std::vector<double> m;
  for (double R : radii) m.push_back(cube_mass(mu, std::vector<double>(static_cast<size_t>(mu.dim), 0.0), R, q));
  const double last = m.back(), prev = m[m.size() - 2];
  if (mu.empty() || last <= mass_tol) {
    v.note("trivial measure");
    return v;
  }
  if (std::abs(last - prev) <= rel_tol * last) {
    v.residuals.push_back({"finite_total_mass", last, mass_tol});
    v.outcome = Outcome::NotNevanlinna;
    v.note("cube masses converge to a finite nonzero limit");
  } else {
    v.note("cube masses keep growing");
  }
  return v;
}

}  // namespace hn
