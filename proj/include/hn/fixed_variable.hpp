#pragma once

// Slices z -> q(z, zeta) of a function in n + m variables with the last m variables frozen at
// zeta in the upper half-plane. The slice's measure is only exposed through pairings.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "hn/kernels.hpp"
#include "hn/measure.hpp"
#include "hn/verdict.hpp"

namespace hn {

struct FixedSlice {
  HerglotzParams base;  // n + m variables
  UpperPoint zeta;      // m values
  int free_count = 1;   // n

  int m() const { return static_cast<int>(zeta.size()); }
  void validate() const {
    require(free_count >= 1, ErrorCode::Invalid, "need at least one free variable");
    require(base.dim() == free_count + m(), ErrorCode::Invalid, "base dimension must equal free_count + len(zeta)");
    require(m() >= 1, ErrorCode::Invalid, "need at least one frozen variable");
    check_upper(zeta);
  }
};

struct SliceAB {
  double a_tilde = 0.0;
  std::vector<double> b_tilde;
};

inline SliceAB slice_ab(const FixedSlice& s) {
  s.validate();
  SliceAB r;
  r.a_tilde = s.base.a;
  for (int l = 0; l < s.m(); ++l)
    r.a_tilde += s.base.b[static_cast<size_t>(s.free_count + l)] * s.zeta[static_cast<size_t>(l)].real();
  r.b_tilde.assign(s.base.b.begin(), s.base.b.begin() + s.free_count);
  return r;
}

inline UpperPoint join(const UpperPoint& z, const UpperPoint& zeta) {
  UpperPoint out = z;
  out.insert(out.end(), zeta.begin(), zeta.end());
  return out;
}

namespace detail {

// psi(t) on the first n axes times the Poisson kernel of zeta on the remaining axes.
inline Integrand slice_integrand(const TestFunction& psi, int n, const UpperPoint& zeta) {
  Integrand P = psi.integrand(n);
  std::vector<Fn1> tail;
  for (auto& z : zeta) tail.push_back(fn::poisson(z));
  const int N = n + static_cast<int>(zeta.size());
  if (P.separable()) {
    Integrand F;
    F.n = N;
    for (auto part : P.parts) {
      part.factors.insert(part.factors.end(), tail.begin(), tail.end());
      F.parts.push_back(std::move(part));
    }
    F.collect_hints();
    return F;
  }
  auto hints = P.hints;
  hints.resize(static_cast<size_t>(N));
  for (size_t l = 0; l < zeta.size(); ++l) hints[static_cast<size_t>(n) + l] = {zeta[l].real()};
  return Integrand::general(
      N,
      [P, tail, n](const double* t) {
        cplx v = P(t);
        for (size_t l = 0; l < tail.size(); ++l) v *= tail[l](t[static_cast<size_t>(n) + l]);
        return v;
      },
      hints);
}

inline double lebesgue_pairing(const TestFunction& psi, int n, const QuadConfig& q) {
  return pair(corpus::lebesgue(n), psi, q).value;
}

}  // namespace detail

// Integral of psi against the slice measure.
inline double slice_pair(const FixedSlice& s, const TestFunction& psi, const QuadConfig& q = {}) {
  s.validate();
  const int n = s.free_count;
  double lin = 0.0;
  for (int l = 0; l < s.m(); ++l)
    lin += s.base.b[static_cast<size_t>(n + l)] * s.zeta[static_cast<size_t>(l)].imag();
  double v = lin == 0.0 ? 0.0 : lin * detail::lebesgue_pairing(psi, n, q);
  if (!s.base.mu.empty()) {
    Estimate e = integrate(s.base.mu, detail::slice_integrand(psi, n, s.zeta), q);
    if (!std::isfinite(e.value.real())) throw Error(ErrorCode::NonConvergent, "slice pairing did not converge");
    v += e.value.real() / std::pow(kPi, s.m());
  }
  return v;
}

struct CrossCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  StieltjesResult ladder;
};

// slice_pair against Stieltjes inversion of z -> q(z, zeta) evaluated through the representation.
inline CrossCheck slice_stieltjes_cross_check(const FixedSlice& s, const TestFunction& psi,
                                              const std::vector<double>& ladder, const QuadConfig& q = {},
                                              double stab_tol = 1e-4) {
  CrossCheck c;
  c.lhs = slice_pair(s, psi, q);
  const int n = s.free_count;
  if (s.base.mu.empty()) {
    // Im q(x + iy, zeta) is affine in y; the limit is the linear-term pairing exactly.
    c.rhs = c.lhs;
    return c;
  }
  ImQ im = [&](const double* x, const double* y) {
    UpperPoint z;
    for (int l = 0; l < n; ++l) z.emplace_back(x[l], y[l]);
    return eval_representation(s.base, join(z, s.zeta), q).imag();
  };
  c.ladder = stieltjes_pair(im, n, psi, ladder, q, stab_tol);
  c.rhs = c.ladder.value;
  c.gap = std::abs(c.lhs - c.rhs);
  return c;
}

// Five-point Laplacian in zeta of a scalar family.
inline double harmonicity_residual(const std::function<double(cplx)>& family, cplx zeta0, double h) {
  require(zeta0.imag() > 0, ErrorCode::Domain, "zeta must lie in the upper half-plane");
  require(h > 0 && h < zeta0.imag() / 4, ErrorCode::StepTooLarge, "step must be below Im(zeta)/4");
  const double c = family(zeta0);
  return (family(zeta0 + h) + family(zeta0 - h) + family(zeta0 + kI * h) + family(zeta0 - kI * h) - 4 * c) / (h * h);
}

struct SplitRow {
  cplx zeta;
  double singular = 0.0;
  double ac = 0.0;
};

struct SplitReport {
  std::vector<SplitRow> rows;
  Verdict verdict;
};

namespace detail {

// Singular and absolutely continuous parts of the slice pairing for m = 1.
inline std::pair<double, double> split_pairing(const FixedSlice& s, const TestFunction& psi, const QuadConfig& q) {
  const int n = s.free_count;
  const cplx z = s.zeta[0];
  double sing = 0.0, ac = 0.0;
  const double lin = s.base.b[static_cast<size_t>(n)] * z.imag();
  if (lin != 0.0) ac += lin * lebesgue_pairing(psi, n, q);
  for (auto& term : s.base.mu.terms) {
    MeasureSpec one{s.base.dim(), {term}};
    if (auto* pt = std::get_if<ProductTerm>(&term)) {
      const auto& g = pt->factors[static_cast<size_t>(n)];
      double c = 0.0;
      if (auto* le = std::get_if<Lebesgue>(&g)) c = le->coeff;
      else if (auto* d = std::get_if<Dirac>(&g)) {
        double dx = z.real() - d->point;
        c = d->mass * z.imag() / (dx * dx + z.imag() * z.imag()) / kPi;
      } else {
        throw Error(ErrorCode::UnsupportedBase, "frozen factors of product terms must be Lebesgue or Dirac");
      }
      ProductTerm freepart{{pt->factors.begin(), pt->factors.begin() + n}, pt->weight};
      bool singular = false;
      for (auto& f : freepart.factors) singular = singular || std::holds_alternative<Dirac>(f);
      double v = c == 0.0 ? 0.0 : c * pair(MeasureSpec{n, {freepart}}, psi, q).value;
      (singular ? sing : ac) += v;
      continue;
    }
    FixedSlice part = s;
    part.base.b.assign(part.base.b.size(), 0.0);
    part.base.mu = one;
    double v = slice_pair(part, psi, q);
    bool singular = false;
    if (auto* h = std::get_if<HyperplaneTerm>(&term)) singular = h->a[static_cast<size_t>(n)] == 0.0;
    (singular ? sing : ac) += v;
  }
  return {sing, ac};
}

}  // namespace detail

// For m = 1: the singular part of the slice measure must not depend on zeta and the
// absolutely continuous part must vary harmonically.
inline SplitReport singular_split_check(const FixedSlice& s, const std::vector<cplx>& zetas, const TestFunction& psi,
                                        const QuadConfig& q = {}, double spread_tol = 1e-10,
                                        double laplace_tol = 1e-5) {
  require(s.m() == 1, ErrorCode::Invalid, "singular split check probes one frozen variable");
  require(!zetas.empty(), ErrorCode::Invalid, "need at least one zeta");
  SplitReport r;
  double smin = kInf, smax = -kInf, lap = 0.0;
  for (cplx z : zetas) {
    FixedSlice t = s;
    t.zeta = {z};
    t.validate();
    auto [sing, ac] = detail::split_pairing(t, psi, q);
    r.rows.push_back({z, sing, ac});
    smin = std::min(smin, sing);
    smax = std::max(smax, sing);
    auto acf = [&](cplx w) {
      FixedSlice u = s;
      u.zeta = {w};
      return detail::split_pairing(u, psi, q).second;
    };
    const double h = z.imag() / 16;
    const double l1 = harmonicity_residual(acf, z, h), l2 = harmonicity_residual(acf, z, h / 2);
    lap = std::max(lap, std::abs((4 * l2 - l1) / 3));
  }
  const double scale = std::max(std::abs(smin), std::abs(smax));
  const double spread = scale == 0.0 ? 0.0 : (smax - smin) / scale;
  r.verdict.residuals.push_back({"singular_spread", spread, spread_tol});
  r.verdict.residuals.push_back({"ac_laplacian", lap, laplace_tol});
  r.verdict.outcome = r.verdict.from_residuals();
  if (scale == 0.0) r.verdict.note("slice measures are absolutely continuous");
  return r;
}

}  // namespace hn
