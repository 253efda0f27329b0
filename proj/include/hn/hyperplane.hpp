#pragma once

// Measures carried by hyperplanes {a.x = c} with a >= 0: validation, extremality and
// decomposition of the density into squares of affine forms.

#include <cmath>
#include <string>
#include <vector>

#include "hn/classifier.hpp"
#include "hn/measure.hpp"
#include "hn/poly2.hpp"
#include "hn/verdict.hpp"

namespace hn {

struct HyperplaneData {
  std::vector<double> a;
  double c = 0.0;
  Poly2 p;

  int dim() const { return static_cast<int>(a.size()); }
};

// Throws RejectedDependsOnInactiveVariable / RejectedNegative (RejectedDegree is raised when
// the polynomial is built). On success the growth integral of the unit-scale measure is
// checked to be finite.
inline Verdict validate(const HyperplaneData& h, const QuadConfig& q = {}) {
  HyperplaneTerm t{h.a, h.c, h.p, 1.0};
  validate_hyperplane(t, h.dim());
  Verdict v;
  PlaneChart ch(h.a, h.c);
  Poly2f r = restrict_to_plane(h.p, ch);
  double lam = min_form_eigenvalue(r);
  v.residuals.push_back({"negativity_on_plane", std::max(0.0, -lam), 1e-12 * std::max(1.0, form_norm(r))});
  if (!h.p.is_zero()) {
    RealEstimate g = growth_norm(MeasureSpec{h.dim(), {t}}, q);
    char buf[64];
    std::snprintf(buf, sizeof buf, "growth integral %.12g", g.value);
    v.note(buf);
  } else {
    v.note("zero density");
  }
  v.outcome = Outcome::Nevanlinna;
  return v;
}

inline MeasureSpec to_measure(const HyperplaneData& h, double scale, const QuadConfig& q = {}) {
  require(scale > 0 && std::isfinite(scale), ErrorCode::Invalid, "scale must be positive");
  validate(h, q);
  if (h.p.is_zero()) return MeasureSpec{h.dim(), {}};
  return MeasureSpec{h.dim(), {HyperplaneTerm{h.a, h.c, h.p, scale}}};
}

// Constant >= 0 or the square of an affine form: the homogenized matrix is PSD of rank <= 1.
inline bool is_extremal(const Poly2& p, int active_dim) {
  require(p.vars() == active_dim, ErrorCode::Invalid, "polynomial arity differs from the active dimension");
  auto M = p.homogenized();
  const size_t m = M.size();
  for (size_t i = 0; i < m; ++i)
    if (M[i][i] < 0) return false;
  for (size_t i = 0; i < m; ++i)
    for (size_t j = i + 1; j < m; ++j)
      for (size_t k = 0; k < m; ++k)
        for (size_t l = k + 1; l < m; ++l)
          if (M[i][k] * M[j][l] - M[i][l] * M[j][k] != 0) return false;
  return true;
}

// Exact LDL^T on the homogenized matrix (variables first, constant last). Each nonzero pivot
// d_k contributes d_k (x_k + sum_{i>k} l_ik x_i)^2; the last pivot is the constant.
inline std::vector<Poly2> decompose_extremal(const Poly2& p) {
  auto M = p.homogenized();
  const size_t m = M.size();
  const int n = p.vars();
  std::vector<Poly2> parts;
  for (size_t k = 0; k < m; ++k) {
    const Rational d = M[k][k];
    if (d < 0) throw Error(ErrorCode::NotDecomposable, "polynomial takes negative values");
    if (d == 0) {
      for (size_t i = k + 1; i < m; ++i)
        if (M[i][k] != 0) throw Error(ErrorCode::NotDecomposable, "polynomial takes negative values");
      continue;
    }
    if (k + 1 == m) {
      parts.push_back(Poly2::constant(n, d));
      break;
    }
    std::vector<Rational> w(m, Rational(0));
    for (size_t i = k; i < m; ++i) w[i] = M[i][k] / d;
    parts.push_back(d * Poly2::square_of_affine(w));
    for (size_t i = k; i < m; ++i)
      for (size_t j = k; j < m; ++j) M[i][j] -= d * w[i] * w[j];
  }
  return parts;
}

inline bool verify_decomposition(const Poly2& p, const std::vector<Poly2>& parts) {
  Poly2 s(p.vars());
  for (auto& q : parts) {
    if (!is_extremal(q, p.vars())) return false;
    s += q;
  }
  return s == p;
}

// Float path for decompositions with irrational coefficients.
inline bool verify_decomposition(const Poly2f& p, const std::vector<Poly2f>& parts, double tol = 1e-9) {
  Poly2f s(p.vars());
  for (auto& q : parts) {
    auto M = q.homogenized();
    Eigen::MatrixXd E(static_cast<Eigen::Index>(M.size()), static_cast<Eigen::Index>(M.size()));
    for (size_t i = 0; i < M.size(); ++i)
      for (size_t j = 0; j < M.size(); ++j) E(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = M[i][j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(E, Eigen::EigenvaluesOnly);
    auto ev = es.eigenvalues();
    const double top = std::max(1.0, ev.maxCoeff());
    if (ev.minCoeff() < -tol * top) return false;
    if (ev.size() >= 2 && ev(ev.size() - 2) > tol * top) return false;
    s += q;
  }
  auto a = s.homogenized(), b = p.homogenized();
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a.size(); ++j)
      if (std::abs(a[i][j] - b[i][j]) > tol) return false;
  return true;
}

// mu(L) for L = {normal . x = offset} with a normal of mixed sign. Infinite when a product term
// puts Lebesgue mass along L.
inline double mixed_normal_restriction(const MeasureSpec& mu, const std::vector<double>& normal, double offset,
                                       const QuadConfig& q = {}) {
  require(static_cast<int>(normal.size()) == mu.dim, ErrorCode::Invalid, "normal has wrong dimension");
  bool pos = false, neg = false;
  for (double v : normal) {
    pos = pos || v > 0;
    neg = neg || v < 0;
  }
  require(pos && neg, ErrorCode::Invalid, "normal lies in a closed orthant; need entries of both signs");
  const LineOptions o = line_options(q);
  double total = 0.0;
  for (auto& term : mu.terms) {
    // Density and power-law terms are absolutely continuous. A hyperplane term with a >= 0 never
    // coincides with L, so it meets L in a set of dimension n - 2.
    auto* pt = std::get_if<ProductTerm>(&term);
    if (!pt || pt->weight == 0) continue;
    double atom = pt->weight, dot = 0.0;
    bool continuous_normal = false;
    double free_mass = 1.0;
    for (size_t l = 0; l < pt->factors.size(); ++l) {
      const auto& f = pt->factors[l];
      if (auto* d = std::get_if<Dirac>(&f)) {
        atom *= d->mass;
        dot += normal[l] * d->point;
        continue;
      }
      if (normal[l] != 0) continuous_normal = true;
      if (auto* le = std::get_if<Lebesgue>(&f)) free_mass *= le->coeff == 0 ? 0.0 : kInf;
      else if (auto* de = std::get_if<Density1D>(&f)) {
        const Expr w = de->f;
        free_mass *= integrate_line([&](double t) { return cplx(w(t)); }, -kInf, kInf, {}, o).value.real();
      } else {
        free_mass *= std::get<HalfPower>(f).coeff == 0 ? 0.0 : kInf;
      }
    }
    if (atom == 0 || continuous_normal) continue;
    if (std::abs(dot - offset) > 1e-12 * (1.0 + std::abs(offset))) continue;
    total += free_mass == 0 ? 0.0 : atom * free_mass;
  }
  return total;
}

}  // namespace hn
