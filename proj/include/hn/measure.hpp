#pragma once

// Closed-form positive measures on R^n and their basic integrals.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "hn/error.hpp"
#include "hn/expr.hpp"
#include "hn/integrand.hpp"
#include "hn/poly2.hpp"
#include "hn/quadrature.hpp"

namespace hn {

struct Lebesgue {
  double coeff = 1.0;
};
struct Dirac {
  double point = 0.0;
  double mass = 1.0;
};
struct Density1D {
  Expr f;
};
// coeff * (side * t)_+^alpha; produced internally from power-law terms.
struct HalfPower {
  int side = 1;
  double alpha = 0.0;
  double coeff = 1.0;
};
using OneDFactor = std::variant<Lebesgue, Dirac, Density1D, HalfPower>;

struct ProductTerm {
  std::vector<OneDFactor> factors;
  double weight = 1.0;
};

struct DensityTerm {
  Expr f;
};

// a11 (x1)_+^a (x2)_+^a + a12 (x1)_+^a (x2)_-^a + a21 (x1)_-^a (x2)_+^a + a22 (x1)_-^a (x2)_-^a
struct PowerLaw2D {
  double alpha = 0.0;
  std::array<double, 4> a{};
};

// scale * p * H^{n-1} / |a| on {a.x = c}. In the coordinates left after solving a.x = c for
// x_s this is scale * p / a_s times Lebesgue measure, whichever s is used.
struct HyperplaneTerm {
  std::vector<double> a;
  double c = 0.0;
  Poly2 p;
  double scale = 1.0;
};

using MeasureTerm = std::variant<DensityTerm, PowerLaw2D, HyperplaneTerm, ProductTerm>;

struct MeasureSpec {
  int dim = 1;
  std::vector<MeasureTerm> terms;

  void validate(const QuadConfig& q = {}) const;
  bool empty() const { return terms.empty(); }
};

// Solving a.x = c for the coordinate with the largest a_j.
struct PlaneChart {
  int n = 0;
  int solved = 0;
  std::vector<int> free;  // remaining coordinates, in order
  std::vector<double> a;
  double c = 0.0;

  explicit PlaneChart(const std::vector<double>& a_, double c_) : n(static_cast<int>(a_.size())), a(a_), c(c_) {
    solved = 0;
    for (int j = 1; j < n; ++j)
      if (a[j] >= a[solved]) solved = j;
    for (int j = 0; j < n; ++j)
      if (j != solved) free.push_back(j);
  }
  double solve(const double* x_free) const {
    double s = c;
    for (size_t k = 0; k < free.size(); ++k) s -= a[free[k]] * x_free[k];
    return s / a[solved];
  }
  void embed(const double* u, double* x) const {
    for (size_t k = 0; k < free.size(); ++k) x[free[k]] = u[k];
    x[solved] = solve(u);
  }
};

// p restricted to the plane, in the free coordinates of the chart.
inline Poly2f restrict_to_plane(const Poly2& p, const PlaneChart& ch) {
  const int n = ch.n, m = n - 1;
  // x = A [u; 1]
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 1, m + 1);
  for (int k = 0; k < m; ++k) {
    A(ch.free[static_cast<size_t>(k)], k) = 1.0;
    A(ch.solved, k) = -ch.a[static_cast<size_t>(ch.free[static_cast<size_t>(k)])] / ch.a[static_cast<size_t>(ch.solved)];
  }
  A(ch.solved, m) = ch.c / ch.a[static_cast<size_t>(ch.solved)];
  A(n, m) = 1.0;
  auto H = p.homogenized();
  Eigen::MatrixXd M(n + 1, n + 1);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) M(i, j) = to_double(H[static_cast<size_t>(i)][static_cast<size_t>(j)]);
  Eigen::MatrixXd R = A.transpose() * M * A;
  std::vector<std::vector<double>> Rv(static_cast<size_t>(m + 1), std::vector<double>(static_cast<size_t>(m + 1)));
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j) Rv[static_cast<size_t>(i)][static_cast<size_t>(j)] = R(i, j);
  return Poly2f::from_homogenized(Rv);
}

// Smallest eigenvalue of the homogenized form of p; p >= 0 on R^m iff it is >= 0.
inline double min_form_eigenvalue(const Poly2f& p) {
  auto H = p.homogenized();
  const int m = static_cast<int>(H.size());
  Eigen::MatrixXd M(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) M(i, j) = H[static_cast<size_t>(i)][static_cast<size_t>(j)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double form_norm(const Poly2f& p) {
  double s = 0.0;
  for (auto& row : p.homogenized())
    for (double v : row) s = std::max(s, std::abs(v));
  return s;
}

namespace detail {

inline std::vector<double> sample_axis(double box, int k) {
  std::vector<double> pts;
  for (int i = 0; i < k; ++i) {
    double th = -0.5 * kPi + kPi * (i + 0.5) / k;
    pts.push_back(std::clamp(std::tan(th), -4.0 * box, 4.0 * box));
  }
  pts.push_back(0.0);
  return pts;
}

inline void check_nonnegative(const Expr& f, int n, const QuadConfig& q, const std::string& what) {
  const int k = n <= 2 ? 33 : 13;
  auto axis = sample_axis(q.box_halfwidth, k);
  std::vector<size_t> idx(static_cast<size_t>(n), 0);
  std::vector<double> x(static_cast<size_t>(n));
  for (;;) {
    for (int l = 0; l < n; ++l) x[static_cast<size_t>(l)] = axis[idx[static_cast<size_t>(l)]];
    double v = f.eval(x.data());
    if (std::isnan(v) || v < -1e-12) {
      std::string at;
      for (double xi : x) at += (at.empty() ? "" : ",") + std::to_string(xi);
      throw Error(ErrorCode::Invalid, what + " is negative or undefined at (" + at + ")");
    }
    int l = 0;
    while (l < n && ++idx[static_cast<size_t>(l)] == axis.size()) idx[static_cast<size_t>(l++)] = 0;
    if (l == n) break;
  }
}

}  // namespace detail

inline void validate_hyperplane(const HyperplaneTerm& h, int n) {
  require(static_cast<int>(h.a.size()) == n, ErrorCode::Invalid, "hyperplane normal has wrong length");
  int active = 0;
  for (double v : h.a) {
    require(v >= 0 && std::isfinite(v), ErrorCode::Invalid, "hyperplane normal entries must be >= 0");
    active += v > 0;
  }
  require(active >= 2, ErrorCode::Invalid,
          "hyperplane normal needs at least two nonzero entries (coordinate hyperplanes are product terms)");
  require(h.p.vars() == n, ErrorCode::Invalid, "hyperplane density has wrong arity");
  require(h.scale > 0 && std::isfinite(h.scale), ErrorCode::Invalid, "hyperplane scale must be positive");
  require(std::isfinite(h.c), ErrorCode::Invalid, "hyperplane offset must be finite");
  for (int j = 0; j < n; ++j)
    if (h.a[static_cast<size_t>(j)] == 0 && h.p.depends_on(j))
      throw Error(ErrorCode::RejectedDependsOnInactiveVariable,
                  "density depends on x" + std::to_string(j + 1) + " but a_" + std::to_string(j + 1) + " = 0");
  PlaneChart ch(h.a, h.c);
  Poly2f r = restrict_to_plane(h.p, ch);
  double lam = min_form_eigenvalue(r);
  if (lam < -1e-12 * std::max(1.0, form_norm(r)))
    throw Error(ErrorCode::RejectedNegative,
                "density is negative somewhere on the plane (smallest form eigenvalue " + std::to_string(lam) + ")");
}

inline void MeasureSpec::validate(const QuadConfig& q) const {
  require(dim >= 1, ErrorCode::Invalid, "dimension must be positive");
  for (auto& term : terms) {
    std::visit(
        [&](auto&& t) {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, DensityTerm>) {
            require(t.f.max_var() < dim, ErrorCode::Invalid, "density uses a coordinate beyond the dimension");
            detail::check_nonnegative(t.f, dim, q, "density '" + t.f.str() + "'");
          } else if constexpr (std::is_same_v<T, PowerLaw2D>) {
            require(dim == 2, ErrorCode::Invalid, "power-law terms live in dimension 2");
            require(t.alpha > -1 && t.alpha < 1, ErrorCode::Invalid, "power-law exponent must lie in (-1, 1)");
            for (double v : t.a) require(v >= 0, ErrorCode::Invalid, "power-law coefficients must be >= 0");
          } else if constexpr (std::is_same_v<T, HyperplaneTerm>) {
            validate_hyperplane(t, dim);
          } else {
            require(static_cast<int>(t.factors.size()) == dim, ErrorCode::Invalid,
                    "product term needs exactly one factor per coordinate");
            for (auto& f : t.factors) {
              std::visit(
                  [&](auto&& g) {
                    using G = std::decay_t<decltype(g)>;
                    if constexpr (std::is_same_v<G, Lebesgue>) {
                      require(g.coeff >= 0, ErrorCode::Invalid, "Lebesgue coefficient must be >= 0");
                    } else if constexpr (std::is_same_v<G, Dirac>) {
                      require(g.mass >= 0 && std::isfinite(g.point), ErrorCode::Invalid, "Dirac mass must be >= 0");
                    } else if constexpr (std::is_same_v<G, Density1D>) {
                      require(g.f.max_var() <= 0, ErrorCode::Invalid, "one-dimensional density uses t2 or later");
                      detail::check_nonnegative(g.f, 1, q, "density '" + g.f.str() + "'");
                    } else {
                      require(g.coeff >= 0 && g.alpha > -1, ErrorCode::Invalid, "bad half-line power");
                    }
                  },
                  f);
            }
          }
        },
        term);
  }
}

// ---- term rewriting ------------------------------------------------------------------------

inline std::vector<ProductTerm> powerlaw_products(const PowerLaw2D& p) {
  std::vector<ProductTerm> out;
  const int sides[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
  for (int k = 0; k < 4; ++k) {
    if (p.a[static_cast<size_t>(k)] == 0) continue;
    ProductTerm t;
    t.factors = {HalfPower{sides[k][0], p.alpha, 1.0}, HalfPower{sides[k][1], p.alpha, 1.0}};
    t.weight = p.a[static_cast<size_t>(k)];
    out.push_back(std::move(t));
  }
  return out;
}

// A density that factorizes is a sum of product measures.
inline std::optional<std::vector<ProductTerm>> density_products(const DensityTerm& d, int n) {
  auto sep = d.f.separate(n);
  if (!sep) return std::nullopt;
  std::vector<ProductTerm> out;
  for (auto& s : *sep) {
    ProductTerm t;
    t.weight = s.coeff;
    for (auto& slot : s.axes) {
      if (slot) t.factors.emplace_back(Density1D{*slot});
      else t.factors.emplace_back(Lebesgue{1.0});
    }
    out.push_back(std::move(t));
  }
  return out;
}

inline MeasureSpec scaled(MeasureSpec mu, double s) {
  for (auto& term : mu.terms) {
    std::visit(
        [&](auto&& t) {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, DensityTerm>) t.f = Expr::constant(s) * t.f;
          else if constexpr (std::is_same_v<T, PowerLaw2D>)
            for (auto& v : t.a) v *= s;
          else if constexpr (std::is_same_v<T, HyperplaneTerm>) t.scale *= s;
          else t.weight *= s;
        },
        term);
  }
  return mu;
}

inline MeasureSpec operator+(MeasureSpec a, const MeasureSpec& b) {
  require(a.dim == b.dim, ErrorCode::Invalid, "adding measures of different dimension");
  a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
  return a;
}

// ---- integration ---------------------------------------------------------------------------

namespace detail {

inline Estimate factor_integral(const OneDFactor& factor, const Fn1& g, const LineOptions& o) {
  return std::visit(
      [&](auto&& f) -> Estimate {
        using T = std::decay_t<decltype(f)>;
        Estimate e;
        if constexpr (std::is_same_v<T, Lebesgue>) {
          if (f.coeff == 0) return e;
          if (g.line_integral) {
            e.value = f.coeff * *g.line_integral;
            return e;
          }
          return cplx(f.coeff) * integrate_line(g.f, -kInf, kInf, g.hints, o);
        } else if constexpr (std::is_same_v<T, Dirac>) {
          e.value = f.mass == 0 ? cplx(0.0) : f.mass * g(f.point);
          return e;
        } else if constexpr (std::is_same_v<T, Density1D>) {
          const Expr w = f.f;
          return integrate_line([&](double t) { return w(t) * g(t); }, -kInf, kInf, g.hints, o);
        } else {
          const double al = f.alpha;
          if (f.side > 0)
            return cplx(f.coeff) * integrate_line([&](double t) { return std::pow(t, al) * g(t); }, 0.0, kInf, g.hints, o);
          return cplx(f.coeff) * integrate_line([&](double t) { return std::pow(-t, al) * g(t); }, -kInf, 0.0, g.hints, o);
        }
      },
      factor);
}

inline Estimate product_of(const std::vector<Estimate>& es) {
  Estimate out;
  out.value = 1.0;
  for (auto& e : es) out.value *= e.value;
  for (size_t i = 0; i < es.size(); ++i) {
    double others = 1.0;
    for (size_t j = 0; j < es.size(); ++j)
      if (j != i) others *= std::abs(es[j].value);
    out.error += others * es[i].error;
    out.converged = out.converged && es[i].converged;
  }
  return out;
}

inline Estimate integrate_product(const ProductTerm& t, const Integrand& F, const LineOptions& o) {
  const int n = static_cast<int>(t.factors.size());
  Estimate total;
  if (t.weight == 0) return total;
  if (F.separable()) {
    for (auto& part : F.parts) {
      std::vector<Estimate> es;
      bool zero = false;
      for (int l = 0; l < n && !zero; ++l) {
        es.push_back(factor_integral(t.factors[static_cast<size_t>(l)], part.factors[static_cast<size_t>(l)], o));
        zero = es.back().value == cplx(0.0) && es.back().error == 0.0;
      }
      if (zero) continue;
      total += (part.coeff * t.weight) * product_of(es);
    }
    return total;
  }
  // Non-separable integrand: Dirac axes are fixed, the rest are integrated nested.
  std::vector<int> cont;
  std::vector<double> x(static_cast<size_t>(n), 0.0);
  double atom = t.weight;
  std::vector<Range> ranges;
  for (int l = 0; l < n; ++l) {
    const auto& f = t.factors[static_cast<size_t>(l)];
    if (auto* d = std::get_if<Dirac>(&f)) {
      x[static_cast<size_t>(l)] = d->point;
      atom *= d->mass;
    } else {
      cont.push_back(l);
      Range r;
      if (auto* hp = std::get_if<HalfPower>(&f)) r = hp->side > 0 ? Range{0.0, kInf} : Range{-kInf, 0.0};
      ranges.push_back(r);
    }
  }
  if (atom == 0) return total;
  auto w = [&](const double* u) -> cplx {
    std::vector<double> y = x;
    double wt = 1.0;
    for (size_t k = 0; k < cont.size(); ++k) {
      const int l = cont[k];
      y[static_cast<size_t>(l)] = u[k];
      const auto& f = t.factors[static_cast<size_t>(l)];
      if (auto* le = std::get_if<Lebesgue>(&f)) wt *= le->coeff;
      else if (auto* de = std::get_if<Density1D>(&f)) wt *= de->f(u[k]);
      else {
        auto& hp = std::get<HalfPower>(f);
        wt *= hp.coeff * std::pow(hp.side * u[k], hp.alpha);
      }
    }
    return wt == 0 ? cplx(0.0) : wt * F(y.data());
  };
  HintFn hints = [&](int k, const double*) { return F.hints[static_cast<size_t>(cont[static_cast<size_t>(k)])]; };
  return cplx(atom) * integrate_nested(w, ranges, hints, o);
}

inline Estimate integrate_density(const DensityTerm& d, int n, const Integrand& F, const LineOptions& o) {
  if (auto prods = density_products(d, n)) {
    Estimate e;
    for (auto& p : *prods) e += integrate_product(p, F, o);
    return e;
  }
  std::vector<Range> ranges(static_cast<size_t>(n));
  auto w = [&](const double* t) -> cplx {
    double v = d.f.eval(t);
    return v == 0 ? cplx(0.0) : v * F(t);
  };
  // Non-separable densities often ridge along t_k = +-t_j; the earlier coordinates mark those.
  HintFn hints = [&](int k, const double* t) {
    std::vector<double> hs = F.hints[static_cast<size_t>(k)];
    for (int j = 0; j < k; ++j) {
      hs.push_back(t[j]);
      hs.push_back(-t[j]);
    }
    return hs;
  };
  return integrate_nested(w, ranges, hints, o);
}

inline Estimate integrate_hyperplane(const HyperplaneTerm& h, int n, const Integrand& F, const LineOptions& o) {
  PlaneChart ch(h.a, h.c);
  const int m = n - 1;
  const double pre = h.scale / h.a[static_cast<size_t>(ch.solved)];
  std::vector<Range> ranges(static_cast<size_t>(m));
  auto w = [&](const double* u) -> cplx {
    double x[16];
    ch.embed(u, x);
    double pv = h.p.eval(x);
    return pv == 0 ? cplx(0.0) : pre * pv * F(x);
  };
  HintFn hints = [&](int k, const double* u) {
    std::vector<double> hs = F.hints[static_cast<size_t>(ch.free[static_cast<size_t>(k)])];
    if (k == m - 1) {
      const double ak = h.a[static_cast<size_t>(ch.free[static_cast<size_t>(k)])];
      if (ak > 0) {
        double rest = h.c;
        for (int i = 0; i < k; ++i) rest -= h.a[static_cast<size_t>(ch.free[static_cast<size_t>(i)])] * u[i];
        // the solved coordinate crosses 0, where every (1 + x^2)^{-1} weight peaks
        std::vector<double> feats = F.hints[static_cast<size_t>(ch.solved)];
        feats.push_back(0.0);
        for (double xs : feats) hs.push_back((rest - h.a[static_cast<size_t>(ch.solved)] * xs) / ak);
      }
    }
    return hs;
  };
  return integrate_nested(w, ranges, hints, o);
}

}  // namespace detail

inline Estimate integrate_term(const MeasureTerm& term, int n, const Integrand& F, const QuadConfig& q) {
  const LineOptions o = line_options(q);
  return std::visit(
      [&](auto&& t) -> Estimate {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, DensityTerm>) return detail::integrate_density(t, n, F, o);
        else if constexpr (std::is_same_v<T, PowerLaw2D>) {
          Estimate e;
          for (auto& p : powerlaw_products(t)) e += detail::integrate_product(p, F, o);
          return e;
        } else if constexpr (std::is_same_v<T, HyperplaneTerm>) return detail::integrate_hyperplane(t, n, F, o);
        else return detail::integrate_product(t, F, o);
      },
      term);
}

// Integral of F against mu.
inline Estimate integrate(const MeasureSpec& mu, const Integrand& F, const QuadConfig& q) {
  require(F.n == mu.dim, ErrorCode::Invalid, "integrand dimension does not match the measure");
  Estimate e;
  for (auto& term : mu.terms) e += integrate_term(term, mu.dim, F, q);
  return e;
}

inline Integrand growth_integrand(int n) {
  return Integrand::product(1.0, std::vector<Fn1>(static_cast<size_t>(n), fn::growth()));
}

struct RealEstimate {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

inline RealEstimate real_part(const Estimate& e) { return {e.value.real(), e.error, e.converged}; }

// Integral of prod (1 + t_l^2)^{-1} against mu.
inline RealEstimate growth_norm(const MeasureSpec& mu, const QuadConfig& q, double cap = 1e12) {
  Estimate e = integrate(mu, growth_integrand(mu.dim), q);
  double v = e.value.real();
  if (!std::isfinite(v) || v > cap || (!e.converged && e.error > 1e-3 * std::max(1.0, std::abs(v))))
    throw Error(ErrorCode::Divergent, "growth integral does not converge (estimate " + std::to_string(v) +
                                          ", error " + std::to_string(e.error) + ")");
  return real_part(e);
}

// ---- test functions and pairing ------------------------------------------------------------

struct TestFunction {
  Expr psi;
  double bound_const = 1.0;

  // Spot-checks |psi| <= C prod (1 + x^2)^{-1} on a grid.
  void validate(int n, const QuadConfig& q = {}) const {
    require(psi.max_var() < n, ErrorCode::Invalid, "test function uses a coordinate beyond the dimension");
    auto axis = detail::sample_axis(q.box_halfwidth, n <= 2 ? 33 : 13);
    std::vector<size_t> idx(static_cast<size_t>(n), 0);
    std::vector<double> x(static_cast<size_t>(n));
    for (;;) {
      double w = 1.0;
      for (int l = 0; l < n; ++l) {
        x[static_cast<size_t>(l)] = axis[idx[static_cast<size_t>(l)]];
        w *= 1.0 + x[static_cast<size_t>(l)] * x[static_cast<size_t>(l)];
      }
      double v = psi.eval(x.data());
      require(std::isfinite(v) && std::abs(v) * w <= bound_const * (1.0 + 1e-9) + 1e-300, ErrorCode::Invalid,
              "test function '" + psi.str() + "' exceeds its declared bound");
      int l = 0;
      while (l < n && ++idx[static_cast<size_t>(l)] == axis.size()) idx[static_cast<size_t>(l++)] = 0;
      if (l == n) break;
    }
  }

  Integrand integrand(int n) const { return integrand_from_expr(psi, n); }
};

inline RealEstimate pair(const MeasureSpec& mu, const TestFunction& psi, const QuadConfig& q) {
  Estimate e = integrate(mu, psi.integrand(mu.dim), q);
  if (!std::isfinite(e.value.real()))
    throw Error(ErrorCode::NonConvergent, "pairing did not converge");
  return real_part(e);
}

// ---- cube masses ---------------------------------------------------------------------------

namespace detail {

inline double factor_mass(const OneDFactor& factor, double lo, double hi, const LineOptions& o) {
  return std::visit(
      [&](auto&& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Lebesgue>) return f.coeff * (hi - lo);
        else if constexpr (std::is_same_v<T, Dirac>) return (f.point > lo && f.point < hi) ? f.mass : 0.0;
        else if constexpr (std::is_same_v<T, Density1D>) {
          const Expr w = f.f;
          return integrate_line([&](double t) { return cplx(w(t)); }, lo, hi, {}, o).value.real();
        } else {
          double a = f.side > 0 ? std::max(lo, 0.0) : std::max(-hi, 0.0);
          double b = f.side > 0 ? std::max(hi, 0.0) : std::max(-lo, 0.0);
          if (b <= a) return 0.0;
          const double e = f.alpha + 1.0;
          return f.coeff * (std::pow(b, e) - std::pow(a, e)) / e;
        }
      },
      factor);
}

inline double product_mass(const ProductTerm& t, const std::vector<double>& c, double y, const LineOptions& o) {
  double m = t.weight;
  for (size_t l = 0; l < t.factors.size() && m != 0; ++l) m *= factor_mass(t.factors[l], c[l] - y, c[l] + y, o);
  return m;
}

// Interval of u with lo < k*u + d < hi (k may be 0).
inline std::pair<double, double> preimage(double k, double d, double lo, double hi) {
  if (k == 0) return (d > lo && d < hi) ? std::pair{-kInf, kInf} : std::pair{1.0, 0.0};
  double u1 = (lo - d) / k, u2 = (hi - d) / k;
  return {std::min(u1, u2), std::max(u1, u2)};
}

inline double hyperplane_cube_mass(const HyperplaneTerm& h, int n, const std::vector<double>& c, double y,
                                   const LineOptions& o) {
  PlaneChart ch(h.a, h.c);
  const double pre = h.scale / h.a[static_cast<size_t>(ch.solved)];
  const double as = h.a[static_cast<size_t>(ch.solved)];
  const double slo = c[static_cast<size_t>(ch.solved)] - y, shi = c[static_cast<size_t>(ch.solved)] + y;
  auto weight = [&](const double* u) {
    double x[16];
    ch.embed(u, x);
    return pre * h.p.eval(x);
  };
  if (n == 2) {
    const int j = ch.free[0];
    const double aj = h.a[static_cast<size_t>(j)];
    auto [l2, u2] = preimage(-aj / as, h.c / as, slo, shi);
    double L = std::max(c[static_cast<size_t>(j)] - y, l2), U = std::min(c[static_cast<size_t>(j)] + y, u2);
    if (U <= L) return 0.0;
    return gauss3([&](double u) { return weight(&u); }, L, U);
  }
  if (n == 3) {
    const int j = ch.free[0], k = ch.free[1];
    const double aj = h.a[static_cast<size_t>(j)], ak = h.a[static_cast<size_t>(k)];
    // Inner limits for u_k given u_j.
    auto inner = [&](double uj) -> std::pair<double, double> {
      double L = c[static_cast<size_t>(k)] - y, U = c[static_cast<size_t>(k)] + y;
      auto [a2, b2] = preimage(-ak / as, (h.c - aj * uj) / as, slo, shi);
      return {std::max(L, a2), std::min(U, b2)};
    };
    std::vector<double> cuts = {c[static_cast<size_t>(j)] - y, c[static_cast<size_t>(j)] + y};
    if (ak > 0) {
      // constraint limits (h.c - aj uj - as s)/ak for s in {slo, shi} meet the box edges
      for (double s : {slo, shi})
        for (double e : {c[static_cast<size_t>(k)] - y, c[static_cast<size_t>(k)] + y})
          if (aj > 0) cuts.push_back((h.c - as * s - ak * e) / aj);
    } else if (aj > 0) {
      for (double s : {slo, shi}) cuts.push_back((h.c - as * s) / aj);
    }
    std::sort(cuts.begin(), cuts.end());
    const double L0 = c[static_cast<size_t>(j)] - y, U0 = c[static_cast<size_t>(j)] + y;
    double total = 0.0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
      double a = std::max(cuts[i], L0), b = std::min(cuts[i + 1], U0);
      if (b <= a) continue;
      total += gauss3(
          [&](double uj) {
            auto [lk, uk] = inner(uj);
            if (uk <= lk) return 0.0;
            return gauss3(
                [&](double v) {
                  double u[2] = {uj, v};
                  return weight(u);
                },
                lk, uk);
          },
          a, b);
    }
    return total;
  }
  // General dimension: nested adaptive quadrature with the indicator of the solved coordinate.
  std::vector<Range> ranges;
  for (int f : ch.free) ranges.push_back({c[static_cast<size_t>(f)] - y, c[static_cast<size_t>(f)] + y});
  auto w = [&](const double* u) -> cplx {
    double xs = ch.solve(u);
    return (xs > slo && xs < shi) ? cplx(weight(u)) : cplx(0.0);
  };
  return integrate_nested(w, ranges, {}, o).value.real();
}

}  // namespace detail

// mu of the open cube with the given center and halfwidth.
inline double cube_mass(const MeasureSpec& mu, const std::vector<double>& center, double halfwidth,
                        const QuadConfig& q = {}) {
  require(halfwidth > 0, ErrorCode::Invalid, "cube halfwidth must be positive");
  require(static_cast<int>(center.size()) == mu.dim, ErrorCode::Invalid, "cube center has wrong dimension");
  const LineOptions o = line_options(q);
  const double y = halfwidth;
  double total = 0.0;
  for (auto& term : mu.terms) {
    total += std::visit(
        [&](auto&& t) -> double {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, ProductTerm>) return detail::product_mass(t, center, y, o);
          else if constexpr (std::is_same_v<T, PowerLaw2D>) {
            double s = 0.0;
            for (auto& p : powerlaw_products(t)) s += detail::product_mass(p, center, y, o);
            return s;
          } else if constexpr (std::is_same_v<T, HyperplaneTerm>)
            return detail::hyperplane_cube_mass(t, mu.dim, center, y, o);
          else {
            if (auto prods = density_products(t, mu.dim)) {
              double s = 0.0;
              for (auto& p : *prods) s += detail::product_mass(p, center, y, o);
              return s;
            }
            std::vector<Range> ranges;
            for (double c : center) ranges.push_back({c - y, c + y});
            auto w = [&](const double* x) { return cplx(t.f.eval(x)); };
            return integrate_nested(w, ranges, {}, o).value.real();
          }
        },
        term);
  }
  return total;
}

// ---- builders ------------------------------------------------------------------------------

namespace corpus {

inline MeasureSpec lebesgue(int n, double coeff = 1.0) {
  ProductTerm t;
  t.factors.assign(static_cast<size_t>(n), Lebesgue{1.0});
  t.weight = coeff;
  return {n, {t}};
}

inline MeasureSpec product(std::vector<OneDFactor> factors, double weight = 1.0) {
  int n = static_cast<int>(factors.size());
  return {n, {ProductTerm{std::move(factors), weight}}};
}

inline MeasureSpec density(int n, const std::string& expr) { return {n, {DensityTerm{Expr::parse(expr)}}}; }

inline MeasureSpec hyperplane(std::vector<double> a, double c, Poly2 p, double scale) {
  int n = static_cast<int>(a.size());
  return {n, {HyperplaneTerm{std::move(a), c, std::move(p), scale}}};
}

inline MeasureSpec powerlaw(double alpha, std::array<double, 4> a) { return {2, {PowerLaw2D{alpha, a}}}; }

}  // namespace corpus

}  // namespace hn
