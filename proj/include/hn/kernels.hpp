#pragma once

// The integral representation on the poly-upper half-plane: kernel, Poisson kernel,
// evaluation, Poisson extension and Stieltjes inversion.

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "hn/measure.hpp"

namespace hn {

using UpperPoint = std::vector<cplx>;

inline void check_upper(const UpperPoint& z) {
  for (auto& zj : z)
    require(zj.imag() > 0 && std::isfinite(zj.real()) && std::isfinite(zj.imag()), ErrorCode::Domain,
            "points must lie in the open upper half-plane");
}

struct HerglotzParams {
  double a = 0.0;
  std::vector<double> b;
  MeasureSpec mu;

  int dim() const { return mu.dim; }
  void validate(const QuadConfig& q = {}) const {
    require(static_cast<int>(b.size()) == mu.dim, ErrorCode::Invalid, "b has wrong length");
    for (double v : b) require(v >= 0 && std::isfinite(v), ErrorCode::Invalid, "b entries must be >= 0");
    require(std::isfinite(a), ErrorCode::Invalid, "a must be finite");
    mu.validate(q);
  }
};

inline cplx ipow(cplx z, int n) {
  cplx r = 1.0;
  for (int k = 0; k < n; ++k) r *= z;
  return r;
}

inline cplx kernel_Kn(const UpperPoint& z, const std::vector<double>& t) {
  const int n = static_cast<int>(z.size());
  const cplx p2i = ipow(cplx(0.0, 2.0), n);
  cplx g = 1.0, h = 1.0;
  for (int l = 0; l < n; ++l) {
    g *= 1.0 / (t[l] - z[l]) - 1.0 / (t[l] + kI);
    h *= 1.0 / (t[l] - kI) - 1.0 / (t[l] + kI);
  }
  return kI * (2.0 / p2i * g - 1.0 / p2i * h);
}

inline double poisson_halfplane(const UpperPoint& z, const std::vector<double>& t) {
  double p = 1.0;
  for (size_t l = 0; l < z.size(); ++l) {
    double dx = z[l].real() - t[l], y = z[l].imag();
    p *= y / (dx * dx + y * y);
  }
  return p;
}

// K_n(z, .) as a two-part separable integrand.
inline Integrand kernel_integrand(const UpperPoint& z) {
  const int n = static_cast<int>(z.size());
  const cplx p2i = ipow(cplx(0.0, 2.0), n);
  Integrand F;
  F.n = n;
  SepProduct g{kI * 2.0 / p2i, {}}, h{-kI / p2i, {}};
  for (int l = 0; l < n; ++l) {
    g.factors.push_back(fn::kernel_g(z[static_cast<size_t>(l)]));
    h.factors.push_back(fn::kernel_h());
  }
  F.parts = {g, h};
  F.collect_hints();
  return F;
}

inline Integrand poisson_integrand(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<Fn1> f;
  for (size_t l = 0; l < x.size(); ++l) f.push_back(fn::poisson(cplx(x[l], y[l])));
  return Integrand::product(1.0, std::move(f));
}

inline cplx eval_representation(const HerglotzParams& p, const UpperPoint& z, const QuadConfig& q = {}) {
  check_upper(z);
  require(static_cast<int>(z.size()) == p.dim(), ErrorCode::Invalid, "point has wrong dimension");
  cplx v = p.a;
  for (size_t l = 0; l < z.size(); ++l) v += p.b[l] * z[l];
  if (!p.mu.empty()) {
    Estimate e = integrate(p.mu, kernel_integrand(z), q);
    if (!std::isfinite(e.value.real()) || !std::isfinite(e.value.imag()))
      throw Error(ErrorCode::NonConvergent, "representation integral did not converge");
    v += e.value / std::pow(kPi, p.dim());
  }
  return v;
}

inline double poisson_extension(const MeasureSpec& mu, const std::vector<double>& x, const std::vector<double>& y,
                                const QuadConfig& q = {}) {
  for (double yj : y) require(yj > 0, ErrorCode::Domain, "Poisson extension needs y > 0");
  require(static_cast<int>(x.size()) == mu.dim && x.size() == y.size(), ErrorCode::Invalid,
          "point has wrong dimension");
  if (mu.empty()) return 0.0;
  Estimate e = integrate(mu, poisson_integrand(x, y), q);
  return e.value.real() / std::pow(kPi, mu.dim);
}

// Im q(x + i y), vector y.
using ImQ = std::function<double(const double* x, const double* y)>;

inline ImQ im_q_of(const HerglotzParams& p, const QuadConfig& q = {}) {
  return [p, q](const double* x, const double* y) {
    const size_t n = static_cast<size_t>(p.dim());
    double v = 0.0;
    for (size_t l = 0; l < n; ++l) v += p.b[l] * y[l];
    return v + poisson_extension(p.mu, std::vector<double>(x, x + n), std::vector<double>(y, y + n), q);
  };
}

struct StieltjesResult {
  double value = 0.0;
  double spread = 0.0;  // gap between the last two extrapolants
  std::vector<double> ladder_y;
  std::vector<double> ladder_values;
};

inline std::vector<double> default_ladder(double y0 = 0.2, int rungs = 6) {
  std::vector<double> out;
  for (int k = 0; k < rungs; ++k) out.push_back(y0 * std::ldexp(1.0, -k));
  return out;
}

// Polynomial extrapolation of (y_k, v_k) to y = 0 (repeated Richardson).
inline std::vector<double> extrapolate_to_zero(const std::vector<double>& y, const std::vector<double>& v) {
  std::vector<double> p = v, diag;
  const size_t m = y.size();
  diag.push_back(p[m - 1]);
  for (size_t k = 1; k < m; ++k) {
    for (size_t i = 0; i + k < m; ++i) p[i] = (y[i] * p[i + 1] - y[i + k] * p[i]) / (y[i] - y[i + k]);
    diag.push_back(p[0]);
  }
  return diag;  // diag.back() uses every rung
}

// lim_{y -> 0+} integral psi(x) Im q(x + i y 1) dx along the ladder.
// Where Im q(x + i y) concentrates as y -> 0: on the last axis, the hyperplane solved for that
// coordinate; on every axis, the atoms of product factors.
inline HintFn support_hints(const MeasureSpec& mu) {
  return [mu](int k, const double* x) {
    std::vector<double> hs;
    for (auto& term : mu.terms) {
      if (auto* h = std::get_if<HyperplaneTerm>(&term)) {
        const double ak = h->a[static_cast<size_t>(k)];
        if (k == mu.dim - 1 && ak != 0.0) {
          double rest = h->c;
          for (int i = 0; i < k; ++i) rest -= h->a[static_cast<size_t>(i)] * x[i];
          hs.push_back(rest / ak);
        }
      } else if (auto* p = std::get_if<ProductTerm>(&term)) {
        if (auto* d = std::get_if<Dirac>(&p->factors[static_cast<size_t>(k)])) hs.push_back(d->point);
      }
    }
    return hs;
  };
}

namespace detail {

inline void check_ladder(const std::vector<double>& ladder) {
  require(ladder.size() >= 3, ErrorCode::Invalid, "ladder needs at least 3 rungs");
  for (size_t k = 0; k < ladder.size(); ++k) {
    require(ladder[k] > 0, ErrorCode::Invalid, "ladder values must be positive");
    if (k) require(ladder[k] < ladder[k - 1], ErrorCode::Invalid, "ladder must be strictly decreasing");
  }
}

inline void finish_ladder(StieltjesResult& r, double stab_tol) {
  auto ex = extrapolate_to_zero(r.ladder_y, r.ladder_values);
  r.value = ex.back();
  r.spread = std::abs(ex.back() - ex[ex.size() - 2]);
  if (!std::isfinite(r.value) || r.spread > stab_tol * std::max(1.0, std::abs(r.value)))
    throw Error(ErrorCode::NonConvergent, "Stieltjes ladder did not stabilize (spread " + std::to_string(r.spread) + ")");
}

inline LineOptions ladder_options(const QuadConfig& q) {
  LineOptions o = line_options(q);
  o.abs_tol = std::max(q.abs_tol, 1e-9);
  o.rel_tol = std::max(q.rel_tol, 1e-9);
  return o;
}

// t -> integral g(x) y / ((x - t)^2 + y^2) dx
inline Fn1 poisson_smoothed(const Fn1& g, double y, const LineOptions& o) {
  std::optional<cplx> total;
  if (g.line_integral) total = *g.line_integral * kPi;
  // Nested quadrature revisits the same nodes on every axis, so values are memoized.
  auto memo = std::make_shared<std::unordered_map<double, cplx>>();
  return {[g, y, o, memo](double t) {
            if (auto it = memo->find(t); it != memo->end()) return it->second;
            std::vector<double> hs = g.hints;
            hs.push_back(t);
            auto k = [&](double x) {
              const double d = x - t;
              return g(x) * (y / (d * d + y * y));
            };
            const cplx v = integrate_line(k, -kInf, kInf, hs, o).value;
            memo->emplace(t, v);
            return v;
          },
          total, g.hints};
}

// psi convolved with the product Poisson kernel at height y on every axis.
inline Integrand poisson_smoothed(const TestFunction& psi, int n, double y, const LineOptions& o) {
  Integrand P = psi.integrand(n);
  if (P.separable()) {
    for (auto& part : P.parts)
      for (auto& f : part.factors) f = poisson_smoothed(f, y, o);
    P.collect_hints();
    return P;
  }
  return Integrand::general(n, [P, n, y, o](const double* t) {
    std::vector<double> tv(t, t + n);
    auto k = [&](const double* x) {
      double w = 1.0;
      for (int l = 0; l < n; ++l) {
        const double d = x[l] - tv[static_cast<size_t>(l)];
        w *= y / (d * d + y * y);
      }
      return P(x) * w;
    };
    HintFn hs = [&tv](int l, const double*) { return std::vector<double>{tv[static_cast<size_t>(l)]}; };
    return integrate_nested(k, std::vector<Range>(static_cast<size_t>(n)), hs, o).value;
  });
}

}  // namespace detail

// lim_{y -> 0+} integral psi(x) Im q(x + i y 1) dx along the ladder, for a function known only
// through Im q.
inline StieltjesResult stieltjes_pair(const ImQ& im_q, int n, const TestFunction& psi,
                                      const std::vector<double>& ladder, const QuadConfig& q = {},
                                      double stab_tol = 1e-4, const HintFn& hints = {}) {
  detail::check_ladder(ladder);
  StieltjesResult r;
  r.ladder_y = ladder;
  const LineOptions o = detail::ladder_options(q);
  for (double yk : ladder) {
    std::vector<double> yv(static_cast<size_t>(n), yk);
    auto f = [&](const double* x) { return cplx(psi.psi.eval(x) * im_q(x, yv.data())); };
    Estimate e = integrate_nested(f, std::vector<Range>(static_cast<size_t>(n)), hints, o);
    r.ladder_values.push_back(e.value.real());
  }
  detail::finish_ladder(r, stab_tol);
  return r;
}

// Same ladder for a represented function. Each rung is evaluated with the order of integration
// swapped: y (b . 1) integral psi + pi^{-n} integral (P_y * psi)(t) dmu(t).
inline StieltjesResult stieltjes_pair(const HerglotzParams& p, const TestFunction& psi,
                                      const std::vector<double>& ladder, const QuadConfig& q = {},
                                      double stab_tol = 1e-4) {
  detail::check_ladder(ladder);
  const int n = p.dim();
  StieltjesResult r;
  r.ladder_y = ladder;
  const LineOptions o = detail::ladder_options(q);
  double bsum = 0.0;
  for (double b : p.b) bsum += b;
  double psi_mass = 0.0;
  if (bsum != 0.0) {
    Integrand P = psi.integrand(n);
    psi_mass = integrate_nested([&](const double* x) { return P(x); }, std::vector<Range>(static_cast<size_t>(n)),
                                [&](int l, const double*) { return P.hints[static_cast<size_t>(l)]; }, o)
                   .value.real();
  }
  for (double yk : ladder) {
    double v = yk * bsum * psi_mass;
    if (!p.mu.empty()) v += integrate(p.mu, detail::poisson_smoothed(psi, n, yk, o), q).value.real() / std::pow(kPi, n);
    r.ladder_values.push_back(v);
  }
  detail::finish_ladder(r, stab_tol);
  return r;
}

}  // namespace hn
