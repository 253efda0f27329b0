#pragma once

// Integrands over R^n. Most kernels in this library are finite sums of products of
// one-variable factors; keeping that structure lets product measures integrate axis by axis
// and lets Lebesgue factors use closed forms.

#include <functional>
#include <optional>
#include <vector>

#include "hn/expr.hpp"
#include "hn/quadrature.hpp"

namespace hn {

struct Fn1 {
  std::function<cplx(double)> f;
  std::optional<cplx> line_integral;  // value of the integral over R when known
  std::vector<double> hints;
  cplx operator()(double t) const { return f(t); }
};

struct SepProduct {
  cplx coeff{1.0, 0.0};
  std::vector<Fn1> factors;
};

struct Integrand {
  int n = 0;
  std::vector<SepProduct> parts;  // used when `full` is empty
  std::function<cplx(const double*)> full;
  std::vector<std::vector<double>> hints;

  bool separable() const { return !full; }

  cplx operator()(const double* t) const {
    if (full) return full(t);
    cplx s = 0.0;
    for (auto& p : parts) {
      cplx v = p.coeff;
      for (size_t l = 0; l < p.factors.size(); ++l) v *= p.factors[l](t[l]);
      s += v;
    }
    return s;
  }

  static Integrand product(cplx coeff, std::vector<Fn1> factors) {
    Integrand F;
    F.n = static_cast<int>(factors.size());
    F.parts.push_back({coeff, std::move(factors)});
    F.collect_hints();
    return F;
  }

  static Integrand general(int n, std::function<cplx(const double*)> f,
                           std::vector<std::vector<double>> hints = {}) {
    Integrand F;
    F.n = n;
    F.full = std::move(f);
    F.hints = std::move(hints);
    F.hints.resize(static_cast<size_t>(n));
    return F;
  }

  void collect_hints() {
    hints.assign(static_cast<size_t>(n), {});
    for (auto& p : parts)
      for (size_t l = 0; l < p.factors.size(); ++l)
        for (double h : p.factors[l].hints) hints[l].push_back(h);
  }

  Integrand& operator+=(const Integrand& o) {
    if (separable() && o.separable()) {
      parts.insert(parts.end(), o.parts.begin(), o.parts.end());
      collect_hints();
      return *this;
    }
    Integrand a = *this, b = o;
    *this = general(n, [a, b](const double* t) { return a(t) + b(t); }, merged_hints(a, b));
    return *this;
  }

  static std::vector<std::vector<double>> merged_hints(const Integrand& a, const Integrand& b) {
    auto h = a.hints;
    h.resize(static_cast<size_t>(a.n));
    for (size_t l = 0; l < h.size() && l < b.hints.size(); ++l)
      h[l].insert(h[l].end(), b.hints[l].begin(), b.hints[l].end());
    return h;
  }
};

// Pointwise product; stays separable when both sides are.
inline Integrand multiply(const Integrand& a, const Integrand& b) {
  if (a.separable() && b.separable()) {
    Integrand F;
    F.n = a.n;
    for (auto& pa : a.parts)
      for (auto& pb : b.parts) {
        SepProduct p;
        p.coeff = pa.coeff * pb.coeff;
        for (size_t l = 0; l < pa.factors.size(); ++l) {
          const Fn1 fa = pa.factors[l], fb = pb.factors[l];
          Fn1 g;
          g.f = [fa, fb](double t) { return fa(t) * fb(t); };
          g.hints = fa.hints;
          g.hints.insert(g.hints.end(), fb.hints.begin(), fb.hints.end());
          p.factors.push_back(std::move(g));
        }
        F.parts.push_back(std::move(p));
      }
    F.collect_hints();
    return F;
  }
  return Integrand::general(
      a.n, [a, b](const double* t) { return a(t) * b(t); }, Integrand::merged_hints(a, b));
}

// Common one-variable factors.
namespace fn {

inline Fn1 one() { return {[](double) { return cplx(1.0); }, std::nullopt, {}}; }

inline Fn1 growth() { return {[](double t) { return cplx(1.0 / (1.0 + t * t)); }, cplx(kPi), {}}; }

// Im z / |z - t|^2
inline Fn1 poisson(cplx z) {
  return {[z](double t) {
            double dx = z.real() - t;
            return cplx(z.imag() / (dx * dx + z.imag() * z.imag()));
          },
          cplx(kPi), {z.real()}};
}

// 1/(t - z) - 1/(t + i)
inline Fn1 kernel_g(cplx z) {
  return {[z](double t) { return 1.0 / (t - z) - 1.0 / (t + kI); }, cplx(0.0, 2.0 * kPi), {z.real()}};
}

// 1/(t - i) - 1/(t + i) = 2i/(1 + t^2)
inline Fn1 kernel_h() {
  return {[](double t) { return cplx(0.0, 2.0 / (1.0 + t * t)); }, cplx(0.0, 2.0 * kPi), {}};
}

// 1/(t - w)^2 for non-real w
inline Fn1 cauchy_sq(cplx w) {
  return {[w](double t) {
            cplx d = t - w;
            return 1.0 / (d * d);
          },
          cplx(0.0), {w.real()}};
}

// 1/(t - z) - 1/(t - conj z)
inline Fn1 cauchy_diff(cplx z) {
  return {[z](double t) { return 1.0 / (t - z) - 1.0 / (t - std::conj(z)); },
          cplx(0.0, z.imag() > 0 ? 2.0 * kPi : -2.0 * kPi), {z.real()}};
}

inline Fn1 expr(const Expr& e) {
  return {[e](double t) { return cplx(e(t)); }, std::nullopt, {}};
}

}  // namespace fn

// An expression as an integrand; separable whenever the expression factorizes.
inline Integrand integrand_from_expr(const Expr& e, int n) {
  if (auto sep = e.separate(n)) {
    Integrand F;
    F.n = n;
    for (auto& term : *sep) {
      SepProduct p;
      p.coeff = term.coeff;
      for (auto& slot : term.axes) p.factors.push_back(slot ? fn::expr(*slot) : fn::one());
      F.parts.push_back(std::move(p));
    }
    F.collect_hints();
    return F;
  }
  return Integrand::general(n, [e](const double* t) { return cplx(e.eval(t)); });
}

}  // namespace hn
