#pragma once

// Adaptive Gauss-Kronrod (21 point) integration over intervals, half-lines and R, plus
// nested use over boxes. Infinite tails are folded onto (0, 1] by t = T / u.

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "hn/error.hpp"

namespace hn {

using cplx = std::complex<double>;
inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

// Quadrature budget. points_per_axis / 16 sets the initial panel count on [-box, box],
// refinement_levels bounds adaptive bisection (panels <= initial * 2^levels).
struct QuadConfig {
  double box_halfwidth = 50.0;
  int points_per_axis = 256;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int refinement_levels = 6;

  void validate() const {
    require(box_halfwidth > 0, ErrorCode::Invalid, "box_halfwidth must be positive");
    require(points_per_axis >= 16 && points_per_axis % 2 == 0, ErrorCode::Invalid,
            "points_per_axis must be even and >= 16");
    require(abs_tol > 0 && rel_tol > 0, ErrorCode::Invalid, "tolerances must be positive");
    require(refinement_levels >= 0, ErrorCode::Invalid, "refinement_levels must be >= 0");
  }
};

struct Estimate {
  cplx value{0.0, 0.0};
  double error = 0.0;
  bool converged = true;

  Estimate& operator+=(const Estimate& o) {
    value += o.value;
    error += o.error;
    converged = converged && o.converged;
    return *this;
  }
  friend Estimate operator*(cplx s, Estimate e) {
    e.value *= s;
    e.error *= std::abs(s);
    return e;
  }
};

struct LineOptions {
  int pieces = 16;
  int max_panels = 1200;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double box = 50.0;
};

inline LineOptions line_options(const QuadConfig& q, int piece_divisor = 16) {
  LineOptions o;
  o.pieces = std::max(4, q.points_per_axis / piece_divisor);
  o.max_panels = (o.pieces + 8) << std::min(q.refinement_levels, 12);
  o.abs_tol = q.abs_tol;
  o.rel_tol = q.rel_tol;
  o.box = q.box_halfwidth;
  return o;
}

namespace detail {

struct GK21 {
  std::array<double, 11> x{}, wk{}, wg{};
  GK21() {
    using boost::math::quadrature::gauss;
    using boost::math::quadrature::gauss_kronrod;
    const auto& xa = gauss_kronrod<double, 21>::abscissa();
    const auto& wka = gauss_kronrod<double, 21>::weights();
    const auto& wga = gauss<double, 10>::weights();
    for (size_t i = 0; i < 11; ++i) {
      x[i] = xa[i];
      wk[i] = wka[i];
      wg[i] = (i % 2 == 1) ? wga[i / 2] : 0.0;
    }
  }
};

inline const GK21& gk21() {
  static const GK21 rule;
  return rule;
}

enum class Map { Identity, RightTail, LeftTail };

struct Panel {
  double a, b;
  Map map;
  double T;
  cplx val;
  double err;
};

template <class F>
inline void eval_panel(const F& f, Panel& p) {
  const auto& r = gk21();
  const double c = 0.5 * (p.a + p.b), h = 0.5 * (p.b - p.a);
  auto g = [&](double u) -> cplx {
    switch (p.map) {
      case Map::Identity: return f(u);
      case Map::RightTail: return f(p.T / u) * (p.T / (u * u));
      case Map::LeftTail: return f(-p.T / u) * (p.T / (u * u));
    }
    return 0.0;
  };
  cplx fc = g(c);
  cplx k = fc * r.wk[0], gs = 0.0;
  for (size_t i = 1; i < 11; ++i) {
    cplx s = g(c - h * r.x[i]) + g(c + h * r.x[i]);
    k += s * r.wk[i];
    gs += s * r.wg[i];
  }
  p.val = k * h;
  p.err = std::abs((k - gs) * h);
  if (!std::isfinite(p.val.real()) || !std::isfinite(p.val.imag())) p.err = kInf;
}

}  // namespace detail

// Integrates f over [lo, hi]; either end may be infinite. Hints are abscissae where f has
// sharp features (they become panel breakpoints).
template <class F>
Estimate integrate_line(const F& f, double lo, double hi, const std::vector<double>& hints,
                        const LineOptions& o) {
  using detail::Map;
  using detail::Panel;
  Estimate out;
  if (!(hi > lo)) return out;

  double B = o.box;
  for (double h : hints)
    if (std::isfinite(h)) B = std::max(B, 1.25 * std::abs(h) + 1.0);

  std::vector<Panel> panels;
  auto push = [&](double a, double b, Map m, double T) { panels.push_back({a, b, m, T, 0.0, 0.0}); };

  double mlo = lo, mhi = hi;
  if (std::isinf(lo)) {
    const double T = std::isinf(hi) || hi > -B ? B : -hi;
    mlo = -T;
    push(0.0, 0.5, Map::LeftTail, T);
    push(0.5, 1.0, Map::LeftTail, T);
  }
  if (std::isinf(hi)) {
    const double T = std::isinf(lo) || lo < B ? B : lo;
    mhi = T;
    push(0.0, 0.5, Map::RightTail, T);
    push(0.5, 1.0, Map::RightTail, T);
  }
  if (mhi > mlo) {
    std::vector<double> cuts;
    const int pieces = std::isinf(lo) || std::isinf(hi) ? o.pieces : std::max(2, o.pieces / 2);
    for (int k = 0; k <= pieces; ++k) cuts.push_back(mlo + (mhi - mlo) * k / pieces);
    if (mlo < 0.0 && mhi > 0.0) cuts.push_back(0.0);
    // Geometric grading around each hint so narrow features never hide between nodes.
    for (double h : hints) {
      if (!(h > mlo && h < mhi)) continue;
      cuts.push_back(h);
      for (double w = 1.0 / 16; w < mhi - mlo; w *= 4) {
        if (h - w > mlo) cuts.push_back(h - w);
        if (h + w < mhi) cuts.push_back(h + w);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(), [&](double a, double b) {
                 return std::abs(a - b) <= 1e-13 * (1.0 + std::abs(a));
               }),
               cuts.end());
    for (size_t k = 0; k + 1 < cuts.size(); ++k) push(cuts[k], cuts[k + 1], Map::Identity, 0.0);
  }

  for (auto& p : panels) detail::eval_panel(f, p);
  auto cmp = [](const Panel& a, const Panel& b) { return a.err < b.err; };
  std::make_heap(panels.begin(), panels.end(), cmp);

  auto totals = [&] {
    cplx v = 0.0;
    double e = 0.0;
    for (auto& p : panels) {
      v += p.val;
      e += p.err;
    }
    return std::pair{v, e};
  };
  auto [val, err] = totals();
  int iter = 0;
  while (err > std::max(o.abs_tol, o.rel_tol * std::abs(val)) &&
         static_cast<int>(panels.size()) < o.max_panels) {
    std::pop_heap(panels.begin(), panels.end(), cmp);
    Panel worst = panels.back();
    double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) || worst.b - worst.a < 1e-15 * (1.0 + std::abs(mid))) {
      // Cannot bisect further; freeze this panel.
      panels.back().err = 0.0;
      std::push_heap(panels.begin(), panels.end(), cmp);
      out.converged = false;
      std::tie(val, err) = totals();
      continue;
    }
    panels.pop_back();
    Panel l{worst.a, mid, worst.map, worst.T, 0.0, 0.0};
    Panel r{mid, worst.b, worst.map, worst.T, 0.0, 0.0};
    detail::eval_panel(f, l);
    detail::eval_panel(f, r);
    val += l.val + r.val - worst.val;
    err += l.err + r.err - worst.err;
    panels.push_back(l);
    std::push_heap(panels.begin(), panels.end(), cmp);
    panels.push_back(r);
    std::push_heap(panels.begin(), panels.end(), cmp);
    if (++iter % 64 == 0 || !std::isfinite(err)) std::tie(val, err) = totals();
  }
  std::tie(val, err) = totals();
  out.value = val;
  out.error = err;
  out.converged = out.converged && err <= std::max(o.abs_tol, o.rel_tol * std::abs(val)) && std::isfinite(err);
  return out;
}

struct Range {
  double lo = -kInf;
  double hi = kInf;
};

// Hints for axis k given the already fixed coordinates t[0..k-1].
using HintFn = std::function<std::vector<double>(int k, const double* t)>;

// Iterated integral of f over the box r[0] x ... x r[d-1]. The innermost axis is d-1.
inline Estimate integrate_nested(const std::function<cplx(const double*)>& f, const std::vector<Range>& r,
                                 const HintFn& hints, const LineOptions& o) {
  const int d = static_cast<int>(r.size());
  if (d == 0) {
    Estimate e;
    e.value = f(nullptr);
    return e;
  }
  std::vector<double> t(static_cast<size_t>(d), 0.0);
  bool converged = true;
  std::function<Estimate(int)> level = [&](int k) -> Estimate {
    auto g = [&](double x) -> cplx {
      t[static_cast<size_t>(k)] = x;
      if (k == d - 1) return f(t.data());
      Estimate in = level(k + 1);
      converged = converged && in.converged;
      return in.value;
    };
    LineOptions lo = o;
    if (k > 0) {
      lo.abs_tol = o.abs_tol * 0.1;
    }
    std::vector<double> h = hints ? hints(k, t.data()) : std::vector<double>{};
    return integrate_line(g, r[static_cast<size_t>(k)].lo, r[static_cast<size_t>(k)].hi, h, lo);
  };
  Estimate e = level(0);
  e.converged = e.converged && converged;
  return e;
}

// Exact for polynomials of degree <= 5 on [a, b].
template <class F>
double gauss3(const F& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 3>::integrate(f, a, b);
}

}  // namespace hn
