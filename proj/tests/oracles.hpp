#pragma once

// Reference values computed without the library's integrators: closed forms and Boost.Math
// quadrature.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using lcplx = std::complex<long double>;
inline const double pi = 3.14159265358979323846;
inline const cplx I{0.0, 1.0};

// ---- closed-form Nevanlinna functions ----------------------------------------------------------

inline cplx q_line(cplx z1, cplx z2) { return -1.0 / (z1 + z2); }
inline cplx q_axes(cplx z1, cplx z2) { return -1.0 / z1 - 1.0 / z2; }
inline cplx q_shifted_line(cplx z1, cplx z2) { return -1.0 / (z1 + z2 + I); }
inline cplx q_r3(cplx z1, cplx z2, cplx z3) {
  return (5.0 * z1 * z2 + 4.0 * z1 * z3 + z2 * z3) / (2.0 * (z1 + 2.0 * z2 + z3));
}
inline cplx q_slope(cplx z1, cplx z2, double al, double be, double ga, double et) {
  return (ga * z1 * z2 - et) / (al * z1 + be * z2);
}

// ---- kernels in extended precision ---------------------------------------------------------------

inline lcplx kernel(const std::vector<cplx>& z, const std::vector<double>& t) {
  const lcplx i(0.0L, 1.0L);
  lcplx g = 1.0L, h = 1.0L, p2i = 1.0L;
  for (size_t l = 0; l < z.size(); ++l) {
    const long double tl = t[l];
    const lcplx zl(z[l].real(), z[l].imag());
    g *= 1.0L / (tl - zl) - 1.0L / (tl + i);
    h *= 1.0L / (tl - i) - 1.0L / (tl + i);
    p2i *= 2.0L * i;
  }
  return i * (2.0L / p2i * g - 1.0L / p2i * h);
}

inline long double poisson(const std::vector<cplx>& z, const std::vector<double>& t) {
  long double p = 1.0L;
  for (size_t l = 0; l < z.size(); ++l) {
    const long double dx = static_cast<long double>(z[l].real()) - t[l], y = z[l].imag();
    p *= y / (dx * dx + y * y);
  }
  return p;
}

// ---- 1D quadrature --------------------------------------------------------------------------------

inline double integral_R(const std::function<double(double)>& f) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -INFINITY, INFINITY, 20, 1e-13);
}

inline double integral(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13);
}

// Integral over R^2 of a smooth, decaying f, iterated.
inline double integral_R2(const std::function<double(double, double)>& f) {
  return integral_R([&](double x) { return integral_R([&](double y) { return f(x, y); }); });
}

// int_0^inf x^alpha e^{-(eps + i xi) x} dx, period by period.
inline cplx regularized_halfline(double alpha, double xi, double eps) {
  boost::math::quadrature::tanh_sinh<double> ts;
  const double P = 2 * pi / std::abs(xi);
  auto re = [&](double x) { return std::pow(x, alpha) * std::exp(-eps * x) * std::cos(xi * x); };
  auto im = [&](double x) { return -std::pow(x, alpha) * std::exp(-eps * x) * std::sin(xi * x); };
  cplx sum(ts.integrate(re, 0.0, P), ts.integrate(im, 0.0, P));
  const double T = 40.0 / eps;
  // one smooth period per panel; a fixed 61-point rule is far below the tolerance here
  using gk = boost::math::quadrature::gauss_kronrod<double, 61>;
  for (double a = P; a < T; a += P) sum += cplx(gk::integrate(re, a, a + P, 0), gk::integrate(im, a, a + P, 0));
  return sum;
}

// eps -> 0 limit from three regularizations (quadratic Richardson in eps).
inline cplx fourier_halfline(double alpha, double xi) {
  const double e = 0.004;
  cplx f1 = regularized_halfline(alpha, xi, e), f2 = regularized_halfline(alpha, xi, e / 2),
       f4 = regularized_halfline(alpha, xi, e / 4);
  cplx r12 = 2.0 * f2 - f1, r24 = 2.0 * f4 - f2;
  return (4.0 * r24 - r12) / 3.0;
}

// ---- torus ----------------------------------------------------------------------------------------

// Fourier coefficient int e^{-i j.s} f(s) ds / (2 pi)^2 by the midpoint rule.
inline cplx torus_coefficient(const std::function<double(double, double)>& f, int j1, int j2, int N = 256) {
  cplx s = 0.0;
  const double h = 2 * pi / N;
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      const double s1 = (a + 0.5) * h, s2 = (b + 0.5) * h;
      s += f(s1, s2) * std::polar(1.0, -(j1 * s1 + j2 * s2));
    }
  return s / double(N * N);
}

// Coefficients of the pushforward of the line measure pi H^1 on {t1 + t2 = 0}: the k = j1 - j2
// harmonic of (1 - cos s) / (4 pi) on the circle.
inline cplx line_pushforward_coefficient(int j1, int j2) {
  const int k = std::abs(j1 - j2);
  return k == 0 ? 0.5 : k == 1 ? -0.25 : 0.0;
}

}  // namespace oracle
