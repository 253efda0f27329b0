#pragma once

// Measures on the torus T^n = {|w_l| = 1}, written in angles s in [0, 2pi)^n with w = e^{is}:
// Fourier coefficients, the mixed-sign vanishing test, restrictions to {w_k = 1}, and the
// parameter maps between the half-plane and polydisc pictures.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "hn/kernels.hpp"
#include "hn/measure.hpp"
#include "hn/verdict.hpp"

namespace hn {

// f(s) ds / (2 pi)^n, so f = 1 has unit mass.
struct TorusDensity {
  Expr f;
};
// Point mass at w_k = 1 in slot k (0-based), normalized Lebesgue measure in every other slot.
struct BetaProduct {
  int k = 0;
  double coeff = 1.0;
};
// Image of a half-plane measure: integral F dnu = pi^{-n} integral F(phi(t)) prod (1 + t_l^2)^{-1} dmu.
struct Pushforward {
  MeasureSpec mu;
};
// Test fixture only.
struct TorusAtom {
  std::vector<double> s;
  double mass = 1.0;
};

using TorusTerm = std::variant<TorusDensity, BetaProduct, Pushforward, TorusAtom>;

struct TorusMeasureSpec {
  int dim = 1;
  std::vector<TorusTerm> terms;

  bool empty() const { return terms.empty(); }
  void validate(const QuadConfig& q = {}) const {
    require(dim >= 1, ErrorCode::Invalid, "dimension must be positive");
    for (auto& t : terms) {
      if (auto* d = std::get_if<TorusDensity>(&t)) {
        require(d->f.max_var() < dim, ErrorCode::Invalid, "torus density uses a coordinate beyond the dimension");
        const int k = dim <= 2 ? 32 : 12;
        std::vector<int> idx(static_cast<size_t>(dim), 0);
        std::vector<double> s(static_cast<size_t>(dim));
        for (;;) {
          for (int l = 0; l < dim; ++l) s[static_cast<size_t>(l)] = 2 * kPi * (idx[static_cast<size_t>(l)] + 0.5) / k;
          double v = d->f.eval(s.data());
          require(std::isfinite(v) && v >= -1e-12, ErrorCode::Invalid, "torus density is negative or undefined");
          int l = 0;
          while (l < dim && ++idx[static_cast<size_t>(l)] == k) idx[static_cast<size_t>(l++)] = 0;
          if (l == dim) break;
        }
      } else if (auto* b = std::get_if<BetaProduct>(&t)) {
        require(b->k >= 0 && b->k < dim && b->coeff >= 0, ErrorCode::Invalid, "bad beta term");
      } else if (auto* p = std::get_if<Pushforward>(&t)) {
        require(p->mu.dim == dim, ErrorCode::Invalid, "pushforward measure has wrong dimension");
        p->mu.validate(q);
        if (!p->mu.empty()) growth_norm(p->mu, q);
      } else {
        auto& a = std::get<TorusAtom>(t);
        require(static_cast<int>(a.s.size()) == dim && a.mass >= 0, ErrorCode::Invalid, "bad atom");
      }
    }
  }
};

struct RPParams {
  double A = 0.0;
  TorusMeasureSpec nu;
};

inline cplx cayley(cplx z) {
  require(z.imag() > 0, ErrorCode::Domain, "cayley needs Im z > 0");
  return (z - kI) / (z + kI);
}

inline cplx cayley_inv(cplx w) {
  require(std::abs(w) < 1, ErrorCode::Domain, "cayley_inv needs |w| < 1");
  return kI * (1.0 + w) / (1.0 - w);
}

// Angle of phi(t) = (t - i)/(t + i) in (0, 2 pi).
inline double boundary_angle(double t) { return kPi + 2.0 * std::atan(t); }
inline double boundary_point(double s) { return std::tan(0.5 * (s - kPi)); }

using MultiIndex = std::vector<int>;

namespace detail {

inline size_t next_pow2(size_t v) {
  size_t n = 1;
  while (n < v) n <<= 1;
  return n;
}

// All coefficients |j_l| <= D of f(s) ds/(2pi)^n from an N^n grid.
class DensityCoefficients {
 public:
  DensityCoefficients(const Expr& f, int n, int D, size_t N) : n_(n), N_(N) {
    require(N >= static_cast<size_t>(2 * D + 1), ErrorCode::Invalid, "grid too small for the requested degree");
    size_t total = 1;
    for (int l = 0; l < n; ++l) total *= N;
    std::vector<fftw_complex> buf(total);
    std::vector<double> s(static_cast<size_t>(n));
    for (size_t idx = 0; idx < total; ++idx) {
      size_t r = idx;
      for (int l = n - 1; l >= 0; --l) {
        s[static_cast<size_t>(l)] = 2 * kPi * static_cast<double>(r % N) / static_cast<double>(N);
        r /= N;
      }
      buf[idx][0] = f.eval(s.data());
      buf[idx][1] = 0.0;
    }
    std::vector<int> dims(static_cast<size_t>(n), static_cast<int>(N));
    fftw_plan plan = fftw_plan_dft(n, dims.data(), buf.data(), buf.data(), FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    out_.resize(total);
    const double scale = 1.0 / static_cast<double>(total);
    for (size_t k = 0; k < total; ++k) out_[k] = cplx(buf[k][0], buf[k][1]) * scale;
  }

  cplx operator()(const MultiIndex& j) const {
    size_t idx = 0;
    for (int l = 0; l < n_; ++l) {
      long v = j[static_cast<size_t>(l)];
      idx = idx * N_ + static_cast<size_t>(((v % static_cast<long>(N_)) + static_cast<long>(N_)) % static_cast<long>(N_));
    }
    return out_[idx];
  }

 private:
  int n_;
  size_t N_;
  std::vector<cplx> out_;
};

// e^{-i j Phi(t)} / (1 + t^2): the Fourier factor of one pushed-forward axis.
inline Fn1 pushforward_factor(int j) {
  return {[j](double t) { return std::polar(1.0 / (1.0 + t * t), -j * boundary_angle(t)); },
          j == 0 ? cplx(kPi) : cplx(0.0), {0.0}};
}

}  // namespace detail

// Coefficients of a torus measure for all |j_l| <= D, with aliasing estimates for density terms.
class TorusFourier {
 public:
  TorusFourier(const TorusMeasureSpec& nu, int D, const QuadConfig& q = {}) : nu_(nu), D_(D), q_(q) {
    require(D >= 0, ErrorCode::Invalid, "max degree must be >= 0");
    const size_t N = detail::next_pow2(static_cast<size_t>(2 * D + 1));
    for (auto& t : nu_.terms)
      if (auto* d = std::get_if<TorusDensity>(&t)) {
        coarse_.emplace_back(d->f, nu_.dim, D, N);
        fine_.emplace_back(d->f, nu_.dim, D, 2 * N);
      }
  }

  cplx operator()(const MultiIndex& j) const { return eval(j, nullptr); }

  // Largest change of any density coefficient between the N and 2N grids.
  double aliasing(const MultiIndex& j) const {
    double e = 0.0;
    eval(j, &e);
    return e;
  }

 private:
  cplx eval(const MultiIndex& j, double* alias) const {
    require(static_cast<int>(j.size()) == nu_.dim, ErrorCode::Invalid, "multi-index has wrong length");
    for (int v : j) require(std::abs(v) <= D_, ErrorCode::Invalid, "multi-index exceeds the configured degree");
    cplx total = 0.0;
    size_t dens = 0;
    for (auto& t : nu_.terms) {
      if (std::holds_alternative<TorusDensity>(t)) {
        cplx c = coarse_[dens](j), f = fine_[dens](j);
        if (alias) *alias = std::max(*alias, std::abs(c - f));
        total += f;
        ++dens;
      } else if (auto* b = std::get_if<BetaProduct>(&t)) {
        bool hit = true;
        for (int l = 0; l < nu_.dim; ++l)
          if (l != b->k && j[static_cast<size_t>(l)] != 0) hit = false;
        if (hit) total += b->coeff;
      } else if (auto* p = std::get_if<Pushforward>(&t)) {
        if (p->mu.empty()) continue;
        std::vector<Fn1> f;
        for (int v : j) f.push_back(detail::pushforward_factor(v));
        Estimate e = integrate(p->mu, Integrand::product(1.0, std::move(f)), q_);
        total += e.value / std::pow(kPi, nu_.dim);
      } else {
        auto& a = std::get<TorusAtom>(t);
        double ph = 0.0;
        for (size_t l = 0; l < a.s.size(); ++l) ph -= j[l] * a.s[l];
        total += std::polar(a.mass, ph);
      }
    }
    return total;
  }

  TorusMeasureSpec nu_;
  int D_;
  QuadConfig q_;
  std::vector<detail::DensityCoefficients> coarse_, fine_;
};

inline cplx fourier_coefficient(const TorusMeasureSpec& nu, const MultiIndex& j, const QuadConfig& q = {}) {
  int D = 0;
  for (int v : j) D = std::max(D, std::abs(v));
  return TorusFourier(nu, D, q)(j);
}

inline bool is_mixed_sign(const MultiIndex& j) {
  bool pos = false, neg = false;
  for (int v : j) {
    pos = pos || v > 0;
    neg = neg || v < 0;
  }
  return pos && neg;
}

inline std::vector<MultiIndex> mixed_indices(int n, int D) {
  std::vector<MultiIndex> out;
  MultiIndex j(static_cast<size_t>(n), -D);
  for (;;) {
    if (is_mixed_sign(j)) out.push_back(j);
    int l = 0;
    while (l < n && ++j[static_cast<size_t>(l)] > D) j[static_cast<size_t>(l++)] = -D;
    if (l == n) break;
  }
  return out;
}

inline std::string index_str(const MultiIndex& j) {
  std::string s = "(";
  for (size_t l = 0; l < j.size(); ++l) s += (l ? "," : "") + std::to_string(j[l]);
  return s + ")";
}

struct CoefficientRow {
  MultiIndex j;
  cplx value;
};

// Vanishing of every mixed-sign coefficient with |j_l| <= D.
inline Verdict rp_check(const TorusMeasureSpec& nu, int max_degree, const QuadConfig& q = {}, double tol = 1e-5,
                        std::vector<CoefficientRow>* table = nullptr) {
  require(max_degree >= 1, ErrorCode::Invalid, "max degree must be >= 1");
  Verdict v;
  TorusFourier F(nu, max_degree, q);
  double worst = 0.0;
  MultiIndex at;
  for (auto& j : mixed_indices(nu.dim, max_degree)) {
    cplx c = F(j);
    if (table) table->push_back({j, c});
    if (at.empty() || std::abs(c) > worst) {
      worst = std::abs(c);
      at = j;
    }
  }
  if (nu.dim == 1) {
    v.outcome = Outcome::RP;
    v.note("dimension 1: no mixed-sign indices");
    return v;
  }
  v.residuals.push_back({"max_mixed_coefficient", worst, tol});
  v.outcome = v.all_below() ? Outcome::RP : (v.some_far_above() ? Outcome::NotRP : Outcome::Inconclusive);
  v.note("worst index " + index_str(at));
  return v;
}

struct Restriction {
  double d = 0.0;
  double residual = 0.0;
};

// nu restricted to M_k = {w_k = 1}: beta terms in slot k contribute uniformly; atoms with
// s_k = 0 contribute non-uniformly. Densities and pushforwards do not charge M_k.
inline Restriction restriction_Mk(const TorusMeasureSpec& nu, int k) {
  require(k >= 0 && k < nu.dim, ErrorCode::Invalid, "k out of range");
  Restriction r;
  std::vector<const TorusAtom*> atoms;
  for (auto& t : nu.terms) {
    if (auto* b = std::get_if<BetaProduct>(&t)) {
      if (b->k == k) r.d += b->coeff;
    } else if (auto* a = std::get_if<TorusAtom>(&t)) {
      double sk = std::remainder(a->s[static_cast<size_t>(k)], 2 * kPi);
      if (std::abs(sk) < 1e-14 && a->mass > 0) atoms.push_back(a);
    }
  }
  if (nu.dim == 1) {
    for (auto* a : atoms) r.d += a->mass;
    return r;
  }
  // The restriction is d * (normalized Lebesgue) + atoms; the atoms show up at every unit frequency.
  for (int l = 0; l < nu.dim; ++l) {
    if (l == k) continue;
    cplx c = 0.0;
    for (auto* a : atoms) c += std::polar(a->mass, -a->s[static_cast<size_t>(l)]);
    r.residual = std::max(r.residual, std::abs(c));
  }
  if (!atoms.empty() && r.residual == 0.0)
    for (auto* a : atoms) r.residual += a->mass;
  return r;
}

inline RPParams params_to_rp(const HerglotzParams& p) {
  RPParams r;
  r.A = p.a;
  r.nu.dim = p.dim();
  for (int k = 0; k < p.dim(); ++k)
    if (p.b[static_cast<size_t>(k)] != 0) r.nu.terms.emplace_back(BetaProduct{k, p.b[static_cast<size_t>(k)]});
  if (!p.mu.empty()) r.nu.terms.emplace_back(Pushforward{p.mu});
  return r;
}

inline HerglotzParams rp_to_params(const RPParams& r) {
  HerglotzParams p;
  const int n = r.nu.dim;
  p.a = r.A;
  p.mu.dim = n;
  for (int k = 0; k < n; ++k) p.b.push_back(restriction_Mk(r.nu, k).d);
  for (auto& t : r.nu.terms) {
    if (auto* d = std::get_if<TorusDensity>(&t)) {
      Expr f = d->f;
      for (int l = 0; l < n; ++l)
        f = f.substitute(l, Expr::constant(kPi) + Expr::constant(2.0) * Expr::parse("atan(t" + std::to_string(l + 1) + ")"));
      p.mu.terms.emplace_back(DensityTerm{f});
    } else if (auto* pf = std::get_if<Pushforward>(&t)) {
      p.mu.terms.insert(p.mu.terms.end(), pf->mu.terms.begin(), pf->mu.terms.end());
    } else if (auto* a = std::get_if<TorusAtom>(&t)) {
      bool off = true;
      for (double s : a->s) off = off && std::abs(std::remainder(s, 2 * kPi)) >= 1e-14;
      if (!off || a->mass == 0) continue;
      ProductTerm pt;
      pt.weight = a->mass * std::pow(kPi, n);
      for (double s : a->s) {
        double x = boundary_point(std::fmod(std::fmod(s, 2 * kPi) + 2 * kPi, 2 * kPi));
        pt.weight *= 1.0 + x * x;
        pt.factors.emplace_back(Dirac{x, 1.0});
      }
      p.mu.terms.emplace_back(std::move(pt));
    }
  }
  return p;
}

// Total mass computed on the torus side: every real integration variable u is replaced by an
// angle s with u = tan((s - pi)/2) and integrated by the midpoint rule with N nodes per axis.
inline double torus_mass(const TorusMeasureSpec& nu, int N = 512) {
  require(N >= 8, ErrorCode::Invalid, "need at least 8 nodes per axis");
  const int n = nu.dim;
  // Midpoint rule over (0, 2pi)^m for g(u) (1 + u^2)/2 in each variable.
  auto angle_rule = [N](int m, const std::function<double(const double*)>& g) {
    if (m == 0) return g(nullptr);
    std::vector<int> idx(static_cast<size_t>(m), 0);
    std::vector<double> u(static_cast<size_t>(m));
    const double h = 2 * kPi / N;
    double sum = 0.0;
    for (;;) {
      double jac = 1.0;
      for (int l = 0; l < m; ++l) {
        double x = boundary_point((idx[static_cast<size_t>(l)] + 0.5) * h);
        u[static_cast<size_t>(l)] = x;
        jac *= 0.5 * (1.0 + x * x) * h;
      }
      double v = g(u.data());
      if (v != 0.0) sum += v * jac;
      int l = 0;
      while (l < m && ++idx[static_cast<size_t>(l)] == N) idx[static_cast<size_t>(l++)] = 0;
      if (l == m) break;
    }
    return sum;
  };
  auto growth_w = [](const double* x, int k) {
    double w = 1.0;
    for (int l = 0; l < k; ++l) w /= 1.0 + x[l] * x[l];
    return w;
  };
  double total = 0.0;
  for (auto& t : nu.terms) {
    if (auto* d = std::get_if<TorusDensity>(&t)) {
      // already an angle density
      total += angle_rule(n, [&](const double* u) {
                 std::vector<double> s(static_cast<size_t>(n));
                 double w = 1.0;
                 for (int l = 0; l < n; ++l) {
                   s[static_cast<size_t>(l)] = boundary_angle(u[l]);
                   w *= 2.0 / (1.0 + u[l] * u[l]);
                 }
                 return d->f.eval(s.data()) * w;
               }) /
               std::pow(2 * kPi, n);
    } else if (auto* b = std::get_if<BetaProduct>(&t)) {
      total += b->coeff;
    } else if (auto* a = std::get_if<TorusAtom>(&t)) {
      total += a->mass;
    } else {
      const MeasureSpec& mu = std::get<Pushforward>(t).mu;
      double s = 0.0;
      for (auto& term : mu.terms) {
        std::vector<ProductTerm> prods;
        if (auto* pt = std::get_if<ProductTerm>(&term)) prods.push_back(*pt);
        else if (auto* pl = std::get_if<PowerLaw2D>(&term)) prods = powerlaw_products(*pl);
        else if (auto* dt = std::get_if<DensityTerm>(&term)) {
          if (auto sep = density_products(*dt, n)) prods = *sep;
          else
            s += angle_rule(n, [&](const double* u) { return dt->f.eval(u) * growth_w(u, n); });
        } else {
          auto& h = std::get<HyperplaneTerm>(term);
          PlaneChart ch(h.a, h.c);
          const double pre = h.scale / h.a[static_cast<size_t>(ch.solved)];
          s += angle_rule(n - 1, [&](const double* u) {
            double x[16];
            ch.embed(u, x);
            return pre * h.p.eval(x) * growth_w(x, n);
          });
        }
        for (auto& p : prods) {
          double m = p.weight;
          for (auto& f : p.factors) {
            if (auto* le = std::get_if<Lebesgue>(&f)) m *= le->coeff * angle_rule(1, [](const double* u) { return 1.0 / (1.0 + u[0] * u[0]); });
            else if (auto* di = std::get_if<Dirac>(&f)) m *= di->mass / (1.0 + di->point * di->point);
            else if (auto* de = std::get_if<Density1D>(&f)) m *= angle_rule(1, [&](const double* u) { return de->f(u[0]) / (1.0 + u[0] * u[0]); });
            else {
              auto& hp = std::get<HalfPower>(f);
              m *= hp.coeff * angle_rule(1, [&](const double* u) {
                     double v = hp.side * u[0];
                     return v > 0 ? std::pow(v, hp.alpha) / (1.0 + u[0] * u[0]) : 0.0;
                   });
            }
          }
          s += m;
        }
      }
      total += s / std::pow(kPi, n);
    }
  }
  return total;
}

}  // namespace hn
