#pragma once

// Real polynomials of total degree <= 2 in n variables.
// Poly2 carries exact rational coefficients, Poly2f doubles.

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "hn/error.hpp"

namespace hn {

using Rational = boost::multiprecision::cpp_rational;

// Accepts "3", "-7/2", "0.125", "1.5e-3".
inline Rational parse_rational(const std::string& text) {
  std::string s;
  for (char c : text)
    if (c != ' ') s += c;
  if (s.empty()) throw Error(ErrorCode::Parse, "empty rational");
  auto slash = s.find('/');
  try {
    if (slash != std::string::npos) {
      boost::multiprecision::cpp_int num(s.substr(0, slash)), den(s.substr(slash + 1));
      if (den == 0) throw Error(ErrorCode::Parse, "zero denominator in '" + text + "'");
      return Rational(num, den);
    }
    bool neg = false;
    size_t i = 0;
    if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
    std::string digits;
    int scale = 0;
    bool dot = false;
    for (; i < s.size() && s[i] != 'e' && s[i] != 'E'; ++i) {
      if (s[i] == '.') {
        if (dot) throw Error(ErrorCode::Parse, "bad rational '" + text + "'");
        dot = true;
      } else if (std::isdigit(static_cast<unsigned char>(s[i]))) {
        digits += s[i];
        if (dot) --scale;
      } else {
        throw Error(ErrorCode::Parse, "bad rational '" + text + "'");
      }
    }
    if (i < s.size()) scale += std::stoi(s.substr(i + 1));
    if (digits.empty()) throw Error(ErrorCode::Parse, "bad rational '" + text + "'");
    Rational r{boost::multiprecision::cpp_int(digits)};
    Rational ten(10);
    for (; scale > 0; --scale) r *= ten;
    for (; scale < 0; ++scale) r /= ten;
    return neg ? Rational(-r) : r;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw Error(ErrorCode::Parse, "bad rational '" + text + "'");
  }
}

inline std::string rational_str(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(double r) { return r; }

template <class S>
class BasicPoly2 {
 public:
  using Scalar = S;
  // Multi-degree exponent tuple, total degree <= 2.
  using Monomial = std::vector<int>;

  BasicPoly2() = default;
  explicit BasicPoly2(int n) : n_(n), lin_(static_cast<size_t>(n)), quad_(static_cast<size_t>(n * n)) {}

  static BasicPoly2 constant(int n, S c) {
    BasicPoly2 p(n);
    p.c0_ = c;
    return p;
  }

  static BasicPoly2 from_monomials(int n, const std::map<Monomial, S>& terms) {
    BasicPoly2 p(n);
    for (auto& [m, c] : terms) p.add_monomial(m, c);
    return p;
  }

  void add_monomial(const Monomial& m, const S& c) {
    if (static_cast<int>(m.size()) != n_)
      throw Error(ErrorCode::Invalid, "monomial arity " + std::to_string(m.size()) + " != " + std::to_string(n_));
    int deg = 0;
    std::vector<int> idx;
    for (int j = 0; j < n_; ++j) {
      if (m[static_cast<size_t>(j)] < 0) throw Error(ErrorCode::Invalid, "negative exponent");
      deg += m[static_cast<size_t>(j)];
      for (int r = 0; r < m[static_cast<size_t>(j)]; ++r) idx.push_back(j);
    }
    if (deg > 2) throw Error(ErrorCode::RejectedDegree, "monomial of total degree " + std::to_string(deg) + " exceeds 2");
    if (deg == 0) c0_ += c;
    else if (deg == 1) lin_[static_cast<size_t>(idx[0])] += c;
    else q(idx[0], idx[1]) += c;
  }

  int vars() const { return n_; }
  const S& constant_term() const { return c0_; }
  const S& linear(int j) const { return lin_[static_cast<size_t>(j)]; }
  // Coefficient of x_i x_j (x_i^2 when i == j).
  const S& quad(int i, int j) const { return quad_[static_cast<size_t>(std::min(i, j) * n_ + std::max(i, j))]; }

  int degree() const {
    int d = c0_ != S(0) ? 0 : -1;
    for (int j = 0; j < n_; ++j)
      if (linear(j) != S(0)) d = 1;
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j)
        if (quad(i, j) != S(0)) return 2;
    return d;
  }
  bool is_zero() const { return degree() < 0; }

  bool depends_on(int j) const {
    if (linear(j) != S(0)) return true;
    for (int i = 0; i < n_; ++i)
      if (quad(i, j) != S(0)) return true;
    return false;
  }

  double eval(const double* x) const {
    double v = to_double(c0_);
    for (int i = 0; i < n_; ++i) {
      double li = to_double(linear(i));
      if (li != 0.0) v += li * x[i];
      for (int j = i; j < n_; ++j) {
        double c = to_double(quad(i, j));
        if (c != 0.0) v += c * x[i] * x[j];
      }
    }
    return v;
  }
  double operator()(const std::vector<double>& x) const { return eval(x.data()); }

  // Symmetric (n+1)x(n+1) matrix M with p(x) = [x;1]^T M [x;1].
  std::vector<std::vector<S>> homogenized() const {
    const size_t m = static_cast<size_t>(n_) + 1;
    std::vector<std::vector<S>> M(m, std::vector<S>(m, S(0)));
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) M[i][j] = i == j ? quad(i, i) : quad(i, j) / S(2);
      M[i][n_] = M[n_][i] = linear(i) / S(2);
    }
    M[n_][n_] = c0_;
    return M;
  }

  static BasicPoly2 from_homogenized(const std::vector<std::vector<S>>& M) {
    int n = static_cast<int>(M.size()) - 1;
    BasicPoly2 p(n);
    for (int i = 0; i < n; ++i) {
      p.q(i, i) = M[i][i];
      for (int j = i + 1; j < n; ++j) p.q(i, j) = M[i][j] + M[j][i];
      p.lin_[static_cast<size_t>(i)] = M[i][n] + M[n][i];
    }
    p.c0_ = M[n][n];
    return p;
  }

  std::map<Monomial, S> monomials() const {
    std::map<Monomial, S> out;
    auto put = [&](Monomial m, const S& c) {
      if (c != S(0)) out[m] = c;
    };
    put(Monomial(static_cast<size_t>(n_), 0), c0_);
    for (int i = 0; i < n_; ++i) {
      Monomial m(static_cast<size_t>(n_), 0);
      m[static_cast<size_t>(i)] = 1;
      put(m, linear(i));
      for (int j = i; j < n_; ++j) {
        Monomial mq(static_cast<size_t>(n_), 0);
        mq[static_cast<size_t>(i)] += 1;
        mq[static_cast<size_t>(j)] += 1;
        put(mq, quad(i, j));
      }
    }
    return out;
  }

  BasicPoly2& operator+=(const BasicPoly2& o) {
    check_same(o);
    c0_ += o.c0_;
    for (size_t k = 0; k < lin_.size(); ++k) lin_[k] += o.lin_[k];
    for (size_t k = 0; k < quad_.size(); ++k) quad_[k] += o.quad_[k];
    return *this;
  }
  friend BasicPoly2 operator+(BasicPoly2 a, const BasicPoly2& b) { return a += b; }
  friend BasicPoly2 operator*(const S& s, BasicPoly2 p) {
    p.c0_ *= s;
    for (auto& v : p.lin_) v *= s;
    for (auto& v : p.quad_) v *= s;
    return p;
  }
  friend bool operator==(const BasicPoly2& a, const BasicPoly2& b) {
    return a.n_ == b.n_ && a.c0_ == b.c0_ && a.lin_ == b.lin_ && a.quad_ == b.quad_;
  }

  // Square of the affine form sum_j w_j x_j + w_n.
  static BasicPoly2 square_of_affine(const std::vector<S>& w) {
    int n = static_cast<int>(w.size()) - 1;
    std::vector<std::vector<S>> M(w.size(), std::vector<S>(w.size()));
    for (size_t i = 0; i < w.size(); ++i)
      for (size_t j = 0; j < w.size(); ++j) M[i][j] = w[i] * w[j];
    (void)n;
    return from_homogenized(M);
  }

  std::string str() const {
    std::string out;
    for (auto& [m, c] : monomials()) {
      std::string mono;
      for (int j = 0; j < n_; ++j) {
        int e = m[static_cast<size_t>(j)];
        if (e == 0) continue;
        if (!mono.empty()) mono += "*";
        mono += "x" + std::to_string(j + 1);
        if (e == 2) mono += "^2";
      }
      std::string coeff = scalar_str(c);
      if (!out.empty()) out += " + ";
      if (mono.empty()) out += coeff;
      else if (c == S(1)) out += mono;
      else out += coeff + "*" + mono;
    }
    return out.empty() ? "0" : out;
  }

  template <class T>
  BasicPoly2<T> cast() const {
    BasicPoly2<T> p(n_);
    for (auto& [m, c] : monomials()) p.add_monomial(m, T(to_double(c)));
    return p;
  }

 private:
  int n_ = 0;
  S c0_ = S(0);
  std::vector<S> lin_;
  std::vector<S> quad_;

  S& q(int i, int j) { return quad_[static_cast<size_t>(std::min(i, j) * n_ + std::max(i, j))]; }
  void check_same(const BasicPoly2& o) const {
    if (o.n_ != n_) throw Error(ErrorCode::Invalid, "polynomial arity mismatch");
  }
  static std::string scalar_str(const S& c) {
    if constexpr (std::is_same_v<S, double>) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", c);
      return buf;
    } else {
      return denominator(c) == 1 ? rational_str(c) : "(" + rational_str(c) + ")";
    }
  }
};

using Poly2 = BasicPoly2<Rational>;
using Poly2f = BasicPoly2<double>;

}  // namespace hn
