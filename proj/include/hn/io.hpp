#pragma once

// JSON encodings of the data types and "a+bi" complex strings.

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "hn/fixed_variable.hpp"
#include "hn/hyperplane.hpp"
#include "hn/kernels.hpp"
#include "hn/measure.hpp"
#include "hn/polydisc.hpp"
#include "hn/verdict.hpp"

namespace hn {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// ---- complex strings -----------------------------------------------------------------------

inline std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // drop negative zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

inline std::string format_complex(cplx z) {
  std::string im = format_double(std::abs(z.imag()));
  return format_double(z.real()) + (std::signbit(z.imag()) && z.imag() != 0.0 ? "-" : "+") + im + "i";
}

inline double parse_number(const std::string& s, const std::string& what) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw Error(ErrorCode::Parse, "bad number '" + s + "' in " + what);
  }
  if (used != s.size()) throw Error(ErrorCode::Parse, "bad number '" + s + "' in " + what);
  return v;
}

// Accepts "a", "bi", "a+bi", "a-bi", "i", "-i".
inline cplx parse_complex(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw Error(ErrorCode::Parse, "empty complex number");
  if (s.back() != 'i') return {parse_number(s, "'" + text + "'"), 0.0};
  s.pop_back();
  size_t split = std::string::npos;
  for (size_t k = s.size(); k-- > 1;)
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  std::string re = split == std::string::npos ? "" : s.substr(0, split);
  std::string im = split == std::string::npos ? s : s.substr(split);
  double imv = im.empty() || im == "+" ? 1.0 : im == "-" ? -1.0 : parse_number(im, "'" + text + "'");
  double rev = re.empty() ? 0.0 : parse_number(re, "'" + text + "'");
  return {rev, imv};
}

// Comma separated list of complex numbers.
inline UpperPoint parse_point(const std::string& text) {
  UpperPoint z;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) z.push_back(parse_complex(item));
  return z;
}

// ---- reading with field paths --------------------------------------------------------------

namespace detail {

inline const json& field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw Error(ErrorCode::Parse, path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::Parse, path + ": missing field '" + key + "'");
  return *it;
}

inline double get_double(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_number(j.get<std::string>(), path);
  throw Error(ErrorCode::Parse, path + ": expected a number");
}

inline double get_double(const json& j, const char* key, const std::string& path, std::optional<double> dflt = {}) {
  if (dflt && (!j.is_object() || !j.contains(key))) return *dflt;
  return get_double(field(j, key, path), path + "." + key);
}

inline int get_int(const json& j, const char* key, const std::string& path) {
  const json& v = field(j, key, path);
  if (!v.is_number_integer()) throw Error(ErrorCode::Parse, path + "." + key + ": expected an integer");
  return v.get<int>();
}

inline std::string get_string(const json& j, const char* key, const std::string& path) {
  const json& v = field(j, key, path);
  if (!v.is_string()) throw Error(ErrorCode::Parse, path + "." + key + ": expected a string");
  return v.get<std::string>();
}

inline std::vector<double> get_doubles(const json& j, const char* key, const std::string& path) {
  const json& v = field(j, key, path);
  if (!v.is_array()) throw Error(ErrorCode::Parse, path + "." + key + ": expected an array");
  std::vector<double> out;
  for (size_t k = 0; k < v.size(); ++k) out.push_back(get_double(v[k], path + "." + key + "[" + std::to_string(k) + "]"));
  return out;
}

inline Expr get_expr(const json& j, const std::string& path) {
  std::string text = get_string(j, "expr", path);
  try {
    return Expr::parse(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::Parse, path + ".expr: " + e.what());
  }
}

inline std::string kind_of(const json& j, const std::string& path) { return get_string(j, "kind", path); }

}  // namespace detail

inline Poly2 poly2_from_json(const json& j, int n, const std::string& path = "poly") {
  if (!j.is_object()) throw Error(ErrorCode::Parse, path + ": expected an object of monomials");
  Poly2 p(n);
  for (auto& [key, val] : j.items()) {
    std::string k = key;
    if (k.size() < 2 || k.front() != '(' || k.back() != ')')
      throw Error(ErrorCode::Parse, path + ": monomial key '" + key + "' must look like (2,0)");
    std::vector<int> m;
    std::stringstream ss(k.substr(1, k.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        size_t used = 0;
        int e = std::stoi(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
        m.push_back(e);
      } catch (const std::exception&) {
        throw Error(ErrorCode::Parse, path + ": bad exponent in '" + key + "'");
      }
    }
    Rational c;
    if (val.is_string()) c = parse_rational(val.get<std::string>());
    else if (val.is_number_integer()) c = Rational(val.get<long long>());
    else if (val.is_number()) c = parse_rational(val.dump());
    else throw Error(ErrorCode::Parse, path + "[" + key + "]: expected a rational string");
    if (static_cast<int>(m.size()) != n)
      throw Error(ErrorCode::Parse, path + ": monomial '" + key + "' has arity " + std::to_string(m.size()) +
                                        ", expected " + std::to_string(n));
    p.add_monomial(m, c);
  }
  return p;
}

inline ojson poly2_to_json(const Poly2& p) {
  ojson j = ojson::object();
  for (auto& [m, c] : p.monomials()) {
    std::string k = "(";
    for (size_t l = 0; l < m.size(); ++l) k += (l ? "," : "") + std::to_string(m[l]);
    j[k + ")"] = rational_str(c);
  }
  return j;
}

inline OneDFactor factor_from_json(const json& j, const std::string& path) {
  std::string kind = detail::kind_of(j, path);
  if (kind == "lebesgue") return Lebesgue{detail::get_double(j, "coeff", path, 1.0)};
  if (kind == "dirac") return Dirac{detail::get_double(j, "point", path), detail::get_double(j, "mass", path, 1.0)};
  if (kind == "density1d") return Density1D{detail::get_expr(j, path)};
  throw Error(ErrorCode::Parse, path + ".kind: unknown factor kind '" + kind + "'");
}

inline MeasureSpec measure_from_json(const json& j, const std::string& path = "measure") {
  MeasureSpec mu;
  mu.dim = detail::get_int(j, "dim", path);
  if (mu.dim < 1) throw Error(ErrorCode::Parse, path + ".dim: must be positive");
  const json& terms = detail::field(j, "terms", path);
  if (!terms.is_array()) throw Error(ErrorCode::Parse, path + ".terms: expected an array");
  for (size_t k = 0; k < terms.size(); ++k) {
    const json& t = terms[k];
    const std::string tp = path + ".terms[" + std::to_string(k) + "]";
    std::string kind = detail::kind_of(t, tp);
    if (kind == "density") {
      mu.terms.emplace_back(DensityTerm{detail::get_expr(t, tp)});
    } else if (kind == "powerlaw2d") {
      auto a = detail::get_doubles(t, "a", tp);
      if (a.size() != 4) throw Error(ErrorCode::Parse, tp + ".a: expected [a11,a12,a21,a22]");
      mu.terms.emplace_back(PowerLaw2D{detail::get_double(t, "alpha", tp), {a[0], a[1], a[2], a[3]}});
    } else if (kind == "hyperplane") {
      HyperplaneTerm h;
      h.a = detail::get_doubles(t, "a", tp);
      h.c = detail::get_double(t, "c", tp, 0.0);
      h.p = poly2_from_json(detail::field(t, "poly", tp), mu.dim, tp + ".poly");
      h.scale = detail::get_double(t, "scale", tp, 1.0);
      mu.terms.emplace_back(std::move(h));
    } else if (kind == "product") {
      ProductTerm p;
      const json& fs = detail::field(t, "factors", tp);
      if (!fs.is_array()) throw Error(ErrorCode::Parse, tp + ".factors: expected an array");
      for (size_t l = 0; l < fs.size(); ++l) p.factors.push_back(factor_from_json(fs[l], tp + ".factors[" + std::to_string(l) + "]"));
      p.weight = detail::get_double(t, "weight", tp, 1.0);
      mu.terms.emplace_back(std::move(p));
    } else {
      throw Error(ErrorCode::Parse, tp + ".kind: unknown term kind '" + kind + "'");
    }
  }
  return mu;
}

inline ojson factor_to_json(const OneDFactor& f) {
  return std::visit(
      [](auto&& g) -> ojson {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, Lebesgue>) return {{"kind", "lebesgue"}, {"coeff", g.coeff}};
        else if constexpr (std::is_same_v<G, Dirac>) return {{"kind", "dirac"}, {"point", g.point}, {"mass", g.mass}};
        else if constexpr (std::is_same_v<G, Density1D>) return {{"kind", "density1d"}, {"expr", g.f.str()}};
        else return {{"kind", "halfpower"}, {"side", g.side}, {"alpha", g.alpha}, {"coeff", g.coeff}};
      },
      f);
}

inline ojson measure_to_json(const MeasureSpec& mu) {
  ojson terms = ojson::array();
  for (auto& term : mu.terms) {
    terms.push_back(std::visit(
        [](auto&& t) -> ojson {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, DensityTerm>) return {{"kind", "density"}, {"expr", t.f.str()}};
          else if constexpr (std::is_same_v<T, PowerLaw2D>)
            return {{"kind", "powerlaw2d"}, {"alpha", t.alpha}, {"a", {t.a[0], t.a[1], t.a[2], t.a[3]}}};
          else if constexpr (std::is_same_v<T, HyperplaneTerm>)
            return {{"kind", "hyperplane"}, {"a", t.a}, {"c", t.c}, {"poly", poly2_to_json(t.p)}, {"scale", t.scale}};
          else {
            ojson fs = ojson::array();
            for (auto& f : t.factors) fs.push_back(factor_to_json(f));
            return {{"kind", "product"}, {"factors", fs}, {"weight", t.weight}};
          }
        },
        term));
  }
  return {{"dim", mu.dim}, {"terms", terms}};
}

inline HerglotzParams params_from_json(const json& j, const std::string& path = "params") {
  HerglotzParams p;
  p.a = detail::get_double(j, "a", path, 0.0);
  p.mu = measure_from_json(detail::field(j, "mu", path), path + ".mu");
  if (j.contains("b")) p.b = detail::get_doubles(j, "b", path);
  else p.b.assign(static_cast<size_t>(p.mu.dim), 0.0);
  return p;
}

inline ojson params_to_json(const HerglotzParams& p) {
  return {{"a", p.a}, {"b", p.b}, {"mu", measure_to_json(p.mu)}};
}

inline HyperplaneData hyperplane_from_json(const json& j, const std::string& path = "hyperplane") {
  HyperplaneData h;
  h.a = detail::get_doubles(j, "a", path);
  if (h.a.empty()) throw Error(ErrorCode::Parse, path + ".a: must be nonempty");
  h.c = detail::get_double(j, "c", path, 0.0);
  h.p = poly2_from_json(detail::field(j, "poly", path), static_cast<int>(h.a.size()), path + ".poly");
  return h;
}

inline TorusMeasureSpec torus_from_json(const json& j, const std::string& path = "torus") {
  TorusMeasureSpec nu;
  nu.dim = detail::get_int(j, "dim", path);
  const json& terms = detail::field(j, "terms", path);
  if (!terms.is_array()) throw Error(ErrorCode::Parse, path + ".terms: expected an array");
  for (size_t k = 0; k < terms.size(); ++k) {
    const json& t = terms[k];
    const std::string tp = path + ".terms[" + std::to_string(k) + "]";
    std::string kind = detail::kind_of(t, tp);
    if (kind == "torus_density") nu.terms.emplace_back(TorusDensity{detail::get_expr(t, tp)});
    else if (kind == "beta")
      nu.terms.emplace_back(BetaProduct{detail::get_int(t, "k", tp) - 1, detail::get_double(t, "coeff", tp, 1.0)});
    else if (kind == "pushforward") nu.terms.emplace_back(Pushforward{measure_from_json(detail::field(t, "mu", tp), tp + ".mu")});
    else if (kind == "atom")
      nu.terms.emplace_back(TorusAtom{detail::get_doubles(t, "point", tp), detail::get_double(t, "mass", tp, 1.0)});
    else throw Error(ErrorCode::Parse, tp + ".kind: unknown torus term kind '" + kind + "'");
  }
  return nu;
}

inline ojson torus_to_json(const TorusMeasureSpec& nu) {
  ojson terms = ojson::array();
  for (auto& term : nu.terms) {
    if (auto* d = std::get_if<TorusDensity>(&term)) terms.push_back({{"kind", "torus_density"}, {"expr", d->f.str()}});
    else if (auto* b = std::get_if<BetaProduct>(&term)) terms.push_back({{"kind", "beta"}, {"k", b->k + 1}, {"coeff", b->coeff}});
    else if (auto* p = std::get_if<Pushforward>(&term)) terms.push_back({{"kind", "pushforward"}, {"mu", measure_to_json(p->mu)}});
    else {
      auto& a = std::get<TorusAtom>(term);
      terms.push_back({{"kind", "atom"}, {"point", a.s}, {"mass", a.mass}});
    }
  }
  return {{"dim", nu.dim}, {"terms", terms}};
}

inline TestFunction test_function_from_json(const json& j, const std::string& path = "psi") {
  TestFunction f;
  f.psi = detail::get_expr(j, path);
  f.bound_const = detail::get_double(j, "bound", path, 1.0);
  return f;
}

inline void apply_quad_overrides(const json& j, QuadConfig& q, const std::string& path = "quad") {
  if (!j.is_object()) throw Error(ErrorCode::Parse, path + ": expected an object");
  if (j.contains("box_halfwidth")) q.box_halfwidth = detail::get_double(j, "box_halfwidth", path);
  if (j.contains("points_per_axis")) q.points_per_axis = detail::get_int(j, "points_per_axis", path);
  if (j.contains("abs_tol")) q.abs_tol = detail::get_double(j, "abs_tol", path);
  if (j.contains("rel_tol")) q.rel_tol = detail::get_double(j, "rel_tol", path);
  if (j.contains("refinement_levels")) q.refinement_levels = detail::get_int(j, "refinement_levels", path);
  q.validate();
}

inline ojson quad_to_json(const QuadConfig& q) {
  return {{"box_halfwidth", q.box_halfwidth},
          {"points_per_axis", q.points_per_axis},
          {"abs_tol", q.abs_tol},
          {"rel_tol", q.rel_tol},
          {"refinement_levels", q.refinement_levels}};
}

inline ojson verdict_to_json(const Verdict& v) {
  ojson j;
  to_json(j, v);
  return j;
}

// Reads a JSON file; syntax errors report line and column.
inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    size_t line = 1, col = 1;
    for (size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::Parse, path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

}  // namespace hn
