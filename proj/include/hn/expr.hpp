#pragma once

// Closed-form scalar expressions over R^n.
//
// Grammar (whitespace ignored):
//   expr    := term { ('+' | '-') term }
//   term    := unary { ('*' | '/') unary }
//   unary   := ('-' | '+') unary | power
//   power   := primary [ '^' unary ]            right associative
//   primary := number | constant | variable | func '(' expr ')' | '(' expr ')'
//   constant: pi, e
//   variable: t1..tn, x1..xn, s1..sn (1-based); bare t, x, s mean the first coordinate
//   func    : exp, sqrt, sin, cos, atan

#include <cctype>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hn/error.hpp"

namespace hn {

class Expr;

// One summand of a separated expression: coeff * prod_l axes[l](t_l); an empty slot is 1.
// Each slot is written in the first variable.
struct SepTerm {
  double coeff = 1.0;
  std::vector<std::optional<Expr>> axes;
};

class Expr {
 public:
  enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Exp, Sqrt, Sin, Cos, Atan };

  struct Node {
    Op op = Op::Const;
    double value = 0.0;
    int var = -1;
    std::shared_ptr<const Node> a, b;
  };
  using Ptr = std::shared_ptr<const Node>;

  Expr() : root_(make_const(0.0)) {}
  explicit Expr(Ptr root) : root_(std::move(root)) {}

  static Expr constant(double v) { return Expr(make_const(v)); }
  static Expr variable(int index) {
    auto n = std::make_shared<Node>();
    n->op = Op::Var;
    n->var = index;
    return Expr(n);
  }
  static Expr parse(std::string_view text);

  double eval(const double* x) const { return eval_node(*root_, x); }
  double operator()(std::span<const double> x) const { return eval(x.data()); }
  double operator()(double x) const { return eval(&x); }

  std::set<int> vars() const {
    std::set<int> out;
    collect_vars(*root_, out);
    return out;
  }
  int max_var() const {
    auto v = vars();
    return v.empty() ? -1 : *v.rbegin();
  }
  bool is_constant() const { return vars().empty(); }
  const Ptr& root() const { return root_; }

  std::string str() const {
    if (!source_.empty()) return source_;
    return print(*root_);
  }

  Expr substitute(int var, const Expr& with) const { return Expr(subst(root_, var, with.root_)); }

  // Splits into a finite sum of products of single-variable factors, or nullopt when some
  // factor couples two coordinates.
  std::optional<std::vector<SepTerm>> separate(int n) const;

  friend Expr operator+(const Expr& l, const Expr& r) { return bin(Op::Add, l, r); }
  friend Expr operator-(const Expr& l, const Expr& r) { return bin(Op::Sub, l, r); }
  friend Expr operator*(const Expr& l, const Expr& r) { return bin(Op::Mul, l, r); }
  friend Expr operator/(const Expr& l, const Expr& r) { return bin(Op::Div, l, r); }
  friend Expr pow(const Expr& l, const Expr& r) { return bin(Op::Pow, l, r); }

 private:
  Ptr root_;
  std::string source_;

  static Ptr make_const(double v) {
    auto n = std::make_shared<Node>();
    n->op = Op::Const;
    n->value = v;
    return n;
  }
  static Ptr make(Op op, Ptr a, Ptr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }
  static Expr bin(Op op, const Expr& l, const Expr& r) { return Expr(make(op, l.root_, r.root_)); }

  static double eval_node(const Node& n, const double* x) {
    switch (n.op) {
      case Op::Const: return n.value;
      case Op::Var: return x[n.var];
      case Op::Add: return eval_node(*n.a, x) + eval_node(*n.b, x);
      case Op::Sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
      case Op::Mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
      case Op::Div: return eval_node(*n.a, x) / eval_node(*n.b, x);
      case Op::Pow: {
        const Node& e = *n.b;
        if (e.op == Op::Const && e.value == 2.0) {
          double v = eval_node(*n.a, x);
          return v * v;
        }
        return std::pow(eval_node(*n.a, x), eval_node(e, x));
      }
      case Op::Neg: return -eval_node(*n.a, x);
      case Op::Exp: return std::exp(eval_node(*n.a, x));
      case Op::Sqrt: return std::sqrt(eval_node(*n.a, x));
      case Op::Sin: return std::sin(eval_node(*n.a, x));
      case Op::Cos: return std::cos(eval_node(*n.a, x));
      case Op::Atan: return std::atan(eval_node(*n.a, x));
    }
    return 0.0;
  }

  static void collect_vars(const Node& n, std::set<int>& out) {
    if (n.op == Op::Var) out.insert(n.var);
    if (n.a) collect_vars(*n.a, out);
    if (n.b) collect_vars(*n.b, out);
  }

  static Ptr subst(const Ptr& n, int var, const Ptr& with) {
    if (n->op == Op::Var) return n->var == var ? with : n;
    if (!n->a) return n;
    return make(n->op, subst(n->a, var, with), n->b ? subst(n->b, var, with) : nullptr);
  }

  static std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

  static std::string print(const Node& n) {
    auto fn = [&](const char* f) { return std::string(f) + "(" + print(*n.a) + ")"; };
    switch (n.op) {
      case Op::Const: return n.value < 0 ? "(" + num(n.value) + ")" : num(n.value);
      case Op::Var: return "t" + std::to_string(n.var + 1);
      case Op::Add: return "(" + print(*n.a) + " + " + print(*n.b) + ")";
      case Op::Sub: return "(" + print(*n.a) + " - " + print(*n.b) + ")";
      case Op::Mul: return "(" + print(*n.a) + " * " + print(*n.b) + ")";
      case Op::Div: return "(" + print(*n.a) + " / " + print(*n.b) + ")";
      case Op::Pow: return "(" + print(*n.a) + " ^ " + print(*n.b) + ")";
      case Op::Neg: return "(-" + print(*n.a) + ")";
      case Op::Exp: return fn("exp");
      case Op::Sqrt: return fn("sqrt");
      case Op::Sin: return fn("sin");
      case Op::Cos: return fn("cos");
      case Op::Atan: return fn("atan");
    }
    return "0";
  }

  // Flattens a product tree into (factor, inverted) pairs plus a scalar.
  static bool collect_factors(const Ptr& n, bool inverted, double& coeff,
                              std::vector<std::pair<Ptr, bool>>& out) {
    switch (n->op) {
      case Op::Const:
        coeff *= inverted ? 1.0 / n->value : n->value;
        return true;
      case Op::Neg:
        coeff = -coeff;
        return collect_factors(n->a, inverted, coeff, out);
      case Op::Mul:
        return collect_factors(n->a, inverted, coeff, out) &&
               collect_factors(n->b, inverted, coeff, out);
      case Op::Div:
        return collect_factors(n->a, inverted, coeff, out) &&
               collect_factors(n->b, !inverted, coeff, out);
      case Op::Exp: {
        // exp(a +- b) = exp(a) * exp(+-b)
        std::vector<std::pair<Ptr, double>> summands;
        split_sum(n->a, 1.0, summands);
        if (summands.size() > 1) {
          for (auto& [s, sign] : summands) {
            Ptr arg = sign < 0 ? make(Op::Neg, s) : s;
            if (!collect_factors(make(Op::Exp, arg), inverted, coeff, out)) return false;
          }
          return true;
        }
        break;
      }
      case Op::Pow:
        // (a*b)^c = a^c * b^c for a constant exponent
        if (n->b->op == Op::Const && (n->a->op == Op::Mul || n->a->op == Op::Div)) {
          const bool div = n->a->op == Op::Div;
          return collect_factors(make(Op::Pow, n->a->a, n->b), inverted, coeff, out) &&
                 collect_factors(make(Op::Pow, n->a->b, n->b), div ? !inverted : inverted, coeff, out);
        }
        break;
      default: break;
    }
    std::set<int> v;
    collect_vars(*n, v);
    if (v.empty()) {
      double c = eval_node(*n, nullptr);
      coeff *= inverted ? 1.0 / c : c;
      return true;
    }
    if (v.size() > 1) return false;
    out.emplace_back(n, inverted);
    return true;
  }

  static void split_sum(const Ptr& n, double sign, std::vector<std::pair<Ptr, double>>& out) {
    if (n->op == Op::Add) {
      split_sum(n->a, sign, out);
      split_sum(n->b, sign, out);
    } else if (n->op == Op::Sub) {
      split_sum(n->a, sign, out);
      split_sum(n->b, -sign, out);
    } else if (n->op == Op::Neg) {
      split_sum(n->a, -sign, out);
    } else {
      out.emplace_back(n, sign);
    }
  }

  friend class ExprParser;
};

class ExprParser {
 public:
  explicit ExprParser(std::string_view s) : s_(s) {}

  Expr::Ptr run() {
    auto e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  std::string_view s_;
  size_t pos_ = 0;
  using Op = Expr::Op;

  [[noreturn]] void fail(const std::string& msg) {
    throw Error(ErrorCode::Parse, "expression \"" + std::string(s_) + "\" at column " +
                                      std::to_string(pos_ + 1) + ": " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  Expr::Ptr expr() {
    auto l = term();
    for (;;) {
      if (eat('+')) l = Expr::make(Op::Add, l, term());
      else if (eat('-')) l = Expr::make(Op::Sub, l, term());
      else return l;
    }
  }
  Expr::Ptr term() {
    auto l = unary();
    for (;;) {
      if (eat('*')) l = Expr::make(Op::Mul, l, unary());
      else if (eat('/')) l = Expr::make(Op::Div, l, unary());
      else return l;
    }
  }
  Expr::Ptr unary() {
    if (eat('-')) return Expr::make(Op::Neg, unary());
    if (eat('+')) return unary();
    return power();
  }
  Expr::Ptr power() {
    auto base = primary();
    if (eat('^')) return Expr::make(Op::Pow, base, unary());
    return base;
  }
  Expr::Ptr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return ident();
    fail("unexpected '" + std::string(1, c) + "'");
  }
  Expr::Ptr number() {
    size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      size_t save = pos_++;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    std::string tok(s_.substr(start, pos_ - start));
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) fail("bad number '" + tok + "'");
    return Expr::make_const(v);
  }
  Expr::Ptr ident() {
    size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    std::string id(s_.substr(start, pos_ - start));
    if (id == "pi") return Expr::make_const(std::numbers::pi);
    if (id == "e") return Expr::make_const(std::numbers::e);
    static const std::pair<const char*, Op> funcs[] = {
        {"exp", Op::Exp}, {"sqrt", Op::Sqrt}, {"sin", Op::Sin}, {"cos", Op::Cos}, {"atan", Op::Atan}};
    for (auto& [name, op] : funcs) {
      if (id == name) {
        if (!eat('(')) fail("expected '(' after " + id);
        auto arg = expr();
        if (!eat(')')) fail("expected ')'");
        return Expr::make(op, arg);
      }
    }
    char head = id[0];
    if (head == 't' || head == 'x' || head == 's') {
      if (id.size() == 1) return Expr::variable(0).root();
      bool digits = true;
      for (size_t i = 1; i < id.size(); ++i) digits = digits && std::isdigit(static_cast<unsigned char>(id[i]));
      if (digits) {
        int k = std::stoi(id.substr(1));
        if (k < 1) fail("variables are 1-based");
        return Expr::variable(k - 1).root();
      }
    }
    fail("unknown identifier '" + id + "'");
  }
};

inline Expr Expr::parse(std::string_view text) {
  Expr e(ExprParser(text).run());
  e.source_ = std::string(text);
  return e;
}

inline std::optional<std::vector<SepTerm>> Expr::separate(int n) const {
  std::vector<std::pair<Ptr, double>> summands;
  split_sum(root_, 1.0, summands);
  std::vector<SepTerm> out;
  for (auto& [node, sign] : summands) {
    double coeff = sign;
    std::vector<std::pair<Ptr, bool>> factors;
    if (!collect_factors(node, false, coeff, factors)) return std::nullopt;
    SepTerm term;
    term.coeff = coeff;
    term.axes.assign(static_cast<size_t>(n), std::nullopt);
    std::vector<Ptr> acc(static_cast<size_t>(n));
    for (auto& [f, inv] : factors) {
      int v = *std::begin([&] {
        std::set<int> s;
        collect_vars(*f, s);
        return s;
      }());
      if (v >= n) return std::nullopt;
      Ptr piece = f;
      auto& slot = acc[static_cast<size_t>(v)];
      if (inv) slot = make(Op::Div, slot ? slot : make_const(1.0), piece);
      else slot = slot ? make(Op::Mul, slot, piece) : piece;
    }
    for (int l = 0; l < n; ++l)
      if (acc[static_cast<size_t>(l)])
        term.axes[static_cast<size_t>(l)] = Expr(subst(acc[static_cast<size_t>(l)], l, variable(0).root_));
    out.push_back(std::move(term));
  }
  return out;
}

}  // namespace hn
